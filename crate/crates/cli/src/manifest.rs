//! Run manifest: resolved configuration, inputs and their content hashes as
//! `key<TAB>value` lines.

use std::fs::File;
use std::io::{self, Read};
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{io_at, CliResult};

/// SHA-256 over `blob <len>\0` followed by the file bytes, so the digest
/// depends on content alone and not on the path or timestamps.
pub fn file_hash(path: &Path) -> CliResult<String> {
    let mut file = File::open(path).map_err(io_at(path))?;
    let len = file.metadata().map_err(io_at(path))?.len();
    let mut hasher = Sha256::new();
    hasher.update(format!("blob {len}\0").as_bytes());
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(io_at(path))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex(&hasher.finalize()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Default)]
pub struct RunManifest {
    entries: Vec<(String, String)>,
    inputs: Vec<(String, String)>,
}

impl RunManifest {
    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_owned(), value.to_string()));
    }

    /// Records an input file under `role` along with its content hash.
    pub fn input(&mut self, role: &str, path: &Path) -> CliResult<()> {
        let digest = file_hash(path)?;
        self.set(&format!("input.{role}"), path.display());
        self.set(&format!("input.{role}.hash"), &digest);
        self.inputs.push((role.to_owned(), digest));
        Ok(())
    }

    /// Digest over every input's role and hash, in insertion order.
    pub fn input_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for (role, digest) in &self.inputs {
            hasher.update(format!("{role}\0{digest}\n").as_bytes());
        }
        hex(&hasher.finalize())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s += &format!("{k}\t{v}\n");
        }
        s += &format!("input_hash\t{}\n", self.input_hash());
        s
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_text())
    }
}
