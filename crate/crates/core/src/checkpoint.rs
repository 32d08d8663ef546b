//! Binary checkpoint format.
//!
//! ```text
//! "PWCN1"
//! u32 LE metadata length, then that many bytes of UTF-8 `key=value` lines
//! 11 tensors in FIELD_NAMES order, each:
//!     u32 LE rank (1 or 2), rank × u32 LE dims, row-major f32 LE values
//! ```

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::nn::{HyperParams, ModelParams, FIELD_NAMES};
use crate::proximity::ProximityMode;
use crate::scalar::Scalar;

pub const MAGIC: &[u8; 5] = b"PWCN1";

/// Indices into `FIELD_NAMES` stored with rank 1.
const VECTOR_FIELDS: [usize; 4] = [3, 6, 8, 10];

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointMeta {
    pub hyper: HyperParams,
    pub vocab_size: usize,
    pub vocab_hash: String,
    pub mode: ProximityMode,
    pub seed: u64,
    /// Any further keys, written verbatim.
    pub extra: BTreeMap<String, String>,
}

impl CheckpointMeta {
    fn to_text(&self) -> String {
        let h = &self.hyper;
        let mut s = format!(
            "embed_dim={}\nhidden_dim={}\nnum_classes={}\nkernel_len={}\nvocab_size={}\nvocab_hash={}\nmode={}\nseed={}\n",
            h.embed_dim, h.hidden_dim, h.num_classes, h.kernel_len, self.vocab_size, self.vocab_hash, self.mode, self.seed
        );
        for (k, v) in &self.extra {
            s += &format!("{k}={v}\n");
        }
        s
    }

    fn from_text(text: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for line in text.lines().filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Checkpoint(format!("bad metadata line {line:?}")))?;
            map.insert(k.to_owned(), v.to_owned());
        }
        let mut take = |key: &str| {
            map.remove(key)
                .ok_or_else(|| Error::Checkpoint(format!("metadata lacks {key}")))
        };
        let num = |v: String, key: &str| -> Result<usize> {
            v.parse()
                .map_err(|_| Error::Checkpoint(format!("metadata {key} is not a number")))
        };
        let hyper = HyperParams {
            embed_dim: num(take("embed_dim")?, "embed_dim")?,
            hidden_dim: num(take("hidden_dim")?, "hidden_dim")?,
            num_classes: num(take("num_classes")?, "num_classes")?,
            kernel_len: num(take("kernel_len")?, "kernel_len")?,
        };
        let vocab_size = num(take("vocab_size")?, "vocab_size")?;
        let vocab_hash = take("vocab_hash")?;
        let mode = take("mode")?
            .parse()
            .map_err(|e: Error| Error::Checkpoint(e.to_string()))?;
        let seed = take("seed")?
            .parse()
            .map_err(|_| Error::Checkpoint("metadata seed is not a number".into()))?;
        Ok(CheckpointMeta {
            hyper,
            vocab_size,
            vocab_hash,
            mode,
            seed,
            extra: map,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub meta: CheckpointMeta,
    pub params: ModelParams<f32>,
}

impl Checkpoint {
    pub fn new<T: Scalar>(meta: CheckpointMeta, params: &ModelParams<T>) -> Self {
        Checkpoint {
            meta,
            params: params.cast(),
        }
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        let meta = self.meta.to_text();
        w.write_all(&(meta.len() as u32).to_le_bytes())?;
        w.write_all(meta.as_bytes())?;
        let shapes = self.params.shapes();
        for (k, ((rows, cols), data)) in shapes.into_iter().zip(self.params.tensors()).enumerate() {
            let dims: &[usize] = if VECTOR_FIELDS.contains(&k) {
                &[cols]
            } else {
                &[rows, cols]
            };
            w.write_all(&(dims.len() as u32).to_le_bytes())?;
            for &d in dims {
                w.write_all(&(d as u32).to_le_bytes())?;
            }
            let mut buf = Vec::with_capacity(data.len() * 4);
            for v in data {
                buf.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&buf)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 5];
        read_exact(&mut r, &mut magic, "magic")?;
        if &magic != MAGIC {
            return Err(Error::Checkpoint("not a PWCN1 checkpoint".into()));
        }
        let meta_len = read_u32(&mut r, "metadata length")? as usize;
        let mut meta = vec![0u8; meta_len];
        read_exact(&mut r, &mut meta, "metadata")?;
        let meta = String::from_utf8(meta)
            .map_err(|_| Error::Checkpoint("metadata is not UTF-8".into()))?;
        let meta = CheckpointMeta::from_text(&meta)?;
        meta.hyper
            .validate()
            .map_err(|e| Error::Checkpoint(e.to_string()))?;

        let mut params = ModelParams::<f32>::zeros(meta.hyper, meta.vocab_size);
        let shapes = params.shapes();
        for (k, ((name, (rows, cols)), tensor)) in FIELD_NAMES
            .iter()
            .zip(shapes)
            .zip(params.tensors_mut())
            .enumerate()
        {
            let rank = read_u32(&mut r, name)? as usize;
            let want_rank = if VECTOR_FIELDS.contains(&k) { 1 } else { 2 };
            if rank != want_rank {
                return Err(Error::Checkpoint(format!("{name}: rank {rank}, expected {want_rank}")));
            }
            let mut dims = Vec::with_capacity(rank);
            for _ in 0..rank {
                dims.push(read_u32(&mut r, name)? as usize);
            }
            let got = if rank == 1 { (1, dims[0]) } else { (dims[0], dims[1]) };
            if got != (rows, cols) {
                return Err(Error::Checkpoint(format!(
                    "{name}: stored shape {got:?}, expected {:?}",
                    (rows, cols)
                )));
            }
            let mut buf = vec![0u8; tensor.len() * 4];
            read_exact(&mut r, &mut buf, name)?;
            for (v, bytes) in tensor.iter_mut().zip(buf.chunks_exact(4)) {
                *v = f32::from_le_bytes([bytes[0], bytes[1], bytes[2], bytes[3]]);
            }
        }
        let mut rest = [0u8; 1];
        if r.read(&mut rest)? != 0 {
            return Err(Error::Checkpoint("trailing bytes after last tensor".into()));
        }
        Ok(Checkpoint { meta, params })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(file);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_from(std::io::BufReader::new(file))
    }
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => {
            Error::Checkpoint(format!("truncated while reading {what}"))
        }
        _ => Error::Io(e),
    })
}

fn read_u32<R: Read>(r: &mut R, what: &str) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}
