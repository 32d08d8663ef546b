use crate::error::{Error, Result};

/// Dependency structure of one sentence: a head per token, `None` for roots.
///
/// More than one root is allowed; each root spans its own tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepForest {
    heads: Vec<Option<usize>>,
    tree_id: Vec<usize>,
}

impl DepForest {
    /// Validates the head array: indices in range, no self-loops, no cycles.
    pub fn new(heads: Vec<Option<usize>>) -> Result<Self> {
        let n = heads.len();
        if n == 0 {
            return Err(Error::Structure("empty dependency forest".into()));
        }
        for (i, h) in heads.iter().enumerate() {
            match *h {
                Some(h) if h == i => {
                    return Err(Error::Structure(format!("token {i} is its own head")))
                }
                Some(h) if h >= n => {
                    return Err(Error::Structure(format!(
                        "token {i} has head {h} outside sentence of {n} tokens"
                    )))
                }
                _ => {}
            }
        }

        let mut tree_id = vec![usize::MAX; n];
        for start in 0..n {
            let mut cur = start;
            let mut steps = 0;
            let root = loop {
                if tree_id[cur] != usize::MAX {
                    break tree_id[cur];
                }
                match heads[cur] {
                    None => break cur,
                    Some(h) => cur = h,
                }
                steps += 1;
                if steps > n {
                    return Err(Error::Structure(format!(
                        "cycle in dependency heads reachable from token {start}"
                    )));
                }
            };
            let mut cur = start;
            while tree_id[cur] == usize::MAX {
                tree_id[cur] = root;
                match heads[cur] {
                    Some(h) => cur = h,
                    None => break,
                }
            }
        }
        Ok(DepForest { heads, tree_id })
    }

    /// Builds from 1-based CoNLL-U heads where 0 marks the root.
    pub fn from_conllu_heads(heads: &[usize]) -> Result<Self> {
        Self::new(heads.iter().map(|&h| h.checked_sub(1)).collect())
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    pub fn heads(&self) -> &[Option<usize>] {
        &self.heads
    }

    pub fn head(&self, i: usize) -> Option<usize> {
        self.heads[i]
    }

    /// Identifier of the tree containing token `i` (the index of its root).
    pub fn tree_id(&self, i: usize) -> usize {
        self.tree_id[i]
    }

    pub fn tree_count(&self) -> usize {
        self.heads.iter().filter(|h| h.is_none()).count()
    }

    /// Undirected adjacency lists over head links.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.len()];
        for (i, h) in self.heads.iter().enumerate() {
            if let Some(h) = *h {
                adj[i].push(h);
                adj[h].push(i);
            }
        }
        adj
    }
}
