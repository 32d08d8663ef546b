//! Per-token proximity weights to the aspect term.
//!
//! Position proximity decays by `1/n` per token away from the nearest aspect
//! border. Dependency proximity uses `1 - d/n` where `d` is the shortest
//! undirected path length in the dependency parse to the closest aspect
//! token; tokens in a tree that holds no aspect token sit at `d = n/2`.
//! Aspect tokens always get weight zero.
//!
//! Functions here only need field arithmetic, so they also run over exact
//! rationals.

use std::collections::VecDeque;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use num_traits::{FromPrimitive, Num};

use crate::corpus::{DepForest, Instance};
use crate::error::{Error, Result};

/// Element type for proximity math: any ordered field with integer casts.
pub trait Weight: Num + FromPrimitive + Clone + PartialOrd + fmt::Debug {}

impl<T> Weight for T where T: Num + FromPrimitive + Clone + PartialOrd + fmt::Debug {}

fn from_usize<T: Weight>(k: usize) -> T {
    T::from_usize(k).expect("sentence length representable")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProximityMode {
    Position,
    Dependency,
}

impl ProximityMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ProximityMode::Position => "pos",
            ProximityMode::Dependency => "dep",
        }
    }
}

impl fmt::Display for ProximityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProximityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "position" => Ok(ProximityMode::Position),
            "dep" | "dependency" => Ok(ProximityMode::Dependency),
            other => Err(Error::Argument(format!("unknown proximity mode {other:?}"))),
        }
    }
}

/// Weights `p_i`, zero exactly on the aspect span.
#[derive(Clone, Debug, PartialEq)]
pub struct ProximityVector<T>(Vec<T>);

/// Tree distances `d_i` to the aspect, zero on aspect tokens.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceVector<T>(Vec<T>);

macro_rules! vector_newtype {
    ($name:ident) => {
        impl<T> $name<T> {
            pub fn into_inner(self) -> Vec<T> {
                self.0
            }
        }

        impl<T> Deref for $name<T> {
            type Target = [T];

            fn deref(&self) -> &[T] {
                &self.0
            }
        }

        impl<T> From<$name<T>> for Vec<T> {
            fn from(v: $name<T>) -> Vec<T> {
                v.0
            }
        }
    };
}

vector_newtype!(ProximityVector);
vector_newtype!(DistanceVector);

fn check_span(n: usize, start: usize, len: usize) -> Result<()> {
    if n == 0 || len == 0 || start + len > n {
        return Err(Error::Argument(format!(
            "aspect span start={start} len={len} invalid for sentence length {n}"
        )));
    }
    Ok(())
}

/// Linear decay from the nearest aspect border.
pub fn position_proximity<T: Weight>(n: usize, start: usize, len: usize) -> Result<ProximityVector<T>> {
    check_span(n, start, len)?;
    let end = start + len;
    let denom: T = from_usize(n);
    let p = (0..n)
        .map(|i| {
            let gap = if i < start {
                start - i
            } else if i >= end {
                i + 1 - end
            } else {
                return T::zero();
            };
            from_usize::<T>(n - gap) / denom.clone()
        })
        .collect();
    Ok(ProximityVector(p))
}

/// Breadth-first hop counts from `source` over undirected head links;
/// `None` for tokens in other trees.
pub fn bfs_hops(adjacency: &[Vec<usize>], source: usize) -> Vec<Option<usize>> {
    let mut dist = vec![None; adjacency.len()];
    dist[source] = Some(0);
    let mut queue = VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &v in &adjacency[u] {
            if dist[v].is_none() {
                dist[v] = Some(du + 1);
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Minimum shortest-path length from every token to any aspect token.
pub fn tree_distances<T: Weight>(forest: &DepForest, start: usize, len: usize) -> Result<DistanceVector<T>> {
    let n = forest.len();
    check_span(n, start, len)?;
    let adjacency = forest.adjacency();
    let mut best: Vec<Option<usize>> = vec![None; n];
    for a in start..start + len {
        for (b, d) in best.iter_mut().zip(bfs_hops(&adjacency, a)) {
            *b = match (*b, d) {
                (Some(x), Some(y)) => Some(x.min(y)),
                (x, y) => x.or(y),
            };
        }
    }
    let detached = from_usize::<T>(n) / from_usize::<T>(2);
    Ok(DistanceVector(
        best.into_iter()
            .map(|d| d.map_or_else(|| detached.clone(), from_usize))
            .collect(),
    ))
}

/// `1 - d_i/n` off the aspect span, zero on it.
pub fn dependency_proximity<T: Weight>(
    distances: &[T],
    n: usize,
    start: usize,
    len: usize,
) -> Result<ProximityVector<T>> {
    check_span(n, start, len)?;
    if distances.len() != n {
        return Err(Error::Argument(format!(
            "{} distances for sentence length {n}",
            distances.len()
        )));
    }
    let denom: T = from_usize(n);
    let mut p = Vec::with_capacity(n);
    for (i, d) in distances.iter().enumerate() {
        if (start..start + len).contains(&i) {
            p.push(T::zero());
            continue;
        }
        if *d > denom || *d < T::zero() {
            return Err(Error::Data(format!(
                "distance {d:?} at token {i} outside [0, {n}]"
            )));
        }
        p.push((denom.clone() - d.clone()) / denom.clone());
    }
    Ok(ProximityVector(p))
}

/// Proximity for an instance under `mode`; dependency mode needs a forest.
pub fn proximity_for<T: Weight>(
    instance: &Instance,
    mode: ProximityMode,
    forest: Option<&DepForest>,
) -> Result<ProximityVector<T>> {
    let (n, start, len) = (instance.len(), instance.aspect_start, instance.aspect_len);
    match mode {
        ProximityMode::Position => position_proximity(n, start, len),
        ProximityMode::Dependency => {
            let forest = forest.ok_or_else(|| {
                Error::Argument("dependency proximity requires a parse".into())
            })?;
            if forest.len() != n {
                return Err(Error::alignment(
                    &instance.sentence_id,
                    format!("parse has {} tokens, sentence has {n}", forest.len()),
                ));
            }
            let d = tree_distances::<T>(forest, start, len)?;
            dependency_proximity(&d, n, start, len)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn position_visualization_case() {
        let p = position_proximity::<f64>(8, 1, 1).unwrap();
        assert_eq!(&*p, &[0.875, 0.0, 0.875, 0.75, 0.625, 0.5, 0.375, 0.25]);
    }

    #[test]
    fn position_degenerate_and_left_empty() {
        assert_eq!(&*position_proximity::<f64>(1, 0, 1).unwrap(), &[0.0]);
        assert_eq!(
            &*position_proximity::<f64>(5, 0, 2).unwrap(),
            &[0.0, 0.0, 0.8, 0.6, 0.4]
        );
    }

    #[test]
    fn position_rejects_bad_span() {
        assert!(position_proximity::<f64>(3, 2, 2).is_err());
        assert!(position_proximity::<f64>(3, 0, 0).is_err());
    }

    fn chain() -> DepForest {
        // 0→1→2 (root), 3→2, 4→3
        DepForest::new(vec![Some(1), Some(2), None, Some(2), Some(3)]).unwrap()
    }

    #[test]
    fn chain_distances_and_weights() {
        let d = tree_distances::<f64>(&chain(), 2, 1).unwrap();
        assert_eq!(&*d, &[2.0, 1.0, 0.0, 1.0, 2.0]);
        let p = dependency_proximity(&d, 5, 2, 1).unwrap();
        assert_eq!(&*p, &[0.6, 0.8, 0.0, 0.8, 0.6]);
    }

    #[test]
    fn multiword_aspect_takes_minimum() {
        let d = tree_distances::<f64>(&chain(), 1, 2).unwrap();
        assert_eq!(d[0], 1.0);
        assert_eq!(&*d, &[1.0, 0.0, 0.0, 1.0, 2.0]);
    }

    #[test]
    fn detached_tree_gets_half_length() {
        let f = DepForest::new(vec![None, Some(0), None, Some(2)]).unwrap();
        let d = tree_distances::<f64>(&f, 0, 1).unwrap();
        assert_eq!((d[2], d[3]), (2.0, 2.0));
        let p = dependency_proximity(&d, 4, 0, 1).unwrap();
        assert_eq!((p[2], p[3]), (0.5, 0.5));

        let f7 = DepForest::new(vec![None, Some(0), Some(0), None, Some(3), Some(3), Some(3)]).unwrap();
        let d7 = tree_distances::<f64>(&f7, 1, 1).unwrap();
        assert_eq!(d7[5], 3.5);
    }

    #[test]
    fn whole_sentence_aspect_is_all_zero() {
        let p = dependency_proximity(&[0.0, 0.0, 0.0], 3, 0, 3).unwrap();
        assert!(p.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn distance_beyond_length_is_data_error() {
        assert!(matches!(
            dependency_proximity(&[0.0, 5.0], 2, 0, 1),
            Err(Error::Data(_))
        ));
    }

    fn arb_tree(max_n: usize) -> impl Strategy<Value = DepForest> {
        (1..=max_n).prop_flat_map(|n| {
            prop::collection::vec(any::<prop::sample::Index>(), n).prop_map(move |picks| {
                let heads = (0..n)
                    .map(|i| if i == 0 { None } else { Some(picks[i].index(i)) })
                    .collect();
                DepForest::new(heads).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn position_is_mirror_symmetric(n in 1usize..30, a in 0usize..30, b in 0usize..30) {
            let start = a % n;
            let len = 1 + b % (n - start);
            let p = position_proximity::<f64>(n, start, len).unwrap();
            let mut q = position_proximity::<f64>(n, n - start - len, len).unwrap().into_inner();
            q.reverse();
            prop_assert_eq!(p.into_inner(), q);
        }

        #[test]
        fn position_steps_by_one_over_n(n in 1usize..30, a in 0usize..30, b in 0usize..30) {
            let start = a % n;
            let len = 1 + b % (n - start);
            let p = position_proximity::<f64>(n, start, len).unwrap();
            let step = 1.0 / n as f64;
            for i in 1..start {
                prop_assert!((p[i] - p[i - 1] - step).abs() < 1e-12);
            }
            for i in start + len + 1..n {
                prop_assert!((p[i - 1] - p[i] - step).abs() < 1e-12);
            }
            prop_assert!(p.iter().enumerate().all(|(i, &x)| (x == 0.0) == (start..start + len).contains(&i)));
        }

        #[test]
        fn bfs_distance_is_symmetric(f in arb_tree(12), a in 0usize..12, b in 0usize..12) {
            let n = f.len();
            let (a, b) = (a % n, b % n);
            let adj = f.adjacency();
            prop_assert_eq!(bfs_hops(&adj, a)[b], bfs_hops(&adj, b)[a]);
        }

        #[test]
        fn both_modes_share_zero_pattern(f in arb_tree(12), a in 0usize..12, b in 0usize..12) {
            let n = f.len();
            let start = a % n;
            let len = 1 + b % (n - start);
            let pos = position_proximity::<f64>(n, start, len).unwrap();
            let d = tree_distances::<f64>(&f, start, len).unwrap();
            prop_assert!(d.iter().all(|&x| x <= (n - 1) as f64));
            let dep = dependency_proximity(&d, n, start, len).unwrap();
            let zeros = |v: &[f64]| v.iter().map(|&x| x == 0.0).collect::<Vec<_>>();
            prop_assert_eq!(zeros(&pos), zeros(&dep));
        }
    }
}
