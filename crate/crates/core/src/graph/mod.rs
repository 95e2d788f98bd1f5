//! Directed acyclic graphs, partially directed graphs and the operations on
//! them that structure learning needs: d-separation, Markov equivalence,
//! CPDAG construction and the structural Hamming distance.
//!
//! Nodes are `0..p`. Labels, if any, belong to callers.

mod cpdag;
mod dag;
mod dsep;
mod io;
mod pdag;

use std::collections::BTreeSet;

pub use cpdag::{cpdag, equivalence_class_union, markov_equivalent, meek_closure};
pub use dag::{degree, skeleton, unshielded_colliders, Dag};
pub use dsep::{d_separated, d_separated_sets};
pub use io::{parse_edge_list, EdgeKind, EdgeList, EdgeRecord};
pub use pdag::{shd, EdgeState, Link, Pdag};

use crate::error::{Error, Result};

/// Undirected edge set, each pair stored as `(min, max)`.
pub type Skeleton = BTreeSet<(usize, usize)>;

#[inline]
pub(crate) fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Sorted, duplicate-free set of node indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(Vec<usize>);

impl NodeSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn singleton(v: usize) -> Self {
        Self(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// Copy of `self` without `v`.
    pub fn without(&self, v: usize) -> Self {
        Self(self.0.iter().copied().filter(|&x| x != v).collect())
    }

    pub fn is_disjoint(&self, other: &NodeSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Errors if any element is `>= p`.
    pub fn check_range(&self, p: usize) -> Result<()> {
        match self.max() {
            Some(m) if m >= p => Err(Error::NodeOutOfRange { node: m, p }),
            _ => Ok(()),
        }
    }
}

impl FromIterator<usize> for NodeSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<usize> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Self(v)
    }
}

impl From<Vec<usize>> for NodeSet {
    fn from(v: Vec<usize>) -> Self {
        v.into_iter().collect()
    }
}

impl<const N: usize> From<[usize; N]> for NodeSet {
    fn from(v: [usize; N]) -> Self {
        v.into_iter().collect()
    }
}

impl std::fmt::Display for NodeSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "}}")
    }
}
