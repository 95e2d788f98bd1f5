use super::{ordered, Dag, Skeleton};
use crate::error::{Error, Result};

/// State of one unordered pair `{lo, hi}` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EdgeState {
    #[default]
    Absent,
    /// `lo -> hi`
    Forward,
    /// `hi -> lo`
    Backward,
    Undirected,
}

/// Edge between `u` and `v` as seen from `u`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Link {
    None,
    /// `u -> v`
    Out,
    /// `u <- v`
    In,
    Undirected,
}

/// Partially directed graph with one [`EdgeState`] per unordered pair.
///
/// Double edges cannot be represented. Graphs built through the checked
/// constructors have an acyclic directed part; the in-crate search code
/// mutates freely and reports cyclicity as a diagnostic instead.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Pdag {
    p: usize,
    // indexed by lo * p + hi; the lower triangle is unused
    states: Vec<EdgeState>,
}

impl Pdag {
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            states: vec![EdgeState::Absent; p * p],
        }
    }

    /// Complete undirected graph.
    pub fn complete(p: usize) -> Self {
        let mut g = Self::empty(p);
        for u in 0..p {
            for v in (u + 1)..p {
                g.set_undirected(u, v);
            }
        }
        g
    }

    pub fn from_dag(dag: &Dag) -> Self {
        let mut g = Self::empty(dag.node_count());
        for (u, v) in dag.edges() {
            g.set_directed(u, v);
        }
        g
    }

    /// Builds a PDAG from directed `(u, v)` (meaning `u -> v`) and undirected
    /// pairs. Fails on conflicting states for a pair or a directed cycle.
    pub fn new(
        p: usize,
        directed: impl IntoIterator<Item = (usize, usize)>,
        undirected: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let check = |g: &Self, u: usize, v: usize, ok: Link| -> Result<()> {
            for node in [u, v] {
                if node >= p {
                    return Err(Error::NodeOutOfRange { node, p });
                }
            }
            if u == v {
                return Err(Error::InvalidQuery(format!("self-loop at node {u}")));
            }
            match g.link(u, v) {
                Link::None => Ok(()),
                l if l == ok => Ok(()),
                _ => Err(Error::InvalidQuery(format!(
                    "conflicting edges between {u} and {v}"
                ))),
            }
        };
        let mut g = Self::empty(p);
        for (u, v) in directed {
            check(&g, u, v, Link::Out)?;
            g.set_directed(u, v);
        }
        for (u, v) in undirected {
            check(&g, u, v, Link::Undirected)?;
            g.set_undirected(u, v);
        }
        if !g.is_directed_acyclic() {
            return Err(Error::Cyclic);
        }
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.p
    }

    /// Raw state of the pair `{u, v}`.
    #[inline]
    pub fn state(&self, u: usize, v: usize) -> EdgeState {
        let (lo, hi) = ordered(u, v);
        self.states[lo * self.p + hi]
    }

    pub fn link(&self, u: usize, v: usize) -> Link {
        match (self.state(u, v), u < v) {
            (EdgeState::Absent, _) => Link::None,
            (EdgeState::Undirected, _) => Link::Undirected,
            (EdgeState::Forward, true) | (EdgeState::Backward, false) => Link::Out,
            (EdgeState::Forward, false) | (EdgeState::Backward, true) => Link::In,
        }
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        u != v && self.state(u, v) != EdgeState::Absent
    }

    /// `u -> v` present.
    #[inline]
    pub fn is_directed(&self, u: usize, v: usize) -> bool {
        u != v && self.link(u, v) == Link::Out
    }

    #[inline]
    pub fn is_undirected(&self, u: usize, v: usize) -> bool {
        u != v && self.state(u, v) == EdgeState::Undirected
    }

    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&v| self.adjacent(u, v))
    }

    pub fn parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&u| self.is_directed(u, v))
    }

    pub fn children(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&v| self.is_directed(u, v))
    }

    pub fn undirected_neighbors(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.p).filter(move |&v| self.is_undirected(u, v))
    }

    /// Adjacent pairs `(lo, hi)` with their states, in lexicographic order.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, EdgeState)> + '_ {
        (0..self.p).flat_map(move |u| {
            ((u + 1)..self.p).filter_map(move |v| match self.state(u, v) {
                EdgeState::Absent => None,
                s => Some((u, v, s)),
            })
        })
    }

    pub fn edge_count(&self) -> usize {
        self.pairs().count()
    }

    pub fn skeleton(&self) -> Skeleton {
        self.pairs().map(|(u, v, _)| (u, v)).collect()
    }

    pub(crate) fn set_directed(&mut self, u: usize, v: usize) {
        let (lo, hi) = ordered(u, v);
        self.states[lo * self.p + hi] = if u < v {
            EdgeState::Forward
        } else {
            EdgeState::Backward
        };
    }

    pub(crate) fn set_undirected(&mut self, u: usize, v: usize) {
        let (lo, hi) = ordered(u, v);
        self.states[lo * self.p + hi] = EdgeState::Undirected;
    }

    pub(crate) fn remove(&mut self, u: usize, v: usize) {
        let (lo, hi) = ordered(u, v);
        self.states[lo * self.p + hi] = EdgeState::Absent;
    }

    /// Whether the subgraph of directed edges has no cycle.
    pub fn is_directed_acyclic(&self) -> bool {
        let mut indeg = vec![0usize; self.p];
        for (u, v, s) in self.pairs() {
            match s {
                EdgeState::Forward => indeg[v] += 1,
                EdgeState::Backward => indeg[u] += 1,
                _ => {}
            }
        }
        let mut stack: Vec<usize> = (0..self.p).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = stack.pop() {
            seen += 1;
            for c in self.children(u).collect::<Vec<_>>() {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    stack.push(c);
                }
            }
        }
        seen == self.p
    }
}

/// Structural Hamming distance: number of unordered pairs whose state differs.
pub fn shd(a: &Pdag, b: &Pdag) -> Result<usize> {
    if a.p != b.p {
        return Err(Error::NodeCountMismatch(a.p, b.p));
    }
    let p = a.p;
    Ok((0..p)
        .flat_map(|u| ((u + 1)..p).map(move |v| (u, v)))
        .filter(|&(u, v)| a.state(u, v) != b.state(u, v))
        .count())
}
