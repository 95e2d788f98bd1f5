use std::collections::BTreeSet;

use super::{ordered, Skeleton};
use crate::error::{Error, Result};

/// Directed acyclic graph on nodes `0..p`. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dag {
    p: usize,
    adj: Vec<bool>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
}

impl Dag {
    pub fn empty(p: usize) -> Self {
        Self {
            p,
            adj: vec![false; p * p],
            parents: vec![Vec::new(); p],
            children: vec![Vec::new(); p],
        }
    }

    /// Builds a DAG from directed edges `(u, v)` meaning `u -> v`.
    ///
    /// Rejects self-loops, out-of-range nodes, edges present in both
    /// directions and directed cycles. Repeated identical edges are merged.
    pub fn new(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(p);
        for (u, v) in edges {
            for node in [u, v] {
                if node >= p {
                    return Err(Error::NodeOutOfRange { node, p });
                }
            }
            if u == v {
                return Err(Error::InvalidQuery(format!("self-loop at node {u}")));
            }
            if g.adj[v * p + u] {
                return Err(Error::InvalidQuery(format!(
                    "edges {u} -> {v} and {v} -> {u} both present"
                )));
            }
            if !g.adj[u * p + v] {
                g.adj[u * p + v] = true;
                g.children[u].push(v);
                g.parents[v].push(u);
            }
        }
        for list in g.parents.iter_mut().chain(g.children.iter_mut()) {
            list.sort_unstable();
        }
        if g.topological_order().is_none() {
            return Err(Error::Cyclic);
        }
        Ok(g)
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.p
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u * self.p + v]
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.has_edge(u, v) || self.has_edge(v, u)
    }

    pub fn parents(&self, v: usize) -> &[usize] {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// All edges `(u, v)` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.p).flat_map(move |u| self.children[u].iter().map(move |&v| (u, v)))
    }

    pub fn edge_count(&self) -> usize {
        self.children.iter().map(Vec::len).sum()
    }

    pub fn node_degree(&self, v: usize) -> usize {
        self.parents[v].len() + self.children[v].len()
    }

    /// Kahn's algorithm; `None` if there is a cycle. Ties are broken by
    /// smallest index, so the order is deterministic.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let mut indeg: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BTreeSet<usize> = (0..self.p).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(self.p);
        while let Some(v) = ready.pop_first() {
            order.push(v);
            for &c in &self.children[v] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.insert(c);
                }
            }
        }
        (order.len() == self.p).then_some(order)
    }
}

/// Maximum over nodes of in-degree plus out-degree.
pub fn degree(dag: &Dag) -> usize {
    (0..dag.node_count()).map(|v| dag.node_degree(v)).max().unwrap_or(0)
}

pub fn skeleton(dag: &Dag) -> Skeleton {
    dag.edges().map(|(u, v)| ordered(u, v)).collect()
}

/// Triples `(u, v, w)` with `u < w`, `u -> v <- w` and `u`, `w` nonadjacent.
pub fn unshielded_colliders(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let mut out = BTreeSet::new();
    for v in 0..dag.node_count() {
        let pa = dag.parents(v);
        for (i, &u) in pa.iter().enumerate() {
            for &w in &pa[i + 1..] {
                if !dag.adjacent(u, w) {
                    out.insert((u, v, w));
                }
            }
        }
    }
    out
}
