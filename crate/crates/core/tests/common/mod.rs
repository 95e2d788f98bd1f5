//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use rankpc::correlation::CorrelationMatrix;
use rankpc::graph::{Dag, NodeSet, Pdag};
use rankpc::linalg::Matrix;

/// DAG whose topological order is a random permutation of the labels.
pub fn random_labelled_dag<R: Rng>(p: usize, s: f64, rng: &mut R) -> Dag {
    let mut order: Vec<usize> = (0..p).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..p {
        for j in (i + 1)..p {
            if rng.random_bool(s) {
                edges.push((order[i], order[j]));
            }
        }
    }
    Dag::new(p, edges).unwrap()
}

/// DAG from per-pair presence bits, oriented along the ranks in `order`.
pub fn dag_from_bits(p: usize, bits: &[bool], order: &[usize]) -> Dag {
    let mut rank = vec![0; p];
    for (r, &v) in order.iter().enumerate() {
        rank[v] = r;
    }
    let pairs = (0..p).tuple_combinations::<(usize, usize)>();
    let edges = pairs
        .zip(bits)
        .filter(|(_, &b)| b)
        .map(|((u, v), _)| if rank[u] < rank[v] { (u, v) } else { (v, u) });
    Dag::new(p, edges).unwrap()
}

fn descendants(dag: &Dag, w: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([w]);
    let mut stack = vec![w];
    while let Some(x) = stack.pop() {
        for &c in dag.children(x) {
            if seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

/// d-separation by enumerating every simple path in the skeleton and testing
/// each interior node for blocking.
pub fn dsep_by_paths(dag: &Dag, u: usize, v: usize, s: &NodeSet) -> bool {
    fn active(dag: &Dag, path: &[usize], s: &NodeSet) -> bool {
        path.windows(3).all(|w| {
            let (a, m, b) = (w[0], w[1], w[2]);
            if dag.has_edge(a, m) && dag.has_edge(b, m) {
                descendants(dag, m).iter().any(|&d| s.contains(d))
            } else {
                !s.contains(m)
            }
        })
    }
    fn walk(dag: &Dag, path: &mut Vec<usize>, target: usize, s: &NodeSet) -> bool {
        let last = *path.last().unwrap();
        if last == target {
            return active(dag, path, s);
        }
        for next in 0..dag.node_count() {
            if dag.adjacent(last, next) && !path.contains(&next) {
                path.push(next);
                let hit = walk(dag, path, target, s);
                path.pop();
                if hit {
                    return true;
                }
            }
        }
        false
    }
    !walk(dag, &mut vec![u], v, s)
}

fn colliders(dag: &Dag) -> BTreeSet<(usize, usize, usize)> {
    let p = dag.node_count();
    let mut out = BTreeSet::new();
    for m in 0..p {
        for a in 0..p {
            for b in (a + 1)..p {
                if dag.has_edge(a, m) && dag.has_edge(b, m) && !dag.adjacent(a, b) {
                    out.insert((a, m, b));
                }
            }
        }
    }
    out
}

/// Union over the Markov equivalence class: every acyclic orientation of the
/// skeleton with the same unshielded colliders, merged pair by pair.
pub fn brute_force_cpdag(dag: &Dag) -> Pdag {
    let p = dag.node_count();
    let target = colliders(dag);
    let edges: Vec<(usize, usize)> = dag.edges().map(|(u, v)| (u.min(v), u.max(v))).collect();
    // forward[i], backward[i]: some member orients edge i low->high / high->low
    let mut forward = vec![false; edges.len()];
    let mut backward = vec![false; edges.len()];
    for perm in (0..p).permutations(p) {
        let mut rank = vec![0; p];
        for (r, &v) in perm.iter().enumerate() {
            rank[v] = r;
        }
        let oriented: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| if rank[a] < rank[b] { (a, b) } else { (b, a) })
            .collect();
        let member = Dag::new(p, oriented.iter().copied()).unwrap();
        if colliders(&member) != target {
            continue;
        }
        for (i, &(a, b)) in oriented.iter().enumerate() {
            if a < b {
                forward[i] = true;
            } else {
                backward[i] = true;
            }
        }
    }
    let mut directed = Vec::new();
    let mut undirected = Vec::new();
    for (i, &(a, b)) in edges.iter().enumerate() {
        match (forward[i], backward[i]) {
            (true, true) => undirected.push((a, b)),
            (true, false) => directed.push((a, b)),
            (false, true) => directed.push((b, a)),
            (false, false) => unreachable!("the DAG itself is a member"),
        }
    }
    Pdag::new(p, directed, undirected).unwrap()
}

/// Normalized Gram matrix `F F^T` of a random `p x (p + extra)` factor.
pub fn random_correlation<R: Rng>(p: usize, extra: usize, rng: &mut R) -> CorrelationMatrix<f64> {
    let k = p + extra;
    let f: Vec<Vec<f64>> = (0..p)
        .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let g = Matrix::from_fn(p, |i, j| f[i].iter().zip(&f[j]).map(|(a, b)| a * b).sum());
    CorrelationMatrix::from_covariance(&g).unwrap()
}

/// Random symmetric matrix with entries in `(-scale, scale)`.
pub fn random_symmetric<R: Rng>(q: usize, scale: f64, rng: &mut R) -> Matrix<f64> {
    let mut m = Matrix::zeros(q);
    for i in 0..q {
        for j in i..q {
            let x = rng.random_range(-scale..scale);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}
