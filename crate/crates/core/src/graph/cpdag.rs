use itertools::Itertools;

use super::{skeleton, unshielded_colliders, Dag, Pdag};
use crate::error::{Error, Result};

/// Same skeleton and same unshielded colliders.
pub fn markov_equivalent(g: &Dag, h: &Dag) -> Result<bool> {
    if g.node_count() != h.node_count() {
        return Err(Error::NodeCountMismatch(g.node_count(), h.node_count()));
    }
    Ok(skeleton(g) == skeleton(h) && unshielded_colliders(g) == unshielded_colliders(h))
}

/// CPDAG of the Markov equivalence class of `dag`: the skeleton with every
/// unshielded collider oriented, closed under the orientation rules.
pub fn cpdag(dag: &Dag) -> Pdag {
    let p = dag.node_count();
    let mut g = Pdag::empty(p);
    for (u, v) in skeleton(dag) {
        g.set_undirected(u, v);
    }
    for (u, v, w) in unshielded_colliders(dag) {
        g.set_directed(u, v);
        g.set_directed(w, v);
    }
    meek_closure(&g)
}

/// Applies orientation rules R1-R3 until nothing changes. Only undirected
/// edges are ever oriented; adjacencies are untouched.
///
/// * R1: `c -> a - b`, `c` and `b` nonadjacent: orient `a -> b`.
/// * R2: `a -> c -> b` and `a - b`: orient `a -> b`.
/// * R3: `a - c -> b`, `a - d -> b`, `a - b`, `c` and `d` nonadjacent:
///   orient `a -> b`.
pub fn meek_closure(pdag: &Pdag) -> Pdag {
    let mut g = pdag.clone();
    let p = g.node_count();
    loop {
        let mut changed = false;
        for a in 0..p {
            for b in 0..p {
                if g.is_undirected(a, b) && forced(&g, a, b) {
                    g.set_directed(a, b);
                    changed = true;
                }
            }
        }
        if !changed {
            return g;
        }
    }
}

fn forced(g: &Pdag, a: usize, b: usize) -> bool {
    let p = g.node_count();
    // R1
    if (0..p).any(|c| c != b && g.is_directed(c, a) && !g.adjacent(c, b)) {
        return true;
    }
    // R2
    if (0..p).any(|c| g.is_directed(a, c) && g.is_directed(c, b)) {
        return true;
    }
    // R3
    let mids: Vec<usize> = (0..p)
        .filter(|&c| g.is_undirected(a, c) && g.is_directed(c, b))
        .collect();
    mids.iter()
        .tuple_combinations()
        .any(|(&c, &d)| !g.adjacent(c, d))
}

/// Brute-force CPDAG: orients the skeleton along every node ordering, keeps
/// the acyclic orientations with the same unshielded colliders, and takes the
/// union of their edges. Factorial in `p`; intended for `p <= 8` as a check
/// on [`cpdag`].
pub fn equivalence_class_union(dag: &Dag) -> Pdag {
    let p = dag.node_count();
    let skel: Vec<(usize, usize)> = skeleton(dag).into_iter().collect();
    let target = unshielded_colliders(dag);
    // seen[i] bit 0: some member has lo -> hi, bit 1: some member has hi -> lo
    let mut seen = vec![0u8; skel.len()];
    let mut members = std::collections::HashSet::new();
    for order in (0..p).permutations(p) {
        let mut pos = vec![0usize; p];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let orient: Vec<bool> = skel.iter().map(|&(u, v)| pos[u] < pos[v]).collect();
        if !members.insert(orient.clone()) {
            continue;
        }
        let edges = skel
            .iter()
            .zip(&orient)
            .map(|(&(u, v), &fwd)| if fwd { (u, v) } else { (v, u) });
        let h = Dag::new(p, edges).expect("orientation along a total order is acyclic");
        if unshielded_colliders(&h) == target {
            for (s, &fwd) in seen.iter_mut().zip(&orient) {
                *s |= if fwd { 1 } else { 2 };
            }
        }
    }
    let mut out = Pdag::empty(p);
    for (&(u, v), &s) in skel.iter().zip(&seen) {
        match s {
            1 => out.set_directed(u, v),
            2 => out.set_directed(v, u),
            _ => out.set_undirected(u, v),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{shd, Link};

    #[test]
    fn chain_is_fully_undirected() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let c = cpdag(&chain);
        assert!(c.is_undirected(0, 1) && c.is_undirected(1, 2));
        assert!(!c.adjacent(0, 2));
        assert_eq!(c, equivalence_class_union(&chain));
    }

    #[test]
    fn collider_is_kept() {
        let collider = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        let c = cpdag(&collider);
        assert_eq!(c, Pdag::from_dag(&collider));
    }

    #[test]
    fn single_edge_is_undirected() {
        let g = Dag::new(2, [(1, 0)]).unwrap();
        assert_eq!(cpdag(&g).link(0, 1), Link::Undirected);
    }

    #[test]
    fn shd_between_chain_and_collider_cpdags() {
        let chain = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let collider = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        assert_eq!(shd(&cpdag(&chain), &cpdag(&collider)).unwrap(), 2);
    }

    #[test]
    fn markov_equivalence_examples() {
        let fwd = Dag::new(3, [(0, 1), (1, 2)]).unwrap();
        let back = Dag::new(3, [(1, 0), (2, 1)]).unwrap();
        let collider = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        assert!(markov_equivalent(&fwd, &back).unwrap());
        assert!(!markov_equivalent(&fwd, &collider).unwrap());
        assert!(markov_equivalent(&fwd, &fwd).unwrap());
        assert!(markov_equivalent(&fwd, &Dag::empty(4)).is_err());
    }

    #[test]
    fn r1_orients_away_from_arrow() {
        // 0 -> 1 - 2 with 0, 2 nonadjacent; the two completions are 1 -> 2
        // (no new collider) and 2 -> 1 (new collider 0 -> 1 <- 2).
        let g = Pdag::new(3, [(0, 1)], [(1, 2)]).unwrap();
        let closed = meek_closure(&g);
        assert!(closed.is_directed(1, 2));
        let new_collider = Dag::new(3, [(0, 1), (2, 1)]).unwrap();
        assert!(!unshielded_colliders(&new_collider).is_empty());
    }

    #[test]
    fn r2_and_r3() {
        // R2: 0 -> 1 -> 2 and 0 - 2
        let g = Pdag::new(3, [(0, 1), (1, 2)], [(0, 2)]).unwrap();
        assert!(meek_closure(&g).is_directed(0, 2));
        // R3: 0 - 1, 0 - 2, 0 - 3, 1 -> 3 <- 2, 1 and 2 nonadjacent
        let g = Pdag::new(4, [(1, 3), (2, 3)], [(0, 1), (0, 2), (0, 3)]).unwrap();
        let closed = meek_closure(&g);
        assert!(closed.is_directed(0, 3));
        assert!(closed.is_undirected(0, 1));
    }

    #[test]
    fn closure_is_idempotent_and_leaves_trees() {
        let tree = Pdag::new(5, [], [(0, 1), (1, 2), (1, 3), (3, 4)]).unwrap();
        assert_eq!(meek_closure(&tree), tree);
        let dag = Dag::new(5, [(0, 2), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        let c = cpdag(&dag);
        assert_eq!(meek_closure(&c), c);
        assert_eq!(c, equivalence_class_union(&dag));
    }
}
