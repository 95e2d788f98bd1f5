use super::{Dag, NodeSet};
use crate::error::{Error, Result};

/// Nodes reachable from `source` along active trails given the conditioning
/// set, using (node, direction) states so each is visited at most twice.
fn active_reach(dag: &Dag, source: usize, given: &[bool]) -> Vec<bool> {
    let p = dag.node_count();

    // ancestors of the conditioning set, including the set itself
    let mut anc = given.to_vec();
    let mut stack: Vec<usize> = (0..p).filter(|&v| given[v]).collect();
    while let Some(v) = stack.pop() {
        for &u in dag.parents(v) {
            if !anc[u] {
                anc[u] = true;
                stack.push(u);
            }
        }
    }

    // `up`: entered from a child; `down`: entered from a parent
    let mut seen_up = vec![false; p];
    let mut seen_down = vec![false; p];
    let mut reach = vec![false; p];
    let mut todo = vec![(source, true)];
    while let Some((y, up)) = todo.pop() {
        let seen = if up { &mut seen_up } else { &mut seen_down };
        if seen[y] {
            continue;
        }
        seen[y] = true;
        if !given[y] {
            reach[y] = true;
        }
        if up {
            if !given[y] {
                todo.extend(dag.parents(y).iter().map(|&u| (u, true)));
                todo.extend(dag.children(y).iter().map(|&c| (c, false)));
            }
        } else {
            if !given[y] {
                todo.extend(dag.children(y).iter().map(|&c| (c, false)));
            }
            // collider: open iff y or one of its descendants is conditioned on
            if anc[y] {
                todo.extend(dag.parents(y).iter().map(|&u| (u, true)));
            }
        }
    }
    reach
}

fn mask(p: usize, s: &NodeSet) -> Result<Vec<bool>> {
    s.check_range(p)?;
    let mut m = vec![false; p];
    for v in s.iter() {
        m[v] = true;
    }
    Ok(m)
}

/// Whether `s` d-separates `u` and `v` in `dag`.
pub fn d_separated(dag: &Dag, u: usize, v: usize, s: &NodeSet) -> Result<bool> {
    let p = dag.node_count();
    for node in [u, v] {
        if node >= p {
            return Err(Error::NodeOutOfRange { node, p });
        }
    }
    if u == v {
        return Err(Error::InvalidQuery(format!("u and v are both {u}")));
    }
    if s.contains(u) || s.contains(v) {
        return Err(Error::InvalidQuery(format!(
            "conditioning set {s} contains an endpoint of ({u}, {v})"
        )));
    }
    let given = mask(p, s)?;
    Ok(!active_reach(dag, u, &given)[v])
}

/// Whether `s` d-separates every node of `a` from every node of `b`.
pub fn d_separated_sets(dag: &Dag, a: &NodeSet, b: &NodeSet, s: &NodeSet) -> Result<bool> {
    let p = dag.node_count();
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidQuery("node sets must be nonempty".into()));
    }
    if !a.is_disjoint(b) || !a.is_disjoint(s) || !b.is_disjoint(s) {
        return Err(Error::InvalidQuery(format!(
            "sets {a}, {b}, {s} are not pairwise disjoint"
        )));
    }
    a.check_range(p)?;
    b.check_range(p)?;
    let given = mask(p, s)?;
    for x in a.iter() {
        let reach = active_reach(dag, x, &given);
        if b.iter().any(|y| reach[y]) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain() -> Dag {
        Dag::new(3, [(0, 1), (1, 2)]).unwrap()
    }

    fn collider() -> Dag {
        Dag::new(3, [(0, 1), (2, 1)]).unwrap()
    }

    #[test]
    fn pairwise_examples() {
        assert!(d_separated(&chain(), 0, 2, &NodeSet::from([1])).unwrap());
        assert!(!d_separated(&chain(), 0, 2, &NodeSet::empty()).unwrap());
        assert!(d_separated(&collider(), 0, 2, &NodeSet::empty()).unwrap());
        assert!(!d_separated(&collider(), 0, 2, &NodeSet::from([1])).unwrap());
    }

    #[test]
    fn descendant_of_collider_opens_path() {
        let g = Dag::new(4, [(0, 1), (2, 1), (1, 3)]).unwrap();
        assert!(!d_separated(&g, 0, 2, &NodeSet::from([3])).unwrap());
    }

    #[test]
    fn set_examples() {
        let a = NodeSet::from([0]);
        let b = NodeSet::from([2]);
        assert!(d_separated_sets(&chain(), &a, &b, &NodeSet::from([1])).unwrap());
        assert!(!d_separated_sets(&chain(), &a, &b, &NodeSet::empty()).unwrap());
        let split = Dag::new(4, [(0, 1), (2, 3)]).unwrap();
        let a = NodeSet::from([0, 1]);
        let b = NodeSet::from([2, 3]);
        assert!(d_separated_sets(&split, &a, &b, &NodeSet::empty()).unwrap());
    }

    #[test]
    fn error_paths() {
        let g = chain();
        assert!(d_separated(&g, 0, 0, &NodeSet::empty()).is_err());
        assert!(d_separated(&g, 0, 2, &NodeSet::from([0])).is_err());
        assert!(d_separated(&g, 0, 5, &NodeSet::empty()).is_err());
        assert!(d_separated(&g, 0, 2, &NodeSet::from([7])).is_err());
        let a = NodeSet::from([0, 1]);
        assert!(d_separated_sets(&g, &a, &NodeSet::from([1]), &NodeSet::empty()).is_err());
        assert!(d_separated_sets(&g, &NodeSet::empty(), &a, &NodeSet::empty()).is_err());
    }
}
