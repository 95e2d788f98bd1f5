//! The PC algorithm over an arbitrary [`CiDecider`].
//!
//! Skeleton search starts from the complete graph and removes an edge `u - v`
//! as soon as some subset of the current neighbours of `u` (or of `v`) renders
//! the pair independent, growing the subset size one level at a time. The
//! separating sets then decide which unshielded triples become colliders, and
//! the orientation rules propagate the result.
//!
//! Pairs are visited in lexicographic order and candidate sets in
//! lexicographic order of the sorted neighbour list, so a run is a pure
//! function of its inputs.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;

use crate::citest::CiDecider;
use crate::error::{Error, Result};
use crate::graph::{NodeSet, Pdag};

pub use crate::graph::meek_closure;

/// Separating set of each removed pair, keyed by `(min, max)`.
pub type SepsetTable = BTreeMap<(usize, usize), NodeSet>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub tests_run: usize,
    /// Largest conditioning-set size queried; `None` if no test ran.
    pub max_cond_used: Option<usize>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PcOptions {
    /// Upper limit on conditioning-set size; `None` means unlimited.
    pub max_cond: Option<usize>,
    /// Freeze adjacency sets at the start of each level (the order-independent
    /// "stable" variant). Off by default.
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonResult {
    /// Undirected graph.
    pub graph: Pdag,
    pub sepsets: SepsetTable,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcResult {
    pub pdag: Pdag,
    pub sepsets: SepsetTable,
    pub diagnostics: Diagnostics,
}

fn check_p(decider: &dyn CiDecider, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::Precondition("p must be positive".into()));
    }
    if decider.node_count() != p {
        return Err(Error::NodeCountMismatch(p, decider.node_count()));
    }
    Ok(())
}

pub fn pc_skeleton(
    decider: &dyn CiDecider,
    p: usize,
    max_cond: Option<usize>,
) -> Result<SkeletonResult> {
    pc_skeleton_with(
        decider,
        p,
        &PcOptions {
            max_cond,
            ..PcOptions::default()
        },
    )
}

pub fn pc_skeleton_with(
    decider: &dyn CiDecider,
    p: usize,
    opts: &PcOptions,
) -> Result<SkeletonResult> {
    check_p(decider, p)?;
    let limit = match (opts.max_cond, decider.max_cond()) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let mut g = Pdag::complete(p);
    let mut sepsets = SepsetTable::new();
    let mut diag = Diagnostics::default();

    let mut level = 0usize;
    while limit.is_none_or(|m| level <= m) {
        let frozen: Option<Vec<Vec<usize>>> = opts
            .stable
            .then(|| (0..p).map(|x| g.neighbors(x).collect()).collect());
        let mut any_candidate = false;
        for u in 0..p {
            for v in (u + 1)..p {
                if !g.adjacent(u, v) {
                    continue;
                }
                let mut tried: Vec<NodeSet> = Vec::new();
                'sides: for (x, y) in [(u, v), (v, u)] {
                    let nbrs: Vec<usize> = match &frozen {
                        Some(f) => f[x].iter().copied().filter(|&w| w != y).collect(),
                        None => g.neighbors(x).filter(|&w| w != y).collect(),
                    };
                    if nbrs.len() < level {
                        continue;
                    }
                    any_candidate = true;
                    for combo in nbrs.into_iter().combinations(level) {
                        let s = NodeSet::from(combo);
                        if tried.contains(&s) {
                            continue;
                        }
                        diag.tests_run += 1;
                        diag.max_cond_used = Some(diag.max_cond_used.map_or(level, |m| m.max(level)));
                        let verdict = decider.decide(u, v, &s)?;
                        diag.warnings.extend(verdict.warning);
                        if verdict.decision.is_independent() {
                            g.remove(u, v);
                            sepsets.insert((u, v), s);
                            break 'sides;
                        }
                        tried.push(s);
                    }
                }
            }
        }
        if !any_candidate {
            break;
        }
        level += 1;
    }
    Ok(SkeletonResult {
        graph: g,
        sepsets,
        diagnostics: diag,
    })
}

/// Orients `u -> v <- w` for every unshielded triple `u - v - w` whose
/// separating set omits `v`. Every other edge comes out undirected.
///
/// Triples are processed in lexicographic `(u, v, w)` order. An edge that two
/// colliders want to orient in opposite directions keeps the later one, and
/// the clash is reported in the returned warnings.
pub fn orient_colliders(skeleton: &Pdag, sepsets: &SepsetTable) -> Result<(Pdag, Vec<String>)> {
    let p = skeleton.node_count();
    let mut out = Pdag::empty(p);
    for (u, v, _) in skeleton.pairs() {
        out.set_undirected(u, v);
    }
    let mut warnings = Vec::new();
    for u in 0..p {
        for w in (u + 1)..p {
            if skeleton.adjacent(u, w) {
                continue;
            }
            for v in (0..p).filter(|&v| skeleton.adjacent(u, v) && skeleton.adjacent(v, w)) {
                let sep = sepsets.get(&(u, w)).ok_or(Error::MissingSepset(u, w))?;
                if sep.contains(v) {
                    continue;
                }
                for x in [u, w] {
                    if out.is_directed(v, x) {
                        let msg = format!("collider conflict on {x}-{v}: reoriented {v} -> {x} as {x} -> {v}");
                        log::debug!("{msg}");
                        warnings.push(msg);
                    }
                    out.set_directed(x, v);
                }
            }
        }
    }
    Ok((out, warnings))
}

pub fn run_pc(decider: &dyn CiDecider, p: usize) -> Result<PcResult> {
    run_pc_with(decider, p, &PcOptions::default())
}

/// Skeleton search, collider orientation and orientation-rule closure.
pub fn run_pc_with(decider: &dyn CiDecider, p: usize, opts: &PcOptions) -> Result<PcResult> {
    let SkeletonResult {
        graph,
        sepsets,
        mut diagnostics,
    } = pc_skeleton_with(decider, p, opts)?;
    let (oriented, warnings) = orient_colliders(&graph, &sepsets)?;
    diagnostics.warnings.extend(warnings);
    let pdag = meek_closure(&oriented);
    if !pdag.is_directed_acyclic() {
        diagnostics
            .warnings
            .push("output has a directed cycle (conflicting orientations)".into());
    }
    Ok(PcResult {
        pdag,
        sepsets,
        diagnostics,
    })
}

impl fmt::Display for PcResult {
    /// Edge list followed by a `diagnostics:` block of `key=value` lines.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.pdag)?;
        writeln!(f, "diagnostics:")?;
        writeln!(f, "tests_run={}", self.diagnostics.tests_run)?;
        match self.diagnostics.max_cond_used {
            Some(m) => writeln!(f, "max_cond_used={m}")?,
            None => writeln!(f, "max_cond_used=none")?,
        }
        writeln!(f, "warnings={}", self.diagnostics.warnings.len())?;
        for w in &self.diagnostics.warnings {
            writeln!(f, "warning={w}")?;
        }
        Ok(())
    }
}
