//! Oracle PC on random DAGs: the output must be the CPDAG, and no
//! conditioning set may exceed the maximum degree.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use rankpc::citest::make_oracle_decider;
use rankpc::graph::{cpdag, degree, equivalence_class_union, Dag};
use rankpc::pc::run_pc;
use rankpc::simulate::{derive_seed, random_dag, RngStream};

/// Largest `p` for which the brute-force equivalence-class check is run.
pub const BRUTE_FORCE_MAX_P: usize = 7;
pub const MAX_P: usize = 8;
pub const SPARSITIES: [f64; 3] = [0.2, 0.4, 0.6];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub trial: usize,
    pub dag: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleReport {
    pub trials: usize,
    pub exact: usize,
    /// Trials whose largest conditioning set stayed within `deg(G)`.
    pub within_degree: usize,
    pub mismatches: Vec<Mismatch>,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.exact == self.trials && self.within_degree == self.trials
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.trials == 0 {
            return writeln!(f, "no trials");
        }
        write!(f, "{}/{} exact, ", self.exact, self.trials)?;
        if self.within_degree == self.trials {
            writeln!(f, "max |S| <= deg(G) in all trials")?;
        } else {
            writeln!(f, "max |S| <= deg(G) in {}/{} trials", self.within_degree, self.trials)?;
        }
        for m in &self.mismatches {
            writeln!(f, "trial {}: {}", m.trial, m.reason)?;
            for line in m.dag.lines() {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

/// DAG for trial `t`: `p` uniform in `1..=p_max`, sparsity cycling through
/// [`SPARSITIES`], labels shuffled so the topological order is random.
pub fn trial_dag(p_max: usize, seed: u64, t: usize) -> Dag {
    let mut rng = RngStream::new(derive_seed(seed, &[t as u64]));
    let p = rng.random_range(1..=p_max);
    let s = SPARSITIES[t % SPARSITIES.len()];
    let g = random_dag(p, s, &mut rng).expect("sparsity lies in [0, 1]");
    let mut label: Vec<usize> = (0..p).collect();
    label.shuffle(&mut rng);
    Dag::new(p, g.edges().map(|(u, v)| (label[u], label[v]))).expect("relabelling keeps acyclicity")
}

pub fn oracle_check(p_max: usize, trials: usize, seed: u64) -> rankpc::Result<OracleReport> {
    if !(1..=MAX_P).contains(&p_max) {
        return Err(rankpc::Error::Precondition(format!("p_max must lie in 1..={MAX_P}, got {p_max}")));
    }
    let mut report = OracleReport {
        trials,
        ..Default::default()
    };
    for t in 0..trials {
        let dag = trial_dag(p_max, seed, t);
        let p = dag.node_count();
        let truth = cpdag(&dag);
        let res = run_pc(&make_oracle_decider(&dag), p)?;
        let mut reasons = Vec::new();
        if res.pdag != truth {
            reasons.push(format!("PC output\n{}differs from CPDAG\n{}", res.pdag, truth));
        }
        if p <= BRUTE_FORCE_MAX_P && equivalence_class_union(&dag) != truth {
            reasons.push("CPDAG differs from the brute-force equivalence class".to_string());
        }
        let within = res.diagnostics.max_cond_used.unwrap_or(0) <= degree(&dag);
        if within {
            report.within_degree += 1;
        } else {
            reasons.push(format!(
                "conditioning set of size {:?} exceeds deg(G) = {}",
                res.diagnostics.max_cond_used,
                degree(&dag)
            ));
        }
        if res.pdag == truth {
            report.exact += 1;
        }
        if !reasons.is_empty() {
            report.mismatches.push(Mismatch {
                trial: t,
                dag: dag.to_string(),
                reason: reasons.join("; "),
            });
        }
    }
    Ok(report)
}
