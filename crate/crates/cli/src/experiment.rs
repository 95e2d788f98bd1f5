//! Simulation study: Pearson-PC and rank PC across an alpha grid, scored by
//! structural Hamming distance to the true CPDAG.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::time::Instant;

use rankpc::citest::{make_rank_ci_decider, CiRule, TestConfig};
use rankpc::correlation::{CorrelationMethod, Dataset};
use rankpc::graph::{cpdag, shd, Pdag};
use rankpc::pc::{run_pc_with, PcOptions};
use rankpc::simulate::{derive_seed, random_dag, random_weights, sample_sem, Regime, RngStream, SemModel};
use rayon::prelude::*;

use crate::config::ExperimentConfig;

pub const RECORD_HEADER: [&str; 12] = [
    "p", "n", "d", "regime", "method", "alpha", "replicate", "seed", "shd", "tests_run",
    "max_cond_used", "runtime_ms",
];

#[derive(Debug, thiserror::Error)]
pub enum RecordsError {
    #[error("records line {line}: {msg}")]
    Malformed { line: u64, msg: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Coordinates of one simulated dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coordinates {
    pub p: usize,
    pub n: usize,
    pub d: f64,
    pub regime: Regime,
    pub replicate: usize,
}

impl Coordinates {
    /// Seed from `(base, p, n, d, regime, replicate)`.
    pub fn seed(&self, base: u64) -> u64 {
        derive_seed(
            base,
            &[self.p as u64, self.n as u64, self.d.to_bits(), self.regime.code(), self.replicate as u64],
        )
    }

    /// File-name stem such as `p10_n100_d3_normal_r0`.
    pub fn stem(&self) -> String {
        format!("p{}_n{}_d{}_{}_r{}", self.p, self.n, self.d, self.regime, self.replicate)
    }
}

impl fmt::Display for Coordinates {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} n={} d={} regime={} replicate={}",
            self.p, self.n, self.d, self.regime, self.replicate
        )
    }
}

/// A generated model, its data and the CPDAG to score against.
#[derive(Debug, Clone)]
pub struct Replicate {
    pub coords: Coordinates,
    pub seed: u64,
    pub model: SemModel,
    pub data: Dataset<f64>,
    pub truth: Pdag,
}

pub fn generate_replicate(coords: Coordinates, seed: u64) -> rankpc::Result<Replicate> {
    let mut rng = RngStream::new(seed);
    let s = (coords.d / (coords.p - 1) as f64).min(1.0);
    let dag = random_dag(coords.p, s, &mut rng)?;
    let weights = random_weights(&dag, &mut rng);
    let model = SemModel::for_regime(dag, weights, coords.regime)?;
    let data = sample_sem(&model, coords.n, &mut rng)?;
    let truth = cpdag(model.dag());
    Ok(Replicate {
        coords,
        seed,
        model,
        data,
        truth,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub p: usize,
    pub n: usize,
    pub d: f64,
    pub regime: Regime,
    pub method: CorrelationMethod,
    pub alpha: f64,
    pub replicate: usize,
    pub seed: u64,
    pub shd: usize,
    pub tests_run: usize,
    pub max_cond_used: Option<usize>,
    /// Wall-clock milliseconds of the PC run; 0 when timing is off.
    pub runtime_ms: f64,
}

/// A run that produced no record, kept with its coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct FailureRecord {
    pub coords: Coordinates,
    pub seed: u64,
    pub method: Option<CorrelationMethod>,
    pub alpha: Option<f64>,
    pub error: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub records: Vec<ExperimentRecord>,
    pub failures: Vec<FailureRecord>,
}

/// Runs every `(method, alpha)` pair on one replicate. The correlation matrix
/// is estimated once per method and shared across the grid.
pub fn run_replicate(cfg: &ExperimentConfig, rep: &Replicate) -> ExperimentOutput {
    let c = rep.coords;
    let opts = PcOptions {
        max_cond: cfg.max_cond,
        stable: cfg.stable,
    };
    let mut out = ExperimentOutput::default();
    let alphas = cfg.alphas();
    for &method in &cfg.methods {
        let fail = |alpha: Option<f64>, e: &dyn fmt::Display| FailureRecord {
            coords: c,
            seed: rep.seed,
            method: Some(method),
            alpha,
            error: e.to_string(),
        };
        let base = TestConfig {
            rule: CiRule::FisherZ { alpha: alphas[0] },
            method,
        };
        let decider = match make_rank_ci_decider(&rep.data, &base) {
            Ok(d) => d,
            Err(e) => {
                out.failures.extend(alphas.iter().map(|&a| fail(Some(a), &e)));
                continue;
            }
        };
        for &alpha in &alphas {
            let start = Instant::now();
            let result = decider
                .with_rule(CiRule::FisherZ { alpha })
                .and_then(|d| run_pc_with(&d, c.p, &opts))
                .and_then(|r| Ok((shd(&r.pdag, &rep.truth)?, r)));
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            match result {
                Ok((score, r)) => {
                    for w in &r.diagnostics.warnings {
                        log::debug!("{c} method={method} alpha={alpha}: {w}");
                    }
                    out.records.push(ExperimentRecord {
                        p: c.p,
                        n: c.n,
                        d: c.d,
                        regime: c.regime,
                        method,
                        alpha,
                        replicate: c.replicate,
                        seed: rep.seed,
                        shd: score,
                        tests_run: r.diagnostics.tests_run,
                        max_cond_used: r.diagnostics.max_cond_used,
                        runtime_ms: if cfg.timing { elapsed } else { 0.0 },
                    })
                }
                Err(e) => out.failures.push(fail(Some(alpha), &e)),
            }
        }
    }
    out
}

pub fn coordinates(cfg: &ExperimentConfig) -> Vec<Coordinates> {
    let mut out = Vec::new();
    for &p in &cfg.ps {
        for &n in &cfg.ns {
            for &regime in &cfg.regimes {
                for replicate in 0..cfg.replicates {
                    out.push(Coordinates {
                        p,
                        n,
                        d: cfg.d,
                        regime,
                        replicate,
                    });
                }
            }
        }
    }
    out
}

/// Runs the full grid in parallel. Output order is canonical and does not
/// depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> ExperimentOutput {
    let parts: Vec<ExperimentOutput> = coordinates(cfg)
        .into_par_iter()
        .map(|c| {
            let seed = c.seed(cfg.seed);
            match generate_replicate(c, seed) {
                Ok(rep) => run_replicate(cfg, &rep),
                Err(e) => ExperimentOutput {
                    records: Vec::new(),
                    failures: vec![FailureRecord {
                        coords: c,
                        seed,
                        method: None,
                        alpha: None,
                        error: e.to_string(),
                    }],
                },
            }
        })
        .collect();
    let mut out = ExperimentOutput::default();
    for part in parts {
        out.records.extend(part.records);
        out.failures.extend(part.failures);
    }
    sort_records(&mut out.records);
    out
}

fn record_key(r: &ExperimentRecord) -> (usize, usize, u64, Regime, CorrelationMethod, u64, usize) {
    // alpha and d are nonnegative, so bit order is numeric order
    (r.p, r.n, r.d.to_bits(), r.regime, r.method, r.alpha.to_bits(), r.replicate)
}

pub fn sort_records(records: &mut [ExperimentRecord]) {
    records.sort_by_key(record_key);
}

pub fn write_records<W: Write>(records: &[ExperimentRecord], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.regime.to_string(),
            r.method.to_string(),
            r.alpha.to_string(),
            r.replicate.to_string(),
            r.seed.to_string(),
            r.shd.to_string(),
            r.tests_run.to_string(),
            r.max_cond_used.map_or_else(String::new, |m| m.to_string()),
            r.runtime_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records<R: Read>(reader: R) -> Result<Vec<ExperimentRecord>, RecordsError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().ne(RECORD_HEADER) {
        return Err(RecordsError::Malformed {
            line: 1,
            msg: format!("expected header {}", RECORD_HEADER.join(",")),
        });
    }
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |msg: String| RecordsError::Malformed { line, msg };
        if row.len() != RECORD_HEADER.len() {
            return Err(bad(format!("expected {} fields, got {}", RECORD_HEADER.len(), row.len())));
        }
        fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize) -> Result<T, String> {
            row[i]
                .parse()
                .map_err(|_| format!("bad {} value {:?}", RECORD_HEADER[i], &row[i]))
        }
        let parse = || -> Result<ExperimentRecord, String> {
            Ok(ExperimentRecord {
                p: field(&row, 0)?,
                n: field(&row, 1)?,
                d: field(&row, 2)?,
                regime: field(&row, 3)?,
                method: field(&row, 4)?,
                alpha: field(&row, 5)?,
                replicate: field(&row, 6)?,
                seed: field(&row, 7)?,
                shd: field(&row, 8)?,
                tests_run: field(&row, 9)?,
                max_cond_used: if row[10].is_empty() { None } else { Some(field(&row, 10)?) },
                runtime_ms: field(&row, 11)?,
            })
        };
        out.push(parse().map_err(bad)?);
    }
    Ok(out)
}

pub fn write_failures<W: Write>(failures: &[FailureRecord], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["p", "n", "d", "regime", "method", "alpha", "replicate", "seed", "error"])?;
    for f in failures {
        let c = f.coords;
        w.write_record([
            c.p.to_string(),
            c.n.to_string(),
            c.d.to_string(),
            c.regime.to_string(),
            f.method.map_or_else(String::new, |m| m.to_string()),
            f.alpha.map_or_else(String::new, |a| a.to_string()),
            c.replicate.to_string(),
            f.seed.to_string(),
            f.error.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Mean SHD at the best alpha for one `(p, n, d, regime, method)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub p: usize,
    pub n: usize,
    pub d: f64,
    pub regime: Regime,
    pub method: CorrelationMethod,
    pub best_alpha: f64,
    pub mean_shd: f64,
    /// Records behind the mean.
    pub replicates: usize,
}

/// Per cell, the alpha minimizing mean SHD over replicates; ties go to the
/// smaller alpha.
pub fn summarize(records: &[ExperimentRecord]) -> Vec<SummaryRow> {
    type CellKey = (usize, usize, u64, Regime, CorrelationMethod);
    let mut cells: BTreeMap<CellKey, BTreeMap<u64, (usize, usize)>> = BTreeMap::new();
    for r in records {
        let key = (r.p, r.n, r.d.to_bits(), r.regime, r.method);
        let e = cells.entry(key).or_default().entry(r.alpha.to_bits()).or_default();
        e.0 += r.shd;
        e.1 += 1;
    }
    cells
        .into_iter()
        .map(|((p, n, d, regime, method), by_alpha)| {
            // ascending alpha; strict improvement keeps the smaller alpha on ties
            let mut best: Option<(f64, f64, usize)> = None;
            for (alpha, (sum, count)) in by_alpha {
                let mean = sum as f64 / count as f64;
                if best.is_none_or(|(_, m, _)| mean < m) {
                    best = Some((f64::from_bits(alpha), mean, count));
                }
            }
            let (best_alpha, mean_shd, replicates) = best.expect("cells are nonempty");
            SummaryRow {
                p,
                n,
                d: f64::from_bits(d),
                regime,
                method,
                best_alpha,
                mean_shd,
                replicates,
            }
        })
        .collect()
}

pub fn write_summary<W: Write>(rows: &[SummaryRow], writer: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["p", "n", "d", "regime", "method", "best_alpha", "mean_shd", "replicates"])?;
    for r in rows {
        w.write_record([
            r.p.to_string(),
            r.n.to_string(),
            r.d.to_string(),
            r.regime.to_string(),
            r.method.to_string(),
            r.best_alpha.to_string(),
            r.mean_shd.to_string(),
            r.replicates.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Fixed-width table for the terminal.
pub fn summary_table(rows: &[SummaryRow]) -> String {
    let mut s = format!(
        "{:>5} {:>6} {:>5} {:>13} {:>9} {:>12} {:>9}\n",
        "p", "n", "d", "regime", "method", "best_alpha", "mean_shd"
    );
    for r in rows {
        s += &format!(
            "{:>5} {:>6} {:>5} {:>13} {:>9} {:>12.3e} {:>9.3}\n",
            r.p, r.n, r.d, r.regime, r.method, r.best_alpha, r.mean_shd
        );
    }
    s
}
