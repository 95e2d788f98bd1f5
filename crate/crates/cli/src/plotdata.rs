//! Whitespace-delimited plot tables: mean SHD at the best alpha against `n`.

use crate::experiment::{summarize, ExperimentRecord};

pub const PLOT_HEADER: &str = "# n method mean_shd\n";

/// One `(file name, contents)` per `(regime, d, p)`, named like
/// `f11_d3_p10.dat`; rows sorted by method, then `n`. Without records a single
/// header-only `plotdata.dat` is produced.
pub fn plot_files(records: &[ExperimentRecord]) -> Vec<(String, String)> {
    if records.is_empty() {
        return vec![("plotdata.dat".to_string(), PLOT_HEADER.to_string())];
    }
    let mut rows = summarize(records);
    rows.sort_by(|a, b| {
        (a.regime.as_str(), a.d.to_bits(), a.p, a.method.as_str(), a.n)
            .cmp(&(b.regime.as_str(), b.d.to_bits(), b.p, b.method.as_str(), b.n))
    });
    let mut files: Vec<(String, String)> = Vec::new();
    for r in rows {
        let name = format!("{}_d{}_p{}.dat", r.regime, r.d, r.p);
        if files.last().is_none_or(|(last, _)| *last != name) {
            files.push((name, PLOT_HEADER.to_string()));
        }
        let body = &mut files.last_mut().expect("just pushed").1;
        body.push_str(&format!("{} {} {}\n", r.n, r.method, r.mean_shd));
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;
    use rankpc::correlation::CorrelationMethod;
    use rankpc::simulate::Regime;

    fn rec(regime: Regime, method: CorrelationMethod, n: usize, shd: usize) -> ExperimentRecord {
        ExperimentRecord {
            p: 10,
            n,
            d: 3.0,
            regime,
            method,
            alpha: 0.01,
            replicate: 0,
            seed: 0,
            shd,
            tests_run: 0,
            max_cond_used: None,
            runtime_ms: 0.0,
        }
    }

    #[test]
    fn one_file_per_regime_sorted_rows() {
        use CorrelationMethod::*;
        let recs = vec![
            rec(Regime::F11, Spearman, 1000, 2),
            rec(Regime::F11, Pearson, 1000, 9),
            rec(Regime::F11, Spearman, 100, 6),
            rec(Regime::F11, Pearson, 100, 12),
        ];
        let files = plot_files(&recs);
        assert_eq!(files.len(), 1);
        assert_eq!(files[0].0, "f11_d3_p10.dat");
        assert_eq!(
            files[0].1,
            "# n method mean_shd\n100 pearson 12\n1000 pearson 9\n100 spearman 6\n1000 spearman 2\n"
        );
        let two = plot_files(&[rec(Regime::Normal, Pearson, 100, 1), rec(Regime::F11, Pearson, 100, 1)]);
        assert_eq!(two.len(), 2);
    }

    #[test]
    fn empty_records_give_a_header() {
        assert_eq!(plot_files(&[]), vec![("plotdata.dat".to_string(), PLOT_HEADER.to_string())]);
    }
}
