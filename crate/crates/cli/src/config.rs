//! Experiment configuration: a TOML file with a fixed schema.

use std::path::Path;

use rankpc::correlation::CorrelationMethod;
use rankpc::simulate::Regime;
use serde::Deserialize;

/// `log10(alpha)` grid used when the config does not give one.
pub const DEFAULT_LOG10_ALPHA: [f64; 10] = [-7.0, -6.0, -5.0, -4.25, -3.5, -2.75, -2.0, -1.5, -1.0, -0.75];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    p: Vec<usize>,
    n: Vec<usize>,
    d: f64,
    regimes: Vec<String>,
    #[serde(default = "default_methods")]
    methods: Vec<String>,
    #[serde(default = "default_grid")]
    log10_alpha: Vec<f64>,
    replicates: usize,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    max_cond: Option<usize>,
    #[serde(default)]
    stable: bool,
    #[serde(default = "default_true")]
    timing: bool,
}

fn default_methods() -> Vec<String> {
    vec!["pearson".into(), "spearman".into()]
}

fn default_grid() -> Vec<f64> {
    DEFAULT_LOG10_ALPHA.to_vec()
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ps: Vec<usize>,
    pub ns: Vec<usize>,
    /// Expected node degree; edge probability is `d / (p - 1)`.
    pub d: f64,
    pub regimes: Vec<Regime>,
    pub methods: Vec<CorrelationMethod>,
    pub log10_alpha: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    pub max_cond: Option<usize>,
    pub stable: bool,
    /// Record wall-clock time per run; off gives `runtime_ms = 0` and fully
    /// reproducible records.
    pub timing: bool,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid(msg.into()))
}

fn dedup_sorted<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let mut v = v.to_vec();
    v.sort();
    v.dedup();
    v
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(text)?;
        let regimes = raw
            .regimes
            .iter()
            .map(|r| r.parse::<Regime>().map_err(ConfigError::Invalid))
            .collect::<Result<Vec<_>, _>>()?;
        let methods = raw
            .methods
            .iter()
            .map(|m| m.parse::<CorrelationMethod>().map_err(|e| ConfigError::Invalid(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        let cfg = Self {
            ps: dedup_sorted(&raw.p),
            ns: dedup_sorted(&raw.n),
            d: raw.d,
            regimes: dedup_sorted(&regimes),
            methods: dedup_sorted(&methods),
            log10_alpha: raw.log10_alpha,
            replicates: raw.replicates,
            seed: raw.seed,
            max_cond: raw.max_cond,
            stable: raw.stable,
            timing: raw.timing,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.ps.is_empty() || self.ns.is_empty() {
            return invalid("p and n must be nonempty");
        }
        if self.regimes.is_empty() || self.methods.is_empty() {
            return invalid("regimes and methods must be nonempty");
        }
        if self.log10_alpha.is_empty() {
            return invalid("alpha grid must be nonempty");
        }
        if let Some(a) = self.log10_alpha.iter().find(|a| !(a.is_finite() && **a < 0.0)) {
            return invalid(format!("log10_alpha value {a} does not give alpha in (0, 1)"));
        }
        if self.replicates == 0 {
            return invalid("replicates must be at least 1");
        }
        if !(self.d >= 0.0 && self.d.is_finite()) {
            return invalid("d must be nonnegative");
        }
        for &p in &self.ps {
            if p < 2 {
                return invalid(format!("p = {p}: need at least 2 nodes"));
            }
            if self.d >= p as f64 {
                return invalid(format!("d = {} must be below p = {p}", self.d));
            }
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < 4) {
            return invalid(format!("n = {n}: the Fisher-z test needs n >= 4"));
        }
        Ok(())
    }

    /// Edge probability for `p` nodes.
    pub fn edge_probability(&self, p: usize) -> f64 {
        (self.d / (p - 1) as f64).min(1.0)
    }

    /// `alpha = 10^l` for each grid value, in grid order.
    pub fn alphas(&self) -> Vec<f64> {
        self.log10_alpha.iter().map(|l| 10f64.powf(*l)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "p = [10]\nn = [100]\nd = 3\nregimes = [\"normal\"]\nreplicates = 2\n";

    #[test]
    fn defaults_fill_in() {
        let c = ExperimentConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.log10_alpha, DEFAULT_LOG10_ALPHA);
        assert_eq!(c.methods, vec![CorrelationMethod::Pearson, CorrelationMethod::Spearman]);
        assert!(c.timing && !c.stable);
        assert!((c.edge_probability(10) - 1.0 / 3.0).abs() < 1e-15);
        assert!((c.alphas()[6] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            MINIMAL.replace("d = 3", "d = 10"),
            MINIMAL.replace("replicates = 2", "replicates = 0"),
            format!("{MINIMAL}log10_alpha = []\n"),
            format!("{MINIMAL}log10_alpha = [0.5]\n"),
            format!("{MINIMAL}colour = \"red\"\n"),
            MINIMAL.replace("normal", "lognormal"),
            MINIMAL.replace("n = [100]", "n = [3]"),
            MINIMAL.replace("p = [10]", "p = []"),
        ];
        for text in &bad {
            assert!(ExperimentConfig::from_toml(text).is_err(), "{text}");
        }
    }
}
