//! Conditional-independence decisions.
//!
//! A [`CiDecider`] answers "is `X_u` independent of `X_v` given `X_S`?" and is
//! the only thing the PC search sees. Data-driven deciders estimate the
//! correlation matrix once and threshold partial correlations, either at a
//! fixed `gamma` or through Fisher's z-transform at level `alpha`. The oracle
//! decider reads d-separation off a known DAG.

use std::sync::Arc;

use crate::correlation::{estimate_correlation_matrix, CorrelationMatrix, CorrelationMethod, Dataset};
use crate::error::{Error, Result};
use crate::graph::{d_separated, Dag, NodeSet};
use crate::partial::{partial_corr_inverse, PartialQuery};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Independent,
    Dependent,
}

impl Decision {
    pub fn is_independent(self) -> bool {
        self == Decision::Independent
    }
}

/// A decision plus an optional diagnostic explaining a fallback.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub decision: Decision,
    pub warning: Option<String>,
}

impl From<Decision> for Verdict {
    fn from(decision: Decision) -> Self {
        Self {
            decision,
            warning: None,
        }
    }
}

pub trait CiDecider: Send + Sync {
    fn node_count(&self) -> usize;

    /// Deterministic and symmetric in `(u, v)`.
    fn decide(&self, u: usize, v: usize, s: &NodeSet) -> Result<Verdict>;

    /// Largest conditioning set the decider can handle, if bounded.
    fn max_cond(&self) -> Option<usize> {
        None
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against [`normal_cdf`]. Odd about `0.5` by construction.
pub fn inverse_normal_cdf(prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::Domain {
            value: prob,
            domain: "(0, 1)",
        });
    }
    if prob > 0.5 {
        // 1 - prob is exact here
        return Ok(-lower_quantile(1.0 - prob));
    }
    Ok(lower_quantile(prob))
}

fn lower_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p == 0.5 {
        return 0.0;
    }
    let x = if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (x * x / 2.0).exp();
    x - u / (1.0 + x * u / 2.0)
}

/// `Phi^{-1}(1 - alpha/2)`, evaluated as `-Phi^{-1}(alpha/2)` to keep precision
/// for small `alpha`.
pub fn two_sided_quantile(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain {
            value: alpha,
            domain: "(0, 1)",
        });
    }
    Ok(-inverse_normal_cdf(alpha / 2.0)?)
}

/// Independent iff `|rho_hat| <= gamma`.
pub fn threshold_decide<T: Scalar>(rho_hat: T, gamma: T) -> Result<Decision> {
    if rho_hat.is_nan() {
        return Err(Error::NonFinite);
    }
    if !(gamma >= T::zero() && gamma <= T::one()) {
        return Err(Error::Domain {
            value: gamma.to_f64_lossy(),
            domain: "[0, 1]",
        });
    }
    Ok(if rho_hat.abs() <= gamma {
        Decision::Independent
    } else {
        Decision::Dependent
    })
}

fn effective_size(n: usize, s_size: usize) -> Result<usize> {
    n.checked_sub(s_size + 3)
        .filter(|&m| m >= 1)
        .ok_or(Error::InsufficientSample { n, s_size })
}

/// Fisher-z test with the `n - |S| - 3` adjustment: independent iff
/// `sqrt(n - |S| - 3) |atanh(rho_hat)| <= Phi^{-1}(1 - alpha/2)`.
pub fn fisher_z_decide<T: Scalar>(rho_hat: T, n: usize, s_size: usize, alpha: f64) -> Result<Decision> {
    let m = effective_size(n, s_size)?;
    if rho_hat.is_nan() {
        return Err(Error::NonFinite);
    }
    if !(rho_hat.abs() < T::one()) {
        return Err(Error::Domain {
            value: rho_hat.to_f64_lossy(),
            domain: "(-1, 1)",
        });
    }
    let half = T::of(0.5);
    let z = (half * ((T::one() + rho_hat) / (T::one() - rho_hat)).ln()).abs();
    let stat = T::of_usize(m).sqrt() * z;
    Ok(if stat <= T::of(two_sided_quantile(alpha)?) {
        Decision::Independent
    } else {
        Decision::Dependent
    })
}

/// `(exp(z / sqrt(m)) - 1) / (exp(z / sqrt(m)) + 1)` with `m = n - |S| - 3`:
/// the partial-correlation cutoff that the Fisher-z test at doubled quantile
/// `z = 2 Phi^{-1}(1 - alpha/2)` amounts to.
pub fn gamma_threshold<T: Scalar>(n: usize, s_size: usize, z: T) -> Result<T> {
    let m = effective_size(n, s_size)?;
    if !(z >= T::zero()) {
        return Err(Error::Domain {
            value: z.to_f64_lossy(),
            domain: "[0, inf)",
        });
    }
    let e = (z / T::of_usize(m).sqrt()).exp();
    Ok((e - T::one()) / (e + T::one()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CiRule {
    /// Fixed cutoff on `|rho_hat_{uv|S}|`, `gamma` in `[0, 1]`.
    Threshold { gamma: f64 },
    /// Fisher-z test at level `alpha` in `(0, 1)`.
    FisherZ { alpha: f64 },
}

impl CiRule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            CiRule::Threshold { gamma } if !(0.0..=1.0).contains(&gamma) => Err(Error::Domain {
                value: gamma,
                domain: "[0, 1]",
            }),
            CiRule::FisherZ { alpha } if !(alpha > 0.0 && alpha < 1.0) => Err(Error::Domain {
                value: alpha,
                domain: "(0, 1)",
            }),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConfig {
    pub rule: CiRule,
    pub method: CorrelationMethod,
}

/// Partial-correlation test over a cached correlation-matrix estimate.
#[derive(Debug, Clone)]
pub struct CorrelationDecider<T> {
    sigma: Arc<CorrelationMatrix<T>>,
    n: usize,
    rule: CiRule,
}

impl<T: Scalar> CorrelationDecider<T> {
    pub fn from_matrix(sigma: Arc<CorrelationMatrix<T>>, n: usize, rule: CiRule) -> Result<Self> {
        rule.validate()?;
        Ok(Self { sigma, n, rule })
    }

    /// Same estimate, different rule. The matrix is shared, not recomputed.
    pub fn with_rule(&self, rule: CiRule) -> Result<Self> {
        Self::from_matrix(Arc::clone(&self.sigma), self.n, rule)
    }

    pub fn sigma(&self) -> &CorrelationMatrix<T> {
        &self.sigma
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn rule(&self) -> CiRule {
        self.rule
    }

    /// `rho_hat_{uv|S}` by the inversion route, with `(u, v)` put in
    /// ascending order so the value is symmetric bit for bit.
    pub fn partial(&self, u: usize, v: usize, s: &NodeSet) -> Result<T> {
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        partial_corr_inverse(&self.sigma, &PartialQuery::new(a, b, s.clone())?)
    }
}

impl<T: Scalar> CiDecider for CorrelationDecider<T> {
    fn node_count(&self) -> usize {
        self.sigma.dim()
    }

    fn decide(&self, u: usize, v: usize, s: &NodeSet) -> Result<Verdict> {
        let rho = match self.partial(u, v, s) {
            Ok(r) => r,
            Err(Error::NotPositiveDefinite { indices }) => {
                let msg = format!("submatrix on {indices:?} not positive definite; kept edge {u}-{v} given {s}");
                log::debug!("{msg}");
                return Ok(Verdict {
                    decision: Decision::Dependent,
                    warning: Some(msg),
                });
            }
            Err(e) => return Err(e),
        };
        match self.rule {
            CiRule::Threshold { gamma } => Ok(threshold_decide(rho, T::of(gamma))?.into()),
            CiRule::FisherZ { alpha } => {
                if !(rho.abs() < T::one()) {
                    let msg = format!("|partial correlation| >= 1 for {u}-{v} given {s}; kept edge");
                    log::debug!("{msg}");
                    return Ok(Verdict {
                        decision: Decision::Dependent,
                        warning: Some(msg),
                    });
                }
                Ok(fisher_z_decide(rho, self.n, s.len(), alpha)?.into())
            }
        }
    }

    fn max_cond(&self) -> Option<usize> {
        match self.rule {
            CiRule::Threshold { .. } => None,
            // n - |S| - 3 >= 1
            CiRule::FisherZ { .. } => Some(self.n.saturating_sub(4)),
        }
    }
}

/// Estimates the correlation matrix with `config.method` and wraps it in a
/// decider applying `config.rule`.
pub fn make_rank_ci_decider<T: Scalar>(
    data: &Dataset<T>,
    config: &TestConfig,
) -> Result<CorrelationDecider<T>> {
    config.rule.validate()?;
    let sigma = estimate_correlation_matrix(data, config.method)?;
    CorrelationDecider::from_matrix(Arc::new(sigma), data.n(), config.rule)
}

/// Answers with d-separation in a known DAG.
#[derive(Debug, Clone)]
pub struct OracleDecider {
    dag: Dag,
}

impl OracleDecider {
    pub fn dag(&self) -> &Dag {
        &self.dag
    }
}

pub fn make_oracle_decider(dag: &Dag) -> OracleDecider {
    OracleDecider { dag: dag.clone() }
}

impl CiDecider for OracleDecider {
    fn node_count(&self) -> usize {
        self.dag.node_count()
    }

    fn decide(&self, u: usize, v: usize, s: &NodeSet) -> Result<Verdict> {
        Ok(if d_separated(&self.dag, u, v, s)? {
            Decision::Independent
        } else {
            Decision::Dependent
        }
        .into())
    }
}
