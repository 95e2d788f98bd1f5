//! Partial correlations and the quantities that control how estimation error
//! in a correlation matrix propagates to them.
//!
//! Two routes compute `rho_{uv|S}`: the classical recursion that peels one
//! conditioning variable at a time, and `-P_uv / sqrt(P_uu P_vv)` where `P` is
//! the inverse of the principal submatrix on `{u, v} ∪ S`. They agree on
//! positive-definite input and serve as checks on each other.

use itertools::Itertools;

use crate::correlation::CorrelationMatrix;
use crate::error::{Error, Result};
use crate::graph::NodeSet;
use crate::linalg::Matrix;
use crate::scalar::Scalar;

/// Partial correlations with magnitude at or below this count as zero.
pub const ZERO_PARTIAL_TOL: f64 = 1e-9;

/// Smallest admissible `1 - rho^2` factor in the recursion.
pub const RECURSION_DENOM_TOL: f64 = 1e-12;

/// Pair `(u, v)` and conditioning set `s`, with `u != v` and `u, v ∉ s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialQuery {
    u: usize,
    v: usize,
    s: NodeSet,
}

impl PartialQuery {
    pub fn new(u: usize, v: usize, s: NodeSet) -> Result<Self> {
        if u == v {
            return Err(Error::InvalidQuery(format!("u and v are both {u}")));
        }
        if s.contains(u) || s.contains(v) {
            return Err(Error::InvalidQuery(format!(
                "conditioning set {s} contains an endpoint of ({u}, {v})"
            )));
        }
        Ok(Self { u, v, s })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn s(&self) -> &NodeSet {
        &self.s
    }

    /// `[u, v, s...]`, the index list of the principal submatrix.
    pub fn indices(&self) -> Vec<usize> {
        let mut idx = vec![self.u, self.v];
        idx.extend(self.s.iter());
        idx
    }

    fn check_range(&self, p: usize) -> Result<()> {
        for node in [self.u, self.v] {
            if node >= p {
                return Err(Error::NodeOutOfRange { node, p });
            }
        }
        self.s.check_range(p)
    }
}

/// `rho_{uv|S}` by recursion, always eliminating the smallest index of `S`.
pub fn partial_corr_recursive<T: Scalar>(
    sigma: &CorrelationMatrix<T>,
    q: &PartialQuery,
) -> Result<T> {
    partial_corr_recursive_by(sigma, q, |s| s.as_slice()[0])
}

/// Recursion with a caller-chosen elimination rule; `pick` receives the
/// current (nonempty) conditioning set and must return one of its members.
pub fn partial_corr_recursive_by<T: Scalar>(
    sigma: &CorrelationMatrix<T>,
    q: &PartialQuery,
    pick: impl Fn(&NodeSet) -> usize + Copy,
) -> Result<T> {
    q.check_range(sigma.dim())?;
    recurse(sigma, q.u, q.v, &q.s, pick)
}

fn recurse<T: Scalar>(
    sigma: &CorrelationMatrix<T>,
    u: usize,
    v: usize,
    s: &NodeSet,
    pick: impl Fn(&NodeSet) -> usize + Copy,
) -> Result<T> {
    if s.is_empty() {
        return Ok(sigma.get(u, v));
    }
    let w = pick(s);
    debug_assert!(s.contains(w), "pick must return a member of the set");
    let rest = s.without(w);
    let r_uv = recurse(sigma, u, v, &rest, pick)?;
    let r_uw = recurse(sigma, u, w, &rest, pick)?;
    let r_vw = recurse(sigma, v, w, &rest, pick)?;
    let tol = T::of(RECURSION_DENOM_TOL);
    let du = T::one() - r_uw * r_uw;
    let dv = T::one() - r_vw * r_vw;
    for d in [du, dv] {
        if !(d > tol) {
            return Err(Error::DegenerateCorrelation(d.to_f64_lossy()));
        }
    }
    Ok((r_uv - r_uw * r_vw) / (du * dv).sqrt())
}

/// Partial correlation read off an inverse: `-P_01 / sqrt(P_00 P_11)`.
fn from_precision<T: Scalar>(inv: &Matrix<T>) -> T {
    -inv[(0, 1)] / (inv[(0, 0)] * inv[(1, 1)]).sqrt()
}

/// `rho_{uv|S}` from the Cholesky inverse of the principal submatrix.
pub fn partial_corr_inverse<T: Scalar>(
    sigma: &CorrelationMatrix<T>,
    q: &PartialQuery,
) -> Result<T> {
    q.check_range(sigma.dim())?;
    let idx = q.indices();
    let inv = sigma
        .principal(&idx)
        .spd_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite {
            indices: idx.clone(),
        })?;
    Ok(from_precision(&inv))
}

fn check_order(q: usize, p: usize) -> Result<()> {
    if q < 2 || q > p {
        return Err(Error::OrderOutOfRange(format!("need 2 <= q <= p, got q = {q}, p = {p}")));
    }
    Ok(())
}

/// Smallest nonzero `|rho_{uv|S}|` over all `u, v, S` with `|{u, v} ∪ S| <= q`,
/// or `None` when every such partial correlation vanishes.
///
/// Enumerates `O(p^2 2^p)` queries in the worst case; meant for small `p`.
pub fn c_min<T: Scalar>(sigma: &CorrelationMatrix<T>, q: usize) -> Result<Option<T>> {
    let p = sigma.dim();
    check_order(q, p)?;
    let zero = T::of(ZERO_PARTIAL_TOL);
    let mut best: Option<T> = None;
    for u in 0..p {
        for v in (u + 1)..p {
            let others: Vec<usize> = (0..p).filter(|&w| w != u && w != v).collect();
            for k in 0..=(q - 2) {
                for s in others.iter().copied().combinations(k) {
                    let query = PartialQuery::new(u, v, s.into())?;
                    let r = partial_corr_inverse(sigma, &query)?.abs();
                    if r > zero && best.is_none_or(|b| r < b) {
                        best = Some(r);
                    }
                }
            }
        }
    }
    Ok(best)
}

/// Smallest eigenvalue over all `q x q` principal submatrices.
pub fn lambda_min_q<T: Scalar>(sigma: &CorrelationMatrix<T>, q: usize) -> Result<T> {
    let p = sigma.dim();
    check_order(q, p)?;
    Ok((0..p)
        .combinations(q)
        .map(|idx| sigma.principal(&idx).min_eigenvalue())
        .fold(T::infinity(), T::min))
}

/// Inputs of the finite-sample error bound for the rank PC algorithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// Tail constants of the correlation estimator,
    /// `P(|rho_hat - rho| > eps) < a exp(-b n eps^2)`.
    pub a: f64,
    pub b: f64,
    pub p: usize,
    pub n: usize,
    /// `deg(G) + 2`
    pub q: usize,
    /// Smallest nonzero partial correlation of order `q`.
    pub c: f64,
    /// Smallest eigenvalue of a `q x q` principal submatrix.
    pub lambda: f64,
}

impl BoundInputs {
    /// Spearman constants `A = 2`, `B = 2 / (9 pi^2)`.
    pub const SPEARMAN: (f64, f64) = (2.0, 2.0 / (9.0 * std::f64::consts::PI * std::f64::consts::PI));
    /// Kendall constants `A = 2`, `B = 2 / pi^2`.
    pub const KENDALL: (f64, f64) = (2.0, 2.0 / (std::f64::consts::PI * std::f64::consts::PI));

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Precondition(m.to_string()));
        if !(self.a > 0.0 && self.a.is_finite() && self.b > 0.0 && self.b.is_finite()) {
            return bad("estimator constants must be positive and finite");
        }
        if self.p == 0 || self.q == 0 {
            return bad("p and q must be positive");
        }
        if self.n <= self.q {
            return bad("need n > q");
        }
        if !(self.c > 0.0 && self.c <= 1.0) || !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return bad("c and lambda must lie in (0, 1]");
        }
        Ok(())
    }
}

/// `(A/2) p^2 exp(-B lambda^4 n c^2 / (36 q^2))`, an upper bound on the
/// probability that the rank PC output differs from the true CPDAG.
pub fn rpc_error_bound(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let (p, n, q) = (b.p as f64, b.n as f64, b.q as f64);
    Ok(b.a / 2.0 * p * p * (-b.b * b.lambda.powi(4) * n * b.c * b.c / (36.0 * q * q)).exp())
}

/// The unrelaxed form of [`rpc_error_bound`], with `((4 + c) q + lambda c q)^2`
/// in place of `36 q^2`. Never larger than the relaxed bound.
pub fn rpc_error_bound_sharp(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let (p, n, q) = (b.p as f64, b.n as f64, b.q as f64);
    let d = (4.0 + b.c) * q + b.lambda * b.c * q;
    Ok(b.a / 2.0 * p * p * (-b.b * b.lambda.powi(4) * n * b.c * b.c / (d * d)).exp())
}

/// Threshold `gamma = c / 2` under which the bound holds.
pub fn bound_threshold(c: f64) -> f64 {
    c / 2.0
}

/// Uniform correlation error `eps = c lambda^2 / ((4 + c) q + lambda c q)` that
/// guarantees every test of order `q - 2` decides correctly at `gamma = c/2`.
pub fn uniform_error_tolerance(c: f64, lambda: f64, q: usize) -> f64 {
    let q = q as f64;
    c * lambda * lambda / ((4.0 + c) * q + lambda * c * q)
}

/// `(q eps / lambda^2) / (1 - q eps / lambda)`: sup-norm error of an inverse
/// under a sup-norm perturbation smaller than `eps < lambda / q`.
pub fn inversion_error_bound(q: usize, eps: f64, lambda: f64) -> f64 {
    let q = q as f64;
    (q * eps / (lambda * lambda)) / (1.0 - q * eps / lambda)
}

/// `2 delta / (1 - delta)`: error of a normalized off-diagonal entry.
pub fn normalized_entry_error_bound(delta: f64) -> f64 {
    2.0 * delta / (1.0 - delta)
}

/// Checks the matrix-inversion perturbation inequality
/// `||(S + E)^{-1} - S^{-1}||_inf <= (q eps / l^2) / (1 - q eps / l)` for a
/// symmetric positive-definite `S` with smallest eigenvalue `l`.
///
/// Errors unless `||E||_inf < eps < l / q`.
pub fn lemma1_bound_check<T: Scalar>(sigma: &Matrix<T>, e: &Matrix<T>, eps: T) -> Result<bool> {
    let q = sigma.dim();
    if e.dim() != q {
        return Err(Error::LengthMismatch(q, e.dim()));
    }
    if !sigma.is_symmetric(T::of(1e-12)) {
        return Err(Error::Precondition("sigma must be symmetric".into()));
    }
    let lambda = sigma.min_eigenvalue();
    if !(lambda > T::zero()) {
        return Err(Error::Precondition("sigma must be positive definite".into()));
    }
    let qf = T::of_usize(q);
    if !(e.max_abs() < eps && eps < lambda / qf) {
        return Err(Error::Precondition(format!(
            "need ||E||_inf < eps < lambda_min / q; got {} < {} < {}",
            e.max_abs(),
            eps,
            lambda / qf
        )));
    }
    let Some(inv) = sigma.spd_inverse() else {
        return Err(Error::Precondition("sigma must be positive definite".into()));
    };
    let Some(inv_pert) = sigma.add(e).inverse() else {
        return Ok(false);
    };
    let lhs = inv_pert.sub(&inv).max_abs();
    let rhs = (qf * eps / (lambda * lambda)) / (T::one() - qf * eps / lambda);
    Ok(lhs <= rhs)
}

/// Checks that every diagonal entry of the inverse of a positive-definite
/// correlation matrix is at least `1 - 1e-9`.
pub fn lemma2_check<T: Scalar>(sigma: &CorrelationMatrix<T>) -> Result<bool> {
    let p = sigma.dim();
    let inv = sigma
        .as_matrix()
        .spd_inverse()
        .ok_or_else(|| Error::NotPositiveDefinite {
            indices: (0..p).collect(),
        })?;
    let floor = T::one() - T::of(1e-9);
    Ok((0..p).all(|i| inv[(i, i)] >= floor))
}

/// Checks `|a12/sqrt(a11 a22) - b12/sqrt(b11 b22)| < 2 delta / (1 - delta)`
/// for symmetric 2x2 `a` (positive definite, `a11, a22 >= 1`) and `b` with
/// `||a - b||_inf < delta < 1`.
pub fn lemma3_bound_check<T: Scalar>(a: [[T; 2]; 2], b: [[T; 2]; 2], delta: T) -> Result<bool> {
    let pre = |m: &str| Err(Error::Precondition(m.to_string()));
    if a[0][1] != a[1][0] || b[0][1] != b[1][0] {
        return pre("matrices must be symmetric");
    }
    if !(a[0][0] >= T::one() && a[1][1] >= T::one()) {
        return pre("need a11, a22 >= 1");
    }
    if !(a[0][0] * a[1][1] - a[0][1] * a[0][1] > T::zero()) {
        return pre("a must be positive definite");
    }
    if !(delta < T::one()) {
        return pre("need delta < 1");
    }
    let dist = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| (a[i][j] - b[i][j]).abs())
        .fold(T::zero(), T::max);
    if !(dist < delta) {
        return pre("need ||a - b||_inf < delta");
    }
    if !(b[0][0] > T::zero() && b[1][1] > T::zero()) {
        return pre("b11 and b22 must be positive");
    }
    let na = a[0][1] / (a[0][0] * a[1][1]).sqrt();
    let nb = b[0][1] / (b[0][0] * b[1][1]).sqrt();
    Ok((na - nb).abs() < T::of(2.0) * delta / (T::one() - delta))
}
