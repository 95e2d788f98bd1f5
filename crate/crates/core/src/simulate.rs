//! Random DAGs and linear structural equation models `X = B X + e`, sampled
//! under three regimes: Gaussian, Gaussian copula with F(1,1) marginals, and
//! Gaussian/Cauchy contaminated innovations.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal, Uniform};

use crate::citest::normal_cdf;
use crate::correlation::{CorrelationMatrix, Dataset};
use crate::error::{Error, Result};
use crate::graph::{parse_edge_list, Dag, EdgeKind};
use crate::linalg::Matrix;

/// Probability of a standard normal draw in [`contaminated_noise`].
pub const CONTAMINATION_NORMAL_SHARE: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKind {
    StandardNormal,
    /// 80/20 mixture of standard normal and standard Cauchy.
    CauchyMixture,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MarginalTransform {
    Identity,
    /// Latent normal marginals mapped to F(1,1) through the true marginal CDF.
    F11,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Regime {
    Normal,
    F11,
    Contaminated,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::Normal, Regime::F11, Regime::Contaminated];

    pub fn noise(self) -> NoiseKind {
        match self {
            Regime::Contaminated => NoiseKind::CauchyMixture,
            _ => NoiseKind::StandardNormal,
        }
    }

    pub fn marginal(self) -> MarginalTransform {
        match self {
            Regime::F11 => MarginalTransform::F11,
            _ => MarginalTransform::Identity,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Normal => "normal",
            Regime::F11 => "f11",
            Regime::Contaminated => "contaminated",
        }
    }

    /// Stable small integer used in seed derivation.
    pub fn code(self) -> u64 {
        match self {
            Regime::Normal => 0,
            Regime::F11 => 1,
            Regime::Contaminated => 2,
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Regime {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "normal" => Ok(Regime::Normal),
            "f11" => Ok(Regime::F11),
            "contaminated" => Ok(Regime::Contaminated),
            other => Err(format!("unknown regime {other:?}")),
        }
    }
}

/// Linear SEM: `X_v = sum_{u -> v} w(u, v) X_u + e_v`, then a marginal map.
#[derive(Debug, Clone, PartialEq)]
pub struct SemModel {
    dag: Dag,
    /// `weights[(u, v)]` is the coefficient of `u -> v`; zero off the edges.
    weights: Matrix<f64>,
    pub noise: NoiseKind,
    pub marginal: MarginalTransform,
}

impl SemModel {
    pub fn new(
        dag: Dag,
        weights: Matrix<f64>,
        noise: NoiseKind,
        marginal: MarginalTransform,
    ) -> Result<Self> {
        let p = dag.node_count();
        if weights.dim() != p {
            return Err(Error::NodeCountMismatch(p, weights.dim()));
        }
        for u in 0..p {
            for v in 0..p {
                let w = weights[(u, v)];
                if !w.is_finite() {
                    return Err(Error::NonFinite);
                }
                if w != 0.0 && !dag.has_edge(u, v) {
                    return Err(Error::InvalidQuery(format!(
                        "nonzero weight {w} on non-edge {u} -> {v}"
                    )));
                }
            }
        }
        Ok(Self {
            dag,
            weights,
            noise,
            marginal,
        })
    }

    pub fn for_regime(dag: Dag, weights: Matrix<f64>, regime: Regime) -> Result<Self> {
        Self::new(dag, weights, regime.noise(), regime.marginal())
    }

    pub fn dag(&self) -> &Dag {
        &self.dag
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    pub fn weights(&self) -> &Matrix<f64> {
        &self.weights
    }

    /// Parses the weighted edge-list format (`u -> v : w`). Noise and marginal
    /// transform are not part of the text and must be supplied.
    pub fn parse(text: &str, noise: NoiseKind, marginal: MarginalTransform) -> Result<Self> {
        let list = parse_edge_list(text)?;
        let p = list.p;
        let mut w = Matrix::zeros(p);
        let mut edges = Vec::new();
        for e in &list.edges {
            if e.kind != EdgeKind::Directed {
                return Err(Error::InvalidQuery("SEM edges must be directed".into()));
            }
            if e.u >= p || e.v >= p {
                return Err(Error::NodeOutOfRange { node: e.u.max(e.v), p });
            }
            w[(e.u, e.v)] = e.weight.unwrap_or(0.0);
            edges.push((e.u, e.v));
        }
        Self::new(Dag::new(p, edges)?, w, noise, marginal)
    }
}

impl fmt::Display for SemModel {
    /// Edge list with weights; `{}` on `f64` round-trips exactly.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p={}", self.dag.node_count())?;
        for (u, v) in self.dag.edges() {
            writeln!(f, "{u} -> {v} : {}", self.weights[(u, v)])?;
        }
        Ok(())
    }
}

/// Each pair `u < v` gets the edge `u -> v` with probability `s`, independently.
pub fn random_dag<R: Rng + ?Sized>(p: usize, s: f64, rng: &mut R) -> Result<Dag> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain {
            value: s,
            domain: "[0, 1]",
        });
    }
    let mut edges = Vec::new();
    for u in 0..p {
        for v in (u + 1)..p {
            if rng.random_bool(s) {
                edges.push((u, v));
            }
        }
    }
    Dag::new(p, edges)
}

/// Independent Uniform(0.1, 1) coefficient for every edge, zero elsewhere.
pub fn random_weights<R: Rng + ?Sized>(dag: &Dag, rng: &mut R) -> Matrix<f64> {
    let dist = Uniform::new(0.1, 1.0).expect("valid range");
    let mut w = Matrix::zeros(dag.node_count());
    for (u, v) in dag.edges() {
        // the open interval excludes the lower end
        let mut x = dist.sample(rng);
        while x <= 0.1 {
            x = dist.sample(rng);
        }
        w[(u, v)] = x;
    }
    w
}

/// Standard normal with probability 0.8, otherwise standard Cauchy drawn as
/// `tan(pi (U - 1/2))`.
pub fn contaminated_noise<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    if rng.random_bool(CONTAMINATION_NORMAL_SHARE) {
        StandardNormal.sample(rng)
    } else {
        let u: f64 = Open01.sample(rng);
        (std::f64::consts::PI * (u - 0.5)).tan()
    }
}

/// F(1,1) quantile `tan^2(pi u / 2)`.
pub fn f11_transform(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::Domain {
            value: u,
            domain: "(0, 1)",
        });
    }
    let t = (std::f64::consts::FRAC_PI_2 * u).tan();
    Ok(t * t)
}

/// `f11_transform(Phi(z))` evaluated without cancellation in the upper tail:
/// for `z > 0` it uses `tan(pi u / 2) = 1 / tan(pi (1 - u) / 2)`.
pub fn f11_from_latent(z: f64) -> f64 {
    let half_pi = std::f64::consts::FRAC_PI_2;
    if z <= 0.0 {
        let t = (half_pi * normal_cdf(z)).tan();
        t * t
    } else {
        let t = (half_pi * normal_cdf(-z)).tan();
        1.0 / (t * t)
    }
}

/// Rows of `(I - B)^{-1}`: `X = M e`.
fn total_effects(model: &SemModel) -> Matrix<f64> {
    let dag = &model.dag;
    let p = dag.node_count();
    let mut m = Matrix::zeros(p);
    for v in dag.topological_order().expect("a Dag is acyclic") {
        m[(v, v)] = 1.0;
        for &u in dag.parents(v) {
            let w = model.weights[(u, v)];
            for k in 0..p {
                let add = w * m[(u, k)];
                m[(v, k)] += add;
            }
        }
    }
    m
}

/// Covariance of the latent linear SEM with unit-variance normal noise,
/// `(I - B)^{-1} (I - B)^{-T}`.
pub fn implied_raw_covariance(model: &SemModel) -> Result<Matrix<f64>> {
    if model.noise == NoiseKind::CauchyMixture {
        return Err(Error::Unsupported(
            "Cauchy-contaminated noise has no covariance",
        ));
    }
    let m = total_effects(model);
    Ok(m.matmul(&m.transpose()))
}

/// Implied correlation matrix of the latent normal SEM.
pub fn implied_covariance(model: &SemModel) -> Result<CorrelationMatrix<f64>> {
    CorrelationMatrix::from_covariance(&implied_raw_covariance(model)?)
}

/// Draws `n` observations: innovations per the noise kind, forward
/// substitution in topological order, then the marginal transform.
pub fn sample_sem<R: Rng + ?Sized>(model: &SemModel, n: usize, rng: &mut R) -> Result<Dataset<f64>> {
    let dag = &model.dag;
    let p = dag.node_count();
    let order = dag.topological_order().expect("a Dag is acyclic");
    let mut cols = vec![Vec::with_capacity(n); p];
    let mut row = vec![0.0; p];
    for _ in 0..n {
        // innovations in node order, then substitution in topological order
        for e in row.iter_mut() {
            *e = match model.noise {
                NoiseKind::StandardNormal => StandardNormal.sample(rng),
                NoiseKind::CauchyMixture => contaminated_noise(rng),
            };
        }
        for &v in &order {
            for &u in dag.parents(v) {
                row[v] += model.weights[(u, v)] * row[u];
            }
        }
        for (col, &x) in cols.iter_mut().zip(&row) {
            col.push(x);
        }
    }
    if model.marginal == MarginalTransform::F11 {
        let cov = implied_raw_covariance(model)?;
        for (v, col) in cols.iter_mut().enumerate() {
            let sd = cov[(v, v)].sqrt();
            for x in col.iter_mut() {
                *x = f11_from_latent(*x / sd);
            }
        }
    }
    Dataset::from_columns(cols)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic seed for a coordinate tuple, e.g. `(p, n, d, regime, rep)`.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |h, &x| splitmix64(h ^ splitmix64(x)))
}

/// Seeded generator that can fork independent child streams by index.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream depending only on this stream's seed and `index`.
    pub fn split(&self, index: u64) -> Self {
        Self::new(derive_seed(self.seed, &[index]))
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_dag_extremes() {
        let mut rng = RngStream::new(1);
        assert_eq!(random_dag(6, 0.0, &mut rng).unwrap().edge_count(), 0);
        assert_eq!(random_dag(6, 1.0, &mut rng).unwrap().edge_count(), 15);
        assert!(random_dag(3, 1.5, &mut rng).is_err());
        let g = random_dag(8, 0.5, &mut rng).unwrap();
        assert!(g.edges().all(|(u, v)| u < v));
    }

    #[test]
    fn weights_support() {
        let mut rng = RngStream::new(2);
        let g = random_dag(10, 0.6, &mut rng).unwrap();
        let w = random_weights(&g, &mut rng);
        for u in 0..10 {
            for v in 0..10 {
                if g.has_edge(u, v) {
                    assert!(w[(u, v)] > 0.1 && w[(u, v)] < 1.0);
                } else {
                    assert_eq!(w[(u, v)], 0.0);
                }
            }
        }
        assert_eq!(random_weights(&Dag::empty(4), &mut rng), Matrix::zeros(4));
    }

    #[test]
    fn implied_single_edge() {
        let g = Dag::new(2, [(0, 1)]).unwrap();
        let mut w = Matrix::zeros(2);
        w[(0, 1)] = 0.5;
        let m = SemModel::for_regime(g, w, Regime::Normal).unwrap();
        let c = implied_covariance(&m).unwrap();
        assert!((c.get(0, 1) - 0.5 / 1.25f64.sqrt()).abs() < 1e-15);
        assert!((c.get(0, 1) - 0.4472).abs() < 1e-4);
        let cont = SemModel::new(m.dag().clone(), m.weights().clone(), NoiseKind::CauchyMixture, MarginalTransform::Identity).unwrap();
        assert!(matches!(implied_covariance(&cont), Err(Error::Unsupported(_))));
    }

    #[test]
    fn implied_empty_is_identity() {
        let m = SemModel::for_regime(Dag::empty(3), Matrix::zeros(3), Regime::Normal).unwrap();
        assert_eq!(implied_covariance(&m).unwrap(), CorrelationMatrix::identity(3));
    }

    #[test]
    fn model_rejects_off_edge_weights() {
        let mut w = Matrix::zeros(2);
        w[(1, 0)] = 0.3;
        let g = Dag::new(2, [(0, 1)]).unwrap();
        assert!(SemModel::for_regime(g, w, Regime::Normal).is_err());
    }

    #[test]
    fn model_text_round_trip() {
        let mut rng = RngStream::new(3);
        let g = random_dag(6, 0.5, &mut rng).unwrap();
        let w = random_weights(&g, &mut rng);
        let m = SemModel::for_regime(g, w, Regime::Normal).unwrap();
        let text = m.to_string();
        let back = SemModel::parse(&text, NoiseKind::StandardNormal, MarginalTransform::Identity).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn f11_examples() {
        assert!((f11_transform(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!(f11_transform(0.0).is_err());
        assert!(f11_transform(1.0).is_err());
        let us = [0.01, 0.2, 0.4, 0.6, 0.8, 0.99];
        let vals: Vec<f64> = us.iter().map(|&u| f11_transform(u).unwrap()).collect();
        assert!(vals.windows(2).all(|w| w[0] < w[1]));
        for z in [-3.0, -0.5, 0.0, 0.7, 2.5] {
            let direct = f11_transform(normal_cdf(z)).unwrap();
            assert!((f11_from_latent(z) - direct).abs() <= 1e-12 * direct.max(1.0));
        }
    }

    #[test]
    fn seeds_are_deterministic_and_spread() {
        assert_eq!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 2, 3]));
        assert_ne!(derive_seed(7, &[1, 2, 3]), derive_seed(7, &[1, 2, 4]));
        assert_ne!(derive_seed(7, &[1, 2]), derive_seed(7, &[2, 1]));
        let a = RngStream::new(5).split(0).next_u64();
        let b = RngStream::new(5).split(0).next_u64();
        let c = RngStream::new(5).split(1).next_u64();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn regime_names() {
        for r in Regime::ALL {
            assert_eq!(r.as_str().parse::<Regime>().unwrap(), r);
        }
        assert!("cauchy".parse::<Regime>().is_err());
    }
}
