mod common;

use common::{random_correlation, random_symmetric};
use itertools::Itertools;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rankpc::graph::NodeSet;
use rankpc::linalg::Matrix;
use rankpc::partial::{
    c_min, lambda_min_q, lemma1_bound_check, lemma2_check, lemma3_bound_check,
    partial_corr_inverse, partial_corr_recursive, partial_corr_recursive_by, BoundInputs,
    PartialQuery, rpc_error_bound, rpc_error_bound_sharp,
};

fn random_query<R: Rng>(p: usize, max_s: usize, rng: &mut R) -> PartialQuery {
    let mut nodes: Vec<usize> = (0..p).collect();
    rand::seq::SliceRandom::shuffle(nodes.as_mut_slice(), rng);
    let k = rng.random_range(0..=max_s.min(p - 2));
    PartialQuery::new(nodes[0], nodes[1], nodes[2..2 + k].iter().copied().collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn recursion_matches_inversion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(2..=8);
        let sigma = random_correlation(p, 2, &mut rng);
        let q = random_query(p, 4, &mut rng);
        let a = partial_corr_recursive(&sigma, &q).unwrap();
        let b = partial_corr_inverse(&sigma, &q).unwrap();
        prop_assert!((a - b).abs() <= 1e-10, "{a} vs {b}");
        prop_assert!(a.abs() <= 1.0 + 1e-12);
    }

    #[test]
    fn recursion_is_order_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(3..=7);
        let sigma = random_correlation(p, 2, &mut rng);
        let q = random_query(p, 4, &mut rng);
        let first = partial_corr_recursive(&sigma, &q).unwrap();
        let last = partial_corr_recursive_by(&sigma, &q, |s: &NodeSet| s.max().unwrap()).unwrap();
        let middle = partial_corr_recursive_by(&sigma, &q, |s: &NodeSet| s.as_slice()[s.len() / 2]).unwrap();
        prop_assert!((first - last).abs() <= 1e-10);
        prop_assert!((first - middle).abs() <= 1e-10);
    }

    #[test]
    fn submatrix_minima_are_monotone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = rng.random_range(3..=6);
        let sigma = random_correlation(p, 1, &mut rng);
        // I strictly inside J = all nodes
        let k = rng.random_range(2..p);
        let idx: Vec<usize> = (0..p).filter(|_| rng.random_bool(0.5)).collect();
        let idx = if idx.len() >= 2 { idx } else { vec![0, 1] };
        let sub = sigma.submatrix(&idx);
        let qi = k.min(idx.len());
        prop_assert!(lambda_min_q(&sigma, qi).unwrap() <= lambda_min_q(&sub, qi).unwrap() + 1e-12);
        let lam_full = sigma.as_matrix().min_eigenvalue();
        prop_assert!(lam_full <= sub.as_matrix().min_eigenvalue() + 1e-12);
        prop_assert!(lam_full <= 1.0 + 1e-12);
        if let (Some(cj), Some(ci)) = (c_min(&sigma, qi).unwrap(), c_min(&sub, qi).unwrap()) {
            prop_assert!(cj <= ci + 1e-12);
        }
    }
}

#[test]
fn lemma1_on_random_admissible_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..1000 {
        let q = rng.random_range(1..=6);
        let sigma = random_correlation(q, 2, &mut rng);
        let lam = sigma.as_matrix().min_eigenvalue();
        let eps = lam / q as f64 * rng.random_range(0.01..0.99);
        let e = random_symmetric(q, eps, &mut rng).scale(rng.random_range(0.0..0.999));
        assert!(lemma1_bound_check(sigma.as_matrix(), &e, eps).unwrap());
    }
}

#[test]
fn lemma2_on_random_correlation_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let p = rng.random_range(1..=8);
        let sigma = random_correlation(p, rng.random_range(0..3), &mut rng);
        assert!(lemma2_check(&sigma).unwrap());
    }
}

#[test]
fn lemma3_on_random_admissible_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let a11: f64 = rng.random_range(1.0..3.0);
        let a22: f64 = rng.random_range(1.0..3.0);
        let a12 = (a11 * a22).sqrt() * rng.random_range(-0.99..0.99);
        let a = [[a11, a12], [a12, a22]];
        let delta = rng.random_range(0.001..0.999);
        let d = random_symmetric(2, delta, &mut rng).scale(0.999);
        let b = [[a11 + d[(0, 0)], a12 + d[(0, 1)]], [a12 + d[(0, 1)], a22 + d[(1, 1)]]];
        assert!(lemma3_bound_check(a, b, delta).unwrap());
    }
}

#[test]
fn lemma_preconditions_are_enforced() {
    let sigma = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.5, 1.0]]);
    // lambda_min = 0.5, q = 2: eps must stay below 0.25
    assert!(lemma1_bound_check(&sigma, &Matrix::zeros(2), 0.3).is_err());
    assert!(lemma1_bound_check(&sigma, &Matrix::zeros(2), 0.2).unwrap());
    let a = [[1.0, 0.2], [0.2, 1.0]];
    assert!(lemma3_bound_check(a, a, 1.0).is_err());
    assert!(lemma3_bound_check([[0.5, 0.0], [0.0, 1.0]], a, 0.9).is_err());
}

#[test]
fn sharp_bound_never_exceeds_relaxed_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..500 {
        let (a, b) = BoundInputs::SPEARMAN;
        let q = rng.random_range(2..8);
        let inputs = BoundInputs {
            a,
            b,
            p: rng.random_range(q..50),
            n: rng.random_range(q + 1..100_000),
            q,
            c: rng.random_range(0.01..1.0),
            lambda: rng.random_range(0.01..1.0),
        };
        assert!(rpc_error_bound_sharp(&inputs).unwrap() <= rpc_error_bound(&inputs).unwrap());
    }
}

#[test]
fn c_min_covers_all_orders_up_to_q() {
    // chain 0 - 1 - 2 with rho = 0.5: rho_02 = 0.25, rho_02|1 = 0
    let sigma = rankpc::CorrelationMatrixF64::from_rows(&[
        vec![1.0, 0.5, 0.25],
        vec![0.5, 1.0, 0.5],
        vec![0.25, 0.5, 1.0],
    ])
    .unwrap();
    assert!((c_min(&sigma, 2).unwrap().unwrap() - 0.25).abs() < 1e-12);
    // order 1 adds rho_01|2 = rho_12|0 = (0.5 - 0.125) / sqrt(0.9375 * 0.75)
    let r = 0.375 / (0.9375f64 * 0.75).sqrt();
    assert!((c_min(&sigma, 3).unwrap().unwrap() - 0.25f64.min(r)).abs() < 1e-12);
    for pair in (0..3).combinations(2) {
        let q = PartialQuery::new(pair[0], pair[1], NodeSet::empty()).unwrap();
        assert!(partial_corr_inverse(&sigma, &q).unwrap().abs() >= 0.25 - 1e-12);
    }
}
