//! Solver outputs cross-checked against slow but independently correct
//! oracles: dense grid search for hull projections, exhaustive diagonal
//! tests for commuting composite problems, and the classical
//! likelihood-ratio rule for simple testing.

use steinlab::classical::{beta_eps_classical, kl_bits, Distribution};
use steinlab::div::{
    beta_eps_composite, neyman_pearson_simple, relent_to_hull, umegaki,
};
use steinlab::random::{random_density, rng_from_seed};
use steinlab::DensityOperator;

fn diag(probs: &[f64]) -> DensityOperator {
    DensityOperator::from_diag(vec![probs.len()], probs).unwrap()
}

/// Hull projection vs a dense 1-D grid: distance from a qubit state to the
/// segment between diag(.25,.75) and diag(.75,.25).
#[test]
fn hull_relent_matches_grid_oracle() {
    let ends = [diag(&[0.25, 0.75]), diag(&[0.75, 0.25])];
    let mut rng = rng_from_seed(11);
    for _ in 0..4 {
        let rho = random_density(&[2], &mut rng).unwrap();
        let bracket = relent_to_hull(&rho, &ends).unwrap();
        let mut best = f64::INFINITY;
        let steps = 10_000usize;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            let mix = DensityOperator::mixture(&ends, &[1.0 - t, t]).unwrap();
            best = best.min(umegaki(&rho, &mix).unwrap());
        }
        // Grid resolution 1e-4 bounds the oracle's own error.
        assert!(
            bracket.upper >= best - 1e-9,
            "upper bracket {} undercuts grid optimum {}",
            bracket.upper,
            best
        );
        assert!(
            bracket.upper <= best + 1e-6,
            "upper bracket {} is loose vs grid optimum {}",
            bracket.upper,
            best
        );
        assert!(bracket.lower <= best + 1e-9);
    }
}

/// Neyman-Pearson on commuting pairs vs the classical likelihood-ratio rule.
#[test]
fn np_matches_classical_oracle() {
    let mut rng = rng_from_seed(5);
    for d in [2usize, 3, 4] {
        for _ in 0..4 {
            let p = steinlab::random::random_probs(d, &mut rng);
            let q = steinlab::random::random_probs(d, &mut rng);
            let rho = diag(&p);
            let sigma = diag(&q);
            for eps in [0.05, 0.25, 0.6] {
                let np = neyman_pearson_simple(&rho, &sigma, eps).unwrap();
                let oracle = beta_eps_classical(
                    &Distribution::new(p.clone()).unwrap(),
                    &Distribution::new(q.clone()).unwrap(),
                    eps,
                )
                .unwrap();
                assert!(
                    (np.beta - oracle).abs() < 1e-8,
                    "d={d} eps={eps}: beta {} vs oracle {}",
                    np.beta,
                    oracle
                );
            }
        }
    }
}

/// Composite bracket on commuting families vs exhaustive search over
/// diagonal tests on a shared grid of acceptance weights.
#[test]
fn composite_bracket_contains_diagonal_oracle() {
    let a = [diag(&[0.7, 0.3]), diag(&[0.6, 0.4])];
    let b = [diag(&[0.2, 0.8]), diag(&[0.35, 0.65])];
    let eps = 0.2;
    let bracket = beta_eps_composite(&a, &b, eps).unwrap();
    // Oracle: minimise max_b q(E) over diagonal tests E = (w0, w1) with
    // min_a p(E) >= 1 - eps, on a dense grid.
    let steps = 2000usize;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        for j in 0..=steps {
            let w = [i as f64 / steps as f64, j as f64 / steps as f64];
            let pass_a = a
                .iter()
                .all(|s| w[0] * s.op().entry(0, 0).re + w[1] * s.op().entry(1, 1).re >= 1.0 - eps);
            if !pass_a {
                continue;
            }
            let worst_b = b
                .iter()
                .map(|s| w[0] * s.op().entry(0, 0).re + w[1] * s.op().entry(1, 1).re)
                .fold(0.0f64, f64::max);
            best = best.min(worst_b);
        }
    }
    // For commuting families the diagonal oracle is exact up to its grid
    // resolution (5e-4 in each weight).
    assert!(
        bracket.lower <= best + 1e-3,
        "lower {} exceeds oracle {}",
        bracket.lower,
        best
    );
    assert!(
        bracket.upper >= best - 1e-3,
        "upper {} undercuts oracle {}",
        bracket.upper,
        best
    );
}

/// Umegaki relative entropy between diagonal states equals classical KL.
#[test]
fn umegaki_matches_kl_on_diagonals() {
    let mut rng = rng_from_seed(9);
    for d in [2usize, 3, 5] {
        let p = steinlab::random::random_probs(d, &mut rng);
        let q = steinlab::random::random_probs(d, &mut rng);
        let quantum = umegaki(&diag(&p), &diag(&q)).unwrap();
        let classical = kl_bits(
            &Distribution::new(p).unwrap(),
            &Distribution::new(q).unwrap(),
        )
        .unwrap();
        assert!((quantum - classical).abs() < 1e-9);
    }
}
