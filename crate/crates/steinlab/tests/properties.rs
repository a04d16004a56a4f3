//! Property-based invariants of the divergence solvers on randomized
//! instances.

use proptest::prelude::*;
use steinlab::div::{
    measured_relent_pinched, neyman_pearson_simple, umegaki,
};
use steinlab::random::{random_density, rng_from_seed};
use steinlab::DensityOperator;

fn pair(seed: u64, dims: &[usize]) -> (DensityOperator, DensityOperator) {
    let mut rng = rng_from_seed(seed);
    (
        random_density(dims, &mut rng).unwrap(),
        random_density(dims, &mut rng).unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Larger tolerated type I error can only shrink the optimal type II
    /// error.
    #[test]
    fn beta_monotone_in_eps(seed in 0u64..1_000, e1 in 0.05f64..0.4, de in 0.05f64..0.4) {
        let (rho, sigma) = pair(seed, &[2]);
        let b1 = neyman_pearson_simple(&rho, &sigma, e1).unwrap().beta;
        let b2 = neyman_pearson_simple(&rho, &sigma, e1 + de).unwrap().beta;
        prop_assert!(b2 <= b1 + 1e-9, "beta rose from {b1} to {b2}");
    }

    /// Discarding a subsystem cannot increase relative entropy.
    #[test]
    fn umegaki_dpi_partial_trace(seed in 0u64..1_000) {
        let (rho, sigma) = pair(seed, &[2, 2]);
        let before = umegaki(&rho, &sigma).unwrap();
        let after = umegaki(
            &rho.partial_trace(&[1]).unwrap(),
            &sigma.partial_trace(&[1]).unwrap(),
        ).unwrap();
        prop_assert!(after <= before + 1e-8, "{after} > {before}");
    }

    /// Relative entropy is jointly convex.
    #[test]
    fn umegaki_jointly_convex(seed in 0u64..1_000, t in 0.05f64..0.95) {
        let (r1, s1) = pair(seed, &[2]);
        let (r2, s2) = pair(seed.wrapping_add(7_777), &[2]);
        let rm = DensityOperator::mixture(&[r1.clone(), r2.clone()], &[t, 1.0 - t]).unwrap();
        let sm = DensityOperator::mixture(&[s1.clone(), s2.clone()], &[t, 1.0 - t]).unwrap();
        let mixed = umegaki(&rm, &sm).unwrap();
        let avg = t * umegaki(&r1, &s1).unwrap() + (1.0 - t) * umegaki(&r2, &s2).unwrap();
        prop_assert!(mixed <= avg + 1e-8, "{mixed} > {avg}");
    }

    /// Dephasing in the reference eigenbasis sits between the relative
    /// entropy and its dimension-penalised lower bound.
    #[test]
    fn pinched_divergence_sandwich(seed in 0u64..1_000) {
        let (rho, sigma) = pair(seed, &[2, 2]);
        let d = umegaki(&rho, &sigma).unwrap();
        let dp = measured_relent_pinched(&rho, &sigma).unwrap();
        prop_assert!(dp <= d + 1e-8, "pinched {dp} exceeds {d}");
        prop_assert!(dp >= 0.0);
    }

    /// Self-testing: the optimal type II error against the same state is
    /// exactly the tolerated acceptance shortfall.
    #[test]
    fn self_test_beta_closed_form(seed in 0u64..1_000, eps in 0.05f64..0.95) {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&[3], &mut rng).unwrap();
        let np = neyman_pearson_simple(&rho, &rho, eps).unwrap();
        prop_assert!((np.beta - (1.0 - eps)).abs() < 1e-8, "beta {} vs {}", np.beta, 1.0 - eps);
    }
}
