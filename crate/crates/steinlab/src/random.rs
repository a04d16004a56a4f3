//! Seeded random state generation. All randomness flows through an explicit
//! ChaCha20 generator so identical seeds give identical operators on every
//! platform.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::Result;
use crate::op::{DensityOperator, HermitianOperator};

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// One standard complex Gaussian sample (Box-Muller).
fn complex_gaussian(rng: &mut ChaCha20Rng) -> C64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    // Each quadrature has variance 1/2 so the complex variance is 1.
    C64::new(
        r * theta.cos() / std::f64::consts::SQRT_2,
        r * theta.sin() / std::f64::consts::SQRT_2,
    )
}

/// Full-rank random density operator `G G^dagger / Tr[G G^dagger]` with
/// i.i.d. complex Gaussian `G`.
pub fn random_density(dims: &[usize], rng: &mut ChaCha20Rng) -> Result<DensityOperator> {
    let n: usize = dims.iter().product();
    let g: Vec<C64> = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    let mut entries = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                acc += g[i * n + k] * g[j * n + k].conj();
            }
            entries[i * n + j] = acc;
        }
    }
    DensityOperator::normalised(HermitianOperator::new(dims.to_vec(), entries)?)
}

/// Haar-like random pure state from a normalised complex Gaussian vector.
pub fn random_pure(dims: &[usize], rng: &mut ChaCha20Rng) -> Result<DensityOperator> {
    let n: usize = dims.iter().product();
    let amps: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
    DensityOperator::pure(dims.to_vec(), &amps)
}

/// Random pure product state over the given local dimensions.
pub fn random_pure_product(dims: &[usize], rng: &mut ChaCha20Rng) -> Result<DensityOperator> {
    let mut state = random_pure(&dims[..1], rng)?;
    for d in &dims[1..] {
        let next = random_pure(&[*d], rng)?;
        state = state.tensor(&next)?;
    }
    Ok(state)
}

/// Random probability vector from normalised exponentials.
pub fn random_probs(k: usize, rng: &mut ChaCha20Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..k).map(|_| -f64::ln(rng.gen_range(f64::MIN_POSITIVE..1.0))).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_states_are_reproducible() {
        let a = random_density(&[2, 2], &mut rng_from_seed(7)).unwrap();
        let b = random_density(&[2, 2], &mut rng_from_seed(7)).unwrap();
        assert!(a.op().sub(b.op()).unwrap().frob_norm() == 0.0);
        let c = random_density(&[2, 2], &mut rng_from_seed(8)).unwrap();
        assert!(a.op().sub(c.op()).unwrap().frob_norm() > 1e-3);
    }

    #[test]
    fn random_density_is_full_rank_state() {
        let rho = random_density(&[4], &mut rng_from_seed(42)).unwrap();
        assert!((rho.op().trace() - 1.0).abs() < 1e-12);
        let vals = rho.op().eigenvalues().unwrap();
        assert!(vals.iter().all(|&v| v > 1e-8));
    }

    #[test]
    fn random_pure_is_rank_one() {
        let psi = random_pure(&[3], &mut rng_from_seed(3)).unwrap();
        let vals = psi.op().eigenvalues().unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-10);
        assert!(vals[1].abs() < 1e-10);
    }

    #[test]
    fn random_product_has_product_marginals() {
        let psi = random_pure_product(&[2, 2], &mut rng_from_seed(11)).unwrap();
        let a = psi.partial_trace(&[0]).unwrap();
        let vals = a.op().eigenvalues().unwrap();
        // Pure product state: reduced state is pure too.
        assert!((vals[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn random_probs_normalised() {
        let p = random_probs(5, &mut rng_from_seed(1));
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.iter().all(|&v| v > 0.0));
    }
}
