//! Dense complex matrices and a cyclic Jacobi eigensolver for Hermitian input.
//!
//! The solver is deliberately dependency-free: cyclic sweeps of complex plane
//! rotations with threshold 1e-12, capped at 100 sweeps.

use num_complex::Complex64 as C64;

use crate::error::{OpError, Result};

pub const JACOBI_THRESHOLD: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major square complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    pub n: usize,
    pub a: Vec<C64>,
}

impl CMat {
    pub fn zeros(n: usize) -> Self {
        CMat {
            n,
            a: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(n: usize, a: Vec<C64>) -> Self {
        assert_eq!(a.len(), n * n, "entry count must be n^2");
        CMat { n, a }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.a[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.a[i * self.n + j] = v;
    }

    pub fn adjoint(&self) -> CMat {
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.a[i * n + j].conj();
            }
        }
        out
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.a[i * n + k];
                if aik.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.a[i * n + j] += aik * other.a[k * n + j];
                }
            }
        }
        out
    }

    /// U self U^dagger.
    pub fn conjugate_by(&self, u: &CMat) -> CMat {
        u.mul(self).mul(&u.adjoint())
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            n: self.n,
            a: self.a.iter().map(|x| x * s).collect(),
        }
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x + y)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!(self.n, other.n);
        CMat {
            n: self.n,
            a: self
                .a
                .iter()
                .zip(&other.a)
                .map(|(x, y)| x - y)
                .collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.n).map(|i| self.a[i * self.n + i]).sum()
    }

    pub fn frob_norm(&self) -> f64 {
        self.a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.a.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.adjoint().mul(self);
        let n = self.n;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((p.a[i * n + j] - C64::new(target, 0.0)).norm());
            }
        }
        worst <= tol
    }

    fn off_diag_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
///
/// Returns eigenvalues in descending order and the matching unitary of
/// eigenvector columns.
pub fn jacobi_eigen(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = m.n;
    if n == 0 {
        return Ok((Vec::new(), CMat::zeros(0)));
    }
    let mut w = m.clone();
    let mut v = CMat::identity(n);
    let scale = w.frob_norm().max(1.0);

    let mut converged = false;
    let mut off = w.off_diag_norm();
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off <= JACOBI_THRESHOLD * scale {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w.a[p * n + q];
                let mag = apq.norm();
                if mag <= JACOBI_THRESHOLD * scale * 1e-4 {
                    continue;
                }
                // Phase on column q makes the pivot real, then a real
                // rotation annihilates it.
                let u = apq / mag;
                let uc = u.conj();
                for i in 0..n {
                    w.a[i * n + q] *= uc;
                }
                for j in 0..n {
                    w.a[q * n + j] *= u;
                }
                for i in 0..n {
                    v.a[i * n + q] *= uc;
                }

                let app = w.a[p * n + p].re;
                let aqq = w.a[q * n + q].re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (tau * tau + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                for i in 0..n {
                    let wp = w.a[i * n + p];
                    let wq = w.a[i * n + q];
                    w.a[i * n + p] = wp * c - wq * s;
                    w.a[i * n + q] = wp * s + wq * c;
                }
                for j in 0..n {
                    let wp = w.a[p * n + j];
                    let wq = w.a[q * n + j];
                    w.a[p * n + j] = wp * c - wq * s;
                    w.a[q * n + j] = wp * s + wq * c;
                }
                for i in 0..n {
                    let vp = v.a[i * n + p];
                    let vq = v.a[i * n + q];
                    v.a[i * n + p] = vp * c - vq * s;
                    v.a[i * n + q] = vp * s + vq * c;
                }
                // Stamp out accumulated rounding in the pivot pair.
                w.a[p * n + q] = C64::new(0.0, 0.0);
                w.a[q * n + p] = C64::new(0.0, 0.0);
            }
        }
        off = w.off_diag_norm();
    }
    if !converged && off > JACOBI_THRESHOLD * scale {
        return Err(OpError::EigFailure(JACOBI_MAX_SWEEPS, off));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w.a[i * n + i].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMat::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors.a[i * n + col] = v.a[i * n + src];
        }
    }
    Ok((eigenvalues, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diag_matrix_eigen() {
        let mut m = CMat::zeros(2);
        m.set(0, 0, C64::new(3.0, 0.0));
        m.set(1, 1, C64::new(1.0, 0.0));
        let (vals, _) = jacobi_eigen(&m).unwrap();
        assert!((vals[0] - 3.0).abs() < 1e-12);
        assert!((vals[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_x_eigen() {
        let mut m = CMat::zeros(2);
        m.set(0, 1, C64::new(1.0, 0.0));
        m.set(1, 0, C64::new(1.0, 0.0));
        let (vals, v) = jacobi_eigen(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] + 1.0).abs() < 1e-12);
        assert!(v.is_unitary(1e-10));
    }

    #[test]
    fn complex_hermitian_reconstruction() {
        // Pauli Y plus a diagonal shift.
        let mut m = CMat::zeros(2);
        m.set(0, 0, C64::new(0.5, 0.0));
        m.set(0, 1, C64::new(0.0, -1.0));
        m.set(1, 0, C64::new(0.0, 1.0));
        m.set(1, 1, C64::new(-0.5, 0.0));
        let (vals, v) = jacobi_eigen(&m).unwrap();
        let mut lambda = CMat::zeros(2);
        for i in 0..2 {
            lambda.set(i, i, C64::new(vals[i], 0.0));
        }
        let rec = v.mul(&lambda).mul(&v.adjoint());
        assert!(rec.sub(&m).frob_norm() < 1e-10);
    }
}
