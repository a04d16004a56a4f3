//! Dense Hermitian-operator algebra on finite tensor products: construction,
//! composition, spectral calculus, permutation actions, and the depolarising
//! map.
//!
//! All values are immutable after construction and all operations are pure,
//! so everything here is safe to share across threads.

use num_complex::Complex64 as C64;

use crate::cmat::{jacobi_eigen, CMat};
use crate::error::{OpError, Result};

/// Global dense-dimension cap. Operations that would exceed it fail loudly.
pub const DIM_CAP: usize = 4096;
/// Tolerance below which eigenvalues count as zero for support decisions.
pub const SUPPORT_CUTOFF: f64 = 1e-12;
/// Secondary support cutoff used to flag sensitivity of support decisions.
pub const SUPPORT_CUTOFF_COARSE: f64 = 1e-10;
/// Allowed negativity of eigenvalues for PSD checks.
pub const PSD_TOL: f64 = 1e-9;

/// Dense complex Hermitian matrix with a list of local tensor dimensions.
///
/// Construction projects onto the Hermitian part `(M + M^dagger)/2`, so all
/// downstream eigenvalues are exactly real.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    dims: Vec<usize>,
    mat: CMat,
}

impl HermitianOperator {
    pub fn new(dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        if dims.is_empty() || dims.iter().any(|&d| d < 2) {
            return Err(OpError::BadArgument(
                "dims must be nonempty with each local dimension >= 2".into(),
            ));
        }
        let total: usize = dims.iter().product();
        if total > DIM_CAP {
            return Err(OpError::CapExceeded(total, DIM_CAP));
        }
        if entries.len() != total * total {
            return Err(OpError::DimMismatch(entries.len(), total * total));
        }
        let raw = CMat::from_vec(total, entries);
        let herm = raw.add(&raw.adjoint()).scale(C64::new(0.5, 0.0));
        Ok(HermitianOperator { dims, mat: herm })
    }

    pub fn from_mat(dims: Vec<usize>, mat: CMat) -> Result<Self> {
        Self::new(dims, mat.a)
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        HermitianOperator {
            dims,
            mat: CMat::zeros(total),
        }
    }

    pub fn identity(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        HermitianOperator {
            dims,
            mat: CMat::identity(total),
        }
    }

    pub fn from_diag(dims: Vec<usize>, diag: &[f64]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if diag.len() != total {
            return Err(OpError::DimMismatch(diag.len(), total));
        }
        let mut m = CMat::zeros(total);
        for (i, &v) in diag.iter().enumerate() {
            m.set(i, i, C64::new(v, 0.0));
        }
        Ok(HermitianOperator { dims, mat: m })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.n
    }

    pub fn factors(&self) -> usize {
        self.dims.len()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.mat.get(i, j)
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn frob_norm(&self) -> f64 {
        self.mat.frob_norm()
    }

    pub fn scale(&self, s: f64) -> HermitianOperator {
        HermitianOperator {
            dims: self.dims.clone(),
            mat: self.mat.scale(C64::new(s, 0.0)),
        }
    }

    pub fn add(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim() != other.dim() {
            return Err(OpError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(HermitianOperator {
            dims: self.dims.clone(),
            mat: self.mat.add(&other.mat),
        })
    }

    pub fn sub(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        if self.dim() != other.dim() {
            return Err(OpError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(HermitianOperator {
            dims: self.dims.clone(),
            mat: self.mat.sub(&other.mat),
        })
    }

    /// Hilbert-Schmidt inner product `Tr[self other]`, real for Hermitian pairs.
    pub fn hs_inner(&self, other: &HermitianOperator) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        let n = self.dim();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.mat.get(i, j) * other.mat.get(j, i);
            }
        }
        s.re
    }

    /// Kronecker product; dims are concatenated.
    pub fn tensor(&self, other: &HermitianOperator) -> Result<HermitianOperator> {
        let total = self.dim() * other.dim();
        if total > DIM_CAP {
            return Err(OpError::CapExceeded(total, DIM_CAP));
        }
        let (na, nb) = (self.dim(), other.dim());
        let mut out = CMat::zeros(total);
        for ia in 0..na {
            for ja in 0..na {
                let a = self.mat.get(ia, ja);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for ib in 0..nb {
                    for jb in 0..nb {
                        let b = other.mat.get(ib, jb);
                        out.set(ia * nb + ib, ja * nb + jb, a * b);
                    }
                }
            }
        }
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Ok(HermitianOperator { dims, mat: out })
    }

    /// n-fold tensor power.
    pub fn tensor_power(&self, n: usize) -> Result<HermitianOperator> {
        if n == 0 {
            return Err(OpError::BadArgument("tensor power needs n >= 1".into()));
        }
        let mut out = self.clone();
        for _ in 1..n {
            out = out.tensor(self)?;
        }
        Ok(out)
    }

    /// Partial trace keeping the listed factor indices (0-based, ascending
    /// output order equal to the order given).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<HermitianOperator> {
        let k = self.dims.len();
        if keep.is_empty() {
            return Err(OpError::BadSubsystem("keep set is empty".into()));
        }
        let mut seen = vec![false; k];
        for &f in keep {
            if f >= k || seen[f] {
                return Err(OpError::BadSubsystem(format!(
                    "factor index {f} invalid or repeated"
                )));
            }
            seen[f] = true;
        }
        let traced: Vec<usize> = (0..k).filter(|f| !seen[*f]).collect();
        let keep_dims: Vec<usize> = keep.iter().map(|&f| self.dims[f]).collect();
        let out_dim: usize = keep_dims.iter().product();
        let traced_dim: usize = traced.iter().map(|&f| self.dims[f]).product();

        let strides = row_strides(&self.dims);
        let mut out = CMat::zeros(out_dim);
        let mut keep_idx = vec![0usize; keep.len()];
        for oi in 0..out_dim {
            unflatten(oi, &keep_dims, &mut keep_idx);
            let mut keep_jdx = vec![0usize; keep.len()];
            for oj in 0..out_dim {
                unflatten(oj, &keep_dims, &mut keep_jdx);
                let mut acc = C64::new(0.0, 0.0);
                let traced_dims: Vec<usize> = traced.iter().map(|&f| self.dims[f]).collect();
                let mut tr_idx = vec![0usize; traced.len()];
                for t in 0..traced_dim.max(1) {
                    unflatten(t, &traced_dims, &mut tr_idx);
                    let mut row = 0usize;
                    let mut col = 0usize;
                    for (pos, &f) in keep.iter().enumerate() {
                        row += keep_idx[pos] * strides[f];
                        col += keep_jdx[pos] * strides[f];
                    }
                    for (pos, &f) in traced.iter().enumerate() {
                        row += tr_idx[pos] * strides[f];
                        col += tr_idx[pos] * strides[f];
                    }
                    acc += self.mat.get(row, col);
                }
                out.set(oi, oj, acc);
            }
        }
        Ok(HermitianOperator {
            dims: keep_dims,
            mat: out,
        })
    }

    /// Eigendecomposition with certified reconstruction: eigenvalues in
    /// descending order, eigenvector columns unitary within 1e-9.
    pub fn eig(&self) -> Result<(Vec<f64>, CMat)> {
        let (vals, vecs) = jacobi_eigen(&self.mat)?;
        let n = self.dim();
        let mut lambda = CMat::zeros(n);
        for i in 0..n {
            lambda.set(i, i, C64::new(vals[i], 0.0));
        }
        let rec = vecs.mul(&lambda).mul(&vecs.adjoint());
        let err = rec.sub(&self.mat).frob_norm();
        let scale = self.mat.frob_norm().max(1.0);
        if err > 1e-9 * scale || !vecs.is_unitary(1e-9) {
            return Err(OpError::EigFailure(0, err));
        }
        Ok((vals, vecs))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.0)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        let vals = self.eigenvalues()?;
        Ok(*vals.last().expect("nonempty spectrum"))
    }

    /// Apply a real function to the spectrum: `V f(Lambda) V^dagger`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Result<HermitianOperator> {
        let (vals, vecs) = self.eig()?;
        let n = self.dim();
        let mut lambda = CMat::zeros(n);
        for i in 0..n {
            lambda.set(i, i, C64::new(f(vals[i]), 0.0));
        }
        let m = vecs.mul(&lambda).mul(&vecs.adjoint());
        HermitianOperator::from_mat(self.dims.clone(), m)
    }

    /// Base-2 matrix logarithm on the support.
    ///
    /// Eigenvalues above `SUPPORT_CUTOFF` map to `log2`; zeros map to 0 when
    /// `support_only` is set and are rejected otherwise.
    pub fn log2(&self, support_only: bool) -> Result<HermitianOperator> {
        let vals = self.eigenvalues()?;
        if let Some(&neg) = vals.iter().find(|&&v| v < -PSD_TOL) {
            return Err(OpError::NotPsd(neg));
        }
        if !support_only && vals.iter().any(|&v| v <= SUPPORT_CUTOFF) {
            return Err(OpError::BadArgument(
                "singular operator: log2 requires support_only".into(),
            ));
        }
        self.spectral_map(|v| if v > SUPPORT_CUTOFF { v.log2() } else { 0.0 })
    }

    /// Positive and negative parts: `x = pos - neg`, both PSD, `pos*neg = 0`.
    pub fn positive_negative_parts(&self) -> Result<(HermitianOperator, HermitianOperator)> {
        let pos = self.spectral_map(|v| v.max(0.0))?;
        let neg = self.spectral_map(|v| (-v).max(0.0))?;
        Ok((pos, neg))
    }

    /// Sum of absolute eigenvalues.
    pub fn trace_norm(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.iter().map(|v| v.abs()).sum())
    }

    /// Largest eigenvalue in absolute value (operator norm for Hermitian input).
    pub fn op_norm(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|v| v.abs())
            .fold(0.0, f64::max))
    }

    /// Projector onto eigenspaces with eigenvalue > tol.
    pub fn support_projector(&self, tol: f64) -> Result<HermitianOperator> {
        let vals = self.eigenvalues()?;
        if let Some(&neg) = vals.iter().find(|&&v| v < -PSD_TOL) {
            return Err(OpError::NotPsd(neg));
        }
        self.spectral_map(|v| if v > tol { 1.0 } else { 0.0 })
    }

    /// Average over the full permutation group of the tensor factors.
    ///
    /// Requires all local dimensions equal and at most 6 factors (the full
    /// group average is taken; no sampling mode).
    pub fn symmetrize(&self) -> Result<HermitianOperator> {
        let n = self.dims.len();
        if self.dims.iter().any(|&d| d != self.dims[0]) {
            return Err(OpError::BadSubsystem(
                "symmetrize requires equal local dimensions".into(),
            ));
        }
        if n > 6 {
            return Err(OpError::CapExceeded(n, 6));
        }
        let total = self.dim();
        let mut acc = CMat::zeros(total);
        let perms = all_permutations(n);
        let count = perms.len() as f64;
        for perm in &perms {
            let p = Permutation::new(n, perm.clone())?;
            let conj = self.permute_factors(&p)?;
            acc = acc.add(conj.mat());
        }
        HermitianOperator::from_mat(self.dims.clone(), acc.scale(C64::new(1.0 / count, 0.0)))
    }

    /// `U_pi x U_pi^dagger` computed by index relabelling (no matrix product).
    pub fn permute_factors(&self, p: &Permutation) -> Result<HermitianOperator> {
        if p.n() != self.dims.len() {
            return Err(OpError::BadSubsystem(format!(
                "permutation over {} factors applied to {} factors",
                p.n(),
                self.dims.len()
            )));
        }
        let out_dims: Vec<usize> = {
            let mut d = vec![0usize; self.dims.len()];
            for (src, &dst) in p.map().iter().enumerate() {
                d[dst] = self.dims[src];
            }
            d
        };
        let in_strides = row_strides(&self.dims);
        let out_strides = row_strides(&out_dims);
        let total = self.dim();
        let k = self.dims.len();
        let mut row_map = vec![0usize; total];
        let mut idx = vec![0usize; k];
        for flat in 0..total {
            unflatten(flat, &self.dims, &mut idx);
            let mut out_flat = 0usize;
            for f in 0..k {
                out_flat += idx[f] * out_strides[p.map()[f]];
            }
            let _ = in_strides;
            row_map[flat] = out_flat;
        }
        let mut out = CMat::zeros(total);
        for i in 0..total {
            for j in 0..total {
                out.set(row_map[i], row_map[j], self.mat.get(i, j));
            }
        }
        Ok(HermitianOperator {
            dims: out_dims,
            mat: out,
        })
    }

    /// Depolarising map `(1-delta) x + delta Tr[x] tau`.
    ///
    /// On trace-one input this is the usual mixing toward the fixed state
    /// `tau`; the `Tr[x]` factor extends it consistently to all Hermitian
    /// inputs.
    pub fn depolarise(&self, delta: f64, tau: &DensityOperator) -> Result<HermitianOperator> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(OpError::BadArgument(format!("delta {delta} outside [0,1]")));
        }
        if self.dim() != tau.dim() {
            return Err(OpError::DimMismatch(self.dim(), tau.dim()));
        }
        self.scale(1.0 - delta)
            .add(&tau.op().scale(delta * self.trace()))
    }

    /// Transpose on the factors after the first `first_k` (the second half of
    /// the declared bipartition).
    pub fn partial_transpose(&self, first_k: usize) -> Result<HermitianOperator> {
        let k = self.dims.len();
        if first_k == 0 || first_k >= k {
            return Err(OpError::BadSubsystem(format!(
                "bipartition at {first_k} invalid for {k} factors"
            )));
        }
        let da: usize = self.dims[..first_k].iter().product();
        let db: usize = self.dims[first_k..].iter().product();
        let mut out = CMat::zeros(self.dim());
        for ia in 0..da {
            for ja in 0..da {
                for ib in 0..db {
                    for jb in 0..db {
                        out.set(ia * db + jb, ja * db + ib, self.mat.get(ia * db + ib, ja * db + jb));
                    }
                }
            }
        }
        Ok(HermitianOperator {
            dims: self.dims.clone(),
            mat: out,
        })
    }
}

/// `supp(a) <= supp(b)` test: the operator norm of `(I - P_b) P_a` must not
/// exceed `tol`.
pub fn support_contained(a: &HermitianOperator, b: &HermitianOperator, tol: f64) -> Result<bool> {
    if a.dim() != b.dim() {
        return Err(OpError::DimMismatch(a.dim(), b.dim()));
    }
    let pa = a.support_projector(tol)?;
    let pb = b.support_projector(tol)?;
    let complement = HermitianOperator::identity(b.dims().to_vec()).sub(&pb)?;
    let m = complement.mat().mul(pa.mat());
    // Operator norm via the largest eigenvalue of M^dagger M.
    let gram = m.adjoint().mul(&m);
    let g = HermitianOperator::from_mat(a.dims().to_vec(), gram)?;
    let top = g.eigenvalues()?[0].max(0.0).sqrt();
    Ok(top <= tol.max(PSD_TOL))
}

/// Density operator: PSD within 1e-9 and unit trace within 1e-9.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if (tr - 1.0).abs() > PSD_TOL {
            return Err(OpError::BadTrace(tr));
        }
        let min = op.min_eigenvalue()?;
        if min < -PSD_TOL {
            return Err(OpError::NotPsd(min));
        }
        Ok(DensityOperator { op })
    }

    /// Renormalise a PSD operator with positive trace into a state.
    pub fn normalised(op: HermitianOperator) -> Result<Self> {
        let tr = op.trace();
        if tr <= 0.0 {
            return Err(OpError::BadTrace(tr));
        }
        DensityOperator::new(op.scale(1.0 / tr))
    }

    pub fn pure(dims: Vec<usize>, amplitudes: &[C64]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(OpError::DimMismatch(amplitudes.len(), total));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm <= 0.0 {
            return Err(OpError::BadArgument("zero state vector".into()));
        }
        let mut m = CMat::zeros(total);
        for i in 0..total {
            for j in 0..total {
                m.set(i, j, amplitudes[i] * amplitudes[j].conj() / (norm * norm));
            }
        }
        Ok(DensityOperator {
            op: HermitianOperator::from_mat(dims, m)?,
        })
    }

    pub fn basis_state(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        let mut amps = vec![C64::new(0.0, 0.0); total];
        amps[index] = C64::new(1.0, 0.0);
        Self::pure(dims, &amps)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let total: usize = dims.iter().product();
        DensityOperator {
            op: HermitianOperator::identity(dims).scale(1.0 / total as f64),
        }
    }

    pub fn from_diag(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        DensityOperator::new(HermitianOperator::from_diag(dims, probs)?)
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }

    pub fn dims(&self) -> &[usize] {
        self.op.dims()
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator> {
        Ok(DensityOperator {
            op: self.op.tensor(&other.op)?,
        })
    }

    pub fn tensor_power(&self, n: usize) -> Result<DensityOperator> {
        Ok(DensityOperator {
            op: self.op.tensor_power(n)?,
        })
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        DensityOperator::new(self.op.partial_trace(keep)?)
    }

    pub fn symmetrize(&self) -> Result<DensityOperator> {
        Ok(DensityOperator {
            op: self.op.symmetrize()?,
        })
    }

    pub fn depolarise(&self, delta: f64, tau: &DensityOperator) -> Result<DensityOperator> {
        DensityOperator::new(self.op.depolarise(delta, tau)?)
    }

    /// Uniform mixture of states.
    pub fn mixture(states: &[DensityOperator], weights: &[f64]) -> Result<DensityOperator> {
        if states.is_empty() || states.len() != weights.len() {
            return Err(OpError::BadArgument("mixture needs matching nonempty lists".into()));
        }
        let mut acc = HermitianOperator::zeros(states[0].dims().to_vec());
        for (s, &w) in states.iter().zip(weights) {
            acc = acc.add(&s.op().scale(w))?;
        }
        DensityOperator::new(acc)
    }

    pub fn barycentre(states: &[DensityOperator]) -> Result<DensityOperator> {
        let w = vec![1.0 / states.len() as f64; states.len()];
        Self::mixture(states, &w)
    }

    /// Half the trace norm of the difference.
    pub fn trace_distance(&self, other: &DensityOperator) -> Result<f64> {
        Ok(self.op.sub(&other.op)?.trace_norm()? / 2.0)
    }

    pub fn fidelity_with_pure(&self, other: &DensityOperator) -> f64 {
        self.op.hs_inner(other.op())
    }
}

/// A bijection on `{0..n-1}` acting on tensor factor positions: factor `i`
/// moves to position `map[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Permutation {
    n: usize,
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(n: usize, map: Vec<usize>) -> Result<Self> {
        if map.len() != n {
            return Err(OpError::BadArgument("permutation length mismatch".into()));
        }
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(OpError::BadArgument("mapping is not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Permutation { n, map })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            n,
            map: (0..n).collect(),
        }
    }

    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut map: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(OpError::BadArgument("swap index out of range".into()));
        }
        map.swap(a, b);
        Permutation::new(n, map)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// The unitary permuting tensor factors of `n` systems of dimension
    /// `local_dim` each.
    pub fn unitary(&self, local_dim: usize) -> Result<CMat> {
        let total = local_dim
            .checked_pow(self.n as u32)
            .filter(|&t| t <= DIM_CAP)
            .ok_or(OpError::CapExceeded(usize::MAX, DIM_CAP))?;
        let dims = vec![local_dim; self.n];
        let strides = row_strides(&dims);
        let mut u = CMat::zeros(total);
        let mut idx = vec![0usize; self.n];
        for col in 0..total {
            unflatten(col, &dims, &mut idx);
            let mut row = 0usize;
            for f in 0..self.n {
                row += idx[f] * strides[self.map[f]];
            }
            u.set(row, col, C64::new(1.0, 0.0));
        }
        Ok(u)
    }
}

pub fn row_strides(dims: &[usize]) -> Vec<usize> {
    let k = dims.len();
    let mut strides = vec![1usize; k];
    for f in (0..k.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1];
    }
    strides
}

pub fn unflatten(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for f in (0..dims.len()).rev() {
        out[f] = flat % dims[f];
        flat /= dims[f];
    }
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    heap_permute(&mut items, n, &mut out);
    out
}

fn heap_permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k <= 1 {
        out.push(items.clone());
        return;
    }
    for i in 0..k {
        heap_permute(items, k - 1, out);
        if k % 2 == 0 {
            items.swap(i, k - 1);
        } else {
            items.swap(0, k - 1);
        }
    }
}
