//! Divergences between quantum states: Umegaki relative entropy,
//! hypothesis-testing relative entropy (exact in the simple case, certified
//! brackets in the composite case), pinching-based measured relative entropy,
//! the continuity auxiliary function, and relative entropy to a convex hull.
//!
//! All outputs are in bits. Infinite values arise from support violations and
//! are represented by `f64::INFINITY`, serialized as the string `"inf"`.

use num_complex::Complex64 as C64;

use crate::cmat::CMat;
use crate::error::{OpError, Result};
use crate::op::{support_contained, DensityOperator, HermitianOperator, PSD_TOL, SUPPORT_CUTOFF};

/// Support-containment tolerance for deciding finiteness of divergences.
pub const SUPPORT_TOL: f64 = 1e-10;
/// Eigenvalue-gap tolerance for grouping spectral projectors when pinching.
pub const PINCH_GAP_TOL: f64 = 1e-9;
/// Bisection iterations for the Neyman-Pearson threshold search.
pub const NP_BISECT_ITERS: usize = 200;
/// Iteration budget for the composite-test subgradient solver.
pub const COMPOSITE_ITER_BUDGET: usize = 5000;
/// First-order stationarity gap at which hull minimization stops.
pub const STATIONARITY_GAP_TOL: f64 = 1e-6;

const LN2: f64 = std::f64::consts::LN_2;

/// A measurement operator `0 <= E <= I`; the spectrum is clipped into [0,1]
/// and construction fails if it lies outside [-1e-9, 1+1e-9].
#[derive(Clone, Debug)]
pub struct TestOperator {
    e: HermitianOperator,
}

impl TestOperator {
    pub fn new(e: HermitianOperator) -> Result<Self> {
        let vals = e.eigenvalues()?;
        let min = *vals.last().expect("nonempty spectrum");
        let max = vals[0];
        if min < -PSD_TOL || max > 1.0 + PSD_TOL {
            return Err(OpError::BadArgument(format!(
                "test spectrum [{min}, {max}] outside [0,1] at tolerance"
            )));
        }
        let clipped = e.spectral_map(|v| v.clamp(0.0, 1.0))?;
        Ok(TestOperator { e: clipped })
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.e
    }

    /// Acceptance probability `Tr[rho E]`.
    pub fn accept_prob(&self, state: &DensityOperator) -> f64 {
        self.e.hs_inner(state.op())
    }
}

/// Certified interval for a divergence value in bits.
#[derive(Clone, Debug)]
pub struct DivergenceBracket {
    pub lower: f64,
    pub upper: f64,
    pub certificate: String,
}

impl DivergenceBracket {
    pub fn exact(value: f64, certificate: impl Into<String>) -> Self {
        DivergenceBracket {
            lower: value,
            upper: value,
            certificate: certificate.into(),
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn to_json(&self) -> String {
        format!(
            "{{\"lower\":{},\"upper\":{},\"cert\":{}}}",
            crate::io::fmt_rate(self.lower),
            crate::io::fmt_rate(self.upper),
            serde_json::json!(self.certificate)
        )
    }
}

/// Certified interval for a type-II error probability.
#[derive(Clone, Debug)]
pub struct BetaBracket {
    pub lower: f64,
    pub upper: f64,
    pub certificate: String,
}

impl BetaBracket {
    /// The corresponding divergence bracket `-log2 beta` in bits; a zero
    /// error probability maps to positive infinity.
    pub fn to_bits(&self) -> DivergenceBracket {
        DivergenceBracket {
            lower: bits_of_beta(self.upper),
            upper: bits_of_beta(self.lower),
            certificate: self.certificate.clone(),
        }
    }
}

/// `-log2 beta`, with beta = 0 mapping to positive infinity.
pub fn bits_of_beta(beta: f64) -> f64 {
    if beta <= 0.0 {
        f64::INFINITY
    } else {
        -beta.log2()
    }
}

/// Umegaki relative entropy `Tr[rho (log2 rho - log2 sigma)]` in bits;
/// positive infinity when the support of `rho` is not contained in the
/// support of `sigma` at tolerance 1e-10.
pub fn umegaki(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(OpError::DimMismatch(rho.dim(), sigma.dim()));
    }
    if !support_contained(rho.op(), sigma.op(), SUPPORT_TOL)? {
        return Ok(f64::INFINITY);
    }
    let log_rho = rho.op().log2(true)?;
    let log_sigma = sigma.op().log2(true)?;
    let d = rho.op().hs_inner(&log_rho) - rho.op().hs_inner(&log_sigma);
    Ok(d.max(0.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    let log_rho = rho.op().log2(true)?;
    Ok((-rho.op().hs_inner(&log_rho)).max(0.0))
}

/// Exact optimal simple test between two states.
#[derive(Clone, Debug)]
pub struct NpResult {
    pub test: TestOperator,
    pub beta: f64,
    pub threshold: f64,
    /// Distance of the achieved acceptance probability from `1 - eps`.
    pub residual: f64,
}

fn diag_in_basis(op: &HermitianOperator, vecs: &CMat) -> Vec<f64> {
    let n = op.dim();
    let mut out = vec![0.0; n];
    for c in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..n {
            let mut row = C64::new(0.0, 0.0);
            for l in 0..n {
                row += op.entry(k, l) * vecs.get(l, c);
            }
            acc += vecs.get(k, c).conj() * row;
        }
        out[c] = acc.re;
    }
    out
}

/// Minimal type-II error test at type-I threshold `eps`, found by bisection
/// on the multiplier `t` of `rho - t sigma` with a fractional weight on the
/// threshold eigenspace.
pub fn neyman_pearson_simple(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
) -> Result<NpResult> {
    if rho.dim() != sigma.dim() {
        return Err(OpError::DimMismatch(rho.dim(), sigma.dim()));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(OpError::BadArgument(format!("eps {eps} outside (0,1)")));
    }
    let target = 1.0 - eps;
    let lam_max = rho.op().eigenvalues()?[0];
    let min_pos = sigma
        .op()
        .eigenvalues()?
        .into_iter()
        .filter(|&v| v > SUPPORT_CUTOFF)
        .fold(f64::INFINITY, f64::min);
    let mut lo = 0.0f64;
    let mut hi = 2.0 * lam_max / min_pos;

    let accept_mass = |t: f64| -> Result<f64> {
        let diff = rho.op().sub(&sigma.op().scale(t))?;
        let (vals, vecs) = diff.eig()?;
        let rho_diag = diag_in_basis(rho.op(), &vecs);
        Ok(vals
            .iter()
            .zip(&rho_diag)
            .filter(|(&v, _)| v > 0.0)
            .map(|(_, &a)| a)
            .sum())
    };

    for _ in 0..NP_BISECT_ITERS {
        let mid = 0.5 * (lo + hi);
        if accept_mass(mid)? > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi.max(1.0) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);

    // Build the test greedily in the eigenbasis of rho - t sigma, keeping
    // eigenvectors in descending eigenvalue order and giving the crossing
    // eigenvector a fractional weight so the acceptance probability is
    // exactly 1 - eps.
    let diff = rho.op().sub(&sigma.op().scale(t))?;
    let (_, vecs) = diff.eig()?;
    let rho_diag = diag_in_basis(rho.op(), &vecs);
    let sig_diag = diag_in_basis(sigma.op(), &vecs);
    let n = rho.dim();
    let mut e = CMat::zeros(n);
    let mut accepted = 0.0;
    let mut beta = 0.0;
    for c in 0..n {
        let (a, b) = (rho_diag[c].max(0.0), sig_diag[c].max(0.0));
        let w = if accepted + a <= target {
            1.0
        } else if a > 0.0 {
            ((target - accepted) / a).clamp(0.0, 1.0)
        } else {
            0.0
        };
        if w > 0.0 {
            accepted += w * a;
            beta += w * b;
            for i in 0..n {
                for j in 0..n {
                    let add = vecs.get(i, c) * vecs.get(j, c).conj() * w;
                    e.set(i, j, e.get(i, j) + add);
                }
            }
        }
        if accepted >= target {
            break;
        }
    }
    let test = TestOperator::new(HermitianOperator::from_mat(rho.dims().to_vec(), e)?)?;
    let residual = (test.accept_prob(rho) - target).abs();
    if residual > 1e-8 {
        return Err(OpError::EigFailure(0, residual));
    }
    Ok(NpResult {
        test,
        beta: beta.max(0.0),
        threshold: t,
        residual,
    })
}

fn uniform_mixture(states: &[DensityOperator]) -> Result<DensityOperator> {
    DensityOperator::barycentre(states)
}

fn spectral_clamp01(e: &HermitianOperator) -> Result<HermitianOperator> {
    e.spectral_map(|v| v.clamp(0.0, 1.0))
}

/// Mix a candidate test toward the identity until every type-I constraint is
/// met, then report its worst-case type-II error; `None` if repair fails.
fn repair_and_score(
    e: &HermitianOperator,
    a_ext: &[DensityOperator],
    b_ext: &[DensityOperator],
    eps: f64,
) -> Option<(HermitianOperator, f64)> {
    let target = 1.0 - eps;
    let mut theta: f64 = 0.0;
    for rho in a_ext {
        let t = e.hs_inner(rho.op());
        if t < target {
            if t >= 1.0 - 1e-12 {
                continue;
            }
            theta = theta.max((target - t) / (1.0 - t));
        }
    }
    theta = (theta + 1e-12).clamp(0.0, 1.0);
    let id = HermitianOperator::identity(e.dims().to_vec());
    let repaired = e.scale(1.0 - theta).add(&id.scale(theta)).ok()?;
    if a_ext
        .iter()
        .any(|rho| repaired.hs_inner(rho.op()) < target - 1e-9)
    {
        return None;
    }
    let beta = b_ext
        .iter()
        .map(|s| repaired.hs_inner(s.op()))
        .fold(0.0, f64::max);
    Some((repaired, beta))
}

/// Certified bracket on the composite minimal type-II error
/// `min_E max_sigma Tr[sigma E]` subject to `Tr[rho E] >= 1-eps` for every
/// `rho` in `a_ext`.
///
/// The upper bound comes from explicit feasible tests (candidate repairs plus
/// a projected-subgradient search on the spectrahedron `0 <= E <= I`); the
/// lower bound from weak duality, where any mixture pair reduces the problem
/// to a simple test.
pub fn beta_eps_composite(
    a_ext: &[DensityOperator],
    b_ext: &[DensityOperator],
    eps: f64,
) -> Result<BetaBracket> {
    if a_ext.is_empty() || b_ext.is_empty() {
        return Err(OpError::BadArgument("empty hypothesis list".into()));
    }
    if a_ext.len() > 64 || b_ext.len() > 64 {
        return Err(OpError::CapExceeded(a_ext.len().max(b_ext.len()), 64));
    }
    let dim = a_ext[0].dim();
    for s in a_ext.iter().chain(b_ext) {
        if s.dim() != dim {
            return Err(OpError::DimMismatch(s.dim(), dim));
        }
    }
    if a_ext.len() == 1 && b_ext.len() == 1 {
        let np = neyman_pearson_simple(&a_ext[0], &b_ext[0], eps)?;
        return Ok(BetaBracket {
            lower: np.beta,
            upper: np.beta,
            certificate: "simple Neyman-Pearson optimum (exact)".into(),
        });
    }
    let dims = a_ext[0].dims().to_vec();
    let target = 1.0 - eps;

    // Lower bound: weak duality over mixture pairs.
    let mut lower = 0.0f64;
    let mut lower_cert = String::from("duality: none");
    let a_mix = uniform_mixture(a_ext)?;
    let b_mix = uniform_mixture(b_ext)?;
    let mut duals: Vec<(String, DensityOperator, DensityOperator)> = vec![(
        "uniform/uniform".into(),
        a_mix.clone(),
        b_mix.clone(),
    )];
    if a_ext.len() * b_ext.len() <= 25 {
        for (i, rho) in a_ext.iter().enumerate() {
            for (j, sig) in b_ext.iter().enumerate() {
                duals.push((format!("point {i}/{j}"), rho.clone(), sig.clone()));
            }
        }
    } else {
        for (i, rho) in a_ext.iter().enumerate() {
            duals.push((format!("point {i}/uniform"), rho.clone(), b_mix.clone()));
        }
    }
    for (name, p, q) in &duals {
        let np = neyman_pearson_simple(p, q, eps)?;
        if np.beta > lower {
            lower = np.beta;
            lower_cert = format!("duality: mixture pair {name}");
        }
    }

    // Upper bound: explicit feasible tests.
    let id = HermitianOperator::identity(dims.clone());
    let mut best = target; // E = (1-eps) I is always feasible.
    let mut best_cert = String::from("feasible: scaled identity");
    let mut seed_e = id.scale(target);
    for (name, p, q) in &duals {
        let np = neyman_pearson_simple(p, q, eps)?;
        if let Some((rep, beta)) = repair_and_score(np.test.op(), a_ext, b_ext, eps) {
            if beta < best {
                best = beta;
                best_cert = format!("feasible: repaired pair test {name}");
                seed_e = rep;
            }
        }
    }

    // Projected subgradient on the penalized objective
    //   max_sigma Tr[sigma E] + mu * sum of type-I violations,
    // evaluating repaired iterates and keeping the best certified test.
    let mut e = seed_e;
    let mut mu = 4.0;
    let step0 = 0.2;
    let mut since_improve = 0usize;
    for k in 1..=COMPOSITE_ITER_BUDGET {
        let j_star = (0..b_ext.len())
            .max_by(|&x, &y| {
                e.hs_inner(b_ext[x].op())
                    .partial_cmp(&e.hs_inner(b_ext[y].op()))
                    .unwrap()
            })
            .unwrap();
        let mut grad = b_ext[j_star].op().clone();
        for rho in a_ext {
            if e.hs_inner(rho.op()) < target {
                grad = grad.sub(&rho.op().scale(mu))?;
            }
        }
        let step = step0 / (k as f64).sqrt();
        e = spectral_clamp01(&e.sub(&grad.scale(step))?)?;
        if k % 10 == 0 || k == COMPOSITE_ITER_BUDGET {
            if let Some((_, beta)) = repair_and_score(&e, a_ext, b_ext, eps) {
                if beta < best - 1e-12 {
                    best = beta;
                    best_cert = format!("feasible: subgradient iterate {k}");
                    since_improve = 0;
                } else {
                    since_improve += 10;
                }
            }
            if since_improve >= 600 {
                break;
            }
        }
        if k % 1000 == 0 {
            mu *= 2.0;
        }
    }

    let lower = lower.min(best);
    Ok(BetaBracket {
        lower,
        upper: best,
        certificate: format!("{lower_cert}; {best_cert}"),
    })
}

/// Hypothesis-testing relative entropy bracket in bits for composite
/// hypotheses given by extreme-point lists.
pub fn dh_eps_composite(
    a_ext: &[DensityOperator],
    b_ext: &[DensityOperator],
    eps: f64,
) -> Result<DivergenceBracket> {
    Ok(beta_eps_composite(a_ext, b_ext, eps)?.to_bits())
}

/// Eigenprojectors of `sigma` grouped at eigenvalue-gap tolerance 1e-9,
/// returned as (representative eigenvalue, projector) pairs in descending
/// eigenvalue order.
pub fn sigma_eigengroups(sigma: &DensityOperator) -> Result<Vec<(f64, HermitianOperator)>> {
    let (vals, vecs) = sigma.op().eig()?;
    let n = sigma.dim();
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some((rep, members)) if *rep - v <= PINCH_GAP_TOL => members.push(i),
            _ => groups.push((v, vec![i])),
        }
    }
    let mut out = Vec::with_capacity(groups.len());
    for (rep, members) in groups {
        let mut p = CMat::zeros(n);
        for &c in &members {
            for i in 0..n {
                for j in 0..n {
                    let add = vecs.get(i, c) * vecs.get(j, c).conj();
                    p.set(i, j, p.get(i, j) + add);
                }
            }
        }
        out.push((rep, HermitianOperator::from_mat(sigma.dims().to_vec(), p)?));
    }
    Ok(out)
}

/// Dephase `rho` in the grouped eigenbasis of `sigma`: `sum_i P_i rho P_i`.
pub fn pinch(rho: &DensityOperator, sigma: &DensityOperator) -> Result<DensityOperator> {
    if rho.dim() != sigma.dim() {
        return Err(OpError::DimMismatch(rho.dim(), sigma.dim()));
    }
    let groups = sigma_eigengroups(sigma)?;
    let mut acc = CMat::zeros(rho.dim());
    for (_, p) in &groups {
        let term = p.mat().mul(rho.op().mat()).mul(p.mat());
        acc = acc.add(&term);
    }
    DensityOperator::new(HermitianOperator::from_mat(rho.dims().to_vec(), acc)?)
}

/// Classical relative entropy in bits between the outcome distributions of
/// the projective measurement in `sigma`'s grouped eigenbasis, applied to
/// `rho` and `sigma`. A certified lower bound on the measured and Umegaki
/// relative entropies.
pub fn measured_relent_pinched(rho: &DensityOperator, sigma: &DensityOperator) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(OpError::DimMismatch(rho.dim(), sigma.dim()));
    }
    let groups = sigma_eigengroups(sigma)?;
    let mut acc = 0.0;
    for (_, p) in &groups {
        let pi = p.hs_inner(rho.op()).max(0.0);
        let qi = p.hs_inner(sigma.op()).max(0.0);
        if pi <= SUPPORT_CUTOFF {
            continue;
        }
        if qi <= SUPPORT_CUTOFF {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi / qi).log2();
    }
    Ok(acc.max(0.0))
}

/// The continuity auxiliary function `(x+1)log2(x+1) - x log2 x` in bits,
/// with the continuous extension 0 at x = 0.
pub fn g_afw(x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(OpError::BadArgument(format!("negative input {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok((x + 1.0) * (x + 1.0).log2() - x * x.log2())
}

/// Continuity bound for relative entropy differences at trace distance `eps`
/// against references with smallest nonzero eigenvalue at least `c`:
/// `eps log2(1/c) + g(eps)` bits per copy.
pub fn relent_continuity_bound(eps: f64, c: f64) -> Result<f64> {
    if !(c > 0.0 && c <= 1.0) {
        return Err(OpError::BadArgument(format!("eigenvalue floor {c}")));
    }
    Ok(eps * (1.0 / c).log2() + g_afw(eps)?)
}

/// `min_w D(rho || sum_j w_j tau_j)` with the optimal weights, minimized by
/// exponentiated-gradient descent to first-order stationarity gap 1e-6.
pub fn relent_to_hull_weights(
    rho: &DensityOperator,
    hull_ext: &[DensityOperator],
) -> Result<(DivergenceBracket, Vec<f64>)> {
    if hull_ext.is_empty() || hull_ext.len() > 64 {
        return Err(OpError::BadArgument(format!(
            "hull size {} outside 1..=64",
            hull_ext.len()
        )));
    }
    let m = hull_ext.len();
    for tau in hull_ext {
        if tau.dim() != rho.dim() {
            return Err(OpError::DimMismatch(tau.dim(), rho.dim()));
        }
    }
    let n = rho.dim();
    let log_rho = rho.op().log2(true)?;
    let neg_entropy = rho.op().hs_inner(&log_rho);

    // Objective and gradient at weight vector w, via the eigendecomposition
    // of the mixture. The gradient uses the Frechet derivative of log2 in
    // divided-difference form.
    let evaluate = |w: &[f64]| -> Result<(f64, Vec<f64>)> {
        let sigma = DensityOperator::mixture(hull_ext, w)?;
        let (vals, vecs) = sigma.op().eig()?;
        let rho_t = conjugate_into_basis(rho.op(), &vecs);
        // Support check and objective.
        let mut off_mass = 0.0;
        let mut cross = 0.0;
        for k in 0..n {
            let p = rho_t.get(k, k).re;
            if vals[k] <= SUPPORT_CUTOFF {
                off_mass += p.max(0.0);
            } else {
                cross += p * vals[k].log2();
            }
        }
        if off_mass > SUPPORT_TOL {
            return Ok((f64::INFINITY, vec![0.0; m]));
        }
        let f = (neg_entropy - cross).max(0.0);
        // K = V (M o rho_t) V^dagger, then g_j = -Tr[K tau_j].
        let mut core = CMat::zeros(n);
        for k in 0..n {
            for l in 0..n {
                let (a, b) = (vals[k].max(SUPPORT_CUTOFF), vals[l].max(SUPPORT_CUTOFF));
                let mkl = if (a - b).abs() <= 1e-14 * a.max(b) {
                    1.0 / (a * LN2)
                } else {
                    (a.log2() - b.log2()) / (a - b)
                };
                core.set(k, l, rho_t.get(k, l) * mkl);
            }
        }
        let kmat = vecs.mul(&core).mul(&vecs.adjoint());
        let kop = HermitianOperator::from_mat(rho.dims().to_vec(), kmat)?;
        let grads: Vec<f64> = hull_ext.iter().map(|t| -kop.hs_inner(t.op())).collect();
        Ok((f, grads))
    };

    // Point masses first: exact values, and the starting upper bound.
    let mut best_upper = f64::INFINITY;
    let mut best_w = vec![0.0; m];
    for j in 0..m {
        let f = umegaki(rho, &hull_ext[j])?;
        if f < best_upper {
            best_upper = f;
            best_w = (0..m).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        }
    }
    if best_upper <= 1e-12 {
        return Ok((
            DivergenceBracket::exact(best_upper, "point mass attains zero"),
            best_w,
        ));
    }
    if m == 1 {
        return Ok((
            DivergenceBracket::exact(best_upper, "singleton hull (Umegaki)"),
            best_w,
        ));
    }

    let mut w = vec![1.0 / m as f64; m];
    let (f0, _) = evaluate(&w)?;
    if f0.is_infinite() && best_upper.is_infinite() {
        return Ok((
            DivergenceBracket::exact(
                f64::INFINITY,
                "support violation against every hull member",
            ),
            w,
        ));
    }
    let mut best_lower = 0.0f64;
    let mut final_gap = f64::INFINITY;
    for _k in 0..4000 {
        let (f, g) = evaluate(&w)?;
        if f.is_finite() && f < best_upper {
            best_upper = f;
            best_w = w.clone();
        }
        let gmin = g.iter().cloned().fold(f64::INFINITY, f64::min);
        let gdot: f64 = g.iter().zip(&w).map(|(gi, wi)| gi * wi).sum();
        let gap = (gdot - gmin).max(0.0);
        final_gap = gap;
        if f.is_finite() {
            best_lower = best_lower.max(f - gap);
        }
        if gap <= STATIONARITY_GAP_TOL {
            break;
        }
        let gmax = g.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-12);
        let eta = 0.5 / gmax;
        let mut total = 0.0;
        for j in 0..m {
            w[j] = (w[j] * (-eta * g[j]).exp()).max(1e-300);
            total += w[j];
        }
        for wj in w.iter_mut() {
            *wj /= total;
        }
    }
    let lower = best_lower
        .max(best_upper - final_gap.max(0.0))
        .min(best_upper)
        .max(0.0);
    Ok((
        DivergenceBracket {
            lower,
            upper: best_upper,
            certificate: format!(
                "exponentiated gradient, stationarity gap {final_gap:.3e}"
            ),
        },
        best_w,
    ))
}

/// Relative entropy from `rho` to the convex hull of the listed states.
pub fn relent_to_hull(
    rho: &DensityOperator,
    hull_ext: &[DensityOperator],
) -> Result<DivergenceBracket> {
    Ok(relent_to_hull_weights(rho, hull_ext)?.0)
}

fn conjugate_into_basis(op: &HermitianOperator, vecs: &CMat) -> CMat {
    vecs.adjoint().mul(op.mat()).mul(vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{beta_eps_classical, Distribution};
    use crate::random::{random_density, rng_from_seed};

    fn diag2(p: f64) -> DensityOperator {
        DensityOperator::from_diag(vec![2], &[p, 1.0 - p]).unwrap()
    }

    #[test]
    fn umegaki_known_values() {
        let rho = diag2(0.5);
        let sigma = diag2(0.25);
        assert!(umegaki(&rho, &rho).unwrap().abs() < 1e-10);
        let d = umegaki(&rho, &sigma).unwrap();
        let expect = 0.5 + 0.5 * (2.0f64 / 3.0).log2();
        assert!((d - expect).abs() < 1e-9);
        assert!((d - 0.20752).abs() < 1e-4);

        let zero = DensityOperator::basis_state(vec![2], 0).unwrap();
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        assert!((umegaki(&zero, &mixed).unwrap() - 1.0).abs() < 1e-9);

        let one = DensityOperator::basis_state(vec![2], 1).unwrap();
        assert!(umegaki(&zero, &one).unwrap().is_infinite());
    }

    #[test]
    fn np_self_test_closed_form() {
        let mut rng = rng_from_seed(21);
        for &eps in &[0.1, 0.3] {
            let rho = random_density(&[3], &mut rng).unwrap();
            let np = neyman_pearson_simple(&rho, &rho, eps).unwrap();
            assert!((np.beta - (1.0 - eps)).abs() < 1e-6, "beta {}", np.beta);
        }
    }

    #[test]
    fn np_orthogonal_pure_states() {
        let zero = DensityOperator::basis_state(vec![2], 0).unwrap();
        let one = DensityOperator::basis_state(vec![2], 1).unwrap();
        let np = neyman_pearson_simple(&zero, &one, 0.2).unwrap();
        assert!(np.beta.abs() < 1e-12);
        assert!(bits_of_beta(np.beta).is_infinite());
    }

    #[test]
    fn np_matches_classical_oracle() {
        let rho = diag2(0.5);
        let sigma = diag2(0.25);
        let np = neyman_pearson_simple(&rho, &sigma, 0.25).unwrap();
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        let q = Distribution::new(vec![0.25, 0.75]).unwrap();
        let oracle = beta_eps_classical(&p, &q, 0.25).unwrap();
        assert!((np.beta - oracle).abs() < 1e-8);
    }

    #[test]
    fn np_beta_monotone_in_eps() {
        let mut rng = rng_from_seed(5);
        let rho = random_density(&[2], &mut rng).unwrap();
        let sigma = random_density(&[2], &mut rng).unwrap();
        let mut last = f64::INFINITY;
        for k in 1..9 {
            let np = neyman_pearson_simple(&rho, &sigma, 0.1 * k as f64).unwrap();
            assert!(np.beta <= last + 1e-10);
            last = np.beta;
        }
    }

    #[test]
    fn composite_singleton_collapses_to_simple() {
        let mut rng = rng_from_seed(9);
        let rho = random_density(&[2], &mut rng).unwrap();
        let sigma = random_density(&[2], &mut rng).unwrap();
        let np = neyman_pearson_simple(&rho, &sigma, 0.1).unwrap();
        let bracket = beta_eps_composite(&[rho], &[sigma], 0.1).unwrap();
        assert!((bracket.lower - np.beta).abs() < 1e-6);
        assert!((bracket.upper - np.beta).abs() < 1e-6);
    }

    #[test]
    fn composite_equal_lists_contain_one_minus_eps() {
        let mut rng = rng_from_seed(13);
        let a = random_density(&[2], &mut rng).unwrap();
        let b = random_density(&[2], &mut rng).unwrap();
        let list = vec![a, b];
        let eps = 0.3;
        let bracket = beta_eps_composite(&list, &list, eps).unwrap();
        assert!(bracket.lower <= 1.0 - eps + 1e-7, "lower {}", bracket.lower);
        assert!(bracket.upper >= 1.0 - eps - 1e-7, "upper {}", bracket.upper);
        assert!(bracket.lower <= bracket.upper + 1e-7);
    }

    #[test]
    fn pinch_identity_reference_is_identity_map() {
        let mut rng = rng_from_seed(2);
        let rho = random_density(&[2], &mut rng).unwrap();
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        let out = pinch(&rho, &mixed).unwrap();
        assert!(out.op().sub(rho.op()).unwrap().frob_norm() < 1e-10);
    }

    #[test]
    fn pinch_diagonal_input_unchanged_and_commutes() {
        let rho = diag2(0.3);
        let sigma = diag2(0.8);
        let out = pinch(&rho, &sigma).unwrap();
        assert!(out.op().sub(rho.op()).unwrap().frob_norm() < 1e-10);
        // Trace preserved and output commutes with sigma.
        let mut rng = rng_from_seed(17);
        let r = random_density(&[2], &mut rng).unwrap();
        let p = pinch(&r, &sigma).unwrap();
        assert!((p.op().trace() - 1.0).abs() < 1e-10);
        let comm = p
            .op()
            .mat()
            .mul(sigma.op().mat())
            .sub(&sigma.op().mat().mul(p.op().mat()));
        assert!(comm.frob_norm() < 1e-8);
    }

    #[test]
    fn measured_pinched_cases() {
        let rho = diag2(0.5);
        let sigma = diag2(0.25);
        let m = measured_relent_pinched(&rho, &sigma).unwrap();
        let d = umegaki(&rho, &sigma).unwrap();
        assert!((m - d).abs() < 1e-9, "commuting nondegenerate pair");
        assert!(measured_relent_pinched(&rho, &rho).unwrap().abs() < 1e-10);

        let half = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DensityOperator::pure(
            vec![2],
            &[C64::new(half, 0.0), C64::new(half, 0.0)],
        )
        .unwrap();
        let sig = diag2(0.75);
        let m2 = measured_relent_pinched(&plus, &sig).unwrap();
        let d2 = umegaki(&plus, &sig).unwrap();
        assert!(m2 <= d2 + 1e-8);
    }

    #[test]
    fn g_afw_values() {
        assert_eq!(g_afw(0.0).unwrap(), 0.0);
        assert!((g_afw(1.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(g_afw(-0.1).is_err());
        let mut last = 0.0;
        for k in 1..=10 {
            let v = g_afw(0.1 * k as f64).unwrap();
            assert!(v > last);
            last = v;
        }
    }

    #[test]
    fn hull_member_and_singleton() {
        let a = diag2(0.25);
        let b = diag2(0.75);
        let bracket = relent_to_hull(&a, &[a.clone(), b.clone()]).unwrap();
        assert!(bracket.upper < 1e-6);
        let single = relent_to_hull(&b, &[a.clone()]).unwrap();
        let d = umegaki(&b, &a).unwrap();
        assert!((single.upper - d).abs() < 1e-9);
        assert!((single.lower - d).abs() < 1e-9);
    }

    #[test]
    fn hull_bracket_orders() {
        let mut rng = rng_from_seed(31);
        let rho = random_density(&[2], &mut rng).unwrap();
        let t1 = random_density(&[2], &mut rng).unwrap();
        let t2 = random_density(&[2], &mut rng).unwrap();
        let bracket = relent_to_hull(&rho, &[t1, t2]).unwrap();
        assert!(bracket.lower <= bracket.upper + 1e-7);
        assert!(bracket.lower >= 0.0);
    }

    #[test]
    fn umegaki_joint_convexity_samples() {
        let mut rng = rng_from_seed(40);
        for _ in 0..5 {
            let (r1, r2, r3) = (
                random_density(&[2], &mut rng).unwrap(),
                random_density(&[2], &mut rng).unwrap(),
                random_density(&[2], &mut rng).unwrap(),
            );
            let (s1, s2, s3) = (
                random_density(&[2], &mut rng).unwrap(),
                random_density(&[2], &mut rng).unwrap(),
                random_density(&[2], &mut rng).unwrap(),
            );
            let w = [0.5, 0.3, 0.2];
            let rm = DensityOperator::mixture(&[r1.clone(), r2.clone(), r3.clone()], &w).unwrap();
            let sm = DensityOperator::mixture(&[s1.clone(), s2.clone(), s3.clone()], &w).unwrap();
            let mixed = umegaki(&rm, &sm).unwrap();
            let avg = w[0] * umegaki(&r1, &s1).unwrap()
                + w[1] * umegaki(&r2, &s2).unwrap()
                + w[2] * umegaki(&r3, &s3).unwrap();
            assert!(mixed <= avg + 1e-8, "mixed {mixed} avg {avg}");
        }
    }
}
