//! Classical probability utilities: finite distributions, relative entropy in
//! bits, i.i.d. powers, and the exact likelihood-ratio error trade-off used
//! as an oracle for the commuting case.

use crate::error::{OpError, Result};

/// Probability weight below which an outcome counts as outside the support.
pub const PROB_CUTOFF: f64 = 1e-12;

/// Finite probability distribution (nonnegative, sums to one within 1e-9).
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    p: Vec<f64>,
}

impl Distribution {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(OpError::BadArgument("empty distribution".into()));
        }
        if let Some(&neg) = p.iter().find(|&&v| v < -1e-12) {
            return Err(OpError::NotPsd(neg));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(OpError::BadTrace(total));
        }
        Ok(Distribution {
            p: p.into_iter().map(|v| v.max(0.0)).collect(),
        })
    }

    pub fn uniform(k: usize) -> Self {
        Distribution {
            p: vec![1.0 / k as f64; k],
        }
    }

    pub fn probs(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// i.i.d. product distribution over n-tuples, lexicographic outcome order.
    pub fn power(&self, n: usize) -> Result<Distribution> {
        if n == 0 {
            return Err(OpError::BadArgument("power needs n >= 1".into()));
        }
        let mut out = self.p.clone();
        for _ in 1..n {
            let mut next = Vec::with_capacity(out.len() * self.p.len());
            for &a in &out {
                for &b in &self.p {
                    next.push(a * b);
                }
            }
            out = next;
        }
        Ok(Distribution { p: out })
    }
}

/// Kullback-Leibler divergence in bits; positive infinity when the first
/// distribution puts weight above `PROB_CUTOFF` outside the support of the
/// second.
pub fn kl_bits(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(OpError::DimMismatch(p.len(), q.len()));
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi <= PROB_CUTOFF {
            continue;
        }
        if qi <= PROB_CUTOFF {
            return Ok(f64::INFINITY);
        }
        acc += pi * (pi / qi).log2();
    }
    Ok(acc.max(0.0))
}

/// Binary entropy in bits, `h(0) = h(1) = 0`.
pub fn binary_entropy_bits(eps: f64) -> f64 {
    let mut h = 0.0;
    if eps > 0.0 {
        h -= eps * eps.log2();
    }
    if eps < 1.0 {
        h -= (1.0 - eps) * (1.0 - eps).log2();
    }
    h
}

/// Minimal type-II error of a test between `p` and `q` with type-I error at
/// most `eps`, computed exactly by the likelihood-ratio construction.
///
/// Outcomes are sorted by descending ratio `p/q` (ties broken by index) and
/// accepted greedily until the acceptance probability under `p` reaches
/// `1 - eps`; the last outcome is accepted with a fractional weight.
pub fn beta_eps_classical(p: &Distribution, q: &Distribution, eps: f64) -> Result<f64> {
    if p.len() != q.len() {
        return Err(OpError::DimMismatch(p.len(), q.len()));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(OpError::BadArgument(format!("eps {eps} outside [0,1)")));
    }
    let mut order: Vec<usize> = (0..p.len()).collect();
    let ratio = |i: usize| -> f64 {
        let (pi, qi) = (p.probs()[i], q.probs()[i]);
        if qi <= PROB_CUTOFF {
            if pi <= PROB_CUTOFF {
                -1.0
            } else {
                f64::INFINITY
            }
        } else {
            pi / qi
        }
    };
    order.sort_by(|&a, &b| ratio(b).partial_cmp(&ratio(a)).unwrap().then(a.cmp(&b)));

    let target = 1.0 - eps;
    let mut mass_p = 0.0;
    let mut beta = 0.0;
    for &i in &order {
        let (pi, qi) = (p.probs()[i], q.probs()[i]);
        if mass_p + pi <= target + 1e-15 {
            mass_p += pi;
            beta += qi;
        } else {
            let w = if pi > 0.0 { (target - mass_p) / pi } else { 0.0 };
            beta += w.clamp(0.0, 1.0) * qi;

            break;
        }
        if mass_p >= target - 1e-15 {
            break;
        }
    }
    Ok(beta.max(0.0))
}

/// Hypothesis-testing divergence `-log2 beta` in bits; `inf` when beta is 0.
pub fn dh_eps_classical(p: &Distribution, q: &Distribution, eps: f64) -> Result<f64> {
    let beta = beta_eps_classical(p, q, eps)?;
    if beta <= 0.0 {
        Ok(f64::INFINITY)
    } else {
        Ok(-beta.log2())
    }
}
