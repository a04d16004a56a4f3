//! Finite-n exponent estimation: type-II error brackets between composite
//! families, per-copy regularised relative entropies, the arbitrarily-varying
//! versus i.i.d. sandwich, inverse-square measure mixing, attacker-measure
//! optimization, and subadditive limit reporting.

use crate::div::{
    beta_eps_composite, bits_of_beta, relent_to_hull, relent_to_hull_weights, BetaBracket,
    DivergenceBracket,
};
use crate::error::{OpError, Result};
use crate::family::{av_hull_symmetric_decomposition, DiscreteMeasure, StateFamily};
use crate::io::fmt_rate;
use crate::report::CheckReport;

/// Which composite null model a scan materializes at each copy count.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Iid,
    Av,
}

/// One copy count worth of scan output; solver-derived values always carry
/// both bracket ends.
#[derive(Clone, Debug)]
pub struct ScanRow {
    pub n: usize,
    pub beta: Option<BetaBracket>,
    /// Per-copy relative entropy bracket `(1/n) D(A_n || co B_n)` in bits.
    pub relent: Option<DivergenceBracket>,
}

impl ScanRow {
    /// Per-copy rate bracket `-(1/n) log2 beta` in bits; the lower rate comes
    /// from the upper error bracket.
    pub fn rate_bounds(&self) -> (f64, f64) {
        match &self.beta {
            Some(b) => (
                bits_of_beta(b.upper) / self.n as f64,
                bits_of_beta(b.lower) / self.n as f64,
            ),
            None => (f64::NAN, f64::NAN),
        }
    }
}

/// Scan of a scenario over strictly increasing copy counts.
#[derive(Clone, Debug)]
pub struct ExponentScan {
    pub scenario: String,
    pub eps: f64,
    pub rows: Vec<ScanRow>,
    pub metadata: String,
}

impl ExponentScan {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "n,beta_lower,beta_upper,rate_lower,rate_upper,relent_lower,relent_upper\n",
        );
        for row in &self.rows {
            let (rl, ru) = row.rate_bounds();
            let (bl, bu) = match &row.beta {
                Some(b) => (fmt_rate(b.lower), fmt_rate(b.upper)),
                None => (String::new(), String::new()),
            };
            let (dl, du) = match &row.relent {
                Some(d) => (fmt_rate(d.lower), fmt_rate(d.upper)),
                None => (String::new(), String::new()),
            };
            let (rl, ru) = if rl.is_nan() {
                (String::new(), String::new())
            } else {
                (fmt_rate(rl), fmt_rate(ru))
            };
            out.push_str(&format!("{},{bl},{bu},{rl},{ru},{dl},{du}\n", row.n));
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                let beta = match &r.beta {
                    Some(b) => format!(
                        "{{\"lower\":{},\"upper\":{},\"cert\":{}}}",
                        fmt_rate(b.lower),
                        fmt_rate(b.upper),
                        serde_json::json!(b.certificate)
                    ),
                    None => "null".into(),
                };
                let relent = match &r.relent {
                    Some(d) => d.to_json(),
                    None => "null".into(),
                };
                format!("{{\"n\":{},\"beta\":{beta},\"relent\":{relent}}}", r.n)
            })
            .collect();
        format!(
            "{{\"schema\":1,\"scenario\":{},\"eps\":{},\"metadata\":{},\"rows\":[{}]}}",
            serde_json::json!(self.scenario),
            fmt_rate(self.eps),
            serde_json::json!(self.metadata),
            rows.join(",")
        )
    }
}

/// Certified bracket on the minimal type-II error between two families at
/// their declared copy counts.
pub fn beta_eps_families(a: &StateFamily, b: &StateFamily, eps: f64) -> Result<BetaBracket> {
    let a_ext = a.extreme_points()?;
    let b_ext = b.extreme_points()?;
    beta_eps_composite(&a_ext, &b_ext, eps)
}

fn null_extreme_points(b_base: &[DensityOperator], mode: Mode, n: usize) -> Result<Vec<DensityOperator>> {
    match mode {
        Mode::Iid => b_base.iter().map(|s| s.tensor_power(n)).collect(),
        Mode::Av => Ok(av_hull_symmetric_decomposition(b_base, n)?
            .into_iter()
            .map(|(_, s)| s)
            .collect()),
    }
}

use crate::op::DensityOperator;

/// Bracket on `(1/n) min_{rho in A_n} D(rho || co B_n)`, minimizing over the
/// alternative family's extreme points.
pub fn relent_bracket_at_n(
    a_n: &StateFamily,
    b_base: &[DensityOperator],
    mode: Mode,
    n: usize,
) -> Result<DivergenceBracket> {
    let a_ext = a_n.extreme_points()?;
    let b_ext = null_extreme_points(b_base, mode, n)?;
    let mut best: Option<DivergenceBracket> = None;
    for rho in &a_ext {
        let bracket = relent_to_hull(rho, &b_ext)?;
        best = Some(match best {
            None => bracket,
            Some(cur) => {
                if bracket.upper < cur.upper {
                    DivergenceBracket {
                        lower: cur.lower.min(bracket.lower),
                        upper: bracket.upper,
                        certificate: bracket.certificate,
                    }
                } else {
                    DivergenceBracket {
                        lower: cur.lower.min(bracket.lower),
                        upper: cur.upper,
                        certificate: cur.certificate,
                    }
                }
            }
        });
    }
    let b = best.expect("nonempty alternative family");
    let scale = 1.0 / n as f64;
    Ok(DivergenceBracket {
        lower: b.lower * scale,
        upper: b.upper * scale,
        certificate: b.certificate,
    })
}

/// Per-n brackets of the regularised relative entropy sequence.
pub fn regularised_relent_scan(
    a_gen: &dyn Fn(usize) -> Result<StateFamily>,
    b_base: &[DensityOperator],
    mode: Mode,
    n_max: usize,
) -> Result<ExponentScan> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a_n = a_gen(n)?;
        let relent = relent_bracket_at_n(&a_n, b_base, mode, n)?;
        rows.push(ScanRow {
            n,
            beta: None,
            relent: Some(relent),
        });
    }
    Ok(ExponentScan {
        scenario: "regularised-relent".into(),
        eps: f64::NAN,
        rows,
        metadata: format!("mode {:?}, base size {}", mode, b_base.len()),
    })
}

/// Full scan: per-n type-II error bracket and per-copy relative entropy
/// bracket for the same family pair.
pub fn exponent_scan(
    scenario: &str,
    a_gen: &dyn Fn(usize) -> Result<StateFamily>,
    b_base: &[DensityOperator],
    mode: Mode,
    eps: f64,
    n_max: usize,
) -> Result<ExponentScan> {
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let a_n = a_gen(n)?;
        let a_ext = a_n.extreme_points()?;
        let b_ext = null_extreme_points(b_base, mode, n)?;
        let beta = beta_eps_composite(&a_ext, &b_ext, eps)?;
        let relent = relent_bracket_at_n(&a_n, b_base, mode, n)?;
        rows.push(ScanRow {
            n,
            beta: Some(beta),
            relent: Some(relent),
        });
    }
    Ok(ExponentScan {
        scenario: scenario.into(),
        eps,
        rows,
        metadata: format!("mode {:?}, base size {}", mode, b_base.len()),
    })
}

/// Verify the three-term chain relating the arbitrarily-varying and i.i.d.
/// regularised relative entropies at one copy count, with the cover
/// correction `delta + (1 + |X_delta| log2(n+1))/n`.
pub fn sandwich_av_iid(
    a_gen: &dyn Fn(usize) -> Result<StateFamily>,
    b_base: &[DensityOperator],
    delta_cover_size: usize,
    delta: f64,
    n: usize,
    seed: u64,
) -> Result<CheckReport> {
    let a_n = a_gen(n)?;
    let av = relent_bracket_at_n(&a_n, b_base, Mode::Av, n)?;
    let iid = relent_bracket_at_n(&a_n, b_base, Mode::Iid, n)?;
    let correction =
        delta + (1.0 + delta_cover_size as f64 * ((n + 1) as f64).log2()) / n as f64;
    let tol = 1e-6;
    // Adversarial bracket ends: the chain must hold even for the worst
    // consistent pair of true values.
    let slack_left = iid.upper - av.lower; // av <= iid
    let slack_right = av.upper + correction - iid.lower; // iid <= av + correction
    let worst = slack_left.min(slack_right);
    Ok(CheckReport::from_slack(
        "sandwich-av-iid",
        "arbitrarily-varying vs i.i.d. regularised relative entropy chain with cover correction",
        1,
        worst,
        tol,
        seed,
        format!(
            "n={n}, av=[{:.6e},{:.6e}], iid=[{:.6e},{:.6e}], correction={correction:.6e}",
            av.lower, av.upper, iid.lower, iid.upper
        ),
    ))
}

/// Unnormalized inverse-square weights `6/(pi^2 k^2)` for k = 1..=N.
pub fn basel_weights(big_n: usize) -> Vec<f64> {
    let c = 6.0 / (std::f64::consts::PI * std::f64::consts::PI);
    (1..=big_n).map(|k| c / ((k * k) as f64)).collect()
}

/// Truncated inverse-square mixture of measures, renormalized by the
/// truncated mass.
pub fn basel_mix(measures: &[DiscreteMeasure], big_n: usize) -> Result<DiscreteMeasure> {
    if measures.is_empty() {
        return Err(OpError::BadArgument("empty measure list".into()));
    }
    if big_n == 0 || big_n > measures.len() || big_n > 64 {
        return Err(OpError::BadArgument(format!(
            "truncation length {big_n} outside 1..={}",
            measures.len().min(64)
        )));
    }
    let raw = basel_weights(big_n);
    let mass: f64 = raw.iter().sum();
    let mut support = Vec::new();
    let mut weights = Vec::new();
    for (k, mu) in measures.iter().take(big_n).enumerate() {
        let scale = raw[k] / mass;
        for (s, &w) in mu.support.iter().zip(&mu.weights) {
            support.push(s.clone());
            weights.push(scale * w);
        }
    }
    DiscreteMeasure::new(support, weights)
}

/// Measure over the base minimizing the relative entropy from the best
/// attacker state in `a_n` to the mixture of base powers.
pub fn best_attacker_measure(
    a_n: &StateFamily,
    b_base: &[DensityOperator],
    n: usize,
) -> Result<(DiscreteMeasure, f64)> {
    let powers: Vec<DensityOperator> = b_base
        .iter()
        .map(|s| s.tensor_power(n))
        .collect::<Result<_>>()?;
    let a_ext = a_n.extreme_points()?;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for rho in &a_ext {
        let (bracket, w) = relent_to_hull_weights(rho, &powers)?;
        if best.as_ref().map_or(true, |(v, _)| bracket.upper < *v) {
            best = Some((bracket.upper, w));
        }
    }
    let (value, w) = best.expect("nonempty attacker family");
    Ok((DiscreteMeasure::new(b_base.to_vec(), w)?, value))
}

/// Subadditive-limit diagnostics for a per-copy value sequence `a_n`.
#[derive(Clone, Debug)]
pub struct FeketeSummary {
    /// `min_n a_n`, the candidate for the subadditive limit.
    pub limit_candidate: f64,
    pub last_value: f64,
    /// Pairs (m, n) where `(m+n) a_{m+n} > m a_m + n a_n` beyond tolerance.
    pub violations: Vec<(usize, usize)>,
}

pub fn fekete_report(values: &[f64], tolerance: f64) -> Result<FeketeSummary> {
    if values.len() < 3 {
        return Err(OpError::BadArgument(format!(
            "need at least 3 values, got {}",
            values.len()
        )));
    }
    let totals: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(i, &a)| a * (i + 1) as f64)
        .collect();
    let mut violations = Vec::new();
    for m in 1..=values.len() {
        for n in 1..=values.len() {
            if m + n <= values.len() && totals[m + n - 1] > totals[m - 1] + totals[n - 1] + tolerance
            {
                violations.push((m, n));
            }
        }
    }
    Ok(FeketeSummary {
        limit_candidate: values.iter().cloned().fold(f64::INFINITY, f64::min),
        last_value: *values.last().unwrap(),
        violations,
    })
}
