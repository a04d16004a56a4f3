//! Registry of executable theorem checks.
//!
//! Every inequality the library relies on is packaged as a [`TheoremCheck`]
//! behind a stable string id. Checks are pure given a configuration and a
//! seed, can run individually or as a full suite, and report worst-case
//! slacks with enough detail to replay a failure.

use crate::classical::{binary_entropy_bits, dh_eps_classical, Distribution};
use crate::div::{
    beta_eps_composite, measured_relent_pinched, neyman_pearson_simple,
    relent_continuity_bound, umegaki,
};
use crate::error::{OpError, Result};
use crate::exponent::{basel_mix, basel_weights, sandwich_av_iid};
use crate::family::{enumerate_types, iid_mixture_state, type_class_state, DiscreteMeasure, StateFamily};
use crate::op::DensityOperator;
use crate::random::{random_density, rng_from_seed};
use crate::report::{CheckReport, Verdict};

/// Tuning knobs shared by all checks.
#[derive(Clone, Debug)]
pub struct CheckConfig {
    /// Randomized instances per check.
    pub trials: usize,
    /// Largest copy count exercised.
    pub max_n: usize,
    /// Register the deliberately broken fixture check (for testing the
    /// fail path of the harness itself).
    pub include_injected: bool,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            trials: 5,
            max_n: 3,
            include_injected: false,
        }
    }
}

/// One verifiable statement with a stable identifier.
pub trait TheoremCheck: Sync {
    fn id(&self) -> &'static str;
    /// Human-readable statement of what is being verified.
    fn anchor(&self) -> &'static str;
    fn run(&self, cfg: &CheckConfig, seed: u64) -> Result<CheckReport>;
}

/// Stable 64-bit FNV-1a hash, used to derive per-check seeds.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

pub fn derive_seed(seed: u64, id: &str) -> u64 {
    seed ^ fnv1a(id.as_bytes())
}

// ---------------------------------------------------------------------------
// Check bodies (public so callers can run them at custom scales).
// ---------------------------------------------------------------------------

/// Pinching bounds: `D - 2 log2(n+1) <= D_pinched <= D` for random states
/// against random permutation-invariant references on n qubit factors.
pub fn check_pinching(n: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    if n > 4 {
        return Err(OpError::CapExceeded(n, 4));
    }
    let mut rng = rng_from_seed(seed);
    let dims = vec![2usize; n];
    let constant = 2.0 * ((n + 1) as f64).log2();
    let mut worst = f64::INFINITY;
    let mut worst_detail = String::new();
    for t in 0..trials {
        let rho = random_density(&dims, &mut rng)?;
        let sigma = random_density(&dims, &mut rng)?.symmetrize()?;
        let d = umegaki(&rho, &sigma)?;
        let dp = measured_relent_pinched(&rho, &sigma)?;
        let upper_slack = d - dp;
        let lower_slack = dp - (d - constant);
        let slack = upper_slack.min(lower_slack);
        if slack < worst {
            worst = slack;
            worst_detail = format!("trial {t}: D={d:.6e}, pinched={dp:.6e}, constant={constant:.4e}");
        }
    }
    Ok(CheckReport::from_slack(
        "pinching-bounds",
        "dephasing in the reference eigenbasis loses at most 2 log2(n+1) bits of relative entropy",
        trials,
        worst,
        1e-6,
        seed,
        format!("n={n}; worst at {worst_detail}"),
    ))
}

/// Continuity chain: replacing the attacker state by a nearby one moves the
/// relative entropy to the null family by at most
/// `n (eps log2(1/c) + g(eps))` bits.
pub fn check_afw_chain(trials: usize, max_n: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = rng_from_seed(seed);
    let tau = DensityOperator::maximally_mixed(vec![2]);
    let c = 0.5 - 1e-10;
    let mut worst = f64::INFINITY;
    let mut worst_detail = String::new();
    for t in 0..trials {
        let rho = random_density(&[2], &mut rng)?;
        let chi = random_density(&[2], &mut rng)?;
        let eta = 0.02 + 0.28 * (t as f64 / trials.max(1) as f64);
        let rho_prime = DensityOperator::mixture(&[rho.clone(), chi], &[1.0 - eta, eta])?;
        let eps = rho.trace_distance(&rho_prime)?;
        let bound1 = relent_continuity_bound(eps, c)?;
        for n in 1..=max_n.min(3) {
            let d = umegaki(&rho.tensor_power(n)?, &tau.tensor_power(n)?)?;
            let dp = umegaki(&rho_prime.tensor_power(n)?, &tau.tensor_power(n)?)?;
            let slack = n as f64 * bound1 - (d - dp).abs();
            if slack < worst {
                worst = slack;
                worst_detail =
                    format!("trial {t}, n={n}: |dD|={:.6e}, bound={:.6e}", (d - dp).abs(), n as f64 * bound1);
            }
        }
    }
    Ok(CheckReport::from_slack(
        "afw-chain",
        "relative entropy to the null family is continuous in the attacker state at rate eps log2(1/c) + g(eps) per copy",
        trials,
        worst,
        1e-5,
        seed,
        worst_detail,
    ))
}

/// Operator domination of type classes: the i.i.d. power of the type's
/// empirical mixture dominates the type-class average up to `(n+1)^{-|X|}`.
pub fn check_type_domination(alphabet: usize, max_n: usize, seed: u64) -> Result<CheckReport> {
    if alphabet > 3 {
        return Err(OpError::CapExceeded(alphabet, 3));
    }
    let mut rng = rng_from_seed(seed);
    let base: Vec<DensityOperator> = (0..alphabet)
        .map(|_| random_density(&[2], &mut rng))
        .collect::<Result<_>>()?;
    let mut worst = f64::INFINITY;
    let mut instances = 0usize;
    let mut worst_detail = String::new();
    for n in 1..=max_n.min(4) {
        for v in enumerate_types(alphabet, n)? {
            let gamma = type_class_state(&base, &v)?;
            let weights: Vec<f64> = v.counts.iter().map(|&cx| cx as f64 / n as f64).collect();
            let mix = DensityOperator::mixture(&base, &weights)?;
            let scale = ((n + 1) as f64).powi(-(alphabet as i32));
            let gap = mix
                .tensor_power(n)?
                .op()
                .sub(&gamma.op().scale(scale))?
                .min_eigenvalue()?;
            instances += 1;
            if gap < worst {
                worst = gap;
                worst_detail = format!("n={n}, type {:?}", v.counts);
            }
        }
    }
    Ok(CheckReport::from_slack(
        "type-domination",
        "empirical-mixture powers dominate type-class averages up to an inverse polynomial factor",
        instances,
        worst,
        1e-9,
        seed,
        worst_detail,
    ))
}

/// Inverse-square measure mixing dominates each truncated component.
pub fn check_measure_domination(big_n: usize, max_n: usize, seed: u64) -> Result<CheckReport> {
    if big_n > 8 {
        return Err(OpError::CapExceeded(big_n, 8));
    }
    let mut rng = rng_from_seed(seed);
    let measures: Vec<DiscreteMeasure> = (0..big_n)
        .map(|_| Ok(DiscreteMeasure::point_mass(random_density(&[2], &mut rng)?)))
        .collect::<Result<_>>()?;
    let mix = basel_mix(&measures, big_n)?;
    let raw = basel_weights(big_n);
    let mass: f64 = raw.iter().sum();
    let mut worst = f64::INFINITY;
    let mut instances = 0usize;
    for n in 1..=max_n.min(4) {
        let mixed = iid_mixture_state(&mix, n)?;
        for (k, mu) in measures.iter().enumerate() {
            let part = iid_mixture_state(mu, n)?;
            let gap = mixed
                .op()
                .sub(&part.op().scale(raw[k] / mass))?
                .min_eigenvalue()?;
            instances += 1;
            worst = worst.min(gap);
        }
    }
    Ok(CheckReport::from_slack(
        "measure-domination",
        "the truncated inverse-square mixture of measures dominates each weighted component",
        instances,
        worst,
        1e-9,
        seed,
        format!("truncation {big_n}, copies up to {}", max_n.min(4)),
    ))
}

/// The arbitrarily-varying vs i.i.d. sandwich at each copy count.
pub fn check_sandwich(max_n: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = rng_from_seed(seed);
    let base = vec![random_density(&[2], &mut rng)?, random_density(&[2], &mut rng)?];
    let rho = random_density(&[2], &mut rng)?;
    let gen = move |n: usize| StateFamily::iid_power(vec![rho.clone()], n);
    let mut worst = f64::INFINITY;
    let mut detail = String::new();
    for n in 1..=max_n.min(4) {
        let r = sandwich_av_iid(&gen, &base, base.len(), 0.0, n, seed)?;
        if r.worst_slack < worst {
            worst = r.worst_slack;
            detail = r.detail;
        }
    }
    Ok(CheckReport::from_slack(
        "sandwich-av-iid",
        "arbitrarily-varying vs i.i.d. regularised relative entropy chain with cover correction",
        max_n.min(4),
        worst,
        1e-6,
        seed,
        detail,
    ))
}

/// Convexifying either hypothesis list leaves the type-II error bracket in
/// place (both brackets must overlap).
pub fn check_convexify_invariance(trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = rng_from_seed(seed);
    let eps = 0.2;
    let mut worst = f64::INFINITY;
    let mut worst_detail = String::new();
    for t in 0..trials {
        let a: Vec<DensityOperator> = (0..2)
            .map(|_| random_density(&[2], &mut rng))
            .collect::<Result<_>>()?;
        let b: Vec<DensityOperator> = (0..2)
            .map(|_| random_density(&[2], &mut rng))
            .collect::<Result<_>>()?;
        let base_bracket = beta_eps_composite(&a, &b, eps)?;
        let mut a2 = a.clone();
        a2.push(DensityOperator::mixture(&a, &[0.5, 0.5])?);
        let mut b2 = b.clone();
        b2.push(DensityOperator::mixture(&b, &[0.25, 0.75])?);
        let conv_bracket = beta_eps_composite(&a2, &b2, eps)?;
        let slack =
            base_bracket.upper.min(conv_bracket.upper) - base_bracket.lower.max(conv_bracket.lower);
        if slack < worst {
            worst = slack;
            worst_detail = format!(
                "trial {t}: base=[{:.6e},{:.6e}], convexified=[{:.6e},{:.6e}]",
                base_bracket.lower, base_bracket.upper, conv_bracket.lower, conv_bracket.upper
            );
        }
    }
    Ok(CheckReport::from_slack(
        "convexify-invariance",
        "adding explicit mixtures to either hypothesis list leaves the error bracket overlapping",
        trials,
        worst,
        1e-5,
        seed,
        worst_detail,
    ))
}

/// Symmetrizing both arguments cannot increase relative entropy.
pub fn check_symmetrization(trials: usize, max_n: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = rng_from_seed(seed);
    let mut worst = f64::INFINITY;
    let mut instances = 0usize;
    for _ in 0..trials {
        for n in 2..=max_n.min(3) {
            let dims = vec![2usize; n];
            let rho = random_density(&dims, &mut rng)?;
            let sigma = random_density(&dims, &mut rng)?;
            let plain = umegaki(&rho, &sigma)?;
            let sym = umegaki(&rho.symmetrize()?, &sigma.symmetrize()?)?;
            instances += 1;
            worst = worst.min(plain - sym);
        }
    }
    Ok(CheckReport::from_slack(
        "symmetrization-contracts",
        "averaging both states over the permutation group cannot increase relative entropy",
        instances,
        worst,
        1e-8,
        seed,
        String::new(),
    ))
}

/// Per-copy testing rates `a_n = (1/n) D_H^eps` between i.i.d. powers:
/// achievability from the dephased classical pair, a converse-style cap, and
/// a strict trend toward the single-copy relative entropy.
pub fn check_stein_convergence(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
    n_max: usize,
    seed: u64,
) -> Result<CheckReport> {
    let d1 = umegaki(rho, sigma)?;
    let commuting = {
        let c = rho
            .op()
            .mat()
            .mul(sigma.op().mat())
            .sub(&sigma.op().mat().mul(rho.op().mat()));
        c.frob_norm() < 1e-10
    };
    let rates = if commuting {
        classical_rates(rho, sigma, eps, n_max)?
    } else {
        quantum_rates(rho, sigma, eps, n_max.min(5))?
    };
    let mut worst = f64::INFINITY;
    let mut worst_detail = String::new();
    for (n, a_n, pinched_rate) in &rates {
        // Achievability shadow: the dephased classical test is available.
        let ach = a_n - pinched_rate;
        // Converse-style cap at finite n.
        let cap = (d1 + binary_entropy_bits(eps) / *n as f64) / (1.0 - eps) - a_n;
        let slack = ach.min(cap);
        if slack < worst {
            worst = slack;
            worst_detail = format!("n={n}: a_n={a_n:.6e}, dephased={pinched_rate:.6e}");
        }
    }
    let a_first = rates.first().expect("nonempty scan").1;
    let a_last = rates.last().expect("nonempty scan").1;
    let trend = (a_first - d1).abs() - (a_last - d1).abs();
    let worst = worst.min(trend);
    let mut report = CheckReport::from_slack(
        "stein-trend",
        "per-copy testing rates respect the dephased achievability floor, a finite-n cap, and trend toward the relative entropy",
        rates.len(),
        worst,
        1e-6,
        seed,
        format!("D={d1:.6e}, a_1={a_first:.6e}, a_max={a_last:.6e}; {worst_detail}"),
    );
    if trend <= 0.0 {
        // Trend clause is strict: no tolerance.
        report.verdict = Verdict::Fail;
        report.worst_slack = trend;
    }
    Ok(report)
}

fn classical_pair(rho: &DensityOperator, sigma: &DensityOperator) -> Result<(Distribution, Distribution)> {
    let (vals, vecs) = sigma.op().eig()?;
    let n = sigma.dim();
    let mut p = vec![0.0; n];
    for c in 0..n {
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                acc += (vecs.get(k, c).conj() * rho.op().entry(k, l) * vecs.get(l, c)).re;
            }
        }
        p[c] = acc.max(0.0);
    }
    let pt: f64 = p.iter().sum();
    Ok((
        Distribution::new(p.iter().map(|v| v / pt).collect())?,
        Distribution::new(vals.iter().map(|v| v.max(0.0)).collect())?,
    ))
}

/// Group outcome probabilities of the reference by near-equal value, the
/// classical analogue of grouping eigenprojectors before dephasing.
fn grouped_distributions(p: &Distribution, q: &Distribution) -> (Distribution, Distribution) {
    let mut order: Vec<usize> = (0..q.len()).collect();
    order.sort_by(|&a, &b| q.probs()[b].partial_cmp(&q.probs()[a]).unwrap().then(a.cmp(&b)));
    let mut gp = Vec::new();
    let mut gq = Vec::new();
    let mut last = f64::INFINITY;
    for &i in &order {
        let qi = q.probs()[i];
        if last.is_finite() && (last - qi) <= 1e-9 * last.max(1e-300) {
            let end = gq.len() - 1;
            gq[end] += qi;
            gp[end] += p.probs()[i];
        } else {
            gq.push(qi);
            gp.push(p.probs()[i]);
        }
        last = qi;
    }
    (
        Distribution::new(gp).expect("grouped distribution"),
        Distribution::new(gq).expect("grouped distribution"),
    )
}

fn classical_rates(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
    n_max: usize,
) -> Result<Vec<(usize, f64, f64)>> {
    let (p, q) = classical_pair(rho, sigma)?;
    let mut out = Vec::new();
    for n in 1..=n_max {
        let pn = p.power(n)?;
        let qn = q.power(n)?;
        let a_n = dh_eps_classical(&pn, &qn, eps)? / n as f64;
        let (gp, gq) = grouped_distributions(&pn, &qn);
        let pinched = dh_eps_classical(&gp, &gq, eps)? / n as f64;
        out.push((n, a_n, pinched));
    }
    Ok(out)
}

fn quantum_rates(
    rho: &DensityOperator,
    sigma: &DensityOperator,
    eps: f64,
    n_max: usize,
) -> Result<Vec<(usize, f64, f64)>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        let rn = rho.tensor_power(n)?;
        let sn = sigma.tensor_power(n)?;
        let np = neyman_pearson_simple(&rn, &sn, eps)?;
        let a_n = crate::div::bits_of_beta(np.beta) / n as f64;
        let groups = crate::div::sigma_eigengroups(&sn)?;
        let mut p = Vec::with_capacity(groups.len());
        let mut q = Vec::with_capacity(groups.len());
        for (_, proj) in &groups {
            p.push(proj.hs_inner(rn.op()).max(0.0));
            q.push(proj.hs_inner(sn.op()).max(0.0));
        }
        let pt: f64 = p.iter().sum();
        let qt: f64 = q.iter().sum();
        let gp = Distribution::new(p.iter().map(|v| v / pt).collect())?;
        let gq = Distribution::new(q.iter().map(|v| v / qt).collect())?;
        let pinched = dh_eps_classical(&gp, &gq, eps)? / n as f64;
        out.push((n, a_n, pinched));
    }
    Ok(out)
}

/// Data processing for both divergences under discarding a subsystem and
/// under mixing toward a fixed state.
pub fn check_dpi_dh(trials: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = rng_from_seed(seed);
    let eps = 0.15;
    let tau = DensityOperator::maximally_mixed(vec![2, 2]);
    let mut worst = f64::INFINITY;
    let mut instances = 0usize;
    let mut worst_detail = String::new();
    for t in 0..trials {
        let rho = random_density(&[2, 2], &mut rng)?;
        let sigma = random_density(&[2, 2], &mut rng)?;
        let before_dh = crate::div::bits_of_beta(neyman_pearson_simple(&rho, &sigma, eps)?.beta);
        let before_d = umegaki(&rho, &sigma)?;
        let processed: Vec<(&str, DensityOperator, DensityOperator)> = vec![
            (
                "partial trace",
                rho.partial_trace(&[0])?,
                sigma.partial_trace(&[0])?,
            ),
            (
                "depolarise 0.3",
                rho.depolarise(0.3, &tau)?,
                sigma.depolarise(0.3, &tau)?,
            ),
        ];
        for (name, r2, s2) in processed {
            let after_dh = crate::div::bits_of_beta(neyman_pearson_simple(&r2, &s2, eps)?.beta);
            let after_d = umegaki(&r2, &s2)?;
            let slack = (before_dh - after_dh).min(before_d - after_d);
            instances += 1;
            if slack < worst {
                worst = slack;
                worst_detail = format!("trial {t}, channel {name}");
            }
        }
    }
    Ok(CheckReport::from_slack(
        "dpi-divergences",
        "discarding a subsystem or mixing toward a fixed state cannot increase either divergence",
        instances,
        worst,
        1e-6,
        seed,
        worst_detail,
    ))
}

// ---------------------------------------------------------------------------
// Trait wrappers and registry.
// ---------------------------------------------------------------------------

macro_rules! check_impl {
    ($name:ident, $id:literal, $anchor:literal, |$cfg:ident, $seed:ident| $body:expr) => {
        struct $name;
        impl TheoremCheck for $name {
            fn id(&self) -> &'static str {
                $id
            }
            fn anchor(&self) -> &'static str {
                $anchor
            }
            fn run(&self, $cfg: &CheckConfig, $seed: u64) -> Result<CheckReport> {
                $body
            }
        }
    };
}

check_impl!(
    PinchingCheck,
    "pinching-bounds",
    "dephasing in the reference eigenbasis loses at most 2 log2(n+1) bits of relative entropy",
    |cfg, seed| check_pinching(cfg.max_n.min(4), cfg.trials, seed)
);
check_impl!(
    AfwCheck,
    "afw-chain",
    "relative entropy to the null family is continuous in the attacker state",
    |cfg, seed| check_afw_chain(cfg.trials, cfg.max_n, seed)
);
check_impl!(
    TypeDominationCheck,
    "type-domination",
    "empirical-mixture powers dominate type-class averages up to an inverse polynomial factor",
    |cfg, seed| check_type_domination(3, cfg.max_n, seed)
);
check_impl!(
    MeasureDominationCheck,
    "measure-domination",
    "the truncated inverse-square mixture of measures dominates each weighted component",
    |cfg, seed| check_measure_domination(8.min(4 + cfg.trials), cfg.max_n, seed)
);
check_impl!(
    SandwichCheck,
    "sandwich-av-iid",
    "arbitrarily-varying vs i.i.d. regularised relative entropy chain",
    |cfg, seed| check_sandwich(cfg.max_n, seed)
);
check_impl!(
    ConvexifyCheck,
    "convexify-invariance",
    "convexifying either hypothesis list leaves the error bracket overlapping",
    |cfg, seed| check_convexify_invariance(cfg.trials, seed)
);
check_impl!(
    SymmetrizationCheck,
    "symmetrization-contracts",
    "permutation averaging cannot increase relative entropy",
    |cfg, seed| check_symmetrization(cfg.trials, cfg.max_n, seed)
);
check_impl!(
    SteinCheck,
    "stein-trend",
    "per-copy testing rates trend toward the relative entropy with certified floors and caps",
    |cfg, seed| {
        let mut rng = rng_from_seed(seed);
        let rho = random_density(&[2], &mut rng)?;
        let sigma = random_density(&[2], &mut rng)?;
        check_stein_convergence(&rho, &sigma, 0.3, cfg.max_n.min(5).max(3), seed)
    }
);
check_impl!(
    DpiCheck,
    "dpi-divergences",
    "data processing cannot increase either divergence",
    |cfg, seed| check_dpi_dh(cfg.trials, seed)
);
check_impl!(
    InjectedViolation,
    "injected-violation",
    "deliberately broken fixture: asserts a strictly false sharpening of the self-test identity",
    |_cfg, seed| {
        // beta(rho, rho, eps) = 1 - eps; claiming beta <= 1 - 2 eps must fail.
        let eps = 0.2;
        let rho = DensityOperator::maximally_mixed(vec![2]);
        let np = neyman_pearson_simple(&rho, &rho, eps)?;
        let slack = (1.0 - 2.0 * eps) - np.beta;
        Ok(CheckReport::from_slack(
            "injected-violation",
            "deliberately broken fixture: asserts a strictly false sharpening of the self-test identity",
            1,
            slack,
            1e-6,
            seed,
            "expected to fail; validates the harness fail path",
        ))
    }
);

/// All registered checks, ordered by id.
pub fn registry(cfg: &CheckConfig) -> Vec<Box<dyn TheoremCheck>> {
    let mut checks: Vec<Box<dyn TheoremCheck>> = vec![
        Box::new(PinchingCheck),
        Box::new(AfwCheck),
        Box::new(TypeDominationCheck),
        Box::new(MeasureDominationCheck),
        Box::new(SandwichCheck),
        Box::new(ConvexifyCheck),
        Box::new(SymmetrizationCheck),
        Box::new(SteinCheck),
        Box::new(DpiCheck),
    ];
    if cfg.include_injected {
        checks.push(Box::new(InjectedViolation));
    }
    checks.sort_by_key(|c| c.id());
    checks
}

/// Run every registered check with a per-check seed derived from the suite
/// seed and the check id. Deterministic given (config, seed).
pub fn run_all(cfg: &CheckConfig, seed: u64) -> Result<Vec<CheckReport>> {
    registry(cfg)
        .iter()
        .map(|c| c.run(cfg, derive_seed(seed, c.id())))
        .collect()
}
