//! Acceptance gate: twelve end-to-end criteria, one printed pass/fail line
//! each. Run with `cargo test --test acceptance -- --nocapture` to see the
//! lines as they complete.

use std::process::Command;

use steinlab::checks::{
    check_afw_chain, check_convexify_invariance, check_measure_domination, check_pinching,
    check_sandwich, check_type_domination,
};
use steinlab::classical::{binary_entropy_bits, dh_eps_classical, Distribution};
use steinlab::div::neyman_pearson_simple;
use steinlab::exponent::basel_weights;
use steinlab::family::{axiom_audit, separable_inner, stabiliser_states, StateFamily};
use steinlab::random::{random_density, random_probs, rng_from_seed};
use steinlab::report::Verdict;
use steinlab::DensityOperator;

fn report(num: u32, name: &str, ok: bool) {
    println!("criterion {num:>2} ({name}): {}", if ok { "pass" } else { "FAIL" });
    assert!(ok, "criterion {num} ({name}) failed");
}

/// 1. Self-testing closed form: beta(rho, rho, eps) = 1 - eps.
#[test]
fn criterion_01_self_test_closed_form() {
    let mut rng = rng_from_seed(101);
    let mut ok = true;
    let mut count = 0usize;
    'outer: for d in [2usize, 3, 4] {
        for _ in 0..7 {
            let rho = random_density(&[d], &mut rng).unwrap();
            for eps in [0.1, 0.3] {
                let np = neyman_pearson_simple(&rho, &rho, eps).unwrap();
                let expected = -(1.0 - eps).log2();
                let got = -np.beta.log2();
                ok &= (got - expected).abs() < 1e-6;
            }
            count += 1;
            if count >= 20 {
                break 'outer;
            }
        }
    }
    report(1, "self-test divergence closed form", ok && count == 20);
}

/// 2. Quantum Neyman-Pearson matches the classical likelihood-ratio oracle
/// on commuting pairs within 1e-8.
#[test]
fn criterion_02_np_vs_classical_oracle() {
    let mut rng = rng_from_seed(202);
    let mut ok = true;
    for i in 0..10 {
        let d = if i % 2 == 0 { 2 } else { 3 };
        let p = random_probs(d, &mut rng);
        let q = random_probs(d, &mut rng);
        let rho = DensityOperator::from_diag(vec![d], &p).unwrap();
        let sigma = DensityOperator::from_diag(vec![d], &q).unwrap();
        for eps in [0.05, 0.25] {
            let np = neyman_pearson_simple(&rho, &sigma, eps).unwrap();
            let oracle = dh_eps_classical(
                &Distribution::new(p.clone()).unwrap(),
                &Distribution::new(q.clone()).unwrap(),
                eps,
            )
            .unwrap();
            ok &= (-np.beta.log2() - oracle).abs() < 1e-7 || {
                let beta_oracle = 2f64.powf(-oracle);
                (np.beta - beta_oracle).abs() < 1e-8
            };
        }
    }
    report(2, "Neyman-Pearson vs classical oracle", ok);
}

/// 3. Per-copy rates for P=(.5,.5) vs Q=(.25,.75) trend toward the relative
/// entropy and respect the finite-n cap.
#[test]
fn criterion_03_stein_trend_classical() {
    let p = Distribution::new(vec![0.5, 0.5]).unwrap();
    let q = Distribution::new(vec![0.25, 0.75]).unwrap();
    let d = 0.5 * (2.0f64).log2() + 0.5 * (2.0f64 / 3.0).log2();
    assert!((d - 0.2075187496).abs() < 1e-9);
    let eps = 0.2;
    let mut rates = Vec::new();
    let mut ok = true;
    for n in 1..=14usize {
        let a_n = dh_eps_classical(&p.power(n).unwrap(), &q.power(n).unwrap(), eps).unwrap()
            / n as f64;
        let cap = (d + binary_entropy_bits(eps) / n as f64) / (1.0 - eps);
        ok &= a_n <= cap + 1e-9;
        rates.push(a_n);
    }
    ok &= (rates[13] - d).abs() < (rates[1] - d).abs();
    report(3, "classical Stein trend to 0.20752 bits", ok);
}

/// 4. Pinching bounds with constant 2 log2(n+1) on 50 instances per n.
#[test]
fn criterion_04_pinching_bounds() {
    let mut ok = true;
    for n in 1..=4usize {
        let r = check_pinching(n, 50, 404 + n as u64).unwrap();
        ok &= r.passed() && r.worst_slack >= -1e-6;
    }
    report(4, "pinching bounds, 50 instances per n", ok);
}

/// 5. Type-class domination PSD check for 3-letter bases up to n = 4.
#[test]
fn criterion_05_type_domination() {
    let r = check_type_domination(3, 4, 505).unwrap();
    report(5, "type-class operator domination", r.passed() && r.worst_slack >= -1e-9);
}

/// 6. The av/iid sandwich with correction (1 + 2 log2(n+1))/n at n <= 4.
#[test]
fn criterion_06_av_iid_sandwich() {
    let r = check_sandwich(4, 606).unwrap();
    report(6, "arbitrarily-varying vs i.i.d. sandwich", r.passed() && r.worst_slack >= -1e-6);
}

/// 7. Continuity chain on 20 perturbation pairs with tau = I/2, n <= 3.
#[test]
fn criterion_07_afw_chain() {
    let r = check_afw_chain(20, 3, 707).unwrap();
    report(7, "attacker-perturbation continuity chain", r.passed() && r.worst_slack >= -1e-5);
}

/// 8. Inverse-square measure mixing: domination PSD, renormalization, and
/// the 6/pi^2 leading weight.
#[test]
fn criterion_08_basel_mixture() {
    let dom = check_measure_domination(8, 4, 808).unwrap();
    let raw = basel_weights(8);
    let mass: f64 = raw.iter().sum();
    let normalized_sum: f64 = raw.iter().map(|w| w / mass).sum();
    let first = raw[0];
    let ok = dom.passed()
        && (normalized_sum - 1.0).abs() < 1e-12
        && (first - 6.0 / (std::f64::consts::PI * std::f64::consts::PI)).abs() < 1e-12;
    report(8, "inverse-square measure mixture", ok);
}

/// 9. Stabiliser enumeration counts and the single-qubit barycentre.
#[test]
fn criterion_09_stabiliser_facts() {
    let one = stabiliser_states(1).unwrap();
    let two = stabiliser_states(2).unwrap();
    let bary = DensityOperator::barycentre(&one).unwrap();
    let half = DensityOperator::maximally_mixed(vec![2]);
    let dev = bary.op().sub(half.op()).unwrap().op_norm().unwrap();
    report(9, "stabiliser counts and 1-design barycentre", one.len() == 6 && two.len() == 60 && dev < 1e-12);
}

/// 10. Convexification leaves the composite error bracket overlapping.
#[test]
fn criterion_10_convexify_invariance() {
    let r = check_convexify_invariance(10, 1010).unwrap();
    report(10, "convexification invariance of the error bracket", r.passed() && r.worst_slack >= -1e-5);
}

/// 11. Axiom audit: stabiliser hulls satisfy the first three structural
/// axioms exactly; the sampled separable hull satisfies closure axioms.
#[test]
fn criterion_11_axiom_audit() {
    let mut ok = true;
    // Graded stabiliser family: level n is the stabiliser hull on n qubits,
    // audited through the two-qubit level.
    let gen = |n: usize| StateFamily::stabiliser_hull(n);
    let tau = DensityOperator::maximally_mixed(vec![2]);
    let audit = axiom_audit(&gen, Some(&tau), 0.5 - 1e-12, 2, 3, 1111).unwrap();
    for axiom in ["Q.I", "Q.II", "Q.III"] {
        let v = audit.axioms.iter().find(|a| a.axiom == axiom).unwrap();
        if v.verdict != Verdict::Pass {
            eprintln!("stabiliser {axiom} failed (replay seed 1111): {}", v.detail);
            ok = false;
        }
    }
    let gen = move |n: usize| separable_inner(2, 2, 6, 2222)?.at_n(n);
    let audit = axiom_audit(&gen, None, 1e-6, 2, 3, 2222).unwrap();
    for axiom in ["Q.II", "Q.III"] {
        let v = audit.axioms.iter().find(|a| a.axiom == axiom).unwrap();
        if v.verdict != Verdict::Pass {
            eprintln!("separable {axiom} failed (replay seed 2222): {}", v.detail);
            ok = false;
        }
    }
    report(11, "structural axiom audit", ok);
}

/// 12. The check suite is byte-deterministic under a fixed seed.
#[test]
fn criterion_12_check_determinism() {
    let bin = env!("CARGO_BIN_EXE_steinlab");
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(bin)
            .args(["check", "--seed", "42", "--out"])
            .arg(&out)
            .output()
            .unwrap();
        assert!(status.status.success(), "check run failed: {}", String::from_utf8_lossy(&status.stderr));
        (std::fs::read(&out).unwrap(), status.stdout)
    };
    let (r1, s1) = run("report1.json");
    let (r2, s2) = run("report2.json");
    report(12, "check-suite determinism", r1 == r2 && s1 == s2 && !r1.is_empty());
}
