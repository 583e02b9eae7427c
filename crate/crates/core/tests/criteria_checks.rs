use lipminor::criteria::{
    abrupt_check, classify_contact_set, integral_test_default, p_k_zero, regularity_test, vigon_identity, ContactClass,
    Verdict,
};
use lipminor::experiments::contact_fraction;
use lipminor::levy::{simulate_path, FnMarginal, JumpLaw, LevyModel, SimConfig};
use lipminor::numeric::quad::{integrate, Tolerance};
use lipminor::numeric::special::norm_cdf;
use lipminor::numeric::stats::Moments;

fn cp(drift: f64) -> LevyModel {
    LevyModel::compound_poisson(
        0.0,
        drift,
        1.0,
        JumpLaw::TwoPoint {
            up: 1.0,
            down: -1.0,
            p_up: 0.5,
        },
    )
}

#[test]
fn brownian_integral_against_substitution_quadrature() {
    let verdict = integral_test_default(&LevyModel::brownian(1.0, 0.0), -1.0, 1.0).unwrap();
    // t = u² turns t⁻¹ P{|B_t| <= t} dt into 2 (2Φ(u) - 1) / u du.
    let direct = integrate(|u: f64| 2.0 * (2.0 * norm_cdf(u) - 1.0) / u, 0.0, 1.0, Tolerance::new(1e-14, 1e-14))
        .unwrap()
        .value;
    assert!((direct - 1.514_463_718_175_674).abs() < 1e-12);
    assert_eq!(verdict.verdict, Verdict::Converged);
    assert!((verdict.estimate - direct).abs() <= 1e-3, "{} vs {direct}", verdict.estimate);
}

#[test]
fn constant_integrand_is_diagnosed_divergent() {
    let stub = FnMarginal(|_t: f64, a: f64, b: f64| if a < b { 0.25 } else { 0.0 });
    let v = integral_test_default(&stub, -1.0, 1.0).unwrap();
    assert_eq!(v.verdict, Verdict::Diverged);
    assert!(v.diverged);
}

#[test]
fn widening_the_interval_never_decreases_the_estimate() {
    let models = [
        LevyModel::brownian(1.0, 0.0),
        LevyModel::brownian(2.0, 0.7),
        LevyModel::symmetric_stable(0.0, 1.5, 1.0),
    ];
    for model in &models {
        let mut last = 0.0;
        for (a, b) in [(-0.25, 0.25), (-0.5, 0.5), (-1.0, 1.0), (-1.0, 2.0)] {
            let v = integral_test_default(model, a, b).unwrap();
            assert!(v.estimate >= last - 1e-9, "[{a}, {b}]: {} < {last}", v.estimate);
            last = v.estimate;
        }
    }
    // Divergence is inherited by wider intervals.
    let stub = FnMarginal(|_t: f64, a: f64, b: f64| if a <= 0.0 && b >= 0.0 { 0.5 } else { 0.0 });
    assert_eq!(integral_test_default(&stub, -0.1, 0.1).unwrap().verdict, Verdict::Diverged);
    assert_eq!(integral_test_default(&stub, -1.0, 1.0).unwrap().verdict, Verdict::Diverged);
}

#[test]
fn brownian_motion_is_abrupt_and_regular() {
    let bm = LevyModel::brownian(1.0, 0.3);
    let report = abrupt_check(&bm).unwrap();
    assert!(report.abrupt, "{:?}", report.verdicts);
    let reg = regularity_test(&bm).unwrap();
    assert_eq!(reg.regular_for_lower_half_line, Some(true));
    assert_eq!(reg.regular_for_upper_half_line, Some(true));
}

#[test]
fn vigon_identity_for_brownian_motion() {
    for (beta, a, b, lhs) in [(0.0, -1.0, 1.0, 1.316_957_896_924_816_8), (0.5, 0.0, 1.0, std::f64::consts::LN_2)] {
        let r = vigon_identity(&LevyModel::brownian(1.0, beta), 1.0, a, b).unwrap();
        assert!(r.abs_diff <= 1e-3, "beta = {beta}: {r:?}");
        assert!((r.lhs - lhs).abs() <= 1e-8, "beta = {beta}: {r:?}");
    }
}

#[test]
fn vigon_is_not_applied_to_bounded_variation() {
    assert!(vigon_identity(&cp(0.0), 1.0, -1.0, 1.0).is_err());
}

#[test]
fn p_k_zero_reference() {
    let p = p_k_zero(&cp(0.0), 0.5).unwrap();
    assert_eq!(p.class, ContactClass::PositiveLebesgue);
    assert!((p.value - 0.196_158_710_775_574).abs() < 1e-9, "{p:?}");
}

/// Mean covered fraction of `|t| <= 5` over `n` paths.
fn coverage(model: &LevyModel, alpha: f64, dt: f64, n: u64) -> Moments {
    (0..n)
        .filter_map(|i| {
            let path = simulate_path(model, &SimConfig::new(20.0, dt, 99, i)).unwrap();
            contact_fraction(&path, alpha, 5.0).unwrap()
        })
        .collect()
}

#[test]
fn classification_agrees_with_simulated_coverage() {
    // Brownian motion: measure zero, coverage vanishes as the grid refines.
    let bm = LevyModel::brownian(1.0, 0.0);
    let class = classify_contact_set(&bm, 1.0).unwrap().class;
    assert!(matches!(class, ContactClass::DiscreteContacts | ContactClass::ZeroMeasureNonDiscrete));
    let coarse = coverage(&bm, 1.0, 1e-2, 40);
    let fine = coverage(&bm, 1.0, 2.5e-3, 40);
    assert!(fine.mean < 0.7 * coarse.mean, "coarse {} fine {}", coarse.mean, fine.mean);
    assert!(fine.mean < 0.05);

    // Small drift: positive measure, coverage close to P{K = 0}.
    let small = cp(0.1);
    assert_eq!(classify_contact_set(&small, 0.5).unwrap().class, ContactClass::PositiveLebesgue);
    let p = p_k_zero(&small, 0.5).unwrap().value;
    let m = coverage(&small, 0.5, 1e-2, 400);
    assert!(m.mean > 0.05);
    assert!((m.mean - p).abs() <= 4.0 * m.std_error() + 0.01, "coverage {} vs {p}", m.mean);

    // Drift steeper than the slope, compensated by downward jumps: discrete contacts.
    let large = LevyModel::compound_poisson(0.0, 0.8, 0.6, JumpLaw::TwoPoint { up: -1.0, down: -1.0, p_up: 0.5 });
    assert_eq!(classify_contact_set(&large, 0.5).unwrap().class, ContactClass::DiscreteContacts);
    let m = coverage(&large, 0.5, 1e-2, 40);
    assert_eq!(m.mean, 0.0);
}

#[test]
fn existence_is_required() {
    assert!(classify_contact_set(&LevyModel::brownian(1.0, 2.0), 1.0).is_err());
}
