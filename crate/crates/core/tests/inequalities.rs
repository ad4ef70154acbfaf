use varlp::exponents::{Exponent, ExponentFamily, ExponentField, Wave};
use varlp::inequalities::checks::{eta_halfexp_ratio, eta_profile, product_bound};
use varlp::inequalities::profiles::intersection_exponent;
use varlp::inequalities::*;
use varlp::norms::{constant_lp_norm, DEFAULT_TOL};
use varlp::spectral::LinearConvolver;
use varlp::{Error, Grid, GridFunction};

fn line(n: usize, l: f64) -> Grid {
    Grid::line(n, l).unwrap()
}

fn field(f: ExponentFamily, g: &Grid) -> ExponentField {
    ExponentField::build(&f, g).unwrap()
}

fn approach(limit: f64, depth: f64, g: &Grid) -> ExponentField {
    field(ExponentFamily::ExponentialApproach { limit, depth, rate: 1.0 }, g)
}

fn gaussian(g: &Grid, width: f64) -> GridFunction {
    GridFunction::from_fn(g, |x| (-0.5 * (x[0] / width).powi(2)).exp()).unwrap()
}

fn quick(g: Grid) -> CheckSetup {
    let mut s = CheckSetup::new(g, 5);
    s.corpus.count = 8;
    s.refine = false;
    s
}

#[test]
fn intersection_young_holds_with_constant_one() {
    let g = line(512, 20.0);
    let a =
        field(ExponentFamily::SinusoidalBounded { base: 1.0, amplitude: 1.0, frequency: 1.0, shape: Wave::AbsSin }, &g);
    let b = approach(1.0, -1.0, &g);
    let ex = IntersectionExponents::constant_r(Exponent::Finite(3.0), Exponent::Finite(3.0), 3.0, &a, &b).unwrap();
    for i in [0, 100, 300] {
        assert!((ex.c.samples()[i].value() - (3.0 - a.samples()[i].value())).abs() < 1e-12);
        assert!((ex.d.samples()[i].value() - (3.0 - b.samples()[i].value())).abs() < 1e-12);
    }
    let report = intersection_young_suite(&CheckSetup::new(g, 11), &ex).unwrap();
    assert!(report.passed(), "{:?}", report.verdict);
    assert!(report.max_ratio.unwrap() <= 1.0 + 1e-6);
    assert_eq!(report.rows.len(), 24);
}

#[test]
fn intersection_young_reduces_to_classical_young() {
    // kernel in L^1.5, data in L^1.2, output L^2
    let g = line(1024, 16.0);
    let a = ExponentField::constant(1.5, &g).unwrap();
    let b = ExponentField::constant(1.2, &g).unwrap();
    let ex = IntersectionExponents::constant_r(Exponent::Finite(6.0), Exponent::Finite(3.0), 2.0, &a, &b).unwrap();
    assert!((ex.c.p_minus().value() - 1.5).abs() < 1e-12);
    assert!((ex.d.p_plus().value() - 1.2).abs() < 1e-12);
    let k = gaussian(&g, 0.7);
    let f = GridFunction::from_fn(&g, |x| if x[0].abs() < 2.0 { 1.0 - x[0].abs() / 2.0 } else { 0.0 }).unwrap();
    let r = intersection_young(&k, &f, &ex, DEFAULT_TOL).unwrap();
    let w = g.cell_volume();
    let conv = LinearConvolver::from_grid_kernel(&k).apply(&f).unwrap();
    let classical = constant_lp_norm(conv.values(), Exponent::Finite(2.0), w)
        / (constant_lp_norm(k.values(), Exponent::Finite(1.5), w)
            * constant_lp_norm(f.values(), Exponent::Finite(1.2), w));
    assert!((r.ratio.unwrap() - classical).abs() < 1e-8 * classical);
    assert!(classical <= 1.0);
}

#[test]
fn intersection_young_rejects_bad_relations() {
    let g = line(64, 5.0);
    let a = ExponentField::constant(2.0, &g).unwrap();
    let e = IntersectionExponents::constant_r(Exponent::Finite(3.0), Exponent::Finite(3.0), 2.0, &a, &a).unwrap_err();
    assert!(matches!(e, Error::Hypothesis(_)));
    // A = 3 leaves C = 0 < 1
    let a = ExponentField::constant(3.0, &g).unwrap();
    let e = IntersectionExponents::constant_r(Exponent::Finite(3.0), Exponent::Finite(3.0), 3.0, &a, &a).unwrap_err();
    assert!(matches!(e, Error::Hypothesis(_)));
}

#[test]
fn intersection_young_with_variable_output() {
    let g = line(512, 20.0);
    let r = field(
        ExponentFamily::SinusoidalBounded { base: 3.0, amplitude: 1.0, frequency: 1.0, shape: Wave::SinSquared },
        &g,
    );
    let a = ExponentField::constant(1.0, &g).unwrap();
    let b = approach(1.0, -0.5, &g);
    let ex = IntersectionExponents::variable_r(2.0, &r, &a, &b).unwrap();
    let report = intersection_young_suite(&CheckSetup::new(g, 2), &ex).unwrap();
    assert!(report.passed());
    assert!(report.max_ratio.unwrap() <= 1.0 + 1e-6);
}

#[test]
fn zero_data_gives_zero_on_both_sides() {
    let g = line(128, 10.0);
    let a = ExponentField::constant(1.5, &g).unwrap();
    let b = ExponentField::constant(1.2, &g).unwrap();
    let ex = IntersectionExponents::constant_r(Exponent::Finite(6.0), Exponent::Finite(3.0), 2.0, &a, &b).unwrap();
    let r = intersection_young(&gaussian(&g, 1.0), &GridFunction::zeros(&g), &ex, DEFAULT_TOL).unwrap();
    assert_eq!((r.lhs, r.rhs, r.ratio), (0.0, 0.0, None));
}

#[test]
fn young_constant_r_constant_case_matches_closed_form() {
    let g = line(1024, 16.0);
    let p = ExponentField::constant(1.5, &g).unwrap();
    let r = 3.0;
    // 1/q = 1 + 1/3 − 2/3
    let q = 1.5;
    let k = gaussian(&g, 0.8);
    let f = gaussian(&g, 1.3);
    let y = young_constant_r(&k, &f, &p, r, DEFAULT_TOL).unwrap();
    assert!((y.q_minus - q).abs() < 1e-12 && (y.q_plus - q).abs() < 1e-12);
    let kq = constant_lp_norm(k.values(), Exponent::Finite(q), g.cell_volume());
    let expected = 2f64.powf(2.0 - q / r) * kq;
    assert!((y.constant - expected).abs() < 1e-12 * expected);
    assert!(y.constant <= y.simplified * (1.0 + 1e-12));
    // classical Young gives lhs <= ‖k‖_q ‖f‖_p, and C exceeds ‖k‖_q
    assert!(y.ratio.ratio.unwrap() <= 1.0);
}

#[test]
fn young_constant_r_variable_exponent_is_stable() {
    let g = line(256, 16.0);
    let p = approach(2.0, -1.0, &g);
    let report = young_constant_r_suite(&CheckSetup::new(g, 4), &p, 4.0).unwrap();
    assert!(report.max_ratio.unwrap().is_finite());
    assert!((report.resolution_stability.unwrap() - 1.0).abs() < 0.15);
}

#[test]
fn young_constant_r_skips_a_zero_kernel() {
    let g = line(128, 10.0);
    let p = approach(2.0, -1.0, &g);
    let y = young_constant_r(&GridFunction::zeros(&g), &gaussian(&g, 1.0), &p, 4.0, DEFAULT_TOL).unwrap();
    assert_eq!(y.ratio.ratio, None);
}

#[test]
fn eta_halfexp_is_resolution_stable() {
    let g = line(256, 20.0);
    let p = approach(6.0, 2.0, &g);
    let report = eta_halfexp_check(&CheckSetup::new(g, 3), &p, EtaVariant::Vartheta).unwrap();
    assert!(report.max_ratio.unwrap().is_finite());
    assert!((report.resolution_stability.unwrap() - 1.0).abs() < 0.15);
    assert_eq!(report.rows.len(), 24 * 16);
    let prof = &report.profiles[0];
    assert!((prof.small - 0.35).abs() < 1e-12 && (prof.large - 19.0 / 120.0).abs() < 1e-12);
}

#[test]
fn eta_halfexp_constant_exponent_follows_the_scaling() {
    // dilating the datum with t keeps the ratio fixed when ϑ = 1/p
    let g = line(1 << 14, 400.0);
    let p = ExponentField::constant(4.0, &g).unwrap();
    let profile = eta_profile(&p, EtaVariant::Vartheta).unwrap();
    assert_eq!(profile.branches().unwrap(), [0.25, 0.25]);
    let ts = [0.5, 0.8, 1.25, 2.0, 3.0];
    let ratios: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let f = gaussian(&g, 2.0 * t);
            eta_halfexp_ratio(&f, &p, &profile, t, 2.0, 1e-10).unwrap().ratio.unwrap()
        })
        .collect();
    let fit = varlp::fit::loglog_slope(&ts, &ratios).unwrap();
    assert!(fit.slope.abs() < 0.05, "slope {}", fit.slope);
}

#[test]
fn eta_variants_check_their_hypotheses() {
    let g = line(64, 8.0);
    let p = approach(6.0, 2.0, &g);
    assert!(eta_profile(&p, EtaVariant::VarthetaInfty).is_err());
    assert!(eta_profile(&p, EtaVariant::Varphi).is_err());
    let low = approach(3.0, 1.5, &g);
    assert!(matches!(eta_profile(&low, EtaVariant::Vartheta), Err(Error::Hypothesis(_))));
    let inf = field(ExponentFamily::Piecewise { inner: 4.0, radius: 2.0, outer: Exponent::Infinite }, &g);
    assert_eq!(eta_profile(&inf, EtaVariant::VarthetaInfty).unwrap().branches().unwrap(), [0.5, 0.0]);
    let flat_start = approach(2.0, -1.0, &g);
    assert!(eta_profile(&flat_start, EtaVariant::Varphi).is_ok());
    let mut setup = quick(g.clone());
    setup.m = 1.0;
    assert!(eta_halfexp_check(&setup, &p, EtaVariant::Vartheta).is_err());
}

#[test]
fn varphi_and_infinite_limit_variants_run() {
    let g = line(256, 20.0);
    let p = approach(2.0, -1.0, &g);
    let r = eta_halfexp_check(&quick(g.clone()), &p, EtaVariant::Varphi).unwrap();
    assert!(r.max_ratio.unwrap().is_finite());
    let p = field(ExponentFamily::Piecewise { inner: 4.0, radius: 2.0, outer: Exponent::Infinite }, &g);
    let r = eta_halfexp_check(&quick(g), &p, EtaVariant::VarthetaInfty).unwrap();
    assert!(r.max_ratio.unwrap().is_finite());
}

#[test]
fn effective_exponent_of_the_intersection_theorem() {
    let v = intersection_exponent(2.0, Exponent::Finite(49.0 / 20.0), 3.5);
    assert!((v - 6.0 / 7.0).abs() < 1e-12);
    // smaller q⁺ makes the first term smaller, so 3/ν wins
    let v = intersection_exponent(2.0, Exponent::Finite(2.2), 3.5);
    assert!((v - 6.0 / 7.0).abs() < 1e-12);
}

#[test]
fn product_estimates_measure_finite_constants() {
    let g = line(256, 20.0);
    let setup = quick(g.clone());
    let p = approach(4.0, 1.0, &g);
    for v in [ProductVariant::Intersection { nu: 3.0 }, ProductVariant::L2] {
        let r = product_lemma_check(&setup, &p, v).unwrap();
        assert!(r.max_ratio.unwrap().is_finite(), "{}", r.inequality_id);
    }
    let p2 = approach(2.0, -1.0, &g);
    for v in [ProductVariant::Varphi, ProductVariant::KProfile] {
        let r = product_lemma_check(&setup, &p2, v).unwrap();
        assert!(r.max_ratio.unwrap().is_finite(), "{}", r.inequality_id);
    }
    assert!(product_bound(&p, ProductVariant::Intersection { nu: 9.0 }).is_err());
    assert!(product_bound(&p, ProductVariant::KProfile).is_err());
    assert!(product_bound(&p, ProductVariant::Varphi).is_err());
}

#[test]
fn constant_product_exponent_matches_classical_scaling() {
    let g = line(64, 8.0);
    let p = ExponentField::constant(4.0, &g).unwrap();
    let b = product_bound(&p, ProductVariant::Intersection { nu: 4.0 }).unwrap();
    // (2/p)(1 − ν/2p) = 1/4 on both branches
    assert_eq!(b.profile, [0.25, 0.25]);
    for t in [0.1, 3.0] {
        assert!((b.factor(t, 1.0) - t.powf(-0.25)).abs() < 1e-14);
    }
}

#[test]
fn four_assertion_suite() {
    let g = line(256, 20.0);
    let setup = quick(g.clone());
    let p = approach(3.0, 1.0, &g);
    let r = field(
        ExponentFamily::SinusoidalBounded { base: 3.0, amplitude: 1.0, frequency: 1.0, shape: Wave::SinSquared },
        &g,
    );
    let one = four_assertion_check(&setup, &p, &r, Assertion::KernelSup).unwrap();
    assert!(one.max_ratio.unwrap().is_finite());
    let two = four_assertion_check(&setup, &p, &r, Assertion::EtaTheta).unwrap();
    assert!(two.rows.iter().all(|row| row.case.is_some()));
    assert!(two.max_ratio.unwrap().is_finite());
    let three = four_assertion_check(&setup, &p, &r, Assertion::EtaOmega { nu: 2.5 }).unwrap();
    assert!(three.max_ratio.unwrap().is_finite());
    assert!(four_assertion_check(&setup, &p, &r, Assertion::EtaOmega { nu: 3.5 }).is_err());
    // a constant p gives s ≡ ∞
    let pc = ExponentField::constant(2.0, &g).unwrap();
    let four = four_assertion_check(&setup, &pc, &r, Assertion::KernelConjugate).unwrap();
    assert!((four.params["one_in_ls"] - 1.0).abs() < 1e-9);
    assert!(four.max_ratio.unwrap().is_finite());
}

#[test]
fn reports_are_deterministic() {
    let g = line(128, 10.0);
    let p = approach(6.0, 2.0, &g);
    let a = eta_halfexp_check(&quick(g.clone()), &p, EtaVariant::Vartheta).unwrap();
    let b = eta_halfexp_check(&quick(g), &p, EtaVariant::Vartheta).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
