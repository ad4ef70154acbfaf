use proptest::prelude::*;

use varlp::exponents::Wave;
use varlp::norms::{luxemburg_norm, modular, DEFAULT_TOL};
use varlp::{Exponent, ExponentFamily, ExponentField, Grid, GridFunction};

fn grid() -> Grid {
    Grid::line(129, 8.0).unwrap()
}

fn exponent(kind: u8, a: f64, b: f64, g: &Grid) -> ExponentField {
    let fam = match kind % 4 {
        0 => ExponentFamily::constant(a),
        1 => ExponentFamily::ExponentialApproach { limit: a + b, depth: b, rate: 1.0 },
        2 => ExponentFamily::SinusoidalBounded { base: a, amplitude: b, frequency: 1.3, shape: Wave::SinSquared },
        _ => ExponentFamily::Piecewise { inner: a, radius: 2.0, outer: Exponent::Finite(a + b) },
    };
    ExponentField::build(&fam, g).unwrap()
}

fn function(g: &Grid, coeffs: &[f64]) -> GridFunction {
    GridFunction::from_fn(g, |x| {
        coeffs.iter().enumerate().map(|(k, c)| c * (-(x[0] - k as f64 + 2.0).powi(2)).exp()).sum()
    })
    .unwrap()
}

fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0..3.0f64, 5).prop_filter("nonzero", |v| v.iter().any(|c| c.abs() > 0.1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous(kind in 0u8..4, a in 1.0..4.0f64, b in 0.0..3.0f64, c in coeffs(), s in -50.0..50.0f64) {
        let g = grid();
        let p = exponent(kind, a, b, &g);
        let f = function(&g, &c);
        let n = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
        let ns = luxemburg_norm(&f.scaled(s), &p, DEFAULT_TOL).unwrap();
        prop_assert!((ns - s.abs() * n).abs() <= 1e-8 * (1.0 + s.abs() * n));
    }

    #[test]
    fn triangle_inequality(kind in 0u8..4, a in 1.0..4.0f64, b in 0.0..3.0f64, c1 in coeffs(), c2 in coeffs()) {
        let g = grid();
        let p = exponent(kind, a, b, &g);
        let (f, h) = (function(&g, &c1), function(&g, &c2));
        let sum = f.zip_with(&h, |x, y| x + y).unwrap();
        let lhs = luxemburg_norm(&sum, &p, DEFAULT_TOL).unwrap();
        let rhs = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap() + luxemburg_norm(&h, &p, DEFAULT_TOL).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-9));
    }

    #[test]
    fn lattice_property(kind in 0u8..4, a in 1.0..4.0f64, b in 0.0..3.0f64, c in coeffs(), shrink in 0.0..1.0f64) {
        let g = grid();
        let p = exponent(kind, a, b, &g);
        let f = function(&g, &c);
        let smaller = GridFunction::from_fn(&g, |x| shrink * (0.5 + 0.5 * x[0].cos())).unwrap().zip_with(&f, |m, v| m * v).unwrap();
        let big = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
        prop_assert!(luxemburg_norm(&smaller, &p, DEFAULT_TOL).unwrap() <= big * (1.0 + 1e-9));
    }

    #[test]
    fn normalised_function_has_unit_modular(kind in 0u8..4, a in 1.0..4.0f64, b in 0.0..3.0f64, c in coeffs()) {
        let g = grid();
        let p = exponent(kind, a, b, &g);
        let f = function(&g, &c);
        let n = luxemburg_norm(&f, &p, 1e-12).unwrap();
        let rho = modular(&f.scaled(1.0 / n), &p).unwrap();
        prop_assert!((rho - 1.0).abs() < 1e-8, "rho = {}", rho);
    }

    #[test]
    fn indicator_norm_is_a_power_of_the_measure(p in 1.0..8.0f64, cells in 1usize..100) {
        let g = grid();
        let start = 10;
        let vals: Vec<f64> = (0..g.len()).map(|i| if (start..start + cells).contains(&i) { 1.0 } else { 0.0 }).collect();
        let f = GridFunction::new(g.clone(), vals).unwrap();
        let measure = cells as f64 * g.cell_volume();
        let got = luxemburg_norm(&f, &ExponentField::constant(p, &g).unwrap(), DEFAULT_TOL).unwrap();
        prop_assert!((got - measure.powf(1.0 / p)).abs() < 1e-9 * measure.powf(1.0 / p));
    }
}

#[test]
fn infinite_exponent_is_the_sup_norm() {
    let g = grid();
    let f = function(&g, &[1.0, -2.5, 0.3, 0.0, 1.1]);
    let p = ExponentField::build(&ExponentFamily::infinite(), &g).unwrap();
    let n = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
    assert!((n - f.sup_abs()).abs() < 1e-9 * f.sup_abs());
}

#[test]
fn piecewise_exponent_splits_the_modular() {
    // p = 2 on |x| <= 1 and ∞ beyond: for f = 1/2 on the whole box the modular is
    // 2(1/2λ)² while 1/2λ ≤ 1, so ‖f‖ = max(1/2, 1/√2)
    let g = Grid::line(2001, 4.0).unwrap();
    let p = ExponentField::build(&ExponentFamily::Piecewise { inner: 2.0, radius: 1.0, outer: Exponent::Infinite }, &g)
        .unwrap();
    let f = GridFunction::constant(&g, 0.5);
    let inner_measure = g.points().filter(|x| x[0].abs() <= 1.0).count() as f64 * g.cell_volume();
    let want = (0.25 * inner_measure).sqrt().max(0.5);
    let got = luxemburg_norm(&f, &p, DEFAULT_TOL).unwrap();
    assert!((got - want).abs() < 1e-9, "{got} vs {want}");
}
