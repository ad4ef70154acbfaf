//! Modulars, Luxemburg norms, mixed space-time norms and the classical inequality checks.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::exponents::{combine, Exponent, ExponentField, Relation};
use crate::grid::{Grid, GridFunction, SpaceTimeField};

pub const DEFAULT_TOL: f64 = 1e-10;

/// `ω_p(t)`: `t^p` for finite `p`; for `p = ∞`, `0` when `t ≤ 1` and `∞` otherwise.
pub fn omega(p: Exponent, t: f64) -> f64 {
    match p {
        Exponent::Finite(q) => t.powf(q),
        Exponent::Infinite => {
            if t <= 1.0 {
                0.0
            } else {
                f64::INFINITY
            }
        }
    }
}

/// `Σ ω_{p_i}(|f_i|/λ) · weight`.
pub fn modular_raw(values: &[f64], exps: &[Exponent], weight: f64, lambda: f64) -> f64 {
    let mut sum = 0.0;
    for (v, p) in values.iter().zip(exps) {
        let term = omega(*p, v.abs() / lambda);
        if term == f64::INFINITY {
            return f64::INFINITY;
        }
        sum += term;
    }
    sum * weight
}

/// `ϱ(f/λ) > 1`, stopping as soon as the partial sum exceeds 1.
fn modular_exceeds_one(values: &[f64], exps: &[Exponent], weight: f64, lambda: f64) -> bool {
    let budget = 1.0 / weight;
    let mut sum = 0.0;
    for (v, p) in values.iter().zip(exps) {
        sum += omega(*p, v.abs() / lambda);
        if sum > budget {
            return true;
        }
    }
    false
}

/// Luxemburg norm of weighted samples by bracketing and bisection.
///
/// The returned value lies on the feasible side (`ϱ(f/λ) ≤ 1`) and is within
/// `tol·λ` of the infimum.
pub fn luxemburg_raw(values: &[f64], exps: &[Exponent], weight: f64, tol: f64) -> Result<f64> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    if values.len() != exps.len() {
        return Err(Error::GridMismatch("values and exponents differ in length".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("norm input".into()));
    }
    let sup = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Ok(0.0);
    }
    let exceeds = |lambda: f64| modular_exceeds_one(values, exps, weight, lambda);
    let volume = weight * values.len() as f64;
    let mut hi = (sup * volume).max(1.0);
    while exceeds(hi) {
        hi *= 2.0;
    }
    let mut lo = tol.min(hi / 2.0);
    while !exceeds(lo) {
        if lo < f64::MIN_POSITIVE * 1e10 {
            return Ok(lo);
        }
        hi = lo;
        lo /= 2.0;
    }
    // geometric steps until the bracket is narrow, then plain bisection
    while hi / lo > 2.0 {
        let mid = (lo * hi).sqrt();
        if exceeds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if exceeds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

fn check(f: &GridFunction, p: &ExponentField) -> Result<()> {
    p.ensure_grid(f.grid())
}

pub fn modular(f: &GridFunction, p: &ExponentField) -> Result<f64> {
    check(f, p)?;
    Ok(modular_raw(f.values(), p.samples(), f.grid().cell_volume(), 1.0))
}

pub fn luxemburg_norm(f: &GridFunction, p: &ExponentField, tol: f64) -> Result<f64> {
    check(f, p)?;
    luxemburg_raw(f.values(), p.samples(), f.grid().cell_volume(), tol)
}

/// `(‖f‖ ≤ 1, ϱ(f) ≤ 1)`
pub fn unit_ball_check(f: &GridFunction, p: &ExponentField, tol: f64) -> Result<(bool, bool)> {
    let norm = luxemburg_norm(f, p, tol)?;
    Ok((norm <= 1.0, modular(f, p)? <= 1.0))
}

/// `max(‖f‖_A, ‖f‖_B)`
pub fn intersection_norm(f: &GridFunction, a: &ExponentField, b: &ExponentField, tol: f64) -> Result<f64> {
    Ok(luxemburg_norm(f, a, tol)?.max(luxemburg_norm(f, b, tol)?))
}

/// Closed-form discrete `L^p` norm for a constant exponent.
pub fn constant_lp_norm(values: &[f64], p: Exponent, weight: f64) -> f64 {
    match p {
        Exponent::Infinite => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        Exponent::Finite(q) => (values.iter().map(|v| v.abs().powf(q)).sum::<f64>() * weight).powf(1.0 / q),
    }
}

/// Spatial norm of every slice (Euclidean magnitude per node), in time order.
pub fn slice_norms(u: &SpaceTimeField, q_x: &ExponentField, tol: f64) -> Result<Vec<f64>> {
    q_x.ensure_grid(u.grid())?;
    u.slices().par_iter().map(|s| luxemburg_norm(&s.magnitude(), q_x, tol)).collect()
}

/// `‖ ‖u(t)‖_{q(·)} ‖_{p(t)}`
pub fn mixed_norm(u: &SpaceTimeField, p_t: &ExponentField, q_x: &ExponentField, tol: f64) -> Result<f64> {
    match p_t.domain() {
        crate::exponents::Domain::Time(t) if t == u.times() => {}
        _ => return Err(Error::GridMismatch("temporal exponent must live on the field's time grid".into())),
    }
    let inner = slice_norms(u, q_x, tol)?;
    luxemburg_raw(&inner, p_t.samples(), u.times().step(), tol)
}

/// Both sides of an inequality and their quotient (absent when the denominator vanishes).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Ratio {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: Option<f64>,
}

impl Ratio {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 { Some(lhs / rhs) } else { None };
        Self { lhs, rhs, ratio }
    }
}

/// `‖fg‖_s / (‖f‖_p ‖g‖_q)` with `1/s = 1/p + 1/q`.
pub fn holder_check(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentField,
    q: &ExponentField,
    tol: f64,
) -> Result<Ratio> {
    let s = combine(Relation::HolderSum, &[p, q])?;
    let fg = f.zip_with(g, |a, b| a * b)?;
    let lhs = luxemburg_norm(&fg, &s, tol)?;
    let rhs = luxemburg_norm(f, p, tol)? * luxemburg_norm(g, q, tol)?;
    Ok(Ratio::new(lhs, rhs))
}

/// `‖Σ_y F(·,y) w_y‖_p / Σ_y ‖F(·,y)‖_p w_y`, with `F` given as its `y`-slices.
pub fn minkowski_integral_check(slices: &[GridFunction], y_weight: f64, p: &ExponentField, tol: f64) -> Result<Ratio> {
    let first = slices.first().ok_or_else(|| invalid("no y-slices"))?;
    let mut acc = vec![0.0; first.values().len()];
    let mut rhs = 0.0;
    for s in slices {
        s.grid().ensure_same(first.grid())?;
        for (a, v) in acc.iter_mut().zip(s.values()) {
            *a += v * y_weight;
        }
        rhs += luxemburg_norm(s, p, tol)? * y_weight;
    }
    let sum = GridFunction::new(first.grid().clone(), acc)?;
    Ok(Ratio::new(luxemburg_norm(&sum, p, tol)?, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneInLs {
    /// `∞` when growth with the box is detected.
    pub norm: f64,
    /// Norms on boxes of half-width `L`, `2L`, `4L`.
    pub box_norms: [f64; 3],
    pub stabilized: bool,
    pub divergent: bool,
}

/// `‖1‖_{L^{s(·)}}` on the box of `s`, compared against boxes twice and four times as large.
///
/// Stabilised when the last relative increment is below `1e-6`; divergent when the
/// increments do not shrink (the pure-volume behaviour of a constant exponent).
pub fn one_in_ls(s: &ExponentField, tol: f64) -> Result<OneInLs> {
    let grid = s.grid().ok_or_else(|| invalid("1 ∈ L^s needs a spatial exponent"))?.clone();
    let norm_on = |g: &Grid| -> Result<f64> {
        let field = s.rebuild_on(g)?;
        luxemburg_norm(&GridFunction::constant(g, 1.0), &field, tol)
    };
    let n1 = norm_on(&grid)?;
    let n2 = norm_on(&grid.enlarged(2))?;
    let n4 = norm_on(&grid.enlarged(4))?;
    let d1 = (n2 - n1) / n1;
    let d2 = (n4 - n2) / n2;
    let stabilized = d2.abs() <= 1e-6;
    let divergent = !stabilized && d2 >= 0.5 * d1 && d2 > 0.0;
    Ok(OneInLs { norm: if divergent { f64::INFINITY } else { n4 }, box_norms: [n1, n2, n4], stabilized, divergent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::ExponentFamily;

    fn line(n: usize, l: f64) -> Grid {
        Grid::line(n, l).unwrap()
    }

    #[test]
    fn modular_of_one_on_unit_box() {
        let g = line(64, 0.5);
        let f = GridFunction::constant(&g, 1.0);
        let p = ExponentField::constant(2.0, &g).unwrap();
        assert!((modular(&f, &p).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn infinite_region_below_one_contributes_nothing() {
        let g = line(16, 1.0);
        let p = ExponentField::build(&ExponentFamily::infinite(), &g).unwrap();
        let f = GridFunction::constant(&g, 0.5);
        assert_eq!(modular(&f, &p).unwrap(), 0.0);
        let f = GridFunction::constant(&g, 1.5);
        assert_eq!(modular(&f, &p).unwrap(), f64::INFINITY);
    }

    #[test]
    fn indicator_norm() {
        let g = line(64, 8.0);
        let f = GridFunction::from_fn(&g, |x| if (0.0..4.0).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        let p = ExponentField::constant(2.0, &g).unwrap();
        let n = luxemburg_norm(&f, &p, 1e-12).unwrap();
        assert!((n - 2.0).abs() < 1e-10, "{n}");
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let g = line(8, 1.0);
        let p = ExponentField::constant(3.0, &g).unwrap();
        assert_eq!(luxemburg_norm(&GridFunction::zeros(&g), &p, 1e-10).unwrap(), 0.0);
    }

    #[test]
    fn sup_norm_for_infinite_exponent() {
        let g = line(32, 1.0);
        let f = GridFunction::from_fn(&g, |x| (3.0 * x[0]).sin() * 2.5).unwrap();
        let p = ExponentField::build(&ExponentFamily::infinite(), &g).unwrap();
        let n = luxemburg_norm(&f, &p, 1e-12).unwrap();
        assert!((n - f.sup_abs()).abs() <= 1e-11 * n);
    }

    #[test]
    fn intersection_of_indicators() {
        let g = line(128, 8.0);
        let one = ExponentField::constant(1.0, &g).unwrap();
        let two = ExponentField::constant(2.0, &g).unwrap();
        let chi =
            |b: f64| GridFunction::from_fn(&g, move |x| if (0.0..b).contains(&x[0]) { 1.0 } else { 0.0 }).unwrap();
        assert!((intersection_norm(&chi(1.0), &one, &two, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        assert!((intersection_norm(&chi(4.0), &one, &two, 1e-12).unwrap() - 4.0).abs() < 1e-10);
    }
}
