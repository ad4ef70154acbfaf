//! The Duhamel terms. Each Fourier mode of `∫₀ᵗ e^{−(t−s)|ξ|^{2α}} F(s) ds` is integrated
//! exactly against the piecewise-linear interpolant of `F` between time nodes, so the
//! recursion costs one step per node and stays stable for stiff modes.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::grid::{Grid, TimeGrid, VectorField};

use super::field::{Lattice, VelocityField};

/// `(e^{−z}, φ₀(z), φ₁(z))` with `φ₀ = ∫₀¹ e^{−zu} u du` and `φ₁ = ∫₀¹ e^{−zu}(1−u) du`,
/// the weights on the left and right node values.
pub fn etd_weights(z: f64) -> (f64, f64, f64) {
    if z < 0.1 {
        // Alternating series; ten terms leave an error far below rounding.
        let (mut a, mut b) = (0.0, 0.0);
        let mut fact = 2.0;
        let mut pow = 1.0;
        for k in 2..12 {
            if k > 2 {
                fact *= k as f64;
                pow *= -z;
            }
            a += (k - 1) as f64 * pow / fact;
            b += pow / fact;
        }
        ((-z).exp(), a, b)
    } else {
        let e = (-z).exp();
        let z2 = z * z;
        (e, (1.0 - e * (1.0 + z)) / z2, (z - 1.0 + e) / z2)
    }
}

/// Per-mode coefficients of one step of length `dt`.
fn step_table(rates: &[f64], dt: f64) -> Vec<(f64, f64, f64)> {
    rates.iter().map(|&l| etd_weights(l * dt)).collect()
}

/// `Y_j = E Y_{j−1} + sign·dt (φ₀ F_{j−1} + φ₁ F_j)` from `Y_0 = 0`, per component and mode.
fn accumulate(
    forcing: &[Vec<Vec<Complex64>>],
    table: &[(f64, f64, f64)],
    dt: f64,
    sign: f64,
) -> Vec<Vec<Vec<Complex64>>> {
    let steps = forcing.len();
    let comps = forcing[0].len();
    let modes = table.len();
    let mut out = vec![vec![vec![Complex64::new(0.0, 0.0); modes]; comps]; steps];
    for j in 1..steps {
        let (prev, next) = out.split_at_mut(j);
        let prev = &prev[j - 1];
        next[0].par_iter_mut().enumerate().for_each(|(c, slot)| {
            for (i, &(e, w0, w1)) in table.iter().enumerate() {
                slot[i] = prev[c][i] * e + (forcing[j - 1][c][i] * w0 + forcing[j][c][i] * w1) * (sign * dt);
            }
        });
    }
    out
}

fn to_field(lat: &Lattice, grid: &Grid, times: &TimeGrid, hats: Vec<Vec<Vec<Complex64>>>) -> Result<VelocityField> {
    let slices = hats.into_iter().map(|h| lat.inverse(grid, h)).collect::<Result<Vec<_>>>()?;
    VelocityField::new(times.clone(), slices)
}

/// External force, divergence-free.
#[derive(Clone, Debug, PartialEq)]
pub enum Forcing {
    Zero,
    Steady(VectorField),
    /// `M + 1` slices starting at `t = 0`.
    Sampled(VelocityField),
}

/// `e₀(t) = e^{−t(−Δ)^α} u₀ + ∫₀ᵗ e^{−(t−s)(−Δ)^α} f(s) ds` at every node.
pub fn e0_term(u0: &VectorField, forcing: &Forcing, alpha: f64, times: &TimeGrid) -> Result<VelocityField> {
    check_alpha(alpha)?;
    let grid = u0.grid();
    let lat = Lattice::new(grid)?;
    let rates = lat.rates(alpha);
    let u0_hat = lat.forward(u0);
    let m = times.steps();
    let mut hats: Vec<Vec<Vec<Complex64>>> = (0..=m)
        .into_par_iter()
        .map(|j| {
            let t = times.time(j);
            u0_hat.iter().map(|c| c.iter().zip(&rates).map(|(v, &l)| v * (-t * l).exp()).collect()).collect()
        })
        .collect();
    let f_hats: Option<Vec<Vec<Vec<Complex64>>>> = match forcing {
        Forcing::Zero => None,
        Forcing::Steady(f) => {
            grid.ensure_same(f.grid())?;
            let h = lat.forward(f);
            Some(vec![h; m + 1])
        }
        Forcing::Sampled(f) => {
            grid.ensure_same(f.grid())?;
            if f.times() != times {
                return Err(Error::GridMismatch("forcing lives on another time grid".into()));
            }
            Some(f.slices().par_iter().map(|s| lat.forward(s)).collect())
        }
    };
    if let Some(f) = f_hats {
        let dt = times.step();
        let acc = accumulate(&f, &step_table(&rates, dt), dt, 1.0);
        for (h, a) in hats.iter_mut().zip(acc) {
            for (hc, ac) in h.iter_mut().zip(a) {
                for (x, y) in hc.iter_mut().zip(ac) {
                    *x += y;
                }
            }
        }
    }
    to_field(&lat, grid, times, hats)
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.5 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("alpha must lie in (1/2, 1], got {alpha}")))
    }
}

/// `P ∇·(u ⊗ v)` in Fourier space at one slice: component `j` is `Σ_{h,k} iξ_k (δ_{jh} − ξ_jξ_h/|ξ|²) (u_h v_k)^`.
fn flux_hat(lat: &Lattice, u: &VectorField, v: &VectorField) -> Vec<Vec<Complex64>> {
    let n = u.len();
    let len = lat.xi.len();
    let mut w = vec![vec![Complex64::new(0.0, 0.0); len]; n];
    for (h, wh) in w.iter_mut().enumerate() {
        for k in 0..n {
            let prod: Vec<f64> = u.component(h).iter().zip(v.component(k)).map(|(a, b)| a * b).collect();
            let hat = lat.sp.forward_real(&prod);
            for i in 0..len {
                wh[i] += hat[i] * Complex64::new(0.0, lat.xi[i][k]);
            }
        }
    }
    lat.project(&mut w);
    w
}

/// `B(u, v)(t) = −∫₀ᵗ e^{−(t−s)(−Δ)^α} P ∇·(u ⊗ v)(s) ds`, so the mild equation reads `u = e₀ + B(u, u)`.
pub fn bilinear_b(u: &VelocityField, v: &VelocityField, alpha: f64) -> Result<VelocityField> {
    check_alpha(alpha)?;
    if u.times() != v.times() {
        return Err(Error::GridMismatch("time grids differ".into()));
    }
    let grid = u.grid();
    grid.ensure_same(v.grid())?;
    let lat = Lattice::new(grid)?;
    let flux: Vec<Vec<Vec<Complex64>>> =
        u.slices().par_iter().zip(v.slices()).map(|(a, b)| flux_hat(&lat, a, b)).collect();
    let dt = u.times().step();
    let acc = accumulate(&flux, &step_table(&lat.rates(alpha), dt), dt, -1.0);
    to_field(&lat, grid, u.times(), acc)
}
