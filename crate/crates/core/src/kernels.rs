//! The mollifier `η_{t,m}`, fractional heat kernels, the Oseen symbol and the 1-D Riesz potential.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::grid::{norm2, Grid, GridFunction, Point, TimeGrid};
use crate::spectral::{LinearConvolver, Spectral};

/// Boundary mass above this is reported as aliasing.
pub const ALIASING_FLAG: f64 = 1e-8;
/// Boundary mass above this makes kernel sampling fail.
pub const ALIASING_SEVERE: f64 = 5e-2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelSpec {
    Eta {
        t: f64,
        m: f64,
    },
    Heat {
        alpha: f64,
        t: f64,
    },
    HeatDerivative {
        alpha: f64,
        t: f64,
        kappa: f64,
    },
    /// Component indices are zero-based.
    OseenComponent {
        alpha: f64,
        t: f64,
        j: usize,
        h: usize,
        k: usize,
    },
    Riesz {
        beta: f64,
    },
}

impl KernelSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            Self::Eta { t, m } => {
                pos("t", t)?;
                if !(m > dim as f64) {
                    return Err(invalid(format!("eta needs m > n for integrability (m = {m}, n = {dim})")));
                }
            }
            Self::Heat { alpha, t } => {
                pos("alpha", alpha)?;
                if !(t >= 0.0 && t.is_finite()) {
                    return Err(invalid("heat kernel needs t >= 0"));
                }
            }
            Self::HeatDerivative { alpha, t, kappa } => {
                pos("alpha", alpha)?;
                pos("t", t)?;
                pos("kappa", kappa)?;
            }
            Self::OseenComponent { alpha, t, j, h, k } => {
                pos("alpha", alpha)?;
                if !(t >= 0.0) {
                    return Err(invalid("oseen symbol needs t >= 0"));
                }
                if dim < 2 {
                    return Err(invalid("the oseen symbol needs n >= 2"));
                }
                if j >= dim || h >= dim || k >= dim {
                    return Err(invalid("oseen component index out of range"));
                }
            }
            Self::Riesz { beta } => {
                if !(beta > 0.0 && beta < dim as f64) {
                    return Err(invalid(format!("riesz order must lie in (0, n), got {beta}")));
                }
            }
        }
        Ok(())
    }
}

/// `η_{t,m}(x) = t^{-n} (1 + |x|/t)^{-m}`
pub fn eta(t: f64, m: f64, dim: usize, x: &Point) -> f64 {
    t.powi(-(dim as i32)) * (1.0 + norm2(x) / t).powf(-m)
}

pub fn sample_eta(t: f64, m: f64, grid: &Grid) -> Result<GridFunction> {
    KernelSpec::Eta { t, m }.validate(grid.dim())?;
    GridFunction::from_fn(grid, |x| eta(t, m, grid.dim(), x))
}

/// Mean of `η_{t,m}` over the cell of side `h` centred at `c`.
///
/// Exact in one dimension; in higher dimensions cells near the origin are
/// refined with tensor Gauss-Legendre points and the rest use the centre value.
pub fn eta_cell_average(t: f64, m: f64, dim: usize, h: f64, c: &Point) -> f64 {
    if dim == 1 {
        // antiderivative of t^{-1}(1+|y|/t)^{-m}, odd in y
        let big = |y: f64| y.signum() * (1.0 - (1.0 + y.abs() / t).powf(1.0 - m)) / (m - 1.0);
        return (big(c[0] + 0.5 * h) - big(c[0] - 0.5 * h)) / h;
    }
    let r = norm2(c);
    if r > 4.0 * h + 8.0 * t {
        return eta(t, m, dim, c);
    }
    let per_axis = ((4.0 * h / t).ceil() as usize).clamp(2, 24);
    let (nodes, weights) = gauss_legendre(per_axis);
    let mut total = 0.0;
    let mut idx = [0usize; 3];
    let count = per_axis.pow(dim as u32);
    for flat in 0..count {
        let mut f = flat;
        for slot in idx.iter_mut().take(dim) {
            *slot = f % per_axis;
            f /= per_axis;
        }
        let mut x = [0.0; 3];
        let mut w = 1.0;
        for axis in 0..dim {
            x[axis] = c[axis] + 0.5 * h * nodes[idx[axis]];
            w *= 0.5 * weights[idx[axis]];
        }
        total += w * eta(t, m, dim, &x);
    }
    total
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton on the Legendre recurrence).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    (x, w)
}

/// Linear convolution with the cell-averaged `η_{t,m}`.
pub fn eta_convolver(t: f64, m: f64, grid: &Grid) -> Result<LinearConvolver> {
    KernelSpec::Eta { t, m }.validate(grid.dim())?;
    let h = grid.spacing();
    let dim = grid.dim();
    Ok(LinearConvolver::new(grid, |o| {
        let c = [o[0] as f64 * h, o[1] as f64 * h, o[2] as f64 * h];
        eta_cell_average(t, m, dim, h, &c)
    }))
}

/// `e^{-t|ξ|^{2α}}` at a frequency.
pub fn heat_symbol(alpha: f64, t: f64, xi: &Point) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    (-t * norm2(xi).powf(2.0 * alpha)).exp()
}

/// The heat multiplier on the frequency lattice of `grid`, in FFT order.
pub fn heat_multiplier(alpha: f64, t: f64, grid: &Grid) -> Result<Vec<f64>> {
    KernelSpec::Heat { alpha, t }.validate(grid.dim())?;
    let sp = Spectral::new(grid)?;
    Ok((0..grid.len()).map(|i| heat_symbol(alpha, t, &sp.xi(i).0)).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSample {
    pub kernel: GridFunction,
    pub boundary_mass: f64,
    pub aliasing_flag: bool,
}

fn finish(kernel: GridFunction) -> Result<KernelSample> {
    let boundary_mass = kernel.boundary_mass();
    if boundary_mass > ALIASING_SEVERE {
        return Err(Error::Aliasing { mass: boundary_mass, threshold: ALIASING_SEVERE });
    }
    Ok(KernelSample { kernel, boundary_mass, aliasing_flag: boundary_mass > ALIASING_FLAG })
}

/// `g_{α,t}` as the inverse transform of the multiplier, normalised to unit discrete mass.
pub fn sample_heat_kernel(alpha: f64, t: f64, grid: &Grid) -> Result<KernelSample> {
    KernelSpec::Heat { alpha, t }.validate(grid.dim())?;
    if t == 0.0 {
        return Err(invalid("the heat kernel at t = 0 is a point mass"));
    }
    let sp = Spectral::new(grid)?;
    let raw = sp.kernel_of(|xi| heat_symbol(alpha, t, xi));
    let mass: f64 = raw.iter().sum::<f64>() * grid.cell_volume();
    let kernel = GridFunction::new(grid.clone(), raw.into_iter().map(|v| v / mass).collect())?;
    finish(kernel)
}

/// Kernel of `(-Δ)^{κ/2} e^{-t(-Δ)^α}`.
pub fn sample_heat_derivative_kernel(alpha: f64, t: f64, kappa: f64, grid: &Grid) -> Result<KernelSample> {
    KernelSpec::HeatDerivative { alpha, t, kappa }.validate(grid.dim())?;
    let sp = Spectral::new(grid)?;
    let raw = sp.kernel_of(|xi| norm2(xi).powf(kappa) * heat_symbol(alpha, t, xi));
    finish(GridFunction::new(grid.clone(), raw)?)
}

/// `iξ_k (δ_{jh} − ξ_j ξ_h / |ξ|²) e^{-t|ξ|^{2α}}`, zero at `ξ = 0`.
pub fn oseen_symbol(alpha: f64, t: f64, j: usize, h: usize, k: usize, xi: &Point) -> Complex64 {
    let r2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
    if r2 == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let delta = if j == h { 1.0 } else { 0.0 };
    let proj = delta - xi[j] * xi[h] / r2;
    Complex64::new(0.0, xi[k] * proj * heat_symbol(alpha, t, xi))
}

/// The Oseen symbol on the lattice of `grid` (FFT order); Nyquist modes are zeroed so the kernel stays real.
pub fn oseen_multiplier(alpha: f64, t: f64, jhk: [usize; 3], grid: &Grid) -> Result<Vec<Complex64>> {
    let [j, h, k] = jhk;
    KernelSpec::OseenComponent { alpha, t, j, h, k }.validate(grid.dim())?;
    let sp = Spectral::new(grid)?;
    Ok((0..grid.len())
        .map(|i| {
            let (xi, nyq) = sp.xi(i);
            if nyq {
                Complex64::new(0.0, 0.0)
            } else {
                oseen_symbol(alpha, t, j, h, k, &xi)
            }
        })
        .collect())
}

/// Real-space kernel `K^{j;h,k}_{α,t}`, origin at index N/2.
pub fn sample_oseen_kernel(alpha: f64, t: f64, jhk: [usize; 3], grid: &Grid) -> Result<KernelSample> {
    let symbol = oseen_multiplier(alpha, t, jhk, grid)?;
    let sp = Spectral::new(grid)?;
    let raw = sp.kernel_of_symbol(&symbol);
    finish(GridFunction::new(grid.clone(), raw)?)
}

/// `max |kernel(x)| / bound(x)` over nodes with `|x_i| ≤ interior·L` on every axis.
pub fn pointwise_bound_check(kernel: &GridFunction, bound: impl Fn(&Point) -> f64, interior: f64) -> f64 {
    let grid = kernel.grid();
    let lim = interior * grid.half_width();
    grid.points()
        .zip(kernel.values())
        .filter(|(x, _)| x[..grid.dim()].iter().all(|c| c.abs() <= lim))
        .map(|(x, v)| v.abs() / bound(&x))
        .fold(0.0, f64::max)
}

/// `∫_a^b |t − s|^{γ−1} ds`
fn riesz_cell(t: f64, a: f64, b: f64, gamma: f64) -> f64 {
    if t <= a {
        ((b - t).powf(gamma) - (a - t).powf(gamma)) / gamma
    } else if t >= b {
        ((t - a).powf(gamma) - (t - b).powf(gamma)) / gamma
    } else {
        ((t - a).powf(gamma) + (b - t).powf(gamma)) / gamma
    }
}

/// `∫_0^T |t − s|^{−(1−γ)} f(s) ds` at the nodes of `times`, with `f` constant on each cell `(t_j − Δt, t_j]`.
pub fn riesz_potential_1d(values: &[f64], times: &TimeGrid, gamma: f64) -> Result<Vec<f64>> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(invalid(format!("riesz order must lie in (0, 1), got {gamma}")));
    }
    if values.len() != times.steps() {
        return Err(Error::GridMismatch("riesz input length differs from the time grid".into()));
    }
    let dt = times.step();
    let nodes = times.times();
    Ok(nodes
        .iter()
        .map(|&t| nodes.iter().zip(values).map(|(&tj, &f)| f * riesz_cell(t, tj - dt, tj, gamma)).sum())
        .collect())
}

impl Spectral {
    /// Kernel of a complex lattice symbol given in FFT order, origin at index N/2.
    pub fn kernel_of_symbol(&self, symbol: &[Complex64]) -> Vec<f64> {
        let grid = self.grid();
        let mut hat = symbol.to_vec();
        self.fft().inverse(&mut hat);
        let scale = 1.0 / grid.cell_volume();
        let n = grid.nodes();
        let half = n / 2;
        (0..grid.len())
            .map(|flat| {
                let idx = grid.multi_index(flat);
                let mut src = [0usize; 3];
                for axis in 0..grid.dim() {
                    src[axis] = (idx[axis] + half) % n;
                }
                hat[grid.flat_index(src)].re * scale
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn eta_at_origin() {
        let g = Grid::new(2, 16, 4.0, Boundary::Truncated).unwrap();
        let e = sample_eta(0.5, 3.0, &g).unwrap();
        let mid = g.flat_index([8, 8, 0]);
        assert!((e.values()[mid] - 4.0).abs() < 1e-14);
    }

    #[test]
    fn eta_needs_integrability() {
        let g = Grid::line(16, 4.0).unwrap();
        assert!(sample_eta(1.0, 1.0, &g).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(5);
        let int: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((int - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn cell_average_2d_close_to_point_value_far_out() {
        let c = [3.0, 1.0, 0.0];
        let a = eta_cell_average(1.0, 3.0, 2, 0.05, &c);
        let p = eta(1.0, 3.0, 2, &c);
        assert!((a - p).abs() < 1e-3 * p);
    }

    #[test]
    fn oseen_symbol_special_cases() {
        let xi = [0.0, 2.0, 0.0];
        let s = oseen_symbol(1.0, 0.3, 0, 0, 1, &xi);
        let expect = 2.0 * (-0.3f64 * 4.0).exp();
        assert!((s.im - expect).abs() < 1e-15 && s.re == 0.0);
        assert_eq!(oseen_symbol(1.0, 0.3, 0, 1, 1, &[0.0; 3]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn riesz_of_zero() {
        let tg = TimeGrid::new(1.0, 10).unwrap();
        let r = riesz_potential_1d(&[0.0; 10], &tg, 0.5).unwrap();
        assert!(r.iter().all(|&v| v == 0.0));
        assert!(riesz_potential_1d(&[0.0; 10], &tg, 1.0).is_err());
    }
}
