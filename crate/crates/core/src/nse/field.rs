use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::exponents::ExponentField;
use crate::grid::{norm2, Grid, Point, SpaceTimeField, TimeGrid, VectorField};
use crate::norms::{mixed_norm, DEFAULT_TOL};
use crate::spectral::Spectral;

/// Default bound on the spectral divergence of a slice, relative to `max(1, sup|u|)`.
pub const DIVERGENCE_TOL: f64 = 1e-10;

/// Frequencies of a grid, cached once.
pub(crate) struct Lattice {
    pub sp: Spectral,
    pub xi: Vec<Point>,
    /// Modes on a Nyquist line, where odd symbols have no consistent sign.
    pub nyquist: Vec<bool>,
}

impl Lattice {
    pub fn new(grid: &Grid) -> Result<Self> {
        let sp = Spectral::new(grid)?;
        let (xi, nyquist) = (0..grid.len()).map(|i| sp.xi(i)).unzip();
        Ok(Self { sp, xi, nyquist })
    }

    pub fn forward(&self, f: &VectorField) -> Vec<Vec<Complex64>> {
        f.components().par_iter().map(|c| self.sp.forward_real(c)).collect()
    }

    pub fn inverse(&self, grid: &Grid, hat: Vec<Vec<Complex64>>) -> Result<VectorField> {
        VectorField::new(grid.clone(), hat.into_par_iter().map(|c| self.sp.inverse_real(c)).collect())
    }

    /// `|ξ|^{2α}` per mode.
    pub fn rates(&self, alpha: f64) -> Vec<f64> {
        self.xi.iter().map(|x| norm2(x).powf(2.0 * alpha)).collect()
    }

    /// `(I − ξξᵀ/|ξ|²)` applied in place; Nyquist modes are dropped and `ξ = 0` is kept.
    pub fn project(&self, hat: &mut [Vec<Complex64>]) {
        let n = hat.len();
        for i in 0..self.xi.len() {
            if self.nyquist[i] {
                for c in hat.iter_mut() {
                    c[i] = Complex64::new(0.0, 0.0);
                }
                continue;
            }
            let xi = &self.xi[i];
            let r2: f64 = xi[..n].iter().map(|v| v * v).sum();
            if r2 == 0.0 {
                continue;
            }
            let dot: Complex64 = (0..n).map(|a| hat[a][i] * xi[a]).sum();
            for (a, c) in hat.iter_mut().enumerate() {
                c[i] -= dot * (xi[a] / r2);
            }
        }
    }
}

fn check_vector(v: &VectorField) -> Result<()> {
    let n = v.grid().dim();
    if n < 2 {
        return Err(invalid("velocity fields need n >= 2"));
    }
    if v.len() != n {
        return Err(invalid(format!("velocity field needs {n} components, got {}", v.len())));
    }
    Ok(())
}

/// Leray projection onto divergence-free fields.
pub fn leray_project(v: &VectorField) -> Result<VectorField> {
    check_vector(v)?;
    let lat = Lattice::new(v.grid())?;
    let mut hat = lat.forward(v);
    lat.project(&mut hat);
    lat.inverse(v.grid(), hat)
}

/// `max |div v|` over the nodes, computed spectrally with Nyquist modes dropped.
pub fn divergence(v: &VectorField) -> Result<f64> {
    check_vector(v)?;
    let lat = Lattice::new(v.grid())?;
    Ok(divergence_on(&lat, v))
}

fn divergence_on(lat: &Lattice, v: &VectorField) -> f64 {
    let hat = lat.forward(v);
    let div: Vec<Complex64> = (0..lat.xi.len())
        .map(|i| {
            if lat.nyquist[i] {
                return Complex64::new(0.0, 0.0);
            }
            (0..v.len()).map(|a| hat[a][i] * Complex64::new(0.0, lat.xi[i][a])).sum()
        })
        .collect();
    lat.sp.inverse_real(div).into_iter().fold(0.0, |m, d| m.max(d.abs()))
}

/// A velocity field sampled at `t_0 = 0, t_1, .., t_M`.
#[derive(Clone, Debug, PartialEq)]
pub struct VelocityField {
    times: TimeGrid,
    slices: Vec<VectorField>,
}

impl VelocityField {
    /// `slices` holds `M + 1` fields, the first at `t = 0`.
    pub fn new(times: TimeGrid, slices: Vec<VectorField>) -> Result<Self> {
        if slices.len() != times.steps() + 1 {
            return Err(Error::GridMismatch(format!(
                "{} slices for {} time nodes plus the origin",
                slices.len(),
                times.steps()
            )));
        }
        for s in &slices {
            check_vector(s)?;
            s.grid().ensure_same(slices[0].grid())?;
        }
        Ok(Self { times, slices })
    }

    pub fn zeros(grid: &Grid, times: &TimeGrid) -> Self {
        Self { times: times.clone(), slices: vec![VectorField::zeros(grid, grid.dim()); times.steps() + 1] }
    }

    pub fn times(&self) -> &TimeGrid {
        &self.times
    }

    pub fn grid(&self) -> &Grid {
        self.slices[0].grid()
    }

    pub fn slices(&self) -> &[VectorField] {
        &self.slices
    }

    /// Slice at `t_j`; `j = 0` is the initial time.
    pub fn at(&self, j: usize) -> &VectorField {
        &self.slices[j]
    }

    pub fn scaled(&self, a: f64) -> Self {
        Self { times: self.times.clone(), slices: self.slices.iter().map(|s| s.scaled(a)).collect() }
    }

    /// `a * self + b * other`
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Result<Self> {
        if self.times != other.times {
            return Err(Error::GridMismatch("time grids differ".into()));
        }
        let slices = self.slices.par_iter().zip(&other.slices).map(|(x, y)| x.axpby(a, y, b)).collect::<Result<_>>()?;
        Ok(Self { times: self.times.clone(), slices })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.slices.iter().zip(&other.slices).fold(0.0, |m, (a, b)| m.max(a.max_abs_diff(b)))
    }

    /// The slices at `t_1..t_M`, where the mixed norm lives.
    pub fn interior(&self) -> Result<SpaceTimeField> {
        SpaceTimeField::new(self.times.clone(), self.slices[1..].to_vec())
    }

    /// `‖u‖_{L^{p(t)} L^{q(x)}}`
    pub fn mixed_norm(&self, p_t: &ExponentField, q_x: &ExponentField) -> Result<f64> {
        mixed_norm(&self.interior()?, p_t, q_x, DEFAULT_TOL)
    }

    /// Largest spectral divergence over the slices.
    pub fn max_divergence(&self) -> Result<f64> {
        let lat = Lattice::new(self.grid())?;
        Ok(self.slices.par_iter().map(|s| divergence_on(&lat, s)).reduce(|| 0.0, f64::max))
    }

    /// Fails when some slice has divergence above `tol · max(1, sup|u|)`.
    pub fn ensure_divergence_free(&self, tol: f64) -> Result<()> {
        let lat = Lattice::new(self.grid())?;
        for (j, s) in self.slices.iter().enumerate() {
            let d = divergence_on(&lat, s);
            if d > tol * s.sup_abs().max(1.0) {
                return Err(invalid(format!("slice {j} has divergence {d:.3e}")));
            }
        }
        Ok(())
    }
}

/// `∇^⊥ψ = (−∂₂ψ, ∂₁ψ)` for `ψ = A e^{−|x−c|²/2w²}` (2-D), or the same vortex about the
/// third axis in 3-D. Sampled in closed form and then Leray-projected.
pub fn gaussian_vortex(grid: &Grid, amplitude: f64, width: f64, center: Point) -> Result<VectorField> {
    if !(width > 0.0) {
        return Err(invalid("vortex width must be positive"));
    }
    let n = grid.dim();
    if n < 2 {
        return Err(invalid("vortices need n >= 2"));
    }
    let v = VectorField::from_fn(grid, n, |x| {
        let d = [x[0] - center[0], x[1] - center[1], if n == 3 { x[2] - center[2] } else { 0.0 }];
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        let psi = amplitude * (-r2 / (2.0 * width * width)).exp();
        let s = psi / (width * width);
        [d[1] * s, -d[0] * s, 0.0]
    })?;
    leray_project(&v)
}
