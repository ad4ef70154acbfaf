//! Multi-dimensional FFTs, lattice wavenumbers and convolution helpers.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft as FftPlan, FftPlanner};

use crate::error::{invalid, Result};
use crate::grid::{Grid, GridFunction, Point};

/// In-place complex FFT over every axis of a cube of side `size`.
pub struct Fft {
    dim: usize,
    size: usize,
    forward: Arc<dyn FftPlan<f64>>,
    inverse: Arc<dyn FftPlan<f64>>,
}

impl Fft {
    pub fn new(dim: usize, size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { dim, size, forward: planner.plan_fft_forward(size), inverse: planner.plan_fft_inverse(size) }
    }

    pub fn len(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.forward);
    }

    /// Inverse transform including the `1/size^dim` normalisation.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inverse);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn run(&self, data: &mut [Complex64], plan: &Arc<dyn FftPlan<f64>>) {
        assert_eq!(data.len(), self.len());
        let n = self.size;
        // last axis is contiguous
        plan.process(data);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..self.dim.saturating_sub(1) {
            let stride = n.pow((self.dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, slot) in line.iter_mut().enumerate() {
                        *slot = data[base + k * stride];
                    }
                    plan.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
    }
}

/// Signed lattice index in `[-N/2, N/2)`.
pub fn signed_index(k: usize, n: usize) -> i64 {
    if k < n / 2 || (n % 2 == 1 && k == n / 2) {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Spectral operations bound to one grid (treated as a torus of side `2L`).
pub struct Spectral {
    grid: Grid,
    fft: Fft,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Result<Self> {
        if !grid.nodes().is_multiple_of(2) {
            return Err(invalid("spectral operations need an even node count"));
        }
        Ok(Self { grid: grid.clone(), fft: Fft::new(grid.dim(), grid.nodes()) })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn fft(&self) -> &Fft {
        &self.fft
    }

    /// Angular wavenumber of lattice index `k` on one axis.
    pub fn wavenumber(&self, k: usize) -> f64 {
        std::f64::consts::PI * signed_index(k, self.grid.nodes()) as f64 / self.grid.half_width()
    }

    /// Frequency vector at a flat spectral index and whether any axis sits on the Nyquist line.
    pub fn xi(&self, flat: usize) -> (Point, bool) {
        let idx = self.grid.multi_index(flat);
        let n = self.grid.nodes();
        let mut xi = [0.0; 3];
        let mut nyquist = false;
        for axis in 0..self.grid.dim() {
            xi[axis] = self.wavenumber(idx[axis]);
            nyquist |= idx[axis] == n / 2;
        }
        (xi, nyquist)
    }

    pub fn forward_real(&self, values: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut data);
        data
    }

    pub fn inverse_real(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.fft.inverse(&mut data);
        data.into_iter().map(|c| c.re).collect()
    }

    /// Applies a real multiplier `m(ξ)` to real data.
    pub fn apply_multiplier(&self, values: &[f64], m: impl Fn(&Point) -> f64) -> Vec<f64> {
        let mut hat = self.forward_real(values);
        for (flat, c) in hat.iter_mut().enumerate() {
            let (xi, _) = self.xi(flat);
            *c *= m(&xi);
        }
        self.inverse_real(hat)
    }

    /// Applies a complex symbol; the symbol also sees the Nyquist flag so odd symbols can vanish there.
    pub fn apply_symbol(&self, values: &[f64], s: impl Fn(&Point, bool) -> Complex64) -> Vec<f64> {
        let mut hat = self.forward_real(values);
        for (flat, c) in hat.iter_mut().enumerate() {
            let (xi, nyq) = self.xi(flat);
            *c *= s(&xi, nyq);
        }
        self.inverse_real(hat)
    }

    /// Samples the convolution kernel of a multiplier at the grid nodes (origin at index N/2).
    pub fn kernel_of(&self, m: impl Fn(&Point) -> f64) -> Vec<f64> {
        let mut hat = vec![Complex64::new(0.0, 0.0); self.grid.len()];
        for (flat, c) in hat.iter_mut().enumerate() {
            let (xi, _) = self.xi(flat);
            *c = Complex64::new(m(&xi), 0.0);
        }
        let raw = self.inverse_real(hat);
        let scale = 1.0 / self.grid.cell_volume();
        let n = self.grid.nodes();
        let half = n / 2;
        let mut out = vec![0.0; raw.len()];
        for (flat, slot) in out.iter_mut().enumerate() {
            let idx = self.grid.multi_index(flat);
            let mut src = [0usize; 3];
            for axis in 0..self.grid.dim() {
                src[axis] = (idx[axis] + half) % n;
            }
            *slot = raw[self.grid.flat_index(src)] * scale;
        }
        out
    }

    /// Circular convolution of a centred kernel (origin at index N/2) with `f`.
    pub fn convolve_periodic(&self, kernel: &GridFunction, f: &GridFunction) -> Result<GridFunction> {
        kernel.grid().ensure_same(&self.grid)?;
        f.grid().ensure_same(&self.grid)?;
        let n = self.grid.nodes();
        let half = n / 2;
        let mut rolled = vec![0.0; self.grid.len()];
        for (flat, v) in kernel.values().iter().enumerate() {
            let idx = self.grid.multi_index(flat);
            let mut dst = [0usize; 3];
            for axis in 0..self.grid.dim() {
                dst[axis] = (idx[axis] + n - half) % n;
            }
            rolled[self.grid.flat_index(dst)] = *v;
        }
        let kh = self.forward_real(&rolled);
        let mut fh = self.forward_real(f.values());
        for (a, b) in fh.iter_mut().zip(&kh) {
            *a *= b;
        }
        let vol = self.grid.cell_volume();
        let values = self.inverse_real(fh).into_iter().map(|v| v * vol).collect();
        GridFunction::new(self.grid.clone(), values)
    }
}

/// Zero-padded (linear) convolution `(k * f)(x_i) = Σ_j k(x_i - x_j) f(x_j) h^n` with a fixed kernel.
///
/// The kernel is supplied on integer offsets `m ∈ [-N, N)^n`, which covers every
/// difference of two nodes, so no wrap-around occurs.
pub struct LinearConvolver {
    grid: Grid,
    fft: Fft,
    kernel_hat: Vec<Complex64>,
}

impl LinearConvolver {
    pub fn new(grid: &Grid, kernel_at: impl Fn([i64; 3]) -> f64) -> Self {
        let n = grid.nodes();
        let p = 2 * n;
        let dim = grid.dim();
        let fft = Fft::new(dim, p);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); fft.len()];
        for (flat, slot) in kernel_hat.iter_mut().enumerate() {
            let idx = padded_index(flat, dim, p);
            let mut m = [0i64; 3];
            for axis in 0..dim {
                let q = idx[axis] as i64;
                m[axis] = if q < n as i64 { q } else { q - p as i64 };
            }
            *slot = Complex64::new(kernel_at(m), 0.0);
        }
        fft.forward(&mut kernel_hat);
        Self { grid: grid.clone(), fft, kernel_hat }
    }

    /// Kernel given as a function of the physical offset.
    pub fn from_fn(grid: &Grid, kernel: impl Fn(&Point) -> f64) -> Self {
        let h = grid.spacing();
        Self::new(grid, |m| kernel(&[m[0] as f64 * h, m[1] as f64 * h, m[2] as f64 * h]))
    }

    /// Kernel given as samples on the same box, origin at index N/2, zero outside the box.
    pub fn from_grid_kernel(k: &GridFunction) -> Self {
        let grid = k.grid().clone();
        let n = grid.nodes() as i64;
        let half = n / 2;
        let dim = grid.dim();
        Self::new(&grid, |m| {
            let mut idx = [0usize; 3];
            for axis in 0..dim {
                let q = m[axis] + half;
                if q < 0 || q >= n {
                    return 0.0;
                }
                idx[axis] = q as usize;
            }
            k.values()[grid.flat_index(idx)]
        })
    }

    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        f.grid().ensure_same(&self.grid)?;
        let n = self.grid.nodes();
        let p = 2 * n;
        let dim = self.grid.dim();
        let mut data = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for (flat, v) in f.values().iter().enumerate() {
            let idx = self.grid.multi_index(flat);
            data[padded_flat(idx, dim, p)] = Complex64::new(*v, 0.0);
        }
        self.fft.forward(&mut data);
        for (a, b) in data.iter_mut().zip(&self.kernel_hat) {
            *a *= b;
        }
        self.fft.inverse(&mut data);
        let vol = self.grid.cell_volume();
        let values =
            (0..self.grid.len()).map(|flat| data[padded_flat(self.grid.multi_index(flat), dim, p)].re * vol).collect();
        GridFunction::new(self.grid.clone(), values)
    }
}

fn padded_index(mut flat: usize, dim: usize, p: usize) -> [usize; 3] {
    let mut idx = [0usize; 3];
    for axis in (0..dim).rev() {
        idx[axis] = flat % p;
        flat /= p;
    }
    idx
}

fn padded_flat(idx: [usize; 3], dim: usize, p: usize) -> usize {
    idx[..dim].iter().fold(0, |acc, &i| acc * p + i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Boundary;

    #[test]
    fn fft_round_trip_3d() {
        let fft = Fft::new(3, 4);
        let orig: Vec<Complex64> = (0..64).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut data = orig.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn linear_convolution_matches_direct_sum() {
        let grid = Grid::new(2, 6, 1.5, Boundary::Truncated).unwrap();
        let f = GridFunction::from_fn(&grid, |x| (x[0] - 0.3 * x[1]).cos() + x[1]).unwrap();
        let kernel = |y: &Point| (-(y[0] * y[0] + 2.0 * y[1] * y[1])).exp() * (1.0 + y[0]);
        let conv = LinearConvolver::from_fn(&grid, kernel).apply(&f).unwrap();
        let vol = grid.cell_volume();
        for i in 0..grid.len() {
            let xi = grid.point(i);
            let direct: f64 = (0..grid.len())
                .map(|j| {
                    let xj = grid.point(j);
                    kernel(&[xi[0] - xj[0], xi[1] - xj[1], 0.0]) * f.values()[j] * vol
                })
                .sum();
            assert!((conv.values()[i] - direct).abs() < 1e-12, "{} vs {}", conv.values()[i], direct);
        }
    }

    #[test]
    fn single_mode_is_an_eigenfunction() {
        let grid = Grid::new(1, 16, std::f64::consts::PI, Boundary::Periodic).unwrap();
        let sp = Spectral::new(&grid).unwrap();
        let f = GridFunction::from_fn(&grid, |x| (3.0 * x[0]).cos()).unwrap();
        let out = sp.apply_multiplier(f.values(), |xi| 1.0 + xi[0] * xi[0]);
        for (a, b) in out.iter().zip(f.values()) {
            assert!((a - 10.0 * b).abs() < 1e-12);
        }
    }
}
