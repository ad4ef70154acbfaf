use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exponents::ExponentField;
use crate::grid::{TimeGrid, VectorField};
use crate::semigroup::apply_semigroup;

use super::duhamel::{bilinear_b, check_alpha, e0_term, Forcing};
use super::field::{gaussian_vortex, VelocityField, DIVERGENCE_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PicardSettings {
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub residual_tol: f64,
    /// `u ← (1−θ)u + θ(e₀ + B(u,u))`; 1 is the plain iteration.
    #[serde(default = "one")]
    pub damping: f64,
}

fn default_iters() -> usize {
    30
}

fn default_tol() -> f64 {
    1e-9
}

fn one() -> f64 {
    1.0
}

impl Default for PicardSettings {
    fn default() -> Self {
        Self { max_iters: default_iters(), residual_tol: default_tol(), damping: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub u0: VectorField,
    pub forcing: Forcing,
    pub times: TimeGrid,
    /// Temporal exponent, on `times`.
    pub p_t: ExponentField,
    /// Spatial exponent, on the grid of `u0`.
    pub q_x: ExponentField,
    pub picard: PicardSettings,
    /// `false` drops `B`, leaving the linear flow.
    pub nonlinear: bool,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        self.q_x.ensure_grid(self.u0.grid())?;
        match self.p_t.domain() {
            crate::exponents::Domain::Time(t) if *t == self.times => {}
            _ => return Err(Error::GridMismatch("p_t must live on the problem's time grid".into())),
        }
        let p = &self.picard;
        if !(p.damping > 0.0 && p.damping <= 1.0) {
            return Err(invalid(format!("damping must lie in (0, 1], got {}", p.damping)));
        }
        if p.max_iters == 0 || !(p.residual_tol > 0.0) {
            return Err(invalid("picard needs max_iters >= 1 and a positive residual_tol"));
        }
        let u0 = VelocityField::new(TimeGrid::new(1.0, 1)?, vec![self.u0.clone(), self.u0.clone()])?;
        u0.ensure_divergence_free(DIVERGENCE_TOL).map_err(|e| invalid(format!("u0 is not divergence-free: {e}")))
    }

    pub fn e0(&self) -> Result<VelocityField> {
        e0_term(&self.u0, &self.forcing, self.alpha, &self.times)
    }

    pub fn norm(&self, u: &VelocityField) -> Result<f64> {
        u.mixed_norm(&self.p_t, &self.q_x)
    }

    /// `e₀ + B(u, u)`, or `e₀` in the linear case.
    fn map(&self, e0: &VelocityField, u: &VelocityField) -> Result<VelocityField> {
        if !self.nonlinear {
            return Ok(e0.clone());
        }
        e0.axpby(1.0, &bilinear_b(u, u, self.alpha)?, 1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IterationRow {
    pub iteration: usize,
    /// `‖u_{k} − u_{k−1}‖`
    pub increment: f64,
    /// `increment_k / increment_{k−1}`
    pub ratio: Option<f64>,
    pub norm: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PicardOutcome {
    pub u: VelocityField,
    pub e0: VelocityField,
    pub e0_norm: f64,
    pub u_norm: f64,
    pub rows: Vec<IterationRow>,
    pub converged: bool,
    pub damped: bool,
}

impl PicardOutcome {
    pub fn iterations(&self) -> usize {
        self.rows.len()
    }

    pub fn max_ratio(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.ratio).reduce(f64::max)
    }
}

/// Picard iteration from `u = e₀`. Stops when the increment drops below `residual_tol`.
/// Fails with [`Error::Divergence`] when the iterate norm grows for three iterations in
/// a row and at least doubles over them.
pub fn picard_solve(spec: &ProblemSpec) -> Result<PicardOutcome> {
    spec.validate()?;
    let e0 = spec.e0()?;
    let e0_norm = spec.norm(&e0)?;
    let theta = spec.picard.damping;
    let mut u = e0.clone();
    let mut norms = vec![e0_norm];
    let mut rows: Vec<IterationRow> = Vec::new();
    let mut converged = false;
    for k in 1..=spec.picard.max_iters {
        let target = spec.map(&e0, &u)?;
        let next = if theta == 1.0 { target } else { u.axpby(1.0 - theta, &target, theta)? };
        let increment = spec.norm(&next.axpby(1.0, &u, -1.0)?)?;
        let norm = spec.norm(&next)?;
        if !norm.is_finite() || !increment.is_finite() {
            return Err(Error::Divergence { iteration: k, norm });
        }
        let ratio = rows.last().and_then(|r| if r.increment > 0.0 { Some(increment / r.increment) } else { None });
        rows.push(IterationRow { iteration: k, increment, ratio, norm });
        norms.push(norm);
        u = next;
        if increment < spec.picard.residual_tol {
            converged = true;
            break;
        }
        let w = &norms[norms.len().saturating_sub(4)..];
        if w.len() == 4 && w.windows(2).all(|p| p[1] > p[0]) && w[3] >= 2.0 * w[0] {
            return Err(Error::Divergence { iteration: k, norm });
        }
    }
    let u_norm = spec.norm(&u)?;
    Ok(PicardOutcome { u, e0, e0_norm, u_norm, rows, converged, damped: theta < 1.0 })
}

/// `‖u − e₀ − B(u, u)‖` in the problem's mixed norm.
pub fn mild_residual(u: &VelocityField, spec: &ProblemSpec) -> Result<f64> {
    let e0 = spec.e0()?;
    let image = spec.map(&e0, u)?;
    spec.norm(&u.axpby(1.0, &image, -1.0)?)
}

/// Divergence-free test fields for measuring `C_B`: heat-evolved sums of three Gaussian
/// vortices with seeded centres, widths and amplitudes. A lone radial vortex would not do,
/// since its self-advection is a pure gradient and `B` annihilates it.
pub fn vortex_corpus(spec: &ProblemSpec, count: usize, seed: u64) -> Result<Vec<VelocityField>> {
    let grid = spec.u0.grid();
    let l = grid.half_width();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let mut v0 = VectorField::zeros(grid, grid.dim());
            for _ in 0..3 {
                let mut c = [0.0; 3];
                for x in c.iter_mut().take(grid.dim()) {
                    *x = rng.gen_range(-0.2 * l..0.2 * l);
                }
                let width = rng.gen_range(0.06 * l..0.15 * l);
                let amp = rng.gen_range(0.5..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                v0 = v0.axpby(1.0, &gaussian_vortex(grid, amp, width, c)?, 1.0)?;
            }
            heat_evolved(&v0, spec.alpha, &spec.times)
        })
        .collect()
}

fn heat_evolved(v0: &VectorField, alpha: f64, times: &TimeGrid) -> Result<VelocityField> {
    let slices = (0..=times.steps())
        .map(|j| {
            let t = times.time(j);
            let comps = v0
                .components()
                .iter()
                .map(|c| {
                    let f = crate::grid::GridFunction::new(v0.grid().clone(), c.clone())?;
                    Ok(apply_semigroup(&f, alpha, t)?.into_values())
                })
                .collect::<Result<Vec<_>>>()?;
            VectorField::new(v0.grid().clone(), comps)
        })
        .collect::<Result<Vec<_>>>()?;
    VelocityField::new(times.clone(), slices)
}

/// `max ‖B(u,u)‖ / ‖u‖²` over the nonzero fields of a corpus.
pub fn measure_cb(spec: &ProblemSpec, corpus: &[VelocityField]) -> Result<f64> {
    let mut best: Option<f64> = None;
    for u in corpus {
        let n = spec.norm(u)?;
        if n == 0.0 {
            continue;
        }
        let b = spec.norm(&bilinear_b(u, u, spec.alpha)?)?;
        let r = b / (n * n);
        best = Some(best.map_or(r, |m: f64| m.max(r)));
    }
    best.ok_or_else(|| Error::EmptyCorpus("every field in the C_B corpus is zero".into()))
}
