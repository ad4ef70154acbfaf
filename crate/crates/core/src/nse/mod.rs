//! Mild solutions of the fractional Navier-Stokes system
//! `∂ₜu + (−Δ)^α u + (u·∇)u + ∇P = f`, `div u = 0`, on a periodic box.

mod duhamel;
mod existence;
mod field;
mod picard;

pub use duhamel::{bilinear_b, e0_term, etd_weights, Forcing};
pub use existence::{
    existence_hypotheses, Bounds, Condition, ExistenceDiagnostics, ExistenceParams, Rel, TheoremId, EQUALITY_TOL,
};
pub use field::{divergence, gaussian_vortex, leray_project, VelocityField, DIVERGENCE_TOL};
pub use picard::{
    measure_cb, mild_residual, picard_solve, vortex_corpus, IterationRow, PicardOutcome, PicardSettings, ProblemSpec,
};
