use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::CorpusSpec;
use crate::exponents::ExponentSummary;
use crate::grid::Grid;

pub const SCHEMA_VERSION: u32 = 1;

/// Allowed drift of the measured constant when the grid is refined.
pub const STABILITY_TOLERANCE: f64 = 0.15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    /// Bounded, but the measured constant moves by more than the tolerance under refinement.
    Unstable,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSummary {
    pub dim: usize,
    pub nodes: usize,
    pub half_width: f64,
}

impl From<&Grid> for GridSummary {
    fn from(g: &Grid) -> Self {
        Self { dim: g.dim(), nodes: g.nodes(), half_width: g.half_width() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileValues {
    pub name: String,
    /// Value on `(0, 1]`.
    pub small: f64,
    /// Value on `(1, ∞)`.
    pub large: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleRow {
    pub id: String,
    pub sample: String,
    pub t: Option<f64>,
    pub lhs: f64,
    pub rhs: f64,
    /// Absent when the right-hand side vanishes.
    pub ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub case: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub inequality_id: String,
    /// The estimate being measured, written out.
    pub estimate: String,
    pub grid: GridSummary,
    pub exponents: BTreeMap<String, ExponentSummary>,
    pub params: BTreeMap<String, f64>,
    pub profiles: Vec<ProfileValues>,
    pub t_grid: Vec<f64>,
    pub corpus: Option<CorpusSpec>,
    pub rows: Vec<SampleRow>,
    pub max_ratio: Option<f64>,
    /// `Ĉ(2N) / Ĉ(N)`
    pub resolution_stability: Option<f64>,
    pub boundary_mass: f64,
    /// Set when the estimate has an explicit constant.
    pub hard_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<SlopeCheck>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

/// Fitted log-log decay rate against the classical one.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeCheck {
    pub fitted: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub points_used: usize,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(id: &str, estimate: &str, grid: &Grid) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            inequality_id: id.to_string(),
            estimate: estimate.to_string(),
            grid: grid.into(),
            exponents: BTreeMap::new(),
            params: BTreeMap::new(),
            profiles: Vec::new(),
            t_grid: Vec::new(),
            corpus: None,
            rows: Vec::new(),
            max_ratio: None,
            resolution_stability: None,
            boundary_mass: 0.0,
            hard_bound: None,
            slope: None,
            verdict: Verdict::Fail,
            notes: Vec::new(),
        }
    }

    pub fn exponent(mut self, name: &str, s: ExponentSummary) -> Self {
        self.exponents.insert(name.to_string(), s);
        self
    }

    pub fn param(mut self, name: &str, v: f64) -> Self {
        self.params.insert(name.to_string(), v);
        self
    }

    pub fn profile(mut self, name: &str, [small, large]: [f64; 2]) -> Self {
        self.profiles.push(ProfileValues { name: name.to_string(), small, large });
        self
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// Fills `max_ratio`, `resolution_stability` and `verdict` from the rows and an
    /// optional maximum measured on the refined grid.
    pub fn finish(&mut self, refined_max: Option<Option<f64>>) {
        self.max_ratio = max_ratio(&self.rows);
        let finite = self.rows.iter().all(|r| r.lhs.is_finite() && r.rhs.is_finite());
        self.resolution_stability = match (self.max_ratio, refined_max) {
            (Some(a), Some(Some(b))) if a > 0.0 => Some(b / a),
            _ => None,
        };
        self.verdict = match (self.max_ratio, self.hard_bound) {
            _ if !finite => Verdict::Fail,
            (None, _) => {
                self.note("every right-hand side vanished; nothing to measure");
                if self.hard_bound.is_some() {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            (Some(m), Some(bound)) => {
                let refined_ok = match refined_max {
                    Some(Some(b)) => b <= bound,
                    _ => true,
                };
                if m <= bound && refined_ok {
                    Verdict::Pass
                } else {
                    Verdict::Fail
                }
            }
            (Some(m), None) if !m.is_finite() => Verdict::Fail,
            (Some(_), None) => match self.resolution_stability {
                Some(s) if (s - 1.0).abs() >= STABILITY_TOLERANCE => Verdict::Unstable,
                _ => Verdict::Pass,
            },
        };
        if let Some(s) = self.slope {
            if !s.pass {
                self.verdict = Verdict::Fail;
                self.note(format!(
                    "fitted slope {:.4} misses {:.4} by more than {}",
                    s.fitted, s.expected, s.tolerance
                ));
            }
        }
        if self.boundary_mass > crate::kernels::ALIASING_FLAG {
            let m = self.boundary_mass;
            self.note(format!("outputs carry boundary mass {m:.3e}; the box truncates them"));
        }
    }
}

pub fn max_ratio(rows: &[SampleRow]) -> Option<f64> {
    rows.iter().filter_map(|r| r.ratio).fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r))))
}
