//! Seeded test-function corpora.
//!
//! Every member is supported (or decays below `1e-12`) inside half the box, so
//! truncating `ℝⁿ` to the box is invisible at the level of the norms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::grid::{norm2, Grid, GridFunction, Point};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFamily {
    Gaussian,
    Bump,
    BandLimited,
    Shifted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusSpec {
    #[serde(default = "default_families")]
    pub families: Vec<CorpusFamily>,
    #[serde(default = "default_count")]
    pub count: usize,
    pub seed: u64,
}

fn default_families() -> Vec<CorpusFamily> {
    vec![CorpusFamily::Gaussian, CorpusFamily::Bump, CorpusFamily::BandLimited, CorpusFamily::Shifted]
}

fn default_count() -> usize {
    24
}

impl CorpusSpec {
    pub fn standard(seed: u64) -> Self {
        Self { families: default_families(), count: default_count(), seed }
    }
}

/// Analytic description of one member, independent of the grid it is sampled on.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Shape {
    Gaussian {
        amplitude: f64,
        width: f64,
        center: Point,
    },
    Bump {
        amplitude: f64,
        radius: f64,
        center: Point,
    },
    /// `envelope(x) · Σ a_j cos(ξ_j·x + φ_j)`
    BandLimited {
        envelope: f64,
        waves: Vec<(f64, Point, f64)>,
    },
}

impl Shape {
    pub fn eval(&self, x: &Point) -> f64 {
        match self {
            Self::Gaussian { amplitude, width, center } => {
                let r = norm2(&sub(x, center));
                amplitude * (-0.5 * (r / width).powi(2)).exp()
            }
            Self::Bump { amplitude, radius, center } => {
                let s = norm2(&sub(x, center)) / radius;
                if s < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - s * s)).exp()
                } else {
                    0.0
                }
            }
            Self::BandLimited { envelope, waves } => {
                let env = (-0.5 * (norm2(x) / envelope).powi(2)).exp();
                env * waves
                    .iter()
                    .map(|(a, xi, phase)| a * (xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2] + phase).cos())
                    .sum::<f64>()
            }
        }
    }

    pub fn sample(&self, grid: &Grid) -> Result<GridFunction> {
        GridFunction::from_fn(grid, |x| self.eval(x))
    }
}

fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Member {
    pub name: String,
    pub shape: Shape,
}

/// Deterministic member list for a spec. Shapes scale with the box half-width `L`.
pub fn members(spec: &CorpusSpec, dim: usize, half_width: f64) -> Result<Vec<Member>> {
    if spec.families.is_empty() || spec.count == 0 {
        return Err(invalid("corpus needs at least one family and a positive count"));
    }
    let l = half_width;
    let widths = [l / 40.0, l / 20.0, l / 10.0];
    let radii = [0.1 * l, 0.2 * l, 0.4 * l];
    let amplitudes = [1.0, 0.3, 3.0];
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let random_point = |rng: &mut ChaCha8Rng, scale: f64| {
        let mut p = [0.0; 3];
        for c in p.iter_mut().take(dim) {
            *c = rng.gen_range(-scale..scale);
        }
        p
    };
    let mut out = Vec::with_capacity(spec.count);
    let mut round = 0usize;
    while out.len() < spec.count {
        for fam in &spec.families {
            if out.len() == spec.count {
                break;
            }
            let k = round;
            let amp = amplitudes[(k / 3) % 3];
            let shape = match fam {
                CorpusFamily::Gaussian => Shape::Gaussian { amplitude: amp, width: widths[k % 3], center: [0.0; 3] },
                CorpusFamily::Bump => Shape::Bump { amplitude: amp, radius: radii[k % 3], center: [0.0; 3] },
                CorpusFamily::BandLimited => {
                    let waves = (0..4)
                        .map(|_| {
                            let a = rng.gen_range(-1.0..1.0);
                            let xi = random_point(&mut rng, 12.0 / l);
                            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
                            (a, xi, phase)
                        })
                        .collect();
                    Shape::BandLimited { envelope: widths[k % 3], waves }
                }
                CorpusFamily::Shifted => {
                    let center = random_point(&mut rng, 0.25 * l);
                    if k.is_multiple_of(2) {
                        Shape::Gaussian { amplitude: amp, width: widths[k % 3], center }
                    } else {
                        Shape::Bump { amplitude: amp, radius: 0.2 * l, center }
                    }
                }
            };
            let name = format!("{}_{k}", serde_json::to_string(fam).unwrap_or_default().trim_matches('"'));
            out.push(Member { name, shape });
        }
        round += 1;
    }
    Ok(out)
}

/// Members sampled on a grid.
pub fn sample(spec: &CorpusSpec, grid: &Grid) -> Result<Vec<(String, GridFunction)>> {
    members(spec, grid.dim(), grid.half_width())?.into_iter().map(|m| Ok((m.name, m.shape.sample(grid)?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_corpus_is_deterministic_and_decays() {
        let grid = Grid::line(256, 20.0).unwrap();
        let a = sample(&CorpusSpec::standard(7), &grid).unwrap();
        let b = sample(&CorpusSpec::standard(7), &grid).unwrap();
        assert_eq!(a.len(), 24);
        assert_eq!(a, b);
        for (name, f) in &a {
            let edge = f.values()[0].abs().max(f.values()[255].abs());
            assert!(edge < 1e-12, "{name} has boundary value {edge}");
            assert!(!f.is_zero(), "{name} vanished");
        }
    }
}
