//! The TOML run configuration. Field-by-field reference in `docs/config-schema.md`.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use crate::corpus::{CorpusFamily, CorpusSpec};
use crate::exponents::{Exponent, ExponentFamily, ExponentField};
use crate::fit::{default_t_grid, log_grid};
use crate::grid::{Boundary, Grid, Point, TimeGrid, VectorField};
use crate::inequalities::{Assertion, CheckSetup, EtaVariant, ProductVariant};
use crate::norms::DEFAULT_TOL;
use crate::nse::{gaussian_vortex, PicardSettings, TheoremId};
use crate::semigroup::{SmoothingData, SmoothingVariant};

use super::Command;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// When present it must match the command on the command line.
    pub command: Option<Command>,
    pub seed: Option<u64>,
    pub grid: GridConfig,
    #[serde(default)]
    pub exponents: BTreeMap<String, ExponentFamily>,
    pub corpus: Option<CorpusConfig>,
    pub t_grid: Option<TGridConfig>,
    /// Decay order of `η_{t,m}`; defaults to `n + 1`.
    pub m: Option<f64>,
    #[serde(default = "yes")]
    pub refine: bool,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub norm: Vec<NormConfig>,
    #[serde(default)]
    pub verify: Vec<CheckConfig>,
    #[serde(default)]
    pub semigroup: Vec<SemigroupConfig>,
    pub solve: Option<SolveConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn yes() -> bool {
    true
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    pub nodes: usize,
    pub half_width: f64,
    #[serde(default)]
    pub boundary: Boundary,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusConfig {
    pub families: Option<Vec<CorpusFamily>>,
    pub count: Option<usize>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TGridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormFunction {
    /// The constant function 1.
    One,
    /// Every member of the seeded corpus.
    Corpus,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormConfig {
    pub exponent: String,
    pub function: NormFunction,
    /// Repeat on boxes twice and four times as wide (only for `one`).
    #[serde(default)]
    pub box_growth: bool,
    #[serde(default)]
    pub log_holder: bool,
    /// Hard assertion: every norm is at most this.
    pub at_most: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssertionKind {
    KernelSup,
    EtaTheta,
    EtaOmega,
    KernelConjugate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductKind {
    Intersection,
    Varphi,
    L2,
    KProfile,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingKind {
    Sigma,
    Omega,
    Psi,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "inequality", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckConfig {
    YoungConstantR { p: String, r: f64 },
    EtaHalfexp { p: String, variant: EtaVariant },
    IntersectionYoung { p: Exponent, q: Exponent, r: f64, a: String, b: String },
    IntersectionYoungVariableR { p: f64, r: String, a: String, b: String },
    FourAssertion { p: String, r: String, assertion: AssertionKind, nu: Option<f64> },
    Product { p: String, variant: ProductKind, nu: Option<f64> },
}

impl CheckConfig {
    pub fn label(&self) -> &'static str {
        match self {
            Self::YoungConstantR { .. } => "young_constant_r",
            Self::EtaHalfexp { .. } => "eta_halfexp",
            Self::IntersectionYoung { .. } => "intersection_young",
            Self::IntersectionYoungVariableR { .. } => "intersection_young_variable_r",
            Self::FourAssertion { .. } => "four_assertion",
            Self::Product { .. } => "product",
        }
    }

    fn names(&self) -> Vec<&str> {
        match self {
            Self::YoungConstantR { p, .. } | Self::EtaHalfexp { p, .. } | Self::Product { p, .. } => vec![p],
            Self::IntersectionYoung { a, b, .. } => vec![a, b],
            Self::IntersectionYoungVariableR { r, a, b, .. } => vec![r, a, b],
            Self::FourAssertion { p, r, .. } => vec![p, r],
        }
    }

    pub fn assertion(kind: AssertionKind, nu: Option<f64>) -> Result<Assertion, String> {
        Ok(match kind {
            AssertionKind::KernelSup => Assertion::KernelSup,
            AssertionKind::EtaTheta => Assertion::EtaTheta,
            AssertionKind::EtaOmega => Assertion::EtaOmega { nu: nu.ok_or("eta_omega needs nu")? },
            AssertionKind::KernelConjugate => Assertion::KernelConjugate,
        })
    }

    pub fn product(kind: ProductKind, nu: Option<f64>) -> Result<ProductVariant, String> {
        Ok(match kind {
            ProductKind::Intersection => ProductVariant::Intersection { nu: nu.ok_or("intersection needs nu")? },
            ProductKind::Varphi => ProductVariant::Varphi,
            ProductKind::L2 => ProductVariant::L2,
            ProductKind::KProfile => ProductVariant::KProfile,
        })
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemigroupConfig {
    /// Input exponent.
    pub r: String,
    /// Output exponent.
    pub p: String,
    pub variant: SmoothingKind,
    pub nu: Option<f64>,
    pub alpha: f64,
    #[serde(default)]
    pub kappa: f64,
    pub data: Option<SmoothingData>,
}

impl SemigroupConfig {
    pub fn smoothing_variant(&self) -> Result<SmoothingVariant, String> {
        Ok(match self.variant {
            SmoothingKind::Sigma => SmoothingVariant::Sigma,
            SmoothingKind::Omega => SmoothingVariant::Omega { nu: self.nu.ok_or("omega needs nu")? },
            SmoothingKind::Psi => SmoothingVariant::Psi,
        })
    }
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VortexConfig {
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: [f64; 3],
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveConfig {
    pub alpha: f64,
    pub horizon: f64,
    pub steps: usize,
    /// Temporal exponent, sampled on the time nodes.
    pub p_t: String,
    /// Spatial exponent.
    pub q_x: String,
    pub theorem: TheoremId,
    pub nu: Option<f64>,
    /// Initial data as a sum of Gaussian vortices.
    pub initial: Vec<VortexConfig>,
    /// Steady forcing as a sum of Gaussian vortices; absent means none.
    #[serde(default)]
    pub forcing: Vec<VortexConfig>,
    #[serde(default = "yes")]
    pub nonlinear: bool,
    #[serde(default)]
    pub picard: PicardSettings,
    /// Members of the corpus that measures `C_B`.
    #[serde(default = "default_cb_count")]
    pub cb_samples: usize,
    #[serde(default)]
    pub log_holder: bool,
}

fn default_cb_count() -> usize {
    6
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> String {
    "varlp-out".to_string()
}

fn default_formats() -> Vec<Format> {
    vec![Format::Json, Format::Csv]
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_dir(), formats: default_formats() }
    }
}

/// A configuration that failed to parse or to resolve.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn schema(msg: impl Into<String>) -> SchemaError {
    SchemaError(msg.into())
}

impl RunConfig {
    /// Parses and checks that every name resolves, without building anything large.
    pub fn parse(text: &str, path: &Path) -> Result<Self, SchemaError> {
        let cfg: Self = toml::from_str(text).map_err(|e| schema(format!("{}: {e}", path.display())))?;
        cfg.check_names()?;
        Ok(cfg)
    }

    fn check_names(&self) -> Result<(), SchemaError> {
        let known = |field: &str, name: &str| {
            if self.exponents.contains_key(name) {
                Ok(())
            } else {
                Err(schema(format!("{field}: exponent {name:?} is not defined under [exponents]")))
            }
        };
        for (i, n) in self.norm.iter().enumerate() {
            known(&format!("norm[{i}].exponent"), &n.exponent)?;
        }
        for (i, c) in self.verify.iter().enumerate() {
            for name in c.names() {
                known(&format!("verify[{i}] ({})", c.label()), name)?;
            }
        }
        for (i, s) in self.semigroup.iter().enumerate() {
            known(&format!("semigroup[{i}].r"), &s.r)?;
            known(&format!("semigroup[{i}].p"), &s.p)?;
        }
        if let Some(s) = &self.solve {
            known("solve.p_t", &s.p_t)?;
            known("solve.q_x", &s.q_x)?;
        }
        for (name, fam) in &self.exponents {
            fam.validate().map_err(|e| schema(format!("exponents.{name}: {e}")))?;
        }
        if self.output.formats.is_empty() {
            return Err(schema("output.formats: at least one format is required"));
        }
        Ok(())
    }

    /// Checks the sections a command needs.
    pub fn check_command(&self, command: Command, seed: Option<u64>) -> Result<(), SchemaError> {
        if let Some(c) = self.command {
            if c != command {
                return Err(schema(format!(
                    "command: config is for `{}`, invoked as `{}`",
                    c.as_str(),
                    command.as_str()
                )));
            }
        }
        let randomized = match command {
            Command::Norm => self.norm.iter().any(|n| n.function == NormFunction::Corpus),
            Command::Verify => !self.verify.is_empty(),
            Command::Semigroup => self.semigroup.iter().any(|s| s.data.is_none_or(|d| d == SmoothingData::Corpus)),
            Command::Solve => true,
            Command::Report => false,
        };
        if randomized && seed.is_none() {
            return Err(schema("seed: required by this command (set `seed` or pass --seed)"));
        }
        let empty = match command {
            Command::Norm => self.norm.is_empty(),
            Command::Verify => self.verify.is_empty(),
            Command::Semigroup => self.semigroup.is_empty(),
            Command::Solve => self.solve.is_none(),
            Command::Report => false,
        };
        if empty {
            return Err(schema(format!("{}: the config has no entries for this command", command.as_str())));
        }
        Ok(())
    }

    pub fn build_grid(&self) -> Result<Grid, SchemaError> {
        let g = &self.grid;
        Grid::new(g.n, g.nodes, g.half_width, g.boundary).map_err(|e| schema(format!("grid: {e}")))
    }

    pub fn field(&self, name: &str, grid: &Grid) -> Result<ExponentField, SchemaError> {
        let fam = &self.exponents[name];
        ExponentField::build(fam, grid).map_err(|e| schema(format!("exponents.{name}: {e}")))
    }

    pub fn field_on_times(&self, name: &str, times: &TimeGrid) -> Result<ExponentField, SchemaError> {
        let fam = &self.exponents[name];
        ExponentField::build_on_times(fam, times).map_err(|e| schema(format!("exponents.{name}: {e}")))
    }

    pub fn corpus(&self, seed: u64) -> CorpusSpec {
        let mut spec = CorpusSpec::standard(seed);
        if let Some(c) = &self.corpus {
            if let Some(f) = &c.families {
                spec.families = f.clone();
            }
            if let Some(n) = c.count {
                spec.count = n;
            }
        }
        spec
    }

    pub fn check_setup(&self, grid: &Grid, seed: u64) -> Result<CheckSetup, SchemaError> {
        let mut s = CheckSetup::new(grid.clone(), seed);
        s.corpus = self.corpus(seed);
        s.t_grid = match self.t_grid {
            Some(t) => log_grid(t.min, t.max, t.points).map_err(|e| schema(format!("t_grid: {e}")))?,
            None => default_t_grid(),
        };
        if let Some(m) = self.m {
            s.m = m;
        }
        s.tol = self.tol;
        s.refine = self.refine;
        Ok(s)
    }
}

/// Sum of Gaussian vortices on a grid; an empty list is the zero field.
pub fn vortex_sum(grid: &Grid, vortices: &[VortexConfig]) -> crate::Result<VectorField> {
    let mut v = VectorField::zeros(grid, grid.dim());
    for c in vortices {
        let center: Point = c.center;
        v = v.axpby(1.0, &gaussian_vortex(grid, c.amplitude, c.width, center)?, 1.0)?;
    }
    Ok(v)
}
