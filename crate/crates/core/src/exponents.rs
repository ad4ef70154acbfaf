//! Variable exponents `p(·)` with values in `[1, ∞]`.
//!
//! The value `∞` is a dedicated variant, never a large float, and every
//! operation on exponents goes through [`Exponent::reciprocal`] with `1/∞ = 0`.

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::grid::{norm2, Grid, Point, TimeGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    /// Maps `+∞` to [`Exponent::Infinite`]; rejects NaN and values below 1.
    pub fn new(v: f64) -> Result<Self> {
        if v == f64::INFINITY {
            Ok(Self::Infinite)
        } else if v.is_finite() && v >= 1.0 {
            Ok(Self::Finite(v))
        } else {
            Err(invalid(format!("exponent must lie in [1, inf], got {v}")))
        }
    }

    pub fn from_reciprocal(r: f64) -> Result<Self> {
        if r == 0.0 {
            Ok(Self::Infinite)
        } else if r > 0.0 && r <= 1.0 {
            Ok(Self::Finite(1.0 / r))
        } else {
            Err(invalid(format!("reciprocal exponent {r} outside [0, 1]")))
        }
    }

    pub fn reciprocal(self) -> f64 {
        match self {
            Self::Finite(v) => 1.0 / v,
            Self::Infinite => 0.0,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    /// Numeric value, `f64::INFINITY` for the sentinel.
    pub fn value(self) -> f64 {
        match self {
            Self::Finite(v) => v,
            Self::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn conjugate(self) -> Self {
        match self {
            Self::Infinite => Self::Finite(1.0),
            Self::Finite(1.0) => Self::Infinite,
            Self::Finite(v) => Self::Finite(v / (v - 1.0)),
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.partial_cmp(b),
            (Self::Finite(_), Self::Infinite) => Some(Ordering::Less),
            (Self::Infinite, Self::Finite(_)) => Some(Ordering::Greater),
            (Self::Infinite, Self::Infinite) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(*v),
            Self::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::new(v).map_err(serde::de::Error::custom),
            Raw::Text(t) if matches!(t.as_str(), "inf" | "infinity" | "Infinity") => Ok(Exponent::Infinite),
            Raw::Text(t) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {t:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    #[default]
    Euclidean,
    /// `Σ |x_i|`
    Taxicab,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Wave {
    #[default]
    AbsSin,
    SinSquared,
}

fn one() -> f64 {
    1.0
}

fn infinite() -> Exponent {
    Exponent::Infinite
}

/// The closed set of exponent families.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentFamily {
    Constant {
        value: Exponent,
    },
    /// `base + slope·|x|`
    AffineRadial {
        base: f64,
        slope: f64,
        #[serde(default)]
        metric: Metric,
    },
    /// `limit − depth·e^{−rate|x|}`
    ExponentialApproach {
        limit: f64,
        depth: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    /// `base + amplitude·w(x)` with `w` the mean over axes of `|sin(fx_i)|` or `sin²(fx_i)`.
    SinusoidalBounded {
        base: f64,
        amplitude: f64,
        #[serde(default = "one")]
        frequency: f64,
        #[serde(default)]
        shape: Wave,
    },
    /// `inner` for `|x| ≤ radius`, `outer` (default ∞) beyond.
    Piecewise {
        inner: f64,
        radius: f64,
        #[serde(default = "infinite")]
        outer: Exponent,
    },
}

/// Infimum, supremum and limit at infinity of a family over all of `ℝⁿ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalyticBounds {
    pub inf: Exponent,
    pub sup: Exponent,
    pub limit: Option<Exponent>,
}

impl ExponentFamily {
    pub fn constant(v: f64) -> Self {
        Self::Constant { value: Exponent::new(v).expect("constant exponent in [1, inf]") }
    }

    pub fn infinite() -> Self {
        Self::Constant { value: Exponent::Infinite }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be finite")))
            }
        };
        match *self {
            Self::Constant { .. } => {}
            Self::AffineRadial { base, slope, .. } => {
                finite("base", base)?;
                finite("slope", slope)?;
                if slope < 0.0 {
                    return Err(invalid("affine-radial slope must be nonnegative"));
                }
            }
            Self::ExponentialApproach { limit, depth, rate } => {
                finite("limit", limit)?;
                finite("depth", depth)?;
                if !(rate.is_finite() && rate > 0.0) {
                    return Err(invalid("exponential-approach rate must be positive"));
                }
            }
            Self::SinusoidalBounded { base, amplitude, frequency, .. } => {
                finite("base", base)?;
                finite("amplitude", amplitude)?;
                finite("frequency", frequency)?;
            }
            Self::Piecewise { inner, radius, .. } => {
                finite("inner", inner)?;
                if !(radius.is_finite() && radius >= 0.0) {
                    return Err(invalid("piecewise radius must be nonnegative"));
                }
            }
        }
        let b = self.analytic_bounds();
        if b.inf < Exponent::Finite(1.0) {
            return Err(invalid(format!("family takes values below 1 (infimum {})", b.inf)));
        }
        Ok(())
    }

    /// Value at `x`; `dim` is the number of meaningful coordinates.
    pub fn eval(&self, x: &Point, dim: usize) -> Exponent {
        match *self {
            Self::Constant { value } => value,
            Self::AffineRadial { base, slope, metric } => {
                let r = match metric {
                    Metric::Euclidean => norm2(x),
                    Metric::Taxicab => x.iter().map(|c| c.abs()).sum(),
                };
                Exponent::Finite(base + slope * r)
            }
            Self::ExponentialApproach { limit, depth, rate } => {
                Exponent::Finite(limit - depth * (-rate * norm2(x)).exp())
            }
            Self::SinusoidalBounded { base, amplitude, frequency, shape } => {
                let w: f64 = x[..dim]
                    .iter()
                    .map(|c| {
                        let s = (frequency * c).sin();
                        match shape {
                            Wave::AbsSin => s.abs(),
                            Wave::SinSquared => s * s,
                        }
                    })
                    .sum::<f64>()
                    / dim as f64;
                Exponent::Finite(base + amplitude * w)
            }
            Self::Piecewise { inner, radius, outer } => {
                if norm2(x) <= radius {
                    Exponent::Finite(inner)
                } else {
                    outer
                }
            }
        }
    }

    pub fn analytic_bounds(&self) -> AnalyticBounds {
        match *self {
            Self::Constant { value } => AnalyticBounds { inf: value, sup: value, limit: Some(value) },
            Self::AffineRadial { base, slope, .. } => {
                let far = if slope > 0.0 { Exponent::Infinite } else { Exponent::Finite(base) };
                AnalyticBounds { inf: Exponent::Finite(base), sup: far, limit: Some(far) }
            }
            Self::ExponentialApproach { limit, depth, .. } => {
                let at0 = Exponent::Finite(limit - depth);
                let lim = Exponent::Finite(limit);
                AnalyticBounds { inf: at0.min(lim), sup: at0.max(lim), limit: Some(lim) }
            }
            Self::SinusoidalBounded { base, amplitude, .. } => {
                let a = Exponent::Finite(base);
                let b = Exponent::Finite(base + amplitude);
                AnalyticBounds { inf: a.min(b), sup: a.max(b), limit: None }
            }
            Self::Piecewise { inner, outer, .. } => {
                let a = Exponent::Finite(inner);
                AnalyticBounds { inf: a.min(outer), sup: a.max(outer), limit: Some(outer) }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `p/2`
    Half,
    /// `1/s = 1/p + 1/q`
    HolderSum,
    /// `1/p + 1/q = 1 + 1/r`, solved for `q` from operands `(p, r)`
    YoungR,
    /// `C = r(1 − A/p)` from operands `(A, p, r)`
    Residual,
    /// `1/s = max(1/a − 1/p, 0)` from operands `(a, p)`
    ReciprocalGap,
}

impl Relation {
    fn arity(self) -> usize {
        match self {
            Self::Half => 1,
            Self::HolderSum | Self::YoungR | Self::ReciprocalGap => 2,
            Self::Residual => 3,
        }
    }

    fn apply(self, ops: &[Exponent]) -> Result<Exponent> {
        match self {
            Self::Half => Ok(match ops[0] {
                Exponent::Finite(v) => Exponent::Finite(v / 2.0),
                Exponent::Infinite => Exponent::Infinite,
            }),
            Self::HolderSum => Exponent::from_reciprocal(ops[0].reciprocal() + ops[1].reciprocal()),
            Self::YoungR => Exponent::from_reciprocal(1.0 + ops[1].reciprocal() - ops[0].reciprocal()),
            Self::Residual => {
                let a = ops[0].finite().ok_or_else(|| invalid("residual needs a finite A"))?;
                let r = ops[2].finite().ok_or_else(|| invalid("residual needs a finite r"))?;
                Ok(Exponent::Finite(r * (1.0 - a * ops[1].reciprocal())))
            }
            Self::ReciprocalGap => Exponent::from_reciprocal((ops[0].reciprocal() - ops[1].reciprocal()).max(0.0)),
        }
    }
}

/// How a field was produced; rebuilding from the same spec is bit-identical.
#[derive(Clone, Debug, PartialEq)]
pub enum ExponentSpec {
    Family(ExponentFamily),
    Conjugate(Box<ExponentSpec>),
    Combined { relation: Relation, operands: Vec<ExponentSpec> },
}

impl fmt::Display for ExponentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Family(fam) => write!(f, "{}", serde_json::to_string(fam).map_err(|_| fmt::Error)?),
            Self::Conjugate(inner) => write!(f, "conjugate({inner})"),
            Self::Combined { relation, operands } => {
                let rel = serde_json::to_string(relation).map_err(|_| fmt::Error)?;
                write!(f, "{}(", rel.trim_matches('"'))?;
                for (i, op) in operands.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{op}")?;
                }
                write!(f, ")")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Space(Grid),
    Time(TimeGrid),
}

impl Domain {
    fn points(&self) -> Vec<Point> {
        match self {
            Self::Space(g) => g.points().collect(),
            Self::Time(t) => t.times().into_iter().map(|s| [s, 0.0, 0.0]).collect(),
        }
    }

    /// Quadrature weight of a single node.
    pub fn dim(&self) -> usize {
        match self {
            Self::Space(g) => g.dim(),
            Self::Time(_) => 1,
        }
    }

    pub fn weight(&self) -> f64 {
        match self {
            Self::Space(g) => g.cell_volume(),
            Self::Time(t) => t.step(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Space(g) => g.len(),
            Self::Time(t) => t.steps(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// An exponent sampled on a grid, with `p⁻`, `p⁺` and `p_∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentField {
    spec: ExponentSpec,
    domain: Domain,
    samples: Vec<Exponent>,
    p_minus: Exponent,
    p_plus: Exponent,
    p_infinity: Option<Exponent>,
}

/// Compact, serialisable view of a field for reports.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentSummary {
    pub spec: String,
    pub minus: Exponent,
    pub plus: Exponent,
    pub infinity: Option<Exponent>,
}

impl ExponentField {
    /// Samples a family on a spatial grid. Bounds and limit are the family's analytic ones.
    pub fn build(family: &ExponentFamily, grid: &Grid) -> Result<Self> {
        Self::from_spec(&ExponentSpec::Family(family.clone()), &Domain::Space(grid.clone()))
    }

    /// Samples a family on the time nodes `t_1..t_M`, read as `|x| = t`.
    pub fn build_on_times(family: &ExponentFamily, times: &TimeGrid) -> Result<Self> {
        Self::from_spec(&ExponentSpec::Family(family.clone()), &Domain::Time(times.clone()))
    }

    pub fn constant(v: f64, grid: &Grid) -> Result<Self> {
        Self::build(&ExponentFamily::Constant { value: Exponent::new(v)? }, grid)
    }

    pub fn from_spec(spec: &ExponentSpec, domain: &Domain) -> Result<Self> {
        match spec {
            ExponentSpec::Family(family) => {
                family.validate()?;
                let samples: Vec<Exponent> = domain.points().iter().map(|x| family.eval(x, domain.dim())).collect();
                let b = family.analytic_bounds();
                Ok(Self {
                    spec: spec.clone(),
                    domain: domain.clone(),
                    samples,
                    p_minus: b.inf,
                    p_plus: b.sup,
                    p_infinity: b.limit,
                })
            }
            ExponentSpec::Conjugate(inner) => Ok(Self::from_spec(inner, domain)?.conjugate()),
            ExponentSpec::Combined { relation, operands } => {
                let ops = operands.iter().map(|o| Self::from_spec(o, domain)).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&ExponentField> = ops.iter().collect();
                combine(*relation, &refs)
            }
        }
    }

    /// The same exponent sampled on another spatial grid.
    pub fn rebuild_on(&self, grid: &Grid) -> Result<Self> {
        Self::from_spec(&self.spec, &Domain::Space(grid.clone()))
    }

    pub fn spec(&self) -> &ExponentSpec {
        &self.spec
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn grid(&self) -> Option<&Grid> {
        match &self.domain {
            Domain::Space(g) => Some(g),
            Domain::Time(_) => None,
        }
    }

    pub fn samples(&self) -> &[Exponent] {
        &self.samples
    }

    pub fn p_minus(&self) -> Exponent {
        self.p_minus
    }

    pub fn p_plus(&self) -> Exponent {
        self.p_plus
    }

    pub fn p_infinity(&self) -> Option<Exponent> {
        self.p_infinity
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// Finite `p⁻` or an error naming `what`.
    pub fn finite_minus(&self, what: &str) -> Result<f64> {
        self.p_minus.finite().ok_or_else(|| invalid(format!("{what}: p_minus is infinite")))
    }

    pub fn summary(&self) -> ExponentSummary {
        ExponentSummary {
            spec: self.spec.to_string(),
            minus: self.p_minus,
            plus: self.p_plus,
            infinity: self.p_infinity,
        }
    }

    pub fn ensure_grid(&self, grid: &Grid) -> Result<()> {
        match &self.domain {
            Domain::Space(g) => g.ensure_same(grid),
            Domain::Time(_) => Err(Error::GridMismatch("exponent lives on a time grid".into())),
        }
    }

    /// Pointwise conjugate; bounds swap and conjugate exactly.
    pub fn conjugate(&self) -> Self {
        Self {
            spec: ExponentSpec::Conjugate(Box::new(self.spec.clone())),
            domain: self.domain.clone(),
            samples: self.samples.iter().map(|p| p.conjugate()).collect(),
            p_minus: self.p_plus.conjugate(),
            p_plus: self.p_minus.conjugate(),
            p_infinity: self.p_infinity.map(Exponent::conjugate),
        }
    }
}

/// Applies a pointwise relation; fails instead of clamping when a result leaves `[1, ∞]`.
pub fn combine(relation: Relation, operands: &[&ExponentField]) -> Result<ExponentField> {
    if operands.len() != relation.arity() {
        return Err(invalid(format!("{relation:?} takes {} operands, got {}", relation.arity(), operands.len())));
    }
    let domain = operands[0].domain.clone();
    for op in &operands[1..] {
        if op.domain != domain {
            return Err(Error::GridMismatch("combine operands live on different grids".into()));
        }
    }
    let mut samples = Vec::with_capacity(domain.len());
    let mut ops = vec![Exponent::Infinite; operands.len()];
    for i in 0..domain.len() {
        for (slot, field) in ops.iter_mut().zip(operands) {
            *slot = field.samples[i];
        }
        let v =
            relation.apply(&ops).map_err(|_| Error::ExponentBelowOne { node: i, value: raw_value(relation, &ops) })?;
        if v < Exponent::Finite(1.0) {
            return Err(Error::ExponentBelowOne { node: i, value: v.value() });
        }
        samples.push(v);
    }
    let spec = ExponentSpec::Combined { relation, operands: operands.iter().map(|o| o.spec.clone()).collect() };
    let limit = operands
        .iter()
        .map(|o| o.p_infinity)
        .collect::<Option<Vec<_>>>()
        .and_then(|l| relation.apply(&l).ok())
        .filter(|v| *v >= Exponent::Finite(1.0));
    let (p_minus, p_plus) = if relation == Relation::Half {
        let half = |e: Exponent| Relation::Half.apply(&[e]).expect("half is total");
        (half(operands[0].p_minus), half(operands[0].p_plus))
    } else {
        let mut lo = samples[0];
        let mut hi = samples[0];
        for s in &samples {
            lo = lo.min(*s);
            hi = hi.max(*s);
        }
        if let Some(l) = limit {
            lo = lo.min(l);
            hi = hi.max(l);
        }
        (lo, hi)
    };
    Ok(ExponentField { spec, domain, samples, p_minus, p_plus, p_infinity: limit })
}

fn raw_value(relation: Relation, ops: &[Exponent]) -> f64 {
    match relation {
        Relation::Half => ops[0].value() / 2.0,
        Relation::HolderSum => 1.0 / (ops[0].reciprocal() + ops[1].reciprocal()),
        Relation::YoungR => 1.0 / (1.0 + ops[1].reciprocal() - ops[0].reciprocal()),
        Relation::Residual => ops[2].value() * (1.0 - ops[0].value() * ops[1].reciprocal()),
        Relation::ReciprocalGap => 1.0 / (ops[0].reciprocal() - ops[1].reciprocal()).max(0.0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LogHolderTarget {
    /// Check `g = 1/p` (the class definition).
    #[default]
    Reciprocal,
    /// Check `g = p` itself; needs a finite-valued exponent.
    Exponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogHolderOptions {
    pub pair_budget: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub target: LogHolderTarget,
}

impl Default for LogHolderOptions {
    fn default() -> Self {
        Self { pair_budget: 200_000, seed: 0, tolerance: 10.0, target: LogHolderTarget::Reciprocal }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogHolderEstimate {
    pub c_local: f64,
    /// `∞` when the exponent has no limit at infinity.
    pub c_decay: f64,
    pub g_infinity: Option<f64>,
    pub pass_local: bool,
    pub pass_decay: bool,
    pub pairs_checked: usize,
}

/// Sampled estimate of the local and decay log-Hölder constants.
///
/// All pairs are used when they fit the budget. Otherwise every pair of axis
/// neighbours is kept and the rest of the budget is filled with seeded random pairs.
pub fn log_holder_check(p: &ExponentField, opts: &LogHolderOptions) -> Result<LogHolderEstimate> {
    let n = p.samples.len();
    if n < 2 {
        return Err(invalid("log-Hölder check needs at least two nodes"));
    }
    let g: Vec<f64> = match opts.target {
        LogHolderTarget::Reciprocal => p.samples.iter().map(|e| e.reciprocal()).collect(),
        LogHolderTarget::Exponent => p
            .samples
            .iter()
            .map(|e| e.finite().ok_or_else(|| invalid("log-Hölder check on p needs finite samples")))
            .collect::<Result<_>>()?,
    };
    let g_inf = p.p_infinity.and_then(|l| match opts.target {
        LogHolderTarget::Reciprocal => Some(l.reciprocal()),
        LogHolderTarget::Exponent => l.finite(),
    });
    let points = p.domain.points();
    let dist = |a: usize, b: usize| {
        let (x, y) = (&points[a], &points[b]);
        norm2(&[x[0] - y[0], x[1] - y[1], x[2] - y[2]])
    };
    let local = |a: usize, b: usize| {
        let d = dist(a, b);
        (g[a] - g[b]).abs() * (std::f64::consts::E + 1.0 / d).ln()
    };

    let all_pairs = n * (n - 1) / 2;
    let mut c_local = 0.0f64;
    let mut checked = 0usize;
    if all_pairs <= opts.pair_budget {
        for a in 0..n {
            for b in a + 1..n {
                c_local = c_local.max(local(a, b));
            }
        }
        checked = all_pairs;
    } else {
        if let Domain::Space(grid) = &p.domain {
            for a in 0..n {
                let idx = grid.multi_index(a);
                for axis in 0..grid.dim() {
                    if idx[axis] + 1 < grid.nodes() {
                        let mut nb = idx;
                        nb[axis] += 1;
                        c_local = c_local.max(local(a, grid.flat_index(nb)));
                        checked += 1;
                    }
                }
            }
        } else {
            for a in 0..n - 1 {
                c_local = c_local.max(local(a, a + 1));
                checked += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        while checked < opts.pair_budget {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                c_local = c_local.max(local(a, b));
            }
            checked += 1;
        }
    }

    let c_decay = match g_inf {
        Some(gi) => points
            .iter()
            .zip(&g)
            .map(|(x, gx)| (gx - gi).abs() * (std::f64::consts::E + norm2(x)).ln())
            .fold(0.0, f64::max),
        None => f64::INFINITY,
    };
    Ok(LogHolderEstimate {
        c_local,
        c_decay,
        g_infinity: g_inf,
        pass_local: c_local <= opts.tolerance,
        pass_decay: c_decay <= opts.tolerance,
        pairs_checked: checked,
    })
}
