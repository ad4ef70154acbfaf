//! Empirical checks of the convolution estimates over seeded corpora.
//!
//! Every check measures `lhs / rhs` per sample (and per `t` where the bound depends on it),
//! then repeats on the grid with twice the nodes to report how stable the maximum is.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{members, CorpusSpec, Member};
use crate::error::{hypothesis, invalid, Error, Result};
use crate::exponents::{combine, Exponent, ExponentFamily, ExponentField, Relation};
use crate::fit::default_t_grid;
use crate::grid::{Grid, GridFunction};
use crate::kernels::eta_convolver;
use crate::norms::{constant_lp_norm, luxemburg_norm, one_in_ls, Ratio, DEFAULT_TOL};
use crate::spectral::LinearConvolver;

use super::profiles::{assertion_theta, branch, product_omega, DecayProfile};
use super::report::{max_ratio, SampleRow, SlopeCheck, VerificationReport};

/// Equality tolerance for exponent relations.
const RELATION_TOL: f64 = 1e-12;

/// Slack allowed on estimates whose constant is exactly 1.
pub const HARD_SLACK: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct CheckSetup {
    pub grid: Grid,
    pub corpus: CorpusSpec,
    pub t_grid: Vec<f64>,
    /// Decay order of `η_{t,m}`; must exceed the dimension.
    pub m: f64,
    pub tol: f64,
    /// Repeat on the refined grid to measure resolution stability.
    pub refine: bool,
}

impl CheckSetup {
    pub fn new(grid: Grid, seed: u64) -> Self {
        let m = grid.dim() as f64 + 1.0;
        Self { grid, corpus: CorpusSpec::standard(seed), t_grid: default_t_grid(), m, tol: DEFAULT_TOL, refine: true }
    }

    pub(crate) fn members(&self) -> Result<Vec<Member>> {
        members(&self.corpus, self.grid.dim(), self.grid.half_width())
    }
}

pub(crate) struct Measured {
    pub rows: Vec<SampleRow>,
    pub boundary_mass: f64,
    pub slope: Option<SlopeCheck>,
}

pub(crate) fn sample_all(members: &[Member], grid: &Grid) -> Result<Vec<GridFunction>> {
    members.par_iter().map(|m| m.shape.sample(grid)).collect()
}

/// Member `i` paired with member `i + 1`.
fn pair_indices(n: usize) -> Vec<(usize, usize)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

fn pair_name(members: &[Member], (i, j): (usize, usize)) -> String {
    format!("{}|{}", members[i].name, members[j].name)
}

pub(crate) fn row(id: &str, sample: String, t: Option<f64>, r: Ratio, case: Option<String>) -> SampleRow {
    SampleRow { id: id.to_string(), sample, t, lhs: r.lhs, rhs: r.rhs, ratio: r.ratio, case }
}

pub(crate) fn run(
    setup: &CheckSetup,
    mut report: VerificationReport,
    measure: impl Fn(&Grid) -> Result<Measured>,
) -> Result<VerificationReport> {
    let base = measure(&setup.grid)?;
    report.rows = base.rows;
    report.boundary_mass = base.boundary_mass;
    report.slope = base.slope;
    let refined = if setup.refine { Some(max_ratio(&measure(&setup.grid.refined())?.rows)) } else { None };
    report.corpus = Some(setup.corpus.clone());
    report.finish(refined);
    Ok(report)
}

pub(crate) fn max_boundary(fs: impl Iterator<Item = f64>) -> f64 {
    fs.fold(0.0, f64::max)
}

fn constant_field(v: Exponent, grid: &Grid) -> Result<ExponentField> {
    ExponentField::build(&ExponentFamily::Constant { value: v }, grid)
}

fn as_hypothesis(what: &str) -> impl Fn(Error) -> Error + '_ {
    move |e| match e {
        Error::ExponentBelowOne { node, value } => {
            hypothesis(format!("{what}: derived exponent {value} < 1 at node {node}"))
        }
        other => other,
    }
}

// ---------------------------------------------------------------------------
// Young-type bound with constant output exponent

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct YoungConstantR {
    pub ratio: Ratio,
    /// `A^ν(‖k‖_{q⁻}^{q⁻/r} + ‖k‖_{q⁺}^{q⁺/r})`
    pub constant: f64,
    /// `2A^η`
    pub simplified: f64,
    pub q_minus: f64,
    pub q_plus: f64,
}

/// Both sides of `‖k*f‖_{L^r} ≤ c·C·‖f‖_{p(·)}` with `1/p + 1/q = 1 + 1/r`.
pub fn young_constant_r(
    k: &GridFunction,
    f: &GridFunction,
    p: &ExponentField,
    r: f64,
    tol: f64,
) -> Result<YoungConstantR> {
    let grid = f.grid();
    k.grid().ensure_same(grid)?;
    p.ensure_grid(grid)?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(invalid(format!("output exponent must be finite and at least 1, got {r}")));
    }
    if !p.p_plus().is_finite() {
        return Err(hypothesis("young_constant_r: p_plus must be finite"));
    }
    let rf = ExponentField::constant(r, grid)?;
    let q = combine(Relation::YoungR, &[p, &rf]).map_err(as_hypothesis("young_constant_r"))?;
    let (Exponent::Finite(qm), Exponent::Finite(qp)) = (q.p_minus(), q.p_plus()) else {
        return Err(hypothesis("young_constant_r: q_plus must be finite"));
    };
    let w = grid.cell_volume();
    let km = constant_lp_norm(k.values(), Exponent::Finite(qm), w);
    let kp = constant_lp_norm(k.values(), Exponent::Finite(qp), w);
    let a = km + kp;
    if a == 0.0 {
        return Ok(YoungConstantR {
            ratio: Ratio::new(0.0, 0.0),
            constant: 0.0,
            simplified: 0.0,
            q_minus: qm,
            q_plus: qp,
        });
    }
    let (nu, eta) = if a <= 1.0 { (1.0 - qp / r, 1.0 - (qp - qm) / r) } else { (1.0 - qm / r, 1.0 + (qp - qm) / r) };
    let constant = a.powf(nu) * (km.powf(qm / r) + kp.powf(qp / r));
    let conv = LinearConvolver::from_grid_kernel(k).apply(f)?;
    let lhs = constant_lp_norm(conv.values(), Exponent::Finite(r), w);
    let rhs = constant * luxemburg_norm(f, p, tol)?;
    Ok(YoungConstantR { ratio: Ratio::new(lhs, rhs), constant, simplified: 2.0 * a.powf(eta), q_minus: qm, q_plus: qp })
}

pub fn young_constant_r_suite(setup: &CheckSetup, p: &ExponentField, r: f64) -> Result<VerificationReport> {
    let id = "young_constant_r";
    let members = setup.members()?;
    let report = VerificationReport::new(
        id,
        "|k*f|_{L^r} <= c C |f|_{p(.)}, C = A^nu (|k|_{q-}^{q-/r} + |k|_{q+}^{q+/r})",
        &setup.grid,
    )
    .exponent("p", p.summary())
    .param("r", r);
    let mut report = run(setup, report, |grid| {
        let p = p.rebuild_on(grid)?;
        let fs = sample_all(&members, grid)?;
        let rows: Vec<(SampleRow, f64, bool)> = pair_indices(fs.len())
            .par_iter()
            .map(|&(i, j)| {
                let y = young_constant_r(&fs[i], &fs[j], &p, r, setup.tol)?;
                let loose = y.constant > y.simplified * (1.0 + 1e-12);
                Ok((row(id, pair_name(&members, (i, j)), None, y.ratio, None), fs[j].boundary_mass(), loose))
            })
            .collect::<Result<_>>()?;
        if rows.iter().any(|r| r.2) {
            return Err(Error::NonFinite("constant exceeded its 2A^eta simplification".into()));
        }
        Ok(Measured {
            boundary_mass: max_boundary(rows.iter().map(|r| r.1)),
            rows: rows.into_iter().map(|r| r.0).collect(),
            slope: None,
        })
    })?;
    report.note("the multiplicative constant c is not quantified; max_ratio estimates it");
    Ok(report)
}

// ---------------------------------------------------------------------------
// η-convolution from L^{p/2} into L^p

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EtaVariant {
    /// `p⁺ = p_∞ < ∞`
    Vartheta,
    /// `p_∞ = ∞`
    VarthetaInfty,
    /// `p⁻ = p_∞`
    Varphi,
}

/// The decay profile for a variant, after checking its hypotheses on `p`.
pub fn eta_profile(p: &ExponentField, variant: EtaVariant) -> Result<DecayProfile> {
    let pm = p.p_minus();
    if pm < Exponent::Finite(2.0) {
        return Err(hypothesis(format!("eta estimate needs p_minus >= 2, got {pm}")));
    }
    let pm = p.finite_minus("eta estimate")?;
    let limit = p.p_infinity().ok_or_else(|| hypothesis("eta estimate needs a limit at infinity"))?;
    let profile = match variant {
        EtaVariant::Vartheta => {
            if limit != p.p_plus() || !limit.is_finite() {
                return Err(hypothesis(format!(
                    "vartheta needs p_plus = p_infinity < inf, got {} and {limit}",
                    p.p_plus()
                )));
            }
            DecayProfile::Vartheta { p_minus: pm, p_infinity: limit.value() }
        }
        EtaVariant::VarthetaInfty => {
            if limit.is_finite() {
                return Err(hypothesis(format!("vartheta_infty needs p_infinity = inf, got {limit}")));
            }
            DecayProfile::VarthetaInfty { p_minus: pm }
        }
        EtaVariant::Varphi => {
            if limit != Exponent::Finite(pm) {
                return Err(hypothesis(format!("varphi needs p_minus = p_infinity, got {pm} and {limit}")));
            }
            DecayProfile::Varphi { p_minus: pm, p_plus: p.p_plus() }
        }
    };
    profile.validate()?;
    Ok(profile)
}

fn check_m(m: f64, dim: usize) -> Result<()> {
    if m > dim as f64 {
        Ok(())
    } else {
        Err(hypothesis(format!("eta decay order m = {m} must exceed the dimension {dim}")))
    }
}

/// `‖η_{t,m} * f‖_{p(·)}` against `t^{-nϑ(t)} ‖f‖_{p(·)/2}`.
pub fn eta_halfexp_ratio(
    f: &GridFunction,
    p: &ExponentField,
    profile: &DecayProfile,
    t: f64,
    m: f64,
    tol: f64,
) -> Result<Ratio> {
    let grid = f.grid();
    check_m(m, grid.dim())?;
    let half = combine(Relation::Half, &[p])?;
    let conv = eta_convolver(t, m, grid)?.apply(f)?;
    let lhs = luxemburg_norm(&conv, p, tol)?;
    let n = grid.dim() as f64;
    Ok(Ratio::new(lhs, t.powf(-n * profile.eval(t)?) * luxemburg_norm(f, &half, tol)?))
}

pub fn eta_halfexp_check(setup: &CheckSetup, p: &ExponentField, variant: EtaVariant) -> Result<VerificationReport> {
    let id = "eta_halfexp";
    check_m(setup.m, setup.grid.dim())?;
    let profile = eta_profile(p, variant)?;
    let members = setup.members()?;
    let mut report =
        VerificationReport::new(id, "|eta_{t,m} * f|_{p(.)} <= C t^{-n theta(t)} |f|_{p(.)/2}", &setup.grid)
            .exponent("p", p.summary())
            .param("m", setup.m)
            .profile(profile.name(), profile.branches()?);
    report.t_grid = setup.t_grid.clone();
    run(setup, report, |grid| {
        let p = p.rebuild_on(grid)?;
        let half = combine(Relation::Half, &[&p])?;
        let fs = sample_all(&members, grid)?;
        let denominators: Vec<f64> =
            fs.par_iter().map(|f| luxemburg_norm(f, &half, setup.tol)).collect::<Result<_>>()?;
        let convolvers: Vec<LinearConvolver> =
            setup.t_grid.par_iter().map(|&t| eta_convolver(t, setup.m, grid)).collect::<Result<_>>()?;
        let n = grid.dim() as f64;
        let jobs: Vec<(usize, usize)> =
            (0..fs.len()).flat_map(|i| (0..setup.t_grid.len()).map(move |j| (i, j))).collect();
        let out: Vec<(SampleRow, f64)> = jobs
            .par_iter()
            .map(|&(i, j)| {
                let t = setup.t_grid[j];
                let conv = convolvers[j].apply(&fs[i])?;
                let lhs = luxemburg_norm(&conv, &p, setup.tol)?;
                let rhs = t.powf(-n * profile.value(branch(t))) * denominators[i];
                Ok((row(id, members[i].name.clone(), Some(t), Ratio::new(lhs, rhs), None), conv.boundary_mass()))
            })
            .collect::<Result<_>>()?;
        Ok(Measured {
            boundary_mass: max_boundary(out.iter().map(|o| o.1)),
            rows: out.into_iter().map(|o| o.0).collect(),
            slope: None,
        })
    })
}

// ---------------------------------------------------------------------------
// Intersection-space convolution with constant 1

/// Exponents of `‖k*f‖_{r} ≤ ‖k‖_{A∩C[∩∞]} ‖f‖_{B∩D[∩∞]}`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionExponents {
    pub a: ExponentField,
    pub b: ExponentField,
    pub c: ExponentField,
    pub d: ExponentField,
    pub r: ExponentField,
    /// The variable-`r` form also takes the sup norms of both factors.
    pub with_sup: bool,
}

impl IntersectionExponents {
    /// Constant `r` with `1/p + 1/q + 1/r = 1`; `C = r(1 − A/p)` and `D = r(1 − B/q)`.
    pub fn constant_r(p: Exponent, q: Exponent, r: f64, a: &ExponentField, b: &ExponentField) -> Result<Self> {
        let grid = a.grid().ok_or_else(|| invalid("intersection exponents need a spatial grid"))?.clone();
        b.ensure_grid(&grid)?;
        if !(r >= 1.0 && r.is_finite()) {
            return Err(invalid(format!("r must be finite and at least 1, got {r}")));
        }
        let sum = p.reciprocal() + q.reciprocal() + 1.0 / r;
        if (sum - 1.0).abs() > RELATION_TOL {
            return Err(hypothesis(format!("1/p + 1/q + 1/r = {sum}, expected 1")));
        }
        let pf = constant_field(p, &grid)?;
        let qf = constant_field(q, &grid)?;
        let rf = ExponentField::constant(r, &grid)?;
        let c = combine(Relation::Residual, &[a, &pf, &rf]).map_err(as_hypothesis("C = r(1 - A/p)"))?;
        let d = combine(Relation::Residual, &[b, &qf, &rf]).map_err(as_hypothesis("D = r(1 - B/q)"))?;
        Ok(Self { a: a.clone(), b: b.clone(), c, d, r: rf, with_sup: false })
    }

    /// Variable `r` with `1 < r⁻ < r⁺ < ∞`, conjugate `p, q ∈ (1, ∞)`,
    /// `C = r⁻(1 − A/(p(r′)⁻))` and `D = r⁻(1 − B/(q(r′)⁻))`.
    pub fn variable_r(p: f64, r: &ExponentField, a: &ExponentField, b: &ExponentField) -> Result<Self> {
        let grid = r.grid().ok_or_else(|| invalid("intersection exponents need a spatial grid"))?.clone();
        a.ensure_grid(&grid)?;
        b.ensure_grid(&grid)?;
        if !(p > 1.0 && p.is_finite()) {
            return Err(hypothesis(format!("p must lie in (1, inf), got {p}")));
        }
        let q = p / (p - 1.0);
        let (Exponent::Finite(rm), Exponent::Finite(rp)) = (r.p_minus(), r.p_plus()) else {
            return Err(hypothesis("variable-r form needs r_plus < inf"));
        };
        if !(1.0 < rm && rm < rp) {
            return Err(hypothesis(format!("variable-r form needs 1 < r_minus < r_plus, got {rm} and {rp}")));
        }
        let r_conj_minus = rp / (rp - 1.0);
        let field = |v: f64| ExponentField::constant(v, &grid);
        let rmf = field(rm)?;
        let c = combine(Relation::Residual, &[a, &field(p * r_conj_minus)?, &rmf]).map_err(as_hypothesis("C"))?;
        let d = combine(Relation::Residual, &[b, &field(q * r_conj_minus)?, &rmf]).map_err(as_hypothesis("D"))?;
        Ok(Self { a: a.clone(), b: b.clone(), c, d, r: r.clone(), with_sup: true })
    }

    pub fn rebuild_on(&self, grid: &Grid) -> Result<Self> {
        Ok(Self {
            a: self.a.rebuild_on(grid)?,
            b: self.b.rebuild_on(grid)?,
            c: self.c.rebuild_on(grid)?,
            d: self.d.rebuild_on(grid)?,
            r: self.r.rebuild_on(grid)?,
            with_sup: self.with_sup,
        })
    }
}

fn norm_in(f: &GridFunction, p: &ExponentField, tol: f64) -> Result<f64> {
    if p.is_constant() {
        Ok(constant_lp_norm(f.values(), p.p_minus(), f.grid().cell_volume()))
    } else {
        luxemburg_norm(f, p, tol)
    }
}

/// Both sides of the intersection estimate; `k` is read as a kernel centred on the box.
pub fn intersection_young(k: &GridFunction, f: &GridFunction, ex: &IntersectionExponents, tol: f64) -> Result<Ratio> {
    let conv = LinearConvolver::from_grid_kernel(k).apply(f)?;
    let lhs = norm_in(&conv, &ex.r, tol)?;
    let mut kn = norm_in(k, &ex.a, tol)?.max(norm_in(k, &ex.c, tol)?);
    let mut fnorm = norm_in(f, &ex.b, tol)?.max(norm_in(f, &ex.d, tol)?);
    if ex.with_sup {
        kn = kn.max(k.sup_abs());
        fnorm = fnorm.max(f.sup_abs());
    }
    Ok(Ratio::new(lhs, kn * fnorm))
}

pub fn intersection_young_suite(setup: &CheckSetup, ex: &IntersectionExponents) -> Result<VerificationReport> {
    let id = if ex.with_sup { "intersection_young_variable_r" } else { "intersection_young" };
    let estimate = if ex.with_sup {
        "|k*f|_{r(.)} <= |k|_{A(.) cap C(.) cap inf} |f|_{B(.) cap D(.) cap inf}"
    } else {
        "|k*f|_{L^r} <= |k|_{A(.) cap C(.)} |f|_{B(.) cap D(.)}"
    };
    let members = setup.members()?;
    let mut report = VerificationReport::new(id, estimate, &setup.grid)
        .exponent("A", ex.a.summary())
        .exponent("B", ex.b.summary())
        .exponent("C", ex.c.summary())
        .exponent("D", ex.d.summary())
        .exponent("r", ex.r.summary());
    report.hard_bound = Some(1.0 + HARD_SLACK);
    run(setup, report, |grid| {
        let ex = ex.rebuild_on(grid)?;
        let fs = sample_all(&members, grid)?;
        let out: Vec<(SampleRow, f64)> = pair_indices(fs.len())
            .par_iter()
            .map(|&(i, j)| {
                let r = intersection_young(&fs[i], &fs[j], &ex, setup.tol)?;
                Ok((row(id, pair_name(&members, (i, j)), None, r, None), fs[j].boundary_mass()))
            })
            .collect::<Result<_>>()?;
        Ok(Measured {
            boundary_mass: max_boundary(out.iter().map(|o| o.1)),
            rows: out.into_iter().map(|o| o.0).collect(),
            slope: None,
        })
    })
}

// ---------------------------------------------------------------------------
// The four-part estimate from L^{p(·)} ∩ L^1 (or ∩ L^ν) into L^{r(·)}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "assertion", rename_all = "snake_case")]
pub enum Assertion {
    /// `‖k*f‖_r ≤ C‖k‖_{∞∩r⁻}‖f‖_{p∩1}`
    KernelSup,
    /// `‖η_τ*f‖_r ≤ Cτ^{-nϑ(τ)}‖f‖_{p∩1}`
    EtaTheta,
    /// `‖η_τ*f‖_r ≤ Cτ^{-nω(τ)}‖f‖_{p∩ν}`
    EtaOmega { nu: f64 },
    /// `‖k*f‖_r ≤ C‖k‖_{q⁺∩r⁻}‖f‖_{p∩1}` when `1 ∈ L^{s(·)}`, `1/s = max(1/p⁻ − 1/p, 0)`
    KernelConjugate,
}

impl Assertion {
    fn id(&self) -> &'static str {
        match self {
            Self::KernelSup => "four_assertion_1",
            Self::EtaTheta => "four_assertion_2",
            Self::EtaOmega { .. } => "four_assertion_3",
            Self::KernelConjugate => "four_assertion_4",
        }
    }

    fn estimate(&self) -> &'static str {
        match self {
            Self::KernelSup => "|k*f|_{r(.)} <= C |k|_{inf cap r-} |f|_{p(.) cap 1}",
            Self::EtaTheta => "|eta_{t,m}*f|_{r(.)} <= C t^{-n theta(t)} |f|_{p(.) cap 1}",
            Self::EtaOmega { .. } => "|eta_{t,m}*f|_{r(.)} <= C t^{-n omega(t)} |f|_{p(.) cap nu}",
            Self::KernelConjugate => "|k*f|_{r(.)} <= C |k|_{q+ cap r-} |f|_{p(.) cap 1}",
        }
    }
}

/// The exponent `s` with `1/s = max(1/p⁻ − 1/p, 0)`.
pub fn gap_exponent(p: &ExponentField) -> Result<ExponentField> {
    let grid = p.grid().ok_or_else(|| invalid("gap exponent needs a spatial grid"))?;
    let pm = constant_field(p.p_minus(), grid)?;
    combine(Relation::ReciprocalGap, &[&pm, p])
}

pub fn four_assertion_check(
    setup: &CheckSetup,
    p: &ExponentField,
    r: &ExponentField,
    assertion: Assertion,
) -> Result<VerificationReport> {
    let id = assertion.id();
    let (pm, pp, rm, rp) = (p.p_minus(), p.p_plus(), r.p_minus(), r.p_plus());
    let mut report = VerificationReport::new(id, assertion.estimate(), &setup.grid)
        .exponent("p", p.summary())
        .exponent("r", r.summary());
    match assertion {
        Assertion::EtaTheta => {
            check_m(setup.m, setup.grid.dim())?;
            let theta = |t: f64| assertion_theta(pm, pp, rm, rp, t).0;
            report = report.param("m", setup.m).profile("theta", [theta(1.0), theta(2.0)]);
            report.t_grid = setup.t_grid.clone();
        }
        Assertion::EtaOmega { nu } => {
            check_m(setup.m, setup.grid.dim())?;
            let omega = DecayProfile::OmegaGeneral { p_minus: pm, p_plus: pp, r_minus: rm, r_plus: rp, nu };
            report = report.param("m", setup.m).param("nu", nu).profile("omega_general", omega.branches()?);
            report.t_grid = setup.t_grid.clone();
        }
        Assertion::KernelConjugate => {
            let s = gap_exponent(p)?;
            let one = one_in_ls(&s, setup.tol)?;
            if one.divergent || !one.norm.is_finite() {
                return Err(hypothesis(format!(
                    "1 is not in L^s for 1/s = max(1/p_minus - 1/p, 0) (box norms {:?})",
                    one.box_norms
                )));
            }
            report = report.exponent("s", s.summary()).param("one_in_ls", one.norm);
        }
        Assertion::KernelSup => {}
    }
    let members = setup.members()?;
    run(setup, report, |grid| {
        let p = p.rebuild_on(grid)?;
        let r = r.rebuild_on(grid)?;
        let w = grid.cell_volume();
        let fs = sample_all(&members, grid)?;
        let companion = match assertion {
            Assertion::EtaOmega { nu } => Exponent::new(nu)?,
            _ => Exponent::Finite(1.0),
        };
        let f_norms: Vec<f64> = fs
            .par_iter()
            .map(|f| Ok(luxemburg_norm(f, &p, setup.tol)?.max(constant_lp_norm(f.values(), companion, w))))
            .collect::<Result<_>>()?;
        let out: Vec<(SampleRow, f64)> = match assertion {
            Assertion::KernelSup | Assertion::KernelConjugate => pair_indices(fs.len())
                .par_iter()
                .map(|&(i, j)| {
                    let (k, f) = (&fs[i], &fs[j]);
                    let conv = LinearConvolver::from_grid_kernel(k).apply(f)?;
                    let lhs = luxemburg_norm(&conv, &r, setup.tol)?;
                    let first = match assertion {
                        Assertion::KernelSup => Exponent::Infinite,
                        _ => pm.conjugate(),
                    };
                    let kn = constant_lp_norm(k.values(), first, w).max(constant_lp_norm(k.values(), rm, w));
                    let ratio = Ratio::new(lhs, kn * f_norms[j]);
                    Ok((row(id, pair_name(&members, (i, j)), None, ratio, None), conv.boundary_mass()))
                })
                .collect::<Result<_>>()?,
            Assertion::EtaTheta | Assertion::EtaOmega { .. } => {
                let convolvers: Vec<LinearConvolver> =
                    setup.t_grid.par_iter().map(|&t| eta_convolver(t, setup.m, grid)).collect::<Result<_>>()?;
                let n = grid.dim() as f64;
                let jobs: Vec<(usize, usize)> =
                    (0..fs.len()).flat_map(|i| (0..setup.t_grid.len()).map(move |j| (i, j))).collect();
                jobs.par_iter()
                    .map(|&(i, j)| {
                        let t = setup.t_grid[j];
                        let conv = convolvers[j].apply(&fs[i])?;
                        let lhs = luxemburg_norm(&conv, &r, setup.tol)?;
                        let (exponent, case) = match assertion {
                            Assertion::EtaOmega { nu } => {
                                let omega =
                                    DecayProfile::OmegaGeneral { p_minus: pm, p_plus: pp, r_minus: rm, r_plus: rp, nu };
                                (omega.eval(t)?, None)
                            }
                            _ => {
                                let (v, c) = assertion_theta(pm, pp, rm, rp, t);
                                (
                                    v,
                                    Some(
                                        serde_json::to_value(c)
                                            .ok()
                                            .and_then(|v| v.as_str().map(String::from))
                                            .unwrap_or_default(),
                                    ),
                                )
                            }
                        };
                        let ratio = Ratio::new(lhs, t.powf(-n * exponent) * f_norms[i]);
                        Ok((row(id, members[i].name.clone(), Some(t), ratio, case), conv.boundary_mass()))
                    })
                    .collect::<Result<_>>()?
            }
        };
        Ok(Measured {
            boundary_mass: max_boundary(out.iter().map(|o| o.1)),
            rows: out.into_iter().map(|o| o.0).collect(),
            slope: None,
        })
    })
}

// ---------------------------------------------------------------------------
// Product estimates ‖η_t * (uv)‖

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum ProductVariant {
    /// In `L^{p(·)} ∩ L^ν`, `2 ≤ p⁻`, `2 ≤ ν ≤ 2p⁻`.
    Intersection { nu: f64 },
    /// In `L^{p(·)}`, `2 ≤ p⁻ = p_∞`.
    Varphi,
    /// In `L^{p(·)} ∩ L²`, `2 ≤ p⁻`.
    L2,
    /// In `L^{p(·)}`, `p⁻ = p_∞ = 2`.
    KProfile,
}

/// The exponent pair `(profile, companion)`: the bound is `max(t^{-n·profile}, t^{-n/companion})`,
/// or `t^{-n·profile}` alone when there is no companion space.
pub struct ProductBound {
    pub profile: [f64; 2],
    pub companion: Option<f64>,
    pub name: &'static str,
}

impl ProductBound {
    /// `max(t^{-n·profile}, t^{-n/ν})` or `t^{-n·profile}`.
    pub fn factor(&self, t: f64, n: f64) -> f64 {
        let v = if t <= 1.0 { self.profile[0] } else { self.profile[1] };
        let main = t.powf(-n * v);
        match self.companion {
            Some(nu) => main.max(t.powf(-n / nu)),
            None => main,
        }
    }
}

pub fn product_bound(p: &ExponentField, variant: ProductVariant) -> Result<ProductBound> {
    let pm = p.p_minus();
    if pm < Exponent::Finite(2.0) {
        return Err(hypothesis(format!("product estimate needs p_minus >= 2, got {pm}")));
    }
    let pmv = p.finite_minus("product estimate")?;
    let pp = p.p_plus();
    let limit = p.p_infinity();
    Ok(match variant {
        ProductVariant::Intersection { nu } => {
            if !(2.0..=2.0 * pmv).contains(&nu) {
                return Err(hypothesis(format!("product estimate needs 2 <= nu <= 2 p_minus, got nu = {nu}")));
            }
            let profile = [
                product_omega(pmv, pp, nu, super::profiles::Branch::Small),
                product_omega(pmv, pp, nu, super::profiles::Branch::Large),
            ];
            ProductBound { profile, companion: Some(nu), name: "omega" }
        }
        ProductVariant::Varphi => {
            if limit != Some(pm) {
                return Err(hypothesis("varphi product estimate needs p_minus = p_infinity"));
            }
            ProductBound {
                profile: DecayProfile::Varphi { p_minus: pmv, p_plus: pp }.branches()?,
                companion: None,
                name: "varphi",
            }
        }
        ProductVariant::L2 => ProductBound {
            profile: DecayProfile::Varsigma { p_minus: pmv, p_plus: pp }.branches()?,
            companion: Some(2.0),
            name: "varsigma",
        },
        ProductVariant::KProfile => {
            if pmv != 2.0 || limit != Some(Exponent::Finite(2.0)) {
                return Err(hypothesis("K product estimate needs p_minus = p_infinity = 2"));
            }
            ProductBound {
                profile: DecayProfile::KProfile { p_plus: pp }.branches()?,
                companion: None,
                name: "k_profile",
            }
        }
    })
}

pub fn product_lemma_check(
    setup: &CheckSetup,
    p: &ExponentField,
    variant: ProductVariant,
) -> Result<VerificationReport> {
    let id = match variant {
        ProductVariant::Intersection { .. } => "product_intersection",
        ProductVariant::Varphi => "product_varphi",
        ProductVariant::L2 => "product_l2",
        ProductVariant::KProfile => "product_k",
    };
    check_m(setup.m, setup.grid.dim())?;
    let bound = product_bound(p, variant)?;
    let estimate = match bound.companion {
        Some(_) => {
            "|eta_{t,m}*(uv)|_{p(.) cap nu} <= C max(t^{-n w(t)}, t^{-n/nu}) |u|_{p(.) cap nu} |v|_{p(.) cap nu}"
        }
        None => "|eta_{t,m}*(uv)|_{p(.)} <= C t^{-n w(t)} |u|_{p(.)} |v|_{p(.)}",
    };
    let mut report = VerificationReport::new(id, estimate, &setup.grid)
        .exponent("p", p.summary())
        .param("m", setup.m)
        .profile(bound.name, bound.profile);
    if let Some(nu) = bound.companion {
        report = report.param("nu", nu);
    }
    report.t_grid = setup.t_grid.clone();
    let members = setup.members()?;
    run(setup, report, |grid| {
        let p = p.rebuild_on(grid)?;
        let w = grid.cell_volume();
        let norm = |f: &GridFunction| -> Result<f64> {
            let main = luxemburg_norm(f, &p, setup.tol)?;
            Ok(match bound.companion {
                Some(nu) => main.max(constant_lp_norm(f.values(), Exponent::Finite(nu), w)),
                None => main,
            })
        };
        let fs = sample_all(&members, grid)?;
        let norms: Vec<f64> = fs.par_iter().map(norm).collect::<Result<_>>()?;
        let pairs = pair_indices(fs.len());
        let products: Vec<GridFunction> =
            pairs.par_iter().map(|&(i, j)| fs[i].zip_with(&fs[j], |a, b| a * b)).collect::<Result<_>>()?;
        let convolvers: Vec<LinearConvolver> =
            setup.t_grid.par_iter().map(|&t| eta_convolver(t, setup.m, grid)).collect::<Result<_>>()?;
        let n = grid.dim() as f64;
        let jobs: Vec<(usize, usize)> =
            (0..pairs.len()).flat_map(|i| (0..setup.t_grid.len()).map(move |j| (i, j))).collect();
        let out: Vec<(SampleRow, f64)> = jobs
            .par_iter()
            .map(|&(a, j)| {
                let t = setup.t_grid[j];
                let conv = convolvers[j].apply(&products[a])?;
                let (i, k) = pairs[a];
                let ratio = Ratio::new(norm(&conv)?, bound.factor(t, n) * norms[i] * norms[k]);
                Ok((row(id, pair_name(&members, pairs[a]), Some(t), ratio, None), conv.boundary_mass()))
            })
            .collect::<Result<_>>()?;
        Ok(Measured {
            boundary_mass: max_boundary(out.iter().map(|o| o.1)),
            rows: out.into_iter().map(|o| o.0).collect(),
            slope: None,
        })
    })
}
