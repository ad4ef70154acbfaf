use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use crate::exponents::{log_holder_check, ExponentSummary, LogHolderEstimate, LogHolderOptions};
use crate::grid::{GridFunction, TimeGrid};
use crate::inequalities::{
    eta_halfexp_check, four_assertion_check, intersection_young_suite, product_lemma_check, young_constant_r_suite,
    CheckSetup, IntersectionExponents, Verdict, VerificationReport,
};
use crate::norms::{luxemburg_norm, one_in_ls, OneInLs};
use crate::nse::{
    existence_hypotheses, measure_cb, mild_residual, picard_solve, vortex_corpus, Bounds, ExistenceDiagnostics,
    ExistenceParams, Forcing, IterationRow, ProblemSpec,
};
use crate::semigroup::{smoothing_check, SmoothingData, SmoothingSetup};

use super::config::{vortex_sum, CheckConfig, NormFunction, RunConfig, SchemaError};
use super::output::{cell, report_file, Sink, REPORT_SCHEMA_VERSION};
use super::{Command, Status};

/// Why a command stopped early.
#[derive(Debug)]
pub enum Failure {
    Schema(String),
    Hypothesis(String),
    Numerical(String),
    Io(String),
}

impl Failure {
    pub fn status(&self) -> Status {
        match self {
            Self::Schema(_) | Self::Io(_) => Status::Schema,
            Self::Hypothesis(_) => Status::Hypothesis,
            Self::Numerical(_) => Status::Numerical,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Schema(m) | Self::Hypothesis(m) | Self::Numerical(m) | Self::Io(m) => m,
        }
    }
}

impl From<SchemaError> for Failure {
    fn from(e: SchemaError) -> Self {
        Self::Schema(e.0)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter(_) | Error::GridMismatch(_) => Self::Schema(msg),
            Error::Hypothesis(_) | Error::ExponentBelowOne { .. } => Self::Hypothesis(msg),
            Error::NonFinite(_) | Error::Aliasing { .. } | Error::Divergence { .. } | Error::EmptyCorpus(_) => {
                Self::Numerical(msg)
            }
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

pub struct Context<'a> {
    pub cfg: &'a RunConfig,
    pub seed: Option<u64>,
    pub strict: bool,
    pub out: &'a Path,
}

impl Context<'_> {
    fn seed(&self) -> u64 {
        // check_command has already insisted on a seed where one matters.
        self.seed.unwrap_or(0)
    }
}

pub fn execute(ctx: &Context, command: Command, sink: &mut Sink) -> Result<Status, Failure> {
    match command {
        Command::Norm => norm(ctx, sink),
        Command::Verify => verify(ctx, sink),
        Command::Semigroup => semigroup(ctx, sink),
        Command::Solve => solve(ctx, sink),
        Command::Report => report(ctx, sink),
    }
}

// ---------------------------------------------------------------------------
// norm

#[derive(Serialize)]
struct NormSample {
    sample: String,
    norm: f64,
}

#[derive(Serialize)]
struct NormEntry {
    exponent: String,
    summary: ExponentSummary,
    function: &'static str,
    samples: Vec<NormSample>,
    box_growth: Option<OneInLs>,
    log_holder: Option<LogHolderEstimate>,
    at_most: Option<f64>,
    pass: bool,
}

#[derive(Serialize)]
struct NormEnvelope {
    schema_version: u32,
    command: &'static str,
    seed: Option<u64>,
    norms: Vec<NormEntry>,
    pass: bool,
}

fn norm(ctx: &Context, sink: &mut Sink) -> Result<Status, Failure> {
    let cfg = ctx.cfg;
    let grid = cfg.build_grid()?;
    let mut entries = Vec::new();
    for n in &cfg.norm {
        let p = cfg.field(&n.exponent, &grid)?;
        let (function, samples) = match n.function {
            NormFunction::One => {
                let v = luxemburg_norm(&GridFunction::constant(&grid, 1.0), &p, cfg.tol)?;
                ("one", vec![NormSample { sample: "one".into(), norm: v }])
            }
            NormFunction::Corpus => {
                let fs = crate::corpus::sample(&cfg.corpus(ctx.seed()), &grid)?;
                let samples = fs
                    .iter()
                    .map(|(name, f)| Ok(NormSample { sample: name.clone(), norm: luxemburg_norm(f, &p, cfg.tol)? }))
                    .collect::<crate::Result<Vec<_>>>()?;
                ("corpus", samples)
            }
        };
        let box_growth =
            if n.box_growth && n.function == NormFunction::One { Some(one_in_ls(&p, cfg.tol)?) } else { None };
        let log_holder = if n.log_holder {
            Some(log_holder_check(&p, &LogHolderOptions { seed: ctx.seed(), ..LogHolderOptions::default() })?)
        } else {
            None
        };
        let pass = n.at_most.is_none_or(|b| samples.iter().all(|s| s.norm <= b));
        entries.push(NormEntry {
            exponent: n.exponent.clone(),
            summary: p.summary(),
            function,
            samples,
            box_growth,
            log_holder,
            at_most: n.at_most,
            pass,
        });
    }
    let pass = entries.iter().all(|e| e.pass);
    let rows: Vec<Vec<String>> = entries
        .iter()
        .flat_map(|e| {
            e.samples
                .iter()
                .map(|s| vec![e.exponent.clone(), e.function.to_string(), s.sample.clone(), cell(Some(s.norm))])
        })
        .collect();
    sink.json(
        &report_file(Command::Norm),
        &NormEnvelope {
            schema_version: REPORT_SCHEMA_VERSION,
            command: Command::Norm.as_str(),
            seed: ctx.seed,
            norms: entries,
            pass,
        },
    )?;
    sink.csv("norms.csv", &["exponent", "function", "sample", "norm"], &rows)?;
    Ok(if pass { Status::Ok } else { Status::AssertionFailed })
}

// ---------------------------------------------------------------------------
// verify and semigroup

#[derive(Serialize)]
struct Refused {
    index: usize,
    check: String,
    reason: String,
}

#[derive(Serialize)]
struct CheckEnvelope {
    schema_version: u32,
    command: &'static str,
    seed: Option<u64>,
    reports: Vec<VerificationReport>,
    refused: Vec<Refused>,
    pass: bool,
}

fn run_check(cfg: &RunConfig, setup: &CheckSetup, c: &CheckConfig) -> Result<VerificationReport, Failure> {
    let grid = &setup.grid;
    let f = |name: &str| cfg.field(name, grid);
    Ok(match c {
        CheckConfig::YoungConstantR { p, r } => young_constant_r_suite(setup, &f(p)?, *r)?,
        CheckConfig::EtaHalfexp { p, variant } => eta_halfexp_check(setup, &f(p)?, *variant)?,
        CheckConfig::IntersectionYoung { p, q, r, a, b } => {
            let ex = IntersectionExponents::constant_r(*p, *q, *r, &f(a)?, &f(b)?)?;
            intersection_young_suite(setup, &ex)?
        }
        CheckConfig::IntersectionYoungVariableR { p, r, a, b } => {
            let ex = IntersectionExponents::variable_r(*p, &f(r)?, &f(a)?, &f(b)?)?;
            intersection_young_suite(setup, &ex)?
        }
        CheckConfig::FourAssertion { p, r, assertion, nu } => {
            let a = CheckConfig::assertion(*assertion, *nu).map_err(Failure::Schema)?;
            four_assertion_check(setup, &f(p)?, &f(r)?, a)?
        }
        CheckConfig::Product { p, variant, nu } => {
            let v = CheckConfig::product(*variant, *nu).map_err(Failure::Schema)?;
            product_lemma_check(setup, &f(p)?, v)?
        }
    })
}

fn verify(ctx: &Context, sink: &mut Sink) -> Result<Status, Failure> {
    let cfg = ctx.cfg;
    let setup = cfg.check_setup(&cfg.build_grid()?, ctx.seed())?;
    let results = cfg.verify.iter().map(|c| (c.label().to_string(), run_check(cfg, &setup, c))).collect();
    finish_checks(ctx, Command::Verify, results, sink)
}

fn semigroup(ctx: &Context, sink: &mut Sink) -> Result<Status, Failure> {
    let cfg = ctx.cfg;
    let grid = cfg.build_grid()?;
    let check = cfg.check_setup(&grid, ctx.seed())?;
    let results = cfg
        .semigroup
        .iter()
        .map(|s| {
            let run = || -> Result<VerificationReport, Failure> {
                let variant = s.smoothing_variant().map_err(Failure::Schema)?;
                let setup = SmoothingSetup {
                    check: check.clone(),
                    alpha: s.alpha,
                    kappa: s.kappa,
                    data: s.data.unwrap_or(SmoothingData::Corpus),
                };
                Ok(smoothing_check(&setup, &cfg.field(&s.r, &grid)?, &cfg.field(&s.p, &grid)?, variant)?)
            };
            (format!("smoothing_{:?}", s.variant).to_lowercase(), run())
        })
        .collect();
    finish_checks(ctx, Command::Semigroup, results, sink)
}

/// Hypothesis refusals are recorded and, in strict mode, turn into exit 3. Anything
/// else aborts the command.
fn finish_checks(
    ctx: &Context,
    command: Command,
    results: Vec<(String, Result<VerificationReport, Failure>)>,
    sink: &mut Sink,
) -> Result<Status, Failure> {
    let mut reports = Vec::new();
    let mut refused = Vec::new();
    for (index, (check, r)) in results.into_iter().enumerate() {
        match r {
            Ok(rep) => reports.push(rep),
            Err(Failure::Hypothesis(reason)) => refused.push(Refused { index, check, reason }),
            Err(e) => return Err(e),
        }
    }
    let pass = reports.iter().all(|r| r.verdict != Verdict::Fail);
    for r in &reports {
        println!("{:<32} {:>10} max_ratio={}", r.inequality_id, verdict_str(r.verdict), cell(r.max_ratio));
    }
    for r in &refused {
        println!("{:<32} {:>10} {}", r.check, "refused", r.reason);
    }
    let rows: Vec<Vec<String>> = reports
        .iter()
        .flat_map(|rep| {
            rep.rows.iter().map(|r| {
                vec![
                    rep.inequality_id.clone(),
                    r.sample.clone(),
                    cell(r.t),
                    cell(Some(r.lhs)),
                    cell(Some(r.rhs)),
                    cell(r.ratio),
                    r.case.clone().unwrap_or_default(),
                ]
            })
        })
        .collect();
    sink.csv("ratios.csv", &["inequality_id", "sample", "t", "lhs", "rhs", "ratio", "case"], &rows)?;
    sink.csv("curves.csv", &["inequality_id", "t", "max_ratio", "samples"], &curves(&reports))?;
    let strict_refusal = ctx.strict && !refused.is_empty();
    sink.json(
        &report_file(command),
        &CheckEnvelope {
            schema_version: REPORT_SCHEMA_VERSION,
            command: command.as_str(),
            seed: ctx.seed,
            reports,
            refused,
            pass,
        },
    )?;
    Ok(if strict_refusal {
        Status::Hypothesis
    } else if pass {
        Status::Ok
    } else {
        Status::AssertionFailed
    })
}

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Unstable => "unstable",
        Verdict::Fail => "fail",
    }
}

/// Maximum ratio over the corpus at each `t`, in row order of first appearance.
fn curves(reports: &[VerificationReport]) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for rep in reports {
        let mut order: Vec<u64> = Vec::new();
        let mut acc: BTreeMap<u64, (f64, Option<f64>, usize)> = BTreeMap::new();
        for r in &rep.rows {
            let Some(t) = r.t else { continue };
            let e = acc.entry(t.to_bits()).or_insert_with(|| {
                order.push(t.to_bits());
                (t, None, 0)
            });
            if let Some(x) = r.ratio {
                e.1 = Some(e.1.map_or(x, |m: f64| m.max(x)));
            }
            e.2 += 1;
        }
        for k in order {
            let (t, m, count) = acc[&k];
            out.push(vec![rep.inequality_id.clone(), cell(Some(t)), cell(m), count.to_string()]);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// solve

#[derive(Serialize)]
struct SolverSummary {
    converged: bool,
    iterations: usize,
    damped: bool,
    e0_norm: f64,
    u_norm: f64,
    max_contraction_ratio: Option<f64>,
    mild_residual: f64,
    max_divergence: f64,
}

#[derive(Serialize)]
struct SolveEnvelope {
    schema_version: u32,
    command: &'static str,
    seed: Option<u64>,
    grid: crate::inequalities::report::GridSummary,
    horizon: f64,
    steps: usize,
    exponents: BTreeMap<String, ExponentSummary>,
    diagnostics: ExistenceDiagnostics,
    solver: Option<SolverSummary>,
    iterations: Vec<IterationRow>,
    abort: Option<String>,
    pass: bool,
}

fn solve(ctx: &Context, sink: &mut Sink) -> Result<Status, Failure> {
    let cfg = ctx.cfg;
    let s = cfg.solve.as_ref().expect("checked by check_command");
    let grid = cfg.build_grid()?;
    let times = TimeGrid::new(s.horizon, s.steps).map_err(|e| Failure::Schema(format!("solve: {e}")))?;
    let p_t = cfg.field_on_times(&s.p_t, &times)?;
    let q_x = cfg.field(&s.q_x, &grid)?;
    let u0 = vortex_sum(&grid, &s.initial)?;
    let forcing = if s.forcing.is_empty() { Forcing::Zero } else { Forcing::Steady(vortex_sum(&grid, &s.forcing)?) };
    let spec = ProblemSpec {
        alpha: s.alpha,
        u0,
        forcing,
        times: times.clone(),
        p_t: p_t.clone(),
        q_x: q_x.clone(),
        picard: s.picard,
        nonlinear: s.nonlinear,
    };
    spec.validate()?;

    let mut params = ExistenceParams::new(s.alpha, Bounds::from(&p_t.summary()), Bounds::from(&q_x.summary()));
    params.nu = s.nu;
    if s.log_holder {
        let opts = LogHolderOptions { seed: ctx.seed(), ..LogHolderOptions::default() };
        let ok = |e: LogHolderEstimate| e.pass_local && e.pass_decay;
        params.q_log_holder = Some(ok(log_holder_check(&q_x, &opts)?));
        if !s.theorem.is_local() {
            params.p_log_holder = Some(ok(log_holder_check(&p_t, &opts)?));
        }
    }
    let e0 = spec.e0()?;
    let e0_norm = spec.norm(&e0)?;
    let corpus = vortex_corpus(&spec, s.cb_samples, ctx.seed())?;
    let c_b = measure_cb(&spec, &corpus)?;
    let diagnostics = existence_hypotheses(s.theorem, &params)?.with_measurements(c_b, e0_norm);
    for c in diagnostics.failed() {
        println!("hypothesis failed: {} ({} {} {})", c.condition, cell(Some(c.lhs)), rel_str(c), cell(Some(c.rhs)));
    }

    let mut envelope = SolveEnvelope {
        schema_version: REPORT_SCHEMA_VERSION,
        command: Command::Solve.as_str(),
        seed: ctx.seed,
        grid: (&grid).into(),
        horizon: s.horizon,
        steps: s.steps,
        exponents: [("p_t".to_string(), p_t.summary()), ("q_x".to_string(), q_x.summary())].into(),
        diagnostics,
        solver: None,
        iterations: Vec::new(),
        abort: None,
        pass: false,
    };
    let status = if ctx.strict && !envelope.diagnostics.pass {
        envelope.abort = Some("strict mode: hypotheses failed, solver not run".into());
        Status::Hypothesis
    } else {
        match picard_solve(&spec) {
            Ok(out) => {
                let residual = mild_residual(&out.u, &spec)?;
                let summary = SolverSummary {
                    converged: out.converged,
                    iterations: out.iterations(),
                    damped: out.damped,
                    e0_norm: out.e0_norm,
                    u_norm: out.u_norm,
                    max_contraction_ratio: out.max_ratio(),
                    mild_residual: residual,
                    max_divergence: out.u.max_divergence()?,
                };
                println!(
                    "picard: converged={} iterations={} residual={} |u|={} |e0|={}",
                    summary.converged,
                    summary.iterations,
                    cell(Some(residual)),
                    cell(Some(summary.u_norm)),
                    cell(Some(summary.e0_norm))
                );
                envelope.pass = summary.converged && residual.is_finite();
                envelope.iterations = out.rows;
                envelope.solver = Some(summary);
                if envelope.pass {
                    Status::Ok
                } else {
                    Status::AssertionFailed
                }
            }
            Err(e @ Error::Divergence { .. }) => {
                envelope.abort = Some(e.to_string());
                Status::Numerical
            }
            Err(e) => return Err(e.into()),
        }
    };
    let rows: Vec<Vec<String>> = envelope
        .iterations
        .iter()
        .map(|r| vec![r.iteration.to_string(), cell(Some(r.increment)), cell(r.ratio), cell(Some(r.norm))])
        .collect();
    let conditions: Vec<Vec<String>> = envelope
        .diagnostics
        .hypothesis_checks
        .iter()
        .map(|c| vec![c.condition.clone(), cell(Some(c.lhs)), rel_str(c).into(), cell(Some(c.rhs)), c.pass.to_string()])
        .collect();
    sink.csv("iterations.csv", &["iteration", "increment", "ratio", "norm"], &rows)?;
    sink.csv("conditions.csv", &["condition", "lhs", "relation", "rhs", "pass"], &conditions)?;
    sink.json(&report_file(Command::Solve), &envelope)?;
    Ok(status)
}

fn rel_str(c: &crate::nse::Condition) -> &'static str {
    match c.relation {
        crate::nse::Rel::Lt => "<",
        crate::nse::Rel::Le => "<=",
        crate::nse::Rel::Eq => "=",
    }
}

// ---------------------------------------------------------------------------
// report

#[derive(Serialize)]
struct SummaryRow {
    source: String,
    id: String,
    verdict: String,
    max_ratio: Option<f64>,
}

#[derive(Serialize)]
struct SummaryEnvelope {
    schema_version: u32,
    command: &'static str,
    rows: Vec<SummaryRow>,
    pass: bool,
}

/// Reads the reports already in the output directory and writes one summary line per check.
fn report(ctx: &Context, sink: &mut Sink) -> Result<Status, Failure> {
    let mut rows = Vec::new();
    let mut pass = true;
    let mut found = false;
    for command in [Command::Norm, Command::Verify, Command::Semigroup, Command::Solve] {
        let path = ctx.out.join(report_file(command));
        let Ok(text) = std::fs::read_to_string(&path) else { continue };
        let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))?;
        if v["schema_version"].as_u64() != Some(REPORT_SCHEMA_VERSION as u64) {
            return Err(Failure::Schema(format!("{}: unsupported schema_version", path.display())));
        }
        found = true;
        pass &= v["pass"].as_bool().unwrap_or(false);
        let source = command.as_str().to_string();
        let str_of = |x: &Value| x.as_str().unwrap_or_default().to_string();
        match command {
            Command::Norm => {
                for e in v["norms"].as_array().into_iter().flatten() {
                    let max = e["samples"]
                        .as_array()
                        .into_iter()
                        .flatten()
                        .filter_map(|s| s["norm"].as_f64())
                        .reduce(f64::max);
                    let verdict = if e["pass"].as_bool() == Some(true) { "pass" } else { "fail" };
                    rows.push(SummaryRow {
                        source: source.clone(),
                        id: str_of(&e["exponent"]),
                        verdict: verdict.into(),
                        max_ratio: max,
                    });
                }
            }
            Command::Verify | Command::Semigroup => {
                for r in v["reports"].as_array().into_iter().flatten() {
                    rows.push(SummaryRow {
                        source: source.clone(),
                        id: str_of(&r["inequality_id"]),
                        verdict: str_of(&r["verdict"]),
                        max_ratio: r["max_ratio"].as_f64(),
                    });
                }
                for r in v["refused"].as_array().into_iter().flatten() {
                    rows.push(SummaryRow {
                        source: source.clone(),
                        id: str_of(&r["check"]),
                        verdict: "refused".into(),
                        max_ratio: None,
                    });
                }
            }
            Command::Solve => {
                let d = &v["diagnostics"];
                let verdict = if v["pass"].as_bool() == Some(true) { "pass" } else { "fail" };
                rows.push(SummaryRow {
                    source: source.clone(),
                    id: str_of(&d["theorem_id"]),
                    verdict: verdict.into(),
                    max_ratio: v["solver"]["max_contraction_ratio"].as_f64(),
                });
            }
            Command::Report => unreachable!(),
        }
    }
    if !found {
        return Err(Failure::Schema(format!("{}: no reports to summarise", ctx.out.display())));
    }
    let csv_rows: Vec<Vec<String>> =
        rows.iter().map(|r| vec![r.source.clone(), r.id.clone(), r.verdict.clone(), cell(r.max_ratio)]).collect();
    sink.csv("summary.csv", &["source", "id", "verdict", "max_ratio"], &csv_rows)?;
    sink.json(
        "summary.json",
        &SummaryEnvelope { schema_version: REPORT_SCHEMA_VERSION, command: Command::Report.as_str(), rows, pass },
    )?;
    Ok(if pass { Status::Ok } else { Status::AssertionFailed })
}
