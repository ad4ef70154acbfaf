//! Hypothesis gates of the local and global existence theorems.
//!
//! The local gates all have the shape `2α/p⁻ + X < α − 1/2` for a theorem-specific `X`,
//! and the contraction exponent is `δ = (α − 1/2 − 2α/p⁻ − X)/α`, which is positive exactly
//! when the main condition holds. The spatial dimension in the formulas is 3, except for
//! the one-dimensional theorem.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exponents::{Exponent, ExponentSummary};
use crate::inequalities::profiles::{intersection_exponent, DecayProfile};

/// Relative tolerance for the equalities in the hypotheses.
pub const EQUALITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremId {
    /// `L^{p(·)}(0,T; L^{q(·)})` with `2 < q⁻ ≤ q⁺ = q_∞ < ∞`.
    LocalBoundedQ,
    /// `L^{p(·)}(0,T; L^{q(·)})` with `q_∞ = ∞`.
    LocalUnboundedQ,
    /// `L^{p(·)}(0,T; L^{q(·)} ∩ L^∞)`.
    LocalInfty,
    /// `L^{p(·)}(0,T; L^{q(·)} ∩ L^ν)`.
    LocalNu,
    /// `L^{p(·)}(0,T; L^{q(·)})` with `q⁻ = q_∞ > 3`.
    LocalEqualLimits,
    /// `L^{p(·)}(0,T; L^{q(·)}(ℝ) ∩ L²(ℝ))`.
    LocalOneDim,
    /// Small data in `L^{p(·)}(0,∞; L^{q(·)} ∩ L^∞)`.
    GlobalInfty,
    /// Small data in `L^{p(·)}(0,∞; L^q)`, `q` constant.
    GlobalConstantQ,
    /// Small data in `L^{p(·)}(0,T; L^{q(·)})` for any `T`.
    GlobalFiniteHorizon,
}

impl TheoremId {
    pub const ALL: [TheoremId; 9] = [
        Self::LocalBoundedQ,
        Self::LocalUnboundedQ,
        Self::LocalInfty,
        Self::LocalNu,
        Self::LocalEqualLimits,
        Self::LocalOneDim,
        Self::GlobalInfty,
        Self::GlobalConstantQ,
        Self::GlobalFiniteHorizon,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::LocalBoundedQ => "local_bounded_q",
            Self::LocalUnboundedQ => "local_unbounded_q",
            Self::LocalInfty => "local_infty",
            Self::LocalNu => "local_nu",
            Self::LocalEqualLimits => "local_equal_limits",
            Self::LocalOneDim => "local_one_dim",
            Self::GlobalInfty => "global_infty",
            Self::GlobalConstantQ => "global_constant_q",
            Self::GlobalFiniteHorizon => "global_finite_horizon",
        }
    }

    pub fn is_local(self) -> bool {
        !matches!(self, Self::GlobalInfty | Self::GlobalConstantQ | Self::GlobalFiniteHorizon)
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL.into_iter().find(|t| t.as_str() == s).ok_or_else(|| invalid(format!("unknown theorem id {s:?}")))
    }
}

/// Bounds of one exponent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub minus: Exponent,
    pub plus: Exponent,
    /// Limit at infinity, when it exists.
    pub infinity: Option<Exponent>,
}

impl Bounds {
    pub fn constant(v: Exponent) -> Self {
        Self { minus: v, plus: v, infinity: Some(v) }
    }
}

impl From<&ExponentSummary> for Bounds {
    fn from(s: &ExponentSummary) -> Self {
        Self { minus: s.minus, plus: s.plus, infinity: s.infinity }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceParams {
    pub alpha: f64,
    /// Temporal exponent.
    pub p: Bounds,
    /// Spatial exponent.
    pub q: Bounds,
    /// Companion exponent of the `L^ν` theorem.
    pub nu: Option<f64>,
    /// Log-Hölder continuity of `q` and `p`, when it has been checked.
    pub q_log_holder: Option<bool>,
    pub p_log_holder: Option<bool>,
}

impl ExistenceParams {
    pub fn new(alpha: f64, p: Bounds, q: Bounds) -> Self {
        Self { alpha, p, q, nu: None, q_log_holder: None, p_log_holder: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Rel {
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "=")]
    Eq,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Condition {
    pub condition: String,
    pub lhs: f64,
    pub relation: Rel,
    pub rhs: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExistenceDiagnostics {
    pub theorem_id: TheoremId,
    pub hypothesis_checks: Vec<Condition>,
    /// Decay exponents the gate used, by name.
    pub profiles: Vec<(String, f64)>,
    pub p_tilde_plus: Option<f64>,
    pub delta: Option<f64>,
    pub c_b: Option<f64>,
    pub e0_norm: Option<f64>,
    /// `4 Ĉ_B ‖e₀‖`
    pub contraction_margin: Option<f64>,
    pub pass: bool,
}

impl ExistenceDiagnostics {
    /// Adds the smallness condition `4 Ĉ_B ‖e₀‖ < 1` from measured values.
    pub fn with_measurements(mut self, c_b: f64, e0_norm: f64) -> Self {
        let margin = 4.0 * c_b * e0_norm;
        self.c_b = Some(c_b);
        self.e0_norm = Some(e0_norm);
        self.contraction_margin = Some(margin);
        let c = cond("4 C_B |e0| < 1", margin, Rel::Lt, 1.0);
        self.pass &= c.pass;
        self.hypothesis_checks.push(c);
        self
    }

    pub fn failed(&self) -> Vec<&Condition> {
        self.hypothesis_checks.iter().filter(|c| !c.pass).collect()
    }
}

fn cond(name: &str, lhs: f64, relation: Rel, rhs: f64) -> Condition {
    let pass = match relation {
        Rel::Lt => lhs < rhs,
        Rel::Le => lhs <= rhs + EQUALITY_TOL * rhs.abs().max(1.0),
        Rel::Eq => {
            (lhs == rhs)
                || (lhs.is_finite() && rhs.is_finite() && (lhs - rhs).abs() <= EQUALITY_TOL * rhs.abs().max(1.0))
        }
    };
    Condition { condition: name.to_string(), lhs, relation, rhs, pass }
}

fn flag(name: &str, v: bool) -> Condition {
    let x = if v { 1.0 } else { 0.0 };
    cond(name, x, Rel::Eq, 1.0)
}

fn val(e: Exponent) -> f64 {
    e.value()
}

fn inv(e: Exponent) -> f64 {
    e.reciprocal()
}

/// Evaluates every hypothesis of a theorem.
pub fn existence_hypotheses(theorem: TheoremId, params: &ExistenceParams) -> Result<ExistenceDiagnostics> {
    let a = params.alpha;
    if !a.is_finite() {
        return Err(invalid("alpha must be finite"));
    }
    let (p, q) = (params.p, params.q);
    let (pm, qm, qp) = (val(p.minus), val(q.minus), val(q.plus));
    let mut checks = Vec::new();
    let mut profiles = Vec::new();
    let lower = if theorem == TheoremId::LocalOneDim { 0.75 } else { 0.5 };
    checks.push(cond("alpha_low < alpha", lower, Rel::Lt, a));
    checks.push(cond("alpha <= 1", a, Rel::Le, 1.0));
    if let Some(v) = params.q_log_holder {
        checks.push(flag("q log-Hölder", v));
    }
    let q_inf = q.infinity.map(val).unwrap_or(f64::NAN);
    let p_inf = p.infinity.map(val).unwrap_or(f64::NAN);
    let two_a_p = 2.0 * a * inv(p.minus);
    let rhs_main = a - 0.5;
    // ϑ₁ of q on (0, 1], NaN when its hypotheses fail (the main condition then fails too).
    let vartheta1 = || match q.infinity {
        Some(Exponent::Finite(qi)) if qm.is_finite() => {
            DecayProfile::Vartheta { p_minus: qm, p_infinity: qi }.eval(1.0).unwrap_or(f64::NAN)
        }
        Some(Exponent::Infinite) if qm.is_finite() => {
            DecayProfile::VarthetaInfty { p_minus: qm }.eval(1.0).unwrap_or(f64::NAN)
        }
        _ => f64::NAN,
    };
    let mut x: Option<f64> = None;
    match theorem {
        TheoremId::LocalBoundedQ => {
            checks.push(cond("2 < q_minus", 2.0, Rel::Lt, qm));
            checks.push(cond("q_plus < inf", if qp.is_finite() { 0.0 } else { 1.0 }, Rel::Lt, 1.0));
            checks.push(cond("q_plus = q_infinity", qp, Rel::Eq, q_inf));
            checks.push(cond("2 < p_minus", 2.0, Rel::Lt, pm));
            let t1 = vartheta1();
            profiles.push(("vartheta_1".to_string(), t1));
            x = Some(1.5 * t1);
            checks.push(cond(
                "2 alpha / p_minus + 3 vartheta_1 / 2 < alpha - 1/2",
                two_a_p + 1.5 * t1,
                Rel::Lt,
                rhs_main,
            ));
            checks.push(cond("3 / (2 alpha - 1) < q_minus", 3.0 / (2.0 * a - 1.0), Rel::Lt, qm));
            checks.push(cond("4 alpha / (2 alpha - 1) < p_minus", 4.0 * a / (2.0 * a - 1.0), Rel::Lt, pm));
        }
        TheoremId::LocalUnboundedQ => {
            checks.push(cond("2 < q_minus", 2.0, Rel::Lt, qm));
            checks.push(cond(
                "q_infinity = inf",
                if q.infinity == Some(Exponent::Infinite) { 1.0 } else { 0.0 },
                Rel::Eq,
                1.0,
            ));
            checks.push(cond("2 < p_minus", 2.0, Rel::Lt, pm));
            x = Some(3.0 * inv(q.minus));
            checks.push(cond(
                "2 alpha / p_minus + 3 / q_minus < alpha - 1/2",
                two_a_p + 3.0 * inv(q.minus),
                Rel::Lt,
                rhs_main,
            ));
            checks.push(cond("3 / (2 alpha - 1) < q_minus", 3.0 / (2.0 * a - 1.0), Rel::Lt, qm));
            checks.push(cond("4 alpha / (2 alpha - 1) < p_minus", 4.0 * a / (2.0 * a - 1.0), Rel::Lt, pm));
        }
        TheoremId::LocalInfty => {
            x = Some(0.0);
            checks.push(cond("4 alpha / (2 alpha - 1) < p_minus", 4.0 * a / (2.0 * a - 1.0), Rel::Lt, pm));
        }
        TheoremId::LocalNu => {
            let nu = params.nu.ok_or_else(|| invalid("local_nu needs nu"))?;
            checks.push(cond("2 <= q_minus", 2.0, Rel::Le, qm));
            checks.push(cond("3 < nu", 3.0, Rel::Lt, nu));
            checks.push(cond("nu <= 2 q_minus", nu, Rel::Le, 2.0 * qm));
            checks.push(cond("2 < p_minus", 2.0, Rel::Lt, pm));
            let m = intersection_exponent(qm, q.plus, nu);
            profiles.push(("max(6/q_minus (1 - nu/2q_plus), 3/nu)".to_string(), m));
            x = Some(0.5 * m);
            checks.push(cond(
                "2 alpha / p_minus + max(6/q_minus (1 - nu/2q_plus), 3/nu) / 2 < alpha - 1/2",
                two_a_p + 0.5 * m,
                Rel::Lt,
                rhs_main,
            ));
        }
        TheoremId::LocalEqualLimits => {
            checks.push(cond("q_minus = q_infinity", qm, Rel::Eq, q_inf));
            checks.push(cond("3 < q_minus", 3.0, Rel::Lt, qm));
            checks.push(cond("4 < p_minus", 4.0, Rel::Lt, pm));
            let phi = 2.0 * inv(q.minus) - inv(q.plus);
            profiles.push(("2/q_minus - 1/q_plus".to_string(), phi));
            x = Some(1.5 * phi);
            checks.push(cond(
                "2 alpha / p_minus + 3 (2/q_minus - 1/q_plus) / 2 < alpha - 1/2",
                two_a_p + 1.5 * phi,
                Rel::Lt,
                rhs_main,
            ));
        }
        TheoremId::LocalOneDim => {
            checks.push(cond("2 <= q_minus", 2.0, Rel::Le, qm));
            checks.push(cond("q_minus = q_infinity", qm, Rel::Eq, q_inf));
            let theta = if qm.is_finite() {
                DecayProfile::Varsigma { p_minus: qm, p_plus: q.plus }.eval(1.0).unwrap_or(f64::NAN)
            } else {
                f64::NAN
            };
            profiles.push(("varsigma".to_string(), theta));
            let m = 0.5f64.max((1.0 + theta) / (2.0 * a));
            let m = if theta.is_nan() { f64::NAN } else { m };
            x = Some(0.5 * m);
            checks.push(cond(
                "2 alpha / p_minus + max(1/2, (1 + varsigma) / 2 alpha) / 2 < alpha - 1/2",
                two_a_p + 0.5 * m,
                Rel::Lt,
                rhs_main,
            ));
        }
        TheoremId::GlobalInfty => {
            let c = 2.0 * a / (2.0 * a - 1.0);
            checks.push(cond("p_minus = 2 alpha / (2 alpha - 1)", pm, Rel::Eq, c));
            checks.push(cond("p_infinity = 2 alpha / (2 alpha - 1)", p_inf, Rel::Eq, c));
            checks.push(cond("p_plus < inf", if p.plus.is_finite() { 0.0 } else { 1.0 }, Rel::Lt, 1.0));
        }
        TheoremId::GlobalConstantQ => {
            checks.push(cond("q constant", qm, Rel::Eq, qp));
            checks.push(cond("3 / (2 alpha - 1) < q", 3.0 / (2.0 * a - 1.0), Rel::Lt, qm));
            let c = 2.0 * a / (2.0 * a - 1.0 - 3.0 * inv(q.minus));
            checks.push(cond("p_minus = 2 alpha / (2 alpha - 1 - 3/q)", pm, Rel::Eq, c));
            checks.push(cond("p_infinity = 2 alpha / (2 alpha - 1 - 3/q)", p_inf, Rel::Eq, c));
            checks.push(cond("p_plus < inf", if p.plus.is_finite() { 0.0 } else { 1.0 }, Rel::Lt, 1.0));
        }
        TheoremId::GlobalFiniteHorizon => {
            checks.push(cond("3 / (2 alpha - 1) < q_minus", 3.0 / (2.0 * a - 1.0), Rel::Lt, qm));
            checks.push(cond("q_plus = q_infinity", qp, Rel::Eq, q_inf));
            checks.push(cond("q_plus < inf", if qp.is_finite() { 0.0 } else { 1.0 }, Rel::Lt, 1.0));
            checks.push(cond("2 alpha / (2 alpha - 1) < p_minus", 2.0 * a / (2.0 * a - 1.0), Rel::Lt, pm));
            checks.push(cond("p_plus < inf", if p.plus.is_finite() { 0.0 } else { 1.0 }, Rel::Lt, 1.0));
            let t1 = vartheta1();
            profiles.push(("vartheta_1".to_string(), t1));
            checks.push(cond(
                "alpha / p_minus + 3 vartheta_1 / 2 <= alpha - 1/2",
                a * inv(p.minus) + 1.5 * t1,
                Rel::Le,
                rhs_main,
            ));
        }
    }
    if !theorem.is_local() {
        if let Some(v) = params.p_log_holder {
            checks.push(flag("p log-Hölder", v));
        }
    }
    let p_tilde_plus = if pm > 2.0 { Some(if pm.is_finite() { pm / (pm - 2.0) } else { 1.0 }) } else { None };
    let delta = x.map(|x| (a - 0.5 - two_a_p - x) / a);
    let pass = checks.iter().all(|c| c.pass);
    Ok(ExistenceDiagnostics {
        theorem_id: theorem,
        hypothesis_checks: checks,
        profiles,
        p_tilde_plus,
        delta,
        c_b: None,
        e0_norm: None,
        contraction_margin: None,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> Exponent {
        Exponent::Finite(v)
    }

    #[test]
    fn ids_round_trip() {
        for t in TheoremId::ALL {
            assert_eq!(t.as_str().parse::<TheoremId>().unwrap(), t);
        }
        assert!("local".parse::<TheoremId>().is_err());
    }

    #[test]
    fn main_condition_and_delta_agree_in_sign() {
        for pm in [3.0, 5.0, 8.0, 20.0] {
            for qv in [4.0, 7.0, 12.0, 40.0] {
                let d = existence_hypotheses(
                    TheoremId::LocalBoundedQ,
                    &ExistenceParams::new(0.9, Bounds::constant(f(pm)), Bounds::constant(f(qv))),
                )
                .unwrap();
                let main = &d.hypothesis_checks[6];
                assert_eq!(main.pass, d.delta.unwrap() > 0.0, "p {pm} q {qv}");
            }
        }
    }
}
