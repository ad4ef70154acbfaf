//! Piecewise decay exponents. Every profile has one branch for `t ≤ 1` and one for `t > 1`.

use serde::{Deserialize, Serialize};

use crate::error::{hypothesis, Result};
use crate::exponents::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// `0 < t ≤ 1`
    Small,
    /// `t > 1`
    Large,
}

pub fn branch(t: f64) -> Branch {
    if t <= 1.0 {
        Branch::Small
    } else {
        Branch::Large
    }
}

fn inv(e: Exponent) -> f64 {
    e.reciprocal()
}

/// `a/b` for exponents with `x/∞ = 0` (and `∞/∞` treated as 1).
fn ratio(a: Exponent, b: Exponent) -> f64 {
    match (a, b) {
        (Exponent::Infinite, Exponent::Infinite) => 1.0,
        (_, Exponent::Infinite) => 0.0,
        (Exponent::Infinite, _) => f64::INFINITY,
        (Exponent::Finite(x), Exponent::Finite(y)) => x / y,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum DecayProfile {
    /// Needs `2 ≤ p⁻ ≤ p⁺ = p_∞ < ∞`.
    Vartheta {
        p_minus: f64,
        p_infinity: f64,
    },
    /// The `p_∞ = ∞` companion: `2/p⁻` then `0`.
    VarthetaInfty {
        p_minus: f64,
    },
    /// Needs `2 ≤ p⁻ = p_∞`.
    Varphi {
        p_minus: f64,
        p_plus: Exponent,
    },
    /// Input exponent `p`, output exponent `r`, companion `1 ≤ ν ≤ r⁻`.
    OmegaGeneral {
        p_minus: Exponent,
        p_plus: Exponent,
        r_minus: Exponent,
        r_plus: Exponent,
        nu: f64,
    },
    Zeta {
        p_minus: Exponent,
        p_plus: Exponent,
    },
    /// Input exponent `r`, output limit `p_∞`.
    Sigma {
        r_minus: Exponent,
        r_plus: Exponent,
        p_infinity: Exponent,
    },
    /// Input exponent `r` with `r_∞ = r⁻ ≤ p⁻`, output exponent `p`.
    Psi {
        r_minus: Exponent,
        r_plus: Exponent,
        p_minus: Exponent,
        p_plus: Exponent,
    },
    /// Needs `2 ≤ p⁻`.
    Varsigma {
        p_minus: f64,
        p_plus: Exponent,
    },
    /// The `p⁻ = p_∞ = 2` case of `Varsigma`.
    KProfile {
        p_plus: Exponent,
    },
}

impl DecayProfile {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Vartheta { .. } => "vartheta",
            Self::VarthetaInfty { .. } => "vartheta_infty",
            Self::Varphi { .. } => "varphi",
            Self::OmegaGeneral { .. } => "omega_general",
            Self::Zeta { .. } => "zeta",
            Self::Sigma { .. } => "sigma",
            Self::Psi { .. } => "psi",
            Self::Varsigma { .. } => "varsigma",
            Self::KProfile { .. } => "k_profile",
        }
    }

    /// Checks the parameter region the formula is stated for.
    pub fn validate(&self) -> Result<()> {
        let need = |ok: bool, what: &str| if ok { Ok(()) } else { Err(hypothesis(format!("{}: {what}", self.name()))) };
        match *self {
            Self::Vartheta { p_minus, p_infinity } => {
                need(p_minus >= 2.0, "2 <= p_minus")?;
                need(p_minus <= p_infinity, "p_minus <= p_infinity")?;
                need(p_infinity.is_finite(), "p_infinity < inf")
            }
            Self::VarthetaInfty { p_minus } => need(p_minus >= 2.0, "2 <= p_minus"),
            Self::Varphi { p_minus, p_plus } => {
                need(p_minus >= 2.0, "2 <= p_minus")?;
                need(Exponent::Finite(p_minus) <= p_plus, "p_minus <= p_plus")
            }
            Self::OmegaGeneral { p_minus, p_plus, r_minus, r_plus, nu } => {
                need(p_minus >= Exponent::Finite(1.0), "1 <= p_minus")?;
                need(p_minus <= p_plus && r_minus <= r_plus, "ordered bounds")?;
                need(nu >= 1.0, "1 <= nu")?;
                need(Exponent::Finite(nu) <= r_minus, "nu <= r_minus")
            }
            Self::Zeta { p_minus, p_plus } => {
                need(p_minus >= Exponent::Finite(1.0), "1 <= p_minus")?;
                need(p_minus <= p_plus, "p_minus <= p_plus")
            }
            Self::Sigma { r_minus, r_plus, p_infinity } => {
                need(r_minus >= Exponent::Finite(1.0), "1 <= r_minus")?;
                need(r_minus <= r_plus, "r_minus <= r_plus")?;
                let d = (1.0 + inv(p_infinity) - inv(r_minus)) * (1.0 + inv(p_infinity) - inv(r_plus));
                need(d > 0.0, "1 + 1/p_infinity - 1/r must stay positive")
            }
            Self::Psi { r_minus, r_plus, p_minus, p_plus } => {
                need(r_minus >= Exponent::Finite(1.0), "1 <= r_minus")?;
                need(r_minus <= r_plus && p_minus <= p_plus, "ordered bounds")?;
                need(r_minus <= p_minus, "r_minus <= p_minus")
            }
            Self::Varsigma { p_minus, p_plus } => {
                need(p_minus >= 2.0, "2 <= p_minus")?;
                need(Exponent::Finite(p_minus) <= p_plus, "p_minus <= p_plus")
            }
            Self::KProfile { p_plus } => need(p_plus >= Exponent::Finite(2.0), "2 <= p_plus"),
        }
    }

    /// Branch value without re-validating.
    pub fn value(&self, b: Branch) -> f64 {
        let small = b == Branch::Small;
        match *self {
            Self::Vartheta { p_minus, p_infinity } => {
                let (pm, pi) = (p_minus, p_infinity);
                let a = pi * (1.0 - 2.0 / pm);
                if small {
                    (2.0 / pm - 1.0 / pi) * ((2.0 + a) / (1.0 + a) - 1.0 / (pi - 1.0))
                } else {
                    (1.0 / pi) * (a / (1.0 + a) + 1.0 / (pi - 1.0))
                }
            }
            Self::VarthetaInfty { p_minus } => {
                if small {
                    2.0 / p_minus
                } else {
                    0.0
                }
            }
            Self::Varphi { p_minus, p_plus } => {
                if small {
                    2.0 / p_minus - inv(p_plus)
                } else {
                    inv(p_plus)
                }
            }
            Self::OmegaGeneral { p_minus, p_plus, r_minus, r_plus, nu } => {
                let nu = Exponent::Finite(nu);
                if small {
                    inv(p_minus) * (1.0 - ratio(nu, r_plus))
                } else {
                    inv(p_plus) * (1.0 - ratio(nu, r_minus))
                }
            }
            Self::Zeta { p_minus, p_plus } => {
                if small {
                    inv(p_minus)
                } else {
                    inv(p_plus)
                }
            }
            Self::Sigma { r_minus, r_plus, p_infinity } => {
                let pi = inv(p_infinity);
                let delta = inv(r_minus) - inv(r_plus);
                let d = (1.0 + pi - inv(r_minus)) * (1.0 + pi - inv(r_plus));
                if small {
                    (inv(r_minus) - pi) * (1.0 + pi * delta / d)
                } else {
                    (inv(r_plus) - pi) * (1.0 - pi * delta / d)
                }
            }
            Self::Psi { r_minus, r_plus, p_minus, p_plus } => {
                if small {
                    inv(r_minus) * (1.0 - ratio(r_minus, p_plus))
                } else {
                    inv(r_plus) * (1.0 - ratio(r_minus, p_minus))
                }
            }
            Self::Varsigma { p_minus, p_plus } => {
                let zeta = if small { 2.0 / p_minus } else { 2.0 * inv(p_plus) };
                young_theta(Exponent::Finite(p_minus), p_plus, zeta, b).0
            }
            Self::KProfile { p_plus } => {
                let zeta = if small { 1.0 } else { 2.0 * inv(p_plus) };
                young_theta(Exponent::Finite(2.0), p_plus, zeta, b).0
            }
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(hypothesis(format!("{}: t must be positive", self.name())));
        }
        self.validate()?;
        Ok(self.value(branch(t)))
    }

    /// `[value on (0,1], value on (1,∞)]`
    pub fn branches(&self) -> Result<[f64; 2]> {
        self.validate()?;
        Ok([self.value(Branch::Small), self.value(Branch::Large)])
    }
}

/// Which line of the two-case table produced a value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaCase {
    /// `(r⁻/r⁺)(1 − 1/r⁻) + ζ(1 − r⁻/r⁺)`
    Interpolated,
    /// `1 − 1/r⁻`
    Saturated,
    /// `r⁻ = ∞`, value `ζ`
    InfiniteOutput,
}

/// The two-case exponent shared by the `L¹`-intersection estimate and `ς`.
///
/// The first line applies when `t ≤ 1` and `1 − 1/r⁻ ≤ ζ`, or when `t > 1` and `1 − 1/r⁻ > ζ`.
pub fn young_theta(r_minus: Exponent, r_plus: Exponent, zeta: f64, b: Branch) -> (f64, ThetaCase) {
    let Exponent::Finite(rm) = r_minus else {
        return (zeta, ThetaCase::InfiniteOutput);
    };
    let sat = 1.0 - 1.0 / rm;
    let first = match b {
        Branch::Small => sat <= zeta,
        Branch::Large => sat > zeta,
    };
    if first {
        let q = ratio(r_minus, r_plus);
        (q * sat + zeta * (1.0 - q), ThetaCase::Interpolated)
    } else {
        (sat, ThetaCase::Saturated)
    }
}

/// Exponent of the `L^{p(·)} ∩ L¹ → L^{r(·)}` mollifier estimate, with `ζ = 1/p⁻` or `1/p⁺`.
pub fn assertion_theta(
    p_minus: Exponent,
    p_plus: Exponent,
    r_minus: Exponent,
    r_plus: Exponent,
    t: f64,
) -> (f64, ThetaCase) {
    let b = branch(t);
    let zeta = match b {
        Branch::Small => p_minus.reciprocal(),
        Branch::Large => p_plus.reciprocal(),
    };
    young_theta(r_minus, r_plus, zeta, b)
}

/// `ω` of the `L^{p(·)} ∩ L^ν` product estimate: `2/p⁻(1 − ν/2p⁺)`, then `2/p⁺(1 − ν/2p⁻)`.
pub fn product_omega(p_minus: f64, p_plus: Exponent, nu: f64, b: Branch) -> f64 {
    let half_nu = Exponent::Finite(nu / 2.0);
    match b {
        Branch::Small => (2.0 / p_minus) * (1.0 - ratio(half_nu, p_plus)),
        Branch::Large => 2.0 * p_plus.reciprocal() * (1.0 - nu / (2.0 * p_minus)),
    }
}

/// `max(6/q⁻ (1 − ν/2q⁺), 3/ν)`, the effective exponent of the `L^{q(·)} ∩ L^ν` local theorem.
pub fn intersection_exponent(q_minus: f64, q_plus: Exponent, nu: f64) -> f64 {
    let first = (6.0 / q_minus) * (1.0 - ratio(Exponent::Finite(nu / 2.0), q_plus));
    first.max(3.0 / nu)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(v: f64) -> Exponent {
        Exponent::Finite(v)
    }

    #[test]
    fn vartheta_worked_values() {
        let p = DecayProfile::Vartheta { p_minus: 4.0, p_infinity: 6.0 };
        let [a, b] = p.branches().unwrap();
        assert!((a - 7.0 / 20.0).abs() < 1e-15);
        assert!((b - 19.0 / 120.0).abs() < 1e-15);
    }

    #[test]
    fn branch_point_belongs_to_small_times() {
        let p = DecayProfile::VarthetaInfty { p_minus: 4.0 };
        assert_eq!(p.eval(1.0).unwrap(), 0.5);
        assert_eq!(p.eval(1.0 + 1e-12).unwrap(), 0.0);
    }

    #[test]
    fn vartheta_rejects_small_exponents() {
        assert!(DecayProfile::Vartheta { p_minus: 1.5, p_infinity: 6.0 }.eval(0.5).is_err());
        assert!(DecayProfile::Vartheta { p_minus: 7.0, p_infinity: 6.0 }.eval(0.5).is_err());
    }

    #[test]
    fn infinite_output_case() {
        let (v, c) = assertion_theta(f(2.0), f(4.0), Exponent::Infinite, Exponent::Infinite, 3.0);
        assert_eq!(c, ThetaCase::InfiniteOutput);
        assert_eq!(v, 0.25);
    }

    #[test]
    fn omega_needs_nu_below_r_minus() {
        let p =
            DecayProfile::OmegaGeneral { p_minus: f(2.0), p_plus: f(3.0), r_minus: f(4.0), r_plus: f(5.0), nu: 4.5 };
        assert!(p.validate().is_err());
    }
}
