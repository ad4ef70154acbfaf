//! Prints the hypothesis checks of each existence gate for one admissible choice of
//! exponents, and shows one failing case.

use varlp::nse::{existence_hypotheses, Bounds, ExistenceParams, Rel, TheoremId};
use varlp::Exponent;

fn b(minus: f64, plus: f64, infinity: f64) -> Bounds {
    let e = |v: f64| if v.is_infinite() { Exponent::Infinite } else { Exponent::Finite(v) };
    Bounds { minus: e(minus), plus: e(plus), infinity: Some(e(infinity)) }
}

fn main() -> varlp::Result<()> {
    use TheoremId::*;
    let inf = f64::INFINITY;
    let c = |v| b(v, v, v);
    let cases = [
        (LocalBoundedQ, 1.0, c(6.0), c(12.0), None),
        (LocalUnboundedQ, 1.0, c(12.0), b(12.0, inf, inf), None),
        (LocalInfty, 0.75, c(8.0), c(4.0), None),
        (LocalNu, 1.0, c(40.0), b(2.0, 2.4, 2.4), Some(3.5)),
        (LocalEqualLimits, 1.0, c(8.0), b(12.0, 24.0, 12.0), None),
        (LocalOneDim, 1.0, c(40.0), c(4.0), None),
        (GlobalInfty, 1.0, b(2.0, 3.0, 2.0), c(4.0), None),
        (GlobalConstantQ, 1.0, b(4.0, 5.0, 4.0), c(6.0), None),
        (GlobalFiniteHorizon, 1.0, c(4.0), c(12.0), None),
        // fails: p⁻ sits exactly at the threshold
        (LocalInfty, 0.75, c(6.0), c(4.0), None),
    ];
    for (theorem, alpha, p, q, nu) in cases {
        let mut params = ExistenceParams::new(alpha, p, q);
        params.nu = nu;
        let d = existence_hypotheses(theorem, &params)?;
        println!("{} (alpha = {alpha}): {}", theorem.as_str(), if d.pass { "pass" } else { "FAIL" });
        for cond in &d.hypothesis_checks {
            let rel = match cond.relation {
                Rel::Lt => "<",
                Rel::Le => "<=",
                Rel::Eq => "=",
            };
            let mark = if cond.pass { "ok " } else { "NO " };
            println!("    {mark} {:>9.5} {rel:2} {:<9.5} {}", cond.lhs, cond.rhs, cond.condition);
        }
        if let (true, Some(delta)) = (d.pass, d.delta) {
            println!("    delta = {delta:.5}");
        }
    }
    Ok(())
}
