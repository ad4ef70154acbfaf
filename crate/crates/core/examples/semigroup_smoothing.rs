//! `L^r → L^p` smoothing of `e^{-t(-Δ)^α}`. With constant exponents and power-law data the
//! fitted log-log slope recovers the classical rate `-(n/2α)(1/r - 1/p)`.

use varlp::inequalities::CheckSetup;
use varlp::semigroup::{smoothing_check, SmoothingData, SmoothingSetup, SmoothingVariant};
use varlp::{ExponentFamily, ExponentField, Grid};

fn main() -> varlp::Result<()> {
    let g = Grid::line(1 << 15, 200.0)?;
    let r = ExponentField::constant(2.0, &g)?;
    let p = ExponentField::constant(4.0, &g)?;
    for alpha in [0.5, 0.75, 1.0] {
        let mut check = CheckSetup::new(g.clone(), 0);
        check.refine = false;
        check.t_grid = varlp::fit::log_grid(0.05, 50.0, 13)?;
        let setup = SmoothingSetup {
            check,
            alpha,
            kappa: 0.0,
            data: SmoothingData::PowerLaw { inner: 2.0 * g.spacing(), outer: 100.0 },
        };
        let report = smoothing_check(&setup, &r, &p, SmoothingVariant::Sigma)?;
        let s = report.slope.expect("power-law data carries a slope");
        println!("alpha {alpha:4}: fitted {:+.4}  classical {:+.4}", s.fitted, s.expected);
    }

    // variable exponents on the seeded corpus
    let g = Grid::line(512, 30.0)?;
    let setup =
        SmoothingSetup { check: CheckSetup::new(g.clone(), 9), alpha: 0.8, kappa: 0.0, data: SmoothingData::Corpus };
    let r = ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 2.0, depth: -0.5, rate: 1.0 }, &g)?;
    let p = ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 4.0, depth: 1.0, rate: 1.0 }, &g)?;
    let report = smoothing_check(&setup, &r, &p, SmoothingVariant::Psi)?;
    println!("psi, variable exponents: C = {:.4}, {:?}", report.max_ratio.unwrap_or(f64::NAN), report.verdict);
    Ok(())
}
