//! Young's inequality with a variable exponent, and the intersection version whose
//! constant is exactly 1.

use varlp::exponents::Wave;
use varlp::inequalities::{intersection_young_suite, young_constant_r_suite, CheckSetup, IntersectionExponents};
use varlp::{Exponent, ExponentFamily, ExponentField, Grid};

fn main() -> varlp::Result<()> {
    let g = Grid::line(512, 20.0)?;
    let mut setup = CheckSetup::new(g.clone(), 5);
    setup.refine = false;

    let p = ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 3.0, depth: 1.0, rate: 1.0 }, &g)?;
    let young = young_constant_r_suite(&setup, &p, 4.0)?;
    println!(
        "{}: max ratio {:.4}, verdict {:?}",
        young.inequality_id,
        young.max_ratio.unwrap_or(f64::NAN),
        young.verdict
    );

    let a = ExponentField::build(
        &ExponentFamily::SinusoidalBounded { base: 1.0, amplitude: 1.0, frequency: 1.0, shape: Wave::AbsSin },
        &g,
    )?;
    let b = ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 1.0, depth: -1.0, rate: 1.0 }, &g)?;
    let ex = IntersectionExponents::constant_r(Exponent::Finite(3.0), Exponent::Finite(3.0), 3.0, &a, &b)?;
    let report = intersection_young_suite(&setup, &ex)?;
    println!(
        "{}: max ratio {:.6} (bound {:?})",
        report.inequality_id,
        report.max_ratio.unwrap_or(f64::NAN),
        report.hard_bound
    );
    for row in report.rows.iter().take(5) {
        println!("  {:28} lhs {:.5e} rhs {:.5e}", row.sample, row.lhs, row.rhs);
    }
    Ok(())
}
