//! Luxemburg norms under a few exponent profiles, and the norm of the constant 1
//! in `L^{1+|x|}(ℝ)`, which is finite even though 1 is in no `L^p` with `p < ∞`.

use varlp::exponents::Wave;
use varlp::norms::{luxemburg_norm, modular, one_in_ls, DEFAULT_TOL};
use varlp::{ExponentFamily, ExponentField, Grid, GridFunction};

fn main() -> varlp::Result<()> {
    let g = Grid::line(2001, 20.0)?;
    let f = GridFunction::from_fn(&g, |x| (-x[0] * x[0] / 2.0).exp() * (1.0 + 0.3 * (3.0 * x[0]).cos()))?;

    let families = [
        ("p = 2", ExponentFamily::constant(2.0)),
        (
            "p = 2 + |sin x|",
            ExponentFamily::SinusoidalBounded { base: 2.0, amplitude: 1.0, frequency: 1.0, shape: Wave::AbsSin },
        ),
        ("p = 4 - 2e^{-|x|}", ExponentFamily::ExponentialApproach { limit: 4.0, depth: 2.0, rate: 1.0 }),
        (
            "p = 3 on |x| <= 1, inf beyond",
            ExponentFamily::Piecewise { inner: 3.0, radius: 1.0, outer: varlp::Exponent::Infinite },
        ),
    ];
    for (label, fam) in &families {
        let p = ExponentField::build(fam, &g)?;
        let n = luxemburg_norm(&f, &p, DEFAULT_TOL)?;
        // the modular of f/‖f‖ sits at 1 when the norm is attained
        let rho = modular(&f.scaled(1.0 / n), &p)?;
        println!("{label:32} |f| = {n:.8}   rho(f/|f|) = {rho:.8}");
    }

    let s = ExponentField::build(
        &ExponentFamily::AffineRadial { base: 1.0, slope: 1.0, metric: Default::default() },
        &Grid::line(4001, 40.0)?,
    )?;
    let one = one_in_ls(&s, DEFAULT_TOL)?;
    println!("\n|1| in L^(1+|x|) on growing boxes: {:?}", one.box_norms);
    println!("stabilized: {}  (root of lambda ln lambda = 2 is 2.3457507...)", one.stabilized);
    Ok(())
}
