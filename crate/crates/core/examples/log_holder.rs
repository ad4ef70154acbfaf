//! Sampled local and decay log-Hölder constants of `1/p` for several exponents.
//! A jump (the piecewise family) blows up the local constant.

use varlp::exponents::{log_holder_check, LogHolderOptions};
use varlp::{Exponent, ExponentFamily, ExponentField, Grid};

fn main() -> varlp::Result<()> {
    let g = Grid::line(1024, 30.0)?;
    let opts = LogHolderOptions { seed: 7, ..Default::default() };
    let cases = [
        ("1 + |x|", ExponentFamily::AffineRadial { base: 1.0, slope: 1.0, metric: Default::default() }),
        ("6 - 2e^{-|x|}", ExponentFamily::ExponentialApproach { limit: 6.0, depth: 2.0, rate: 1.0 }),
        (
            "sin_squared 2..3",
            ExponentFamily::SinusoidalBounded { base: 2.0, amplitude: 1.0, frequency: 0.5, shape: Default::default() },
        ),
        ("step 2 -> 4", ExponentFamily::Piecewise { inner: 2.0, radius: 1.0, outer: Exponent::Finite(4.0) }),
    ];
    println!("{:18} {:>10} {:>10} {:>6} {:>6}", "p", "c_local", "c_decay", "local", "decay");
    for (label, fam) in cases {
        let p = ExponentField::build(&fam, &g)?;
        let e = log_holder_check(&p, &opts)?;
        println!("{label:18} {:>10.4} {:>10.4} {:>6} {:>6}", e.c_local, e.c_decay, e.pass_local, e.pass_decay);
    }
    Ok(())
}
