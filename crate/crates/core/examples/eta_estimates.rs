//! Decay of `‖η_{t,m} * f‖_{p(·)}` against `‖f‖_{p(·)/2}`, for each admissible variant,
//! plus the product estimate in `L^{p(·)} ∩ L²`.

use varlp::inequalities::{eta_halfexp_check, product_lemma_check, CheckSetup, EtaVariant, ProductVariant};
use varlp::{ExponentFamily, ExponentField, Grid};

fn main() -> varlp::Result<()> {
    let g = Grid::line(256, 20.0)?;
    let setup = CheckSetup::new(g.clone(), 3);

    let approach =
        ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 6.0, depth: 2.0, rate: 1.0 }, &g)?;
    let dip = ExponentField::build(&ExponentFamily::ExponentialApproach { limit: 4.0, depth: -2.0, rate: 1.0 }, &g)?;

    for (label, p, variant) in
        [("6 - 2e^-|x|", &approach, EtaVariant::Vartheta), ("4 + 2e^-|x|", &dip, EtaVariant::Varphi)]
    {
        let r = eta_halfexp_check(&setup, p, variant)?;
        let prof = &r.profiles[0];
        println!(
            "{label:12} {:?}: profile ({:.4}, {:.4})  C = {:.4}  drift {:+.2}%",
            variant,
            prof.small,
            prof.large,
            r.max_ratio.unwrap_or(f64::NAN),
            100.0 * (r.resolution_stability.unwrap_or(1.0) - 1.0)
        );
    }

    // the wrong variant is refused rather than measured
    if let Err(e) = eta_halfexp_check(&setup, &approach, EtaVariant::Varphi) {
        println!("varphi on 6 - 2e^-|x|: {e}");
    }

    let prod = product_lemma_check(&setup, &approach, ProductVariant::L2)?;
    println!("product in L^p ∩ L^2: C = {:.4}, {:?}", prod.max_ratio.unwrap_or(f64::NAN), prod.verdict);
    Ok(())
}
