//! Small-data mild solution by Picard iteration, with the existence gate evaluated on
//! the measured bilinear constant.

use varlp::nse::{
    existence_hypotheses, gaussian_vortex, measure_cb, mild_residual, picard_solve, vortex_corpus, Bounds,
    ExistenceParams, Forcing, PicardSettings, ProblemSpec, TheoremId,
};
use varlp::{Boundary, Exponent, ExponentFamily, ExponentField, Grid, TimeGrid};

fn main() -> varlp::Result<()> {
    let g = Grid::new(2, 64, 8.0, Boundary::Periodic)?;
    let times = TimeGrid::new(0.5, 20)?;
    let amplitude: f64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.5);
    let u0 = gaussian_vortex(&g, amplitude, 1.0, [-1.5, 0.0, 0.0])?.axpby(
        1.0,
        &gaussian_vortex(&g, -0.6 * amplitude, 0.8, [1.5, 0.5, 0.0])?,
        1.0,
    )?;

    let spec = ProblemSpec {
        alpha: 1.0,
        u0,
        forcing: Forcing::Zero,
        times: times.clone(),
        p_t: ExponentField::build_on_times(&ExponentFamily::constant(6.0), &times)?,
        q_x: ExponentField::constant(12.0, &g)?,
        picard: PicardSettings { max_iters: 40, ..Default::default() },
        nonlinear: true,
    };

    let c_b = measure_cb(&spec, &vortex_corpus(&spec, 6, 11)?)?;
    let e0 = spec.norm(&spec.e0()?)?;
    let params =
        ExistenceParams::new(1.0, Bounds::constant(Exponent::Finite(6.0)), Bounds::constant(Exponent::Finite(12.0)));
    let d = existence_hypotheses(TheoremId::LocalBoundedQ, &params)?.with_measurements(c_b, e0);
    println!(
        "C_B = {c_b:.4}  |e0| = {e0:.4}  margin = {:.4}  gate passes: {}",
        d.contraction_margin.unwrap_or(f64::NAN),
        d.pass
    );

    match picard_solve(&spec) {
        Ok(out) => {
            for r in &out.rows {
                println!(
                    "  iter {:2}  increment {:.3e}  ratio {}",
                    r.iteration,
                    r.increment,
                    r.ratio.map_or("-".into(), |x| format!("{x:.3}"))
                );
            }
            println!(
                "converged {} |u| = {:.5}  mild residual {:.2e}",
                out.converged,
                out.u_norm,
                mild_residual(&out.u, &spec)?
            );
        }
        Err(e) => println!("aborted: {e}"),
    }
    Ok(())
}
