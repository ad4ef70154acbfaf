//! Sampled heat and Oseen kernels, checked against their pointwise decay bounds.

use varlp::kernels::{eta, pointwise_bound_check, sample_heat_kernel, sample_oseen_kernel};
use varlp::{Boundary, Grid};

fn main() -> varlp::Result<()> {
    let g = Grid::line(4096, 200.0)?;
    for alpha in [0.5, 0.75, 1.0] {
        for t in [0.1, 1.0, 10.0] {
            let k = sample_heat_kernel(alpha, t, &g)?;
            // |g_{α,t}(x)| ≲ η_{t,1+2α}: compare against the profile itself
            let worst =
                pointwise_bound_check(&k.kernel, |x| eta(t.powf(1.0 / (2.0 * alpha)), 1.0 + 2.0 * alpha, 1, x), 0.9);
            println!(
                "heat alpha={alpha:4} t={t:5}: sup {:.4e}  sup |g|/eta = {worst:.3}  edge mass {:.1e}",
                k.kernel.sup_abs(),
                k.boundary_mass
            );
        }
    }

    let g = Grid::new(2, 128, 20.0, Boundary::Periodic)?;
    let k = sample_oseen_kernel(1.0, 0.5, [0, 0, 1], &g)?;
    // the Oseen kernel only decays like |x|^{-n-1}, so some mass always reaches the edge of a periodic box
    println!("oseen (0,0,1) at t = 0.5: sup {:.4e}, edge mass {:.2e}", k.kernel.sup_abs(), k.boundary_mass);
    Ok(())
}
