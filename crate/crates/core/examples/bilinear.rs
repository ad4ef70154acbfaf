//! The Duhamel bilinear term `B(u, v)` on a periodic box. It vanishes on a lone
//! Gaussian vortex, whose self-advection is a pure gradient, but not on a pair.

use varlp::nse::{bilinear_b, gaussian_vortex, VelocityField};
use varlp::{Boundary, Grid, TimeGrid};

fn constant_in_time(times: &TimeGrid, u: &varlp::VectorField) -> varlp::Result<VelocityField> {
    VelocityField::new(times.clone(), vec![u.clone(); times.steps() + 1])
}

fn main() -> varlp::Result<()> {
    let g = Grid::new(2, 64, 8.0, Boundary::Periodic)?;
    let times = TimeGrid::new(0.5, 20)?;

    let single = gaussian_vortex(&g, 1.0, 1.0, [0.0; 3])?;
    let pair = single.axpby(1.0, &gaussian_vortex(&g, -0.6, 0.8, [2.0, 0.5, 0.0])?, 1.0)?;

    for (label, u) in [("single vortex", &single), ("vortex pair", &pair)] {
        let uu = constant_in_time(&times, u)?;
        let b = bilinear_b(&uu, &uu, 1.0)?;
        println!("{label:14} sup |u| = {:.4}  sup |B(u,u)(T)| = {:.3e}", u.sup_abs(), b.at(times.steps()).sup_abs());
    }
    Ok(())
}
