use num_complex::Complex64;
use varlp::nse::{
    bilinear_b, divergence, e0_term, existence_hypotheses, gaussian_vortex, leray_project, measure_cb, mild_residual,
    picard_solve, vortex_corpus, Bounds, ExistenceParams, Forcing, PicardSettings, ProblemSpec, TheoremId,
    VelocityField,
};
use varlp::semigroup::apply_semigroup;
use varlp::{Exponent, ExponentFamily, ExponentField, Grid, GridFunction, TimeGrid, VectorField};

const PI: f64 = std::f64::consts::PI;

fn plane(nodes: usize, l: f64) -> Grid {
    Grid::new(2, nodes, l, varlp::Boundary::Periodic).unwrap()
}

#[test]
fn leray_projection() {
    let g = plane(32, PI);
    let free = VectorField::from_fn(&g, 2, |x| [(x[1]).sin() * x[0].cos(), -(x[0]).sin() * x[1].cos(), 0.0]).unwrap();
    assert!(divergence(&free).unwrap() < 1e-12);
    assert!(leray_project(&free).unwrap().max_abs_diff(&free) < 1e-13);
    // ∇φ for φ = sin(x) cos(2y) has zero mean, so it projects to zero.
    let grad =
        VectorField::from_fn(&g, 2, |x| [x[0].cos() * (2.0 * x[1]).cos(), -2.0 * x[0].sin() * (2.0 * x[1]).sin(), 0.0])
            .unwrap();
    assert!(leray_project(&grad).unwrap().sup_abs() < 1e-13);
    let mixed = free
        .axpby(1.0, &grad, 1.0)
        .unwrap()
        .axpby(1.0, &VectorField::from_fn(&g, 2, |_| [0.3, -0.1, 0.0]).unwrap(), 1.0)
        .unwrap();
    let p = leray_project(&mixed).unwrap();
    assert!(divergence(&p).unwrap() < 1e-12);
    assert!(leray_project(&p).unwrap().max_abs_diff(&p) < 1e-13);
    // The mean passes through.
    let mean = |v: &VectorField, c: usize| v.component(c).iter().sum::<f64>() / g.len() as f64;
    assert!((mean(&p, 0) - 0.3).abs() < 1e-13 && (mean(&p, 1) + 0.1).abs() < 1e-13);
}

#[test]
fn e0_reduces_to_the_semigroup_without_forcing() {
    let g = plane(32, 6.0);
    let u0 = gaussian_vortex(&g, 1.0, 0.8, [0.0; 3]).unwrap();
    let times = TimeGrid::new(0.6, 6).unwrap();
    let e0 = e0_term(&u0, &Forcing::Zero, 0.8, &times).unwrap();
    for j in 0..=6 {
        for c in 0..2 {
            let f = GridFunction::new(g.clone(), u0.component(c).to_vec()).unwrap();
            let h = apply_semigroup(&f, 0.8, times.time(j)).unwrap();
            let diff = h.values().iter().zip(e0.at(j).component(c)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(diff < 1e-14);
        }
    }
    let zero = e0_term(&VectorField::zeros(&g, 2), &Forcing::Zero, 0.8, &times).unwrap();
    assert_eq!(zero.max_abs_diff(&VelocityField::zeros(&g, &times)), 0.0);
}

#[test]
fn steady_single_mode_forcing_matches_the_mode_ode() {
    let g = plane(32, PI);
    let alpha = 0.7;
    // ∇^⊥ cos(x + 2y)
    let f = VectorField::from_fn(&g, 2, |x| {
        let s = (x[0] + 2.0 * x[1]).sin();
        [2.0 * s, -s, 0.0]
    })
    .unwrap();
    let times = TimeGrid::new(1.0, 7).unwrap();
    let e0 = e0_term(&VectorField::zeros(&g, 2), &Forcing::Steady(f.clone()), alpha, &times).unwrap();
    let lambda = 5f64.powf(alpha);
    for j in 0..=7 {
        let expect = f.scaled((1.0 - (-times.time(j) * lambda).exp()) / lambda);
        assert!(e0.at(j).max_abs_diff(&expect) < 1e-8);
    }
}

fn scalar_dft(values: &[f64], g: &Grid, k: [f64; 2]) -> Complex64 {
    g.points().zip(values).map(|(x, v)| Complex64::from_polar(*v, -(k[0] * x[0] + k[1] * x[1]))).sum()
}

/// `u(s) = Σ_m a_m e^{−s|k_m|^{2α}} ∇^⊥ cos(k_m·x)` in closed form.
fn two_mode(x: &[f64; 3], s: f64, alpha: f64) -> [f64; 3] {
    let modes: [([f64; 2], f64); 2] = [([0.5, 0.0], 1.0), ([0.5, 0.5], 0.7)];
    let mut u = [0.0; 3];
    for (k, a) in modes {
        let lam = (k[0] * k[0] + k[1] * k[1]).powf(alpha);
        let amp = a * (-s * lam).exp() * (k[0] * x[0] + k[1] * x[1]).sin();
        // ∇^⊥ cos(k·x) = (k_2 sin, −k_1 sin)
        u[0] += amp * k[1];
        u[1] -= amp * k[0];
    }
    u
}

/// Dense oracle for one Fourier coefficient of `B(u,u)(t)`: direct DFTs of the exact
/// products at Simpson nodes in `s`, with the symbol applied by hand.
fn oracle(g: &Grid, alpha: f64, t: f64, k: [f64; 2]) -> [Complex64; 2] {
    let panels = 400;
    let h = t / panels as f64;
    let k2 = k[0] * k[0] + k[1] * k[1];
    let lam = k2.powf(alpha);
    let mut acc = [Complex64::new(0.0, 0.0); 2];
    for i in 0..=panels {
        let s = i as f64 * h;
        let w = if i == 0 || i == panels {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        } * h
            / 3.0;
        let u: Vec<[f64; 3]> = g.points().map(|x| two_mode(&x, s, alpha)).collect();
        let mut flux = [Complex64::new(0.0, 0.0); 2];
        for (hc, fh) in flux.iter_mut().enumerate() {
            for kc in 0..2 {
                let prod: Vec<f64> = u.iter().map(|v| v[hc] * v[kc]).collect();
                *fh += scalar_dft(&prod, g, k) * Complex64::new(0.0, k[kc]);
            }
        }
        let dot = flux[0] * k[0] + flux[1] * k[1];
        let decay = (-(t - s) * lam).exp();
        for j in 0..2 {
            acc[j] -= (flux[j] - dot * (k[j] / k2)) * (w * decay);
        }
    }
    acc
}

#[test]
fn bilinear_matches_the_dense_oracle() {
    let g = plane(64, 2.0 * PI);
    let alpha = 1.0;
    let times = TimeGrid::new(0.4, 200).unwrap();
    let slices =
        (0..=200).map(|j| VectorField::from_fn(&g, 2, |x| two_mode(x, times.time(j), alpha)).unwrap()).collect();
    let u = VelocityField::new(times.clone(), slices).unwrap();
    let b = bilinear_b(&u, &u, alpha).unwrap();
    for (j, k) in [(50, [1.0, 0.5]), (125, [0.0, 0.5]), (200, [1.0, 0.5])] {
        let t = times.time(j);
        let want = oracle(&g, alpha, t, k);
        let got = [scalar_dft(b.at(j).component(0), &g, k), scalar_dft(b.at(j).component(1), &g, k)];
        let err = ((got[0] - want[0]).norm_sqr() + (got[1] - want[1]).norm_sqr()).sqrt();
        let size = (want[0].norm_sqr() + want[1].norm_sqr()).sqrt();
        assert!(size > 1e-3, "probe t = {t} k = {k:?} is degenerate");
        assert!(err / size < 1e-6, "t = {t} k = {k:?}: relative error {:.3e}", err / size);
    }
    assert!(b.max_divergence().unwrap() < 1e-10);
}

#[test]
fn bilinear_is_bilinear() {
    let g = plane(32, 8.0);
    let times = TimeGrid::new(0.3, 6).unwrap();
    let spec = spec_for(&g, &times, 1.0, 0.9);
    let corpus = vortex_corpus(&spec, 2, 5).unwrap();
    let (u, v) = (&corpus[0], &corpus[1]);
    let base = bilinear_b(u, v, 0.9).unwrap();
    let scale = base.slices().iter().map(|s| s.sup_abs()).fold(0.0, f64::max);
    assert!(scale > 0.0);
    for a in [-1.0, 0.5, 3.0] {
        for c in [-1.0, 0.5, 3.0] {
            let scaled = bilinear_b(&u.scaled(a), &v.scaled(c), 0.9).unwrap();
            assert!(scaled.max_abs_diff(&base.scaled(a * c)) <= 1e-12 * scale * (a * c).abs().max(1.0));
        }
    }
    let zero = bilinear_b(&VelocityField::zeros(&g, &times), v, 0.9).unwrap();
    assert_eq!(zero.slices().iter().map(|s| s.sup_abs()).fold(0.0, f64::max), 0.0);
    assert!(base.max_divergence().unwrap() < 1e-10);
}

/// Two unequal vortices side by side; they advect each other, so `B` does not vanish.
fn vortex_pair(g: &Grid, amplitude: f64) -> VectorField {
    let a = gaussian_vortex(g, amplitude, 1.0, [-1.5, 0.0, 0.0]).unwrap();
    let b = gaussian_vortex(g, -0.6 * amplitude, 0.8, [1.5, 0.5, 0.0]).unwrap();
    a.axpby(1.0, &b, 1.0).unwrap()
}

fn spec_for(g: &Grid, times: &TimeGrid, amplitude: f64, alpha: f64) -> ProblemSpec {
    ProblemSpec {
        alpha,
        u0: vortex_pair(g, amplitude),
        forcing: Forcing::Zero,
        times: times.clone(),
        p_t: ExponentField::build_on_times(&ExponentFamily::constant(6.0), times).unwrap(),
        q_x: ExponentField::constant(12.0, g).unwrap(),
        picard: PicardSettings::default(),
        nonlinear: true,
    }
}

#[test]
fn zero_data_converges_at_once() {
    let g = plane(32, 8.0);
    let times = TimeGrid::new(0.5, 5).unwrap();
    let mut spec = spec_for(&g, &times, 1.0, 1.0);
    spec.u0 = VectorField::zeros(&g, 2);
    let out = picard_solve(&spec).unwrap();
    assert!(out.converged);
    assert_eq!(out.iterations(), 1);
    assert_eq!(out.u_norm, 0.0);
}

#[test]
fn linear_flow_is_the_heat_evolution() {
    let g = plane(64, 12.0);
    let times = TimeGrid::new(0.5, 10).unwrap();
    let mut spec = spec_for(&g, &times, 0.8, 1.0);
    spec.nonlinear = false;
    spec.u0 = gaussian_vortex(&g, 0.8, 1.0, [0.0; 3]).unwrap();
    let out = picard_solve(&spec).unwrap();
    assert_eq!(out.u, out.e0);
    assert!(mild_residual(&out.u, &spec).unwrap() == 0.0);
    for j in 0..=10 {
        let s = 1.0 + 2.0 * times.time(j);
        let exact = VectorField::from_fn(&g, 2, |x| {
            let psi = 0.8 / s * (-(x[0] * x[0] + x[1] * x[1]) / (2.0 * s)).exp();
            [x[1] * psi / s, -x[0] * psi / s, 0.0]
        })
        .unwrap();
        assert!(out.u.at(j).max_abs_diff(&exact) < 1e-8, "t = {}", times.time(j));
    }
}

#[test]
fn small_data_fixed_point() {
    let g = plane(64, 8.0);
    let times = TimeGrid::new(0.5, 20).unwrap();
    let spec = spec_for(&g, &times, 0.5, 1.0);
    let c_b = measure_cb(&spec, &vortex_corpus(&spec, 6, 11).unwrap()).unwrap();
    let out = picard_solve(&spec).unwrap();
    let margin = 4.0 * c_b * out.e0_norm;
    assert!(margin < 1.0, "margin {margin}");
    assert!(out.converged && out.iterations() <= 12, "{} iterations", out.iterations());
    assert!(mild_residual(&out.u, &spec).unwrap() < 1e-6);
    assert!(out.max_ratio().unwrap() < 1.0);
    assert!(out.u_norm <= 2.0 * out.e0_norm + 1e-6);
    assert!(out.u.max_divergence().unwrap() < 1e-10);
}

#[test]
fn residual_grows_with_the_perturbation() {
    let g = plane(32, 8.0);
    let times = TimeGrid::new(0.3, 8).unwrap();
    let spec = spec_for(&g, &times, 0.5, 1.0);
    let out = picard_solve(&spec).unwrap();
    let noise = vortex_corpus(&spec, 1, 3).unwrap().remove(0);
    let r: Vec<f64> = [1e-4, 1e-3, 1e-2]
        .iter()
        .map(|&e| mild_residual(&out.u.axpby(1.0, &noise, e).unwrap(), &spec).unwrap())
        .collect();
    assert!(r[0] < r[1] && r[1] < r[2], "{r:?}");
}

#[test]
fn large_data_is_caught() {
    let g = plane(32, 8.0);
    let times = TimeGrid::new(1.0, 10).unwrap();
    let mut spec = spec_for(&g, &times, 400.0, 0.6);
    spec.picard.max_iters = 40;
    match picard_solve(&spec) {
        Err(varlp::Error::Divergence { .. }) => {}
        Ok(out) => assert!(!out.converged, "huge data should not converge"),
        Err(e) => panic!("unexpected error {e}"),
    }
}

#[test]
fn cb_is_scale_free() {
    let g = plane(32, 8.0);
    let times = TimeGrid::new(0.3, 6).unwrap();
    let spec = spec_for(&g, &times, 1.0, 1.0);
    let corpus = vortex_corpus(&spec, 3, 2).unwrap();
    let doubled: Vec<_> = corpus.iter().map(|u| u.scaled(2.0)).collect();
    let a = measure_cb(&spec, &corpus).unwrap();
    let b = measure_cb(&spec, &doubled).unwrap();
    assert!(a > 0.0 && ((a - b) / a).abs() < 1e-9);
    assert!(measure_cb(&spec, &[VelocityField::zeros(&g, &times)]).is_err());
}

#[test]
fn cb_is_resolution_stable() {
    let times = TimeGrid::new(0.3, 6).unwrap();
    let cb = |nodes| {
        let g = plane(nodes, 8.0);
        let spec = spec_for(&g, &times, 1.0, 1.0);
        measure_cb(&spec, &vortex_corpus(&spec, 4, 9).unwrap()).unwrap()
    };
    let (a, b) = (cb(64), cb(128));
    assert!(a.is_finite() && (b / a - 1.0).abs() < 0.15, "{a} vs {b}");
}

#[test]
fn worked_gate_values() {
    let f = Exponent::Finite;
    let d = existence_hypotheses(
        TheoremId::LocalBoundedQ,
        &ExistenceParams::new(1.0, Bounds::constant(f(6.0)), Bounds::constant(f(12.0))),
    )
    .unwrap();
    assert!(d.pass);
    assert!((d.profiles[0].1 - 1.0 / 12.0).abs() < 1e-12);
    assert!((d.p_tilde_plus.unwrap() - 1.5).abs() < 1e-12);
    assert!((d.delta.unwrap() - 1.0 / 24.0).abs() < 1e-12);
    let main = d.hypothesis_checks.iter().find(|c| c.condition.starts_with("2 alpha / p_minus")).unwrap();
    assert!((main.lhs - 11.0 / 24.0).abs() < 1e-12);

    let g = existence_hypotheses(
        TheoremId::GlobalInfty,
        &ExistenceParams::new(
            1.0,
            Bounds { minus: f(2.0), plus: f(3.0), infinity: Some(f(2.0)) },
            Bounds::constant(f(5.0)),
        ),
    )
    .unwrap();
    assert!(g.pass);

    let bad = existence_hypotheses(
        TheoremId::LocalBoundedQ,
        &ExistenceParams::new(1.0, Bounds::constant(f(50.0)), Bounds::constant(f(3.0))),
    )
    .unwrap();
    assert!(!bad.pass);
    assert!(bad.failed().iter().any(|c| c.condition == "3 / (2 alpha - 1) < q_minus"));

    let small = d.clone().with_measurements(0.5, 0.4);
    assert!(small.pass && (small.contraction_margin.unwrap() - 0.8).abs() < 1e-15);
    assert!(!d.with_measurements(0.5, 0.6).pass);
}
