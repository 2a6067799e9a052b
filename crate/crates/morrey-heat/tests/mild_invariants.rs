//! Invariants of the fixed-point engine, the Kato norm and the mild solver.

use morrey_heat::mild::{
    duhamel_term, fixed_point_iterate, kato_norm, kato_sweep, linear_seed, residual_mild, solve_mild, FixedPointProblem,
    Horizon, KatoSpaceSpec, MildGrid, MildProblem, MildSettings, Trajectory,
};
use morrey_heat::{ModelManifold, RadialProfile};
use proptest::prelude::*;

fn flat_spec() -> KatoSpaceSpec {
    KatoSpaceSpec { p: 2.0, q: 4.0, lambda: 1.0, beta: 0.0, horizon: Horizon::Infinite, gradient: None }
}

fn e3() -> ModelManifold {
    ModelManifold::euclidean(3).unwrap()
}

fn coarse() -> MildSettings {
    MildSettings { grid: MildGrid { time_nodes: 12, radial_nodes: 60, radius: 20.0 }, ..Default::default() }
}

fn seed_of(f: RadialProfile) -> Trajectory {
    let g = coarse().grid;
    let problem = MildProblem::new(e3(), f).unwrap();
    linear_seed(&problem, &g.times(Horizon::Infinite.node_range()), &g.radii()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iterates_stay_in_the_ball(c1 in 0.0..0.6f64, c2 in 0.2..3.0f64, frac in 0.05..0.95f64, sign in prop::bool::ANY) {
        // u = u1 + c2 u^2 + c1 u on the reals: both bounds are attained.
        let eps = frac * (1.0 - c1).powi(2) / (4.0 * c2);
        let seed = if sign { eps } else { -eps };
        let problem = FixedPointProblem::new(c1, c2, eps).unwrap();
        prop_assert!(problem.is_small());
        let out = fixed_point_iterate(&problem, &seed, |u: &f64, v: &f64| c2 * u * v, |u| c1 * u, 1e-13, 2000).unwrap();
        prop_assert!(out.converged);
        prop_assert!(out.bound_respected);
        let bound = problem.contraction_bound();
        for r in out.contraction_ratios() {
            prop_assert!(r <= bound + 1e-9, "ratio {} above {}", r, bound);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn kato_norm_is_a_norm(a in -3.0..3.0f64, b in 0.2..2.0f64) {
        let m = e3();
        let sweep = kato_sweep();
        let u = seed_of(RadialProfile::power_gauss(0.0, 1.0));
        let v = seed_of(RadialProfile::power_exp(0.0, b));
        let nu = kato_norm(&u, &flat_spec(), &m, &sweep).unwrap().total;
        let nv = kato_norm(&v, &flat_spec(), &m, &sweep).unwrap().total;
        let scaled = kato_norm(&u.scaled(a), &flat_spec(), &m, &sweep).unwrap().total;
        prop_assert!((scaled - a.abs() * nu).abs() <= 1e-10 * nu.max(1.0));
        let sum = kato_norm(&u.axpy(a, &v), &flat_spec(), &m, &sweep).unwrap().total;
        prop_assert!(sum <= nu + a.abs() * nv + 1e-10 * (nu + nv));
    }
}

#[test]
fn first_picard_step_is_quadratic_in_the_data() {
    let m = e3();
    let sweep = kato_sweep();
    let quad = coarse().quad;
    let step = |eps: f64| {
        let f = RadialProfile::power_gauss(0.0, 1.0).scaled(eps);
        let problem = MildProblem::new(m, f.clone()).unwrap();
        let d = duhamel_term(&problem, &seed_of(f), &quad).unwrap();
        kato_norm(&d, &flat_spec(), &m, &sweep).unwrap().total
    };
    let ratio = step(0.4) / step(0.2);
    println!("step ratio when the data doubles: {ratio}");
    assert!((ratio - 4.0).abs() < 1e-6, "{ratio}");
}

#[test]
fn solutions_depend_lipschitz_on_the_seed() {
    let m = e3();
    let sweep = kato_sweep();
    let settings = coarse();
    let spec = flat_spec();
    let solve = |f: RadialProfile| {
        let problem = MildProblem::new(m, f).unwrap();
        solve_mild(&problem, &spec, &settings, &sweep).unwrap()
    };
    let a = solve(RadialProfile::power_gauss(0.0, 1.0).scaled(2.0));
    // Second datum rescaled to the same seed norm.
    let raw = solve(RadialProfile::power_gauss(0.0, 2.0));
    let b = solve(RadialProfile::power_gauss(0.0, 2.0).scaled(a.report.seed_norm / raw.report.seed_norm));
    assert!((a.report.seed_norm / b.report.seed_norm - 1.0).abs() < 1e-9);

    let g = settings.grid;
    let seeds = [RadialProfile::power_gauss(0.0, 1.0).scaled(2.0), RadialProfile::power_gauss(0.0, 2.0)]
        .map(|f| MildProblem::new(m, f).unwrap());
    let times = g.times(Horizon::Infinite.node_range());
    let radii = g.radii();
    let sa = linear_seed(&seeds[0], &times, &radii).unwrap();
    let sb = linear_seed(&seeds[1], &times, &radii).unwrap().scaled(a.report.seed_norm / raw.report.seed_norm);
    let seed_gap = kato_norm(&sa.axpy(-1.0, &sb), &spec, &m, &sweep).unwrap().total;
    let gap = kato_norm(&a.trajectory.axpy(-1.0, &b.trajectory), &spec, &m, &sweep).unwrap().total;

    // ||u - v|| <= ||u1 - v1|| / (1 - 2 C2 R) with C2 from the pilot step and R = 2 ||u1||.
    let problem = MildProblem::new(m, RadialProfile::power_gauss(0.0, 1.0).scaled(2.0)).unwrap();
    let d = kato_norm(&duhamel_term(&problem, &sa, &settings.quad).unwrap(), &spec, &m, &sweep).unwrap().total;
    let c2 = d / (a.report.seed_norm * a.report.seed_norm);
    let radius = 2.0 * a.report.seed_norm;
    let lipschitz = 1.0 / (1.0 - 2.0 * c2 * radius);
    println!("seed gap {seed_gap:.4e}, solution gap {gap:.4e}, measured factor {:.4}, bound {lipschitz:.4}", gap / seed_gap);
    assert!(2.0 * c2 * radius < 1.0);
    assert!(gap <= lipschitz * seed_gap);
}

#[test]
fn refining_the_grids_moves_the_solution_less_than_three_residuals() {
    let m = e3();
    let sweep = kato_sweep();
    let spec = flat_spec();
    let problem = MildProblem::new(m, RadialProfile::power_gauss(0.0, 1.0).scaled(2.0)).unwrap();
    // Default grids: a 20-node time grid leaves the fast early decay of this data under-resolved.
    let base = MildSettings::default();
    let fine = MildSettings { grid: base.grid.refined(), ..base };
    let a = solve_mild(&problem, &spec, &base, &sweep).unwrap();
    let b = solve_mild(&problem, &spec, &fine, &sweep).unwrap();
    let residual = residual_mild(&problem, &a.trajectory, &spec, &base.quad, &sweep).unwrap();
    let matched = b.trajectory.subsample(2, 2).unwrap();
    assert_eq!(matched.times, a.trajectory.times);
    let change = kato_norm(&a.trajectory.axpy(-1.0, &matched), &spec, &m, &sweep).unwrap().total;
    println!("refinement change {change:.3e}, residual {residual:.3e}");
    assert!(change < 3.0 * residual, "{change} vs 3 x {residual}");
}
