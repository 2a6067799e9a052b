//! Picard iteration for the radial mild problem u = e^{t Delta} u0 - Duhamel(u u_r)
//! on R^3 with Gaussian data at half the measured smallness threshold.
//! Uses a coarse grid so it finishes in a few seconds.

use morrey_heat::mild::{
    kato_sweep, measure_constants, residual_mild, scale_to_threshold, solve_mild, Horizon, KatoSpaceSpec, MildGrid,
    MildProblem, MildSettings,
};
use morrey_heat::{ModelManifold, RadialProfile, Result};

fn main() -> Result<()> {
    let spec = KatoSpaceSpec { p: 2.0, q: 4.0, lambda: 1.0, beta: 0.0, horizon: Horizon::Infinite, gradient: None };
    let settings = MildSettings { grid: MildGrid { time_nodes: 16, radial_nodes: 80, radius: 20.0 }, ..Default::default() };
    let sweep = kato_sweep();
    let problem = MildProblem::new(ModelManifold::euclidean(3)?, RadialProfile::power_gauss(0.0, 1.0))?;

    let constants = measure_constants(&problem, &spec, &settings, &sweep)?;
    println!("pilot: seed norm {:.4}, bilinear constant {:.4}, threshold {:.4}", constants.seed_norm, constants.bilinear, constants.threshold());
    let (problem, eps) = scale_to_threshold(&problem, &constants, 0.5);

    let sol = solve_mild(&problem, &spec, &settings, &sweep)?;
    let r = &sol.report;
    println!("eps {eps:.4}: converged={} in {} steps, final norm {:.4} <= {:.4}", r.converged, r.differences.len(), r.final_norm, r.ball_bound);
    println!("contraction ratios {:?}", r.contraction_ratios.iter().map(|x| (x * 1e3).round() / 1e3).collect::<Vec<_>>());
    println!("residual {:.2e}", residual_mild(&problem, &sol.trajectory, &spec, &settings.quad, &sweep)?);
    Ok(())
}
