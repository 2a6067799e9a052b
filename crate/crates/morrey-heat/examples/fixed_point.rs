//! The abstract contraction behind small-data well-posedness:
//! u = u1 + B(u, u) on the reals and on R^2 with the sup norm.

use morrey_heat::mild::{fixed_point_iterate, FixedPointProblem};
use morrey_heat::Result;

fn main() -> Result<()> {
    let problem = FixedPointProblem::new(0.0, 1.0, 0.1)?;
    println!("threshold {} ball {}", problem.threshold(), problem.ball_radius());
    let out = fixed_point_iterate(&problem, &0.1, |u: &f64, v: &f64| u * v, |_| 0.0, 1e-14, 60)?;
    println!("u = {:.12} after {} steps (exact {:.12})", out.solution, out.iterations(), (1.0 - 0.6f64.sqrt()) / 2.0);
    println!("contraction ratios {:?}", &out.contraction_ratios()[..4]);

    // B(u, v) = (u0 v1, u1 v0) / 2 plus a mild linear coupling.
    let problem = FixedPointProblem::new(0.2, 0.5, 0.05)?;
    let seed = vec![0.05, -0.03];
    let out = fixed_point_iterate(
        &problem,
        &seed,
        |u: &Vec<f64>, v: &Vec<f64>| vec![0.5 * u[0] * v[1], 0.5 * u[1] * v[0]],
        |u: &Vec<f64>| vec![0.2 * u[1], 0.1 * u[0]],
        1e-14,
        60,
    )?;
    println!("vector fixed point {:?}, inside ball: {}", out.solution, out.bound_respected);

    let big = FixedPointProblem::new(0.0, 1.0, 2.0)?;
    let out = fixed_point_iterate(&big, &2.0, |u: &f64, v: &f64| u * v, |_| 0.0, 1e-12, 100)?;
    println!("eps above threshold: diverged = {}", out.diverged);
    Ok(())
}
