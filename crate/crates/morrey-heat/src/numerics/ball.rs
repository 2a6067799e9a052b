//! Integrals of `|f(dist(o, x))|^p` over geodesic balls `B(x0, R)` whose
//! center sits at distance `d` from the reference point `o`.
//!
//! In three dimensions the angular integral reduces exactly to a 1D integral
//! in the distance to `o`: the set of directions at distance `r` from `o`
//! lying inside the ball is a spherical cap whose measure follows from the
//! law of cosines. Other dimensions use geodesic polar coordinates around
//! `x0`, cutting a small ball around `o` out when it lies inside.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{polar_distance, unit_sphere_measure, Ball, ModelManifold};
use crate::numerics::{breakpoints, integrate_best_effort, integrate_piecewise, QuadSpec, Quadrature};
use crate::profile::RadialProfile;

/// `C(R) - C(x)` with `C` the antiderivative of the area radius, cancellation-free.
#[inline]
fn cap_weight(manifold: &ModelManifold, radius: f64, x: f64) -> f64 {
    if manifold.is_hyperbolic() {
        let s = manifold.sqrt_kappa();
        2.0 * (0.5 * s * (radius + x)).sinh() * (0.5 * s * (radius - x)).sinh() / (s * s)
    } else {
        0.5 * (radius + x) * (radius - x)
    }
}

fn check_integrable(manifold: &ModelManifold, profile: &RadialProfile, p: f64) -> Result<f64> {
    let l = profile.singularity_exponent();
    if l * p >= manifold.dim_f() {
        return Err(Error::Divergent { exponent: l, p, dim: manifold.dim() });
    }
    Ok(l * p)
}

fn spec_with(spec: &QuadSpec, at: f64, exponent: f64) -> QuadSpec {
    let mut s = QuadSpec { singular_points: Vec::new(), ..spec.clone() };
    if exponent < 0.0 {
        s.singular_points.push(crate::numerics::SingularPoint::new(at, exponent));
    }
    s
}

/// `omega_{m-1} int_0^R |f|^p S^{m-1} dr`: the centered ball.
pub fn centered_ball_integral(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    p: f64,
    radius: f64,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    let lp = check_integrable(manifold, profile, p)?;
    if radius <= 0.0 {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true });
    }
    let omega = unit_sphere_measure(manifold.dim() - 1);
    let spec0 = spec_with(spec, 0.0, manifold.dim_f() - 1.0 - lp);
    let br = breakpoints(0.0, radius, profile.breakpoints());
    let q = integrate_piecewise(|r| profile.value(r).abs().powf(p) * manifold.jacobian(r), &br, &spec0)?;
    Ok(Quadrature { value: omega * q.value, error: omega * q.error, ..q })
}

/// `int_{B(x0,R)} |f(dist(o, x))|^p dV(x)` with `d(o, x0) = ball.offset`.
pub fn integrate_polar_ball(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    p: f64,
    ball: Ball,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    check_integrable(manifold, profile, p)?;
    if profile.is_zero() {
        return Ok(Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true });
    }
    let q = if manifold.dim() == 3 {
        ball_integral_cap(manifold, profile, p, ball, spec)?
    } else {
        ball_integral_polar(manifold, profile, p, ball, spec)?
    };
    q.within(1e-6)
}

fn ball_integral_cap(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    p: f64,
    ball: Ball,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    let (d, radius) = (ball.offset, ball.radius);
    if d <= 1e-7 * radius {
        return centered_ball_integral(manifold, profile, p, radius, spec);
    }
    let lp = profile.singularity_exponent() * p;
    let h = |r: f64| profile.value(r).abs().powf(p);
    let mut total = Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    let mut add = |q: Quadrature, scale: f64| {
        total.value += scale * q.value;
        total.error += scale * q.error;
        total.evaluations += q.evaluations;
        total.converged &= q.converged;
    };
    if radius > d {
        // Directions from o at distance r < R - d all lie inside the ball.
        add(centered_ball_integral(manifold, profile, p, radius - d, spec)?, 1.0);
    }
    let lo = (d - radius).max(0.0);
    let hi = d + radius;
    let lower = (radius - d).max(lo);
    let scale = 2.0 * PI / manifold.area_radius(d);
    let br = breakpoints(lower, hi, profile.breakpoints().into_iter().chain([d]));
    let sp = if lower == 0.0 { spec_with(spec, 0.0, 2.0 - lp) } else { spec_with(spec, 0.0, 0.0) };
    let q = integrate_piecewise(
        |r| {
            let x = (d - r).abs();
            if x >= radius {
                return 0.0;
            }
            h(r) * manifold.area_radius(r) * cap_weight(manifold, radius, x)
        },
        &br,
        &sp,
    )?;
    add(q, scale);
    Ok(total)
}

fn ball_integral_polar(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    p: f64,
    ball: Ball,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    let (d, radius) = (ball.offset, ball.radius);
    if d <= 1e-7 * radius {
        return centered_ball_integral(manifold, profile, p, radius, spec);
    }
    let k = manifold.dim() - 2;
    let omega = unit_sphere_measure(k);
    let h = |r: f64| profile.value(r).abs().powf(p);
    let mut total = Quadrature { value: 0.0, error: 0.0, evaluations: 0, converged: true };
    let excise = if d < radius { (radius - d) / 8.0 } else { 0.0 };
    if excise > 0.0 {
        let q = centered_ball_integral(manifold, profile, p, excise, spec)?;
        total.value += q.value;
        total.error += q.error;
        total.evaluations += q.evaluations;
        total.converged &= q.converged;
    }
    let s = manifold.sqrt_kappa();
    // theta beyond which dist(o, x) exceeds the excised radius.
    let theta_min = |rho: f64| -> f64 {
        if excise == 0.0 || (d - rho).abs() >= excise {
            return 0.0;
        }
        let sin2 = if manifold.is_hyperbolic() {
            let a = (0.5 * s * excise).sinh();
            let b = (0.5 * s * (d - rho)).sinh();
            (a * a - b * b) / ((s * d).sinh() * (s * rho).sinh())
        } else {
            (excise * excise - (d - rho).powi(2)) / (4.0 * d * rho)
        };
        2.0 * sin2.clamp(0.0, 1.0).sqrt().asin()
    };
    let inner_spec = QuadSpec { singular_points: Vec::new(), ..spec.clone() };
    let mut failure = None;
    let br = breakpoints(0.0, radius, [d - excise, d, d + excise]);
    let q = integrate_piecewise(
        |rho| {
            let t0 = theta_min(rho);
            let inner = integrate_best_effort(
                |th| h(polar_distance(manifold, d, rho, th)) * th.sin().powi(k as i32),
                t0,
                PI,
                &inner_spec,
            );
            match inner {
                Ok(v) => v.value * manifold.jacobian(rho),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        &br,
        &inner_spec,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    total.value += omega * q.value;
    total.error += omega * q.error;
    total.evaluations += q.evaluations;
    total.converged &= q.converged;
    Ok(total)
}

/// Forces the general-dimension path, for cross-checking the 3D reduction.
pub fn integrate_polar_ball_2d(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    p: f64,
    ball: Ball,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    check_integrable(manifold, profile, p)?;
    ball_integral_polar(manifold, profile, p, ball, spec)?.into_result()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadSpec {
        QuadSpec::with_rel_tol(1e-10)
    }

    #[test]
    fn inverse_square_centered() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let f = RadialProfile::power_exp(1.0, 0.0);
        let q = integrate_polar_ball(&e3, &f, 2.0, Ball::new(0.0, 1.0).unwrap(), &spec()).unwrap();
        assert!((q.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn far_ball_is_small() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let f = RadialProfile::power_exp(1.0, 0.0);
        let q = integrate_polar_ball(&e3, &f, 2.0, Ball::new(10.0, 1.0).unwrap(), &spec()).unwrap();
        assert!(q.value <= 4.0 * PI / 3.0 / 81.0);
        assert!(q.value >= 4.0 * PI / 3.0 / 121.0);
    }

    #[test]
    fn divergent_rejected() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let f = RadialProfile::power_exp(2.0, 0.0);
        let r = integrate_polar_ball(&e3, &f, 2.0, Ball::new(0.0, 1.0).unwrap(), &spec());
        assert!(matches!(r, Err(Error::Divergent { .. })));
    }

    #[test]
    fn constant_gives_ball_volume_off_center() {
        let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let one = RadialProfile::power_exp(0.0, 0.0);
        for (d, r) in [(0.5, 2.0), (3.0, 1.0), (2.0, 2.0), (7.0, 4.0)] {
            let q = integrate_polar_ball(&h3, &one, 1.0, Ball::new(d, r).unwrap(), &spec()).unwrap();
            let v = crate::geometry::ball_volume(&h3, r).unwrap();
            assert!((q.value / v - 1.0).abs() < 1e-9, "d={d} R={r}: {} vs {v}", q.value);
        }
    }

    #[test]
    fn cap_reduction_matches_polar_coordinates() {
        for manifold in [ModelManifold::euclidean(3).unwrap(), ModelManifold::hyperbolic(3, 1.0).unwrap()] {
            let f = RadialProfile::power_exp(0.5, 1.0);
            for (d, r) in [(0.3, 1.0), (2.0, 1.5), (1.0, 1.0)] {
                let ball = Ball::new(d, r).unwrap();
                let a = integrate_polar_ball(&manifold, &f, 2.0, ball, &spec()).unwrap().value;
                let b = integrate_polar_ball_2d(&manifold, &f, 2.0, ball, &QuadSpec::with_rel_tol(1e-8)).unwrap().value;
                assert!((a / b - 1.0).abs() < 1e-6, "d={d} R={r}: {a} vs {b}");
            }
        }
    }
}
