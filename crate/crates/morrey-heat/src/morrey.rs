//! Morrey norms of radial data: sup over geodesic balls of
//! `(A(x0, R)^{-lambda/m} int_{B(x0,R)} |f|^p)^{1/p}`.
//!
//! For radial data the sup over centers reduces to a sup over the offset
//! `d = dist(o, x0)`, so every estimate is a sweep over `(d, R)`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Result};
use crate::geometry::{ball_volume, ln_ball_volume, space_form_volume, Ball, ManifoldKind, ModelManifold};
use crate::numerics::{
    centered_ball_integral, grid_table, integrate_polar_ball, log_space, sup_sweep, QuadSpec, SweepSpec,
};
use crate::profile::RadialProfile;

/// Which quantity normalizes the ball integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `|B(x0, R)|`
    #[default]
    G,
    /// volume of the radius-`R` ball in the space form of curvature `-K`
    KModel,
    /// `R^m`
    Plain,
    /// `e^{sqrt(K) (m-1) R}`
    Exponential,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda: f64,
    #[serde(default)]
    pub variant: Variant,
}

impl MorreyParams {
    pub fn new(p: f64, lambda: f64, variant: Variant) -> Result<Self> {
        let params = Self { p, lambda, variant };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        ensure(self.p >= 1.0 && self.p.is_finite(), || format!("Morrey exponent p = {} must lie in [1, inf)", self.p))?;
        ensure(self.lambda >= 0.0 && self.lambda.is_finite(), || format!("lambda = {} must be >= 0", self.lambda))
    }

    pub fn validate_for(&self, manifold: &ModelManifold) -> Result<()> {
        self.validate()?;
        ensure(self.lambda < manifold.dim_f(), || format!("lambda = {} must be < m = {}", self.lambda, manifold.dim()))
    }

    /// Scaling index `(m - lambda)/p`: `r^-eta` is the critical power.
    pub fn eta(&self, manifold: &ModelManifold) -> f64 {
        (manifold.dim_f() - self.lambda) / self.p
    }
}

/// `ln A(x0, R)`.
pub fn ln_normalizer(params: &MorreyParams, manifold: &ModelManifold, radius: f64) -> Result<f64> {
    ensure(radius > 0.0 && radius.is_finite(), || format!("ball radius {radius} must be > 0"))?;
    let m = manifold.dim_f();
    Ok(match params.variant {
        Variant::G => ln_ball_volume(manifold, radius)?,
        Variant::KModel => {
            let k = manifold.ricci_lower();
            match space_form_volume(manifold.dim(), k, radius) {
                Ok(v) if v.is_finite() && v > 0.0 => v.ln(),
                _ => {
                    let kind = if k > 0.0 { ManifoldKind::Hyperbolic } else { ManifoldKind::Euclidean };
                    ln_ball_volume(&ModelManifold::new(kind, manifold.dim(), k)?, radius)?
                }
            }
        }
        Variant::Plain => m * radius.ln(),
        Variant::Exponential => manifold.growth_rate() * radius,
    })
}

pub fn normalizer(params: &MorreyParams, manifold: &ModelManifold, ball: Ball) -> Result<f64> {
    Ok(ln_normalizer(params, manifold, ball.radius)?.exp())
}

/// Quadrature settings used by Morrey sweeps: tight in dimension 3, where
/// ball integrals are one-dimensional, looser for the 2D path.
pub fn default_quad(manifold: &ModelManifold) -> QuadSpec {
    if manifold.dim() == 3 {
        QuadSpec::with_rel_tol(1e-8)
    } else {
        QuadSpec::with_rel_tol(1e-5)
    }
}

/// `(A^{-lambda/m} int_B |f|^p)^{1/p}` for one ball.
pub fn ball_quantity(
    profile: &RadialProfile,
    params: &MorreyParams,
    manifold: &ModelManifold,
    ball: Ball,
    quad: &QuadSpec,
) -> Result<f64> {
    let integral = integrate_polar_ball(manifold, profile, params.p, ball, quad)?.value;
    if integral <= 0.0 {
        return Ok(0.0);
    }
    let ln_a = ln_normalizer(params, manifold, ball.radius)?;
    Ok(((integral.ln() - params.lambda / manifold.dim_f() * ln_a) / params.p).exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MorreyEstimate {
    /// Certified lower bound of the norm.
    pub value: f64,
    pub argmax: Ball,
    pub evaluations: usize,
}

pub fn morrey_norm_radial(
    profile: &RadialProfile,
    params: &MorreyParams,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
) -> Result<MorreyEstimate> {
    morrey_norm_radial_with(profile, params, manifold, sweep, &default_quad(manifold))
}

pub fn morrey_norm_radial_with(
    profile: &RadialProfile,
    params: &MorreyParams,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
    quad: &QuadSpec,
) -> Result<MorreyEstimate> {
    params.validate_for(manifold)?;
    if profile.is_zero() {
        return Ok(MorreyEstimate { value: 0.0, argmax: Ball::centered(sweep.radii.min)?, evaluations: 0 });
    }
    let res = sup_sweep(|ball| ball_quantity(profile, params, manifold, ball, quad), sweep)?;
    Ok(MorreyEstimate { value: res.sup_estimate, argmax: res.argmax, evaluations: res.evaluations })
}

/// Ball quantities on the sweep grid (no refinement), for per-ball comparisons.
pub fn morrey_table(
    profile: &RadialProfile,
    params: &MorreyParams,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
    quad: &QuadSpec,
) -> Result<Vec<(Ball, f64)>> {
    params.validate_for(manifold)?;
    grid_table(|ball| ball_quantity(profile, params, manifold, ball, quad), sweep)
}

/// `rho(r) = int_{B(o, r)} |f|^p dV`.
pub fn radial_mass(profile: &RadialProfile, p: f64, manifold: &ModelManifold, radius: f64) -> Result<f64> {
    ensure(radius >= 0.0, || format!("radius {radius} must be >= 0"))?;
    Ok(centered_ball_integral(manifold, profile, p, radius, &QuadSpec::with_rel_tol(1e-10))?.into_result()?.value)
}

/// Partial `L^p` mass over the centered ball; increments over doubling radii
/// certify non-membership in `L^p`.
pub fn lp_ball_integral(profile: &RadialProfile, p: f64, manifold: &ModelManifold, radius: f64) -> Result<f64> {
    radial_mass(profile, p, manifold, radius)
}

/// `I(2R) - I(R)` for each `R`.
pub fn lp_doubling_increments(
    profile: &RadialProfile,
    p: f64,
    manifold: &ModelManifold,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    radii
        .iter()
        .map(|&r| Ok((r, lp_ball_integral(profile, p, manifold, 2.0 * r)? - lp_ball_integral(profile, p, manifold, r)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// Balls where the per-ball inequality failed.
    pub ball_failures: usize,
    pub balls: usize,
    pub pass: bool,
}

const REL_SLACK: f64 = 1e-6;

/// Hoelder: `||f h||_{r, tau} <= ||f||_{p, lambda} ||h||_{q, mu}` with
/// `1/r = 1/p + 1/q`, `tau/r = lambda/p + mu/q`.
#[allow(clippy::too_many_arguments)]
pub fn holder_check(
    f: &RadialProfile,
    h: &RadialProfile,
    p: f64,
    q: f64,
    lambda: f64,
    mu: f64,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
) -> Result<ComparisonCheck> {
    let pf = MorreyParams::new(p, lambda, Variant::G)?;
    let ph = MorreyParams::new(q, mu, Variant::G)?;
    pf.validate_for(manifold)?;
    ph.validate_for(manifold)?;
    let r = 1.0 / (1.0 / p + 1.0 / q);
    let tau = r * (lambda / p + mu / q);
    let pr = MorreyParams { p: r, lambda: tau, variant: Variant::G };
    if r < 1.0 {
        return Err(domain(format!("Hoelder exponent r = {r} falls below 1")));
    }
    let quad = default_quad(manifold);
    let fh = RadialProfile::product(f.clone(), h.clone());
    let lhs = morrey_table(&fh, &pr, manifold, sweep, &quad)?;
    let tf = morrey_table(f, &pf, manifold, sweep, &quad)?;
    let th = morrey_table(h, &ph, manifold, sweep, &quad)?;
    compare_tables(&lhs, &[&tf, &th])
}

/// Same-scaling inclusion `M_{q, mu} -> M_{p, lambda}` for `p <= q`,
/// `(m - lambda)/p = (m - mu)/q`.
pub fn inclusion_check(
    f: &RadialProfile,
    (q, mu): (f64, f64),
    (p, lambda): (f64, f64),
    manifold: &ModelManifold,
    sweep: &SweepSpec,
) -> Result<ComparisonCheck> {
    ensure(p <= q, || format!("inclusion needs p <= q, got p = {p}, q = {q}"))?;
    let m = manifold.dim_f();
    let (lo, hi) = ((m - lambda) / p, (m - mu) / q);
    ensure((lo - hi).abs() <= 1e-12 * lo.abs().max(1.0), || {
        format!("inclusion needs (m - lambda)/p = (m - mu)/q, got {lo} and {hi}")
    })?;
    let small = MorreyParams::new(p, lambda, Variant::G)?;
    let big = MorreyParams::new(q, mu, Variant::G)?;
    small.validate_for(manifold)?;
    big.validate_for(manifold)?;
    let quad = default_quad(manifold);
    let lhs = morrey_table(f, &small, manifold, sweep, &quad)?;
    let rhs = morrey_table(f, &big, manifold, sweep, &quad)?;
    compare_tables(&lhs, &[&rhs])
}

/// `sup lhs <= prod sup rhs_i`, plus per-ball checks on the shared grid.
pub(crate) fn compare_tables(lhs: &[(Ball, f64)], rhs: &[&Vec<(Ball, f64)>]) -> Result<ComparisonCheck> {
    ensure(rhs.iter().all(|t| t.len() == lhs.len()), || "comparison tables differ in size".into())?;
    let mut failures = 0;
    for (i, (_, l)) in lhs.iter().enumerate() {
        let r: f64 = rhs.iter().map(|t| t[i].1).product();
        if *l > r * (1.0 + REL_SLACK) {
            failures += 1;
        }
    }
    let sup = |t: &[(Ball, f64)]| t.iter().map(|x| x.1).fold(0.0, f64::max);
    let lhs_sup = sup(lhs);
    let rhs_sup: f64 = rhs.iter().map(|t| sup(t)).product();
    Ok(ComparisonCheck {
        lhs: lhs_sup,
        rhs: rhs_sup,
        ball_failures: failures,
        balls: lhs.len(),
        pass: failures == 0 && lhs_sup <= rhs_sup * (1.0 + REL_SLACK),
    })
}

/// Bumps `|sin(2 pi n dist(x, c_j))|` on unit balls around centers on a ray.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpTrainProfile {
    centers: Vec<f64>,
    frequency: f64,
}

impl BumpTrainProfile {
    pub fn new(centers: Vec<f64>, frequency: f64) -> Result<Self> {
        ensure(!centers.is_empty(), || "bump train needs at least one center".into())?;
        ensure(frequency > 0.0, || "bump frequency must be positive".into())?;
        ensure(centers.windows(2).all(|w| w[1] - w[0] > 2.0), || "bump centers must be separated by more than 2".into())?;
        ensure(centers[0] >= 1.0, || "first bump must sit at distance >= 1 from the origin".into())?;
        Ok(Self { centers, frequency })
    }

    /// `count` centers at `first + j * separation`.
    pub fn evenly_spaced(first: f64, separation: f64, count: usize, frequency: f64) -> Result<Self> {
        Self::new((0..count).map(|j| first + j as f64 * separation).collect(), frequency)
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    pub fn single_bump(&self) -> RadialProfile {
        RadialProfile::sine_bump(self.frequency)
    }

    /// Smallest gap between consecutive centers (infinite for one bump).
    pub fn separation(&self) -> f64 {
        self.centers.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
    }

    /// Bumps a ball of radius `R` can meet: their centers lie on a geodesic
    /// segment of length at most `2(R + 1)`.
    pub fn max_bumps_met(&self, radius: f64) -> usize {
        let n = if self.separation().is_finite() {
            (2.0 * (radius + 1.0) / self.separation()).floor() as usize + 1
        } else {
            1
        };
        n.min(self.centers.len())
    }

    /// The train's value at the point at distance `s` along the ray.
    pub fn value_on_ray(&self, s: f64) -> f64 {
        self.centers.iter().map(|&c| self.single_bump().value((s - c).abs())).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BumpTrainReport {
    pub morrey_upper_bound: f64,
    /// `(n, int over B(o, r_n + 1))`
    pub lp_partial_sums: Vec<(usize, f64)>,
    pub single_bump_mass: f64,
}

/// Morrey upper bound of a bump train by counting the bumps a ball meets,
/// each contributing at most the single-bump sup at that radius.
pub fn bump_train_bound(
    train: &BumpTrainProfile,
    params: &MorreyParams,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
) -> Result<BumpTrainReport> {
    params.validate_for(manifold)?;
    let quad = default_quad(manifold);
    let bump = train.single_bump();
    let single_mass = radial_mass(&bump, params.p, manifold, 1.0)?;
    let offsets = sweep.offsets.points();
    let mut radii = sweep.radii.points();
    radii.extend(log_space(sweep.radii.max * 2.0, sweep.radii.max * 200.0, 8));
    let mut bound: f64 = 0.0;
    for &radius in &radii {
        // sup over offsets of one bump's contribution to a ball of this radius
        let mut one: f64 = 0.0;
        for &d in offsets.iter().filter(|&&d| d <= radius + 1.0) {
            let ball = Ball::new(d, radius)?;
            one = one.max(integrate_polar_ball(manifold, &bump, params.p, ball, &quad)?.value);
        }
        if radius >= 1.0 {
            one = one.max(single_mass);
        }
        let vol = ball_volume(manifold, radius).unwrap_or(f64::INFINITY);
        let mass = (train.max_bumps_met(radius) as f64 * one).min(vol);
        let ln_a = ln_normalizer(params, manifold, radius)?;
        if mass > 0.0 {
            bound = bound.max(((mass.ln() - params.lambda / manifold.dim_f() * ln_a) / params.p).exp());
        }
    }
    let sums = (1..=train.centers.len()).map(|n| (n, n as f64 * single_mass)).collect();
    Ok(BumpTrainReport { morrey_upper_bound: bound, lp_partial_sums: sums, single_bump_mass: single_mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{LogGrid, OffsetGrid};
    use crate::profile::example_profile;
    use std::f64::consts::PI;

    fn e3() -> ModelManifold {
        ModelManifold::euclidean(3).unwrap()
    }

    fn h3() -> ModelManifold {
        ModelManifold::hyperbolic(3, 1.0).unwrap()
    }

    fn small_sweep() -> SweepSpec {
        SweepSpec {
            radii: LogGrid { min: 1e-2, max: 50.0, count: 12 },
            offsets: OffsetGrid { max: 10.0, count: 6 },
            refine_rounds: 1,
        }
    }

    #[test]
    fn normalizer_examples() {
        let b = Ball::new(0.0, 2.0).unwrap();
        let plain = MorreyParams::new(2.0, 1.0, Variant::Plain).unwrap();
        assert!((normalizer(&plain, &e3(), b).unwrap() - 8.0).abs() < 1e-12);
        let g = MorreyParams::new(2.0, 1.0, Variant::G).unwrap();
        assert!((normalizer(&g, &e3(), Ball::centered(1.0).unwrap()).unwrap() - 4.0 * PI / 3.0).abs() < 1e-12);
        let ex = MorreyParams::new(2.0, 1.0, Variant::Exponential).unwrap();
        assert!((normalizer(&ex, &h3(), Ball::centered(1.0).unwrap()).unwrap() - 2f64.exp()).abs() < 1e-12);
        let km = MorreyParams::new(2.0, 1.0, Variant::KModel).unwrap();
        for r in [0.1, 3.0, 45.0] {
            let a = ln_normalizer(&km, &h3(), r).unwrap();
            let b = ln_normalizer(&g, &h3(), r).unwrap();
            assert!((a - b).abs() < 1e-9);
        }
        assert!(MorreyParams::new(0.5, 1.0, Variant::G).is_err());
    }

    #[test]
    fn inverse_distance_plain_norm() {
        let f = RadialProfile::power_exp(1.0, 0.0);
        let params = MorreyParams::new(2.0, 1.0, Variant::Plain).unwrap();
        let est = morrey_norm_radial(&f, &params, &e3(), &small_sweep()).unwrap();
        assert!((est.value - (4.0 * PI).sqrt()).abs() < 1e-6, "{}", est.value);
        assert!(est.argmax.offset < 1e-9);
        assert_eq!(morrey_norm_radial(&RadialProfile::zero(), &params, &e3(), &small_sweep()).unwrap().value, 0.0);
    }

    #[test]
    fn member_profile_finite_and_above_centered_certificate() {
        let f = example_profile(&h3(), 2.0, 1.0, 0.5, 1.0).profile;
        let params = MorreyParams::new(2.0, 1.0, Variant::G).unwrap();
        let est = morrey_norm_radial(&f, &params, &h3(), &small_sweep()).unwrap();
        let centered = ball_quantity(&f, &params, &h3(), Ball::centered(1.0).unwrap(), &default_quad(&h3())).unwrap();
        assert!(est.value.is_finite() && est.value >= centered);
    }

    #[test]
    fn radial_mass_examples() {
        let f = RadialProfile::power_exp(1.0, 0.0);
        assert!((radial_mass(&f, 2.0, &e3(), 1.0).unwrap() - 4.0 * PI).abs() < 1e-9);
        assert_eq!(radial_mass(&f, 2.0, &e3(), 0.0).unwrap(), 0.0);
    }

    #[test]
    fn doubling_increments_tend_to_pi_ln2() {
        let f = example_profile(&h3(), 2.0, 1.0, 0.5, 1.0).profile;
        let inc = lp_doubling_increments(&f, 2.0, &h3(), &[5.0, 10.0, 20.0]).unwrap();
        for (_, v) in inc {
            assert!((v - PI * 2f64.ln()).abs() < 0.2, "{v}");
        }
        let conv = RadialProfile::power_exp(0.0, 2.0);
        let a = lp_ball_integral(&conv, 2.0, &h3(), 20.0).unwrap();
        let b = lp_ball_integral(&conv, 2.0, &h3(), 40.0).unwrap();
        assert!((b - a).abs() < 1e-6 * a);
    }

    #[test]
    fn holder_equality_case() {
        let f = RadialProfile::power_exp(0.5, 0.0);
        let chk = holder_check(&f, &f, 4.0, 4.0, 1.0, 1.0, &e3(), &small_sweep()).unwrap();
        assert!(chk.pass);
        assert!((chk.lhs / chk.rhs - 1.0).abs() < 1e-6);
    }

    #[test]
    fn inclusion_examples() {
        let f = RadialProfile::power_exp(1.0, 0.0);
        let chk = inclusion_check(&f, (2.5, 0.5), (2.0, 1.0), &e3(), &small_sweep()).unwrap();
        assert!(chk.pass && chk.ball_failures == 0);
        let same = inclusion_check(&f, (2.0, 1.0), (2.0, 1.0), &e3(), &small_sweep()).unwrap();
        assert!((same.lhs - same.rhs).abs() < 1e-12 * same.rhs);
        assert!(inclusion_check(&f, (2.0, 1.0), (4.0, 2.0), &e3(), &small_sweep()).is_err());
        assert!(inclusion_check(&f, (4.0, 2.0), (2.0, 1.0), &e3(), &small_sweep()).is_err());
    }

    #[test]
    fn bump_train() {
        assert!(BumpTrainProfile::new(vec![2.0, 3.5], 1.0).is_err());
        let params = MorreyParams::new(2.0, 1.0, Variant::Plain).unwrap();
        let one = BumpTrainProfile::new(vec![5.0], 2.0).unwrap();
        let rep = bump_train_bound(&one, &params, &e3(), &small_sweep()).unwrap();
        let direct = morrey_norm_radial(&one.single_bump(), &params, &e3(), &small_sweep().grid_only()).unwrap();
        assert!(rep.morrey_upper_bound >= direct.value * (1.0 - 1e-9));
        assert!(rep.morrey_upper_bound <= direct.value * 1.05, "{} {}", rep.morrey_upper_bound, direct.value);
        let train = BumpTrainProfile::evenly_spaced(3.0, 3.0, 20, 2.0).unwrap();
        let rep = bump_train_bound(&train, &params, &e3(), &small_sweep()).unwrap();
        assert!(rep.morrey_upper_bound.is_finite());
        let (n, s) = rep.lp_partial_sums[19];
        assert_eq!(n, 20);
        assert!((s - 20.0 * rep.single_bump_mass).abs() < 1e-9 * s);
        assert!((train.value_on_ray(3.0 + 0.125) - 1.0).abs() < 1e-12);
    }
}
