//! Constant-curvature model manifolds: hyperbolic space `H^m(kappa)` with
//! sectional curvature `-kappa`, and Euclidean space `R^m`.
//!
//! Radial quantities are written through the *area radius*
//! `S(r) = sinh(sqrt(kappa) r) / sqrt(kappa)` (or `r`), so the Riemannian
//! volume element in geodesic polar coordinates is `S(r)^(m-1) dr dsigma`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::numerics::{integrate_adaptive_1d, log_space, QuadSpec, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Hyperbolic,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelManifold {
    kind: ManifoldKind,
    dim: u32,
    kappa: f64,
}

impl ModelManifold {
    pub fn new(kind: ManifoldKind, dim: u32, kappa: f64) -> Result<Self> {
        ensure(dim >= 2, || format!("dimension {dim} is below 2"))?;
        match kind {
            ManifoldKind::Hyperbolic => {
                ensure(kappa > 0.0 && kappa.is_finite(), || format!("hyperbolic space needs kappa > 0, got {kappa}"))?
            }
            ManifoldKind::Euclidean => ensure(kappa == 0.0, || format!("euclidean space needs kappa = 0, got {kappa}"))?,
        }
        Ok(Self { kind, dim, kappa })
    }

    pub fn hyperbolic(dim: u32, kappa: f64) -> Result<Self> {
        Self::new(ManifoldKind::Hyperbolic, dim, kappa)
    }

    pub fn euclidean(dim: u32) -> Result<Self> {
        Self::new(ManifoldKind::Euclidean, dim, 0.0)
    }

    pub fn kind(&self) -> ManifoldKind {
        self.kind
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn dim_f(&self) -> f64 {
        f64::from(self.dim)
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.kind == ManifoldKind::Hyperbolic
    }

    pub fn sqrt_kappa(&self) -> f64 {
        self.kappa.sqrt()
    }

    /// `K` in `Ric >= -K (m-1)`.
    pub fn ricci_lower(&self) -> f64 {
        self.kappa
    }

    /// `c0` in `Ric = -c0 g`.
    pub fn ricci_upper(&self) -> f64 {
        self.kappa * (self.dim_f() - 1.0)
    }

    /// Bottom of the L2 spectrum of the Laplacian.
    pub fn spectral_bottom(&self) -> f64 {
        let m1 = self.dim_f() - 1.0;
        m1 * m1 * self.kappa / 4.0
    }

    /// Exponential volume growth rate `sqrt(K) (m-1)`.
    pub fn growth_rate(&self) -> f64 {
        self.sqrt_kappa() * (self.dim_f() - 1.0)
    }

    pub fn area_radius(&self, r: f64) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => r,
            ManifoldKind::Hyperbolic => {
                let s = self.sqrt_kappa();
                (s * r).sinh() / s
            }
        }
    }

    pub fn ln_area_radius(&self, r: f64) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => r.ln(),
            ManifoldKind::Hyperbolic => {
                let s = self.sqrt_kappa();
                let x = s * r;
                if x < 20.0 {
                    (x.sinh() / s).ln()
                } else {
                    x + (-(-2.0 * x).exp()).ln_1p() - (2.0 * s).ln()
                }
            }
        }
    }

    /// `S'(r)`.
    pub fn area_radius_dr(&self, r: f64) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => 1.0,
            ManifoldKind::Hyperbolic => (self.sqrt_kappa() * r).cosh(),
        }
    }

    /// `S'(r) / S(r)`: mean-curvature term of the radial Laplacian divided by `m-1`.
    pub fn log_area_derivative(&self, r: f64) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => 1.0 / r,
            ManifoldKind::Hyperbolic => {
                let s = self.sqrt_kappa();
                s / (s * r).tanh()
            }
        }
    }

    /// Antiderivative of `S` vanishing at 0: `(cosh(s r) - 1)/s^2` or `r^2/2`.
    pub fn area_radius_integral(&self, r: f64) -> f64 {
        match self.kind {
            ManifoldKind::Euclidean => 0.5 * r * r,
            ManifoldKind::Hyperbolic => {
                let s = self.sqrt_kappa();
                let h = (0.5 * s * r).sinh();
                2.0 * h * h / (s * s)
            }
        }
    }

    /// Polar volume density `S(r)^(m-1)`.
    pub fn jacobian(&self, r: f64) -> f64 {
        self.area_radius(r).powi(self.dim as i32 - 1)
    }

    pub fn ln_jacobian(&self, r: f64) -> f64 {
        (self.dim_f() - 1.0) * self.ln_area_radius(r)
    }

    /// Euclidean model of the same dimension.
    pub fn flat(&self) -> ModelManifold {
        ModelManifold { kind: ManifoldKind::Euclidean, dim: self.dim, kappa: 0.0 }
    }
}

/// A geodesic ball whose center sits at distance `offset` from the reference point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub offset: f64,
    pub radius: f64,
}

impl Ball {
    pub fn new(offset: f64, radius: f64) -> Result<Self> {
        ensure(offset >= 0.0 && offset.is_finite(), || format!("ball offset {offset} must be finite and >= 0"))?;
        ensure(radius > 0.0 && radius.is_finite(), || format!("ball radius {radius} must be finite and > 0"))?;
        Ok(Self { offset, radius })
    }

    pub fn centered(radius: f64) -> Result<Self> {
        Self::new(0.0, radius)
    }
}

/// Measure of the unit `k`-sphere in `R^(k+1)`.
pub fn unit_sphere_measure(k: u32) -> f64 {
    // omega_k = 2 pi omega_{k-2} / (k - 1)
    let mut omega = if k.is_multiple_of(2) { 2.0 } else { 2.0 * PI };
    let mut j = 2 + k % 2;
    while j <= k {
        omega *= 2.0 * PI / f64::from(j - 1);
        j += 2;
    }
    omega
}

/// Surface measure of the unit `(m-1)`-sphere: `2 pi^(m/2) / Gamma(m/2)`.
pub fn sphere_area(m: u32) -> Result<f64> {
    ensure(m >= 2, || format!("sphere_area needs m >= 2, got {m}"))?;
    Ok(unit_sphere_measure(m - 1))
}

const LOG_SPACE_THRESHOLD: f64 = 30.0;

/// Natural log of the geodesic ball volume.
pub fn ln_ball_volume(manifold: &ModelManifold, radius: f64) -> Result<f64> {
    ensure(radius > 0.0 && radius.is_finite(), || format!("ball radius {radius} must be > 0"))?;
    let m = manifold.dim_f();
    let ln_omega = unit_sphere_measure(manifold.dim - 1).ln();
    if !manifold.is_hyperbolic() {
        return Ok(ln_omega + m * radius.ln() - m.ln());
    }
    let s = manifold.sqrt_kappa();
    let spec = QuadSpec::with_rel_tol(1e-14);
    if s * radius <= LOG_SPACE_THRESHOLD {
        let q = integrate_adaptive_1d(|r| manifold.jacobian(r), 0.0, radius, &spec)?;
        return Ok(ln_omega + q.value.ln());
    }
    // S(r)^(m-1) = e^{(m-1) s R} (2s)^{-(m-1)} e^{-(m-1) s (R-r)} (1 - e^{-2 s r})^(m-1)
    let m1 = m - 1.0;
    let q = integrate_adaptive_1d(
        |r| (-m1 * s * (radius - r)).exp() * (-(-2.0 * s * r).exp_m1()).powf(m1),
        0.0,
        radius,
        &spec,
    )?;
    Ok(ln_omega + m1 * (s * radius - (2.0 * s).ln()) + q.value.ln())
}

/// Exact geodesic ball volume of the model space.
pub fn ball_volume(manifold: &ModelManifold, radius: f64) -> Result<f64> {
    let lv = ln_ball_volume(manifold, radius)?;
    let v = lv.exp();
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Overflow(format!("ball volume e^{lv:.1} at radius {radius}")))
    }
}

/// `int_0^x sinh^n(y) dy` by power series (small x) or the reduction formula.
pub fn sinh_power_integral(n: u32, x: f64) -> f64 {
    if x < 1.0 {
        const TERMS: usize = 24;
        let mut base = [0.0; TERMS];
        let mut fact = 1.0;
        for (k, b) in base.iter_mut().enumerate() {
            if k > 0 {
                fact *= ((2 * k) * (2 * k + 1)) as f64;
            }
            *b = 1.0 / fact;
        }
        let mut pow = [0.0; TERMS];
        pow[0] = 1.0;
        for _ in 0..n {
            let mut next = [0.0; TERMS];
            for i in 0..TERMS {
                for j in 0..TERMS - i {
                    next[i + j] += pow[i] * base[j];
                }
            }
            pow = next;
        }
        let x2 = x * x;
        let mut xp = x.powi(n as i32 + 1);
        let mut sum = 0.0;
        for (k, c) in pow.iter().enumerate() {
            sum += c * xp / (f64::from(n) + 2.0 * k as f64 + 1.0);
            xp *= x2;
        }
        return sum;
    }
    match n {
        0 => x,
        1 => x.cosh() - 1.0,
        _ => {
            let nf = f64::from(n);
            x.sinh().powi(n as i32 - 1) * x.cosh() / nf - (nf - 1.0) / nf * sinh_power_integral(n - 2, x)
        }
    }
}

/// Volume of the space-form ball of curvature `-curvature`, from the closed-form
/// antiderivative rather than quadrature.
pub fn space_form_volume(dim: u32, curvature: f64, radius: f64) -> Result<f64> {
    ensure(dim >= 2 && radius > 0.0 && curvature >= 0.0, || "space form volume: domain violation".into())?;
    let omega = unit_sphere_measure(dim - 1);
    if curvature == 0.0 {
        return Ok(omega * radius.powi(dim as i32) / f64::from(dim));
    }
    let s = curvature.sqrt();
    Ok(omega * sinh_power_integral(dim - 1, s * radius) / s.powi(dim as i32))
}

/// `|B(R)| / |B^{-K}(R)|`: identically 1 on the model spaces.
pub fn bishop_ratio(manifold: &ModelManifold, radius: f64) -> Result<f64> {
    Ok(ball_volume(manifold, radius)? / space_form_volume(manifold.dim, manifold.ricci_lower(), radius)?)
}

/// Coarse grid used to calibrate every volume constant.
pub fn calibration_radii() -> Vec<f64> {
    log_space(1e-3, 30.0, 13)
}

/// Calibrated upper envelopes `C R^n` (R <= s), `C e^{(m-1) sqrt(K) R}` (R > s)
/// and the combined `C R^n e^{(m-1) sqrt(K) R}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEnvelope {
    pub dim: u32,
    pub curvature: f64,
    pub poly_power: f64,
    pub switch_radius: f64,
    pub piecewise_constant: f64,
    pub combined_constant: f64,
}

impl VolumeEnvelope {
    pub fn calibrate(dim: u32, curvature: f64, poly_power: f64, switch_radius: f64, grid: &[f64]) -> Result<Self> {
        ensure(curvature > 0.0, || "volume envelope needs K > 0".into())?;
        ensure((0.0..=f64::from(dim)).contains(&poly_power), || format!("need 0 <= n <= m, got n = {poly_power}"))?;
        ensure(switch_radius > 0.0, || "switch radius must be positive".into())?;
        ensure(!grid.is_empty(), || "empty calibration grid".into())?;
        let manifold = ModelManifold::hyperbolic(dim, curvature)?;
        let mut env = Self {
            dim,
            curvature,
            poly_power,
            switch_radius,
            piecewise_constant: 1.0,
            combined_constant: 1.0,
        };
        let mut cp: f64 = 0.0;
        let mut cc: f64 = 0.0;
        for &r in grid.iter().chain(std::iter::once(&switch_radius)) {
            let v = ball_volume(&manifold, r)?;
            cp = cp.max(v / env.piecewise_shape(r));
            cc = cc.max(v / env.combined_shape(r));
        }
        env.piecewise_constant = cp;
        env.combined_constant = cc;
        Ok(env)
    }

    fn rate(&self) -> f64 {
        (f64::from(self.dim) - 1.0) * self.curvature.sqrt()
    }

    fn piecewise_shape(&self, r: f64) -> f64 {
        if r <= self.switch_radius {
            r.powf(self.poly_power)
        } else {
            (self.rate() * r).exp()
        }
    }

    fn combined_shape(&self, r: f64) -> f64 {
        r.powf(self.poly_power) * (self.rate() * r).exp()
    }

    pub fn piecewise(&self, r: f64) -> f64 {
        self.piecewise_constant * self.piecewise_shape(r)
    }

    pub fn combined(&self, r: f64) -> f64 {
        self.combined_constant * self.combined_shape(r)
    }
}

/// Piecewise envelope value at `R`, calibrated on [`calibration_radii`].
pub fn volume_upper_envelope(dim: u32, curvature: f64, poly_power: f64, switch_radius: f64, radius: f64) -> Result<f64> {
    ensure(radius > 0.0, || "radius must be positive".into())?;
    Ok(VolumeEnvelope::calibrate(dim, curvature, poly_power, switch_radius, &calibration_radii())?.piecewise(radius))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioCheck {
    pub ratio: f64,
    pub bound: f64,
    pub constant: f64,
    pub pass: bool,
}

fn ratio_shape(manifold: &ModelManifold, r1: f64, r2: f64) -> f64 {
    (r2 / r1).powf(manifold.dim_f()) * (manifold.growth_rate() * (r2 - r1)).exp()
}

/// `|B(R2)|/|B(R1)|` against `C(m) (R2/R1)^m e^{k (R2 - R1)}`.
pub fn volume_ratio_check(manifold: &ModelManifold, r1: f64, r2: f64) -> Result<RatioCheck> {
    ensure(r1 > 0.0 && r1 < r2, || format!("need 0 < R1 < R2, got {r1}, {r2}"))?;
    let grid = calibration_radii();
    let mut constant: f64 = 0.0;
    for (i, &a) in grid.iter().enumerate() {
        for &b in &grid[i + 1..] {
            let ratio = ball_volume(manifold, b)? / ball_volume(manifold, a)?;
            constant = constant.max(ratio / ratio_shape(manifold, a, b));
        }
    }
    let ratio = ball_volume(manifold, r2)? / ball_volume(manifold, r1)?;
    let bound = constant * ratio_shape(manifold, r1, r2);
    Ok(RatioCheck { ratio, bound, constant, pass: ratio <= bound * (1.0 + 1e-12) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LowerCheck {
    pub poly_constant: f64,
    pub poly_pass: bool,
    /// `None` when the exponential bound does not apply (`c0 = 0`).
    pub exp_constant: Option<f64>,
    pub exp_pass: Option<bool>,
}

/// Polynomial `|B(R)| >= alpha R^m` and exponential `|B(R)| >= C e^{sqrt(c0) R}` lower bounds.
pub fn volume_lower_check(manifold: &ModelManifold, radius: f64, r0: f64) -> Result<LowerCheck> {
    ensure(radius > 0.0, || "radius must be positive".into())?;
    let m = manifold.dim_f();
    let mut alpha = unit_sphere_measure(manifold.dim - 1) / m;
    for r in calibration_radii() {
        alpha = alpha.min(ball_volume(manifold, r)? / r.powf(m));
    }
    let v = ball_volume(manifold, radius)?;
    let poly_pass = v >= alpha * radius.powf(m) * (1.0 - 1e-12);
    let c0 = manifold.ricci_upper();
    if c0 <= 0.0 {
        return Ok(LowerCheck { poly_constant: alpha, poly_pass, exp_constant: None, exp_pass: None });
    }
    ensure(r0 > 0.0 && radius >= r0, || format!("exponential check needs R >= R0 > 0, got R = {radius}, R0 = {r0}"))?;
    let rate = c0.sqrt();
    let c = ball_volume(manifold, r0)? / (rate * r0).exp();
    let exp_pass = v >= c * (rate * radius).exp() * (1.0 - 1e-12);
    Ok(LowerCheck { poly_constant: alpha, poly_pass, exp_constant: Some(c), exp_pass: Some(exp_pass) })
}

/// Distance from the reference point to the point at polar coordinates
/// `(rho, theta)` around a center at distance `offset`.
pub fn geodesic_distance_polar(manifold: &ModelManifold, offset: f64, rho: f64, theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(domain(format!("angle {theta} outside [0, pi]")));
    }
    ensure(offset >= 0.0 && rho >= 0.0, || "offset and radius coordinate must be >= 0".into())?;
    Ok(polar_distance(manifold, offset, rho, theta))
}

/// Unchecked law of cosines, written in half-angle form for accuracy near 0.
#[inline]
pub(crate) fn polar_distance(manifold: &ModelManifold, d: f64, rho: f64, theta: f64) -> f64 {
    let h = (0.5 * theta).sin();
    match manifold.kind {
        ManifoldKind::Euclidean => ((d - rho).powi(2) + 4.0 * d * rho * h * h).max(0.0).sqrt(),
        ManifoldKind::Hyperbolic => {
            let s = manifold.sqrt_kappa();
            let a = (0.5 * s * (d - rho)).sinh();
            let x = (2.0 * a * a + 2.0 * (s * d).sinh() * (s * rho).sinh() * h * h).max(0.0);
            (x + (x * (x + 2.0)).sqrt()).ln_1p() / s
        }
    }
}

/// `omega_{m-2} int_0^R int_0^pi g(rho, theta) sin^{m-2}(theta) S(rho)^{m-1} dtheta drho`.
pub fn spherical_integral<G: FnMut(f64, f64) -> f64>(
    manifold: &ModelManifold,
    mut g: G,
    radius: f64,
    spec: &QuadSpec,
) -> Result<Quadrature> {
    ensure(radius > 0.0, || "radius must be positive".into())?;
    let k = manifold.dim - 2;
    let omega = unit_sphere_measure(k);
    let inner_spec = QuadSpec::with_rel_tol(spec.rel_tol).abs_tol(spec.abs_tol);
    let mut failure: Option<Error> = None;
    let q = integrate_adaptive_1d(
        |rho| {
            let inner = integrate_adaptive_1d(|th| g(rho, th) * th.sin().powi(k as i32), 0.0, PI, &inner_spec);
            match inner {
                Ok(v) => v.value * manifold.jacobian(rho),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        0.0,
        radius,
        spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let q = q?;
    Ok(Quadrature { value: omega * q.value, error: omega * q.error, ..q })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> ModelManifold {
        ModelManifold::hyperbolic(3, 1.0).unwrap()
    }

    #[test]
    fn derived_constants() {
        let m = ModelManifold::hyperbolic(5, 0.5).unwrap();
        assert_eq!(m.ricci_upper(), 2.0);
        assert_eq!(m.spectral_bottom(), 2.0);
        assert!(ModelManifold::hyperbolic(3, 0.0).is_err());
        assert!(ModelManifold::new(ManifoldKind::Euclidean, 3, 1.0).is_err());
        assert!(ModelManifold::euclidean(1).is_err());
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3).unwrap() - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        assert!(sphere_area(1).is_err());
    }

    #[test]
    fn volume_examples() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        assert!((ball_volume(&e3, 1.0).unwrap() - 4.0 * PI / 3.0).abs() < 1e-14);
        let v = ball_volume(&h3(), 1.0).unwrap();
        assert!((v - PI * (2f64.sinh() - 2.0)).abs() < 1e-13 * v);
        let r = 1e-4;
        assert!((ball_volume(&h3(), r).unwrap() / (4.0 * PI / 3.0 * r.powi(3)) - 1.0).abs() < 1e-8);
        assert!(ball_volume(&h3(), 0.0).is_err());
    }

    #[test]
    fn log_space_branch_continuous() {
        // ln(pi (sinh 2R - 2R)) on both sides of the branch switch
        let a = ln_ball_volume(&h3(), 30.0 - 1e-9).unwrap();
        let b = ln_ball_volume(&h3(), 30.0 + 1e-9).unwrap();
        assert!((a - 60.451_582_703_289_46).abs() < 1e-12, "{a}");
        assert!((b - 60.451_582_707_289_455).abs() < 1e-12, "{b}");
        let lv = ln_ball_volume(&h3(), 400.0).unwrap();
        assert!((lv - (PI.ln() + 800.0 - 2f64.ln())).abs() < 1e-10);
        assert!(matches!(ball_volume(&h3(), 400.0), Err(Error::Overflow(_))));
    }

    #[test]
    fn envelope_examples() {
        let env = VolumeEnvelope::calibrate(3, 1.0, 0.0, 1.0, &calibration_radii()).unwrap();
        let at10 = env.piecewise(10.0) / env.piecewise_constant;
        assert!((at10 - 20f64.exp()).abs() < 1e-6 * at10);
        assert!(VolumeEnvelope::calibrate(3, 0.0, 3.0, 1.0, &calibration_radii()).is_err());
    }

    #[test]
    fn ratio_examples() {
        let c = volume_ratio_check(&h3(), 1.0, 2.0).unwrap();
        let exact = (4f64.sinh() - 4.0) / (2f64.sinh() - 2.0);
        assert!((c.ratio - exact).abs() < 1e-12 * exact);
        assert!(c.pass);
        let e = volume_ratio_check(&ModelManifold::euclidean(3).unwrap(), 1.0, 2.0).unwrap();
        assert!((e.ratio - 8.0).abs() < 1e-13);
        assert!(volume_ratio_check(&h3(), 2.0, 2.0).is_err());
    }

    #[test]
    fn lower_examples() {
        let e = volume_lower_check(&ModelManifold::euclidean(3).unwrap(), 3.0, 1.0).unwrap();
        assert!(e.poly_pass && e.exp_pass.is_none());
        assert!((e.poly_constant - 4.0 * PI / 3.0).abs() < 1e-12);
        let h = volume_lower_check(&h3(), 5.0, 1.0).unwrap();
        assert_eq!(h.exp_pass, Some(true));
    }

    #[test]
    fn distance_examples() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        assert!((geodesic_distance_polar(&e3, 3.0, 4.0, PI / 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(geodesic_distance_polar(&h3(), 1.0, 1.0, 0.0).unwrap(), 0.0);
        assert!((geodesic_distance_polar(&h3(), 0.0, 2.5, 1.0).unwrap() - 2.5).abs() < 1e-14);
        assert!(geodesic_distance_polar(&h3(), 1.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn spherical_integral_examples() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let spec = QuadSpec::with_rel_tol(1e-10);
        let v = spherical_integral(&e3, |_, _| 1.0, 1.0, &spec).unwrap();
        assert!((v.value - 4.0 * PI / 3.0).abs() < 1e-9);
        let v = spherical_integral(&h3(), |_, _| 1.0, 1.0, &spec).unwrap();
        assert!((v.value - PI * (2f64.sinh() - 2.0)).abs() < 1e-9);
        let v = spherical_integral(&e3, |rho, th| polar_distance(&e3, 0.0, rho, th).powi(-2), 1.0, &spec).unwrap();
        assert!((v.value - 4.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn closed_form_matches_quadrature_in_higher_dimension() {
        let h5 = ModelManifold::hyperbolic(5, 0.7).unwrap();
        for r in [0.01, 0.5, 1.0, 3.0, 12.0] {
            let ratio = bishop_ratio(&h5, r).unwrap();
            assert!((ratio - 1.0).abs() < 1e-12, "r = {r}: {ratio}");
        }
    }
}
