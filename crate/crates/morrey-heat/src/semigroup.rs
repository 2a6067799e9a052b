//! Heat flow of radial data, the rate constants the estimates are stated in,
//! and empirical dispersive and smoothing checks.
//!
//! In dimension 3 the angular integral of the kernel is elementary, so
//! `u(t, d)` is a single integral over the data radius `rho`:
//!
//! `u = (4 pi t)^{-1/2} e^{-lambda1 t} / S(d) int f(rho) S(rho) e^{-(d-rho)^2/4t} (1 - e^{-d rho/t}) drho`.
//!
//! Other dimensions substitute `r = dist(x, y)` for the polar angle and
//! integrate over `(rho, r)`.

use std::f64::consts::PI;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::geometry::{unit_sphere_measure, ModelManifold};
use crate::kernels::HeatKernel;
use crate::morrey::{compare_tables, default_quad, morrey_norm_radial, morrey_table, ComparisonCheck, MorreyParams, Variant};
use crate::numerics::{
    breakpoints, fit_exp_rate, fit_loglog_slope, integrate_best_effort, integrate_piecewise, log_space, LineFit,
    QuadSpec, Quadrature, SingularPoint, SweepSpec, Window,
};
use crate::profile::{RadialProfile, Shape, Snapshot};

/// `d(t) = min{1, t}`.
pub fn d_of_t(t: f64) -> f64 {
    t.min(1.0)
}

/// Every rate appearing in the dispersive, smoothing and Kato estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateConstants {
    pub dim: f64,
    pub p: f64,
    /// `f64::INFINITY` stands for the sup norm.
    pub q: f64,
    pub lambda: f64,
    pub c: f64,
    /// `sqrt(K) (m-1)`
    pub k: f64,
    pub lambda1: f64,
    /// `Ric <= -c0`
    pub c0: f64,
    pub kappa_star: f64,
    pub gamma: f64,
    pub gamma_g: f64,
    pub delta_m: f64,
    pub alpha_p: f64,
    pub alpha_pq: f64,
    /// Kato-space rate: half the guaranteed decay without the Ricci term.
    pub beta: f64,
    /// Same with the Ricci damping included.
    pub beta_ricci: f64,
    pub nu: f64,
}

impl RateConstants {
    /// `k lambda gamma_g / (m q)`: the growth correction in the `q` norm.
    pub fn growth_correction(&self) -> f64 {
        self.k * self.lambda * self.gamma_g / (self.dim * self.q)
    }

    /// `sigma_nu = c0 + nu (alpha_pq + k lambda gamma_g / (m q))`.
    pub fn sigma_nu(&self) -> f64 {
        self.c0 + self.nu * (self.alpha_pq + self.growth_correction())
    }

    /// Decay rate of the damped smoothing estimate, used as `beta_pq` for small lambda.
    pub fn beta_pq(&self) -> f64 {
        self.c0 + self.alpha_pq - self.growth_correction()
    }

    pub fn with_viscosity(mut self, nu: f64) -> Self {
        self.nu = nu;
        self
    }
}

pub fn rate_constants(manifold: &ModelManifold, p: f64, q: f64, lambda: f64, c: f64) -> Result<RateConstants> {
    let m = manifold.dim_f();
    ensure(p >= 1.0 && p.is_finite(), || format!("p = {p} must lie in [1, inf)"))?;
    ensure(q >= p, || format!("q = {q} must be >= p = {p}"))?;
    ensure((0.0..m).contains(&lambda), || format!("lambda = {lambda} must lie in [0, {m})"))?;
    ensure(c > 0.0 && c < 0.25, || format!("c = {c} must lie in (0, 1/4)"))?;
    let k = manifold.growth_rate();
    let lambda1 = manifold.spectral_bottom();
    let c0 = manifold.ricci_upper();
    let kappa_star = -manifold.kappa();
    let inv = 1.0 / (0.25 - c);
    let gamma = k * lambda / m * inv;
    let gamma_g = k * (1.0 + lambda / m) * inv;
    let delta_m = (0.25 * (c0 * c0 + (m - 1.0) * (m - 2.0) * kappa_star)).max(0.0);
    let alpha_p = (4.0 * delta_m * (p - 1.0) / (p * p)).min(lambda1 / p);
    let alpha_pq = (4.0 * delta_m * (p - 1.0) / (p * q)).min(lambda1 / q);
    let correction = if q.is_finite() { k * lambda * gamma_g / (m * q) } else { 0.0 };
    Ok(RateConstants {
        dim: m,
        p,
        q,
        lambda,
        c,
        k,
        lambda1,
        c0,
        kappa_star,
        gamma,
        gamma_g,
        delta_m,
        alpha_p,
        alpha_pq,
        beta: 0.5 * (alpha_pq - correction).max(0.0),
        beta_ricci: 0.5 * (c0 + alpha_pq - correction).max(0.0),
        nu: 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SmallnessCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// `k^2 (lambda/(m p)) (1 + lambda/m) (1/4 - c)^{-1} <= alpha_p`.
pub fn smallness_condition_check(manifold: &ModelManifold, p: f64, lambda: f64, c: f64) -> Result<SmallnessCheck> {
    let rc = rate_constants(manifold, p, p, lambda, c)?;
    let m = rc.dim;
    let lhs = rc.k * rc.k * (lambda / (m * p)) * (1.0 + lambda / m) / (0.25 - c);
    Ok(SmallnessCheck { lhs, rhs: rc.alpha_p, satisfied: lhs <= rc.alpha_p })
}

/// Which right-hand side `predicted_bound` evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimate {
    /// `M_{p,lambda} -> L^inf` on negatively curved spaces.
    SupHyperbolic,
    /// `M_{p,lambda} -> M_{p,lambda}`.
    MorreyHyperbolic,
    /// `M_{p,lambda} -> M_{q,lambda}`.
    DispersiveHyperbolic,
    /// Same with the Ricci damping `e^{-c0 t}` of the Bochner Laplacian.
    DispersiveDamped,
    /// Gradient `M_{p,lambda} -> M_{q,lambda}`.
    SmoothingHyperbolic,
    SmoothingDamped,
    /// Gradient bound with a positive rate `beta_pq` for small lambda.
    SmoothingSmallLambda,
    /// `L^inf` bound on Ricci-flat spaces with large volume growth.
    SupFlat,
    DispersiveFlat,
    SmoothingFlat,
    /// Modified viscosity `nu`, rate `sigma_nu`.
    Viscous,
    ViscousGradient,
}

impl Estimate {
    pub const ALL: [Estimate; 12] = [
        Estimate::SupHyperbolic,
        Estimate::MorreyHyperbolic,
        Estimate::DispersiveHyperbolic,
        Estimate::DispersiveDamped,
        Estimate::SmoothingHyperbolic,
        Estimate::SmoothingDamped,
        Estimate::SmoothingSmallLambda,
        Estimate::SupFlat,
        Estimate::DispersiveFlat,
        Estimate::SmoothingFlat,
        Estimate::Viscous,
        Estimate::ViscousGradient,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Estimate::SupHyperbolic => "sup-hyperbolic",
            Estimate::MorreyHyperbolic => "morrey-hyperbolic",
            Estimate::DispersiveHyperbolic => "dispersive-hyperbolic",
            Estimate::DispersiveDamped => "dispersive-damped",
            Estimate::SmoothingHyperbolic => "smoothing-hyperbolic",
            Estimate::SmoothingDamped => "smoothing-damped",
            Estimate::SmoothingSmallLambda => "smoothing-small-lambda",
            Estimate::SupFlat => "sup-flat",
            Estimate::DispersiveFlat => "dispersive-flat",
            Estimate::SmoothingFlat => "smoothing-flat",
            Estimate::Viscous => "viscous",
            Estimate::ViscousGradient => "viscous-gradient",
        }
    }

    pub fn is_gradient(self) -> bool {
        matches!(
            self,
            Estimate::SmoothingHyperbolic
                | Estimate::SmoothingDamped
                | Estimate::SmoothingSmallLambda
                | Estimate::SmoothingFlat
                | Estimate::ViscousGradient
        )
    }
}

impl FromStr for Estimate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Estimate::ALL
            .into_iter()
            .find(|e| e.id() == s)
            .ok_or_else(|| Error::Usage(format!("unknown estimate '{s}'")))
    }
}

impl std::fmt::Display for Estimate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// `1/p - 1/q`, with `q = inf` allowed.
fn gap(rc: &RateConstants) -> f64 {
    1.0 / rc.p - 1.0 / rc.q
}

/// Right-hand side of `estimate` at time `t` with the constant `C` set to 1.
pub fn predicted_bound(estimate: Estimate, rc: &RateConstants, input_norm: f64, t: f64) -> Result<f64> {
    ensure(t > 0.0 && t.is_finite(), || format!("t = {t} must be > 0"))?;
    let (m, p, lambda) = (rc.dim, rc.p, rc.lambda);
    let dt = d_of_t(t);
    let g = gap(rc);
    let dispersive = (dt.powf(-0.5 * m) * t.powf(0.5 * lambda)).powf(g);
    let smoothing = dt.powf(-0.5 - 0.5 * m * g) * t.powf(0.5 * lambda * g);
    let growth = rc.growth_correction();
    let ln_rate = match estimate {
        Estimate::SupHyperbolic => {
            let pre = dt.powf(-m / (2.0 * p)) * t.powf(lambda / (2.0 * p));
            return Ok(input_norm * pre * (-(rc.lambda1 - rc.k * lambda * rc.gamma / m) * t / p).exp());
        }
        Estimate::MorreyHyperbolic => {
            let growth_p = rc.k * lambda * rc.gamma_g / (m * p);
            return Ok(input_norm * (-rc.alpha_p * t + growth_p * t).exp());
        }
        Estimate::DispersiveHyperbolic => dispersive.ln() - rc.alpha_pq * t + growth * t,
        Estimate::DispersiveDamped => dispersive.ln() - (rc.c0 + rc.alpha_pq) * t + growth * t,
        Estimate::SmoothingHyperbolic => smoothing.ln() - rc.alpha_pq * t + growth * t,
        Estimate::SmoothingDamped => smoothing.ln() - (rc.c0 + rc.alpha_pq) * t + growth * t,
        Estimate::SmoothingSmallLambda => smoothing.ln() - rc.beta_pq() * t,
        Estimate::SupFlat => -(m - lambda) / (2.0 * p) * t.ln(),
        Estimate::DispersiveFlat => -0.5 * (m - lambda) * g * t.ln(),
        Estimate::SmoothingFlat => (-0.5 - 0.5 * (m - lambda) * g) * t.ln(),
        Estimate::Viscous => dispersive.ln() - rc.sigma_nu() * t,
        Estimate::ViscousGradient => smoothing.ln() - rc.sigma_nu() * t,
    };
    Ok(input_norm * ln_rate.exp())
}

/// Power of `t` in the estimate as `t -> 0`.
pub fn predicted_slope(estimate: Estimate, rc: &RateConstants) -> f64 {
    let (m, p, lambda) = (rc.dim, rc.p, rc.lambda);
    let g = gap(rc);
    match estimate {
        Estimate::SupHyperbolic | Estimate::SupFlat => -(m - lambda) / (2.0 * p),
        Estimate::MorreyHyperbolic => 0.0,
        Estimate::DispersiveHyperbolic | Estimate::DispersiveDamped | Estimate::DispersiveFlat | Estimate::Viscous => {
            -0.5 * (m - lambda) * g
        }
        _ => -0.5 - 0.5 * (m - lambda) * g,
    }
}

/// Exponential rate of the estimate at large `t` (negative when it grows).
pub fn predicted_rate(estimate: Estimate, rc: &RateConstants) -> f64 {
    let growth = rc.growth_correction();
    match estimate {
        Estimate::SupHyperbolic => (rc.lambda1 - rc.k * rc.lambda * rc.gamma / rc.dim) / rc.p,
        Estimate::MorreyHyperbolic => rc.alpha_p - rc.k * rc.lambda * rc.gamma_g / (rc.dim * rc.p),
        Estimate::DispersiveHyperbolic | Estimate::SmoothingHyperbolic => rc.alpha_pq - growth,
        Estimate::DispersiveDamped | Estimate::SmoothingDamped | Estimate::SmoothingSmallLambda => rc.beta_pq(),
        Estimate::SupFlat | Estimate::DispersiveFlat | Estimate::SmoothingFlat => 0.0,
        Estimate::Viscous | Estimate::ViscousGradient => rc.sigma_nu(),
    }
}

/// `e^{t (nu Delta - c)}` acting on radial data.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatFlow {
    manifold: ModelManifold,
    kernel: HeatKernel,
    damping: f64,
    diffusivity: f64,
    quad: QuadSpec,
}

/// Data radius beyond which the heat kernel weight is below `e^{-100}`.
fn gaussian_reach(t: f64) -> f64 {
    20.0 * t.sqrt()
}

/// Tolerance targets are tight; a shortfall below `1e-7` relative is still
/// far inside every downstream tolerance.
fn accept(q: Quadrature) -> Result<f64> {
    Ok(q.within(1e-7)?.value)
}

/// `(1 - e^{-x})/x` and `1 - (1 - e^{-x})/x`, cancellation-free.
#[inline]
fn phi_pair(x: f64) -> (f64, f64) {
    if x < 1e-3 {
        let one_minus = x * (0.5 - x * (1.0 / 6.0 - x * (1.0 / 24.0 - x / 120.0)));
        (1.0 - one_minus, one_minus)
    } else {
        let phi = -(-x).exp_m1() / x;
        (phi, 1.0 - phi)
    }
}

/// `d S'(d)/S(d) - 1`.
#[inline]
fn psi_minus_one(manifold: &ModelManifold, d: f64) -> f64 {
    if !manifold.is_hyperbolic() {
        return 0.0;
    }
    let y = manifold.sqrt_kappa() * d;
    if y < 1e-2 {
        let y2 = y * y;
        y2 * (1.0 / 3.0 - y2 * (1.0 / 45.0 - 2.0 * y2 / 945.0))
    } else {
        y / y.tanh() - 1.0
    }
}

/// Weight `w` with `u(t, d) = int f(rho) w drho` in dimension 3, undamped.
pub(crate) fn heat_weight_3d(manifold: &ModelManifold, t: f64, d: f64, rho: f64) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    let base = -0.5 * (4.0 * PI * t).ln() - manifold.spectral_bottom() * t + manifold.ln_area_radius(rho);
    let ln_w = if d == 0.0 {
        base + (rho / t).ln() - rho * rho / (4.0 * t)
    } else {
        let e = -(-d * rho / t).exp_m1();
        base - manifold.ln_area_radius(d) - (d - rho).powi(2) / (4.0 * t) + e.ln()
    };
    ln_w.exp()
}

/// Weight for `d_d u(t, d)` in dimension 3, undamped.
pub(crate) fn grad_weight_3d(manifold: &ModelManifold, t: f64, d: f64, rho: f64) -> f64 {
    if rho <= 0.0 || d <= 0.0 {
        return 0.0;
    }
    let (phi, one_minus_phi) = phi_pair(d * rho / t);
    let bracket = one_minus_phi - phi * psi_minus_one(manifold, d) - phi * d * (d + rho) / (2.0 * t);
    let ln_a = -0.5 * (4.0 * PI * t).ln() - manifold.spectral_bottom() * t + manifold.ln_area_radius(rho)
        - manifold.ln_area_radius(d)
        - (d - rho).powi(2) / (4.0 * t)
        + (rho / t).ln();
    ln_a.exp() * bracket
}

/// `sin^2` of the angle at `o` between rays to points at distances `d`, `rho`
/// that are `r` apart.
#[inline]
fn sin2_angle(manifold: &ModelManifold, d: f64, rho: f64, r: f64) -> f64 {
    let v = if manifold.is_hyperbolic() {
        let s = manifold.sqrt_kappa();
        let h = |x: f64| (0.5 * s * x).sinh();
        let num = 4.0 * h(r + d - rho) * h(r - d + rho) * h(d + rho + r) * h(d + rho - r);
        num / ((s * d).sinh() * (s * rho).sinh()).powi(2)
    } else {
        (r * r - (d - rho).powi(2)) * ((d + rho).powi(2) - r * r) / (4.0 * d * d * rho * rho)
    };
    v.clamp(0.0, 1.0)
}

/// `d_d dist(x, y)` with `dist(o, x) = d`, `dist(o, y) = rho`, `dist(x, y) = r`.
#[inline]
fn distance_derivative(manifold: &ModelManifold, d: f64, rho: f64, r: f64) -> f64 {
    let v = if manifold.is_hyperbolic() {
        let s = manifold.sqrt_kappa();
        ((s * d).cosh() * (s * r).cosh() - (s * rho).cosh()) / ((s * d).sinh() * (s * r).sinh())
    } else {
        (d * d + r * r - rho * rho) / (2.0 * d * r)
    };
    v.clamp(-1.0, 1.0)
}

impl HeatFlow {
    pub fn new(manifold: ModelManifold) -> Result<Self> {
        let kernel = HeatKernel::new(manifold)?;
        let quad = if manifold.dim() == 3 { QuadSpec::with_rel_tol(1e-10) } else { QuadSpec::with_rel_tol(1e-7) };
        Ok(Self { manifold, kernel, damping: 0.0, diffusivity: 1.0, quad })
    }

    /// Multiplies the flow by `e^{-c t}`.
    pub fn with_damping(mut self, c: f64) -> Result<Self> {
        ensure(c >= 0.0 && c.is_finite(), || format!("damping {c} must be >= 0"))?;
        self.damping = c;
        Ok(self)
    }

    /// Runs `e^{t nu Delta}`.
    pub fn with_diffusivity(mut self, nu: f64) -> Result<Self> {
        ensure(nu > 0.0 && nu.is_finite(), || format!("diffusivity {nu} must be > 0"))?;
        self.diffusivity = nu;
        Ok(self)
    }

    pub fn with_quad(mut self, quad: QuadSpec) -> Self {
        self.quad = quad;
        self
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn damping(&self) -> f64 {
        self.damping
    }

    pub fn diffusivity(&self) -> f64 {
        self.diffusivity
    }

    fn prepare(&self, f: &RadialProfile, t: f64) -> Result<(f64, f64)> {
        ensure(t > 0.0 && t.is_finite(), || format!("t = {t} must be > 0"))?;
        let l = f.singularity_exponent();
        if l >= self.manifold.dim_f() {
            return Err(Error::Divergent { exponent: l, p: 1.0, dim: self.manifold.dim() });
        }
        Ok((self.diffusivity * t, (-self.damping * t).exp()))
    }

    /// `u(t, d)`.
    pub fn value(&self, f: &RadialProfile, t: f64, d: f64) -> Result<f64> {
        ensure(d >= 0.0 && d.is_finite(), || format!("offset {d} must be >= 0"))?;
        let (tau, damp) = self.prepare(f, t)?;
        if f.is_zero() {
            return Ok(0.0);
        }
        let raw = if self.manifold.dim() == 3 { self.value_3d(f, tau, d)? } else { self.value_polar(f, tau, d, false)? };
        Ok(damp * raw)
    }

    /// `d_d u(t, d)`, signed.
    pub fn gradient(&self, f: &RadialProfile, t: f64, d: f64) -> Result<f64> {
        ensure(d >= 0.0 && d.is_finite(), || format!("offset {d} must be >= 0"))?;
        let (tau, damp) = self.prepare(f, t)?;
        if f.is_zero() || d == 0.0 {
            return Ok(0.0);
        }
        let raw = if self.manifold.dim() == 3 { self.gradient_3d(f, tau, d)? } else { self.value_polar(f, tau, d, true)? };
        Ok(damp * raw)
    }

    /// Forces the two-variable quadrature, for cross-checks in dimension 3.
    pub fn value_polar_form(&self, f: &RadialProfile, t: f64, d: f64, gradient: bool) -> Result<f64> {
        let (tau, damp) = self.prepare(f, t)?;
        Ok(damp * self.value_polar(f, tau, d, gradient)?)
    }

    pub fn values(&self, f: &RadialProfile, t: f64, offsets: &[f64]) -> Result<Vec<f64>> {
        offsets.iter().map(|&d| self.value(f, t, d)).collect()
    }

    pub fn gradients(&self, f: &RadialProfile, t: f64, offsets: &[f64]) -> Result<Vec<f64>> {
        offsets.iter().map(|&d| self.gradient(f, t, d)).collect()
    }

    fn rho_breaks(&self, f: &RadialProfile, tau: f64, d: f64, reach: f64) -> Vec<f64> {
        let drift = (self.manifold.dim_f() - 1.0) * self.manifold.sqrt_kappa() * tau;
        let width = tau.sqrt();
        let mut hi = d + drift + reach;
        if let Some(s) = f.support() {
            hi = hi.min(s);
        }
        let interior = [d - reach, d - 4.0 * width, d, d + drift, d + drift + 4.0 * width];
        breakpoints(0.0, hi.max(0.0), interior.into_iter().chain(f.breakpoints()))
    }

    fn rho_spec(&self, f: &RadialProfile, exponent_at_zero: f64) -> QuadSpec {
        let mut spec = QuadSpec { singular_points: Vec::new(), ..self.quad.clone() };
        let e = exponent_at_zero - f.singularity_exponent();
        if e < 0.0 {
            spec.singular_points.push(SingularPoint::new(0.0, e));
        }
        spec
    }

    fn value_3d(&self, f: &RadialProfile, tau: f64, d: f64) -> Result<f64> {
        let br = self.rho_breaks(f, tau, d, gaussian_reach(tau));
        if br.len() < 2 || br[br.len() - 1] <= 0.0 {
            return Ok(0.0);
        }
        let m = &self.manifold;
        let q = integrate_piecewise(|rho| f.value(rho) * heat_weight_3d(m, tau, d, rho), &br, &self.rho_spec(f, 2.0))?;
        accept(q)
    }

    fn gradient_3d(&self, f: &RadialProfile, tau: f64, d: f64) -> Result<f64> {
        let br = self.rho_breaks(f, tau, d, gaussian_reach(tau));
        if br.len() < 2 || br[br.len() - 1] <= 0.0 {
            return Ok(0.0);
        }
        let m = &self.manifold;
        let q = integrate_piecewise(|rho| f.value(rho) * grad_weight_3d(m, tau, d, rho), &br, &self.rho_spec(f, 2.0))?;
        accept(q)
    }

    /// Polar form: `int f(rho) int_{|d-rho|}^{d+rho} G(r) (sin^2)^{(m-3)/2} S(r) S(rho)^{m-2}/S(d) dr drho`.
    fn value_polar(&self, f: &RadialProfile, tau: f64, d: f64, gradient: bool) -> Result<f64> {
        let m = &self.manifold;
        let dim = m.dim();
        let (_, cut) = self.kernel.mass_peak_and_cutoff(tau);
        if d == 0.0 {
            if gradient {
                return Ok(0.0);
            }
            let omega = unit_sphere_measure(dim - 1);
            let mut hi = cut;
            if let Some(s) = f.support() {
                hi = hi.min(s);
            }
            let br = breakpoints(0.0, hi, f.breakpoints());
            let spec = self.rho_spec(f, m.dim_f() - 1.0);
            let k = &self.kernel;
            let q = integrate_piecewise(
                |rho| f.value(rho) * (k.ln_value_unchecked(tau, rho) + m.ln_jacobian(rho)).exp(),
                &br,
                &spec,
            )?;
            return Ok(omega * accept(q)?);
        }
        let omega = unit_sphere_measure(dim - 2);
        let half_power = (m.dim_f() - 3.0) / 2.0;
        let inner_spec = QuadSpec::with_rel_tol(1e-10);
        let ln_sd = m.ln_area_radius(d);
        let mut failure = None;
        let mut inner = |rho: f64| -> f64 {
            if rho <= 0.0 {
                return 0.0;
            }
            let lo = (d - rho).abs();
            let hi = (d + rho).min(cut);
            if hi <= lo {
                return 0.0;
            }
            let ln_pre = (m.dim_f() - 2.0) * m.ln_area_radius(rho) - ln_sd;
            let q = integrate_best_effort(
                |r| {
                    if r <= 0.0 {
                        return 0.0;
                    }
                    let angular = if half_power == 0.0 { 1.0 } else { sin2_angle(m, d, rho, r).powf(half_power) };
                    let w = (ln_pre + m.ln_area_radius(r)).exp() * angular;
                    if gradient {
                        w * self.kernel.dr_unchecked(tau, r) * distance_derivative(m, d, rho, r)
                    } else {
                        w * self.kernel.value_unchecked(tau, r)
                    }
                },
                lo,
                hi,
                &inner_spec,
            );
            match q {
                Ok(q) => q.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let mut hi = d + cut;
        if let Some(s) = f.support() {
            hi = hi.min(s);
        }
        let lo = (d - cut).max(0.0);
        if hi <= lo {
            return Ok(0.0);
        }
        let br = breakpoints(lo, hi, [d].into_iter().chain(f.breakpoints()));
        let spec = self.rho_spec(f, 0.0);
        let q = integrate_piecewise(|rho| f.value(rho) * inner(rho), &br, &spec)?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(omega * accept(q)?)
    }

    /// Evaluates `u(t, .)` on the standard snapshot grid.
    pub fn evolve(&self, f: &RadialProfile, t: f64) -> Result<Evolved> {
        let offsets = snapshot_offsets(t * self.diffusivity);
        let values = self.values(f, t, &offsets)?;
        Evolved::new(t, offsets, values)
    }

    /// `|d_d u(t, .)|` on the standard snapshot grid.
    pub fn evolve_gradient(&self, f: &RadialProfile, t: f64) -> Result<Evolved> {
        let offsets = snapshot_offsets(t * self.diffusivity);
        let values = self.gradients(f, t, &offsets)?.into_iter().map(f64::abs).collect();
        Evolved::new(t, offsets, values)
    }

    /// `int_M u(t) dV`, by radial quadrature of pointwise evaluations.
    pub fn total_mass(&self, f: &RadialProfile, t: f64) -> Result<f64> {
        let (tau, _) = self.prepare(f, t)?;
        let support = f.support().ok_or_else(|| domain("total mass needs compactly supported data"))?;
        let (_, cut) = self.kernel.mass_peak_and_cutoff(tau);
        let hi = support + cut;
        let br = breakpoints(0.0, hi, [support, 0.5 * support]);
        let mut failure = None;
        let q = integrate_piecewise(
            |d| match self.value(f, t, d) {
                Ok(v) => v * self.manifold.jacobian(d),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NAN
                }
            },
            &br,
            &QuadSpec::with_rel_tol(1e-9),
        )?;
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(unit_sphere_measure(self.manifold.dim() - 1) * q.into_result()?.value)
    }
}

/// `u(t, d)` for every offset; thin wrapper over [`HeatFlow`].
pub fn apply_heat_radial(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    t: f64,
    offsets: &[f64],
    damping: f64,
    spec: &QuadSpec,
) -> Result<Vec<f64>> {
    HeatFlow::new(*manifold)?.with_damping(damping)?.with_quad(spec.clone()).values(profile, t, offsets)
}

/// `|d_d u(t, d)|` for every offset.
pub fn apply_grad_heat_radial(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    t: f64,
    offsets: &[f64],
    spec: &QuadSpec,
) -> Result<Vec<f64>> {
    let flow = HeatFlow::new(*manifold)?.with_quad(spec.clone());
    Ok(flow.gradients(profile, t, offsets)?.into_iter().map(f64::abs).collect())
}

const SNAPSHOT_NODES: usize = 160;
const SNAPSHOT_REACH: f64 = 64.0;

/// `0` followed by log-spaced offsets from `1e-3 min(1, sqrt t)` to 64.
pub fn snapshot_offsets(t: f64) -> Vec<f64> {
    let lo = 1e-3 * t.sqrt().min(1.0);
    std::iter::once(0.0).chain(log_space(lo, SNAPSHOT_REACH, SNAPSHOT_NODES)).collect()
}

/// Sampled radial values together with an interpolating profile.
#[derive(Debug, Clone, PartialEq)]
pub struct Evolved {
    pub t: f64,
    pub offsets: Vec<f64>,
    pub values: Vec<f64>,
    pub profile: RadialProfile,
}

impl Evolved {
    /// Log-log interpolation for positive samples, linear otherwise.
    pub fn new(t: f64, offsets: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let tiny = 1e-290;
        let first_small = values.iter().zip(&offsets).position(|(v, d)| *d > 0.0 && !(*v > tiny));
        let positive = match first_small {
            None => true,
            Some(i) => values[i..].iter().all(|v| v.abs() <= tiny),
        };
        let all_zero = values.iter().all(|v| *v == 0.0);
        let profile = if all_zero {
            RadialProfile::zero()
        } else if positive {
            RadialProfile::sampled(Snapshot::log_log(&offsets, &values)?)
        } else {
            RadialProfile::sampled(Snapshot::linear(&offsets, &values)?)
        };
        Ok(Self { t, offsets, values, profile })
    }

    /// Max of `|u|` over the evaluated offsets.
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    pub fn snapshot(&self) -> Option<&Arc<Snapshot>> {
        match self.profile.shape() {
            Shape::Sampled(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Sup,
    Morrey,
}

/// Exponents of an estimate under test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateSetup {
    pub p: f64,
    /// Target exponent; ignored for the sup norm.
    pub q: f64,
    pub lambda: f64,
    #[serde(default)]
    pub variant: Variant,
    #[serde(default = "default_c")]
    pub c: f64,
    /// Ricci damping `c0` of the Bochner heat flow; 0 for functions.
    #[serde(default)]
    pub damping: f64,
}

fn default_c() -> f64 {
    0.125
}

impl EstimateSetup {
    pub fn new(p: f64, q: f64, lambda: f64) -> Self {
        Self { p, q, lambda, variant: Variant::G, c: default_c(), damping: 0.0 }
    }

    fn target_q(&self, kind: NormKind) -> f64 {
        match kind {
            NormKind::Sup => f64::INFINITY,
            NormKind::Morrey => self.q,
        }
    }

    /// The estimate a run on `manifold` is compared against.
    pub fn estimate(&self, manifold: &ModelManifold, kind: NormKind, gradient: bool) -> Estimate {
        let damped = self.damping > 0.0;
        match (manifold.is_hyperbolic(), gradient, kind) {
            (false, false, NormKind::Sup) => Estimate::SupFlat,
            (false, false, NormKind::Morrey) => Estimate::DispersiveFlat,
            (false, true, _) => Estimate::SmoothingFlat,
            (true, false, NormKind::Sup) => Estimate::SupHyperbolic,
            (true, false, NormKind::Morrey) if damped => Estimate::DispersiveDamped,
            (true, false, NormKind::Morrey) if self.q == self.p => Estimate::MorreyHyperbolic,
            (true, false, NormKind::Morrey) => Estimate::DispersiveHyperbolic,
            (true, true, _) if damped => Estimate::SmoothingDamped,
            (true, true, _) => Estimate::SmoothingHyperbolic,
        }
    }
}

/// Small-t window of the slope fit.
pub const SMALL_T: f64 = 0.3;
/// Large-t window of the rate fit.
pub const LARGE_T: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DispersiveReport {
    pub estimate: Estimate,
    pub norm: NormKind,
    pub gradient: bool,
    /// `(t, measured norm)`.
    pub points: Vec<(f64, f64)>,
    /// `(t, predicted bound with C = 1)`.
    pub bounds: Vec<(f64, f64)>,
    pub input_norm: f64,
    pub predicted_slope: f64,
    #[serde(skip)]
    pub small_t: Option<LineFit>,
    #[serde(skip)]
    pub large_t: Option<LineFit>,
    /// Spectral rate the measured decay is compared with.
    pub reference_rate: f64,
    /// `max_t norm / bound`: the empirical constant `C`.
    pub sup_ratio: f64,
}

impl DispersiveReport {
    pub fn slope(&self) -> Option<f64> {
        self.small_t.map(|f| f.slope)
    }

    pub fn rate(&self) -> Option<f64> {
        self.large_t.map(|f| f.slope)
    }

    pub fn slope_within(&self, tol: f64) -> bool {
        self.slope().is_some_and(|s| (s - self.predicted_slope).abs() <= tol)
    }

    /// The estimates are upper bounds: data may be less singular than critical.
    pub fn slope_not_steeper(&self, tol: f64) -> bool {
        self.slope().is_some_and(|s| s >= self.predicted_slope - tol)
    }

    pub fn rate_at_least(&self, fraction: f64) -> bool {
        self.rate().is_some_and(|r| r >= fraction * self.reference_rate)
    }

    pub fn ratio_finite(&self) -> bool {
        self.sup_ratio.is_finite() && self.sup_ratio >= 0.0
    }
}

fn check_t_grid(ts: &[f64]) -> Result<()> {
    if ts.len() < 6 {
        return Err(Error::InsufficientData(format!("{} times, need at least 6", ts.len())));
    }
    ensure(ts.iter().all(|t| *t > 0.0 && t.is_finite()), || "times must be positive".into())?;
    let (lo, hi) = ts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &t| (a.min(t), b.max(t)));
    if hi / lo < 100.0 {
        return Err(Error::InsufficientData(format!("times span {lo}..{hi}, need two decades")));
    }
    Ok(())
}

/// Extends the radius grid down to `sqrt(t)/50` at the same density, so the
/// extremal ball of a solution at time `t` stays resolved.
pub fn sweep_for_time(sweep: &SweepSpec, t: f64) -> SweepSpec {
    let floor = 0.02 * t.sqrt();
    if floor >= sweep.radii.min {
        return *sweep;
    }
    let per_decade = (sweep.radii.count as f64 - 1.0) / (sweep.radii.max / sweep.radii.min).log10();
    let extra = (per_decade * (sweep.radii.min / floor).log10()).ceil() as usize;
    let mut out = *sweep;
    out.radii.min = floor;
    out.radii.count += extra;
    out
}

fn evolved_norm(u: &Evolved, kind: NormKind, params: &MorreyParams, manifold: &ModelManifold, sweep: &SweepSpec) -> Result<f64> {
    match kind {
        NormKind::Sup => Ok(u.sup()),
        NormKind::Morrey => Ok(morrey_norm_radial(&u.profile, params, manifold, sweep)?.value),
    }
}

fn run_report(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    setup: &EstimateSetup,
    ts: &[f64],
    kind: NormKind,
    sweep: &SweepSpec,
    gradient: bool,
) -> Result<DispersiveReport> {
    check_t_grid(ts)?;
    let q = setup.target_q(kind);
    let rc = rate_constants(manifold, setup.p, q, setup.lambda, setup.c)?;
    let estimate = setup.estimate(manifold, kind, gradient);
    let source = MorreyParams::new(setup.p, setup.lambda, setup.variant)?;
    let input_norm = morrey_norm_radial(profile, &source, manifold, sweep)?.value;
    let target = MorreyParams { p: if q.is_finite() { q } else { setup.p }, ..source };
    let flow = HeatFlow::new(*manifold)?.with_damping(setup.damping)?;
    let mut points = Vec::with_capacity(ts.len());
    let mut bounds = Vec::with_capacity(ts.len());
    for &t in ts {
        let u = if gradient { flow.evolve_gradient(profile, t)? } else { flow.evolve(profile, t)? };
        points.push((t, evolved_norm(&u, kind, &target, manifold, &sweep_for_time(sweep, t))?));
        bounds.push((t, predicted_bound(estimate, &rc, input_norm, t)?));
    }
    // Flat-space estimates are pure powers of t, so every point enters the fit.
    let slope_window = if manifold.is_hyperbolic() { Window::new(0.0, SMALL_T * (1.0 - 1e-12)) } else { Window::ALL };
    let small_t = fit_loglog_slope(&points, slope_window).ok();
    let large_t = if manifold.is_hyperbolic() { fit_exp_rate(&points, Window::new(LARGE_T, f64::INFINITY)).ok() } else { None };
    let sup_ratio = points.iter().zip(&bounds).map(|(a, b)| a.1 / b.1).fold(0.0, f64::max);
    Ok(DispersiveReport {
        estimate,
        norm: kind,
        gradient,
        points,
        bounds,
        input_norm,
        predicted_slope: predicted_slope(estimate, &rc),
        small_t,
        large_t,
        reference_rate: rc.lambda1 + setup.damping,
        sup_ratio,
    })
}

/// Norms of `e^{t Delta} f` over `ts`, with slope, rate and envelope ratio.
pub fn verify_dispersive(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    setup: &EstimateSetup,
    ts: &[f64],
    kind: NormKind,
    sweep: &SweepSpec,
) -> Result<DispersiveReport> {
    run_report(manifold, profile, setup, ts, kind, sweep, false)
}

/// Same for `|grad e^{t Delta} f|`.
pub fn verify_smoothing(
    manifold: &ModelManifold,
    profile: &RadialProfile,
    setup: &EstimateSetup,
    ts: &[f64],
    kind: NormKind,
    sweep: &SweepSpec,
) -> Result<DispersiveReport> {
    run_report(manifold, profile, setup, ts, kind, sweep, true)
}

/// `||u||_{q,lambda} <= ||u||_inf^{1-p/q} ||u||_{p,lambda}^{p/q}` ball by ball.
pub fn interpolation_check(
    u: &Evolved,
    p: f64,
    q: f64,
    lambda: f64,
    variant: Variant,
    manifold: &ModelManifold,
    sweep: &SweepSpec,
) -> Result<ComparisonCheck> {
    ensure(p <= q, || format!("interpolation needs p <= q, got {p} > {q}"))?;
    let quad = default_quad(manifold);
    let grid = sweep.grid_only();
    let pp = MorreyParams::new(p, lambda, variant)?;
    let pq = MorreyParams::new(q, lambda, variant)?;
    let lhs = morrey_table(&u.profile, &pq, manifold, &grid, &quad)?;
    let low: Vec<_> = morrey_table(&u.profile, &pp, manifold, &grid, &quad)?
        .into_iter()
        .map(|(b, v)| (b, v.powf(p / q)))
        .collect();
    let sup = u.sup().powf(1.0 - p / q);
    let flat: Vec<_> = lhs.iter().map(|(b, _)| (*b, sup)).collect();
    compare_tables(&lhs, &[&low, &flat])
}

/// Number of `(t, d)` points where `f <= g` fails to propagate.
pub fn comparison_failures(flow: &HeatFlow, f: &RadialProfile, g: &RadialProfile, ts: &[f64], offsets: &[f64]) -> Result<usize> {
    let mut failures = 0;
    for &t in ts {
        for &d in offsets {
            let (a, b) = (flow.value(f, t, d)?, flow.value(g, t, d)?);
            if a > b * (1.0 + 1e-9) + 1e-300 {
                failures += 1;
            }
        }
    }
    Ok(failures)
}

/// Largest relative gap between `u(t + s)` and `e^{s Delta}` applied to a snapshot of `u(t)`.
pub fn semigroup_defect(flow: &HeatFlow, f: &RadialProfile, t: f64, s: f64, offsets: &[f64]) -> Result<f64> {
    let mid = flow.evolve(f, t)?;
    let direct = flow.values(f, t + s, offsets)?;
    let composed = flow.values(&mid.profile, s, offsets)?;
    Ok(direct
        .iter()
        .zip(&composed)
        .map(|(a, b)| (a - b).abs() / a.abs().max(1e-300))
        .fold(0.0, f64::max))
}

/// Count of consecutive times where the sup norm of nonnegative data grew.
pub fn sup_increases(evolved: &[Evolved]) -> usize {
    evolved.windows(2).filter(|w| w[1].sup() > w[0].sup() * (1.0 + 1e-9)).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h3() -> ModelManifold {
        ModelManifold::hyperbolic(3, 1.0).unwrap()
    }

    fn e3() -> ModelManifold {
        ModelManifold::euclidean(3).unwrap()
    }

    #[test]
    fn rate_constants_h3() {
        let rc = rate_constants(&h3(), 2.0, 2.0, 1.0, 0.125).unwrap();
        assert_eq!(rc.k, 2.0);
        assert_eq!(rc.lambda1, 1.0);
        assert_eq!(rc.delta_m, 0.5);
        assert_eq!(rc.alpha_p, 0.5);
        assert!((rc.gamma - 16.0 / 3.0).abs() < 1e-12);
        assert!((rc.gamma_g - 64.0 / 3.0).abs() < 1e-12);
        let flat = rate_constants(&e3(), 2.0, 4.0, 1.0, 0.125).unwrap();
        assert_eq!((flat.k, flat.gamma, flat.gamma_g, flat.lambda1), (0.0, 0.0, 0.0, 0.0));
        assert!(rate_constants(&h3(), 2.0, 2.0, 1.0, 0.25).is_err());
        assert!(rate_constants(&h3(), 2.0, 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn smallness_examples() {
        let ok = smallness_condition_check(&h3(), 2.0, 0.05, 0.125).unwrap();
        assert!(ok.satisfied && (ok.lhs - 0.2706).abs() < 1e-3, "{ok:?}");
        let bad = smallness_condition_check(&h3(), 2.0, 0.5, 0.125).unwrap();
        assert!(!bad.satisfied && (bad.lhs - 3.111).abs() < 1e-3, "{bad:?}");
        let flat = smallness_condition_check(&e3(), 2.0, 1.0, 0.125).unwrap();
        assert!(flat.satisfied && flat.lhs == 0.0 && flat.rhs == 0.0);
    }

    #[test]
    fn bound_examples() {
        let rc = rate_constants(&e3(), 2.0, 4.0, 1.0, 0.125).unwrap();
        let b = predicted_bound(Estimate::DispersiveFlat, &rc, 1.0, 4.0).unwrap();
        assert!((b - 0.5f64.sqrt()).abs() < 1e-14);
        let rc = rate_constants(&h3(), 2.0, 2.0, 1.0, 0.125).unwrap();
        let t: f64 = 0.5;
        let want = t.powf(-0.75) * t.powf(0.25) * (-(1.0 - 2.0 * 16.0 / 3.0 / 3.0) * t / 2.0).exp();
        let got = predicted_bound(Estimate::SupHyperbolic, &rc, 1.0, t).unwrap();
        assert!((got / want - 1.0).abs() < 1e-14);
        let want = (-0.5f64 * 2.0 + 2.0 * 64.0 / 3.0 * 2.0 / 6.0).exp();
        let got = predicted_bound(Estimate::SmoothingHyperbolic, &rc, 1.0, 2.0).unwrap();
        assert!((got / want - 1.0).abs() < 1e-14);
        assert!(matches!("nonsense".parse::<Estimate>(), Err(Error::Usage(_))));
        for e in Estimate::ALL {
            assert_eq!(e.id().parse::<Estimate>().unwrap(), e);
        }
    }

    #[test]
    fn inverse_distance_at_origin() {
        let flow = HeatFlow::new(e3()).unwrap();
        let f = RadialProfile::power_exp(1.0, 0.0);
        let v = flow.value(&f, 1.0, 0.0).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-9, "{v}");
        // u = erf(d / 2 sqrt t) / d
        let v = flow.value(&f, 1.0, 1.0).unwrap();
        assert!((v - 0.520_499_877_813_046_5).abs() < 1e-9, "{v}");
    }

    #[test]
    fn damping_factorizes() {
        let f = RadialProfile::power_exp(0.5, 1.0);
        let spec = QuadSpec::with_rel_tol(1e-10);
        let ds = [0.0, 0.3, 2.0];
        let a = apply_heat_radial(&h3(), &f, 0.7, &ds, 0.0, &spec).unwrap();
        let b = apply_heat_radial(&h3(), &f, 0.7, &ds, 2.0, &spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y / x - (-1.4f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn short_time_identity() {
        let f = RadialProfile::plateau(3.0);
        for m in [e3(), h3()] {
            let v = HeatFlow::new(m).unwrap().value(&f, 1e-4, 1.0).unwrap();
            assert!((v - 1.0).abs() < 1e-3, "{v}");
        }
    }

    #[test]
    fn gradient_matches_finite_difference() {
        let f = RadialProfile::power_exp(0.5, 1.0);
        for m in [e3(), h3()] {
            let flow = HeatFlow::new(m).unwrap();
            for (t, d) in [(0.1f64, 0.05f64), (0.5, 1.0), (2.0, 3.0), (0.01, 0.4)] {
                let h = 1e-4 * d.max(0.1);
                let fd = (flow.value(&f, t, d + h).unwrap() - flow.value(&f, t, d - h).unwrap()) / (2.0 * h);
                let g = flow.gradient(&f, t, d).unwrap();
                assert!((g - fd).abs() <= 1e-6 * fd.abs().max(1e-3), "t={t} d={d}: {g} vs {fd}");
            }
            assert_eq!(flow.gradient(&f, 1.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn polar_form_agrees_in_three_dimensions() {
        let f = RadialProfile::power_exp(0.5, 1.0);
        for m in [e3(), h3()] {
            let flow = HeatFlow::new(m).unwrap().with_quad(QuadSpec::with_rel_tol(1e-9));
            for (t, d) in [(0.3, 0.0), (0.3, 0.7), (1.5, 2.0)] {
                let a = flow.value(&f, t, d).unwrap();
                let b = flow.value_polar_form(&f, t, d, false).unwrap();
                assert!((a / b - 1.0).abs() < 1e-7, "t={t} d={d}: {a} vs {b}");
                if d > 0.0 {
                    let a = flow.gradient(&f, t, d).unwrap();
                    let b = flow.value_polar_form(&f, t, d, true).unwrap();
                    assert!((a / b - 1.0).abs() < 1e-6, "grad t={t} d={d}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn five_dimensional_mass() {
        let h5 = ModelManifold::hyperbolic(5, 1.0).unwrap();
        let f = RadialProfile::bump(1.0);
        let flow = HeatFlow::new(h5).unwrap();
        let mass0 = unit_sphere_measure(4)
            * crate::numerics::integrate_adaptive_1d(|r| f.value(r) * h5.jacobian(r), 0.0, 1.0, &QuadSpec::default())
                .unwrap()
                .value;
        let mass = flow.total_mass(&f, 0.2).unwrap();
        assert!((mass / mass0 - 1.0).abs() < 1e-5, "{mass} vs {mass0}");
    }

    #[test]
    fn mass_and_semigroup_in_three_dimensions() {
        let f = RadialProfile::bump(1.5);
        for m in [e3(), h3()] {
            let flow = HeatFlow::new(m).unwrap();
            let mass0 = 4.0 * PI
                * crate::numerics::integrate_adaptive_1d(|r| f.value(r) * m.jacobian(r), 0.0, 1.5, &QuadSpec::default())
                    .unwrap()
                    .value;
            let mass = flow.total_mass(&f, 0.5).unwrap();
            assert!((mass / mass0 - 1.0).abs() < 1e-6, "{mass} vs {mass0}");
            let defect = semigroup_defect(&flow, &f, 0.3, 0.4, &[0.0, 0.5, 1.0, 2.5]).unwrap();
            assert!(defect < 1e-4, "{defect}");
        }
    }

    #[test]
    fn flat_sup_slope_is_minus_half() {
        let f = RadialProfile::power_exp(1.0, 0.0);
        let ts = log_space(0.01, 1.0, 7);
        let setup = EstimateSetup::new(2.0, 2.0, 1.0);
        let r = verify_dispersive(&e3(), &f, &setup, &ts, NormKind::Sup, &SweepSpec::default()).unwrap();
        assert!((r.slope().unwrap() + 0.5).abs() < 1e-6, "{:?}", r.small_t);
        assert!((r.predicted_slope + 0.5).abs() < 1e-12);
        assert!(r.ratio_finite());
        let short = verify_dispersive(&e3(), &f, &setup, &[0.1, 1.0], NormKind::Sup, &SweepSpec::default());
        assert!(matches!(short, Err(Error::InsufficientData(_))));
    }

    #[test]
    fn interpolation_on_evolved_snapshot() {
        let f = RadialProfile::power_exp(1.0, 0.0);
        let u = HeatFlow::new(e3()).unwrap().evolve(&f, 1.0).unwrap();
        let sweep = SweepSpec::default();
        let c = interpolation_check(&u, 2.0, 4.0, 1.0, Variant::G, &e3(), &sweep).unwrap();
        assert!(c.pass, "{c:?}");
        let same = interpolation_check(&u, 2.0, 2.0, 1.0, Variant::G, &e3(), &sweep).unwrap();
        assert!(same.pass && (same.lhs / same.rhs - 1.0).abs() < 1e-12);
    }
}
