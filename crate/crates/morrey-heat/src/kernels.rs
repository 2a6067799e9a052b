//! Exact heat kernels on model spaces and the envelopes they are compared
//! against.
//!
//! Odd-dimensional hyperbolic kernels beyond `m = 3` come from the shift
//! `p_{n+2} = -e^{-n t} / (2 pi sinh r) d_r p_n`, carried out symbolically on
//! sums of terms `c t^{-a} r^i sinh^{-j} r cosh^k r` times `e^{-lambda1 t - r^2/4t}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, ensure, Error, Result};
use crate::geometry::{ln_ball_volume, ModelManifold};
use crate::numerics::{integrate_piecewise, QuadSpec, Quadrature};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    Gaussian,
    HyperbolicOddClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Term {
    coef: f64,
    t_pow: f64,
    r_pow: i32,
    sinh_pow: i32,
    cosh_pow: i32,
}

impl Term {
    #[inline]
    fn eval(&self, t: f64, r: f64, sh: f64, ch: f64) -> f64 {
        self.coef * t.powf(-self.t_pow) * r.powi(self.r_pow) * sh.powi(-self.sinh_pow) * ch.powi(self.cosh_pow)
    }

    fn same_shape(&self, o: &Term) -> bool {
        self.t_pow == o.t_pow && self.r_pow == o.r_pow && self.sinh_pow == o.sinh_pow && self.cosh_pow == o.cosh_pow
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
struct TermSum(Vec<Term>);

impl TermSum {
    fn push(&mut self, term: Term) {
        if term.coef == 0.0 {
            return;
        }
        match self.0.iter_mut().find(|x| x.same_shape(&term)) {
            Some(x) => x.coef += term.coef,
            None => self.0.push(term),
        }
    }

    /// Radial derivative, Gaussian factor included.
    fn dr(&self) -> TermSum {
        let mut out = TermSum::default();
        for t in &self.0 {
            if t.r_pow != 0 {
                out.push(Term { coef: t.coef * f64::from(t.r_pow), r_pow: t.r_pow - 1, ..*t });
            }
            if t.sinh_pow != 0 {
                out.push(Term {
                    coef: -t.coef * f64::from(t.sinh_pow),
                    sinh_pow: t.sinh_pow + 1,
                    cosh_pow: t.cosh_pow + 1,
                    ..*t
                });
            }
            if t.cosh_pow != 0 {
                out.push(Term {
                    coef: t.coef * f64::from(t.cosh_pow),
                    sinh_pow: t.sinh_pow - 1,
                    cosh_pow: t.cosh_pow - 1,
                    ..*t
                });
            }
            out.push(Term { coef: -0.5 * t.coef, t_pow: t.t_pow + 1.0, r_pow: t.r_pow + 1, ..*t });
        }
        out
    }

    fn times_coth(&self, c: f64) -> TermSum {
        let mut out = TermSum::default();
        for t in &self.0 {
            out.push(Term { coef: c * t.coef, sinh_pow: t.sinh_pow + 1, cosh_pow: t.cosh_pow + 1, ..*t });
        }
        out
    }

    fn over_sinh(&self, c: f64) -> TermSum {
        let mut out = TermSum::default();
        for t in &self.0 {
            out.push(Term { coef: c * t.coef, sinh_pow: t.sinh_pow + 1, ..*t });
        }
        out
    }

    fn add(&self, other: &TermSum) -> TermSum {
        let mut out = self.clone();
        for t in &other.0 {
            out.push(*t);
        }
        out
    }

    fn max_sinh_pow(&self) -> i32 {
        self.0.iter().map(|t| t.sinh_pow).max().unwrap_or(0)
    }

    /// Sum of terms, without the `e^{-lambda1 t - r^2/4t}` factor.
    fn eval(&self, t: f64, r: f64) -> f64 {
        let (sh, ch) = (r.sinh(), r.cosh());
        self.0.iter().map(|x| x.eval(t, r, sh, ch)).sum()
    }
}

/// A term sum with its small-`r` cutover: below `cutoff` the (even) sum is
/// extrapolated as a cubic in `r^2` from four nodes.
#[derive(Debug, Clone, PartialEq)]
struct Evaluator {
    terms: TermSum,
    cutoff: f64,
    odd: bool,
}

impl Evaluator {
    fn new(terms: TermSum, odd: bool) -> Self {
        let cutoff = match terms.max_sinh_pow() {
            ..=1 => 1e-4,
            2..=3 => 1e-2,
            4..=5 => 3e-2,
            _ => 6e-2,
        };
        Self { terms, cutoff, odd }
    }

    fn eval(&self, t: f64, r: f64) -> f64 {
        let h = self.cutoff * t.sqrt().min(1.0);
        if r >= h {
            return self.terms.eval(t, r);
        }
        // even part as a cubic in x = r^2 through r = h, 2h, 3h, 4h
        let g = |rr: f64| {
            let v = self.terms.eval(t, rr);
            if self.odd {
                v / rr
            } else {
                v
            }
        };
        let xs: [f64; 4] = std::array::from_fn(|i| (h * (i + 1) as f64).powi(2));
        let ys: [f64; 4] = std::array::from_fn(|i| g(h * (i + 1) as f64));
        let x = r * r;
        let mut acc = 0.0;
        for i in 0..4 {
            let mut w = 1.0;
            for j in 0..4 {
                if i != j {
                    w *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += w * ys[i];
        }
        if self.odd {
            acc * r
        } else {
            acc
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct OddTerms {
    value: Evaluator,
    dr: Evaluator,
    laplacian: Evaluator,
}

/// Exact heat kernel `G(t, r)` of a model space.
#[derive(Debug, Clone, PartialEq)]
pub struct HeatKernel {
    manifold: ModelManifold,
    form: KernelForm,
    odd: Option<OddTerms>,
}

const FOUR_PI_POW_3_2: f64 = 44.546_623_974_653_656; // (4 pi)^{3/2}

impl HeatKernel {
    pub fn new(manifold: ModelManifold) -> Result<Self> {
        if !manifold.is_hyperbolic() {
            return Ok(Self { manifold, form: KernelForm::Gaussian, odd: None });
        }
        let m = manifold.dim();
        if m.is_multiple_of(2) {
            return Err(Error::UnsupportedDimension(m));
        }
        let mut p = TermSum::default();
        p.push(Term { coef: 1.0 / FOUR_PI_POW_3_2, t_pow: 1.5, r_pow: 1, sinh_pow: 1, cosh_pow: 0 });
        for _ in 0..(m - 3) / 2 {
            p = p.dr().over_sinh(-1.0 / (2.0 * PI));
        }
        let dp = p.dr();
        let lap = dp.dr().add(&dp.times_coth(f64::from(m - 1)));
        let odd = OddTerms {
            value: Evaluator::new(p, false),
            dr: Evaluator::new(dp, true),
            laplacian: Evaluator::new(lap, false),
        };
        Ok(Self { manifold, form: KernelForm::HyperbolicOddClosedForm, odd: Some(odd) })
    }

    pub fn manifold(&self) -> &ModelManifold {
        &self.manifold
    }

    pub fn form(&self) -> KernelForm {
        self.form
    }

    fn check(t: f64, r: f64) -> Result<()> {
        ensure(t > 0.0 && t.is_finite(), || format!("heat kernel needs t > 0, got {t}"))?;
        ensure(r >= 0.0 && r.is_finite(), || format!("heat kernel needs r >= 0, got {r}"))
    }

    /// `(unit-curvature time, unit-curvature radius, density scale)`.
    #[inline]
    fn unit(&self, t: f64, r: f64) -> (f64, f64, f64) {
        let k = self.manifold.kappa();
        (k * t, k.sqrt() * r, k.powf(0.5 * self.manifold.dim_f()))
    }

    #[inline]
    fn lambda_unit(&self) -> f64 {
        let m1 = self.manifold.dim_f() - 1.0;
        0.25 * m1 * m1
    }

    pub fn value(&self, t: f64, r: f64) -> Result<f64> {
        Self::check(t, r)?;
        Ok(self.value_unchecked(t, r))
    }

    pub(crate) fn value_unchecked(&self, t: f64, r: f64) -> f64 {
        self.ln_value_unchecked(t, r).exp()
    }

    /// `ln G(t, r)`, finite even where `G` underflows.
    pub fn ln_value(&self, t: f64, r: f64) -> Result<f64> {
        Self::check(t, r)?;
        Ok(self.ln_value_unchecked(t, r))
    }

    pub(crate) fn ln_value_unchecked(&self, t: f64, r: f64) -> f64 {
        let m = self.manifold.dim_f();
        match &self.odd {
            None => -0.5 * m * (4.0 * PI * t).ln() - r * r / (4.0 * t),
            Some(odd) => {
                let (tu, ru, scale) = self.unit(t, r);
                let gauss = -self.lambda_unit() * tu - ru * ru / (4.0 * tu);
                if self.manifold.dim() == 3 {
                    return scale.ln() - 1.5 * tu.ln() - FOUR_PI_POW_3_2.ln() + ln_r_over_sinh(ru) + gauss;
                }
                scale.ln() + odd.value.eval(tu, ru).ln() + gauss
            }
        }
    }

    /// Analytic `d_r G`; zero at the origin.
    pub fn dr(&self, t: f64, r: f64) -> Result<f64> {
        Self::check(t, r)?;
        Ok(self.dr_unchecked(t, r))
    }

    pub(crate) fn dr_unchecked(&self, t: f64, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        match &self.odd {
            None => -r / (2.0 * t) * self.value_unchecked(t, r),
            Some(odd) => {
                let (tu, ru, scale) = self.unit(t, r);
                let gauss = (-self.lambda_unit() * tu - ru * ru / (4.0 * tu)).exp();
                let sk = self.manifold.sqrt_kappa();
                if self.manifold.dim() == 3 {
                    let (g, dg) = r_over_sinh_with_derivative(ru);
                    let pre = scale * tu.powf(-1.5) / FOUR_PI_POW_3_2 * gauss;
                    return sk * pre * (dg - g * ru / (2.0 * tu));
                }
                sk * scale * odd.dr.eval(tu, ru) * gauss
            }
        }
    }

    /// Radial Laplacian `G'' + (m-1) S'/S G'`, evaluated analytically.
    pub fn laplacian(&self, t: f64, r: f64) -> Result<f64> {
        Self::check(t, r)?;
        let m = self.manifold.dim_f();
        Ok(match &self.odd {
            None => {
                let g = self.value_unchecked(t, r);
                g * (r * r / (4.0 * t * t) - m / (2.0 * t))
            }
            Some(odd) => {
                let (tu, ru, scale) = self.unit(t, r);
                let gauss = (-self.lambda_unit() * tu - ru * ru / (4.0 * tu)).exp();
                self.manifold.kappa() * scale * odd.laplacian.eval(tu, ru) * gauss
            }
        })
    }

    /// `d_t G` by a five-point difference, independent of the closed form's
    /// time structure.
    pub fn dt_numeric(&self, t: f64, r: f64) -> Result<f64> {
        Self::check(t, r)?;
        let h = 1e-3 * t;
        let f = |s: f64| self.value_unchecked(s, r);
        Ok((f(t - 2.0 * h) - 8.0 * f(t - h) + 8.0 * f(t + h) - f(t + 2.0 * h)) / (12.0 * h))
    }

    /// Radius past which the mass density `G J` is below `e^{-400}` of its peak.
    pub fn mass_peak_and_cutoff(&self, t: f64) -> (f64, f64) {
        let drift = (self.manifold.dim_f() - 1.0) * self.manifold.sqrt_kappa() * t;
        (drift, drift + 40.0 * t.sqrt() + 1.0)
    }
}

#[inline]
fn ln_r_over_sinh(r: f64) -> f64 {
    if r < 1e-4 {
        -r * r / 6.0
    } else if r > 20.0 {
        r.ln() - r + std::f64::consts::LN_2 - (-(-2.0 * r).exp()).ln_1p()
    } else {
        (r / r.sinh()).ln()
    }
}

/// `r / sinh r` and its derivative, with series near 0.
#[inline]
fn r_over_sinh_with_derivative(r: f64) -> (f64, f64) {
    if r < 1e-3 {
        let r2 = r * r;
        (1.0 - r2 / 6.0 + 7.0 * r2 * r2 / 360.0, -r / 3.0 + 7.0 * r * r2 / 90.0)
    } else {
        let sh = r.sinh();
        let g = r / sh;
        (g, (1.0 - r * r.cosh() / sh) / sh)
    }
}

/// `int_M G(t, dist(o, x)) dV(x)`; stochastic completeness says 1.
pub fn kernel_mass(kernel: &HeatKernel, t: f64, spec: &QuadSpec) -> Result<Quadrature> {
    HeatKernel::check(t, 0.0)?;
    let manifold = kernel.manifold();
    let omega = crate::geometry::unit_sphere_measure(manifold.dim() - 1);
    let (peak, cutoff) = kernel.mass_peak_and_cutoff(t);
    let breaks = crate::numerics::breakpoints(0.0, cutoff, [peak, peak + 5.0 * t.sqrt(), (peak - 5.0 * t.sqrt()).max(0.0)]);
    let q = integrate_piecewise(
        |r| (kernel.ln_value_unchecked(t, r) + manifold.ln_jacobian(r)).exp(),
        &breaks,
        spec,
    )?
    .into_result()?;
    Ok(Quadrature { value: omega * q.value, error: omega * q.error, ..q })
}

/// `|d_t G - Delta G| / (|d_t G| + |Delta G| + G/t)`. The `G/t` floor keeps the
/// ratio meaningful where `d_t G` vanishes, e.g. `t = 0.5, r = 2` on `H^3`.
pub fn kernel_pde_residual(kernel: &HeatKernel, t: f64, r: f64) -> Result<f64> {
    ensure(r > 0.0, || "PDE residual needs r > 0".into())?;
    let dt = kernel.dt_numeric(t, r)?;
    let lap = kernel.laplacian(t, r)?;
    let scale = kernel.value(t, r)? / t;
    Ok((dt - lap).abs() / (dt.abs() + lap.abs() + scale + 1e-300))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Davies,
    CartanHadamard,
    Combined,
    HyperbolicSharp,
    RicciFlat,
    BoundedGeometryGrad,
}

/// A kernel upper bound from the literature, with its unspecified
/// multiplicative constant carried as `constant`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelEnvelope {
    kind: EnvelopeKind,
    manifold: ModelManifold,
    constant: f64,
    diffusion: f64,
    gauss_rate: f64,
}

impl KernelEnvelope {
    fn build(kind: EnvelopeKind, manifold: ModelManifold, constant: f64) -> Result<Self> {
        ensure(constant > 0.0 && constant.is_finite(), || "envelope constant must be positive".into())?;
        Ok(Self { kind, manifold, constant, diffusion: 4.0, gauss_rate: 0.25 })
    }

    /// `C |B(s)|^{-1} e^{-lambda1 t - r^2/4t}`, `s = min{1, sqrt t, t/r}`.
    pub fn davies(manifold: ModelManifold, constant: f64) -> Result<Self> {
        Self::build(EnvelopeKind::Davies, manifold, constant)
    }

    /// `C max{1, t^{-m/2}} e^{-lambda1 t - r^2/(2 D t)}` with `D > 2`.
    pub fn cartan_hadamard(manifold: ModelManifold, constant: f64, diffusion: f64) -> Result<Self> {
        ensure(diffusion > 2.0, || format!("Cartan-Hadamard envelope needs D > 2, got {diffusion}"))?;
        Ok(Self { diffusion, ..Self::build(EnvelopeKind::CartanHadamard, manifold, constant)? })
    }

    /// `C max{1, t^{-m/2}} e^{-lambda1 t - r^2/4t}`.
    pub fn combined(manifold: ModelManifold, constant: f64) -> Result<Self> {
        Self::build(EnvelopeKind::Combined, manifold, constant)
    }

    /// `C t^{-m/2} (1+r+t)^{(m-3)/2} (1+r) e^{-(m-1)^2 kappa t/4 - r^2/4t - (m-1) sqrt(kappa) r/2}`.
    pub fn hyperbolic_sharp(manifold: ModelManifold) -> Result<Self> {
        ensure(manifold.is_hyperbolic(), || "sharp hyperbolic envelope needs a hyperbolic manifold".into())?;
        Self::build(EnvelopeKind::HyperbolicSharp, manifold, 1.0)
    }

    /// `C1 t^{-m/2} e^{-C2 r^2/t}`.
    pub fn ricci_flat(manifold: ModelManifold, c1: f64, c2: f64) -> Result<Self> {
        ensure(c2 > 0.0, || "Gaussian rate must be positive".into())?;
        Ok(Self { gauss_rate: c2, ..Self::build(EnvelopeKind::RicciFlat, manifold, c1)? })
    }

    /// `C1 t^{-(m+1)/2} e^{-C2 r^2/t}`, a bound for `|d_r G|`.
    pub fn bounded_geometry_grad(manifold: ModelManifold, c1: f64, c2: f64) -> Result<Self> {
        ensure(c2 > 0.0, || "Gaussian rate must be positive".into())?;
        Ok(Self { gauss_rate: c2, ..Self::build(EnvelopeKind::BoundedGeometryGrad, manifold, c1)? })
    }

    pub fn kind(&self) -> EnvelopeKind {
        self.kind
    }

    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn with_constant(mut self, constant: f64) -> Self {
        self.constant = constant;
        self
    }

    pub fn eval(&self, t: f64, r: f64) -> Result<f64> {
        Ok(self.ln_eval(t, r)?.exp())
    }

    pub fn ln_eval(&self, t: f64, r: f64) -> Result<f64> {
        HeatKernel::check(t, r)?;
        let m = self.manifold.dim_f();
        let lambda1 = self.manifold.spectral_bottom();
        let ln_c = self.constant.ln();
        let short = (-0.5 * m * t.ln()).max(0.0);
        Ok(match self.kind {
            EnvelopeKind::Davies => {
                let s = 1f64.min(t.sqrt()).min(if r > 0.0 { t / r } else { f64::INFINITY });
                ln_c - ln_ball_volume(&self.manifold, s)? - lambda1 * t - r * r / (4.0 * t)
            }
            EnvelopeKind::CartanHadamard => ln_c + short - lambda1 * t - r * r / (2.0 * self.diffusion * t),
            EnvelopeKind::Combined => ln_c + short - lambda1 * t - r * r / (4.0 * t),
            EnvelopeKind::HyperbolicSharp => {
                let k = self.manifold.kappa();
                let m1 = m - 1.0;
                ln_c - 0.5 * m * t.ln() + 0.5 * (m - 3.0) * (1.0 + r + t).ln() + r.ln_1p()
                    - 0.25 * m1 * m1 * k * t
                    - r * r / (4.0 * t)
                    - 0.5 * m1 * k.sqrt() * r
            }
            EnvelopeKind::RicciFlat => ln_c - 0.5 * m * t.ln() - self.gauss_rate * r * r / t,
            EnvelopeKind::BoundedGeometryGrad => ln_c - 0.5 * (m + 1.0) * t.ln() - self.gauss_rate * r * r / t,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// `(t, r, kernel / envelope)`
    pub table: Vec<(f64, f64, f64)>,
}

impl RatioScan {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// `G / envelope` over a grid, in log space so deep tails stay finite.
pub fn envelope_ratio_scan(kernel: &HeatKernel, env: &KernelEnvelope, ts: &[f64], rs: &[f64]) -> Result<RatioScan> {
    ensure(!ts.is_empty() && !rs.is_empty(), || "ratio scan needs nonempty grids".into())?;
    let gradient = env.kind() == EnvelopeKind::BoundedGeometryGrad;
    let mut table = Vec::with_capacity(ts.len() * rs.len());
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for &t in ts {
        for &r in rs {
            let ln_k = if gradient {
                kernel.dr(t, r)?.abs().ln()
            } else {
                kernel.ln_value(t, r)?
            };
            let ratio = (ln_k - env.ln_eval(t, r)?).exp();
            if ratio.is_nan() {
                return Err(domain(format!("ratio undefined at t={t}, r={r}")));
            }
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            table.push((t, r, ratio));
        }
    }
    Ok(RatioScan { min_ratio: lo, max_ratio: hi, table })
}

/// Smallest constant making `G <= envelope` on the grid.
pub fn calibrate_envelope(kernel: &HeatKernel, env: &KernelEnvelope, ts: &[f64], rs: &[f64]) -> Result<KernelEnvelope> {
    let unit = env.clone().with_constant(1.0);
    let scan = envelope_ratio_scan(kernel, &unit, ts, rs)?;
    Ok(unit.with_constant(scan.max_ratio))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{lin_space, log_space};

    fn h(m: u32) -> HeatKernel {
        HeatKernel::new(ModelManifold::hyperbolic(m, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn closed_form_values() {
        let e3 = HeatKernel::new(ModelManifold::euclidean(3).unwrap()).unwrap();
        assert!((e3.value(1.0, 0.0).unwrap() - 0.022_448_390).abs() < 1e-9);
        let v = h(3).value(1.0, 1.0).unwrap();
        let exact = (1f64 / 1f64.sinh()) * (-1.25f64).exp() / FOUR_PI_POW_3_2;
        assert!((v / exact - 1.0).abs() < 1e-14);
        assert!((v - 5.473e-3).abs() < 1e-6);
        // r / sinh r -> 1, leaving e^{-t}
        assert!((h(3).value(1.0, 0.0).unwrap() * FOUR_PI_POW_3_2 - (-1f64).exp()).abs() < 1e-14);
        assert!(matches!(HeatKernel::new(ModelManifold::hyperbolic(4, 1.0).unwrap()), Err(Error::UnsupportedDimension(4))));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for k in [HeatKernel::new(ModelManifold::euclidean(3).unwrap()).unwrap(), h(3), h(5), h(7)] {
            for (t, r) in [(1.0, 1.0), (0.3, 0.5), (2.0, 3.0)] {
                let e = 1e-5;
                let fd = (k.value(t, r + e).unwrap() - k.value(t, r - e).unwrap()) / (2.0 * e);
                let an = k.dr(t, r).unwrap();
                assert!((fd - an).abs() < 1e-8 * an.abs().max(1e-3), "m={} t={t} r={r}: {fd} {an}", k.manifold().dim());
            }
            assert_eq!(k.dr(1.0, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn pde_residuals_small() {
        let e3 = HeatKernel::new(ModelManifold::euclidean(3).unwrap()).unwrap();
        assert!(kernel_pde_residual(&e3, 1.0, 1.0).unwrap() < 1e-8);
        assert!(kernel_pde_residual(&h(3), 0.5, 2.0).unwrap() < 1e-6);
        assert!(kernel_pde_residual(&h(5), 1.0, 1.0).unwrap() < 1e-6);
        assert!(kernel_pde_residual(&h(7), 1.0, 1.5).unwrap() < 1e-6);
    }

    #[test]
    fn recursion_small_r_is_continuous() {
        let k = h(5);
        for t in [0.05, 1.0] {
            let a = k.value(t, 1e-7).unwrap();
            let b = k.value(t, 0.2 * t.sqrt()).unwrap();
            let c = k.value(t, 0.02 * t.sqrt()).unwrap();
            assert!(a > c && c > b);
            assert!((a / c - 1.0).abs() < 1e-2);
        }
    }

    #[test]
    fn masses_are_one() {
        let spec = QuadSpec::with_rel_tol(1e-10);
        for k in [HeatKernel::new(ModelManifold::euclidean(3).unwrap()).unwrap(), h(3), h(5)] {
            for t in [0.1, 1.0, 10.0] {
                let mass = kernel_mass(&k, t, &spec).unwrap().value;
                assert!((mass - 1.0).abs() < 1e-8, "m={} t={t}: {mass}", k.manifold().dim());
            }
        }
    }

    #[test]
    fn curvature_scaling() {
        let base = h(3);
        for kappa in [0.25, 4.0] {
            let k = HeatKernel::new(ModelManifold::hyperbolic(3, kappa).unwrap()).unwrap();
            for (t, r) in [(0.7, 0.4), (2.0, 3.0)] {
                let lhs = k.value(t, r).unwrap();
                let rhs = kappa.powf(1.5) * base.value(kappa * t, kappa.sqrt() * r).unwrap();
                assert!((lhs / rhs - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn envelope_examples() {
        let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let sharp = KernelEnvelope::hyperbolic_sharp(h3).unwrap();
        assert!((sharp.eval(1.0, 0.0).unwrap() - (-1f64).exp()).abs() < 1e-15);
        let ch = KernelEnvelope::cartan_hadamard(h3, 1.0, 3.0).unwrap();
        assert!((ch.eval(2.0, 0.0).unwrap() - (-2f64).exp()).abs() < 1e-15);
        assert!(KernelEnvelope::cartan_hadamard(h3, 1.0, 2.0).is_err());
        assert!(KernelEnvelope::hyperbolic_sharp(ModelManifold::euclidean(3).unwrap()).is_err());
    }

    #[test]
    fn sharp_envelope_comparable() {
        let ts = log_space(0.01, 100.0, 25);
        let rs = lin_space(0.0, 40.0, 41);
        let env = KernelEnvelope::hyperbolic_sharp(ModelManifold::hyperbolic(3, 1.0).unwrap()).unwrap();
        let scan = envelope_ratio_scan(&h(3), &env, &ts, &rs).unwrap();
        assert!(scan.spread() <= 2.0 + 1e-9);
        assert!((scan.min_ratio * FOUR_PI_POW_3_2 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_vs_ricci_flat() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let k = HeatKernel::new(e3).unwrap();
        let env = KernelEnvelope::ricci_flat(e3, 1.0, 0.25).unwrap();
        let scan = envelope_ratio_scan(&k, &env, &[0.1, 1.0, 5.0], &[0.0, 1.0, 3.0]).unwrap();
        assert!((scan.spread() - 1.0).abs() < 1e-12);
        assert!((scan.max_ratio * FOUR_PI_POW_3_2 - 1.0).abs() < 1e-12);
    }
}
