//! Radial data `r -> f(r)` on a model manifold, with declared behaviour at the
//! origin and at infinity.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::ModelManifold;
use crate::numerics::CubicSpline;

/// Declared behaviour at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Decay {
    Exp { rate: f64 },
    ExpSquare { rate: f64 },
    Power { eta: f64 },
    Compact { radius: f64 },
}

/// Sampled radial values turned into an evaluator.
#[derive(Debug, Clone, PartialEq)]
pub enum Snapshot {
    /// Positive samples, interpolated as `ln v` against `ln d` with power-law
    /// continuation at both ends; zero past `cutoff`.
    LogLog { spline: CubicSpline, cutoff: f64 },
    /// Signed samples on `[0, max]`, cubic in `d`; zero past the last node.
    Linear { spline: CubicSpline },
}

impl Snapshot {
    /// Builds a log-log snapshot from positive samples; non-positive or
    /// underflowing samples end the usable range.
    pub fn log_log(ds: &[f64], vs: &[f64]) -> Result<Self> {
        ensure(ds.len() == vs.len(), || "snapshot sample lengths differ".into())?;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (&d, &v) in ds.iter().zip(vs) {
            if d <= 0.0 {
                continue;
            }
            if !(v > 1e-290) || !v.is_finite() {
                break;
            }
            xs.push(d.ln());
            ys.push(v.ln());
        }
        ensure(xs.len() >= 2, || "snapshot needs two positive samples".into())?;
        let cutoff = if xs.len() < ds.iter().filter(|d| **d > 0.0).count() {
            xs[xs.len() - 1].exp()
        } else {
            f64::INFINITY
        };
        Ok(Snapshot::LogLog { spline: CubicSpline::new(xs, ys)?, cutoff })
    }

    pub fn linear(ds: &[f64], vs: &[f64]) -> Result<Self> {
        Ok(Snapshot::Linear { spline: CubicSpline::new(ds.to_vec(), vs.to_vec())? })
    }

    pub fn value(&self, r: f64) -> f64 {
        match self {
            Snapshot::LogLog { spline, cutoff } => {
                if r > *cutoff {
                    return 0.0;
                }
                if r <= 0.0 {
                    return spline.eval(spline.x_min() - 40.0).exp();
                }
                spline.eval(r.ln()).exp()
            }
            Snapshot::Linear { spline } => {
                if r > spline.x_max() {
                    0.0
                } else {
                    spline.eval(r.max(0.0))
                }
            }
        }
    }

    fn singularity_exponent(&self) -> f64 {
        match self {
            Snapshot::LogLog { spline, .. } => (-spline.derivative(spline.x_min())).max(0.0),
            Snapshot::Linear { .. } => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    /// `r^-l e^{-k r}`
    PowerExp { l: f64, k: f64 },
    /// `r^-l e^{-k r^2}`
    PowerGauss { l: f64, k: f64 },
    /// `(1 - (r/R)^2)^2` on `r < R`
    Bump { radius: f64 },
    /// `1` on `r < R`
    Plateau { radius: f64 },
    /// `|sin(2 pi n r)|` on `r < 1`
    SineBump { frequency: f64 },
    Sampled(Arc<Snapshot>),
    Sum(Vec<(f64, RadialProfile)>),
    Product(Box<RadialProfile>, Box<RadialProfile>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    shape: Shape,
    amplitude: f64,
}

impl RadialProfile {
    pub fn new(shape: Shape) -> Self {
        Self { shape, amplitude: 1.0 }
    }

    pub fn power_exp(l: f64, k: f64) -> Self {
        Self::new(Shape::PowerExp { l, k })
    }

    pub fn power_gauss(l: f64, k: f64) -> Self {
        Self::new(Shape::PowerGauss { l, k })
    }

    pub fn bump(radius: f64) -> Self {
        Self::new(Shape::Bump { radius })
    }

    pub fn plateau(radius: f64) -> Self {
        Self::new(Shape::Plateau { radius })
    }

    pub fn sine_bump(frequency: f64) -> Self {
        Self::new(Shape::SineBump { frequency })
    }

    pub fn sampled(snapshot: Snapshot) -> Self {
        Self::new(Shape::Sampled(Arc::new(snapshot)))
    }

    pub fn zero() -> Self {
        Self::new(Shape::Plateau { radius: 1.0 }).scaled(0.0)
    }

    pub fn sum(terms: Vec<(f64, RadialProfile)>) -> Self {
        Self::new(Shape::Sum(terms))
    }

    pub fn product(a: RadialProfile, b: RadialProfile) -> Self {
        Self::new(Shape::Product(Box::new(a), Box::new(b)))
    }

    pub fn scaled(mut self, c: f64) -> Self {
        self.amplitude *= c;
        self
    }

    /// `r -> f(a r)`, for closed-form shapes.
    pub fn dilated(&self, a: f64) -> Result<Self> {
        ensure(a > 0.0 && a.is_finite(), || format!("dilation factor {a} must be > 0"))?;
        let shape = match &self.shape {
            Shape::PowerExp { l, k } => return Ok(Self::power_exp(*l, k * a).scaled(self.amplitude * a.powf(-l))),
            Shape::PowerGauss { l, k } => {
                return Ok(Self::power_gauss(*l, k * a * a).scaled(self.amplitude * a.powf(-l)))
            }
            Shape::Bump { radius } => Shape::Bump { radius: radius / a },
            Shape::Plateau { radius } => Shape::Plateau { radius: radius / a },
            Shape::Sum(terms) => {
                Shape::Sum(terms.iter().map(|(c, f)| Ok((*c, f.dilated(a)?))).collect::<Result<_>>()?)
            }
            Shape::Product(x, y) => Shape::Product(Box::new(x.dilated(a)?), Box::new(y.dilated(a)?)),
            Shape::SineBump { .. } | Shape::Sampled(_) => {
                return Err(Error::Usage("dilation is only defined for closed-form profiles".into()))
            }
        };
        Ok(Self { shape, amplitude: self.amplitude })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * self.shape_value(r)
    }

    fn shape_value(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::PowerExp { l, k } => {
                let e = (-k * r).exp();
                if *l == 0.0 {
                    e
                } else {
                    r.powf(-l) * e
                }
            }
            Shape::PowerGauss { l, k } => {
                let e = (-k * r * r).exp();
                if *l == 0.0 {
                    e
                } else {
                    r.powf(-l) * e
                }
            }
            Shape::Bump { radius } => {
                if r < *radius {
                    let q = 1.0 - (r / radius).powi(2);
                    q * q
                } else {
                    0.0
                }
            }
            Shape::Plateau { radius } => {
                if r < *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::SineBump { frequency } => {
                if r < 1.0 {
                    (2.0 * std::f64::consts::PI * frequency * r).sin().abs()
                } else {
                    0.0
                }
            }
            Shape::Sampled(s) => s.value(r),
            Shape::Sum(terms) => terms.iter().map(|(c, f)| c * f.value(r)).sum(),
            Shape::Product(a, b) => a.value(r) * b.value(r),
        }
    }

    /// Exponent `l` of the declared `r^-l` behaviour at the origin.
    pub fn singularity_exponent(&self) -> f64 {
        match &self.shape {
            Shape::PowerExp { l, .. } | Shape::PowerGauss { l, .. } => *l,
            Shape::Sampled(s) => s.singularity_exponent(),
            Shape::Sum(terms) => terms.iter().map(|(_, f)| f.singularity_exponent()).fold(0.0, f64::max),
            Shape::Product(a, b) => a.singularity_exponent() + b.singularity_exponent(),
            _ => 0.0,
        }
    }

    pub fn decay(&self) -> Decay {
        match &self.shape {
            Shape::PowerExp { l, k } => {
                if *k > 0.0 {
                    Decay::Exp { rate: *k }
                } else {
                    Decay::Power { eta: *l }
                }
            }
            Shape::PowerGauss { k, l } => {
                if *k > 0.0 {
                    Decay::ExpSquare { rate: *k }
                } else {
                    Decay::Power { eta: *l }
                }
            }
            Shape::Bump { radius } | Shape::Plateau { radius } => Decay::Compact { radius: *radius },
            Shape::SineBump { .. } => Decay::Compact { radius: 1.0 },
            Shape::Sampled(s) => match s.as_ref() {
                Snapshot::LogLog { cutoff, .. } if cutoff.is_finite() => Decay::Compact { radius: *cutoff },
                Snapshot::Linear { spline } => Decay::Compact { radius: spline.x_max() },
                Snapshot::LogLog { spline, .. } => Decay::Power { eta: -spline.derivative(spline.x_max()) },
            },
            Shape::Sum(terms) => terms.iter().map(|(_, f)| f.decay()).fold(Decay::Compact { radius: 0.0 }, slowest),
            Shape::Product(a, b) => fastest(a.decay(), b.decay()),
        }
    }

    /// Finite support radius, when there is one.
    pub fn support(&self) -> Option<f64> {
        match self.decay() {
            Decay::Compact { radius } => Some(radius),
            _ => None,
        }
    }

    /// Points where the profile or its derivative jumps.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Bump { radius } | Shape::Plateau { radius } => vec![*radius],
            Shape::SineBump { frequency } => {
                let n = (2.0 * frequency).ceil() as usize;
                (1..=n).map(|j| j as f64 / (2.0 * frequency)).filter(|&x| x <= 1.0).chain([1.0]).collect()
            }
            Shape::Sampled(s) => match s.as_ref() {
                Snapshot::LogLog { cutoff, .. } if cutoff.is_finite() => vec![*cutoff],
                Snapshot::Linear { spline } => vec![spline.x_max()],
                _ => Vec::new(),
            },
            Shape::Sum(terms) => terms.iter().flat_map(|(_, f)| f.breakpoints()).collect(),
            Shape::Product(a, b) => a.breakpoints().into_iter().chain(b.breakpoints()).collect(),
            _ => Vec::new(),
        }
    }
}

fn decay_rank(d: &Decay) -> (u8, f64) {
    match *d {
        Decay::Power { eta } => (0, eta),
        Decay::Exp { rate } => (1, rate),
        Decay::ExpSquare { rate } => (2, rate),
        Decay::Compact { radius } => (3, -radius),
    }
}

fn slowest(a: Decay, b: Decay) -> Decay {
    if decay_rank(&a) <= decay_rank(&b) {
        a
    } else {
        b
    }
}

fn fastest(a: Decay, b: Decay) -> Decay {
    if decay_rank(&a) >= decay_rank(&b) {
        a
    } else {
        b
    }
}

/// A Morrey example profile together with its membership verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleProfile {
    pub profile: RadialProfile,
    pub member: bool,
}

/// `r^-l e^{-k r}`, flagged as a member of the `(p, lambda)` Morrey space when
/// `l <= (m - lambda)/p`, `l p < m` and `k >= (m-1) sqrt(K) / p`.
pub fn example_profile(manifold: &ModelManifold, p: f64, lambda: f64, l: f64, k: f64) -> ExampleProfile {
    let m = manifold.dim_f();
    let member = l >= 0.0 && l <= (m - lambda) / p && l * p < m && k >= manifold.growth_rate() / p;
    ExampleProfile { profile: RadialProfile::power_exp(l, k), member }
}

/// Gaussian-decay twin `r^-l e^{-k r^2}`: any `k > 0` decays fast enough.
pub fn example_profile_gaussian(manifold: &ModelManifold, p: f64, lambda: f64, l: f64, k: f64) -> ExampleProfile {
    let m = manifold.dim_f();
    let member = l >= 0.0 && l <= (m - lambda) / p && l * p < m && k > 0.0;
    ExampleProfile { profile: RadialProfile::power_gauss(l, k), member }
}

/// Configuration-file description of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileSpec {
    PowerExp {
        l: f64,
        k: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    PowerGauss {
        l: f64,
        k: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    Bump {
        radius: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
}

fn one() -> f64 {
    1.0
}

impl ProfileSpec {
    pub fn build(&self) -> Result<RadialProfile> {
        let (p, a) = match *self {
            ProfileSpec::PowerExp { l, k, amplitude } => {
                ensure(l >= 0.0 && k >= 0.0, || "profile needs l >= 0 and k >= 0".into())?;
                (RadialProfile::power_exp(l, k), amplitude)
            }
            ProfileSpec::PowerGauss { l, k, amplitude } => {
                ensure(l >= 0.0 && k >= 0.0, || "profile needs l >= 0 and k >= 0".into())?;
                (RadialProfile::power_gauss(l, k), amplitude)
            }
            ProfileSpec::Bump { radius, amplitude } => {
                ensure(radius > 0.0, || "bump radius must be positive".into())?;
                (RadialProfile::bump(radius), amplitude)
            }
        };
        ensure(a.is_finite() && a >= 0.0, || "amplitude must be finite and >= 0".into())?;
        Ok(p.scaled(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example_flags() {
        let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
        assert!(example_profile(&h3, 2.0, 1.0, 0.5, 1.0).member);
        assert!(!example_profile(&h3, 2.0, 1.0, 2.0, 1.0).member);
        assert!(!example_profile(&h3, 2.0, 1.0, 0.5, 0.5).member);
        let pure = example_profile(&h3, 2.0, 1.0, 0.0, 1.0).profile;
        assert_eq!(pure.value(2.0), (-2f64).exp());
        assert!(example_profile_gaussian(&h3, 2.0, 1.0, 0.5, 0.1).member);
    }

    #[test]
    fn log_log_snapshot_reproduces_power_laws() {
        let ds: Vec<f64> = (0..60).map(|i| 0.01 * 1.1f64.powi(i)).collect();
        let vs: Vec<f64> = ds.iter().map(|d| 3.0 / d).collect();
        let s = Snapshot::log_log(&ds, &vs).unwrap();
        for r in [1e-4, 0.05, 1.0, 500.0] {
            assert!((s.value(r) * r / 3.0 - 1.0).abs() < 1e-10);
        }
        assert!((s.singularity_exponent() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn snapshot_underflow_truncates() {
        let ds: Vec<f64> = (1..1000).map(|i| f64::from(i) * 0.05).collect();
        let vs: Vec<f64> = ds.iter().map(|d| (-d * d).exp()).collect();
        let s = Snapshot::log_log(&ds, &vs).unwrap();
        assert_eq!(s.value(40.0), 0.0);
        assert!((s.value(2.5) / (-6.25f64).exp() - 1.0).abs() < 1e-3);
    }
}
