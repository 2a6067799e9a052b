//! JSON configuration. Every section is optional and defaults to the
//! acceptance settings; unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::mild::{DuhamelQuad, MildGrid};
use crate::morrey::MorreyParams;
use crate::numerics::{LogGrid, SweepSpec};
use crate::profile::ProfileSpec;
use crate::riesz::SubordinationSpec;
use crate::semigroup::EstimateSetup;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub sweep: SweepSpec,
    pub volumes: VolumesConfig,
    pub kernel: KernelConfig,
    pub morrey: MorreyConfig,
    pub dispersive: DispersiveConfig,
    pub smoothing: SmoothingConfig,
    pub riesz: RieszConfig,
    pub mild: MildConfig,
    pub fixed_point: FixedPointConfig,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Usage(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| Error::Usage(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.sweep.validate()?;
        self.volumes.validate()?;
        self.kernel.validate()?;
        self.morrey.validate()?;
        self.dispersive.validate()?;
        self.smoothing.validate()?;
        self.riesz.validate()?;
        self.mild.validate()?;
        self.fixed_point.validate()
    }
}

fn positive(xs: &[f64], what: &str) -> Result<()> {
    ensure(!xs.is_empty() && xs.iter().all(|x| *x > 0.0 && x.is_finite()), || format!("{what} must be positive"))
}

fn grid(g: &LogGrid, what: &str) -> Result<()> {
    ensure(g.min > 0.0 && g.max > g.min && g.count >= 2, || format!("{what}: need 0 < min < max and count >= 2"))
}

fn setup(s: &EstimateSetup) -> Result<()> {
    MorreyParams::new(s.p, s.lambda, s.variant)?;
    ensure(s.q >= s.p, || format!("q = {} must be >= p = {}", s.q, s.p))?;
    ensure(s.c > 0.0 && s.c < 0.25, || format!("c = {} must lie in (0, 1/4)", s.c))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VolumesConfig {
    pub curvature: f64,
    pub radii: Vec<f64>,
    pub tol: f64,
    pub fine: LogGrid,
    pub poly_power: f64,
    pub switch_radius: f64,
}

impl Default for VolumesConfig {
    fn default() -> Self {
        Self {
            curvature: 1.0,
            radii: vec![0.1, 1.0, 5.0, 20.0],
            tol: 1e-10,
            fine: LogGrid { min: 1e-3, max: 30.0, count: 400 },
            poly_power: 3.0,
            switch_radius: 1.0,
        }
    }
}

impl VolumesConfig {
    fn validate(&self) -> Result<()> {
        positive(&[self.curvature, self.tol, self.switch_radius], "volume settings")?;
        positive(&self.radii, "volume radii")?;
        grid(&self.fine, "volume fine grid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelConfig {
    pub mass_times: Vec<f64>,
    pub mass_tol: f64,
    pub residual_tol: f64,
    pub composition_tol: f64,
    pub envelope_times: LogGrid,
    pub envelope_radius_max: f64,
    pub envelope_radius_count: usize,
    pub envelope_spread_max: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self {
            mass_times: vec![0.1, 1.0, 10.0],
            mass_tol: 1e-6,
            residual_tol: 1e-6,
            composition_tol: 1e-4,
            envelope_times: LogGrid { min: 0.01, max: 100.0, count: 41 },
            envelope_radius_max: 40.0,
            envelope_radius_count: 81,
            envelope_spread_max: 10.0,
        }
    }
}

impl KernelConfig {
    fn validate(&self) -> Result<()> {
        positive(&self.mass_times, "mass times")?;
        positive(
            &[self.mass_tol, self.residual_tol, self.composition_tol, self.envelope_radius_max, self.envelope_spread_max],
            "kernel tolerances",
        )?;
        grid(&self.envelope_times, "envelope times")?;
        ensure(self.envelope_radius_count >= 2, || "envelope radius count must be >= 2".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MorreyConfig {
    pub params: MorreyParams,
    pub member: ProfileSpec,
    pub stability_max: f64,
    pub doubling_radii: Vec<f64>,
    pub doubling_tol: f64,
}

impl Default for MorreyConfig {
    fn default() -> Self {
        Self {
            params: MorreyParams { p: 2.0, lambda: 1.0, variant: Default::default() },
            member: ProfileSpec::PowerExp { l: 0.5, k: 1.0, amplitude: 1.0 },
            stability_max: 3.0,
            doubling_radii: vec![5.0, 10.0, 20.0, 40.0],
            doubling_tol: 0.2,
        }
    }
}

impl MorreyConfig {
    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        self.member.build()?;
        positive(&[self.stability_max, self.doubling_tol], "morrey thresholds")?;
        positive(&self.doubling_radii, "doubling radii")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersiveConfig {
    pub flat_sup_times: Vec<f64>,
    pub flat_sup_value_tol: f64,
    pub flat_sup_slope_tol: f64,
    pub flat_morrey: EstimateSetup,
    pub flat_morrey_times: Vec<f64>,
    pub flat_morrey_slope_tol: f64,
    pub hyperbolic: EstimateSetup,
    pub hyperbolic_profile: ProfileSpec,
    pub hyperbolic_times: Vec<f64>,
    pub hyperbolic_slope_tol: f64,
    pub rate_fraction: f64,
}

impl Default for DispersiveConfig {
    fn default() -> Self {
        let mut hyperbolic_times = crate::numerics::log_space(0.01, 0.3, 6);
        hyperbolic_times.extend([0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0]);
        Self {
            flat_sup_times: crate::numerics::log_space(0.01, 1.0, 7),
            flat_sup_value_tol: 1e-4,
            flat_sup_slope_tol: 1e-3,
            flat_morrey: EstimateSetup::new(2.0, 4.0, 1.0),
            flat_morrey_times: crate::numerics::log_space(0.01, 100.0, 6),
            flat_morrey_slope_tol: 0.02,
            hyperbolic: EstimateSetup::new(2.0, 2.0, 1.0),
            hyperbolic_profile: ProfileSpec::PowerExp { l: 0.5, k: 1.0, amplitude: 1.0 },
            hyperbolic_times,
            hyperbolic_slope_tol: 0.05,
            rate_fraction: 0.8,
        }
    }
}

impl DispersiveConfig {
    fn validate(&self) -> Result<()> {
        positive(&self.flat_sup_times, "flat sup times")?;
        positive(&self.flat_morrey_times, "flat morrey times")?;
        positive(&self.hyperbolic_times, "hyperbolic times")?;
        setup(&self.flat_morrey)?;
        setup(&self.hyperbolic)?;
        self.hyperbolic_profile.build()?;
        positive(
            &[self.flat_sup_value_tol, self.flat_sup_slope_tol, self.flat_morrey_slope_tol, self.hyperbolic_slope_tol, self.rate_fraction],
            "dispersive tolerances",
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SmoothingConfig {
    pub flat_times: Vec<f64>,
    pub flat_slope_tol: f64,
    pub hyperbolic: EstimateSetup,
    pub hyperbolic_profile: ProfileSpec,
    pub hyperbolic_times: Vec<f64>,
    pub hyperbolic_slope_tol: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        let mut hyperbolic_times = crate::numerics::log_space(1e-4, 0.03, 6);
        hyperbolic_times.extend([0.3, 1.0, 3.0, 5.0, 10.0]);
        Self {
            flat_times: crate::numerics::log_space(0.01, 1.0, 7),
            flat_slope_tol: 0.02,
            hyperbolic: EstimateSetup::new(2.0, 2.0, 1.0),
            hyperbolic_profile: ProfileSpec::PowerExp { l: 1.0, k: 1.0, amplitude: 1.0 },
            hyperbolic_times,
            hyperbolic_slope_tol: 0.05,
        }
    }
}

impl SmoothingConfig {
    fn validate(&self) -> Result<()> {
        positive(&self.flat_times, "flat smoothing times")?;
        positive(&self.hyperbolic_times, "hyperbolic smoothing times")?;
        setup(&self.hyperbolic)?;
        self.hyperbolic_profile.build()?;
        positive(&[self.flat_slope_tol, self.hyperbolic_slope_tol], "smoothing tolerances")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RieszConfig {
    pub subordination: SubordinationSpec,
    pub isometry_tol: f64,
    pub flat_params: MorreyParams,
    pub flat_ratio_max: f64,
    pub hyperbolic_params: MorreyParams,
    pub hyperbolic_ratio_max: f64,
    pub c: f64,
    pub split_safety: f64,
}

impl Default for RieszConfig {
    fn default() -> Self {
        Self {
            subordination: SubordinationSpec::default(),
            isometry_tol: 1e-3,
            flat_params: MorreyParams { p: 2.0, lambda: 1.0, variant: Default::default() },
            flat_ratio_max: 10.0,
            hyperbolic_params: MorreyParams { p: 2.0, lambda: 0.05, variant: Default::default() },
            hyperbolic_ratio_max: 20.0,
            c: 0.125,
            split_safety: 1.5,
        }
    }
}

impl RieszConfig {
    fn validate(&self) -> Result<()> {
        self.subordination.validate()?;
        self.flat_params.validate()?;
        self.hyperbolic_params.validate()?;
        ensure(self.c > 0.0 && self.c < 0.25, || format!("c = {} must lie in (0, 1/4)", self.c))?;
        positive(&[self.isometry_tol, self.flat_ratio_max, self.hyperbolic_ratio_max, self.split_safety], "riesz thresholds")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MildConfig {
    pub grid: MildGrid,
    pub quad: DuhamelQuad,
    pub tol: f64,
    pub max_iter: usize,
    /// Seed norm as a fraction of the measured threshold.
    pub fraction: f64,
    pub flat_profile: ProfileSpec,
    pub flat_exponents: [f64; 3],
    pub hyperbolic_profile: ProfileSpec,
    pub hyperbolic_exponents: [f64; 3],
    pub c: f64,
    pub contraction_max: f64,
    pub contraction_from: usize,
    pub residual_max: f64,
    pub scale_factor: f64,
    pub scaling_max: f64,
}

impl Default for MildConfig {
    fn default() -> Self {
        Self {
            grid: MildGrid::default(),
            quad: DuhamelQuad::default(),
            tol: 1e-9,
            max_iter: 60,
            fraction: 0.5,
            flat_profile: ProfileSpec::PowerGauss { l: 0.0, k: 1.0, amplitude: 1.0 },
            flat_exponents: [2.0, 4.0, 1.0],
            hyperbolic_profile: ProfileSpec::PowerExp { l: 0.0, k: 1.0, amplitude: 1.0 },
            hyperbolic_exponents: [3.0, 6.0, 0.05],
            c: 0.125,
            contraction_max: 0.5,
            contraction_from: 3,
            residual_max: 1e-4,
            scale_factor: 2.0,
            scaling_max: 0.02,
        }
    }
}

impl MildConfig {
    fn validate(&self) -> Result<()> {
        ensure(self.grid.time_nodes >= 2 && self.grid.radial_nodes >= 3 && self.grid.radius > 0.0, || {
            "mild grid too small".into()
        })?;
        ensure(self.quad.s_panels >= 1 && self.quad.s_order >= 1 && self.quad.rho_order >= 1, || {
            "mild quadrature orders must be >= 1".into()
        })?;
        positive(&[self.quad.panel_width, self.quad.reach, self.tol], "mild quadrature")?;
        ensure(self.fraction > 0.0 && self.fraction < 1.0, || format!("fraction {} must lie in (0, 1)", self.fraction))?;
        self.flat_profile.build()?;
        self.hyperbolic_profile.build()?;
        for [p, q, lambda] in [self.flat_exponents, self.hyperbolic_exponents] {
            MorreyParams::new(p, lambda, Default::default())?;
            ensure(q > p, || format!("Kato exponents need q > p, got p = {p}, q = {q}"))?;
        }
        ensure(self.c > 0.0 && self.c < 0.25, || format!("c = {} must lie in (0, 1/4)", self.c))?;
        positive(&[self.contraction_max, self.residual_max, self.scale_factor, self.scaling_max], "mild thresholds")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FixedPointConfig {
    pub epsilon: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub root_tol: f64,
}

impl Default for FixedPointConfig {
    fn default() -> Self {
        Self { epsilon: 0.1, tol: 1e-13, max_iter: 60, root_tol: 1e-10 }
    }
}

impl FixedPointConfig {
    fn validate(&self) -> Result<()> {
        ensure(self.epsilon >= 0.0, || "epsilon must be >= 0".into())?;
        positive(&[self.tol, self.root_tol], "fixed-point tolerances")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        assert_eq!(Config::parse("{}").unwrap(), Config::default());
    }

    #[test]
    fn rejects_unknown_keys_and_bad_exponents() {
        assert!(matches!(Config::parse(r#"{"volumes": {"curvture": 1}}"#), Err(Error::Usage(_))));
        let bad = r#"{"morrey": {"params": {"p": 0.5, "lambda": 1.0}}}"#;
        assert!(Config::parse(bad).is_err());
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = Config::parse("{\n  \"sweep\": [}").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }
}
