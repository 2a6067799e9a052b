//! One runner per verification suite. Every check becomes a report row; a
//! check that errors becomes a failing row with a NaN measurement.

use std::f64::consts::PI;
use std::time::Instant;

use crate::cli::config::Config;
use crate::cli::report::{Curve, ReportRow, SuiteOutput, ANCHORS};
use crate::error::Result;
use crate::geometry::{
    ball_volume, bishop_ratio, calibration_radii, volume_lower_check, volume_ratio_check, VolumeEnvelope,
};
use crate::kernels::{envelope_ratio_scan, kernel_mass, kernel_pde_residual, HeatKernel, KernelEnvelope};
use crate::mild::{
    fixed_point_iterate, kato_sweep, measure_constants, residual_mild, scale_to_threshold, scaling_check_euclidean,
    solve_mild, FixedPointProblem, Horizon, KatoSpaceSpec, MildProblem, MildSettings,
};
use crate::morrey::{
    holder_check, inclusion_check, lp_doubling_increments, morrey_norm_radial, radial_mass, ComparisonCheck,
    MorreyParams, Variant,
};
use crate::numerics::{lin_space, OffsetGrid, QuadSpec, SweepSpec};
use crate::riesz::{kernel_split_certificate, l2_isometry_check, riesz_bound_report, RieszTransform};
use crate::semigroup::{
    comparison_failures, interpolation_check, rate_constants, smallness_condition_check, sup_increases,
    verify_dispersive, verify_smoothing, DispersiveReport, HeatFlow, NormKind,
};
use crate::{ModelManifold, RadialProfile};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Volumes,
    Kernel,
    Morrey,
    Dispersive,
    Smoothing,
    Riesz,
    Mild,
    FixedPoint,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Volumes,
        Suite::Kernel,
        Suite::Morrey,
        Suite::Dispersive,
        Suite::Smoothing,
        Suite::Riesz,
        Suite::Mild,
        Suite::FixedPoint,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Suite::Volumes => "volumes",
            Suite::Kernel => "kernel",
            Suite::Morrey => "morrey",
            Suite::Dispersive => "dispersive",
            Suite::Smoothing => "smoothing",
            Suite::Riesz => "riesz",
            Suite::Mild => "mild",
            Suite::FixedPoint => "fixed-point",
        }
    }

    /// Runtime budget in seconds.
    pub fn budget(self) -> f64 {
        match self {
            Suite::Volumes => 6.0,
            Suite::Kernel => 70.0,
            Suite::Morrey => 120.0,
            Suite::Dispersive => 630.0,
            Suite::Smoothing => 300.0,
            Suite::Riesz => 600.0,
            Suite::Mild => 300.0,
            Suite::FixedPoint => 1.0,
        }
    }

    pub fn run(self, cfg: &Config) -> SuiteOutput {
        let start = Instant::now();
        let mut rows = Rows::new(self.id());
        match self {
            Suite::Volumes => volumes(cfg, &mut rows),
            Suite::Kernel => kernel(cfg, &mut rows),
            Suite::Morrey => morrey(cfg, &mut rows),
            Suite::Dispersive => dispersive(cfg, &mut rows),
            Suite::Smoothing => smoothing(cfg, &mut rows),
            Suite::Riesz => riesz(cfg, &mut rows),
            Suite::Mild => mild(cfg, &mut rows),
            Suite::FixedPoint => fixed_point(cfg, &mut rows),
        }
        SuiteOutput {
            suite: self.id(),
            budget: self.budget(),
            rows: rows.rows,
            curves: rows.curves,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

/// How a row's pass flag follows from its numbers.
#[derive(Debug, Clone, Copy)]
enum Cmp {
    /// `|measured - predicted| <= tol`
    Near,
    /// `measured <= predicted + tol`
    AtMost,
    /// `measured >= predicted - tol`
    AtLeast,
    /// `measured > predicted`
    Above,
}

struct Rows {
    suite: &'static str,
    rows: Vec<ReportRow>,
    curves: Vec<Curve>,
}

impl Rows {
    fn new(suite: &'static str) -> Self {
        Self { suite, rows: Vec::new(), curves: Vec::new() }
    }

    fn push(&mut self, check: impl Into<String>, anchor: &'static str, cmp: Cmp, measured: f64, predicted: f64, tol: f64) {
        debug_assert!(ANCHORS.contains(&anchor), "unregistered anchor {anchor}");
        let pass = match cmp {
            Cmp::Near => (measured - predicted).abs() <= tol,
            Cmp::AtMost => measured <= predicted + tol,
            Cmp::AtLeast => measured >= predicted - tol,
            Cmp::Above => measured > predicted,
        };
        self.rows.push(ReportRow {
            suite: self.suite.to_string(),
            check: check.into(),
            anchor,
            measured,
            predicted,
            tol,
            pass,
            note: None,
            seconds: None,
        });
    }

    /// Runs a group of checks; an error becomes one failing row.
    fn group(&mut self, check: &str, anchor: &'static str, body: impl FnOnce(&mut Self) -> Result<()>) {
        let (start, first) = (Instant::now(), self.rows.len());
        let outcome = body(self);
        if let Err(e) = outcome {
            self.rows.push(ReportRow {
                suite: self.suite.to_string(),
                check: format!("{check}-error"),
                anchor,
                measured: f64::NAN,
                predicted: f64::NAN,
                tol: f64::NAN,
                pass: false,
                note: Some(e.to_string()),
                seconds: None,
            });
        }
        if let Some(row) = self.rows.get_mut(first) {
            row.seconds = Some(start.elapsed().as_secs_f64());
        }
    }

    fn finite(&mut self, check: impl Into<String>, anchor: &'static str, measured: f64) {
        self.push(check, anchor, Cmp::AtMost, measured, f64::MAX, 0.0);
    }

    fn comparison(&mut self, check: &str, anchor: &'static str, c: &ComparisonCheck) {
        self.push(format!("{check}-ball-failures"), anchor, Cmp::AtMost, c.ball_failures as f64, 0.0, 0.0);
        self.push(format!("{check}-sup-ratio"), anchor, Cmp::AtMost, c.lhs / c.rhs, 1.0, 1e-6);
    }

    fn curve(&mut self, name: impl Into<String>, points: Vec<(f64, f64)>) {
        self.curves.push(Curve { name: name.into(), points });
    }

    fn report_curves(&mut self, name: &str, r: &DispersiveReport) {
        self.curve(name, r.points.clone());
        self.curve(format!("{name}-bound"), r.bounds.clone());
    }
}

fn h3(kappa: f64) -> Result<ModelManifold> {
    ModelManifold::hyperbolic(3, kappa)
}

fn e3() -> Result<ModelManifold> {
    ModelManifold::euclidean(3)
}

/// `r^-1`
fn inverse_distance() -> RadialProfile {
    RadialProfile::power_exp(1.0, 0.0)
}

fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

// ---------------------------------------------------------------------------

fn volumes(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.volumes;
    rows.group("closed-form", "volume-closed-form", |rows| {
        let (h, e) = (h3(c.curvature)?, e3()?);
        let s = c.curvature.sqrt();
        for &r in &c.radii {
            let exact = PI * ((2.0 * s * r).sinh() - 2.0 * s * r) / s.powi(3);
            let rel = (ball_volume(&h, r)? / exact - 1.0).abs();
            rows.push(format!("h3-r{r}"), "volume-closed-form", Cmp::Near, rel, 0.0, c.tol);
            let exact = 4.0 * PI * r.powi(3) / 3.0;
            let rel = (ball_volume(&e, r)? / exact - 1.0).abs();
            rows.push(format!("r3-r{r}"), "volume-closed-form", Cmp::Near, rel, 0.0, c.tol);
        }
        Ok(())
    });
    rows.group("envelope", "volume-envelope", |rows| {
        let h = h3(c.curvature)?;
        let env = VolumeEnvelope::calibrate(3, c.curvature, c.poly_power, c.switch_radius, &calibration_radii())?;
        let fine = c.fine.points();
        let vols = fine.iter().map(|&r| ball_volume(&h, r)).collect::<Result<Vec<_>>>()?;
        let piecewise = max_of(fine.iter().zip(&vols).map(|(&r, v)| v / env.piecewise(r)));
        let combined = max_of(fine.iter().zip(&vols).map(|(&r, v)| v / env.combined(r)));
        rows.push("piecewise-fine-grid", "volume-envelope", Cmp::AtMost, piecewise, 1.0, 1e-12);
        rows.push("combined-fine-grid", "volume-envelope", Cmp::AtMost, combined, 1.0, 1e-12);
        Ok(())
    });
    rows.group("comparison", "volume-comparison", |rows| {
        let (h, e) = (h3(c.curvature)?, e3()?);
        for (name, m) in [("h3", h), ("r3", e)] {
            let dev = c.fine.points().into_iter().map(|r| Ok((bishop_ratio(&m, r)? - 1.0).abs())).collect::<Result<Vec<_>>>()?;
            rows.push(format!("bishop-{name}"), "volume-comparison", Cmp::Near, max_of(dev), 0.0, 1e-12);
        }
        for (r1, r2) in [(0.01, 0.1), (0.5, 5.0), (1.0, 20.0), (5.0, 30.0)] {
            let chk = volume_ratio_check(&h, r1, r2)?;
            rows.push(format!("doubling-{r1}-{r2}"), "volume-comparison", Cmp::AtMost, chk.ratio / chk.bound, 1.0, 1e-12);
        }
        for r in [1.0, 5.0, 20.0] {
            let chk = volume_lower_check(&h, r, 1.0)?;
            let v = ball_volume(&h, r)?;
            rows.push(format!("lower-poly-r{r}"), "volume-comparison", Cmp::AtLeast, v / (chk.poly_constant * r.powi(3)), 1.0, 1e-12);
            if let Some(k) = chk.exp_constant {
                let bound = k * (h.ricci_upper().sqrt() * r).exp();
                rows.push(format!("lower-exp-r{r}"), "volume-comparison", Cmp::AtLeast, v / bound, 1.0, 1e-12);
            }
        }
        Ok(())
    });
}

fn kernel(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.kernel;
    rows.group("mass", "heat-kernel-mass", |rows| {
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let k = HeatKernel::new(m)?;
            for &t in &c.mass_times {
                let mass = kernel_mass(&k, t, &QuadSpec::with_rel_tol(1e-12))?.value;
                rows.push(format!("mass-{name}-t{t}"), "heat-kernel-mass", Cmp::Near, mass, 1.0, c.mass_tol);
            }
        }
        Ok(())
    });
    rows.group("pde", "heat-kernel-pde", |rows| {
        let samples = [
            ("h3", h3(1.0)?, vec![0.05, 0.5, 2.0, 10.0], vec![0.3, 2.0]),
            ("r3", e3()?, vec![0.1, 1.0], vec![0.5, 3.0]),
            ("h5", ModelManifold::hyperbolic(5, 1.0)?, vec![0.05, 0.5, 2.0, 10.0], vec![0.3, 2.0]),
        ];
        for (name, m, ts, rs) in samples {
            let k = HeatKernel::new(m)?;
            for &t in &ts {
                for &r in &rs {
                    let res = kernel_pde_residual(&k, t, r)?;
                    rows.push(format!("residual-{name}-t{t}-r{r}"), "heat-kernel-pde", Cmp::AtMost, res, c.residual_tol, 0.0);
                }
            }
        }
        Ok(())
    });
    rows.group("composition", "heat-semigroup", |rows| {
        let f = RadialProfile::bump(1.5);
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let flow = HeatFlow::new(m)?;
            let defect = crate::semigroup::semigroup_defect(&flow, &f, 0.3, 0.4, &lin_space(0.0, 3.0, 7))?;
            rows.push(format!("composition-{name}"), "heat-semigroup", Cmp::AtMost, defect, c.composition_tol, 0.0);
        }
        Ok(())
    });
    rows.group("sharp-envelope", "sharp-kernel-envelope", |rows| {
        let m = h3(1.0)?;
        let scan = envelope_ratio_scan(
            &HeatKernel::new(m)?,
            &KernelEnvelope::hyperbolic_sharp(m)?,
            &c.envelope_times.points(),
            &lin_space(0.0, c.envelope_radius_max, c.envelope_radius_count),
        )?;
        rows.push("h3-ratio-spread", "sharp-kernel-envelope", Cmp::AtMost, scan.spread(), c.envelope_spread_max, 0.0);
        Ok(())
    });
}

fn morrey(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.morrey;
    rows.group("membership", "morrey-membership", |rows| {
        let m = h3(1.0)?;
        let f = c.member.build()?;
        let full = morrey_norm_radial(&f, &c.params, &m, &cfg.sweep)?.value;
        let centered = SweepSpec { offsets: OffsetGrid { max: 0.0, count: 1 }, ..cfg.sweep };
        let centered = morrey_norm_radial(&f, &c.params, &m, &centered)?.value;
        rows.finite("member-norm", "morrey-membership", full);
        rows.push("offset-stability", "morrey-membership", Cmp::AtMost, full / centered, c.stability_max, 0.0);
        Ok(())
    });
    rows.group("lp-doubling", "lp-non-membership", |rows| {
        let f = c.member.build()?;
        for (r, inc) in lp_doubling_increments(&f, 2.0, &h3(1.0)?, &c.doubling_radii)? {
            rows.push(format!("l2-increment-r{r}"), "lp-non-membership", Cmp::Near, inc, PI * 2f64.ln(), c.doubling_tol);
        }
        Ok(())
    });
    let grid = cfg.sweep.grid_only();
    rows.group("holder", "holder-inequality", |rows| {
        let f = c.member.build()?;
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let chk = holder_check(&f, &f, 4.0, 4.0, 1.0, 1.0, &m, &grid)?;
            rows.comparison(&format!("holder-{name}"), "holder-inequality", &chk);
        }
        Ok(())
    });
    rows.group("inclusion", "morrey-inclusion", |rows| {
        let f = c.member.build()?;
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let chk = inclusion_check(&f, (2.5, 0.5), (2.0, 1.0), &m, &grid)?;
            rows.comparison(&format!("inclusion-{name}"), "morrey-inclusion", &chk);
        }
        Ok(())
    });
}

fn dispersive(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.dispersive;
    let sweep = &cfg.sweep;
    rows.group("flat-sup", "sup-dispersive-flat", |rows| {
        let setup = crate::semigroup::EstimateSetup::new(2.0, 2.0, 1.0);
        let r = verify_dispersive(&e3()?, &inverse_distance(), &setup, &c.flat_sup_times, NormKind::Sup, sweep)?;
        if let Some(&(_, v)) = r.points.iter().find(|(t, _)| (*t - 1.0).abs() < 1e-12) {
            rows.push("r3-sup-at-t1", "sup-dispersive-flat", Cmp::Near, v, 1.0 / PI.sqrt(), c.flat_sup_value_tol);
        }
        let slope = r.slope().unwrap_or(f64::NAN);
        rows.push("r3-sup-slope", "sup-dispersive-flat", Cmp::Near, slope, r.predicted_slope, c.flat_sup_slope_tol);
        rows.report_curves("r3-sup", &r);
        Ok(())
    });
    rows.group("flat-morrey", "morrey-dispersive-flat", |rows| {
        let r = verify_dispersive(&e3()?, &inverse_distance(), &c.flat_morrey, &c.flat_morrey_times, NormKind::Morrey, sweep)?;
        let slope = r.slope().unwrap_or(f64::NAN);
        rows.push("r3-morrey-slope", "morrey-dispersive-flat", Cmp::Near, slope, r.predicted_slope, c.flat_morrey_slope_tol);
        rows.report_curves("r3-morrey", &r);
        Ok(())
    });
    rows.group("hyperbolic-sup", "dispersive-hyperbolic", |rows| {
        let f = c.hyperbolic_profile.build()?;
        let r = verify_dispersive(&h3(1.0)?, &f, &c.hyperbolic, &c.hyperbolic_times, NormKind::Sup, sweep)?;
        let slope = r.slope().unwrap_or(f64::NAN);
        rows.push("h3-sup-slope", "dispersive-hyperbolic", Cmp::Near, slope, r.predicted_slope, c.hyperbolic_slope_tol);
        let rate = r.rate().unwrap_or(f64::NAN);
        rows.push("h3-sup-rate", "dispersive-hyperbolic", Cmp::AtLeast, rate, c.rate_fraction * r.reference_rate, 0.0);
        rows.finite("h3-sup-envelope-ratio", "dispersive-hyperbolic", r.sup_ratio);
        rows.report_curves("h3-sup", &r);
        Ok(())
    });
    rows.group("interpolation", "interpolation", |rows| {
        let member = c.hyperbolic_profile.build()?;
        let cases = [("h3", h3(1.0)?, member), ("r3", e3()?, inverse_distance())];
        for (name, m, f) in cases {
            let flow = HeatFlow::new(m)?;
            for t in [0.1, 1.0] {
                let u = flow.evolve(&f, t)?;
                let chk = interpolation_check(&u, 2.0, 4.0, 1.0, Variant::G, &m, &sweep.grid_only())?;
                rows.comparison(&format!("interpolation-{name}-t{t}"), "interpolation", &chk);
            }
        }
        Ok(())
    });
    rows.group("comparison", "comparison-principle", |rows| {
        let (lo, hi) = (RadialProfile::power_exp(0.0, 2.0), RadialProfile::power_exp(0.0, 1.0));
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let flow = HeatFlow::new(m)?;
            let n = comparison_failures(&flow, &lo, &hi, &[0.1, 1.0, 10.0], &lin_space(0.0, 10.0, 11))?;
            rows.push(format!("ordering-{name}"), "comparison-principle", Cmp::AtMost, n as f64, 0.0, 0.0);
            let member = c.hyperbolic_profile.build()?;
            let evolved = [0.1, 0.3, 1.0, 3.0, 10.0].iter().map(|&t| flow.evolve(&member, t)).collect::<Result<Vec<_>>>()?;
            rows.push(format!("sup-monotone-{name}"), "comparison-principle", Cmp::AtMost, sup_increases(&evolved) as f64, 0.0, 0.0);
        }
        Ok(())
    });
    rows.group("mass", "mass-conservation", |rows| {
        let f = RadialProfile::bump(1.5);
        for (name, m) in [("h3", h3(1.0)?), ("r3", e3()?)] {
            let flow = HeatFlow::new(m)?;
            let mass0 = radial_mass(&f, 1.0, &m, 1.5)?;
            for t in [0.1, 1.0, 5.0] {
                let rel = flow.total_mass(&f, t)? / mass0;
                rows.push(format!("mass-{name}-t{t}"), "mass-conservation", Cmp::Near, rel, 1.0, 1e-6);
            }
        }
        Ok(())
    });
}

fn smoothing(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.smoothing;
    rows.group("flat", "smoothing-flat", |rows| {
        let setup = crate::semigroup::EstimateSetup::new(2.0, 2.0, 1.0);
        let r = verify_smoothing(&e3()?, &inverse_distance(), &setup, &c.flat_times, NormKind::Sup, &cfg.sweep)?;
        let slope = r.slope().unwrap_or(f64::NAN);
        rows.push("r3-gradient-sup-slope", "smoothing-flat", Cmp::Near, slope, r.predicted_slope, c.flat_slope_tol);
        rows.report_curves("r3-gradient-sup", &r);
        Ok(())
    });
    rows.group("hyperbolic", "smoothing-hyperbolic", |rows| {
        let f = c.hyperbolic_profile.build()?;
        let r = verify_smoothing(&h3(1.0)?, &f, &c.hyperbolic, &c.hyperbolic_times, NormKind::Morrey, &cfg.sweep)?;
        let slope = r.slope().unwrap_or(f64::NAN);
        rows.push("h3-gradient-morrey-slope", "smoothing-hyperbolic", Cmp::Near, slope, r.predicted_slope, c.hyperbolic_slope_tol);
        let rate = r.rate().unwrap_or(f64::NAN);
        rows.push("h3-gradient-morrey-rate", "smoothing-hyperbolic", Cmp::Above, rate, 0.0, 0.0);
        rows.report_curves("h3-gradient-morrey", &r);
        Ok(())
    });
}

/// `r^-1`, `e^{-r^2}` and `e^{-r}`.
fn riesz_family() -> Vec<RadialProfile> {
    vec![inverse_distance(), RadialProfile::power_gauss(0.0, 1.0), RadialProfile::power_exp(0.0, 1.0)]
}

fn riesz(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.riesz;
    rows.group("isometry", "riesz-isometry", |rows| {
        let chk = l2_isometry_check(&e3()?, &RadialProfile::power_gauss(0.0, 1.0), &c.subordination)?;
        rows.push("r3-l2-isometry", "riesz-isometry", Cmp::Near, chk.relative_error, 0.0, c.isometry_tol);
        Ok(())
    });
    let names = ["inverse-distance", "gaussian", "exponential"];
    for (name, m, params, max) in [
        ("r3", e3(), c.flat_params, c.flat_ratio_max),
        ("h3", h3(1.0), c.hyperbolic_params, c.hyperbolic_ratio_max),
    ] {
        rows.group(&format!("{name}-family"), "riesz-morrey-bound", |rows| {
            let m = m?;
            if m.is_hyperbolic() {
                let s = smallness_condition_check(&m, params.p, params.lambda, c.c)?;
                rows.push("h3-smallness", "smallness-condition", Cmp::AtMost, s.lhs, s.rhs, 0.0);
            }
            let report = riesz_bound_report(&m, &riesz_family(), &params, &cfg.sweep, &c.subordination)?;
            for (profile, ratio) in names.iter().zip(&report.ratios) {
                rows.push(format!("{name}-ratio-{profile}"), "riesz-morrey-bound", Cmp::AtMost, *ratio, max, 0.0);
            }
            Ok(())
        });
    }
    rows.group("kernel-split", "riesz-kernel-split", |rows| {
        let m = e3()?;
        let params = MorreyParams::new(c.flat_params.p, c.flat_params.lambda, Variant::Plain)?;
        let coarse = SweepSpec {
            radii: crate::numerics::LogGrid { min: 0.015, max: 40.0, count: 9 },
            offsets: OffsetGrid { max: 8.0, count: 5 },
            refine_rounds: 0,
        };
        let transform = RieszTransform::new(m, c.subordination)?;
        for (name, f) in names.iter().zip(riesz_family()) {
            let input = morrey_norm_radial(&f, &params, &m, &cfg.sweep)?.value;
            let out = transform.snapshot(&f)?;
            let cert = kernel_split_certificate(&out.profile, input, &params, &m, &coarse, &cfg.sweep.grid_only(), c.split_safety)?;
            rows.push(format!("r3-split-{name}"), "riesz-kernel-split", Cmp::AtMost, cert.worst, cert.safety, 0.0);
        }
        Ok(())
    });
}

fn mild(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.mild;
    let settings = MildSettings { grid: c.grid, quad: c.quad, tol: c.tol, max_iter: c.max_iter };
    let sweep = kato_sweep();
    let run = |rows: &mut Rows, name: &str, anchor: &'static str, problem: MildProblem, spec: KatoSpaceSpec| -> Result<MildProblem> {
        let constants = measure_constants(&problem, &spec, &settings, &sweep)?;
        let (problem, epsilon) = scale_to_threshold(&problem, &constants, c.fraction);
        let sol = solve_mild(&problem, &spec, &settings, &sweep)?;
        let r = &sol.report;
        rows.push(format!("{name}-seed-over-threshold"), anchor, Cmp::AtMost, r.seed_norm / constants.threshold(), c.fraction, 1e-9);
        rows.push(format!("{name}-converged-iterations"), anchor, Cmp::AtMost, r.differences.len() as f64, c.max_iter as f64, 0.0);
        rows.push(format!("{name}-final-step"), anchor, Cmp::AtMost, r.differences.last().copied().unwrap_or(f64::NAN), c.tol, 0.0);
        rows.push(format!("{name}-contraction"), anchor, Cmp::AtMost, r.worst_ratio_from(c.contraction_from), c.contraction_max, 0.0);
        rows.push(format!("{name}-kato-norm"), anchor, Cmp::AtMost, r.final_norm, 2.0 * epsilon, 1e-12 * epsilon);
        let residual = residual_mild(&problem, &sol.trajectory, &spec, &settings.quad, &sweep)?;
        rows.push(format!("{name}-residual"), anchor, Cmp::AtMost, residual, c.residual_max, 0.0);
        rows.curve(format!("{name}-differences"), r.differences.iter().enumerate().map(|(i, d)| ((i + 1) as f64, *d)).collect());
        Ok(problem)
    };
    let [p, q, lambda] = c.flat_exponents;
    let flat_spec = KatoSpaceSpec { p, q, lambda, beta: 0.0, horizon: Horizon::Infinite, gradient: None };
    let mut flat = None;
    rows.group("r3", "mild-flat", |rows| {
        let problem = MildProblem::new(e3()?, c.flat_profile.build()?)?;
        flat = Some(run(rows, "r3", "mild-flat", problem, flat_spec)?);
        Ok(())
    });
    rows.group("h3", "mild-hyperbolic-damped", |rows| {
        let m = h3(1.0)?;
        let [p, q, lambda] = c.hyperbolic_exponents;
        let beta = rate_constants(&m, p, q, lambda, c.c)?.beta_ricci;
        let spec = KatoSpaceSpec { p, q, lambda, beta, horizon: Horizon::Infinite, gradient: None };
        run(rows, "h3", "mild-hyperbolic-damped", MildProblem::new(m, c.hyperbolic_profile.build()?)?, spec)?;
        Ok(())
    });
    rows.group("scaling", "mild-scaling", |rows| {
        let problem = match flat {
            Some(p) => p,
            None => MildProblem::new(e3()?, c.flat_profile.build()?)?,
        };
        let chk = scaling_check_euclidean(&problem, &flat_spec, &settings, &sweep, c.scale_factor)?;
        rows.push(format!("r3-scaling-a{}", c.scale_factor), "mild-scaling", Cmp::AtMost, chk.max_deviation, c.scaling_max, 0.0);
        Ok(())
    });
}

/// `B(u, v)_i = sum_jk A_ijk u_j v_k` and `T` of the three-dimensional toy.
struct Toy {
    a: [[[f64; 3]; 3]; 3],
    t: [[f64; 3]; 3],
}

impl Toy {
    fn new() -> Self {
        let mut a = [[[0.0; 3]; 3]; 3];
        let mut t = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                t[i][j] = 0.05 * (1 + (i + j) % 3) as f64;
                for k in 0..3 {
                    a[i][j][k] = (1 + (i + 2 * j + 3 * k) % 4) as f64 / 12.0 * if (i + j + k) % 2 == 0 { 1.0 } else { -1.0 };
                }
            }
        }
        Self { a, t }
    }

    fn bilinear(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        (0..3).map(|i| (0..3).flat_map(|j| (0..3).map(move |k| (j, k))).map(|(j, k)| self.a[i][j][k] * u[j] * v[k]).sum()).collect()
    }

    fn linear(&self, u: &[f64]) -> Vec<f64> {
        self.t.iter().map(|row| row.iter().zip(u).map(|(a, b)| a * b).sum()).collect()
    }

    /// Sup-norm bounds `(C1, C2)`.
    fn bounds(&self) -> (f64, f64) {
        let c1 = max_of(self.t.iter().map(|row| row.iter().map(|x| x.abs()).sum()));
        let c2 = max_of(self.a.iter().map(|m| m.iter().flatten().map(|x| x.abs()).sum()));
        (c1, c2)
    }

    /// Newton on `u - seed - B(u, u) - T u = 0`, started at the seed.
    fn newton(&self, seed: &[f64]) -> Vec<f64> {
        let mut u = seed.to_vec();
        for _ in 0..50 {
            let bu = self.bilinear(&u, &u);
            let tu = self.linear(&u);
            let f: Vec<f64> = (0..3).map(|i| u[i] - seed[i] - bu[i] - tu[i]).collect();
            let mut jac = [[0.0; 3]; 3];
            for (i, row) in jac.iter_mut().enumerate() {
                for (k, x) in row.iter_mut().enumerate() {
                    let db: f64 = (0..3).map(|j| (self.a[i][j][k] + self.a[i][k][j]) * u[j]).sum();
                    *x = f64::from(u8::from(i == k)) - db - self.t[i][k];
                }
            }
            let step = solve3(jac, [f[0], f[1], f[2]]);
            u.iter_mut().zip(step).for_each(|(x, s)| *x -= s);
            if step.iter().all(|s| s.abs() < 1e-16) {
                break;
            }
        }
        u
    }
}

/// Cramer's rule.
fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> [f64; 3] {
    let det = |m: [[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det(a);
    let mut x = [0.0; 3];
    for (col, xc) in x.iter_mut().enumerate() {
        let mut m = a;
        for (row, bv) in b.iter().enumerate() {
            m[row][col] = *bv;
        }
        *xc = det(m) / d;
    }
    x
}

fn fixed_point(cfg: &Config, rows: &mut Rows) {
    let c = &cfg.fixed_point;
    rows.group("scalar", "fixed-point", |rows| {
        let problem = FixedPointProblem::new(0.0, 1.0, c.epsilon)?;
        let out = fixed_point_iterate(&problem, &c.epsilon, |u: &f64, v: &f64| u * v, |_| 0.0, c.tol, c.max_iter)?;
        let exact = (1.0 - (1.0 - 4.0 * c.epsilon).sqrt()) / 2.0;
        rows.push("scalar-root", "fixed-point", Cmp::Near, out.solution, exact, c.root_tol);
        rows.push("scalar-iterations", "fixed-point", Cmp::AtMost, out.iterations() as f64, c.max_iter as f64, 0.0);
        rows.push("scalar-ball", "fixed-point", Cmp::AtMost, max_of(out.iterate_norms.iter().copied()), out.bound, c.tol);
        Ok(())
    });
    rows.group("toy", "fixed-point", |rows| {
        let toy = Toy::new();
        let (c1, c2) = toy.bounds();
        let shape = [1.0, -0.5, 0.25];
        let epsilon = 0.5 * (1.0 - c1).powi(2) / (4.0 * c2);
        let seed: Vec<f64> = shape.iter().map(|x| x * epsilon).collect();
        let problem = FixedPointProblem::new(c1, c2, epsilon)?;
        let out = fixed_point_iterate(&problem, &seed, |u, v| toy.bilinear(u, v), |u| toy.linear(u), c.tol, c.max_iter)?;
        let root = toy.newton(&seed);
        let gap = max_of(out.solution.iter().zip(&root).map(|(a, b)| (a - b).abs()));
        rows.push("toy-vs-newton", "fixed-point", Cmp::Near, gap, 0.0, c.root_tol);
        rows.push("toy-iterations", "fixed-point", Cmp::AtMost, out.iterations() as f64, c.max_iter as f64, 0.0);
        rows.push("toy-ball", "fixed-point", Cmp::AtMost, max_of(out.iterate_norms.iter().copied()), out.bound, c.tol);
        let worst = max_of(out.contraction_ratios());
        rows.push("toy-contraction", "fixed-point", Cmp::AtMost, worst, problem.contraction_bound(), 0.0);
        Ok(())
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn newton_solves_the_toy() {
        let toy = Toy::new();
        let seed = [0.01, -0.005, 0.0025];
        let u = toy.newton(&seed);
        let bu = toy.bilinear(&u, &u);
        let tu = toy.linear(&u);
        for i in 0..3 {
            assert!((u[i] - seed[i] - bu[i] - tu[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn cheap_suites_pass_with_registered_anchors() {
        let cfg = Config::default();
        for suite in [Suite::Volumes, Suite::FixedPoint] {
            let out = suite.run(&cfg);
            assert!(!out.rows.is_empty());
            for r in &out.rows {
                assert!(r.pass, "{r:?}");
                assert!(ANCHORS.contains(&r.anchor));
            }
        }
    }
}
