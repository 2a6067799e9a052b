//! Picard iteration for `u = u1 + N(u, u) + T u`, Kato time-weighted norms,
//! and a radial scalar surrogate of the incompressible flow equations:
//!
//! `u(t) = e^{t(nu Delta - c)} u0 - int_0^t d_d e^{(t-s)(nu Delta - c)} (u^2/2) ds`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::geometry::ModelManifold;
use crate::morrey::{morrey_norm_radial, MorreyParams, Variant};
use crate::numerics::{CubicSpline, GaussLegendre, LogGrid, OffsetGrid, SweepSpec};
use crate::profile::{RadialProfile, Snapshot};
use crate::semigroup::{d_of_t, grad_weight_3d, HeatFlow};

// ---------------------------------------------------------------------------
// Abstract fixed point

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixedPointProblem {
    /// Bound of the linear map.
    pub linear_bound: f64,
    /// Bound of the bilinear map.
    pub bilinear_bound: f64,
    /// Norm of the seed.
    pub epsilon: f64,
}

impl FixedPointProblem {
    pub fn new(linear_bound: f64, bilinear_bound: f64, epsilon: f64) -> Result<Self> {
        let p = Self { linear_bound, bilinear_bound, epsilon };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        ensure((0.0..1.0).contains(&self.linear_bound), || format!("linear bound {} must lie in [0, 1)", self.linear_bound))?;
        ensure(self.bilinear_bound > 0.0 && self.bilinear_bound.is_finite(), || {
            format!("bilinear bound {} must be > 0", self.bilinear_bound)
        })?;
        ensure(self.epsilon >= 0.0 && self.epsilon.is_finite(), || format!("epsilon {} must be >= 0", self.epsilon))
    }

    /// `(1 - C1)^2 / (4 C2)`.
    pub fn threshold(&self) -> f64 {
        (1.0 - self.linear_bound).powi(2) / (4.0 * self.bilinear_bound)
    }

    pub fn is_small(&self) -> bool {
        self.epsilon < self.threshold()
    }

    /// `2 eps / (1 - C1)`.
    pub fn ball_radius(&self) -> f64 {
        2.0 * self.epsilon / (1.0 - self.linear_bound)
    }

    /// Geometric rate the successive differences must beat.
    pub fn contraction_bound(&self) -> f64 {
        2.0 * self.bilinear_bound * self.ball_radius() + self.linear_bound
    }
}

/// What the iteration needs from its state space.
pub trait NormedSpace: Clone {
    /// `self + a * other`
    fn axpy(&self, a: f64, other: &Self) -> Self;
    fn norm(&self) -> f64;
}

impl NormedSpace for f64 {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self + a * other
    }

    fn norm(&self) -> f64 {
        self.abs()
    }
}

/// Sup norm.
impl NormedSpace for Vec<f64> {
    fn axpy(&self, a: f64, other: &Self) -> Self {
        self.iter().zip(other).map(|(x, y)| x + a * y).collect()
    }

    fn norm(&self) -> f64 {
        self.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPointOutcome<V> {
    pub solution: V,
    pub iterate_norms: Vec<f64>,
    /// `||u_{n+1} - u_n||`
    pub differences: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub bound: f64,
    /// Every iterate stayed inside `bound + tol`.
    pub bound_respected: bool,
}

impl<V> FixedPointOutcome<V> {
    pub fn iterations(&self) -> usize {
        self.differences.len()
    }

    /// Ratios of successive differences.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.differences.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect()
    }
}

/// Iterates `u <- u1 + N(u, u) + T u` until successive iterates are `tol` apart.
/// Running out of iterations or blowing up is reported, not raised.
pub fn fixed_point_iterate<V: NormedSpace>(
    problem: &FixedPointProblem,
    seed: &V,
    mut bilinear: impl FnMut(&V, &V) -> V,
    mut linear: impl FnMut(&V) -> V,
    tol: f64,
    max_iter: usize,
) -> Result<FixedPointOutcome<V>> {
    problem.validate()?;
    ensure(tol > 0.0, || format!("tol {tol} must be > 0"))?;
    let bound = problem.ball_radius();
    let mut u = seed.clone();
    let mut out = FixedPointOutcome {
        solution: seed.clone(),
        iterate_norms: vec![u.norm()],
        differences: Vec::new(),
        converged: false,
        diverged: false,
        bound,
        bound_respected: true,
    };
    for _ in 0..max_iter {
        let next = seed.axpy(1.0, &bilinear(&u, &u)).axpy(1.0, &linear(&u));
        let diff = next.axpy(-1.0, &u).norm();
        let norm = next.norm();
        if !(norm.is_finite() && norm < 1e150) {
            out.diverged = true;
            break;
        }
        out.iterate_norms.push(norm);
        out.differences.push(diff);
        u = next;
        if diff <= tol {
            out.converged = true;
            break;
        }
    }
    out.bound_respected = out.iterate_norms.iter().all(|&n| n <= bound + tol);
    out.solution = u;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Kato spaces

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Finite(f64),
    /// Global-in-time norm; nodes still stop at [`Horizon::node_range`].
    Infinite,
}

impl Horizon {
    pub fn node_range(&self) -> f64 {
        match *self {
            Horizon::Finite(t) => t,
            Horizon::Infinite => 10.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientComponent {
    pub exponent: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatoSpaceSpec {
    pub p: f64,
    pub q: f64,
    pub lambda: f64,
    pub beta: f64,
    pub horizon: Horizon,
    #[serde(default)]
    pub gradient: Option<GradientComponent>,
}

impl KatoSpaceSpec {
    pub fn validate_for(&self, manifold: &ModelManifold) -> Result<()> {
        let m = manifold.dim_f();
        ensure(m - self.lambda <= self.p && self.p < self.q, || {
            format!("need m - lambda <= p < q, got p = {}, q = {}, lambda = {}", self.p, self.q, self.lambda)
        })?;
        ensure(self.beta >= 0.0, || format!("beta {} must be >= 0", self.beta))?;
        if let Horizon::Finite(t) = self.horizon {
            ensure(t > 0.0 && t.is_finite(), || format!("horizon {t} must be > 0"))?;
        }
        if let Some(g) = self.gradient {
            ensure(g.exponent >= self.p && g.rate >= 0.0, || "gradient exponent must be >= p and rate >= 0".into())?;
        }
        Ok(())
    }

    /// `[d(t)^{m/2} t^{-lambda/2}]^{1/p - 1/q} e^{beta t}`
    pub fn x_weight(&self, manifold: &ModelManifold, t: f64) -> f64 {
        let m = manifold.dim_f();
        let e = 1.0 / self.p - 1.0 / self.q;
        ((0.5 * m * d_of_t(t).ln() - 0.5 * self.lambda * t.ln()) * e + self.beta * t).exp()
    }

    /// `d(t)^{1/2 + (m/2)(1/p - 1/s)} t^{-(lambda/2)(1/p - 1/s)} e^{rate t}`
    pub fn gradient_weight(&self, manifold: &ModelManifold, t: f64) -> Option<f64> {
        let g = self.gradient?;
        let m = manifold.dim_f();
        let e = 1.0 / self.p - 1.0 / g.exponent;
        Some(((0.5 + 0.5 * m * e) * d_of_t(t).ln() - 0.5 * self.lambda * e * t.ln() + g.rate * t).exp())
    }
}

/// Radial solution samples `u(t_i, d_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub radii: Vec<f64>,
    /// `values[i][j] = u(times[i], radii[j])`
    pub values: Vec<Vec<f64>>,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0])
}

impl Trajectory {
    pub fn new(times: Vec<f64>, radii: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        ensure(!times.is_empty() && times[0] > 0.0 && strictly_increasing(&times), || {
            "time nodes must be positive and increasing".into()
        })?;
        ensure(radii.len() >= 2 && radii[0] == 0.0 && strictly_increasing(&radii), || {
            "radial grid must start at 0 and increase".into()
        })?;
        ensure(values.len() == times.len() && values.iter().all(|row| row.len() == radii.len()), || {
            "trajectory values do not match the grids".into()
        })?;
        ensure(values.iter().flatten().all(|v| v.is_finite()), || "trajectory values must be finite".into())?;
        Ok(Self { times, radii, values })
    }

    pub fn zeros(times: Vec<f64>, radii: Vec<f64>) -> Result<Self> {
        let values = vec![vec![0.0; radii.len()]; times.len()];
        Self::new(times, radii, values)
    }

    /// `self + a * other` on identical grids.
    pub fn axpy(&self, a: f64, other: &Trajectory) -> Trajectory {
        let values =
            self.values.iter().zip(&other.values).map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + a * q).collect()).collect();
        Trajectory { times: self.times.clone(), radii: self.radii.clone(), values }
    }

    pub fn scaled(&self, a: f64) -> Trajectory {
        let values = self.values.iter().map(|row| row.iter().map(|v| a * v).collect()).collect();
        Trajectory { times: self.times.clone(), radii: self.radii.clone(), values }
    }

    pub fn snapshot(&self, i: usize) -> Result<RadialProfile> {
        sampled(&self.radii, &self.values[i])
    }

    /// Centered differences in `d`, one-sided at the ends.
    pub fn gradient_snapshot(&self, i: usize) -> Result<RadialProfile> {
        let (d, u) = (&self.radii, &self.values[i]);
        let n = d.len();
        let g: Vec<f64> = (0..n)
            .map(|j| {
                let (a, b) = (j.saturating_sub(1), (j + 1).min(n - 1));
                (u[b] - u[a]) / (d[b] - d[a])
            })
            .collect();
        sampled(d, &g)
    }

    /// Every `dt`-th time node (counted from the last) and every `dr`-th radius.
    pub fn subsample(&self, dt: usize, dr: usize) -> Result<Trajectory> {
        let n = self.times.len();
        let rows: Vec<usize> = (0..n).rev().step_by(dt.max(1)).collect::<Vec<_>>().into_iter().rev().collect();
        let cols: Vec<usize> = (0..self.radii.len()).step_by(dr.max(1)).collect();
        Trajectory::new(
            rows.iter().map(|&i| self.times[i]).collect(),
            cols.iter().map(|&j| self.radii[j]).collect(),
            rows.iter().map(|&i| cols.iter().map(|&j| self.values[i][j]).collect()).collect(),
        )
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

fn sampled(radii: &[f64], values: &[f64]) -> Result<RadialProfile> {
    if values.iter().all(|&v| v == 0.0) {
        return Ok(RadialProfile::zero());
    }
    Ok(RadialProfile::sampled(Snapshot::linear(radii, values)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KatoNorm {
    pub cm: f64,
    pub x: f64,
    pub gradient: Option<f64>,
    pub total: f64,
}

/// Coarse ball grid for trajectory norms, sized to the default radial grid.
pub fn kato_sweep() -> SweepSpec {
    SweepSpec { radii: LogGrid { min: 2e-2, max: 30.0, count: 12 }, offsets: OffsetGrid { max: 10.0, count: 6 }, refine_rounds: 0 }
}

pub fn kato_norm(traj: &Trajectory, spec: &KatoSpaceSpec, manifold: &ModelManifold, sweep: &SweepSpec) -> Result<KatoNorm> {
    spec.validate_for(manifold)?;
    if let Horizon::Finite(t) = spec.horizon {
        ensure(traj.times.iter().all(|&s| s <= t), || format!("trajectory extends past the horizon {t}"))?;
    }
    let norm = |f: &RadialProfile, p: f64| -> Result<f64> {
        Ok(morrey_norm_radial(f, &MorreyParams::new(p, spec.lambda, Variant::G)?, manifold, sweep)?.value)
    };
    let mut out = KatoNorm { cm: 0.0, x: 0.0, gradient: spec.gradient.map(|_| 0.0), total: 0.0 };
    for (i, &t) in traj.times.iter().enumerate() {
        let f = traj.snapshot(i)?;
        if f.is_zero() {
            continue;
        }
        out.cm = out.cm.max(norm(&f, spec.p)?);
        out.x = out.x.max(spec.x_weight(manifold, t) * norm(&f, spec.q)?);
        if let (Some(g), Some(w)) = (spec.gradient, spec.gradient_weight(manifold, t)) {
            let grad = w * norm(&traj.gradient_snapshot(i)?, g.exponent)?;
            out.gradient = out.gradient.map(|v| v.max(grad));
        }
    }
    out.total = out.cm + out.x + out.gradient.unwrap_or(0.0);
    Ok(out)
}

// ---------------------------------------------------------------------------
// Mild surrogate

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `N(u) = d_d(u^2) / 2`
    #[default]
    BurgersDiv,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MildProblem {
    pub manifold: ModelManifold,
    pub viscosity: f64,
    /// Zeroth-order damping `c_eff`.
    pub damping: f64,
    pub initial: RadialProfile,
    pub nonlinearity: Nonlinearity,
}

impl MildProblem {
    /// `nu = 1`; damping `2 c0` on hyperbolic models, 0 on flat ones.
    pub fn new(manifold: ModelManifold, initial: RadialProfile) -> Result<Self> {
        if manifold.dim() != 3 {
            return Err(Error::Usage(format!("the mild surrogate runs in dimension 3, got {}", manifold.dim())));
        }
        let damping = 2.0 * manifold.ricci_upper();
        Ok(Self { manifold, viscosity: 1.0, damping, initial, nonlinearity: Nonlinearity::BurgersDiv })
    }

    pub fn with_viscosity(mut self, nu: f64) -> Result<Self> {
        ensure(nu > 0.0 && nu.is_finite(), || format!("viscosity {nu} must be > 0"))?;
        self.viscosity = nu;
        Ok(self)
    }

    pub fn with_damping(mut self, c: f64) -> Result<Self> {
        ensure(c >= 0.0 && c.is_finite(), || format!("damping {c} must be >= 0"))?;
        self.damping = c;
        Ok(self)
    }

    pub fn with_nonlinearity(mut self, n: Nonlinearity) -> Self {
        self.nonlinearity = n;
        self
    }

    pub fn with_initial(mut self, f: RadialProfile) -> Self {
        self.initial = f;
        self
    }

    fn flow(&self) -> Result<HeatFlow> {
        HeatFlow::new(self.manifold)?.with_diffusivity(self.viscosity)?.with_damping(self.damping)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MildGrid {
    pub time_nodes: usize,
    pub radial_nodes: usize,
    pub radius: f64,
}

impl Default for MildGrid {
    fn default() -> Self {
        Self { time_nodes: 40, radial_nodes: 200, radius: 30.0 }
    }
}

impl MildGrid {
    /// `t_i = T (i/N)^2`, `i = 1..N`.
    pub fn times(&self, horizon: f64) -> Vec<f64> {
        let n = self.time_nodes as f64;
        (1..=self.time_nodes).map(|i| horizon * (i as f64 / n).powi(2)).collect()
    }

    /// `d_j = R (j/M)^2`, `j = 0..M-1`.
    pub fn radii(&self) -> Vec<f64> {
        let m = (self.radial_nodes - 1) as f64;
        (0..self.radial_nodes).map(|j| self.radius * (j as f64 / m).powi(2)).collect()
    }

    pub fn refined(&self) -> Self {
        Self { time_nodes: 2 * self.time_nodes, radial_nodes: 2 * self.radial_nodes - 1, radius: self.radius }
    }

    fn validate(&self) -> Result<()> {
        ensure(self.time_nodes >= 2 && self.radial_nodes >= 3 && self.radius > 0.0, || "mild grid too small".into())
    }
}

/// Fixed rules for the Duhamel term: Gauss–Legendre in `s = sqrt(t - tau)`
/// and in `rho` on panels of `panel_width` heat widths within `reach` widths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DuhamelQuad {
    pub s_panels: usize,
    pub s_order: usize,
    pub rho_order: usize,
    pub panel_width: f64,
    pub reach: f64,
}

impl Default for DuhamelQuad {
    fn default() -> Self {
        Self { s_panels: 4, s_order: 8, rho_order: 12, panel_width: 2.0, reach: 8.0 }
    }
}

impl DuhamelQuad {
    pub fn refined(&self) -> Self {
        Self { s_panels: 2 * self.s_panels, rho_order: self.rho_order + 4, panel_width: 0.5 * self.panel_width, ..*self }
    }
}

/// `e^{t(nu Delta - c)} u0` on the grids, through the heat-flow code path.
pub fn linear_seed(problem: &MildProblem, times: &[f64], radii: &[f64]) -> Result<Trajectory> {
    let flow = problem.flow()?;
    let values = times.iter().map(|&t| flow.values(&problem.initial, t, radii)).collect::<Result<_>>()?;
    Trajectory::new(times.to_vec(), radii.to_vec(), values)
}

/// `int_0^t d_d e^{(t-tau)(nu Delta - c)} (u^2/2)(tau) dtau` on the grids of `traj`,
/// with `u(0) = u0` and cubic interpolation in time.
pub fn duhamel_term(problem: &MildProblem, traj: &Trajectory, quad: &DuhamelQuad) -> Result<Trajectory> {
    let radii = &traj.radii;
    if problem.nonlinearity == Nonlinearity::None {
        return Trajectory::zeros(traj.times.clone(), radii.clone());
    }
    let m = &problem.manifold;
    let nu = problem.viscosity;
    let drift = (m.dim_f() - 1.0) * m.sqrt_kappa();
    let r_max = radii[radii.len() - 1];
    // Time splines per radial node, through u(0) = u0.
    let knots: Vec<f64> = std::iter::once(0.0).chain(traj.times.iter().copied()).collect();
    let in_time: Vec<CubicSpline> = radii
        .iter()
        .enumerate()
        .map(|(j, &d)| {
            let ys = std::iter::once(problem.initial.value(d)).chain(traj.values.iter().map(|row| row[j])).collect();
            CubicSpline::new(knots.clone(), ys)
        })
        .collect::<Result<_>>()?;
    let s_rule = GaussLegendre::new(quad.s_order);
    let rho_rule = GaussLegendre::new(quad.rho_order);
    let mut values = Vec::with_capacity(traj.times.len());
    for &t in &traj.times {
        let mut row = vec![0.0; radii.len()];
        let s_max = t.sqrt();
        let h = s_max / quad.s_panels as f64;
        for k in 0..quad.s_panels {
            for (s, ws) in s_rule.mapped(k as f64 * h, (k + 1) as f64 * h) {
                let tau = t - s * s;
                let half_sq: Vec<f64> = in_time.iter().map(|sp| 0.5 * sp.eval(tau).powi(2)).collect();
                let w = CubicSpline::new(radii.clone(), half_sq)?;
                let lag = nu * s * s;
                let width = lag.sqrt();
                // dtau = 2 s ds; damping acts on the physical lag.
                let factor = ws * 2.0 * s * (-problem.damping * s * s).exp();
                for (j, &d) in radii.iter().enumerate().skip(1) {
                    let lo = (d - quad.reach * width).max(0.0);
                    let hi = (d + drift * lag + quad.reach * width).min(r_max);
                    if hi <= lo {
                        continue;
                    }
                    let panels = ((hi - lo) / (quad.panel_width * width)).ceil().clamp(1.0, 400.0) as usize;
                    let inner = rho_rule.composite(|rho| w.eval(rho) * grad_weight_3d(m, lag, d, rho), lo, hi, panels);
                    row[j] += factor * inner;
                }
            }
        }
        values.push(row);
    }
    Trajectory::new(traj.times.clone(), radii.clone(), values)
}

/// The mild map: linear seed minus the Duhamel term of `traj`.
pub fn duhamel_apply(problem: &MildProblem, traj: &Trajectory, quad: &DuhamelQuad) -> Result<Trajectory> {
    let seed = linear_seed(problem, &traj.times, &traj.radii)?;
    Ok(seed.axpy(-1.0, &duhamel_term(problem, traj, quad)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MildSettings {
    pub grid: MildGrid,
    pub quad: DuhamelQuad,
    /// Stop once successive iterates are this close in Kato norm.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for MildSettings {
    fn default() -> Self {
        Self { grid: MildGrid::default(), quad: DuhamelQuad::default(), tol: 1e-9, max_iter: 60 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MildReport {
    /// Kato norm of the linear seed.
    pub seed_norm: f64,
    pub iterate_norms: Vec<f64>,
    pub differences: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub converged: bool,
    pub diverged: bool,
    pub final_norm: f64,
    /// `2 * seed_norm`
    pub ball_bound: f64,
}

impl MildReport {
    pub fn within_ball(&self) -> bool {
        self.final_norm <= self.ball_bound
    }

    /// Largest contraction ratio from iterate `from` on (1-based).
    pub fn worst_ratio_from(&self, from: usize) -> f64 {
        self.contraction_ratios.iter().skip(from.saturating_sub(2)).fold(0.0, |m, &r| m.max(r))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MildSolution {
    pub trajectory: Trajectory,
    pub report: MildReport,
}

fn grids(spec: &KatoSpaceSpec, grid: &MildGrid) -> Result<(Vec<f64>, Vec<f64>)> {
    grid.validate()?;
    Ok((grid.times(spec.horizon.node_range()), grid.radii()))
}

/// Picard iteration of the mild map from the linear seed, distances in Kato norm.
pub fn solve_mild(
    problem: &MildProblem,
    spec: &KatoSpaceSpec,
    settings: &MildSettings,
    sweep: &SweepSpec,
) -> Result<MildSolution> {
    let (times, radii) = grids(spec, &settings.grid)?;
    solve_on(problem, spec, settings, sweep, times, radii)
}

fn solve_on(
    problem: &MildProblem,
    spec: &KatoSpaceSpec,
    settings: &MildSettings,
    sweep: &SweepSpec,
    times: Vec<f64>,
    radii: Vec<f64>,
) -> Result<MildSolution> {
    spec.validate_for(&problem.manifold)?;
    let m = &problem.manifold;
    let seed = linear_seed(problem, &times, &radii)?;
    let seed_norm = kato_norm(&seed, spec, m, sweep)?.total;
    let mut report = MildReport {
        seed_norm,
        iterate_norms: vec![seed_norm],
        differences: Vec::new(),
        contraction_ratios: Vec::new(),
        converged: false,
        diverged: false,
        final_norm: seed_norm,
        ball_bound: 2.0 * seed_norm,
    };
    let mut u = seed.clone();
    if problem.nonlinearity == Nonlinearity::None || seed.sup() == 0.0 {
        report.converged = true;
        report.differences.push(0.0);
        return Ok(MildSolution { trajectory: u, report });
    }
    for _ in 0..settings.max_iter {
        let next = seed.axpy(-1.0, &duhamel_term(problem, &u, &settings.quad)?);
        let diff = kato_norm(&next.axpy(-1.0, &u), spec, m, sweep)?.total;
        let norm = kato_norm(&next, spec, m, sweep)?.total;
        if !(norm.is_finite() && norm < 1e150) {
            report.diverged = true;
            break;
        }
        if let Some(&prev) = report.differences.last() {
            report.contraction_ratios.push(if prev > 0.0 { diff / prev } else { 0.0 });
        }
        report.differences.push(diff);
        report.iterate_norms.push(norm);
        u = next;
        if diff <= settings.tol {
            report.converged = true;
            break;
        }
    }
    report.final_norm = *report.iterate_norms.last().unwrap_or(&seed_norm);
    Ok(MildSolution { trajectory: u, report })
}

/// Kato norm of `u - [seed - Duhamel(u)]` with the Duhamel term on a refined rule.
pub fn residual_mild(
    problem: &MildProblem,
    traj: &Trajectory,
    spec: &KatoSpaceSpec,
    quad: &DuhamelQuad,
    sweep: &SweepSpec,
) -> Result<f64> {
    let image = duhamel_apply(problem, traj, &quad.refined())?;
    Ok(kato_norm(&traj.axpy(-1.0, &image), spec, &problem.manifold, sweep)?.total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BilinearMeasurement {
    /// Kato norm of the seed.
    pub seed_norm: f64,
    /// `||Duhamel(seed)|| / ||seed||^2`
    pub bilinear: f64,
    /// `||seed||_Kato / ||u0||_{p, lambda}`
    pub linear: f64,
}

impl BilinearMeasurement {
    /// Smallness threshold `1 / (4 C2)` on the seed norm.
    pub fn threshold(&self) -> f64 {
        1.0 / (4.0 * self.bilinear)
    }
}

/// Pilot run: bilinear constant from one Duhamel step on the seed.
pub fn measure_constants(
    problem: &MildProblem,
    spec: &KatoSpaceSpec,
    settings: &MildSettings,
    sweep: &SweepSpec,
) -> Result<BilinearMeasurement> {
    let (times, radii) = grids(spec, &settings.grid)?;
    let seed = linear_seed(problem, &times, &radii)?;
    let m = &problem.manifold;
    let seed_norm = kato_norm(&seed, spec, m, sweep)?.total;
    ensure(seed_norm > 0.0, || "zero data has no bilinear constant".into())?;
    let step = kato_norm(&duhamel_term(problem, &seed, &settings.quad)?, spec, m, sweep)?.total;
    let data = morrey_norm_radial(&problem.initial, &MorreyParams::new(spec.p, spec.lambda, Variant::G)?, m, sweep)?.value;
    Ok(BilinearMeasurement { seed_norm, bilinear: step / (seed_norm * seed_norm), linear: seed_norm / data })
}

/// Rescales the data so the seed norm sits at `fraction` of the threshold.
pub fn scale_to_threshold(problem: &MildProblem, constants: &BilinearMeasurement, fraction: f64) -> (MildProblem, f64) {
    let target = fraction * constants.threshold();
    let a = target / constants.seed_norm;
    (problem.clone().with_initial(problem.initial.clone().scaled(a)), target)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingCheck {
    pub factor: f64,
    pub max_deviation: f64,
}

/// Solves with `u0` and `a u0(a .)` on dilated grids and compares
/// `u_a(t, d)` with `a u(a^2 t, a d)` node by node.
pub fn scaling_check_euclidean(
    problem: &MildProblem,
    spec: &KatoSpaceSpec,
    settings: &MildSettings,
    sweep: &SweepSpec,
    factor: f64,
) -> Result<ScalingCheck> {
    if problem.manifold.is_hyperbolic() {
        return Err(Error::Usage("scaling check needs a flat model".into()));
    }
    if problem.nonlinearity != Nonlinearity::BurgersDiv || problem.damping != 0.0 {
        return Err(Error::Usage("scaling check needs the undamped quadratic nonlinearity".into()));
    }
    ensure(factor > 0.0 && factor.is_finite(), || format!("scale factor {factor} must be > 0"))?;
    let (times, radii) = grids(spec, &settings.grid)?;
    let base = solve_on(problem, spec, settings, sweep, times.clone(), radii.clone())?.trajectory;
    if factor == 1.0 {
        return Ok(ScalingCheck { factor, max_deviation: 0.0 });
    }
    let scaled_problem = problem.clone().with_initial(problem.initial.dilated(factor)?.scaled(factor));
    let scaled_spec = KatoSpaceSpec { horizon: Horizon::Finite(spec.horizon.node_range() / (factor * factor)), ..*spec };
    let st: Vec<f64> = times.iter().map(|t| t / (factor * factor)).collect();
    let sr: Vec<f64> = radii.iter().map(|d| d / factor).collect();
    let scaled = solve_on(&scaled_problem, &scaled_spec, settings, sweep, st, sr)?.trajectory;
    let peak = base.sup() * factor;
    let max_deviation = base
        .values
        .iter()
        .flatten()
        .zip(scaled.values.iter().flatten())
        .fold(0.0f64, |m, (u, ua)| m.max((ua - factor * u).abs()))
        / peak;
    Ok(ScalingCheck { factor, max_deviation })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_quadratic_fixed_point() {
        let problem = FixedPointProblem::new(0.0, 1.0, 0.1).unwrap();
        let out = fixed_point_iterate(&problem, &0.1, |u: &f64, v: &f64| u * v, |_| 0.0, 1e-13, 60).unwrap();
        assert!(out.converged);
        assert!(out.iterations() <= 60);
        assert!((out.solution - (1.0 - 0.6f64.sqrt()) / 2.0).abs() < 1e-10);
        assert!(out.bound_respected && (out.bound - 0.2).abs() < 1e-15);
    }

    #[test]
    fn zero_seed_stays_zero() {
        let problem = FixedPointProblem::new(0.0, 1.0, 0.0).unwrap();
        let out = fixed_point_iterate(&problem, &0.0, |u: &f64, v: &f64| u * v, |_| 0.0, 1e-12, 10).unwrap();
        assert!(out.converged && out.solution == 0.0);
    }

    #[test]
    fn large_seed_reports_divergence() {
        let problem = FixedPointProblem::new(0.0, 1.0, 2.0).unwrap();
        assert!(!problem.is_small());
        let out = fixed_point_iterate(&problem, &2.0, |u: &f64, v: &f64| u * v, |_| 0.0, 1e-12, 100).unwrap();
        assert!(out.diverged && !out.converged);
    }

    #[test]
    fn invalid_problems() {
        assert!(FixedPointProblem::new(1.0, 1.0, 0.1).is_err());
        assert!(FixedPointProblem::new(0.0, 0.0, 0.1).is_err());
    }

    #[test]
    fn kato_weights_cancel_for_pure_decay() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let spec = KatoSpaceSpec { p: 2.0, q: 2.0 + 1e-12, lambda: 1.0, beta: 0.3, horizon: Horizon::Finite(4.0), gradient: None };
        for t in [0.1, 1.0, 3.0] {
            assert!((spec.x_weight(&e3, t) * (-0.3 * t).exp() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn zero_trajectory_has_zero_norm() {
        let e3 = ModelManifold::euclidean(3).unwrap();
        let spec = KatoSpaceSpec {
            p: 2.0,
            q: 4.0,
            lambda: 1.0,
            beta: 0.0,
            horizon: Horizon::Infinite,
            gradient: Some(GradientComponent { exponent: 3.0, rate: 0.0 }),
        };
        let traj = Trajectory::zeros(vec![0.5, 1.0], vec![0.0, 1.0, 2.0]).unwrap();
        let n = kato_norm(&traj, &spec, &e3, &kato_sweep()).unwrap();
        assert_eq!((n.cm, n.x, n.gradient, n.total), (0.0, 0.0, Some(0.0), 0.0));
    }

    #[test]
    fn linear_problem_matches_heat_flow() {
        use crate::numerics::QuadSpec;
        use crate::semigroup::apply_heat_radial;
        let h3 = ModelManifold::hyperbolic(3, 1.0).unwrap();
        let f = RadialProfile::power_exp(0.0, 1.0);
        let problem = MildProblem::new(h3, f.clone()).unwrap().with_nonlinearity(Nonlinearity::None);
        let grid = MildGrid { time_nodes: 3, radial_nodes: 6, radius: 5.0 };
        let traj = Trajectory::zeros(grid.times(1.0), grid.radii()).unwrap();
        let out = duhamel_apply(&problem, &traj, &DuhamelQuad::default()).unwrap();
        for (i, &t) in out.times.iter().enumerate() {
            let direct = apply_heat_radial(&h3, &f, t, &out.radii, 4.0, &QuadSpec::with_rel_tol(1e-10)).unwrap();
            for (a, b) in out.values[i].iter().zip(direct) {
                assert!((a - b).abs() <= 1e-8 * b.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn mild_requires_dimension_three() {
        let h5 = ModelManifold::hyperbolic(5, 1.0).unwrap();
        assert!(matches!(MildProblem::new(h5, RadialProfile::zero()), Err(Error::Usage(_))));
    }
}
