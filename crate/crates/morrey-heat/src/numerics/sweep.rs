//! Supremum search over balls `(offset, radius)`: a tensor grid followed by
//! golden-section refinement around the running argmax.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::Ball;

/// `count` log-spaced points on `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogGrid {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

/// `count` equispaced points on `[0, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OffsetGrid {
    pub max: f64,
    pub count: usize,
}

impl LogGrid {
    pub fn points(&self) -> Vec<f64> {
        log_space(self.min, self.max, self.count)
    }
}

impl OffsetGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![0.0];
        }
        lin_space(0.0, self.max, self.count)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub radii: LogGrid,
    pub offsets: OffsetGrid,
    pub refine_rounds: u32,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            radii: LogGrid { min: 1e-2, max: 50.0, count: 30 },
            offsets: OffsetGrid { max: 10.0, count: 21 },
            refine_rounds: 2,
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let r = &self.radii;
        if !(r.min > 0.0) || !(r.max >= r.min) || !r.max.is_finite() || r.count < 2 {
            return Err(domain("sweep radii need 0 < min <= max and count >= 2"));
        }
        if !(self.offsets.max >= 0.0) || !self.offsets.max.is_finite() || self.offsets.count < 1 {
            return Err(domain("sweep offsets need max >= 0 and count >= 1"));
        }
        Ok(())
    }

    /// Same grid, no refinement: for comparisons that must share balls.
    pub fn grid_only(&self) -> Self {
        Self { refine_rounds: 0, ..*self }
    }

    /// Every ball on the tensor grid, offsets outermost.
    pub fn balls(&self) -> Vec<Ball> {
        let radii = self.radii.points();
        self.offsets
            .points()
            .into_iter()
            .flat_map(|d| radii.iter().map(move |&r| Ball { offset: d, radius: r }))
            .collect()
    }
}

pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                b
            } else if i == 0 {
                a
            } else {
                (la + (lb - la) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

pub fn lin_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 }).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    /// Largest objective value seen: a lower bound of the true supremum.
    pub sup_estimate: f64,
    pub argmax: Ball,
    pub evaluations: usize,
}

struct Tracker<'a, F> {
    objective: &'a mut F,
    best: f64,
    argmax: Ball,
    evaluations: usize,
}

impl<F: FnMut(Ball) -> Result<f64>> Tracker<'_, F> {
    fn eval(&mut self, ball: Ball) -> Result<f64> {
        let v = (self.objective)(ball)?;
        self.evaluations += 1;
        if !v.is_finite() {
            return Err(Error::NonFinite { value: v, offset: ball.offset, radius: ball.radius });
        }
        if v > self.best {
            self.best = v;
            self.argmax = ball;
        }
        Ok(v)
    }
}

const GOLDEN_STEPS: usize = 10;

/// Golden-section maximization of `g` on `[lo, hi]`.
fn golden<G: FnMut(f64) -> Result<f64>>(mut g: G, lo: f64, hi: f64) -> Result<()> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = g(c)?;
    let mut fd = g(d)?;
    for _ in 0..GOLDEN_STEPS {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = g(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = g(d)?;
        }
    }
    Ok(())
}

fn neighbors(grid: &[f64], x: f64) -> (f64, f64) {
    let i = grid.iter().position(|&g| g >= x).unwrap_or(grid.len() - 1);
    let lo = if i == 0 { grid[0] } else { grid[i - 1] };
    let hi = if i + 1 >= grid.len() { grid[grid.len() - 1] } else { grid[i + 1] };
    (lo, hi)
}

/// Maximizes `objective` over the sweep grid, then refines around the argmax.
pub fn sup_sweep<F: FnMut(Ball) -> Result<f64>>(mut objective: F, sweep: &SweepSpec) -> Result<SweepResult> {
    sweep.validate()?;
    let radii = sweep.radii.points();
    let offsets = sweep.offsets.points();
    let mut tr = Tracker {
        objective: &mut objective,
        best: f64::NEG_INFINITY,
        argmax: Ball { offset: 0.0, radius: radii[0] },
        evaluations: 0,
    };
    for &d in &offsets {
        for &r in &radii {
            tr.eval(Ball { offset: d, radius: r })?;
        }
    }
    let (mut r_lo, mut r_hi) = neighbors(&radii, tr.argmax.radius);
    let (mut d_lo, mut d_hi) = neighbors(&offsets, tr.argmax.offset);
    for _ in 0..sweep.refine_rounds {
        let d0 = tr.argmax.offset;
        if r_hi > r_lo {
            let (la, lb) = (r_lo.ln(), r_hi.ln());
            golden(|lr| tr.eval(Ball { offset: d0, radius: lr.exp() }), la, lb)?;
        }
        let r0 = tr.argmax.radius;
        if d_hi > d_lo {
            golden(|d| tr.eval(Ball { offset: d, radius: r0 }), d_lo, d_hi)?;
        }
        let shrink = 0.5;
        let (rc, dc) = (tr.argmax.radius, tr.argmax.offset);
        r_lo = (rc * (r_lo / rc).powf(shrink)).max(sweep.radii.min);
        r_hi = (rc * (r_hi / rc).powf(shrink)).min(sweep.radii.max);
        d_lo = (dc - shrink * (dc - d_lo)).max(0.0);
        d_hi = (dc + shrink * (d_hi - dc)).min(sweep.offsets.max);
    }
    Ok(SweepResult { sup_estimate: tr.best, argmax: tr.argmax, evaluations: tr.evaluations })
}

/// Objective values on the bare tensor grid, in `SweepSpec::balls` order.
pub fn grid_table<F: FnMut(Ball) -> Result<f64>>(mut objective: F, sweep: &SweepSpec) -> Result<Vec<(Ball, f64)>> {
    sweep.validate()?;
    sweep
        .balls()
        .into_iter()
        .map(|b| {
            let v = objective(b)?;
            if v.is_finite() {
                Ok((b, v))
            } else {
                Err(Error::NonFinite { value: v, offset: b.offset, radius: b.radius })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_peak() {
        let sweep = SweepSpec {
            radii: LogGrid { min: 0.1, max: 10.0, count: 12 },
            offsets: OffsetGrid { max: 3.0, count: 7 },
            refine_rounds: 3,
        };
        let res = sup_sweep(|b| Ok(-(b.offset.powi(2) + (b.radius - 1.0).powi(2))), &sweep).unwrap();
        assert!(res.argmax.offset < 1e-12);
        assert!((res.argmax.radius - 1.0).abs() < 1e-3);
        assert!(res.sup_estimate <= 0.0);
    }

    #[test]
    fn constant_objective() {
        let res = sup_sweep(|_| Ok(7.0), &SweepSpec::default()).unwrap();
        assert_eq!(res.sup_estimate, 7.0);
    }

    #[test]
    fn non_finite_is_reported() {
        let err = sup_sweep(|b| Ok(if b.radius > 1.0 { f64::INFINITY } else { 0.0 }), &SweepSpec::default());
        assert!(matches!(err, Err(Error::NonFinite { .. })));
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = log_space(1e-3, 30.0, 17);
        assert_eq!(g[0], 1e-3);
        assert_eq!(g[16], 30.0);
    }
}
