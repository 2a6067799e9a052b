//! Least-squares slopes in log-log and log-linear coordinates.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub points: usize,
}

/// Closed `[lo, hi]` window on the abscissa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub const ALL: Window = Window { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n < 3 || ys.len() != n {
        return Err(Error::InsufficientData(format!("{n} usable points, need at least 3")));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let stderr = (rss / (nf - 2.0) / sxx).sqrt();
    Ok(LineFit { slope, intercept, stderr, points: n })
}

fn usable(points: &[(f64, f64)], window: Window) -> impl Iterator<Item = (f64, f64)> + '_ {
    points
        .iter()
        .copied()
        .filter(move |&(t, y)| window.contains(t) && t > 0.0 && y > 0.0 && t.is_finite() && y.is_finite())
}

/// Slope of `ln y` against `ln t` inside `window`.
pub fn fit_loglog_slope(points: &[(f64, f64)], window: Window) -> Result<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable(points, window).map(|(t, y)| (t.ln(), y.ln())).unzip();
    fit_line(&xs, &ys)
}

/// Decay rate: minus the slope of `ln y` against `t` inside `window`.
pub fn fit_exp_rate(points: &[(f64, f64)], window: Window) -> Result<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = usable(points, window).map(|(t, y)| (t, y.ln())).unzip();
    let mut fit = fit_line(&xs, &ys)?;
    fit.slope = -fit.slope;
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_power_law() {
        let pts: Vec<_> = [0.1, 0.3, 1.0, 3.0, 10.0].iter().map(|&t: &f64| (t, t.powf(-0.5))).collect();
        let fit = fit_loglog_slope(&pts, Window::ALL).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        let pts: Vec<_> = [1.0, 2.0, 4.0].iter().map(|&t: &f64| (t, 3.0 * t * t)).collect();
        assert!((fit_loglog_slope(&pts, Window::ALL).unwrap().slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn exponential_rate() {
        let pts: Vec<_> = (0..6).map(f64::from).map(|t| (t, (-2.0 * t).exp())).collect();
        assert!((fit_exp_rate(&pts, Window::ALL).unwrap().slope - 2.0).abs() < 1e-12);
        let pts: Vec<_> = (10..=20).map(f64::from).map(|t| (t, 5.0 * (-t).exp() / t)).collect();
        let rate = fit_exp_rate(&pts, Window::new(10.0, 20.0)).unwrap().slope;
        assert!((rate - 1.0).abs() < 0.1);
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_exp_rate(&[(1.0, 1.0)], Window::ALL), Err(Error::InsufficientData(_))));
    }
}
