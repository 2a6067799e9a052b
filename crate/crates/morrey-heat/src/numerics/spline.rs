//! Natural cubic splines, used to turn sampled radial snapshots into
//! evaluators.

use crate::error::{domain, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    m: Vec<f64>,
    uniform: Option<f64>,
}

impl CubicSpline {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 2 || ys.len() != n {
            return Err(domain("spline needs at least two matching samples"));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(domain("spline abscissae must increase strictly"));
        }
        let mut m = vec![0.0; n];
        if n > 2 {
            // Tridiagonal solve for second derivatives, natural ends.
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = xs[i] - xs[i - 1];
                let h1 = xs[i + 1] - xs[i];
                let a = h0;
                let b = 2.0 * (h0 + h1);
                let cc = h1;
                let rhs = 6.0 * ((ys[i + 1] - ys[i]) / h1 - (ys[i] - ys[i - 1]) / h0);
                let denom = b - a * c[i - 1];
                c[i] = cc / denom;
                d[i] = (rhs - a * d[i - 1]) / denom;
            }
            for i in (1..n - 1).rev() {
                m[i] = d[i] - c[i] * m[i + 1];
            }
        }
        let h = (xs[n - 1] - xs[0]) / (n - 1) as f64;
        let uniform = xs
            .iter()
            .enumerate()
            .all(|(i, &x)| (x - (xs[0] + h * i as f64)).abs() <= 1e-12 * (1.0 + x.abs()))
            .then_some(h);
        Ok(Self { xs, ys, m, uniform })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        let i = match self.uniform {
            Some(h) => ((x - self.xs[0]) / h).floor() as isize,
            None => self.xs.partition_point(|&v| v <= x) as isize - 1,
        };
        i.clamp(0, n as isize - 2) as usize
    }

    /// Value inside the sample range; linear continuation outside.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x < self.xs[0] {
            return self.ys[0] + self.slope_at(0) * (x - self.xs[0]);
        }
        if x > self.xs[n - 1] {
            return self.ys[n - 1] + self.slope_at(n - 1) * (x - self.xs[n - 1]);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i] + b * self.ys[i + 1] + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let n = self.xs.len();
        if x <= self.xs[0] {
            return self.slope_at(0);
        }
        if x >= self.xs[n - 1] {
            return self.slope_at(n - 1);
        }
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        (self.ys[i + 1] - self.ys[i]) / h + ((1.0 - 3.0 * a * a) * self.m[i] + (3.0 * b * b - 1.0) * self.m[i + 1]) * h / 6.0
    }

    fn slope_at(&self, i: usize) -> f64 {
        let n = self.xs.len();
        if i == 0 {
            let h = self.xs[1] - self.xs[0];
            (self.ys[1] - self.ys[0]) / h - h * (2.0 * self.m[0] + self.m[1]) / 6.0
        } else {
            let h = self.xs[n - 1] - self.xs[n - 2];
            (self.ys[n - 1] - self.ys[n - 2]) / h + h * (self.m[n - 2] + 2.0 * self.m[n - 1]) / 6.0
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproduces_lines_and_interpolates_smooth_data() {
        let xs: Vec<f64> = (0..11).map(|i| f64::from(i) * 0.1).collect();
        let s = CubicSpline::new(xs.clone(), xs.iter().map(|x| 2.0 * x + 1.0).collect()).unwrap();
        assert!((s.eval(0.37) - 1.74).abs() < 1e-14);
        assert!((s.eval(1.5) - 4.0).abs() < 1e-12);
        let xs: Vec<f64> = (0..201).map(|i| f64::from(i) * 0.01).collect();
        let s = CubicSpline::new(xs.clone(), xs.iter().map(|x| x.sin()).collect()).unwrap();
        assert!((s.eval(1.234_5) - 1.234_5f64.sin()).abs() < 1e-8);
        assert!((s.derivative(1.0) - 1f64.cos()).abs() < 1e-6);
    }

    #[test]
    fn rejects_unsorted() {
        assert!(CubicSpline::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
    }
}
