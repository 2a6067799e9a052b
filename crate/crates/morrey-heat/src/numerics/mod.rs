//! Quadrature, supremum search, slope fitting and interpolation shared by
//! every verification module.

mod ball;
mod fit;
mod quad;
mod spline;
mod sweep;

pub use ball::{centered_ball_integral, integrate_polar_ball, integrate_polar_ball_2d};
pub use fit::{fit_exp_rate, fit_line, fit_loglog_slope, LineFit, Window};
pub use quad::{
    breakpoints, gauss_legendre, integrate_adaptive_1d, integrate_best_effort, integrate_piecewise, GaussLegendre,
    QuadSpec, Quadrature, SingularPoint,
};
pub use spline::CubicSpline;
pub use sweep::{grid_table, lin_space, log_space, sup_sweep, LogGrid, OffsetGrid, SweepResult, SweepSpec};
