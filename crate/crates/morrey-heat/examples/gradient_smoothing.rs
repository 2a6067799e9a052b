//! |grad e^{t Delta} f| blows up like t^{-1} in sup norm for r^{-1} on R^3.

use morrey_heat::numerics::{log_space, SweepSpec};
use morrey_heat::semigroup::{verify_smoothing, EstimateSetup, HeatFlow, NormKind};
use morrey_heat::{ModelManifold, RadialProfile, Result};

fn main() -> Result<()> {
    let r3 = ModelManifold::euclidean(3)?;
    let f = RadialProfile::power_exp(1.0, 0.0);
    let report = verify_smoothing(&r3, &f, &EstimateSetup::new(2.0, 2.0, 1.0), &log_space(0.01, 1.0, 7), NormKind::Sup, &SweepSpec::default())?;
    for (t, v) in &report.points {
        println!("t={t:<8.4} sup|grad u|={v:.6e}");
    }
    println!("slope {:.4} (predicted {})", report.slope().unwrap_or(f64::NAN), report.predicted_slope);

    let flow = HeatFlow::new(ModelManifold::hyperbolic(3, 1.0)?)?;
    let g = RadialProfile::power_exp(1.0, 1.0);
    for t in [0.1, 1.0, 5.0] {
        println!("H3 t={t:<4} grad u(t, 1) = {:+.6e}", flow.gradient(&g, t, 1.0)?);
    }
    Ok(())
}
