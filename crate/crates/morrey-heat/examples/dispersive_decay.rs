//! Decay of e^{t Delta} f: the t^{-1/2} law for r^{-1} on R^3, and the
//! exponential large-time decay on H^3.

use morrey_heat::numerics::log_space;
use morrey_heat::semigroup::{verify_dispersive, EstimateSetup, NormKind};
use morrey_heat::numerics::SweepSpec;
use morrey_heat::{ModelManifold, RadialProfile, Result};

fn main() -> Result<()> {
    let setup = EstimateSetup::new(2.0, 2.0, 1.0);
    let sweep = SweepSpec::default();

    let flat = verify_dispersive(
        &ModelManifold::euclidean(3)?,
        &RadialProfile::power_exp(1.0, 0.0),
        &setup,
        &log_space(0.01, 1.0, 7),
        NormKind::Sup,
        &sweep,
    )?;
    for (t, v) in &flat.points {
        println!("R3 t={t:<8.4} sup={v:.7} pi^-1/2 t^-1/2={:.7}", (std::f64::consts::PI * t).sqrt().recip());
    }
    println!("slope {:.5} (predicted {})", flat.slope().unwrap_or(f64::NAN), flat.predicted_slope);

    let mut ts = log_space(0.01, 0.3, 6);
    ts.extend([0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0]);
    let hyp = verify_dispersive(
        &ModelManifold::hyperbolic(3, 1.0)?,
        &RadialProfile::power_exp(0.5, 1.0),
        &setup,
        &ts,
        NormKind::Sup,
        &sweep,
    )?;
    println!(
        "H3 small-t slope {:.4}, large-t rate {:.4} (bottom of spectrum {}), sup norm/bound {:.3}",
        hyp.slope().unwrap_or(f64::NAN),
        hyp.rate().unwrap_or(f64::NAN),
        hyp.reference_rate,
        hyp.sup_ratio
    );
    Ok(())
}
