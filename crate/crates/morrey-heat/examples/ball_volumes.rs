//! Geodesic ball volumes on H^3 and R^3, and the calibrated growth envelopes.

use morrey_heat::geometry::{ball_volume, bishop_ratio, calibration_radii, volume_ratio_check, VolumeEnvelope};
use morrey_heat::{ModelManifold, Result};

fn main() -> Result<()> {
    let h3 = ModelManifold::hyperbolic(3, 1.0)?;
    let r3 = ModelManifold::euclidean(3)?;
    let env = VolumeEnvelope::calibrate(3, 1.0, 3.0, 1.0, &calibration_radii())?;
    println!("{:>6} {:>14} {:>14} {:>14} {:>8}", "R", "|B| on H3", "|B| on R3", "envelope", "bishop");
    for r in [0.1, 1.0, 5.0, 20.0] {
        println!(
            "{r:>6} {:>14.6e} {:>14.6e} {:>14.6e} {:>8.5}",
            ball_volume(&h3, r)?,
            ball_volume(&r3, r)?,
            env.piecewise(r),
            bishop_ratio(&h3, r)?
        );
    }
    let chk = volume_ratio_check(&h3, 1.0, 20.0)?;
    println!("|B(20)|/|B(1)| = {:.4e} <= {:.4e}", chk.ratio, chk.bound);
    Ok(())
}
