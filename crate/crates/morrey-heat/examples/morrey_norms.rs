//! Morrey norms of radial profiles: a member of M_{2,1}(H^3) that is not in
//! L^2, and the structural inequalities between Morrey spaces.

use std::f64::consts::PI;

use morrey_heat::morrey::{holder_check, inclusion_check, lp_doubling_increments, morrey_norm_radial, MorreyParams, Variant};
use morrey_heat::numerics::SweepSpec;
use morrey_heat::profile::example_profile;
use morrey_heat::{ModelManifold, Result};

fn main() -> Result<()> {
    let h3 = ModelManifold::hyperbolic(3, 1.0)?;
    let sweep = SweepSpec::default();
    let ex = example_profile(&h3, 2.0, 1.0, 0.5, 1.0);
    let params = MorreyParams::new(2.0, 1.0, Variant::G)?;
    let est = morrey_norm_radial(&ex.profile, &params, &h3, &sweep)?;
    println!("member={} norm={:.6} at {:?}", ex.member, est.value, est.argmax);

    // int_{B(2R)} - int_{B(R)} of f^2 tends to pi ln 2: the L^2 norm diverges.
    for (r, inc) in lp_doubling_increments(&ex.profile, 2.0, &h3, &[5.0, 10.0, 20.0])? {
        println!("R={r:<4} increment={inc:.6} (pi ln 2 = {:.6})", PI * 2f64.ln());
    }

    let grid = sweep.grid_only();
    let holder = holder_check(&ex.profile, &ex.profile, 4.0, 4.0, 1.0, 1.0, &h3, &grid)?;
    let incl = inclusion_check(&ex.profile, (2.5, 0.5), (2.0, 1.0), &h3, &grid)?;
    println!("holder:    {:.6} <= {:.6} ({} ball failures)", holder.lhs, holder.rhs, holder.ball_failures);
    println!("inclusion: {:.6} <= {:.6} ({} ball failures)", incl.lhs, incl.rhs, incl.ball_failures);
    Ok(())
}
