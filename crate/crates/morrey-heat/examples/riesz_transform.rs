//! grad (-Delta)^{-1/2} by subordination: pointwise values, the L^2 isometry
//! on R^3 and Morrey-norm ratios on H^3.

use morrey_heat::morrey::{MorreyParams, Variant};
use morrey_heat::numerics::SweepSpec;
use morrey_heat::riesz::{l2_isometry_check, riesz_bound_report, RieszTransform, SubordinationSpec};
use morrey_heat::semigroup::smallness_condition_check;
use morrey_heat::{ModelManifold, RadialProfile, Result};

fn main() -> Result<()> {
    let spec = SubordinationSpec::default();
    let r3 = ModelManifold::euclidean(3)?;
    let gauss = RadialProfile::power_gauss(0.0, 1.0);
    let rt = RieszTransform::new(r3, spec)?;
    for d in [0.1, 1.0, 3.0] {
        let v = rt.value(&gauss, d)?;
        println!("R3 d={d:<4} Rf={:+.8e} tail<={:.1e}", v.value, v.remainder);
    }
    let iso = l2_isometry_check(&r3, &gauss, &spec)?;
    println!("||Rf||/||f|| - 1 = {:.2e}", iso.output / iso.input - 1.0);

    let h3 = ModelManifold::hyperbolic(3, 1.0)?;
    let small = smallness_condition_check(&h3, 2.0, 0.05, 0.125)?;
    println!("smallness: {:.4} <= {:.4}", small.lhs, small.rhs);
    let family = [RadialProfile::power_exp(1.0, 0.0), gauss, RadialProfile::power_exp(0.0, 1.0)];
    let report = riesz_bound_report(&h3, &family, &MorreyParams::new(2.0, 0.05, Variant::G)?, &SweepSpec::default(), &spec)?;
    println!("H3 Morrey ratios {:?}", report.ratios);
    Ok(())
}
