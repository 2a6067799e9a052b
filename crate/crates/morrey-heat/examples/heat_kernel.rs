//! Closed-form heat kernels: total mass, the heat equation residual and the
//! comparison with the sharp two-sided envelope on H^3.

use morrey_heat::kernels::{envelope_ratio_scan, kernel_mass, kernel_pde_residual, HeatKernel, KernelEnvelope};
use morrey_heat::numerics::{lin_space, log_space, QuadSpec};
use morrey_heat::{ModelManifold, Result};

fn main() -> Result<()> {
    for m in [ModelManifold::hyperbolic(3, 1.0)?, ModelManifold::hyperbolic(5, 1.0)?, ModelManifold::euclidean(3)?] {
        let k = HeatKernel::new(m)?;
        for t in [0.1, 1.0, 10.0] {
            let mass = kernel_mass(&k, t, &QuadSpec::with_rel_tol(1e-12))?.value;
            println!("{:?} m={} t={t:<5} G(t,1)={:.6e} mass-1={:+.1e} residual={:.1e}",
                m.kind(), m.dim(), k.value(t, 1.0)?, mass - 1.0, kernel_pde_residual(&k, t, 1.0)?);
        }
    }
    let h3 = ModelManifold::hyperbolic(3, 1.0)?;
    let scan = envelope_ratio_scan(
        &HeatKernel::new(h3)?,
        &KernelEnvelope::hyperbolic_sharp(h3)?,
        &log_space(0.01, 100.0, 41),
        &lin_space(0.0, 40.0, 81),
    )?;
    println!("kernel / sharp envelope: max/min = {:.3}", scan.spread());
    Ok(())
}
