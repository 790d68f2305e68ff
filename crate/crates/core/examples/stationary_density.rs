//! Analytic stationary density of the rescaled approximating SDE for a few gains.

use tipctl::analysis::stationary_density_for_system;
use tipctl::potentials::{BoxDomain, PotentialSpec};
use tipctl::systems::{ControlParams, DiffusionSpec, SystemSpec};

fn main() -> tipctl::Result<()> {
    let domain = BoxDomain::cube(1, -3.0, 3.0)?;
    for alpha in [0.0, 0.25, 0.5, 1.0, 2.0] {
        let sys = SystemSpec::rescaled_sde(
            PotentialSpec::double_well(),
            ControlParams::new(alpha, 0.1, vec![1.0])?,
            DiffusionSpec::constant(0.5)?,
        )?;
        let g = stationary_density_for_system(&sys, &domain, 2001)?;
        let left: f64 = (0..g.values.len())
            .filter(|&k| g.node(k)[0] < 0.0)
            .map(|k| g.values[k] * g.cell_measure)
            .sum();
        println!(
            "alpha = {alpha:<4} integral = {:.6} argmax = {:+.3} mass(x < 0) = {left:.3e}",
            g.integral(),
            g.argmax()[0]
        );
    }
    Ok(())
}
