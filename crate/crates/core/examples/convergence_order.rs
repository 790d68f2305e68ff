//! Strong convergence of the predictor-corrector scheme on the delayed system.

use tipctl::engine::{convergence_order, InitialData};
use tipctl::potentials::PotentialSpec;
use tipctl::systems::{ControlParams, DiffusionSpec, SystemSpec};

fn main() -> tipctl::Result<()> {
    let sys = SystemSpec::controlled_sdde(
        PotentialSpec::double_well(),
        ControlParams::new(1.0, 0.1, vec![1.0])?,
        DiffusionSpec::constant(0.5)?,
    )?;
    let h = [0.02, 0.01, 0.005, 0.0025];
    let r = convergence_order(&sys, &InitialData::constant([1.0]), &h, 1.0, 200, 7)?;
    for (h, e) in r.h_list.iter().zip(&r.errors) {
        println!("h = {h:<7} rms error = {e:.3e}");
    }
    println!("slope = {:.3} (reference h = {})", r.slope, r.h_ref);
    Ok(())
}
