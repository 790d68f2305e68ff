//! Uncontrolled vs delayed-feedback double well: one path each, fraction of
//! time spent in the left well.

use tipctl::engine::{simulate_trajectory, InitialData, IntegratorConfig};
use tipctl::potentials::PotentialSpec;
use tipctl::systems::{ControlParams, DiffusionSpec, SystemSpec};

fn main() -> tipctl::Result<()> {
    let v = PotentialSpec::double_well();
    let noise = DiffusionSpec::constant(0.5)?;
    let free = SystemSpec::uncontrolled(v.clone(), noise.clone())?;
    let ctl = SystemSpec::controlled_sdde(v, ControlParams::new(1.0, 0.1, vec![1.0])?, noise)?;

    let cfg = IntegratorConfig::new(0.01, 1000.0, 10, 42)?;
    let init = InitialData::constant([1.0]);
    for (name, sys) in [("uncontrolled", &free), ("controlled", &ctl)] {
        let path = simulate_trajectory(sys, &init, &cfg)?;
        let left = path.iter_states().filter(|x| x[0] < 0.0).count();
        println!(
            "{name:>12}: {} records, final x = {:+.3}, left-well fraction = {:.4}",
            path.len(),
            path.final_state()[0],
            left as f64 / path.len() as f64
        );
    }
    Ok(())
}
