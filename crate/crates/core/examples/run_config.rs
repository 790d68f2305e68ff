//! Load a JSON run configuration, apply overrides and simulate it.
//!
//! cargo run --example run_config -- path/to/config.json

use tipctl::config::{Overrides, RunConfig};
use tipctl::engine::simulate_ensemble;
use tipctl::presets;

fn main() -> tipctl::Result<()> {
    let cfg = match std::env::args().nth(1) {
        Some(p) => RunConfig::load(p.as_ref())?,
        None => presets::double_well_controlled(),
    };
    let cfg = cfg.with_overrides(&Overrides { alpha: Some(0.5), quick: true, ..Default::default() })?;
    println!("{}", serde_json::to_string_pretty(&cfg)?);

    let ens = simulate_ensemble(&cfg.system, &cfg.initial_data(), &cfg.integrator_config(11)?, cfg.integrator.n_traj)?;
    println!("{} trajectories, {} records, {} aborted", ens.trajectories.len(), ens.total_records(), ens.aborted.len());
    Ok(())
}
