//! Finite-radius and limiting transition bounds for the double well.

use tipctl::analysis::{transition_bound_eps, transition_bound_limit};
use tipctl::potentials::PotentialSpec;
use tipctl::systems::ControlParams;

fn main() -> tipctl::Result<()> {
    let v = PotentialSpec::double_well();
    let ctl = ControlParams::new(1.0, 0.1, vec![1.0])?;
    let sigma = 0.5;
    let xb = [-1.0];

    let lim = transition_bound_limit(&v, &ctl, sigma, &xb)?;
    println!("eps -> 0      bound = {:.4e} (log {:.3})", lim.bound, lim.log_bound);
    for eps in [0.02, 0.05, 0.1, 0.2, 0.4] {
        let r = transition_bound_eps(&v, &ctl, sigma, eps, &xb)?;
        println!("eps = {eps:<5}   bound = {:.4e}  delta_v = {:.5}", r.bound, r.delta_v);
    }
    Ok(())
}
