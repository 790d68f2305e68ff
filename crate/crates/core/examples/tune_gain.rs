//! Pick the smallest gain that removes the second well and meets a bound target.

use tipctl::gain::{tune_gain, TuneOutcome};
use tipctl::potentials::PotentialSpec;

fn main() -> tipctl::Result<()> {
    let v = PotentialSpec::double_well();
    for (tau, target) in [(0.1, 1e-3), (0.5, 1e-3), (0.9, 1e-6)] {
        match tune_gain(&v, &[1.0], &[-1.0], tau, 0.5, target, 0.01)? {
            TuneOutcome::Feasible(r) => println!(
                "tau = {tau}: alpha* = {:.2} (unimodal from {:.2}), bound {:.3e}, sigma~ = {:.3}",
                r.alpha_star, r.unimodality_threshold, r.bound_at_alpha_star, r.sigma_tilde_at_alpha_star
            ),
            TuneOutcome::Infeasible { reason, .. } => println!("tau = {tau}: infeasible ({reason})"),
        }
    }
    Ok(())
}
