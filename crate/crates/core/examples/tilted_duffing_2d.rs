//! Critical points of the tilted Duffing potential with and without feedback,
//! and the limiting bound at the deep well.

use tipctl::analysis::transition_bound_limit;
use tipctl::potentials::{find_critical_points, is_unimodal, make_effective, nearest_minimum, BoxDomain, PotentialSpec};
use tipctl::systems::ControlParams;

fn main() -> tipctl::Result<()> {
    let v = PotentialSpec::tilted_duffing_default();
    let xa = vec![0.5, 0.25];
    let domain = BoxDomain::cube(2, -1.5, 1.5)?;
    for alpha in [0.0, 0.3] {
        let eff = make_effective(&v, alpha, &xa)?;
        println!("alpha = {alpha}: unimodal = {}", is_unimodal(&eff, &domain, 80)?);
        for c in find_critical_points(&eff, &domain, 80)? {
            println!(
                "  {:?} at ({:+.5}, {:+.5}), V = {:.5}",
                c.kind, c.location[0], c.location[1], c.potential_value
            );
        }
    }
    let xb = nearest_minimum(&v, &[-0.525, 0.276], 0.05)?;
    let r = transition_bound_limit(&v, &ControlParams::new(0.3, 0.1, xa)?, 0.15, &xb)?;
    println!("xb = ({:+.7}, {:+.7}), limiting bound = {:.4e}", xb[0], xb[1], r.bound);
    Ok(())
}
