//! Effective potential and stationary density along the line for a gain sweep.

use tipctl::gain::profile_curve;
use tipctl::potentials::{BoxDomain, PotentialSpec};

fn main() -> tipctl::Result<()> {
    let domain = BoxDomain::cube(1, -2.0, 2.0)?;
    for alpha in [0.0, 0.5, 1.0] {
        let c = profile_curve(&PotentialSpec::double_well(), &[1.0], 0.1, 0.5, alpha, &domain, 9)?;
        println!("alpha = {alpha}");
        for k in 0..c.x.len() {
            println!("  x = {:+.2}  V~ = {:+.4}  p0 = {:.4e}", c.x[k], c.v_tilde[k], c.p0[k]);
        }
    }
    Ok(())
}
