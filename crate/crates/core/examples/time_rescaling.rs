//! The rescaled SDE run for a stretched horizon matches the approximating SDE
//! in distribution; compare the two empirical histograms.

use tipctl::engine::{simulate_ensemble, InitialData, IntegratorConfig};
use tipctl::estimation::{histogram_pdf_in, l1_between};
use tipctl::potentials::{BoxDomain, PotentialSpec};
use tipctl::systems::{effective_noise, rescale_time, ControlParams, DiffusionSpec, SystemSpec};

fn main() -> tipctl::Result<()> {
    let ctl = ControlParams::new(1.0, 0.4, vec![1.0])?;
    let noise = DiffusionSpec::constant(0.5)?;
    let v = PotentialSpec::double_well();
    let approx = SystemSpec::approximating_sde(v.clone(), ctl.clone(), noise.clone())?;
    let resc = SystemSpec::rescaled_sde(v, ctl.clone(), noise)?;

    let e = effective_noise(&ctl, 0.5)?;
    println!("sigma~ = {:.4}, nu~ = {:.4}, beta = {:.4}", e.sigma_tilde, e.nu_tilde, e.beta);

    let t = 300.0;
    let s = rescale_time(&ctl, t)?;
    println!("t = {t} corresponds to s = {s}");

    let init = InitialData::constant([1.0]);
    let domain = BoxDomain::cube(1, -3.0, 3.0)?;
    let a = simulate_ensemble(&approx, &init, &IntegratorConfig::new(0.01, t, 5, 1)?, 30)?;
    let b = simulate_ensemble(&resc, &init, &IntegratorConfig::new(0.01, s, 5, 2)?, 30)?;
    let ha = histogram_pdf_in(&a, 60, 0.1, Some(&domain))?;
    let hb = histogram_pdf_in(&b, 60, 0.1, Some(&domain))?;
    println!("L1(approximating, rescaled) = {:.4}", l1_between(&ha, &hb)?);
    Ok(())
}
