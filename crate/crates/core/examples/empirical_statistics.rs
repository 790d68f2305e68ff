//! Histogram, modality, L1 distance and transition ratio from a simulated ensemble.

use tipctl::analysis::stationary_density_for_system;
use tipctl::engine::{simulate_ensemble, InitialData, IntegratorConfig};
use tipctl::estimation::{empirical_transition_ratio, histogram_pdf_in, l1_distance, modality_count};
use tipctl::potentials::{BoxDomain, PotentialSpec};
use tipctl::systems::{DiffusionSpec, SystemSpec};

fn main() -> tipctl::Result<()> {
    let sys = SystemSpec::uncontrolled(PotentialSpec::double_well(), DiffusionSpec::constant(0.5)?)?;
    let cfg = IntegratorConfig::new(0.01, 500.0, 5, 3)?;
    let ens = simulate_ensemble(&sys, &InitialData::constant([1.0]), &cfg, 40)?;

    let domain = BoxDomain::cube(1, -3.0, 3.0)?;
    let h = histogram_pdf_in(&ens, 100, 0.1, Some(&domain))?;
    let g = stationary_density_for_system(&sys, &domain, 2001)?;
    println!("samples = {}, out of domain = {}", h.total_samples, h.out_of_domain);
    println!("modes = {}", modality_count(&h, 5, 0.05)?);
    println!("L1 to analytic = {:.4}", l1_distance(&h, &g)?);
    let r = empirical_transition_ratio(&ens, &[1.0], &[-1.0], 0.1, 0.1)?;
    println!("transition ratio: {}", serde_json::to_string(&r)?);
    Ok(())
}
