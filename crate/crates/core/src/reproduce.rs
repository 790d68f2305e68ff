//! Figure data for the double-well and tilted Duffing experiments, built from
//! the presets.

use serde::Serialize;
use serde_json::{json, Value};

use crate::analysis::{stationary_density_for_system, transition_bound_limit, DensityGrid};
use crate::config::{Overrides, RunConfig};
use crate::engine::{simulate_ensemble, Ensemble};
use crate::error::{Error, Result};
use crate::estimation::{
    empirical_transition_ratio, histogram_pdf, l1_distance, modality_count, occupancy_fraction, Histogram,
};
use crate::gain::{profile_curve, scan_report};
use crate::io::{density_csv, histogram_csv, trajectory_csv};
use crate::potentials::{find_critical_points, is_unimodal, make_effective, nearest_minimum, CriticalKind};
use crate::presets::{self, FIG4_ALPHAS, FIG6_TAUS};

pub const FIGURES: &[&str] = &["fig3", "fig4", "fig6", "fig7"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReproduceOptions {
    pub quick: bool,
    pub seed: u64,
}

/// Named text files plus a comparison summary.
#[derive(Debug, Clone)]
pub struct FigureOutput {
    pub figure: String,
    pub files: Vec<(String, String)>,
    pub comparison: Value,
    pub notes: Vec<String>,
}

pub fn reproduce(figure_id: &str, opts: &ReproduceOptions) -> Result<FigureOutput> {
    match figure_id {
        "fig3" => fig3(opts),
        "fig4" => fig4(),
        "fig6" => fig6(opts),
        "fig7" => fig7(opts),
        other => Err(Error::UnknownFigure(other.to_string())),
    }
}

fn scaled(cfg: RunConfig, opts: &ReproduceOptions) -> Result<RunConfig> {
    cfg.with_overrides(&Overrides { quick: opts.quick, ..Default::default() })
}

fn run(cfg: &RunConfig, seed: u64) -> Result<Ensemble> {
    simulate_ensemble(&cfg.system, &cfg.initial_data(), &cfg.integrator_config(seed)?, cfg.integrator.n_traj)
}

/// Histogram plus the diagnostics reported for every ensemble.
pub fn summarize(ens: &Ensemble, cfg: &RunConfig, analytic: Option<&DensityGrid>) -> Result<(Histogram, Value)> {
    let e = &cfg.estimation;
    let h = histogram_pdf(ens, e.bins_for(ens.dim()), e.burn_in_fraction)?;
    let modality = modality_count(&h, e.smoothing_window, e.prominence_fraction)?;
    let l1 = analytic.map(|g| l1_distance(&h, g)).transpose()?;
    let mut summary = json!({
        "n_traj": ens.trajectories.len(),
        "aborted": ens.aborted.len(),
        "horizon": cfg.integrator.horizon,
        "samples": h.total_samples,
        "modality": modality,
        "mode": h.mode(),
        "l1_vs_analytic": l1,
    });
    let xa = cfg.initial_state.clone().unwrap_or_else(|| cfg.system.control().xa.clone());
    if let Some(xb) = &cfg.analysis.xb {
        summary["occupancy_xa"] = json!(occupancy_fraction(ens, &xa, e.epsilon, e.burn_in_fraction)?);
        summary["occupancy_xb"] = json!(occupancy_fraction(ens, xb, e.epsilon, e.burn_in_fraction)?);
        summary["transition_ratio"] = match empirical_transition_ratio(ens, &xa, xb, e.epsilon, e.burn_in_fraction) {
            Ok(r) => serde_json::to_value(r)?,
            Err(Error::ZeroOccupancy) => json!({ "result": "control_failure" }),
            Err(err) => return Err(err),
        };
    }
    Ok((h, summary))
}

/// Analytic stationary density for a configuration's system and domain.
pub fn analytic_for_config(cfg: &RunConfig) -> Result<DensityGrid> {
    stationary_density_for_system(&cfg.system, &cfg.density_domain()?, cfg.analysis.grid_for(cfg.system.dimension()))
}

fn bound_json(cfg: &RunConfig) -> Result<Value> {
    let sys = &cfg.system;
    let sigma = sys.diffusion().constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
    let Some(xb) = &cfg.analysis.xb else { return Ok(Value::Null) };
    let report = transition_bound_limit(sys.potential(), sys.control(), sigma, xb)?;
    Ok(serde_json::to_value(report)?)
}

fn fig3(opts: &ReproduceOptions) -> Result<FigureOutput> {
    let mut files = Vec::new();
    let mut comparison = json!({ "quick": opts.quick, "seed": opts.seed });
    for (label, cfg) in [
        ("uncontrolled", presets::double_well_uncontrolled()),
        ("controlled", presets::double_well_controlled()),
    ] {
        let cfg = scaled(cfg, opts)?;
        let g = analytic_for_config(&cfg)?;
        let ens = run(&cfg, opts.seed)?;
        let (h, mut summary) = summarize(&ens, &cfg, Some(&g))?;
        if label == "controlled" {
            summary["bound_limit"] = bound_json(&cfg)?;
        }
        files.push((format!("fig3_{label}_trajectory.csv"), trajectory_csv(&ens.trajectories[0])));
        files.push((format!("fig3_{label}_pdf.csv"), histogram_csv(&h)));
        files.push((format!("fig3_{label}_analytic.csv"), density_csv(&g)));
        comparison[label] = summary;
    }
    Ok(FigureOutput { figure: "fig3".into(), files, comparison, notes: vec![] })
}

fn fig4() -> Result<FigureOutput> {
    let cfg = presets::double_well_controlled();
    let sys = &cfg.system;
    let (xa, tau) = (sys.control().xa.clone(), sys.control().tau);
    let sigma = sys.diffusion().constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
    let xb = cfg.analysis.xb.clone().unwrap_or_else(|| vec![-1.0]);
    let domain = cfg.density_domain()?;
    let mut files = Vec::new();
    for &alpha in FIG4_ALPHAS {
        let c = profile_curve(sys.potential(), &xa, tau, sigma, alpha, &domain, 601)?;
        let mut text = String::from("x,v_tilde,p0\n");
        for k in 0..c.x.len() {
            text.push_str(&format!(
                "{},{},{}\n",
                crate::io::fmt_f64(c.x[k]),
                crate::io::fmt_f64(c.v_tilde[k]),
                crate::io::fmt_f64(c.p0[k])
            ));
        }
        files.push((format!("fig4_alpha_{alpha}.csv"), text));
    }
    let rows = scan_report(sys.potential(), &xa, &xb, tau, sigma, FIG4_ALPHAS)?;
    files.push(("fig4_scan.csv".into(), crate::io::scan_csv(&rows)));
    let comparison = json!({ "tau": tau, "sigma": sigma, "scan": rows });
    Ok(FigureOutput { figure: "fig4".into(), files, comparison, notes: vec![] })
}

fn fig6(opts: &ReproduceOptions) -> Result<FigureOutput> {
    let base = presets::double_well_controlled();
    let mut files = Vec::new();
    let mut notes = Vec::new();
    let mut comparison = json!({ "quick": opts.quick, "seed": opts.seed });
    for &tau in FIG6_TAUS {
        let cfg = base.with_overrides(&Overrides { tau: Some(tau), quick: opts.quick, ..Default::default() })?;
        let analytic = if cfg.system.control().alpha_tau() < 1.0 {
            Some(analytic_for_config(&cfg)?)
        } else {
            notes.push(format!(
                "tau = {tau}: alpha*tau = {} >= 1, the approximating SDE is not valid; analytic overlay omitted",
                cfg.system.control().alpha_tau()
            ));
            None
        };
        let ens = run(&cfg, opts.seed)?;
        let (h, summary) = summarize(&ens, &cfg, analytic.as_ref())?;
        files.push((format!("fig6_tau_{tau}_pdf.csv"), histogram_csv(&h)));
        if let Some(g) = &analytic {
            files.push((format!("fig6_tau_{tau}_analytic.csv"), density_csv(g)));
        }
        comparison[format!("tau_{tau}")] = summary;
    }
    comparison["notes"] = json!(notes);
    Ok(FigureOutput { figure: "fig6".into(), files, comparison, notes })
}

fn fig7(opts: &ReproduceOptions) -> Result<FigureOutput> {
    let mut files = Vec::new();
    let mut comparison = json!({ "quick": opts.quick, "seed": opts.seed });
    let ctl = scaled(presets::tilted_duffing_controlled(), opts)?;
    let sys = &ctl.system;
    let eff = make_effective(sys.potential(), sys.control().alpha, &sys.control().xa)?;
    let domain = ctl.density_domain()?;
    let minima: Vec<Vec<f64>> = find_critical_points(&eff, &domain, 80)?
        .into_iter()
        .filter(|c| c.kind == CriticalKind::Minimum)
        .map(|c| c.location)
        .collect();
    comparison["effective_potential"] = json!({
        "unimodal": is_unimodal(&eff, &domain, 80)?,
        "minima": minima,
    });
    let mut bound = bound_json(&ctl)?;
    if let Some(xb) = &ctl.analysis.xb {
        let refined = nearest_minimum(sys.potential(), xb, 0.05)?;
        let sigma = sys.diffusion().constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
        bound["refined_xb"] = json!(refined);
        bound["refined_bound"] = json!(transition_bound_limit(sys.potential(), sys.control(), sigma, &refined)?.bound);
        bound["reference_value"] = json!(1.6e-6);
    }
    comparison["bound_limit"] = bound;

    let unc = scaled(presets::tilted_duffing_uncontrolled(), opts)?;
    for (label, cfg) in [("controlled", &ctl), ("uncontrolled", &unc)] {
        let g = analytic_for_config(cfg)?;
        let ens = run(cfg, opts.seed)?;
        let (h, summary) = summarize(&ens, cfg, Some(&g))?;
        files.push((format!("fig7_{label}_trajectory.csv"), trajectory_csv(&ens.trajectories[0])));
        files.push((format!("fig7_{label}_pdf.csv"), histogram_csv(&h)));
        files.push((format!("fig7_{label}_analytic.csv"), density_csv(&g)));
        comparison[label] = summary;
    }
    Ok(FigureOutput { figure: "fig7".into(), files, comparison, notes: vec![] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_figure() {
        let o = ReproduceOptions { quick: true, seed: 1 };
        assert!(matches!(reproduce("fig9", &o), Err(Error::UnknownFigure(_))));
    }

    #[test]
    fn fig4_has_curves_and_scan() {
        let out = reproduce("fig4", &ReproduceOptions { quick: true, seed: 1 }).unwrap();
        assert_eq!(out.files.len(), FIG4_ALPHAS.len() + 1);
        let scan = out.comparison["scan"].as_array().unwrap();
        assert_eq!(scan[0]["unimodal"], false);
        assert_eq!(scan[3]["unimodal"], true);
    }
}
