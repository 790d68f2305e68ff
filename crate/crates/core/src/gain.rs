//! Gain selection from analytics alone: unimodality of the effective potential
//! first, then the limiting transition bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{stationary_density, transition_bound_limit};
use crate::error::{check_dim, Error, Result};
use crate::potentials::{dist_sq, is_unimodal, make_effective, BoxDomain, PotentialSpec};
use crate::systems::{effective_noise, ControlParams};

pub const DEFAULT_ALPHA_STEP: f64 = 0.01;
pub const DEFAULT_TARGET_BOUND: f64 = 1e-3;

/// Where and how finely effective potentials are searched for critical points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGrid {
    pub domain: BoxDomain,
    pub grid_per_dim: usize,
}

impl SearchGrid {
    /// Bounding box of `xa` and `xb` widened on every side by `max(|xb - xa|, 1)`.
    pub fn around(xa: &[f64], xb: &[f64]) -> Result<Self> {
        check_dim(xa.len(), xb.len())?;
        let pad = dist_sq(xa, xb).sqrt().max(1.0);
        let lo = xa.iter().zip(xb).map(|(a, b)| a.min(*b) - pad).collect();
        let hi = xa.iter().zip(xb).map(|(a, b)| a.max(*b) + pad).collect();
        let grid_per_dim = if xa.len() == 1 { 400 } else { 80 };
        Ok(SearchGrid { domain: BoxDomain::new(lo, hi)?, grid_per_dim })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub alpha: f64,
    pub unimodal: bool,
    /// Limiting transition bound; `None` at `alpha = 0`.
    pub bound: Option<f64>,
    pub log_bound: Option<f64>,
    pub sigma_tilde: f64,
    pub nu_tilde: f64,
}

impl ScanRow {
    fn feasible(&self, target: f64) -> bool {
        self.unimodal && self.bound.is_some_and(|b| b <= target)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainRecommendation {
    pub tau: f64,
    pub sigma: f64,
    pub target_bound: f64,
    pub alpha_step: f64,
    pub alpha_star: f64,
    /// Smallest and largest feasible grid gains.
    pub feasible_range: (f64, f64),
    /// Smallest grid gain with a unimodal effective potential.
    pub unimodality_threshold: f64,
    pub bound_at_alpha_star: f64,
    pub sigma_tilde_at_alpha_star: f64,
    pub scan: Vec<ScanRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TuneOutcome {
    Feasible(GainRecommendation),
    Infeasible {
        tau: f64,
        sigma: f64,
        target_bound: f64,
        /// Least-bound row of the scan.
        best: Option<ScanRow>,
        reason: String,
        scan: Vec<ScanRow>,
    },
}

impl TuneOutcome {
    pub fn recommendation(&self) -> Option<&GainRecommendation> {
        match self {
            TuneOutcome::Feasible(r) => Some(r),
            TuneOutcome::Infeasible { .. } => None,
        }
    }

    pub fn scan(&self) -> &[ScanRow] {
        match self {
            TuneOutcome::Feasible(r) => &r.scan,
            TuneOutcome::Infeasible { scan, .. } => scan,
        }
    }

    /// 0 when feasible, 3 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            TuneOutcome::Feasible(_) => 0,
            TuneOutcome::Infeasible { .. } => 3,
        }
    }
}

/// Grid `{step, 2 step, ...}` strictly inside `(0, 1 / tau)`.
pub fn alpha_grid(tau: f64, alpha_step: f64) -> Result<Vec<f64>> {
    if !(tau > 0.0) {
        return Err(Error::invalid(format!("tau must be > 0 for gain tuning, got {tau}")));
    }
    if !(alpha_step > 0.0) {
        return Err(Error::invalid(format!("alpha_step must be > 0, got {alpha_step}")));
    }
    Ok((1..).map(|k| k as f64 * alpha_step).take_while(|a| a * tau < 1.0).collect())
}

/// Smallest grid gain whose effective potential is unimodal and whose limiting
/// transition bound is at most `target_bound`.
pub fn tune_gain(
    potential: &PotentialSpec,
    xa: &[f64],
    xb: &[f64],
    tau: f64,
    sigma: f64,
    target_bound: f64,
    alpha_step: f64,
) -> Result<TuneOutcome> {
    tune_gain_on(potential, xa, xb, tau, sigma, target_bound, alpha_step, &SearchGrid::around(xa, xb)?)
}

#[allow(clippy::too_many_arguments)]
pub fn tune_gain_on(
    potential: &PotentialSpec,
    xa: &[f64],
    xb: &[f64],
    tau: f64,
    sigma: f64,
    target_bound: f64,
    alpha_step: f64,
    search: &SearchGrid,
) -> Result<TuneOutcome> {
    if !(target_bound > 0.0 && target_bound < 1.0) {
        return Err(Error::invalid(format!("target_bound must lie in (0, 1), got {target_bound}")));
    }
    let alphas = alpha_grid(tau, alpha_step)?;
    let scan = scan_on(potential, xa, xb, tau, sigma, &alphas, search)?;
    let feasible: Vec<&ScanRow> = scan.iter().filter(|r| r.feasible(target_bound)).collect();
    let Some(star) = feasible.first() else {
        let best = scan
            .iter()
            .filter(|r| r.log_bound.is_some())
            .min_by(|a, b| a.log_bound.unwrap().total_cmp(&b.log_bound.unwrap()))
            .cloned();
        let reason = if scan.iter().any(|r| r.unimodal) {
            "no unimodal grid gain meets the target bound".to_string()
        } else {
            "no grid gain gives a unimodal effective potential".to_string()
        };
        return Ok(TuneOutcome::Infeasible { tau, sigma, target_bound, best, reason, scan });
    };
    let rec = GainRecommendation {
        tau,
        sigma,
        target_bound,
        alpha_step,
        alpha_star: star.alpha,
        feasible_range: (star.alpha, feasible.last().map_or(star.alpha, |r| r.alpha)),
        unimodality_threshold: scan.iter().find(|r| r.unimodal).map_or(f64::NAN, |r| r.alpha),
        bound_at_alpha_star: star.bound.unwrap_or(f64::NAN),
        sigma_tilde_at_alpha_star: star.sigma_tilde,
        scan: scan.clone(),
    };
    Ok(TuneOutcome::Feasible(rec))
}

/// One row per gain: unimodality, limiting bound, `sigma~` and `nu~`.
pub fn scan_report(
    potential: &PotentialSpec,
    xa: &[f64],
    xb: &[f64],
    tau: f64,
    sigma: f64,
    alphas: &[f64],
) -> Result<Vec<ScanRow>> {
    scan_on(potential, xa, xb, tau, sigma, alphas, &SearchGrid::around(xa, xb)?)
}

pub fn scan_on(
    potential: &PotentialSpec,
    xa: &[f64],
    xb: &[f64],
    tau: f64,
    sigma: f64,
    alphas: &[f64],
    search: &SearchGrid,
) -> Result<Vec<ScanRow>> {
    check_dim(potential.dim(), xa.len())?;
    check_dim(potential.dim(), xb.len())?;
    alphas.par_iter().map(|&alpha| scan_row(potential, xa, xb, tau, sigma, alpha, search)).collect()
}

fn scan_row(
    potential: &PotentialSpec,
    xa: &[f64],
    xb: &[f64],
    tau: f64,
    sigma: f64,
    alpha: f64,
    search: &SearchGrid,
) -> Result<ScanRow> {
    let control = ControlParams::new(alpha, tau, xa.to_vec())?;
    let noise = effective_noise(&control, sigma)?;
    let effective = make_effective(potential, alpha, xa)?;
    let unimodal = is_unimodal(&effective, &search.domain, search.grid_per_dim)?;
    let (bound, log_bound) = if alpha > 0.0 {
        let r = transition_bound_limit(potential, &control, sigma, xb)?;
        (Some(r.bound), Some(r.log_bound))
    } else {
        (None, None)
    };
    Ok(ScanRow { alpha, unimodal, bound, log_bound, sigma_tilde: noise.sigma_tilde, nu_tilde: noise.nu_tilde })
}

/// Effective potential and stationary density along a 1D grid for one gain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCurve {
    pub alpha: f64,
    pub x: Vec<f64>,
    pub v_tilde: Vec<f64>,
    pub p0: Vec<f64>,
}

pub fn profile_curve(
    potential: &PotentialSpec,
    xa: &[f64],
    tau: f64,
    sigma: f64,
    alpha: f64,
    domain: &BoxDomain,
    nodes: usize,
) -> Result<ProfileCurve> {
    check_dim(1, potential.dim())?;
    let control = ControlParams::new(alpha, tau, xa.to_vec())?;
    let noise = effective_noise(&control, sigma)?;
    let effective = make_effective(potential, alpha, xa)?;
    let grid = stationary_density(&effective, noise.nu_tilde, domain, nodes)?;
    let x: Vec<f64> = (0..grid.values.len()).map(|k| grid.node(k)[0]).collect();
    let v_tilde = x.iter().map(|&xi| effective.value_unchecked(&[xi])).collect();
    Ok(ProfileCurve { alpha, x, v_tilde, p0: grid.values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dw() -> PotentialSpec {
        PotentialSpec::double_well()
    }

    #[test]
    fn one_d_threshold_binds() {
        let out = tune_gain(&dw(), &[1.0], &[-1.0], 0.1, 0.5, 1e-3, 0.01).unwrap();
        let rec = out.recommendation().expect("feasible");
        assert!(rec.alpha_star > 0.5 && rec.alpha_star <= 0.6, "{}", rec.alpha_star);
        assert_relative_eq!(rec.alpha_star, 0.51, max_relative = 1e-12);
        assert!(rec.bound_at_alpha_star <= 1e-3);
        let by_hand = (-0.51f64 * (1.0 - 0.051) * 16.0).exp();
        assert_relative_eq!(rec.bound_at_alpha_star, by_hand, max_relative = 1e-12);
        assert!(rec.alpha_star * rec.tau < 1.0);
        assert_eq!(out.exit_code(), 0);
        assert_eq!(rec.scan.len(), 999);
    }

    #[test]
    fn unimodality_is_monotone_in_1d() {
        let alphas = alpha_grid(0.1, 0.05).unwrap();
        let rows = scan_report(&dw(), &[1.0], &[-1.0], 0.1, 0.5, &alphas).unwrap();
        let first = rows.iter().position(|r| r.unimodal).unwrap();
        assert!(rows[first..].iter().all(|r| r.unimodal));
        assert!(rows[..first].iter().all(|r| !r.unimodal));
    }

    #[test]
    fn scan_columns() {
        let rows = scan_report(&dw(), &[1.0], &[-1.0], 0.1, 0.5, &[0.0, 0.5, 1.0, 2.0]).unwrap();
        assert!(!rows[0].unimodal);
        assert_eq!(rows[0].sigma_tilde, 0.5);
        assert!(rows[0].bound.is_none());
        assert!(rows[2].unimodal);
        assert!(rows.windows(2).all(|w| w[1].sigma_tilde > w[0].sigma_tilde));
        assert!(scan_report(&dw(), &[1.0], &[-1.0], 0.1, 0.5, &[10.0]).is_err());
    }

    #[test]
    fn tilted_duffing_unimodal_at_0_3() {
        let p = PotentialSpec::tilted_duffing_default();
        let rows = scan_report(&p, &[0.5, 0.25], &[-0.5254, 0.2760], 0.1, 0.15, &[0.0, 0.3]).unwrap();
        assert!(!rows[0].unimodal);
        assert!(rows[1].unimodal);
    }

    #[test]
    fn infeasible_target() {
        // a tiny gain grid never reaches unimodality
        let search = SearchGrid::around(&[1.0], &[-1.0]).unwrap();
        let out = tune_gain_on(&dw(), &[1.0], &[-1.0], 9.0, 0.5, 1e-3, 0.1, &search).unwrap();
        match &out {
            TuneOutcome::Infeasible { best, reason, .. } => {
                assert!(best.is_some());
                assert!(reason.contains("unimodal"));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(out.exit_code(), 3);
        assert!(tune_gain(&dw(), &[1.0], &[-1.0], 0.0, 0.5, 1e-3, 0.01).is_err());
        assert!(tune_gain(&dw(), &[1.0], &[-1.0], 0.1, 0.5, 1.0, 0.01).is_err());
    }

    #[test]
    fn profile_curve_shapes() {
        let dom = BoxDomain::cube(1, -2.5, 2.5).unwrap();
        let c = profile_curve(&dw(), &[1.0], 0.1, 0.5, 1.0, &dom, 501).unwrap();
        let k = c.p0.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        assert!((c.x[k] - 1.0).abs() < 0.02);
        assert_eq!(c.x.len(), c.v_tilde.len());
    }
}
