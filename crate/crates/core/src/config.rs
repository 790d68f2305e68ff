//! Versioned JSON run configuration shared by every subcommand.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::analysis::{DEFAULT_NODES_1D, DEFAULT_NODES_2D};
use crate::engine::{InitialData, IntegratorConfig};
use crate::error::{Error, Result};
use crate::estimation::{
    DEFAULT_BINS_1D, DEFAULT_BINS_2D, DEFAULT_BURN_IN, DEFAULT_EPSILON, DEFAULT_PROMINENCE, DEFAULT_SMOOTHING_WINDOW,
};
use crate::gain::{DEFAULT_ALPHA_STEP, DEFAULT_TARGET_BOUND};
use crate::potentials::BoxDomain;
use crate::systems::SystemSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub system: SystemSpec,
    #[serde(default)]
    pub integrator: IntegratorSection,
    /// Constant initial history; defaults to `xa` (or the origin when uncontrolled).
    #[serde(default)]
    pub initial_state: Option<Vec<f64>>,
    #[serde(default)]
    pub estimation: EstimationSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
    #[serde(default)]
    pub tune: TuneSection,
    #[serde(default)]
    pub output_dir: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub h: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub record_stride: usize,
    pub n_traj: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        IntegratorSection { h: 0.01, horizon: 1000.0, record_stride: 1, n_traj: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EstimationSection {
    /// Bins per axis; 100 in both 1D and 2D unless set.
    pub bins: Option<usize>,
    pub burn_in_fraction: f64,
    pub epsilon: f64,
    pub smoothing_window: usize,
    pub prominence_fraction: f64,
}

impl Default for EstimationSection {
    fn default() -> Self {
        EstimationSection {
            bins: None,
            burn_in_fraction: DEFAULT_BURN_IN,
            epsilon: DEFAULT_EPSILON,
            smoothing_window: DEFAULT_SMOOTHING_WINDOW,
            prominence_fraction: DEFAULT_PROMINENCE,
        }
    }
}

impl EstimationSection {
    pub fn bins_for(&self, dim: usize) -> usize {
        self.bins.unwrap_or(if dim == 1 { DEFAULT_BINS_1D } else { DEFAULT_BINS_2D })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSection {
    /// Initial density domain before auto-expansion; `[-3, 3]^n` about `xa` when unset.
    pub domain: Option<BoxDomain>,
    pub grid_per_dim: Option<usize>,
    /// Undesirable equilibrium for bounds and ratios.
    pub xb: Option<Vec<f64>>,
    /// Ball radius for the finite-radius bound; the limit is always reported.
    pub bound_epsilon: Option<f64>,
}

impl AnalysisSection {
    pub fn grid_for(&self, dim: usize) -> usize {
        self.grid_per_dim.unwrap_or(if dim == 1 { DEFAULT_NODES_1D } else { DEFAULT_NODES_2D })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TuneSection {
    pub target_bound: f64,
    pub alpha_step: f64,
}

impl Default for TuneSection {
    fn default() -> Self {
        TuneSection { target_bound: DEFAULT_TARGET_BOUND, alpha_step: DEFAULT_ALPHA_STEP }
    }
}

/// Command-line overrides applied on top of a file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub quick: bool,
}

/// Fraction of trajectories and horizon kept by `--quick`.
pub const QUICK_TRAJ: usize = 20;
pub const QUICK_HORIZON: f64 = 200.0;

impl RunConfig {
    pub fn new(system: SystemSpec) -> Self {
        RunConfig {
            schema_version: SCHEMA_VERSION,
            system,
            integrator: IntegratorSection::default(),
            initial_state: None,
            estimation: EstimationSection::default(),
            analysis: AnalysisSection::default(),
            tune: TuneSection::default(),
            output_dir: None,
        }
    }

    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
            path: format!("{origin}:{}", display_path(&e.path().to_string())),
            message: e.inner().to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text, &path.display().to_string())
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |path: &str, message: String| Error::Config { path: path.into(), message };
        if self.schema_version != SCHEMA_VERSION {
            return Err(cfg_err(
                "schema_version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        let n = self.system.dimension();
        if let Some(x0) = &self.initial_state {
            if x0.len() != n {
                return Err(cfg_err("initial_state", format!("expected {n} components, got {}", x0.len())));
            }
        }
        if let Some(xb) = &self.analysis.xb {
            if xb.len() != n {
                return Err(cfg_err("analysis.xb", format!("expected {n} components, got {}", xb.len())));
            }
        }
        if let Some(d) = &self.analysis.domain {
            if d.dim() != n {
                return Err(cfg_err("analysis.domain", format!("expected {n} dimensions, got {}", d.dim())));
            }
        }
        if self.integrator.n_traj == 0 {
            return Err(cfg_err("integrator.n_traj", "must be >= 1".into()));
        }
        let e = &self.estimation;
        if !(0.0..1.0).contains(&e.burn_in_fraction) {
            return Err(cfg_err("estimation.burn_in_fraction", "must lie in [0, 1)".into()));
        }
        if !(e.epsilon > 0.0) {
            return Err(cfg_err("estimation.epsilon", "must be > 0".into()));
        }
        IntegratorConfig::new(self.integrator.h, self.integrator.horizon, self.integrator.record_stride, 0)
            .map_err(|err| cfg_err("integrator", err.to_string()))?;
        Ok(())
    }

    /// Applies overrides and quick mode, revalidating the system.
    pub fn with_overrides(&self, o: &Overrides) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.system = cfg.system.with_overrides(o.alpha, o.tau, o.sigma)?;
        if o.quick {
            cfg.integrator.n_traj = cfg.integrator.n_traj.min(QUICK_TRAJ);
            cfg.integrator.horizon = cfg.integrator.horizon.min(QUICK_HORIZON);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn integrator_config(&self, seed: u64) -> Result<IntegratorConfig> {
        let s = &self.integrator;
        IntegratorConfig::new(s.h, s.horizon, s.record_stride, seed)
    }

    pub fn initial_data(&self) -> InitialData {
        InitialData::constant(self.initial_state.clone().unwrap_or_else(|| self.system.control().xa.clone()))
    }

    pub fn density_domain(&self) -> Result<BoxDomain> {
        match &self.analysis.domain {
            Some(d) => Ok(d.clone()),
            None => {
                let xa = &self.system.control().xa;
                BoxDomain::new(xa.iter().map(|c| c - 3.0).collect(), xa.iter().map(|c| c + 3.0).collect())
            }
        }
    }
}

fn display_path(p: &str) -> String {
    if p == "." || p.is_empty() {
        "<root>".into()
    } else {
        p.into()
    }
}
