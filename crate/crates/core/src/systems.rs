//! The four equations: uncontrolled SDE, delay-controlled SDDE, approximating
//! SDE and its time-rescaled form, assembled from potential, control and noise.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::potentials::{make_effective, PotentialSpec};

/// Linear delayed feedback `u = alpha (x(t - tau) - xa)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlParams {
    pub alpha: f64,
    pub tau: f64,
    pub xa: Vec<f64>,
}

impl ControlParams {
    pub fn new(alpha: f64, tau: f64, xa: Vec<f64>) -> Result<Self> {
        let c = Self { alpha, tau, xa };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return Err(Error::invalid(format!("tau must be >= 0, got {}", self.tau)));
        }
        if self.xa.is_empty() || self.xa.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("xa must be a non-empty finite vector"));
        }
        Ok(())
    }

    pub fn alpha_tau(&self) -> f64 {
        self.alpha * self.tau
    }

    /// Errors unless `alpha * tau < 1`.
    pub fn require_small_delay(&self) -> Result<()> {
        let product = self.alpha_tau();
        if product < 1.0 {
            Ok(())
        } else {
            Err(Error::GainDelayTooLarge { alpha: self.alpha, tau: self.tau, product })
        }
    }
}

/// Diagonal state-dependent noise families (one Wiener component per coordinate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum StateDiffusion {
    /// `sigma_i(x) = sigma0 + sigma1 * x_i`
    Affine { sigma0: f64, sigma1: f64 },
    /// `sigma_i(x) = sigma0 * sqrt(1 + c * x_i^2)`
    Sqrt { sigma0: f64, c: f64 },
}

impl StateDiffusion {
    fn coefficient(&self, xi: f64) -> f64 {
        match *self {
            StateDiffusion::Affine { sigma0, sigma1 } => sigma0 + sigma1 * xi,
            StateDiffusion::Sqrt { sigma0, c } => sigma0 * (1.0 + c * xi * xi).sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DiffusionSpec {
    ConstantIsotropic { sigma: f64 },
    StateDependent(StateDiffusion),
}

impl DiffusionSpec {
    pub fn constant(sigma: f64) -> Result<Self> {
        let d = DiffusionSpec::ConstantIsotropic { sigma };
        d.validate()?;
        Ok(d)
    }

    fn validate(&self) -> Result<()> {
        match self {
            DiffusionSpec::ConstantIsotropic { sigma } if !(*sigma >= 0.0) || !sigma.is_finite() => {
                Err(Error::invalid(format!("sigma must be >= 0, got {sigma}")))
            }
            DiffusionSpec::StateDependent(StateDiffusion::Sqrt { c, .. }) if *c < 0.0 => {
                Err(Error::invalid("sqrt diffusion needs c >= 0"))
            }
            _ => Ok(()),
        }
    }

    /// `sigma` for constant isotropic noise, `None` otherwise.
    pub fn constant_sigma(&self) -> Option<f64> {
        match self {
            DiffusionSpec::ConstantIsotropic { sigma } => Some(*sigma),
            DiffusionSpec::StateDependent(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, DiffusionSpec::ConstantIsotropic { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Uncontrolled,
    ControlledSdde,
    ApproximatingSde,
    RescaledSde,
}

/// A simulatable system. Construct through the kind-specific constructors or
/// deserialization, both of which validate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemRepr", into = "SystemRepr")]
pub struct SystemSpec {
    kind: SystemKind,
    potential: PotentialSpec,
    control: ControlParams,
    diffusion: DiffusionSpec,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SystemRepr {
    kind: SystemKind,
    potential: PotentialSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    control: Option<ControlParams>,
    diffusion: DiffusionSpec,
}

impl TryFrom<SystemRepr> for SystemSpec {
    type Error = Error;

    fn try_from(r: SystemRepr) -> Result<Self> {
        match (r.kind, r.control) {
            (SystemKind::Uncontrolled, None) => Self::uncontrolled(r.potential, r.diffusion),
            (SystemKind::Uncontrolled, Some(_)) => {
                Err(Error::invalid("uncontrolled system takes no control block"))
            }
            (_, None) => Err(Error::invalid("controlled systems need a control block")),
            (kind, Some(c)) => Self::build(kind, r.potential, c, r.diffusion),
        }
    }
}

impl From<SystemSpec> for SystemRepr {
    fn from(s: SystemSpec) -> Self {
        let control = (s.kind != SystemKind::Uncontrolled).then_some(s.control);
        SystemRepr { kind: s.kind, potential: s.potential, control, diffusion: s.diffusion }
    }
}

impl SystemSpec {
    /// The uncontrolled system is stored as a controlled one with `alpha = tau = 0`.
    pub fn uncontrolled(potential: PotentialSpec, diffusion: DiffusionSpec) -> Result<Self> {
        let n = potential.dim();
        let control = ControlParams { alpha: 0.0, tau: 0.0, xa: vec![0.0; n] };
        Self::build(SystemKind::Uncontrolled, potential, control, diffusion)
    }

    pub fn controlled_sdde(
        potential: PotentialSpec,
        control: ControlParams,
        diffusion: DiffusionSpec,
    ) -> Result<Self> {
        Self::build(SystemKind::ControlledSdde, potential, control, diffusion)
    }

    pub fn approximating_sde(
        potential: PotentialSpec,
        control: ControlParams,
        diffusion: DiffusionSpec,
    ) -> Result<Self> {
        Self::build(SystemKind::ApproximatingSde, potential, control, diffusion)
    }

    pub fn rescaled_sde(
        potential: PotentialSpec,
        control: ControlParams,
        diffusion: DiffusionSpec,
    ) -> Result<Self> {
        Self::build(SystemKind::RescaledSde, potential, control, diffusion)
    }

    pub fn build(
        kind: SystemKind,
        potential: PotentialSpec,
        control: ControlParams,
        diffusion: DiffusionSpec,
    ) -> Result<Self> {
        control.validate()?;
        diffusion.validate()?;
        check_dim(potential.dim(), control.xa.len())?;
        if matches!(kind, SystemKind::ApproximatingSde | SystemKind::RescaledSde) {
            control.require_small_delay()?;
        }
        Ok(Self { kind, potential, control, diffusion })
    }

    /// Same system with a different gain, delay or noise level.
    pub fn with_overrides(&self, alpha: Option<f64>, tau: Option<f64>, sigma: Option<f64>) -> Result<Self> {
        let mut control = self.control.clone();
        if self.kind != SystemKind::Uncontrolled {
            if let Some(a) = alpha {
                control.alpha = a;
            }
            if let Some(t) = tau {
                control.tau = t;
            }
        } else if alpha.is_some() || tau.is_some() {
            return Err(Error::invalid("alpha/tau overrides do not apply to an uncontrolled system"));
        }
        let diffusion = match sigma {
            Some(s) => DiffusionSpec::constant(s)?,
            None => self.diffusion.clone(),
        };
        Self::build(self.kind, self.potential.clone(), control, diffusion)
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    pub fn control(&self) -> &ControlParams {
        &self.control
    }

    pub fn diffusion(&self) -> &DiffusionSpec {
        &self.diffusion
    }

    pub fn dimension(&self) -> usize {
        self.potential.dim()
    }

    /// True when the drift reads a state from the past.
    pub fn has_delay(&self) -> bool {
        self.kind == SystemKind::ControlledSdde && self.control.tau > 0.0
    }

    /// `(V~, nu~)` of the stationary density; requires constant noise and
    /// `alpha tau < 1` for the controlled kinds.
    pub fn stationary_parameters(&self) -> Result<(PotentialSpec, f64)> {
        let sigma = self.diffusion.constant_sigma().ok_or(Error::RequiresConstantDiffusion)?;
        match self.kind {
            SystemKind::Uncontrolled => Ok((self.potential.clone(), 0.5 * sigma * sigma)),
            _ => {
                let noise = effective_noise(&self.control, sigma)?;
                let eff = make_effective(&self.potential, self.control.alpha, &self.control.xa)?;
                Ok((eff, noise.nu_tilde))
            }
        }
    }

    /// Drift into `out`. `x_delayed` is read only for delayed systems.
    pub(crate) fn drift_into(&self, x: &[f64], x_delayed: &[f64], out: &mut [f64]) {
        self.potential.gradient_into(x, out);
        let ControlParams { alpha, tau, xa } = &self.control;
        match self.kind {
            SystemKind::Uncontrolled => out.iter_mut().for_each(|o| *o = -*o),
            SystemKind::ControlledSdde => {
                let src = if self.has_delay() { x_delayed } else { x };
                for ((o, d), a) in out.iter_mut().zip(src).zip(xa) {
                    *o = -*o - alpha * (d - a);
                }
            }
            SystemKind::ApproximatingSde => {
                let scale = 1.0 / (1.0 - alpha * tau);
                for ((o, xi), a) in out.iter_mut().zip(x).zip(xa) {
                    *o = (-*o - alpha * (xi - a)) * scale;
                }
            }
            SystemKind::RescaledSde => {
                for ((o, xi), a) in out.iter_mut().zip(x).zip(xa) {
                    *o = -*o - alpha * (xi - a);
                }
            }
        }
    }

    /// Multiplier applied to the raw diffusion coefficient by each equation.
    pub(crate) fn noise_scale(&self) -> f64 {
        let at = self.control.alpha_tau();
        match self.kind {
            SystemKind::Uncontrolled | SystemKind::ControlledSdde => 1.0,
            SystemKind::ApproximatingSde => 1.0 / (1.0 - at),
            SystemKind::RescaledSde => 1.0 / (1.0 - at).sqrt(),
        }
    }

    /// Per-coordinate diffusion coefficients at `x` (diagonal noise).
    pub(crate) fn diffusion_into(&self, x: &[f64], out: &mut [f64]) {
        let scale = self.noise_scale();
        match &self.diffusion {
            DiffusionSpec::ConstantIsotropic { sigma } => out.fill(sigma * scale),
            DiffusionSpec::StateDependent(f) => {
                for (o, xi) in out.iter_mut().zip(x) {
                    *o = f.coefficient(*xi) * scale;
                }
            }
        }
    }

    pub fn diffusion_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dimension(), x.len())?;
        let mut out = vec![0.0; x.len()];
        self.diffusion_into(x, &mut out);
        Ok(out)
    }
}

/// Drift of `sys` at `x`. `x_delayed` must be given exactly when the system is a
/// controlled SDDE with `tau > 0`.
pub fn drift(sys: &SystemSpec, x: &[f64], x_delayed: Option<&[f64]>) -> Result<Vec<f64>> {
    let n = sys.dimension();
    check_dim(n, x.len())?;
    let xd = match (sys.has_delay(), x_delayed) {
        (true, Some(d)) => {
            check_dim(n, d.len())?;
            d
        }
        (true, None) => return Err(Error::MissingDelayedState),
        (false, Some(_)) => return Err(Error::UnexpectedDelayedState),
        (false, None) => x,
    };
    let mut out = vec![0.0; n];
    sys.drift_into(x, xd, &mut out);
    Ok(out)
}

/// Noise constants of the rescaled equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EffectiveNoise {
    pub sigma_tilde: f64,
    pub nu_tilde: f64,
    /// `+inf` when `alpha = 0`.
    pub beta: f64,
}

pub fn effective_noise(control: &ControlParams, sigma: f64) -> Result<EffectiveNoise> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(format!("sigma must be > 0, got {sigma}")));
    }
    control.require_small_delay()?;
    let one_minus = 1.0 - control.alpha_tau();
    let sigma_tilde = sigma / one_minus.sqrt();
    let beta = if control.alpha > 0.0 {
        sigma / (control.alpha * one_minus).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(EffectiveNoise { sigma_tilde, nu_tilde: 0.5 * sigma_tilde * sigma_tilde, beta })
}

/// `s = t / (1 - alpha tau)`.
pub fn rescale_time(control: &ControlParams, t: f64) -> Result<f64> {
    control.require_small_delay()?;
    Ok(t / (1.0 - control.alpha_tau()))
}
