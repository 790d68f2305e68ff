//! Predictor-corrector integration of SDEs and SDDEs with reproducible noise.
//!
//! One step of the scheme, with `f` the drift, `s` the diagonal diffusion and
//! `j = tau / h` the delay in steps:
//!
//! ```text
//! Xp      = X[i] + h f(X[i], X[i-j]) + s(X[i]) dW[i]
//! X[i+1]  = X[i] + h/2 [f(X[i], X[i-j]) + f(Xp, X[i-j+1])] + 1/2 [s(X[i]) + s(Xp)] dW[i]
//! ```
//!
//! Every trajectory draws its Wiener increments from a ChaCha8 stream seeded
//! with a SplitMix64 mix of the ensemble base seed and the trajectory index, so
//! results do not depend on thread scheduling.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::systems::SystemSpec;

/// Relative tolerance when checking that `tau / h` is an integer.
pub const DELAY_ALIGN_TOL: f64 = 1e-9;
/// Largest fraction of aborted trajectories an ensemble tolerates.
pub const MAX_ABORT_FRACTION: f64 = 0.01;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trajectory `index` in an ensemble with `base` seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix64(splitmix64(base) ^ index.wrapping_add(1).wrapping_mul(GOLDEN))
}

/// Gaussian increments with per-component variance `h`, drawn step-major.
pub struct WienerStream {
    rng: ChaCha8Rng,
    sqrt_h: f64,
}

impl WienerStream {
    pub fn new(seed: u64, h: f64) -> Self {
        Self { rng: ChaCha8Rng::seed_from_u64(seed), sqrt_h: h.sqrt() }
    }

    pub fn fill(&mut self, out: &mut [f64]) {
        for o in out {
            let z: f64 = StandardNormal.sample(&mut self.rng);
            *o = z * self.sqrt_h;
        }
    }
}

pub fn wiener_increments(seed: u64, count: usize, dims: usize, h: f64) -> Result<Vec<Vec<f64>>> {
    if count == 0 || dims == 0 || !(h > 0.0) {
        return Err(Error::invalid("wiener_increments needs count >= 1, dims >= 1, h > 0"));
    }
    let mut stream = WienerStream::new(seed, h);
    Ok((0..count)
        .map(|_| {
            let mut v = vec![0.0; dims];
            stream.fill(&mut v);
            v
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub h: f64,
    /// Time horizon.
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    pub base_seed: u64,
}

fn default_stride() -> usize {
    1
}

impl IntegratorConfig {
    pub fn new(h: f64, horizon: f64, record_stride: usize, base_seed: u64) -> Result<Self> {
        let c = Self { h, horizon, record_stride, base_seed };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h > 0.0) || !self.h.is_finite() {
            return Err(Error::invalid(format!("step h must be > 0, got {}", self.h)));
        }
        if !(self.horizon >= self.h) || !self.horizon.is_finite() {
            return Err(Error::invalid("horizon T must satisfy T >= h"));
        }
        if self.record_stride == 0 {
            return Err(Error::invalid("record_stride must be >= 1"));
        }
        Ok(())
    }

    /// `ceil(T / h)`, ignoring rounding noise in the quotient.
    pub fn steps(&self) -> usize {
        steps_for(self.horizon, self.h)
    }

    pub fn records(&self) -> usize {
        self.steps() / self.record_stride
    }
}

fn steps_for(horizon: f64, h: f64) -> usize {
    let q = horizon / h;
    let r = q.round();
    if (q - r).abs() <= DELAY_ALIGN_TOL * r.max(1.0) {
        r as usize
    } else {
        q.ceil() as usize
    }
}

/// Number of steps `j` with `tau = j h`.
pub fn delay_steps(tau: f64, h: f64) -> Result<usize> {
    if tau == 0.0 {
        return Ok(0);
    }
    let q = tau / h;
    let j = q.round();
    if j < 1.0 || (q - j).abs() > DELAY_ALIGN_TOL * j {
        return Err(Error::DelayMisaligned { tau, h });
    }
    Ok(j as usize)
}

/// History function on `[-tau, 0]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialData {
    /// `x(t) = x0` on the whole history interval.
    Constant(Vec<f64>),
    /// Samples at `t = -j h, ..., -h, 0`, oldest first.
    History(Vec<Vec<f64>>),
}

impl InitialData {
    pub fn constant(x0: impl Into<Vec<f64>>) -> Self {
        InitialData::Constant(x0.into())
    }

    fn dim(&self) -> usize {
        match self {
            InitialData::Constant(x) => x.len(),
            InitialData::History(s) => s.first().map_or(0, Vec::len),
        }
    }

    fn buffer(&self, j: usize, n: usize) -> Result<HistoryBuffer> {
        match self {
            InitialData::Constant(x) => {
                check_dim(n, x.len())?;
                Ok(HistoryBuffer::constant(j, x))
            }
            InitialData::History(samples) => {
                if samples.len() != j + 1 {
                    return Err(Error::invalid(format!(
                        "history needs {} samples at step boundaries, got {}",
                        j + 1,
                        samples.len()
                    )));
                }
                let mut buf = HistoryBuffer::constant(j, &samples[0]);
                for s in samples {
                    check_dim(n, s.len())?;
                    buf.push(s);
                }
                Ok(buf)
            }
        }
    }
}

/// Ring of the `j + 1` most recent states `X[i-j], ..., X[i]`.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    data: Vec<f64>,
    dim: usize,
    len: usize,
    /// Slot of the oldest state `X[i-j]`.
    head: usize,
}

impl HistoryBuffer {
    pub fn constant(j: usize, x: &[f64]) -> Self {
        let len = j + 1;
        let mut data = Vec::with_capacity(len * x.len());
        for _ in 0..len {
            data.extend_from_slice(x);
        }
        Self { data, dim: x.len(), len, head: 0 }
    }

    pub fn delay_steps(&self) -> usize {
        self.len - 1
    }

    fn slot(&self, k: usize) -> &[f64] {
        let s = (self.head + k) % self.len;
        &self.data[s * self.dim..(s + 1) * self.dim]
    }

    /// `X[i-j]`; the current state when `j = 0`.
    pub fn delayed(&self) -> &[f64] {
        self.slot(0)
    }

    /// `X[i-j+1]`; only meaningful for `j >= 1`.
    pub fn delayed_next(&self) -> &[f64] {
        self.slot(1 % self.len)
    }

    pub fn current(&self) -> &[f64] {
        self.slot(self.len - 1)
    }

    /// Appends `X[i+1]`, dropping `X[i-j]`.
    pub fn push(&mut self, x: &[f64]) {
        let s = self.head;
        self.data[s * self.dim..(s + 1) * self.dim].copy_from_slice(x);
        self.head = (self.head + 1) % self.len;
    }
}

/// Scratch space for one predictor-corrector step.
struct Stepper {
    f0: Vec<f64>,
    f1: Vec<f64>,
    s0: Vec<f64>,
    s1: Vec<f64>,
    pred: Vec<f64>,
}

impl Stepper {
    fn new(n: usize) -> Self {
        Self {
            f0: vec![0.0; n],
            f1: vec![0.0; n],
            s0: vec![0.0; n],
            s1: vec![0.0; n],
            pred: vec![0.0; n],
        }
    }

    /// `xd_next = None` means `j = 0`, where `X[i-j+1]` is the predicted state.
    #[allow(clippy::too_many_arguments)]
    fn step(
        &mut self,
        sys: &SystemSpec,
        x: &[f64],
        xd: &[f64],
        xd_next: Option<&[f64]>,
        dw: &[f64],
        h: f64,
        out: &mut [f64],
    ) {
        sys.drift_into(x, xd, &mut self.f0);
        sys.diffusion_into(x, &mut self.s0);
        for i in 0..x.len() {
            self.pred[i] = x[i] + h * self.f0[i] + self.s0[i] * dw[i];
        }
        let next = xd_next.unwrap_or(&self.pred);
        sys.drift_into(&self.pred, next, &mut self.f1);
        sys.diffusion_into(&self.pred, &mut self.s1);
        for i in 0..x.len() {
            out[i] = x[i] + 0.5 * h * (self.f0[i] + self.f1[i]) + 0.5 * (self.s0[i] + self.s1[i]) * dw[i];
        }
    }
}

/// One step of the scheme from `x_i`. `x_delayed_i = X[i-j]` and
/// `x_delayed_ip1 = X[i-j+1]` are ignored for systems without delay.
pub fn step_predictor_corrector(
    sys: &SystemSpec,
    x_i: &[f64],
    x_delayed_i: &[f64],
    x_delayed_ip1: &[f64],
    dw_i: &[f64],
    h: f64,
) -> Result<Vec<f64>> {
    let n = sys.dimension();
    for len in [x_i.len(), x_delayed_i.len(), x_delayed_ip1.len(), dw_i.len()] {
        check_dim(n, len)?;
    }
    let mut out = vec![0.0; n];
    Stepper::new(n).step(sys, x_i, x_delayed_i, Some(x_delayed_ip1), dw_i, h, &mut out);
    Ok(out)
}

/// Integrates `steps` steps, pulling increments from `noise` and handing every
/// new state `X[i]` (i >= 1) to `record`. Returns the step index of the first
/// non-finite state on failure.
pub(crate) fn integrate(
    sys: &SystemSpec,
    init: &InitialData,
    h: f64,
    steps: usize,
    mut noise: impl FnMut(&mut [f64]),
    mut record: impl FnMut(usize, &[f64]),
) -> Result<std::result::Result<(), usize>> {
    let n = sys.dimension();
    check_dim(n, init.dim())?;
    let j = if sys.has_delay() { delay_steps(sys.control().tau, h)? } else { 0 };
    let mut hist = init.buffer(j, n)?;
    let mut stepper = Stepper::new(n);
    let mut dw = vec![0.0; n];
    let mut x = hist.current().to_vec();
    let mut next = vec![0.0; n];
    for i in 1..=steps {
        noise(&mut dw);
        let xd_next = (j > 0).then(|| hist.delayed_next());
        stepper.step(sys, &x, hist.delayed(), xd_next, &dw, h, &mut next);
        if !next.iter().all(|v| v.is_finite()) {
            return Ok(Err(i));
        }
        hist.push(&next);
        std::mem::swap(&mut x, &mut next);
        record(i, &x);
    }
    Ok(Ok(()))
}

/// Recorded path. States are stored flat, `dim` values per record; record `k`
/// is the state at `t = (k + 1) h stride`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub seed: u64,
    pub dim: usize,
    pub initial: Vec<f64>,
    pub states: Vec<f64>,
    pub system: Arc<SystemSpec>,
    pub config: Arc<IntegratorConfig>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn record_dt(&self) -> f64 {
        self.config.h * self.config.record_stride as f64
    }

    pub fn time(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.record_dt()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(|k| self.time(k))
    }

    pub fn state(&self, k: usize) -> &[f64] {
        &self.states[k * self.dim..(k + 1) * self.dim]
    }

    pub fn iter_states(&self) -> std::slice::ChunksExact<'_, f64> {
        self.states.chunks_exact(self.dim)
    }

    pub fn final_state(&self) -> &[f64] {
        if self.is_empty() {
            &self.initial
        } else {
            self.state(self.len() - 1)
        }
    }
}

fn run_seeded(
    sys: &Arc<SystemSpec>,
    init: &InitialData,
    cfg: &Arc<IntegratorConfig>,
    seed: u64,
) -> Result<Trajectory> {
    cfg.validate()?;
    let n = sys.dimension();
    let stride = cfg.record_stride;
    let mut states = Vec::with_capacity(cfg.records() * n);
    let mut stream = WienerStream::new(seed, cfg.h);
    let outcome = integrate(sys, init, cfg.h, cfg.steps(), |dw| stream.fill(dw), |i, x| {
        if i % stride == 0 {
            states.extend_from_slice(x);
        }
    })?;
    if let Err(step) = outcome {
        return Err(Error::NonFinite { step, seed });
    }
    let initial = match init {
        InitialData::Constant(x) => x.clone(),
        InitialData::History(s) => s.last().cloned().unwrap_or_default(),
    };
    Ok(Trajectory { seed, dim: n, initial, states, system: Arc::clone(sys), config: Arc::clone(cfg) })
}

/// Simulates one path using `cfg.base_seed` as its seed.
pub fn simulate_trajectory(sys: &SystemSpec, init: &InitialData, cfg: &IntegratorConfig) -> Result<Trajectory> {
    run_seeded(&Arc::new(sys.clone()), init, &Arc::new(cfg.clone()), cfg.base_seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortRecord {
    pub index: usize,
    pub seed: u64,
    pub step: usize,
}

#[derive(Debug, Clone)]
pub struct Ensemble {
    pub system: Arc<SystemSpec>,
    pub config: Arc<IntegratorConfig>,
    pub init: InitialData,
    /// Completed trajectories in index order; aborted indices are skipped.
    pub trajectories: Vec<Trajectory>,
    pub aborted: Vec<AbortRecord>,
}

impl Ensemble {
    pub fn dim(&self) -> usize {
        self.system.dimension()
    }

    pub fn total_records(&self) -> usize {
        self.trajectories.iter().map(Trajectory::len).sum()
    }
}

/// Runs `n_traj` independent paths in parallel; trajectory `i` uses seed
/// `derive_seed(cfg.base_seed, i)`.
pub fn simulate_ensemble(
    sys: &SystemSpec,
    init: &InitialData,
    cfg: &IntegratorConfig,
    n_traj: usize,
) -> Result<Ensemble> {
    if n_traj == 0 {
        return Err(Error::invalid("ensemble needs n_traj >= 1"));
    }
    cfg.validate()?;
    let sys = Arc::new(sys.clone());
    let cfg = Arc::new(cfg.clone());
    let results: Vec<Result<Trajectory>> = (0..n_traj)
        .into_par_iter()
        .map(|i| run_seeded(&sys, init, &cfg, derive_seed(cfg.base_seed, i as u64)))
        .collect();

    let mut trajectories = Vec::with_capacity(n_traj);
    let mut aborted = Vec::new();
    for (index, r) in results.into_iter().enumerate() {
        match r {
            Ok(t) => trajectories.push(t),
            Err(Error::NonFinite { step, seed }) => aborted.push(AbortRecord { index, seed, step }),
            Err(e) => return Err(e),
        }
    }
    if aborted.len() as f64 > MAX_ABORT_FRACTION * n_traj as f64 {
        return Err(Error::EnsembleFailed { aborted: aborted.len(), total: n_traj });
    }
    Ok(Ensemble { system: sys, config: cfg, init: init.clone(), trajectories, aborted })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub h_list: Vec<f64>,
    /// Root-mean-square terminal error against the reference path, per step size.
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(h)`.
    pub slope: f64,
    pub h_ref: f64,
}

/// Strong convergence study. All resolutions share one Brownian path per
/// sample: the reference runs at `min(h_list) / 4` and coarse increments are
/// sums of fine ones.
pub fn convergence_order(
    sys: &SystemSpec,
    init: &InitialData,
    h_list: &[f64],
    horizon: f64,
    n_paths: usize,
    base_seed: u64,
) -> Result<ConvergenceReport> {
    if h_list.len() < 3 {
        return Err(Error::TooFewStepSizes(h_list.len()));
    }
    if n_paths == 0 || h_list.iter().any(|h| !(*h > 0.0)) {
        return Err(Error::invalid("convergence study needs n_paths >= 1 and positive step sizes"));
    }
    let h_min = h_list.iter().cloned().fold(f64::INFINITY, f64::min);
    let h_ref = h_min / 4.0;
    let ref_steps = exact_ratio(horizon, h_ref)?;
    let factors: Vec<usize> = h_list.iter().map(|&h| exact_ratio(h, h_ref)).collect::<Result<_>>()?;
    if let Some(&bad) = factors.iter().find(|&&f| ref_steps % f != 0) {
        return Err(Error::invalid(format!("step {} does not divide the horizon", bad as f64 * h_ref)));
    }
    let n = sys.dimension();

    let per_path: Vec<Result<Vec<f64>>> = (0..n_paths)
        .into_par_iter()
        .map(|p| {
            let fine = {
                let mut stream = WienerStream::new(derive_seed(base_seed, p as u64), h_ref);
                let mut v = vec![0.0; ref_steps * n];
                stream.fill(&mut v);
                v
            };
            let reference = terminal_state(sys, init, h_ref, &fine, 1, n)?;
            factors
                .iter()
                .map(|&f| {
                    let x = terminal_state(sys, init, h_ref * f as f64, &fine, f, n)?;
                    Ok(crate::potentials::dist_sq(&x, &reference))
                })
                .collect()
        })
        .collect();

    let mut sums = vec![0.0; h_list.len()];
    for r in per_path {
        for (s, e) in sums.iter_mut().zip(r?) {
            *s += e;
        }
    }
    let errors: Vec<f64> = sums.iter().map(|s| (s / n_paths as f64).sqrt()).collect();
    let slope = log_log_slope(h_list, &errors);
    Ok(ConvergenceReport { h_list: h_list.to_vec(), errors, slope, h_ref })
}

fn exact_ratio(num: f64, den: f64) -> Result<usize> {
    let q = num / den;
    let r = q.round();
    if r < 1.0 || (q - r).abs() > DELAY_ALIGN_TOL * r {
        return Err(Error::invalid(format!("{num} is not an integer multiple of {den}")));
    }
    Ok(r as usize)
}

fn terminal_state(
    sys: &SystemSpec,
    init: &InitialData,
    h: f64,
    fine: &[f64],
    factor: usize,
    n: usize,
) -> Result<Vec<f64>> {
    let steps = fine.len() / n / factor;
    let mut cursor = 0usize;
    let mut last = vec![0.0; n];
    let outcome = integrate(
        sys,
        init,
        h,
        steps,
        |dw| {
            dw.fill(0.0);
            for _ in 0..factor {
                for (d, f) in dw.iter_mut().zip(&fine[cursor * n..(cursor + 1) * n]) {
                    *d += f;
                }
                cursor += 1;
            }
        },
        |_, x| last.copy_from_slice(x),
    )?;
    outcome.map_err(|step| Error::NonFinite { step, seed: 0 })?;
    Ok(last)
}

/// Least-squares slope of `log y` on `log x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::PotentialSpec;
    use crate::systems::{ControlParams, DiffusionSpec};
    use approx::assert_abs_diff_eq;

    fn dw(sigma: f64) -> SystemSpec {
        SystemSpec::uncontrolled(PotentialSpec::double_well(), DiffusionSpec::constant(sigma).unwrap()).unwrap()
    }

    fn linear(sigma: f64) -> SystemSpec {
        SystemSpec::uncontrolled(
            PotentialSpec::quadratic(vec![0.0], 1.0).unwrap(),
            DiffusionSpec::constant(sigma).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn derived_seeds_are_distinct_and_stable() {
        let seeds: std::collections::HashSet<u64> = (0..1000).map(|i| derive_seed(7, i)).collect();
        assert_eq!(seeds.len(), 1000);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
        assert_ne!(derive_seed(7, 3), derive_seed(8, 3));
    }

    #[test]
    fn increments_are_deterministic() {
        let a = wiener_increments(11, 100, 2, 0.01).unwrap();
        let b = wiener_increments(11, 100, 2, 0.01).unwrap();
        assert_eq!(a, b);
        assert!(wiener_increments(11, 0, 2, 0.01).is_err());
        assert!(wiener_increments(11, 5, 0, 0.01).is_err());
        assert!(wiener_increments(11, 5, 1, 0.0).is_err());
    }

    #[test]
    fn delay_alignment() {
        assert_eq!(delay_steps(0.1, 0.01).unwrap(), 10);
        assert_eq!(delay_steps(0.0, 0.01).unwrap(), 0);
        assert_eq!(delay_steps(6.0, 0.01).unwrap(), 600);
        assert!(matches!(delay_steps(0.105, 0.01), Err(Error::DelayMisaligned { .. })));
        assert!(delay_steps(0.004, 0.01).is_err());
    }

    #[test]
    fn history_buffer_lookup() {
        let mut b = HistoryBuffer::constant(3, &[0.0]);
        for i in 1..=10 {
            b.push(&[i as f64]);
            assert_eq!(b.current(), &[i as f64]);
            let d = (i as f64 - 3.0).max(0.0);
            assert_eq!(b.delayed(), &[d]);
            assert_eq!(b.delayed_next(), &[(i as f64 - 2.0).max(0.0)]);
        }
        let mut z = HistoryBuffer::constant(0, &[1.0, 2.0]);
        z.push(&[3.0, 4.0]);
        assert_eq!(z.delayed(), z.current());
    }

    #[test]
    fn step_examples() {
        let s = dw(0.0);
        assert_eq!(step_predictor_corrector(&s, &[1.0], &[1.0], &[1.0], &[0.3], 0.01).unwrap(), vec![1.0]);

        let lin = linear(0.0);
        let x = step_predictor_corrector(&lin, &[1.0], &[1.0], &[1.0], &[0.0], 0.01).unwrap();
        assert_abs_diff_eq!(x[0], 0.99005, epsilon = 1e-15);

        // Constant drift: a negligible potential plus feedback on equal delayed states
        // gives f = -alpha (xd - xa) = 0.7 at both stages.
        let flat = SystemSpec::controlled_sdde(
            PotentialSpec::quadratic(vec![0.0], 1e-300).unwrap(),
            ControlParams::new(1.0, 0.1, vec![0.2]).unwrap(),
            DiffusionSpec::constant(0.4).unwrap(),
        )
        .unwrap();
        let y = step_predictor_corrector(&flat, &[2.0], &[-0.5], &[-0.5], &[0.25], 0.01).unwrap();
        assert_abs_diff_eq!(y[0], 2.0 + 0.01 * 0.7 + 0.4 * 0.25, epsilon = 1e-15);
    }

    #[test]
    fn step_rejects_bad_dimensions() {
        let s = dw(0.5);
        assert!(step_predictor_corrector(&s, &[1.0, 2.0], &[1.0], &[1.0], &[0.0], 0.01).is_err());
    }

    #[test]
    fn deterministic_limits_converge_to_wells() {
        let cfg = IntegratorConfig::new(0.01, 50.0, 1, 1).unwrap();
        let up = simulate_trajectory(&dw(0.0), &InitialData::constant([0.3]), &cfg).unwrap();
        assert_abs_diff_eq!(up.final_state()[0], 1.0, epsilon = 1e-6);
        let down = simulate_trajectory(&dw(0.0), &InitialData::constant([-0.3]), &cfg).unwrap();
        assert_abs_diff_eq!(down.final_state()[0], -1.0, epsilon = 1e-6);
        assert_eq!(up.len(), 5000);
    }

    #[test]
    fn misaligned_delay_is_rejected() {
        let sys = SystemSpec::controlled_sdde(
            PotentialSpec::double_well(),
            ControlParams::new(1.0, 0.105, vec![1.0]).unwrap(),
            DiffusionSpec::constant(0.5).unwrap(),
        )
        .unwrap();
        let cfg = IntegratorConfig::new(0.01, 1.0, 1, 1).unwrap();
        assert!(matches!(
            simulate_trajectory(&sys, &InitialData::constant([1.0]), &cfg),
            Err(Error::DelayMisaligned { .. })
        ));
    }

    #[test]
    fn blow_up_aborts_trajectory() {
        // a huge step makes the explicit scheme diverge on the quartic
        let cfg = IntegratorConfig::new(1.0, 200.0, 1, 1).unwrap();
        let err = simulate_trajectory(&dw(0.5), &InitialData::constant([3.0]), &cfg).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }));
        assert!(matches!(
            simulate_ensemble(&dw(0.5), &InitialData::constant([3.0]), &cfg, 4),
            Err(Error::EnsembleFailed { aborted: 4, total: 4 })
        ));
    }

    #[test]
    fn recording_stride_and_times() {
        let cfg = IntegratorConfig::new(0.01, 1.0, 10, 3).unwrap();
        let t = simulate_trajectory(&dw(0.5), &InitialData::constant([1.0]), &cfg).unwrap();
        assert_eq!(t.len(), 10);
        let times: Vec<f64> = t.times().collect();
        for w in times.windows(2) {
            assert_abs_diff_eq!(w[1] - w[0], 0.1, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(*times.last().unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn too_few_step_sizes() {
        let r = convergence_order(&linear(0.5), &InitialData::constant([1.0]), &[0.02, 0.01], 1.0, 4, 0);
        assert!(matches!(r, Err(Error::TooFewStepSizes(2))));
    }
}
