//! Closed-form stationary densities `p0 = C exp(-V~/nu~)` and upper bounds on
//! the transition ratio between two equilibria. Nothing here simulates.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::potentials::{dist_sq, BoxDomain, PotentialSpec};
use crate::systems::{effective_noise, ControlParams, SystemSpec};

pub const DEFAULT_NODES_1D: usize = 2001;
pub const DEFAULT_NODES_2D: usize = 401;
/// Boundary-to-peak density ratio a truncated domain must reach.
pub const TRUNCATION_RATIO: f64 = 1e-12;
pub const MAX_EXPANSIONS: usize = 5;
pub const EXPANSION_FACTOR: f64 = 1.5;
/// Lattice size for extremizing `V` over a ball in two or more dimensions.
pub const DEFAULT_BALL_SAMPLES: usize = 10_000;
/// Lattice size for one-dimensional balls.
pub const BALL_SAMPLES_1D: usize = 1000;

/// Where an analytic grid came from, so it can be re-evaluated off-grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSource {
    pub potential: PotentialSpec,
    pub nu: f64,
    /// Natural log of the normalizing constant `C`.
    pub log_norm: f64,
}

impl AnalyticSource {
    pub fn norm_const(&self) -> f64 {
        self.log_norm.exp()
    }

    pub fn density(&self, x: &[f64]) -> f64 {
        (self.log_norm - self.potential.value_unchecked(x) / self.nu).exp()
    }
}

/// Density sampled on the nodes of a uniform grid. Node `(i0, i1)` is stored at
/// `i0 + shape[0] * i1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityGrid {
    pub domain: BoxDomain,
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    /// Product of node spacings.
    pub cell_measure: f64,
    pub source: Option<AnalyticSource>,
}

impl DensityGrid {
    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.domain.width(axis) / (self.shape[axis] - 1) as f64
    }

    pub fn node(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        (0..self.dim())
            .map(|d| {
                let k = rem % self.shape[d];
                rem /= self.shape[d];
                self.domain.lo[d] + k as f64 * self.spacing(d)
            })
            .collect()
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, &self.shape) * self.cell_measure
    }

    /// Node with the largest density.
    pub fn argmax(&self) -> Vec<f64> {
        let k = self
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map_or(0, |(k, _)| k);
        self.node(k)
    }
}

fn trapezoid(values: &[f64], shape: &[usize]) -> f64 {
    let mut total = 0.0;
    for (flat, v) in values.iter().enumerate() {
        let mut rem = flat;
        let mut w = 1.0;
        for &s in shape {
            let k = rem % s;
            rem /= s;
            if k == 0 || k == s - 1 {
                w *= 0.5;
            }
        }
        total += w * v;
    }
    total
}

fn boundary_max(values: &[f64], shape: &[usize]) -> f64 {
    let mut m = 0.0_f64;
    for (flat, v) in values.iter().enumerate() {
        let mut rem = flat;
        let on_edge = shape.iter().any(|&s| {
            let k = rem % s;
            rem /= s;
            k == 0 || k == s - 1
        });
        if on_edge {
            m = m.max(*v);
        }
    }
    m
}

/// Normalized `C exp(-V/nu)` on a `grid_per_dim`-node grid.
///
/// The domain is widened (by 50% per round, at most five rounds) until the
/// boundary density drops below `1e-12` of the peak.
pub fn stationary_density(
    potential: &PotentialSpec,
    nu: f64,
    domain: &BoxDomain,
    grid_per_dim: usize,
) -> Result<DensityGrid> {
    let n = potential.dim();
    check_dim(n, domain.dim())?;
    if !(nu > 0.0) {
        return Err(Error::invalid(format!("diffusion constant must be > 0, got {nu}")));
    }
    if !(1..=2).contains(&n) {
        return Err(Error::invalid("gridded densities are limited to one or two dimensions"));
    }
    if grid_per_dim < 3 {
        return Err(Error::invalid("density grid needs at least 3 nodes per axis"));
    }

    let mut dom = domain.clone();
    let mut ratio = f64::INFINITY;
    for expansion in 0..=MAX_EXPANSIONS {
        let grid = evaluate_grid(potential, nu, &dom, grid_per_dim);
        let peak = grid.values.iter().cloned().fold(0.0, f64::max);
        ratio = boundary_max(&grid.values, &grid.shape) / peak;
        if ratio < TRUNCATION_RATIO {
            return Ok(grid);
        }
        if expansion < MAX_EXPANSIONS {
            dom = dom.scaled(EXPANSION_FACTOR);
        }
    }
    Err(Error::DomainTooSmall { ratio, expansions: MAX_EXPANSIONS })
}

fn evaluate_grid(potential: &PotentialSpec, nu: f64, domain: &BoxDomain, per_dim: usize) -> DensityGrid {
    let n = domain.dim();
    let shape = vec![per_dim; n];
    let total = per_dim.pow(n as u32);
    let mut grid = DensityGrid {
        domain: domain.clone(),
        shape,
        values: vec![0.0; total],
        cell_measure: 1.0,
        source: None,
    };
    grid.cell_measure = (0..n).map(|d| grid.spacing(d)).product();
    let exponents: Vec<f64> = (0..total).map(|k| -potential.value_unchecked(&grid.node(k)) / nu).collect();
    let shift = exponents.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for (v, e) in grid.values.iter_mut().zip(&exponents) {
        *v = (e - shift).exp();
    }
    let integral = grid.integral();
    let log_norm = -shift - integral.ln();
    for v in &mut grid.values {
        *v /= integral;
    }
    grid.source = Some(AnalyticSource { potential: potential.clone(), nu, log_norm });
    grid
}

/// Stationary density of a system: the effective potential and `nu~` for the
/// controlled kinds, `V` and `sigma^2 / 2` when uncontrolled.
pub fn stationary_density_for_system(
    sys: &SystemSpec,
    domain: &BoxDomain,
    grid_per_dim: usize,
) -> Result<DensityGrid> {
    let (potential, nu) = sys.stationary_parameters()?;
    stationary_density(&potential, nu, domain, grid_per_dim)
}

/// `C exp(-V(x)/nu)`.
pub fn density_at(potential: &PotentialSpec, nu: f64, x: &[f64], norm_const: f64) -> Result<f64> {
    Ok(norm_const * (-potential.value(x)? / nu).exp())
}

/// `max_{B(xa, eps)} V - min_{B(xb, eps)} V` over closed Euclidean balls.
pub fn delta_v(
    potential: &PotentialSpec,
    epsilon: f64,
    xa: &[f64],
    xb: &[f64],
    samples_per_ball: usize,
) -> Result<f64> {
    let n = potential.dim();
    check_dim(n, xa.len())?;
    check_dim(n, xb.len())?;
    if !(epsilon >= 0.0) {
        return Err(Error::invalid("epsilon must be >= 0"));
    }
    if dist_sq(xa, xb).sqrt() <= 2.0 * epsilon {
        return Err(Error::OverlappingBalls { epsilon });
    }
    if epsilon == 0.0 {
        return Ok(potential.value_unchecked(xa) - potential.value_unchecked(xb));
    }
    let hi = extremum_on_ball(potential, xa, epsilon, samples_per_ball, Sense::Max);
    let lo = extremum_on_ball(potential, xb, epsilon, samples_per_ball, Sense::Min);
    Ok(hi - lo)
}

#[derive(Clone, Copy, PartialEq)]
enum Sense {
    Max,
    Min,
}

impl Sense {
    fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Max => a > b,
            Sense::Min => a < b,
        }
    }
}

fn extremum_on_ball(p: &PotentialSpec, center: &[f64], eps: f64, samples: usize, sense: Sense) -> f64 {
    if center.len() == 1 {
        return extremum_on_interval(p, center[0] - eps, center[0] + eps, sense);
    }
    let (best_x, best) = lattice_extremum(p, center, eps, samples.max(16), sense);
    let polished = p.value_unchecked(&projected_polish(p, center, eps, &best_x, sense));
    if sense.better(polished, best) {
        polished
    } else {
        best
    }
}

/// Dense lattice including both endpoints, then golden-section refinement of
/// the best cell (which covers interior critical points and endpoint maxima).
fn extremum_on_interval(p: &PotentialSpec, lo: f64, hi: f64, sense: Sense) -> f64 {
    let m = BALL_SAMPLES_1D;
    let f = |x: f64| p.value_unchecked(&[x]);
    let node = |k: usize| lo + (hi - lo) * k as f64 / m as f64;
    let mut best_k = 0;
    let mut best = f(lo);
    for k in 1..=m {
        let v = f(node(k));
        if sense.better(v, best) {
            best = v;
            best_k = k;
        }
    }
    let a = node(best_k.saturating_sub(1));
    let b = node((best_k + 1).min(m));
    let refined = golden_section(|x| if sense == Sense::Max { -f(x) } else { f(x) }, a, b);
    let v = f(refined);
    if sense.better(v, best) {
        v
    } else {
        best
    }
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Square lattice clipped to the ball plus points on the bounding sphere.
fn lattice_extremum(p: &PotentialSpec, center: &[f64], eps: f64, samples: usize, sense: Sense) -> (Vec<f64>, f64) {
    let n = center.len();
    // the cube lattice keeps roughly the fraction pi/4 (2D) of its points
    let side = ((samples as f64 * 4.0 / std::f64::consts::PI).powf(1.0 / n as f64)).ceil() as usize;
    let side = side.max(3);
    let mut best_x = center.to_vec();
    let mut best = p.value_unchecked(center);
    let mut x = vec![0.0; n];
    let consider = |x: &[f64], best_x: &mut Vec<f64>, best: &mut f64| {
        let v = p.value_unchecked(x);
        if sense.better(v, *best) {
            *best = v;
            best_x.copy_from_slice(x);
        }
    };
    for flat in 0..side.pow(n as u32) {
        let mut rem = flat;
        for (d, xi) in x.iter_mut().enumerate() {
            let k = rem % side;
            rem /= side;
            *xi = center[d] - eps + 2.0 * eps * k as f64 / (side - 1) as f64;
        }
        if dist_sq(&x, center) <= eps * eps {
            consider(&x, &mut best_x, &mut best);
        }
    }
    if n == 2 {
        let ring = (samples as f64).sqrt().ceil() as usize * 4;
        for k in 0..ring {
            let th = std::f64::consts::TAU * k as f64 / ring as f64;
            x[0] = center[0] + eps * th.cos();
            x[1] = center[1] + eps * th.sin();
            consider(&x, &mut best_x, &mut best);
        }
    }
    (best_x, best)
}

/// Projected gradient steps with backtracking, staying inside the ball.
fn projected_polish(p: &PotentialSpec, center: &[f64], eps: f64, start: &[f64], sense: Sense) -> Vec<f64> {
    let n = center.len();
    let sign = if sense == Sense::Max { 1.0 } else { -1.0 };
    let project = |x: &mut [f64]| {
        let r = dist_sq(x, center).sqrt();
        if r > eps {
            for (xi, ci) in x.iter_mut().zip(center) {
                *xi = ci + (*xi - ci) * eps / r;
            }
        }
    };
    let mut x = start.to_vec();
    let mut fx = p.value_unchecked(&x);
    let mut g = vec![0.0; n];
    let mut trial = vec![0.0; n];
    let mut step = eps;
    for _ in 0..200 {
        p.gradient_into(&x, &mut g);
        let gn = crate::potentials::norm(&g);
        if gn == 0.0 {
            break;
        }
        let mut moved = false;
        while step > 1e-12 * eps {
            for i in 0..n {
                trial[i] = x[i] + sign * step * g[i] / gn;
            }
            project(&mut trial);
            let ft = p.value_unchecked(&trial);
            if sense.better(ft, fx) {
                x.copy_from_slice(&trial);
                fx = ft;
                moved = true;
                step *= 2.0;
                break;
            }
            step *= 0.5;
        }
        if !moved {
            break;
        }
    }
    x
}

/// Every ingredient of a transition-ratio bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Ball radius; 0 encodes the `eps -> 0` limit.
    pub epsilon: f64,
    pub delta_v: f64,
    pub beta: f64,
    pub nu_tilde: f64,
    pub min_dist_sq: f64,
    pub log_bound: f64,
    pub bound: f64,
}

fn bound_inputs(control: &ControlParams, sigma: f64) -> Result<(f64, f64)> {
    if !(control.alpha > 0.0) {
        return Err(Error::invalid("transition bounds need alpha > 0 (beta is undefined at alpha = 0)"));
    }
    let noise = effective_noise(control, sigma)?;
    Ok((noise.beta, noise.nu_tilde))
}

/// Upper bound on `Pr(|X - xb| <= eps) / Pr(|X - xa| <= eps)` under the
/// stationary density of the rescaled approximating SDE, with `xa = control.xa`.
pub fn transition_bound_eps(
    potential: &PotentialSpec,
    control: &ControlParams,
    sigma: f64,
    epsilon: f64,
    xb: &[f64],
) -> Result<BoundReport> {
    let (beta, nu_tilde) = bound_inputs(control, sigma)?;
    let xa = &control.xa;
    let dv = delta_v(potential, epsilon, xa, xb, DEFAULT_BALL_SAMPLES)?;
    let gap = (dist_sq(xa, xb).sqrt() - epsilon).max(0.0);
    let min_dist_sq = gap * gap;
    let b2 = beta * beta;
    let log_bound = dv / nu_tilde + epsilon * epsilon / b2 - min_dist_sq / b2;
    Ok(BoundReport { epsilon, delta_v: dv, beta, nu_tilde, min_dist_sq, log_bound, bound: log_bound.exp() })
}

/// The `eps -> 0` limit:
/// `exp{-(alpha (1 - alpha tau) / sigma^2) [(2 / alpha)(V(xb) - V(xa)) + |xb - xa|^2]}`.
pub fn transition_bound_limit(
    potential: &PotentialSpec,
    control: &ControlParams,
    sigma: f64,
    xb: &[f64],
) -> Result<BoundReport> {
    let (beta, nu_tilde) = bound_inputs(control, sigma)?;
    let xa = &control.xa;
    let va = potential.value(xa)?;
    let vb = potential.value(xb)?;
    let d2 = dist_sq(xa, xb);
    let alpha = control.alpha;
    let log_bound = -(alpha * (1.0 - control.alpha_tau()) / (sigma * sigma)) * ((2.0 / alpha) * (vb - va) + d2);
    Ok(BoundReport {
        epsilon: 0.0,
        delta_v: va - vb,
        beta,
        nu_tilde,
        min_dist_sq: d2,
        log_bound,
        bound: log_bound.exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::make_effective;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn dw() -> PotentialSpec {
        PotentialSpec::double_well()
    }

    fn ctl(alpha: f64, tau: f64) -> ControlParams {
        ControlParams::new(alpha, tau, vec![1.0]).unwrap()
    }

    #[test]
    fn gaussian_density_matches_closed_form() {
        let k = 2.0;
        let nu = 0.3;
        let p = PotentialSpec::quadratic(vec![0.0], k).unwrap();
        let g = stationary_density(&p, nu, &BoxDomain::cube(1, -3.0, 3.0).unwrap(), DEFAULT_NODES_1D).unwrap();
        let var = nu / k;
        for (i, v) in g.values.iter().enumerate() {
            let x = g.node(i)[0];
            let exact = (-x * x / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
            assert_relative_eq!(*v, exact, max_relative = 1e-8);
        }
        assert_abs_diff_eq!(g.integral(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn uncontrolled_double_well_peak_ratio() {
        let g = stationary_density(&dw(), 0.125, &BoxDomain::cube(1, -3.0, 3.0).unwrap(), DEFAULT_NODES_1D).unwrap();
        let src = g.source.as_ref().unwrap();
        let ratio = src.density(&[1.0]) / src.density(&[0.0]);
        assert_relative_eq!(ratio, 4f64.exp(), max_relative = 1e-12);
        assert_relative_eq!(src.density(&[1.0]), src.density(&[-1.0]), max_relative = 1e-15);
        let x = g.argmax()[0];
        assert!((x.abs() - 1.0).abs() <= g.spacing(0));
    }

    #[test]
    fn controlled_density_is_unimodal_near_xa() {
        let sys = SystemSpec::rescaled_sde(dw(), ctl(1.0, 0.1), crate::systems::DiffusionSpec::constant(0.5).unwrap())
            .unwrap();
        let g = stationary_density_for_system(&sys, &BoxDomain::cube(1, -3.0, 3.0).unwrap(), DEFAULT_NODES_1D).unwrap();
        assert_relative_eq!(g.source.as_ref().unwrap().nu, 0.25 / 1.8, max_relative = 1e-12);
        assert!((g.argmax()[0] - 1.0).abs() <= g.spacing(0));
        let local_max = (1..g.values.len() - 1)
            .filter(|&i| g.values[i] > g.values[i - 1] && g.values[i] >= g.values[i + 1])
            .count();
        assert_eq!(local_max, 1);
    }

    #[test]
    fn domain_auto_expands_and_caps() {
        let p = PotentialSpec::quadratic(vec![0.0], 1.0).unwrap();
        let g = stationary_density(&p, 0.5, &BoxDomain::cube(1, -1.0, 1.0).unwrap(), 501).unwrap();
        assert!(g.domain.width(0) > 2.0);
        assert_abs_diff_eq!(g.integral(), 1.0, epsilon = 1e-9);
        let err = stationary_density(&p, 500.0, &BoxDomain::cube(1, -1.0, 1.0).unwrap(), 101).unwrap_err();
        assert!(matches!(err, Error::DomainTooSmall { .. }));
    }

    #[test]
    fn density_at_consistency() {
        let g = stationary_density(&dw(), 0.125, &BoxDomain::cube(1, -3.0, 3.0).unwrap(), 601).unwrap();
        let c = g.source.as_ref().unwrap().norm_const();
        for k in [0, 17, 300, 599] {
            let x = g.node(k);
            assert_relative_eq!(density_at(&dw(), 0.125, &x, c).unwrap(), g.values[k], max_relative = 1e-12);
        }
        let r1 = density_at(&dw(), 0.125, &[0.3], 1.0).unwrap() / density_at(&dw(), 0.125, &[0.8], 1.0).unwrap();
        let r2 = density_at(&dw(), 0.125, &[0.3], 7.0).unwrap() / density_at(&dw(), 0.125, &[0.8], 7.0).unwrap();
        assert_relative_eq!(r1, r2, max_relative = 1e-14);
    }

    #[test]
    fn state_dependent_noise_rejected() {
        use crate::systems::{DiffusionSpec, StateDiffusion};
        let sys = SystemSpec::uncontrolled(
            dw(),
            DiffusionSpec::StateDependent(StateDiffusion::Affine { sigma0: 0.5, sigma1: 0.1 }),
        )
        .unwrap();
        let err = stationary_density_for_system(&sys, &BoxDomain::cube(1, -3.0, 3.0).unwrap(), 101).unwrap_err();
        assert!(matches!(err, Error::RequiresConstantDiffusion));
    }

    #[test]
    fn delta_v_examples() {
        assert_abs_diff_eq!(delta_v(&dw(), 0.0, &[1.0], &[-1.0], 100).unwrap(), 0.0, epsilon = 1e-15);
        let p2 = PotentialSpec::tilted_duffing_default();
        let d = delta_v(&p2, 0.0, &[0.5, 0.25], &[-0.5254, 0.2760], 100).unwrap();
        assert_abs_diff_eq!(d, 0.020520, epsilon = 2e-6);
        // V rises on both sides of the well bottom, so the max over [0.9, 1.1] sits at 1.1
        let d1 = delta_v(&dw(), 0.1, &[1.0], &[-1.0], 100).unwrap();
        let v = |x: f64| -x * x + 0.5 * x.powi(4);
        assert!(v(1.1) > v(0.9));
        assert_abs_diff_eq!(d1, v(1.1) - v(-1.0), epsilon = 1e-12);
        assert_abs_diff_eq!(d1, 0.02205, epsilon = 1e-12);
        assert!(matches!(delta_v(&dw(), 1.0, &[1.0], &[-1.0], 100), Err(Error::OverlappingBalls { .. })));
    }

    #[test]
    fn delta_v_2d_matches_fine_polar_scan() {
        let p = PotentialSpec::tilted_duffing_default();
        let (xa, xb, eps) = ([0.5, 0.25], [-0.5254, 0.2760], 0.1);
        let got = delta_v(&p, eps, &xa, &xb, DEFAULT_BALL_SAMPLES).unwrap();
        let scan = |c: &[f64; 2], max: bool| {
            let mut best = if max { f64::NEG_INFINITY } else { f64::INFINITY };
            for i in 0..=400 {
                for k in 0..2000 {
                    let r = eps * i as f64 / 400.0;
                    let th = std::f64::consts::TAU * k as f64 / 2000.0;
                    let v = p.value(&[c[0] + r * th.cos(), c[1] + r * th.sin()]).unwrap();
                    best = if max { best.max(v) } else { best.min(v) };
                }
            }
            best
        };
        let oracle = scan(&xa, true) - scan(&xb, false);
        assert!(got >= oracle - 1e-9, "got {got}, oracle {oracle}");
        assert_abs_diff_eq!(got, oracle, epsilon = 1e-6);
    }

    #[test]
    fn bound_examples_1d() {
        let lim = transition_bound_limit(&dw(), &ctl(1.0, 0.1), 0.5, &[-1.0]).unwrap();
        assert_relative_eq!(lim.log_bound, -14.4, max_relative = 1e-12);
        assert_relative_eq!(lim.bound, 5.57e-7, max_relative = 2e-3);

        let eps = transition_bound_eps(&dw(), &ctl(1.0, 0.1), 0.5, 0.1, &[-1.0]).unwrap();
        assert_relative_eq!(eps.min_dist_sq, 3.61, max_relative = 1e-12);
        assert_relative_eq!(eps.beta * eps.beta, 0.25 / 0.9, max_relative = 1e-12);
        assert_relative_eq!(eps.log_bound, 0.02205 * 7.2 + (0.01 - 3.61) * 3.6, max_relative = 1e-9);
        assert_relative_eq!(eps.bound, 2.757e-6, max_relative = 1e-3);
    }

    #[test]
    fn eps_bound_tends_to_limit() {
        let lim = transition_bound_limit(&dw(), &ctl(0.7, 0.2), 0.4, &[-1.0]).unwrap();
        let e0 = transition_bound_eps(&dw(), &ctl(0.7, 0.2), 0.4, 0.0, &[-1.0]).unwrap();
        assert_relative_eq!(e0.log_bound, lim.log_bound, max_relative = 1e-12);
        let tiny = transition_bound_eps(&dw(), &ctl(0.7, 0.2), 0.4, 1e-7, &[-1.0]).unwrap();
        assert_relative_eq!(tiny.log_bound, lim.log_bound, max_relative = 1e-5);
    }

    #[test]
    fn symmetric_limit_reduces_to_distance_term() {
        let lim = transition_bound_limit(&dw(), &ctl(0.8, 0.3), 0.6, &[-1.0]).unwrap();
        assert_relative_eq!(lim.log_bound, -0.8 * (1.0 - 0.24) * 4.0 / 0.36, max_relative = 1e-12);
    }

    #[test]
    fn bound_errors() {
        assert!(transition_bound_limit(&dw(), &ctl(0.0, 0.1), 0.5, &[-1.0]).is_err());
        assert!(matches!(
            transition_bound_limit(&dw(), &ctl(20.0, 0.1), 0.5, &[-1.0]),
            Err(Error::GainDelayTooLarge { .. })
        ));
        assert!(transition_bound_eps(&dw(), &ctl(0.0, 0.1), 0.5, 0.1, &[-1.0]).is_err());
    }

    #[test]
    fn effective_identity_holds_at_alpha_zero() {
        let e = make_effective(&dw(), 0.0, &[1.0]).unwrap();
        let dom = BoxDomain::cube(1, -3.0, 3.0).unwrap();
        let a = stationary_density(&e, 0.125, &dom, 501).unwrap();
        let b = stationary_density(&dw(), 0.125, &dom, 501).unwrap();
        assert_eq!(a.values, b.values);
    }
}
