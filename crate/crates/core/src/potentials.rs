//! Analytic potential families, the effective potential, and critical-point analysis.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Gradient-norm threshold for accepting a Newton root.
pub const NEWTON_TOL: f64 = 1e-10;
pub const NEWTON_MAX_ITER: usize = 50;
/// Critical points closer than this are merged.
pub const DEDUP_TOL: f64 = 1e-6;
/// Relative eigenvalue magnitude below which a Hessian is treated as singular.
pub const DEGENERACY_TOL: f64 = 1e-6;

/// Axis-aligned box in `R^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxDomain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl BoxDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        check_dim(lo.len(), hi.len())?;
        if lo.is_empty() {
            return Err(Error::invalid("domain must have at least one dimension"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h) || !l.is_finite() || !h.is_finite()) {
            return Err(Error::invalid("domain box is empty or non-finite"));
        }
        Ok(Self { lo, hi })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn width(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn contains(&self, x: &[f64], slack: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= l - slack && *v <= h + slack)
    }

    /// Scales every side by `factor` about the box center.
    pub fn scaled(&self, factor: f64) -> Self {
        let (lo, hi) = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let c = 0.5 * (l + h);
                let r = 0.5 * (h - l) * factor;
                (c - r, c + r)
            })
            .unzip();
        Self { lo, hi }
    }
}

/// Closed family of analytic potentials.
///
/// Serialized as a `family` tag plus a flat parameter map; parameters are
/// validated on deserialization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PotentialRepr", into = "PotentialRepr")]
pub enum PotentialSpec {
    /// `V(x) = a x^2 + b x^4`.
    Quartic1D { a: f64, b: f64 },
    /// `V(x, y) = a0 x^4 - a1 x^2 + a2 y^2 - a3 x^2 y - a4 (x - x0)^2`.
    TiltedDuffing2D {
        a0: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        x0: f64,
    },
    /// `V(x) = stiffness |x - center|^2 / 2`.
    QuadraticND { center: Vec<f64>, stiffness: f64 },
    /// `V(x) + alpha |x - xa|^2 / 2`.
    Effective {
        base: Box<PotentialSpec>,
        alpha: f64,
        xa: Vec<f64>,
    },
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
enum PotentialRepr {
    Quartic1d {
        a: f64,
        b: f64,
    },
    TiltedDuffing2d {
        a0: f64,
        a1: f64,
        a2: f64,
        a3: f64,
        a4: f64,
        x0: f64,
    },
    QuadraticNd {
        center: Vec<f64>,
        stiffness: f64,
    },
    Effective {
        base: Box<PotentialSpec>,
        alpha: f64,
        xa: Vec<f64>,
    },
}

impl TryFrom<PotentialRepr> for PotentialSpec {
    type Error = Error;

    fn try_from(r: PotentialRepr) -> Result<Self> {
        match r {
            PotentialRepr::Quartic1d { a, b } => Self::quartic(a, b),
            PotentialRepr::TiltedDuffing2d { a0, a1, a2, a3, a4, x0 } => {
                Self::tilted_duffing(a0, a1, a2, a3, a4, x0)
            }
            PotentialRepr::QuadraticNd { center, stiffness } => Self::quadratic(center, stiffness),
            PotentialRepr::Effective { base, alpha, xa } => make_effective(&base, alpha, &xa),
        }
    }
}

impl From<PotentialSpec> for PotentialRepr {
    fn from(p: PotentialSpec) -> Self {
        match p {
            PotentialSpec::Quartic1D { a, b } => PotentialRepr::Quartic1d { a, b },
            PotentialSpec::TiltedDuffing2D { a0, a1, a2, a3, a4, x0 } => {
                PotentialRepr::TiltedDuffing2d { a0, a1, a2, a3, a4, x0 }
            }
            PotentialSpec::QuadraticND { center, stiffness } => {
                PotentialRepr::QuadraticNd { center, stiffness }
            }
            PotentialSpec::Effective { base, alpha, xa } => PotentialRepr::Effective { base, alpha, xa },
        }
    }
}

impl PotentialSpec {
    pub fn quartic(a: f64, b: f64) -> Result<Self> {
        if !(b > 0.0) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!(
                "quartic potential needs finite a and b > 0 (got a = {a}, b = {b})"
            )));
        }
        Ok(Self::Quartic1D { a, b })
    }

    /// The symmetric double well with minima at +-1: `a = -1`, `b = 1/2`.
    pub fn double_well() -> Self {
        Self::Quartic1D { a: -1.0, b: 0.5 }
    }

    pub fn tilted_duffing(a0: f64, a1: f64, a2: f64, a3: f64, a4: f64, x0: f64) -> Result<Self> {
        let finite = [a0, a1, a2, a3, a4, x0].iter().all(|v| v.is_finite());
        // Eliminating y leaves a leading x^4 coefficient a0 - a3^2 / (4 a2).
        if !finite || !(a0 > 0.0) || !(a2 > 0.0) || !(4.0 * a0 * a2 > a3 * a3) {
            return Err(Error::invalid(
                "tilted Duffing potential is unbounded below (need a0 > 0, a2 > 0, 4 a0 a2 > a3^2)",
            ));
        }
        Ok(Self::TiltedDuffing2D { a0, a1, a2, a3, a4, x0 })
    }

    /// Two-well potential with the shallower well at `(1/2, 1/4)`.
    pub fn tilted_duffing_default() -> Self {
        let (a0, a1, a2): (f64, f64, f64) = (1.0, 3.0 / 8.0, 0.25);
        let a3 = (4.0 * a2 * (a0 - 2.0 * a1)).sqrt();
        let x0 = (2.0 * a1 * a2 / (4.0 * a0 * a2 - a3 * a3)).sqrt();
        Self::TiltedDuffing2D { a0, a1, a2, a3, a4: 0.02, x0 }
    }

    pub fn quadratic(center: Vec<f64>, stiffness: f64) -> Result<Self> {
        if center.is_empty() || !(stiffness > 0.0) || center.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("quadratic potential needs a non-empty center and stiffness > 0"));
        }
        Ok(Self::QuadraticND { center, stiffness })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Quartic1D { .. } => 1,
            Self::TiltedDuffing2D { .. } => 2,
            Self::QuadraticND { center, .. } => center.len(),
            Self::Effective { base, .. } => base.dim(),
        }
    }

    /// Potential with any effective-potential wrappers removed.
    pub fn base(&self) -> &PotentialSpec {
        match self {
            Self::Effective { base, .. } => base.base(),
            p => p,
        }
    }

    pub fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x.len())?;
        Ok(self.value_unchecked(x))
    }

    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let mut g = vec![0.0; x.len()];
        self.gradient_into(x, &mut g);
        Ok(g)
    }

    pub(crate) fn value_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Self::Quartic1D { a, b } => {
                let x2 = x[0] * x[0];
                a * x2 + b * x2 * x2
            }
            Self::TiltedDuffing2D { a0, a1, a2, a3, a4, x0 } => {
                let (u, v) = (x[0], x[1]);
                let u2 = u * u;
                let du = u - x0;
                a0 * u2 * u2 - a1 * u2 + a2 * v * v - a3 * u2 * v - a4 * du * du
            }
            Self::QuadraticND { center, stiffness } => 0.5 * stiffness * dist_sq(x, center),
            Self::Effective { base, alpha, xa } => {
                base.value_unchecked(x) + 0.5 * alpha * dist_sq(x, xa)
            }
        }
    }

    /// Writes `grad V(x)` into `out`; lengths are the caller's responsibility.
    pub(crate) fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Quartic1D { a, b } => {
                let u = x[0];
                out[0] = 2.0 * a * u + 4.0 * b * u * u * u;
            }
            Self::TiltedDuffing2D { a0, a1, a2, a3, a4, x0 } => {
                let (u, v) = (x[0], x[1]);
                out[0] = 4.0 * a0 * u * u * u - 2.0 * a1 * u - 2.0 * a3 * u * v - 2.0 * a4 * (u - x0);
                out[1] = 2.0 * a2 * v - a3 * u * u;
            }
            Self::QuadraticND { center, stiffness } => {
                for ((o, xi), ci) in out.iter_mut().zip(x).zip(center) {
                    *o = stiffness * (xi - ci);
                }
            }
            Self::Effective { base, alpha, xa } => {
                base.gradient_into(x, out);
                for ((o, xi), ai) in out.iter_mut().zip(x).zip(xa) {
                    *o += alpha * (xi - ai);
                }
            }
        }
    }

    /// Hessian by central differences of the analytic gradient.
    pub fn hessian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.hessian_unchecked(x))
    }

    fn hessian_unchecked(&self, x: &[f64]) -> DMatrix<f64> {
        let n = x.len();
        let mut h = DMatrix::zeros(n, n);
        let mut xp = x.to_vec();
        let mut gp = vec![0.0; n];
        let mut gm = vec![0.0; n];
        for j in 0..n {
            let step = 1e-5 * x[j].abs().max(1.0);
            xp[j] = x[j] + step;
            self.gradient_into(&xp, &mut gp);
            xp[j] = x[j] - step;
            self.gradient_into(&xp, &mut gm);
            xp[j] = x[j];
            for i in 0..n {
                h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        // symmetrize
        let ht = h.transpose();
        (h + ht) * 0.5
    }
}

pub(crate) fn dist_sq(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum()
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn potential_value(p: &PotentialSpec, x: &[f64]) -> Result<f64> {
    p.value(x)
}

pub fn potential_gradient(p: &PotentialSpec, x: &[f64]) -> Result<Vec<f64>> {
    p.gradient(x)
}

/// Wraps `base` into the effective potential `V(x) + alpha |x - xa|^2 / 2`.
pub fn make_effective(base: &PotentialSpec, alpha: f64, xa: &[f64]) -> Result<PotentialSpec> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("control gain must be >= 0, got {alpha}")));
    }
    check_dim(base.dim(), xa.len())?;
    Ok(PotentialSpec::Effective {
        base: Box::new(base.clone()),
        alpha,
        xa: xa.to_vec(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalKind {
    Minimum,
    Maximum,
    Saddle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalPoint {
    pub location: Vec<f64>,
    pub kind: CriticalKind,
    pub potential_value: f64,
    /// Hessian was numerically singular; `kind` is then `Saddle`.
    pub degenerate: bool,
}

/// Locates the critical points of `p` inside `domain`.
///
/// Newton iterations on `grad V = 0` are seeded from grid nodes where the
/// gradient norm is a discrete local minimum. Roots are deduplicated and
/// classified by the eigenvalue signs of the finite-difference Hessian.
pub fn find_critical_points(
    p: &PotentialSpec,
    domain: &BoxDomain,
    grid_per_dim: usize,
) -> Result<Vec<CriticalPoint>> {
    let n = p.dim();
    check_dim(n, domain.dim())?;
    if grid_per_dim < 8 {
        return Err(Error::invalid(format!("grid_per_dim must be >= 8, got {grid_per_dim}")));
    }

    let total = grid_per_dim
        .checked_pow(n as u32)
        .ok_or_else(|| Error::invalid("critical-point grid too large"))?;
    let node = |flat: usize, out: &mut [f64]| {
        let mut rem = flat;
        for (d, o) in out.iter_mut().enumerate() {
            let k = rem % grid_per_dim;
            rem /= grid_per_dim;
            *o = domain.lo[d] + domain.width(d) * k as f64 / (grid_per_dim - 1) as f64;
        }
    };

    let mut gnorm = vec![0.0; total];
    let mut x = vec![0.0; n];
    let mut g = vec![0.0; n];
    for (flat, gn) in gnorm.iter_mut().enumerate() {
        node(flat, &mut x);
        p.gradient_into(&x, &mut g);
        *gn = norm(&g);
    }

    let mut found: Vec<CriticalPoint> = Vec::new();
    let offsets = neighbor_offsets(n);
    for flat in 0..total {
        if !is_local_min(&gnorm, flat, grid_per_dim, n, &offsets) {
            continue;
        }
        node(flat, &mut x);
        let Some(root) = newton_root(p, &x) else { continue };
        if !domain.contains(&root, 1e-9) {
            continue;
        }
        if found.iter().any(|c| dist_sq(&c.location, &root).sqrt() < DEDUP_TOL) {
            continue;
        }
        found.push(classify(p, root));
    }
    found.sort_by(|a, b| a.location.partial_cmp(&b.location).unwrap_or(std::cmp::Ordering::Equal));
    Ok(found)
}

/// True iff exactly one minimum is found and no degenerate critical point exists.
///
/// A degenerate critical point marks the bifurcation where a second well is
/// about to appear, so it is not counted as unimodal.
pub fn is_unimodal(p: &PotentialSpec, domain: &BoxDomain, grid_per_dim: usize) -> Result<bool> {
    let cps = find_critical_points(p, domain, grid_per_dim)?;
    let minima = cps.iter().filter(|c| c.kind == CriticalKind::Minimum).count();
    Ok(minima == 1 && !cps.iter().any(|c| c.degenerate))
}

/// The local minimum nearest to `guess` within the cube of half-width `radius`.
pub fn nearest_minimum(p: &PotentialSpec, guess: &[f64], radius: f64) -> Result<Vec<f64>> {
    check_dim(p.dim(), guess.len())?;
    let domain = BoxDomain::new(
        guess.iter().map(|g| g - radius).collect(),
        guess.iter().map(|g| g + radius).collect(),
    )?;
    find_critical_points(p, &domain, 16)?
        .into_iter()
        .filter(|c| c.kind == CriticalKind::Minimum)
        .min_by(|a, b| dist_sq(&a.location, guess).total_cmp(&dist_sq(&b.location, guess)))
        .map(|c| c.location)
        .ok_or_else(|| Error::invalid("no local minimum near the given point"))
}

fn neighbor_offsets(n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|v| {
                (-1..=1).map(move |d| {
                    let mut w = v.clone();
                    w.push(d);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.iter().any(|&d| d != 0));
    out
}

fn is_local_min(values: &[f64], flat: usize, per_dim: usize, n: usize, offsets: &[Vec<i64>]) -> bool {
    let mut idx = vec![0i64; n];
    let mut rem = flat;
    for i in idx.iter_mut() {
        *i = (rem % per_dim) as i64;
        rem /= per_dim;
    }
    let v = values[flat];
    offsets.iter().all(|off| {
        let mut nb = 0usize;
        let mut stride = 1usize;
        for d in 0..n {
            let k = idx[d] + off[d];
            if k < 0 || k >= per_dim as i64 {
                return true;
            }
            nb += k as usize * stride;
            stride *= per_dim;
        }
        v <= values[nb]
    })
}

/// Damped Newton on the gradient. Keeps polishing while `|grad|` decreases so
/// that roots of higher multiplicity are approached as closely as possible.
fn newton_root(p: &PotentialSpec, start: &[f64]) -> Option<Vec<f64>> {
    let n = start.len();
    let mut x = start.to_vec();
    let mut g = vec![0.0; n];
    p.gradient_into(&x, &mut g);
    let mut gn = norm(&g);
    let mut trial = vec![0.0; n];
    let mut gt = vec![0.0; n];
    for _ in 0..NEWTON_MAX_ITER {
        if gn == 0.0 {
            break;
        }
        let h = p.hessian_unchecked(&x);
        let rhs = DVector::from_iterator(n, g.iter().map(|v| -v));
        let dir = match h.lu().solve(&rhs) {
            Some(d) if d.iter().all(|v| v.is_finite()) => d,
            _ => rhs,
        };
        let mut lambda = 1.0;
        let mut improved = false;
        for _ in 0..30 {
            for i in 0..n {
                trial[i] = x[i] + lambda * dir[i];
            }
            p.gradient_into(&trial, &mut gt);
            let tn = norm(&gt);
            if tn < gn {
                x.copy_from_slice(&trial);
                g.copy_from_slice(&gt);
                gn = tn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (gn < NEWTON_TOL).then_some(x)
}

fn classify(p: &PotentialSpec, location: Vec<f64>) -> CriticalPoint {
    let h = p.hessian_unchecked(&location);
    let eig = SymmetricEigen::new(h).eigenvalues;
    let scale = eig.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
    let degenerate = eig.iter().any(|v| v.abs() < DEGENERACY_TOL * scale);
    let kind = if degenerate {
        CriticalKind::Saddle
    } else if eig.iter().all(|&v| v > 0.0) {
        CriticalKind::Minimum
    } else if eig.iter().all(|&v| v < 0.0) {
        CriticalKind::Maximum
    } else {
        CriticalKind::Saddle
    };
    let potential_value = p.value_unchecked(&location);
    CriticalPoint { location, kind, potential_value, degenerate }
}
