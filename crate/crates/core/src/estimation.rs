//! Empirical statistics of ensembles: histograms, modality, occupancy near an
//! equilibrium and transition ratios.

use rayon::prelude::*;
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::analysis::DensityGrid;
use crate::engine::Ensemble;
use crate::error::{check_dim, Error, Result};
use crate::potentials::{dist_sq, BoxDomain};

pub const DEFAULT_BURN_IN: f64 = 0.1;
pub const DEFAULT_BINS_1D: usize = 100;
pub const DEFAULT_BINS_2D: usize = 100;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_SMOOTHING_WINDOW: usize = 5;
pub const DEFAULT_PROMINENCE: f64 = 0.05;
/// Relative padding added to each side of the data range for auto-fitted domains.
pub const AUTO_PADDING: f64 = 0.05;
/// One-sided 95% upper limit on a zero count, in units of `1 / N_eff`.
pub const ZERO_COUNT_UPPER: f64 = 3.0;

/// Post-burn-in recorded states, one flat slice per trajectory.
#[derive(Debug, Clone)]
pub struct SamplePool<'a> {
    pub dim: usize,
    pub chunks: Vec<&'a [f64]>,
    pub burn_in_discarded: usize,
}

impl<'a> SamplePool<'a> {
    /// Drops the first `floor(burn_in_fraction * len)` records of every trajectory.
    pub fn from_ensemble(ens: &'a Ensemble, burn_in_fraction: f64) -> Result<Self> {
        check_burn_in(burn_in_fraction)?;
        let dim = ens.dim();
        let mut discarded = 0;
        let chunks = ens
            .trajectories
            .iter()
            .map(|t| {
                let skip = (burn_in_fraction * t.len() as f64).floor() as usize;
                discarded += skip;
                &t.states[skip * dim..]
            })
            .collect();
        let pool = SamplePool { dim, chunks, burn_in_discarded: discarded };
        if pool.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(pool)
    }

    /// A single chain of flat samples with no burn-in.
    pub fn from_flat(dim: usize, samples: &'a [f64]) -> Result<Self> {
        if dim == 0 || !samples.len().is_multiple_of(dim) {
            return Err(Error::invalid("flat sample buffer is not a whole number of states"));
        }
        if samples.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        Ok(SamplePool { dim, chunks: vec![samples], burn_in_discarded: 0 })
    }

    pub fn len(&self) -> usize {
        self.chunks.iter().map(|c| c.len() / self.dim).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn states(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.chunks.iter().flat_map(move |c| c.chunks_exact(self.dim))
    }

    /// Data range padded by 5% of its width on each side.
    pub fn auto_domain(&self) -> Result<BoxDomain> {
        let n = self.dim;
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for x in self.states() {
            for d in 0..n {
                lo[d] = lo[d].min(x[d]);
                hi[d] = hi[d].max(x[d]);
            }
        }
        for d in 0..n {
            let width = hi[d] - lo[d];
            let pad = if width > 0.0 { AUTO_PADDING * width } else { 0.5 * lo[d].abs().max(1.0) * AUTO_PADDING };
            lo[d] -= pad;
            hi[d] += pad;
        }
        BoxDomain::new(lo, hi)
    }
}

fn check_burn_in(f: f64) -> Result<()> {
    if (0.0..1.0).contains(&f) {
        Ok(())
    } else {
        Err(Error::invalid(format!("burn_in_fraction must lie in [0, 1), got {f}")))
    }
}

/// Uniform-bin histogram normalized to a density. Bin `(i0, i1)` is stored at
/// `i0 + bins[0] * i1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub domain: BoxDomain,
    pub bins: Vec<usize>,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    /// Post-burn-in samples considered, including those outside the domain.
    pub total_samples: usize,
    pub burn_in_discarded: usize,
    pub out_of_domain: usize,
}

impl Histogram {
    pub fn dim(&self) -> usize {
        self.bins.len()
    }

    pub fn bin_width(&self, axis: usize) -> f64 {
        self.domain.width(axis) / self.bins[axis] as f64
    }

    pub fn bin_measure(&self) -> f64 {
        (0..self.dim()).map(|d| self.bin_width(d)).product()
    }

    pub fn bin_center(&self, flat: usize) -> Vec<f64> {
        let mut rem = flat;
        (0..self.dim())
            .map(|d| {
                let k = rem % self.bins[d];
                rem /= self.bins[d];
                self.domain.lo[d] + (k as f64 + 0.5) * self.bin_width(d)
            })
            .collect()
    }

    fn bin_index(&self, x: &[f64]) -> Option<usize> {
        let mut flat = 0;
        let mut stride = 1;
        for (d, &xd) in x.iter().enumerate().take(self.dim()) {
            let (lo, hi) = (self.domain.lo[d], self.domain.hi[d]);
            if !(xd >= lo && xd <= hi) {
                return None;
            }
            let k = (((xd - lo) / self.bin_width(d)) as usize).min(self.bins[d] - 1);
            flat += k * stride;
            stride *= self.bins[d];
        }
        Some(flat)
    }

    /// Center of the fullest bin.
    pub fn mode(&self) -> Vec<f64> {
        let k = self
            .counts
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
            .map_or(0, |(k, _)| k);
        self.bin_center(k)
    }
}

/// Pools all post-burn-in states of `ens` into an auto-fitted histogram.
pub fn histogram_pdf(ens: &Ensemble, bins_per_dim: usize, burn_in_fraction: f64) -> Result<Histogram> {
    histogram_pdf_in(ens, bins_per_dim, burn_in_fraction, None)
}

/// As [`histogram_pdf`] with an optional caller-fixed domain.
pub fn histogram_pdf_in(
    ens: &Ensemble,
    bins_per_dim: usize,
    burn_in_fraction: f64,
    domain: Option<&BoxDomain>,
) -> Result<Histogram> {
    histogram_from_pool(&SamplePool::from_ensemble(ens, burn_in_fraction)?, bins_per_dim, domain)
}

pub fn histogram_from_pool(pool: &SamplePool<'_>, bins_per_dim: usize, domain: Option<&BoxDomain>) -> Result<Histogram> {
    if bins_per_dim == 0 {
        return Err(Error::invalid("histogram needs at least one bin per axis"));
    }
    if pool.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let domain = match domain {
        Some(d) => {
            check_dim(pool.dim, d.dim())?;
            d.clone()
        }
        None => pool.auto_domain()?,
    };
    let bins = vec![bins_per_dim; pool.dim];
    let total_bins = bins.iter().product();
    let mut hist = Histogram {
        domain,
        bins,
        counts: vec![0; total_bins],
        density: vec![0.0; total_bins],
        total_samples: pool.len(),
        burn_in_discarded: pool.burn_in_discarded,
        out_of_domain: 0,
    };
    let dim = pool.dim;
    // per-chain shards merged by integer addition, so order never matters
    let (counts, outside) = pool
        .chunks
        .par_iter()
        .map(|chunk| {
            let mut c = vec![0u64; total_bins];
            let mut out = 0usize;
            for x in chunk.chunks_exact(dim) {
                match hist.bin_index(x) {
                    Some(k) => c[k] += 1,
                    None => out += 1,
                }
            }
            (c, out)
        })
        .reduce(
            || (vec![0u64; total_bins], 0),
            |(mut a, oa), (b, ob)| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                (a, oa + ob)
            },
        );
    hist.counts = counts;
    hist.out_of_domain = outside;
    let inside = hist.total_samples - outside;
    if inside == 0 {
        return Err(Error::NoSamplesInDomain(hist.total_samples));
    }
    let norm = inside as f64 * hist.bin_measure();
    for (d, c) in hist.density.iter_mut().zip(&hist.counts) {
        *d = *c as f64 / norm;
    }
    Ok(hist)
}

/// `sum_k |h_k - g(c_k)| * bin_measure` with `g` re-evaluated at the bin
/// centers, plus the analytic mass that falls outside the histogram domain.
pub fn l1_distance(h: &Histogram, g: &DensityGrid) -> Result<f64> {
    check_dim(h.dim(), g.dim())?;
    let src = g.source.as_ref().ok_or(Error::NotAnalytic)?;
    l1_against(h, |x| src.density(x))
}

/// L1 distance between a histogram and any normalized density.
pub fn l1_against(h: &Histogram, density: impl Fn(&[f64]) -> f64 + Sync) -> Result<f64> {
    let m = h.bin_measure();
    let (diff, mass) = (0..h.density.len())
        .into_par_iter()
        .map(|k| {
            let g = density(&h.bin_center(k));
            ((h.density[k] - g).abs(), g)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(diff * m + (1.0 - mass * m).max(0.0))
}

/// L1 distance between two histograms on the same bins.
pub fn l1_between(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.bins != b.bins || a.domain != b.domain {
        return Err(Error::invalid("histograms must share domain and bins"));
    }
    let m = a.bin_measure();
    Ok(a.density.iter().zip(&b.density).map(|(x, y)| (x - y).abs()).sum::<f64>() * m)
}

/// Number of local maxima, after a centered moving average of `smoothing_window`
/// bins along each axis, whose topographic prominence exceeds
/// `prominence_fraction` of the global maximum. 2D maxima use 8-neighborhoods.
pub fn modality_count(h: &Histogram, smoothing_window: usize, prominence_fraction: f64) -> Result<usize> {
    if !(1..=2).contains(&h.dim()) {
        return Err(Error::invalid("modality is defined for 1D and 2D histograms"));
    }
    if h.density.iter().all(|&v| v == 0.0) {
        return Err(Error::DegenerateHistogram);
    }
    let mut field = h.density.clone();
    for axis in 0..h.dim() {
        field = smooth_axis(&field, &h.bins, axis, smoothing_window.max(1));
    }
    let peaks = prominences(&field, &h.bins);
    let top = field.iter().cloned().fold(0.0, f64::max);
    Ok(peaks.iter().filter(|&&p| p > prominence_fraction * top).count())
}

fn smooth_axis(values: &[f64], shape: &[usize], axis: usize, window: usize) -> Vec<f64> {
    let half = (window / 2) as isize;
    let stride: usize = shape[..axis].iter().product();
    let len = shape[axis] as isize;
    let mut out = vec![0.0; values.len()];
    for (flat, o) in out.iter_mut().enumerate() {
        let k = ((flat / stride) % shape[axis]) as isize;
        let base = flat as isize - k * stride as isize;
        let (lo, hi) = ((k - half).max(0), (k + half).min(len - 1));
        let sum: f64 = (lo..=hi).map(|j| values[(base + j * stride as isize) as usize]).sum();
        *o = sum / (hi - lo + 1) as f64;
    }
    out
}

fn neighbors(flat: usize, shape: &[usize]) -> Vec<usize> {
    let n = shape.len();
    let mut coord = Vec::with_capacity(n);
    let mut rem = flat;
    for &s in shape {
        coord.push((rem % s) as isize);
        rem /= s;
    }
    let mut out = Vec::new();
    for code in 0..3usize.pow(n as u32) {
        let mut c = code;
        let mut idx = 0usize;
        let mut stride = 1usize;
        let mut zero = true;
        let mut valid = true;
        for d in 0..n {
            let off = (c % 3) as isize - 1;
            c /= 3;
            zero &= off == 0;
            let v = coord[d] + off;
            if v < 0 || v >= shape[d] as isize {
                valid = false;
                break;
            }
            idx += v as usize * stride;
            stride *= shape[d];
        }
        if valid && !zero {
            out.push(idx);
        }
    }
    out
}

/// Prominence of every peak, by descending flood fill with union-find. The
/// global maximum gets its own height.
fn prominences(field: &[f64], shape: &[usize]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..field.len()).collect();
    order.sort_by(|&a, &b| field[b].total_cmp(&field[a]).then(a.cmp(&b)));
    let mut parent: Vec<usize> = vec![usize::MAX; field.len()];
    let mut peak_of = vec![0usize; field.len()];
    let mut result = Vec::new();

    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }

    for &cell in &order {
        let level = field[cell];
        let mut roots = Vec::new();
        for nb in neighbors(cell, shape) {
            if parent[nb] != usize::MAX {
                roots.push(find(&mut parent, nb));
            }
        }
        roots.sort_unstable();
        roots.dedup();
        parent[cell] = cell;
        peak_of[cell] = cell;
        if roots.is_empty() {
            continue;
        }
        // the highest peak survives; the others die at this level
        roots.sort_by(|&a, &b| field[peak_of[b]].total_cmp(&field[peak_of[a]]).then(peak_of[a].cmp(&peak_of[b])));
        let keep = roots[0];
        for &r in &roots[1..] {
            result.push(field[peak_of[r]] - level);
            parent[r] = keep;
        }
        parent[cell] = keep;
    }
    let top = order.first().map_or(0.0, |&k| field[k]);
    result.push(top);
    result
}

/// Counts of samples inside the closed ball `|x - center| <= epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OccupancyEstimate {
    pub center: Vec<f64>,
    pub epsilon: f64,
    pub hits: usize,
    pub samples: usize,
    pub fraction: f64,
    /// Integrated autocorrelation time of the indicator series, in records.
    pub tau_int: f64,
    pub n_eff: f64,
    pub std_error: f64,
}

fn check_eps(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")))
    }
}

/// Fraction of post-burn-in samples within `epsilon` of `center`.
pub fn occupancy_fraction(ens: &Ensemble, center: &[f64], epsilon: f64, burn_in_fraction: f64) -> Result<f64> {
    let pool = SamplePool::from_ensemble(ens, burn_in_fraction)?;
    occupancy_in_pool(&pool, center, epsilon).map(|(hits, n)| hits as f64 / n as f64)
}

fn occupancy_in_pool(pool: &SamplePool<'_>, center: &[f64], epsilon: f64) -> Result<(usize, usize)> {
    check_eps(epsilon)?;
    check_dim(pool.dim, center.len())?;
    let e2 = epsilon * epsilon;
    let hits = pool
        .chunks
        .par_iter()
        .map(|c| c.chunks_exact(pool.dim).filter(|x| dist_sq(x, center) <= e2).count())
        .sum();
    Ok((hits, pool.len()))
}

/// Occupancy with an autocorrelation-corrected error bar.
pub fn occupancy_estimate(pool: &SamplePool<'_>, center: &[f64], epsilon: f64) -> Result<OccupancyEstimate> {
    let (hits, samples) = occupancy_in_pool(pool, center, epsilon)?;
    let e2 = epsilon * epsilon;
    let series: Vec<Vec<f64>> = pool
        .chunks
        .par_iter()
        .map(|c| c.chunks_exact(pool.dim).map(|x| f64::from(u8::from(dist_sq(x, center) <= e2))).collect())
        .collect();
    let tau_int = if hits == 0 || hits == samples { 1.0 } else { integrated_autocorr_time(&series) };
    let fraction = hits as f64 / samples as f64;
    let n_eff = samples as f64 / tau_int;
    Ok(OccupancyEstimate {
        center: center.to_vec(),
        epsilon,
        hits,
        samples,
        fraction,
        tau_int,
        n_eff,
        std_error: (fraction * (1.0 - fraction) / n_eff).sqrt(),
    })
}

/// Integrated autocorrelation time `1 + 2 sum_t rho_t` of several chains, with
/// the autocovariance averaged across chains about the pooled mean and the sum
/// truncated by the initial positive sequence rule.
pub fn integrated_autocorr_time(chains: &[Vec<f64>]) -> f64 {
    let total: usize = chains.iter().map(Vec::len).sum();
    if total < 2 {
        return 1.0;
    }
    let mean = chains.iter().flatten().sum::<f64>() / total as f64;
    let max_len = chains.iter().map(Vec::len).max().unwrap_or(0);
    let Some(acov) = chains
        .par_iter()
        .filter(|c| !c.is_empty())
        .map(|c| raw_autocov(c, mean, max_len))
        .reduce_with(|mut a, b| {
            for (x, y) in a.iter_mut().zip(&b) {
                *x += y;
            }
            a
        })
    else {
        return 1.0;
    };
    // normalize lag t by the number of pairs contributing to it
    let mut pairs = vec![0usize; max_len];
    for c in chains {
        for (t, p) in pairs.iter_mut().enumerate().take(c.len()) {
            *p += c.len() - t;
        }
    }
    let gamma: Vec<f64> = acov.iter().zip(&pairs).map(|(a, &p)| if p > 0 { a / p as f64 } else { 0.0 }).collect();
    if !(gamma[0] > 0.0) {
        return 1.0;
    }
    let rho = |t: usize| if t < gamma.len() { gamma[t] / gamma[0] } else { 0.0 };
    let mut sum = 0.0;
    let mut k = 0;
    loop {
        let pair = rho(2 * k) + rho(2 * k + 1);
        if pair <= 0.0 || 2 * k + 1 >= max_len {
            break;
        }
        sum += pair;
        k += 1;
    }
    (2.0 * sum - 1.0).max(1.0)
}

fn raw_autocov(c: &[f64], mean: f64, max_len: usize) -> Vec<f64> {
    let n = (2 * max_len).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut buf: Vec<Complex<f64>> = c.iter().map(|&v| Complex::new(v - mean, 0.0)).collect();
    buf.resize(n, Complex::new(0.0, 0.0));
    fwd.process(&mut buf);
    for z in &mut buf {
        *z = Complex::new(z.norm_sqr(), 0.0);
    }
    inv.process(&mut buf);
    buf[..max_len].iter().map(|z| z.re / n as f64).collect()
}

/// Empirical transition ratio, or the resolution limit when `xb` is never visited.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum TransitionRatio {
    Ratio { value: f64, occupancy_a: OccupancyEstimate, occupancy_b: OccupancyEstimate },
    BelowResolution {
        /// One-sided 95% upper estimate `3 / N_eff`.
        upper: f64,
        /// Effective number of samples near `xa`.
        n_eff: f64,
        occupancy_a: OccupancyEstimate,
    },
}

impl TransitionRatio {
    pub fn is_below_resolution(&self) -> bool {
        matches!(self, TransitionRatio::BelowResolution { .. })
    }

    /// The ratio, or the upper estimate when below resolution.
    pub fn value_or_upper(&self) -> f64 {
        match self {
            TransitionRatio::Ratio { value, .. } => *value,
            TransitionRatio::BelowResolution { upper, .. } => *upper,
        }
    }
}

/// `Pr(|X - xb| <= eps) / Pr(|X - xa| <= eps)` over post-burn-in samples.
pub fn empirical_transition_ratio(
    ens: &Ensemble,
    xa: &[f64],
    xb: &[f64],
    epsilon: f64,
    burn_in_fraction: f64,
) -> Result<TransitionRatio> {
    let pool = SamplePool::from_ensemble(ens, burn_in_fraction)?;
    transition_ratio_in_pool(&pool, xa, xb, epsilon)
}

pub fn transition_ratio_in_pool(pool: &SamplePool<'_>, xa: &[f64], xb: &[f64], epsilon: f64) -> Result<TransitionRatio> {
    let oa = occupancy_estimate(pool, xa, epsilon)?;
    if oa.hits == 0 {
        return Err(Error::ZeroOccupancy);
    }
    let ob = occupancy_estimate(pool, xb, epsilon)?;
    if ob.hits == 0 {
        let n_eff = oa.hits as f64 / oa.tau_int;
        return Ok(TransitionRatio::BelowResolution { upper: ZERO_COUNT_UPPER / n_eff, n_eff, occupancy_a: oa });
    }
    Ok(TransitionRatio::Ratio { value: ob.hits as f64 / oa.hits as f64, occupancy_a: oa, occupancy_b: ob })
}
