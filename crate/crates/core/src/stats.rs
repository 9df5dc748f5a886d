//! Occupation-time statistics of scaled sine sums, detection of rational
//! dependence among power-law frequencies, and envelope exponent fits.
//!
//! Occupation measures are approximated by uniform deterministic sampling of
//! `t` on `[0, T]`. Everything here is evidence gathering: independence of the
//! frequencies can be refuted by a witness but never certified.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_4, SQRT_2};

use crate::error::{Error, Result};
use crate::series::{decompose, split_index, SeriesParams};
use crate::summation::Neumaier;

/// Where a [`FrequencySet`] came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrequencyOrigin {
    ExplicitList,
    /// `omega_n = n^-p`
    PowerLaw(f64),
}

/// Positive finite angular frequencies `omega_1, omega_2, ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencySet {
    omegas: Vec<f64>,
    origin: FrequencyOrigin,
}

impl FrequencySet {
    pub fn explicit(omegas: Vec<f64>) -> Result<Self> {
        if omegas.is_empty() || omegas.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::Domain("frequencies must be positive and finite"));
        }
        Ok(FrequencySet { omegas, origin: FrequencyOrigin::ExplicitList })
    }

    /// `n^-p` for `n = 1..=len`.
    pub fn power_law(p: f64, len: usize) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain("power-law exponent must be finite and > 1"));
        }
        if len == 0 {
            return Err(Error::Domain("frequency set must be nonempty"));
        }
        let omegas = (1..=len).map(|n| libm::pow(n as f64, -p)).collect();
        Ok(FrequencySet { omegas, origin: FrequencyOrigin::PowerLaw(p) })
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn origin(&self) -> FrequencyOrigin {
        self.origin
    }
}

/// `sqrt(2/N) sum_{n<=N} sin(omega_n t)`.
pub fn scaled_partial(freqs: &FrequencySet, n_terms: usize, t: f64) -> Result<f64> {
    if n_terms == 0 || n_terms > freqs.len() {
        return Err(Error::Domain("n_terms must lie in 1..=number of frequencies"));
    }
    let mut acc = Neumaier::new();
    for &w in &freqs.omegas[..n_terms] {
        acc.add(libm::sin(w * t));
    }
    Ok(libm::sqrt(2.0 / n_terms as f64) * acc.value())
}

/// The self-scaled partial sum `sqrt(2/N) sum_{n<=N} sin(t n^-p)` with `N = split_index(t)`.
pub fn conjecture1_signal(params: &SeriesParams, t: f64) -> Result<f64> {
    let n = split_index(params, t)?;
    let p = params.p();
    let mut acc = Neumaier::new();
    for k in 1..=n {
        acc.add(libm::sin(t * libm::pow(k as f64, -p)));
    }
    Ok(libm::sqrt(2.0 / n as f64) * acc.value())
}

/// Uniform histogram bins on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bins {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Bins {
    pub fn new(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || count == 0 {
            return Err(Error::Domain("bins need finite lo < hi and a positive count"));
        }
        Ok(Bins { lo, hi, count })
    }

    pub fn edges(&self) -> Vec<f64> {
        let w = (self.hi - self.lo) / self.count as f64;
        (0..=self.count).map(|i| if i == self.count { self.hi } else { self.lo + w * i as f64 }).collect()
    }
}

impl Default for Bins {
    /// 80 bins on `[-4, 4]`.
    fn default() -> Self {
        Bins { lo: -4.0, hi: 4.0, count: 80 }
    }
}

/// Empirical occupation-time distribution of a sampled signal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionReport {
    pub bin_edges: Vec<f64>,
    /// Fraction of samples per bin; bins are half-open except the last.
    pub occupation_fraction: Vec<f64>,
    /// Fraction of samples below the first edge.
    pub below: f64,
    /// Fraction of samples above the last edge.
    pub above: f64,
    pub total_time: f64,
    pub samples: u64,
    /// Sup-norm distance between the empirical CDF and the standard normal CDF.
    pub ks_distance: f64,
    /// `tau` of the split index, for reports built from the self-scaled sum.
    pub tau: Option<f64>,
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Sampling steps at or above this are rejected.
pub const MAX_SAMPLE_STEP: f64 = FRAC_PI_4;

fn sample_count(total_time: f64, step: f64) -> Result<usize> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::Domain("sample step must be positive"));
    }
    if step >= MAX_SAMPLE_STEP {
        return Err(Error::Resolution { step, limit: MAX_SAMPLE_STEP });
    }
    if !(total_time >= 0.0) || !total_time.is_finite() {
        return Err(Error::Domain("total time must be finite and nonnegative"));
    }
    let k = libm::floor(total_time / step);
    if k > 4.0e9 {
        return Err(Error::Domain("too many samples"));
    }
    Ok(k as usize + 1)
}

/// Sup distance between the empirical CDF of `sorted` and `cdf`, counting
/// both one-sided limits at every jump.
pub fn sup_distance_sorted<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    let mut i = 0;
    while i < sorted.len() {
        let x = sorted[i];
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == x {
            j += 1;
        }
        let f = cdf(x);
        d = d.max(libm::fabs((j + 1) as f64 / n - f)).max(libm::fabs(f - i as f64 / n));
        i = j + 1;
    }
    d
}

fn build_report(values: &[f64], total_time: f64, bins: Bins, tau: Option<f64>) -> DistributionReport {
    let n = values.len();
    let mut counts = alloc::vec![0u64; bins.count];
    let (mut below, mut above) = (0u64, 0u64);
    let width = (bins.hi - bins.lo) / bins.count as f64;
    for &v in values {
        if v < bins.lo {
            below += 1;
        } else if v > bins.hi {
            above += 1;
        } else {
            let i = (((v - bins.lo) / width) as usize).min(bins.count - 1);
            counts[i] += 1;
        }
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let nf = n as f64;
    DistributionReport {
        bin_edges: bins.edges(),
        occupation_fraction: counts.iter().map(|&c| c as f64 / nf).collect(),
        below: below as f64 / nf,
        above: above as f64 / nf,
        total_time,
        samples: n as u64,
        ks_distance: sup_distance_sorted(&sorted, normal_cdf),
        tau,
    }
}

fn sample_signal<F: Fn(f64) -> f64 + Sync>(signal: &F, count: usize, step: f64) -> Vec<f64> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(|k| signal(k as f64 * step)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(|k| signal(k as f64 * step)).collect()
    }
}

/// Occupation statistics of `signal` sampled at `t = 0, step, 2 step, ... <= T`.
pub fn occupation_report<F: Fn(f64) -> f64 + Sync>(signal: F, total_time: f64, sample_step: f64, bins: Bins) -> Result<DistributionReport> {
    let count = sample_count(total_time, sample_step)?;
    let values = sample_signal(&signal, count, sample_step);
    Ok(build_report(&values, total_time, bins, None))
}

/// Sup distance between the empirical CDF of the sampled signal and `cdf`.
pub fn cdf_distance<F, G>(signal: F, total_time: f64, sample_step: f64, cdf: G) -> Result<f64>
where
    F: Fn(f64) -> f64 + Sync,
    G: Fn(f64) -> f64,
{
    let count = sample_count(total_time, sample_step)?;
    let mut values = sample_signal(&signal, count, sample_step);
    values.sort_unstable_by(f64::total_cmp);
    Ok(sup_distance_sorted(&values, cdf))
}

/// One report per horizon in `horizons`, all from a single pass of samples
/// (each horizon uses the prefix `t <= T`).
pub fn occupation_trend<F: Fn(f64) -> f64 + Sync>(signal: F, horizons: &[f64], sample_step: f64, bins: Bins) -> Result<Vec<DistributionReport>> {
    let longest = horizons.iter().cloned().fold(0.0f64, f64::max);
    let count = sample_count(longest, sample_step)?;
    let values = sample_signal(&signal, count, sample_step);
    horizons
        .iter()
        .map(|&t| {
            let k = sample_count(t, sample_step)?;
            Ok(build_report(&values[..k], t, bins, None))
        })
        .collect()
}

/// KS distances for every `(N, T)` pair of the scaled power sum: rows follow
/// `n_terms`, columns follow `horizons`. The two limits are not interchangeable,
/// so the whole matrix is reported.
pub fn kac_matrix(freqs: &FrequencySet, n_terms: &[usize], horizons: &[f64], sample_step: f64) -> Result<Vec<Vec<f64>>> {
    let bins = Bins::default();
    n_terms
        .iter()
        .map(|&n| {
            if n == 0 || n > freqs.len() {
                return Err(Error::Domain("n_terms must lie in 1..=number of frequencies"));
            }
            let signal = |t: f64| scaled_partial(freqs, n, t).unwrap_or(0.0);
            Ok(occupation_trend(signal, horizons, sample_step, bins)?.into_iter().map(|r| r.ks_distance).collect())
        })
        .collect()
}

/// Samples between exact phase re-anchoring in [`split_signal_samples`].
const ROTATION_BLOCK: usize = 4096;

/// `conjecture1_signal` at `t = k step`, `k < count`, with `0` at `t = 0`.
/// Phases advance by complex rotation and are recomputed exactly at the
/// start of every block, which keeps them within about `1e-12` of direct evaluation.
fn split_signal_samples(params: &SeriesParams, count: usize, step: f64) -> Result<Vec<f64>> {
    let p = params.p();
    let blocks = count.div_ceil(ROTATION_BLOCK);
    let block = |b: usize| -> Result<Vec<f64>> {
        let k0 = b * ROTATION_BLOCK;
        let k1 = (k0 + ROTATION_BLOCK).min(count);
        let t_last = (k1 - 1) as f64 * step;
        let n_max = if t_last > 0.0 { split_index(params, t_last)? as usize } else { 1 };
        let t0 = k0 as f64 * step;
        let mut s = Vec::with_capacity(n_max);
        let mut c = Vec::with_capacity(n_max);
        let mut rs = Vec::with_capacity(n_max);
        let mut rc = Vec::with_capacity(n_max);
        for n in 1..=n_max {
            let w = libm::pow(n as f64, -p);
            let (a, b) = libm::sincos(w * t0);
            s.push(a);
            c.push(b);
            let (a, b) = libm::sincos(w * step);
            rs.push(a);
            rc.push(b);
        }
        let mut out = Vec::with_capacity(k1 - k0);
        for k in k0..k1 {
            let t = k as f64 * step;
            if t > 0.0 {
                let n = split_index(params, t)? as usize;
                let mut acc = Neumaier::new();
                for v in &s[..n] {
                    acc.add(*v);
                }
                out.push(libm::sqrt(2.0 / n as f64) * acc.value());
            } else {
                out.push(0.0);
            }
            for i in 0..n_max {
                let (a, b) = (s[i], c[i]);
                s[i] = a * rc[i] + b * rs[i];
                c[i] = b * rc[i] - a * rs[i];
            }
        }
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let parts: Vec<Result<Vec<f64>>> = {
        use rayon::prelude::*;
        (0..blocks).into_par_iter().map(block).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<Result<Vec<f64>>> = (0..blocks).map(block).collect();
    let mut values = Vec::with_capacity(count);
    for part in parts {
        values.extend(part?);
    }
    Ok(values)
}

/// [`occupation_report`] of [`conjecture1_signal`], taking the signal as 0 at `t = 0`.
pub fn conjecture1_test(params: &SeriesParams, total_time: f64, sample_step: f64, bins: Bins) -> Result<DistributionReport> {
    let count = sample_count(total_time, sample_step)?;
    let values = split_signal_samples(params, count, sample_step)?;
    Ok(build_report(&values, total_time, bins, Some(params.tau())))
}

/// [`conjecture1_test`] for several horizons from one pass of samples.
pub fn split_signal_trend(params: &SeriesParams, horizons: &[f64], sample_step: f64, bins: Bins) -> Result<Vec<DistributionReport>> {
    let longest = horizons.iter().cloned().fold(0.0f64, f64::max);
    let count = sample_count(longest, sample_step)?;
    let values = split_signal_samples(params, count, sample_step)?;
    horizons
        .iter()
        .map(|&t| {
            let k = sample_count(t, sample_step)?;
            Ok(build_report(&values[..k], t, bins, Some(params.tau())))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Rational dependence

/// `a omega_b = omega_1` with `a = b^p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRelation {
    pub a: u64,
    pub b: u64,
    /// `|a b^-p - 1|`
    pub residual: f64,
}

/// `p = num / den`, which makes every `n^-p` dependent on `omega_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalExponent {
    pub num: u64,
    pub den: u64,
    /// `|p - num/den|`
    pub residual: f64,
}

/// Evidence that the frequencies `n^-p` are rationally dependent. At least
/// one of the two fields is set.
#[derive(Debug, Clone, PartialEq)]
pub struct DependenceWitness {
    pub power: Option<PowerRelation>,
    pub rational: Option<RationalExponent>,
}

impl DependenceWitness {
    /// Human-readable integer relation.
    pub fn relation(&self) -> String {
        match (self.power, self.rational) {
            (Some(r), Some(q)) => format!("{}*omega_{} - omega_1 = 0; p = {}/{}", r.a, r.b, q.num, q.den),
            (Some(r), None) => format!("{}*omega_{} - omega_1 = 0", r.a, r.b),
            (None, Some(q)) => format!("p = {}/{}", q.num, q.den),
            (None, None) => String::new(),
        }
    }
}

/// Largest denominator tried when recognizing `p` as rational.
pub const MAX_RATIONAL_DENOMINATOR: u64 = 1_000_000;

/// Looks for `p = ln a / ln b` with integers `a > b > 1`, `b <= b_max`, and
/// for `p` rational. `None` means nothing was found, not that the
/// frequencies are independent.
///
/// Only continued-fraction convergents `h/k` of `p` are tried as rationals.
/// A convergent counts when `|p - h/k| < tol` and also `|p k - h| <= 1e-4 / k`.
/// The second condition corresponds to a partial quotient of at least `1e4`.
/// Without it, every irrational `p` would be flagged once `k` reaches
/// `1/sqrt(tol)`.
pub fn detect_dependence(p: f64, b_max: u64, tol: f64) -> Option<DependenceWitness> {
    if !(p > 1.0) || !p.is_finite() || !(tol > 0.0) {
        return None;
    }
    let mut power = None;
    for b in 2..=b_max.max(1) {
        let lb = libm::log(b as f64);
        let x = libm::exp(p * lb);
        if x > 9.0e15 {
            break;
        }
        let a = libm::round(x);
        if a <= b as f64 {
            continue;
        }
        let la = libm::log(a);
        if libm::fabs(p - la / lb) < tol {
            power = Some(PowerRelation { a: a as u64, b, residual: libm::fabs(libm::expm1(la - p * lb)) });
            break;
        }
    }
    let rational = rational_exponent(p, tol);
    if power.is_none() && rational.is_none() {
        None
    } else {
        Some(DependenceWitness { power, rational })
    }
}

fn rational_exponent(p: f64, tol: f64) -> Option<RationalExponent> {
    let (mut h0, mut h1) = (1.0f64, libm::floor(p));
    let (mut k0, mut k1) = (0.0f64, 1.0f64);
    let mut x = p - h1;
    loop {
        let gap = libm::fabs(libm::fma(p, k1, -h1));
        if gap < tol * k1 && gap <= 1e-4 / k1 {
            return Some(RationalExponent { num: h1 as u64, den: k1 as u64, residual: gap / k1 });
        }
        if x <= 0.0 {
            return None;
        }
        let y = 1.0 / x;
        let a = libm::floor(y);
        x = y - a;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > MAX_RATIONAL_DENOMINATOR as f64 || !h2.is_finite() {
            return None;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
    }
}

// ---------------------------------------------------------------------------
// Envelope growth

/// Absolute tolerance for fluctuation samples in [`envelope_exponent_fit`].
pub const ENVELOPE_SAMPLE_TOL: f64 = 1e-8;

/// Samples `DeltaS_p(e^u)` at `samples` equally spaced `u` in `[u_lo, u_hi]`
/// and fits block maxima with [`fit_block_maxima`].
pub fn envelope_exponent_fit(params: &SeriesParams, u_lo: f64, u_hi: f64, samples: usize) -> Result<(f64, f64)> {
    if !(u_hi > u_lo) || !u_lo.is_finite() || !u_hi.is_finite() {
        return Err(Error::Domain("envelope fit needs finite u_lo < u_hi"));
    }
    if samples < 2 {
        return Err(Error::Domain("envelope fit needs at least two samples"));
    }
    let h = (u_hi - u_lo) / (samples - 1) as f64;
    let us: Vec<f64> = (0..samples).map(|i| if i + 1 == samples { u_hi } else { u_lo + h * i as f64 }).collect();
    let eval = |u: &f64| decompose(params, libm::exp(*u), ENVELOPE_SAMPLE_TOL).map(|d| d.fluctuation);
    #[cfg(feature = "parallel")]
    let values: Result<Vec<f64>> = {
        use rayon::prelude::*;
        us.par_iter().map(eval).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let values: Result<Vec<f64>> = us.iter().map(eval).collect();
    fit_block_maxima(&us, &values?)
}

/// Least-squares fit of `ln max|v| = ln gamma + exponent * u` over blocks of
/// width `(u_max - u_min) / sqrt(samples)`, each represented by its center.
/// Returns `(exponent, gamma)`.
pub fn fit_block_maxima(us: &[f64], values: &[f64]) -> Result<(f64, f64)> {
    if us.len() != values.len() || us.len() < 2 {
        return Err(Error::Domain("need matching sample and value lists"));
    }
    let (lo, hi) = (us[0], us[us.len() - 1]);
    if !(hi > lo) {
        return Err(Error::Domain("sample grid must be increasing"));
    }
    let blocks = libm::floor(libm::sqrt(us.len() as f64)) as usize;
    if blocks < 4 {
        return Err(Error::Domain("degenerate envelope fit: fewer than 4 blocks"));
    }
    let width = (hi - lo) / blocks as f64;
    let mut maxima = alloc::vec![0.0f64; blocks];
    for (&u, &v) in us.iter().zip(values) {
        let i = (((u - lo) / width) as usize).min(blocks - 1);
        maxima[i] = maxima[i].max(libm::fabs(v));
    }
    let mut pts = Vec::with_capacity(blocks);
    for (i, &m) in maxima.iter().enumerate() {
        if m > 0.0 && m.is_finite() {
            pts.push((lo + width * (i as f64 + 0.5), libm::log(m)));
        }
    }
    if pts.len() < 4 {
        return Err(Error::Domain("degenerate envelope fit: fewer than 4 nonzero blocks"));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|q| q.0).sum::<f64>() / n;
    let my = pts.iter().map(|q| q.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|q| (q.0 - mx) * (q.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((slope, libm::exp(my - slope * mx)))
}
