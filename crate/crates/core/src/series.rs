//! Evaluation of `S_p(t) = sum_{n>=1} sin(t / n^p)` and its split into trend
//! and fluctuation.
//!
//! Two evaluation paths are provided. The direct path sums enough terms that
//! the tail bound `|t| N^(1-p) / (p-1)` falls below the tolerance. The
//! accelerated path sums only the first `N_p(t/tau) = ceil((p t / tau)^(1/(p+1)))`
//! terms, where consecutive arguments `t/n^p` still differ by more than
//! `tau`, and replaces the rest by the integral
//! `int_M^inf sin(t x^-p) dx = t^(1/p) F_p(t / M^p)` plus Euler-Maclaurin
//! corrections at `M = N_p + 1`. Past `N_p` the summand is slowly varying on
//! the integer lattice, so the corrections converge fast and their remainder
//! can be bounded from Cauchy estimates of the derivatives.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::special::{fresnel_limit, incomplete_fresnel};
use crate::summation::Neumaier;

pub const DEFAULT_TAU: f64 = FRAC_PI_4;
pub const DEFAULT_ABS_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_TERMS: u64 = 1_000_000;

const EPS: f64 = f64::EPSILON;

/// Exponent `p` and split parameter `tau` of the series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesParams {
    p: f64,
    tau: f64,
    max_terms: u64,
    accelerate: bool,
}

impl SeriesParams {
    /// Parameters with the default `tau = pi/4`.
    pub fn new(p: f64) -> Result<Self> {
        Self::with_tau(p, DEFAULT_TAU)
    }

    pub fn with_tau(p: f64, tau: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain("exponent p must be finite and exceed 1"));
        }
        if !(tau > 0.0 && tau < core::f64::consts::FRAC_PI_2) {
            return Err(Error::Domain("tau must lie in (0, pi/2)"));
        }
        Ok(SeriesParams { p, tau, max_terms: DEFAULT_MAX_TERMS, accelerate: true })
    }

    /// Largest number of terms the direct path may sum.
    pub fn with_max_terms(mut self, max_terms: u64) -> Self {
        self.max_terms = max_terms.max(1);
        self
    }

    /// Disables the fallback of [`evaluate`] to the accelerated path.
    pub fn without_acceleration(mut self) -> Self {
        self.accelerate = false;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn max_terms(&self) -> u64 {
        self.max_terms
    }

    pub fn accelerate(&self) -> bool {
        self.accelerate
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Direct,
    Accelerated,
    Taylor,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Accelerated => "accelerated",
            Method::Taylor => "taylor",
        }
    }
}

/// A series value with a certified absolute error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub error_bound: f64,
    /// Number of series terms summed explicitly.
    pub terms_used: u64,
    pub method: Method,
}

/// `S_p(t)` split into `alpha_p sign(t) |t|^(1/p)` and the remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendDecomposition {
    pub t: f64,
    pub trend: f64,
    pub fluctuation: f64,
    /// `|fluctuation| / |t|^(1/(p+1))`; its maximum over a sweep is the
    /// empirical envelope coefficient.
    pub envelope_coeff: f64,
    /// Error bound of the underlying series evaluation.
    pub error_bound: f64,
    pub method: Method,
}

#[inline]
fn inv_pow(n: u64, p: f64) -> f64 {
    if p == 2.0 {
        let x = n as f64;
        1.0 / (x * x)
    } else {
        libm::pow(n as f64, -p)
    }
}

/// Compensated sum of `sin(t / n^p)` for `n = 1..=n_terms`, largest `n` first.
/// Returns the sum and a bound on its rounding error.
fn head_sum(p: f64, t: f64, n_terms: u64) -> (f64, f64) {
    let mut acc = Neumaier::new();
    let mut arg_mass = 0.0;
    for n in (2..=n_terms).rev() {
        let arg = t * inv_pow(n, p);
        arg_mass += arg;
        acc.add(libm::sin(arg));
    }
    if n_terms >= 1 {
        acc.add(libm::sin(t));
    }
    let value = acc.value();
    // argument rounding (pow and product), one ulp per sine, compensated-sum residue
    let err = EPS * (2.0 * arg_mass + n_terms as f64 + 2.0 * libm::fabs(value));
    (value, err)
}

/// `sum_{n=1}^{n_terms} sin(t / n^p)` with compensated summation.
pub fn partial_sum(params: &SeriesParams, t: f64, n_terms: u64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain("t must be finite"));
    }
    if n_terms == 0 {
        return Err(Error::Domain("n_terms must be at least 1"));
    }
    let (v, _) = head_sum(params.p, libm::fabs(t), n_terms);
    Ok(if t < 0.0 { -v } else { v })
}

/// Sums with the smallest `n` first; used to check order sensitivity.
pub fn partial_sum_ascending(params: &SeriesParams, t: f64, n_terms: u64) -> Result<f64> {
    if !t.is_finite() {
        return Err(Error::Domain("t must be finite"));
    }
    if n_terms == 0 {
        return Err(Error::Domain("n_terms must be at least 1"));
    }
    let a = libm::fabs(t);
    let mut acc = Neumaier::new();
    for n in 1..=n_terms {
        acc.add(libm::sin(a * inv_pow(n, params.p)));
    }
    let v = acc.value();
    Ok(if t < 0.0 { -v } else { v })
}

/// `|t| n^(1-p) / (p-1)`, an upper bound on `|sum_{n > n_terms} sin(t / n^p)|`.
pub fn tail_bound(params: &SeriesParams, t: f64, n_terms: u64) -> f64 {
    let p = params.p;
    libm::fabs(t) * libm::pow(n_terms.max(1) as f64, 1.0 - p) / (p - 1.0)
}

/// `N_p(t/tau) = ceil((p t / tau)^(1/(p+1)))` for `t > 0`.
pub fn split_index(params: &SeriesParams, t: f64) -> Result<u64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("split index needs finite t > 0"));
    }
    let x = libm::pow(params.p * t / params.tau, 1.0 / (params.p + 1.0));
    Ok((libm::ceil(x) as u64).max(1))
}

/// `alpha_p = Gamma(1 - 1/p) sin(pi / (2p))`.
pub fn trend_alpha(p: f64) -> Result<f64> {
    if p == f64::INFINITY {
        return Ok(0.0);
    }
    fresnel_limit(p)
}

/// Direct summation to `abs_tol`, falling back to [`evaluate_accelerated`] when
/// the number of terms would exceed the configured maximum.
pub fn evaluate(params: &SeriesParams, t: f64, abs_tol: f64) -> Result<EvalResult> {
    if !(abs_tol > 0.0) || !abs_tol.is_finite() {
        return Err(Error::Domain("abs_tol must be positive and finite"));
    }
    if !t.is_finite() {
        return Err(Error::Domain("t must be finite"));
    }
    if t == 0.0 {
        return Ok(EvalResult { value: 0.0, error_bound: 0.0, terms_used: 0, method: Method::Direct });
    }
    let a = libm::fabs(t);
    let p = params.p;
    let needed = libm::ceil(libm::pow(2.0 * a / ((p - 1.0) * abs_tol), 1.0 / (p - 1.0))).max(1.0);
    let flip = |r: EvalResult| if t < 0.0 { EvalResult { value: -r.value, ..r } } else { r };
    if needed <= params.max_terms as f64 {
        let n = needed as u64;
        let (value, round) = head_sum(p, a, n);
        let error_bound = tail_bound(params, a, n) + round;
        if error_bound <= abs_tol {
            return Ok(flip(EvalResult { value, error_bound, terms_used: n, method: Method::Direct }));
        }
    }
    if !params.accelerate {
        let n = params.max_terms;
        return Err(Error::Budget { what: "direct summation", achieved: tail_bound(params, a, n) });
    }
    evaluate_accelerated(params, a).map(flip)
}

/// Head sum up to the split index plus the integral of the remaining terms,
/// corrected by Euler-Maclaurin terms; for `t > 0`.
///
/// The cost grows like `t^(1/(p+1))`. The error bound covers the
/// Euler-Maclaurin remainder, the quadrature error of the incomplete
/// Fresnel integral and floating-point rounding.
pub fn evaluate_accelerated(params: &SeriesParams, t: f64) -> Result<EvalResult> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("accelerated evaluation needs finite t > 0"));
    }
    let p = params.p;
    let n = split_index(params, t)?;
    let scale = 1.0 + libm::pow(t, 1.0 / p);
    let target = 4.0 * EPS * scale;
    let mut m = n + 1;
    let mut plan = em_plan(p, t, m);
    while plan.bound > target && m < 64 * (n + 1) && m < 1 << 20 {
        let next = em_plan(p, t, 2 * m);
        if next.bound >= plan.bound {
            break;
        }
        m *= 2;
        plan = next;
    }
    let (head, head_err) = head_sum(p, t, m - 1);
    let mf = m as f64;
    let x = t / libm::pow(mf, p);
    let fres = incomplete_fresnel(p, x)?;
    let root = libm::pow(t, 1.0 / p);
    let integral = root * fres.value;
    let (corr, corr_err) = em_correction(p, x, mf, plan.k);
    let mut sum = Neumaier::new();
    sum.add(head);
    sum.add(integral);
    sum.add(corr);
    let value = sum.value();
    let error_bound = head_err
        + root * fres.error_bound
        + 4.0 * EPS * libm::fabs(integral)
        + corr_err
        + plan.bound
        + 2.0 * EPS * libm::fabs(value);
    Ok(EvalResult { value, error_bound, terms_used: m - 1, method: Method::Accelerated })
}

/// Splits `S_p(t)` into trend and fluctuation, evaluating with [`evaluate`].
pub fn decompose(params: &SeriesParams, t: f64, abs_tol: f64) -> Result<TrendDecomposition> {
    let r = evaluate(params, t, abs_tol)?;
    let p = params.p;
    let alpha = trend_alpha(p)?;
    let a = libm::fabs(t);
    let mag = alpha * libm::pow(a, 1.0 / p);
    let trend = if t < 0.0 { -mag } else { mag };
    let fluctuation = r.value - trend;
    let envelope_coeff = if a == 0.0 { 0.0 } else { libm::fabs(fluctuation) / libm::pow(a, 1.0 / (p + 1.0)) };
    Ok(TrendDecomposition {
        t,
        trend,
        fluctuation,
        envelope_coeff,
        error_bound: r.error_bound + 4.0 * EPS * mag,
        method: r.method,
    })
}

/// [`decompose`] over a strictly increasing grid, in grid order.
pub fn sweep(params: &SeriesParams, grid: &[f64], abs_tol: f64) -> Result<Vec<TrendDecomposition>> {
    if grid.iter().any(|t| !t.is_finite()) {
        return Err(Error::Domain("grid values must be finite"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("grid must be strictly increasing"));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        grid.par_iter().map(|&t| decompose(params, t, abs_tol)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        grid.iter().map(|&t| decompose(params, t, abs_tol)).collect()
    }
}

// ---------------------------------------------------------------------------
// Euler-Maclaurin tail

/// Highest Bernoulli index used by the tail correction.
const MAX_EM_ORDER: usize = 30;

/// Exact `B_2k` for `2k <= 20` as (numerator, denominator).
const BERNOULLI_EXACT: [(f64, f64); 11] = [
    (1.0, 1.0),
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

/// `B_n / n!` for `n = 0..64`. Beyond `n = 20` the identity
/// `B_2k / (2k)! = (-1)^(k+1) 2 zeta(2k) / (2 pi)^2k` is used, with `zeta(2k)`
/// summed directly; the usual recurrence loses all accuracy by `n = 40`.
const fn bernoulli_over_factorial() -> [f64; 64] {
    let mut b = [0.0f64; 64];
    b[0] = 1.0;
    b[1] = -0.5;
    let mut fact = 1.0;
    let mut two_pi_pow = 1.0;
    let mut n = 1;
    while n < 64 {
        fact *= n as f64;
        two_pi_pow *= 2.0 * core::f64::consts::PI;
        if n % 2 == 0 {
            let k = n / 2;
            if k <= 10 {
                b[n] = BERNOULLI_EXACT[k].0 / BERNOULLI_EXACT[k].1 / fact;
            } else {
                let mut zeta = 0.0;
                let mut j = 24;
                while j >= 1 {
                    let inv = 1.0 / j as f64;
                    let mut pw = 1.0;
                    let mut e = 0;
                    while e < n {
                        pw *= inv;
                        e += 1;
                    }
                    zeta += pw;
                    j -= 1;
                }
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                b[n] = sign * 2.0 * zeta / two_pi_pow;
            }
        }
        n += 1;
    }
    b
}

/// `B_n / n!`.
pub const BERNOULLI_OVER_FACTORIAL: [f64; 64] = bernoulli_over_factorial();

/// `B_2k / (2k)` for `k = 0..=MAX_EM_ORDER` (entry 0 unused).
const fn em_coefficients() -> [f64; MAX_EM_ORDER + 1] {
    let mut out = [0.0f64; MAX_EM_ORDER + 1];
    let mut fact = 1.0; // (2k - 1)!
    let mut k = 1;
    while k <= MAX_EM_ORDER {
        let m = 2 * k;
        if k > 1 {
            fact *= ((m - 2) * (m - 1)) as f64;
        }
        out[k] = BERNOULLI_OVER_FACTORIAL[m] * fact;
        k += 1;
    }
    out
}

const EM_COEF: [f64; MAX_EM_ORDER + 1] = em_coefficients();

struct EmPlan {
    k: usize,
    bound: f64,
}

/// Chooses the number of correction terms for `sum_{n >= m} sin(t n^-p)` and
/// bounds the remainder.
///
/// The remainder after `K` terms obeys `|R_K| <= |B_2K| / (2K)! int_m^inf |f^(2K)|`.
/// The derivative is bounded by Cauchy's estimate on the disc of radius
/// `c x` around `x`, where `|sin w| <= min(cosh(Im w), sinh|w|)`, minimised
/// over a ladder of `c`. Each candidate is decreasing in `x`, so a left-point
/// Riemann sum on a geometric grid bounds the integral from above.
fn em_plan(p: f64, t: f64, m: u64) -> EmPlan {
    const LADDER: usize = 26;
    let mf = m as f64;
    let mut cs = [0.0f64; LADDER];
    let mut ln_c = [0.0f64; LADDER];
    let mut cosh_fac = [0.0f64; LADDER];
    let mut sinh_fac = [0.0f64; LADDER];
    for i in 0..LADDER {
        let c = 0.5 * libm::pow(2.0, -(i as f64) / 2.0);
        cs[i] = c;
        ln_c[i] = libm::log(c);
        cosh_fac[i] = c * p * libm::pow(1.0 - c, -p - 1.0);
        sinh_fac[i] = libm::pow(1.0 - c, -p);
    }
    // integral[j] holds an upper bound of int |f^(2j)| / (2j)! over [m, inf)
    let mut integral = [0.0f64; MAX_EM_ORDER + 1];
    let ratio = 1.25f64;
    let mut x = mf;
    let two_p = libm::pow(2.0, p);
    for _ in 0..400 {
        let y = t * libm::pow(x, -p);
        let ln_x = libm::log(x);
        let dx = x * (ratio - 1.0);
        let mut ln_s = [0.0f64; LADDER];
        for i in 0..LADDER {
            ln_s[i] = ln_sin_bound(cosh_fac[i] * y, sinh_fac[i] * y);
        }
        for (k, slot) in integral.iter_mut().enumerate().skip(1) {
            let order = (2 * k) as f64;
            let mut best = f64::INFINITY;
            for i in 0..LADDER {
                let v = ln_s[i] - order * (ln_c[i] + ln_x);
                if v < best {
                    best = v;
                }
            }
            *slot += libm::exp(best) * dx;
        }
        if two_p * y <= 1.0 && x >= 64.0 * mf {
            // disc of radius x/2 from here on: |f^(n)| / n! <= 2^n x^-n sinh(2^p y_J) (x_J/x)^p
            let sh = libm::sinh(two_p * y);
            for (k, slot) in integral.iter_mut().enumerate().skip(1) {
                let order = (2 * k) as f64;
                *slot += libm::exp(order * (core::f64::consts::LN_2 - ln_x) + ln_x) * sh / (order + p - 1.0);
            }
            return pick(integral);
        }
        x *= ratio;
    }
    pick(integral)
}

fn pick(integral: [f64; MAX_EM_ORDER + 1]) -> EmPlan {
    let mut best = EmPlan { k: 1, bound: f64::INFINITY };
    for k in 1..=MAX_EM_ORDER {
        let b = libm::fabs(BERNOULLI_OVER_FACTORIAL[2 * k]) * integral[k];
        // integral[k] already carries 1/(2k)!; restore |B_2k| / (2k)! * (2k)!
        let b = b * factorial(2 * k);
        if b < best.bound {
            best = EmPlan { k, bound: b };
        }
    }
    best
}

fn factorial(n: usize) -> f64 {
    let mut f = 1.0;
    for i in 2..=n {
        f *= i as f64;
    }
    f
}

/// `ln min(cosh a, sinh b)` for `a, b >= 0`.
fn ln_sin_bound(a: f64, b: f64) -> f64 {
    let ln_cosh = a + libm::log1p(libm::exp(-2.0 * a)) - core::f64::consts::LN_2;
    let ln_sinh = if b < 1e-4 {
        libm::log(b) + libm::log1p(b * b / 6.0)
    } else if b > 20.0 {
        b - core::f64::consts::LN_2
    } else {
        libm::log(libm::sinh(b))
    };
    ln_cosh.min(ln_sinh)
}

/// `f(m)/2 - sum_{k=1}^{K} B_2k/(2k)! f^(2k-1)(m)` for `f(x) = sin(t x^-p)`,
/// with `x0 = t m^-p`. Derivatives come from the Taylor coefficients of
/// `sin(phi(m + h))`, `phi(m + h) = x0 (1 + h/m)^-p`.
fn em_correction(p: f64, x0: f64, m: f64, k_max: usize) -> (f64, f64) {
    let order = 2 * k_max;
    let mut phi = [0.0f64; 2 * MAX_EM_ORDER + 1];
    phi[0] = x0;
    for j in 1..=order {
        phi[j] = -phi[j - 1] * (p + (j - 1) as f64) / (j as f64 * m);
    }
    let mut s = [0.0f64; 2 * MAX_EM_ORDER + 1];
    let mut c = [0.0f64; 2 * MAX_EM_ORDER + 1];
    let (s0, c0) = libm::sincos(x0);
    s[0] = s0;
    c[0] = c0;
    let mut mag = [0.0f64; 2 * MAX_EM_ORDER + 1];
    mag[0] = 1.0;
    for j in 1..order {
        let mut ss = 0.0;
        let mut cc = 0.0;
        let mut mm = 0.0;
        for k in 1..=j {
            let w = k as f64 * phi[k];
            ss += w * c[j - k];
            cc -= w * s[j - k];
            mm += libm::fabs(w) * mag[j - k];
        }
        let jf = j as f64;
        s[j] = ss / jf;
        c[j] = cc / jf;
        mag[j] = mm / jf;
    }
    let mut acc = Neumaier::new();
    acc.add(0.5 * s0);
    let mut round = 0.5 * libm::fabs(s0) * EPS;
    for k in 1..=k_max {
        let term = EM_COEF[k] * s[2 * k - 1];
        acc.add(-term);
        // rounding in the coefficient recursion is relative to the magnitudes that fed it
        round += libm::fabs(EM_COEF[k]) * mag[2 * k - 1] * (4.0 * (2 * k) as f64) * EPS * (1.0 + libm::fabs(x0));
    }
    (acc.value(), round)
}
