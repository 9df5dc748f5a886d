//! Elementary polynomial bounds for `S_2(t)`.
//!
//! Splitting the series at `N`, the head is bounded by `|sum_{n<=N} sin| <= N`
//! and the tail by the alternating Taylor envelopes of `sin x` for `x >= 0`:
//! `x - x^3/6 <= sin x <= x - x^3/6 + x^5/120`. Summing the envelopes termwise
//! gives cubic lower and quintic upper polynomials in `t` whose coefficients
//! are tails of `zeta(2)`, `zeta(6)` and `zeta(10)`.

use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest split point accepted by [`corridor_coeffs`].
pub const MAX_CORRIDOR_N: u32 = 64;

/// `zeta(2) = pi^2 / 6`.
pub const ZETA2: f64 = PI * PI / 6.0;
/// `zeta(6) = pi^6 / 945`.
pub const ZETA6: f64 = PI * PI * PI * PI * PI * PI / 945.0;
/// `zeta(10) = pi^10 / 93555`.
pub const ZETA10: f64 = PI * PI * PI * PI * PI * PI * PI * PI * PI * PI / 93555.0;

/// Tail constants of the corridor at split point `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorridorCoeffs {
    pub n: u32,
    /// `sum_{k>n} k^-2`
    pub a2: f64,
    /// `(1/6) sum_{k>n} k^-6`
    pub b2: f64,
    /// `(1/120) sum_{k>n} k^-10`
    pub c2: f64,
}

impl CorridorCoeffs {
    /// `-n + a2 t - b2 t^3`, a lower bound for `S_2(t)` when `t >= 0`.
    pub fn lower(&self, t: f64) -> f64 {
        let t3 = t * t * t;
        -(self.n as f64) + self.a2 * t - self.b2 * t3
    }

    /// `n + a2 t - b2 t^3 + c2 t^5`, an upper bound for `S_2(t)` when `t >= 0`.
    pub fn upper(&self, t: f64) -> f64 {
        let t2 = t * t;
        self.n as f64 + self.a2 * t - self.b2 * t2 * t + self.c2 * t2 * t2 * t
    }
}

/// `sum_{k > n} k^-s` for even `s >= 2`: explicit terms up to 40, then
/// Euler-Maclaurin with five Bernoulli corrections.
fn zeta_tail(s: i32, n: u32) -> f64 {
    const B: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let start = n.max(40) + 1;
    let a = start as f64;
    let sf = s as f64;
    let mut tail = libm::pow(a, 1.0 - sf) / (sf - 1.0) + 0.5 * libm::pow(a, -sf);
    let mut rising = sf;
    let mut fact = 2.0;
    for (k, b) in B.iter().enumerate() {
        let m = (2 * k + 1) as f64;
        tail += b / fact * rising * libm::pow(a, -sf - m);
        rising *= (sf + m) * (sf + m + 1.0);
        fact *= (m + 2.0) * (m + 3.0);
    }
    let mut explicit = 0.0;
    for k in ((n + 1)..start).rev() {
        explicit += libm::pow(k as f64, -sf);
    }
    explicit + tail
}

/// Corridor coefficients at split point `n <= 64`.
///
/// For `n = 0` these are the closed forms. Otherwise the tails are summed
/// directly: `zeta(10)` minus a partial sum has no correct digits left once
/// the tail drops below one ulp of `zeta(10)`.
pub fn corridor_coeffs(n: u32) -> Result<CorridorCoeffs> {
    if n > MAX_CORRIDOR_N {
        return Err(Error::Domain("corridor split point must not exceed 64"));
    }
    if n == 0 {
        return Ok(CorridorCoeffs { n, a2: ZETA2, b2: ZETA6 / 6.0, c2: ZETA10 / 120.0 });
    }
    Ok(CorridorCoeffs {
        n,
        a2: zeta_tail(2, n),
        b2: zeta_tail(6, n) / 6.0,
        c2: zeta_tail(10, n) / 120.0,
    })
}

/// `t / (m + 1) - t^3 / (30 m^5)` with `m = ceil(sqrt t)`, a lower bound for
/// `sum_{n > m} sin(t / n^2)`.
pub fn early_lower_bound(t: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("early lower bound needs finite t > 0"));
    }
    let m = libm::ceil(libm::sqrt(t));
    let m5 = m * m * m * m * m;
    Ok(t / (m + 1.0) - t * t * t / (30.0 * m5))
}

fn check_t(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("corridor bounds need finite t >= 0"));
    }
    Ok(())
}

/// `max_{0 <= N <= n_star} (-N + A2(N) t - B2(N) t^3)`.
pub fn lower_bound(t: f64, n_star: u32) -> Result<f64> {
    check_t(t)?;
    let mut best = f64::NEG_INFINITY;
    for n in 0..=n_star {
        best = best.max(corridor_coeffs(n)?.lower(t));
    }
    Ok(best)
}

/// `min_{0 <= N <= n_star} (N + A2(N) t - B2(N) t^3 + C2(N) t^5)`.
pub fn upper_bound(t: f64, n_star: u32) -> Result<f64> {
    check_t(t)?;
    let mut best = f64::INFINITY;
    for n in 0..=n_star {
        best = best.min(corridor_coeffs(n)?.upper(t));
    }
    Ok(best)
}
