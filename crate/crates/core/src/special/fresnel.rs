use core::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::gamma_real;
use crate::error::{Error, Result};
use crate::quadrature::{adaptive, GaussLegendre};

/// Above this upper limit the integral is computed as the complete value minus
/// an integration-by-parts expansion of the remainder.
pub const FRESNEL_CROSSOVER: f64 = 100.0 * PI;

const PANEL_TOL: f64 = 1e-15;
const MAX_PANELS: usize = 20_000;

/// Value of an incomplete Fresnel-type integral together with an error bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelValue {
    pub value: f64,
    pub error_bound: f64,
}

/// Complete integral `(1/p) int_0^inf xi^(-1-1/p) sin(xi) d xi = Gamma(1-1/p) sin(pi/(2p))`.
pub fn fresnel_limit(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain("exponent p must be finite and exceed 1"));
    }
    Ok(gamma_real(1.0 - 1.0 / p)? * libm::sin(PI / (2.0 * p)))
}

/// `(1/p) int_0^x xi^(-1-1/p) sin(xi) d xi` for `p > 1`, `x >= 0`.
///
/// `[0, min(x, 1)]` is integrated term by term from the sine series, `[1, x]`
/// by adaptive Gauss-Legendre panels one half-period wide, and for
/// `x > FRESNEL_CROSSOVER` the result is the complete integral minus the
/// asymptotic expansion of the tail.
pub fn incomplete_fresnel(p: f64, x: f64) -> Result<FresnelValue> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain("exponent p must be finite and exceed 1"));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain("upper limit must be nonnegative"));
    }
    if x == 0.0 {
        return Ok(FresnelValue { value: 0.0, error_bound: 0.0 });
    }
    let q = 1.0 / p;
    let a = 1.0 + q;
    if x == f64::INFINITY || x > FRESNEL_CROSSOVER {
        let alpha = fresnel_limit(p)?;
        if x == f64::INFINITY {
            return Ok(FresnelValue { value: alpha, error_bound: 8.0 * f64::EPSILON * alpha });
        }
        let (tail, tail_err) = tail_by_parts(a, x);
        let value = alpha - q * tail;
        let error_bound = q * tail_err + 8.0 * f64::EPSILON * (alpha + q * libm::fabs(tail));
        return Ok(FresnelValue { value, error_bound });
    }
    let (head, head_err) = head_series(q, x.min(1.0));
    let mut value = head;
    let mut err = head_err;
    if x > 1.0 {
        let coarse = GaussLegendre::new(16);
        let fine = GaussLegendre::new(32);
        let res = adaptive(&coarse, &fine, 1.0, x, PI, PANEL_TOL, MAX_PANELS, |xi| {
            libm::exp(-a * libm::log(xi)) * libm::sin(xi)
        });
        value += res.value;
        // rounding in each panel sum scales with the integral of |f| over [1, x] <= p
        err += res.error_estimate + 4.0 * f64::EPSILON * libm::sqrt(res.panels as f64) * p;
        if !res.converged {
            err += libm::fabs(res.value);
        }
    }
    Ok(FresnelValue { value: q * value, error_bound: q * err + 4.0 * f64::EPSILON * libm::fabs(q * value) })
}

/// `int_0^y xi^(-1-q) sin(xi) d xi` for `0 < y <= 1` from the Maclaurin series of sine.
/// The terms alternate and decrease, so the first omitted term bounds the error.
fn head_series(q: f64, y: f64) -> (f64, f64) {
    let y2 = y * y;
    let mut power = libm::pow(y, 1.0 - q);
    let mut fact = 1.0;
    let mut sum = 0.0;
    let mut k = 0u32;
    loop {
        let m = (2 * k + 1) as f64;
        let term = power / (fact * (m - q));
        if term < 1e-18 * libm::fabs(sum) || k > 40 {
            return (sum, term + 4.0 * f64::EPSILON * libm::fabs(sum));
        }
        sum += if k % 2 == 0 { term } else { -term };
        power *= y2;
        fact *= (m + 1.0) * (m + 2.0);
        k += 1;
    }
}

/// `int_x^inf xi^(-a) sin(xi) d xi` by repeated integration by parts:
/// `int_x^inf xi^(-a) e^(i xi) = i e^(ix) x^(-a) sum_k (a)_k (-i/x)^k + R_K`
/// with `|R_K| <= 2 (a)_K x^(-a-K)`.
fn tail_by_parts(a: f64, x: f64) -> (f64, f64) {
    let lead = libm::exp(-a * libm::log(x));
    let mut sum = Complex64::new(0.0, 0.0);
    let mut coeff = Complex64::new(1.0, 0.0);
    let mut tk = 1.0;
    let mut k = 0u32;
    let rem = loop {
        sum += coeff * tk;
        let next = tk * (a + k as f64) / x;
        k += 1;
        coeff *= Complex64::new(0.0, -1.0);
        if next >= tk || next < 1e-18 || k >= 60 {
            break 2.0 * lead * next;
        }
        tk = next;
    };
    let (s, c) = libm::sincos(x);
    let j = Complex64::new(0.0, 1.0) * Complex64::new(c, s) * sum * lead;
    (j.im, rem)
}
