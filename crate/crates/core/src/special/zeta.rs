use core::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use super::{expm1_c, gamma::gamma, sinpi_c};
use crate::error::{Error, PoleKind, Result};
use crate::summation::NeumaierComplex;

const LN_3_PLUS_SQRT8: f64 = 1.762_747_174_039_086;
const MAX_TERMS: usize = 360;
const MIN_TERMS: usize = 16;

/// Riemann zeta function.
///
/// For `Re s > 0` the alternating eta series is summed with the Borwein
/// (Chebyshev) weights; the number of weights grows with `|Im s|` so that the
/// truncation stays below double precision. For `Re s <= 0` the functional
/// equation maps the argument into the right half-plane.
pub fn zeta(s: Complex64) -> Result<Complex64> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Domain("zeta argument must be finite"));
    }
    if s.re == 1.0 && s.im == 0.0 {
        return Err(Error::Pole(PoleKind::Zeta));
    }
    if s.re == 0.0 && s.im == 0.0 {
        return Ok(Complex64::new(-0.5, 0.0));
    }
    if s.re > 0.0 {
        return Ok(zeta_right(s));
    }
    let one = Complex64::new(1.0, 0.0);
    let r = one - s;
    let factor = (s * LN_2 + (s - 1.0) * libm::log(PI)).exp() * sinpi_c(s * 0.5) * gamma(r)?;
    Ok(factor * zeta_right(r))
}

/// Real zeta function, `s != 1`.
pub fn zeta_real(s: f64) -> Result<f64> {
    zeta(Complex64::new(s, 0.0)).map(|z| z.re)
}

fn zeta_right(s: Complex64) -> Complex64 {
    // 1 - 2^(1-s) = -expm1((1-s) ln 2), kept accurate near s = 1.
    let denom = -expm1_c((Complex64::new(1.0, 0.0) - s) * LN_2);
    eta_borwein(s) / denom
}

fn terms_for(s: Complex64) -> usize {
    let t = libm::fabs(s.im);
    let log_gamma = gamma(s).map(|g| libm::log(g.norm())).unwrap_or(0.0);
    let need = 39.2 + libm::log(3.0 * (1.0 + 2.0 * t)) + 0.5 * PI * t - log_gamma.min(0.0);
    let n = libm::ceil(need / LN_3_PLUS_SQRT8) as usize;
    n.clamp(MIN_TERMS, MAX_TERMS)
}

fn eta_borwein(s: Complex64) -> Complex64 {
    let n = terms_for(s);
    let nf = n as f64;
    // d_k = sum_{i<=k} T_i with T_0 = 1, T_i = T_{i-1} 4 (n+i-1)(n-i+1) / ((2i-1)(2i)).
    let mut d = alloc::vec::Vec::with_capacity(n + 1);
    let mut term = 1.0;
    let mut acc = 1.0;
    d.push(acc);
    for i in 1..=n {
        let fi = i as f64;
        term *= 4.0 * (nf + fi - 1.0) * (nf - fi + 1.0) / ((2.0 * fi - 1.0) * (2.0 * fi));
        acc += term;
        d.push(acc);
    }
    let dn = d[n];
    let mut sum = NeumaierComplex::new();
    for (k, dk) in d.iter().take(n).enumerate() {
        let w = (dn - dk) / dn;
        let w = if k % 2 == 0 { w } else { -w };
        let power = (-s * libm::log((k + 1) as f64)).exp();
        sum.add(power * w);
    }
    sum.value()
}
