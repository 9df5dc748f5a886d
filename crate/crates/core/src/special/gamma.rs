use core::f64::consts::PI;

use num_complex::Complex64;

use super::sinpi_c;
use crate::error::{Error, PoleKind, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Lanczos is used close to the real axis, Stirling's series elsewhere.
const LANCZOS_MAX_IM: f64 = 6.0;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// `B_2k / (2k (2k - 1))` for `k = 1..=10`, the Stirling series coefficients.
const STIRLING: [f64; 10] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
    -174_611.0 / 125_400.0,
];

/// Below this modulus the argument is shifted upward before the Stirling series is applied.
const STIRLING_MIN_ABS: f64 = 17.0;

/// Complex gamma function.
///
/// For `Re z >= 1/2` the Lanczos approximation (g = 7, nine terms) is used near
/// the real axis and Stirling's series with upward recurrence further out;
/// `Re z < 1/2` goes through the reflection formula
/// `Gamma(z) Gamma(1 - z) = pi / sin(pi z)`.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain("gamma argument must be finite"));
    }
    if z.im == 0.0 && z.re <= 0.0 && z.re == libm::round(z.re) {
        return Err(Error::Pole(PoleKind::Gamma(z.re as i64)));
    }
    if z.re < 0.5 {
        let one = Complex64::new(1.0, 0.0);
        return Ok(Complex64::new(PI, 0.0) / (sinpi_c(z) * gamma_right(one - z)));
    }
    Ok(gamma_right(z))
}

fn gamma_right(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re <= 171.0 && z.re == libm::round(z.re) {
        let mut f = 1.0;
        for k in 2..(z.re as u32) {
            f *= k as f64;
        }
        return Complex64::new(f, 0.0);
    }
    if libm::fabs(z.im) <= LANCZOS_MAX_IM && z.re <= 140.0 {
        return lanczos(z);
    }
    let mut w = z;
    let mut prod = Complex64::new(1.0, 0.0);
    while w.norm() < STIRLING_MIN_ABS {
        prod *= w;
        w += 1.0;
    }
    let lg = ln_gamma_stirling(w);
    let (s, c) = libm::sincos(lg.im);
    Complex64::new(c, s) * libm::exp(lg.re) / prod
}

fn lanczos(z: Complex64) -> Complex64 {
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        x += *c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    (t.ln() * (z + 0.5) - t).exp() * x * SQRT_2PI
}

fn ln_gamma_stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING {
        series += pow * c;
        pow *= inv2;
    }
    // (w - 1/2) ln w - w, with real and imaginary parts assembled separately
    let ln_abs = libm::log(w.norm());
    let arg = libm::atan2(w.im, w.re);
    let x = w.re - 0.5;
    let re = x * ln_abs - w.im * arg - w.re;
    let im = w.im * ln_abs + x * arg - w.im;
    Complex64::new(re + HALF_LN_2PI, im) + series
}

/// Real gamma function.
pub fn gamma_real(x: f64) -> Result<f64> {
    gamma(Complex64::new(x, 0.0)).map(|z| z.re)
}
