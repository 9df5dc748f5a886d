//! Gamma and zeta functions, Euler's constant and the incomplete
//! generalized Fresnel integral.

mod fresnel;
mod gamma;
mod zeta;

pub use fresnel::{fresnel_limit, incomplete_fresnel, FresnelValue, FRESNEL_CROSSOVER};
pub use gamma::{gamma, gamma_real};
pub use zeta::{zeta, zeta_real};

use num_complex::Complex64;

use core::f64::consts::PI;

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Euler's constant `0.5772156649015329`.
pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// `sin(pi x)` with the argument reduced before multiplying by pi.
pub fn sinpi(x: f64) -> f64 {
    let n = libm::round(x);
    let r = x - n;
    let s = libm::sin(PI * r);
    if (n as i64) & 1 == 0 {
        s
    } else {
        -s
    }
}

/// `cos(pi x)` with the argument reduced before multiplying by pi.
pub fn cospi(x: f64) -> f64 {
    let n = libm::round(x);
    let r = x - n;
    let c = libm::cos(PI * r);
    if (n as i64) & 1 == 0 {
        c
    } else {
        -c
    }
}

/// Complex `sin(pi z)`, accurate near the integer zeros.
pub fn sinpi_c(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(sinpi(z.re) * libm::cosh(y), cospi(z.re) * libm::sinh(y))
}

/// Complex `cos(pi z)`, accurate near the half-integer zeros.
pub fn cospi_c(z: Complex64) -> Complex64 {
    let y = PI * z.im;
    Complex64::new(cospi(z.re) * libm::cosh(y), -sinpi(z.re) * libm::sinh(y))
}

/// Complex `exp(z) - 1` without cancellation for small `z`.
pub(crate) fn expm1_c(z: Complex64) -> Complex64 {
    let (s, c) = libm::sincos(z.im);
    let half = libm::sin(0.5 * z.im);
    let em1 = libm::expm1(z.re);
    Complex64::new(em1 * c - 2.0 * half * half, libm::exp(z.re) * s)
}
