//! Mellin-side description of `S_p`.
//!
//! In the variable `sigma = s/p` the series is the inverse Mellin integral
//! `S_p(t) = (1/2 pi i) int t^sigma Qbar_p(sigma) dsigma` over a vertical line
//! in the fundamental strip `1/p < Re sigma < 1`, with
//! `Qbar_p(sigma) = zeta(p sigma) Gamma(-sigma) sin(-pi sigma / 2)`.
//! Poles to the right (odd positive integers) give the Taylor series; the
//! zeta pole at `sigma = 1/p` gives the trend.

use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Error, PoleKind, Result};
use crate::quadrature::GaussLegendre;
use crate::series::{EvalResult, Method};
use crate::special::{cospi_c, gamma, sinpi_c, zeta, zeta_real};
use crate::summation::Neumaier;
use crate::Complex64;

/// The kernel `Qbar_p` for a fixed exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MellinKernel {
    p: f64,
}

impl MellinKernel {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain("exponent p must be finite and exceed 1"));
        }
        Ok(MellinKernel { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `(1/p, 1)`, the strip of `Re sigma` in which the Mellin integral converges.
    pub fn fundamental_strip(&self) -> (f64, f64) {
        (1.0 / self.p, 1.0)
    }

    /// Residue of `Qbar_p` at the zeta pole `sigma = 1/p`, which is `alpha_p`.
    pub fn zeta_residue(&self) -> Result<f64> {
        crate::series::trend_alpha(self.p)
    }
}

/// `Gamma(-z) sin(-pi z / 2)`, with the removable singularities at even
/// nonnegative integers filled in.
fn gamma_sine(z: Complex64) -> Result<Complex64> {
    if z.re >= 0.0 {
        // Gamma(-z) sin(-pi z/2) = pi / (2 cos(pi z/2) Gamma(1+z)) by reflection
        let c = cospi_c(z * 0.5);
        if c.re == 0.0 && c.im == 0.0 {
            return Err(Error::Pole(PoleKind::KernelGamma(libm::round(z.re) as i64)));
        }
        let g = gamma(z + 1.0)?;
        Ok(Complex64::new(FRAC_PI_2, 0.0) / (c * g))
    } else {
        let g = gamma(-z)?;
        Ok(g * -sinpi_c(z * 0.5))
    }
}

/// `Qbar_p(sigma) = zeta(p sigma) Gamma(-sigma) sin(-pi sigma / 2)`.
///
/// Poles: `sigma = 1/p` (from zeta) and odd positive integers (from Gamma).
/// At even nonnegative integers the Gamma poles cancel against zeros of the
/// sine; in particular `Qbar_p(0) = zeta(0) pi/2 = -pi/4` for every `p`.
pub fn qbar(kernel: &MellinKernel, sigma: Complex64) -> Result<Complex64> {
    if sigma.re == 0.0 && sigma.im == 0.0 {
        return Ok(Complex64::new(-FRAC_PI_4, 0.0));
    }
    if !sigma.re.is_finite() || !sigma.im.is_finite() {
        return Err(Error::Domain("sigma must be finite"));
    }
    if sigma.im == 0.0 && sigma.re > 0.0 && sigma.re == libm::round(sigma.re) && (sigma.re as i64) % 2 == 1 {
        return Err(Error::Pole(PoleKind::KernelGamma(sigma.re as i64)));
    }
    let z = match zeta(sigma * kernel.p) {
        Ok(z) => z,
        Err(Error::Pole(_)) => return Err(Error::Pole(PoleKind::KernelZeta)),
        Err(e) => return Err(e),
    };
    Ok(z * gamma_sine(sigma)?)
}

/// Taylor series `sum_k (-1)^k zeta(p(2k+1)) t^(2k+1) / (2k+1)!`.
///
/// Once `2k+1 > |t|` the terms decrease and alternate, so the first term
/// below `abs_tol` bounds the truncation error; `zeta(p(2k+1)) <= zeta(p)`
/// gives the term bound. Cancellation makes the series useless for large
/// `|t|`; when the rounding bound alone exceeds `abs_tol` a budget error is
/// returned.
pub fn taylor_eval(p: f64, t: f64, abs_tol: f64) -> Result<EvalResult> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain("exponent p must be finite and exceed 1"));
    }
    if !(abs_tol > 0.0) || !abs_tol.is_finite() {
        return Err(Error::Domain("abs_tol must be positive and finite"));
    }
    if !t.is_finite() {
        return Err(Error::Domain("t must be finite"));
    }
    if t == 0.0 {
        return Ok(EvalResult { value: 0.0, error_bound: 0.0, terms_used: 0, method: Method::Taylor });
    }
    let a = libm::fabs(t);
    let zp = zeta_real(p)?;
    let mut acc = Neumaier::new();
    let mut power = a; // a^(2k+1) / (2k+1)!
    let mut mass = 0.0;
    let mut k = 0u64;
    // zeta values carry a few ulps each and the sum is compensated
    let round_of = |mass: f64| 8.0 * f64::EPSILON * mass;
    loop {
        let m = (2 * k + 1) as f64;
        if m > a {
            if round_of(mass) >= abs_tol {
                return Err(Error::Budget { what: "taylor series", achieved: round_of(mass) });
            }
            if power * zp + round_of(mass) <= abs_tol {
                break;
            }
        }
        let term = zeta_real(p * m)? * power;
        mass += term;
        acc.add(if k % 2 == 0 { term } else { -term });
        k += 1;
        power *= a * a / ((m + 1.0) * (m + 2.0));
        if k > 2000 {
            return Err(Error::Budget { what: "taylor series", achieved: power * zp });
        }
    }
    let value = acc.value();
    let error_bound = power * zp + round_of(mass);
    Ok(EvalResult {
        value: if t < 0.0 { -value } else { value },
        error_bound,
        terms_used: k,
        method: Method::Taylor,
    })
}

/// Truncated contour integral `(1/2 pi) int_{-v_max}^{v_max} t^(iv) Qbar_p(iv) dv`
/// on the imaginary axis.
///
/// The integrand at `-v` is the conjugate of that at `v`, so this equals
/// `(1/pi) int_0^{v_max} Re(t^(iv) Qbar_p(iv)) dv`, evaluated with a 16-point
/// Gauss rule on `panels` equal panels. The untruncated integral
/// exists only as a distribution; this is a diagnostic, with no claim that
/// it converges to the fluctuation pointwise.
pub fn contour_fluctuation(kernel: &MellinKernel, t: f64, v_max: f64, panels: usize) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain("contour integral needs finite t > 0"));
    }
    if !(v_max > 0.0) || !v_max.is_finite() {
        return Err(Error::Domain("v_max must be positive and finite"));
    }
    if panels == 0 {
        return Err(Error::Domain("panels must be positive"));
    }
    let rule = GaussLegendre::new(16);
    let u = libm::log(t);
    let width = v_max / panels as f64;
    let mut acc = Neumaier::new();
    let mut failure = None;
    for i in 0..panels {
        let lo = width * i as f64;
        let hi = if i + 1 == panels { v_max } else { lo + width };
        let part = rule.integrate(lo, hi, |v| match qbar(kernel, Complex64::new(0.0, v)) {
            Ok(q) => {
                let (s, c) = libm::sincos(v * u);
                q.re * c - q.im * s
            }
            Err(e) => {
                failure = Some(e);
                0.0
            }
        });
        acc.add(part);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(acc.value() / PI)
}
