//! Hermite-windowed averages of the fluctuation in logarithmic time.
//!
//! `A_n(w; kappa) = int DeltaS_p(e^u) psi_n(kappa (u - w)) du` is computed two
//! ways. The Fourier path integrates `Qbar_p(iv)` against the Fourier image of
//! the window. The direct path works in real space: either plain quadrature of
//! the fluctuation (small windows) or a termwise sum over the series, where
//! each term's window integral is taken on a rotated contour and the large-`n`
//! part of the sum is closed by Euler-Maclaurin.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::mellin::{qbar, MellinKernel};
use crate::quadrature::{adaptive, GaussLegendre};
use crate::series::{decompose, trend_alpha, SeriesParams, BERNOULLI_OVER_FACTORIAL};
use crate::summation::{Neumaier, NeumaierComplex};
use crate::Complex64;

/// Largest Hermite index accepted by the public functions.
pub const MAX_HERMITE_INDEX: usize = 12;

/// `pi^(-1/4)`.
const PI_M14: f64 = 0.751_125_544_464_942_5;

/// Window `psi_n(kappa (u - w))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteWindow {
    pub n: usize,
    pub w: f64,
    pub kappa: f64,
}

impl HermiteWindow {
    pub fn new(n: usize, w: f64, kappa: f64) -> Result<Self> {
        if n > MAX_HERMITE_INDEX {
            return Err(Error::Domain("Hermite index exceeds the configured maximum"));
        }
        if !(kappa > 0.0) || !kappa.is_finite() || !w.is_finite() {
            return Err(Error::Domain("window needs finite w and kappa > 0"));
        }
        Ok(HermiteWindow { n, w, kappa })
    }
}

fn check_index(n: usize) -> Result<()> {
    if n > MAX_HERMITE_INDEX {
        return Err(Error::Domain("Hermite index exceeds the configured maximum"));
    }
    Ok(())
}

/// Physicists' Hermite polynomial from `H_{n+1} = 2u H_n - 2n H_{n-1}`.
pub fn hermite_poly(n: usize, u: f64) -> Result<f64> {
    check_index(n)?;
    let (mut h0, mut h1) = (1.0, 2.0 * u);
    if n == 0 {
        return Ok(h0);
    }
    for k in 1..n {
        let h2 = 2.0 * u * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    Ok(h1)
}

/// Hermite function `psi_n(u) = (2^n n! sqrt(pi))^(-1/2) e^(-u^2/2) H_n(u)`,
/// via the normalized recurrence, which neither overflows nor loses the
/// Gaussian factor.
pub fn hermite_fn(n: usize, u: f64) -> Result<f64> {
    check_index(n)?;
    Ok(psi_real(n, u))
}

fn psi_real(n: usize, u: f64) -> f64 {
    let mut a = PI_M14 * libm::exp(-0.5 * u * u);
    if n == 0 {
        return a;
    }
    let mut b = core::f64::consts::SQRT_2 * u * a;
    for k in 1..n {
        let kf = k as f64;
        let c = libm::sqrt(2.0 / (kf + 1.0)) * u * b - libm::sqrt(kf / (kf + 1.0)) * a;
        a = b;
        b = c;
    }
    b
}

/// `psi_0(z), ..., psi_{len-1}(z)` for complex `z`.
fn psi_all_c(z: Complex64, out: &mut [Complex64]) {
    if out.is_empty() {
        return;
    }
    let g = (z * z * -0.5).exp() * PI_M14;
    out[0] = g;
    if out.len() > 1 {
        out[1] = z * g * core::f64::consts::SQRT_2;
    }
    for k in 1..out.len().saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = z * out[k] * libm::sqrt(2.0 / (kf + 1.0)) - out[k - 1] * libm::sqrt(kf / (kf + 1.0));
    }
}

fn psi_c(n: usize, z: Complex64) -> Complex64 {
    let mut buf = [Complex64::new(0.0, 0.0); MAX_HERMITE_INDEX + 1];
    psi_all_c(z, &mut buf[..=n]);
    buf[n]
}

/// Prefactor and part selection shared by the Fourier-side formulas:
/// `(-1)^(n/2) sqrt(2/pi) Re` for even `n`, `(-1)^((n+1)/2) sqrt(2/pi) Im` for odd.
fn fourier_projection(n: usize, z: Complex64) -> f64 {
    let f = libm::sqrt(2.0 / PI);
    if n % 2 == 0 {
        let s = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        s * f * z.re
    } else {
        let s = if ((n + 1) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        s * f * z.im
    }
}

/// Fourier path: `int_0^v_max (1/kappa) psi_n(v/kappa) Qbar_p(iv) e^(ivw) dv`
/// with a 16-point Gauss rule on `panels` equal panels, projected by parity.
///
/// `v_max` must put the window below `1e-16` (and past its last turning
/// point); the neglected tail is then below rounding.
pub fn a_functional_fourier(params: &SeriesParams, win: HermiteWindow, v_max: f64, panels: usize) -> Result<f64> {
    let HermiteWindow { n, w, kappa } = win;
    check_index(n)?;
    if panels == 0 {
        return Err(Error::Domain("panels must be positive"));
    }
    let x = v_max / kappa;
    if !(x > libm::sqrt(2.0 * n as f64 + 1.0)) || libm::fabs(psi_real(n, x)) >= 1e-16 {
        return Err(Error::Domain("v_max too small: window not negligible at the cut"));
    }
    let kernel = MellinKernel::new(params.p())?;
    let rule = GaussLegendre::new(16);
    let width = v_max / panels as f64;
    let mut acc = NeumaierComplex::new();
    let mut failure = None;
    for i in 0..panels {
        let lo = width * i as f64;
        let hi = if i + 1 == panels { v_max } else { lo + width };
        let part = rule.integrate_complex(lo, hi, |v| match qbar(&kernel, Complex64::new(0.0, v)) {
            Ok(q) => q * Complex64::from_polar(psi_real(n, v / kappa) / kappa, v * w),
            Err(e) => {
                failure = Some(e);
                Complex64::new(0.0, 0.0)
            }
        });
        acc.add(part);
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(fourier_projection(n, acc.value()))
}

/// Crude but safe bound on `|DeltaS_p(t)|`: `|S_p(t)| <= (p/(p-1)) t^(1/p)`
/// from `|sin x| <= min(1, x)`, plus the trend.
fn fluctuation_envelope(p: f64, alpha: f64, u: f64) -> f64 {
    (p / (p - 1.0) + alpha) * libm::exp(u / p)
}

/// Estimate of `int_{|kappa(u-w)| > h} |DeltaS| |psi_n|` from the envelope.
fn window_tail(params: &SeriesParams, win: HermiteWindow, h: f64) -> Result<f64> {
    let p = params.p();
    let alpha = trend_alpha(p)?;
    let step = 0.01;
    let mut total = 0.0;
    let mut x = h;
    while x < h + 40.0 {
        let ps = libm::fabs(psi_real(win.n, x)).max(libm::fabs(psi_real(win.n, x + step)));
        let right = fluctuation_envelope(p, alpha, win.w + (x + step) / win.kappa);
        let left = fluctuation_envelope(p, alpha, win.w - x / win.kappa);
        total += 2.0 * ps * (right + left) * step / win.kappa;
        x += step;
    }
    Ok(total)
}

/// Smallest half-width (in units of `kappa (u - w)`, on a 0.5 grid) whose
/// window tail estimate is below `abs_tol / 4`.
pub fn window_halfwidth(params: &SeriesParams, win: HermiteWindow, abs_tol: f64) -> Result<f64> {
    let mut h = libm::ceil(libm::sqrt(2.0 * win.n as f64 + 1.0)) + 1.0;
    while h < 80.0 {
        if window_tail(params, win, h)? < 0.25 * abs_tol {
            return Ok(h);
        }
        h += 0.5;
    }
    Err(Error::Domain("no window half-width below 80 reaches the tolerance"))
}

/// Panel budget for plain quadrature of the fluctuation in [`a_functional_direct`].
pub const DIRECT_PANEL_BUDGET: usize = 1024;

/// Direct path: `int DeltaS_p(e^u) psi_n(kappa (u - w)) du` over
/// `|kappa (u - w)| <= quad_halfwidth`, computed in real space.
///
/// When the window reaches only moderate `t = e^u`, the fluctuation from
/// [`decompose`] is integrated by adaptive quadrature with panels no wider
/// than `(pi/8) e^-u` at the right end of each unit subinterval. Otherwise
/// the integrand oscillates too fast and the series is integrated termwise
/// (see the module docs).
pub fn a_functional_direct(params: &SeriesParams, win: HermiteWindow, quad_halfwidth: f64, abs_tol: f64) -> Result<f64> {
    check_index(win.n)?;
    if !(abs_tol > 0.0) || !abs_tol.is_finite() {
        return Err(Error::Domain("abs_tol must be positive and finite"));
    }
    if !(quad_halfwidth > 0.0) || !quad_halfwidth.is_finite() {
        return Err(Error::Domain("quad_halfwidth must be positive and finite"));
    }
    if window_tail(params, win, quad_halfwidth)? > 0.25 * abs_tol {
        return Err(Error::Domain("quad_halfwidth too small: window tail exceeds the tolerance"));
    }
    let u_lo = win.w - quad_halfwidth / win.kappa;
    let u_hi = win.w + quad_halfwidth / win.kappa;
    let estimate = 1.6 * (8.0 / PI) * libm::exp(u_hi);
    if estimate <= DIRECT_PANEL_BUDGET as f64 {
        direct_quadrature(params, win, u_lo, u_hi, abs_tol)
    } else {
        termwise(params, win, quad_halfwidth, abs_tol)
    }
}

fn direct_quadrature(params: &SeriesParams, win: HermiteWindow, u_lo: f64, u_hi: f64, abs_tol: f64) -> Result<f64> {
    let coarse = GaussLegendre::new(8);
    let fine = GaussLegendre::new(16);
    let series_tol = 0.1 * abs_tol;
    let mut acc = Neumaier::new();
    let mut err_total = 0.0;
    let mut failure = None;
    let chunks = libm::ceil(u_hi - u_lo).max(1.0) as usize;
    let step = (u_hi - u_lo) / chunks as f64;
    for i in 0..chunks {
        let a = u_lo + step * i as f64;
        let b = if i + 1 == chunks { u_hi } else { a + step };
        let max_width = (PI / 8.0) * libm::exp(-b).max(1e-300);
        let max_width = max_width.min(0.25);
        let tol = 0.5 * abs_tol * (b - a) / (u_hi - u_lo);
        let r = adaptive(&coarse, &fine, a, b, max_width, tol, 4 * DIRECT_PANEL_BUDGET, |u| {
            match decompose(params, libm::exp(u), series_tol) {
                Ok(d) => d.fluctuation * psi_real(win.n, win.kappa * (u - win.w)),
                Err(e) => {
                    failure = Some(e);
                    0.0
                }
            }
        });
        if !r.converged {
            return Err(Error::Budget { what: "direct window quadrature", achieved: r.error_estimate });
        }
        acc.add(r.value);
        err_total += r.error_estimate;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    if err_total > abs_tol {
        return Err(Error::Budget { what: "direct window quadrature", achieved: err_total });
    }
    Ok(acc.value())
}

// ---------------------------------------------------------------------------
// Termwise real-space evaluation
//
// With h(x) = G(p ln x) and G(c) = int sin(e^(u-c)) psi_n(kappa(u-w)) du,
// the window integral of the series is sum_{m>=1} h(m) and that of the trend
// is int_0^inf h(x) dx, because int_0^inf sin(T x^-p) dx = alpha_p T^(1/p).
// So A = sum_m h(m) - int_0^inf h. Substituting u = y + c and rotating
// y -> y + i theta turns sin(e^y) into a decaying exponential.

struct Termwise {
    w: f64,
    kappa: f64,
    theta: f64,
    /// window half-width in units of kappa (u - w)
    half: f64,
    /// above this y the rotated exponential is below e^-45
    y_max: f64,
    rule: GaussLegendre,
}

impl Termwise {
    fn new(win: HermiteWindow, half: f64) -> Self {
        let theta = FRAC_PI_2.min(1.2 / win.kappa);
        Termwise {
            w: win.w,
            kappa: win.kappa,
            theta,
            half,
            y_max: libm::log(45.0 / libm::sin(theta)),
            rule: GaussLegendre::new(16),
        }
    }

    /// `d^j/dc^j G(c)` for `j = 0..coef.len()`, where `coef[j]` expands
    /// `psi_n^(j)` in Hermite functions.
    fn g_derivs(&self, c: f64, coef: &[Vec<f64>], out: &mut [f64]) {
        let y_lo = self.w - c - self.half / self.kappa;
        let right = self.w - c + self.half / self.kappa;
        let y_hi = right.min(self.y_max);
        for o in out.iter_mut() {
            *o = 0.0;
        }
        if y_hi <= y_lo {
            return;
        }
        // when the whole window lies below y_max, drop the constant part of
        // exp(iz): its window integral is real and only costs precision
        let subtract_one = right <= self.y_max;
        let (st, ct) = libm::sincos(self.theta);
        let rot = Complex64::new(0.0, self.theta);
        let len = coef.iter().map(|v| v.len()).max().unwrap_or(1);
        let mut psi = vec![Complex64::new(0.0, 0.0); len];
        let mut acc: Vec<NeumaierComplex> = (0..out.len()).map(|_| NeumaierComplex::new()).collect();
        let mut y = y_lo;
        while y < y_hi {
            let ey = libm::exp(y);
            let width = 0.25 * (1.0f64).min(1.0 / self.kappa).min(2.0 / (ey * libm::fabs(ct) + 1.0));
            let b = (y + width).min(y_hi);
            let half = 0.5 * (b - y);
            let mid = 0.5 * (b + y);
            for (x, wgt) in self.rule.nodes().iter().zip(self.rule.weights()) {
                let yy = mid + half * x;
                let e = libm::exp(yy);
                // i e^(y + i theta) = e^y (-sin theta + i cos theta)
                let iz = Complex64::new(-e * st, e * ct);
                let phase = if subtract_one { crate::special::expm1_c(iz) } else { iz.exp() };
                let arg = (Complex64::new(yy + c - self.w, 0.0) + rot) * self.kappa;
                psi_all_c(arg, &mut psi);
                let mut kj = 1.0;
                for (j, cj) in coef.iter().enumerate() {
                    let mut s = Complex64::new(0.0, 0.0);
                    for (k, ck) in cj.iter().enumerate() {
                        if *ck != 0.0 {
                            s += psi[k] * *ck;
                        }
                    }
                    acc[j].add(phase * s * (kj * wgt * half));
                    kj *= self.kappa;
                }
            }
            y = b;
        }
        for (o, a) in out.iter_mut().zip(acc) {
            *o = a.value().im;
        }
    }
}

/// `psi_n^(j)` as coefficients over `psi_0..psi_{n+j}`, from
/// `psi_k' = sqrt(k/2) psi_{k-1} - sqrt((k+1)/2) psi_{k+1}`.
fn derivative_coefficients(n: usize, max_order: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(max_order + 1);
    let mut cur = vec![0.0; n + 1];
    cur[n] = 1.0;
    out.push(cur.clone());
    for _ in 0..max_order {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, &ck) in cur.iter().enumerate() {
            if ck == 0.0 {
                continue;
            }
            let kf = k as f64;
            if k > 0 {
                next[k - 1] += ck * libm::sqrt(kf / 2.0);
            }
            next[k + 1] -= ck * libm::sqrt((kf + 1.0) / 2.0);
        }
        out.push(next.clone());
        cur = next;
    }
    out
}

/// Number of Euler-Maclaurin correction terms in the termwise path.
const TERMWISE_EM_TERMS: usize = 6;

fn termwise(params: &SeriesParams, win: HermiteWindow, half: f64, abs_tol: f64) -> Result<f64> {
    let p = params.p();
    let tw = Termwise::new(win, half);
    let m0 = libm::ceil((10.0 * p / win.kappa).max(32.0)).min(4096.0) as u64;
    let max_order = 2 * TERMWISE_EM_TERMS + 1;
    let coef0 = derivative_coefficients(win.n, 0);
    let mut g = [0.0f64; 1];

    let mut head = Neumaier::new();
    for m in 1..m0 {
        tw.g_derivs(p * libm::log(m as f64), &coef0, &mut g);
        head.add(g[0]);
    }

    // int_0^{m0} h(x) dx = (1/p) int G(c) e^(c/p) dc over c < p ln m0
    let c_hi = p * libm::log(m0 as f64);
    let c_lo = win.w - half / win.kappa - tw.y_max;
    let mut integral = Neumaier::new();
    if c_lo < c_hi {
        let width = 0.25 * (1.0f64).min(1.0 / win.kappa);
        let panels = libm::ceil((c_hi - c_lo) / width).max(1.0) as usize;
        let step = (c_hi - c_lo) / panels as f64;
        for i in 0..panels {
            let a = c_lo + step * i as f64;
            let b = if i + 1 == panels { c_hi } else { a + step };
            integral.add(tw.rule.integrate(a, b, |c| {
                let mut gg = [0.0f64; 1];
                tw.g_derivs(c, &coef0, &mut gg);
                gg[0] * libm::exp(c / p) / p
            }));
        }
    }

    // Euler-Maclaurin for sum_{m >= m0} h(m) - int_{m0}^inf h
    let coef = derivative_coefficients(win.n, max_order);
    let mut gd = vec![0.0f64; max_order + 1];
    tw.g_derivs(c_hi, &coef, &mut gd);
    let x = m0 as f64;
    // d^m/dx^m F(ln x) = x^-m sum_j s(m, j) F^(j)(ln x), s = signed Stirling numbers of the first kind
    let mut stirling = vec![vec![0.0f64; max_order + 1]; max_order + 1];
    stirling[0][0] = 1.0;
    for m in 0..max_order {
        for j in 1..=m + 1 {
            stirling[m + 1][j] = stirling[m][j - 1] - m as f64 * stirling[m][j];
        }
    }
    let h_deriv = |m: usize| -> f64 {
        let mut s = 0.0;
        let mut pj = 1.0;
        for j in 0..=m {
            s += stirling[m][j] * pj * gd[j];
            pj *= p;
        }
        s * libm::pow(x, -(m as f64))
    };
    let mut em = Neumaier::new();
    em.add(0.5 * gd[0]);
    for k in 1..=TERMWISE_EM_TERMS {
        em.add(-BERNOULLI_OVER_FACTORIAL[2 * k] * h_deriv(2 * k - 1));
    }
    let next = libm::fabs(BERNOULLI_OVER_FACTORIAL[2 * TERMWISE_EM_TERMS + 2] * h_deriv(max_order));
    let scale = head.value().abs() + integral.value().abs() + libm::fabs(gd[0]);
    let err = 10.0 * next + 1e-14 * scale;
    if err > abs_tol {
        return Err(Error::Budget { what: "termwise window sum", achieved: err });
    }
    Ok(head.value() + em.value() - integral.value())
}

// ---------------------------------------------------------------------------
// Asymptotic expansion

/// Derivatives `g^(l)(0)`, `l = 0..=order`, of `g(v) = (1/kappa) psi_n(v/kappa) Qbar_p(iv)`
/// from the Cauchy integral on a circle of radius `r`, trapezoid rule.
fn kernel_derivatives(kernel: &MellinKernel, win: HermiteWindow, order: usize, r: f64) -> Result<Vec<Complex64>> {
    const POINTS: usize = 64;
    let mut sums = vec![Complex64::new(0.0, 0.0); order + 1];
    for k in 0..POINTS {
        let phi = 2.0 * PI * k as f64 / POINTS as f64;
        let e = Complex64::from_polar(1.0, phi);
        let v = e * r;
        let q = qbar(kernel, Complex64::new(0.0, 1.0) * v)?;
        let g = psi_c(win.n, v / win.kappa) * q / win.kappa;
        let mut rot = Complex64::new(1.0, 0.0);
        let back = e.conj();
        for s in sums.iter_mut() {
            *s += g * rot;
            rot *= back;
        }
    }
    let mut fact = 1.0;
    let mut rl = 1.0;
    let mut out = Vec::with_capacity(order + 1);
    for (l, s) in sums.into_iter().enumerate() {
        if l > 0 {
            fact *= l as f64;
            rl *= r;
        }
        out.push(s * (fact / (POINTS as f64 * rl)));
    }
    Ok(out)
}

/// Largest expansion order accepted by [`a_asymptotic`].
pub const MAX_ASYMPTOTIC_ORDER: usize = 4;

/// The large-`w` expansion
/// `int_0^inf g(v) e^(ivw) dv ~ sum_{l>=1} (2 pi/w)^l g^(l)(0) sum_{j=0}^{l} (i/2pi)^(j+1) / (l-j)!`
/// truncated after `order` terms and projected like the Fourier path.
///
/// The derivatives of `g(v) = (1/kappa) psi_n(v/kappa) Qbar_p(iv)` at 0 are
/// Cauchy integrals on circles inside the disc free of the pole at
/// `v = -i/p`; two radii must agree or an instability error is returned.
pub fn a_asymptotic(params: &SeriesParams, win: HermiteWindow, order: usize) -> Result<f64> {
    check_index(win.n)?;
    if order == 0 || order > MAX_ASYMPTOTIC_ORDER {
        return Err(Error::Domain("asymptotic order must lie in 1..=4"));
    }
    if win.w == 0.0 {
        return Err(Error::Domain("asymptotic expansion needs w != 0"));
    }
    let kernel = MellinKernel::new(params.p())?;
    let r = 0.4 / params.p();
    let d1 = kernel_derivatives(&kernel, win, order, r)?;
    let d2 = kernel_derivatives(&kernel, win, order, 0.5 * r)?;
    let mut scale = 0.0f64;
    for d in &d1 {
        scale = scale.max(d.norm());
    }
    for (a, b) in d1.iter().zip(&d2) {
        if (*a - *b).norm() > 1e-9 * scale.max(1e-300) {
            return Err(Error::Instability("kernel derivatives disagree between contour radii"));
        }
    }
    let i_over = Complex64::new(0.0, 1.0 / (2.0 * PI));
    let mut total = Complex64::new(0.0, 0.0);
    let mut factor = 1.0;
    for l in 1..=order {
        factor *= 2.0 * PI / win.w;
        let mut inner = Complex64::new(0.0, 0.0);
        let mut pw = i_over;
        let mut inv_fact = [1.0f64; MAX_ASYMPTOTIC_ORDER + 1];
        for k in 1..=MAX_ASYMPTOTIC_ORDER {
            inv_fact[k] = inv_fact[k - 1] / k as f64;
        }
        for j in 0..=l {
            inner += pw * inv_fact[l - j];
            pw *= i_over;
        }
        total += d1[l] * inner * factor;
    }
    Ok(fourier_projection(win.n, total))
}

/// `pi^(1/4) / sqrt(2 pi)`, turning `A_0(w; 1)` into a unit Gaussian average.
pub const GAUSSIAN_AVERAGE_FACTOR: f64 = 0.531_125_966_013_598_5;

/// Mean of `DeltaS_p(e^u)` under the unit Gaussian centered at `w`, from the direct path.
pub fn gaussian_average(params: &SeriesParams, w: f64) -> Result<f64> {
    let win = HermiteWindow::new(0, w, 1.0)?;
    let tol = 1e-10;
    let half = window_halfwidth(params, win, tol)?;
    Ok(GAUSSIAN_AVERAGE_FACTOR * a_functional_direct(params, win, half, tol)?)
}
