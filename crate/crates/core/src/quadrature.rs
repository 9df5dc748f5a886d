//! Gauss-Legendre rules and a simple adaptive panel integrator.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::summation::{Neumaier, NeumaierComplex};

/// Gauss-Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre polynomial.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = alloc::vec![0.0; n];
        let mut weights = alloc::vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if libm::fabs(dx) < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integral of `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Neumaier::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * x));
        }
        half * acc.value()
    }

    /// Integral of `f` over `[a, b]` together with the integral of `|f|`.
    pub fn integrate_with_abs<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> (f64, f64) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Neumaier::new();
        let mut abs = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            let v = w * f(mid + half * x);
            acc.add(v);
            abs += libm::fabs(v);
        }
        (half * acc.value(), libm::fabs(half) * abs)
    }

    /// Integral of a complex-valued `f` over `[a, b]`.
    pub fn integrate_complex<F: FnMut(f64) -> Complex64>(&self, a: f64, b: f64, mut f: F) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = NeumaierComplex::new();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(mid + half * x) * *w);
        }
        acc.value() * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of [`adaptive`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptiveResult {
    pub value: f64,
    /// Sum of the per-panel differences between the coarse and fine rules.
    pub error_estimate: f64,
    pub panels: usize,
    /// False when the panel budget ran out before every panel met its target.
    pub converged: bool,
}

/// Adaptive panel quadrature pairing a coarse and a fine Gauss-Legendre rule.
///
/// `[a, b]` is first cut into panels no wider than `max_width`; panels whose
/// coarse/fine difference exceeds their share of `tol` are bisected, up to
/// `max_panels` panels in total.
pub fn adaptive<F: FnMut(f64) -> f64>(
    coarse: &GaussLegendre,
    fine: &GaussLegendre,
    a: f64,
    b: f64,
    max_width: f64,
    tol: f64,
    max_panels: usize,
    mut f: F,
) -> AdaptiveResult {
    if b <= a {
        return AdaptiveResult { value: 0.0, error_estimate: 0.0, panels: 0, converged: true };
    }
    let initial = libm::ceil((b - a) / max_width).max(1.0) as usize;
    let width = (b - a) / initial as f64;
    let density = tol / (b - a);
    let mut stack: Vec<(f64, f64)> = (0..initial)
        .rev()
        .map(|i| {
            let lo = a + width * i as f64;
            let hi = if i + 1 == initial { b } else { a + width * (i + 1) as f64 };
            (lo, hi)
        })
        .collect();
    let mut value = Neumaier::new();
    let mut err = 0.0;
    let mut panels = initial;
    let mut converged = true;
    while let Some((lo, hi)) = stack.pop() {
        let g = coarse.integrate(lo, hi, &mut f);
        let (k, k_abs) = fine.integrate_with_abs(lo, hi, &mut f);
        let e = libm::fabs(k - g);
        // differences at the rounding level of the panel sum cannot be reduced by bisection
        let target = (density * (hi - lo)).max(64.0 * f64::EPSILON * k_abs);
        if e <= target || panels >= max_panels || hi - lo < 1e-14 * (1.0 + libm::fabs(lo)) {
            if e > target {
                converged = false;
            }
            value.add(k);
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi));
            stack.push((lo, mid));
            panels += 1;
        }
    }
    AdaptiveResult { value: value.value(), error_estimate: err, panels, converged }
}
