//! Independent reference computations shared by test targets.
#![allow(dead_code)]

/// `sum_{n >= a} n^-s` for `a >= 100`, `s > 1`, by Euler-Maclaurin at `a`.
pub fn hurwitz_tail(s: f64, a: f64) -> f64 {
    const B: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let mut total = a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    let mut rising = s; // (s)_{2k-1}
    let mut fact = 2.0; // (2k)!
    for (k, b) in B.iter().enumerate() {
        let m = 2 * k + 1;
        total += b / fact * rising * a.powf(-s - m as f64);
        rising *= (s + m as f64) * (s + m as f64 + 1.0);
        fact *= ((m + 2) * (m + 3)) as f64;
    }
    total
}

/// `S_p(t)` for `t >= 0` from a plain head sum and the Taylor expansion of the
/// tail in powers of `t`, whose coefficients are Hurwitz zeta values.
/// Returns (value, rough error estimate).
pub fn series_oracle(p: f64, t: f64) -> (f64, f64) {
    let n = ((2.0 * t).powf(1.0 / p).ceil() as u64).max(1000);
    let mut head = 0.0f64;
    let mut comp = 0.0f64;
    for k in (1..=n).rev() {
        let x = (t / (k as f64).powf(p)).sin();
        let s = head + x;
        comp += if head.abs() >= x.abs() { (head - s) + x } else { (x - s) + head };
        head = s;
    }
    let head = head + comp;
    let a = (n + 1) as f64;
    let mut tail = 0.0;
    let mut coef = t; // t^(2k+1) / (2k+1)!
    for k in 0..40 {
        let term = coef * hurwitz_tail(p * (2 * k + 1) as f64, a);
        tail += if k % 2 == 0 { term } else { -term };
        if term.abs() < 1e-30 {
            break;
        }
        coef *= t * t / (((2 * k + 2) * (2 * k + 3)) as f64);
    }
    let err = 1e-15 * (n as f64 + 4.0 * t * 1.7 + head.abs());
    (head + tail, err)
}

/// Gauss-Hermite nodes for weight 1 on psi-products: roots of psi_N found by
/// bisection on a local recurrence, weights 1/(N psi_{N-1}(x)^2).
pub fn gauss_hermite(big_n: usize) -> Vec<(f64, f64)> {
    let psi = |k: usize, x: f64| -> f64 {
        let mut a = core::f64::consts::PI.powf(-0.25) * (-x * x / 2.0).exp();
        if k == 0 {
            return a;
        }
        let mut b = 2f64.sqrt() * x * a;
        for j in 1..k {
            let jf = j as f64;
            let c = (2.0 / (jf + 1.0)).sqrt() * x * b - (jf / (jf + 1.0)).sqrt() * a;
            a = b;
            b = c;
        }
        b
    };
    let mut out = Vec::new();
    let step = 1e-3;
    let mut x = -10.0;
    while x < 10.0 {
        let (mut lo, mut hi) = (x, x + step);
        if psi(big_n, lo).signum() != psi(big_n, hi).signum() {
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if psi(big_n, lo).signum() == psi(big_n, mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            let q = psi(big_n - 1, r);
            out.push((r, 1.0 / (big_n as f64 * q * q)));
        }
        x += step;
    }
    assert_eq!(out.len(), big_n);
    out
}
