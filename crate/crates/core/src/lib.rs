//! Numerical toolkit for the sine series
//!
//! ```text
//! S_p(t) = sum_{n >= 1} sin(t / n^p),   p > 1
//! ```
//!
//! The crate evaluates the series with certified error bounds, splits it into
//! the power-law trend `alpha_p sign(t) |t|^(1/p)` and the fluctuation around
//! it, and provides the tools used to study that fluctuation: special
//! functions, the Mellin kernel, Hermite-windowed averages, occupation-time
//! statistics and elementary polynomial bounds for `p = 2`.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature enables rayon-backed sweeps.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod hermite;
pub mod mellin;
pub mod quadrature;
pub mod series;
pub mod special;
pub mod stats;
pub mod summation;

pub use error::{Error, PoleKind, Result};
pub use num_complex::Complex64;

/// Complex argument or value used by the special functions and the Mellin kernel.
pub type ComplexValue = Complex64;
