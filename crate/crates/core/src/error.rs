use core::fmt;

/// Location of a pole hit by one of the meromorphic functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoleKind {
    /// `Gamma(z)` at the nonpositive integer `z`.
    Gamma(i64),
    /// `zeta(s)` at `s = 1`.
    Zeta,
    /// Kernel pole from the zeta factor, `p * sigma = 1`.
    KernelZeta,
    /// Kernel pole from the gamma factor at the positive odd integer `sigma`.
    KernelGamma(i64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// The argument sits on a pole.
    Pole(PoleKind),
    /// The requested accuracy needs more work than the configured budget allows.
    /// `achieved` is the best error bound that fits in the budget.
    Budget { what: &'static str, achieved: f64 },
    /// A numerical procedure could not produce a trustworthy value.
    Instability(&'static str),
    /// Sampling is too coarse to resolve the signal.
    Resolution { step: f64, limit: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for PoleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PoleKind::Gamma(n) => write!(f, "gamma pole at z = {n}"),
            PoleKind::Zeta => write!(f, "zeta pole at s = 1"),
            PoleKind::KernelZeta => write!(f, "kernel pole of the zeta factor at p*sigma = 1"),
            PoleKind::KernelGamma(n) => write!(f, "kernel pole of the gamma factor at sigma = {n}"),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Pole(kind) => write!(f, "pole: {kind}"),
            Error::Budget { what, achieved } => {
                write!(f, "budget exceeded in {what}; best achievable bound {achieved:e}")
            }
            Error::Instability(msg) => write!(f, "numerical instability: {msg}"),
            Error::Resolution { step, limit } => {
                write!(f, "sample step {step} does not resolve the signal (must be < {limit})")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
