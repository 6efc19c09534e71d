//! Exact arithmetic for Siegel modular forms of low degree.
//!
//! The crate computes Fourier expansions — always over `Q`, never floats —
//! of Siegel–Eisenstein series (degrees 1 and 2), theta series and genus
//! theta series of positive definite even-levelled quadratic forms, and
//! checks congruences between them to a prescribed power of a prime `p`.
//! The headline computation ([`padic::verify_main_theorem`]) verifies, at a
//! finite weight stage and trace bound, that a p-adically interpolated
//! Eisenstein series coincides with an explicit rational linear combination
//! of genus theta series of forms of level dividing `p`.
//!
//! Organization:
//!
//! * [`exact`] — rational scalars, p-adic valuations, congruences;
//! * [`chars`] — Kronecker symbols and quadratic characters;
//! * [`bernoulli`] — Bernoulli numbers, generalized Bernoulli numbers,
//!   regular primes, p-adic limit ratios;
//! * [`quadforms`] — half-integral symmetric matrices, reduction,
//!   representation numbers, class and genus enumeration;
//! * [`qexp`] — truncated Fourier expansions keyed by reduced matrices;
//! * [`theta`], [`eisenstein`] — the two families of expansions;
//! * [`hecke`] — `U(p)`, the Siegel Φ operator, eigenvalue bookkeeping;
//! * [`padic`] — weight sequences, valuation profiles, and the verifiers.

pub mod bernoulli;
pub mod chars;
pub mod eisenstein;
pub mod exact;
pub mod hecke;
pub mod linalg;
pub mod normalization;
pub mod padic;
pub(crate) mod par;
pub mod qexp;
pub mod quadforms;
pub mod theta;

/// Crate-wide error type.
///
/// `InvalidArgument` marks caller mistakes (bad primes, violated
/// preconditions), `Unsupported` marks inputs outside the implemented range
/// (e.g. reduction above rank 4), and `Inconsistent` marks failures of
/// internal cross-checks that should be impossible on correct code paths.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use par::configure_threads;

/// Version string embedded in all machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
