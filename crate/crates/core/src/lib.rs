//! Harmonizable fractional Lévy motions driven by rotationally invariant
//! two-dimensional Lévy measures.
//!
//! The crate provides:
//!
//! * [`levy_models`] — families of radial Lévy densities with heavy-tail
//!   constants, tail verification and projection moments,
//! * [`kernel`] — the spectral integrand `(e^{its}-1)/(is) · weight(s)` and
//!   the frequency-aggregated g-vector of a finite-dimensional probe,
//! * [`chf_engine`] — numerical evaluation of the Lévy exponent ψ (radial
//!   Bessel reduction) and of the exact log-characteristic function `A_ε`
//!   of rescaled finite-dimensional distributions,
//! * [`stable_limit`] — the closed-form log-characteristic function of the
//!   stable tangent process and its constants κ_α, c₁,
//! * [`existence`] — existence criteria for the spectral integrals, with a
//!   brute-force double-integral oracle,
//! * [`simulate`] — seeded Monte-Carlo path generation (shot noise,
//!   sub-Gaussian stable spectral sums, fractional Brownian motion) plus
//!   empirical characteristic functions,
//! * [`lass_verifier`] — convergence reports verifying local asymptotic
//!   self-similarity against the tangent-process limit.

pub mod chf_engine;
mod error;
pub mod existence;
pub mod kernel;
pub mod lass_verifier;
pub mod levy_models;
mod outer;
pub mod quad;
pub mod simulate;
pub mod special;
pub mod stable_limit;

pub use chf_engine::{log_chf_fdd, psi, psi_bruteforce, LevyExponent, QuadSpec};
pub use error::{Error, Result};
pub use kernel::{FddSpec, ProcessParams};
pub use levy_models::{LevyKind, LevyModel, MomentValue, Region};
pub use simulate::PathEnsemble;
