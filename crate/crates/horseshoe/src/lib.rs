//! Posterior computations for the horseshoe prior in the sparse normal
//! means model.
//!
//! The observation model is `y_i = theta_i + eps_i` with
//! `eps_i ~ N(0, sigma^2)` independently, and the horseshoe prior places
//! `theta_i | lambda_i ~ N(0, sigma^2 tau^2 lambda_i^2)` with half-Cauchy
//! local scales `lambda_i` and a global scale `tau` in `(0, 1]`. Every
//! posterior functional of a single coordinate reduces to the integrals
//!
//! ```text
//!     I_k(y) = int_0^1 z^k exp(xi z) / (tau^2 + (1 - tau^2) z) dz,
//!     xi = y^2 / (2 sigma^2),    k in {-1/2, 1/2, 3/2},
//! ```
//!
//! where `z = 1 - kappa` and `kappa` is the posterior shrinkage factor.
//! The posterior mean is `y I_{1/2} / I_{-1/2}`, the posterior variance
//! and marginal density are short expressions in the same three values.
//!
//! The crate provides:
//!
//! * [`special`]: scaled evaluation of `I_k` that stays finite out to
//!   `xi` in the thousands, plus an independent confluent hypergeometric
//!   series route for cross-checking;
//! * [`posterior`]: mean, variance, shrinkage weight, marginal density;
//! * [`tau`] and [`gibbs`]: empirical Bayes, oracle, and full Bayes
//!   (MCMC) selection of the global scale;
//! * [`bounds`]: closed-form envelopes, risk-rate functions, and tail
//!   bounds with numeric certification grids;
//! * [`sim`]: a reproducible simulation harness for risk comparisons.

pub mod bounds;
pub mod error;
pub mod gibbs;
pub mod posterior;
pub mod quad;
pub mod scaled;
pub mod sim;
pub mod special;
pub mod tau;

pub use error::{Error, Result};
pub use posterior::{PosteriorSummary, ShrinkageConfig};
pub use quad::QuadratureSettings;
pub use scaled::ExponentScaledValue;
pub use special::IntegralOrder;

/// Default RNG seed for every randomized entry point (1729, fixed so runs
/// are reproducible unless the caller picks a seed).
pub const DEFAULT_SEED: u64 = 1729;
