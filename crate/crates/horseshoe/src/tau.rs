//! Selection of the global shrinkage scale `tau`.
//!
//! Three routes:
//!
//! * empirical Bayes: count observations over the universal-style
//!   threshold `sqrt(c1 sigma^2 log n)` and take
//!   `tau_hat = count / (c2 n)`, optionally truncated into `[1/n, 1]`;
//! * oracle rules for a known sparsity level `p`: `p/n`, or the
//!   log-corrected `(p/n) sqrt(log(n/p))`;
//! * a fixed user-supplied value.
//!
//! [`plugin_estimate`] resolves a [`TauSource`] against the data and runs
//! the posterior summaries at the resolved scale. Full Bayes (sampling
//! `tau` instead of plugging it in) lives in [`crate::gibbs`].

use crate::error::{Error, Result};
use crate::posterior::{summarize_all, PosteriorSummary, ShrinkageConfig};
use crate::quad::QuadratureSettings;

/// Result of the empirical Bayes rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauEstimate {
    /// The estimate actually usable downstream (clamped when truncation
    /// is on).
    pub value: f64,
    /// Number of observations at or above the threshold.
    pub raw_count: usize,
    /// Whether clamping changed the raw ratio `count / (c2 n)`.
    pub truncated: bool,
}

/// `tau_hat = #{|y_i| >= sqrt(c1 sigma^2 log n)} / (c2 n)`.
///
/// With `truncate` the value is clamped into `[1/n, 1]` and the estimate
/// always exists; without it a zero count is an error
/// ([`Error::DegenerateEstimate`]) since no positive scale is supported.
pub fn empirical_bayes_tau(
    y: &[f64],
    sigma: f64,
    c1: f64,
    c2: f64,
    truncate: bool,
) -> Result<TauEstimate> {
    if y.is_empty() {
        return Err(Error::domain("empirical Bayes needs at least one observation"));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite observation {bad}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    if !(c1 >= 2.0 && c1.is_finite()) {
        return Err(Error::domain(format!("c1 = {c1} must be >= 2")));
    }
    if !(c2 > 0.0 && c2.is_finite()) {
        return Err(Error::domain(format!("c2 = {c2} must be > 0")));
    }
    let n = y.len() as f64;
    let threshold = (c1 * sigma * sigma * n.ln()).sqrt();
    let raw_count = y.iter().filter(|v| v.abs() >= threshold).count();
    let raw = raw_count as f64 / (c2 * n);
    if truncate {
        let value = raw.max(1.0 / n).min(1.0);
        Ok(TauEstimate { value, raw_count, truncated: value != raw })
    } else {
        if raw_count == 0 {
            return Err(Error::DegenerateEstimate);
        }
        Ok(TauEstimate { value: raw, raw_count, truncated: false })
    }
}

/// Oracle choices of `tau` for a known number `p` of signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVariant {
    /// `p / n`.
    Plain,
    /// `(p / n) sqrt(log(n / p))`; the scale at which the worst-case risk
    /// rate matches the minimax rate up to constants.
    LogCorrected,
}

pub fn oracle_tau(n: usize, p: usize, variant: OracleVariant) -> Result<f64> {
    if !(p >= 1 && p < n) {
        return Err(Error::domain(format!("need 1 <= p < n, got p = {p}, n = {n}")));
    }
    let frac = p as f64 / n as f64;
    let tau = match variant {
        OracleVariant::Plain => frac,
        OracleVariant::LogCorrected => frac * (1.0 / frac).ln().sqrt(),
    };
    Ok(tau.min(1.0))
}

/// Where the plug-in scale comes from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauSource {
    EmpiricalBayes { c1: f64, c2: f64, truncate: bool },
    Oracle { p: usize, variant: OracleVariant },
    Fixed(f64),
}

impl TauSource {
    /// The scale this source yields on the given data.
    pub fn resolve(&self, y: &[f64], sigma: f64) -> Result<f64> {
        match *self {
            TauSource::EmpiricalBayes { c1, c2, truncate } => {
                Ok(empirical_bayes_tau(y, sigma, c1, c2, truncate)?.value)
            }
            TauSource::Oracle { p, variant } => oracle_tau(y.len(), p, variant),
            TauSource::Fixed(tau) => {
                if !(tau > 0.0 && tau <= 1.0) {
                    return Err(Error::domain(format!("fixed tau = {tau} outside (0, 1]")));
                }
                Ok(tau)
            }
        }
    }
}

/// Resolves `source` on the data and evaluates the posterior summaries of
/// every observation at that shared scale.
pub fn plugin_estimate(
    y: &[f64],
    sigma: f64,
    source: &TauSource,
    settings: &QuadratureSettings,
) -> Result<Vec<PosteriorSummary>> {
    let tau = source.resolve(y, sigma)?;
    let cfg = ShrinkageConfig::with_settings(tau, sigma, *settings)?;
    summarize_all(y, &cfg)
}
