//! Full Bayes via Gibbs sampling, with `tau` given a half-Cauchy prior
//! (optionally truncated to `(0, 1]`).
//!
//! Half-Cauchy scales are expanded with inverse-gamma auxiliaries: writing
//! `x^2 | v ~ IG(1/2, 1/v)`, `v ~ IG(1/2, 1)` makes `x` half-Cauchy while
//! every full conditional stays inverse-gamma. The sweep updates
//!
//! ```text
//!     theta_i    | .  ~  N((1 - kappa_i) y_i, sigma^2 (1 - kappa_i)),
//!                        kappa_i = 1 / (1 + tau^2 lambda_i^2)
//!     lambda_i^2 | .  ~  IG(1, 1/nu_i + theta_i^2 / (2 sigma^2 tau^2))
//!     nu_i       | .  ~  IG(1, 1 + 1/lambda_i^2)
//!     tau^2      | .  ~  IG((n+1)/2, 1/omega + sum_i theta_i^2 / (2 sigma^2 lambda_i^2))
//!     omega      | .  ~  IG(1, 1 + 1/tau^2)
//! ```
//!
//! in that order. `IG(a, b)` is drawn as `b / Gamma(a, scale 1)`; the
//! shape-1 cases reduce to `b / Exp(1)`. Under the truncated prior the
//! `tau^2` draw is rejection-sampled against the indicator
//! `tau^2 <= 1`, with a retry cap so a chain stuck far outside the
//! truncation region fails loudly instead of looping.

use crate::error::{Error, Result};
use crate::DEFAULT_SEED;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma, StandardNormal};

/// Prior for the global scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauPrior {
    /// Standard half-Cauchy on `(0, infinity)`.
    HalfCauchy,
    /// Half-Cauchy restricted to `(0, 1]`.
    TruncatedHalfCauchy,
}

/// Chain length, seed, and prior choices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GibbsConfig {
    /// Total sweeps, including burn-in. Default 6000.
    pub iterations: usize,
    /// Sweeps discarded from the front. Default 1000.
    pub burn_in: usize,
    pub seed: u64,
    pub tau_prior: TauPrior,
    /// Record local scales `lambda_i` per retained sweep (memory-heavy for
    /// large `n`).
    pub record_lambda: bool,
}

impl Default for GibbsConfig {
    fn default() -> Self {
        Self {
            iterations: 6000,
            burn_in: 1000,
            seed: DEFAULT_SEED,
            tau_prior: TauPrior::HalfCauchy,
            record_lambda: false,
        }
    }
}

/// Retained draws, one row per sweep after burn-in.
#[derive(Debug, Clone)]
pub struct GibbsTrace {
    /// `theta` rows, each of length `n`.
    pub theta: Vec<Vec<f64>>,
    /// Global scale `tau` (not squared) per retained sweep.
    pub tau: Vec<f64>,
    /// Local scales `lambda_i`, if recording was requested.
    pub lambda: Option<Vec<Vec<f64>>>,
}

impl GibbsTrace {
    /// Coordinatewise average of the retained `theta` rows.
    pub fn posterior_mean(&self) -> Vec<f64> {
        let rows = self.theta.len();
        let n = self.theta.first().map_or(0, Vec::len);
        let mut out = vec![0.0; n];
        for row in &self.theta {
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        for o in &mut out {
            *o /= rows as f64;
        }
        out
    }

    pub fn tau_mean(&self) -> f64 {
        self.tau.iter().sum::<f64>() / self.tau.len() as f64
    }

    pub fn tau_min(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

const TRUNCATION_RETRIES: u32 = 100;

/// Runs the Gibbs chain on `y` and returns the retained draws.
///
/// Deterministic in `(y, sigma, config)`: the RNG is ChaCha8 seeded from
/// `config.seed` and nothing else is stateful.
pub fn gibbs_full_bayes(y: &[f64], sigma: f64, config: &GibbsConfig) -> Result<GibbsTrace> {
    if y.is_empty() {
        return Err(Error::domain("Gibbs sampler needs at least one observation"));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::domain(format!("non-finite observation {bad}")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    if config.iterations == 0 || config.burn_in >= config.iterations {
        return Err(Error::domain(format!(
            "need burn_in < iterations, got {} / {}",
            config.burn_in, config.iterations
        )));
    }

    let n = y.len();
    let sigma2 = sigma * sigma;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let gamma_tau = Gamma::new((n as f64 + 1.0) / 2.0, 1.0)
        .map_err(|e| Error::domain(format!("tau conditional shape: {e}")))?;

    // Deterministic start: unshrunk theta, unit scales.
    let mut theta: Vec<f64> = y.to_vec();
    let mut lambda2 = vec![1.0f64; n];
    let mut nu = vec![1.0f64; n];
    let mut tau2 = 1.0f64;
    let mut omega = 1.0f64;

    let retained = config.iterations - config.burn_in;
    let mut trace = GibbsTrace {
        theta: Vec::with_capacity(retained),
        tau: Vec::with_capacity(retained),
        lambda: config.record_lambda.then(|| Vec::with_capacity(retained)),
    };

    for it in 0..config.iterations {
        for i in 0..n {
            let s = tau2 * lambda2[i];
            let keep = s / (1.0 + s); // 1 - kappa_i
            let z: f64 = rng.sample(StandardNormal);
            theta[i] = keep * y[i] + (sigma2 * keep).sqrt() * z;
        }

        for i in 0..n {
            let b = 1.0 / nu[i] + theta[i] * theta[i] / (2.0 * sigma2 * tau2);
            lambda2[i] = b / rng.sample::<f64, _>(Exp1);
            nu[i] = (1.0 + 1.0 / lambda2[i]) / rng.sample::<f64, _>(Exp1);
        }

        let sum_scaled: f64 = theta
            .iter()
            .zip(&lambda2)
            .map(|(t, l2)| t * t / l2)
            .sum();
        let b_tau = 1.0 / omega + sum_scaled / (2.0 * sigma2);
        tau2 = match config.tau_prior {
            TauPrior::HalfCauchy => b_tau / rng.sample(gamma_tau),
            TauPrior::TruncatedHalfCauchy => {
                let mut accepted = None;
                for _ in 0..TRUNCATION_RETRIES {
                    let draw = b_tau / rng.sample(gamma_tau);
                    if draw <= 1.0 {
                        accepted = Some(draw);
                        break;
                    }
                }
                accepted.ok_or(Error::TruncationExhausted {
                    iteration: it,
                    retries: TRUNCATION_RETRIES,
                })?
            }
        };
        omega = (1.0 + 1.0 / tau2) / rng.sample::<f64, _>(Exp1);

        if !(tau2 > 0.0 && tau2.is_finite()) {
            return Err(Error::SamplerDivergence {
                iteration: it,
                detail: format!("tau^2 = {tau2}"),
            });
        }
        if let Some(i) = (0..n).find(|&i| !theta[i].is_finite() || !(lambda2[i] > 0.0 && lambda2[i].is_finite())) {
            return Err(Error::SamplerDivergence {
                iteration: it,
                detail: format!("coordinate {i}: theta = {}, lambda^2 = {}", theta[i], lambda2[i]),
            });
        }

        if it >= config.burn_in {
            trace.theta.push(theta.clone());
            trace.tau.push(tau2.sqrt());
            if let Some(l) = trace.lambda.as_mut() {
                l.push(lambda2.iter().map(|v| v.sqrt()).collect());
            }
        }
    }
    Ok(trace)
}
