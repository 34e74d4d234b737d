//! Synthetic sparse-means experiments: replicated risk of plug-in and
//! fully Bayesian estimators on mostly-zero signal vectors.
//!
//! Every random draw descends deterministically from a scenario seed, a
//! replicate index, and a fixed stream tag, so any run is reproducible
//! from its (seed, replicates) pair alone regardless of thread count.

use crate::error::{Error, Result};
use crate::gibbs::{gibbs_full_bayes, GibbsConfig};
use crate::posterior::{posterior_mean, ShrinkageConfig};
use crate::quad::QuadratureSettings;
use crate::tau::{empirical_bayes_tau, oracle_tau, OracleVariant};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Sparse normal-means scenario: the first `p` of `n` coordinates carry
/// the constant signal `amplitude`, the rest are zero; observations add
/// `N(0, sigma^2)` noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub n: usize,
    pub p: usize,
    pub amplitude: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1 && self.p < self.n) {
            return Err(Error::domain(format!(
                "need 1 <= p < n, got p = {}, n = {}",
                self.p, self.n
            )));
        }
        if !self.amplitude.is_finite() {
            return Err(Error::domain(format!("amplitude = {} must be finite", self.amplitude)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("sigma = {} must be finite and > 0", self.sigma)));
        }
        Ok(())
    }

    /// Deterministic draw of `(y, theta0)` for one replicate.
    pub fn generate(&self, replicate: u64) -> (Vec<f64>, Vec<f64>) {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, replicate << 1));
        let mut theta0 = vec![0.0; self.n];
        theta0[..self.p].fill(self.amplitude);
        let y = theta0
            .iter()
            .map(|&t| {
                let z: f64 = StandardNormal.sample(&mut rng);
                t + self.sigma * z
            })
            .collect();
        (y, theta0)
    }

    /// Seed for estimator-internal randomness (Gibbs chains), disjoint
    /// from the noise stream by the low tag bit.
    fn estimator_seed(&self, replicate: u64) -> u64 {
        mix_seed(self.seed, (replicate << 1) | 1)
    }
}

/// SplitMix64 finalizer over `seed + stream * golden`: cheap, and
/// statistically independent seeds for ChaCha streams.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The estimators the harness compares.
#[derive(Debug, Clone, PartialEq)]
pub enum Estimator {
    /// Plug-in posterior mean at the threshold-count estimate of `tau`.
    EmpiricalBayes { c1: f64, c2: f64, truncate: bool },
    /// Plug-in posterior mean at the sparsity-oracle `tau`.
    OracleTau { variant: OracleVariant },
    /// Plug-in posterior mean at a fixed `tau`.
    FixedTau(f64),
    /// Full posterior via the Gibbs sampler; `config.seed` is replaced
    /// per replicate.
    FullBayes { config: GibbsConfig },
}

impl Estimator {
    /// Stable, comma-free label used as the CSV key.
    pub fn id(&self) -> String {
        match self {
            Estimator::EmpiricalBayes { c1, c2, truncate } => {
                format!("eb(c1={c1};c2={c2}{})", if *truncate { ";trunc" } else { "" })
            }
            Estimator::OracleTau { variant: OracleVariant::Plain } => "oracle".to_string(),
            Estimator::OracleTau { variant: OracleVariant::LogCorrected } => {
                "oracle-log".to_string()
            }
            Estimator::FixedTau(tau) => format!("fixed(tau={tau})"),
            Estimator::FullBayes { config } => match config.tau_prior {
                crate::gibbs::TauPrior::HalfCauchy => "gibbs".to_string(),
                crate::gibbs::TauPrior::TruncatedHalfCauchy => "gibbs-trunc".to_string(),
            },
        }
    }

    /// Point estimate of the mean vector plus the `tau` that produced it
    /// (posterior mean of `tau` for the full Bayes chain).
    pub fn estimate(
        &self,
        y: &[f64],
        scn: &Scenario,
        settings: &QuadratureSettings,
        rng_seed: u64,
    ) -> Result<(Vec<f64>, f64)> {
        let plug_in = |tau: f64| -> Result<(Vec<f64>, f64)> {
            let cfg = ShrinkageConfig::with_settings(tau, scn.sigma, *settings)?;
            let means = y.iter().map(|&yi| posterior_mean(yi, &cfg)).collect::<Result<_>>()?;
            Ok((means, tau))
        };
        match self {
            Estimator::EmpiricalBayes { c1, c2, truncate } => {
                plug_in(empirical_bayes_tau(y, scn.sigma, *c1, *c2, *truncate)?.value)
            }
            Estimator::OracleTau { variant } => plug_in(oracle_tau(scn.n, scn.p, *variant)?),
            Estimator::FixedTau(tau) => plug_in(*tau),
            Estimator::FullBayes { config } => {
                let cfg = GibbsConfig { seed: rng_seed, ..*config };
                let trace = gibbs_full_bayes(y, scn.sigma, &cfg)?;
                Ok((trace.posterior_mean(), trace.tau_mean()))
            }
        }
    }
}

/// Replicate-averaged squared-error loss with its Monte Carlo standard
/// error (`sd / sqrt(replicates)`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskSummary {
    pub mean_sse: f64,
    pub stderr_sse: f64,
    pub replicates: usize,
}

fn summarize_losses(losses: &[f64]) -> RiskSummary {
    let r = losses.len();
    let mean = losses.iter().sum::<f64>() / r as f64;
    let stderr = if r > 1 {
        let var = losses.iter().map(|&x| (x - mean) * (x - mean)).sum::<f64>() / (r - 1) as f64;
        (var / r as f64).sqrt()
    } else {
        f64::NAN
    };
    RiskSummary { mean_sse: mean, stderr_sse: stderr, replicates: r }
}

/// Mean squared-error loss of `estimator` over independent replicates of
/// `scn`. Replicates run in parallel; the replicate index, not the
/// schedule, determines every draw.
pub fn replicated_risk(
    scn: &Scenario,
    estimator: &Estimator,
    replicates: usize,
    settings: &QuadratureSettings,
) -> Result<RiskSummary> {
    scn.validate()?;
    if replicates == 0 {
        return Err(Error::domain("replicates must be >= 1".to_string()));
    }
    let losses = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let (y, theta0) = scn.generate(r as u64);
            let (theta_hat, _) = estimator
                .estimate(&y, scn, settings, scn.estimator_seed(r as u64))
                .map_err(|e| Error::Replicate { replicate: r, source: Box::new(e) })?;
            Ok(theta_hat.iter().zip(&theta0).map(|(a, b)| (a - b) * (a - b)).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(summarize_losses(&losses))
}

/// One point of a risk-versus-amplitude curve.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskPoint {
    pub estimator: String,
    pub amplitude: f64,
    pub risk: RiskSummary,
}

/// Risk of each estimator at each signal amplitude, all other scenario
/// fields held fixed. Rows are ordered by estimator, then amplitude.
pub fn risk_curve(
    base: &Scenario,
    amplitudes: &[f64],
    estimators: &[Estimator],
    replicates: usize,
    settings: &QuadratureSettings,
) -> Result<Vec<RiskPoint>> {
    let mut rows = Vec::with_capacity(amplitudes.len() * estimators.len());
    for est in estimators {
        for &a in amplitudes {
            let scn = Scenario { amplitude: a, ..*base };
            let risk = replicated_risk(&scn, est, replicates, settings)?;
            rows.push(RiskPoint { estimator: est.id(), amplitude: a, risk });
        }
    }
    Ok(rows)
}

/// Sparsity rule for the rate scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SparsityRule {
    /// `p = ceil(sqrt(n))`.
    Sqrt,
    /// Fixed `p` independent of `n`.
    Constant(usize),
    /// `p = ceil(fraction * n)`; `fraction` in `(0, 1)`.
    Fraction(f64),
}

impl SparsityRule {
    pub fn apply(&self, n: usize) -> Result<usize> {
        let p = match self {
            SparsityRule::Sqrt => (n as f64).sqrt().ceil() as usize,
            SparsityRule::Constant(p) => *p,
            SparsityRule::Fraction(f) => {
                if !(*f > 0.0 && *f < 1.0) {
                    return Err(Error::domain(format!("fraction = {f} outside (0, 1)")));
                }
                (f * n as f64).ceil() as usize
            }
        };
        if !(p >= 1 && p < n) {
            return Err(Error::domain(format!("rule gives p = {p} outside [1, {n})")));
        }
        Ok(p)
    }
}

/// Empirical risk against the minimax reference at one problem size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateRow {
    pub n: usize,
    pub p: usize,
    pub tau: f64,
    pub mean_sse: f64,
    /// `2 sigma^2 p log(n/p)`.
    pub reference_rate: f64,
    /// `mean_sse / reference_rate`; flat in `n` when risk tracks the rate.
    pub ratio: f64,
}

/// Scans problem sizes with the oracle plug-in at signal strength
/// `sqrt(2 sigma^2 log(n/p)) + sigma` (just past the detection boundary)
/// and reports risk relative to the minimax rate.
pub fn rate_scan(
    ns: &[usize],
    rule: SparsityRule,
    variant: OracleVariant,
    sigma: f64,
    replicates: usize,
    seed: u64,
    settings: &QuadratureSettings,
) -> Result<Vec<RateRow>> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let p = rule.apply(n)?;
        let tau = oracle_tau(n, p, variant)?;
        let amplitude = (2.0 * sigma * sigma * (n as f64 / p as f64).ln()).sqrt() + sigma;
        let scn = Scenario { n, p, amplitude, sigma, seed: mix_seed(seed, n as u64) };
        let risk = replicated_risk(&scn, &Estimator::FixedTau(tau), replicates, settings)?;
        let reference_rate = crate::bounds::minimax_rate(n, p, sigma)?;
        rows.push(RateRow {
            n,
            p,
            tau,
            mean_sse: risk.mean_sse,
            reference_rate,
            ratio: risk.mean_sse / reference_rate,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix_seed_matches_splitmix64_reference() {
        // First three outputs of SplitMix64 seeded with 0.
        assert_eq!(mix_seed(0, 1), 0xE220_A839_7B1D_CDAF);
        assert_eq!(mix_seed(0, 2), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(mix_seed(0, 3), 0x06C4_5D18_8009_454F);
        assert_ne!(mix_seed(7, 1), mix_seed(8, 1));
    }

    #[test]
    fn generate_is_deterministic_and_shaped() {
        let scn = Scenario { n: 40, p: 5, amplitude: 6.0, sigma: 2.0, seed: 11 };
        let (y1, t1) = scn.generate(3);
        let (y2, t2) = scn.generate(3);
        assert_eq!(y1, y2);
        assert_eq!(t1, t2);
        assert_eq!(y1.len(), 40);
        assert!(t1[..5].iter().all(|&t| t == 6.0));
        assert!(t1[5..].iter().all(|&t| t == 0.0));
        let (y3, _) = scn.generate(4);
        assert_ne!(y1, y3);
        // noise scale sanity: centered residuals, not the signal itself
        let rss: f64 = y1.iter().zip(&t1).map(|(y, t)| (y - t) * (y - t)).sum();
        assert!(rss > 40.0 && rss < 600.0, "rss = {rss}");
    }

    #[test]
    fn estimator_ids_are_stable_and_comma_free() {
        let ids = [
            Estimator::EmpiricalBayes { c1: 2.0, c2: 1.0, truncate: true }.id(),
            Estimator::OracleTau { variant: OracleVariant::Plain }.id(),
            Estimator::OracleTau { variant: OracleVariant::LogCorrected }.id(),
            Estimator::FixedTau(0.1).id(),
            Estimator::FullBayes { config: GibbsConfig::default() }.id(),
        ];
        assert_eq!(ids[0], "eb(c1=2;c2=1;trunc)");
        assert_eq!(ids[1], "oracle");
        assert_eq!(ids[2], "oracle-log");
        assert_eq!(ids[3], "fixed(tau=0.1)");
        assert_eq!(ids[4], "gibbs");
        for id in &ids {
            assert!(!id.contains(','), "{id}");
        }
    }

    #[test]
    fn replicated_risk_is_deterministic() {
        let scn = Scenario { n: 30, p: 3, amplitude: 5.0, sigma: 1.0, seed: 99 };
        let s = QuadratureSettings::default();
        let est = Estimator::OracleTau { variant: OracleVariant::Plain };
        let a = replicated_risk(&scn, &est, 4, &s).unwrap();
        let b = replicated_risk(&scn, &est, 4, &s).unwrap();
        assert_eq!(a, b);
        assert!(a.mean_sse.is_finite() && a.mean_sse > 0.0);
        assert!(a.stderr_sse.is_finite() && a.stderr_sse > 0.0);
        assert_eq!(a.replicates, 4);
    }

    #[test]
    fn heavier_shrinkage_wins_on_pure_noise_scale() {
        // With tiny signal, tau near the sparsity level beats tau = 1.
        let scn = Scenario { n: 50, p: 1, amplitude: 0.0, sigma: 1.0, seed: 5 };
        let s = QuadratureSettings::default();
        let tight = replicated_risk(&scn, &Estimator::FixedTau(0.02), 4, &s).unwrap();
        let loose = replicated_risk(&scn, &Estimator::FixedTau(1.0), 4, &s).unwrap();
        assert!(
            tight.mean_sse < loose.mean_sse,
            "tight {} vs loose {}",
            tight.mean_sse,
            loose.mean_sse
        );
    }

    #[test]
    fn risk_curve_orders_rows() {
        let base = Scenario { n: 24, p: 2, amplitude: 0.0, sigma: 1.0, seed: 1 };
        let s = QuadratureSettings::default();
        let rows = risk_curve(
            &base,
            &[2.0, 5.0],
            &[Estimator::FixedTau(0.1), Estimator::OracleTau { variant: OracleVariant::Plain }],
            2,
            &s,
        )
        .unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].estimator, "fixed(tau=0.1)");
        assert_eq!(rows[0].amplitude, 2.0);
        assert_eq!(rows[3].estimator, "oracle");
        assert_eq!(rows[3].amplitude, 5.0);
    }

    #[test]
    fn sparsity_rules() {
        assert_eq!(SparsityRule::Sqrt.apply(200).unwrap(), 15);
        assert_eq!(SparsityRule::Constant(7).apply(100).unwrap(), 7);
        assert_eq!(SparsityRule::Fraction(0.05).apply(200).unwrap(), 10);
        assert!(SparsityRule::Constant(100).apply(100).is_err());
        assert!(SparsityRule::Fraction(1.5).apply(100).is_err());
    }

    #[test]
    fn rate_scan_smoke() {
        let s = QuadratureSettings::default();
        let rows =
            rate_scan(&[64, 144], SparsityRule::Sqrt, OracleVariant::Plain, 1.0, 2, 42, &s)
                .unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].p, 8);
        assert_eq!(rows[1].p, 12);
        for r in &rows {
            assert!(r.ratio > 0.0 && r.ratio.is_finite());
            assert!((r.tau - r.p as f64 / r.n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn gibbs_estimator_plugs_in() {
        let scn = Scenario { n: 16, p: 2, amplitude: 7.0, sigma: 1.0, seed: 3 };
        let s = QuadratureSettings::default();
        let cfg = GibbsConfig { iterations: 300, burn_in: 100, ..GibbsConfig::default() };
        let est = Estimator::FullBayes { config: cfg };
        let out = replicated_risk(&scn, &est, 2, &s).unwrap();
        assert!(out.mean_sse.is_finite() && out.mean_sse > 0.0);
    }
}
