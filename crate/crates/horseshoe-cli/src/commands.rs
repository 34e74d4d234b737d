//! Subcommand implementations. Each `run_*` does the work and writes its
//! CSV; flag parsing beyond clap's structure (spec strings like
//! `fixed:0.3` or `eb:2:1`) lives here too.

use crate::csvio::{read_y_column, CsvWriter};
use crate::{Failure, Suite, TauPriorArg, TauVariantArg};
use horseshoe::bounds::{
    certify_envelopes, chernoff_tau_bound, integral_asymptotic, posterior_mean_envelopes,
    threshold_exceedance_probability, weight_at_zero, CERT_REGION_A, CERT_SLACK_LIMIT, CERT_TAUS,
    CERT_XIS,
};
use horseshoe::gibbs::{gibbs_full_bayes, GibbsConfig, TauPrior};
use horseshoe::posterior::{posterior_mean, summarize_all, ShrinkageConfig};
use horseshoe::quad::QuadratureSettings;
use horseshoe::sim::{rate_scan, risk_curve, Estimator, Scenario, SparsityRule};
use horseshoe::special::IntegralOrder;
use horseshoe::tau::{empirical_bayes_tau, oracle_tau, OracleVariant};
use std::path::{Path, PathBuf};

pub struct EstimateArgs {
    pub input: PathBuf,
    pub sigma: f64,
    pub tau: String,
    pub c1: f64,
    pub c2: f64,
    pub no_truncate: bool,
    pub output: PathBuf,
}

pub fn run_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let y = read_y_column(&args.input)?;
    let tau = resolve_tau(&args.tau, &y, args.sigma, args.c1, args.c2, !args.no_truncate)?;
    let cfg = ShrinkageConfig::with_settings(tau, args.sigma, QuadratureSettings::default())?;
    let summaries = summarize_all(&y, &cfg)?;
    let mut out = CsvWriter::new();
    out.line(&format!("# resolved_tau={tau}"));
    out.line("y,posterior_mean,posterior_variance,shrinkage_weight");
    for (yi, s) in y.iter().zip(&summaries) {
        out.row(&[yi, &s.mean, &s.variance, &s.shrinkage_weight]);
    }
    out.write_to(&args.output)
}

/// `eb` (flags supply c1/c2/truncation), `oracle:n:p[:log]`, `fixed:v`.
fn resolve_tau(
    spec: &str,
    y: &[f64],
    sigma: f64,
    c1: f64,
    c2: f64,
    truncate: bool,
) -> Result<f64, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["eb"] => Ok(empirical_bayes_tau(y, sigma, c1, c2, truncate)?.value),
        ["oracle", n, p] | ["oracle", n, p, "log"] => {
            let n: usize = n
                .parse()
                .map_err(|_| Failure::Usage(format!("oracle spec: bad n '{n}'")))?;
            let p: usize = p
                .parse()
                .map_err(|_| Failure::Usage(format!("oracle spec: bad p '{p}'")))?;
            let variant = if parts.len() == 4 {
                OracleVariant::LogCorrected
            } else {
                OracleVariant::Plain
            };
            Ok(oracle_tau(n, p, variant)?)
        }
        ["fixed", v] => v
            .parse()
            .map_err(|_| Failure::Usage(format!("fixed tau spec: bad value '{v}'"))),
        _ => Err(Failure::Usage(format!(
            "unrecognized tau spec '{spec}'; use eb, oracle:n:p[:log], or fixed:v"
        ))),
    }
}

pub struct SimulateArgs {
    pub n: usize,
    pub p: usize,
    pub a_range: String,
    pub sigma: f64,
    pub estimators: String,
    pub replicates: usize,
    pub seed: u64,
    pub output: PathBuf,
}

pub fn run_simulate(args: &SimulateArgs) -> Result<(), Failure> {
    let amplitudes = parse_amplitudes(&args.a_range)?;
    let estimators = parse_estimators(&args.estimators)?;
    if args.replicates == 0 {
        return Err(Failure::Usage("--replicates must be >= 1".into()));
    }
    let base = Scenario {
        n: args.n,
        p: args.p,
        amplitude: 0.0,
        sigma: args.sigma,
        seed: args.seed,
    };
    base.validate()?;
    let rows = risk_curve(
        &base,
        &amplitudes,
        &estimators,
        args.replicates,
        &QuadratureSettings::default(),
    )?;
    let mut out = CsvWriter::new();
    out.line("estimator,n,p,sigma,A,replicates,mean_sse,stderr_sse,seed");
    for r in &rows {
        out.row(&[
            &r.estimator,
            &args.n,
            &args.p,
            &args.sigma,
            &r.amplitude,
            &r.risk.replicates,
            &r.risk.mean_sse,
            &r.risk.stderr_sse,
            &args.seed,
        ]);
    }
    out.write_to(&args.output)
}

/// `lo..hi` (inclusive integer endpoints) or a comma list of reals.
fn parse_amplitudes(spec: &str) -> Result<Vec<f64>, Failure> {
    if let Some((lo, hi)) = spec.split_once("..") {
        let lo: i64 = lo
            .parse()
            .map_err(|_| Failure::Usage(format!("A range: bad start '{lo}'")))?;
        let hi: i64 = hi
            .parse()
            .map_err(|_| Failure::Usage(format!("A range: bad end '{hi}'")))?;
        if hi < lo {
            return Err(Failure::Usage(format!("A range {spec} is empty")));
        }
        return Ok((lo..=hi).map(|a| a as f64).collect());
    }
    spec.split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("A list: bad value '{tok}'")))
        })
        .collect()
}

/// Comma list of estimator specs:
/// `eb[:c1:c2[:raw]]`, `oracle`, `oracle:log`, `fixed:v`,
/// `gibbs[:iterations:burn_in]`, `gibbs-trunc[:iterations:burn_in]`.
fn parse_estimators(spec: &str) -> Result<Vec<Estimator>, Failure> {
    spec.split(',').map(|tok| parse_estimator(tok.trim())).collect()
}

fn parse_estimator(tok: &str) -> Result<Estimator, Failure> {
    let bad = |msg: String| Failure::Usage(format!("estimator '{tok}': {msg}"));
    let parts: Vec<&str> = tok.split(':').collect();
    match parts.as_slice() {
        ["eb"] => Ok(Estimator::EmpiricalBayes { c1: 2.0, c2: 1.0, truncate: true }),
        ["eb", c1, c2] | ["eb", c1, c2, "raw"] => {
            let c1 = c1.parse().map_err(|_| bad(format!("bad c1 '{c1}'")))?;
            let c2 = c2.parse().map_err(|_| bad(format!("bad c2 '{c2}'")))?;
            Ok(Estimator::EmpiricalBayes { c1, c2, truncate: parts.len() == 3 })
        }
        ["oracle"] => Ok(Estimator::OracleTau { variant: OracleVariant::Plain }),
        ["oracle", "log"] => Ok(Estimator::OracleTau { variant: OracleVariant::LogCorrected }),
        ["fixed", v] => {
            let v = v.parse().map_err(|_| bad(format!("bad tau '{v}'")))?;
            Ok(Estimator::FixedTau(v))
        }
        [name] | [name, _, _] if *name == "gibbs" || *name == "gibbs-trunc" => {
            let mut config = GibbsConfig {
                tau_prior: if *name == "gibbs" {
                    TauPrior::HalfCauchy
                } else {
                    TauPrior::TruncatedHalfCauchy
                },
                ..GibbsConfig::default()
            };
            if let [_, iters, burn] = parts.as_slice() {
                config.iterations =
                    iters.parse().map_err(|_| bad(format!("bad iterations '{iters}'")))?;
                config.burn_in =
                    burn.parse().map_err(|_| bad(format!("bad burn-in '{burn}'")))?;
            }
            Ok(Estimator::FullBayes { config })
        }
        _ => Err(bad("unrecognized spec".into())),
    }
}

pub struct GibbsArgs {
    pub input: PathBuf,
    pub sigma: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    pub tau_prior: TauPriorArg,
    pub output_prefix: String,
}

pub fn run_gibbs(args: &GibbsArgs) -> Result<(), Failure> {
    let y = read_y_column(&args.input)?;
    let config = GibbsConfig {
        iterations: args.iterations,
        burn_in: args.burn_in,
        seed: args.seed,
        tau_prior: match args.tau_prior {
            TauPriorArg::HalfCauchy => TauPrior::HalfCauchy,
            TauPriorArg::Truncated => TauPrior::TruncatedHalfCauchy,
        },
        record_lambda: false,
    };
    let trace = gibbs_full_bayes(&y, args.sigma, &config)?;

    let mut theta_out = CsvWriter::new();
    theta_out.line("index,theta_mean");
    for (i, m) in trace.posterior_mean().iter().enumerate() {
        theta_out.row(&[&i, m]);
    }
    theta_out.write_to(Path::new(&format!("{}_theta_mean.csv", args.output_prefix)))?;

    let mut tau_out = CsvWriter::new();
    tau_out.line("tau");
    for t in &trace.tau {
        tau_out.row(&[t]);
    }
    tau_out.write_to(Path::new(&format!("{}_tau_samples.csv", args.output_prefix)))
}

pub struct RatesArgs {
    pub n_list: String,
    pub p_rule: String,
    pub tau_variant: TauVariantArg,
    pub replicates: usize,
    pub seed: u64,
    pub output: PathBuf,
}

pub fn run_rates(args: &RatesArgs) -> Result<(), Failure> {
    let ns: Vec<usize> = args
        .n_list
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("n list: bad value '{tok}'")))
        })
        .collect::<Result<_, _>>()?;
    if ns.is_empty() {
        return Err(Failure::Usage("--n-list must name at least one size".into()));
    }
    let rule = parse_p_rule(&args.p_rule)?;
    if args.replicates == 0 {
        return Err(Failure::Usage("--replicates must be >= 1".into()));
    }
    let variant = match args.tau_variant {
        TauVariantArg::Plain => OracleVariant::Plain,
        TauVariantArg::Log => OracleVariant::LogCorrected,
    };
    let scan = rate_scan(
        &ns,
        rule,
        variant,
        1.0,
        args.replicates,
        args.seed,
        &QuadratureSettings::default(),
    )?;
    let mut out = CsvWriter::new();
    out.line("n,p,tau,mean_sse,reference_rate,ratio");
    for r in &scan {
        out.row(&[&r.n, &r.p, &r.tau, &r.mean_sse, &r.reference_rate, &r.ratio]);
    }
    out.write_to(&args.output)
}

/// `sqrt`, `constant:K`, or `fraction:F`.
fn parse_p_rule(spec: &str) -> Result<SparsityRule, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        ["sqrt"] => Ok(SparsityRule::Sqrt),
        ["constant", k] => Ok(SparsityRule::Constant(
            k.parse().map_err(|_| Failure::Usage(format!("p rule: bad constant '{k}'")))?,
        )),
        ["fraction", f] => Ok(SparsityRule::Fraction(
            f.parse().map_err(|_| Failure::Usage(format!("p rule: bad fraction '{f}'")))?,
        )),
        _ => Err(Failure::Usage(format!(
            "unrecognized p rule '{spec}'; use sqrt, constant:K, or fraction:F"
        ))),
    }
}

struct VerifyRow {
    suite: &'static str,
    check: String,
    grid_point: String,
    slack: f64,
    threshold: f64,
}

impl VerifyRow {
    fn pass(&self) -> bool {
        self.slack <= self.threshold
    }
}

pub struct VerifyArgs {
    pub suite: Suite,
    pub output: PathBuf,
}

/// Runs the selected certification suites; exit 0 only if every row
/// passes. The table always goes to `--output`, pass or fail.
pub fn run_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let all = args.suite == Suite::All;
    if all || args.suite == Suite::Envelopes {
        rows.extend(envelope_rows()?);
    }
    if all || args.suite == Suite::MeanBounds {
        rows.extend(mean_bound_rows()?);
    }
    if all || args.suite == Suite::Shrinkage {
        rows.extend(shrinkage_rows()?);
    }
    if all || args.suite == Suite::Asymptotics {
        rows.extend(asymptotic_rows()?);
    }
    if all || args.suite == Suite::TailBound {
        rows.extend(tail_bound_rows()?);
    }

    let mut out = CsvWriter::new();
    out.line("suite,check,grid_point,slack,threshold,pass");
    for r in &rows {
        out.row(&[&r.suite, &r.check, &r.grid_point, &r.slack, &r.threshold, &r.pass()]);
    }
    out.write_to(&args.output)?;

    let failures: Vec<String> = rows
        .iter()
        .filter(|r| !r.pass())
        .map(|r| format!("{}/{} at {} (slack {} > {})", r.suite, r.check, r.grid_point, r.slack, r.threshold))
        .collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("; ")))
    }
}

/// The five integral envelopes on the standard grid.
fn envelope_rows() -> Result<Vec<VerifyRow>, Failure> {
    let cert = certify_envelopes(
        CERT_REGION_A,
        &CERT_TAUS,
        &CERT_XIS,
        &QuadratureSettings::default(),
    )?;
    Ok(cert
        .iter()
        .map(|c| VerifyRow {
            suite: "envelopes",
            check: c.check.to_string(),
            grid_point: format!("tau={};xi={}", c.tau, c.xi),
            slack: c.slack,
            threshold: CERT_SLACK_LIMIT,
        })
        .collect())
}

/// The two closed-form upper bounds on the posterior mean, plus the
/// zero-point weight envelope f(tau)/tau < (2/3)/(1+tau).
fn mean_bound_rows() -> Result<Vec<VerifyRow>, Failure> {
    let mut rows = Vec::new();
    let settings = QuadratureSettings::default();
    for &tau in &[0.05, 0.1, 0.2, 0.4] {
        let cfg = ShrinkageConfig::with_settings(tau, 1.0, settings)?;
        for &y in &[0.5, 1.0, 2.0, 4.0, 8.0] {
            let t = posterior_mean(y, &cfg)?;
            let (b1, b2) = posterior_mean_envelopes(y, tau, 1.0, CERT_REGION_A)?;
            for (check, bound) in [("tilt_bound", b1), ("envelope_ratio_bound", b2)] {
                rows.push(VerifyRow {
                    suite: "mean-bounds",
                    check: check.to_string(),
                    grid_point: format!("tau={tau};y={y}"),
                    slack: t / bound,
                    threshold: CERT_SLACK_LIMIT,
                });
            }
        }
    }
    for &tau in &[1e-4, 1e-2, 0.1, 0.5, 0.9, 0.999] {
        let f = weight_at_zero(tau)?;
        rows.push(VerifyRow {
            suite: "mean-bounds",
            check: "zero_weight_envelope".to_string(),
            grid_point: format!("tau={tau}"),
            slack: (f / tau) / (2.0 / 3.0 / (1.0 + tau)),
            threshold: 1.0,
        });
    }
    Ok(rows)
}

/// Posterior variance range and the bounded-shrinkage gap envelope.
fn shrinkage_rows() -> Result<Vec<VerifyRow>, Failure> {
    let mut rows = Vec::new();
    let settings = QuadratureSettings::default();
    for &tau in &[0.05, 0.2, 0.5, 1.0] {
        let cfg = ShrinkageConfig::with_settings(tau, 1.0, settings)?;
        for &y in &[0.0, 1.0, 3.0, 6.0] {
            let s = horseshoe::posterior::summarize(y, &cfg)?;
            // Outside [0, sigma^2 + y^2/4] either way is a failure.
            let slack = if s.variance < 0.0 {
                f64::INFINITY
            } else {
                s.variance / (1.0 + y * y / 4.0)
            };
            rows.push(VerifyRow {
                suite: "shrinkage",
                check: "variance_range".to_string(),
                grid_point: format!("tau={tau};y={y}"),
                slack,
                threshold: 1.0,
            });
        }
    }
    for &tau in &[1e-2, 1e-3, 1e-4] {
        let cfg = ShrinkageConfig::with_settings(tau, 1.0, settings)?;
        let zeta = (2.0 * (1.0f64 / tau).ln()).sqrt();
        let mut worst: f64 = 0.0;
        let mut y = 0.0;
        while y <= 20.0 {
            let t = posterior_mean(y, &cfg)?;
            worst = worst.max((t - y).abs());
            y += 0.05;
        }
        rows.push(VerifyRow {
            suite: "shrinkage",
            check: "bounded_gap".to_string(),
            grid_point: format!("tau={tau};sup|y|<=20"),
            slack: worst / zeta,
            threshold: 1.05,
        });
    }
    Ok(rows)
}

/// Small-tau closed forms against quadrature at y = zeta_tau: the
/// relative error must shrink with tau and land under 0.1 at the
/// smallest grid point.
fn asymptotic_rows() -> Result<Vec<VerifyRow>, Failure> {
    let settings = QuadratureSettings::default();
    let mut rows = Vec::new();
    for k in IntegralOrder::ALL {
        let mut prev = f64::NAN;
        let taus = [1e-3, 1e-4, 1e-5, 1e-6];
        for &tau in &taus {
            let zeta = (2.0 * (1.0f64 / tau).ln()).sqrt();
            let exact = horseshoe::special::integral_i(k, zeta, tau, 1.0, &settings)?.value();
            let rel = (integral_asymptotic(k, zeta, tau, 1.0)? / exact - 1.0).abs();
            if !prev.is_nan() {
                rows.push(VerifyRow {
                    suite: "asymptotics",
                    check: format!("order_{k:?}_improves"),
                    grid_point: format!("tau={tau}"),
                    slack: rel / prev,
                    threshold: 1.0,
                });
            }
            prev = rel;
        }
        rows.push(VerifyRow {
            suite: "asymptotics",
            check: format!("order_{k:?}_terminal"),
            grid_point: format!("tau={}", taus[taus.len() - 1]),
            slack: prev / 0.1,
            threshold: 1.0,
        });
    }
    Ok(rows)
}

/// Gaussian-tail and Chernoff inequalities for the threshold count.
fn tail_bound_rows() -> Result<Vec<VerifyRow>, Failure> {
    let mut rows = Vec::new();
    for &(n, c1) in &[(100usize, 2.0f64), (400, 2.0), (1600, 2.0), (400, 3.0)] {
        let q = threshold_exceedance_probability(n, c1)?;
        let logn = (n as f64).ln();
        let mills =
            (2.0 / (c1 * std::f64::consts::PI)).sqrt() / logn.sqrt() * (n as f64).powf(-c1 / 2.0);
        rows.push(VerifyRow {
            suite: "tail-bound",
            check: "mills_envelope".to_string(),
            grid_point: format!("n={n};c1={c1}"),
            slack: q / mills,
            threshold: 1.0,
        });
    }
    for &(n, p, c1, c2) in &[(400usize, 20usize, 2.0f64, 1.5f64), (800, 28, 2.0, 1.5)] {
        let bound = chernoff_tau_bound(n, p, c1, c2, 1.0)?;
        rows.push(VerifyRow {
            suite: "tail-bound",
            check: "chernoff_in_unit_range".to_string(),
            grid_point: format!("n={n};p={p};c1={c1};c2={c2}"),
            slack: bound,
            threshold: 1.0,
        });
    }
    Ok(rows)
}
