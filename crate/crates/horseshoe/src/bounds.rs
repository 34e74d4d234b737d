//! Closed-form envelopes, risk rates, and tail bounds, with numeric
//! certification helpers.
//!
//! The envelope family brackets each integral `I_k` by elementary
//! expressions built from exponential majorants of the kernel on the
//! three regions `z < tau^2 a`, `tau^2 a < z < 1/a`, `z > 1/a`, for a
//! free region parameter `a > 1`. Each display is valid only on part of
//! the `tau` range, namely where its region split is ordered:
//!
//! | order `k` | side  | requires        |
//! |-----------|-------|-----------------|
//! | `3/2`     | lower | `tau < 1/sqrt(a)` |
//! | `1/2`     | lower | `tau < 1`         |
//! | `1/2`     | upper | `tau < 1/sqrt(a)` |
//! | `-1/2`    | lower | `tau < 1/a`       |
//! | `-1/2`    | upper | `tau < 1/a`       |
//!
//! [`certify_envelopes`] checks every applicable side against quadrature
//! on a `tau x xi` grid and reports multiplicative slacks; a slack at or
//! under [`CERT_SLACK_LIMIT`] certifies the inequality at that point to
//! quadrature accuracy.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadratureSettings};
use crate::special::{integral_i, IntegralOrder};
use std::sync::OnceLock;

/// One-sided or two-sided closed-form bracket of an integral value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopePair {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

fn validate_envelope_point(y: f64, tau: f64, sigma: f64, a: f64) -> Result<()> {
    if !(y != 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("y = {y} must be nonzero and finite")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain(format!("tau = {tau} outside (0, 1]")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::domain(format!("region parameter a = {a} must be > 1")));
    }
    Ok(())
}

/// The closed-form envelopes of `I_k(y)` for region parameter `a`.
///
/// Sides whose `tau` condition fails are `None`; if no side of the
/// requested order is valid at this `tau`, the call is a domain error
/// naming the violated condition.
pub fn integral_envelopes(
    k: IntegralOrder,
    y: f64,
    tau: f64,
    sigma: f64,
    a: f64,
) -> Result<EnvelopePair> {
    validate_envelope_point(y, tau, sigma, a)?;
    let xi = y * y / (2.0 * sigma * sigma);
    let s2y2 = sigma * sigma / (y * y); // = 1 / (2 xi)
    let ra = a.sqrt();
    let e_xi = xi.exp();
    let e_xi_a = (xi / a).exp();
    let e_tau2 = (tau * tau * xi).exp();

    let pair = match k {
        IntegralOrder::ThreeHalves => EnvelopePair {
            lower: (tau < 1.0 / ra).then(|| {
                tau.powi(3) / 5.0 + s2y2 * tau * (e_xi_a - e_tau2) + s2y2 / ra * (e_xi - e_xi_a)
            }),
            upper: None,
        },
        IntegralOrder::Half => EnvelopePair {
            lower: (tau < 1.0).then(|| tau / 3.0 + s2y2 * (e_xi - e_tau2)),
            upper: (tau < 1.0 / ra).then(|| {
                2.0 / 3.0 * e_tau2 * tau
                    + 2.0 * e_xi_a * (1.0 / ra - tau)
                    + 2.0 * ra * s2y2 * (e_xi - e_xi_a)
            }),
        },
        IntegralOrder::MinusHalf => {
            if tau < 1.0 / a {
                let e_tau = (tau * xi).exp();
                let rt = tau.sqrt();
                EnvelopePair {
                    lower: Some(
                        1.0 / tau
                            + e_tau2 * (1.0 / tau - 1.0 / rt)
                            + a * ra * s2y2 * (e_xi_a - e_tau)
                            + s2y2 * (e_xi - e_xi_a),
                    ),
                    upper: Some(
                        2.0 * e_tau2 / tau
                            + 2.0 * e_tau * (1.0 / tau - 1.0 / rt)
                            + 2.0 * e_xi_a * (1.0 / rt - ra)
                            + 2.0 * a * ra * s2y2 * (e_xi - e_xi_a),
                    ),
                }
            } else {
                EnvelopePair { lower: None, upper: None }
            }
        }
    };
    if pair.lower.is_none() && pair.upper.is_none() {
        let needed = match k {
            IntegralOrder::ThreeHalves => format!("tau < 1/sqrt(a) = {}", 1.0 / ra),
            IntegralOrder::Half => "tau < 1".to_string(),
            IntegralOrder::MinusHalf => format!("tau < 1/a = {}", 1.0 / a),
        };
        return Err(Error::domain(format!(
            "no envelope side of order {:?} is valid at tau = {tau}; requires {needed}",
            k
        )));
    }
    Ok(pair)
}

/// Posterior mean of `1 - kappa` at `y = 0` in closed form:
///
/// ```text
///     f(tau) = tau / (1 - tau^2)
///              * (sqrt(1 - tau^2) / arctan(sqrt(1 - tau^2) / tau) - tau),
/// ```
///
/// continued through `tau = 1` by its limit `1/3`. Satisfies
/// `f(tau) / tau < (2/3) / (1 + tau)`.
pub fn weight_at_zero(tau: f64) -> Result<f64> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain(format!("tau = {tau} outside (0, 1]")));
    }
    let u2 = (1.0 - tau * tau) / (tau * tau);
    if u2 < 1e-4 {
        // arctan series around the flat-prior end; error O(u^6).
        return Ok(1.0 / 3.0 - 4.0 * u2 / 45.0 + 44.0 * u2 * u2 / 945.0);
    }
    let root = (1.0 - tau * tau).sqrt();
    Ok(tau / (1.0 - tau * tau) * (root / (root / tau).atan() - tau))
}

/// Two closed-form upper envelopes for the posterior mean at `y > 0`:
///
/// * `bound1 = y e^{xi} f(tau)`, from bounding the tilt `e^{xi z} <= e^{xi}`;
/// * `bound2 = y * upper(I_{1/2}) / lower(I_{-1/2})`, from the envelope
///   family; needs `tau < 1/a`.
pub fn posterior_mean_envelopes(y: f64, tau: f64, sigma: f64, a: f64) -> Result<(f64, f64)> {
    validate_envelope_point(y, tau, sigma, a)?;
    if y < 0.0 {
        return Err(Error::domain(format!("y = {y} must be positive; use odd symmetry")));
    }
    if tau >= 1.0 / a {
        return Err(Error::domain(format!(
            "bound2 requires tau < 1/a = {}, got tau = {tau}",
            1.0 / a
        )));
    }
    let xi = y * y / (2.0 * sigma * sigma);
    let bound1 = y * xi.exp() * weight_at_zero(tau)?;
    let upper_half = integral_envelopes(IntegralOrder::Half, y, tau, sigma, a)?
        .upper
        .expect("tau < 1/a < 1/sqrt(a)");
    let lower_minus = integral_envelopes(IntegralOrder::MinusHalf, y, tau, sigma, a)?
        .lower
        .expect("tau < 1/a");
    Ok((bound1, y * upper_half / lower_minus))
}

/// Problem size for the risk-rate expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateInputs {
    pub n: usize,
    /// Number of nonzero means; `1 <= p < n`.
    pub p: usize,
    pub tau: f64,
    pub sigma: f64,
}

impl RateInputs {
    fn validate(&self) -> Result<()> {
        if !(self.p >= 1 && self.p < self.n) {
            return Err(Error::domain(format!(
                "need 1 <= p < n, got p = {}, n = {}",
                self.p, self.n
            )));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::domain(format!("tau = {} outside (0, 1]", self.tau)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::domain(format!("sigma = {} must be finite and > 0", self.sigma)));
        }
        Ok(())
    }

    fn log_inv_tau(&self) -> f64 {
        (1.0 / self.tau).ln()
    }
}

/// Worst-case mean-square-error rate of the plug-in posterior mean over
/// signal vectors with at most `p` nonzero coordinates, up to constants:
/// `sigma^2 [p log(1/tau) + (n - p) tau sqrt(log(1/tau))]`.
pub fn mse_upper_rate(inp: &RateInputs) -> Result<f64> {
    inp.validate()?;
    let l = inp.log_inv_tau();
    Ok(inp.sigma * inp.sigma * (inp.p as f64 * l + (inp.n - inp.p) as f64 * inp.tau * l.sqrt()))
}

/// Minimax risk over the same classes: `2 sigma^2 p log(n/p)`.
pub fn minimax_rate(n: usize, p: usize, sigma: f64) -> Result<f64> {
    let inp = RateInputs { n, p, tau: 0.5, sigma };
    inp.validate()?;
    Ok(2.0 * sigma * sigma * p as f64 * (n as f64 / p as f64).ln())
}

/// `(lower, upper)` rate bounds for the summed posterior variance:
/// the upper matches [`mse_upper_rate`], the lower keeps only the noise
/// term `(n - p) tau sqrt(log(1/tau))`, which already forces `tau -> 0`
/// if the posterior is to contract around a sparse truth.
pub fn variance_rate_bounds(inp: &RateInputs) -> Result<(f64, f64)> {
    inp.validate()?;
    let l = inp.log_inv_tau();
    let s2 = inp.sigma * inp.sigma;
    let noise = s2 * (inp.n - inp.p) as f64 * inp.tau * l.sqrt();
    Ok((noise, s2 * inp.p as f64 * l + noise))
}

/// Rate pair `(squared bias part, variance part)` when the signal class
/// is only `gamma`-fractionally identified (`0 < gamma < 1`):
///
/// ```text
///     bias:     sigma^2 [p log(1/tau) + (n-p) tau sqrt(log(1/tau))]
///     variance: sigma^2 [p tau^{(1-gamma)^2} log(1/tau)^{gamma - 1/2}
///                        + (n-p) tau sqrt(log(1/tau))]
/// ```
pub fn mismatch_rates(inp: &RateInputs, gamma: f64) -> Result<(f64, f64)> {
    inp.validate()?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma = {gamma} outside (0, 1)")));
    }
    if inp.tau >= 1.0 {
        return Err(Error::domain("mismatch rates need tau < 1".to_string()));
    }
    let l = inp.log_inv_tau();
    let s2 = inp.sigma * inp.sigma;
    let noise = (inp.n - inp.p) as f64 * inp.tau * l.sqrt();
    let bias = s2 * (inp.p as f64 * l + noise);
    let var = s2
        * (inp.p as f64 * inp.tau.powf((1.0 - gamma) * (1.0 - gamma)) * l.powf(gamma - 0.5)
            + noise);
    Ok((bias, var))
}

fn kernel_mass(power: i32) -> Result<f64> {
    // int_0^1 z^k / (1 + z) dz with z = t^2; power = 2k + 1.
    let s = QuadratureSettings::default();
    Ok(integrate(move |t| 2.0 * t.powi(power) / (1.0 + t * t), 0.0, 1.0, &s)?.value)
}

/// `int_0^infty z^{-1/2} / (1 + z) dz`, evaluated numerically. The map
/// `z -> 1/z` carries `[1, inf) ` onto `(0, 1]` with the same integrand
/// value, so the improper integral is twice the unit-interval piece.
/// Equals `pi`; kept numeric as a self-check of the quadrature pipeline.
pub fn kernel_mass_minus_half() -> Result<f64> {
    Ok(2.0 * kernel_mass(0)?)
}

/// Leading-order approximation of `I_k` for small `tau` at moderate
/// `xi = y^2 / (2 sigma^2)`:
///
/// ```text
///     I_{-1/2} ~ pi / tau            + (2 sigma^2 / y^2) e^{xi}
///     I_k      ~ tau^{2k} int_0^1 z^k/(1+z) dz + (2 sigma^2 / y^2) e^{xi},  k > 0.
/// ```
///
/// Plain `f64`; requires `xi < 700` so `e^{xi}` is representable.
pub fn integral_asymptotic(k: IntegralOrder, y: f64, tau: f64, sigma: f64) -> Result<f64> {
    if !(y != 0.0 && y.is_finite()) {
        return Err(Error::domain(format!("y = {y} must be nonzero and finite")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain(format!("tau = {tau} outside (0, 1]")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    let xi = y * y / (2.0 * sigma * sigma);
    if xi >= 700.0 {
        return Err(Error::domain(format!("xi = {xi} too large for the unscaled asymptotic")));
    }
    static C_HALF: OnceLock<f64> = OnceLock::new();
    static C_THREE_HALVES: OnceLock<f64> = OnceLock::new();
    let tail = 2.0 * sigma * sigma / (y * y) * xi.exp();
    let head = match k {
        IntegralOrder::MinusHalf => std::f64::consts::PI / tau,
        IntegralOrder::Half => *C_HALF.get_or_init(|| kernel_mass(2).expect("fixed smooth integrand")) * tau,
        IntegralOrder::ThreeHalves => {
            *C_THREE_HALVES.get_or_init(|| kernel_mass(4).expect("fixed smooth integrand"))
                * tau.powi(3)
        }
    };
    Ok(head + tail)
}

/// The constants `(c1(gamma), c2(gamma))` of the mismatch risk expansion:
///
/// ```text
///     c1 = (2 sigma / sqrt(2 pi)) int_R e^{gamma u / sigma^2}
///              / (pi + 2 sigma^2 e^{u / sigma^2}) du
///     c2 = (2 sigma pi / sqrt(2 pi)) int_R e^{gamma u / sigma^2}
///              / (pi + 2 sigma^2 e^{u / sigma^2})^2 du
/// ```
///
/// Both integrals are evaluated in `v = u / sigma^2` on a window chosen
/// from the exponential tail decay (rates `gamma` left, `1 - gamma`
/// right). Exact scaling: `c1(gamma, sigma) = sigma^{3 - 2 gamma} c1(gamma, 1)`.
pub fn mismatch_constants(gamma: f64, sigma: f64) -> Result<(f64, f64)> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::domain(format!("gamma = {gamma} outside (0, 1)")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    let s = QuadratureSettings::default();
    let s2 = sigma * sigma;
    // e^{-gamma L} and e^{-(1-gamma) L} both below 1e-26 at the window edge.
    let window = 60.0 / gamma.min(1.0 - gamma);
    let pi = std::f64::consts::PI;
    let den = move |v: f64| pi + 2.0 * s2 * v.exp();
    let f1 = move |v: f64| (gamma * v).exp() / den(v);
    let f2 = move |v: f64| (gamma * v).exp() / (den(v) * den(v));
    let i1 = integrate(f1, -window, 0.0, &s)?.value + integrate(f1, 0.0, window, &s)?.value;
    let i2 = integrate(f2, -window, 0.0, &s)?.value + integrate(f2, 0.0, window, &s)?.value;
    let front = 2.0 * sigma * s2 / (2.0 * pi).sqrt(); // 2 sigma / sqrt(2 pi) * du/dv
    Ok((front * i1, front * pi * i2))
}

/// `q_n = P(|N(0, 1)| >= sqrt(c1 log n)) = erfc(sqrt(c1 log n / 2))`:
/// the per-coordinate probability that pure noise crosses the empirical
/// Bayes threshold.
pub fn threshold_exceedance_probability(n: usize, c1: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("need n >= 2, got {n}")));
    }
    if !(c1 >= 2.0 && c1.is_finite()) {
        return Err(Error::domain(format!("c1 = {c1} must be >= 2")));
    }
    Ok(libm::erfc((c1 * (n as f64).ln() / 2.0).sqrt()))
}

/// Chernoff bound on the empirical Bayes overshoot event
/// `P(tau_hat > p / n)` under `p` signals and `n - p` pure-noise
/// coordinates:
///
/// ```text
///     P <= (e (n - p) q_n / m)^m,    m = (c2 - 1) p + 1,
/// ```
///
/// clamped to 1. Needs `c2 > 1` (the slack between the counted signals
/// `p` and the budget `c2 p` is what the noise binomial must overcome).
/// `sigma` is validated but cancels: threshold and noise share the scale.
pub fn chernoff_tau_bound(n: usize, p: usize, c1: f64, c2: f64, sigma: f64) -> Result<f64> {
    if !(p >= 1 && p < n) {
        return Err(Error::domain(format!("need 1 <= p < n, got p = {p}, n = {n}")));
    }
    if !(c2 > 1.0 && c2.is_finite()) {
        return Err(Error::domain(format!("c2 = {c2} must be > 1 for the overshoot bound")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    let q = threshold_exceedance_probability(n, c1)?;
    let m = (c2 - 1.0) * p as f64 + 1.0;
    let base = std::f64::consts::E * (n - p) as f64 * q / m;
    Ok(base.powf(m).min(1.0))
}

/// Report on the two tail conditions under which a data-driven `tau`
/// inherits plug-in risk behavior: the overshoot mass must be small
/// against `p/n` and the undershoot mass small against `log(n/p)` after
/// weighting by the log of the density floor `g_value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauConditionReport {
    /// `prob_over / (p/n)`.
    pub overshoot_ratio: f64,
    /// `-log(g_value) * prob_under / log(n/p)`.
    pub undershoot_ratio: f64,
    pub overshoot_ok: bool,
    pub undershoot_ok: bool,
    /// The comparison constant both ratios were held against.
    pub constant: f64,
}

pub fn tau_condition_report(
    prob_over: f64,
    prob_under: f64,
    g_value: f64,
    n: usize,
    p: usize,
    constant: f64,
) -> Result<TauConditionReport> {
    if !(p >= 1 && p < n) {
        return Err(Error::domain(format!("need 1 <= p < n, got p = {p}, n = {n}")));
    }
    for (name, v) in [("prob_over", prob_over), ("prob_under", prob_under)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::domain(format!("{name} = {v} outside [0, 1]")));
        }
    }
    if !(g_value > 0.0 && g_value < 1.0) {
        return Err(Error::domain(format!("g_value = {g_value} outside (0, 1)")));
    }
    if !(constant > 0.0 && constant.is_finite()) {
        return Err(Error::domain(format!("constant = {constant} must be > 0")));
    }
    let frac = p as f64 / n as f64;
    let overshoot_ratio = prob_over / frac;
    let undershoot_ratio = -g_value.ln() * prob_under / (1.0 / frac).ln();
    Ok(TauConditionReport {
        overshoot_ratio,
        undershoot_ratio,
        overshoot_ok: overshoot_ratio <= constant,
        undershoot_ok: undershoot_ratio <= constant,
        constant,
    })
}

/// Multiplicative slack allowed when certifying an inequality against
/// quadrature values: covers the integrator tolerance with an order of
/// magnitude to spare.
pub const CERT_SLACK_LIMIT: f64 = 1.0 + 1e-8;

/// Standard certification grid: every envelope display, each decade of
/// `tau` from 1e-1 to 1e-4 crossed with `xi` from 1 to 50, at `a = 2`.
pub const CERT_TAUS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];
pub const CERT_XIS: [f64; 5] = [1.0, 5.0, 10.0, 25.0, 50.0];
pub const CERT_REGION_A: f64 = 2.0;

/// One certified comparison: `slack` is `bound/value` for lower bounds
/// and `value/bound` for upper bounds, so `slack <= CERT_SLACK_LIMIT`
/// means the inequality holds to quadrature accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertRow {
    pub check: &'static str,
    pub tau: f64,
    pub xi: f64,
    pub slack: f64,
    pub pass: bool,
}

/// Certifies all five envelope displays across a `tau x xi` grid at
/// noise level `sigma = 1` (the displays and the integrals rescale
/// together, so one noise level certifies the family).
pub fn certify_envelopes(
    a: f64,
    taus: &[f64],
    xis: &[f64],
    settings: &QuadratureSettings,
) -> Result<Vec<CertRow>> {
    let mut rows = Vec::with_capacity(taus.len() * xis.len() * 5);
    for &tau in taus {
        for &xi in xis {
            let y = (2.0 * xi).sqrt();
            for k in IntegralOrder::ALL {
                let value = integral_i(k, y, tau, 1.0, settings)?.value();
                let pair = integral_envelopes(k, y, tau, 1.0, a)?;
                let name_lower = match k {
                    IntegralOrder::MinusHalf => "lower_minus_half",
                    IntegralOrder::Half => "lower_half",
                    IntegralOrder::ThreeHalves => "lower_three_halves",
                };
                if let Some(lo) = pair.lower {
                    let slack = lo / value;
                    rows.push(CertRow { check: name_lower, tau, xi, slack, pass: slack <= CERT_SLACK_LIMIT });
                }
                if let Some(up) = pair.upper {
                    let slack = value / up;
                    let check = match k {
                        IntegralOrder::MinusHalf => "upper_minus_half",
                        IntegralOrder::Half => "upper_half",
                        IntegralOrder::ThreeHalves => unreachable!("no upper display"),
                    };
                    rows.push(CertRow { check, tau, xi, slack, pass: slack <= CERT_SLACK_LIMIT });
                }
            }
        }
    }
    Ok(rows)
}
