//! The shrinkage integrals and their hypergeometric-series counterpart.
//!
//! Everything reduces to the one-parameter family
//!
//! ```text
//!     I_k(y) = int_0^1 z^k e^{xi z} / (tau^2 + (1 - tau^2) z) dz,
//!     xi = y^2 / (2 sigma^2),    k in {-1/2, 1/2, 3/2}.
//! ```
//!
//! Two transformations make the family tame:
//!
//! * `z = t^2` removes the `z^{-1/2}` endpoint singularity, leaving an
//!   analytic integrand `2 t^{2k+1} e^{xi t^2} / (tau^2 + (1-tau^2) t^2)`
//!   whose only feature is a knee of width `tau` at the origin;
//! * for large `xi` the growth is extracted analytically: writing the
//!   integrand against `e^{xi (t^2 - 1)} <= 1` and carrying `e^{xi}` in
//!   the log scale of the result keeps every intermediate finite no
//!   matter how large `y` gets.
//!
//! Independently of quadrature, `I_{-1/2}` and `I_{-1/2} - I_{1/2}` have
//! closed forms in the Humbert confluent hypergeometric function
//!
//! ```text
//!     phi1(alpha, beta, gamma; x, w)
//!         = sum_{m,n >= 0} (alpha)_{m+n} (beta)_n
//!           / ((gamma)_{m+n} m! n!) x^m w^n,        |w| < 1,
//! ```
//!
//! at `alpha = 1/2, beta = 1, x = xi, w = 1 - 1/tau^2`, which converges
//! for `tau > 1/sqrt(2)` and provides the cross-validation route used by
//! the test suite: the two paths share no code beyond `exp`.

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOutcome, QuadratureSettings};
use crate::scaled::ExponentScaledValue;

/// The half-integer exponent `k` of the integral family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum IntegralOrder {
    MinusHalf,
    Half,
    ThreeHalves,
}

impl IntegralOrder {
    /// All three orders, lowest first.
    pub const ALL: [IntegralOrder; 3] =
        [IntegralOrder::MinusHalf, IntegralOrder::Half, IntegralOrder::ThreeHalves];

    /// The exponent as a real number.
    pub fn exponent(self) -> f64 {
        match self {
            IntegralOrder::MinusHalf => -0.5,
            IntegralOrder::Half => 0.5,
            IntegralOrder::ThreeHalves => 1.5,
        }
    }

    /// Power of `t` after the `z = t^2` substitution: `2k + 1`.
    fn t_power(self) -> i32 {
        match self {
            IntegralOrder::MinusHalf => 0,
            IntegralOrder::Half => 2,
            IntegralOrder::ThreeHalves => 4,
        }
    }
}

fn validate_point(y: f64, tau: f64, sigma: f64) -> Result<()> {
    if !y.is_finite() {
        return Err(Error::domain(format!("y = {y} must be finite")));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::domain(format!("tau = {tau} outside (0, 1]")));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be finite and > 0")));
    }
    Ok(())
}

/// `I_k(y)` as an exponent-scaled value.
///
/// Below `settings.large_xi_threshold` the integrand is evaluated
/// directly (`log_scale = 0` before normalization); above it the
/// `e^{xi}` factor is split off analytically and returned in the scale,
/// so the mantissa integral is bounded by the `xi = 0` case.
pub fn integral_i(
    k: IntegralOrder,
    y: f64,
    tau: f64,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<ExponentScaledValue> {
    validate_point(y, tau, sigma)?;
    let xi = y * y / (2.0 * sigma * sigma);
    let tau2 = tau * tau;
    let slope = 1.0 - tau2;
    let p = k.t_power();
    let scaled = xi > settings.large_xi_threshold;
    let out = if scaled {
        let f = |t: f64| 2.0 * t.powi(p) * (xi * (t * t - 1.0)).exp() / (tau2 + slope * t * t);
        // The factored integrand decays like e^{-2 xi (1 - t)}: for huge
        // xi the mass sits in a band near 1 narrower than the first
        // panel's node spacing, where every node underflows and the rule
        // converges falsely to zero. Splitting at the analytic decay
        // scale puts nodes inside the band.
        let cut = (1.0 - 20.0 / xi).max(0.25);
        let left = integrate(f, 0.0, cut, settings)?;
        let right = integrate(f, cut, 1.0, settings)?;
        QuadOutcome {
            value: left.value + right.value,
            error_bound: left.error_bound + right.error_bound,
            splits: left.splits + right.splits,
        }
    } else {
        integrate(
            |t| 2.0 * t.powi(p) * (xi * t * t).exp() / (tau2 + slope * t * t),
            0.0,
            1.0,
            settings,
        )?
    };
    let log_scale = if scaled { xi } else { 0.0 };
    Ok(ExponentScaledValue::new(out.value, log_scale).normalize())
}

/// `[I_{-1/2}, I_{1/2}, I_{3/2}]` at a common point. All three share the
/// same representation branch, so their scales differ only by mantissa
/// normalization and ratios cancel exactly.
pub fn integral_triple(
    y: f64,
    tau: f64,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<[ExponentScaledValue; 3]> {
    Ok([
        integral_i(IntegralOrder::MinusHalf, y, tau, sigma, settings)?,
        integral_i(IntegralOrder::Half, y, tau, sigma, settings)?,
        integral_i(IntegralOrder::ThreeHalves, y, tau, sigma, settings)?,
    ])
}

/// `I_{k_num}(y) / I_{k_den}(y)` as a plain `f64`; the exponential scales
/// cancel analytically.
pub fn integral_ratio(
    k_num: IntegralOrder,
    k_den: IntegralOrder,
    y: f64,
    tau: f64,
    sigma: f64,
    settings: &QuadratureSettings,
) -> Result<f64> {
    let num = integral_i(k_num, y, tau, sigma, settings)?;
    let den = integral_i(k_den, y, tau, sigma, settings)?;
    Ok(num.ratio(den))
}

const MAX_SERIES_TERMS: usize = 100_000;

/// Kummer's confluent function `M(a, c, x)` by direct series, for
/// `c > a > 0`. Negative `x` routes through the Kummer transform
/// `M(a, c, x) = e^x M(c - a, c, -x)` so every summed term is positive.
fn kummer_m(a: f64, c: f64, x: f64, rel_tol: f64) -> Result<f64> {
    if x < 0.0 {
        return Ok(x.exp() * kummer_m(c - a, c, -x, rel_tol)?);
    }
    let mut term = 1.0f64;
    let mut sum = 1.0f64;
    for j in 0..MAX_SERIES_TERMS {
        let jf = j as f64;
        term *= (a + jf) / ((c + jf) * (jf + 1.0)) * x;
        sum += term;
        // Terms are positive and unimodal; past the peak (term ratio < 1/2)
        // the tail is under twice the current term.
        if term < 0.25 * rel_tol * sum && jf + 1.0 > x {
            return Ok(sum);
        }
    }
    Err(Error::Series { max_terms: MAX_SERIES_TERMS, partial: sum })
}

/// The Humbert series `phi1(alpha, beta, gamma; x, w)`, summed row-wise:
///
/// ```text
///     phi1 = sum_n [(alpha)_n (beta)_n / ((gamma)_n n!)] w^n
///            * M(alpha + n, gamma + n, x).
/// ```
///
/// Converges for `|w| < 1`; requires `gamma > alpha > 0` so each row's
/// Kummer factor lies in `(0, e^{max(x, 0)}]`, which gives the geometric
/// tail bound used for termination.
pub fn phi1_series(alpha: f64, beta: f64, gamma: f64, x: f64, w: f64, rel_tol: f64) -> Result<f64> {
    for (name, v) in [("alpha", alpha), ("beta", beta), ("gamma", gamma), ("x", x), ("w", w)] {
        if !v.is_finite() {
            return Err(Error::domain(format!("{name} = {v} must be finite")));
        }
    }
    if w.abs() >= 1.0 {
        return Err(Error::domain(format!("|w| = {} must be < 1 for the series to converge", w.abs())));
    }
    if !(alpha > 0.0 && gamma > alpha) {
        return Err(Error::domain(format!(
            "need gamma > alpha > 0, got alpha = {alpha}, gamma = {gamma}"
        )));
    }
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(Error::domain(format!("rel_tol = {rel_tol} outside (0, 1)")));
    }

    let kummer_cap = x.max(0.0).exp();
    let mut coef = 1.0f64; // (alpha)_n (beta)_n / ((gamma)_n n!) * w^n
    let mut sum = 0.0f64;
    for n in 0..MAX_SERIES_TERMS {
        let nf = n as f64;
        let row = coef * kummer_m(alpha + nf, gamma + nf, x, rel_tol)?;
        sum += row;
        let next_coef = coef * w * (alpha + nf) * (beta + nf) / ((gamma + nf) * (nf + 1.0));
        // Coefficient ratios beyond n are bounded by |w| (1 + alpha/m)(1 + beta/m),
        // decreasing in m; once that bound drops under 1, the remaining rows are
        // dominated by a geometric series times the Kummer cap.
        let q = w.abs() * (1.0 + alpha.abs() / (nf + 1.0)) * (1.0 + beta.abs() / (nf + 1.0));
        if q < 1.0 && next_coef.abs() * kummer_cap <= rel_tol * sum.abs() * (1.0 - q) {
            return Ok(sum);
        }
        coef = next_coef;
    }
    Err(Error::Series { max_terms: MAX_SERIES_TERMS, partial: sum })
}
