//! Exponent-scaled floating point values.
//!
//! The shrinkage integrals grow like `exp(xi)` with `xi = y^2 / (2 sigma^2)`,
//! which leaves `f64` range well inside the parameter region of interest
//! (`y = 60`, `sigma = 1` gives `e^1800`). Values are therefore carried as
//! a finite mantissa together with an additive natural-log scale:
//!
//! ```text
//!     value = mantissa * exp(log_scale)
//! ```
//!
//! Ratios of scaled values cancel the scales analytically, so quantities
//! like the posterior shrinkage weight never route through an overflowing
//! `exp` call.

/// A real number stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentScaledValue {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ExponentScaledValue {
    pub fn new(mantissa: f64, log_scale: f64) -> Self {
        Self { mantissa, log_scale }
    }

    /// The value `x` itself, with `log_scale = 0`.
    pub fn from_value(x: f64) -> Self {
        Self { mantissa: x, log_scale: 0.0 }
    }

    /// Rescales so `|mantissa|` lies in `(0.1, 10]` while the represented
    /// value is unchanged up to relative 1e-15. Zero normalizes to
    /// `(0.0, 0.0)`; non-finite mantissas pass through untouched.
    pub fn normalize(self) -> Self {
        if self.mantissa == 0.0 {
            return Self { mantissa: 0.0, log_scale: 0.0 };
        }
        if !self.mantissa.is_finite() {
            return self;
        }
        // Decimal shift j with log10|m| - j in (-1, 1], i.e. j = ceil(log10|m| - 1).
        let j = (self.mantissa.abs().log10() - 1.0).ceil();
        if j == 0.0 {
            return self;
        }
        // Two factors keep the intermediate product in range even for
        // subnormal or near-overflow mantissas.
        let p = -(j as i32);
        let half = p / 2;
        let mut out = Self {
            mantissa: self.mantissa * 10f64.powi(half) * 10f64.powi(p - half),
            log_scale: self.log_scale + j * std::f64::consts::LN_10,
        };
        // The decimal shift can overshoot the bracket by one ulp.
        if out.mantissa.abs() > 10.0 {
            out.mantissa /= 10.0;
            out.log_scale += std::f64::consts::LN_10;
        } else if out.mantissa.abs() <= 0.1 {
            out.mantissa *= 10.0;
            out.log_scale -= std::f64::consts::LN_10;
        }
        out
    }

    /// The plain `f64` value; overflows to infinity when the scale is
    /// beyond `f64` range.
    pub fn value(self) -> f64 {
        self.mantissa * self.log_scale.exp()
    }

    /// `ln |value|`. Minus infinity for zero.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }

    /// `self / denom` as a plain `f64`. The scales are subtracted before
    /// any `exp`, so two hugely scaled values with comparable magnitude
    /// divide without overflow.
    pub fn ratio(self, denom: Self) -> f64 {
        (self.mantissa / denom.mantissa) * (self.log_scale - denom.log_scale).exp()
    }
}
