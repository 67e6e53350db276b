//! Exact rational numbers and their string forms.
//!
//! All probabilities, losses, and coordinates in this crate are
//! arbitrary-precision rationals; floating point appears only inside
//! sampling and the one sample-size formula that needs a logarithm.

use num::{BigInt, BigRational};
use num_traits::{Signed, ToPrimitive};
use thiserror::Error;

/// The exact rational type used throughout the crate.
pub type Ratio = BigRational;

/// Shorthand constructor from machine integers.
pub fn ratio(numer: i64, denom: i64) -> Ratio {
    Ratio::new(BigInt::from(numer), BigInt::from(denom))
}

/// Errors from [`parse_ratio`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("malformed rational {0:?}: expected \"p\" or \"p/q\"")]
    Malformed(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parse `"p"` or `"p/q"` with optional sign into an exact rational.
pub fn parse_ratio(s: &str) -> Result<Ratio, RatioParseError> {
    let s = s.trim();
    let malformed = || RatioParseError::Malformed(s.to_string());
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let numer: BigInt = numer.parse().map_err(|_| malformed())?;
    let denom: BigInt = denom.parse().map_err(|_| malformed())?;
    if denom == BigInt::from(0) {
        return Err(RatioParseError::ZeroDenominator(s.to_string()));
    }
    Ok(Ratio::new(numer, denom))
}

/// Render a rational as `"p"` when integral and `"p/q"` otherwise.
pub fn format_ratio(r: &Ratio) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest double, for the few places that need transcendental arithmetic.
pub fn ratio_to_f64(r: &Ratio) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // Fall back to a quotient of doubles for extreme magnitudes.
        let n = r.numer().to_f64().unwrap_or(if r.numer().is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        });
        let d = r.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

/// Absolute value (the trait method needs a `Signed` import at call sites).
pub fn ratio_abs(r: &Ratio) -> Ratio {
    r.abs()
}
