//! Coefficient fields.
//!
//! Every algebraic structure in this crate is generic over a [`Scalar`], a
//! field with exact equality. The crate root fixes the concrete choice
//! [`crate::Rational`]; the generic parameter exists so that the
//! combinatorial layers can be exercised with other exact fields.

use std::fmt::{Debug, Display};

use num_traits::{FromPrimitive, Num, Signed};

/// A coefficient field.
///
/// `Num::from_str_radix(text, 10)` is used to parse coefficients, and
/// `Display` is used to serialize them, so a scalar type must round-trip
/// through its own textual form.
pub trait Scalar:
    Num + Signed + FromPrimitive + Clone + Debug + Display + Send + Sync + 'static
{
    /// The scalar `n`.
    fn int(n: i64) -> Self {
        Self::from_i64(n).expect("every i64 embeds in a field of characteristic zero")
    }

    /// The scalar `n / d`.
    ///
    /// # Panics
    /// Panics if `d == 0`.
    fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::int(n) / Self::int(d)
    }

    /// Parses a coefficient written as an integer or `int/posint`.
    fn parse_coeff(text: &str) -> Option<Self> {
        // ratio types only accept the `n/d` form, so integers get a unit
        // denominator first
        let digits = |t: &str| {
            let t = t.strip_prefix('-').unwrap_or(t);
            !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit())
        };
        match text.split_once('/') {
            Some((n, d)) if !digits(n) || !d.bytes().all(|b| b.is_ascii_digit()) => return None,
            None if !digits(text) => return None,
            _ => {}
        }
        match text.split_once('/') {
            Some((n, d)) => {
                let n = Self::from_str_radix(&format!("{n}/1"), 10)
                    .or_else(|_| Self::from_str_radix(n, 10))
                    .ok()?;
                let d = Self::from_str_radix(&format!("{d}/1"), 10)
                    .or_else(|_| Self::from_str_radix(d, 10))
                    .ok()?;
                (!d.is_zero() && d.is_positive()).then(|| n / d)
            }
            None => Self::from_str_radix(&format!("{text}/1"), 10)
                .or_else(|_| Self::from_str_radix(text, 10))
                .ok(),
        }
    }
}

impl<T> Scalar for T where
    T: Num + Signed + FromPrimitive + Clone + Debug + Display + Send + Sync + 'static
{
}
