//! Exact ordered-field scalars.
//!
//! Every decision in this crate is an equality or containment test, so the
//! scalar type must be exact. The bound on [`Ord`] keeps IEEE floats out;
//! any `num_rational::Ratio<T>` over a signed integer type qualifies.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Num, Signed, ToPrimitive};

pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + ToPrimitive + Send + Sync + 'static
{
    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    fn two() -> Self {
        Self::from_int(2)
    }

    /// Lossy conversion used only for drawing.
    fn approx(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + Hash
        + Debug
        + Display
        + FromStr
        + ToPrimitive
        + num_bigint::ToBigInt
        + From<i64>
        + Send
        + Sync
        + 'static,
{
    fn from_ratio(numer: i64, denom: i64) -> Self {
        Ratio::new(T::from(numer), T::from(denom))
    }
}

pub(crate) fn min<S: Scalar>(a: &S, b: &S) -> S {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub(crate) fn max<S: Scalar>(a: &S, b: &S) -> S {
    if a >= b {
        a.clone()
    } else {
        b.clone()
    }
}

/// Parses `p/q` or `p`. Rejects zero denominators.
pub fn parse_scalar<S: Scalar>(s: &str) -> Option<S> {
    let s = s.trim();
    if s.is_empty() || s.contains(char::is_whitespace) {
        return None;
    }
    S::from_str(s).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type Q = Ratio<BigInt>;

    #[test]
    fn parses_and_prints_lowest_terms() {
        let q: Q = parse_scalar("6/8").unwrap();
        assert_eq!(q.to_string(), "3/4");
        let q: Q = parse_scalar("-4/2").unwrap();
        assert_eq!(q.to_string(), "-2");
        assert!(parse_scalar::<Q>("1/0").is_none());
        assert!(parse_scalar::<Q>("x").is_none());
    }

    #[test]
    fn small_and_big_ratios_agree() {
        let a = Ratio::<i64>::from_ratio(2, 6);
        let b = Q::from_ratio(2, 6);
        assert_eq!(a.to_string(), b.to_string());
    }
}
