//! Exact rational parameters and helpers shared by every module.
//!
//! Thresholds such as ρ, ε and α are carried as `Ratio<i64>` so boundary
//! comparisons are exact. Strings like `"0.9"`, `"9/10"` and `"1"` parse to
//! the same value a human means, with no binary rounding.

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = Ratio<i64>;

/// Parses `"a/b"`, a decimal such as `"0.125"`, or an integer.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidInput(format!("not a rational number: {s:?}"));
    if let Some((a, b)) = s.split_once('/') {
        let a: i64 = a.trim().parse().map_err(|_| bad())?;
        let b: i64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(a, b));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac_part.len() > 15 {
        return Err(bad());
    }
    let den = 10i64.pow(frac_part.len() as u32);
    let ip: i64 = if int_part.is_empty() { 0 } else { int_part.parse().map_err(|_| bad())? };
    let fp: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().map_err(|_| bad())? };
    let num = ip.checked_mul(den).and_then(|v| v.checked_add(fp)).ok_or_else(bad)?;
    Ok(Rational::new(if neg { -num } else { num }, den))
}

/// Formats as `"a/b"`, or `"a"` for integers.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

pub fn big(r: &Rational) -> BigRational {
    BigRational::new(BigInt::from(*r.numer()), BigInt::from(*r.denom()))
}

/// Converts a big rational to `f64` through a correctly scaled integer quotient,
/// so huge numerators and denominators do not overflow to infinity.
pub fn big_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    let n = r.numer().abs().to_biguint().unwrap_or_default();
    let d = r.denom().to_biguint().unwrap_or_else(BigUint::one);
    let shift = n.bits() as i64 - d.bits() as i64 - 60;
    let (nn, dd) = if shift > 0 { (n, d << shift as usize) } else { (n << (-shift) as usize, d) };
    let qv = (nn / dd).to_f64().unwrap_or(f64::INFINITY);
    sign * qv * 2f64.powi(shift as i32)
}

/// Decides `lhs^den <= base^num` style comparisons that arise when a rational
/// exponent appears on one side: returns whether `x <= c * q^(e)` where
/// `e = e_num / e_den` with `e_den > 0` and `x, c >= 0`.
pub fn le_scaled_power(x: &BigRational, c: &BigRational, q: u64, e_num: i64, e_den: i64) -> bool {
    assert!(e_den > 0);
    if x.is_negative() || x.is_zero() {
        return true;
    }
    if c.is_zero() || c.is_negative() {
        return false;
    }
    // x <= c q^{a/b}  <=>  (x/c)^b <= q^a
    let ratio = x / c;
    let lhs = pow_big(&ratio, e_den as u32);
    let qb = BigInt::from(q);
    let rhs = if e_num >= 0 {
        BigRational::from_integer(num_traits::pow(qb, e_num as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(qb, (-e_num) as usize))
    };
    lhs <= rhs
}

pub fn pow_big(r: &BigRational, e: u32) -> BigRational {
    num_traits::pow(r.clone(), e as usize)
}

/// Serde adapter: serializes as a string, accepts strings or JSON numbers.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        from_value(&v).map_err(serde::de::Error::custom)
    }

    pub(crate) fn from_value(v: &serde_json::Value) -> Result<Rational> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(i))
                } else {
                    let f = n.as_f64().unwrap_or(f64::NAN);
                    parse_rational(&format!("{f}"))
                }
            }
            other => Err(Error::InvalidInput(format!("expected a rational, got {other}"))),
        }
    }
}

/// Serde adapter for optional rationals.
pub mod serde_rational_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let v = Option::<serde_json::Value>::deserialize(d)?;
        match v {
            None | Some(serde_json::Value::Null) => Ok(None),
            Some(v) => serde_rational::from_value(&v).map(Some).map_err(serde::de::Error::custom),
        }
    }
}

/// Serde adapter for big rationals, serialized as `"a/b"` strings.
pub mod serde_big_rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        let (a, b) = s.split_once('/').unwrap_or((&s, "1"));
        let a: BigInt = a.trim().parse().map_err(serde::de::Error::custom)?;
        let b: BigInt = b.trim().parse().map_err(serde::de::Error::custom)?;
        if b.is_zero() {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(BigRational::new(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimal_and_fraction_forms() {
        assert_eq!(parse_rational("0.9").unwrap(), Rational::new(9, 10));
        assert_eq!(parse_rational("9/10").unwrap(), Rational::new(9, 10));
        assert_eq!(parse_rational("1").unwrap(), Rational::from_integer(1));
        assert_eq!(parse_rational(".25").unwrap(), Rational::new(1, 4));
        assert_eq!(parse_rational("-0.5").unwrap(), Rational::new(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn json_numbers_parse_to_their_decimal_value() {
        let v: serde_json::Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(serde_rational::from_value(&v).unwrap(), Rational::new(1, 10));
    }

    #[test]
    fn scaled_power_comparison() {
        let one = BigRational::one();
        // 2 <= 1 * 4^{1/2}
        assert!(le_scaled_power(&BigRational::from_integer(2.into()), &one, 4, 1, 2));
        // 3 > 4^{1/2}
        assert!(!le_scaled_power(&BigRational::from_integer(3.into()), &one, 4, 1, 2));
        // 1/4 <= 4^{-1}
        assert!(le_scaled_power(&BigRational::new(1.into(), 4.into()), &one, 4, -1, 1));
    }

    #[test]
    fn big_to_f64_handles_huge_operands() {
        let n = num_traits::pow(BigInt::from(3), 2000);
        let d = num_traits::pow(BigInt::from(3), 1999) * BigInt::from(2);
        let r = BigRational::new(n, d);
        assert!((big_to_f64(&r) - 1.5).abs() < 1e-12);
    }
}
