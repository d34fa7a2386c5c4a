//! Exact rational arithmetic helpers.
//!
//! Every quantity that enters a certificate or a hypothesis check is a
//! `BigRational`; floats never appear on certifying paths. Square-root
//! thresholds are decided by integer squaring, never by `f64::sqrt`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the crate.
pub type Q = BigRational;

/// Rational zero.
#[inline]
#[must_use]
pub fn q0() -> Q {
    Q::zero()
}

/// Rational one.
#[inline]
#[must_use]
pub fn q1() -> Q {
    Q::one()
}

/// Rational from an integer.
#[inline]
#[must_use]
pub fn qi<T: Into<BigInt>>(v: T) -> Q {
    Q::from_integer(v.into())
}

/// Rational `num/den`; `den` must be nonzero.
#[inline]
#[must_use]
pub fn qr(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Binomial coefficient C(n, k) as an unbounded integer; 0 when k > n.
#[must_use]
pub fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Binomial coefficient as a rational.
#[inline]
#[must_use]
pub fn binom_q(n: usize, k: usize) -> Q {
    Q::from_integer(binom(n, k))
}

/// n! as an unbounded integer.
#[must_use]
pub fn factorial(n: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

/// `base^exp` for rationals with a small nonnegative exponent.
#[must_use]
pub fn pow_q(base: &Q, exp: u32) -> Q {
    let mut acc = q1();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Largest s with s*s <= v.
#[must_use]
pub fn isqrt(v: u128) -> u128 {
    if v < 2 {
        return v;
    }
    let mut s = (v as f64).sqrt() as u128;
    // Floating point only seeds the iteration; the loop below is exact.
    while s.saturating_mul(s) > v {
        s -= 1;
    }
    while (s + 1).saturating_mul(s + 1) <= v {
        s += 1;
    }
    s
}

/// Smallest s with s*s >= v.
#[must_use]
pub fn ceil_sqrt(v: u128) -> u128 {
    let s = isqrt(v);
    if s * s == v {
        s
    } else {
        s + 1
    }
}

/// Integer reading of `m <= sqrt(r) + c`: true iff m <= c or (m-c)^2 <= r.
#[inline]
#[must_use]
pub fn le_sqrt_plus(m: usize, r: usize, c: usize) -> bool {
    m <= c || (m - c) * (m - c) <= r
}

/// Integer reading of `m >= sqrt(r)`: true iff m^2 >= r.
#[inline]
#[must_use]
pub fn ge_sqrt(m: usize, r: usize) -> bool {
    m * m >= r
}

/// Canonical text form `p/q` in lowest terms (denominator always present,
/// always positive).
#[must_use]
pub fn format_q(x: &Q) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Parses `p/q` or a bare integer `p`. Inverse of [`format_q`].
pub fn parse_q(s: &str) -> Result<Q, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num
        .parse()
        .map_err(|_| format!("bad rational numerator: {s:?}"))?;
    let d: BigInt = den
        .parse()
        .map_err(|_| format!("bad rational denominator: {s:?}"))?;
    if d.is_zero() {
        return Err(format!("zero denominator: {s:?}"));
    }
    Ok(Q::new(n, d))
}

/// Serde adapter storing a rational as its canonical `p/q` string.
pub mod serde_q {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&format_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Q, D::Error> {
        let s = String::deserialize(de)?;
        parse_q(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for an optional rational.
pub mod serde_q_opt {
    use super::{format_q, parse_q, Q};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Option<Q>, ser: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => ser.serialize_some(&format_q(v)),
            None => ser.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Option<Q>, D::Error> {
        let s: Option<String> = Option::deserialize(de)?;
        match s {
            Some(s) => parse_q(&s).map(Some).map_err(serde::de::Error::custom),
            None => Ok(None),
        }
    }
}

/// True iff `x` is negative.
#[inline]
#[must_use]
pub fn is_neg(x: &Q) -> bool {
    x.is_negative()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(5, 2), BigInt::from(10));
        assert_eq!(binom(10, 0), BigInt::from(1));
        assert_eq!(binom(4, 7), BigInt::from(0));
        assert_eq!(binom(52, 5), BigInt::from(2_598_960u64));
    }

    #[test]
    fn sqrt_thresholds_are_exact() {
        // m <= sqrt(r) + 1 for r = 3: sqrt(3) ~ 1.732, so m <= 2.
        assert!(le_sqrt_plus(2, 3, 1));
        assert!(!le_sqrt_plus(3, 3, 1));
        // m >= sqrt(r) for r = 5: m = 2 does not reach; m = 3 does.
        assert!(!ge_sqrt(2, 5));
        assert!(ge_sqrt(3, 5));
        // Perfect squares sit on the boundary.
        assert!(ge_sqrt(3, 9));
        assert!(!ge_sqrt(2, 9));
        for v in 0..2000u128 {
            let s = isqrt(v);
            assert!(s * s <= v && (s + 1) * (s + 1) > v);
        }
        assert_eq!(ceil_sqrt(9), 3);
        assert_eq!(ceil_sqrt(10), 4);
        assert_eq!(ceil_sqrt(125), 12); // 5^(3/2) rounds up to 12
    }

    #[test]
    fn rational_text_round_trip() {
        let v = qr(-6, 4);
        assert_eq!(format_q(&v), "-3/2");
        assert_eq!(parse_q("-3/2").unwrap(), v);
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x/2").is_err());
    }
}
