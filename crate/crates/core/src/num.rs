//! Small exact-arithmetic helpers shared across modules.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// `⌈log₂ n⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// `⌊log₂ n⌋` for `n ≥ 1`.
pub fn floor_log2(n: u64) -> u32 {
    assert!(n >= 1, "floor_log2(0)");
    63 - n.leading_zeros()
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// `2^-j` as an exact rational.
pub fn pow2_neg(j: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << j as usize)
}

pub fn pow2_big(e: u32) -> BigUint {
    BigUint::one() << e as usize
}

/// Renders a rational as `"p/q"` (or `"p"` for integers).
pub fn fmt_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or an integer.
pub fn parse_ratio(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Bits needed to send an integer: magnitude bits plus a sign bit.
pub fn int_bits(v: &BigInt) -> usize {
    v.magnitude().bits() as usize + 1
}

/// Bits needed to send a rational as a numerator/denominator pair.
pub fn ratio_bits(r: &BigRational) -> usize {
    int_bits(r.numer()) + r.denom().bits() as usize
}

pub fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}

/// `base^exp` for a non-negative integer exponent.
pub fn pow_ratio(base: &BigRational, exp: u32) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

/// Smallest rational with denominator `10^digits` that is `≥ x`.
pub fn ceil_decimal(x: f64, digits: u32) -> BigRational {
    let scale = 10i64.pow(digits);
    let scaled = (x * scale as f64).ceil() as i64;
    ratio(scaled, scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logs() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(65), 7);
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(63), 5);
        assert_eq!(floor_log2(64), 6);
    }

    #[test]
    fn ratio_text() {
        assert_eq!(fmt_ratio(&ratio(6, 4)), "3/2");
        assert_eq!(fmt_ratio(&int(7)), "7");
        assert_eq!(parse_ratio("3/2"), Some(ratio(3, 2)));
        assert_eq!(parse_ratio(" 5 "), Some(int(5)));
        assert_eq!(parse_ratio("1/0"), None);
        assert_eq!(parse_ratio("x"), None);
    }

    #[test]
    fn decimal_upper_bound() {
        let e13 = (1.0f64 / 3.0).exp();
        let r = ceil_decimal(e13, 4);
        assert_eq!(r, ratio(13957, 10000));
    }
}
