//! Arbitrary-precision rationals and parsing helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_zero() -> Q {
    Q::zero()
}

pub fn q_one() -> Q {
    Q::one()
}

/// Parses "p", "-p", "p/q".
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.trim().parse().ok()?;
            let b: BigInt = b.trim().parse().ok()?;
            if b.is_zero() {
                None
            } else {
                Some(Q::new(a, b))
            }
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// x − ⌊x⌋ ∈ [0, 1).
pub fn frac(x: &Q) -> Q {
    x - x.floor()
}

/// Numerator of x·den, requiring it to be integral.
pub fn scaled_int(x: &Q, den: u64) -> Option<i64> {
    let y = x * Q::from_integer(BigInt::from(den));
    if y.is_integer() {
        y.to_integer().to_i64()
    } else {
        None
    }
}

/// Denominator of x as u64.
pub fn denom_u64(x: &Q) -> u64 {
    x.denom().to_u64().expect("denominator fits in u64")
}

pub fn to_i64(x: &Q) -> Option<i64> {
    if x.is_integer() {
        x.to_integer().to_i64()
    } else {
        None
    }
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "-3", "4/3", "-23/11", "138/11"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/4").unwrap(), q(3, 2));
        assert!(parse_q("1/0").is_none());
        assert!(parse_q("x").is_none());
    }

    #[test]
    fn fractional_part() {
        assert_eq!(frac(&q(-1, 4)), q(3, 4));
        assert_eq!(frac(&q(9, 4)), q(1, 4));
        assert_eq!(scaled_int(&q(1, 24), 24), Some(1));
        assert_eq!(scaled_int(&q(1, 5), 24), None);
    }
}
