//! Numeric kinds the parameter formulas are evaluated over.
//!
//! Every sequence-level formula in this crate (standard sequences, Biggs
//! multiplicities, inner-product data, the closed forms for the
//! inner-product determinants) is written once against [`Scalar`] and
//! instantiated for exact rationals and for floats. The exact instance is
//! what verdicts are based on; the float instance is what the numeric graph
//! audits compare against.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// A field-like scalar the recurrences can run over.
pub trait Scalar: Num + Signed + Clone + PartialOrd + fmt::Debug + Send + Sync + 'static {
    /// `true` when arithmetic is exact and `is_negligible` means `== 0`.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    fn from_bigint(n: &BigInt) -> Self;

    fn from_rational(q: &BigRational) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_int(num) / Self::from_int(den)
    }

    /// Zero for exact kinds; below a fixed absolute threshold for floats.
    fn is_negligible(&self) -> bool;

    fn to_f64(&self) -> f64;
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }

    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn from_frac(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q)
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-8
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f32
    }

    fn from_bigint(n: &BigInt) -> Self {
        n.to_f32().unwrap_or(f32::NAN)
    }

    fn from_rational(q: &BigRational) -> Self {
        rational_to_f64(q) as f32
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-4
    }

    fn to_f64(&self) -> f64 {
        f64::from(*self)
    }
}

/// Integer power by repeated squaring; works for any scalar kind.
pub fn powi<S: Scalar>(base: &S, exp: u32) -> S {
    let mut acc = S::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b.clone();
        }
        b = b.clone() * b;
        e >>= 1;
    }
    acc
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Both parts too large for f64: shift down to a common scale.
            let bits = q.numer().bits().max(q.denom().bits()) as i64 - 1000;
            let shift = bits.max(0) as usize;
            let n = (q.numer() >> shift).to_f64().unwrap_or(0.0);
            let d = (q.denom() >> shift).to_f64().unwrap_or(1.0);
            if d == 0.0 {
                f64::INFINITY.copysign(n)
            } else {
                n / d
            }
        }
    }
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn is_integer(q: &BigRational) -> bool {
    q.denom().is_one()
}

/// Lossless text form: `p` for integers, `p/q` otherwise.
pub fn format_rational(q: &BigRational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(BigRational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_repeated_product() {
        let x = rat(-1, 2);
        assert_eq!(powi(&x, 0), int(1));
        assert_eq!(powi(&x, 3), rat(-1, 8));
        assert!((powi(&-0.5f64, 5) + 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn rational_text_round_trip() {
        for q in [rat(-45, 2), int(225), rat(63, 2), int(0)] {
            assert_eq!(parse_rational(&format_rational(&q)), Some(q));
        }
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn huge_rationals_convert_to_float() {
        let big = BigInt::from(3) << 2000usize;
        let q = BigRational::new(big.clone(), big * BigInt::from(4));
        assert!((rational_to_f64(&q) - 0.25).abs() < 1e-12);
    }
}
