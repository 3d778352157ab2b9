//! Intersection arrays of the classical families.

use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{complete_array, ArrayError, IntersectionArray};
use crate::scalar::rat;
use crate::spectral::spectrum;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("q = {0} is not a prime power")]
    NotPrimePower(i64),
    #[error("e = {0} is not one of 0, 1/2, 1, 3/2, 2")]
    BadExponent(Rational64),
    #[error("e = {e} needs q to be a square, got q = {q}")]
    NonSquare { q: i64, e: Rational64 },
    #[error("invalid parameters: {0}")]
    Invalid(String),
    #[error("entries overflow 64-bit integers")]
    Overflow,
    #[error(transparent)]
    Array(#[from] ArrayError),
}

/// A named family member.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum FamilySpec {
    /// Dual polar graph on the maximal isotropic subspaces of a polar space
    /// of rank `d` over GF(q); `e` selects the type.
    DualPolar {
        q: i64,
        #[serde(with = "ratio_text")]
        e: Rational64,
        d: usize,
    },
    Hamming { d: usize, q: i64 },
    Johnson { n: i64, d: usize },
    /// `O_k`: `(k-1)`-subsets of a `(2k-1)`-set, adjacent when disjoint.
    Odd { k: i64 },
    /// Folded `m`-cube for odd `m`.
    FoldedCube { m: i64 },
    /// The `(2d+1)`-gon.
    OddPolygon { d: usize },
    WittM24,
    Sporadic27,
}

impl FamilySpec {
    /// `2A_{2D-1}(r)`: `q = r^2`, `e = 1/2`.
    pub fn hermitian(r: i64, d: usize) -> Self {
        FamilySpec::DualPolar {
            q: r * r,
            e: Rational64::new(1, 2),
            d,
        }
    }

    /// `B_D(q)` and `C_D(q)` share this array (`e = 1`).
    pub fn symplectic(q: i64, d: usize) -> Self {
        FamilySpec::DualPolar {
            q,
            e: Rational64::one(),
            d,
        }
    }

    /// `D_D(q)`, `e = 0`.
    pub fn hyperbolic(q: i64, d: usize) -> Self {
        FamilySpec::DualPolar {
            q,
            e: Rational64::zero(),
            d,
        }
    }

    /// `2D_{D+1}(q)`, `e = 2`.
    pub fn elliptic(q: i64, d: usize) -> Self {
        FamilySpec::DualPolar {
            q,
            e: Rational64::from_integer(2),
            d,
        }
    }

    /// `2A_{2D}(r)`: `q = r^2`, `e = 3/2`.
    pub fn hermitian_even(r: i64, d: usize) -> Self {
        FamilySpec::DualPolar {
            q: r * r,
            e: Rational64::new(3, 2),
            d,
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::DualPolar { q, e, d } => {
                let r = integer_sqrt(*q).unwrap_or(0);
                match (*e.numer(), *e.denom()) {
                    (0, _) => write!(f, "D_{d}({q})"),
                    (1, 2) => write!(f, "2A_{}({r})", 2 * d - 1),
                    (1, 1) => write!(f, "B_{d}({q})/C_{d}({q})"),
                    (3, 2) => write!(f, "2A_{}({r})", 2 * d),
                    (2, 1) => write!(f, "2D_{}({q})", d + 1),
                    _ => write!(f, "dual polar (q={q}, e={e}, D={d})"),
                }
            }
            FamilySpec::Hamming { d, q } => write!(f, "H({d},{q})"),
            FamilySpec::Johnson { n, d } => write!(f, "J({n},{d})"),
            FamilySpec::Odd { k } => write!(f, "O_{k}"),
            FamilySpec::FoldedCube { m } => write!(f, "folded {m}-cube"),
            FamilySpec::OddPolygon { d } => write!(f, "C_{}", 2 * d + 1),
            FamilySpec::WittM24 => write!(f, "Witt graph (M24)"),
            FamilySpec::Sporadic27 => write!(f, "GQ(2,4) minus a spread"),
        }
    }
}

/// `e` as the string `p/q`.
mod ratio_text {
    use num_rational::Rational64;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(e: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&e.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        text.trim().parse().map_err(|_| D::Error::custom(format!("bad rational {text:?}")))
    }
}

pub fn is_prime_power(q: i64) -> bool {
    if q < 2 {
        return false;
    }
    let mut p = 2;
    let mut n = q;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    true
}

fn integer_sqrt(q: i64) -> Option<i64> {
    if q < 0 {
        return None;
    }
    let r = (q as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|&s| s >= 0 && s * s == q)
}

fn checked_pow(base: i64, exp: u32) -> Result<i64, FamilyError> {
    base.checked_pow(exp).ok_or(FamilyError::Overflow)
}

/// `q^(i+e)` for half-integral `e`, exact or an error.
fn half_power(q: i64, i: usize, e: Rational64) -> Result<i64, FamilyError> {
    let twice = 2 * i as i64 + 2 * e.numer() / e.denom();
    if twice % 2 == 0 {
        checked_pow(q, (twice / 2) as u32)
    } else {
        let r = integer_sqrt(q).ok_or(FamilyError::NonSquare { q, e })?;
        checked_pow(r, twice as u32)
    }
}

fn dual_polar(q: i64, e: Rational64, d: usize) -> Result<IntersectionArray, FamilyError> {
    if !is_prime_power(q) {
        return Err(FamilyError::NotPrimePower(q));
    }
    let allowed = [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1)];
    if !allowed.contains(&(*e.numer(), *e.denom())) {
        return Err(FamilyError::BadExponent(e));
    }
    if d == 0 {
        return Err(FamilyError::Invalid("D must be at least 1".into()));
    }
    let mut b = Vec::with_capacity(d);
    let mut c = Vec::with_capacity(d);
    for i in 0..d {
        let gauss = (checked_pow(q, (d - i) as u32)? - 1) / (q - 1);
        b.push(half_power(q, i, e)?.checked_mul(gauss).ok_or(FamilyError::Overflow)?);
    }
    for i in 1..=d {
        c.push((checked_pow(q, i as u32)? - 1) / (q - 1));
    }
    Ok(complete_array(&b, &c)?)
}

pub fn family_array(spec: &FamilySpec) -> Result<IntersectionArray, FamilyError> {
    match *spec {
        FamilySpec::DualPolar { q, e, d } => dual_polar(q, e, d),
        FamilySpec::Hamming { d, q } => {
            if d == 0 || q < 2 {
                return Err(FamilyError::Invalid(format!("H({d},{q})")));
            }
            let b: Vec<i64> = (0..d).map(|i| (d - i) as i64 * (q - 1)).collect();
            let c: Vec<i64> = (1..=d).map(|i| i as i64).collect();
            Ok(complete_array(&b, &c)?)
        }
        FamilySpec::Johnson { n, d } => {
            if d == 0 || n < 2 * d as i64 {
                return Err(FamilyError::Invalid(format!("J({n},{d}) needs n >= 2d")));
            }
            let di = d as i64;
            let b: Vec<i64> = (0..di).map(|i| (di - i) * (n - di - i)).collect();
            let c: Vec<i64> = (1..=di).map(|i| i * i).collect();
            Ok(complete_array(&b, &c)?)
        }
        FamilySpec::Odd { k } => {
            if k < 2 {
                return Err(FamilyError::Invalid(format!("O_{k} needs k >= 2")));
            }
            let d = k - 1;
            let b: Vec<i64> = (0..d).map(|i| k - (i + 1) / 2).collect();
            let c: Vec<i64> = (1..=d).map(|i| (i + 1) / 2).collect();
            Ok(complete_array(&b, &c)?)
        }
        FamilySpec::FoldedCube { m } => {
            if m < 3 || m % 2 == 0 {
                return Err(FamilyError::Invalid(format!("folded {m}-cube needs odd m >= 3")));
            }
            let d = (m - 1) / 2;
            let b: Vec<i64> = (0..d).map(|i| m - i).collect();
            let c: Vec<i64> = (1..=d).collect();
            Ok(complete_array(&b, &c)?)
        }
        FamilySpec::OddPolygon { d } => {
            if d == 0 {
                return Err(FamilyError::Invalid("polygon needs D >= 1".into()));
            }
            let mut b = vec![1; d];
            b[0] = 2;
            Ok(complete_array(&b, &vec![1; d])?)
        }
        FamilySpec::WittM24 => Ok(complete_array(&[30, 28, 24], &[1, 3, 15])?),
        FamilySpec::Sporadic27 => Ok(complete_array(&[8, 6, 1], &[1, 3, 8])?),
    }
}

/// A dual polar or Hamming family with exactly this array.
pub fn identify_classical(arr: &IntersectionArray) -> Option<String> {
    let d = arr.diameter();
    if d >= 2 {
        let q = arr.c(2) - 1;
        for (n, den) in [(0, 1), (1, 2), (1, 1), (3, 2), (2, 1)] {
            let spec = FamilySpec::DualPolar {
                q,
                e: Rational64::new(n, den),
                d,
            };
            if family_array(&spec).ok().as_ref() == Some(arr) {
                return Some(spec.to_string());
            }
        }
    }
    let k = arr.valency();
    if k % d as i64 == 0 {
        let spec = FamilySpec::Hamming {
            d,
            q: k / d as i64 + 1,
        };
        if family_array(&spec).ok().as_ref() == Some(arr) {
            return Some(spec.to_string());
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConjectureMatch {
    /// Clause number 1..=6 of the list: odd polygons, folded `(2D+1)`-cubes,
    /// odd graphs, `H(D,3)`, `2A_{2D-1}(2)`, `B_D(2)`.
    pub clause: u8,
    pub family: String,
    /// `theta_min <= -k/2`; `None` when the certified enclosure straddles it.
    pub theta_condition: Option<bool>,
}

/// Which member of the valency-halving list this array is, if any.
pub fn conjecture_membership(arr: &IntersectionArray) -> Option<ConjectureMatch> {
    let d = arr.diameter();
    let k = arr.valency();
    let list = [
        (1u8, FamilySpec::OddPolygon { d }),
        (2, FamilySpec::FoldedCube { m: 2 * d as i64 + 1 }),
        (3, FamilySpec::Odd { k }),
        (4, FamilySpec::Hamming { d, q: 3 }),
        (5, FamilySpec::hermitian(2, d)),
        (6, FamilySpec::symplectic(2, d)),
    ];
    for (clause, spec) in list {
        let Ok(member) = family_array(&spec) else {
            continue;
        };
        if &member != arr {
            continue;
        }
        let bound = rat(-k, 2);
        let theta_condition = spectrum(arr)
            .ok()
            .and_then(|s| s.smallest().value.at_most(&bound));
        return Some(ConjectureMatch {
            clause,
            family: spec.to_string(),
            theta_condition,
        });
    }
    None
}

/// `a_1 = b_0 - b_1 - 1` for a dual polar array; equals `q^e - 1`.
pub fn dual_polar_a1(q: i64, e: Rational64) -> Option<i64> {
    half_power(q, 0, e).ok().map(|x| x - 1).filter(|x| !x.is_negative())
}
