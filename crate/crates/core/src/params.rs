//! Intersection arrays, their derived counting invariants, and the basic
//! feasibility filter.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{format_rational, is_integer};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArrayError {
    #[error("b has {b} entries but c has {c}")]
    LengthMismatch { b: usize, c: usize },
    #[error("an intersection array needs diameter at least 1")]
    Empty,
    #[error("{which}_{index} = {value} is not positive")]
    NonPositive {
        which: char,
        index: usize,
        value: i64,
    },
    #[error("a_{index} = {value} is negative")]
    NegativeA { index: usize, value: i64 },
}

/// `{b_0, ..., b_{D-1}; c_1, ..., c_D}` together with `a_i`, `k_i` and `v`.
///
/// `k_i` and `v` are kept as exact rationals so that a non-integral `k_i`
/// is something [`basic_feasibility`] reports rather than a construction
/// failure.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(try_from = "ArrayJson")]
pub struct IntersectionArray {
    b: Vec<i64>,
    c: Vec<i64>,
    a: Vec<i64>,
    k_seq: Vec<BigRational>,
    v: BigRational,
}

/// The exchange format `{"b": [...], "c": [...]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrayJson {
    pub b: Vec<i64>,
    pub c: Vec<i64>,
}

impl TryFrom<ArrayJson> for IntersectionArray {
    type Error = ArrayError;

    fn try_from(value: ArrayJson) -> Result<Self, Self::Error> {
        complete_array(&value.b, &value.c)
    }
}

/// Builds the array and its derived quantities. No feasibility judgement is
/// made here apart from rejecting negative `a_i`.
pub fn complete_array(b: &[i64], c: &[i64]) -> Result<IntersectionArray, ArrayError> {
    if b.len() != c.len() {
        return Err(ArrayError::LengthMismatch {
            b: b.len(),
            c: c.len(),
        });
    }
    if b.is_empty() {
        return Err(ArrayError::Empty);
    }
    for (i, &x) in b.iter().enumerate() {
        if x < 1 {
            return Err(ArrayError::NonPositive {
                which: 'b',
                index: i,
                value: x,
            });
        }
    }
    for (i, &x) in c.iter().enumerate() {
        if x < 1 {
            return Err(ArrayError::NonPositive {
                which: 'c',
                index: i + 1,
                value: x,
            });
        }
    }
    let d = b.len();
    let k = b[0];
    let mut a = Vec::with_capacity(d + 1);
    a.push(0);
    for i in 1..=d {
        let bi = if i < d { b[i] } else { 0 };
        let ai = k - bi - c[i - 1];
        if ai < 0 {
            return Err(ArrayError::NegativeA {
                index: i,
                value: ai,
            });
        }
        a.push(ai);
    }
    let mut k_seq = Vec::with_capacity(d + 1);
    k_seq.push(BigRational::one());
    for i in 1..=d {
        let prev = &k_seq[i - 1];
        let next = prev * BigRational::new(BigInt::from(b[i - 1]), BigInt::from(c[i - 1]));
        k_seq.push(next);
    }
    let v = k_seq.iter().fold(BigRational::zero(), |acc, x| acc + x);
    Ok(IntersectionArray {
        b: b.to_vec(),
        c: c.to_vec(),
        a,
        k_seq,
        v,
    })
}

impl IntersectionArray {
    pub fn diameter(&self) -> usize {
        self.b.len()
    }

    pub fn valency(&self) -> i64 {
        self.b[0]
    }

    /// `b_i` for `0 <= i <= D`, with `b_D = 0`.
    pub fn b(&self, i: usize) -> i64 {
        if i < self.b.len() {
            self.b[i]
        } else {
            0
        }
    }

    /// `c_i` for `0 <= i <= D`, with `c_0 = 0`.
    pub fn c(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.c[i - 1]
        }
    }

    pub fn a(&self, i: usize) -> i64 {
        self.a[i]
    }

    pub fn b_entries(&self) -> &[i64] {
        &self.b
    }

    pub fn c_entries(&self) -> &[i64] {
        &self.c
    }

    /// `a_0, ..., a_D`.
    pub fn a_seq(&self) -> &[i64] {
        &self.a
    }

    /// `k_0, ..., k_D`.
    pub fn k_seq(&self) -> &[BigRational] {
        &self.k_seq
    }

    pub fn vertex_count(&self) -> &BigRational {
        &self.v
    }

    pub fn is_bipartite_like(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }

    pub fn to_json(&self) -> ArrayJson {
        ArrayJson {
            b: self.b.clone(),
            c: self.c.clone(),
        }
    }

    /// Canonical text form `{b_0,...,b_{D-1};c_1,...,c_D}`.
    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for IntersectionArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |xs: &[i64]| {
            xs.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{};{}}}", join(&self.b), join(&self.c))
    }
}

impl Serialize for IntersectionArray {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("IntersectionArray", 6)?;
        s.serialize_field("canonical", &self.canonical())?;
        s.serialize_field("b", &self.b)?;
        s.serialize_field("c", &self.c)?;
        s.serialize_field("a", &self.a)?;
        let ks: Vec<String> = self.k_seq.iter().map(format_rational).collect();
        s.serialize_field("k", &ks)?;
        s.serialize_field("v", &format_rational(&self.v))?;
        s.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: String,
    pub index: usize,
    pub value: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at i={} ({})", self.tag, self.index, self.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Indeterminate,
}

/// Outcome of a battery of checks. `undecided` is only used by checks that
/// rest on certified numerics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<Violation>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.undecided.is_empty()
    }

    pub fn status(&self) -> Status {
        if !self.violations.is_empty() {
            Status::Fail
        } else if !self.undecided.is_empty() {
            Status::Indeterminate
        } else {
            Status::Pass
        }
    }

    pub fn push(&mut self, tag: &str, index: usize, value: impl ToString) {
        self.violations.push(Violation {
            tag: tag.to_string(),
            index,
            value: value.to_string(),
        });
    }

    pub fn push_undecided(&mut self, tag: &str, index: usize, value: impl ToString) {
        self.undecided.push(Violation {
            tag: tag.to_string(),
            index,
            value: value.to_string(),
        });
    }

    pub fn merge(&mut self, other: Verdict) {
        self.violations.extend(other.violations);
        self.undecided.extend(other.undecided);
    }

    pub fn first_tag(&self) -> Option<&str> {
        self.violations.first().map(|v| v.tag.as_str())
    }
}

pub const TAG_C1: &str = "c_1 = 1";
pub const TAG_C_MONOTONE: &str = "c non-decreasing";
pub const TAG_B_MONOTONE: &str = "b non-increasing";
pub const TAG_K_INTEGRAL: &str = "k_i integral";
pub const TAG_C_BOUND: &str = "c_i <= b_0";

/// Monotonicity of `b` and `c`, `c_1 = 1`, integrality and positivity of
/// every `k_i`, and `c_i <= b_0`. Multiplicities are a spectral matter and
/// live in [`crate::spectral::multiplicities_integral`].
pub fn basic_feasibility(arr: &IntersectionArray) -> Verdict {
    let mut verdict = Verdict::default();
    let d = arr.diameter();
    let k = arr.valency();
    if arr.c(1) != 1 {
        verdict.push(TAG_C1, 1, arr.c(1));
    }
    for i in 2..=d {
        if arr.c(i) < arr.c(i - 1) {
            verdict.push(TAG_C_MONOTONE, i, format!("{} < {}", arr.c(i), arr.c(i - 1)));
        }
    }
    for i in 1..d {
        if arr.b(i) > arr.b(i - 1) {
            verdict.push(TAG_B_MONOTONE, i, format!("{} > {}", arr.b(i), arr.b(i - 1)));
        }
    }
    for (i, ki) in arr.k_seq().iter().enumerate().skip(1) {
        if !is_integer(ki) || !ki.is_positive() {
            verdict.push(TAG_K_INTEGRAL, i, format_rational(ki));
        }
    }
    for i in 1..=d {
        if arr.c(i) > k {
            verdict.push(TAG_C_BOUND, i, arr.c(i));
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn witt() -> IntersectionArray {
        complete_array(&[30, 28, 24], &[1, 3, 15]).unwrap()
    }

    #[test]
    fn witt_derived_fields() {
        let arr = witt();
        assert_eq!(arr.a_seq(), &[0, 1, 3, 15]);
        assert_eq!(arr.k_seq(), &[int(1), int(30), int(280), int(448)]);
        assert_eq!(arr.vertex_count(), &int(759));
        assert_eq!(arr.canonical(), "{30,28,24;1,3,15}");
    }

    #[test]
    fn triangle_and_sporadic() {
        let k3 = complete_array(&[2], &[1]).unwrap();
        assert_eq!(k3.a_seq(), &[0, 1]);
        assert_eq!(k3.vertex_count(), &int(3));

        let sp = complete_array(&[8, 6, 1], &[1, 3, 8]).unwrap();
        assert_eq!(sp.a_seq(), &[0, 1, 4, 0]);
        assert_eq!(sp.k_seq(), &[int(1), int(8), int(16), int(2)]);
        assert_eq!(sp.vertex_count(), &int(27));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            complete_array(&[3, 2], &[1]),
            Err(ArrayError::LengthMismatch { b: 2, c: 1 })
        );
        assert_eq!(complete_array(&[], &[]), Err(ArrayError::Empty));
        assert!(matches!(
            complete_array(&[3, 0], &[1, 1]),
            Err(ArrayError::NonPositive { which: 'b', index: 1, .. })
        ));
        assert!(matches!(
            complete_array(&[3, 2], &[1, 4]),
            Err(ArrayError::NegativeA { index: 2, value: -1 })
        ));
    }

    #[test]
    fn feasibility_examples() {
        assert!(basic_feasibility(&witt()).passed());

        let bad_c = complete_array(&[30, 28, 24], &[1, 5, 3]).unwrap();
        let v = basic_feasibility(&bad_c);
        assert_eq!(v.violations[0].tag, TAG_C_MONOTONE);
        assert_eq!(v.violations[0].index, 3);

        let bad_k = complete_array(&[4, 2, 1], &[1, 3, 4]).unwrap();
        let v = basic_feasibility(&bad_k);
        // k_3 = 2/3 is flagged as well
        assert_eq!(v.violations.len(), 2);
        assert_eq!(v.violations[0].tag, TAG_K_INTEGRAL);
        assert_eq!(v.violations[0].index, 2);
        assert_eq!(bad_k.k_seq()[2], rat(8, 3));
    }

    #[test]
    fn json_round_trip() {
        let arr = witt();
        let text = serde_json::to_string(&arr).unwrap();
        let back: IntersectionArray = serde_json::from_str(&text).unwrap();
        assert_eq!(back, arr);
        let bad: Result<IntersectionArray, _> = serde_json::from_str(r#"{"b":[3],"c":[1,1]}"#);
        assert!(bad.is_err());
    }
}
