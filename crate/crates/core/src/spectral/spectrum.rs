use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::polynomial::{characteristic_polynomial, count_eigenvalues_above, evaluate_at_integer};
use super::{multiplicity, SpectralError};
use crate::params::{IntersectionArray, Verdict};
use crate::scalar::{format_rational, int, is_integer, rat, rational_to_f64};

/// Isolating width used for irrational eigenvalues by default (1e-9).
pub const DEFAULT_WIDTH: (i64, i64) = (1, 1_000_000_000);
/// Width used when a multiplicity verdict has to be re-examined (1e-15).
pub const FINE_WIDTH: (i64, i64) = (1, 1_000_000_000_000_000);
/// How close an enclosed multiplicity must be to an integer to pass.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// Open interval `(lo, hi)` with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / int(2)
    }

    pub fn approx(&self) -> f64 {
        rational_to_f64(&self.midpoint())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", format_rational(&self.lo), format_rational(&self.hi))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EigenValue {
    Exact(BigRational),
    Enclosed(Interval),
}

impl EigenValue {
    pub fn approx(&self) -> f64 {
        match self {
            EigenValue::Exact(q) => rational_to_f64(q),
            EigenValue::Enclosed(iv) => iv.approx(),
        }
    }

    pub fn exact(&self) -> Option<&BigRational> {
        match self {
            EigenValue::Exact(q) => Some(q),
            EigenValue::Enclosed(_) => None,
        }
    }

    /// Certified `value <= bound`, `None` when the enclosure straddles it.
    pub fn at_most(&self, bound: &BigRational) -> Option<bool> {
        match self {
            EigenValue::Exact(q) => Some(q <= bound),
            EigenValue::Enclosed(iv) => {
                if &iv.hi <= bound {
                    Some(true)
                } else if &iv.lo >= bound {
                    Some(false)
                } else {
                    None
                }
            }
        }
    }
}

impl fmt::Display for EigenValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EigenValue::Exact(q) => write!(f, "{}", format_rational(q)),
            EigenValue::Enclosed(iv) => write!(f, "{}", iv),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Multiplicity {
    Exact(BigRational),
    /// Closed enclosure `[lo, hi]` of the Biggs value.
    Enclosed(Interval),
}

impl Multiplicity {
    pub fn approx(&self) -> f64 {
        match self {
            Multiplicity::Exact(q) => rational_to_f64(q),
            Multiplicity::Enclosed(iv) => iv.approx(),
        }
    }

    /// The integer this multiplicity certifiably is, if any.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Multiplicity::Exact(q) if is_integer(q) => Some(q.to_integer()),
            Multiplicity::Exact(_) => None,
            Multiplicity::Enclosed(iv) => match integrality(iv) {
                IntegralityState::Pass(n) => Some(n),
                _ => None,
            },
        }
    }
}

impl fmt::Display for Multiplicity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Multiplicity::Exact(q) => write!(f, "{}", format_rational(q)),
            Multiplicity::Enclosed(iv) => {
                write!(f, "[{}, {}]", format_rational(&iv.lo), format_rational(&iv.hi))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumEntry {
    pub value: EigenValue,
    pub multiplicity: Multiplicity,
}

impl Serialize for SpectrumEntry {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("SpectrumEntry", 4)?;
        s.serialize_field("value", &self.value.to_string())?;
        s.serialize_field("mult", &self.multiplicity.to_string())?;
        s.serialize_field("exact", &matches!(self.value, EigenValue::Exact(_)))?;
        s.serialize_field("approx", &self.value.approx())?;
        s.end()
    }
}

/// All `D + 1` eigenvalues, strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn largest(&self) -> &SpectrumEntry {
        &self.entries[0]
    }

    pub fn smallest(&self) -> &SpectrumEntry {
        self.entries.last().expect("spectrum is never empty")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum of the multiplicities when every one of them is a certified integer.
    pub fn multiplicity_total(&self) -> Option<BigInt> {
        self.entries
            .iter()
            .map(|e| e.multiplicity.as_integer())
            .try_fold(BigInt::zero(), |acc, m| m.map(|m| acc + m))
    }

    pub fn all_exact(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e.value, EigenValue::Exact(_)))
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("{}^{}", e.value, e.multiplicity))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

pub fn spectrum(arr: &IntersectionArray) -> Result<Spectrum, SpectralError> {
    spectrum_with_width(arr, &rat(DEFAULT_WIDTH.0, DEFAULT_WIDTH.1))
}

/// Integer eigenvalues are found exactly (the characteristic polynomial is
/// monic with integer coefficients, so every rational root is an integer
/// dividing the constant term); the rest are enclosed in disjoint open
/// intervals no wider than `width`.
pub fn spectrum_with_width(
    arr: &IntersectionArray,
    width: &BigRational,
) -> Result<Spectrum, SpectralError> {
    let d = arr.diameter();
    let k = arr.valency();
    let poly = characteristic_polynomial(arr);
    let constant = poly[0].clone();

    let is_root = |n: &BigInt| -> bool {
        if n.is_zero() {
            constant.is_zero()
        } else if !(&constant % n).is_zero() {
            false
        } else {
            evaluate_at_integer(&poly, n).is_zero()
        }
    };

    let mut values: Vec<EigenValue> = Vec::with_capacity(d + 1);
    // (lo, hi, #eigenvalues > lo, #eigenvalues > hi); the bracket holds the
    // eigenvalues in (lo, hi].
    let lo0 = int(-(k + 1));
    let hi0 = int(k + 1);
    let mut stack = vec![(lo0.clone(), hi0.clone(), count_eigenvalues_above(arr, &lo0), 0usize)];
    if stack[0].2 != d + 1 || count_eigenvalues_above(arr, &hi0) != 0 {
        return Err(SpectralError::Certification(
            "eigenvalues escape the [-k-1, k+1] bracket".into(),
        ));
    }
    let one = BigRational::one();
    while let Some((lo, hi, above_lo, above_hi)) = stack.pop() {
        let count = above_lo - above_hi;
        if count == 0 {
            continue;
        }
        let w = &hi - &lo;
        if count == 1 && w < one {
            let n = hi.floor().to_integer();
            if BigRational::from_integer(n.clone()) > lo && is_root(&n) {
                values.push(EigenValue::Exact(BigRational::from_integer(n)));
                continue;
            }
            if &w <= width {
                values.push(EigenValue::Enclosed(Interval { lo, hi }));
                continue;
            }
        }
        let mid = (&lo + &hi) / int(2);
        let above_mid = count_eigenvalues_above(arr, &mid);
        stack.push((lo, mid.clone(), above_lo, above_mid));
        stack.push((mid, hi, above_mid, above_hi));
    }
    if values.len() != d + 1 {
        return Err(SpectralError::Certification(format!(
            "isolated {} eigenvalues, expected {}",
            values.len(),
            d + 1
        )));
    }
    values.sort_by(|x, y| lower_end(y).cmp(lower_end(x)));
    for pair in values.windows(2) {
        if upper_end(&pair[1]) > lower_end(&pair[0]) {
            return Err(SpectralError::Certification(format!(
                "enclosures {} and {} overlap",
                pair[0], pair[1]
            )));
        }
    }

    let mut norm_poly: Option<Vec<BigRational>> = None;
    let mut entries = Vec::with_capacity(values.len());
    for value in values {
        let multiplicity = match &value {
            EigenValue::Exact(q) => Multiplicity::Exact(multiplicity(arr, q.clone())?),
            EigenValue::Enclosed(iv) => {
                let f = norm_poly.get_or_insert_with(|| norm_polynomial(arr));
                Multiplicity::Enclosed(enclose_multiplicity(arr, f, iv)?)
            }
        };
        entries.push(SpectrumEntry {
            value,
            multiplicity,
        });
    }
    Ok(Spectrum { entries })
}

fn lower_end(v: &EigenValue) -> &BigRational {
    match v {
        EigenValue::Exact(q) => q,
        EigenValue::Enclosed(iv) => &iv.lo,
    }
}

fn upper_end(v: &EigenValue) -> &BigRational {
    match v {
        EigenValue::Exact(q) => q,
        EigenValue::Enclosed(iv) => &iv.hi,
    }
}

/// `sum_i k_i u_i(x)^2` as a polynomial in `x` (constant term first).
fn norm_polynomial(arr: &IntersectionArray) -> Vec<BigRational> {
    let d = arr.diameter();
    let k = int(arr.valency());
    let mut u: Vec<Vec<BigRational>> = Vec::with_capacity(d + 1);
    u.push(vec![int(1)]);
    u.push(vec![int(0), int(1) / &k]);
    for j in 1..d {
        let aj = int(arr.a(j));
        let cj = int(arr.c(j));
        let bj = int(arr.b(j));
        let mut next = vec![BigRational::zero(); u[j].len() + 1];
        for (e, coef) in u[j].iter().enumerate() {
            next[e + 1] += coef;
            next[e] -= &aj * coef;
        }
        for (e, coef) in u[j - 1].iter().enumerate() {
            next[e] -= &cj * coef;
        }
        for coef in next.iter_mut() {
            *coef /= &bj;
        }
        u.push(next);
    }
    let mut f = vec![BigRational::zero(); 2 * d + 1];
    for (ki, ui) in arr.k_seq().iter().zip(&u) {
        for (p, x) in ui.iter().enumerate() {
            for (q, y) in ui.iter().enumerate() {
                f[p + q] += ki * x * y;
            }
        }
    }
    f
}

fn eval(poly: &[BigRational], x: &BigRational) -> BigRational {
    poly.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// Encloses `v / F(theta)` over `theta` in `iv` using a mean-value bound on
/// `F` around the midpoint.
fn enclose_multiplicity(
    arr: &IntersectionArray,
    f: &[BigRational],
    iv: &Interval,
) -> Result<Interval, SpectralError> {
    let mid = iv.midpoint();
    let half = iv.width() / int(2);
    let radius = if iv.lo.abs() > iv.hi.abs() {
        iv.lo.abs()
    } else {
        iv.hi.abs()
    };
    let mut slope = BigRational::zero();
    let mut power = BigRational::one();
    for (i, coef) in f.iter().enumerate().skip(1) {
        slope += int(i as i64) * coef.abs() * &power;
        power *= &radius;
    }
    let centre = eval(f, &mid);
    let spread = half * slope;
    let low = &centre - &spread;
    let high = &centre + &spread;
    if !low.is_positive() {
        return Err(SpectralError::Certification(format!(
            "norm enclosure around {} reaches zero",
            iv
        )));
    }
    let v = arr.vertex_count();
    Ok(Interval {
        lo: v / high,
        hi: v / low,
    })
}

enum IntegralityState {
    Pass(BigInt),
    Fail,
    Indeterminate,
}

fn integrality(enclosure: &Interval) -> IntegralityState {
    let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000));
    let mid = enclosure.midpoint();
    let nearest = mid.round();
    let n = nearest.to_integer();
    if n.is_positive() && enclosure.lo >= &nearest - &tol && enclosure.hi <= &nearest + &tol {
        return IntegralityState::Pass(n);
    }
    let first_int = enclosure.lo.ceil();
    let contains_positive_int =
        first_int <= enclosure.hi && enclosure.hi >= BigRational::one();
    if contains_positive_int {
        IntegralityState::Indeterminate
    } else {
        IntegralityState::Fail
    }
}

pub const TAG_MULT_INTEGRAL: &str = "multiplicity integral";

pub fn multiplicities_integral(arr: &IntersectionArray) -> Verdict {
    multiplicities_integral_with(arr, &rat(DEFAULT_WIDTH.0, DEFAULT_WIDTH.1))
}

/// Positive-integer test for every Biggs multiplicity. Exact for integer
/// eigenvalues; three-state for enclosed ones.
pub fn multiplicities_integral_with(arr: &IntersectionArray, width: &BigRational) -> Verdict {
    let mut verdict = Verdict::default();
    let spec = match spectrum_with_width(arr, width) {
        Ok(s) => s,
        Err(e) => {
            verdict.push_undecided(TAG_MULT_INTEGRAL, 0, e);
            return verdict;
        }
    };
    for (i, entry) in spec.entries.iter().enumerate() {
        match &entry.multiplicity {
            Multiplicity::Exact(q) => {
                if !is_integer(q) || !q.is_positive() {
                    verdict.push(TAG_MULT_INTEGRAL, i, format!("m({}) = {}", entry.value, format_rational(q)));
                }
            }
            Multiplicity::Enclosed(iv) => match integrality(iv) {
                IntegralityState::Pass(_) => {}
                IntegralityState::Fail => verdict.push(
                    TAG_MULT_INTEGRAL,
                    i,
                    format!("m({:.9}) ~ {:.9}", entry.value.approx(), iv.approx()),
                ),
                IntegralityState::Indeterminate => verdict.push_undecided(
                    TAG_MULT_INTEGRAL,
                    i,
                    format!("m({:.9}) ~ {:.9}", entry.value.approx(), iv.approx()),
                ),
            },
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{complete_array, Status};

    #[test]
    fn sporadic_spectrum() {
        let arr = complete_array(&[8, 6, 1], &[1, 3, 8]).unwrap();
        let s = spectrum(&arr).unwrap();
        assert!(s.all_exact());
        let got: Vec<(BigRational, BigRational)> = s
            .entries
            .iter()
            .map(|e| match (&e.value, &e.multiplicity) {
                (EigenValue::Exact(v), Multiplicity::Exact(m)) => (v.clone(), m.clone()),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(
            got,
            vec![(int(8), int(1)), (int(2), int(12)), (int(-1), int(8)), (int(-4), int(6))]
        );
        assert_eq!(s.multiplicity_total(), Some(BigInt::from(27)));
    }

    #[test]
    fn triangle_spectrum() {
        let arr = complete_array(&[2], &[1]).unwrap();
        let s = spectrum(&arr).unwrap();
        assert_eq!(s.to_string(), "{2^1, -1^2}");
    }

    #[test]
    fn pentagon_has_enclosed_eigenvalues() {
        // C_5: eigenvalues 2, (-1 +- sqrt 5)/2 each of multiplicity 2
        let arr = complete_array(&[2, 1], &[1, 1]).unwrap();
        let s = spectrum(&arr).unwrap();
        assert_eq!(s.len(), 3);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((s.entries[1].value.approx() - golden).abs() < 1e-9);
        assert!((s.entries[2].value.approx() + 1.0 + golden).abs() < 1e-9);
        for e in &s.entries[1..] {
            let EigenValue::Enclosed(iv) = &e.value else {
                panic!("expected enclosure")
            };
            assert!(iv.width() <= rat(1, 1_000_000_000));
            assert_eq!(e.multiplicity.as_integer(), Some(BigInt::from(2)));
        }
        assert_eq!(multiplicities_integral(&arr).status(), Status::Pass);
    }

    #[test]
    fn witt_spectrum_is_integral() {
        let arr = complete_array(&[30, 28, 24], &[1, 3, 15]).unwrap();
        let s = spectrum(&arr).unwrap();
        assert_eq!(s.smallest().value, EigenValue::Exact(int(-15)));
        assert_eq!(s.multiplicity_total(), Some(BigInt::from(759)));
        assert!(multiplicities_integral(&arr).passed());
    }

    #[test]
    fn mutated_witt_fails_integrality() {
        let arr = complete_array(&[30, 28, 24], &[1, 3, 14]).unwrap();
        let v = multiplicities_integral(&arr);
        assert_eq!(v.status(), Status::Fail);
    }
}
