//! Invariants of geometric distance-regular graphs: the Delsarte clique
//! condition, the `gamma` sequence, the near-polygon criterion, the
//! inner-product data of the vectors `F_j = x - y` and `C_j` in a normalized
//! representation, and the two dual polar classifiers.
//!
//! All vector identities are handled through their inner products only;
//! [`crate::graphlab`] checks them against explicit representations.

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::families::identify_classical;
use crate::params::IntersectionArray;
use crate::scalar::{format_rational, int, is_integer, powi, rat, Scalar};
use crate::spectral::{self, standard_sequence, EigenValue, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GammaError {
    #[error("u_{0} = u_{next}: gamma_{0} is undefined", next = .0 + 1)]
    EqualConsecutive(usize),
    #[error("gamma_{0} = {1} is not an integer")]
    NonIntegralGamma(usize, String),
    #[error("gamma_{0} = {1} is outside [1, a_1 + 1]")]
    GammaOutOfRange(usize, i64),
    #[error("gamma_{0} < gamma_{prev}", prev = .0 - 1)]
    MonotonicityViolation(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NotGeometric {
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("smallest eigenvalue {actual} is not -k/(a_1+1) = {expected}")]
    NotDelsarte { expected: String, actual: String },
    #[error(transparent)]
    Gamma(#[from] GammaError),
    #[error("near-polygon tests disagree: a_i = c_i a_1 gives {direct}, gamma_(D-1) = 1 gives {via_gamma}")]
    Inconsistent { direct: bool, via_gamma: bool },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeometricProfile {
    pub a1: i64,
    /// `a_1 + 2`, the Delsarte clique size.
    pub clique_size: i64,
    #[serde(serialize_with = "ser_rational")]
    pub theta_min: BigRational,
    pub gamma: Vec<i64>,
    pub near_polygon: bool,
}

fn ser_rational<S: serde::Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

fn ser_opt_rational<S: serde::Serializer>(
    q: &Option<BigRational>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&format_rational(q)),
        None => s.serialize_none(),
    }
}

/// `-k/(a_1+1)`, the smallest eigenvalue a geometric array must have.
pub fn delsarte_eigenvalue(arr: &IntersectionArray) -> BigRational {
    rat(-arr.valency(), arr.a(1) + 1)
}

/// Clique bound `1 - k/theta_min`.
pub fn delsarte_clique_bound(k: i64, theta_min: &BigRational) -> BigRational {
    int(1) - int(k) / theta_min
}

/// Succeeds iff the smallest eigenvalue is exactly `-k/(a_1+1)` and the
/// resulting `gamma` sequence is admissible.
pub fn geometric_candidate(arr: &IntersectionArray) -> Result<GeometricProfile, NotGeometric> {
    let spec = spectral::spectrum(arr)?;
    let expected = delsarte_eigenvalue(arr);
    let smallest = &spec.smallest().value;
    if smallest != &EigenValue::Exact(expected.clone()) {
        return Err(NotGeometric::NotDelsarte {
            expected: format_rational(&expected),
            actual: smallest.to_string(),
        });
    }
    let gamma = gamma_profile(arr)?;
    let near_polygon = near_polygon_from(arr, &gamma)?;
    Ok(GeometricProfile {
        a1: arr.a(1),
        clique_size: arr.a(1) + 2,
        theta_min: expected,
        gamma,
        near_polygon,
    })
}

/// `gamma_i = (a_1+2) u_{i+1} / (u_{i+1} - u_i)` over the standard sequence
/// of `-k/(a_1+1)`, for `0 <= i <= D-1`.
pub fn gamma_profile(arr: &IntersectionArray) -> Result<Vec<i64>, GammaError> {
    let seq = standard_sequence(arr, delsarte_eigenvalue(arr));
    let a1 = arr.a(1);
    let size = int(a1 + 2);
    let mut gamma = Vec::with_capacity(arr.diameter());
    for i in 0..arr.diameter() {
        let diff = &seq.u[i + 1] - &seq.u[i];
        if diff.is_zero() {
            return Err(GammaError::EqualConsecutive(i));
        }
        let g = &size * &seq.u[i + 1] / diff;
        if !is_integer(&g) {
            return Err(GammaError::NonIntegralGamma(i, format_rational(&g)));
        }
        let g = i64::try_from(g.to_integer()).unwrap_or(i64::MAX);
        if g < 1 || g > a1 + 1 {
            return Err(GammaError::GammaOutOfRange(i, g));
        }
        if let Some(&prev) = gamma.last() {
            if g < prev {
                return Err(GammaError::MonotonicityViolation(i));
            }
        }
        gamma.push(g);
    }
    Ok(gamma)
}

fn near_polygon_from(arr: &IntersectionArray, gamma: &[i64]) -> Result<bool, NotGeometric> {
    let a1 = arr.a(1);
    let direct = (1..=arr.diameter()).all(|i| arr.a(i) == arr.c(i) * a1);
    let via_gamma = gamma.last() == Some(&1);
    if direct != via_gamma {
        return Err(NotGeometric::Inconsistent { direct, via_gamma });
    }
    Ok(direct)
}

/// `a_i = c_i a_1` for all `i`, cross-checked against `gamma_{D-1} = 1`.
pub fn near_polygon_check(arr: &IntersectionArray) -> Result<bool, NotGeometric> {
    let gamma = gamma_profile(arr)?;
    near_polygon_from(arr, &gamma)
}

/// The relation between `a_i`, `b_i`, `c_i` and `gamma` that holds on every
/// geometric array. Returns the first index where it fails.
pub fn check_gamma_identity(arr: &IntersectionArray, gamma: &[i64]) -> Result<(), usize> {
    let d = arr.diameter();
    let m = int(arr.a(1) + 1);
    for i in 1..=d {
        let gp = int(gamma[i - 1]);
        let mut rhs = int(arr.c(i)) * (&m - &gp) / &gp;
        if i < d {
            let gi = int(gamma[i]);
            rhs += int(arr.b(i)) * (&gi - int(1)) / (&m - (&gi - int(1)));
        }
        if rhs != int(arr.a(i)) {
            return Err(i);
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GramError {
    #[error("j = {j} outside 2..={d}")]
    JOutOfRange { j: usize, d: usize },
    #[error("closed form exists only for j in {{3, 4}}, got {0}")]
    NoClosedForm(usize),
}

/// Inner products `<F,F>`, `<C,F>`, `<C,C>`, the determinant
/// `S = <C,C><F,F> - <C,F>^2` and the ratio `t = <C,F>/<F,F>` for a pair at
/// distance `j`. `cc` and `s` are only defined when `gamma_{j-1} = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData<S> {
    pub j: usize,
    pub ff: S,
    pub cf: S,
    pub cc: Option<S>,
    pub s: Option<S>,
    pub t: Option<S>,
}

impl Serialize for GramData<BigRational> {
    fn serialize<Ser: serde::Serializer>(&self, serializer: Ser) -> Result<Ser::Ok, Ser::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            j: usize,
            #[serde(serialize_with = "ser_rational")]
            ff: &'a BigRational,
            #[serde(serialize_with = "ser_rational")]
            cf: &'a BigRational,
            #[serde(serialize_with = "ser_opt_rational")]
            cc: &'a Option<BigRational>,
            #[serde(serialize_with = "ser_opt_rational")]
            s: &'a Option<BigRational>,
            #[serde(serialize_with = "ser_opt_rational")]
            t: &'a Option<BigRational>,
        }
        Repr {
            j: self.j,
            ff: &self.ff,
            cf: &self.cf,
            cc: &self.cc,
            s: &self.s,
            t: &self.t,
        }
        .serialize(serializer)
    }
}

/// Inner-product data from the intersection numbers `c[0..=j]` (with
/// `c[0] = 0`) and a standard sequence `u[0..=j]`.
pub fn gram_from_sequence<S: Scalar>(c: &[i64], u: &[S], j: usize, gamma_prev_one: bool) -> GramData<S> {
    let two = S::from_int(2);
    let cj = S::from_int(c[j]);
    let ff = two.clone() * (u[0].clone() - u[j].clone());
    let cf = two.clone() * cj.clone() * (u[1].clone() - u[j - 1].clone());
    let (cc, s) = if gamma_prev_one {
        let cjm = S::from_int(c[j - 1]);
        let cc = two
            * cj.clone()
            * ((u[0].clone() + (cj.clone() - S::one()) * u[2].clone())
                - (cjm.clone() * u[j - 2].clone() + (cj.clone() - cjm) * u[j].clone()));
        let s = cc.clone() * ff.clone() - cf.clone() * cf.clone();
        (Some(cc), Some(s))
    } else {
        (None, None)
    };
    let t = if ff.is_negligible() {
        None
    } else {
        Some(cf.clone() / ff.clone())
    };
    GramData { j, ff, cf, cc, s, t }
}

/// Whether `gamma_0 = ... = gamma_{j-1} = 1`, read off the standard
/// sequence of `-k/(a_1+1)` as `u_i = (-1/(a_1+1))^i` for `i <= j`.
pub fn gamma_prefix_is_one(arr: &IntersectionArray, j: usize) -> bool {
    let seq = standard_sequence(arr, delsarte_eigenvalue(arr));
    let x = rat(-1, arr.a(1) + 1);
    (0..=j).all(|i| seq.u[i] == powi(&x, i as u32))
}

pub fn gram_data(arr: &IntersectionArray, j: usize) -> Result<GramData<BigRational>, GramError> {
    let d = arr.diameter();
    if j < 2 || j > d {
        return Err(GramError::JOutOfRange { j, d });
    }
    let seq = standard_sequence(arr, delsarte_eigenvalue(arr));
    let c: Vec<i64> = (0..=d).map(|i| arr.c(i)).collect();
    Ok(gram_from_sequence(&c, &seq.u, j, gamma_prefix_is_one(arr, j)))
}

/// Closed forms of `S_3` (from `a_1, c_2, c_3`) and `S_4` (from
/// `a_1, c_3, c_4`) when `u_i = (-1/(a_1+1))^i` up to `i = j`.
pub fn s_closed_form<S: Scalar>(a1: i64, c2: i64, c3: i64, c4: i64, j: usize) -> Result<S, GramError> {
    let a = S::from_int(a1);
    let one = S::one();
    let two = S::from_int(2);
    let four = S::from_int(4);
    let m = a.clone() + one.clone();
    let p = a.clone() + two.clone();
    match j {
        3 => {
            let c2 = S::from_int(c2);
            let c3 = S::from_int(c3);
            let bound = (a.clone() * a.clone() + a.clone() + one.clone()) * (a.clone() + c2 + one);
            Ok(four * p.clone() * p * a * c3.clone() / powi(&m, 6) * (bound - c3))
        }
        4 => {
            let c3 = S::from_int(c3);
            let c4 = S::from_int(c4);
            let bound = (a.clone() * a.clone() + two.clone() * a.clone() + two) * (c3 - m.clone() * m.clone());
            Ok(four * p.clone() * p * a.clone() * a * c4.clone() / powi(&m, 8) * (c4 - bound))
        }
        other => Err(GramError::NoClosedForm(other)),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagationError {
    #[error("prefix must hold u_0..u_j with j >= 3, got {0} terms")]
    PrefixTooShort(usize),
    #[error("u_0 = u_j: F_j vanishes")]
    BipartiteLike,
    #[error("target diameter {d} is shorter than the prefix length {j}")]
    TargetTooShort { d: usize, j: usize },
}

/// Extends `u_0..u_j` to `u_0..u_D` using the linear dependence `C_j = t_j F_j`
/// (valid when `S_j = 0`): the ratio rule when `u_1 != u_{j-1}`, the
/// periodic rule `u_{i+1} = u_{i-j+3}` otherwise.
pub fn propagate_standard_sequence<S: Scalar>(prefix: &[S], d: usize) -> Result<Vec<S>, PropagationError> {
    if prefix.len() < 4 {
        return Err(PropagationError::PrefixTooShort(prefix.len()));
    }
    let j = prefix.len() - 1;
    if d < j {
        return Err(PropagationError::TargetTooShort { d, j });
    }
    let denom = prefix[0].clone() - prefix[j].clone();
    if denom.is_negligible() {
        return Err(PropagationError::BipartiteLike);
    }
    let numer = prefix[1].clone() - prefix[j - 1].clone();
    let mut u = prefix.to_vec();
    for i in j..d {
        let next = if numer.is_negligible() {
            u[i + 3 - j].clone()
        } else {
            (u[i].clone() - u[i + 2 - j].clone()) * denom.clone() / numer.clone() + u[i + 1 - j].clone()
        };
        u.push(next);
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    /// The Hermitian dual polar graphs `2A_{2D-1}(r)`.
    TwoA,
    /// `B_D(q)` or `C_D(q)` (the second clause also admits `2A_{2D-1}`).
    BorC,
    NoMatch,
    NotApplicable,
}

/// Which form of the near-polygon hypothesis the equality classifier uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum NearPolygonCondition {
    /// `a_i = c_i a_1`.
    #[default]
    Adopted,
    /// `a_i = c_i (a_1 + 1)`, kept for comparison; no graph satisfies it at
    /// `i = 1`.
    Printed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClauseCheck {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl ClauseCheck {
    fn new(name: impl Into<String>, expected: impl ToString, actual: impl ToString, passed: bool) -> Self {
        ClauseCheck {
            name: name.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub trace: Vec<ClauseCheck>,
    /// A classical family with exactly this array, if one is known.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub identified: Option<String>,
}

fn preconditions(arr: &IntersectionArray, trace: &mut Vec<ClauseCheck>) -> Result<GeometricProfile, String> {
    let d = arr.diameter();
    let ok_d = d >= 4;
    trace.push(ClauseCheck::new("diameter", ">= 4", d, ok_d));
    if !ok_d {
        return Err(format!("diameter {} < 4", d));
    }
    let c2 = arr.c(2);
    trace.push(ClauseCheck::new("c_2", "!= 1", c2, c2 != 1));
    if c2 == 1 {
        return Err("c_2 = 1".into());
    }
    let nonbip = !arr.is_bipartite_like();
    trace.push(ClauseCheck::new("non-bipartite", "some a_i > 0", nonbip, nonbip));
    if !nonbip {
        return Err("bipartite (all a_i = 0)".into());
    }
    match geometric_candidate(arr) {
        Ok(p) => {
            trace.push(ClauseCheck::new(
                "theta_min",
                format_rational(&delsarte_eigenvalue(arr)),
                format_rational(&p.theta_min),
                true,
            ));
            Ok(p)
        }
        Err(e) => {
            trace.push(ClauseCheck::new(
                "theta_min",
                format_rational(&delsarte_eigenvalue(arr)),
                e.to_string(),
                false,
            ));
            Err(format!("not geometric: {}", e))
        }
    }
}

fn near_polygon_checks(
    arr: &IntersectionArray,
    upto: usize,
    cond: NearPolygonCondition,
    trace: &mut Vec<ClauseCheck>,
) -> bool {
    let a1 = arr.a(1);
    let mut all = true;
    for i in 1..=upto {
        let target = match cond {
            NearPolygonCondition::Adopted => arr.c(i) * a1,
            NearPolygonCondition::Printed => arr.c(i) * (a1 + 1),
        };
        let label = match cond {
            NearPolygonCondition::Adopted => format!("a_{i} = c_{i} a_1"),
            NearPolygonCondition::Printed => format!("a_{i} = c_{i} (a_1+1)"),
        };
        let ok = arr.a(i) == target;
        trace.push(ClauseCheck::new(label, target, arr.a(i), ok));
        all &= ok;
    }
    all
}

fn not_applicable(reason: String, trace: Vec<ClauseCheck>) -> Classification {
    Classification {
        outcome: Outcome::NotApplicable,
        reason: Some(reason),
        trace,
        identified: None,
    }
}

/// Dual polar recognition from the two equality conditions on `c_3` and
/// `c_4` together with the near-polygon hypothesis on `a_1..a_3`.
pub fn classify_by_equalities(arr: &IntersectionArray, cond: NearPolygonCondition) -> Classification {
    let mut trace = Vec::new();
    if let Err(reason) = preconditions(arr, &mut trace) {
        return not_applicable(reason, trace);
    }
    let a1 = arr.a(1);
    let (c2, c3, c4) = (arr.c(2), arr.c(3), arr.c(4));

    let first_np = near_polygon_checks(arr, 2, cond, &mut trace);
    let c3_target = (a1 * a1 + a1 + 1) * (a1 + c2 + 1);
    let first_eq = c3 == c3_target;
    trace.push(ClauseCheck::new("c_3 = (a_1^2+a_1+1)(a_1+c_2+1)", c3_target, c3, first_eq));

    let second_np = near_polygon_checks(arr, 3, cond, &mut trace);
    let c4_target = (a1 * a1 + 2 * a1 + 2) * (c3 - (a1 + 1) * (a1 + 1));
    let second_eq = c4 == c4_target;
    trace.push(ClauseCheck::new("c_4 = (a_1^2+2a_1+2)(c_3-(a_1+1)^2)", c4_target, c4, second_eq));

    let outcome = if first_np && first_eq {
        Outcome::TwoA
    } else if second_np && second_eq {
        Outcome::BorC
    } else {
        Outcome::NoMatch
    };
    let identified = match outcome {
        Outcome::TwoA | Outcome::BorC => identify_classical(arr),
        _ => None,
    };
    Classification {
        outcome,
        reason: None,
        trace,
        identified,
    }
}

/// Dual polar recognition from `gamma` and inequalities on `c_2` and `c_4`.
/// The lower bound `c_3 >= c_2^2 - c_2 + 1` for 2-bounded graphs is reported
/// alongside as a sanity condition.
pub fn classify_by_inequalities(arr: &IntersectionArray) -> Classification {
    let mut trace = Vec::new();
    let profile = match preconditions(arr, &mut trace) {
        Ok(p) => p,
        Err(reason) => return not_applicable(reason, trace),
    };
    let a1 = arr.a(1);
    let (c2, c3, c4) = (arr.c(2), arr.c(3), arr.c(4));
    let g = &profile.gamma;

    let g2 = g[2] == 1;
    trace.push(ClauseCheck::new("gamma_2", 1, g[2], g2));
    let c2_first = (a1 + 1) * (a1 + 1) + 1;
    let first_c2 = c2 >= c2_first;
    trace.push(ClauseCheck::new("c_2 >= (a_1+1)^2+1", c2_first, c2, first_c2));

    if g2 {
        let lower = c2 * c2 - c2 + 1;
        trace.push(ClauseCheck::new("c_3 >= c_2^2-c_2+1", lower, c3, c3 >= lower));
    }

    let g3 = g[3] == 1;
    trace.push(ClauseCheck::new("gamma_3", 1, g[3], g3));
    let second_c2 = c2 >= a1 + 2;
    trace.push(ClauseCheck::new("c_2 >= a_1+2", a1 + 2, c2, second_c2));
    let c4_bound = (a1 + 2) * (a1 * a1 + 2 * a1 + 2);
    let second_c4 = c4 <= c4_bound;
    trace.push(ClauseCheck::new("c_4 <= (a_1+2)(a_1^2+2a_1+2)", c4_bound, c4, second_c4));

    let (outcome, reason) = if g2 && first_c2 {
        (Outcome::TwoA, None)
    } else if g3 && second_c2 && second_c4 {
        (Outcome::BorC, None)
    } else {
        (Outcome::NotApplicable, Some("no clause hypothesis holds".to_string()))
    };
    let identified = match outcome {
        Outcome::TwoA | Outcome::BorC => identify_classical(arr),
        _ => None,
    };
    Classification {
        outcome,
        reason,
        trace,
        identified,
    }
}

impl GeometricProfile {
    /// `u_i = (-1/(a_1+1))^i`, the shape every near-polygon sequence takes.
    pub fn near_polygon_sequence(&self, d: usize) -> Vec<BigRational> {
        let x = rat(-1, self.a1 + 1);
        (0..=d).map(|i| powi(&x, i as u32)).collect()
    }

    /// `gamma_0 = ... = gamma_m = 1`.
    pub fn gamma_is_one_through(&self, m: usize) -> bool {
        self.gamma.iter().take(m + 1).all(|&g| g == 1)
    }
}
