//! Exhaustive feasibility search over the arrays with `a_1 = 1`, `c_2 = 3`,
//! smallest eigenvalue `-k/2` and diameter `5..=8`.
//!
//! For each case `(j, D)` the array is fixed by `k` and a few free `c_i`
//! (see [`CaseTemplate`]). Every assignment is run through an ordered list
//! of necessary conditions and labelled with the first one it fails.
//! Subtrees in which a free `c_i` has the wrong parity are tallied in closed
//! form rather than visited; [`for_each_candidate`] visits every leaf and is
//! used to cross-check the tallies.

use std::cell::OnceCell;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::{
    complete_array, IntersectionArray, Status, TAG_B_MONOTONE, TAG_C1, TAG_C_BOUND, TAG_C_MONOTONE,
    TAG_K_INTEGRAL,
};
use crate::scalar::{is_integer, rat};
use crate::spectral::{
    count_eigenvalues_above, multiplicities_integral_with, multiplicity, DEFAULT_WIDTH, FINE_WIDTH,
    TAG_MULT_INTEGRAL,
};

/// The cases `(j, D)`.
pub const CASES: [(usize, usize); 6] = [(3, 5), (4, 5), (3, 6), (4, 6), (4, 7), (4, 8)];

pub const TAG_DIV_J3: &str = "4 | k-2";
pub const TAG_DIV_J4: &str = "c_3 = 7 and 8 | k-6, or c_3 = 15 and 24 | k-6";
pub const TAG_INTEGRAL: &str = "entries integral";
pub const TAG_POSITIVE: &str = "entries positive";
pub const TAG_STRICT_GROWTH: &str = "c_i > c_(i-1) for i <= j";
pub const TAG_EIGENVALUE: &str = "-k/2 is an eigenvalue";
pub const TAG_SMALLEST: &str = "-k/2 is the smallest eigenvalue";
pub const TAG_MULT_BOUND: &str = "m(-k/2) <= 4^j";

pub const PRUNE_HIRAKI: &str = "c_3 >= c_2^2 - c_2 + 1";
pub const PRUNE_S3: &str = "S_3 >= 0";
pub const PRUNE_S4: &str = "S_4 >= 0";

pub const SURVIVOR: &str = "SURVIVOR";
pub const SURVIVOR_UNDECIDED: &str = "SURVIVOR (undecided)";

const MAX_D: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("(j, D) = ({0}, {1}) is not one of the six cases")]
    UnknownCase(usize, usize),
    #[error("case ({j}, {d}) takes {expected} free c values, got {got}")]
    Arity { j: usize, d: usize, expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Exactly the listed necessary conditions.
    Strict,
    /// Additionally prunes with the Hiraki bound and `S_3, S_4 >= 0`.
    Extended,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Extended => "extended",
        })
    }
}

/// `a_i = c_i` for `i < j`, `a_j = k/2`, `a_i = b_i` for `i > j`, `c_D = k`,
/// and for `D = 2j` also `c_(D-i) = b_i`, `b_(D-i) = c_i` (`i != j`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseTemplate {
    pub j: usize,
    pub d: usize,
    pub antipodal: bool,
    /// Indices `i` of the free `c_i`, in order.
    pub free: Vec<usize>,
    /// Allowed values of `c_3` when restricted (the `j = 4` cases).
    pub c3_choices: Option<[i64; 2]>,
    /// `2^(2j+1)`.
    pub k_max: i64,
}

pub fn case_template(j: usize, d: usize) -> Result<CaseTemplate, SearchError> {
    if !CASES.contains(&(j, d)) {
        return Err(SearchError::UnknownCase(j, d));
    }
    let antipodal = d == 2 * j;
    let free = if antipodal { (3..=j).collect() } else { (3..d).collect() };
    Ok(CaseTemplate {
        j,
        d,
        antipodal,
        free,
        c3_choices: (j == 4).then_some([7, 15]),
        k_max: 1 << (2 * j + 1),
    })
}

impl CaseTemplate {
    pub fn divisibility_tag(&self) -> &'static str {
        if self.j == 3 {
            TAG_DIV_J3
        } else {
            TAG_DIV_J4
        }
    }

    pub fn divisible(&self, k: i64, c3: i64) -> bool {
        if self.j == 3 {
            (k - 2).rem_euclid(4) == 0
        } else {
            (c3 == 7 && (k - 6).rem_euclid(8) == 0) || (c3 == 15 && (k - 6).rem_euclid(24) == 0)
        }
    }

    pub fn param_names(&self) -> Vec<String> {
        std::iter::once("k".to_string()).chain(self.free.iter().map(|i| format!("c_{i}"))).collect()
    }

    /// `c_0..=c_D` from `k` and the free values.
    pub fn complete_c(&self, k: i64, free: &[i64]) -> Result<Vec<i64>, SearchError> {
        if free.len() != self.free.len() {
            return Err(SearchError::Arity {
                j: self.j,
                d: self.d,
                expected: self.free.len(),
                got: free.len(),
            });
        }
        let mut c = [0i64; MAX_D + 1];
        for (&i, &v) in self.free.iter().zip(free) {
            c[i] = v;
        }
        self.fill_fixed(k, &mut c);
        Ok(c[..=self.d].to_vec())
    }

    fn fill_fixed(&self, k: i64, c: &mut [i64; MAX_D + 1]) {
        c[0] = 0;
        c[1] = 1;
        c[2] = 3;
        c[self.d] = k;
        if self.antipodal {
            for i in 1..self.j {
                c[self.d - i] = k - 2 * c[i];
            }
        }
    }

    /// `2 b_i` for `i = 0..D`; `b_D = 0`.
    fn doubled_b(&self, k: i64, c: &[i64; MAX_D + 1]) -> [i64; MAX_D + 1] {
        let mut b2 = [0i64; MAX_D + 1];
        for i in 0..self.d {
            b2[i] = if i < self.j {
                2 * (k - 2 * c[i])
            } else if i == self.j {
                k - 2 * c[i]
            } else if self.antipodal {
                2 * c[self.d - i]
            } else {
                k - c[i]
            };
        }
        b2
    }

    /// Upper end of the range of the free `c_i`: the next fixed `c`.
    fn upper(&self, i: usize, k: i64, c: &[i64; MAX_D + 1]) -> i64 {
        if self.antipodal {
            c[self.d - self.j + 1].min(k)
        } else {
            let _ = i;
            k
        }
    }

    /// The array with `k` and the free `c_i` left symbolic.
    pub fn symbolic(&self) -> String {
        let d = self.d;
        let c_sym = |i: usize| -> String {
            match i {
                0 => "0".into(),
                1 => "1".into(),
                2 => "3".into(),
                _ if i == d => "k".into(),
                _ if self.free.contains(&i) => format!("c_{i}"),
                _ => b_sym_low(d - i),
            }
        };
        fn b_sym_low(i: usize) -> String {
            match i {
                0 => "k".into(),
                1 => "k-2".into(),
                2 => "k-6".into(),
                _ => format!("k-2c_{i}"),
            }
        }
        let b: Vec<String> = (0..d)
            .map(|i| {
                if i < self.j {
                    b_sym_low(i)
                } else if i == self.j {
                    format!("k/2-c_{i}")
                } else if self.antipodal {
                    c_sym(d - i)
                } else {
                    format!("(k-c_{i})/2")
                }
            })
            .collect();
        let c: Vec<String> = (1..=d).map(c_sym).collect();
        format!("({}; {})", b.join(", "), c.join(", "))
    }
}

/// The ordered necessary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Condition {
    Divisibility,
    Integral,
    Positive,
    Feasibility,
    StrictGrowth,
    Eigenvalue,
    Smallest,
    Multiplicity,
}

pub const DEFAULT_ORDER: [Condition; 8] = [
    Condition::Divisibility,
    Condition::Integral,
    Condition::Positive,
    Condition::Feasibility,
    Condition::StrictGrowth,
    Condition::Eigenvalue,
    Condition::Smallest,
    Condition::Multiplicity,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Pass,
    Fail(&'static str),
    /// Could not be decided even after the fine recheck.
    Undecided,
}

/// One fully assigned candidate with its derived entries.
pub struct Candidate<'a> {
    pub template: &'a CaseTemplate,
    pub k: i64,
    c: [i64; MAX_D + 1],
    b2: [i64; MAX_D + 1],
    array: OnceCell<Option<IntersectionArray>>,
    rechecked: std::cell::Cell<bool>,
}

impl<'a> Candidate<'a> {
    pub fn new(template: &'a CaseTemplate, k: i64, free: &[i64]) -> Result<Self, SearchError> {
        let full = template.complete_c(k, free)?;
        let mut c = [0i64; MAX_D + 1];
        c[..full.len()].copy_from_slice(&full);
        Ok(Self::from_c(template, k, c))
    }

    fn from_c(template: &'a CaseTemplate, k: i64, c: [i64; MAX_D + 1]) -> Self {
        let b2 = template.doubled_b(k, &c);
        Candidate {
            template,
            k,
            c,
            b2,
            array: OnceCell::new(),
            rechecked: std::cell::Cell::new(false),
        }
    }

    pub fn c(&self) -> &[i64] {
        &self.c[..=self.template.d]
    }

    pub fn free_values(&self) -> Vec<i64> {
        self.template.free.iter().map(|&i| self.c[i]).collect()
    }

    fn integral(&self) -> bool {
        self.b2[..self.template.d].iter().all(|b| b % 2 == 0)
    }

    fn b(&self, i: usize) -> i64 {
        self.b2[i] / 2
    }

    /// The array, when every entry is a positive integer.
    pub fn array(&self) -> Option<&IntersectionArray> {
        self.array
            .get_or_init(|| {
                if !self.integral() {
                    return None;
                }
                let d = self.template.d;
                let b: Vec<i64> = (0..d).map(|i| self.b(i)).collect();
                complete_array(&b, &self.c[1..=d]).ok()
            })
            .as_ref()
    }

    /// Whether the multiplicity step needed the fine-width recheck.
    pub fn rechecked(&self) -> bool {
        self.rechecked.get()
    }

    pub fn check(&self, cond: Condition) -> Check {
        let t = self.template;
        let (d, j, k) = (t.d, t.j, self.k);
        let fail = Check::Fail;
        match cond {
            Condition::Divisibility => {
                if t.divisible(k, self.c[3]) {
                    Check::Pass
                } else {
                    fail(t.divisibility_tag())
                }
            }
            Condition::Integral => {
                if self.integral() {
                    Check::Pass
                } else {
                    fail(TAG_INTEGRAL)
                }
            }
            Condition::Positive => {
                let ok = (0..d).all(|i| self.b2[i] >= 2) && (1..=d).all(|i| self.c[i] >= 1);
                if ok {
                    Check::Pass
                } else {
                    fail(TAG_POSITIVE)
                }
            }
            Condition::Feasibility => self.feasibility(),
            Condition::StrictGrowth => {
                if (2..=j).all(|i| self.c[i] > self.c[i - 1]) {
                    Check::Pass
                } else {
                    fail(TAG_STRICT_GROWTH)
                }
            }
            Condition::Eigenvalue => {
                if self.integral() && self.eigenvalue_holds() {
                    Check::Pass
                } else {
                    fail(TAG_EIGENVALUE)
                }
            }
            Condition::Smallest => {
                let Some(arr) = self.array() else {
                    return fail(TAG_SMALLEST);
                };
                let above = self
                    .count_above_half_k()
                    .unwrap_or_else(|| count_eigenvalues_above(arr, &rat(-k, 2)));
                if above == d {
                    Check::Pass
                } else {
                    fail(TAG_SMALLEST)
                }
            }
            Condition::Multiplicity => self.multiplicity_check(),
        }
    }

    /// Basic feasibility in the order and with the tags of
    /// [`crate::params::basic_feasibility`], on machine integers.
    fn feasibility(&self) -> Check {
        if !self.integral() {
            return Check::Fail(TAG_K_INTEGRAL);
        }
        let d = self.template.d;
        let c = &self.c;
        if c[1] != 1 {
            return Check::Fail(TAG_C1);
        }
        if (2..=d).any(|i| c[i] < c[i - 1]) {
            return Check::Fail(TAG_C_MONOTONE);
        }
        if (1..d).any(|i| self.b2[i] > self.b2[i - 1]) {
            return Check::Fail(TAG_B_MONOTONE);
        }
        let mut ki: i128 = 1;
        for i in 1..=d {
            let num = ki * self.b(i - 1) as i128;
            let ci = c[i] as i128;
            if ci <= 0 || num <= 0 {
                return Check::Fail(TAG_K_INTEGRAL);
            }
            // i64 division is much cheaper and almost always enough
            let (q, r) = match i64::try_from(num) {
                Ok(n) => ((n / ci as i64) as i128, (n % ci as i64) as i128),
                Err(_) => (num / ci, num % ci),
            };
            if r != 0 {
                return Check::Fail(TAG_K_INTEGRAL);
            }
            ki = q;
        }
        if (1..=d).any(|i| c[i] > self.k) {
            return Check::Fail(TAG_C_BOUND);
        }
        Check::Pass
    }

    /// Whether `u_i = (-1/2)^min(i, 2j-i)` satisfies every row of the
    /// recurrence at `theta = -k/2`.
    fn eigenvalue_holds(&self) -> bool {
        let (d, j, k) = (self.template.d, self.template.j, self.k as i128);
        // w_i = 2^j u_i
        let w = |i: usize| -> i128 {
            let e = i.min(2 * j - i);
            let sign = if e.is_multiple_of(2) { 1 } else { -1 };
            sign * (1i128 << (j - e))
        };
        (0..=d).all(|i| {
            let ci = self.c[i] as i128;
            let b2i = if i < d { self.b2[i] as i128 } else { 0 };
            let a2i = 2 * k - b2i - 2 * ci;
            let left = if i > 0 { 2 * ci * w(i - 1) } else { 0 };
            let right = if i < d { b2i * w(i + 1) } else { 0 };
            left + a2i * w(i) + right + k * w(i) == 0
        })
    }

    /// Sign changes of the scaled principal-minor sequence at `-k/2` in
    /// `i128`; `None` on overflow.
    fn count_above_half_k(&self) -> Option<usize> {
        let d = self.template.d;
        let n = -(self.k as i128);
        let mut prev: i128 = 1;
        let mut cur: i128 = n - 2 * self.a(0) as i128;
        let mut last = 1i8;
        let mut changes = 0;
        let mut record = |v: i128| {
            if v != 0 {
                let s = if v > 0 { 1 } else { -1 };
                if s != last {
                    changes += 1;
                }
                last = s;
            }
        };
        record(cur);
        for i in 1..=d {
            let beta = (self.b(i - 1) as i128).checked_mul(self.c[i] as i128)?.checked_mul(4)?;
            let next = (n - 2 * self.a(i) as i128).checked_mul(cur)?.checked_sub(beta.checked_mul(prev)?)?;
            record(next);
            prev = cur;
            cur = next;
        }
        Some(changes)
    }

    fn a(&self, i: usize) -> i64 {
        let b = if i < self.template.d { self.b(i) } else { 0 };
        self.k - b - self.c[i]
    }

    /// `v 4^j / sum_i k_i 4^(j - e_i)`, the Biggs multiplicity of `-k/2`
    /// when `u_i = (-1/2)^(e_i)` with `e_i = min(i, 2j - i)`. `None` on
    /// overflow; `Some(None)` when it is not an integer.
    fn half_k_multiplicity(&self) -> Option<Option<u64>> {
        let (d, j) = (self.template.d, self.template.j);
        let mut ki: i128 = 1;
        let mut v: i128 = 1;
        let mut norm: i128 = 1i128 << (2 * j);
        for i in 1..=d {
            ki = ki.checked_mul(self.b(i - 1) as i128)? / self.c[i] as i128;
            v = v.checked_add(ki)?;
            let e = i.min(2 * j - i);
            norm = norm.checked_add(ki.checked_mul(1i128 << (2 * (j - e)))?)?;
        }
        let scaled = v.checked_mul(1i128 << (2 * j))?;
        if norm <= 0 || scaled % norm != 0 {
            return Some(None);
        }
        Some(Some((scaled / norm).to_u64().unwrap_or(u64::MAX)))
    }

    fn multiplicity_check(&self) -> Check {
        let Some(arr) = self.array() else {
            return Check::Fail(TAG_MULT_INTEGRAL);
        };
        let fast = if self.feasibility() == Check::Pass && self.eigenvalue_holds() {
            self.half_k_multiplicity()
        } else {
            None
        };
        let m = match fast {
            Some(m) => m,
            None => {
                let theta = rat(-self.k, 2);
                match multiplicity::<BigRational>(arr, theta) {
                    Ok(m) if is_integer(&m) && m.is_positive() => Some(m.to_integer().to_u64().unwrap_or(u64::MAX)),
                    _ => None,
                }
            }
        };
        let Some(m) = m.filter(|&m| m > 0) else {
            return Check::Fail(TAG_MULT_INTEGRAL);
        };
        if m > 1u64 << (2 * self.template.j) {
            return Check::Fail(TAG_MULT_BOUND);
        }
        let verdict = multiplicities_integral_with(arr, &rat(DEFAULT_WIDTH.0, DEFAULT_WIDTH.1));
        let verdict = if verdict.status() == Status::Indeterminate {
            self.rechecked.set(true);
            multiplicities_integral_with(arr, &rat(FINE_WIDTH.0, FINE_WIDTH.1))
        } else {
            verdict
        };
        match verdict.status() {
            Status::Pass => Check::Pass,
            Status::Fail => Check::Fail(TAG_MULT_INTEGRAL),
            Status::Indeterminate => Check::Undecided,
        }
    }

    /// First failing condition in `order`, or `None` for a survivor.
    /// An undecided condition does not kill.
    pub fn verdict_with(&self, order: &[Condition]) -> Verdict {
        let mut undecided = false;
        for &cond in order {
            match self.check(cond) {
                Check::Pass => {}
                Check::Fail(tag) => return Verdict::Killed(tag),
                Check::Undecided => undecided = true,
            }
        }
        Verdict::Survivor { undecided }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict_with(&DEFAULT_ORDER)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Killed(&'static str),
    Survivor { undecided: bool },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Killed(tag) => tag,
            Verdict::Survivor { undecided: false } => SURVIVOR,
            Verdict::Survivor { undecided: true } => SURVIVOR_UNDECIDED,
        }
    }

    pub fn is_survivor(&self) -> bool {
        matches!(self, Verdict::Survivor { .. })
    }
}

/// Verdict for an explicit assignment, ignoring the search ranges.
pub fn evaluate_candidate(j: usize, d: usize, k: i64, free: &[i64]) -> Result<Verdict, SearchError> {
    let t = case_template(j, d)?;
    Ok(Candidate::new(&t, k, free)?.verdict())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CandidateReport {
    pub j: usize,
    pub d: usize,
    pub k: i64,
    /// Free `c_i` values; `None` where the candidate was rejected before
    /// the value was chosen.
    pub params: Vec<Option<i64>>,
    pub array: Option<String>,
    pub verdict: String,
}

impl CandidateReport {
    pub fn params_field(&self) -> String {
        self.params
            .iter()
            .map(|p| p.map_or("*".to_string(), |v| v.to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Fields in [`CSV_HEADER`] order.
    pub fn csv_record(&self) -> [String; 5] {
        [
            self.j.to_string(),
            self.d.to_string(),
            self.k.to_string(),
            self.params_field(),
            self.verdict.clone(),
        ]
    }
}

fn ser_len<S: serde::Serializer>(v: &[CandidateReport], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(v.len() as u64)
}

pub const CSV_HEADER: [&str; 5] = ["j", "D", "k", "c_params", "verdict"];

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CaseReport {
    pub j: usize,
    pub d: usize,
    pub template: String,
    pub examined: u64,
    pub kills: BTreeMap<String, u64>,
    /// Leaves removed by the extended-mode bounds before evaluation.
    pub pruned: BTreeMap<String, u64>,
    /// Candidates that reached the smallest-eigenvalue condition. Serialized
    /// as a count; the rows go to CSV.
    #[serde(serialize_with = "ser_len")]
    pub spectral_stage: Vec<CandidateReport>,
    pub rechecked: u64,
    pub survivors: Vec<CandidateReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub mode: Mode,
    pub cases: Vec<CaseReport>,
    pub examined: u64,
    pub pruned: u64,
    pub survivors: usize,
}

impl fmt::Display for SearchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode: {}", self.mode)?;
        for case in &self.cases {
            writeln!(
                f,
                "case (j={}, D={}) {}: examined {}, spectral stage {}, survivors {}",
                case.j,
                case.d,
                case.template,
                case.examined,
                case.spectral_stage.len(),
                case.survivors.len()
            )?;
            for (tag, n) in &case.kills {
                writeln!(f, "  killed by {tag}: {n}")?;
            }
            for (tag, n) in &case.pruned {
                writeln!(f, "  pruned by {tag}: {n}")?;
            }
            for s in &case.survivors {
                writeln!(f, "  survivor k={} c=({}) {}", s.k, s.params_field(), s.array.as_deref().unwrap_or("?"))?;
            }
        }
        writeln!(f, "examined: {}", self.examined)?;
        if self.mode == Mode::Extended {
            writeln!(f, "pruned: {}", self.pruned)?;
        }
        write!(f, "survivors: {}", self.survivors)
    }
}

fn report_for(c: &Candidate<'_>, verdict: Verdict) -> CandidateReport {
    CandidateReport {
        j: c.template.j,
        d: c.template.d,
        k: c.k,
        params: c.free_values().into_iter().map(Some).collect(),
        array: c.array().map(|a| a.canonical()),
        verdict: verdict.label().to_string(),
    }
}

/// `C(span + r, r)`: non-decreasing `r`-tuples in a range of `span + 1` values.
fn completions(span: i64, r: usize) -> u64 {
    if span < 0 {
        return 0;
    }
    let n = span as u128 + r as u128;
    let mut acc: u128 = 1;
    for i in 0..r as u128 {
        acc = acc * (n - i) / (i + 1);
    }
    acc as u64
}

/// Extended-mode bounds on the free `c_i` at index `i`: `(lo, hi, tags)`.
fn extended_bounds(t: &CaseTemplate, i: usize, c: &[i64; MAX_D + 1]) -> Option<(i64, i64)> {
    match (t.j, i) {
        (3, 3) => Some((7, 15)),
        (4, 4) => Some((5 * (c[3] - 4), i64::MAX)),
        _ => None,
    }
}

fn prune_tag(t: &CaseTemplate, i: usize, below: bool) -> &'static str {
    match (t.j, i, below) {
        (3, 3, true) => PRUNE_HIRAKI,
        (3, 3, false) => PRUNE_S3,
        _ => PRUNE_S4,
    }
}

#[derive(Default)]
struct Tally {
    examined: u64,
    kills: BTreeMap<&'static str, u64>,
    pruned: BTreeMap<&'static str, u64>,
    spectral_stage: Vec<CandidateReport>,
    rechecked: u64,
    survivors: Vec<CandidateReport>,
}

impl Tally {
    fn kill(&mut self, tag: &'static str, n: u64) {
        if n > 0 {
            self.examined += n;
            *self.kills.entry(tag).or_default() += n;
        }
    }

    fn merge(&mut self, other: Tally) {
        self.examined += other.examined;
        for (t, n) in other.kills {
            *self.kills.entry(t).or_default() += n;
        }
        for (t, n) in other.pruned {
            *self.pruned.entry(t).or_default() += n;
        }
        self.spectral_stage.extend(other.spectral_stage);
        self.rechecked += other.rechecked;
        self.survivors.extend(other.survivors);
    }
}

/// Walks the search tree below `k`. With `visit` set, every leaf is
/// evaluated and passed to it; otherwise wrong-parity subtrees are tallied
/// in closed form.
struct Walker<'a, F: FnMut(CandidateReport)> {
    t: &'a CaseTemplate,
    mode: Mode,
    k: i64,
    visit: Option<F>,
    tally: Tally,
}

impl<F: FnMut(CandidateReport)> Walker<'_, F> {
    fn emit(&mut self, report: CandidateReport) {
        if let Some(f) = self.visit.as_mut() {
            f(report);
        }
    }

    fn partial(&mut self, c: &[i64; MAX_D + 1], level: usize, tag: &'static str) {
        self.tally.kill(tag, 1);
        if self.visit.is_some() {
            let params = self
                .t
                .free
                .iter()
                .enumerate()
                .map(|(idx, &i)| (idx < level).then_some(c[i]))
                .collect();
            let report = CandidateReport {
                j: self.t.j,
                d: self.t.d,
                k: self.k,
                params,
                array: None,
                verdict: tag.to_string(),
            };
            self.emit(report);
        }
    }

    fn run(&mut self) {
        let t = self.t;
        let mut c = [0i64; MAX_D + 1];
        t.fill_fixed(self.k, &mut c);
        match t.c3_choices {
            None => {
                if !t.divisible(self.k, 0) {
                    self.partial(&c, 0, t.divisibility_tag());
                    return;
                }
                self.descend(&mut c, 0);
            }
            Some(choices) => {
                for c3 in choices {
                    c[3] = c3;
                    t.fill_fixed(self.k, &mut c);
                    if !t.divisible(self.k, c3) {
                        self.partial(&c, 1, t.divisibility_tag());
                        continue;
                    }
                    self.descend(&mut c, 1);
                }
            }
        }
    }

    fn descend(&mut self, c: &mut [i64; MAX_D + 1], level: usize) {
        let t = self.t;
        if level == t.free.len() {
            self.leaf(c);
            return;
        }
        let i = t.free[level];
        let remaining = t.free.len() - level - 1;
        let mut lo = c[i - 1];
        let mut hi = t.upper(i, self.k, c);
        if self.mode == Mode::Extended {
            if let Some((elo, ehi)) = extended_bounds(t, i, c) {
                // Leaves with c_i below elo or above ehi are counted, not visited.
                let top = hi;
                for v in lo..elo.min(top + 1) {
                    *self.tally.pruned.entry(prune_tag(t, i, true)).or_default() += completions(top - v, remaining);
                }
                if ehi < top {
                    for v in ehi.max(lo - 1) + 1..=top {
                        *self.tally.pruned.entry(prune_tag(t, i, false)).or_default() += completions(top - v, remaining);
                    }
                }
                lo = lo.max(elo);
                hi = hi.min(ehi);
            }
        }
        let parity_free = !t.antipodal && i > t.j;
        let bulk = self.visit.is_none();
        if bulk && parity_free && i == t.d - 1 {
            self.last_level(c, lo, hi);
            return;
        }
        for v in lo..=hi {
            c[i] = v;
            if bulk && parity_free && (self.k - v) % 2 != 0 {
                // (k - c_i)/2 is not an integer anywhere in this subtree
                self.tally.kill(TAG_INTEGRAL, completions(hi - v, remaining));
                continue;
            }
            self.descend(c, level + 1);
        }
    }

    /// The last free value `c_(D-1)` with `D-1 > j`. Everything except the
    /// entries at `D-1` is already fixed, so the conditions that only look
    /// at the prefix are decided once for the whole range.
    fn last_level(&mut self, c: &mut [i64; MAX_D + 1], lo: i64, hi: i64) {
        let t = self.t;
        let (d, k) = (t.d, self.k);
        let b2 = t.doubled_b(k, c);
        let integral = b2[..d - 1].iter().all(|b| b % 2 == 0);
        let positive = b2[..d - 1].iter().all(|&b| b >= 2) && c[1..d - 1].iter().all(|&x| x >= 1);
        let b_monotone = (1..d - 1).all(|x| b2[x] <= b2[x - 1]);
        let k_integral = {
            let mut ki: i128 = 1;
            (1..d - 1).all(|x| {
                let num = ki * (b2[x - 1] / 2) as i128;
                let ok = c[x] > 0 && num > 0 && num % c[x] as i128 == 0;
                ki = if ok { num / c[x] as i128 } else { 0 };
                ok
            })
        };
        for v in lo..=hi {
            // (2b_(D-1) = k - c_(D-1)
            let last_b2 = k - v;
            let tag = if !integral || last_b2 % 2 != 0 {
                Some(TAG_INTEGRAL)
            } else if !positive || last_b2 < 2 {
                Some(TAG_POSITIVE)
            } else if !b_monotone || last_b2 > b2[d - 2] {
                Some(TAG_B_MONOTONE)
            } else if !k_integral {
                Some(TAG_K_INTEGRAL)
            } else {
                None
            };
            match tag {
                Some(tag) => self.tally.kill(tag, 1),
                None => {
                    c[d - 1] = v;
                    self.leaf(c);
                }
            }
        }
    }

    fn leaf(&mut self, c: &[i64; MAX_D + 1]) {
        let cand = Candidate::from_c(self.t, self.k, *c);
        let mut undecided = false;
        let mut reached_spectral = false;
        let mut killed = None;
        for cond in DEFAULT_ORDER {
            reached_spectral |= cond == Condition::Smallest;
            match cand.check(cond) {
                Check::Pass => {}
                Check::Fail(tag) => {
                    killed = Some(tag);
                    break;
                }
                Check::Undecided => undecided = true,
            }
        }
        let verdict = killed.map_or(Verdict::Survivor { undecided }, Verdict::Killed);
        if cand.rechecked() {
            self.tally.rechecked += 1;
        }
        match verdict {
            Verdict::Killed(tag) => self.tally.kill(tag, 1),
            Verdict::Survivor { .. } => {
                self.tally.examined += 1;
                self.tally.survivors.push(report_for(&cand, verdict));
            }
        }
        if reached_spectral {
            self.tally.spectral_stage.push(report_for(&cand, verdict));
        }
        if self.visit.is_some() {
            let report = report_for(&cand, verdict);
            self.emit(report);
        }
    }
}

fn case_tally(t: &CaseTemplate, mode: Mode) -> Tally {
    let ks: Vec<i64> = (1..=t.k_max).collect();
    let parts: Vec<Tally> = ks
        .par_iter()
        .map(|&k| {
            let mut w: Walker<'_, fn(CandidateReport)> = Walker {
                t,
                mode,
                k,
                visit: None,
                tally: Tally::default(),
            };
            w.run();
            w.tally
        })
        .collect();
    let mut total = Tally::default();
    for p in parts {
        total.merge(p);
    }
    total
}

/// Runs one case.
pub fn enumerate_case(j: usize, d: usize, mode: Mode) -> Result<CaseReport, SearchError> {
    let t = case_template(j, d)?;
    let tally = case_tally(&t, mode);
    Ok(CaseReport {
        j,
        d,
        template: t.symbolic(),
        examined: tally.examined,
        kills: tally.kills.into_iter().map(|(t, n)| (t.to_string(), n)).collect(),
        pruned: tally.pruned.into_iter().map(|(t, n)| (t.to_string(), n)).collect(),
        spectral_stage: tally.spectral_stage,
        rechecked: tally.rechecked,
        survivors: tally.survivors,
    })
}

/// Visits every candidate of a case in canonical order (by `k`, then the
/// free values lexicographically), one report per leaf.
pub fn for_each_candidate<F: FnMut(CandidateReport)>(j: usize, d: usize, mode: Mode, f: F) -> Result<CaseReport, SearchError> {
    let t = case_template(j, d)?;
    let mut visit = Some(f);
    let mut total = Tally::default();
    for k in 1..=t.k_max {
        let mut w = Walker {
            t: &t,
            mode,
            k,
            visit: visit.take(),
            tally: Tally::default(),
        };
        w.run();
        visit = w.visit.take();
        total.merge(w.tally);
    }
    Ok(CaseReport {
        j,
        d,
        template: t.symbolic(),
        examined: total.examined,
        kills: total.kills.into_iter().map(|(t, n)| (t.to_string(), n)).collect(),
        pruned: total.pruned.into_iter().map(|(t, n)| (t.to_string(), n)).collect(),
        spectral_stage: total.spectral_stage,
        rechecked: total.rechecked,
        survivors: total.survivors,
    })
}

pub fn full_search(mode: Mode) -> SearchReport {
    search_cases(&CASES, mode).expect("CASES are valid")
}

pub fn search_cases(cases: &[(usize, usize)], mode: Mode) -> Result<SearchReport, SearchError> {
    let cases = cases
        .iter()
        .map(|&(j, d)| enumerate_case(j, d, mode))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SearchReport {
        mode,
        examined: cases.iter().map(|c| c.examined).sum(),
        pruned: cases.iter().flat_map(|c| c.pruned.values()).sum(),
        survivors: cases.iter().map(|c| c.survivors.len()).sum(),
        cases,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates() {
        let t = case_template(3, 6).unwrap();
        assert_eq!(t.symbolic(), "(k, k-2, k-6, k/2-c_3, 3, 1; 1, 3, c_3, k-6, k-2, k)");
        assert_eq!(t.param_names(), vec!["k", "c_3"]);
        let t = case_template(4, 8).unwrap();
        assert_eq!(
            t.symbolic(),
            "(k, k-2, k-6, k-2c_3, k/2-c_4, c_3, 3, 1; 1, 3, c_3, c_4, k-2c_3, k-6, k-2, k)"
        );
        assert_eq!(t.complete_c(100, &[7, 20]).unwrap(), vec![0, 1, 3, 7, 20, 86, 94, 98, 100]);
        let t = case_template(3, 5).unwrap();
        assert_eq!(t.symbolic(), "(k, k-2, k-6, k/2-c_3, (k-c_4)/2; 1, 3, c_3, c_4, k)");
        assert!(matches!(case_template(3, 7), Err(SearchError::UnknownCase(3, 7))));
    }

    #[test]
    fn divisibility_probe() {
        assert_eq!(evaluate_candidate(3, 6, 32, &[7]).unwrap(), Verdict::Killed(TAG_DIV_J3));
        assert_eq!(evaluate_candidate(4, 8, 14, &[15, 15]).unwrap(), Verdict::Killed(TAG_DIV_J4));
    }

    #[test]
    fn template_satisfies_recurrence() {
        let t = case_template(4, 7).unwrap();
        let cand = Candidate::new(&t, 30, &[7, 15, 20, 24]).unwrap();
        assert!(cand.eigenvalue_holds());
    }

    #[test]
    fn integer_fast_paths_agree() {
        let t = case_template(3, 5).unwrap();
        let mut compared = 0;
        for k in (6..=128).step_by(4) {
            for c3 in 3..=k {
                for c4 in c3..=k {
                    let cand = Candidate::new(&t, k, &[c3, c4]).unwrap();
                    if cand.feasibility() != Check::Pass {
                        continue;
                    }
                    let arr = cand.array().unwrap();
                    assert_eq!(
                        cand.count_above_half_k(),
                        Some(count_eigenvalues_above(arr, &rat(-k, 2)))
                    );
                    let slow = multiplicity::<BigRational>(arr, rat(-k, 2))
                        .ok()
                        .filter(is_integer)
                        .map(|m| m.to_integer().to_u64().unwrap());
                    assert_eq!(cand.half_k_multiplicity(), Some(slow));
                    compared += 1;
                }
            }
        }
        assert!(compared > 1000);
    }

    #[test]
    fn completions_count() {
        assert_eq!(completions(0, 0), 1);
        assert_eq!(completions(3, 1), 4);
        assert_eq!(completions(3, 2), 10);
        assert_eq!(completions(-1, 2), 0);
    }

    #[test]
    fn small_cases_empty() {
        for (j, d) in [(3, 5), (3, 6), (4, 5), (4, 8)] {
            let r = enumerate_case(j, d, Mode::Strict).unwrap();
            assert!(r.survivors.is_empty(), "({j},{d})");
            assert!(r.examined > 0);
        }
    }

    #[test]
    fn bulk_tally_matches_full_walk() {
        for (j, d) in [(3, 5), (3, 6), (4, 5), (4, 8)] {
            for mode in [Mode::Strict, Mode::Extended] {
                let bulk = enumerate_case(j, d, mode).unwrap();
                let mut leaves = 0u64;
                let walked = for_each_candidate(j, d, mode, |_| leaves += 1).unwrap();
                assert_eq!(bulk, walked, "({j},{d}) {mode}");
                assert_eq!(leaves, walked.examined);
            }
        }
    }
}
