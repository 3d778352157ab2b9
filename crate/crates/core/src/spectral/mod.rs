//! Eigenvalues of the intersection matrix, standard sequences and Biggs
//! multiplicities.

mod polynomial;
mod spectrum;

pub use polynomial::{characteristic_polynomial, count_eigenvalues_above, evaluate_at_integer};
pub use spectrum::{
    multiplicities_integral, multiplicities_integral_with, spectrum, spectrum_with_width,
    EigenValue, Interval, Multiplicity, Spectrum, SpectrumEntry, DEFAULT_WIDTH, FINE_WIDTH,
    INTEGRALITY_TOL, TAG_MULT_INTEGRAL,
};

use num_rational::BigRational;
use serde::Serialize;
use thiserror::Error;

use crate::params::IntersectionArray;
use crate::scalar::{format_rational, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("theta = {0} is not an eigenvalue of the intersection matrix")]
    NotEigenvalue(String),
    #[error("sum k_i u_i^2 vanished")]
    DegenerateNorm,
    #[error("eigenvalue certification failed: {0}")]
    Certification(String),
}

/// The tridiagonal matrix whose row `i` is `(c_i, a_i, b_i)` on the
/// sub-, main and super-diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TridiagonalMatrix {
    pub sub: Vec<i64>,
    pub diag: Vec<i64>,
    pub sup: Vec<i64>,
}

impl TridiagonalMatrix {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// `(c_i, a_i, b_i)` per row, with `c_0 = 0` and `b_D = 0`.
    pub fn rows(&self) -> Vec<(i64, i64, i64)> {
        (0..self.size())
            .map(|i| (self.sub[i], self.diag[i], self.sup[i]))
            .collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let n = self.size();
        let mut m = vec![vec![0; n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i > 0 {
                m[i][i - 1] = self.sub[i];
            }
            if i + 1 < n {
                m[i][i + 1] = self.sup[i];
            }
        }
        m
    }
}

pub fn intersection_matrix(arr: &IntersectionArray) -> TridiagonalMatrix {
    let d = arr.diameter();
    TridiagonalMatrix {
        sub: (0..=d).map(|i| arr.c(i)).collect(),
        diag: (0..=d).map(|i| arr.a(i)).collect(),
        sup: (0..=d).map(|i| arr.b(i)).collect(),
    }
}

/// `(u_0, ..., u_D)` for a value `theta`, generated by the forward
/// three-term recurrence. `residual` is what is left of the terminal
/// identity `c_D u_{D-1} + a_D u_D - theta u_D`.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardSequence<S> {
    pub theta: S,
    pub u: Vec<S>,
    pub residual: S,
}

impl<S: Scalar> StandardSequence<S> {
    /// The terminal identity holds (exactly, or below the float threshold).
    pub fn is_eigenvalue(&self) -> bool {
        self.residual.is_negligible()
    }
}

impl StandardSequence<BigRational> {
    pub fn formatted(&self) -> Vec<String> {
        self.u.iter().map(format_rational).collect()
    }
}

pub fn standard_sequence<S: Scalar>(arr: &IntersectionArray, theta: S) -> StandardSequence<S> {
    let d = arr.diameter();
    let k = S::from_int(arr.valency());
    let mut u = Vec::with_capacity(d + 1);
    u.push(S::one());
    u.push(theta.clone() / k);
    for j in 1..d {
        let next = ((theta.clone() - S::from_int(arr.a(j))) * u[j].clone()
            - S::from_int(arr.c(j)) * u[j - 1].clone())
            / S::from_int(arr.b(j));
        u.push(next);
    }
    let residual = S::from_int(arr.c(d)) * u[d - 1].clone() + S::from_int(arr.a(d)) * u[d].clone()
        - theta.clone() * u[d].clone();
    StandardSequence { theta, u, residual }
}

/// `sum_i k_i u_i^2` for a standard sequence.
pub fn weighted_norm<S: Scalar>(arr: &IntersectionArray, u: &[S]) -> S {
    arr.k_seq()
        .iter()
        .zip(u)
        .fold(S::zero(), |acc, (ki, ui)| acc + S::from_rational(ki) * ui.clone() * ui.clone())
}

/// Biggs' formula `m(theta) = v / sum_i k_i u_i(theta)^2`.
pub fn multiplicity<S: Scalar>(arr: &IntersectionArray, theta: S) -> Result<S, SpectralError> {
    let seq = standard_sequence(arr, theta);
    if !seq.is_eigenvalue() {
        return Err(SpectralError::NotEigenvalue(format!("{:?}", seq.theta)));
    }
    let norm = weighted_norm(arr, &seq.u);
    if norm.is_negligible() {
        return Err(SpectralError::DegenerateNorm);
    }
    Ok(S::from_rational(arr.vertex_count()) / norm)
}
