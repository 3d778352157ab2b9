//! Exact parameter analysis for distance-regular graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`]: intersection arrays and basic feasibility,
//! * [`spectral`]: eigenvalues, standard sequences, multiplicities,
//! * [`geometric`]: the clique-geometry invariants and the dual polar
//!   classifiers built on them,
//! * [`families`]: intersection arrays of the classical families,
//! * [`graphlab`]: explicit small graphs used as a brute-force oracle,
//! * [`search`]: the case-exhaustive feasibility search for valency-halving
//!   smallest eigenvalue with `a_1 = 1`, `c_2 = 3`.
//!
//! Sequence-level formulas are generic over [`Scalar`]; the aliases below
//! name the two instantiations used throughout.

pub mod families;
pub mod geometric;
pub mod graphlab;
pub mod params;
pub mod scalar;
pub mod search;
pub mod spectral;

pub use num_rational::BigRational;
pub use params::{basic_feasibility, complete_array, IntersectionArray, Verdict};
pub use scalar::Scalar;

/// Exact rational scalar.
pub type Rational = BigRational;

pub type ExactSequence = spectral::StandardSequence<Rational>;
pub type FloatSequence = spectral::StandardSequence<f64>;
pub type ExactGram = geometric::GramData<Rational>;
pub type FloatGram = geometric::GramData<f64>;
