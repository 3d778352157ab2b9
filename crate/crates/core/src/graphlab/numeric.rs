use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use super::{DistanceMatrix, Graph};
use crate::geometric::{delsarte_eigenvalue, gamma_prefix_is_one, geometric_candidate, gram_data, gram_from_sequence};
use crate::params::IntersectionArray;
use crate::spectral::{spectrum, standard_sequence, SpectralError};

/// Absolute tolerance on Gram entries and inner products.
pub const GRAM_TOL: f64 = 1e-6;
/// Consecutive numeric eigenvalues closer than this belong to one eigenspace.
pub const CLUSTER_GAP: f64 = 1e-7;
/// Dense eigensolves stop here.
pub const MAX_NUMERIC_VERTICES: usize = 3000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericError {
    #[error("{0} vertices is beyond the dense eigensolver limit")]
    TooLarge(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("found {found} numeric eigenspaces, the array has {expected} eigenvalues")]
    ClusterCount { found: usize, expected: usize },
    #[error("numeric eigenvalue {numeric} does not match {exact}")]
    Unmatched { numeric: f64, exact: String },
    #[error("eigenvalue {theta}: eigenspace dimension {numeric}, multiplicity {exact}")]
    Dimension { theta: String, numeric: usize, exact: String },
    #[error("eigenvalue {theta}: <x^,y^> = {got} at x={x}, y={y}, expected u_{d} = {expected}")]
    Gram { theta: String, x: usize, y: usize, d: usize, got: f64, expected: f64 },
    #[error("j={j}: {what} is {got}, formula gives {expected}")]
    InnerProduct { j: usize, what: &'static str, got: f64, expected: f64 },
    #[error("j={j}: |C_j - t_j F_j| = {residual}")]
    Dependence { j: usize, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenCluster {
    pub value: f64,
    pub dimension: usize,
    /// The exact or enclosed eigenvalue it was matched to.
    pub matched: String,
}

/// `F_j`, `C_j` inner products measured in the smallest eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorIdentityCheck {
    pub j: usize,
    pub x: usize,
    pub y: usize,
    pub ff: f64,
    pub cf: f64,
    pub cc: f64,
    /// `|C_j - t_j F_j|`, measured when the exact determinant vanishes.
    pub dependence_residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralAudit {
    pub clusters: Vec<EigenCluster>,
    pub gram_pairs: usize,
    pub max_gram_error: f64,
    pub identities: Vec<VectorIdentityCheck>,
}

fn cluster(values: &[f64]) -> Vec<(usize, usize)> {
    // values are sorted ascending; returns (start, len) runs
    let mut runs = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > CLUSTER_GAP {
            runs.push((start, i - start));
            start = i;
        }
    }
    runs
}

/// Sample sources whose rows of each eigenprojection are compared with the
/// standard sequence.
fn gram_sources(n: usize) -> Vec<usize> {
    let mut s = vec![0, n / 3, n / 2, n - 1];
    s.sort_unstable();
    s.dedup();
    s
}

/// Eigendecomposes the adjacency matrix, checks eigenspace dimensions
/// against the Biggs multiplicities of `arr`, compares sampled normalized
/// Gram entries with the standard sequences, and for geometric arrays
/// measures the `F_j`, `C_j` inner products at the smallest eigenvalue.
pub fn empirical_spectrum_and_gram(
    g: &Graph,
    dist: &DistanceMatrix,
    arr: &IntersectionArray,
) -> Result<SpectralAudit, NumericError> {
    let n = g.n();
    if n > MAX_NUMERIC_VERTICES {
        return Err(NumericError::TooLarge(n));
    }
    let adj = DMatrix::from_fn(n, n, |x, y| if g.has_edge(x, y) { 1.0 } else { 0.0 });
    let eig: SymmetricEigen<f64, nalgebra::Dyn> = SymmetricEigen::new(adj);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let sorted: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let runs = cluster(&sorted);

    let exact = spectrum(arr)?;
    if runs.len() != exact.len() {
        return Err(NumericError::ClusterCount {
            found: runs.len(),
            expected: exact.len(),
        });
    }

    let mut clusters = Vec::new();
    let mut gram_pairs = 0;
    let mut max_gram_error = 0f64;
    let mut bases: Vec<DMatrix<f64>> = Vec::new();
    // ascending numeric runs against the descending exact spectrum
    for (&(start, len), entry) in runs.iter().zip(exact.entries.iter().rev()) {
        let value = sorted[start..start + len].iter().sum::<f64>() / len as f64;
        if (value - entry.value.approx()).abs() > GRAM_TOL {
            return Err(NumericError::Unmatched {
                numeric: value,
                exact: entry.value.to_string(),
            });
        }
        let mult = entry.multiplicity.as_integer().and_then(|m| m.to_usize());
        if mult != Some(len) {
            return Err(NumericError::Dimension {
                theta: entry.value.to_string(),
                numeric: len,
                exact: entry.multiplicity.to_string(),
            });
        }
        let cols: Vec<DVector<f64>> = order[start..start + len].iter().map(|&c| eig.eigenvectors.column(c).into_owned()).collect();
        let basis = DMatrix::from_columns(&cols);

        let theta = entry.value.exact().map_or(value, |q| q.to_f64().unwrap_or(value));
        let u = standard_sequence(arr, theta).u;
        let scale = n as f64 / len as f64;
        for x in gram_sources(n) {
            let rx = basis.row(x);
            for y in 0..n {
                let got = scale * rx.dot(&basis.row(y));
                let d = dist.get(x, y);
                let err = (got - u[d]).abs();
                gram_pairs += 1;
                max_gram_error = max_gram_error.max(err);
                if err > GRAM_TOL {
                    return Err(NumericError::Gram {
                        theta: entry.value.to_string(),
                        x,
                        y,
                        d,
                        got,
                        expected: u[d],
                    });
                }
            }
        }
        clusters.push(EigenCluster {
            value,
            dimension: len,
            matched: entry.value.to_string(),
        });
        bases.push(basis);
    }

    let mut identities = Vec::new();
    if geometric_candidate(arr).is_ok() {
        // the smallest eigenvalue is the first ascending run
        identities = vector_identities(dist, arr, &bases[0], n)?;
    }
    clusters.reverse();
    Ok(SpectralAudit {
        clusters,
        gram_pairs,
        max_gram_error,
        identities,
    })
}

fn vector_identities(
    dist: &DistanceMatrix,
    arr: &IntersectionArray,
    basis: &DMatrix<f64>,
    n: usize,
) -> Result<Vec<VectorIdentityCheck>, NumericError> {
    let d = arr.diameter();
    let m = basis.ncols();
    let scale = (n as f64 / m as f64).sqrt();
    let hat = |v: usize| -> DVector<f64> { basis.row(v).transpose() * scale };
    let theta = delsarte_eigenvalue(arr).to_f64().unwrap_or(f64::NAN);
    let u = standard_sequence(arr, theta).u;
    let c: Vec<i64> = (0..=d).map(|i| arr.c(i)).collect();
    let mut out = Vec::new();
    for j in 2..=d.min(4) {
        let x = 0;
        let y = dist.layer(x, j)[0];
        let f = hat(x) - hat(y);
        let mut cvec = DVector::<f64>::zeros(m);
        for z in dist.between(x, y, 1, j - 1) {
            cvec += hat(z);
        }
        for w in dist.between(x, y, j - 1, 1) {
            cvec -= hat(w);
        }
        let (ff, cf, cc) = (f.dot(&f), cvec.dot(&f), cvec.dot(&cvec));
        let formula = gram_from_sequence(&c, &u, j, gamma_prefix_is_one(arr, j));
        for (what, got, expected) in [("<F,F>", ff, Some(formula.ff)), ("<C,F>", cf, Some(formula.cf)), ("<C,C>", cc, formula.cc)] {
            if let Some(e) = expected {
                if (got - e).abs() > GRAM_TOL {
                    return Err(NumericError::InnerProduct { j, what, got, expected: e });
                }
            }
        }
        let exact_s = gram_data(arr, j).ok().and_then(|g| g.s);
        let dependence_residual = match exact_s {
            Some(s) if s.is_zero() => {
                let t = cf / ff;
                let r = (&cvec - &f * t).norm();
                if r > GRAM_TOL {
                    return Err(NumericError::Dependence { j, residual: r });
                }
                Some(r)
            }
            _ => None,
        };
        out.push(VectorIdentityCheck {
            j,
            x,
            y,
            ff,
            cf,
            cc,
            dependence_residual,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::{build, certify_drg, GraphSpec};

    #[test]
    fn triangle() {
        let g = build(&GraphSpec::Hamming { d: 1, q: 3 }).unwrap();
        let cert = certify_drg(&g).unwrap();
        let audit = empirical_spectrum_and_gram(&g, &cert.distances, &cert.array).unwrap();
        let dims: Vec<usize> = audit.clusters.iter().map(|c| c.dimension).collect();
        assert_eq!(dims, vec![1, 2]);
        assert!((audit.clusters[1].value + 1.0).abs() < 1e-9);
    }

    #[test]
    fn hamming_33() {
        let g = build(&GraphSpec::Hamming { d: 3, q: 3 }).unwrap();
        let cert = certify_drg(&g).unwrap();
        let audit = empirical_spectrum_and_gram(&g, &cert.distances, &cert.array).unwrap();
        let got: Vec<(i64, usize)> = audit.clusters.iter().map(|c| (c.value.round() as i64, c.dimension)).collect();
        assert_eq!(got, vec![(6, 1), (3, 6), (0, 12), (-3, 8)]);
    }

    #[test]
    fn cluster_runs() {
        assert_eq!(cluster(&[-1.0, -1.0 + 1e-9, 2.0]), vec![(0, 2), (2, 1)]);
    }
}
