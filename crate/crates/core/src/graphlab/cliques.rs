use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::{DistanceMatrix, Graph};
use crate::geometric::{geometric_candidate, NotGeometric};
use crate::params::IntersectionArray;
use crate::scalar::{int, Scalar};
use crate::spectral::standard_sequence;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliqueAuditError {
    #[error(transparent)]
    NotGeometric(#[from] NotGeometric),
    #[error("found {found} cliques of size {size}, expected {expected}")]
    Count { size: usize, found: usize, expected: usize },
    #[error("edge ({x}, {y}) lies in {count} cliques")]
    EdgeCover { x: usize, y: usize, count: usize },
    #[error("clique {clique} has covering radius {radius}, expected {expected}")]
    CoveringRadius { clique: usize, radius: usize, expected: usize },
    #[error("distance partition of clique {clique} is not equitable at vertex {vertex} (distance {distance})")]
    NotEquitable { clique: usize, vertex: usize, distance: usize },
    #[error("vertex {vertex} at distance {distance} from clique {clique} sees {count} clique vertices at that distance, expected {expected}")]
    GammaNotConstant { clique: usize, vertex: usize, distance: usize, count: usize, expected: usize },
    #[error("empirical gamma {empirical:?} differs from the parameter-level {predicted:?}")]
    GammaMismatch { empirical: Vec<i64>, predicted: Vec<i64> },
    #[error("gamma_{i} u_{i} + (a_1 + 2 - gamma_{i}) u_{next} != 0", next = .i + 1)]
    Identity { i: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliqueAudit {
    pub clique_size: usize,
    pub clique_count: usize,
    pub covering_radius: usize,
    /// `gamma_i` for `i = 0..covering_radius`.
    pub gamma: Vec<i64>,
    /// Per distance `i` from a clique: neighbours at distance `i-1`, `i`, `i+1`.
    pub quotient: Vec<[usize; 3]>,
}

/// All cliques of exactly `size` vertices, each listed once in increasing
/// vertex order.
pub fn enumerate_cliques(g: &Graph, size: usize) -> Vec<Vec<usize>> {
    fn extend(g: &Graph, clique: &mut Vec<usize>, cands: &[usize], size: usize, out: &mut Vec<Vec<usize>>) {
        if clique.len() == size {
            out.push(clique.clone());
            return;
        }
        for (idx, &v) in cands.iter().enumerate() {
            let next: Vec<usize> = cands[idx + 1..].iter().copied().filter(|&w| g.has_edge(v, w)).collect();
            if clique.len() + 1 + next.len() < size {
                continue;
            }
            clique.push(v);
            extend(g, clique, &next, size, out);
            clique.pop();
        }
    }
    if size == 0 {
        return vec![Vec::new()];
    }
    (0..g.n())
        .into_par_iter()
        .map(|v| {
            let cands: Vec<usize> = g.neighbors(v).iter().map(|&w| w as usize).filter(|&w| w > v).collect();
            let mut out = Vec::new();
            extend(g, &mut vec![v], &cands, size, &mut out);
            out
        })
        .flatten()
        .collect()
}

struct CliqueData {
    radius: usize,
    gamma: Vec<i64>,
    quotient: Vec<[usize; 3]>,
}

fn audit_one(g: &Graph, dist: &DistanceMatrix, idx: usize, clique: &[usize]) -> Result<CliqueData, CliqueAuditError> {
    let n = g.n();
    let to_clique: Vec<usize> = (0..n).map(|x| clique.iter().map(|&c| dist.get(x, c)).min().unwrap()).collect();
    let radius = to_clique.iter().copied().max().unwrap_or(0);
    let mut gamma: Vec<Option<i64>> = vec![None; radius + 1];
    let mut quotient: Vec<Option<[usize; 3]>> = vec![None; radius + 1];
    for x in 0..n {
        let i = to_clique[x];
        let near = clique.iter().filter(|&&c| dist.get(x, c) == i).count() as i64;
        match gamma[i] {
            None => gamma[i] = Some(near),
            Some(e) if e != near => {
                return Err(CliqueAuditError::GammaNotConstant {
                    clique: idx,
                    vertex: x,
                    distance: i,
                    count: near as usize,
                    expected: e as usize,
                })
            }
            _ => {}
        }
        let mut row = [0usize; 3];
        for &z in g.neighbors(x) {
            row[to_clique[z as usize] + 1 - i] += 1;
        }
        match quotient[i] {
            None => quotient[i] = Some(row),
            Some(e) if e != row => {
                return Err(CliqueAuditError::NotEquitable {
                    clique: idx,
                    vertex: x,
                    distance: i,
                })
            }
            _ => {}
        }
    }
    Ok(CliqueData {
        radius,
        gamma: gamma.into_iter().map(|g| g.expect("every distance occurs")).collect(),
        quotient: quotient.into_iter().map(|q| q.expect("every distance occurs")).collect(),
    })
}

/// Enumerates the `(a_1+2)`-cliques, checks they partition the edges and
/// that each is a completely regular code of covering radius `D-1`, then
/// compares the empirical `gamma_i` with the parameter-level prediction and
/// checks `gamma_i u_i + (a_1+2-gamma_i) u_{i+1} = 0` at the smallest
/// eigenvalue.
pub fn delsarte_clique_audit(
    g: &Graph,
    dist: &DistanceMatrix,
    arr: &IntersectionArray,
) -> Result<CliqueAudit, CliqueAuditError> {
    let profile = geometric_candidate(arr)?;
    let size = (profile.a1 + 2) as usize;
    let d = arr.diameter();
    let cliques = enumerate_cliques(g, size);
    let k = arr.valency() as usize;
    let expected = g.n() * k / (size * (size - 1));
    if cliques.len() != expected {
        return Err(CliqueAuditError::Count {
            size,
            found: cliques.len(),
            expected,
        });
    }
    let mut cover = vec![0u32; g.n() * g.n()];
    for c in &cliques {
        for (a, &x) in c.iter().enumerate() {
            for &y in &c[a + 1..] {
                cover[x * g.n() + y] += 1;
            }
        }
    }
    if let Some((x, y)) = g.edges().find(|&(x, y)| cover[x * g.n() + y] != 1) {
        return Err(CliqueAuditError::EdgeCover {
            x,
            y,
            count: cover[x * g.n() + y] as usize,
        });
    }

    let results: Vec<Result<CliqueData, CliqueAuditError>> = cliques
        .par_iter()
        .enumerate()
        .map(|(idx, c)| audit_one(g, dist, idx, c))
        .collect();
    let mut first: Option<CliqueData> = None;
    for (idx, r) in results.into_iter().enumerate() {
        let data = r?;
        if data.radius != d - 1 {
            return Err(CliqueAuditError::CoveringRadius {
                clique: idx,
                radius: data.radius,
                expected: d - 1,
            });
        }
        match &first {
            None => first = Some(data),
            Some(f) if f.gamma != data.gamma || f.quotient != data.quotient => {
                return Err(CliqueAuditError::NotEquitable {
                    clique: idx,
                    vertex: cliques[idx][0],
                    distance: 0,
                })
            }
            _ => {}
        }
    }
    let data = first.expect("at least one clique");

    if data.gamma != profile.gamma {
        return Err(CliqueAuditError::GammaMismatch {
            empirical: data.gamma,
            predicted: profile.gamma,
        });
    }
    let u = standard_sequence(arr, profile.theta_min.clone()).u;
    for (i, &gi) in data.gamma.iter().enumerate() {
        let lhs = int(gi) * &u[i] + int(size as i64 - gi) * &u[i + 1];
        if !lhs.is_negligible() {
            return Err(CliqueAuditError::Identity { i });
        }
    }
    Ok(CliqueAudit {
        clique_size: size,
        clique_count: cliques.len(),
        covering_radius: data.radius,
        gamma: data.gamma,
        quotient: data.quotient,
    })
}
