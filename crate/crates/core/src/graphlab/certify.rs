use std::collections::VecDeque;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::Graph;
use crate::params::{complete_array, ArrayError, IntersectionArray};
use crate::scalar::int;

const UNREACHED: u8 = u8::MAX;

/// All-pairs distances, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u8>,
}

impl DistanceMatrix {
    pub fn get(&self, x: usize, y: usize) -> usize {
        self.dist[x * self.n + y] as usize
    }

    pub fn row(&self, x: usize) -> &[u8] {
        &self.dist[x * self.n..(x + 1) * self.n]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn diameter(&self) -> usize {
        self.dist.iter().copied().max().unwrap_or(0) as usize
    }

    /// `Gamma_i(x)`.
    pub fn layer(&self, x: usize, i: usize) -> Vec<usize> {
        self.row(x).iter().enumerate().filter(|(_, &d)| d as usize == i).map(|(y, _)| y).collect()
    }

    /// `Gamma^i_j(x, y)`: vertices at distance `i` from `x` and `j` from `y`.
    pub fn between(&self, x: usize, y: usize, i: usize, j: usize) -> Vec<usize> {
        let (rx, ry) = (self.row(x), self.row(y));
        (0..self.n).filter(|&z| rx[z] as usize == i && ry[z] as usize == j).collect()
    }
}

fn bfs(g: &Graph, source: usize, out: &mut [u8]) {
    out.fill(UNREACHED);
    out[source] = 0;
    let mut queue = VecDeque::from([source]);
    while let Some(v) = queue.pop_front() {
        let next = out[v] + 1;
        for &w in g.neighbors(v) {
            let w = w as usize;
            if out[w] == UNREACHED {
                out[w] = next;
                queue.push_back(w);
            }
        }
    }
}

pub fn distance_matrix(g: &Graph) -> Result<DistanceMatrix, CertifyError> {
    let n = g.n();
    let mut dist = vec![0u8; n * n];
    if n > 0 {
        dist.par_chunks_mut(n).enumerate().for_each(|(x, row)| bfs(g, x, row));
    }
    if let Some(y) = dist.iter().take(n).position(|&d| d == UNREACHED) {
        return Err(CertifyError::Disconnected { x: 0, y });
    }
    if n > 0 && dist.iter().any(|&d| d >= UNREACHED - 1) {
        return Err(CertifyError::Invalid("diameter exceeds 253".into()));
    }
    Ok(DistanceMatrix { n, dist })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountKind {
    /// `|Gamma(y) ∩ Gamma_{i-1}(x)|`
    C,
    /// `|Gamma(y) ∩ Gamma_i(x)|`
    A,
    /// `|Gamma(y) ∩ Gamma_{i+1}(x)|`
    B,
    /// `|Gamma_i(x)|`
    Layer,
}

impl fmt::Display for CountKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CountKind::C => "c",
            CountKind::A => "a",
            CountKind::B => "b",
            CountKind::Layer => "k",
        };
        f.write_str(s)
    }
}

/// A pair whose neighbour count at distance `i` differs from the count seen
/// first (at vertex 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub x: usize,
    pub y: usize,
    pub i: usize,
    pub kind: CountKind,
    pub count: usize,
    pub expected: usize,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "x={} y={} d={}: {}_{} count {} (expected {})",
            self.x, self.y, self.i, self.kind, self.i, self.count, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("graph is empty")]
    Empty,
    #[error("vertex {y} is unreachable from {x}")]
    Disconnected { x: usize, y: usize },
    #[error("not distance-regular: {0}")]
    Witness(Witness),
    #[error("inconsistent counts: {0}")]
    Invalid(String),
    #[error(transparent)]
    Array(#[from] ArrayError),
}

/// Empirical counting data behind a certified array.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DistanceProfile {
    pub diameter: usize,
    /// `|Gamma_i(x)|`, the same for every `x`.
    pub layer_sizes: Vec<usize>,
    /// `p[h][i][j] = |Gamma_i(x) ∩ Gamma_j(y)|` for `d(x, y) = h`.
    pub p: Vec<Vec<Vec<usize>>>,
    /// Sources `x` over which the `p` tables were tabulated for every `y`.
    pub p_sources: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Certified {
    pub array: IntersectionArray,
    pub profile: DistanceProfile,
    pub distances: DistanceMatrix,
}

/// Every vertex is used as a `p` source up to this many vertices.
const P_ALL_SOURCES: usize = 400;
const P_SAMPLED_SOURCES: usize = 16;

/// Runs BFS from every vertex and checks that `c_i`, `a_i`, `b_i` are the
/// same for every pair; tabulates `p^h_{ij}`.
pub fn certify_drg(g: &Graph) -> Result<Certified, CertifyError> {
    let n = g.n();
    if n == 0 {
        return Err(CertifyError::Empty);
    }
    let dist = distance_matrix(g)?;
    let counts = |x: usize, y: usize| {
        let i = dist.get(x, y);
        let rx = dist.row(x);
        let mut c = [0usize; 3];
        for &z in g.neighbors(y) {
            let dz = rx[z as usize] as usize;
            c[dz + 1 - i] += 1;
        }
        c
    };

    let d0 = dist.row(0).iter().copied().max().unwrap_or(0) as usize;
    // reference counts from vertex 0
    let mut reference = vec![[0usize; 3]; d0 + 1];
    let mut layers = vec![0usize; d0 + 1];
    for y in 0..n {
        layers[dist.get(0, y)] += 1;
    }
    for (i, slot) in reference.iter_mut().enumerate() {
        let y = (0..n).find(|&y| dist.get(0, y) == i).expect("layer is non-empty");
        *slot = counts(0, y);
    }

    let witness = (0..n).into_par_iter().find_map_first(|x| {
        let mut sizes = vec![0usize; d0 + 1];
        for y in 0..n {
            let i = dist.get(x, y);
            if i > d0 {
                return Some(Witness {
                    x,
                    y,
                    i,
                    kind: CountKind::Layer,
                    count: 1,
                    expected: 0,
                });
            }
            sizes[i] += 1;
            let got = counts(x, y);
            for (slot, kind) in [CountKind::C, CountKind::A, CountKind::B].into_iter().enumerate() {
                if got[slot] != reference[i][slot] {
                    return Some(Witness {
                        x,
                        y,
                        i,
                        kind,
                        count: got[slot],
                        expected: reference[i][slot],
                    });
                }
            }
        }
        sizes.iter().zip(&layers).enumerate().find(|(_, (a, b))| a != b).map(|(i, (&count, &expected))| Witness {
            x,
            y: x,
            i,
            kind: CountKind::Layer,
            count,
            expected,
        })
    });
    if let Some(w) = witness {
        return Err(CertifyError::Witness(w));
    }

    let b: Vec<i64> = (0..d0).map(|i| reference[i][2] as i64).collect();
    let c: Vec<i64> = (1..=d0).map(|i| reference[i][0] as i64).collect();
    let array = complete_array(&b, &c)?;
    for (i, &size) in layers.iter().enumerate() {
        if array.k_seq()[i] != int(size as i64) {
            return Err(CertifyError::Invalid(format!(
                "|Gamma_{i}| = {size} but the product formula gives {}",
                array.k_seq()[i]
            )));
        }
    }

    let p_sources: Vec<usize> = if n <= P_ALL_SOURCES {
        (0..n).collect()
    } else {
        let step = n / P_SAMPLED_SOURCES;
        (0..P_SAMPLED_SOURCES).map(|s| s * step).collect()
    };
    let p = intersection_numbers(&dist, d0, &p_sources)?;
    for h in 0..=d0 {
        for i in 0..=d0 {
            for j in 0..=d0 {
                if p[h][i][j] != p[h][j][i] {
                    return Err(CertifyError::Invalid(format!("p^{h}_{i}{j} != p^{h}_{j}{i}")));
                }
                if layers[h] * p[h][i][j] != layers[i] * p[i][h][j] {
                    return Err(CertifyError::Invalid(format!("k_{h} p^{h}_{i}{j} != k_{i} p^{i}_{h}{j}")));
                }
            }
        }
    }

    Ok(Certified {
        array,
        profile: DistanceProfile {
            diameter: d0,
            layer_sizes: layers,
            p,
            p_sources,
        },
        distances: dist,
    })
}

fn intersection_numbers(
    dist: &DistanceMatrix,
    d: usize,
    sources: &[usize],
) -> Result<Vec<Vec<Vec<usize>>>, CertifyError> {
    let n = dist.n();
    let tables: Vec<Vec<Vec<usize>>> = sources
        .par_iter()
        .map(|&x| {
            let rx = dist.row(x);
            (0..n)
                .map(|y| {
                    let ry = dist.row(y);
                    let mut t = vec![0usize; (d + 1) * (d + 1)];
                    for z in 0..n {
                        t[rx[z] as usize * (d + 1) + ry[z] as usize] += 1;
                    }
                    t
                })
                .collect()
        })
        .collect();
    let mut p: Vec<Option<Vec<usize>>> = vec![None; d + 1];
    for (s, &x) in sources.iter().enumerate() {
        for y in 0..n {
            let h = dist.get(x, y);
            let t = &tables[s][y];
            match &p[h] {
                None => p[h] = Some(t.clone()),
                Some(r) if r != t => {
                    return Err(CertifyError::Invalid(format!(
                        "p^{h}_ij differs between pairs at distance {h} (x={x}, y={y})"
                    )))
                }
                Some(_) => {}
            }
        }
    }
    Ok(p
        .into_iter()
        .map(|t| {
            let t = t.expect("every distance occurs");
            t.chunks(d + 1).map(<[usize]>::to_vec).collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::{build, GraphSpec};

    #[test]
    fn hamming_certifies() {
        let g = build(&GraphSpec::Hamming { d: 3, q: 3 }).unwrap();
        let cert = certify_drg(&g).unwrap();
        assert_eq!(cert.array, complete_array(&[6, 4, 2], &[1, 2, 3]).unwrap());
        assert_eq!(cert.profile.layer_sizes, vec![1, 6, 12, 8]);
        assert_eq!(cert.profile.p[1][1][1], 1);
    }

    #[test]
    fn deleted_edge_gives_witness() {
        let g = build(&GraphSpec::Hamming { d: 3, q: 3 }).unwrap();
        let (x, y) = g.edges().next().unwrap();
        let h = g.without_edge(x, y);
        assert!(matches!(certify_drg(&h), Err(CertifyError::Witness(_))));
    }

    #[test]
    fn disconnected() {
        let labels = (0..4).map(|i| i.to_string()).collect();
        let g = Graph::from_edges(labels, &[(0, 1), (2, 3)]);
        assert!(matches!(certify_drg(&g), Err(CertifyError::Disconnected { .. })));
    }
}
