//! Explicit small graphs and brute-force checks that parameter-level results
//! can be compared against.

mod build;
mod certify;
mod cliques;
mod closure;
mod export;
mod numeric;

pub use build::{build, symplectic_subspaces, GraphSpec, MAX_VERTICES};
pub use certify::{
    certify_drg, distance_matrix, Certified, CertifyError, CountKind, DistanceMatrix, DistanceProfile,
    Witness,
};
pub use cliques::{delsarte_clique_audit, enumerate_cliques, CliqueAudit, CliqueAuditError};
pub use closure::{strongly_closed_closure, Closure};
pub use export::{write_adjacency_list, write_edge_list};
pub use numeric::{
    empirical_spectrum_and_gram, EigenCluster, NumericError, SpectralAudit, VectorIdentityCheck,
    CLUSTER_GAP, GRAM_TOL, MAX_NUMERIC_VERTICES,
};

use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{family} would have {n} vertices, limit is {limit}")]
    TooLarge { family: String, n: u128, limit: usize },
    #[error("invalid parameters: {0}")]
    Invalid(String),
}

/// Simple undirected graph on `0..n` with packed adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    nbrs: Vec<Vec<u32>>,
    labels: Vec<String>,
}

impl Graph {
    /// Builds the graph whose edges are the pairs `x != y` with `adjacent(x, y)`.
    /// `adjacent` must be symmetric.
    pub fn from_adjacency<F>(labels: Vec<String>, adjacent: F) -> Graph
    where
        F: Fn(usize, usize) -> bool + Sync,
    {
        let n = labels.len();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        rows.par_chunks_mut(words.max(1)).enumerate().for_each(|(x, row)| {
            if x >= n {
                return;
            }
            for y in 0..n {
                if x != y && adjacent(x, y) {
                    row[y / 64] |= 1 << (y % 64);
                }
            }
        });
        Self::from_rows(labels, words, rows)
    }

    pub fn from_edges(labels: Vec<String>, edges: &[(usize, usize)]) -> Graph {
        let n = labels.len();
        let words = n.div_ceil(64);
        let mut rows = vec![0u64; n * words];
        for &(x, y) in edges {
            assert!(x < n && y < n && x != y, "bad edge ({x}, {y})");
            rows[x * words + y / 64] |= 1 << (y % 64);
            rows[y * words + x / 64] |= 1 << (x % 64);
        }
        Self::from_rows(labels, words, rows)
    }

    fn from_rows(labels: Vec<String>, words: usize, rows: Vec<u64>) -> Graph {
        let n = labels.len();
        let nbrs = (0..n)
            .into_par_iter()
            .map(|x| {
                let row = &rows[x * words..(x + 1) * words];
                (0..n).filter(|&y| row[y / 64] >> (y % 64) & 1 == 1).map(|y| y as u32).collect()
            })
            .collect();
        Graph {
            n,
            words,
            rows,
            nbrs,
            labels,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    pub fn row(&self, x: usize) -> &[u64] {
        &self.rows[x * self.words..(x + 1) * self.words]
    }

    pub fn neighbors(&self, x: usize) -> &[u32] {
        &self.nbrs[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.nbrs[x].len()
    }

    /// Common degree, if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let k = self.nbrs.first().map_or(0, Vec::len);
        self.nbrs.iter().all(|l| l.len() == k).then_some(k)
    }

    pub fn edge_count(&self) -> usize {
        self.nbrs.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(x, y)` with `x < y`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |x| {
            self.nbrs[x].iter().map(|&y| y as usize).filter(move |&y| y > x).map(move |y| (x, y))
        })
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn without_edge(&self, x: usize, y: usize) -> Graph {
        let edges: Vec<_> = self.edges().filter(|&e| e != (x.min(y), x.max(y))).collect();
        Graph::from_edges(self.labels.clone(), &edges)
    }

    /// Subgraph induced on `vertices`, relabelled `0..len` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let labels = vertices.iter().map(|&v| self.labels[v].clone()).collect();
        Graph::from_adjacency(labels, |a, b| self.has_edge(vertices[a], vertices[b]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_basics() {
        let labels: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let g = Graph::from_adjacency(labels, |x, y| (x + 1) % 5 == y || (y + 1) % 5 == x);
        assert_eq!(g.regular_degree(), Some(2));
        assert_eq!(g.edge_count(), 5);
        assert!(g.has_edge(4, 0));
        assert_eq!(g.neighbors(0), &[1, 4]);
        let h = g.without_edge(0, 4);
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.regular_degree(), None);
        let p = g.induced(&[0, 1, 2]);
        assert_eq!(p.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }
}
