use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Graph, GraphError};
use crate::families::FamilySpec;

pub const MAX_VERTICES: usize = 5000;

/// Constructible families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GraphSpec {
    Hamming { d: usize, q: usize },
    Johnson { n: usize, d: usize },
    /// `(k-1)`-subsets of a `(2k-1)`-set, adjacent when disjoint.
    Odd { k: usize },
    /// Folded `m`-cube, `m` odd.
    FoldedCube { m: usize },
    /// Maximal totally isotropic subspaces of the symplectic form on
    /// `GF(2)^(2d)`, adjacent when they meet in dimension `d-1`.
    SymplecticDualPolar { d: usize },
}

impl GraphSpec {
    /// The family whose array this graph should have.
    pub fn family(&self) -> FamilySpec {
        match *self {
            GraphSpec::Hamming { d, q } => FamilySpec::Hamming { d, q: q as i64 },
            GraphSpec::Johnson { n, d } => FamilySpec::Johnson { n: n as i64, d },
            GraphSpec::Odd { k } => FamilySpec::Odd { k: k as i64 },
            GraphSpec::FoldedCube { m } => FamilySpec::FoldedCube { m: m as i64 },
            GraphSpec::SymplecticDualPolar { d } => FamilySpec::symplectic(2, d),
        }
    }

    pub fn vertex_count(&self) -> u128 {
        match *self {
            GraphSpec::Hamming { d, q } => (q as u128).saturating_pow(d as u32),
            GraphSpec::Johnson { n, d } => binomial(n, d),
            GraphSpec::Odd { k } => binomial((2 * k).saturating_sub(1), k.saturating_sub(1)),
            GraphSpec::FoldedCube { m } => 1u128 << (m.saturating_sub(1)).min(127),
            GraphSpec::SymplecticDualPolar { d } => (1..=d).map(|i| (1u128 << i) + 1).product(),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GraphSpec::Hamming { d, q } => write!(f, "hamming({d},{q})"),
            GraphSpec::Johnson { n, d } => write!(f, "johnson({n},{d})"),
            GraphSpec::Odd { k } => write!(f, "odd({k})"),
            GraphSpec::FoldedCube { m } => write!(f, "folded_cube({m})"),
            GraphSpec::SymplecticDualPolar { d } => write!(f, "symplectic_dual_polar({d})"),
        }
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

pub fn build(spec: &GraphSpec) -> Result<Graph, GraphError> {
    validate(spec)?;
    let n = spec.vertex_count();
    if n > MAX_VERTICES as u128 {
        return Err(GraphError::TooLarge {
            family: spec.to_string(),
            n,
            limit: MAX_VERTICES,
        });
    }
    Ok(match *spec {
        GraphSpec::Hamming { d, q } => hamming(d, q),
        GraphSpec::Johnson { n, d } => subset_graph(n, d, d as u32 - 1),
        GraphSpec::Odd { k } => subset_graph(2 * k - 1, k - 1, 0),
        GraphSpec::FoldedCube { m } => folded_cube(m),
        GraphSpec::SymplecticDualPolar { d } => symplectic_dual_polar(d),
    })
}

fn validate(spec: &GraphSpec) -> Result<(), GraphError> {
    let bad = |msg: &str| Err(GraphError::Invalid(format!("{spec}: {msg}")));
    match *spec {
        GraphSpec::Hamming { d, q } if d == 0 || q < 2 => bad("needs d >= 1, q >= 2"),
        GraphSpec::Johnson { n, d } if d == 0 || n < 2 * d || n > 64 => bad("needs 1 <= d <= n/2, n <= 64"),
        GraphSpec::Odd { k } if !(2..=32).contains(&k) => bad("needs 2 <= k <= 32"),
        GraphSpec::FoldedCube { m } if m < 3 || m % 2 == 0 || m > 64 => bad("needs odd m >= 3"),
        GraphSpec::SymplecticDualPolar { d } if !(1..=4).contains(&d) => bad("limited to 1 <= d <= 4"),
        _ => Ok(()),
    }
}

fn hamming(d: usize, q: usize) -> Graph {
    let n = q.pow(d as u32);
    let digits = |mut x: usize| {
        let mut v = vec![0; d];
        for slot in v.iter_mut() {
            *slot = x % q;
            x /= q;
        }
        v
    };
    let words: Vec<Vec<usize>> = (0..n).map(digits).collect();
    let labels = words
        .iter()
        .map(|w| w.iter().rev().map(|x| x.to_string()).collect::<Vec<_>>().join(""))
        .collect();
    Graph::from_adjacency(labels, |x, y| {
        words[x].iter().zip(&words[y]).filter(|(a, b)| a != b).count() == 1
    })
}

/// `d`-subsets of an `n`-set, adjacent when they share exactly `meet` points.
fn subset_graph(n: usize, d: usize, meet: u32) -> Graph {
    let mut sets = Vec::new();
    if d == 0 {
        sets.push(0u64);
    } else {
        // Gosper's hack enumerates masks in increasing order.
        let mut x: u64 = (1u64 << d) - 1;
        let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        while x <= limit {
            sets.push(x);
            let c = x & x.wrapping_neg();
            let r = x.wrapping_add(c);
            if r == 0 {
                break;
            }
            x = (((r ^ x) >> 2) / c) | r;
        }
    }
    let labels = sets
        .iter()
        .map(|&s| {
            let pts: Vec<String> = (0..n).filter(|i| s >> i & 1 == 1).map(|i| (i + 1).to_string()).collect();
            format!("{{{}}}", pts.join(","))
        })
        .collect();
    Graph::from_adjacency(labels, |x, y| (sets[x] & sets[y]).count_ones() == meet)
}

fn folded_cube(m: usize) -> Graph {
    // x and its complement are identified by fixing the top coordinate to 0
    let n = 1usize << (m - 1);
    let mask = n - 1;
    let labels = (0..n).map(|x| format!("{x:0m$b}")).collect();
    Graph::from_adjacency(labels, |x, y| {
        let diff = x ^ y;
        diff.count_ones() == 1 || diff == mask
    })
}

fn symplectic_form(d: usize, x: u32, y: u32) -> u32 {
    let lo = (1u32 << d) - 1;
    (((x & lo) & (y >> d)) ^ ((x >> d) & (y & lo))).count_ones() & 1
}

fn rref(mut rows: Vec<u32>) -> Vec<u32> {
    let mut out = Vec::with_capacity(rows.len());
    for bit in (0..32u32).rev() {
        let Some(p) = rows.iter().position(|r| r >> bit & 1 == 1) else {
            continue;
        };
        let pivot = rows.swap_remove(p);
        for r in rows.iter_mut() {
            if *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        for r in out.iter_mut() {
            if *r >> bit & 1 == 1 {
                *r ^= pivot;
            }
        }
        out.push(pivot);
    }
    out
}

fn span(basis: &[u32]) -> Vec<u32> {
    let mut elems = vec![0u32];
    for &b in basis {
        let more: Vec<u32> = elems.iter().map(|e| e ^ b).collect();
        elems.extend(more);
    }
    elems
}

/// Reduced echelon bases of the maximal totally isotropic subspaces of
/// `GF(2)^(2d)`, built one dimension at a time.
pub fn symplectic_subspaces(d: usize) -> Vec<Vec<u32>> {
    let total = 1u32 << (2 * d);
    let mut level: BTreeSet<Vec<u32>> = BTreeSet::from([Vec::new()]);
    for _ in 0..d {
        let list: Vec<Vec<u32>> = level.into_iter().collect();
        level = list
            .par_iter()
            .map(|basis| {
                let members: BTreeSet<u32> = span(basis).into_iter().collect();
                let mut found = BTreeSet::new();
                for v in 1..total {
                    if !members.contains(&v) && basis.iter().all(|&b| symplectic_form(d, v, b) == 0) {
                        let mut ext = basis.clone();
                        ext.push(v);
                        found.insert(rref(ext));
                    }
                }
                found
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });
    }
    level.into_iter().collect()
}

fn symplectic_dual_polar(d: usize) -> Graph {
    let subspaces = symplectic_subspaces(d);
    let bits = 2 * d;
    let sets: Vec<[u64; 4]> = subspaces
        .iter()
        .map(|basis| {
            let mut s = [0u64; 4];
            for e in span(basis) {
                s[(e / 64) as usize] |= 1 << (e % 64);
            }
            s
        })
        .collect();
    let meet = 1u32 << (d - 1);
    let labels = subspaces
        .iter()
        .map(|basis| basis.iter().map(|v| format!("{v:0bits$b}")).collect::<Vec<_>>().join(","))
        .collect();
    Graph::from_adjacency(labels, |x, y| {
        sets[x].iter().zip(&sets[y]).map(|(a, b)| (a & b).count_ones()).sum::<u32>() == meet
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_and_degrees() {
        let cases = [
            (GraphSpec::SymplecticDualPolar { d: 1 }, 3, 2),
            (GraphSpec::SymplecticDualPolar { d: 2 }, 15, 6),
            (GraphSpec::SymplecticDualPolar { d: 3 }, 135, 14),
            (GraphSpec::Hamming { d: 3, q: 3 }, 27, 6),
            (GraphSpec::Odd { k: 4 }, 35, 4),
            (GraphSpec::FoldedCube { m: 5 }, 16, 5),
            (GraphSpec::Johnson { n: 6, d: 3 }, 20, 9),
        ];
        for (spec, n, k) in cases {
            let g = build(&spec).unwrap();
            assert_eq!(g.n(), n, "{spec}");
            assert_eq!(spec.vertex_count(), n as u128);
            assert_eq!(g.regular_degree(), Some(k), "{spec}");
        }
    }

    #[test]
    fn limits() {
        assert!(matches!(
            build(&GraphSpec::SymplecticDualPolar { d: 5 }),
            Err(GraphError::Invalid(_))
        ));
        assert!(matches!(
            build(&GraphSpec::Hamming { d: 8, q: 4 }),
            Err(GraphError::TooLarge { .. })
        ));
    }

    #[test]
    fn rref_is_canonical() {
        assert_eq!(rref(vec![0b11, 0b01]), rref(vec![0b10, 0b01]));
        assert_eq!(rref(vec![0b110, 0b011]), vec![0b101, 0b011]);
    }

    #[test]
    fn subspaces_are_isotropic() {
        for basis in symplectic_subspaces(3) {
            assert_eq!(basis.len(), 3);
            for &a in &basis {
                for &b in &basis {
                    assert_eq!(symplectic_form(3, a, b), 0);
                }
            }
        }
    }
}
