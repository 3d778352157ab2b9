use serde::Serialize;

use super::{certify_drg, DistanceMatrix, Graph};
use crate::params::IntersectionArray;

#[derive(Debug, Clone, Serialize)]
pub struct Closure {
    /// Members in order of discovery, starting with `x`, `y`.
    pub vertices: Vec<usize>,
    /// Array of the induced subgraph when it is distance-regular.
    #[serde(skip)]
    pub certified: Option<IntersectionArray>,
}

/// Smallest vertex set containing `x` and `y` that contains every `z` with
/// `d(a,z) + d(z,b) <= d(a,b) + 1` for each pair `a, b` already in it.
pub fn strongly_closed_closure(g: &Graph, dist: &DistanceMatrix, x: usize, y: usize) -> Closure {
    let n = g.n();
    let mut member = vec![false; n];
    let mut vertices = vec![x];
    member[x] = true;
    if !member[y] {
        member[y] = true;
        vertices.push(y);
    }
    let mut p = 1;
    while p < vertices.len() {
        let a = vertices[p];
        for q in 0..p {
            let b = vertices[q];
            let limit = dist.get(a, b) + 1;
            let (ra, rb) = (dist.row(a), dist.row(b));
            for z in 0..n {
                if !member[z] && (ra[z] + rb[z]) as usize <= limit {
                    member[z] = true;
                    vertices.push(z);
                }
            }
        }
        p += 1;
    }
    let mut sorted = vertices.clone();
    sorted.sort_unstable();
    let certified = certify_drg(&g.induced(&sorted)).ok().map(|c| c.array);
    Closure { vertices, certified }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphlab::{build, GraphSpec};
    use crate::params::complete_array;

    #[test]
    fn gq22_closures() {
        let g = build(&GraphSpec::SymplecticDualPolar { d: 2 }).unwrap();
        let dist = certify_drg(&g).unwrap().distances;
        let y = g.neighbors(0)[0] as usize;
        let c = strongly_closed_closure(&g, &dist, 0, y);
        assert_eq!(c.vertices.len(), 3);
        assert_eq!(c.certified, Some(complete_array(&[2], &[1]).unwrap()));
        let far = (0..g.n()).find(|&z| dist.get(0, z) == 2).unwrap();
        assert_eq!(strongly_closed_closure(&g, &dist, 0, far).vertices.len(), 15);
    }
}
