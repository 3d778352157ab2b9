//! Parameter-level results against explicit graphs and independent numerics.

use drgkit::families::{family_array, FamilySpec};
use drgkit::graphlab::{build, certify_drg, strongly_closed_closure, CertifyError, GraphSpec};
use drgkit::scalar::rational_to_f64;
use drgkit::spectral::{multiplicity, spectrum, EigenValue, Multiplicity};
use drgkit::{complete_array, IntersectionArray};
use nalgebra::{DMatrix, SymmetricEigen};

#[test]
fn constructed_graphs_have_family_arrays() {
    let specs = [
        GraphSpec::Hamming { d: 2, q: 5 },
        GraphSpec::Hamming { d: 4, q: 4 },
        GraphSpec::Johnson { n: 7, d: 3 },
        GraphSpec::Johnson { n: 9, d: 4 },
        GraphSpec::Odd { k: 3 },
        GraphSpec::Odd { k: 5 },
        GraphSpec::FoldedCube { m: 7 },
        GraphSpec::FoldedCube { m: 9 },
        GraphSpec::SymplecticDualPolar { d: 1 },
        GraphSpec::SymplecticDualPolar { d: 2 },
    ];
    for spec in specs {
        let g = build(&spec).unwrap();
        let cert = certify_drg(&g).unwrap_or_else(|e| panic!("{spec}: {e}"));
        assert_eq!(cert.array, family_array(&spec.family()).unwrap(), "{spec}");
        assert_eq!(cert.profile.layer_sizes.iter().sum::<usize>(), g.n());
    }
}

#[test]
fn removing_an_edge_is_detected() {
    let g = build(&GraphSpec::SymplecticDualPolar { d: 2 }).unwrap();
    let (x, y) = g.edges().next().unwrap();
    let broken = g.without_edge(x, y);
    assert!(matches!(certify_drg(&broken), Err(CertifyError::Witness(_))));

    let path = drgkit::graphlab::Graph::from_edges(vec!["a".into(), "b".into(), "c".into()], &[(0, 1), (1, 2)]);
    assert!(certify_drg(&path).is_err());
}

#[test]
fn closure_towers() {
    let towers = [
        (3, vec![(1, 3, "{2;1}"), (2, 15, "{6,4;1,3}"), (3, 135, "{14,12,8;1,3,7}")]),
        (
            4,
            vec![
                (1, 3, "{2;1}"),
                (2, 15, "{6,4;1,3}"),
                (3, 135, "{14,12,8;1,3,7}"),
                (4, 2295, "{30,28,24,16;1,3,7,15}"),
            ],
        ),
    ];
    for (d, levels) in towers {
        let g = build(&GraphSpec::SymplecticDualPolar { d }).unwrap();
        let dist = certify_drg(&g).unwrap().distances;
        for (i, size, array) in levels {
            // the first few vertices at distance i from 0
            for &y in dist.layer(0, i).iter().take(if d == 3 { 20 } else { 2 }) {
                let c = strongly_closed_closure(&g, &dist, 0, y);
                assert_eq!(c.vertices.len(), size, "d={d} i={i} y={y}");
                assert_eq!(c.certified.map(|a| a.canonical()).as_deref(), Some(array), "d={d} i={i}");
            }
        }
    }
}

/// Eigenvalues of the intersection matrix from its symmetrisation, which has
/// off-diagonal entries `sqrt(b_i c_(i+1))`.
fn float_eigenvalues(arr: &IntersectionArray) -> Vec<f64> {
    let n = arr.diameter() + 1;
    let m = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            arr.a(i) as f64
        } else if j == i + 1 {
            ((arr.b(i) * arr.c(j)) as f64).sqrt()
        } else if i == j + 1 {
            ((arr.b(j) * arr.c(i)) as f64).sqrt()
        } else {
            0.0
        }
    });
    let mut values: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

#[test]
fn enclosures_contain_float_eigenvalues() {
    let arrays = [
        complete_array(&[30, 28, 24], &[1, 3, 14]).unwrap(),
        complete_array(&[2, 1], &[1, 1]).unwrap(),
        complete_array(&[2, 1, 1], &[1, 1, 1]).unwrap(),
        family_array(&FamilySpec::Odd { k: 4 }).unwrap(),
        family_array(&FamilySpec::Odd { k: 6 }).unwrap(),
        family_array(&FamilySpec::hermitian(3, 4)).unwrap(),
        complete_array(&[10, 6, 4], &[1, 2, 5]).unwrap(),
    ];
    let mut enclosed = 0;
    for arr in arrays {
        let spec = spectrum(&arr).unwrap();
        let floats = float_eigenvalues(&arr);
        assert_eq!(spec.len(), floats.len(), "{arr}");
        for (entry, &x) in spec.entries.iter().zip(&floats) {
            match &entry.value {
                EigenValue::Exact(q) => assert!((rational_to_f64(q) - x).abs() < 1e-9, "{arr}: {q} vs {x}"),
                EigenValue::Enclosed(iv) => {
                    enclosed += 1;
                    assert!(rational_to_f64(&iv.lo) - 1e-12 < x && x < rational_to_f64(&iv.hi) + 1e-12, "{arr}: {iv} vs {x}");
                }
            }
            let m = multiplicity(&arr, x).unwrap();
            match &entry.multiplicity {
                Multiplicity::Exact(q) => assert!((rational_to_f64(q) - m).abs() < 1e-6 * m.abs().max(1.0), "{arr}"),
                Multiplicity::Enclosed(iv) => {
                    let (lo, hi) = (rational_to_f64(&iv.lo), rational_to_f64(&iv.hi));
                    let slack = 1e-6 * m.abs().max(1.0);
                    assert!(lo - slack <= m && m <= hi + slack, "{arr}: m = {m} vs [{lo}, {hi}]");
                }
            }
        }
    }
    assert!(enclosed >= 8, "{enclosed}");
}

#[test]
fn pentagon_multiplicities() {
    let arr = complete_array(&[2, 1], &[1, 1]).unwrap();
    let spec = spectrum(&arr).unwrap();
    let ints: Vec<_> = spec.entries.iter().map(|e| e.multiplicity.as_integer().map(|m| m.to_string())).collect();
    assert_eq!(ints, vec![Some("1".into()), Some("2".into()), Some("2".into())]);
    assert_eq!(spec.multiplicity_total().map(|t| t.to_string()).as_deref(), Some("5"));
}
