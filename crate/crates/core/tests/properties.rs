use drgkit::families::{family_array, FamilySpec};
use drgkit::geometric::{
    check_gamma_identity, gamma_prefix_is_one, geometric_candidate, gram_data, gram_from_sequence, s_closed_form,
};
use drgkit::scalar::{int, powi, rat, rational_to_f64};
use drgkit::search::{case_template, Candidate, Check, Condition, Verdict, CASES, DEFAULT_ORDER};
use drgkit::spectral::{multiplicity, standard_sequence};
use drgkit::{complete_array, BigRational, IntersectionArray};
use num_traits::Zero;
use proptest::prelude::*;
use proptest::sample::select;

fn family_specs() -> Vec<FamilySpec> {
    let mut v = vec![
        FamilySpec::WittM24,
        FamilySpec::Sporadic27,
        FamilySpec::Odd { k: 5 },
        FamilySpec::FoldedCube { m: 9 },
        FamilySpec::OddPolygon { d: 4 },
        FamilySpec::Johnson { n: 10, d: 4 },
    ];
    for d in 2..=6 {
        for q in 2..=4 {
            v.push(FamilySpec::symplectic(q, d));
            v.push(FamilySpec::Hamming { d, q });
            v.push(FamilySpec::hyperbolic(q, d));
            v.push(FamilySpec::elliptic(q, d));
        }
        for r in 2..=3 {
            v.push(FamilySpec::hermitian(r, d));
            v.push(FamilySpec::hermitian_even(r, d));
        }
    }
    v
}

/// Arrays with positive entries, monotone `b` and `c`, not necessarily feasible.
fn arbitrary_array() -> impl Strategy<Value = IntersectionArray> {
    (1usize..=6, 2i64..=40).prop_flat_map(|(d, k)| {
        (
            proptest::collection::vec(1i64..=k, d - 1),
            proptest::collection::vec(1i64..=k, d - 1),
        )
            .prop_filter_map("entries do not fit", move |(mut bs, mut cs)| {
                bs.sort_unstable_by(|a, b| b.cmp(a));
                cs.sort_unstable();
                let b: Vec<i64> = std::iter::once(k).chain(bs).collect();
                let c: Vec<i64> = std::iter::once(1).chain(cs).collect();
                complete_array(&b, &c).ok()
            })
    })
}

proptest! {
    #[test]
    fn handshake_on_layers(arr in arbitrary_array()) {
        let ks = arr.k_seq();
        for i in 0..arr.diameter() {
            prop_assert_eq!(&ks[i] * int(arr.b(i)), &ks[i + 1] * int(arr.c(i + 1)));
        }
        let total = ks.iter().fold(BigRational::zero(), |acc, k| acc + k);
        prop_assert_eq!(&total, arr.vertex_count());
    }

    #[test]
    fn json_round_trip(arr in arbitrary_array()) {
        let text = serde_json::to_string(&arr).unwrap();
        let back: IntersectionArray = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &arr);
        let json = serde_json::to_string(&arr.to_json()).unwrap();
        prop_assert_eq!(serde_json::from_str::<IntersectionArray>(&json).unwrap(), arr);
    }

    #[test]
    fn closed_form_matches_gram(a1 in 1i64..=6, c2 in 1i64..=40, c3 in 1i64..=200, c4 in 1i64..=400) {
        let x = rat(-1, a1 + 1);
        let u: Vec<BigRational> = (0..=4).map(|i| powi(&x, i)).collect();
        let c = [0, 1, c2, c3, c4];
        for j in [3usize, 4] {
            let g = gram_from_sequence(&c, &u, j, true);
            let closed: BigRational = s_closed_form(a1, c2, c3, c4, j).unwrap();
            prop_assert_eq!(g.s.unwrap(), closed, "j={}", j);
        }
    }

    #[test]
    fn float_sequence_tracks_exact(arr in arbitrary_array(), num in -40i64..=40, den in 1i64..=7) {
        let exact = standard_sequence(&arr, rat(num, den));
        let float = standard_sequence(&arr, num as f64 / den as f64);
        for (q, f) in exact.u.iter().zip(&float.u) {
            let q = rational_to_f64(q);
            prop_assert!((q - f).abs() <= 1e-9 * q.abs().max(1.0), "{} vs {}", q, f);
        }
    }

    #[test]
    fn condition_order_only_changes_labels(
        case in select(CASES.to_vec()),
        k in 6i64..=600,
        raw in proptest::collection::vec(0u32..1000, 4),
        order in Just(DEFAULT_ORDER.to_vec()).prop_shuffle(),
    ) {
        let (j, d) = case;
        let t = case_template(j, d).unwrap();
        // free values spread over [1, k]
        let mut free: Vec<i64> = raw[..t.free.len()].iter().map(|&r| 1 + (r as i64 * k) / 1000).collect();
        free.sort_unstable();
        let cand = Candidate::new(&t, k, &free).unwrap();
        let default = cand.verdict();
        let permuted = cand.verdict_with(&order);
        prop_assert_eq!(default.is_survivor(), permuted.is_survivor());
        let results: Vec<(Condition, Check)> = DEFAULT_ORDER.iter().map(|&c| (c, cand.check(c))).collect();
        let first_fail = |ord: &[Condition]| {
            ord.iter().find_map(|c| match results.iter().find(|r| r.0 == *c).unwrap().1 {
                Check::Fail(tag) => Some(tag),
                _ => None,
            })
        };
        match permuted {
            Verdict::Killed(tag) => prop_assert_eq!(Some(tag), first_fail(&order)),
            Verdict::Survivor { .. } => prop_assert!(first_fail(&order).is_none()),
        }
    }
}

#[test]
fn gamma_identity_on_geometric_families() {
    let mut geometric = 0;
    for spec in family_specs() {
        let arr = family_array(&spec).unwrap();
        if let Ok(p) = geometric_candidate(&arr) {
            assert_eq!(check_gamma_identity(&arr, &p.gamma), Ok(()), "{spec}");
            assert!(p.gamma.windows(2).all(|w| w[0] <= w[1]), "{spec}");
            geometric += 1;
        }
    }
    assert!(geometric > 40, "{geometric}");
}

#[test]
fn dual_polar_gram_matches_closed_form() {
    // geometric u-prefix up to j makes the closed form apply
    for spec in family_specs() {
        let arr = family_array(&spec).unwrap();
        if geometric_candidate(&arr).is_err() {
            continue;
        }
        for j in 3..=arr.diameter().min(4) {
            if !gamma_prefix_is_one(&arr, j) {
                continue;
            }
            let g = gram_data(&arr, j).unwrap();
            let c4 = if arr.diameter() >= 4 { arr.c(4) } else { 0 };
            let closed: BigRational = s_closed_form(arr.a(1), arr.c(2), arr.c(3), c4, j).unwrap();
            assert_eq!(g.s, Some(closed), "{spec} j={j}");
        }
    }
}

#[test]
fn multiplicities_sum_to_vertex_count_in_every_scalar() {
    for spec in [FamilySpec::Hamming { d: 3, q: 3 }, FamilySpec::symplectic(2, 3), FamilySpec::Sporadic27] {
        let arr = family_array(&spec).unwrap();
        let spec_exact = drgkit::spectral::spectrum(&arr).unwrap();
        let mut total64 = 0.0f64;
        let mut total32 = 0.0f32;
        for e in &spec_exact.entries {
            let theta = e.value.exact().expect("integral spectrum").clone();
            let m = multiplicity(&arr, theta.clone()).unwrap();
            total64 += multiplicity(&arr, rational_to_f64(&theta)).unwrap();
            total32 += multiplicity(&arr, rational_to_f64(&theta) as f32).unwrap();
            assert_eq!(Some(m.to_integer()), e.multiplicity.as_integer());
        }
        let v = rational_to_f64(arr.vertex_count());
        assert!((total64 - v).abs() < 1e-9, "{spec}");
        assert!((total32 as f64 - v).abs() < 1e-2 * v, "{spec}");
    }
}
