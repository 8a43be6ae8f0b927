mod common;

use coarsec_core::complexes::{
    build_cech_complex, build_flavor, build_simpset, build_vr_complex, check_sandwich, FamilyKind,
    Flavor, Space, SubsetFamilyFlavor,
};
use common::*;
use proptest::prelude::*;

fn instance(max_n: usize) -> impl Strategy<Value = (usize, Vec<bool>)> {
    (1..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec(any::<bool>(), n * (n - 1) / 2),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn vr_matches_subset_enumeration((n, mask) in instance(8), cap in 1usize..4) {
        let u = entourage_from_mask(n, &mask);
        let vr = build_vr_complex(&u, cap).unwrap();
        prop_assert_eq!(cells_of(&vr), brute_vr(&u, cap));
    }

    #[test]
    fn cech_matches_center_search((n, mask) in instance(8), cap in 1usize..4) {
        let u = entourage_from_mask(n, &mask);
        let c = build_cech_complex(&u, cap).unwrap();
        prop_assert_eq!(cells_of(&c), brute_cech(&u, cap));
    }

    #[test]
    fn simplicial_sets_match_tuple_enumeration((n, mask) in instance(5), cap in 1usize..4) {
        let u = entourage_from_mask(n, &mask);
        for kind in [FamilyKind::VietorisRips, FamilyKind::Cech] {
            let fam = SubsetFamilyFlavor::new(kind, u.clone());
            let e = build_simpset(&fam, cap).unwrap();
            let got: Vec<Vec<Cell>> = (0..=cap).map(|k| e.simplices(k).to_vec()).collect();
            let want = match kind {
                FamilyKind::VietorisRips => brute_tuples(n, cap, |s| s.iter().all(|&a| s.iter().all(|&b| rel(&u, a, b)))),
                FamilyKind::Cech => brute_tuples(n, cap, |s| cech_set(&u, s)),
            };
            prop_assert_eq!(got, want);
            prop_assert!(e.is_face_closed());
        }
    }

    #[test]
    fn sandwich_holds((n, mask) in instance(10)) {
        let u = entourage_from_mask(n, &mask);
        prop_assert_eq!(check_sandwich(&u, 3).unwrap(), None);
    }

    #[test]
    fn restriction_is_induced((n, mask) in instance(7), keep in proptest::collection::vec(any::<bool>(), 7)) {
        let u = entourage_from_mask(n, &mask);
        let mut bits = coarsec_core::bits::BitSet::new(n);
        for (i, k) in keep.iter().take(n).enumerate() {
            if *k {
                bits.insert(i);
            }
        }
        for flavor in Flavor::ALL {
            let full = build_flavor(&u, flavor, 2).unwrap();
            let sub = full.restrict(&bits);
            for k in 0..=2 {
                let want: Vec<Cell> = full
                    .simplices(k)
                    .iter()
                    .filter(|s| s.iter().all(|&v| bits.contains(v as usize)))
                    .cloned()
                    .collect();
                prop_assert_eq!(sub.simplices(k), &want[..]);
            }
        }
    }
}

#[test]
fn four_cycle_threshold_one_is_the_square() {
    let g = ground(4);
    let d = |a: usize, b: usize| {
        (a as i64 - b as i64)
            .rem_euclid(4)
            .min((b as i64 - a as i64).rem_euclid(4))
    };
    let u = coarsec_core::coarse::Entourage::from_predicate(&g, |a, b| d(a, b) <= 1);
    let Space::Complex(c) = build_flavor(&u, Flavor::ComplexVr, 3).unwrap() else {
        panic!("complex expected")
    };
    assert_eq!(c.counts(), vec![4, 4, 0, 0]);
    let Space::Complex(c) = build_flavor(&u, Flavor::ComplexCech, 3).unwrap() else {
        panic!("complex expected")
    };
    assert_eq!(c.counts(), vec![4, 6, 4, 0]);
}
