use coarsec_core::spaces::{
    build_word_ball, make_synthetic, parse_distance_matrix, GroupSpec, MetricWindow, Provenance,
    SpaceError, Synthetic, DEFAULT_CAP,
};
use proptest::prelude::*;

fn groups() -> Vec<(GroupSpec, usize)> {
    vec![
        (GroupSpec::FreeAbelian { rank: 1 }, 6),
        (GroupSpec::FreeAbelian { rank: 2 }, 3),
        (GroupSpec::FreeAbelian { rank: 3 }, 2),
        (GroupSpec::Free { rank: 2 }, 3),
        (GroupSpec::CyclicProduct { moduli: vec![5, 3] }, 3),
        (
            GroupSpec::Permutation {
                degree: 4,
                generators: vec![vec![vec![1, 2]], vec![vec![1, 2, 3, 4]]],
            },
            3,
        ),
    ]
}

/// Position of each label of `small` inside `big`.
fn embed(small: &MetricWindow, big: &MetricWindow) -> Vec<usize> {
    small
        .ground()
        .labels()
        .iter()
        .map(|l| big.ground().position(l).expect("nested balls"))
        .collect()
}

#[test]
fn balls_nest_isometrically() {
    for (g, r) in groups() {
        let small = build_word_ball(&g, r - 1, DEFAULT_CAP).unwrap();
        let big = build_word_ball(&g, r, DEFAULT_CAP).unwrap();
        let pos = embed(&small, &big);
        for a in 0..small.len() {
            for b in 0..small.len() {
                assert_eq!(small.dist(a, b), big.dist(pos[a], pos[b]), "{g:?}");
            }
        }
    }
}

#[test]
fn distances_are_word_lengths_from_the_identity() {
    for (g, r) in groups() {
        let w = build_word_ball(&g, r, DEFAULT_CAP).unwrap();
        assert_eq!(w.depths()[0], r as f64);
        for x in 0..w.len() {
            assert_eq!(w.depths()[x], r as f64 - w.dist(0, x), "{g:?}");
            assert!(w.dist(0, x) <= r as f64);
        }
        assert!(w.validate().is_ok());
    }
}

#[test]
fn inversion_is_an_isometry_for_abelian_groups() {
    for g in [
        GroupSpec::FreeAbelian { rank: 2 },
        GroupSpec::CyclicProduct { moduli: vec![4, 6] },
    ] {
        let w = build_word_ball(&g, 3, DEFAULT_CAP).unwrap();
        let inv: Vec<usize> = (0..w.len())
            .map(|x| {
                let label = w.ground().label(x);
                let coords: Vec<i64> = label
                    .trim_matches(|c| c == '(' || c == ')')
                    .split(',')
                    .map(|t| t.parse().unwrap())
                    .collect();
                let neg = g.label(&g.inverse(&coords));
                w.ground()
                    .position(&neg)
                    .expect("balls are closed under inversion")
            })
            .collect();
        assert_eq!(inv[0], 0);
        for x in 0..w.len() {
            for y in 0..w.len() {
                assert_eq!(w.dist(x, y), w.dist(inv[x], inv[y]), "{g:?}");
            }
        }
    }
}

#[test]
fn inversion_fails_for_free_groups() {
    // d(a, ab) = |b| = 1 but d(A, BA) = |aBA| = 3
    let w = build_word_ball(&GroupSpec::Free { rank: 2 }, 2, DEFAULT_CAP).unwrap();
    let p = |l: &str| w.ground().position(l).unwrap();
    assert_eq!(w.dist(p("a"), p("ab")), 1.0);
    assert_eq!(w.dist(p("A"), p("BA")), 3.0);
}

#[test]
fn cap_is_enforced() {
    assert!(matches!(
        build_word_ball(&GroupSpec::Free { rank: 3 }, 6, 1000),
        Err(SpaceError::CapExceeded { .. })
    ));
    assert!(matches!(
        make_synthetic(Synthetic::Grid { w: 100, h: 100 }, 1000),
        Err(SpaceError::CapExceeded { .. })
    ));
}

#[test]
fn synthetic_examples() {
    let geo = make_synthetic(Synthetic::GeometricSeries { k: 10 }, DEFAULT_CAP).unwrap();
    assert_eq!(geo.len(), 11);
    let gaps: Vec<f64> = (0..10).map(|i| geo.dist(i, i + 1)).collect();
    assert_eq!(gaps.iter().cloned().fold(f64::INFINITY, f64::min), 1.0);
    assert_eq!(gaps.iter().cloned().fold(0.0, f64::max), 512.0);
    let grid = make_synthetic(Synthetic::Grid { w: 9, h: 9 }, DEFAULT_CAP).unwrap();
    assert_eq!((grid.len(), grid.diameter()), (81, 16.0));
    let b = make_synthetic(Synthetic::Bounded { n: 4 }, DEFAULT_CAP).unwrap();
    assert_eq!(b.threshold(1.0).pair_count(), 16);
}

#[test]
fn distance_matrix_files() {
    let ok = "#points: a,b,c,d\n0,1,2,1\n1,0,1,2\n2,1,0,1\n1,2,1,0\n";
    let (labels, d) = parse_distance_matrix(ok).unwrap();
    assert_eq!(labels, vec!["a", "b", "c", "d"]);
    assert!(MetricWindow::new(labels, d, None, Provenance::Inline).is_ok());
    let bad = "0,1,5\n1,0,1\n5,1,0\n";
    let (labels, d) = parse_distance_matrix(bad).unwrap();
    let err = MetricWindow::new(labels, d, None, Provenance::Inline).unwrap_err();
    assert!(matches!(err, SpaceError::Triangle(0, 1, 2)), "{err:?}");
    assert!(parse_distance_matrix("0,1\n1,0,2\n").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn threshold_lists_give_nested_schedules(mut ts in proptest::collection::vec(0.0f64..20.0, 1..6)) {
        ts.sort_by(f64::total_cmp);
        ts.dedup();
        let w = make_synthetic(Synthetic::Grid { w: 4, h: 3 }, DEFAULT_CAP).unwrap();
        let s = w.schedule(&ts).unwrap();
        prop_assert_eq!(s.len(), ts.len());
        for i in 1..s.len() {
            prop_assert!(s.stage(i).is_subset_of(s.stage(i + 1)));
        }
    }

    #[test]
    fn random_line_metrics_validate(xs in proptest::collection::vec(-50i64..50, 1..10)) {
        let n = xs.len();
        let labels = (0..n).map(|i| format!("p{i}")).collect();
        let d = (0..n * n).map(|k| (xs[k / n] - xs[k % n]).abs() as f64).collect();
        prop_assert!(MetricWindow::new(labels, d, None, Provenance::Inline).is_ok());
    }
}
