mod common;

use coarsec_core::certify::{
    certify_essential_connectivity, compare_flavors, retract_transfer_experiment, CertifyOptions,
    TransferOutcome, Verdict,
};
use coarsec_core::coarse::{Entourage, EntourageSchedule, GroundSet, PointMap};
use coarsec_core::complexes::Flavor;
use coarsec_core::spaces::{build_word_ball, make_synthetic, GroupSpec, Synthetic, DEFAULT_CAP};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn oracle_cells(u: &Entourage, flavor: Flavor, cap: usize) -> Vec<Vec<Cell>> {
    let n = u.ground().len();
    match flavor {
        Flavor::ComplexVr => brute_vr(u, cap),
        Flavor::ComplexCech => brute_cech(u, cap),
        Flavor::SetVr => brute_tuples(n, cap, |s| {
            s.iter().all(|&a| s.iter().all(|&b| rel(u, a, b)))
        }),
        Flavor::SetCech => brute_tuples(n, cap, |s| cech_set(u, s)),
    }
}

/// Nested random stages on `n` points.
fn random_schedule(rng: &mut ChaCha8Rng, n: usize, len: usize) -> EntourageSchedule {
    let mut stages = vec![random_entourage(rng, n, 0.3)];
    while stages.len() < len {
        let extra = random_entourage(rng, n, 0.3);
        stages.push(stages.last().unwrap().union(&extra).unwrap());
    }
    EntourageSchedule::new(stages).unwrap()
}

#[test]
fn witnesses_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..40 {
        let npts = rng.random_range(2..=6);
        let s = random_schedule(&mut rng, npts, 3);
        let depth: Vec<f64> = (0..npts).map(|_| rng.random_range(0..3) as f64).collect();
        let interior: Vec<bool> = depth.iter().map(|&d| d >= 1.0).collect();
        let n = 1 + round % 3;
        for flavor in Flavor::ALL {
            if flavor.is_simplicial_set() && (n > 2 || npts > 5) {
                continue;
            }
            let mut opts = CertifyOptions::new(n, flavor);
            opts.margin = 1.0;
            let cert = certify_essential_connectivity(&s, &depth, &opts).unwrap();
            let stages: Vec<_> = s
                .stages()
                .iter()
                .map(|u| oracle_cells(u, flavor, n))
                .collect();
            assert_eq!(
                cert.witnesses(),
                brute_witnesses(&stages, &interior, n),
                "{flavor:?} n={n}"
            );
            assert_eq!(
                cert.window.interior_points,
                interior.iter().filter(|&&b| b).count()
            );
        }
    }
}

#[test]
fn witnesses_are_monotone() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..30 {
        let npts = rng.random_range(2..=7);
        let s = random_schedule(&mut rng, npts, 4);
        let depth = vec![1.0; npts];
        let mut prev: Option<Vec<Option<usize>>> = None;
        for n in 1..=3 {
            let w = certify_essential_connectivity(
                &s,
                &depth,
                &CertifyOptions::new(n, Flavor::ComplexCech),
            )
            .unwrap()
            .witnesses();
            for (i, j) in w.iter().enumerate() {
                if let Some(j) = j {
                    assert!(*j > i);
                }
            }
            // in the stage
            for pair in w.windows(2) {
                if let (Some(a), Some(b)) = (pair[0], pair[1]) {
                    assert!(a <= b);
                }
                if pair[1].is_some() {
                    assert!(pair[0].is_some());
                }
            }
            // in the degree bound
            if let Some(p) = prev {
                for (a, b) in p.iter().zip(&w) {
                    assert!(b.is_none() || a.is_some_and(|a| a <= b.unwrap()));
                }
            }
            prev = Some(w);
        }
    }
}

#[test]
fn certificates_are_deterministic() {
    let w = make_synthetic(Synthetic::Grid { w: 5, h: 5 }, DEFAULT_CAP).unwrap();
    let s = w.schedule(&[1.0, 2.0, 3.0]).unwrap();
    let mut opts = CertifyOptions::new(2, Flavor::ComplexVr);
    opts.margin = 1.0;
    let a = certify_essential_connectivity(&s, w.depths(), &opts).unwrap();
    let b = certify_essential_connectivity(&s, w.depths(), &opts).unwrap();
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn integer_window() {
    let w = build_word_ball(&GroupSpec::FreeAbelian { rank: 1 }, 20, DEFAULT_CAP).unwrap();
    let s = w.schedule(&[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let mut opts = CertifyOptions::new(2, Flavor::ComplexVr);
    opts.margin = 5.0;
    let c = certify_essential_connectivity(&s, w.depths(), &opts).unwrap();
    assert!(c.complete);
    assert_eq!(c.witnesses(), (1..=5).map(Some).collect::<Vec<_>>());
    assert_eq!(c.window.interior_points, 31);
}

#[test]
fn grid_window_against_brute_force() {
    let w = make_synthetic(Synthetic::Grid { w: 6, h: 6 }, DEFAULT_CAP).unwrap();
    let s = w.schedule(&[1.0, 2.0]).unwrap();
    let mut opts = CertifyOptions::new(2, Flavor::ComplexVr);
    opts.margin = 1.0;
    let c = certify_essential_connectivity(&s, w.depths(), &opts).unwrap();
    let interior: Vec<bool> = w.depths().iter().map(|&d| d >= 1.0).collect();
    let stages: Vec<_> = s.stages().iter().map(|u| cliques(u, 2)).collect();
    assert_eq!(c.witnesses(), brute_witnesses(&stages, &interior, 2));
    assert_eq!(c.witnesses(), vec![Some(2), Some(2)]);
    assert_eq!(c.stages[0].betti, vec![1, 25]);
}

#[test]
fn geometric_series_needs_its_largest_gap() {
    let w = make_synthetic(Synthetic::GeometricSeries { k: 6 }, DEFAULT_CAP).unwrap();
    let ts: Vec<f64> = (0..6).map(|e| (1u32 << e) as f64).collect();
    let s = w.schedule(&ts).unwrap();
    let c =
        certify_essential_connectivity(&s, w.depths(), &CertifyOptions::new(1, Flavor::ComplexVr))
            .unwrap();
    assert_eq!(c.witnesses(), vec![Some(6); 6]);
    let short = w.schedule(&ts[..5]).unwrap();
    let c = certify_essential_connectivity(
        &short,
        w.depths(),
        &CertifyOptions::new(1, Flavor::ComplexVr),
    )
    .unwrap();
    assert!(!c.complete);
    assert!(c.stages.iter().all(|r| r.verdicts == vec![Verdict::Failed]));
}

#[test]
fn flavors_agree_on_random_schedules() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..15 {
        let npts = rng.random_range(2..=5);
        let s = random_schedule(&mut rng, npts, 3);
        let cmp = compare_flavors(
            &s,
            &vec![0.0; npts],
            &CertifyOptions::new(2, Flavor::ComplexVr),
        )
        .unwrap();
        assert!(cmp.consistent(), "{:?}", cmp.discrepancies);
        assert_eq!(
            cmp.certificate(Flavor::ComplexVr).witnesses(),
            cmp.certificate(Flavor::SetVr).witnesses()
        );
        assert_eq!(
            cmp.certificate(Flavor::ComplexCech).witnesses(),
            cmp.certificate(Flavor::SetCech).witnesses()
        );
    }
}

fn line(vals: &[i64]) -> std::sync::Arc<GroundSet> {
    GroundSet::new(vals.iter().map(|v| v.to_string())).unwrap()
}

fn thresholds(g: &std::sync::Arc<GroundSet>, vals: &[i64], rs: &[i64]) -> EntourageSchedule {
    let stages = rs
        .iter()
        .map(|&r| Entourage::from_predicate(g, |a, b| (vals[a] - vals[b]).abs() <= r))
        .collect();
    EntourageSchedule::new(stages).unwrap()
}

/// Nearest point of `ys` to each of `xs`, the first one on ties.
fn nearest(xs: &[i64], ys: &[i64]) -> Vec<usize> {
    xs.iter()
        .map(|&x| (0..ys.len()).min_by_key(|&j| (ys[j] - x).abs()).unwrap())
        .collect()
}

#[test]
fn even_subset_retract() {
    let xv: Vec<i64> = (-20..=20).collect();
    let yv: Vec<i64> = (-10..=10).map(|v| 2 * v).collect();
    let (gx, gy) = (line(&xv), line(&yv));
    let rs = [1, 2, 3, 4, 5, 6];
    let (xs, ys) = (thresholds(&gx, &xv, &rs), thresholds(&gy, &yv, &rs));
    let depth = |v: &[i64]| v.iter().map(|x| (20 - x.abs()) as f64).collect::<Vec<_>>();
    let i = PointMap::inclusion_by_label(&gy, &gx).unwrap();
    let r = PointMap::new(&gx, &gy, nearest(&xv, &yv)).unwrap();
    let mut opts = CertifyOptions::new(2, Flavor::ComplexVr);
    opts.margin = 5.0;
    let rep =
        retract_transfer_experiment(&i, &r, &xs, &depth(&xv), &ys, &depth(&yv), &opts).unwrap();
    assert!(rep.retract.holds());
    assert!(rep.x.complete && rep.y.complete);
    assert_eq!(rep.outcome, TransferOutcome::Holds, "{}", rep.note);
    for (s, (p, y)) in rep.predicted.iter().zip(rep.y.witnesses()).enumerate() {
        let p = p.expect("predicted bound");
        assert!(p > s);
        assert!(y.unwrap() <= p);
    }
}

#[test]
fn identity_retract_predicts_own_witnesses() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..10 {
        let npts = rng.random_range(2..=6);
        let s = random_schedule(&mut rng, npts, 3);
        let id = PointMap::identity(s.ground());
        let depth = vec![0.0; npts];
        let rep = retract_transfer_experiment(
            &id,
            &id,
            &s,
            &depth,
            &s,
            &depth,
            &CertifyOptions::new(2, Flavor::ComplexVr),
        )
        .unwrap();
        assert!(rep.retract.holds());
        assert!(rep.counterexample.is_none());
        assert_eq!(rep.x.witnesses(), rep.y.witnesses());
    }
}

#[test]
fn sparse_subset_is_not_a_retract_at_small_scales() {
    let xv: Vec<i64> = (1..=32).collect();
    let yv: Vec<i64> = (0..6).map(|e| 1 << e).collect();
    let (gx, gy) = (line(&xv), line(&yv));
    let (xs, ys) = (
        thresholds(&gx, &xv, &[1, 2, 4]),
        thresholds(&gy, &yv, &[1, 2, 4]),
    );
    let i = PointMap::inclusion_by_label(&gy, &gx).unwrap();
    let r = PointMap::new(&gx, &gy, nearest(&xv, &yv)).unwrap();
    let rep = retract_transfer_experiment(
        &i,
        &r,
        &xs,
        &[0.0; 32],
        &ys,
        &[0.0; 6],
        &CertifyOptions::new(1, Flavor::ComplexVr),
    )
    .unwrap();
    assert!(!rep.retract.holds());
    assert_eq!(rep.outcome, TransferOutcome::RetractFailsOnWindow);
}
