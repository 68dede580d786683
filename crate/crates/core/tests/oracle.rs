use hankel_core::oracle::{
    decide, decide_pd_completable, find_witness, interval_for_single_missing, obstruct, Definiteness,
    Interval, ObstructionKind, OracleOptions,
};
use hankel_core::linalg::{hankel_matrix, min_eigenvalue};
use hankel_core::{PartialSequence, Pattern, ToleranceOptions};

fn seq(values: &[Option<f64>]) -> PartialSequence {
    PartialSequence::from_options(values).unwrap()
}

fn tol() -> ToleranceOptions {
    ToleranceOptions::default()
}

fn det3(v: &[f64]) -> f64 {
    hankel_matrix(v).unwrap().determinant()
}

#[test]
fn single_missing_interval_closed_form() {
    let s = seq(&[Some(1.0), Some(0.0), Some(1.0), None, Some(2.0)]);
    let iv = interval_for_single_missing(&s, &tol()).unwrap();
    assert!((iv.lo + 1.0).abs() < 1e-12 && (iv.hi - 1.0).abs() < 1e-12, "{iv:?}");
    for u in [iv.lo, iv.hi] {
        assert!(det3(&[1.0, 0.0, 1.0, u, 2.0]).abs() < 1e-12);
    }
}

#[test]
fn single_missing_interval_matches_determinant_roots() {
    // oracle: roots of the quadratic det H_2(u) = -s0 u² + 2 s1 s2 u + const
    let v = [1.0, 0.5, 1.0 / 3.0, 0.0, 0.2];
    let s = seq(&[Some(v[0]), Some(v[1]), Some(v[2]), None, Some(v[4])]);
    let iv = interval_for_single_missing(&s, &tol()).unwrap();
    assert!(iv.contains(0.25));
    let (a, b) = (-v[0], 2.0 * v[1] * v[2]);
    let c = det3(&[v[0], v[1], v[2], 0.0, v[4]]);
    let disc = (b * b - 4.0 * a * c).sqrt();
    let (r1, r2) = ((-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a));
    assert!((iv.lo - r1.min(r2)).abs() < 1e-12);
    assert!((iv.hi - r1.max(r2)).abs() < 1e-12);
}

#[test]
fn interval_symmetric_when_s1_vanishes() {
    let s = seq(&[Some(2.0), Some(0.0), Some(1.0), None, Some(3.0)]);
    let iv = interval_for_single_missing(&s, &tol()).unwrap();
    assert!((iv.lo + iv.hi).abs() < 1e-12);
}

#[test]
fn interval_other_positions_agree_with_eigenvalue_scan() {
    let hil: Vec<f64> = (0..7).map(|k| 1.0 / (k as f64 + 1.0)).collect();
    for hidden in 0..7 {
        let opts: Vec<Option<f64>> = (0..7).map(|k| (k != hidden).then_some(hil[k])).collect();
        let iv = interval_for_single_missing(&seq(&opts), &tol()).unwrap();
        assert!(iv.contains(hil[hidden]), "s_{hidden}: {iv:?}");
        // just outside each finite end the matrix is not PD
        for edge in [iv.lo, iv.hi].into_iter().filter(|e| e.is_finite()) {
            let step = 1e-6 * (1.0 + edge.abs());
            let outside = if edge == iv.lo { edge - step } else { edge + step };
            let mut v = hil.clone();
            v[hidden] = outside;
            assert!(min_eigenvalue(&hankel_matrix(&v).unwrap()) < 0.0, "s_{hidden} edge {edge}");
        }
    }
    let s = seq(&[Some(1.0), None, None, Some(0.0), Some(1.0)]);
    assert!(interval_for_single_missing(&s, &tol()).is_err());
}

#[test]
fn obstruction_for_0_1_4() {
    let s = seq(&[Some(1.0), Some(0.5), None, None, Some(1.0 / 16.0)]);
    let r = decide_pd_completable(&s, 2, 1000).unwrap();
    assert!(r.is_infeasible());
    let obs = r.obstruction.unwrap();
    assert_eq!(obs.kind, ObstructionKind::DisjointMinors);
    let (a, b) = (&obs.conditions[0], &obs.conditions[1]);
    assert_eq!(a.index, 2);
    assert_eq!(a.rows, vec![0, 1]);
    assert_eq!(a.interval, Interval::new(0.25, f64::INFINITY));
    assert_eq!(b.rows, vec![0, 2]);
    assert_eq!(b.interval, Interval::new(-0.25, 0.25));
}

#[test]
fn obstruction_for_0_2_8() {
    let mut v = vec![None; 9];
    v[0] = Some(1.0);
    v[2] = Some(0.5);
    v[8] = Some(1.0 / 16.0);
    let s = seq(&v);
    let obs = obstruct(&s, 4, Definiteness::Pd, &tol()).unwrap().unwrap();
    assert_eq!(obs.conditions[0].index, 4);
    assert_eq!(obs.conditions[0].interval.lo, 0.25);
    assert_eq!(obs.conditions[1].interval.hi, 0.25);
}

#[test]
fn hilbert_with_hidden_s3_is_feasible() {
    let s = seq(&[Some(1.0), Some(0.5), Some(1.0 / 3.0), None, Some(0.2)]);
    let r = decide_pd_completable(&s, 2, 5000).unwrap();
    assert!(r.feasible && !r.inconclusive);
    let u = r.completion.unwrap()[&3];
    let iv = interval_for_single_missing(&s, &tol()).unwrap();
    assert!(iv.contains(u));
}

#[test]
fn psd_counterexamples() {
    let opts = OracleOptions {
        mode: Definiteness::Psd,
        ..OracleOptions::default()
    };
    let s = seq(&[Some(1.0), Some(1.0), Some(1.0), Some(2.0)]);
    let r = decide(&s.with_horizon(4).unwrap(), 2, &opts).unwrap();
    assert!(r.is_infeasible(), "{r:?}");
    for s4 in [0.0, 1.0, 10.0, 1e6] {
        assert!((det3(&[1.0, 1.0, 1.0, 2.0, s4]) + 1.0).abs() < 1e-9 * s4.max(1.0));
    }

    let s = seq(&[Some(1.0), Some(1.0), Some(1.0), None, Some(1.0), Some(-1.0)]);
    let r = decide(&s, 3, &opts).unwrap();
    assert!(r.is_infeasible(), "{r:?}");
    assert_eq!(r.obstruction.unwrap().kind, ObstructionKind::KernelPropagation);
}

#[test]
fn pd_search_finds_completion_for_many_missing() {
    let mut v: Vec<Option<f64>> = (0..9).map(|k| Some(1.0 / (k as f64 + 1.0))).collect();
    for k in [1, 3, 4, 6, 7] {
        v[k] = None;
    }
    let r = decide_pd_completable(&seq(&v), 4, 20_000).unwrap();
    assert!(r.feasible);
    let full = r.completed_values(&seq(&v)).unwrap();
    assert!(min_eigenvalue(&hankel_matrix(&full).unwrap()) > 0.0);
}

#[test]
fn too_many_missing() {
    let s = PartialSequence::new([(0, 1.0)].into(), Some(8)).unwrap();
    assert!(decide_pd_completable(&s, 4, 100).is_err());
}

#[test]
fn witnesses() {
    let opts = OracleOptions {
        budget: 2000,
        ..OracleOptions::default()
    };
    let w = find_witness(&Pattern::new([0, 1, 4]), 2, &opts).unwrap().unwrap();
    assert_eq!(w.sequence.get(1), Some(0.5));
    let w = find_witness(&Pattern::new([0, 1, 2, 4, 5, 6]), 3, &opts).unwrap().unwrap();
    assert!(w.sequence.get(5).is_some());
    assert!(find_witness(&Pattern::prefix(4), 2, &opts).unwrap().is_none());
    assert!(find_witness(&Pattern::new([0, 2, 4]), 2, &opts).unwrap().is_none());
}
