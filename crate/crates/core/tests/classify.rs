use hankel_core::classify::{
    classify, contains_forbidden_submatrix_pattern, reduce_pattern, Completability, Status,
};
use hankel_core::linalg::is_partial_positive_definite;
use hankel_core::oracle::{decide, Definiteness, OracleOptions};
use hankel_core::{Pattern, ToleranceOptions};

fn p(idx: &[usize]) -> Pattern {
    Pattern::new(idx.iter().copied())
}

fn tol() -> ToleranceOptions {
    ToleranceOptions::default()
}

/// Independent oracle for the reduction: largest step, then largest even offset.
fn brute_reduction(q: &Pattern) -> (Pattern, usize, usize) {
    let min = q.min().unwrap();
    let max = q.max().unwrap();
    for d in (1..=max.max(1)).rev() {
        for l0 in (0..=min).rev().filter(|l| l % 2 == 0) {
            if q.iter().all(|k| k >= l0 && (k - l0) % d == 0) {
                return (q.iter().map(|k| (k - l0) / d).collect(), d, l0);
            }
        }
    }
    unreachable!()
}

#[test]
fn reduction_examples() {
    let r = reduce_pattern(&p(&[2, 8, 14]));
    assert_eq!((r.pattern, r.d, r.l0), (p(&[0, 1, 2]), 6, 2));
    let r = reduce_pattern(&p(&[0, 1, 4]));
    assert_eq!((r.pattern, r.d, r.l0), (p(&[0, 1, 4]), 1, 0));
    let r = reduce_pattern(&p(&[3, 9, 15]));
    assert_eq!((r.pattern, r.d, r.l0), (p(&[1, 3, 5]), 3, 0));
}

#[test]
fn reduction_matches_divisor_scan() {
    for mask in 1u32..(1 << 11) {
        let q: Pattern = (0..11).filter(|k| mask & (1 << k) != 0).collect();
        if q.len() < 2 {
            continue;
        }
        let r = reduce_pattern(&q);
        assert_eq!(q, r.pattern.dilate(r.d, r.l0), "{q}");
        assert_eq!(r.l0 % 2, 0);
        let (bp, bd, bl) = brute_reduction(&q);
        assert_eq!((r.pattern, r.d, r.l0), (bp, bd, bl), "{q}");
    }
}

#[test]
fn classify_examples() {
    let v = classify(&p(&[1, 3, 7, 11]), 11, &tol()).unwrap();
    assert_eq!(v.status, Status::PdCompletable);
    assert_eq!(v.rule, "odd-subset");
    assert_eq!(v.strategy.as_deref(), Some("schur"));

    let v = classify(&p(&[0, 3, 6, 9]), 9, &tol()).unwrap();
    assert_eq!(v.pd.status, Completability::Completable);
    assert_eq!(v.pd.rule, "arithmetic-prefix");
    assert_eq!((v.reduction.d, v.reduction.l0), (3, 0));

    let v = classify(&p(&[0, 1, 4]), 4, &tol()).unwrap();
    assert_eq!(v.status, Status::NotPdCompletable);
    let w = v.witness.unwrap();
    assert_eq!((w.get(0), w.get(1), w.get(4)), (Some(1.0), Some(0.5), Some(1.0 / 16.0)));

    let v = classify(&p(&[0, 2, 8]), 8, &tol()).unwrap();
    assert_eq!(v.status, Status::NotPdCompletable);
    let w = v.witness.unwrap();
    assert_eq!((w.get(0), w.get(2), w.get(8)), (Some(1.0), Some(0.5), Some(1.0 / 16.0)));

    let v = classify(&p(&[0, 1, 2, 3]), 4, &tol()).unwrap();
    assert_eq!(v.status, Status::PdCompletable);
    assert_eq!(v.psd.status, Completability::NotCompletable);
    let w = v.psd.witness.unwrap();
    assert_eq!(w.entries().values().copied().collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, 2.0]);

    let v = classify(&p(&[2, 4, 6, 8]), 10, &tol()).unwrap();
    assert_eq!(v.psd.status, Completability::NotCompletable);
    assert_eq!(v.pd.status, Completability::Unknown);
    assert_eq!(v.status, Status::NotPsdCompletable);
}

#[test]
fn forbidden_scan() {
    // s_2, s_5, s_8 missing among s_0..s_8
    let q = p(&[0, 1, 3, 4, 6, 7]);
    let hit = contains_forbidden_submatrix_pattern(&q, 8).unwrap().unwrap();
    assert_eq!(hit.rows, vec![0, 1, 2]);
    assert_eq!(hit.induced, p(&[0, 1, 3, 4]));
    assert!(contains_forbidden_submatrix_pattern(&Pattern::prefix(8), 8).unwrap().is_none());
    let hit = contains_forbidden_submatrix_pattern(&p(&[0, 1, 2, 4, 5, 6]), 6).unwrap().unwrap();
    assert_eq!(hit.rows, vec![0, 1, 2, 3]);
    let v = classify(&q, 8, &tol()).unwrap();
    assert_eq!(v.status, Status::NotPdCompletable);
}

#[test]
fn negative_witnesses_are_confirmed() {
    let cases = [
        (p(&[0, 1, 4]), 4),
        (p(&[0, 3, 4]), 4),
        (p(&[0, 1, 3, 4]), 4),
        (p(&[0, 1, 2, 4, 5, 6]), 6),
        (p(&[0, 2, 8]), 8),
        (p(&[0, 1, 2, 3]), 4),
        (p(&[0, 3, 6]), 8),
    ];
    for (q, h) in cases {
        let v = classify(&q, h, &tol()).unwrap();
        for (finding, mode) in [(&v.pd, Definiteness::Pd), (&v.psd, Definiteness::Psd)] {
            if finding.status != Completability::NotCompletable {
                continue;
            }
            let w = finding.witness.as_ref().unwrap();
            if mode == Definiteness::Pd {
                assert!(is_partial_positive_definite(w, &tol()).unwrap());
            }
            let opts = OracleOptions {
                mode,
                ..OracleOptions::default()
            };
            let r = decide(w, h.div_ceil(2), &opts).unwrap();
            assert!(r.is_infeasible(), "{q} {mode:?}");
        }
    }
}

#[test]
fn psd_status_is_stable_under_dilation() {
    let base = [p(&[0]), p(&[3]), p(&[0, 1]), p(&[0, 1, 2, 3]), p(&[0, 1, 4]), p(&[0, 3, 4])];
    for q in base {
        let h = q.max().unwrap() + 1;
        let reference = classify(&q, h, &tol()).unwrap().psd.status;
        for d in 1..=4 {
            for l0 in [0, 2, 4] {
                let dq = q.dilate(d, l0);
                let dh = dq.max().unwrap() + 1;
                let status = classify(&dq, dh, &tol()).unwrap().psd.status;
                assert_eq!(status, reference, "{q} vs {dq}");
            }
        }
    }
}

#[test]
fn psd_completable_implies_pd_completable() {
    for mask in 0u32..(1 << 7) {
        let q: Pattern = (0..7).filter(|k| mask & (1 << k) != 0).collect();
        let v = classify(&q, 6, &tol()).unwrap();
        if v.psd.status == Completability::Completable {
            assert_eq!(v.pd.status, Completability::Completable, "{q}");
        }
    }
}
