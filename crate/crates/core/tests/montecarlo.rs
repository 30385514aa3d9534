use std::f64::consts::PI;

use ris_wpc::analytic::outage_reference;
use ris_wpc::montecarlo::{estimate_cascade_moments, estimate_outage, McConfig, McError};
use ris_wpc::params::{derive, SystemParams};

fn at(m: i64, rho_db: f64) -> SystemParams {
    SystemParams {
        m,
        rho_db,
        ..Default::default()
    }
}

fn reference(p: &SystemParams) -> f64 {
    outage_reference(p, &derive(p).unwrap(), 1e-10).unwrap()
}

fn run(p: &SystemParams, trials: u64, seed: u64, workers: usize) -> ris_wpc::OutageEstimate {
    estimate_outage(
        p,
        &derive(p).unwrap(),
        &McConfig {
            trials,
            seed,
            workers,
        },
    )
    .unwrap()
}

// At m = 8, rho = 0 the gamma fit is within ~1.5e-4 of the exact outage
// (measured with 2e6 trials), well inside the ~1.4e-3 stderr at N = 1e4.
#[test]
fn confidence_interval_coverage() {
    let p = at(8, 0.0);
    let truth = reference(&p);
    let covered = (0..100u64)
        .filter(|&seed| run(&p, 10_000, 1000 + seed, 4).covers(truth))
        .count();
    assert!(covered >= 90, "coverage {covered}/100 around {truth:e}");
}

#[test]
fn cascade_moments_match_rayleigh_products() {
    for m in [1usize, 16] {
        let mo = estimate_cascade_moments(m, 100_000, 7, 4).unwrap();
        let mean = m as f64 * PI / 4.0;
        let var = m as f64 * (1.0 - PI * PI / 16.0);
        assert!(
            (mo.mean - mean).abs() <= 3.0 * mo.stderr_mean,
            "m={m}: {mo:?}"
        );
        assert!(
            (mo.variance - var).abs() <= 4.0 * mo.stderr_variance,
            "m={m}: {mo:?}"
        );
    }
}

#[test]
fn simulation_agrees_with_reference_integral() {
    let p = at(16, 10.0);
    let est = run(&p, 100_000, 42, 4);
    let truth = reference(&p);
    assert!((est.p_hat - truth).abs() <= 0.02f64.max(3.0 * est.stderr));
    assert_eq!(est.form_disagreements, 0);

    // Tighter: a million trials at m = 8 pins the estimate to a few 1e-5.
    let p = at(8, 10.0);
    let est = run(&p, 1_000_000, 42, 8);
    let truth = reference(&p);
    assert!(
        (est.p_hat - truth).abs() <= 4.0 * est.stderr,
        "{est:?} vs {truth:e}"
    );
}

#[test]
fn worker_count_does_not_change_results() {
    let p = at(32, 0.0);
    let base = run(&p, 50_001, 9, 1);
    for workers in [2, 3, 8, 17] {
        assert_eq!(run(&p, 50_001, 9, workers), base);
    }
    let mo = estimate_cascade_moments(5, 9_999, 3, 1).unwrap();
    assert_eq!(estimate_cascade_moments(5, 9_999, 3, 6).unwrap(), mo);
}

#[test]
fn seeds_give_distinct_streams() {
    let p = at(1, 0.0);
    assert_ne!(run(&p, 10_000, 1, 1).p_hat, run(&p, 10_000, 2, 1).p_hat);
}

#[test]
fn degenerate_links() {
    let zero_rate = SystemParams {
        r_rate: 0.0,
        ..at(16, 0.0)
    };
    assert_eq!(run(&zero_rate, 10_000, 42, 2).p_hat, 0.0);
    let no_surface = at(0, 10.0);
    let est = run(&no_surface, 10_000, 42, 2);
    assert_eq!((est.p_hat, est.stderr), (1.0, 0.0));
}

#[test]
fn bad_configs_are_rejected() {
    let p = at(4, 0.0);
    let d = derive(&p).unwrap();
    let err = |trials, workers| {
        estimate_outage(
            &p,
            &d,
            &McConfig {
                trials,
                seed: 1,
                workers,
            },
        )
        .unwrap_err()
    };
    assert!(matches!(err(0, 1), McError::TooFewTrials { .. }));
    assert_eq!(err(10, 0), McError::NoWorkers);
    assert_eq!(
        estimate_cascade_moments(0, 10, 1, 1).unwrap_err(),
        McError::NoElements
    );
}
