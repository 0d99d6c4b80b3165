mod common;

use common::*;
use kemeny_core::generate::suite_chain;
use kemeny_core::*;

const K_SIGMA: f64 = 4.0;

#[test]
fn hitting_time_estimates_on_symmetric_triangle() {
    let chain = chain_b();
    for (x, y) in [(0, 1), (1, 2), (2, 0)] {
        let est = sample_hitting_time(&chain, x, y, 100_000, 5).unwrap();
        assert!(est.covers(2.0, K_SIGMA), "{x}->{y}: {est:?}");
    }
}

#[test]
fn commute_time_from_two_directions() {
    let chain = chain_a();
    let there = sample_hitting_time(&chain, 0, 1, 200_000, 11).unwrap();
    let back = sample_hitting_time(&chain, 1, 0, 200_000, 12).unwrap();
    let sum = there.mean + back.mean;
    let stderr = there.stderr.hypot(back.stderr);
    assert!((sum - 3.75).abs() <= K_SIGMA * stderr, "{sum} ± {stderr}");
}

#[test]
fn hitting_estimates_match_exact_matrix() {
    for index in 0..3 {
        let chain = suite_chain(SUITE_SEED, index, 4..=6);
        let a = full_report(&chain).unwrap();
        let n = chain.len();
        for (x, y) in [(0, n - 1), (n - 1, 0), (1, 2)] {
            let est = sample_hitting_time(&chain, x, y, 50_000, index).unwrap();
            let exact = a.hitting.matrix()[(x, y)];
            // Deterministic paths give stderr 0; allow rounding in the exact value.
            let ok = (est.mean - exact).abs() <= K_SIGMA * est.stderr + TOL_CROSS;
            assert!(ok, "chain {index} {x}->{y}: {est:?} vs {exact}");
        }
    }
}

#[test]
fn kemeny_estimates_on_examples() {
    for (chain, k) in [(chain_a(), 1.35), (chain_b(), 4.0 / 3.0)] {
        let pi = stationary_distribution(&chain).unwrap();
        let est = estimate_kemeny(&chain, &pi, 1_000_000, 3).unwrap();
        assert_eq!(est.samples, 1_000_000);
        assert!(est.covers(k, K_SIGMA), "{est:?} vs {k}");
    }
}

#[test]
fn estimates_depend_only_on_seed() {
    let chain = suite_chain(SUITE_SEED, 7, 5..=5);
    let pi = stationary_distribution(&chain).unwrap();
    let a = estimate_kemeny(&chain, &pi, 20_000, 99).unwrap();
    let b = estimate_kemeny(&chain, &pi, 20_000, 99).unwrap();
    let c = estimate_kemeny(&chain, &pi, 20_000, 100).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
}

#[test]
fn unbiased_over_random_chains() {
    let mut covered = 0;
    for index in 0..20 {
        let chain = suite_chain(SUITE_SEED ^ 0x5a5a, index, 3..=10);
        let a = full_report(&chain).unwrap();
        let est = estimate_kemeny(&chain, &a.pi, 100_000, index).unwrap();
        if est.covers(a.kemeny.commute, K_SIGMA) {
            covered += 1;
        }
    }
    assert!(covered >= 18, "only {covered}/20 estimates within {K_SIGMA} stderr");
}

#[test]
fn rejects_bad_arguments() {
    let chain = chain_a();
    assert!(matches!(sample_hitting_time(&chain, 0, 3, 10, 0), Err(Error::UnknownState(_))));
    assert!(matches!(sample_hitting_time(&chain, 1, 1, 10, 0), Err(Error::InvalidArgument(_))));
    assert!(matches!(sample_hitting_time(&chain, 0, 1, 0, 0), Err(Error::InvalidArgument(_))));
}
