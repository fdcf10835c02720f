mod common;

use fitroom::stats::{exact_mw_oracle, mann_whitney_u, mann_whitney_u_with, MwMethod, MwMode};
use rand::seq::SliceRandom;
use rand::Rng;

/// Two tie-free samples drawn from a random permutation, optionally shifted.
fn tie_free_pair(rng: &mut impl Rng, n: usize, m: usize, shift: f64) -> (Vec<f64>, Vec<f64>) {
    let mut pool: Vec<f64> = (0..n + m)
        .map(|i| i as f64 + rng.random::<f64>() * 0.5)
        .collect();
    pool.shuffle(rng);
    let a = pool[..n].to_vec();
    let b = pool[n..].iter().map(|x| x + shift).collect();
    (a, b)
}

#[test]
fn exact_mode_matches_oracle_for_every_small_size() {
    let mut rng = common::rng(10);
    for n in 1..=11 {
        for m in 1..=(12 - n) {
            for _ in 0..3 {
                let shift = rng.random_range(-3.0..3.0f64).round() + 0.25;
                let (a, b) = tie_free_pair(&mut rng, n, m, shift);
                let exact = mann_whitney_u_with(&a, &b, MwMode::Exact).unwrap();
                let oracle = exact_mw_oracle(&a, &b).unwrap();
                assert!(
                    (exact.p_value - oracle).abs() < 1e-12,
                    "n={n} m={m}: {} vs {oracle}",
                    exact.p_value
                );
            }
        }
    }
}

#[test]
fn normal_approximation_close_to_exact_at_twenty() {
    let mut rng = common::rng(11);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let shift = (i % 10) as f64;
        let (a, b) = tie_free_pair(&mut rng, 20, 20, shift + 0.25);
        let exact = mann_whitney_u_with(&a, &b, MwMode::Exact).unwrap();
        let approx = mann_whitney_u_with(&a, &b, MwMode::Approximate).unwrap();
        assert_eq!(exact.method, MwMethod::Exact);
        assert_eq!(approx.method, MwMethod::NormalApproximation);
        worst = worst.max((exact.p_value - approx.p_value).abs());
    }
    assert!(worst < 0.01, "largest gap {worst}");
}

#[test]
fn auto_mode_picks_exact_only_for_small_tie_free_samples() {
    let a = [1.0, 2.0, 3.0];
    let b = [4.0, 5.0, 6.0, 7.0];
    assert_eq!(mann_whitney_u(&a, &b).unwrap().method, MwMethod::Exact);
    let ties = [1.0, 2.0, 2.0];
    assert_eq!(
        mann_whitney_u(&ties, &b).unwrap().method,
        MwMethod::NormalApproximation
    );
    let big: Vec<f64> = (0..9).map(f64::from).collect();
    let big2: Vec<f64> = (0..9).map(|i| f64::from(i) + 0.5).collect();
    assert_eq!(
        mann_whitney_u(&big, &big2).unwrap().method,
        MwMethod::NormalApproximation
    );
}
