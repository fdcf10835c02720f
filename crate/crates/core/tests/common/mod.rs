#![allow(dead_code)]

use fitroom::config::{Patience, ScenarioConfig};
use fitroom::engine::{ArrivalProfile, DistributionSpec};
use fitroom::proactive::{CheckMode, Thresholds};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn duration(rng: &mut impl Rng, lo: f64, hi: f64) -> DistributionSpec {
    let a = rng.random_range(lo..hi);
    let b = rng.random_range(lo..hi);
    let (low, high) = if a <= b { (a, b) } else { (b, a) };
    match rng.random_range(0..4) {
        0 => DistributionSpec::Deterministic(a),
        1 => DistributionSpec::exponential_with_mean(a),
        2 => DistributionSpec::Uniform { low, high },
        _ => DistributionSpec::Triangular {
            low,
            mode: rng.random_range(low..=high),
            high,
        },
    }
}

fn profile(rng: &mut impl Rng) -> ArrivalProfile {
    let rates: Vec<f64> = (0..8)
        .map(|_| {
            if rng.random_bool(0.15) {
                0.0
            } else {
                rng.random_range(0.0..90.0)
            }
        })
        .collect();
    ArrivalProfile::new(&rates, rng.random_range(0.3..2.0)).unwrap()
}

/// Any valid scenario: every distribution family, patience on or off,
/// proactive policy on or off, either check mode.
pub fn random_config(rng: &mut impl Rng) -> ScenarioConfig {
    let mut c = ScenarioConfig {
        master_seed: rng.random(),
        replications: 1,
        arrivals: profile(rng),
        cubicles: rng.random_range(1..=12),
        services: [
            duration(rng, 0.05, 2.0),
            duration(rng, 0.2, 5.0),
            duration(rng, 0.05, 2.0),
        ],
        fitting: duration(rng, 1.0, 20.0),
        help_probability: rng.random_range(0.0..=1.0),
        help_fraction: DistributionSpec::Uniform {
            low: rng.random_range(0.0..0.5),
            high: rng.random_range(0.5..1.0),
        },
        patience: if rng.random_bool(0.3) {
            Patience::Infinite
        } else {
            Patience::Finite(duration(rng, 1.0, 60.0))
        },
        ..ScenarioConfig::default()
    };
    let p = &mut c.proactive;
    p.enabled = rng.random_bool(0.7);
    p.thresholds = Thresholds {
        entry: rng.random_range(1..6),
        help: rng.random_range(1..6),
        ret: rng.random_range(1..6),
    };
    p.speedup = rng.random_range(0.0..0.9);
    p.revert_delay = duration(rng, 0.5, 30.0);
    if rng.random_bool(0.3) {
        p.check = CheckMode::Polling(DistributionSpec::Uniform {
            low: 0.5,
            high: rng.random_range(1.0..10.0),
        });
    }
    c.validate().expect("generated config is valid");
    c
}

/// Degenerate scenario: all durations fixed, help always or never, no
/// proactive switching. Arrivals stay random.
pub fn random_deterministic_config(rng: &mut impl Rng) -> ScenarioConfig {
    let det = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
        DistributionSpec::Deterministic(rng.random_range(lo..hi))
    };
    let mut r = ChaCha8Rng::seed_from_u64(rng.random());
    let mut c = ScenarioConfig {
        master_seed: r.random(),
        replications: 1,
        arrivals: profile(&mut r),
        cubicles: r.random_range(1..=10),
        services: [
            det(&mut r, 0.05, 2.0),
            det(&mut r, 0.2, 5.0),
            det(&mut r, 0.05, 2.0),
        ],
        fitting: det(&mut r, 1.0, 20.0),
        help_probability: if r.random_bool(0.5) { 0.0 } else { 1.0 },
        help_fraction: det(&mut r, 0.0, 1.0),
        patience: if r.random_bool(0.3) {
            Patience::Infinite
        } else {
            Patience::Finite(det(&mut r, 1.0, 60.0))
        },
        ..ScenarioConfig::default()
    };
    c.proactive.enabled = false;
    c.validate().expect("generated config is valid");
    c
}
