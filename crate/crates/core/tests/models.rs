mod common;

use fitroom::abs::{is_chart_edge, run_abs_detailed, CustomerState};
use fitroom::config::{Patience, ScenarioConfig};
use fitroom::des::run_des;
use fitroom::engine::HORIZON;
use fitroom::model::{Disposition, RunOptions, RunOutcome, TraceKind};
use std::collections::HashMap;

fn check_outcome(config: &ScenarioConfig, out: &RunOutcome) {
    let m = &out.metrics;
    assert_eq!(m.served + m.not_served, out.arrivals() as u64);
    assert!((0.0..=1.0).contains(&m.staff_util));
    assert!((0.0..=1.0).contains(&m.cubicle_util));
    assert!(m.mean_wait >= 0.0);
    assert!(out.busy_time <= HORIZON + 1e-9);
    assert!(out.occupancy_time <= config.cubicles as f64 * HORIZON + 1e-9);
    let mut last = 0.0;
    for e in &out.trace {
        assert!(e.time >= last && e.time <= HORIZON);
        assert!(e.occupied <= config.cubicles);
        last = e.time;
    }
    let speedups = out
        .trace
        .iter()
        .filter(|e| e.kind == TraceKind::SpeedUp)
        .count() as u64;
    assert_eq!(speedups, m.service_time_changes);
    for c in &out.customers {
        assert_ne!(c.disposition, Disposition::InSystem);
        assert!(c.wait >= 0.0);
        assert!(c.arrival < HORIZON);
    }
}

#[test]
fn random_configs_keep_invariants_in_both_models() {
    let mut rng = common::rng(1);
    for _ in 0..150 {
        let config = common::random_config(&mut rng);
        let des = run_des(&config, 0, RunOptions::traced()).unwrap();
        check_outcome(&config, &des);
        let abs = run_abs_detailed(&config, 0, RunOptions::traced()).unwrap();
        check_outcome(&config, &abs.outcome);
        // Only stale patience timers are dropped, at most one per customer.
        match config.patience {
            Patience::Infinite => assert_eq!(abs.dropped_messages, 0),
            Patience::Finite(_) => {
                assert!(abs.dropped_messages <= abs.outcome.arrivals() as u64)
            }
        }
    }
}

#[test]
fn models_agree_on_stochastic_configs() {
    // Both models draw from the same streams in the same order, so the
    // agreement holds beyond the degenerate case.
    let mut rng = common::rng(2);
    for i in 0..150 {
        let config = common::random_config(&mut rng);
        let des = run_des(&config, i, RunOptions::traced()).unwrap();
        let abs = run_abs_detailed(&config, i, RunOptions::traced())
            .unwrap()
            .outcome;
        assert_eq!(des.trace, abs.trace, "config {i}: {config:?}");
        assert_eq!(des.metrics, abs.metrics, "config {i}");
        assert_eq!(des.customers, abs.customers, "config {i}");
    }
}

#[test]
fn abs_customers_follow_the_state_chart() {
    let mut rng = common::rng(3);
    for _ in 0..60 {
        let config = common::random_config(&mut rng);
        let run = run_abs_detailed(&config, 0, RunOptions::traced()).unwrap();
        let mut state: HashMap<u32, CustomerState> = HashMap::new();
        for t in &run.transitions {
            let from = state
                .get(&t.customer)
                .copied()
                .unwrap_or(CustomerState::Arrived);
            assert_eq!(from, t.from);
            assert!(is_chart_edge(t.from, t.to), "{:?} -> {:?}", t.from, t.to);
            state.insert(t.customer, t.to);
        }
        for c in &run.outcome.customers {
            let s = state[&c.id];
            assert!(s.is_terminal());
            assert_eq!(
                s == CustomerState::Served,
                c.disposition == Disposition::Served
            );
        }
    }
}

#[test]
fn replications_are_reproducible_and_distinct() {
    let config = ScenarioConfig {
        master_seed: 5,
        ..ScenarioConfig::default()
    };
    let a = run_des(&config, 3, RunOptions::traced()).unwrap();
    let b = run_des(&config, 3, RunOptions::traced()).unwrap();
    assert_eq!(a.trace, b.trace);
    let c = run_des(&config, 4, RunOptions::traced()).unwrap();
    assert_ne!(a.trace, c.trace);
}

#[test]
fn proactive_policy_with_zero_speedup_changes_nothing() {
    let base = ScenarioConfig {
        master_seed: 9,
        ..ScenarioConfig::default()
    };
    let mut on = base.with_proactive(true);
    on.proactive.speedup = 0.0;
    let off = base.with_proactive(false);
    for rep in 0..10 {
        let a = run_des(&off, rep, RunOptions::traced()).unwrap();
        let b = run_des(&on, rep, RunOptions::traced()).unwrap();
        assert_eq!(a.service_trace(), b.service_trace());
        assert_eq!(a.metrics.mean_wait, b.metrics.mean_wait);
        assert_eq!(a.metrics.staff_util, b.metrics.staff_util);
    }
}
