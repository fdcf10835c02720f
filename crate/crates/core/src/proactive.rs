//! Proactive staff behaviour: when the fitting room gets congested the
//! staff member switches every job to a faster service time, and drops back
//! to normal after a random delay.

use crate::engine::{DistributionSpec, RandomStream, SimTime};
use crate::model::Job;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpeedMode {
    Normal,
    Fast,
}

/// Normal service-time laws for the three jobs plus the current speed.
#[derive(Debug, Clone, PartialEq)]
pub struct ServiceTimeTable {
    normal: [DistributionSpec; 3],
    mode: SpeedMode,
    speedup: f64,
}

impl ServiceTimeTable {
    pub fn new(normal: [DistributionSpec; 3], speedup: f64) -> Self {
        Self {
            normal,
            mode: SpeedMode::Normal,
            speedup,
        }
    }

    pub fn mode(&self) -> SpeedMode {
        self.mode
    }

    pub fn speedup(&self) -> f64 {
        self.speedup
    }

    pub fn normal_spec(&self, job: Job) -> &DistributionSpec {
        &self.normal[job.index()]
    }

    /// Duration for a given underlying uniform draw in the current mode.
    pub fn duration_for_draw(&self, job: Job, u: f64) -> f64 {
        let normal = self.normal[job.index()].quantile(u);
        match self.mode {
            SpeedMode::Normal => normal,
            SpeedMode::Fast => normal * (1.0 - self.speedup),
        }
    }

    pub fn sample(&self, job: Job, stream: &mut RandomStream) -> f64 {
        self.duration_for_draw(job, stream.uniform())
    }

    /// Mean duration in the current mode.
    pub fn mean(&self, job: Job) -> f64 {
        let normal = self.normal[job.index()].mean();
        match self.mode {
            SpeedMode::Normal => normal,
            SpeedMode::Fast => normal * (1.0 - self.speedup),
        }
    }
}

/// Queue-length trigger levels ("number waiting"), one per queue.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Thresholds {
    pub entry: usize,
    pub help: usize,
    pub ret: usize,
}

impl Thresholds {
    pub fn uniform(n: usize) -> Self {
        Self {
            entry: n,
            help: n,
            ret: n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckMode {
    /// Re-evaluate whenever a queue length or cubicle state changes.
    EventDriven,
    /// Re-evaluate at random instants separated by draws from the spec.
    Polling(DistributionSpec),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProactivePolicy {
    pub enabled: bool,
    pub thresholds: Thresholds,
    /// Fraction cut from normal service times while in fast mode.
    pub speedup: f64,
    pub revert_delay: DistributionSpec,
    pub check: CheckMode,
}

impl Default for ProactivePolicy {
    fn default() -> Self {
        Self {
            enabled: true,
            thresholds: Thresholds::uniform(3),
            speedup: 0.20,
            revert_delay: DistributionSpec::exponential_with_mean(10.0),
            check: CheckMode::EventDriven,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QueueLengths {
    pub entry: usize,
    pub help: usize,
    pub ret: usize,
}

/// The part of the system state the trigger looks at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongestionSnapshot {
    pub queues: QueueLengths,
    pub occupied: u32,
    pub reserved: u32,
    pub capacity: u32,
}

impl CongestionSnapshot {
    pub fn free_cubicles(&self) -> u32 {
        self.capacity - self.occupied - self.reserved
    }
}

/// Congestion trigger. Branches are tried in order: a free cubicle with a
/// long entry queue, then a long return queue, then a long help queue.
pub fn check_condition(snapshot: &CongestionSnapshot, policy: &ProactivePolicy) -> bool {
    if !policy.enabled {
        return false;
    }
    let q = snapshot.queues;
    let t = policy.thresholds;
    (snapshot.free_cubicles() > 0 && q.entry >= t.entry) || q.ret >= t.ret || q.help >= t.help
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpeedupState {
    pub change_count: u64,
    /// Generation of the revert that is allowed to act; older ones are stale.
    pub pending_revert: Option<u64>,
    next_generation: u64,
}

/// What the caller has to schedule after a trigger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedupOutcome {
    /// True when this trigger switched Normal to Fast.
    pub started: bool,
    pub revert_at: SimTime,
    pub generation: u64,
}

/// Switches to fast mode (or extends it) and draws a fresh revert delay.
/// Only a Normal to Fast switch increments the change counter.
pub fn apply_speedup(
    table: &mut ServiceTimeTable,
    state: &mut SpeedupState,
    policy: &ProactivePolicy,
    now: SimTime,
    stream: &mut RandomStream,
) -> SpeedupOutcome {
    let started = table.mode == SpeedMode::Normal;
    if started {
        table.mode = SpeedMode::Fast;
        state.change_count += 1;
    }
    let generation = state.next_generation;
    state.next_generation += 1;
    state.pending_revert = Some(generation);
    SpeedupOutcome {
        started,
        revert_at: now + policy.revert_delay.sample(stream),
        generation,
    }
}

/// Back to normal speed. Returns false for a stale revert.
pub fn revert(table: &mut ServiceTimeTable, state: &mut SpeedupState, generation: u64) -> bool {
    if state.pending_revert != Some(generation) || table.mode != SpeedMode::Fast {
        return false;
    }
    table.mode = SpeedMode::Normal;
    state.pending_revert = None;
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::StreamPurpose;

    fn snapshot(entry: usize, help: usize, ret: usize, occupied: u32) -> CongestionSnapshot {
        CongestionSnapshot {
            queues: QueueLengths { entry, help, ret },
            occupied,
            reserved: 0,
            capacity: 8,
        }
    }

    fn table() -> ServiceTimeTable {
        ServiceTimeTable::new(
            [
                DistributionSpec::Deterministic(2.0),
                DistributionSpec::Deterministic(4.0),
                DistributionSpec::Deterministic(1.5),
            ],
            0.2,
        )
    }

    #[test]
    fn free_cubicle_and_long_entry_queue_triggers() {
        let p = ProactivePolicy::default();
        assert!(check_condition(&snapshot(3, 0, 0, 7), &p));
        assert!(!check_condition(&snapshot(2, 0, 0, 7), &p));
    }

    #[test]
    fn full_room_ignores_entry_queue() {
        let p = ProactivePolicy::default();
        assert!(!check_condition(&snapshot(10, 0, 0, 8), &p));
        let mut reserved = snapshot(10, 0, 0, 7);
        reserved.reserved = 1;
        assert!(!check_condition(&reserved, &p));
    }

    #[test]
    fn return_and_help_branches() {
        let p = ProactivePolicy::default();
        assert!(check_condition(&snapshot(0, 0, 4, 8), &p));
        assert!(check_condition(&snapshot(0, 3, 0, 8), &p));
        assert!(!check_condition(&snapshot(0, 2, 2, 8), &p));
    }

    #[test]
    fn disabled_policy_never_triggers() {
        let p = ProactivePolicy {
            enabled: false,
            ..Default::default()
        };
        assert!(!check_condition(&snapshot(99, 99, 99, 0), &p));
    }

    #[test]
    fn speedup_cuts_twenty_percent() {
        let mut t = table();
        let mut s = SpeedupState::default();
        let p = ProactivePolicy::default();
        let mut rng = RandomStream::new(1, StreamPurpose::RevertDelay, 0);
        assert_eq!(t.duration_for_draw(Job::Entry, 0.3), 2.0);
        let out = apply_speedup(&mut t, &mut s, &p, 10.0, &mut rng);
        assert!(out.started);
        assert!(out.revert_at >= 10.0);
        assert_eq!(s.change_count, 1);
        assert_eq!(t.duration_for_draw(Job::Entry, 0.3), 1.6);
        assert_eq!(t.mean(Job::Entry), 1.6);
    }

    #[test]
    fn retrigger_restarts_timer_without_counting() {
        let mut t = table();
        let mut s = SpeedupState::default();
        let p = ProactivePolicy::default();
        let mut rng = RandomStream::new(1, StreamPurpose::RevertDelay, 0);
        let first = apply_speedup(&mut t, &mut s, &p, 0.0, &mut rng);
        let second = apply_speedup(&mut t, &mut s, &p, 1.0, &mut rng);
        assert!(!second.started);
        assert_eq!(s.change_count, 1);
        // Only the latest revert acts.
        assert!(!revert(&mut t, &mut s, first.generation));
        assert_eq!(t.mode(), SpeedMode::Fast);
        assert!(revert(&mut t, &mut s, second.generation));
        assert_eq!(t.mode(), SpeedMode::Normal);
        assert_eq!(t.mean(Job::Entry), 2.0);
        assert!(!revert(&mut t, &mut s, second.generation));
    }
}
