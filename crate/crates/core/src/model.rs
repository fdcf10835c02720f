//! Domain types shared by the process-oriented and agent-based models.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ScenarioConfig, WaitEstimator};
use crate::engine::{EngineError, SimTime};
use crate::metrics::RunMetrics;
use crate::proactive::QueueLengths;

pub type CustomerId = u32;

/// The three staff jobs. Each has its own queue of the same name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Job {
    /// Job 1: count garments and hand out the card on entry.
    Entry,
    /// Job 2: help a customer inside a cubicle.
    Help,
    /// Job 3: collect the card and unwanted garments on exit.
    Return,
}

impl Job {
    pub const ALL: [Job; 3] = [Job::Entry, Job::Help, Job::Return];

    pub fn index(self) -> usize {
        match self {
            Job::Entry => 0,
            Job::Help => 1,
            Job::Return => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Job::Entry => "job1",
            Job::Help => "job2",
            Job::Return => "job3",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Disposition {
    InSystem,
    Served,
    Reneged,
    NotServedAtClose,
}

impl Disposition {
    pub fn is_not_served(self) -> bool {
        matches!(self, Disposition::Reneged | Disposition::NotServedAtClose)
    }
}

/// What one customer experienced during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct CustomerRecord {
    pub id: CustomerId,
    pub arrival: SimTime,
    pub disposition: Disposition,
    /// Total minutes spent across the entry, help and return queues.
    pub wait: f64,
    /// Sum of the staff service durations started for this customer.
    pub staff_time: f64,
    pub wanted_help: Option<bool>,
}

impl CustomerRecord {
    pub fn new(id: CustomerId, arrival: SimTime) -> Self {
        Self {
            id,
            arrival,
            disposition: Disposition::InSystem,
            wait: 0.0,
            staff_time: 0.0,
            wanted_help: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceKind {
    Arrive,
    JoinQueue(Job),
    StartService(Job),
    EndService(Job),
    EnterCubicle,
    LeaveCubicle,
    Renege,
    SpeedUp,
    Revert,
}

impl TraceKind {
    pub fn is_policy(self) -> bool {
        matches!(self, TraceKind::SpeedUp | TraceKind::Revert)
    }
}

/// One observable state change. `occupied` is the number of occupied
/// cubicles right after the change.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub time: SimTime,
    pub customer: Option<CustomerId>,
    pub kind: TraceKind,
    pub occupied: u32,
}

#[derive(Debug, Default)]
pub struct Tracer {
    entries: Option<Vec<TraceEntry>>,
}

impl Tracer {
    pub fn new(enabled: bool) -> Self {
        Self {
            entries: enabled.then(Vec::new),
        }
    }

    pub fn record(
        &mut self,
        time: SimTime,
        customer: Option<CustomerId>,
        kind: TraceKind,
        occupied: u32,
    ) {
        if let Some(entries) = &mut self.entries {
            entries.push(TraceEntry {
                time,
                customer,
                kind,
                occupied,
            });
        }
    }

    pub fn into_entries(self) -> Vec<TraceEntry> {
        self.entries.unwrap_or_default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waiting {
    pub customer: CustomerId,
    pub join_seq: u64,
    pub join_time: SimTime,
}

/// Entry, help and return queues. Every join takes a number from one shared
/// counter, so the smallest `join_seq` among the heads is the customer who
/// has been waiting longest.
#[derive(Debug, Default, Clone)]
pub struct QueueSet {
    queues: [VecDeque<Waiting>; 3],
    next_seq: u64,
}

impl QueueSet {
    pub fn join(&mut self, job: Job, customer: CustomerId, time: SimTime) {
        let join_seq = self.next_seq;
        self.next_seq += 1;
        self.queues[job.index()].push_back(Waiting {
            customer,
            join_seq,
            join_time: time,
        });
    }

    pub fn head(&self, job: Job) -> Option<&Waiting> {
        self.queues[job.index()].front()
    }

    pub fn pop(&mut self, job: Job) -> Option<Waiting> {
        self.queues[job.index()].pop_front()
    }

    pub fn remove(&mut self, job: Job, customer: CustomerId) -> Option<Waiting> {
        let q = &mut self.queues[job.index()];
        let pos = q.iter().position(|w| w.customer == customer)?;
        q.remove(pos)
    }

    pub fn contains(&self, job: Job, customer: CustomerId) -> bool {
        self.queues[job.index()]
            .iter()
            .any(|w| w.customer == customer)
    }

    pub fn len(&self, job: Job) -> usize {
        self.queues[job.index()].len()
    }

    pub fn is_empty(&self) -> bool {
        self.queues.iter().all(VecDeque::is_empty)
    }

    pub fn lengths(&self) -> QueueLengths {
        QueueLengths {
            entry: self.len(Job::Entry),
            help: self.len(Job::Help),
            ret: self.len(Job::Return),
        }
    }

    /// Queue whose head joined earliest among the heads allowed to start.
    /// The entry head only counts when `entry_allowed` (a cubicle is free).
    pub fn earliest_eligible(&self, entry_allowed: bool) -> Option<Job> {
        Job::ALL
            .into_iter()
            .filter(|&job| job != Job::Entry || entry_allowed)
            .filter_map(|job| self.head(job).map(|w| (w.join_seq, job)))
            .min_by_key(|&(seq, _)| seq)
            .map(|(_, job)| job)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("message addressed to unknown agent {0}")]
    UnknownAgent(String),
    #[error("no free cubicle to grant to customer {0}")]
    NoFreeCubicle(CustomerId),
    #[error("inconsistent model state: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub record_trace: bool,
}

impl RunOptions {
    pub fn traced() -> Self {
        Self { record_trace: true }
    }
}

/// Everything one replication produces.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub metrics: RunMetrics,
    pub customers: Vec<CustomerRecord>,
    pub trace: Vec<TraceEntry>,
    pub busy_time: f64,
    pub occupancy_time: f64,
}

impl RunOutcome {
    pub fn arrivals(&self) -> usize {
        self.customers.len()
    }

    /// The trace without speed-up and revert entries.
    pub fn service_trace(&self) -> Vec<TraceEntry> {
        self.trace
            .iter()
            .filter(|e| !e.kind.is_policy())
            .copied()
            .collect()
    }
}

/// End-of-day measures from the raw accumulators.
pub fn compute_metrics(
    config: &ScenarioConfig,
    horizon: SimTime,
    customers: &[CustomerRecord],
    busy_time: f64,
    occupancy_time: f64,
    service_time_changes: u64,
) -> RunMetrics {
    let served = customers
        .iter()
        .filter(|c| c.disposition == Disposition::Served)
        .count() as u64;
    let not_served = customers
        .iter()
        .filter(|c| c.disposition.is_not_served())
        .count() as u64;
    let (wait_sum, wait_n) = customers
        .iter()
        .filter(|c| match config.wait_estimator {
            WaitEstimator::ServedOnly => c.disposition == Disposition::Served,
            WaitEstimator::AllCustomers => true,
        })
        .fold((0.0, 0u64), |(s, n), c| (s + c.wait, n + 1));
    let mean_wait = if wait_n == 0 {
        0.0
    } else {
        wait_sum / wait_n as f64
    };
    RunMetrics {
        mean_wait,
        staff_util: (busy_time / horizon).clamp(0.0, 1.0),
        cubicle_util: (occupancy_time / (config.cubicles as f64 * horizon)).clamp(0.0, 1.0),
        served,
        not_served,
        service_time_changes,
    }
}
