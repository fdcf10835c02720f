use crate::engine::SimTime;
use crate::model::{CustomerId, CustomerRecord, Job, QueueSet};
use crate::proactive::ServiceTimeTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CustomerState {
    Arrived,
    WaitingEntry,
    InEntryService,
    Fitting,
    WaitingHelp,
    InHelpService,
    WaitingReturn,
    InReturnService,
    Served,
    NotServed,
}

impl CustomerState {
    pub fn is_terminal(self) -> bool {
        matches!(self, CustomerState::Served | CustomerState::NotServed)
    }

    pub fn waiting_for(self) -> Option<Job> {
        match self {
            CustomerState::WaitingEntry => Some(Job::Entry),
            CustomerState::WaitingHelp => Some(Job::Help),
            CustomerState::WaitingReturn => Some(Job::Return),
            _ => None,
        }
    }
}

/// Edges of the customer state chart.
pub fn is_chart_edge(from: CustomerState, to: CustomerState) -> bool {
    use CustomerState::*;
    matches!(
        (from, to),
        (Arrived, WaitingEntry)
            | (WaitingEntry, InEntryService)
            | (InEntryService, Fitting)
            | (Fitting, WaitingHelp)
            | (WaitingHelp, InHelpService)
            | (InHelpService, Fitting)
            | (Fitting, WaitingReturn)
            | (WaitingReturn, InReturnService)
            | (InReturnService, Served)
    ) || (!from.is_terminal() && to == NotServed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub time: SimTime,
    pub customer: CustomerId,
    pub from: CustomerState,
    pub to: CustomerState,
}

#[derive(Debug, Clone)]
pub struct CustomerAgent {
    pub state: CustomerState,
    pub record: CustomerRecord,
    pub join_time: SimTime,
    pub remaining_fitting: f64,
    pub cubicle: Option<usize>,
}

impl CustomerAgent {
    pub fn new(id: CustomerId, now: SimTime) -> Self {
        Self {
            state: CustomerState::Arrived,
            record: CustomerRecord::new(id, now),
            join_time: now,
            remaining_fitting: 0.0,
            cubicle: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StaffState {
    Idle,
    ServingEntry,
    ServingHelp,
    ServingReturn,
}

impl StaffState {
    pub fn serving(job: Job) -> Self {
        match job {
            Job::Entry => StaffState::ServingEntry,
            Job::Help => StaffState::ServingHelp,
            Job::Return => StaffState::ServingReturn,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct CurrentService {
    pub job: Job,
    pub customer: CustomerId,
    pub start: SimTime,
    pub duration: f64,
}

/// The staff member. Service requests that arrive while busy wait in the
/// agent's own request queues.
#[derive(Debug)]
pub struct StaffAgent {
    pub state: StaffState,
    pub current: Option<CurrentService>,
    pub busy_time: f64,
    pub service_times: ServiceTimeTable,
    pub requests: QueueSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CubicleState {
    Free,
    Occupied(CustomerId),
}

#[derive(Debug)]
pub struct FittingRoomAgent {
    pub cubicles: Vec<CubicleState>,
    pub reserved: u32,
    pub occupancy_time: f64,
    last_change: SimTime,
}

impl FittingRoomAgent {
    pub fn new(capacity: u32) -> Self {
        Self {
            cubicles: vec![CubicleState::Free; capacity as usize],
            reserved: 0,
            occupancy_time: 0.0,
            last_change: 0.0,
        }
    }

    pub fn capacity(&self) -> u32 {
        self.cubicles.len() as u32
    }

    pub fn occupied(&self) -> u32 {
        self.cubicles
            .iter()
            .filter(|c| matches!(c, CubicleState::Occupied(_)))
            .count() as u32
    }

    pub fn free(&self) -> u32 {
        self.capacity() - self.occupied() - self.reserved
    }

    /// Integrates occupancy up to `now`; call before every occupancy change.
    pub fn integrate(&mut self, now: SimTime) {
        self.occupancy_time += self.occupied() as f64 * (now - self.last_change);
        self.last_change = now;
    }

    /// Lowest-indexed free cubicle.
    pub fn lowest_free(&self) -> Option<usize> {
        self.cubicles.iter().position(|c| *c == CubicleState::Free)
    }

    pub fn held_by(&self, customer: CustomerId) -> Option<usize> {
        self.cubicles
            .iter()
            .position(|c| *c == CubicleState::Occupied(customer))
    }
}
