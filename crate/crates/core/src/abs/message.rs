use std::fmt;

use crate::engine::SimTime;
use crate::model::{CustomerId, Job};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AgentId {
    Environment,
    Staff,
    FittingRoom,
    Customer(CustomerId),
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentId::Environment => f.write_str("environment"),
            AgentId::Staff => f.write_str("staff"),
            AgentId::FittingRoom => f.write_str("fitting-room"),
            AgentId::Customer(id) => write!(f, "customer-{id}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MessageKind {
    RequestEntry,
    RequestHelp,
    RequestReturn,
    /// Staff starts a job for the receiver; carries the sampled duration.
    Serve {
        job: Job,
        duration: f64,
    },
    ServiceDone(Job),
    RequestCubicle,
    CubicleGranted(usize),
    CubicleReleased,
    Renege,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Message {
    pub seq: u64,
    pub sender: AgentId,
    pub receiver: AgentId,
    pub kind: MessageKind,
    pub sent_at: SimTime,
}

/// Delivery log entry, kept when tracing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub message: Message,
    pub delivered_at: SimTime,
}
