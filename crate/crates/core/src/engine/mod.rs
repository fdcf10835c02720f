//! Event-calendar kernel shared by both fitting-room models.
//!
//! Time is measured in minutes since the store opened. A run covers one
//! business day of [`HORIZON`] minutes; events scheduled after the horizon
//! are discarded when the calendar reaches them.

mod arrivals;
mod calendar;
mod distribution;
mod random;

pub use arrivals::{ArrivalProfile, ProfileError, HOURS};
pub use calendar::{EngineError, Event, EventCalendar};
pub use distribution::{DistributionError, DistributionSpec};
pub use random::{RandomStream, StreamPurpose, StreamSet};

/// Minutes since opening.
pub type SimTime = f64;

/// Length of the simulated business day in minutes (8 hours).
pub const HORIZON: SimTime = 480.0;
