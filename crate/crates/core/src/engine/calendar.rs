use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

use super::SimTime;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EngineError {
    #[error("event scheduled at t={time} but the clock is already at {clock}")]
    ScheduleInPast { time: SimTime, clock: SimTime },
    #[error("event time {0} is not a finite number")]
    NonFiniteTime(SimTime),
}

/// A pending state change. `seq` is the insertion counter and breaks ties
/// between events scheduled for the same instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Event<K> {
    pub time: SimTime,
    pub seq: u64,
    pub kind: K,
}

struct Entry<K>(Event<K>);

impl<K> PartialEq for Entry<K> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<K> Eq for Entry<K> {}

impl<K> PartialOrd for Entry<K> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<K> Ord for Entry<K> {
    // Reversed so the max-heap yields the smallest (time, seq).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .time
            .total_cmp(&self.0.time)
            .then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

/// Future event list ordered by `(time, seq)`.
pub struct EventCalendar<K> {
    pending: BinaryHeap<Entry<K>>,
    clock: SimTime,
    next_seq: u64,
    horizon: SimTime,
}

impl<K> EventCalendar<K> {
    pub fn new(horizon: SimTime) -> Self {
        Self {
            pending: BinaryHeap::new(),
            clock: 0.0,
            next_seq: 0,
            horizon,
        }
    }

    pub fn now(&self) -> SimTime {
        self.clock
    }

    pub fn horizon(&self) -> SimTime {
        self.horizon
    }

    pub fn len(&self) -> usize {
        self.pending.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pending.is_empty()
    }

    /// Inserts an event and returns the sequence number assigned to it.
    pub fn schedule(&mut self, time: SimTime, kind: K) -> Result<u64, EngineError> {
        if !time.is_finite() {
            return Err(EngineError::NonFiniteTime(time));
        }
        if time < self.clock {
            return Err(EngineError::ScheduleInPast {
                time,
                clock: self.clock,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.pending.push(Entry(Event { time, seq, kind }));
        Ok(seq)
    }

    /// Pops the earliest event and moves the clock to its time.
    ///
    /// Returns `None` once the calendar is empty or the next event lies
    /// beyond the horizon; in the latter case every remaining event is
    /// dropped and the clock stops at the horizon.
    pub fn advance(&mut self) -> Option<Event<K>> {
        let next_time = self.pending.peek()?.0.time;
        if next_time > self.horizon {
            self.pending.clear();
            self.clock = self.horizon;
            return None;
        }
        let Entry(event) = self.pending.pop()?;
        self.clock = event.time;
        Some(event)
    }
}
