//! Agent-based model. Customers, the staff member and the fitting room are
//! agents with their own state; they coordinate only by sending messages.
//!
//! Timers (arrivals, service completions, fitting, patience, proactive
//! reverts) live on the shared event calendar. Messages are zero-latency:
//! they go into a FIFO mailbox that is drained, in send order, before the
//! calendar advances again.

mod agents;
mod message;

use std::collections::VecDeque;

use log::warn;

pub use agents::{
    is_chart_edge, CubicleState, CurrentService, CustomerAgent, CustomerState, FittingRoomAgent,
    StaffAgent, StaffState, Transition,
};
pub use message::{AgentId, Delivery, Message, MessageKind};

use crate::config::{Patience, ScenarioConfig};
use crate::engine::{EventCalendar, SimTime, StreamSet, HORIZON};
use crate::model::{
    compute_metrics, CustomerId, CustomerRecord, Disposition, Job, ModelError, QueueSet,
    RunOptions, RunOutcome, TraceKind, Tracer,
};
use crate::proactive::{
    apply_speedup, check_condition, revert, CheckMode, CongestionSnapshot, SpeedupState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
enum Timer {
    Arrival,
    Patience(CustomerId),
    ServiceComplete,
    HelpNeeded(CustomerId),
    FittingComplete(CustomerId),
    Revert(u64),
    Poll,
}

/// A finished agent-based replication with its agent-level logs.
#[derive(Debug, Clone)]
pub struct AbsRun {
    pub outcome: RunOutcome,
    pub transitions: Vec<Transition>,
    pub deliveries: Vec<Delivery>,
    pub dropped_messages: u64,
}

pub struct AbsModel<'a> {
    config: &'a ScenarioConfig,
    streams: StreamSet,
    calendar: EventCalendar<Timer>,
    mailbox: VecDeque<Message>,
    next_message: u64,
    staff: StaffAgent,
    room: FittingRoomAgent,
    customers: Vec<CustomerAgent>,
    speedup: SpeedupState,
    tracer: Tracer,
    record: bool,
    transitions: Vec<Transition>,
    deliveries: Vec<Delivery>,
    dropped: u64,
}

/// One replication of the agent-based model.
pub fn run_abs(
    config: &ScenarioConfig,
    replication: u64,
    options: RunOptions,
) -> Result<RunOutcome, ModelError> {
    run_abs_detailed(config, replication, options).map(|r| r.outcome)
}

pub fn run_abs_detailed(
    config: &ScenarioConfig,
    replication: u64,
    options: RunOptions,
) -> Result<AbsRun, ModelError> {
    let mut model = AbsModel::new(config, replication, options);
    model.start()?;
    while model.step()? {}
    Ok(model.finalize())
}

impl<'a> AbsModel<'a> {
    pub fn new(config: &'a ScenarioConfig, replication: u64, options: RunOptions) -> Self {
        Self {
            config,
            streams: StreamSet::new(config.master_seed, replication),
            calendar: EventCalendar::new(HORIZON),
            mailbox: VecDeque::new(),
            next_message: 0,
            staff: StaffAgent {
                state: StaffState::Idle,
                current: None,
                busy_time: 0.0,
                service_times: config.service_table(),
                requests: QueueSet::default(),
            },
            room: FittingRoomAgent::new(config.cubicles),
            customers: Vec::new(),
            speedup: SpeedupState::default(),
            tracer: Tracer::new(options.record_trace),
            record: options.record_trace,
            transitions: Vec::new(),
            deliveries: Vec::new(),
            dropped: 0,
        }
    }

    fn now(&self) -> SimTime {
        self.calendar.now()
    }

    fn trace(&mut self, customer: Option<CustomerId>, kind: TraceKind) {
        let now = self.now();
        self.tracer
            .record(now, customer, kind, self.room.occupied());
    }

    fn snapshot(&self) -> CongestionSnapshot {
        CongestionSnapshot {
            queues: self.staff.requests.lengths(),
            occupied: self.room.occupied(),
            reserved: self.room.reserved,
            capacity: self.room.capacity(),
        }
    }

    pub fn start(&mut self) -> Result<(), ModelError> {
        if let Some(t) = self
            .config
            .arrivals
            .next_arrival(0.0, &mut self.streams.arrivals)
        {
            self.calendar.schedule(t, Timer::Arrival)?;
        }
        if let CheckMode::Polling(interval) = self.config.proactive.check {
            if self.config.proactive.enabled {
                let t = interval.sample(&mut self.streams.polling);
                self.calendar.schedule(t, Timer::Poll)?;
            }
        }
        Ok(())
    }

    /// Fires the next timer and delivers every message it causes.
    pub fn step(&mut self) -> Result<bool, ModelError> {
        let Some(event) = self.calendar.advance() else {
            return Ok(false);
        };
        let before = self.snapshot();
        match event.kind {
            Timer::Arrival => self.environment_arrival()?,
            Timer::Patience(c) => self.send(
                AgentId::Environment,
                AgentId::Customer(c),
                MessageKind::Renege,
            ),
            Timer::ServiceComplete => self.staff_service_complete()?,
            Timer::HelpNeeded(c) => self.customer_needs_help(c)?,
            Timer::FittingComplete(c) => self.customer_fitting_complete(c)?,
            Timer::Revert(generation) => {
                if revert(&mut self.staff.service_times, &mut self.speedup, generation) {
                    self.trace(None, TraceKind::Revert);
                }
            }
            Timer::Poll => {
                self.staff_proactive_check()?;
                if let CheckMode::Polling(interval) = self.config.proactive.check {
                    let t = self.now() + interval.sample(&mut self.streams.polling);
                    self.calendar.schedule(t, Timer::Poll)?;
                }
            }
        }
        self.drain()?;
        if self.config.proactive.check == CheckMode::EventDriven && self.snapshot() != before {
            self.staff_proactive_check()?;
        }
        Ok(true)
    }

    fn send(&mut self, sender: AgentId, receiver: AgentId, kind: MessageKind) {
        let seq = self.next_message;
        self.next_message += 1;
        self.mailbox.push_back(Message {
            seq,
            sender,
            receiver,
            kind,
            sent_at: self.calendar.now(),
        });
    }

    fn drain(&mut self) -> Result<(), ModelError> {
        while let Some(m) = self.mailbox.pop_front() {
            self.deliver(m)?;
        }
        Ok(())
    }

    fn drop_message(&mut self, m: &Message, why: &str) {
        warn!(
            "t={:.3}: {} dropped {:?} from {} ({why})",
            self.now(),
            m.receiver,
            m.kind,
            m.sender
        );
        self.dropped += 1;
    }

    /// Runs the receiver's state-chart reaction to `m`.
    pub fn deliver(&mut self, m: Message) -> Result<(), ModelError> {
        if self.record {
            self.deliveries.push(Delivery {
                message: m,
                delivered_at: self.now(),
            });
        }
        match m.receiver {
            AgentId::Customer(id) => {
                if id as usize >= self.customers.len() {
                    return Err(ModelError::UnknownAgent(m.receiver.to_string()));
                }
                self.customer_receive(id, &m)
            }
            AgentId::Staff => self.staff_receive(&m),
            AgentId::FittingRoom => self.room_receive(&m),
            AgentId::Environment => {
                self.drop_message(&m, "environment takes no messages");
                Ok(())
            }
        }
    }

    // ---- customer agent ----

    fn set_state(&mut self, id: CustomerId, to: CustomerState) {
        let c = &mut self.customers[id as usize];
        let from = c.state;
        c.state = to;
        if self.record {
            self.transitions.push(Transition {
                time: self.calendar.now(),
                customer: id,
                from,
                to,
            });
        }
    }

    fn environment_arrival(&mut self) -> Result<(), ModelError> {
        let now = self.now();
        let id = self.customers.len() as CustomerId;
        self.customers.push(CustomerAgent::new(id, now));
        self.trace(Some(id), TraceKind::Arrive);
        if let Patience::Finite(spec) = self.config.patience {
            let patience = spec.sample(&mut self.streams.patience);
            self.calendar
                .schedule(now + patience, Timer::Patience(id))?;
        }
        if let Some(t) = self
            .config
            .arrivals
            .next_arrival(now, &mut self.streams.arrivals)
        {
            self.calendar.schedule(t, Timer::Arrival)?;
        }
        self.customer_request(id, CustomerState::WaitingEntry, MessageKind::RequestEntry);
        Ok(())
    }

    fn customer_request(&mut self, id: CustomerId, state: CustomerState, kind: MessageKind) {
        self.customers[id as usize].join_time = self.now();
        self.set_state(id, state);
        self.send(AgentId::Customer(id), AgentId::Staff, kind);
    }

    fn customer_needs_help(&mut self, id: CustomerId) -> Result<(), ModelError> {
        if self.customers[id as usize].state != CustomerState::Fitting {
            return Err(ModelError::Inconsistent(format!(
                "customer {id} asked for help outside a cubicle"
            )));
        }
        self.customer_request(id, CustomerState::WaitingHelp, MessageKind::RequestHelp);
        Ok(())
    }

    fn customer_fitting_complete(&mut self, id: CustomerId) -> Result<(), ModelError> {
        if self.customers[id as usize].state != CustomerState::Fitting {
            return Err(ModelError::Inconsistent(format!(
                "customer {id} finished fitting outside a cubicle"
            )));
        }
        self.customers[id as usize].join_time = self.now();
        self.set_state(id, CustomerState::WaitingReturn);
        let me = AgentId::Customer(id);
        self.send(me, AgentId::FittingRoom, MessageKind::CubicleReleased);
        self.send(me, AgentId::Staff, MessageKind::RequestReturn);
        Ok(())
    }

    fn customer_receive(&mut self, id: CustomerId, m: &Message) -> Result<(), ModelError> {
        use CustomerState::*;
        let now = self.now();
        let state = self.customers[id as usize].state;
        match (state, m.kind) {
            (
                WaitingEntry,
                MessageKind::Serve {
                    job: Job::Entry,
                    duration,
                },
            )
            | (
                WaitingHelp,
                MessageKind::Serve {
                    job: Job::Help,
                    duration,
                },
            )
            | (
                WaitingReturn,
                MessageKind::Serve {
                    job: Job::Return,
                    duration,
                },
            ) => {
                let c = &mut self.customers[id as usize];
                c.record.wait += now - c.join_time;
                c.record.staff_time += duration;
                let next = match state {
                    WaitingEntry => InEntryService,
                    WaitingHelp => InHelpService,
                    _ => InReturnService,
                };
                self.set_state(id, next);
            }
            (InEntryService, MessageKind::ServiceDone(Job::Entry)) => {
                self.send(
                    AgentId::Customer(id),
                    AgentId::FittingRoom,
                    MessageKind::RequestCubicle,
                );
            }
            (InEntryService, MessageKind::CubicleGranted(index)) => {
                self.customers[id as usize].cubicle = Some(index);
                self.set_state(id, Fitting);
                self.start_fitting(id)?;
            }
            (InHelpService, MessageKind::ServiceDone(Job::Help)) => {
                self.set_state(id, Fitting);
                let remaining = self.customers[id as usize].remaining_fitting;
                self.calendar
                    .schedule(now + remaining, Timer::FittingComplete(id))?;
            }
            (InReturnService, MessageKind::ServiceDone(Job::Return)) => {
                self.customers[id as usize].record.disposition = Disposition::Served;
                self.set_state(id, Served);
            }
            (WaitingEntry, MessageKind::Renege) => {
                let c = &mut self.customers[id as usize];
                c.record.wait += now - c.join_time;
                c.record.disposition = Disposition::Reneged;
                self.set_state(id, NotServed);
                self.trace(Some(id), TraceKind::Renege);
                self.send(AgentId::Customer(id), AgentId::Staff, MessageKind::Renege);
            }
            _ => self.drop_message(m, "no edge for this state"),
        }
        Ok(())
    }

    fn start_fitting(&mut self, id: CustomerId) -> Result<(), ModelError> {
        let now = self.now();
        let fitting = self.config.fitting.sample(&mut self.streams.fitting);
        let wants_help = self
            .streams
            .help_decision
            .bernoulli(self.config.help_probability);
        let c = &mut self.customers[id as usize];
        c.record.wanted_help = Some(wants_help);
        let timer = if wants_help {
            let fraction = self
                .config
                .help_fraction
                .sample(&mut self.streams.help_decision);
            let before_help = fraction * fitting;
            c.remaining_fitting = fitting - before_help;
            (now + before_help, Timer::HelpNeeded(id))
        } else {
            (now + fitting, Timer::FittingComplete(id))
        };
        self.calendar.schedule(timer.0, timer.1)?;
        Ok(())
    }

    // ---- staff agent ----

    fn staff_receive(&mut self, m: &Message) -> Result<(), ModelError> {
        let AgentId::Customer(id) = m.sender else {
            self.drop_message(m, "staff only serves customers");
            return Ok(());
        };
        let job = match m.kind {
            MessageKind::RequestEntry => Job::Entry,
            MessageKind::RequestHelp => Job::Help,
            MessageKind::RequestReturn => Job::Return,
            MessageKind::Renege => {
                self.staff.requests.remove(Job::Entry, id);
                return Ok(());
            }
            _ => {
                self.drop_message(m, "not a service request");
                return Ok(());
            }
        };
        let now = self.now();
        self.staff.requests.join(job, id, now);
        self.trace(Some(id), TraceKind::JoinQueue(job));
        self.staff_scan()
    }

    /// An idle staff member looks at the three queue heads and serves the
    /// one waiting longest; the entry head needs a free cubicle, which is
    /// reserved on the spot.
    fn staff_scan(&mut self) -> Result<(), ModelError> {
        if self.staff.state != StaffState::Idle {
            return Ok(());
        }
        let Some(job) = self.staff.requests.earliest_eligible(self.room.free() > 0) else {
            return Ok(());
        };
        let waiting = self
            .staff
            .requests
            .pop(job)
            .ok_or_else(|| ModelError::Inconsistent("empty request queue".into()))?;
        let now = self.now();
        if job == Job::Entry {
            self.room.reserved += 1;
        }
        let stream = match job {
            Job::Entry => &mut self.streams.entry_service,
            Job::Help => &mut self.streams.help_service,
            Job::Return => &mut self.streams.return_service,
        };
        let duration = self.staff.service_times.sample(job, stream);
        self.staff.state = StaffState::serving(job);
        self.staff.current = Some(CurrentService {
            job,
            customer: waiting.customer,
            start: now,
            duration,
        });
        self.calendar
            .schedule(now + duration, Timer::ServiceComplete)?;
        self.send(
            AgentId::Staff,
            AgentId::Customer(waiting.customer),
            MessageKind::Serve { job, duration },
        );
        self.trace(Some(waiting.customer), TraceKind::StartService(job));
        Ok(())
    }

    fn staff_service_complete(&mut self) -> Result<(), ModelError> {
        let service =
            self.staff.current.take().ok_or_else(|| {
                ModelError::Inconsistent("service completed for idle staff".into())
            })?;
        self.staff.busy_time += service.duration;
        self.staff.state = StaffState::Idle;
        self.trace(Some(service.customer), TraceKind::EndService(service.job));
        self.send(
            AgentId::Staff,
            AgentId::Customer(service.customer),
            MessageKind::ServiceDone(service.job),
        );
        self.staff_scan()
    }

    fn staff_proactive_check(&mut self) -> Result<(), ModelError> {
        let policy = &self.config.proactive;
        if !check_condition(&self.snapshot(), policy) {
            return Ok(());
        }
        let outcome = apply_speedup(
            &mut self.staff.service_times,
            &mut self.speedup,
            policy,
            self.calendar.now(),
            &mut self.streams.revert_delay,
        );
        if outcome.started {
            self.trace(None, TraceKind::SpeedUp);
        }
        self.calendar
            .schedule(outcome.revert_at, Timer::Revert(outcome.generation))?;
        Ok(())
    }

    // ---- fitting-room agent ----

    fn room_receive(&mut self, m: &Message) -> Result<(), ModelError> {
        let AgentId::Customer(id) = m.sender else {
            self.drop_message(m, "fitting room only talks to customers");
            return Ok(());
        };
        match m.kind {
            MessageKind::RequestCubicle => self.allocate_cubicle(id),
            MessageKind::CubicleReleased => {
                let index = self.room.held_by(id).ok_or_else(|| {
                    ModelError::Inconsistent(format!("customer {id} released no cubicle"))
                })?;
                let now = self.now();
                self.room.integrate(now);
                self.room.cubicles[index] = CubicleState::Free;
                self.customers[id as usize].cubicle = None;
                self.trace(Some(id), TraceKind::LeaveCubicle);
                Ok(())
            }
            _ => {
                self.drop_message(m, "not a cubicle message");
                Ok(())
            }
        }
    }

    /// Grants the lowest-indexed free cubicle against an earlier reservation.
    fn allocate_cubicle(&mut self, id: CustomerId) -> Result<(), ModelError> {
        let index = self
            .room
            .lowest_free()
            .filter(|_| self.room.reserved > 0)
            .ok_or(ModelError::NoFreeCubicle(id))?;
        let now = self.now();
        self.room.integrate(now);
        self.room.reserved -= 1;
        self.room.cubicles[index] = CubicleState::Occupied(id);
        self.trace(Some(id), TraceKind::EnterCubicle);
        self.send(
            AgentId::FittingRoom,
            AgentId::Customer(id),
            MessageKind::CubicleGranted(index),
        );
        Ok(())
    }

    pub fn finalize(mut self) -> AbsRun {
        let horizon = HORIZON;
        self.room.integrate(horizon);
        if let Some(s) = self.staff.current {
            self.staff.busy_time += horizon - s.start;
        }
        for id in 0..self.customers.len() {
            let c = &mut self.customers[id];
            if c.state.is_terminal() {
                continue;
            }
            if c.state.waiting_for().is_some() {
                c.record.wait += horizon - c.join_time;
            }
            c.record.disposition = Disposition::NotServedAtClose;
            let was = c.state;
            c.state = CustomerState::NotServed;
            if self.record {
                self.transitions.push(Transition {
                    time: horizon,
                    customer: id as CustomerId,
                    from: was,
                    to: CustomerState::NotServed,
                });
            }
        }
        let customers: Vec<CustomerRecord> = self.customers.into_iter().map(|c| c.record).collect();
        let metrics = compute_metrics(
            self.config,
            horizon,
            &customers,
            self.staff.busy_time,
            self.room.occupancy_time,
            self.speedup.change_count,
        );
        AbsRun {
            outcome: RunOutcome {
                metrics,
                customers,
                trace: self.tracer.into_entries(),
                busy_time: self.staff.busy_time,
                occupancy_time: self.room.occupancy_time,
            },
            transitions: self.transitions,
            deliveries: self.deliveries,
            dropped_messages: self.dropped,
        }
    }
}
