//! Process-oriented model. Customers are passive records pushed through the
//! entry, help and return queues; the staff member and the cubicle bank are
//! resources, and one central set of event handlers moves everything along.

use crate::config::{Patience, ScenarioConfig};
use crate::engine::{EventCalendar, SimTime, StreamSet, HORIZON};
use crate::model::{
    compute_metrics, CustomerId, CustomerRecord, Disposition, Job, ModelError, QueueSet,
    RunOptions, RunOutcome, TraceKind, Tracer,
};
use crate::proactive::{
    apply_speedup, check_condition, revert, CheckMode, CongestionSnapshot, ServiceTimeTable,
    SpeedupState,
};

#[derive(Debug, Clone, Copy, PartialEq)]
enum DesEvent {
    Arrival,
    PatienceExpired(CustomerId),
    ServiceDone(Job, CustomerId),
    HelpRequest(CustomerId),
    FittingDone(CustomerId),
    Revert(u64),
    Poll,
}

#[derive(Debug, Clone)]
struct Customer {
    record: CustomerRecord,
    waiting_in: Option<Job>,
    remaining_fitting: f64,
}

#[derive(Debug, Clone, Copy)]
struct InService {
    job: Job,
    customer: CustomerId,
    start: SimTime,
    duration: f64,
}

#[derive(Debug)]
struct StaffResource {
    current: Option<InService>,
    busy_time: f64,
    service_times: ServiceTimeTable,
}

#[derive(Debug)]
struct CubicleBank {
    capacity: u32,
    occupied: u32,
    /// Cubicles promised to customers currently in job 1.
    reserved: u32,
    occupancy_time: f64,
    last_change: SimTime,
}

impl CubicleBank {
    fn free(&self) -> u32 {
        self.capacity - self.occupied - self.reserved
    }

    fn set_occupied(&mut self, now: SimTime, occupied: u32) {
        self.occupancy_time += self.occupied as f64 * (now - self.last_change);
        self.last_change = now;
        self.occupied = occupied;
    }
}

pub struct DesModel<'a> {
    config: &'a ScenarioConfig,
    streams: StreamSet,
    calendar: EventCalendar<DesEvent>,
    queues: QueueSet,
    staff: StaffResource,
    cubicles: CubicleBank,
    customers: Vec<Customer>,
    speedup: SpeedupState,
    tracer: Tracer,
}

/// One replication of the process-oriented model.
pub fn run_des(
    config: &ScenarioConfig,
    replication: u64,
    options: RunOptions,
) -> Result<RunOutcome, ModelError> {
    let mut model = DesModel::new(config, replication, options);
    model.start()?;
    while model.step()? {}
    Ok(model.finalize())
}

impl<'a> DesModel<'a> {
    pub fn new(config: &'a ScenarioConfig, replication: u64, options: RunOptions) -> Self {
        Self {
            config,
            streams: StreamSet::new(config.master_seed, replication),
            calendar: EventCalendar::new(HORIZON),
            queues: QueueSet::default(),
            staff: StaffResource {
                current: None,
                busy_time: 0.0,
                service_times: config.service_table(),
            },
            cubicles: CubicleBank {
                capacity: config.cubicles,
                occupied: 0,
                reserved: 0,
                occupancy_time: 0.0,
                last_change: 0.0,
            },
            customers: Vec::new(),
            speedup: SpeedupState::default(),
            tracer: Tracer::new(options.record_trace),
        }
    }

    fn now(&self) -> SimTime {
        self.calendar.now()
    }

    fn trace(&mut self, customer: Option<CustomerId>, kind: TraceKind) {
        let now = self.now();
        self.tracer
            .record(now, customer, kind, self.cubicles.occupied);
    }

    fn snapshot(&self) -> CongestionSnapshot {
        CongestionSnapshot {
            queues: self.queues.lengths(),
            occupied: self.cubicles.occupied,
            reserved: self.cubicles.reserved,
            capacity: self.cubicles.capacity,
        }
    }

    fn customer(&mut self, id: CustomerId) -> Result<&mut Customer, ModelError> {
        self.customers
            .get_mut(id as usize)
            .ok_or_else(|| ModelError::Inconsistent(format!("unknown customer {id}")))
    }

    pub fn start(&mut self) -> Result<(), ModelError> {
        if let Some(t) = self
            .config
            .arrivals
            .next_arrival(0.0, &mut self.streams.arrivals)
        {
            self.calendar.schedule(t, DesEvent::Arrival)?;
        }
        if let CheckMode::Polling(interval) = self.config.proactive.check {
            if self.config.proactive.enabled {
                let t = interval.sample(&mut self.streams.polling);
                self.calendar.schedule(t, DesEvent::Poll)?;
            }
        }
        Ok(())
    }

    /// Executes the next event. Returns false once the day is over.
    pub fn step(&mut self) -> Result<bool, ModelError> {
        let Some(event) = self.calendar.advance() else {
            return Ok(false);
        };
        let before = self.snapshot();
        match event.kind {
            DesEvent::Arrival => self.handle_arrival()?,
            DesEvent::PatienceExpired(c) => self.renege(c)?,
            DesEvent::ServiceDone(job, c) => self.complete_service(job, c)?,
            DesEvent::HelpRequest(c) => self.request_help(c)?,
            DesEvent::FittingDone(c) => self.leave_cubicle(c)?,
            DesEvent::Revert(generation) => {
                if revert(&mut self.staff.service_times, &mut self.speedup, generation) {
                    self.trace(None, TraceKind::Revert);
                }
            }
            DesEvent::Poll => {
                self.proactive_check()?;
                if let CheckMode::Polling(interval) = self.config.proactive.check {
                    let t = self.now() + interval.sample(&mut self.streams.polling);
                    self.calendar.schedule(t, DesEvent::Poll)?;
                }
            }
        }
        if self.config.proactive.check == CheckMode::EventDriven && self.snapshot() != before {
            self.proactive_check()?;
        }
        Ok(true)
    }

    fn proactive_check(&mut self) -> Result<(), ModelError> {
        let policy = &self.config.proactive;
        if !check_condition(&self.snapshot(), policy) {
            return Ok(());
        }
        let now = self.now();
        let outcome = apply_speedup(
            &mut self.staff.service_times,
            &mut self.speedup,
            policy,
            now,
            &mut self.streams.revert_delay,
        );
        if outcome.started {
            self.trace(None, TraceKind::SpeedUp);
        }
        self.calendar
            .schedule(outcome.revert_at, DesEvent::Revert(outcome.generation))?;
        Ok(())
    }

    fn handle_arrival(&mut self) -> Result<(), ModelError> {
        let now = self.now();
        let id = self.customers.len() as CustomerId;
        self.customers.push(Customer {
            record: CustomerRecord::new(id, now),
            waiting_in: None,
            remaining_fitting: 0.0,
        });
        self.trace(Some(id), TraceKind::Arrive);
        if let Patience::Finite(spec) = self.config.patience {
            let patience = spec.sample(&mut self.streams.patience);
            self.calendar
                .schedule(now + patience, DesEvent::PatienceExpired(id))?;
        }
        if let Some(t) = self
            .config
            .arrivals
            .next_arrival(now, &mut self.streams.arrivals)
        {
            self.calendar.schedule(t, DesEvent::Arrival)?;
        }
        self.join(Job::Entry, id)?;
        self.dispatch_staff()
    }

    fn join(&mut self, job: Job, id: CustomerId) -> Result<(), ModelError> {
        let now = self.now();
        self.queues.join(job, id, now);
        self.customer(id)?.waiting_in = Some(job);
        self.trace(Some(id), TraceKind::JoinQueue(job));
        Ok(())
    }

    /// Global first-come-first-served over the three queue heads. The entry
    /// head is only eligible while a cubicle is free, and starting job 1
    /// reserves that cubicle.
    fn dispatch_staff(&mut self) -> Result<(), ModelError> {
        if self.staff.current.is_some() {
            return Ok(());
        }
        let Some(job) = self.queues.earliest_eligible(self.cubicles.free() > 0) else {
            return Ok(());
        };
        let waiting = self
            .queues
            .pop(job)
            .ok_or_else(|| ModelError::Inconsistent("empty queue head".into()))?;
        let now = self.now();
        if job == Job::Entry {
            self.cubicles.reserved += 1;
        }
        let stream = match job {
            Job::Entry => &mut self.streams.entry_service,
            Job::Help => &mut self.streams.help_service,
            Job::Return => &mut self.streams.return_service,
        };
        let duration = self.staff.service_times.sample(job, stream);
        self.staff.current = Some(InService {
            job,
            customer: waiting.customer,
            start: now,
            duration,
        });
        let c = self.customer(waiting.customer)?;
        c.waiting_in = None;
        c.record.wait += now - waiting.join_time;
        c.record.staff_time += duration;
        self.calendar
            .schedule(now + duration, DesEvent::ServiceDone(job, waiting.customer))?;
        self.trace(Some(waiting.customer), TraceKind::StartService(job));
        Ok(())
    }

    /// Frees the staff member, re-dispatches, then moves the customer on.
    fn complete_service(&mut self, job: Job, id: CustomerId) -> Result<(), ModelError> {
        let service = self
            .staff
            .current
            .take()
            .filter(|s| s.job == job && s.customer == id)
            .ok_or_else(|| {
                ModelError::Inconsistent(format!("{} done for idle staff", job.label()))
            })?;
        self.staff.busy_time += service.duration;
        self.trace(Some(id), TraceKind::EndService(job));
        self.dispatch_staff()?;
        match job {
            Job::Entry => self.enter_cubicle(id),
            Job::Help => {
                let now = self.now();
                let remaining = self.customer(id)?.remaining_fitting;
                self.calendar
                    .schedule(now + remaining, DesEvent::FittingDone(id))?;
                Ok(())
            }
            Job::Return => {
                self.customer(id)?.record.disposition = Disposition::Served;
                Ok(())
            }
        }
    }

    fn enter_cubicle(&mut self, id: CustomerId) -> Result<(), ModelError> {
        let now = self.now();
        self.cubicles.reserved -= 1;
        let occupied = self.cubicles.occupied + 1;
        self.cubicles.set_occupied(now, occupied);
        self.trace(Some(id), TraceKind::EnterCubicle);
        let fitting = self.config.fitting.sample(&mut self.streams.fitting);
        let wants_help = self
            .streams
            .help_decision
            .bernoulli(self.config.help_probability);
        let event = if wants_help {
            let fraction = self
                .config
                .help_fraction
                .sample(&mut self.streams.help_decision);
            let before_help = fraction * fitting;
            self.customer(id)?.remaining_fitting = fitting - before_help;
            (now + before_help, DesEvent::HelpRequest(id))
        } else {
            (now + fitting, DesEvent::FittingDone(id))
        };
        self.customer(id)?.record.wanted_help = Some(wants_help);
        self.calendar.schedule(event.0, event.1)?;
        Ok(())
    }

    fn request_help(&mut self, id: CustomerId) -> Result<(), ModelError> {
        self.join(Job::Help, id)?;
        self.dispatch_staff()
    }

    fn leave_cubicle(&mut self, id: CustomerId) -> Result<(), ModelError> {
        let now = self.now();
        let occupied = self.cubicles.occupied - 1;
        self.cubicles.set_occupied(now, occupied);
        self.trace(Some(id), TraceKind::LeaveCubicle);
        self.join(Job::Return, id)?;
        self.dispatch_staff()
    }

    /// Patience timer. Only customers still waiting for job 1 give up.
    fn renege(&mut self, id: CustomerId) -> Result<(), ModelError> {
        if self.customer(id)?.waiting_in != Some(Job::Entry) {
            return Ok(());
        }
        self.queues.remove(Job::Entry, id);
        let now = self.now();
        let c = self.customer(id)?;
        c.waiting_in = None;
        c.record.disposition = Disposition::Reneged;
        // Partial wait, only used by the all-customers estimator.
        let joined = c.record.arrival;
        c.record.wait += now - joined;
        self.trace(Some(id), TraceKind::Renege);
        Ok(())
    }

    /// Closes the day: in-flight work is truncated at the horizon and every
    /// customer still inside is marked not served.
    pub fn finalize(mut self) -> RunOutcome {
        let horizon = HORIZON;
        let occupied = self.cubicles.occupied;
        self.cubicles.set_occupied(horizon, occupied);
        if let Some(s) = self.staff.current {
            self.staff.busy_time += horizon - s.start;
        }
        for c in &mut self.customers {
            if c.record.disposition == Disposition::InSystem {
                c.record.disposition = Disposition::NotServedAtClose;
                if let Some(job) = c.waiting_in {
                    if let Some(w) = self.queues.remove(job, c.record.id) {
                        c.record.wait += horizon - w.join_time;
                    }
                }
            }
        }
        let customers: Vec<CustomerRecord> = self.customers.into_iter().map(|c| c.record).collect();
        let metrics = compute_metrics(
            self.config,
            horizon,
            &customers,
            self.staff.busy_time,
            self.cubicles.occupancy_time,
            self.speedup.change_count,
        );
        RunOutcome {
            metrics,
            customers,
            trace: self.tracer.into_entries(),
            busy_time: self.staff.busy_time,
            occupancy_time: self.cubicles.occupancy_time,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::DistributionSpec;
    use crate::model::TraceEntry;

    fn det(v: f64) -> DistributionSpec {
        DistributionSpec::Deterministic(v)
    }

    fn reactive_config() -> ScenarioConfig {
        let mut c = ScenarioConfig::default();
        c.proactive.enabled = false;
        c.patience = Patience::Infinite;
        c
    }

    fn model(config: &ScenarioConfig) -> DesModel<'_> {
        DesModel::new(config, 0, RunOptions::traced())
    }

    fn add_waiting(m: &mut DesModel<'_>, job: Job, at: SimTime) -> CustomerId {
        let id = m.customers.len() as CustomerId;
        m.customers.push(Customer {
            record: CustomerRecord::new(id, at),
            waiting_in: Some(job),
            remaining_fitting: 0.0,
        });
        m.queues.join(job, id, at);
        id
    }

    fn kinds(trace: &[TraceEntry]) -> Vec<TraceKind> {
        trace.iter().map(|e| e.kind).collect()
    }

    #[test]
    fn first_arrival_is_served_immediately() {
        let config = reactive_config();
        let mut m = model(&config);
        m.handle_arrival().unwrap();
        assert_eq!(m.customers[0].record.wait, 0.0);
        assert_eq!(m.staff.current.unwrap().job, Job::Entry);
        assert_eq!(m.cubicles.reserved, 1);
    }

    #[test]
    fn arrival_queues_behind_busy_staff() {
        let config = reactive_config();
        let mut m = model(&config);
        m.handle_arrival().unwrap();
        m.handle_arrival().unwrap();
        assert_eq!(m.queues.len(Job::Entry), 1);
    }

    #[test]
    fn return_head_beats_later_entry_head() {
        let config = reactive_config();
        let mut m = model(&config);
        let ret = add_waiting(&mut m, Job::Return, 3.0);
        add_waiting(&mut m, Job::Entry, 5.0);
        m.dispatch_staff().unwrap();
        let s = m.staff.current.unwrap();
        assert_eq!((s.job, s.customer), (Job::Return, ret));
    }

    #[test]
    fn full_room_blocks_entry_head() {
        let config = reactive_config();
        let mut m = model(&config);
        m.cubicles.occupied = 8;
        add_waiting(&mut m, Job::Entry, 1.0);
        let help = add_waiting(&mut m, Job::Help, 4.0);
        m.dispatch_staff().unwrap();
        let s = m.staff.current.unwrap();
        assert_eq!((s.job, s.customer), (Job::Help, help));
    }

    #[test]
    fn nothing_to_do_leaves_staff_idle() {
        let config = reactive_config();
        let mut m = model(&config);
        m.dispatch_staff().unwrap();
        assert!(m.staff.current.is_none());
        assert!(m.calendar.is_empty());
    }

    #[test]
    fn proactive_check_fires_on_long_entry_queue() {
        let config = ScenarioConfig {
            patience: Patience::Infinite,
            arrivals: crate::engine::ArrivalProfile::new(&[0.0; 8], 1.0).unwrap(),
            ..ScenarioConfig::default()
        };
        let mut m = model(&config);
        // Staff busy with a help job, three people at the door, cubicles free.
        m.staff.current = Some(InService {
            job: Job::Help,
            customer: 99,
            start: 0.0,
            duration: 5.0,
        });
        for _ in 0..2 {
            add_waiting(&mut m, Job::Entry, 0.0);
        }
        let before = m.snapshot();
        m.handle_arrival().unwrap();
        assert_ne!(before, m.snapshot());
        m.proactive_check().unwrap();
        assert_eq!(m.speedup.change_count, 1);
    }

    #[test]
    fn help_probability_extremes() {
        for (p, expected) in [(0.0, false), (1.0, true)] {
            let mut config = reactive_config();
            config.help_probability = p;
            let out = run_des(&config, 3, RunOptions::traced()).unwrap();
            let helps = out
                .trace
                .iter()
                .filter(|e| e.kind == TraceKind::StartService(Job::Help))
                .count();
            let entered = out
                .trace
                .iter()
                .filter(|e| e.kind == TraceKind::EnterCubicle)
                .count();
            if expected {
                assert!(out.customers.iter().all(|c| c.wanted_help != Some(false)));
                assert!(helps <= entered && helps > 0);
                // Every served customer got exactly one job2.
                for c in out
                    .customers
                    .iter()
                    .filter(|c| c.disposition == Disposition::Served)
                {
                    let n = out
                        .trace
                        .iter()
                        .filter(|e| {
                            e.customer == Some(c.id) && e.kind == TraceKind::StartService(Job::Help)
                        })
                        .count();
                    assert_eq!(n, 1);
                }
            } else {
                assert_eq!(helps, 0);
            }
        }
    }

    #[test]
    fn deterministic_single_customer_walkthrough() {
        let mut config = reactive_config();
        config.services = [det(2.0), det(4.0), det(1.0)];
        config.fitting = det(10.0);
        config.help_probability = 1.0;
        config.help_fraction = det(0.5);
        config.arrivals = crate::engine::ArrivalProfile::new(&[0.0; 8], 1.0).unwrap();
        let mut m = model(&config);
        m.calendar.schedule(100.0, DesEvent::Arrival).unwrap();
        while m.step().unwrap() {}
        let out = m.finalize();
        let times: Vec<(f64, TraceKind)> = out.trace.iter().map(|e| (e.time, e.kind)).collect();
        assert_eq!(
            times,
            vec![
                (100.0, TraceKind::Arrive),
                (100.0, TraceKind::JoinQueue(Job::Entry)),
                (100.0, TraceKind::StartService(Job::Entry)),
                (102.0, TraceKind::EndService(Job::Entry)),
                (102.0, TraceKind::EnterCubicle),
                (107.0, TraceKind::JoinQueue(Job::Help)),
                (107.0, TraceKind::StartService(Job::Help)),
                (111.0, TraceKind::EndService(Job::Help)),
                (116.0, TraceKind::LeaveCubicle),
                (116.0, TraceKind::JoinQueue(Job::Return)),
                (116.0, TraceKind::StartService(Job::Return)),
                (117.0, TraceKind::EndService(Job::Return)),
            ]
        );
        assert_eq!(out.metrics.served, 1);
        assert_eq!(out.metrics.mean_wait, 0.0);
        assert_eq!(out.busy_time, 7.0);
        assert_eq!(out.occupancy_time, 14.0);
        assert_eq!(out.customers[0].staff_time, 7.0);
    }

    #[test]
    fn patience_expiry_reneges_only_waiting_customers() {
        let mut config = reactive_config();
        config.patience = Patience::Finite(det(30.0));
        config.services = [det(29.0), det(1.0), det(1.0)];
        config.fitting = det(1.0);
        config.help_probability = 0.0;
        config.arrivals = crate::engine::ArrivalProfile::new(&[0.0; 8], 1.0).unwrap();
        let mut m = model(&config);
        // Customer 0 at t=0 keeps the staff busy until 29; customer 1 (t=0.5)
        // starts at 29 < 0.5 + 30; customer 2 (t=1) would start at 58 > 31.
        for t in [0.0, 0.5, 1.0] {
            m.calendar.schedule(t, DesEvent::Arrival).unwrap();
        }
        while m.step().unwrap() {}
        let out = m.finalize();
        let d: Vec<Disposition> = out.customers.iter().map(|c| c.disposition).collect();
        assert_eq!(
            d,
            vec![
                Disposition::Served,
                Disposition::Served,
                Disposition::Reneged
            ]
        );
        assert_eq!(out.metrics.not_served, 1);
        assert!(kinds(&out.trace).contains(&TraceKind::Renege));
    }

    #[test]
    fn unserved_at_close_are_counted() {
        let mut config = reactive_config();
        config.services = [det(100.0), det(1.0), det(1.0)];
        let out = run_des(&config, 0, RunOptions::default()).unwrap();
        let m = out.metrics;
        assert_eq!(m.served + m.not_served, out.arrivals() as u64);
        assert!(m.served <= 2);
        // Idle only before the first arrival.
        let first = out.customers[0].arrival;
        assert!((m.staff_util - (HORIZON - first) / HORIZON).abs() < 1e-12);
    }

    #[test]
    fn zero_arrivals() {
        let config = ScenarioConfig {
            arrivals: crate::engine::ArrivalProfile::new(&[0.0; 8], 1.0).unwrap(),
            ..ScenarioConfig::default()
        };
        let out = run_des(&config, 0, RunOptions::default()).unwrap();
        assert_eq!(out.metrics, crate::metrics::RunMetrics::default());
    }

    #[test]
    fn same_seed_same_run() {
        let config = ScenarioConfig::default();
        let a = run_des(&config, 4, RunOptions::traced()).unwrap();
        let b = run_des(&config, 4, RunOptions::traced()).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.metrics, b.metrics);
    }
}
