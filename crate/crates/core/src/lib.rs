//! Simulation of a single-staff retail fitting room, built twice: as a
//! process-oriented discrete-event model ([`des`]) and as an agent-based
//! model ([`abs`]). Both share the event engine, random streams, the
//! proactive speed-up policy and the metric definitions, so under identical
//! seeds they can be compared replication by replication.
//!
//! ```
//! use fitroom::config::ScenarioConfig;
//! use fitroom::des::run_des;
//! use fitroom::model::RunOptions;
//!
//! let config = ScenarioConfig { master_seed: 7, ..ScenarioConfig::default() };
//! let outcome = run_des(&config, 0, RunOptions::default()).unwrap();
//! let m = outcome.metrics;
//! assert_eq!(m.served + m.not_served, outcome.arrivals() as u64);
//! ```

pub mod abs;
pub mod config;
pub mod des;
pub mod engine;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod proactive;
pub mod stats;
