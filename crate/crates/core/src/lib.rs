//! Planning core for fleets of multi-task UAVs.
//!
//! A [`Scenario`] describes a discretized area (locations, epochs), a fleet,
//! payload items (parcels and mission equipment), best-effort missions with
//! per-epoch demand, radio connectivity and an energy model. A
//! [`MissionPlan`] assigns every UAV a location, a manifest, mission effort,
//! relay reachability and a battery level for every epoch.
//!
//! The crate provides:
//!
//! - [`validate`]: the constraint checker and the satisfaction objective,
//! - [`graph`]: the depot/delivery route graph with k loopless routes per pair,
//! - [`planner`]: the greedy and insertion heuristics,
//! - [`bounds`]: analytic upper/lower bounds on the objective,
//! - [`exact`]: an exhaustive/branch-and-bound oracle for tiny instances and an
//!   MPS exporter for the full integer program,
//! - [`gen`]: seeded synthetic scenario generation,
//! - [`mutate`]: single-family plan corruptions for validator testing.
//!
//! Everything here is `no_std` + `alloc`; file formats, the CLI and thread
//! pools live in the `uavsched` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bounds;
pub mod eval;
pub mod exact;
pub mod gen;
pub mod graph;
pub mod horizon;
pub mod mutate;
pub mod plan;
pub mod planner;
pub mod scenario;
pub mod validate;

mod error;
mod fmath;

#[cfg(test)]
pub(crate) mod testkit;

pub use error::{PlanError, ScenarioError};
pub use eval::{
    energy_profile, evaluate, objective, one_hop_connectivity, relay_closure, relay_closure_at,
    satisfaction, EnergyProfile, EvaluationReport,
};
pub use plan::{DeliveryEvent, MissionPlan, UavTrack};
pub use scenario::{
    Connectivity, Delivery, Horizon, Location, Mission, Payload, Physics, Scenario, UavSpec,
};
pub use validate::{validate_plan, Constraint, ValidationReport, Witness};

pub type LocationId = usize;
pub type UavId = usize;
pub type PayloadId = usize;
pub type MissionId = usize;
pub type Epoch = usize;

/// Absolute slack used by every floating-point feasibility comparison.
pub const EPS: f64 = 1e-9;
