use alloc::string::String;

use crate::{Epoch, LocationId, PayloadId, UavId};

/// Structural problems with a scenario: broken invariants of the input data.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario has no depot location")]
    NoDepot,
    #[error("{kind} at index {index} carries id {id}; ids must equal their index")]
    IdMismatch {
        kind: &'static str,
        index: usize,
        id: usize,
    },
    #[error("table `{table}` has shape mismatch: expected {expected}, found {found}")]
    Shape {
        table: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("invalid value for {what}: {detail}")]
    InvalidValue { what: &'static str, detail: String },
    #[error("payload {payload} has an invalid delivery window or target")]
    BadDelivery { payload: PayloadId },
    #[error("UAV-to-UAV connectivity must be symmetric with a true diagonal (violated at {0},{1})")]
    Connectivity(LocationId, LocationId),
    #[error("scenario needs exactly one depot for this operation, found {0}")]
    DepotCount(usize),
    #[error("payload {payload} is delivered at a depot location, which the planners do not support")]
    DeliveryAtDepot { payload: PayloadId },
}

/// A plan that cannot be checked against its scenario at all.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanError {
    #[error("plan has {found} UAV tracks, scenario has {expected} UAVs")]
    UavCount { expected: usize, found: usize },
    #[error("track of UAV {uav}: `{field}` has length {found}, expected {expected}")]
    TrackLength {
        uav: UavId,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("UAV {uav} epoch {epoch}: payload id {payload} out of range")]
    UnknownPayload {
        uav: UavId,
        epoch: Epoch,
        payload: PayloadId,
    },
    #[error("delivery event references UAV {uav}, payload {payload}, epoch {epoch} outside the scenario")]
    EventOutOfRange {
        uav: UavId,
        payload: PayloadId,
        epoch: Epoch,
    },
    #[error("UAV {uav} epoch {epoch}: {what} is not a finite value in its domain")]
    OutOfDomain {
        uav: UavId,
        epoch: Epoch,
        what: &'static str,
    },
}
