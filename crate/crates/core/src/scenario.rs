//! Problem instance: space, time, fleet, payloads, missions, radio and energy.
//!
//! All tables are dense and indexed by plain ids. Field names in the serialized
//! form follow the model's symbols (`n`, `q`, `s`, `t`, `e`, `w`, `a`, `b`, `f`).

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::{Epoch, LocationId, MissionId, PayloadId, ScenarioError, UavId, EPS};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Location {
    pub id: LocationId,
    /// Planar coordinates in km.
    pub x: f64,
    pub y: f64,
    /// Meters above ground.
    pub elevation: f64,
    #[cfg_attr(feature = "serde", serde(rename = "depot"))]
    pub is_depot: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Horizon {
    /// Number of epochs; valid epoch indices are `0..epochs`.
    pub epochs: usize,
    pub epoch_minutes: f64,
}

impl Horizon {
    /// Index of the final epoch.
    pub fn last(&self) -> Epoch {
        self.epochs.saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct UavSpec {
    pub id: UavId,
    /// Empty weight, kg.
    #[cfg_attr(feature = "serde", serde(rename = "W"))]
    pub empty_weight: f64,
    /// Payload capacity, kg.
    #[cfg_attr(feature = "serde", serde(rename = "Y"))]
    pub payload_capacity: f64,
    /// Battery capacity, Wh.
    #[cfg_attr(feature = "serde", serde(rename = "E"))]
    pub battery_capacity: f64,
    /// Maximum distance covered in one epoch, km.
    #[cfg_attr(feature = "serde", serde(rename = "V"))]
    pub max_step_distance: f64,
    /// Radio capacity, data units per epoch.
    #[cfg_attr(feature = "serde", serde(rename = "T"))]
    pub radio_capacity: f64,
    /// Payload capacity left for parcels once equipment is loaded, kg.
    #[cfg_attr(feature = "serde", serde(rename = "delta"))]
    pub parcel_capacity: f64,
    /// Per-mission weights used by the heuristics, one per mission.
    #[cfg_attr(feature = "serde", serde(rename = "alpha"))]
    pub mission_weights: Vec<f64>,
}

impl UavSpec {
    /// Mass with a full payload.
    pub fn full_mass(&self) -> f64 {
        self.empty_weight + self.payload_capacity
    }

    /// Same physical characteristics (mission weights ignored).
    pub fn same_airframe(&self, other: &UavSpec) -> bool {
        self.empty_weight == other.empty_weight
            && self.payload_capacity == other.payload_capacity
            && self.battery_capacity == other.battery_capacity
            && self.max_step_distance == other.max_step_distance
            && self.radio_capacity == other.radio_capacity
            && self.parcel_capacity == other.parcel_capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Delivery {
    #[cfg_attr(feature = "serde", serde(rename = "f"))]
    pub target: LocationId,
    #[cfg_attr(feature = "serde", serde(rename = "a"))]
    pub earliest: Epoch,
    #[cfg_attr(feature = "serde", serde(rename = "b"))]
    pub latest: Epoch,
}

impl Delivery {
    pub fn contains(&self, k: Epoch) -> bool {
        self.earliest <= k && k <= self.latest
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Payload {
    pub id: PayloadId,
    #[cfg_attr(feature = "serde", serde(rename = "w"))]
    pub weight: f64,
    /// Present for payloads that must be delivered.
    #[cfg_attr(feature = "serde", serde(default))]
    pub delivery: Option<Delivery>,
    /// Missions that need this item on board (`r(m,p) = 1`).
    #[cfg_attr(feature = "serde", serde(default))]
    pub equipment_for: Vec<MissionId>,
}

impl Payload {
    pub fn is_deliverable(&self) -> bool {
        self.delivery.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Mission {
    pub id: MissionId,
    #[cfg_attr(feature = "serde", serde(default))]
    pub name: String,
    /// Data generated per unit of effort.
    #[cfg_attr(feature = "serde", serde(rename = "s"))]
    pub data_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Connectivity {
    /// `t(l1, l2)`: UAVs at the two locations can exchange data.
    #[cfg_attr(feature = "serde", serde(rename = "uav"))]
    pub uav_to_uav: Vec<Vec<bool>>,
    /// `t(l, Ω)`: a UAV at the location reaches the cellular network.
    #[cfg_attr(feature = "serde", serde(rename = "network"))]
    pub uav_to_network: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Physics {
    /// Wh per kg to move between two locations in one epoch; the diagonal is
    /// the per-epoch hovering cost.
    #[cfg_attr(feature = "serde", serde(rename = "e"))]
    pub travel_energy: Vec<Vec<f64>>,
    /// Wh spent on the vertical descent and ascent of one delivery.
    #[cfg_attr(feature = "serde", serde(rename = "e_v"))]
    pub vertical_delivery_energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Scenario {
    #[cfg_attr(feature = "serde", serde(default))]
    pub name: String,
    pub horizon: Horizon,
    pub locations: Vec<Location>,
    /// Pairwise distances, km.
    #[cfg_attr(feature = "serde", serde(rename = "v"))]
    pub distance: Vec<Vec<f64>>,
    pub uavs: Vec<UavSpec>,
    pub payloads: Vec<Payload>,
    pub missions: Vec<Mission>,
    /// `n[k][m][l]`: service units needed per epoch.
    #[cfg_attr(feature = "serde", serde(rename = "n"))]
    pub demand: Vec<Vec<Vec<f64>>>,
    /// `q[l][m]`: service units per epoch a UAV at `l` provides.
    #[cfg_attr(feature = "serde", serde(rename = "q"))]
    pub quality: Vec<Vec<f64>>,
    #[cfg_attr(feature = "serde", serde(rename = "t"))]
    pub connectivity: Connectivity,
    pub physics: Physics,
}

impl Scenario {
    pub fn epochs(&self) -> usize {
        self.horizon.epochs
    }

    pub fn n_locations(&self) -> usize {
        self.locations.len()
    }

    pub fn n_uavs(&self) -> usize {
        self.uavs.len()
    }

    pub fn n_payloads(&self) -> usize {
        self.payloads.len()
    }

    pub fn n_missions(&self) -> usize {
        self.missions.len()
    }

    #[inline]
    pub fn n(&self, k: Epoch, m: MissionId, l: LocationId) -> f64 {
        self.demand[k][m][l]
    }

    #[inline]
    pub fn q(&self, l: LocationId, m: MissionId) -> f64 {
        self.quality[l][m]
    }

    #[inline]
    pub fn s(&self, m: MissionId) -> f64 {
        self.missions[m].data_rate
    }

    #[inline]
    pub fn v(&self, a: LocationId, b: LocationId) -> f64 {
        self.distance[a][b]
    }

    #[inline]
    pub fn e(&self, a: LocationId, b: LocationId) -> f64 {
        self.physics.travel_energy[a][b]
    }

    #[inline]
    pub fn t(&self, a: LocationId, b: LocationId) -> bool {
        self.connectivity.uav_to_uav[a][b]
    }

    #[inline]
    pub fn t_network(&self, l: LocationId) -> bool {
        self.connectivity.uav_to_network[l]
    }

    pub fn is_depot(&self, l: LocationId) -> bool {
        self.locations.get(l).is_some_and(|loc| loc.is_depot)
    }

    pub fn depots(&self) -> Vec<LocationId> {
        self.locations
            .iter()
            .filter(|l| l.is_depot)
            .map(|l| l.id)
            .collect()
    }

    /// The depot, for operations that assume a single one.
    pub fn single_depot(&self) -> Result<LocationId, ScenarioError> {
        let depots = self.depots();
        match depots.as_slice() {
            [d] => Ok(*d),
            _ => Err(ScenarioError::DepotCount(depots.len())),
        }
    }

    pub fn deliverables(&self) -> impl Iterator<Item = (PayloadId, &Delivery)> + '_ {
        self.payloads
            .iter()
            .filter_map(|p| p.delivery.as_ref().map(|d| (p.id, d)))
    }

    pub fn deliverable_ids(&self) -> Vec<PayloadId> {
        self.deliverables().map(|(p, _)| p).collect()
    }

    /// Payloads with `r(m,p) = 1`.
    pub fn required_equipment(&self, m: MissionId) -> impl Iterator<Item = PayloadId> + '_ {
        self.payloads
            .iter()
            .filter(move |p| p.equipment_for.contains(&m))
            .map(|p| p.id)
    }

    /// Non-deliverable payloads enabling at least one mission.
    pub fn equipment_ids(&self) -> Vec<PayloadId> {
        self.payloads
            .iter()
            .filter(|p| !p.is_deliverable() && !p.equipment_for.is_empty())
            .map(|p| p.id)
            .collect()
    }

    /// True when `carried` (sorted ids) holds every item mission `m` needs.
    pub fn equipped_for(&self, m: MissionId, carried: &[PayloadId]) -> bool {
        self.required_equipment(m)
            .all(|p| carried.binary_search(&p).is_ok())
    }

    /// Smallest per-epoch step over the fleet; the heuristics plan for it.
    pub fn fleet_step(&self) -> f64 {
        self.uavs
            .iter()
            .map(|u| u.max_step_distance)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest full-payload mass over the fleet.
    pub fn fleet_full_mass(&self) -> f64 {
        self.uavs.iter().map(UavSpec::full_mass).fold(0.0, f64::max)
    }

    /// Locations reachable from `l` in one epoch (including `l` itself).
    pub fn neighbors(&self, l: LocationId, step: f64) -> Vec<LocationId> {
        (0..self.n_locations())
            .filter(|&o| crate::fmath::le(self.v(l, o), step))
            .collect()
    }

    /// Adjacency lists of the movement graph for a given step length.
    pub fn movement_graph(&self, step: f64) -> Vec<Vec<LocationId>> {
        (0..self.n_locations())
            .map(|l| self.neighbors(l, step))
            .collect()
    }

    /// Hop distances (epochs) from each source set member, `None` when unreachable.
    pub fn hop_distances_from(&self, sources: &[LocationId], step: f64) -> Vec<Option<usize>> {
        bfs(&self.movement_graph(step), sources)
    }

    /// Σ over epochs and missions of the demand at `l`.
    pub fn total_demand_at(&self, l: LocationId) -> f64 {
        self.demand
            .iter()
            .flat_map(|per_m| per_m.iter().map(move |row| row[l]))
            .sum()
    }

    /// Number of `(k, m, l)` cells with positive demand.
    pub fn demand_cells(&self) -> usize {
        self.demand
            .iter()
            .flatten()
            .flatten()
            .filter(|&&n| n > 0.0)
            .count()
    }

    /// Check every structural invariant of the instance.
    pub fn check(&self) -> Result<(), ScenarioError> {
        let nl = self.n_locations();
        let nm = self.n_missions();
        let nk = self.epochs();
        if nk == 0 {
            return Err(invalid("horizon", "at least one epoch is required"));
        }
        if !(self.horizon.epoch_minutes > 0.0) {
            return Err(invalid("horizon", "epoch duration must be positive"));
        }
        for (i, loc) in self.locations.iter().enumerate() {
            ids("location", i, loc.id)?;
            if !loc.elevation.is_finite() || loc.elevation < 0.0 {
                return Err(invalid("elevation", format!("location {i}")));
            }
            if !loc.x.is_finite() || !loc.y.is_finite() {
                return Err(invalid("coordinates", format!("location {i}")));
            }
        }
        if !self.locations.iter().any(|l| l.is_depot) {
            return Err(ScenarioError::NoDepot);
        }
        square("v", &self.distance, nl)?;
        square("e", &self.physics.travel_energy, nl)?;
        square("t.uav", &self.connectivity.uav_to_uav, nl)?;
        shape("t.network", nl, self.connectivity.uav_to_network.len())?;
        for a in 0..nl {
            for b in 0..nl {
                let v = self.distance[a][b];
                if !v.is_finite() || v < 0.0 {
                    return Err(invalid("v", format!("({a},{b})")));
                }
                let e = self.physics.travel_energy[a][b];
                if !e.is_finite() || e < 0.0 {
                    return Err(invalid("e", format!("({a},{b})")));
                }
                if self.connectivity.uav_to_uav[a][b] != self.connectivity.uav_to_uav[b][a] {
                    return Err(ScenarioError::Connectivity(a, b));
                }
            }
            if !self.connectivity.uav_to_uav[a][a] {
                return Err(ScenarioError::Connectivity(a, a));
            }
            if self.distance[a][a] != 0.0 {
                return Err(invalid("v", format!("v({a},{a}) must be 0")));
            }
            if !(self.physics.travel_energy[a][a] > 0.0) {
                return Err(invalid("e", format!("hovering cost e({a},{a}) must be positive")));
            }
        }
        let ev = self.physics.vertical_delivery_energy;
        if !ev.is_finite() || ev < 0.0 {
            return Err(invalid("e_v", "must be finite and non-negative"));
        }
        for (i, u) in self.uavs.iter().enumerate() {
            ids("uav", i, u.id)?;
            let physical = [
                u.empty_weight,
                u.payload_capacity,
                u.battery_capacity,
                u.max_step_distance,
                u.radio_capacity,
            ];
            if physical.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                return Err(invalid("uav", format!("UAV {i}: physical quantities must be positive")));
            }
            if !u.parcel_capacity.is_finite()
                || u.parcel_capacity < 0.0
                || u.parcel_capacity > u.payload_capacity + EPS
            {
                return Err(invalid("delta", format!("UAV {i}: need 0 <= delta <= Y")));
            }
            shape("alpha", nm, u.mission_weights.len())?;
            if u.mission_weights.iter().any(|a| !(0.0..=1.0).contains(a))
                || u.mission_weights.iter().sum::<f64>() > 1.0 + EPS
            {
                return Err(invalid("alpha", format!("UAV {i}: weights in [0,1] summing to <= 1")));
            }
        }
        for (i, p) in self.payloads.iter().enumerate() {
            ids("payload", i, p.id)?;
            if !p.weight.is_finite() || p.weight < 0.0 {
                return Err(invalid("w", format!("payload {i}")));
            }
            if let Some(d) = &p.delivery {
                if d.earliest > d.latest || d.latest >= nk || d.target >= nl {
                    return Err(ScenarioError::BadDelivery { payload: i });
                }
            }
            if p.equipment_for.iter().any(|&m| m >= nm) {
                return Err(invalid("equipment_for", format!("payload {i}")));
            }
        }
        for (i, m) in self.missions.iter().enumerate() {
            ids("mission", i, m.id)?;
            if !m.data_rate.is_finite() || m.data_rate < 0.0 {
                return Err(invalid("s", format!("mission {i}")));
            }
        }
        shape("n", nk, self.demand.len())?;
        for per_m in &self.demand {
            shape("n[k]", nm, per_m.len())?;
            for row in per_m {
                shape("n[k][m]", nl, row.len())?;
                if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                    return Err(invalid("n", "demand must be finite and non-negative"));
                }
            }
        }
        shape("q", nl, self.quality.len())?;
        for row in &self.quality {
            shape("q[l]", nm, row.len())?;
            if row.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(invalid("q", "quality must be finite and non-negative"));
            }
        }
        Ok(())
    }

    /// Extra preconditions shared by the route-graph heuristics.
    pub fn check_for_heuristics(&self) -> Result<LocationId, ScenarioError> {
        self.check()?;
        let depot = self.single_depot()?;
        for (p, d) in self.deliverables() {
            if d.target == depot {
                return Err(ScenarioError::DeliveryAtDepot { payload: p });
            }
        }
        Ok(depot)
    }
}

fn invalid(what: &'static str, detail: impl Into<String>) -> ScenarioError {
    ScenarioError::InvalidValue {
        what,
        detail: detail.into(),
    }
}

fn ids(kind: &'static str, index: usize, id: usize) -> Result<(), ScenarioError> {
    if index == id {
        Ok(())
    } else {
        Err(ScenarioError::IdMismatch { kind, index, id })
    }
}

fn shape(table: &'static str, expected: usize, found: usize) -> Result<(), ScenarioError> {
    if expected == found {
        Ok(())
    } else {
        Err(ScenarioError::Shape {
            table,
            expected,
            found,
        })
    }
}

fn square<T>(table: &'static str, rows: &[Vec<T>], n: usize) -> Result<(), ScenarioError> {
    shape(table, n, rows.len())?;
    rows.iter().try_for_each(|r| shape(table, n, r.len()))
}

/// Multi-source breadth-first hop distances.
pub(crate) fn bfs(adj: &[Vec<LocationId>], sources: &[LocationId]) -> Vec<Option<usize>> {
    let mut dist = vec![None; adj.len()];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap_or(0);
        for &w in &adj[u] {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::line3;

    #[test]
    fn line_instance_is_well_formed() {
        let s = line3();
        assert_eq!(s.check(), Ok(()));
        assert_eq!(s.single_depot(), Ok(0));
        assert_eq!(s.neighbors(1, 1.0), vec![0, 1, 2]);
        assert_eq!(s.hop_distances_from(&[0], 1.0), vec![Some(0), Some(1), Some(2)]);
    }

    #[test]
    fn rejects_missing_depot_and_bad_tables() {
        let mut s = line3();
        for l in &mut s.locations {
            l.is_depot = false;
        }
        assert_eq!(s.check(), Err(ScenarioError::NoDepot));

        let mut s = line3();
        s.connectivity.uav_to_uav[0][2] = false;
        assert_eq!(s.check(), Err(ScenarioError::Connectivity(0, 2)));

        let mut s = line3();
        s.physics.travel_energy[1][1] = 0.0;
        assert!(matches!(s.check(), Err(ScenarioError::InvalidValue { what: "e", .. })));

        let mut s = line3();
        s.uavs[0].parcel_capacity = s.uavs[0].payload_capacity + 1.0;
        assert!(matches!(s.check(), Err(ScenarioError::InvalidValue { what: "delta", .. })));

        let mut s = line3();
        s.demand.pop();
        assert!(matches!(s.check(), Err(ScenarioError::Shape { table: "n", .. })));
    }

    #[test]
    fn rejects_inverted_window() {
        let mut s = line3();
        let p = s.deliverable_ids()[0];
        s.payloads[p].delivery = Some(Delivery {
            target: 2,
            earliest: 4,
            latest: 2,
        });
        assert_eq!(s.check(), Err(ScenarioError::BadDelivery { payload: p }));
    }
}
