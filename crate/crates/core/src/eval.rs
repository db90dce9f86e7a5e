//! Objective, battery trajectories and relay reachability.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::{Epoch, LocationId, MissionId, MissionPlan, PayloadId, Scenario, UavId};

/// σ(k,m,l) for one demanded cell.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct SigmaCell {
    pub epoch: Epoch,
    pub mission: MissionId,
    pub location: LocationId,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct EvaluationReport {
    /// Cells with positive demand, ordered by (epoch, mission, location).
    pub sigma: Vec<SigmaCell>,
    pub theta: f64,
    /// Σσ restricted to each mission.
    pub theta_by_mission: Vec<f64>,
    /// Number of demanded cells per mission.
    pub cells_by_mission: Vec<usize>,
    /// Wh spent in flight by each UAV over the horizon.
    pub energy_used: Vec<f64>,
    /// First epoch each payload was delivered (`None` for non-deliverables or misses).
    pub delivery_epochs: Vec<Option<Epoch>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub battery: Vec<f64>,
    /// First epoch at which the battery drops below zero.
    pub underflow: Option<Epoch>,
}

/// Σ_d μq/n over UAVs located at `l`, capped at 1; `None` when `n(k,m,l) = 0`.
pub fn satisfaction(
    s: &Scenario,
    plan: &MissionPlan,
    k: Epoch,
    m: MissionId,
    l: LocationId,
) -> Option<f64> {
    let n = s.n(k, m, l);
    if n <= 0.0 {
        return None;
    }
    let served: f64 = plan
        .tracks
        .iter()
        .filter(|t| t.location[k] == l)
        .map(|t| t.effort[k][m] * s.q(l, m))
        .sum();
    Some((served / n).min(1.0))
}

/// Θ: sum of σ over cells with positive demand.
pub fn objective(s: &Scenario, plan: &MissionPlan) -> f64 {
    let mut total = 0.0;
    for k in 0..s.epochs() {
        for m in 0..s.n_missions() {
            for l in 0..s.n_locations() {
                if let Some(x) = satisfaction(s, plan, k, m, l) {
                    total += x;
                }
            }
        }
    }
    total
}

/// Carried mass of `uav` at `k` (empty weight excluded).
pub fn carried_mass(s: &Scenario, plan: &MissionPlan, uav: UavId, k: Epoch) -> f64 {
    plan.tracks[uav].carried[k]
        .iter()
        .map(|&p| s.payloads[p].weight)
        .sum()
}

/// Distinct deliverable payloads `uav` hands over at epoch `k`.
pub(crate) fn delivered_at(plan: &MissionPlan, s: &Scenario, uav: UavId, k: Epoch) -> usize {
    let mut ps: Vec<PayloadId> = plan
        .events_at(uav, k)
        .filter(|e| s.payloads[e.payload].is_deliverable())
        .map(|e| e.payload)
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps.len()
}

/// Energy drawn between `k-1` and `k`.
pub(crate) fn step_energy(s: &Scenario, plan: &MissionPlan, uav: UavId, k: Epoch) -> f64 {
    let t = &plan.tracks[uav];
    let mass = s.uavs[uav].empty_weight + carried_mass(s, plan, uav, k);
    s.e(t.location[k - 1], t.location[k]) * mass
        + s.physics.vertical_delivery_energy * delivered_at(plan, s, uav, k) as f64
}

/// Battery trajectory implied by the plan: full at epoch 0 and at every depot
/// epoch, otherwise drained by movement, hovering and deliveries.
pub fn energy_profile(s: &Scenario, plan: &MissionPlan, uav: UavId) -> EnergyProfile {
    let cap = s.uavs[uav].battery_capacity;
    let track = &plan.tracks[uav];
    let mut battery = Vec::with_capacity(s.epochs());
    let mut underflow = None;
    for k in 0..s.epochs() {
        let b = if k == 0 || s.is_depot(track.location[k]) {
            cap
        } else {
            battery[k - 1] - step_energy(s, plan, uav, k)
        };
        if b < -crate::EPS && underflow.is_none() {
            underflow = Some(k);
        }
        battery.push(b);
    }
    EnergyProfile { battery, underflow }
}

/// Wh spent in flight, excluding epochs spent landed at a depot.
pub fn energy_used(s: &Scenario, plan: &MissionPlan, uav: UavId) -> f64 {
    let loc = &plan.tracks[uav].location;
    (1..s.epochs())
        .filter(|&k| !(s.is_depot(loc[k - 1]) && loc[k - 1] == loc[k]))
        .map(|k| step_energy(s, plan, uav, k))
        .sum()
}

/// Maximal τ for UAVs at the given locations: reachability from the
/// network-connected UAVs over the UAV-to-UAV link graph.
pub fn relay_closure_at(s: &Scenario, locations: &[LocationId]) -> Vec<bool> {
    let n = locations.len();
    let mut tau = vec![false; n];
    let mut queue = VecDeque::new();
    for (d, &l) in locations.iter().enumerate() {
        if s.t_network(l) {
            tau[d] = true;
            queue.push_back(d);
        }
    }
    while let Some(d) = queue.pop_front() {
        for o in 0..n {
            if !tau[o] && s.t(locations[d], locations[o]) {
                tau[o] = true;
                queue.push_back(o);
            }
        }
    }
    tau
}

/// [`relay_closure_at`] for the plan's positions at epoch `k`.
pub fn relay_closure(s: &Scenario, plan: &MissionPlan, k: Epoch) -> Vec<bool> {
    let locs: Vec<LocationId> = plan.tracks.iter().map(|t| t.location[k]).collect();
    relay_closure_at(s, &locs)
}

/// Direct link, or one relay through a directly connected UAV.
pub fn one_hop_connectivity(s: &Scenario, locations: &[LocationId]) -> Vec<bool> {
    locations
        .iter()
        .enumerate()
        .map(|(d, &l)| {
            s.t_network(l)
                || locations
                    .iter()
                    .enumerate()
                    .any(|(o, &lo)| o != d && s.t(l, lo) && s.t_network(lo))
        })
        .collect()
}

pub fn evaluate(s: &Scenario, plan: &MissionPlan) -> EvaluationReport {
    let nm = s.n_missions();
    let mut sigma = Vec::new();
    let mut theta = 0.0;
    let mut theta_by_mission = vec![0.0; nm];
    let mut cells_by_mission = vec![0usize; nm];
    for k in 0..s.epochs() {
        for m in 0..nm {
            for l in 0..s.n_locations() {
                if let Some(x) = satisfaction(s, plan, k, m, l) {
                    sigma.push(SigmaCell {
                        epoch: k,
                        mission: m,
                        location: l,
                        sigma: x,
                    });
                    theta += x;
                    theta_by_mission[m] += x;
                    cells_by_mission[m] += 1;
                }
            }
        }
    }
    let energy_used = (0..s.n_uavs()).map(|d| energy_used(s, plan, d)).collect();
    let mut delivery_epochs = vec![None; s.n_payloads()];
    for e in &plan.deliveries {
        let slot: &mut Option<Epoch> = &mut delivery_epochs[e.payload];
        if s.payloads[e.payload].is_deliverable() && slot.is_none_or(|k| e.epoch < k) {
            *slot = Some(e.epoch);
        }
    }
    EvaluationReport {
        sigma,
        theta,
        theta_by_mission,
        cells_by_mission,
        energy_used,
        delivery_epochs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{line, line3};
    use proptest::prelude::*;

    #[test]
    fn satisfaction_examples() {
        let mut s = line(2, 2, 2, &[1.0]);
        let mut p = MissionPlan::idle(&s);
        assert_eq!(satisfaction(&s, &p, 1, 0, 1), None);

        s.demand[1][0][1] = 5.0;
        s.quality[1][0] = 5.0;
        p.tracks[0].location[1] = 1;
        p.tracks[0].effort[1][0] = 1.0;
        assert_eq!(satisfaction(&s, &p, 1, 0, 1), Some(1.0));

        s.demand[1][0][1] = 8.0;
        s.quality[1][0] = 4.0;
        p.tracks[1].location[1] = 1;
        p.tracks[0].effort[1][0] = 0.5;
        p.tracks[1].effort[1][0] = 0.5;
        assert_eq!(satisfaction(&s, &p, 1, 0, 1), Some(0.5));
        assert_eq!(objective(&s, &p), 0.5);
    }

    #[test]
    fn idle_plan_keeps_full_battery() {
        let s = line3();
        let p = MissionPlan::idle(&s);
        let prof = energy_profile(&s, &p, 0);
        assert!(prof.battery.iter().all(|&b| b == 100.0));
        assert_eq!(prof.underflow, None);
        assert_eq!(energy_used(&s, &p, 0), 0.0);
    }

    #[test]
    fn delivery_costs_exactly_e_v() {
        let s = line3();
        let mut p = MissionPlan::idle(&s);
        let t = &mut p.tracks[0];
        t.location = vec![0, 1, 2, 2, 1, 0];
        t.carried = vec![vec![1]; 6];
        let without = energy_profile(&s, &p, 0).battery;
        p.deliveries.push(crate::DeliveryEvent {
            uav: 0,
            payload: 1,
            epoch: 2,
        });
        let with = energy_profile(&s, &p, 0).battery;
        assert!((without[2] - with[2] - 0.1).abs() < 1e-12);
        assert!((without[4] - with[4] - 0.1).abs() < 1e-12);
        assert_eq!(with[5], 100.0);
        // mass 1.2 kg; hops 1, 1, hover 0.5, 1
        assert!((with[4] - (100.0 - 1.2 * 3.5 - 0.1)).abs() < 1e-12);
    }

    #[test]
    fn relay_chain_reaches_network_through_neighbours() {
        let mut s = line(4, 1, 3, &[]);
        s.connectivity.uav_to_network = vec![false, false, false, true];
        for a in 0..4 {
            for b in 0..4 {
                s.connectivity.uav_to_uav[a][b] = (a as i64 - b as i64).abs() <= 1;
            }
        }
        assert_eq!(relay_closure_at(&s, &[1, 2, 3]), vec![true, true, true]);
        assert_eq!(one_hop_connectivity(&s, &[1, 2, 3]), vec![false, true, true]);
        assert_eq!(relay_closure_at(&s, &[3]), vec![true]);
        assert_eq!(relay_closure_at(&s, &[2]), vec![false]);
    }

    fn bfs_oracle(adj: &[Vec<bool>], roots: &[bool]) -> Vec<bool> {
        let n = roots.len();
        let mut seen = roots.to_vec();
        let mut stack: Vec<usize> = (0..n).filter(|&i| roots[i]).collect();
        while let Some(u) = stack.pop() {
            for v in 0..n {
                if adj[u][v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen
    }

    proptest! {
        #[test]
        fn relay_closure_is_maximal_fixed_point(
            links in proptest::collection::vec(any::<bool>(), 36),
            net in proptest::collection::vec(any::<bool>(), 6),
            locs in proptest::collection::vec(0usize..6, 1..6),
        ) {
            let mut s = line(6, 1, 1, &[]);
            for a in 0..6 {
                for b in 0..6 {
                    let x = if a == b { true } else { links[a.min(b) * 6 + a.max(b)] };
                    s.connectivity.uav_to_uav[a][b] = x;
                }
            }
            s.connectivity.uav_to_network = net.clone();
            let tau = relay_closure_at(&s, &locs);
            let n = locs.len();
            let adj: Vec<Vec<bool>> = (0..n)
                .map(|i| (0..n).map(|j| i != j && s.t(locs[i], locs[j])).collect())
                .collect();
            let roots: Vec<bool> = locs.iter().map(|&l| net[l]).collect();
            prop_assert_eq!(&tau, &bfs_oracle(&adj, &roots));
            // consistency and maximality under one flip
            for d in 0..n {
                let supported = roots[d] || (0..n).any(|o| adj[d][o] && tau[o]);
                prop_assert_eq!(tau[d], supported);
            }
            let hop = one_hop_connectivity(&s, &locs);
            for d in 0..n {
                prop_assert!(!hop[d] || tau[d]);
            }
        }
    }
}
