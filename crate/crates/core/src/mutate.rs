//! Targeted corruptions of valid plans.
//!
//! Each [`Mutation`] breaks exactly one constraint family and repairs whatever
//! else the change would drag along (battery trajectory, relay flags, effort),
//! so a correct validator must report that family and nothing else.

use alloc::vec::Vec;

use rand::Rng;

use crate::eval::carried_mass;
use crate::{energy_profile, relay_closure, Constraint, Epoch, MissionPlan, Scenario, UavId, EPS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mutation {
    /// Jump farther than the step distance in one epoch.
    Teleport,
    /// Load more than the payload capacity while parked.
    Overload,
    /// Drive the battery below zero.
    BatteryUnderflow,
    /// Drop an unused item away from a depot.
    ManifestChange,
    /// Move a delivery outside its window.
    LateDelivery,
    /// Claim a relay path that does not exist.
    RelayClaim,
    /// Generate more data than the radio can carry.
    RadioOverload,
}

impl Mutation {
    pub const ALL: [Mutation; 7] = [
        Mutation::Teleport,
        Mutation::Overload,
        Mutation::BatteryUnderflow,
        Mutation::ManifestChange,
        Mutation::LateDelivery,
        Mutation::RelayClaim,
        Mutation::RadioOverload,
    ];

    pub fn intended(self) -> Constraint {
        match self {
            Mutation::Teleport => Constraint::Eq2,
            Mutation::Overload => Constraint::Eq3,
            Mutation::BatteryUnderflow => Constraint::Eq5,
            Mutation::ManifestChange => Constraint::Eq4,
            Mutation::LateDelivery => Constraint::Eq7,
            Mutation::RelayClaim => Constraint::Eq10,
            Mutation::RadioOverload => Constraint::Eq11,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mutation::Teleport => "teleport",
            Mutation::Overload => "overload",
            Mutation::BatteryUnderflow => "battery-underflow",
            Mutation::ManifestChange => "manifest-change",
            Mutation::LateDelivery => "late-delivery",
            Mutation::RelayClaim => "relay-claim",
            Mutation::RadioOverload => "radio-overload",
        }
    }

    /// Apply to a random applicable site of `plan`, which must be valid.
    /// `None` when the plan offers no such site.
    pub fn apply<R: Rng + ?Sized>(self, s: &Scenario, plan: &MissionPlan, rng: &mut R) -> Option<MissionPlan> {
        let sites = match self {
            Mutation::Teleport => teleport_sites(s, plan),
            Mutation::Overload => overload_sites(s, plan),
            Mutation::BatteryUnderflow => underflow_sites(s, plan),
            Mutation::ManifestChange => manifest_sites(s, plan),
            Mutation::LateDelivery => late_sites(s, plan),
            Mutation::RelayClaim => relay_sites(s, plan),
            Mutation::RadioOverload => radio_sites(s, plan),
        };
        if sites.is_empty() {
            return None;
        }
        Some(sites[rng.gen_range(0..sites.len())].clone())
    }
}

/// First depot epoch after `k`, or the horizon length.
fn stint_end(s: &Scenario, plan: &MissionPlan, d: UavId, k: Epoch) -> Epoch {
    let loc = &plan.tracks[d].location;
    (k + 1..s.epochs()).find(|&j| s.is_depot(loc[j])).unwrap_or(s.epochs())
}

fn reprofile(s: &Scenario, plan: &mut MissionPlan, d: UavId) -> bool {
    let p = energy_profile(s, plan, d);
    plan.tracks[d].battery = p.battery;
    p.underflow.is_none()
}

/// Intersect τ with the relay closure at `k` and drop effort that lost its link.
fn repair_relay(s: &Scenario, plan: &mut MissionPlan, k: Epoch) {
    let closure = relay_closure(s, plan, k);
    for (t, ok) in plan.tracks.iter_mut().zip(closure) {
        t.relay[k] &= ok;
        if !t.relay[k] {
            t.effort[k].iter_mut().for_each(|x| *x = 0.0);
        }
    }
}

fn teleport_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let nk = s.epochs();
    let mut out = Vec::new();
    for (d, t) in plan.tracks.iter().enumerate() {
        let v = s.uavs[d].max_step_distance;
        for k in 1..nk.saturating_sub(1) {
            if plan.events_at(d, k).next().is_some()
                || t.carried[k - 1] != t.carried[k]
                || t.carried[k] != t.carried[k + 1]
            {
                continue;
            }
            for l in 0..s.n_locations() {
                if l == t.location[k] || s.v(t.location[k - 1], l) <= v + EPS {
                    continue;
                }
                let mut q = plan.clone();
                q.tracks[d].location[k] = l;
                q.tracks[d].effort[k].iter_mut().for_each(|x| *x = 0.0);
                repair_relay(s, &mut q, k);
                if reprofile(s, &mut q, d) {
                    out.push(q);
                }
            }
        }
    }
    out
}

fn overload_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let nk = s.epochs();
    let mut out = Vec::new();
    for (d, t) in plan.tracks.iter().enumerate() {
        for k in 0..nk {
            let parked_next = k + 1 == nk || s.is_depot(t.location[k + 1]);
            if !s.is_depot(t.location[k]) || !parked_next {
                continue;
            }
            let mut q = plan.clone();
            q.tracks[d].carried[k] = (0..s.n_payloads()).collect();
            if carried_mass(s, &q, d, k) > s.uavs[d].payload_capacity + EPS {
                out.push(q);
            }
        }
    }
    out
}

fn underflow_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let mut out = Vec::new();
    for d in 0..plan.tracks.len() {
        for k in 0..s.epochs() {
            let mut q = plan.clone();
            let b = &mut q.tracks[d].battery;
            let drop = b[k] + 1.0;
            for x in &mut b[k..stint_end(s, plan, d, k)] {
                *x -= drop;
            }
            out.push(q);
        }
    }
    out
}

fn manifest_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let mut out = Vec::new();
    for (d, t) in plan.tracks.iter().enumerate() {
        for k in 1..s.epochs() {
            if s.is_depot(t.location[k]) {
                continue;
            }
            let end = stint_end(s, plan, d, k);
            for &p in &t.carried[k] {
                let needed = (k..end).any(|j| {
                    plan.events_at(d, j).any(|e| e.payload == p)
                        || (0..s.n_missions()).any(|m| {
                            t.effort[j][m] > EPS && s.required_equipment(m).any(|r| r == p)
                        })
                });
                if needed {
                    continue;
                }
                let mut q = plan.clone();
                for c in &mut q.tracks[d].carried[k..end] {
                    c.retain(|&x| x != p);
                }
                out.push(q);
            }
        }
    }
    out
}

fn late_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let mut out = Vec::new();
    for (i, e) in plan.deliveries.iter().enumerate() {
        let Some(win) = s.payloads[e.payload].delivery else {
            continue;
        };
        for k in (0..s.epochs()).filter(|&k| !win.contains(k)) {
            let mut q = plan.clone();
            q.deliveries[i].epoch = k;
            q.normalize();
            if reprofile(s, &mut q, e.uav) {
                out.push(q);
            }
        }
    }
    out
}

fn relay_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let mut out = Vec::new();
    for k in 0..s.epochs() {
        let closure = relay_closure(s, plan, k);
        for (d, ok) in closure.into_iter().enumerate() {
            if !ok && !plan.tracks[d].relay[k] {
                let mut q = plan.clone();
                q.tracks[d].relay[k] = true;
                out.push(q);
            }
        }
    }
    out
}

/// Raise effort up to the demand and equipment limits until the data exceeds T;
/// where that cannot happen, cut the link of a UAV that is sending data.
fn radio_sites(s: &Scenario, plan: &MissionPlan) -> Vec<MissionPlan> {
    let mut out = Vec::new();
    for k in 0..s.epochs() {
        for (d, t) in plan.tracks.iter().enumerate() {
            if !t.relay[k] {
                continue;
            }
            let l = t.location[k];
            let mut q = plan.clone();
            for m in 0..s.n_missions() {
                let qual = s.q(l, m);
                if qual <= 0.0 || !s.equipped_for(m, &t.carried[k]) {
                    continue;
                }
                let others: f64 = plan
                    .tracks
                    .iter()
                    .enumerate()
                    .filter(|&(o, u)| o != d && u.location[k] == l)
                    .map(|(_, u)| u.effort[k][m] * qual)
                    .sum();
                let room = ((s.n(k, m, l) - others) / qual).clamp(0.0, 1.0);
                q.tracks[d].effort[k][m] = room.max(t.effort[k][m]);
            }
            let data: f64 = (0..s.n_missions()).map(|m| q.tracks[d].effort[k][m] * s.s(m)).sum();
            if data > s.uavs[d].radio_capacity + 1e-6 {
                out.push(q);
            }
        }
    }
    if out.is_empty() {
        for k in 0..s.epochs() {
            for (d, t) in plan.tracks.iter().enumerate() {
                let data: f64 = (0..s.n_missions()).map(|m| t.effort[k][m] * s.s(m)).sum();
                if t.relay[k] && data > 1e-6 {
                    let mut q = plan.clone();
                    q.tracks[d].relay[k] = false;
                    out.push(q);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::tiny::{tiny, TinySpec};
    use crate::graph::build_graph;
    use crate::planner::{plan_insertion, PlannerOptions, Weights};
    use crate::validate_plan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn every_mutation_hits_its_family_alone() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut hits = [0usize; 7];
        for seed in 0..60 {
            let s = tiny(seed, TinySpec::default());
            let g = build_graph(&s, 3).unwrap();
            let Ok(plan) = plan_insertion(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()) else {
                continue;
            };
            for (i, m) in Mutation::ALL.into_iter().enumerate() {
                if let Some(bad) = m.apply(&s, &plan, &mut rng) {
                    let f = validate_plan(&s, &bad).unwrap().failed();
                    assert_eq!(f, alloc::vec![m.intended()], "{} on {}", m.name(), s.name);
                    hits[i] += 1;
                }
            }
        }
        // tiny payload sets never outweigh Y
        assert_eq!(hits[1], 0);
        assert!(hits.iter().enumerate().all(|(i, &h)| i == 1 || h > 0), "{hits:?}");
    }

    #[test]
    fn overload_on_generated_scenario() {
        let (s, plan) = (0..20)
            .find_map(|seed| {
                let s = crate::gen::generate(&crate::gen::GenParams::small(), seed).unwrap();
                let g = build_graph(&s, 3).unwrap();
                let p = plan_insertion(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).ok()?;
                Some((s, p))
            })
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let bad = Mutation::Overload.apply(&s, &plan, &mut rng).unwrap();
        assert_eq!(validate_plan(&s, &bad).unwrap().failed(), alloc::vec![Constraint::Eq3]);
    }
}
