//! Constraint checker for mission plans.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::eval::{carried_mass, delivered_at, relay_closure_at};
use crate::fmath::le;
use crate::{Epoch, LocationId, MissionId, MissionPlan, PayloadId, PlanError, Scenario, UavId};

/// Constraint families, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub enum Constraint {
    /// One valid location per UAV and epoch.
    Eq1,
    /// Consecutive locations within the step distance V.
    Eq2,
    /// Carried weight within Y.
    Eq3,
    /// Manifest unchanged away from depots.
    Eq4,
    /// Battery within [0, E].
    Eq5,
    /// Battery drain by movement, hovering and deliveries.
    Eq6,
    /// Every deliverable handed over at its target within its window.
    Eq7,
    /// Mission effort only with the required equipment on board.
    Eq8,
    /// Served quality at a location within its demand.
    Eq9,
    /// Relay flag backed by a path to the network.
    Eq10,
    /// Generated data within the radio capacity of connected UAVs.
    Eq11,
    /// Start and end the horizon at a depot.
    Anchor,
}

impl Constraint {
    pub const ALL: [Constraint; 12] = [
        Constraint::Eq1,
        Constraint::Eq2,
        Constraint::Eq3,
        Constraint::Eq4,
        Constraint::Eq5,
        Constraint::Eq6,
        Constraint::Eq7,
        Constraint::Eq8,
        Constraint::Eq9,
        Constraint::Eq10,
        Constraint::Eq11,
        Constraint::Anchor,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Constraint::Eq1 => "EQ1",
            Constraint::Eq2 => "EQ2",
            Constraint::Eq3 => "EQ3",
            Constraint::Eq4 => "EQ4",
            Constraint::Eq5 => "EQ5",
            Constraint::Eq6 => "EQ6",
            Constraint::Eq7 => "EQ7",
            Constraint::Eq8 => "EQ8",
            Constraint::Eq9 => "EQ9",
            Constraint::Eq10 => "EQ10",
            Constraint::Eq11 => "EQ11",
            Constraint::Anchor => "ANCHOR",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

/// Indices `(d, k, l, p, m)` locating a violation; unused ones are `None`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Witness {
    #[cfg_attr(feature = "serde", serde(rename = "d", skip_serializing_if = "Option::is_none", default))]
    pub uav: Option<UavId>,
    #[cfg_attr(feature = "serde", serde(rename = "k", skip_serializing_if = "Option::is_none", default))]
    pub epoch: Option<Epoch>,
    #[cfg_attr(feature = "serde", serde(rename = "l", skip_serializing_if = "Option::is_none", default))]
    pub location: Option<LocationId>,
    #[cfg_attr(feature = "serde", serde(rename = "p", skip_serializing_if = "Option::is_none", default))]
    pub payload: Option<PayloadId>,
    #[cfg_attr(feature = "serde", serde(rename = "m", skip_serializing_if = "Option::is_none", default))]
    pub mission: Option<MissionId>,
}

impl Witness {
    fn dk(d: UavId, k: Epoch) -> Self {
        Self {
            uav: Some(d),
            epoch: Some(k),
            ..Self::default()
        }
    }

    fn with_l(mut self, l: LocationId) -> Self {
        self.location = Some(l);
        self
    }

    fn with_p(mut self, p: PayloadId) -> Self {
        self.payload = Some(p);
        self
    }

    fn with_m(mut self, m: MissionId) -> Self {
        self.mission = Some(m);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ConstraintOutcome {
    pub constraint: Constraint,
    pub witnesses: Vec<Witness>,
}

impl ConstraintOutcome {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// One outcome per family, in [`Constraint::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ValidationReport {
    pub outcomes: Vec<ConstraintOutcome>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.outcomes.iter().all(ConstraintOutcome::passed)
    }

    pub fn failed(&self) -> Vec<Constraint> {
        self.outcomes
            .iter()
            .filter(|o| !o.passed())
            .map(|o| o.constraint)
            .collect()
    }

    pub fn witnesses(&self, c: Constraint) -> &[Witness] {
        self.outcomes
            .iter()
            .find(|o| o.constraint == c)
            .map_or(&[], |o| o.witnesses.as_slice())
    }

    pub fn violation_count(&self) -> usize {
        self.outcomes.iter().map(|o| o.witnesses.len()).sum()
    }
}

struct Ledger(Vec<Vec<Witness>>);

impl Ledger {
    fn push(&mut self, c: Constraint, w: Witness) {
        self.0[c as usize].push(w);
    }
}

/// Check `plan` against every constraint family. Malformed plans
/// (wrong dimensions, unknown ids, non-finite values) are rejected with an error.
pub fn validate_plan(s: &Scenario, plan: &MissionPlan) -> Result<ValidationReport, PlanError> {
    plan.check_dimensions(s)?;
    let nk = s.epochs();
    let nl = s.n_locations();
    let nm = s.n_missions();
    let mut out = Ledger(vec![Vec::new(); Constraint::ALL.len()]);

    let located = |d: UavId, k: Epoch| plan.tracks[d].location[k] < nl;

    for (d, t) in plan.tracks.iter().enumerate() {
        let u = &s.uavs[d];
        for k in 0..nk {
            let l = t.location[k];
            if l >= nl {
                out.push(Constraint::Eq1, Witness::dk(d, k).with_l(l));
            }
        }
        for &k in &[0, nk - 1] {
            if located(d, k) && !s.is_depot(t.location[k]) {
                out.push(Constraint::Anchor, Witness::dk(d, k).with_l(t.location[k]));
            }
        }
        for k in 1..nk {
            if located(d, k) && located(d, k - 1) {
                let (a, b) = (t.location[k - 1], t.location[k]);
                if !le(s.v(a, b), u.max_step_distance) {
                    out.push(Constraint::Eq2, Witness::dk(d, k).with_l(b));
                }
            }
        }
        for k in 0..nk {
            if !le(carried_mass(s, plan, d, k), u.payload_capacity) {
                out.push(Constraint::Eq3, Witness::dk(d, k));
            }
        }
        for k in 1..nk {
            if !located(d, k) || s.is_depot(t.location[k]) {
                continue;
            }
            let (prev, cur) = (&t.carried[k - 1], &t.carried[k]);
            if prev != cur {
                for &p in symmetric_difference(prev, cur).iter() {
                    out.push(Constraint::Eq4, Witness::dk(d, k).with_l(t.location[k]).with_p(p));
                }
            }
        }
        for k in 0..nk {
            let b = t.battery[k];
            if !le(0.0, b) || !le(b, u.battery_capacity) {
                out.push(Constraint::Eq5, Witness::dk(d, k));
            }
        }
        for k in 1..nk {
            if !located(d, k) || !located(d, k - 1) || s.is_depot(t.location[k]) {
                continue;
            }
            let mass = u.empty_weight + carried_mass(s, plan, d, k);
            let drain = s.e(t.location[k - 1], t.location[k]) * mass
                + s.physics.vertical_delivery_energy * delivered_at(plan, s, d, k) as f64;
            if !le(t.battery[k], t.battery[k - 1] - drain) {
                out.push(Constraint::Eq6, Witness::dk(d, k).with_l(t.location[k]));
            }
        }
        for k in 0..nk {
            for m in 0..nm {
                if t.effort[k][m] > crate::EPS {
                    let missing = s.required_equipment(m).find(|&p| !t.carries(k, p));
                    if let Some(p) = missing {
                        out.push(Constraint::Eq8, Witness::dk(d, k).with_m(m).with_p(p));
                    }
                }
            }
        }
    }

    // EQ7: deliveries.
    let mut served = vec![false; s.n_payloads()];
    for e in &plan.deliveries {
        let w = Witness::dk(e.uav, e.epoch).with_p(e.payload);
        let ok = match &s.payloads[e.payload].delivery {
            None => false,
            Some(win) => {
                win.contains(e.epoch)
                    && plan.tracks[e.uav].location[e.epoch] == win.target
                    && plan.tracks[e.uav].carries(e.epoch, e.payload)
            }
        };
        if ok {
            served[e.payload] = true;
        } else {
            let l = plan.tracks[e.uav].location[e.epoch];
            out.push(Constraint::Eq7, w.with_l(l));
        }
    }
    for (p, win) in s.deliverables() {
        if !served[p] {
            out.push(
                Constraint::Eq7,
                Witness {
                    payload: Some(p),
                    location: Some(win.target),
                    ..Witness::default()
                },
            );
        }
    }

    // Per-epoch fleet-level families.
    for k in 0..nk {
        if (0..plan.tracks.len()).any(|d| !located(d, k)) {
            continue;
        }
        let locs: Vec<LocationId> = plan.tracks.iter().map(|t| t.location[k]).collect();
        for m in 0..nm {
            for l in 0..nl {
                let served: f64 = plan
                    .tracks
                    .iter()
                    .filter(|t| t.location[k] == l)
                    .map(|t| t.effort[k][m] * s.q(l, m))
                    .sum();
                if served > 0.0 && !le(served, s.n(k, m, l)) {
                    out.push(
                        Constraint::Eq9,
                        Witness {
                            epoch: Some(k),
                            location: Some(l),
                            mission: Some(m),
                            ..Witness::default()
                        },
                    );
                }
            }
        }
        let closure = relay_closure_at(s, &locs);
        for (d, t) in plan.tracks.iter().enumerate() {
            if t.relay[k] && !closure[d] {
                out.push(Constraint::Eq10, Witness::dk(d, k).with_l(locs[d]));
            }
            let data: f64 = (0..nm).map(|m| t.effort[k][m] * s.s(m)).sum();
            let cap = if t.relay[k] { s.uavs[d].radio_capacity } else { 0.0 };
            if data > 0.0 && !le(data, cap) {
                out.push(Constraint::Eq11, Witness::dk(d, k).with_l(locs[d]));
            }
        }
    }

    let outcomes = Constraint::ALL
        .iter()
        .zip(out.0)
        .map(|(&constraint, witnesses)| ConstraintOutcome {
            constraint,
            witnesses,
        })
        .collect();
    Ok(ValidationReport { outcomes })
}

fn symmetric_difference(a: &[PayloadId], b: &[PayloadId]) -> Vec<PayloadId> {
    let mut out: Vec<PayloadId> = a
        .iter()
        .filter(|p| b.binary_search(p).is_err())
        .chain(b.iter().filter(|p| a.binary_search(p).is_err()))
        .copied()
        .collect();
    out.sort_unstable();
    out
}
