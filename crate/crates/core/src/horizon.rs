//! Consecutive planning horizons.
//!
//! The planners build one tour per UAV. Longer missions are planned as `J`
//! disjoint horizons run back to back: deliveries are bucketed by deadline,
//! each horizon is planned as its own scenario, and the per-horizon plans are
//! concatenated.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use crate::{energy_profile, Epoch, MissionPlan, Scenario};

/// Epochs one UAV can stay airborne on a full battery at full payload,
/// comparing the cheaper of hovering and stepping.
pub fn endurance_epochs(s: &Scenario) -> usize {
    let mut worst = usize::MAX;
    for u in &s.uavs {
        let adj = s.movement_graph(u.max_step_distance);
        let mut cheapest = f64::INFINITY;
        for (a, row) in adj.iter().enumerate() {
            for &b in row {
                cheapest = cheapest.min(s.e(a, b));
            }
        }
        let per_epoch = cheapest * u.full_mass();
        let n = if per_epoch > 0.0 {
            libm::floor(u.battery_capacity / per_epoch) as usize
        } else {
            usize::MAX
        };
        worst = worst.min(n);
    }
    worst
}

/// Split `0..epochs` into `parts` contiguous ranges of near-equal length,
/// longer ones first.
pub fn split_even(epochs: usize, parts: usize) -> Vec<Range<Epoch>> {
    let parts = parts.clamp(1, epochs.max(1));
    let base = epochs / parts;
    let extra = epochs % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for j in 0..parts {
        let len = base + usize::from(j < extra);
        out.push(start..start + len);
        start += len;
    }
    out
}

/// Horizons sized by endurance: one horizon when a UAV can stay out for the
/// whole mission, otherwise enough horizons that each (plus the epoch spent
/// at the depot) fits one battery.
pub fn auto_split(s: &Scenario) -> Vec<Range<Epoch>> {
    split_for_endurance(s.epochs(), endurance_epochs(s))
}

/// [`auto_split`] for a horizon of `epochs` and a given endurance.
pub fn split_for_endurance(epochs: usize, endurance: usize) -> Vec<Range<Epoch>> {
    let span = endurance.saturating_add(2);
    if span >= epochs {
        return split_even(epochs, 1);
    }
    split_even(epochs, epochs.div_ceil(span.max(3)))
}

/// The scenario restricted to `range`: demand sliced, deliveries due in the
/// range kept (windows clipped to it), the others dropped to plain cargo.
pub fn restrict(s: &Scenario, range: Range<Epoch>) -> Scenario {
    let mut sub = s.clone();
    sub.name = format!("{}[{}..{}]", s.name, range.start, range.end);
    sub.horizon.epochs = range.len();
    sub.demand = s.demand[range.clone()].to_vec();
    for p in &mut sub.payloads {
        if let Some(w) = p.delivery.as_mut() {
            if range.contains(&w.latest) {
                w.earliest = w.earliest.max(range.start) - range.start;
                w.latest -= range.start;
            } else {
                p.delivery = None;
            }
        }
    }
    sub
}

/// Plan every horizon with `planner` and concatenate the results.
pub fn plan_horizons<E>(
    s: &Scenario,
    ranges: &[Range<Epoch>],
    mut planner: impl FnMut(&Scenario) -> Result<MissionPlan, E>,
) -> Result<MissionPlan, E> {
    let mut plan = MissionPlan {
        tracks: Vec::new(),
        deliveries: Vec::new(),
    };
    for range in ranges {
        let sub = restrict(s, range.clone());
        let part = planner(&sub)?;
        if plan.tracks.is_empty() {
            plan.tracks = part.tracks;
        } else {
            for (t, p) in plan.tracks.iter_mut().zip(part.tracks) {
                t.location.extend(p.location);
                t.carried.extend(p.carried);
                t.effort.extend(p.effort);
                t.relay.extend(p.relay);
                t.battery.extend(p.battery);
            }
        }
        plan.deliveries.extend(part.deliveries.into_iter().map(|mut e| {
            e.epoch += range.start;
            e
        }));
    }
    for d in 0..plan.tracks.len() {
        plan.tracks[d].battery = energy_profile(s, &plan, d).battery;
    }
    plan.normalize();
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::graph::build_graph;
    use crate::planner::{plan_greedy, PlannerOptions, Weights};
    use crate::testkit::line;
    use crate::{objective, validate_plan, Delivery, Payload};

    #[test]
    fn even_split() {
        assert_eq!(split_even(10, 3), vec![0..4, 4..7, 7..10]);
        assert_eq!(split_even(5, 1), vec![0..5]);
        assert_eq!(split_even(3, 9), vec![0..1, 1..2, 2..3]);
    }

    #[test]
    fn endurance_sizes_horizons() {
        let mut s = line(3, 20, 1, &[]);
        // cheapest move is hovering: 0.5 per kg at 3 kg.
        assert_eq!(endurance_epochs(&s), 66);
        assert_eq!(auto_split(&s).len(), 1);
        s.uavs[0].battery_capacity = 9.0;
        assert_eq!(endurance_epochs(&s), 6);
        let r = auto_split(&s);
        assert_eq!(r.len(), 3);
        assert!(r.iter().all(|h| h.len() <= 8));
    }

    #[test]
    fn deliveries_bucketed_by_deadline() {
        let mut s = line(3, 10, 1, &[]);
        for (i, (a, b)) in [(0, 3), (2, 7), (6, 9)].into_iter().enumerate() {
            s.payloads.push(Payload {
                id: i,
                weight: 0.1,
                delivery: Some(Delivery { target: 2, earliest: a, latest: b }),
                equipment_for: vec![],
            });
        }
        let first = restrict(&s, 0..5);
        let second = restrict(&s, 5..10);
        assert_eq!(first.deliverable_ids(), vec![0]);
        assert_eq!(second.deliverable_ids(), vec![1, 2]);
        assert_eq!(second.payloads[1].delivery.unwrap(), Delivery { target: 2, earliest: 0, latest: 2 });
        assert_eq!(second.epochs(), 5);
    }

    #[test]
    fn concatenated_greedy_plan_is_valid() {
        let mut s = line(3, 12, 2, &[1.0]);
        s.payloads.push(Payload { id: 0, weight: 1.0, delivery: None, equipment_for: vec![0] });
        for (i, (a, b)) in [(1, 4), (7, 10)].into_iter().enumerate() {
            s.payloads.push(Payload {
                id: i + 1,
                weight: 0.2,
                delivery: Some(Delivery { target: 2, earliest: a, latest: b }),
                equipment_for: vec![],
            });
        }
        for k in 0..12 {
            s.demand[k][0][1] = 1.0;
        }
        for u in &mut s.uavs {
            u.mission_weights = vec![0.5];
        }
        let ranges = split_even(12, 2);
        let plan = plan_horizons(&s, &ranges, |sub| {
            let g = build_graph(sub, 2).unwrap();
            plan_greedy(sub, &g, &Weights::from_scenario(sub), PlannerOptions::default())
        })
        .unwrap();
        let r = validate_plan(&s, &plan).unwrap();
        assert!(r.is_valid(), "{:?}", r.failed());
        assert_eq!(plan.deliveries.len(), 2);
        assert!(objective(&s, &plan) > 0.0);
    }
}
