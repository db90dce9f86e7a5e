use alloc::vec;
use alloc::vec::Vec;

use super::{
    best_route_where, commit_flight, run_planner, Crew, DemandState, Flight, Job, PlannerOptions,
    PlanningError, Stop, Timeline, Tour, Weights,
};
use crate::graph::RouteGraph;
use crate::{MissionPlan, Scenario};

/// Greedy append planner: deliveries by ascending deadline, UAVs by id, each
/// feasible delivery appended to the current UAV's tour with the best-scoring
/// route, demand updated along every travelled leg.
pub fn plan_greedy(
    s: &Scenario,
    graph: &RouteGraph,
    weights: &Weights,
    opts: PlannerOptions,
) -> Result<MissionPlan, PlanningError> {
    run_planner(s, graph, weights, opts, greedy_pass)
}

fn greedy_pass(
    s: &Scenario,
    graph: &RouteGraph,
    crews: &[Crew],
    uavs: &[usize],
    jobs: &[Job],
    demand: &mut DemandState,
    flights: &mut [Option<Flight>],
) -> Vec<usize> {
    let depot = graph.depot();
    let mut order: Vec<usize> = (0..jobs.len()).collect();
    order.sort_by_key(|&j| (jobs[j].latest, j));
    let mut served = vec![false; jobs.len()];

    for &d in uavs {
        let crew = &crews[d];
        let mut tour = Tour::default();
        let mut open = Timeline::build(s, graph, crew, jobs, tour.clone());
        let mut effort = Vec::new();
        let mut committed = 1;
        for &j in &order {
            if served[j] {
                continue;
            }
            let job = jobs[j];
            let cur = open.tour.node(depot, tour.stops.len());
            let pi = open.end();
            let next = if !tour.is_empty() && cur == job.target {
                let mut t = tour.clone();
                if let Some(st) = t.stops.last_mut() { st.jobs.push(j) }
                closed_ok(s, graph, crew, jobs, &t).then_some(t)
            } else {
                let extend = |g: usize| {
                    let mut t = tour.clone();
                    t.stops.push(Stop {
                        location: job.target,
                        jobs: vec![j],
                    });
                    t.legs.push(g);
                    t
                };
                best_route_where(s, graph, demand, cur, job.target, pi, &crew.alpha, |g| {
                    closed_ok(s, graph, crew, jobs, &extend(g))
                })
                .map(extend)
            };
            if let Some(t) = next {
                served[j] = true;
                tour = t;
                open = Timeline::build(s, graph, crew, jobs, tour.clone());
                effort.extend(commit_flight(s, demand, crew, &open, committed));
                committed = open.locations.len();
            }
        }
        if tour.is_empty() {
            continue;
        }
        let cur = open.tour.node(depot, tour.stops.len());
        let pi = open.end();
        let close = |g: usize| {
            let mut t = tour.clone();
            t.legs.push(g);
            t.closed = true;
            t
        };
        let g = best_route_where(s, graph, demand, cur, depot, pi, &crew.alpha, |g| {
            Timeline::build(s, graph, crew, jobs, close(g)).feasible
        })
        .unwrap_or(0);
        let timeline = Timeline::build(s, graph, crew, jobs, close(g));
        effort.extend(commit_flight(s, demand, crew, &timeline, committed));
        flights[d] = Some(Flight { timeline, effort });
    }
    order.into_iter().filter(|&j| !served[j]).collect()
}

/// Feasible once closed with the shortest way home.
fn closed_ok(s: &Scenario, graph: &RouteGraph, crew: &Crew, jobs: &[Job], tour: &Tour) -> bool {
    let mut t = tour.clone();
    t.legs.push(0);
    t.closed = true;
    Timeline::build(s, graph, crew, jobs, t).feasible
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::testkit::{line, line3};
    use crate::{objective, validate_plan, Delivery, Payload};

    #[test]
    fn no_deliveries_leaves_fleet_idle() {
        let mut s = line3();
        s.payloads.truncate(1);
        let g = build_graph(&s, 2).unwrap();
        let p = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        assert!(p.tracks[0].location.iter().all(|&l| l == 0));
        assert_eq!(objective(&s, &p), 0.0);
    }

    #[test]
    fn adjacent_delivery_is_an_out_and_back() {
        let mut s = line(2, 5, 1, &[]);
        s.payloads.push(Payload {
            id: 0,
            weight: 0.3,
            delivery: Some(Delivery { target: 1, earliest: 0, latest: 4 }),
            equipment_for: vec![],
        });
        let g = build_graph(&s, 1).unwrap();
        let p = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        assert_eq!(p.tracks[0].location, vec![0, 1, 0, 0, 0]);
        assert_eq!(p.deliveries[0].epoch, 1);
        assert!(validate_plan(&s, &p).unwrap().is_valid());
    }

    #[test]
    fn line_instance_trace() {
        // Out along 0-1-2 (deliver at 2), back 2-1-0; coverage at L1 in epochs 1 and 3.
        let s = line3();
        let g = build_graph(&s, 10).unwrap();
        let p = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        assert_eq!(p.tracks[0].location, vec![0, 1, 2, 1, 0, 0]);
        assert_eq!(p.deliveries[0].epoch, 2);
        assert!(validate_plan(&s, &p).unwrap().is_valid());
        assert_eq!(objective(&s, &p), 2.0);
    }

    #[test]
    fn waits_for_window_to_open() {
        let mut s = line3();
        s.payloads[1].delivery = Some(Delivery { target: 2, earliest: 3, latest: 3 });
        let g = build_graph(&s, 3).unwrap();
        let p = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        assert_eq!(p.tracks[0].location, vec![0, 1, 2, 2, 1, 0]);
        assert_eq!(p.deliveries[0].epoch, 3);
        assert!(validate_plan(&s, &p).unwrap().is_valid());
    }

    #[test]
    fn impossible_window_is_reported() {
        let mut s = line3();
        s.payloads[1].delivery = Some(Delivery { target: 2, earliest: 1, latest: 1 });
        let g = build_graph(&s, 3).unwrap();
        let e = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap_err();
        assert_eq!(e, PlanningError::Infeasible { unserved: vec![1] });
    }

    #[test]
    fn two_deliveries_on_the_line() {
        let mut s = line3();
        s.payloads.push(Payload {
            id: 2,
            weight: 0.2,
            delivery: Some(Delivery { target: 1, earliest: 0, latest: 5 }),
            equipment_for: vec![],
        });
        let g = build_graph(&s, 3).unwrap();
        let p = plan_greedy(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        // b=4 first: out to L2; L1 (b=5) is then appended on the way home.
        assert_eq!(p.tracks[0].location, vec![0, 1, 2, 1, 0, 0]);
        let mut ev: Vec<_> = p.deliveries.iter().map(|e| (e.payload, e.epoch)).collect();
        ev.sort_unstable();
        assert_eq!(ev, vec![(1, 2), (2, 3)]);
        assert!(validate_plan(&s, &p).unwrap().is_valid());
        assert_eq!(objective(&s, &p), 2.0);
    }

    #[test]
    fn fake_jobs_put_idle_uavs_to_work() {
        let mut s = line(3, 6, 2, &[1.0]);
        for k in 0..6 {
            s.demand[k][0][2] = 1.0;
        }
        s.payloads.push(Payload {
            id: 0,
            weight: 0.2,
            delivery: Some(Delivery { target: 1, earliest: 0, latest: 5 }),
            equipment_for: vec![],
        });
        let g = build_graph(&s, 2).unwrap();
        let w = Weights::uniform(&s, &[0.5]);
        let base = plan_greedy(&s, &g, &w, PlannerOptions::default()).unwrap();
        let fake = plan_greedy(&s, &g, &w, PlannerOptions { fake_deliveries: true }).unwrap();
        assert!(validate_plan(&s, &fake).unwrap().is_valid());
        assert!(objective(&s, &fake) > objective(&s, &base));
        assert_eq!(fake.deliveries.len(), 1);
    }
}
