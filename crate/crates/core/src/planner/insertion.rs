use alloc::vec;
use alloc::vec::Vec;

use super::{
    best_route_where, commit_flight, run_planner, Crew, DemandState, Flight, Job, PlannerOptions,
    PlanningError, Stop, Timeline, Tour, Weights,
};
use crate::graph::RouteGraph;
use crate::{MissionPlan, Scenario};

/// Where and how a job would enter the current tour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsertionCandidate {
    pub job: usize,
    /// Node index `i` in `[depot, stops…, depot]`: the new stop goes between
    /// nodes `i−1` and `i`. For a join, the 1-based index of the joined stop.
    pub position: usize,
    /// Hand over at an existing stop at the same location.
    pub join: bool,
    pub g_in: usize,
    pub g_out: usize,
    pub phi1: f64,
    pub phi2: f64,
}

/// Insertion planner: earliest-deadline seed per UAV, then repeatedly the
/// job with the largest insertion gain, while that gain is non-negative.
/// Demand is committed when a UAV's tour is finished.
pub fn plan_insertion(
    s: &Scenario,
    graph: &RouteGraph,
    weights: &Weights,
    opts: PlannerOptions,
) -> Result<MissionPlan, PlanningError> {
    run_planner(s, graph, weights, opts, insertion_pass)
}

fn insertion_pass(
    s: &Scenario,
    graph: &RouteGraph,
    crews: &[Crew],
    uavs: &[usize],
    jobs: &[Job],
    demand: &mut DemandState,
    flights: &mut [Option<Flight>],
) -> Vec<usize> {
    let mut pending = vec![true; jobs.len()];
    let mut by_deadline: Vec<usize> = (0..jobs.len()).collect();
    by_deadline.sort_by_key(|&j| (jobs[j].latest, j));

    for &d in uavs {
        if !pending.iter().any(|&p| p) {
            break;
        }
        let crew = &crews[d];
        let Some((j0, mut tour)) = seed(s, graph, crew, jobs, demand, &by_deadline, &pending) else {
            continue;
        };
        pending[j0] = false;
        loop {
            let mut best: Option<InsertionCandidate> = None;
            for j in (0..jobs.len()).filter(|&j| pending[j]) {
                let Some(c) = best_position(s, graph, crew, jobs, demand, &tour, j) else {
                    continue;
                };
                let c = InsertionCandidate {
                    phi2: insertion_gain_phi2(s, graph, crew, jobs, demand, j, c.phi1),
                    ..c
                };
                if best.is_none_or(|b| c.phi2 > b.phi2) {
                    best = Some(c);
                }
            }
            match best {
                Some(c) if c.phi2 >= 0.0 => {
                    tour = apply(&tour, jobs, &c);
                    pending[c.job] = false;
                }
                _ => break,
            }
        }
        let timeline = Timeline::build(s, graph, crew, jobs, tour);
        let effort = commit_flight(s, demand, crew, &timeline, 1);
        flights[d] = Some(Flight { timeline, effort });
    }
    by_deadline.into_iter().filter(|&j| pending[j]).collect()
}

/// Earliest-deadline job that fits an out-and-back tour, with the
/// best-scoring feasible routes both ways.
fn seed(
    s: &Scenario,
    graph: &RouteGraph,
    crew: &Crew,
    jobs: &[Job],
    demand: &DemandState,
    by_deadline: &[usize],
    pending: &[bool],
) -> Option<(usize, Tour)> {
    let depot = graph.depot();
    for &j in by_deadline.iter().filter(|&&j| pending[j]) {
        let target = jobs[j].target;
        let tour_with = |g: usize, back: usize| Tour {
            stops: vec![Stop {
                location: target,
                jobs: vec![j],
            }],
            legs: vec![g, back],
            closed: true,
        };
        let ok = |t: Tour| Timeline::build(s, graph, crew, jobs, t).feasible;
        let Some(g) = best_route_where(s, graph, demand, depot, target, 0, &crew.alpha, |g| {
            ok(tour_with(g, 0))
        }) else {
            continue;
        };
        let out = Timeline::build(
            s,
            graph,
            crew,
            jobs,
            Tour {
                legs: vec![g],
                closed: false,
                ..tour_with(g, 0)
            },
        );
        let back = best_route_where(s, graph, demand, target, depot, out.end(), &crew.alpha, |b| {
            ok(tour_with(g, b))
        })
        .unwrap_or(0);
        return Some((j, tour_with(g, back)));
    }
    None
}

fn apply(tour: &Tour, jobs: &[Job], c: &InsertionCandidate) -> Tour {
    let mut t = tour.clone();
    if c.join {
        t.stops[c.position - 1].jobs.push(c.job);
    } else {
        t.stops.insert(
            c.position - 1,
            Stop {
                location: jobs[c.job].target,
                jobs: vec![c.job],
            },
        );
        t.legs[c.position - 1] = c.g_in;
        t.legs.insert(c.position, c.g_out);
    }
    t
}

/// Minimum φ1 over joins and positions for job `j`; `None` if no feasible one.
pub(crate) fn best_position(
    s: &Scenario,
    graph: &RouteGraph,
    crew: &Crew,
    jobs: &[Job],
    demand: &DemandState,
    tour: &Tour,
    j: usize,
) -> Option<InsertionCandidate> {
    let before = Timeline::build(s, graph, crew, jobs, tour.clone());
    let base = before.service(s, demand, &crew.alpha);
    let a_sum = crew.alpha_sum();
    let target = jobs[j].target;
    let depot = graph.depot();
    let mut best: Option<InsertionCandidate> = None;
    let mut consider = |c: InsertionCandidate| {
        let after = Timeline::build(s, graph, crew, jobs, apply(tour, jobs, &c));
        if !after.feasible {
            return;
        }
        let detour = after.travel as f64 - before.travel as f64;
        let phi1 = (1.0 - a_sum) * detour - (after.service(s, demand, &crew.alpha) - base);
        if best.is_none_or(|b| phi1 < b.phi1) {
            best = Some(InsertionCandidate { phi1, ..c });
        }
    };
    let blank = InsertionCandidate {
        job: j,
        position: 0,
        join: false,
        g_in: 0,
        g_out: 0,
        phi1: f64::INFINITY,
        phi2: f64::NEG_INFINITY,
    };
    for (i, st) in tour.stops.iter().enumerate() {
        if st.location == target {
            consider(InsertionCandidate {
                position: i + 1,
                join: true,
                ..blank
            });
        }
    }
    for i in 1..=tour.stops.len() + 1 {
        let (prev, next) = (tour.node(depot, i - 1), tour.node(depot, i));
        if prev == target || next == target {
            continue;
        }
        for g_in in 0..graph.routes(prev, target).len() {
            for g_out in 0..graph.routes(target, next).len() {
                consider(InsertionCandidate {
                    position: i,
                    g_in,
                    g_out,
                    ..blank
                });
            }
        }
    }
    best
}

/// φ1 of inserting job `j` at node position `i` with routes `(g, g')`:
/// weighted detour duration minus the change in weighted service over the
/// re-timed tour. `+∞` when the result is infeasible.
#[allow(clippy::too_many_arguments)]
pub fn insertion_cost_phi1(
    s: &Scenario,
    graph: &RouteGraph,
    crew: &Crew,
    jobs: &[Job],
    demand: &DemandState,
    tour: &Tour,
    j: usize,
    position: usize,
    g_in: usize,
    g_out: usize,
) -> f64 {
    let before = Timeline::build(s, graph, crew, jobs, tour.clone());
    let c = InsertionCandidate {
        job: j,
        position,
        join: false,
        g_in,
        g_out,
        phi1: 0.0,
        phi2: 0.0,
    };
    let after = Timeline::build(s, graph, crew, jobs, apply(tour, jobs, &c));
    if !after.feasible {
        return f64::INFINITY;
    }
    let detour = after.travel as f64 - before.travel as f64;
    (1.0 - crew.alpha_sum()) * detour
        - (after.service(s, demand, &crew.alpha) - before.service(s, demand, &crew.alpha))
}

/// φ2: best dedicated out-leg score for job `j` minus its in-tour cost `phi1`.
pub fn insertion_gain_phi2(
    s: &Scenario,
    graph: &RouteGraph,
    crew: &Crew,
    jobs: &[Job],
    demand: &DemandState,
    j: usize,
    phi1: f64,
) -> f64 {
    graph
        .routes(graph.depot(), jobs[j].target)
        .iter()
        .map(|r| super::route_score(s, demand, r, 0, &crew.alpha))
        .fold(f64::NEG_INFINITY, f64::max)
        - phi1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::planner::plan_greedy;
    use crate::testkit::{line, line3};
    use crate::{objective, validate_plan, Delivery, Payload};

    fn parcel(id: usize, target: usize, a: usize, b: usize) -> Payload {
        Payload {
            id,
            weight: 0.1,
            delivery: Some(Delivery { target, earliest: a, latest: b }),
            equipment_for: vec![],
        }
    }

    #[test]
    fn single_delivery_matches_greedy() {
        let s = line3();
        let g = build_graph(&s, 10).unwrap();
        let w = Weights::from_scenario(&s);
        let a = plan_insertion(&s, &g, &w, PlannerOptions::default()).unwrap();
        let b = plan_greedy(&s, &g, &w, PlannerOptions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(objective(&s, &a), objective(&s, &b));
    }

    #[test]
    fn on_path_delivery_joins_the_tour() {
        let mut s = line(4, 10, 2, &[]);
        s.payloads = vec![parcel(0, 3, 0, 9), parcel(1, 2, 0, 9)];
        let g = build_graph(&s, 2).unwrap();
        let p = plan_insertion(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        assert!(validate_plan(&s, &p).unwrap().is_valid());
        assert!(p.deliveries.iter().all(|e| e.uav == 0));
        assert_eq!(p.tracks[1].location, vec![0; 10]);
        assert_eq!(&p.tracks[0].location[..7], &[0, 1, 2, 3, 2, 1, 0]);
    }

    #[test]
    fn remote_candidate_opens_a_new_tour() {
        // Star: depot 0 links to 1 and 2 only; 1 and 2 are 2 hops apart.
        let mut s = line(3, 12, 2, &[]);
        s.distance[1][2] = 5.0;
        s.distance[2][1] = 5.0;
        s.distance[0][2] = 1.0;
        s.distance[2][0] = 1.0;
        s.payloads = vec![parcel(0, 1, 0, 11), parcel(1, 2, 0, 11)];
        let g = build_graph(&s, 1).unwrap();
        let crew = Crew::new(&s, 0, &[]);
        let jobs = Job::real(&s);
        let demand = DemandState::new(&s);
        let tour = Tour {
            stops: vec![Stop { location: 1, jobs: vec![0] }],
            legs: vec![0, 0],
            closed: true,
        };
        let c = best_position(&s, &g, &crew, &jobs, &demand, &tour, 1).unwrap();
        // detour 1→0→2→0 vs 1→0: +2; dedicated out-leg ψ=1 → φ2 = −1
        assert_eq!(c.phi1, 2.0);
        assert_eq!(insertion_gain_phi2(&s, &g, &crew, &jobs, &demand, 1, c.phi1), -1.0);
        let p = plan_insertion(&s, &g, &Weights::from_scenario(&s), PlannerOptions::default()).unwrap();
        let mut u: Vec<_> = p.deliveries.iter().map(|e| e.uav).collect();
        u.sort_unstable();
        assert_eq!(u, vec![0, 1]);
    }

    #[test]
    fn downstream_deadline_makes_insertion_infinite() {
        let mut s = line(4, 10, 1, &[]);
        s.payloads = vec![parcel(0, 1, 0, 1), parcel(1, 3, 0, 9)];
        let g = build_graph(&s, 1).unwrap();
        let crew = Crew::new(&s, 0, &[]);
        let jobs = Job::real(&s);
        let demand = DemandState::new(&s);
        let tour = Tour {
            stops: vec![Stop { location: 1, jobs: vec![0] }],
            legs: vec![0, 0],
            closed: true,
        };
        let phi = insertion_cost_phi1(&s, &g, &crew, &jobs, &demand, &tour, 1, 1, 0, 0);
        assert_eq!(phi, f64::INFINITY);
        let phi = insertion_cost_phi1(&s, &g, &crew, &jobs, &demand, &tour, 1, 2, 0, 0);
        assert_eq!(phi, 4.0);
    }

    #[test]
    fn phi1_equals_tour_reevaluation_oracle() {
        // Tour 0 → 2 → 0 on a 4-location line; insert location 3 after 2.
        let mut s = line(4, 12, 1, &[1.0]);
        s.payloads = vec![parcel(0, 2, 0, 11), parcel(1, 3, 0, 11)];
        for k in 0..12 {
            for l in 0..4 {
                s.demand[k][0][l] = if k >= 4 { 2.0 } else { 0.5 } * l as f64;
            }
        }
        s.quality[1][0] = 3.0;
        let g = build_graph(&s, 1).unwrap();
        let alpha = [0.4];
        let crew = Crew::new(&s, 0, &alpha);
        let jobs = Job::real(&s);
        let demand = DemandState::new(&s);
        let tour = Tour {
            stops: vec![Stop { location: 2, jobs: vec![0] }],
            legs: vec![0, 0],
            closed: true,
        };
        let oracle = |seq: &[usize]| -> f64 {
            seq.iter()
                .enumerate()
                .skip(1)
                .map(|(k, &l)| alpha[0] * s.demand[k][0][l] * s.quality[l][0])
                .sum()
        };
        let before = [0, 1, 2, 1, 0];
        let after = [0, 1, 2, 3, 2, 1, 0];
        let want = 0.6 * 2.0 - (oracle(&after) - oracle(&before));
        let got = insertion_cost_phi1(&s, &g, &crew, &jobs, &demand, &tour, 1, 2, 0, 0);
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }
}
