//! Route-graph heuristics: the greedy append planner and the insertion planner.
//!
//! Both planners load every UAV with the mission equipment up front, build
//! one depot-anchored tour per UAV, collect mission service along the
//! travelled epochs, and finish with the one-hop connectivity fix-up.

mod greedy;
mod insertion;
mod tour;

use alloc::vec;
use alloc::vec::Vec;

pub use greedy::plan_greedy;
pub use insertion::{insertion_cost_phi1, insertion_gain_phi2, plan_insertion, InsertionCandidate};
pub use tour::{Stop, Timeline, Tour};

use crate::graph::{build_graph_with, GraphError, Route, RouteGraph};
use crate::{
    energy_profile, one_hop_connectivity, DeliveryEvent, Epoch, LocationId, MissionId, MissionPlan,
    PayloadId, Scenario, ScenarioError, UavId, UavTrack,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PlanningError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("no feasible solution found: {} deliveries left unserved ({unserved:?})", unserved.len())]
    Infeasible { unserved: Vec<PayloadId> },
    #[error("mission weights must give one row of {missions} values per UAV")]
    Weights { missions: usize },
}

/// Planner switches shared by both heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PlannerOptions {
    /// Route UAVs left without deliveries towards high-demand locations.
    pub fake_deliveries: bool,
}

/// α(m,d): one row of mission weights per UAV.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights(pub Vec<Vec<f64>>);

impl Weights {
    /// The weights stored in the scenario's UAV specs.
    pub fn from_scenario(s: &Scenario) -> Self {
        Self(s.uavs.iter().map(|u| u.mission_weights.clone()).collect())
    }

    /// The same per-mission weights for every UAV.
    pub fn uniform(s: &Scenario, alpha: &[f64]) -> Self {
        Self(vec![alpha.to_vec(); s.n_uavs()])
    }

    fn check(&self, s: &Scenario) -> Result<(), PlanningError> {
        let ok = self.0.len() == s.n_uavs()
            && self.0.iter().all(|r| {
                r.len() == s.n_missions()
                    && r.iter().all(|a| (0.0..=1.0).contains(a))
                    && r.iter().sum::<f64>() <= 1.0 + crate::EPS
            });
        if ok {
            Ok(())
        } else {
            Err(PlanningError::Weights {
                missions: s.n_missions(),
            })
        }
    }
}

/// Residual demand `n[k][m][l]`, reduced as UAVs are scheduled.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandState {
    pub residual: Vec<Vec<Vec<f64>>>,
}

impl DemandState {
    pub fn new(s: &Scenario) -> Self {
        Self {
            residual: s.demand.clone(),
        }
    }

    #[inline]
    pub fn n(&self, k: Epoch, m: MissionId, l: LocationId) -> f64 {
        self.residual.get(k).map_or(0.0, |row| row[m][l])
    }
}

/// A UAV as the heuristics see it: its airframe, its fixed equipment load and
/// its effective mission weights (zero for missions it is not equipped for).
#[derive(Debug, Clone)]
pub struct Crew {
    pub id: UavId,
    pub equipment: Vec<PayloadId>,
    pub equipped: Vec<bool>,
    pub alpha: Vec<f64>,
    pub mass_full: f64,
    pub battery: f64,
    pub parcel_capacity: f64,
    pub load_capacity: f64,
    pub radio: f64,
}

impl Crew {
    pub fn new(s: &Scenario, d: UavId, alpha: &[f64]) -> Self {
        let u = &s.uavs[d];
        let mut equipment = Vec::new();
        let mut load = 0.0;
        let budget = u.payload_capacity - u.parcel_capacity;
        for p in s.equipment_ids() {
            let w = s.payloads[p].weight;
            if crate::fmath::le(load + w, budget) {
                load += w;
                equipment.push(p);
            }
        }
        let equipped: Vec<bool> = (0..s.n_missions())
            .map(|m| s.equipped_for(m, &equipment))
            .collect();
        let alpha = alpha
            .iter()
            .zip(&equipped)
            .map(|(&a, &e)| if e { a } else { 0.0 })
            .collect();
        Crew {
            id: d,
            equipment,
            equipped,
            alpha,
            mass_full: u.full_mass(),
            battery: u.battery_capacity,
            parcel_capacity: u.parcel_capacity,
            load_capacity: u.payload_capacity - load,
            radio: u.radio_capacity,
        }
    }

    pub fn alpha_sum(&self) -> f64 {
        self.alpha.iter().sum()
    }
}

/// A delivery job: a real deliverable, or a zero-weight fake one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Job {
    pub payload: Option<PayloadId>,
    pub target: LocationId,
    pub earliest: Epoch,
    pub latest: Epoch,
    pub weight: f64,
}

impl Job {
    pub fn real(s: &Scenario) -> Vec<Job> {
        s.deliverables()
            .map(|(p, d)| Job {
                payload: Some(p),
                target: d.target,
                earliest: d.earliest,
                latest: d.latest,
                weight: s.payloads[p].weight,
            })
            .collect()
    }
}

/// α-weighted Σ n·q collected at the given `(epoch, location)` cells.
pub(crate) fn weighted_service(
    s: &Scenario,
    demand: &DemandState,
    alpha: &[f64],
    cells: impl Iterator<Item = (Epoch, LocationId)>,
) -> f64 {
    let mut total = 0.0;
    for (k, l) in cells {
        if k >= s.epochs() {
            continue;
        }
        for (m, &a) in alpha.iter().enumerate() {
            if a > 0.0 {
                total += a * demand.n(k, m, l) * s.q(l, m);
            }
        }
    }
    total
}

/// Weighted route score: `(1 − Σα)·ψ − Σ_m α_m Σ_k n(π+k, m, ν(k))·q(ν(k), m)`.
pub fn route_score(s: &Scenario, demand: &DemandState, route: &Route, pi: Epoch, alpha: &[f64]) -> f64 {
    let a_sum: f64 = alpha.iter().sum();
    let cells = route
        .visited()
        .iter()
        .enumerate()
        .map(|(j, &l)| (pi + 1 + j, l));
    (1.0 - a_sum) * route.psi as f64 - weighted_service(s, demand, alpha, cells)
}

/// Index of the minimum-score route from `l1` to `l2` when leaving at `π`;
/// ties go to the lower index.
pub fn best_route(
    s: &Scenario,
    graph: &RouteGraph,
    demand: &DemandState,
    l1: LocationId,
    l2: LocationId,
    pi: Epoch,
    alpha: &[f64],
) -> usize {
    best_route_where(s, graph, demand, l1, l2, pi, alpha, |_| true).unwrap_or(0)
}

/// As [`best_route`], restricted to routes accepted by `feasible`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn best_route_where(
    s: &Scenario,
    graph: &RouteGraph,
    demand: &DemandState,
    l1: LocationId,
    l2: LocationId,
    pi: Epoch,
    alpha: &[f64],
    mut feasible: impl FnMut(usize) -> bool,
) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (g, r) in graph.routes(l1, l2).iter().enumerate() {
        if !feasible(g) {
            continue;
        }
        let score = route_score(s, demand, r, pi, alpha);
        if best.is_none_or(|(b, _)| score < b) {
            best = Some((score, g));
        }
    }
    best.map(|(_, g)| g)
}

/// Mission effort of one UAV at one epoch and location, and the matching
/// reduction of the residual demand.
pub fn update_demand_at(
    s: &Scenario,
    demand: &mut DemandState,
    k: Epoch,
    l: LocationId,
    radio: f64,
    alpha: &[f64],
    equipped: &[bool],
) -> Vec<f64> {
    let nm = s.n_missions();
    let mut mu = vec![0.0; nm];
    if k >= s.epochs() {
        return mu;
    }
    let load: f64 = (0..nm)
        .filter(|&m| equipped[m])
        .map(|m| s.q(l, m) * s.s(m))
        .sum();
    if crate::fmath::le(load, radio) {
        for m in 0..nm {
            if equipped[m] && s.q(l, m) > 0.0 {
                mu[m] = 1.0;
            }
        }
    } else {
        let denom: f64 = (0..nm)
            .filter(|&m| equipped[m] && alpha[m] > 0.0)
            .map(|m| alpha[m] * s.s(m))
            .sum();
        if denom > 0.0 {
            for m in 0..nm {
                if equipped[m] && alpha[m] > 0.0 {
                    mu[m] = alpha[m] * s.s(m) / denom;
                }
            }
        }
    }
    // Never serve beyond the residual demand, never exceed the radio.
    for m in 0..nm {
        let q = s.q(l, m);
        if mu[m] > 0.0 {
            mu[m] = if q > 0.0 {
                mu[m].min(demand.n(k, m, l) / q)
            } else {
                0.0
            };
        }
    }
    let data: f64 = (0..nm).map(|m| mu[m] * s.s(m)).sum();
    if data > radio {
        let f = radio / data;
        for x in &mut mu {
            *x *= f;
        }
    }
    for m in 0..nm {
        let cell = &mut demand.residual[k][m][l];
        *cell = (*cell - mu[m] * s.q(l, m)).max(0.0);
    }
    mu
}

/// Apply [`update_demand_at`] along a route left at epoch `π`; returns one
/// effort vector per route epoch.
#[allow(clippy::too_many_arguments)]
pub fn update_demand(
    s: &Scenario,
    demand: &mut DemandState,
    route: &Route,
    pi: Epoch,
    radio: f64,
    alpha: &[f64],
    equipped: &[bool],
) -> Vec<Vec<f64>> {
    route
        .visited()
        .iter()
        .enumerate()
        .map(|(j, &l)| update_demand_at(s, demand, pi + 1 + j, l, radio, alpha, equipped))
        .collect()
}

/// Zero the effort of every UAV that reaches the network neither directly nor
/// through one directly connected neighbour, and set τ to that one-hop flag.
pub fn connectivity_check(s: &Scenario, plan: &mut MissionPlan) {
    for k in 0..s.epochs() {
        let locs: Vec<LocationId> = plan.tracks.iter().map(|t| t.location[k]).collect();
        let ok = one_hop_connectivity(s, &locs);
        for (t, &c) in plan.tracks.iter_mut().zip(&ok) {
            t.relay[k] = c;
            if !c {
                t.effort[k].iter_mut().for_each(|x| *x = 0.0);
            }
        }
    }
}

/// A finished tour and the effort collected along it, for plan assembly.
#[derive(Debug, Clone)]
pub(crate) struct Flight {
    pub timeline: Timeline,
    pub effort: Vec<(Epoch, Vec<f64>)>,
}

pub(crate) fn commit_flight(
    s: &Scenario,
    demand: &mut DemandState,
    crew: &Crew,
    timeline: &Timeline,
    from: Epoch,
) -> Vec<(Epoch, Vec<f64>)> {
    (from.max(1)..timeline.locations.len())
        .map(|k| {
            let l = timeline.locations[k];
            let mu = update_demand_at(s, demand, k, l, crew.radio, &crew.alpha, &crew.equipped);
            (k, mu)
        })
        .collect()
}

/// Assemble a plan from one optional flight per UAV.
pub(crate) fn assemble(
    s: &Scenario,
    depot: LocationId,
    crews: &[Crew],
    flights: &[Option<Flight>],
    jobs: &[Job],
) -> MissionPlan {
    let nk = s.epochs();
    let nm = s.n_missions();
    let mut plan = MissionPlan {
        tracks: Vec::with_capacity(crews.len()),
        deliveries: Vec::new(),
    };
    for (crew, flight) in crews.iter().zip(flights) {
        let mut track = UavTrack::parked(depot, nk, nm, crew.battery);
        track.relay = vec![false; nk];
        let mut carried = crew.equipment.clone();
        if let Some(f) = flight {
            for (k, &l) in f.timeline.locations.iter().enumerate() {
                track.location[k] = l;
            }
            for (k, mu) in &f.effort {
                track.effort[*k] = mu.clone();
            }
            for (stop, &epoch) in f.timeline.tour.stops.iter().zip(&f.timeline.delivery_epochs) {
                for &j in &stop.jobs {
                    if let Some(p) = jobs[j].payload {
                        carried.push(p);
                        plan.deliveries.push(DeliveryEvent {
                            uav: crew.id,
                            payload: p,
                            epoch,
                        });
                    }
                }
            }
        }
        carried.sort_unstable();
        track.carried = vec![carried; nk];
        plan.tracks.push(track);
    }
    connectivity_check(s, &mut plan);
    for d in 0..plan.tracks.len() {
        plan.tracks[d].battery = energy_profile(s, &plan, d).battery;
    }
    plan.normalize();
    plan
}

/// Zero-weight jobs with open windows at the highest-demand locations.
pub(crate) fn fake_jobs(s: &Scenario, depot: LocationId, count: usize) -> Vec<Job> {
    let mut locs: Vec<(f64, LocationId)> = (0..s.n_locations())
        .filter(|&l| l != depot)
        .map(|l| (s.total_demand_at(l), l))
        .filter(|(n, _)| *n > 0.0)
        .collect();
    locs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    locs.into_iter()
        .take(count)
        .map(|(_, l)| Job {
            payload: None,
            target: l,
            earliest: 0,
            latest: s.horizon.last(),
            weight: 0.0,
        })
        .collect()
}

/// Run `plan_one` on the real jobs, then again with fake jobs for idle UAVs.
pub(crate) fn run_planner(
    s: &Scenario,
    graph: &RouteGraph,
    weights: &Weights,
    opts: PlannerOptions,
    plan_pass: impl Fn(&Scenario, &RouteGraph, &[Crew], &[usize], &[Job], &mut DemandState, &mut [Option<Flight>]) -> Vec<usize>,
) -> Result<MissionPlan, PlanningError> {
    let depot = s.check_for_heuristics()?;
    weights.check(s)?;
    let crews: Vec<Crew> = (0..s.n_uavs()).map(|d| Crew::new(s, d, &weights.0[d])).collect();
    let mut jobs = Job::real(s);
    let mut demand = DemandState::new(s);
    let mut flights: Vec<Option<Flight>> = vec![None; crews.len()];
    let all: Vec<usize> = (0..crews.len()).collect();
    let unserved = plan_pass(s, graph, &crews, &all, &jobs, &mut demand, &mut flights);
    if !unserved.is_empty() {
        let mut ids: Vec<PayloadId> = unserved.iter().filter_map(|&j| jobs[j].payload).collect();
        ids.sort_unstable();
        return Err(PlanningError::Infeasible { unserved: ids });
    }
    if opts.fake_deliveries {
        let idle: Vec<usize> = all.iter().copied().filter(|&d| flights[d].is_none()).collect();
        let fakes = fake_jobs(s, depot, idle.len());
        if !fakes.is_empty() {
            let targets: Vec<LocationId> = fakes.iter().map(|j| j.target).collect();
            let g2 = build_graph_with(s, graph.xi, &targets)?;
            let offset = jobs.len();
            jobs.extend(fakes);
            // Earlier flights keep their tours; only idle UAVs take fake jobs.
            let fake_ids: Vec<usize> = (offset..jobs.len()).collect();
            let mut sub = vec![None; crews.len()];
            plan_pass_on(s, &g2, &crews, &idle, &jobs, &fake_ids, &mut demand, &mut sub, &plan_pass);
            for d in idle {
                if sub[d].is_some() {
                    flights[d] = sub[d].take();
                }
            }
        }
    }
    Ok(assemble(s, depot, &crews, &flights, &jobs))
}

#[allow(clippy::too_many_arguments)]
fn plan_pass_on(
    s: &Scenario,
    graph: &RouteGraph,
    crews: &[Crew],
    uavs: &[usize],
    jobs: &[Job],
    subset: &[usize],
    demand: &mut DemandState,
    flights: &mut [Option<Flight>],
    plan_pass: &impl Fn(&Scenario, &RouteGraph, &[Crew], &[usize], &[Job], &mut DemandState, &mut [Option<Flight>]) -> Vec<usize>,
) {
    let sub_jobs: Vec<Job> = subset.iter().map(|&j| jobs[j]).collect();
    plan_pass(s, graph, crews, uavs, &sub_jobs, demand, flights);
    for f in flights.iter_mut().flatten() {
        for stop in &mut f.timeline.tour.stops {
            for j in &mut stop.jobs {
                *j = subset[*j];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::testkit::{line, line3};

    #[test]
    fn update_full_branch_decrements_by_q() {
        let mut s = line(2, 3, 1, &[1.0, 1.0]);
        s.demand[1][0][1] = 3.0;
        s.demand[1][1][1] = 0.0;
        s.quality[1] = vec![1.0, 1.0];
        s.uavs[0].radio_capacity = 5.0;
        let mut d = DemandState::new(&s);
        let mu = update_demand_at(&s, &mut d, 1, 1, 5.0, &[0.0, 0.0], &[true, true]);
        assert_eq!(d.n(1, 0, 1), 2.0);
        assert_eq!(d.n(1, 1, 1), 0.0);
        assert_eq!(mu, vec![1.0, 0.0]);
    }

    #[test]
    fn update_split_branch_is_proportional_to_alpha_s() {
        let mut s = line(2, 3, 1, &[2.0, 1.0]);
        s.demand[1][0][1] = 10.0;
        s.demand[1][1][1] = 10.0;
        let mut d = DemandState::new(&s);
        let mu = update_demand_at(&s, &mut d, 1, 1, 2.5, &[0.3, 0.3], &[true, true]);
        assert!((mu[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((mu[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((d.n(1, 0, 1) - (10.0 - 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn best_route_prefers_hotspot_and_matches_formula() {
        let mut s = line(4, 8, 1, &[1.0]);
        // square 0-1-3, 0-2-3 plus a long detour through nothing
        let pos = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        for a in 0..4 {
            for b in 0..4 {
                let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
                s.distance[a][b] = crate::fmath::sqrt(dx * dx + dy * dy);
            }
        }
        s.payloads.push(crate::Payload {
            id: 0,
            weight: 0.1,
            delivery: Some(crate::Delivery { target: 3, earliest: 0, latest: 7 }),
            equipment_for: vec![],
        });
        s.demand[1][0][2] = 4.0;
        let g = build_graph(&s, 2).unwrap();
        let d = DemandState::new(&s);
        assert_eq!(best_route(&s, &g, &d, 0, 3, 0, &[0.0]), 0);
        assert_eq!(best_route(&s, &g, &d, 0, 3, 0, &[0.4]), 1);
        let r = &g.routes(0, 3)[1];
        let want = 0.6 * 2.0 - 0.4 * (4.0 * 1.0);
        assert!((route_score(&s, &d, r, 0, &[0.4]) - want).abs() < 1e-12);
    }

    #[test]
    fn connectivity_check_zeroes_isolated_uav() {
        let s = line3();
        let mut p = MissionPlan::idle(&s);
        p.tracks[0].location = vec![0, 1, 2, 2, 1, 0];
        for k in 0..6 {
            p.tracks[0].effort[k][0] = 0.5;
        }
        connectivity_check(&s, &mut p);
        assert_eq!(p.tracks[0].effort[2][0], 0.0);
        assert_eq!(p.tracks[0].effort[1][0], 0.5);
        assert_eq!(p.tracks[0].relay, vec![true, true, false, false, true, true]);
    }

    #[test]
    fn relayed_pair_keeps_effort() {
        let mut s = line(3, 1, 2, &[1.0]);
        s.connectivity.uav_to_network = vec![false, false, true];
        s.connectivity.uav_to_uav[0][2] = false;
        s.connectivity.uav_to_uav[2][0] = false;
        let mut p = MissionPlan::idle(&s);
        p.tracks[0].location = vec![1];
        p.tracks[1].location = vec![2];
        p.tracks[0].effort[0][0] = 1.0;
        connectivity_check(&s, &mut p);
        assert_eq!(p.tracks[0].effort[0][0], 1.0);
        let closure = crate::relay_closure(&s, &p, 0);
        assert_eq!(vec![p.tracks[0].relay[0], p.tracks[1].relay[0]], closure);
    }
}
