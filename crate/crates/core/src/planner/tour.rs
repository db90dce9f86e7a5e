use alloc::vec;
use alloc::vec::Vec;

use super::{weighted_service, Crew, DemandState, Job};
use crate::graph::RouteGraph;
use crate::{Epoch, LocationId, Scenario};

/// A delivery stop: one location and the jobs handed over there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stop {
    pub location: LocationId,
    pub jobs: Vec<usize>,
}

/// A depot-anchored tour. `legs[i]` is the route index used to reach
/// `stops[i]`; when `closed`, the final entry of `legs` is the return leg.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tour {
    pub stops: Vec<Stop>,
    pub legs: Vec<usize>,
    pub closed: bool,
}

impl Tour {
    pub fn is_empty(&self) -> bool {
        self.stops.is_empty()
    }

    /// Location of node `i` in `[depot, stops…, depot]`.
    pub fn node(&self, depot: LocationId, i: usize) -> LocationId {
        if i == 0 || i > self.stops.len() {
            depot
        } else {
            self.stops[i - 1].location
        }
    }
}

/// A tour laid out on the epoch axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub tour: Tour,
    /// Location at epochs `0..locations.len()`; epoch 0 is the depot.
    pub locations: Vec<LocationId>,
    /// Hand-over epoch of each stop.
    pub delivery_epochs: Vec<Epoch>,
    /// Travel epochs accumulated over all legs (hovering excluded).
    pub travel: usize,
    /// Energy with a full payload, Wh.
    pub energy: f64,
    pub load: f64,
    pub feasible: bool,
}

impl Timeline {
    /// Lay out `tour`: travel each leg, hover at a stop until every job's
    /// window has opened, and check windows, horizon, battery and load.
    pub(crate) fn build(
        s: &Scenario,
        graph: &RouteGraph,
        crew: &Crew,
        jobs: &[Job],
        tour: Tour,
    ) -> Timeline {
        let depot = graph.depot();
        let last = s.horizon.last();
        let ev = s.physics.vertical_delivery_energy;
        let mut locations = vec![depot];
        let mut delivery_epochs = Vec::with_capacity(tour.stops.len());
        let mut energy = 0.0;
        let mut travel = 0;
        let mut load = 0.0;
        let mut feasible = true;
        let mut cur = depot;
        for (i, stop) in tour.stops.iter().enumerate() {
            if stop.location != cur {
                let r = &graph.routes(cur, stop.location)[tour.legs[i]];
                locations.extend_from_slice(r.visited());
                energy += r.energy_per_kg * crew.mass_full;
                travel += r.psi;
            }
            let mut t = locations.len() - 1;
            let open = stop.jobs.iter().map(|&j| jobs[j].earliest).max().unwrap_or(0);
            let close = stop.jobs.iter().map(|&j| jobs[j].latest).min().unwrap_or(last);
            if t < open {
                let h = open - t;
                locations.extend(core::iter::repeat_n(stop.location, h));
                energy += h as f64 * s.e(stop.location, stop.location) * crew.mass_full;
                t = open;
            }
            if t > close {
                feasible = false;
            }
            for &j in &stop.jobs {
                load += jobs[j].weight;
                if jobs[j].payload.is_some() {
                    energy += ev;
                }
            }
            delivery_epochs.push(t);
            cur = stop.location;
        }
        if tour.closed && cur != depot {
            let r = &graph.routes(cur, depot)[tour.legs[tour.stops.len()]];
            locations.extend_from_slice(r.visited());
            energy += r.energy_per_kg * crew.mass_full;
            travel += r.psi;
        }
        if locations.len() - 1 > last {
            feasible = false;
        }
        if !crate::fmath::le(energy, crew.battery) {
            feasible = false;
        }
        if !crate::fmath::le(load, crew.parcel_capacity.min(crew.load_capacity)) {
            feasible = false;
        }
        Timeline {
            tour,
            locations,
            delivery_epochs,
            travel,
            energy,
            load,
            feasible,
        }
    }

    /// Current end epoch.
    pub fn end(&self) -> Epoch {
        self.locations.len() - 1
    }

    /// α-weighted Σ n·q over every epoch after departure.
    pub fn service(&self, s: &Scenario, demand: &DemandState, alpha: &[f64]) -> f64 {
        let cells = self.locations.iter().enumerate().skip(1).map(|(k, &l)| (k, l));
        weighted_service(s, demand, alpha, cells)
    }
}
