//! Exact per-epoch effort allocation.
//!
//! With positions, manifests and relay flags fixed, the effort variables of
//! one epoch split by location. At one location, in data units
//! `x[d][m] = μ·s(m)`, the problem is
//!
//! ```text
//! max Σ_m X_m / c_m   s.t.  X_m = Σ_d x[d][m] ≤ c_m = n·s/q,
//!                           Σ_m x[d][m] ≤ τ_d·T_d,  0 ≤ x[d][m] ≤ s(m) if equipped
//! ```
//!
//! The reachable `(X_m)` form a polymatroid, so filling missions in
//! ascending `c_m` with incremental max-flow is optimal.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::{Epoch, LocationId, MissionId, Scenario};

const FLOW_EPS: f64 = 1e-12;

/// One UAV at the location being allocated.
#[derive(Debug, Clone, Copy)]
pub struct Server<'a> {
    /// Radio capacity available, `τ·T`.
    pub capacity: f64,
    /// Missions this UAV has equipment for.
    pub equipped: &'a [bool],
}

/// Optimal effort for the UAVs at `(k, l)`: the Σσ gained and `μ[d][m]`.
pub fn allocate_location(
    s: &Scenario,
    k: Epoch,
    l: LocationId,
    servers: &[Server<'_>],
) -> (f64, Vec<Vec<f64>>) {
    let nm = s.n_missions();
    let nd = servers.len();
    let mut mu = vec![vec![0.0; nm]; nd];
    let mut value = 0.0;

    let active = |m: MissionId| s.n(k, m, l) > 0.0 && s.q(l, m) > 0.0;

    // Missions that generate no data only face the demand cap.
    for m in (0..nm).filter(|&m| active(m) && s.s(m) == 0.0) {
        let (n, q) = (s.n(k, m, l), s.q(l, m));
        let mut left = n;
        for (d, sv) in servers.iter().enumerate() {
            if sv.equipped[m] && left > 0.0 {
                let x = (left / q).min(1.0);
                mu[d][m] = x;
                left -= x * q;
            }
        }
        value += ((n - left.max(0.0)) / n).min(1.0);
    }

    let mut order: Vec<(f64, MissionId)> = (0..nm)
        .filter(|&m| active(m) && s.s(m) > 0.0)
        .map(|m| (s.n(k, m, l) * s.s(m) / s.q(l, m), m))
        .collect();
    if order.is_empty() || nd == 0 {
        return (value, mu);
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    // Node layout: 0 source, 1..=nd servers, then missions, then sink.
    let src = 0;
    let sink = 1 + nd + nm;
    let mut net = Network::new(sink + 1);
    for (d, sv) in servers.iter().enumerate() {
        if sv.capacity > 0.0 {
            net.add(src, 1 + d, sv.capacity);
        }
    }
    let mut arc_of = vec![vec![usize::MAX; nm]; nd];
    for (d, sv) in servers.iter().enumerate() {
        for &(_, m) in &order {
            if sv.equipped[m] {
                arc_of[d][m] = net.add(1 + d, 1 + nd + m, s.s(m));
            }
        }
    }
    for &(c, m) in &order {
        let arc = net.add(1 + nd + m, sink, c);
        net.max_flow(src, sink);
        value += (net.flow(arc) / c).min(1.0);
    }
    for d in 0..nd {
        for &(_, m) in &order {
            let a = arc_of[d][m];
            if a != usize::MAX {
                mu[d][m] = (net.flow(a) / s.s(m)).clamp(0.0, 1.0);
            }
        }
    }
    (value, mu)
}

/// Optimal effort for a whole epoch. `locations[d]`, `capacity[d] = τ_d·T_d`
/// and `equipped[d][m]` describe the fleet; returns Σσ and `μ[d][m]`.
pub fn allocate_epoch(
    s: &Scenario,
    k: Epoch,
    locations: &[LocationId],
    capacity: &[f64],
    equipped: &[Vec<bool>],
) -> (f64, Vec<Vec<f64>>) {
    let nd = locations.len();
    let mut mu = vec![vec![0.0; s.n_missions()]; nd];
    let mut value = 0.0;
    let mut seen: Vec<LocationId> = Vec::new();
    for &l in locations {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let members: Vec<usize> = (0..nd).filter(|&d| locations[d] == l).collect();
        let servers: Vec<Server<'_>> = members
            .iter()
            .map(|&d| Server {
                capacity: capacity[d],
                equipped: &equipped[d],
            })
            .collect();
        let (v, part) = allocate_location(s, k, l, &servers);
        value += v;
        for (i, &d) in members.iter().enumerate() {
            mu[d] = part[i].clone();
        }
    }
    (value, mu)
}

struct Arc {
    to: usize,
    cap: f64,
    flow: f64,
}

struct Network {
    arcs: Vec<Arc>,
    out: Vec<Vec<usize>>,
}

impl Network {
    fn new(n: usize) -> Self {
        Self {
            arcs: Vec::new(),
            out: vec![Vec::new(); n],
        }
    }

    /// Add an arc and its reverse; returns the forward arc id.
    fn add(&mut self, from: usize, to: usize, cap: f64) -> usize {
        let id = self.arcs.len();
        self.arcs.push(Arc { to, cap, flow: 0.0 });
        self.arcs.push(Arc {
            to: from,
            cap: 0.0,
            flow: 0.0,
        });
        self.out[from].push(id);
        self.out[to].push(id + 1);
        id
    }

    fn flow(&self, arc: usize) -> f64 {
        self.arcs[arc].flow
    }

    fn residual(&self, a: usize) -> f64 {
        self.arcs[a].cap - self.arcs[a].flow
    }

    /// Edmonds–Karp augmentation from the current flow.
    fn max_flow(&mut self, src: usize, sink: usize) {
        loop {
            let mut via = vec![usize::MAX; self.out.len()];
            let mut queue = VecDeque::from([src]);
            let mut reached = false;
            while let Some(u) = queue.pop_front() {
                if u == sink {
                    reached = true;
                    break;
                }
                for &a in &self.out[u] {
                    let v = self.arcs[a].to;
                    if v != src && via[v] == usize::MAX && self.residual(a) > FLOW_EPS {
                        via[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !reached {
                return;
            }
            let mut push = f64::INFINITY;
            let mut v = sink;
            while v != src {
                let a = via[v];
                push = push.min(self.residual(a));
                v = self.arcs[a ^ 1].to;
            }
            let mut v = sink;
            while v != src {
                let a = via[v];
                self.arcs[a].flow += push;
                self.arcs[a ^ 1].flow -= push;
                v = self.arcs[a ^ 1].to;
            }
        }
    }
}
