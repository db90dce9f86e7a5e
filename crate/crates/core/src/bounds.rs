//! Analytic upper and lower bounds on Θ for instances without delivery
//! windows, plus the briefest delivery cycle and fleet-size estimates they
//! rest on.
//!
//! Demands are compared with radio capacity in data units: a cell with
//! demand `n`, quality `q` and a mission of rate `s` needs `n·s/q` of a
//! UAV's capacity `T` to be fully satisfied.

use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{GraphError, RouteGraph};
use crate::{Epoch, LocationId, PayloadId, Scenario};

/// Node count up to which the briefest cycle is solved exactly.
pub const EXACT_CYCLE_NODES: usize = 12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundsError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("payload {payload} has a delivery window narrower than the horizon; the lower bound assumes free delivery timing (use force_proxy to compute it anyway)")]
    Windowed { payload: PayloadId },
}

/// `I[k][m][l]`: demand present and location reachable from a depot and back
/// within the horizon.
pub type ReachGrid = Vec<Vec<Vec<bool>>>;

#[derive(Debug, Clone, PartialEq)]
pub struct CycleEstimate {
    /// Duration in epochs.
    pub epochs: usize,
    /// Visiting order, depot first (empty for the proxy).
    pub order: Vec<LocationId>,
    /// `false` when the farthest-delivery proxy was used.
    pub exact: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FleetEstimate {
    pub r: usize,
    pub rho_e: usize,
    pub rho_t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub upper: f64,
    pub lower: f64,
    /// `upper / lower`, absent when the lower bound is zero.
    pub ratio: Option<f64>,
    pub j: Vec<usize>,
    pub reach: ReachGrid,
    pub cycle: CycleEstimate,
    /// Cycle length actually used for the lower bound.
    pub cycle_epochs: usize,
    pub fleet: FleetEstimate,
}

/// Hop distances from the nearest depot with step `step`.
fn home_distance(s: &Scenario, step: f64) -> Vec<Option<usize>> {
    s.hop_distances_from(&s.depots(), step)
}

fn reach_with_step(s: &Scenario, step: f64) -> ReachGrid {
    let home = home_distance(s, step);
    let nk = s.epochs();
    (0..nk)
        .map(|k| {
            (0..s.n_missions())
                .map(|m| {
                    (0..s.n_locations())
                        .map(|l| {
                            s.n(k, m, l) > 0.0
                                && home[l].is_some_and(|h| h <= k && k + h < nk)
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Servable cells: demand present and the location can be reached from the
/// depot by epoch `k` and left in time to return by the last epoch.
pub fn reachability_indicator(s: &Scenario) -> ReachGrid {
    reach_with_step(s, s.fleet_step())
}

fn cell_cost(s: &Scenario, k: Epoch, m: usize, l: LocationId) -> f64 {
    let q = s.q(l, m);
    if q <= 0.0 {
        f64::INFINITY
    } else {
        s.n(k, m, l) * s.s(m) / q
    }
}

/// Ascending data demands of the servable cells of epoch `k`.
fn sorted_costs(s: &Scenario, reach: &ReachGrid, k: Epoch) -> Vec<f64> {
    let mut c = Vec::new();
    for m in 0..s.n_missions() {
        for l in 0..s.n_locations() {
            if reach[k][m][l] {
                c.push(cell_cost(s, k, m, l));
            }
        }
    }
    c.sort_by(f64::total_cmp);
    c
}

/// Longest ascending prefix whose total fits in `capacity`.
pub fn j_prefix(costs: &[f64], capacity: f64) -> usize {
    let mut sum = 0.0;
    for (i, &c) in costs.iter().enumerate() {
        sum += c;
        if sum > capacity {
            return i;
        }
    }
    costs.len()
}

fn fleet_capacity(s: &Scenario) -> f64 {
    s.uavs.iter().map(|u| u.radio_capacity).sum()
}

/// Per-epoch `J_k`.
pub fn j_counts(s: &Scenario, reach: &ReachGrid) -> Vec<usize> {
    let cap = fleet_capacity(s);
    (0..s.epochs())
        .map(|k| j_prefix(&sorted_costs(s, reach, k), cap))
        .collect()
}

/// Θ̄ = Σ_k min(J_k + 1, Σ I).
pub fn upper_bound(s: &Scenario) -> f64 {
    let reach = reachability_indicator(s);
    upper_from(s, &reach).0
}

fn upper_from(s: &Scenario, reach: &ReachGrid) -> (f64, Vec<usize>) {
    let j = j_counts(s, reach);
    let total = (0..s.epochs())
        .map(|k| {
            let cells = reach[k].iter().flatten().filter(|&&b| b).count();
            (j[k] + 1).min(cells) as f64
        })
        .sum();
    (total, j)
}

/// Per-epoch ceilings for the exact search: fractional fill of the fleet's
/// capacity over cells reachable by the fastest UAV.
pub fn epoch_ceilings(s: &Scenario) -> Vec<f64> {
    let step = s.uavs.iter().map(|u| u.max_step_distance).fold(0.0, f64::max);
    let reach = reach_with_step(s, step);
    let cap = fleet_capacity(s);
    (0..s.epochs())
        .map(|k| {
            let costs = sorted_costs(s, &reach, k);
            let j = j_prefix(&costs, cap);
            let used: f64 = costs[..j].iter().sum();
            match costs.get(j) {
                Some(&c) if c.is_finite() && c > 0.0 => j as f64 + ((cap - used) / c).clamp(0.0, 1.0),
                _ => j as f64,
            }
        })
        .collect()
}

/// Guaranteed per-epoch satisfaction for one UAV facing every mission at
/// its peak requirement, most demanding first. Besides the radio share, a
/// UAV serves at most `q` of a cell's demand (`μ ≤ 1`).
pub fn per_epoch_floor(s: &Scenario) -> f64 {
    let t = s.uavs.iter().map(|u| u.radio_capacity).fold(f64::INFINITY, f64::min);
    if !t.is_finite() {
        return 0.0;
    }
    let mut peak: Vec<(f64, f64)> = (0..s.n_missions())
        .map(|m| {
            let (mut cost, mut effort): (f64, f64) = (0.0, 0.0);
            for k in 0..s.epochs() {
                for l in 0..s.n_locations() {
                    if s.n(k, m, l) > 0.0 {
                        cost = cost.max(cell_cost(s, k, m, l));
                        effort = effort.max(s.n(k, m, l) / s.q(l, m));
                    }
                }
            }
            (cost, effort)
        })
        .collect();
    peak.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut used = 0.0;
    let mut total = 0.0;
    for &(n, effort) in &peak {
        total += if n <= 0.0 {
            1.0
        } else {
            ((t - used).max(0.0) / n).min(1.0).min(1.0 / effort)
        };
        used += n;
    }
    total.min(s.n_missions() as f64)
}

fn delivery_nodes(s: &Scenario) -> Vec<LocationId> {
    let mut v: Vec<LocationId> = s.deliverables().map(|(_, d)| d.target).collect();
    v.sort_unstable();
    v.dedup();
    v
}

/// Shortest cycle through the depot and every delivery location, measured in
/// epochs along first routes with no hovering.
pub fn briefest_cycle(s: &Scenario, graph: &RouteGraph) -> CycleEstimate {
    let depot = graph.depot();
    let targets: Vec<LocationId> = delivery_nodes(s).into_iter().filter(|&l| l != depot).collect();
    let n = targets.len();
    if n == 0 {
        return CycleEstimate { epochs: 0, order: vec![depot], exact: true };
    }
    if n + 1 > EXACT_CYCLE_NODES {
        let far = targets.iter().map(|&l| graph.psi_min(depot, l)).max().unwrap_or(0);
        return CycleEstimate { epochs: 2 * far, order: Vec::new(), exact: false };
    }
    let psi = |a: LocationId, b: LocationId| graph.routes(a, b)[0].psi;
    // Held-Karp over subsets of targets.
    let full = (1usize << n) - 1;
    let mut dp = vec![vec![usize::MAX; n]; 1 << n];
    let mut parent = vec![vec![usize::MAX; n]; 1 << n];
    for i in 0..n {
        dp[1 << i][i] = psi(depot, targets[i]);
    }
    for mask in 1..=full {
        for i in 0..n {
            let cur = dp[mask][i];
            if cur == usize::MAX || mask & (1 << i) == 0 {
                continue;
            }
            for j in 0..n {
                if mask & (1 << j) != 0 {
                    continue;
                }
                let next = mask | 1 << j;
                let c = cur + psi(targets[i], targets[j]);
                if c < dp[next][j] {
                    dp[next][j] = c;
                    parent[next][j] = i;
                }
            }
        }
    }
    let (mut last, best) = (0..n)
        .map(|i| (i, dp[full][i] + psi(targets[i], depot)))
        .min_by_key(|&(i, c)| (c, i))
        .unwrap();
    let mut order = Vec::with_capacity(n + 1);
    let mut mask = full;
    while last != usize::MAX {
        order.push(targets[last]);
        let p = parent[mask][last];
        mask &= !(1 << last);
        last = p;
    }
    order.push(depot);
    order.reverse();
    CycleEstimate { epochs: best, order, exact: true }
}

/// Greedy packing of the cycle's visiting order into depot-anchored sorties.
/// `fits` judges a sortie given as the list of visited delivery locations.
fn pack(order: &[LocationId], mut fits: impl FnMut(&[LocationId]) -> bool) -> usize {
    let stops = &order[1.min(order.len())..];
    if stops.is_empty() {
        return 1;
    }
    let mut count = 0;
    let mut start = 0;
    while start < stops.len() {
        let mut end = start + 1;
        while end < stops.len() && fits(&stops[start..=end]) {
            end += 1;
        }
        count += 1;
        start = end;
    }
    count
}

/// Fleet-size estimates from packing the briefest cycle: `ρ_e` against
/// battery and horizon, `ρ_t` against delivery windows.
pub fn min_fleet_size(s: &Scenario, graph: &RouteGraph, cycle: &CycleEstimate) -> FleetEstimate {
    if !cycle.exact {
        let horizon = s.epochs().saturating_sub(1).max(1);
        let rho = cycle.epochs.div_ceil(horizon).max(1);
        return FleetEstimate { r: rho, rho_e: rho, rho_t: 1 };
    }
    let depot = graph.depot();
    let battery = s.uavs.iter().map(|u| u.battery_capacity).fold(f64::INFINITY, f64::min);
    let horizon = s.epochs().saturating_sub(1);
    let legs = |stops: &[LocationId]| {
        let mut seq = vec![depot];
        seq.extend_from_slice(stops);
        seq.push(depot);
        seq
    };
    let rho_e = pack(&cycle.order, |stops| {
        let seq = legs(stops);
        let (mut t, mut e) = (0, 0.0);
        for w in seq.windows(2) {
            let r = &graph.routes(w[0], w[1])[0];
            t += r.psi;
            e += r.energy;
        }
        t <= horizon && e <= battery
    });
    let rho_t = pack(&cycle.order, |stops| {
        let seq = legs(stops);
        let mut t = 0;
        for w in seq.windows(2) {
            t += graph.routes(w[0], w[1])[0].psi;
            if w[1] == depot {
                continue;
            }
            let windows: Vec<_> =
                s.deliverables().filter(|(_, d)| d.target == w[1]).map(|(_, d)| *d).collect();
            let a = windows.iter().map(|d| d.earliest).max().unwrap_or(0);
            let b = windows.iter().map(|d| d.latest).min().unwrap_or(horizon);
            t = t.max(a);
            if t > b {
                return false;
            }
        }
        t <= horizon
    });
    FleetEstimate { r: rho_e.max(rho_t).max(1), rho_e, rho_t }
}

/// Duration lower bound for `r` cooperating UAVs: out-and-back to the `r − 1`
/// nearest delivery locations plus the hop from the nearest one to the
/// farthest.
pub fn multi_uav_cycle(s: &Scenario, graph: &RouteGraph, r: usize) -> usize {
    let depot = graph.depot();
    let mut by_dist: Vec<(usize, LocationId)> = delivery_nodes(s)
        .into_iter()
        .filter(|&l| l != depot)
        .map(|l| (graph.psi_min(depot, l), l))
        .collect();
    by_dist.sort_unstable();
    let Some(&(_, far)) = by_dist.last() else {
        return 0;
    };
    let near = by_dist[0].1;
    let out: usize = by_dist.iter().take(r.saturating_sub(1)).map(|&(d, _)| 2 * d).sum();
    let hop = if near == far { 0 } else { graph.psi_min(near, far) };
    out + hop
}

/// Θ̲ = |S| · per-epoch floor, with |S| from the briefest cycle (or its
/// proxies). Refuses windowed deliveries unless `force_proxy`.
pub fn lower_bound(s: &Scenario, graph: &RouteGraph, force_proxy: bool) -> Result<f64, BoundsError> {
    Ok(bound_report(s, graph, force_proxy)?.lower)
}

fn check_full_windows(s: &Scenario) -> Result<(), BoundsError> {
    let last = s.horizon.last();
    for (p, d) in s.deliverables() {
        if d.earliest != 0 || d.latest != last {
            return Err(BoundsError::Windowed { payload: p });
        }
    }
    Ok(())
}

pub fn bound_report(s: &Scenario, graph: &RouteGraph, force_proxy: bool) -> Result<BoundReport, BoundsError> {
    if !force_proxy {
        check_full_windows(s)?;
    }
    let reach = reachability_indicator(s);
    let (upper, j) = upper_from(s, &reach);
    let cycle = briefest_cycle(s, graph);
    let fleet = min_fleet_size(s, graph, &cycle);
    let cycle_epochs = if fleet.r > 1 {
        multi_uav_cycle(s, graph, fleet.r)
    } else {
        cycle.epochs
    };
    let lower = cycle_epochs as f64 * per_epoch_floor(s);
    let ratio = (lower > 0.0).then(|| upper / lower);
    Ok(BoundReport { upper, lower, ratio, j, reach, cycle, cycle_epochs, fleet })
}
