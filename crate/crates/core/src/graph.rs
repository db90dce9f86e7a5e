//! Route graph over the depot and delivery targets.
//!
//! For every ordered pair of distinct nodes the graph keeps up to ξ loopless
//! paths of the movement graph (edges where `v ≤ V`), shortest first by epoch
//! count, ties broken lexicographically on the location sequence.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::{LocationId, Scenario, ScenarioError, UavSpec};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("location {to} cannot be reached from location {from}")]
    Unreachable { from: LocationId, to: LocationId },
    #[error("at least one route per pair is required (xi = 0)")]
    ZeroXi,
    #[error("carried mass {mass} kg is outside [0, {capacity}]")]
    MassOutOfRange { mass: f64, capacity: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    pub from: LocationId,
    pub to: LocationId,
    /// Rank among the pair's routes.
    pub g: usize,
    /// Duration in epochs.
    pub psi: usize,
    /// Σ over hops of e(l_i, l_{i+1}), Wh per kg.
    pub energy_per_kg: f64,
    /// Energy with the fleet's heaviest full-payload mass.
    pub energy: f64,
    /// Locations from `from` to `to` inclusive; `psi + 1` entries.
    pub path: Vec<LocationId>,
}

impl Route {
    /// Locations occupied at the `psi` epochs after departure.
    pub fn visited(&self) -> &[LocationId] {
        &self.path[1..]
    }

    /// Hover at `l` for `epochs` epochs.
    pub fn hover(s: &Scenario, l: LocationId, epochs: usize) -> Route {
        let path = vec![l; epochs + 1];
        let energy_per_kg = s.e(l, l) * epochs as f64;
        Route {
            from: l,
            to: l,
            g: 0,
            psi: epochs,
            energy_per_kg,
            energy: energy_per_kg * s.fleet_full_mass(),
            path,
        }
    }

    fn from_path(s: &Scenario, g: usize, path: Vec<LocationId>) -> Route {
        let energy_per_kg = path.windows(2).map(|w| s.e(w[0], w[1])).sum::<f64>();
        Route {
            from: path[0],
            to: path[path.len() - 1],
            g,
            psi: path.len() - 1,
            energy_per_kg,
            energy: energy_per_kg * s.fleet_full_mass(),
            path,
        }
    }
}

/// Σ hops e·(W + carried_mass) for a given airframe.
pub fn route_energy_with_payload(
    route: &Route,
    uav: &UavSpec,
    carried_mass: f64,
) -> Result<f64, GraphError> {
    if !(0.0..=uav.payload_capacity + crate::EPS).contains(&carried_mass) {
        return Err(GraphError::MassOutOfRange {
            mass: carried_mass,
            capacity: uav.payload_capacity,
        });
    }
    Ok(route.energy_per_kg * (uav.empty_weight + carried_mass))
}

#[derive(Debug, Clone)]
pub struct RouteGraph {
    /// Node locations; index 0 is the depot.
    pub nodes: Vec<LocationId>,
    pub xi: usize,
    node_of: Vec<Option<usize>>,
    routes: Vec<Vec<Vec<Route>>>,
}

impl RouteGraph {
    pub fn depot(&self) -> LocationId {
        self.nodes[0]
    }

    /// Routes from one node location to another, sorted by ψ then path.
    ///
    /// # Panics
    /// If either location is not a node of the graph or `from == to`.
    pub fn routes(&self, from: LocationId, to: LocationId) -> &[Route] {
        let a = self.node_of[from].expect("`from` is not a graph node");
        let b = self.node_of[to].expect("`to` is not a graph node");
        assert_ne!(a, b, "self-pairs carry no routes");
        &self.routes[a][b]
    }

    pub fn contains(&self, l: LocationId) -> bool {
        self.node_of.get(l).is_some_and(Option::is_some)
    }

    /// Minimum ψ between two nodes; 0 when they coincide.
    pub fn psi_min(&self, from: LocationId, to: LocationId) -> usize {
        if from == to {
            0
        } else {
            self.routes(from, to)[0].psi
        }
    }

    /// Full-payload energy of the shortest route; 0 when the nodes coincide.
    pub fn energy_min(&self, from: LocationId, to: LocationId) -> f64 {
        if from == to {
            0.0
        } else {
            self.routes(from, to)[0].energy
        }
    }

    /// One line per route: `from,to,g,psi,energy,l0 l1 …`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for row in &self.routes {
            for list in row {
                for r in list {
                    let _ = write!(out, "{},{},{},{},{:.6},", r.from, r.to, r.g, r.psi, r.energy);
                    for (i, l) in r.path.iter().enumerate() {
                        let sep = if i == 0 { "" } else { " " };
                        let _ = write!(out, "{sep}{l}");
                    }
                    out.push('\n');
                }
            }
        }
        out
    }
}

/// Build the graph over the depot and every delivery target.
pub fn build_graph(s: &Scenario, xi: usize) -> Result<RouteGraph, GraphError> {
    build_graph_with(s, xi, &[])
}

/// As [`build_graph`], adding `extra` locations as nodes.
pub fn build_graph_with(
    s: &Scenario,
    xi: usize,
    extra: &[LocationId],
) -> Result<RouteGraph, GraphError> {
    if xi == 0 {
        return Err(GraphError::ZeroXi);
    }
    s.check()?;
    let depot = s.single_depot()?;
    let mut rest: BTreeSet<LocationId> = s.deliverables().map(|(_, d)| d.target).collect();
    rest.extend(extra.iter().copied());
    rest.remove(&depot);
    let mut nodes = vec![depot];
    nodes.extend(rest);
    let mut node_of = vec![None; s.n_locations()];
    for (i, &l) in nodes.iter().enumerate() {
        node_of[l] = Some(i);
    }
    let adj = s.movement_graph(s.fleet_step());
    let mut routes = Vec::with_capacity(nodes.len());
    for &a in &nodes {
        let mut row = Vec::with_capacity(nodes.len());
        for &b in &nodes {
            if a == b {
                row.push(Vec::new());
                continue;
            }
            let paths = k_shortest_paths(&adj, a, b, xi);
            if paths.is_empty() {
                return Err(GraphError::Unreachable { from: a, to: b });
            }
            row.push(
                paths
                    .into_iter()
                    .enumerate()
                    .map(|(g, p)| Route::from_path(s, g, p))
                    .collect(),
            );
        }
        routes.push(row);
    }
    Ok(RouteGraph {
        nodes,
        xi,
        node_of,
        routes,
    })
}

/// Yen's k loopless shortest paths by hop count. Self-loops in `adj` are ignored.
pub fn k_shortest_paths(
    adj: &[Vec<LocationId>],
    src: LocationId,
    dst: LocationId,
    k: usize,
) -> Vec<Vec<LocationId>> {
    let n = adj.len();
    let mut found: Vec<Vec<LocationId>> = Vec::new();
    let mut candidates: BTreeSet<(usize, Vec<LocationId>)> = BTreeSet::new();
    let no_nodes = vec![false; n];
    match shortest_path(adj, src, dst, &no_nodes, &BTreeSet::new()) {
        Some(p) => found.push(p),
        None => return found,
    }
    while found.len() < k {
        let last = found[found.len() - 1].clone();
        for i in 0..last.len() - 1 {
            let root = &last[..=i];
            let mut banned_edges = BTreeSet::new();
            for p in &found {
                if p.len() > i + 1 && &p[..=i] == root {
                    banned_edges.insert((p[i], p[i + 1]));
                }
            }
            let mut banned_nodes = vec![false; n];
            for &l in &root[..i] {
                banned_nodes[l] = true;
            }
            if let Some(spur) = shortest_path(adj, last[i], dst, &banned_nodes, &banned_edges) {
                let mut total = root[..i].to_vec();
                total.extend(spur);
                if !found.contains(&total) {
                    candidates.insert((total.len(), total));
                }
            }
        }
        match candidates.pop_first() {
            Some((_, p)) => found.push(p),
            None => break,
        }
    }
    found
}

/// Lexicographically smallest shortest path avoiding the banned nodes and edges.
fn shortest_path(
    adj: &[Vec<LocationId>],
    src: LocationId,
    dst: LocationId,
    banned_nodes: &[bool],
    banned_edges: &BTreeSet<(LocationId, LocationId)>,
) -> Option<Vec<LocationId>> {
    if banned_nodes[src] || banned_nodes[dst] {
        return None;
    }
    // Distances to `dst` over reversed allowed edges; the movement graph is
    // symmetric, so adj[u] lists predecessors as well.
    let n = adj.len();
    let allowed = |u: LocationId, w: LocationId| {
        u != w && !banned_nodes[u] && !banned_nodes[w] && !banned_edges.contains(&(u, w))
    };
    let mut dist = vec![usize::MAX; n];
    dist[dst] = 0;
    let mut queue = VecDeque::from([dst]);
    while let Some(w) = queue.pop_front() {
        for &u in &adj[w] {
            if dist[u] == usize::MAX && allowed(u, w) {
                dist[u] = dist[w] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[src] == usize::MAX {
        return None;
    }
    let mut path = vec![src];
    let mut cur = src;
    while cur != dst {
        let next = adj[cur]
            .iter()
            .copied()
            .filter(|&w| allowed(cur, w) && dist[w] + 1 == dist[cur])
            .min()?;
        path.push(next);
        cur = next;
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::{line, line3};
    use proptest::prelude::*;

    fn all_simple_paths(adj: &[Vec<usize>], src: usize, dst: usize) -> Vec<Vec<usize>> {
        fn dfs(adj: &[Vec<usize>], cur: usize, dst: usize, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur == dst {
                out.push(path.clone());
                return;
            }
            for &w in &adj[cur] {
                if w != cur && !path.contains(&w) {
                    path.push(w);
                    dfs(adj, w, dst, path, out);
                    path.pop();
                }
            }
        }
        let mut out = Vec::new();
        dfs(adj, src, dst, &mut vec![src], &mut out);
        out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
        out
    }

    fn square() -> Scenario {
        let mut s = line(4, 4, 1, &[]);
        let pos = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)];
        for (i, (x, y)) in pos.iter().enumerate() {
            s.locations[i].x = *x;
            s.locations[i].y = *y;
        }
        for a in 0..4 {
            for b in 0..4 {
                let (dx, dy) = (pos[a].0 - pos[b].0, pos[a].1 - pos[b].1);
                s.distance[a][b] = crate::fmath::sqrt(dx * dx + dy * dy);
                s.physics.travel_energy[a][b] = if a == b { 0.5 } else { s.distance[a][b] };
            }
        }
        s
    }

    #[test]
    fn opposite_corners_have_two_routes_of_two_hops() {
        let s = square();
        let adj = s.movement_graph(1.0);
        let paths = k_shortest_paths(&adj, 0, 3, 2);
        assert_eq!(paths, vec![vec![0, 1, 3], vec![0, 2, 3]]);
        assert_eq!(paths, all_simple_paths(&adj, 0, 3)[..2].to_vec());
    }

    #[test]
    fn adjacent_pair_and_payload_ratio() {
        let s = line3();
        let g = build_graph(&s, 1).unwrap();
        assert_eq!(g.nodes, vec![0, 2]);
        let r = &g.routes(0, 2)[0];
        assert_eq!(r.psi, 2);
        assert_eq!(r.visited(), &[1, 2]);
        let mut s = line(2, 3, 1, &[]);
        s.payloads.push(crate::Payload {
            id: 0,
            weight: 0.1,
            delivery: Some(crate::Delivery { target: 1, earliest: 0, latest: 2 }),
            equipment_for: vec![],
        });
        s.uavs[0].empty_weight = 4.0;
        s.uavs[0].payload_capacity = 2.5;
        let g = build_graph(&s, 1).unwrap();
        let r = &g.routes(0, 1)[0];
        assert_eq!((r.psi, r.path.clone()), (1, vec![0, 1]));
        let full = route_energy_with_payload(r, &s.uavs[0], 2.5).unwrap();
        let empty = route_energy_with_payload(r, &s.uavs[0], 0.0).unwrap();
        assert!((full - r.energy).abs() < 1e-12);
        assert!((empty / full - 4.0 / 6.5).abs() < 1e-12);
        assert!(route_energy_with_payload(r, &s.uavs[0], 3.0).is_err());
        let h = Route::hover(&s, 1, 3);
        let e = route_energy_with_payload(&h, &s.uavs[0], 1.0).unwrap();
        assert!((e - 3.0 * 0.5 * 5.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_zero_xi_and_unreachable_targets() {
        let s = line3();
        assert_eq!(build_graph(&s, 0).unwrap_err(), GraphError::ZeroXi);
        let mut s = line3();
        s.distance[1][2] = 5.0;
        s.distance[2][1] = 5.0;
        s.distance[0][2] = 5.0;
        s.distance[2][0] = 5.0;
        assert_eq!(
            build_graph(&s, 1).unwrap_err(),
            GraphError::Unreachable { from: 0, to: 2 }
        );
    }

    #[test]
    fn text_dump_lists_every_route() {
        let s = line3();
        let g = build_graph(&s, 3).unwrap();
        let text = g.to_text();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("0,2,0,2,"));
        assert!(text.lines().next().unwrap().ends_with(",0 1 2"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn yen_matches_enumeration_oracle(
            edges in proptest::collection::vec(any::<bool>(), 21),
            src in 0usize..7,
            dst in 0usize..7,
            k in 1usize..8,
        ) {
            prop_assume!(src != dst);
            let n = 7;
            let mut adj = vec![Vec::new(); n];
            let mut idx = 0;
            for a in 0..n {
                adj[a].push(a);
                for b in a + 1..n {
                    if edges[idx] {
                        adj[a].push(b);
                        adj[b].push(a);
                    }
                    idx += 1;
                }
            }
            for l in &mut adj {
                l.sort_unstable();
            }
            let got = k_shortest_paths(&adj, src, dst, k);
            let all = all_simple_paths(&adj, src, dst);
            let want: Vec<_> = all.into_iter().take(k).collect();
            prop_assert_eq!(got, want);
        }

        #[test]
        fn first_route_matches_bfs_distance(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut s = line(6, 4, 1, &[]);
            for a in 0..6 {
                for b in a + 1..6 {
                    let d = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
                    s.distance[a][b] = d;
                    s.distance[b][a] = d;
                }
            }
            let adj = s.movement_graph(1.0);
            let bfs = s.hop_distances_from(&[0], 1.0);
            for t in 1..6 {
                let p = k_shortest_paths(&adj, 0, t, 3);
                match bfs[t] {
                    None => prop_assert!(p.is_empty()),
                    Some(d) => {
                        prop_assert_eq!(p[0].len() - 1, d);
                        for w in p.windows(2) {
                            prop_assert!(w[0].len() <= w[1].len());
                        }
                        for path in &p {
                            for h in path.windows(2) {
                                prop_assert!(s.v(h[0], h[1]) <= 1.0);
                            }
                        }
                    }
                }
            }
        }
    }
}
