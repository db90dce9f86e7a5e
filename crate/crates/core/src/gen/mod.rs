//! Seeded synthetic scenarios in the regime of a flood-relief deployment:
//! a planar grid of locations, a border depot, blood and medicine parcels
//! with windows, a coverage mission with a drifting demand field and a
//! monitoring mission on half of the locations.

pub mod fixtures;
pub mod tiny;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fmath::{exp, floor, le, round, sqrt};
use crate::scenario::*;
use crate::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Scale {
    Small,
    Large,
    Custom,
}

/// Generation parameters. Physical defaults follow a lightweight delivery
/// UAV: 4 kg empty, 2.5 kg payload, 230 Wh, 3.125 Wh/km/kg, 6 km/h.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenParams {
    pub scale: Scale,
    pub locations: usize,
    pub deliveries: usize,
    /// Fleet size range; the count is drawn uniformly from it.
    pub uavs: (usize, usize),
    pub epochs: usize,
    pub epoch_minutes: f64,
    /// Grid spacing in km.
    pub spacing_km: f64,
    pub speed_kmh: f64,
    pub empty_weight: f64,
    pub payload_capacity: f64,
    pub battery_capacity: f64,
    /// Wh per km per kg.
    pub energy_per_km_kg: f64,
    /// Wh per m of climb per kg.
    pub climb_energy_per_m_kg: f64,
    /// Hover cost per epoch as a fraction of one full step's cost.
    pub hover_factor: f64,
    /// Wh per delivery.
    pub vertical_delivery_energy: f64,
    /// Weight of the radio and of the camera.
    pub equipment_weight: f64,
    /// Parcel weight range.
    pub parcel_weight: (f64, f64),
    /// Residual capacity reserved for parcels.
    pub parcel_capacity: f64,
    pub radio_capacity: f64,
    /// Peak coverage demand.
    pub coverage_peak: f64,
    pub coverage_bumps: usize,
    pub monitoring_fraction: f64,
    pub connectivity_radius_km: f64,
    /// Border towers (besides the depot) linking to the network.
    pub towers: usize,
    /// Window widths of medicine and blood parcels.
    pub windows: (usize, usize),
    pub mission_weights: Vec<f64>,
}

impl GenParams {
    pub fn small() -> Self {
        Self {
            scale: Scale::Small,
            locations: 28,
            deliveries: 7,
            uavs: (10, 15),
            epochs: 20,
            epoch_minutes: 10.0,
            spacing_km: 1.0,
            speed_kmh: 6.0,
            empty_weight: 4.0,
            payload_capacity: 2.5,
            battery_capacity: 230.0,
            energy_per_km_kg: 3.125,
            climb_energy_per_m_kg: 0.002,
            hover_factor: 1.0,
            vertical_delivery_energy: 0.65,
            equipment_weight: 1.0,
            parcel_weight: (0.2, 0.5),
            parcel_capacity: 0.5,
            radio_capacity: 2.0,
            coverage_peak: 3.0,
            coverage_bumps: 3,
            monitoring_fraction: 0.5,
            connectivity_radius_km: 2.0,
            towers: 2,
            windows: (10, 5),
            mission_weights: vec![0.5, 0.5],
        }
    }

    pub fn large() -> Self {
        Self {
            scale: Scale::Large,
            locations: 40,
            deliveries: 20,
            uavs: (20, 30),
            ..Self::small()
        }
    }

    /// Distance covered in one epoch.
    pub fn step_km(&self) -> f64 {
        self.speed_kmh * self.epoch_minutes / 60.0
    }

    /// Distance a fully loaded UAV can fly on one battery.
    pub fn full_payload_range_km(&self) -> f64 {
        self.battery_capacity / (self.energy_per_km_kg * (self.empty_weight + self.payload_capacity))
    }

    pub fn delivery_energy(&self) -> f64 {
        self.vertical_delivery_energy
    }

    pub fn check(&self) -> Result<(), ScenarioError> {
        let bad = |what: &'static str, detail: &str| {
            Err(ScenarioError::InvalidValue { what, detail: String::from(detail) })
        };
        if self.locations < 2 {
            return bad("locations", "need at least two locations");
        }
        if self.epochs < 3 {
            return bad("epochs", "need at least three epochs");
        }
        if self.uavs.0 == 0 || self.uavs.0 > self.uavs.1 {
            return bad("uavs", "range must be non-empty and positive");
        }
        if self.deliveries + 1 > self.locations * 4 {
            return bad("deliveries", "too many deliveries for the grid");
        }
        if self.windows.0 == 0 || self.windows.1 == 0 || self.windows.0.max(self.windows.1) > self.epochs {
            return bad("windows", "widths must be in 1..=epochs");
        }
        if !(self.parcel_weight.0 > 0.0 && self.parcel_weight.0 <= self.parcel_weight.1) {
            return bad("parcel_weight", "range must be positive and ordered");
        }
        if self.parcel_capacity > self.payload_capacity || self.parcel_weight.1 > self.parcel_capacity {
            return bad("parcel_capacity", "must hold one parcel and fit within Y");
        }
        if self.mission_weights.len() != 2 || self.mission_weights.iter().sum::<f64>() > 1.0 + 1e-12 {
            return bad("mission_weights", "two weights summing to at most 1");
        }
        if self.step_km() < self.spacing_km {
            return bad("speed_kmh", "one epoch must cover at least one grid spacing");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error(transparent)]
    Params(#[from] ScenarioError),
    #[error("could not place delivery {index} after {attempts} attempts: {reason}")]
    Unreachable {
        index: usize,
        attempts: usize,
        reason: &'static str,
    },
}

const ATTEMPTS: usize = 256;

/// Grid shape for `n` cells: as square as possible, wider than tall.
fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = floor(sqrt(n as f64)) as usize;
    while rows > 1 && !n.is_multiple_of(rows) {
        rows -= 1;
    }
    if rows <= 1 {
        rows = floor(sqrt(n as f64)).max(1.0) as usize;
    }
    (n.div_ceil(rows), rows)
}

/// Generate a scenario; topology and windows both come from `seed`.
pub fn generate(params: &GenParams, seed: u64) -> Result<Scenario, GenError> {
    generate_with(params, seed, seed)
}

/// A batch sharing one topology (locations, demand, targets, fleet) with
/// windows drawn from `seed + 1, seed + 2, …`.
pub fn generate_batch(params: &GenParams, seed: u64, count: usize) -> Result<Vec<Scenario>, GenError> {
    (1..=count as u64)
        .map(|i| generate_with(params, seed, seed.wrapping_add(i)))
        .collect()
}

/// Generate with separate seeds for the topology and for delivery windows.
pub fn generate_with(params: &GenParams, topology_seed: u64, window_seed: u64) -> Result<Scenario, GenError> {
    params.check()?;
    let mut rng = ChaCha8Rng::seed_from_u64(topology_seed);
    let n = params.locations;
    let (cols, rows) = grid_shape(n);
    let pos = |i: usize| ((i % cols) as f64 * params.spacing_km, (i / cols) as f64 * params.spacing_km);
    let border = |i: usize| {
        let (c, r) = (i % cols, i / cols);
        c == 0 || r == 0 || c + 1 == cols || r + 1 == rows || i + cols >= n
    };
    let border_cells: Vec<usize> = (0..n).filter(|&i| border(i)).collect();
    let depot = *border_cells.choose(&mut rng).expect("grid has a border");

    let non_depot: Vec<usize> = (0..n).filter(|&i| i != depot).collect();
    let planar = |a: usize, b: usize| {
        let (pa, pb) = (pos(a), pos(b));
        round_to(sqrt((pa.0 - pb.0) * (pa.0 - pb.0) + (pa.1 - pb.1) * (pa.1 - pb.1)), 1e-9)
    };
    let step = params.step_km();
    let adj: Vec<Vec<usize>> = (0..n).map(|a| (0..n).filter(|&b| le(planar(a, b), step)).collect()).collect();
    let home = crate::scenario::bfs(&adj, &[depot]);
    let hop_energy = params.energy_per_km_kg * step + params.climb_energy_per_m_kg * 50.0;
    let full = params.empty_weight + params.payload_capacity;
    let hover = params.hover_factor * params.energy_per_km_kg * step;
    let cheapest = hover.min(params.energy_per_km_kg * params.spacing_km);
    let horizons = crate::horizon::split_for_endurance(params.epochs, floor(params.battery_capacity / (cheapest * full)) as usize);
    let longest = horizons.iter().map(|r| r.len()).max().unwrap_or(0);
    let reachable = |l: usize| {
        home[l].is_some_and(|psi| {
            2 * psi < longest && 2.0 * psi as f64 * hop_energy * full + params.delivery_energy() <= params.battery_capacity
        })
    };
    let pool: Vec<usize> = non_depot.iter().copied().filter(|&l| reachable(l)).collect();
    if pool.is_empty() && params.deliveries > 0 {
        return Err(GenError::Unreachable { index: 0, attempts: 0, reason: "no location admits a full-payload round trip" });
    }
    let mut targets = Vec::with_capacity(params.deliveries);
    while targets.len() < params.deliveries {
        let mut p = pool.clone();
        p.shuffle(&mut rng);
        let take = (params.deliveries - targets.len()).min(p.len());
        targets.extend_from_slice(&p[..take]);
    }

    let mut locations = Vec::with_capacity(n);
    for i in 0..n {
        let (x, y) = pos(i);
        let elevation = if targets.contains(&i) || i == depot { 0.0 } else { 50.0 };
        locations.push(Location { id: i, x, y, elevation, is_depot: i == depot });
    }
    let distance: Vec<Vec<f64>> = (0..n).map(|a| (0..n).map(|b| planar(a, b)).collect()).collect();
    let travel_energy: Vec<Vec<f64>> = (0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        hover
                    } else {
                        let climb = (locations[b].elevation - locations[a].elevation).max(0.0);
                        params.energy_per_km_kg * distance[a][b] + params.climb_energy_per_m_kg * climb
                    }
                })
                .collect()
        })
        .collect();

    let n_uavs = rng.gen_range(params.uavs.0..=params.uavs.1);

    // Connectivity: disk model with towers at the depot and on the border.
    let mut towers = vec![depot];
    let mut candidates: Vec<usize> = border_cells.iter().copied().filter(|&c| c != depot).collect();
    candidates.shuffle(&mut rng);
    towers.extend(candidates.into_iter().take(params.towers.saturating_sub(1)));
    let radius = params.connectivity_radius_km;
    let uav_to_uav = (0..n).map(|a| (0..n).map(|b| le(distance[a][b], radius)).collect()).collect();
    let uav_to_network = (0..n).map(|l| towers.iter().any(|&t| le(distance[l][t], radius))).collect();

    // Coverage demand: Gaussian bumps drifting across the grid.
    let (w, h) = ((cols - 1) as f64 * params.spacing_km, (rows - 1) as f64 * params.spacing_km);
    let bumps: Vec<(f64, f64, f64, f64, f64)> = (0..params.coverage_bumps)
        .map(|_| {
            let cx = rng.gen_range(0.0..=w.max(1e-9));
            let cy = rng.gen_range(0.0..=h.max(1e-9));
            let vx = rng.gen_range(-0.2..=0.2) * params.spacing_km;
            let vy = rng.gen_range(-0.2..=0.2) * params.spacing_km;
            let sd = rng.gen_range(0.8..=1.6) * params.spacing_km;
            (cx, cy, vx, vy, sd)
        })
        .collect();
    let nk = params.epochs;
    let mut demand = vec![vec![vec![0.0; n]; 2]; nk];
    for (k, per_k) in demand.iter_mut().enumerate() {
        for l in (0..n).filter(|&l| l != depot) {
            let (x, y) = (locations[l].x, locations[l].y);
            let mut v = 0.0;
            for &(cx, cy, vx, vy, sd) in &bumps {
                let (dx, dy) = (x - (cx + vx * k as f64), y - (cy + vy * k as f64));
                v += exp(-(dx * dx + dy * dy) / (2.0 * sd * sd));
            }
            let v = round_to(params.coverage_peak * v.min(1.0), 0.01);
            if v >= 0.1 * params.coverage_peak {
                per_k[0][l] = v;
            }
        }
    }
    let mut monitored = non_depot.clone();
    monitored.shuffle(&mut rng);
    monitored.truncate(round(params.monitoring_fraction * non_depot.len() as f64) as usize);
    for per_k in demand.iter_mut() {
        for &l in &monitored {
            per_k[1][l] = 1.0;
        }
    }

    let missions = vec![
        Mission { id: 0, name: String::from("coverage"), data_rate: 1.0 },
        Mission { id: 1, name: String::from("monitoring"), data_rate: 1.0 },
    ];
    let mut payloads = vec![
        Payload { id: 0, weight: params.equipment_weight, delivery: None, equipment_for: vec![0] },
        Payload { id: 1, weight: params.equipment_weight, delivery: None, equipment_for: vec![1] },
    ];
    let parcel_weights: Vec<f64> = (0..params.deliveries)
        .map(|_| round_to(rng.gen_range(params.parcel_weight.0..=params.parcel_weight.1), 0.05))
        .map(|w: f64| w.clamp(params.parcel_weight.0, params.parcel_weight.1))
        .collect();
    let kinds: Vec<bool> = (0..params.deliveries).map(|_| rng.gen_bool(0.5)).collect();

    let uavs: Vec<UavSpec> = (0..n_uavs)
        .map(|id| UavSpec {
            id,
            empty_weight: params.empty_weight,
            payload_capacity: params.payload_capacity,
            battery_capacity: params.battery_capacity,
            max_step_distance: step,
            radio_capacity: params.radio_capacity,
            parcel_capacity: params.parcel_capacity,
            mission_weights: params.mission_weights.clone(),
        })
        .collect();

    let mut s = Scenario {
        name: format!("{}-{}-{}", scale_name(params.scale), topology_seed, window_seed),
        horizon: Horizon { epochs: nk, epoch_minutes: params.epoch_minutes },
        locations,
        distance,
        uavs,
        payloads: Vec::new(),
        missions,
        demand,
        quality: vec![vec![1.0; 2]; n],
        connectivity: Connectivity { uav_to_uav, uav_to_network },
        physics: Physics { travel_energy, vertical_delivery_energy: params.delivery_energy() },
    };

    // Windows: medicine packs get the wide window, blood packs the narrow one.
    // A window is kept when a dedicated full-payload tour inside the planning
    // horizon holding its deadline can serve it.
    debug_assert_eq!(horizons, crate::horizon::auto_split(&s));
    let serviceable = |psi: usize, a: usize, b: usize| {
        let Some(r) = horizons.iter().find(|r| r.contains(&b)) else { return false };
        let (a, b) = (a.max(r.start) - r.start, b - r.start);
        let arrive = a.max(psi);
        let energy = (2 * psi) as f64 * hop_energy * full + (arrive - psi) as f64 * hover * full + params.delivery_energy();
        arrive <= b && arrive + psi < r.len() && energy <= params.battery_capacity
    };
    let mut wrng = ChaCha8Rng::seed_from_u64(window_seed ^ 0x9e37_79b9_7f4a_7c15);
    for (i, &f) in targets.iter().enumerate() {
        let psi = home[f].expect("targets are reachable");
        let width = if kinds[i] { params.windows.0 } else { params.windows.1 };
        let mut placed = None;
        for _ in 0..ATTEMPTS {
            let a = wrng.gen_range(0..=nk - width);
            let b = a + width - 1;
            if serviceable(psi, a, b) {
                placed = Some(Delivery { target: f, earliest: a, latest: b });
                break;
            }
        }
        let Some(win) = placed else {
            return Err(GenError::Unreachable { index: i, attempts: ATTEMPTS, reason: "no window start admits an out-and-back" });
        };
        payloads.push(Payload { id: payloads.len(), weight: parcel_weights[i], delivery: Some(win), equipment_for: vec![] });
    }
    s.payloads = payloads;
    s.check()?;
    debug_assert!(self_check(&s));
    Ok(s)
}

fn scale_name(s: Scale) -> &'static str {
    match s {
        Scale::Small => "small",
        Scale::Large => "large",
        Scale::Custom => "custom",
    }
}

fn round_to(v: f64, unit: f64) -> f64 {
    round(v / unit) * unit
}

/// Every delivery reachable in its window by a full-payload UAV from the
/// depot, with the round trip within battery.
pub fn self_check(s: &Scenario) -> bool {
    let Ok(depot) = s.single_depot() else { return false };
    let step = s.fleet_step();
    let home = s.hop_distances_from(&[depot], step);
    let hop = max_step_energy(s, step);
    s.deliverables().all(|(_, d)| {
        home[d.target].is_some_and(|psi| {
            psi <= d.latest
                && d.earliest.max(psi) + psi <= s.horizon.last()
                && s.uavs.iter().all(|u| {
                    le(2.0 * psi as f64 * hop * u.full_mass() + s.physics.vertical_delivery_energy, u.battery_capacity)
                })
        })
    })
}

fn max_step_energy(s: &Scenario, step: f64) -> f64 {
    let n = s.n_locations();
    let mut mx: f64 = 0.0;
    for a in 0..n {
        for b in 0..n {
            if a != b && le(s.v(a, b), step) {
                mx = mx.max(s.e(a, b));
            }
        }
    }
    mx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_defaults() {
        let s = generate(&GenParams::small(), 7).unwrap();
        assert_eq!(s.n_locations(), 28);
        assert_eq!(s.deliverables().count(), 7);
        assert_eq!(s.epochs(), 20);
        assert!((10..=15).contains(&s.n_uavs()));
        assert!(self_check(&s));
        let l = generate(&GenParams::large(), 7).unwrap();
        assert_eq!(l.n_locations(), 40);
        assert_eq!(l.deliverables().count(), 20);
        assert!((20..=30).contains(&l.n_uavs()));
        assert!(self_check(&l));
    }

    #[test]
    fn step_is_one_km() {
        assert_eq!(GenParams::small().step_km(), 1.0);
    }

    #[test]
    fn full_payload_range() {
        let r = GenParams::small().full_payload_range_km();
        assert!((r - 230.0 / (3.125 * 6.5)).abs() < 1e-12);
        assert!((r - 11.32).abs() < 0.01, "{r}");
    }

    #[test]
    fn default_delivery_energy() {
        assert_eq!(GenParams::small().delivery_energy(), 0.65);
    }

    #[test]
    fn deterministic() {
        let p = GenParams::small();
        assert_eq!(generate(&p, 3).unwrap(), generate(&p, 3).unwrap());
        assert_ne!(generate(&p, 3).unwrap(), generate(&p, 4).unwrap());
    }

    #[test]
    fn batch_shares_topology() {
        let b = generate_batch(&GenParams::small(), 11, 20).unwrap();
        assert_eq!(b.len(), 20);
        for s in &b[1..] {
            assert_eq!(s.locations, b[0].locations);
            assert_eq!(s.demand, b[0].demand);
            let t = |s: &Scenario| s.deliverables().map(|(_, d)| d.target).collect::<Vec<_>>();
            assert_eq!(t(s), t(&b[0]));
        }
        let windows: Vec<_> = b.iter().map(|s| s.deliverables().map(|(_, d)| d.earliest).collect::<Vec<_>>()).collect();
        assert!(windows.iter().any(|w| *w != windows[0]));
    }

    #[test]
    fn window_widths_and_elevation() {
        let s = generate(&GenParams::small(), 5).unwrap();
        for (_, d) in s.deliverables() {
            let w = d.latest - d.earliest + 1;
            assert!(w == 10 || w == 5);
            assert_eq!(s.locations[d.target].elevation, 0.0);
        }
        assert!(s.locations.iter().any(|l| l.elevation == 50.0));
        let monitored = (0..28).filter(|&l| s.n(0, 1, l) > 0.0).count();
        assert_eq!(monitored, 14);
    }

    #[test]
    fn bad_params_rejected() {
        let p = GenParams { uavs: (3, 2), ..GenParams::small() };
        assert!(matches!(generate(&p, 0), Err(GenError::Params(_))));
    }
}
