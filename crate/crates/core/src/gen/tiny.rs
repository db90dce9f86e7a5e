//! Random instances small enough for the exact solver.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scenario::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TinySpec {
    pub max_uavs: usize,
    pub max_deliveries: usize,
    pub max_missions: usize,
    pub max_epochs: usize,
    /// Every delivery window spans the whole horizon.
    pub full_windows: bool,
    /// Positive demand in every cell, all links up.
    pub dense: bool,
}

impl Default for TinySpec {
    fn default() -> Self {
        Self {
            max_uavs: 2,
            max_deliveries: 2,
            max_missions: 2,
            max_epochs: 7,
            full_windows: false,
            dense: false,
        }
    }
}

/// A 3–6 location line or grid with 1 km spacing and the depot at location 0.
pub fn tiny(seed: u64, spec: TinySpec) -> Scenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes: [(usize, usize); 5] = [(3, 1), (4, 1), (5, 1), (2, 2), (3, 2)];
    let (cols, rows) = shapes[rng.gen_range(0..shapes.len())];
    let nl = cols * rows;
    let nk = rng.gen_range(5..=spec.max_epochs.max(5));
    let nd = rng.gen_range(1..=spec.max_uavs.max(1));
    let nm = rng.gen_range(1..=spec.max_missions.max(1));

    let locations: Vec<Location> = (0..nl)
        .map(|i| Location {
            id: i,
            x: (i % cols) as f64,
            y: (i / cols) as f64,
            elevation: 0.0,
            is_depot: i == 0,
        })
        .collect();
    let distance: Vec<Vec<f64>> = (0..nl)
        .map(|a| {
            (0..nl)
                .map(|b| {
                    let (pa, pb) = (&locations[a], &locations[b]);
                    libm::hypot(pa.x - pb.x, pa.y - pb.y)
                })
                .collect()
        })
        .collect();
    let travel_energy = distance
        .iter()
        .map(|r| r.iter().map(|&d| if d == 0.0 { 0.5 } else { d }).collect())
        .collect();

    let alpha: Vec<f64> = match nm {
        1 => vec![[0.5, 1.0][rng.gen_range(0..2)]],
        _ => {
            let a = [0.25, 0.5, 0.75][rng.gen_range(0..3)];
            vec![a, 1.0 - a]
        }
    };
    let battery = [8.0, 12.0, 20.0, 40.0][rng.gen_range(0..4)];
    let radio = [1.0, 1.5, 2.0][rng.gen_range(0..3)];
    let uavs = (0..nd)
        .map(|id| UavSpec {
            id,
            empty_weight: 1.0,
            payload_capacity: 2.0,
            battery_capacity: battery,
            max_step_distance: 1.0,
            radio_capacity: radio,
            parcel_capacity: 1.0,
            mission_weights: alpha.clone(),
        })
        .collect();
    let missions = (0..nm)
        .map(|id| Mission {
            id,
            name: format!("m{id}"),
            data_rate: [1.0, 0.5][rng.gen_range(0..2)],
        })
        .collect();

    let mut payloads: Vec<Payload> = (0..nm)
        .map(|m| Payload { id: m, weight: 0.5, delivery: None, equipment_for: vec![m] })
        .collect();
    let np = rng.gen_range(1..=spec.max_deliveries.max(1));
    let mut targets: Vec<usize> = (1..nl).collect();
    targets.shuffle(&mut rng);
    let adj: Vec<Vec<usize>> = (0..nl).map(|a| (0..nl).filter(|&b| distance[a][b] <= 1.0 + 1e-9).collect()).collect();
    let home = bfs(&adj, &[0]);
    for &f in targets.iter().take(np) {
        let psi = home[f].unwrap_or(0);
        let mut win = Delivery { target: f, earliest: 0, latest: nk - 1 };
        if !spec.full_windows {
            let width = rng.gen_range(2..=4usize).min(nk);
            let a = rng.gen_range(0..=nk - width);
            let b = a + width - 1;
            let arrive = a.max(psi);
            if arrive <= b && arrive + psi < nk {
                win = Delivery { target: f, earliest: a, latest: b };
            }
        }
        payloads.push(Payload {
            id: payloads.len(),
            weight: [0.25, 0.5][rng.gen_range(0..2)],
            delivery: Some(win),
            equipment_for: vec![],
        });
    }

    let levels = [0.5, 1.0, 1.5, 2.0];
    let mut demand = vec![vec![vec![0.0; nl]; nm]; nk];
    for m in 0..nm {
        for l in 0..nl {
            let active = spec.dense || (l != 0 && rng.gen_bool(0.5));
            let base = levels[rng.gen_range(0..levels.len())];
            for per_k in demand.iter_mut() {
                if spec.dense || (active && rng.gen_bool(0.7)) {
                    per_k[m][l] = if spec.dense { levels[rng.gen_range(0..levels.len())] } else { base };
                }
            }
        }
    }
    let uav_to_uav = (0..nl)
        .map(|a| (0..nl).map(|b| spec.dense || distance[a][b] <= 1.0 + 1e-9).collect())
        .collect();
    let uav_to_network = (0..nl)
        .map(|l| spec.dense || distance[0][l] <= 1.0 + 1e-9 || rng.gen_bool(0.5))
        .collect();

    Scenario {
        name: format!("tiny-{seed}"),
        horizon: Horizon { epochs: nk, epoch_minutes: 10.0 },
        locations,
        distance,
        uavs,
        payloads,
        missions,
        demand,
        quality: vec![vec![1.0; nm]; nl],
        connectivity: Connectivity { uav_to_uav, uav_to_network },
        physics: Physics { travel_energy, vertical_delivery_energy: 0.1 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tiny_instances_are_well_formed() {
        for seed in 0..200 {
            let s = tiny(seed, TinySpec::default());
            s.check().unwrap();
            assert!(s.check_for_heuristics().is_ok());
            assert!(s.n_locations() <= 8 && s.n_uavs() <= 2 && s.epochs() <= 7);
        }
        let s = tiny(3, TinySpec { full_windows: true, dense: true, ..TinySpec::default() });
        assert!(s.deliverables().all(|(_, d)| d.earliest == 0 && d.latest + 1 == s.epochs()));
        assert_eq!(s.demand_cells(), s.epochs() * s.n_missions() * s.n_locations());
    }
}
