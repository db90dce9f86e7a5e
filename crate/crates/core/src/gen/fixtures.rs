//! Hand-built scenarios with known answers, shared by tests and examples.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::scenario::*;

/// Locations on a line 1 km apart with location 0 as the depot; travel costs
/// the distance per kg and hovering 0.5 per kg. Every UAV has W = 1, Y = 2,
/// E = 100, V = 1, T = 1 and Δ = 1; all links are up and quality is 1.
pub fn line(
    n_locations: usize,
    epochs: usize,
    n_uavs: usize,
    missions: &[f64],
) -> Scenario {
    let locations: Vec<Location> = (0..n_locations)
        .map(|i| Location {
            id: i,
            x: i as f64,
            y: 0.0,
            elevation: 0.0,
            is_depot: i == 0,
        })
        .collect();
    let distance: Vec<Vec<f64>> = (0..n_locations)
        .map(|a| (0..n_locations).map(|b| (a as f64 - b as f64).abs()).collect())
        .collect();
    let travel_energy = distance
        .iter()
        .map(|row| row.iter().map(|&d| if d == 0.0 { 0.5 } else { d }).collect())
        .collect();
    let nm = missions.len();
    Scenario {
        name: String::from("line"),
        horizon: Horizon {
            epochs,
            epoch_minutes: 10.0,
        },
        locations,
        distance,
        uavs: (0..n_uavs)
            .map(|id| UavSpec {
                id,
                empty_weight: 1.0,
                payload_capacity: 2.0,
                battery_capacity: 100.0,
                max_step_distance: 1.0,
                radio_capacity: 1.0,
                parcel_capacity: 1.0,
                mission_weights: vec![0.0; nm],
            })
            .collect(),
        payloads: Vec::new(),
        missions: missions
            .iter()
            .enumerate()
            .map(|(id, &s)| Mission {
                id,
                name: String::new(),
                data_rate: s,
            })
            .collect(),
        demand: vec![vec![vec![0.0; n_locations]; nm]; epochs],
        quality: vec![vec![1.0; nm]; n_locations],
        connectivity: Connectivity {
            uav_to_uav: vec![vec![true; n_locations]; n_locations],
            uav_to_network: vec![true; n_locations],
        },
        physics: Physics {
            travel_energy,
            vertical_delivery_energy: 0.1,
        },
    }
}

/// L0(depot)–L1–L2, six epochs, one UAV, one parcel for L2 due in [2,4] and
/// unit coverage demand at L1 in every epoch. Payload 0 is the mission
/// equipment (1 kg), payload 1 the parcel (0.2 kg). L2 has no network link.
pub fn line3() -> Scenario {
    let mut s = line(3, 6, 1, &[1.0]);
    s.payloads = vec![
        Payload {
            id: 0,
            weight: 1.0,
            delivery: None,
            equipment_for: vec![0],
        },
        Payload {
            id: 1,
            weight: 0.2,
            delivery: Some(Delivery {
                target: 2,
                earliest: 2,
                latest: 4,
            }),
            equipment_for: Vec::new(),
        },
    ];
    for k in 0..6 {
        s.demand[k][0][1] = 1.0;
    }
    s.connectivity.uav_to_network[2] = false;
    s.uavs[0].mission_weights = vec![0.5];
    s
}
