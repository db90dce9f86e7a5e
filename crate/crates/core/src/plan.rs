//! Decision variables of a schedule.

use alloc::vec;
use alloc::vec::Vec;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};

use crate::{Epoch, LocationId, MissionId, PayloadId, PlanError, Scenario, UavId};

/// Per-epoch decisions of one UAV. Every vector has one entry per epoch.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct UavTrack {
    /// λ(d,k).
    #[cfg_attr(feature = "serde", serde(rename = "lambda"))]
    pub location: Vec<LocationId>,
    /// ω(d,k,·) as sorted payload id lists.
    #[cfg_attr(feature = "serde", serde(rename = "omega"))]
    pub carried: Vec<Vec<PayloadId>>,
    /// μ(d,k,m), indexed `[k][m]`.
    #[cfg_attr(feature = "serde", serde(rename = "mu"))]
    pub effort: Vec<Vec<f64>>,
    /// τ(d,k).
    #[cfg_attr(feature = "serde", serde(rename = "tau"))]
    pub relay: Vec<bool>,
    /// β(d,k), Wh.
    #[cfg_attr(feature = "serde", serde(rename = "beta"))]
    pub battery: Vec<f64>,
}

impl UavTrack {
    /// Parked at `depot` with a full battery and nothing on board.
    pub fn parked(depot: LocationId, epochs: usize, missions: usize, battery: f64) -> Self {
        Self {
            location: vec![depot; epochs],
            carried: vec![Vec::new(); epochs],
            effort: vec![vec![0.0; missions]; epochs],
            relay: vec![false; epochs],
            battery: vec![battery; epochs],
        }
    }

    pub fn carries(&self, k: Epoch, p: PayloadId) -> bool {
        self.carried[k].binary_search(&p).is_ok()
    }
}

/// D(d,p,k) = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct DeliveryEvent {
    pub uav: UavId,
    pub payload: PayloadId,
    pub epoch: Epoch,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct MissionPlan {
    pub tracks: Vec<UavTrack>,
    pub deliveries: Vec<DeliveryEvent>,
}

impl MissionPlan {
    /// Every UAV parked at the first depot, no effort, τ from the network flag.
    pub fn idle(s: &Scenario) -> Self {
        let depot = s.depots().first().copied().unwrap_or(0);
        let tracks = s
            .uavs
            .iter()
            .map(|u| {
                let mut t = UavTrack::parked(depot, s.epochs(), s.n_missions(), u.battery_capacity);
                t.relay = vec![s.t_network(depot); s.epochs()];
                t
            })
            .collect();
        Self {
            tracks,
            deliveries: Vec::new(),
        }
    }

    /// Events of `uav` at epoch `k`.
    pub fn events_at(&self, uav: UavId, k: Epoch) -> impl Iterator<Item = &DeliveryEvent> + '_ {
        self.deliveries
            .iter()
            .filter(move |e| e.uav == uav && e.epoch == k)
    }

    /// Canonical ordering of events, used before serialization.
    pub fn normalize(&mut self) {
        for t in &mut self.tracks {
            for c in &mut t.carried {
                c.sort_unstable();
                c.dedup();
            }
        }
        self.deliveries.sort_unstable();
        self.deliveries.dedup();
    }

    /// Check that every table matches the scenario's index spaces.
    pub fn check_dimensions(&self, s: &Scenario) -> Result<(), PlanError> {
        if self.tracks.len() != s.n_uavs() {
            return Err(PlanError::UavCount {
                expected: s.n_uavs(),
                found: self.tracks.len(),
            });
        }
        let nk = s.epochs();
        let nm = s.n_missions();
        for (d, t) in self.tracks.iter().enumerate() {
            let len = |field, found| {
                if found == nk {
                    Ok(())
                } else {
                    Err(PlanError::TrackLength {
                        uav: d,
                        field,
                        expected: nk,
                        found,
                    })
                }
            };
            len("lambda", t.location.len())?;
            len("omega", t.carried.len())?;
            len("mu", t.effort.len())?;
            len("tau", t.relay.len())?;
            len("beta", t.battery.len())?;
            for (k, row) in t.effort.iter().enumerate() {
                if row.len() != nm {
                    return Err(PlanError::TrackLength {
                        uav: d,
                        field: "mu[k]",
                        expected: nm,
                        found: row.len(),
                    });
                }
                if row.iter().any(|x| !x.is_finite() || *x < 0.0 || *x > 1.0) {
                    return Err(PlanError::OutOfDomain {
                        uav: d,
                        epoch: k,
                        what: "mu",
                    });
                }
            }
            for (k, c) in t.carried.iter().enumerate() {
                if let Some(&p) = c.iter().find(|&&p| p >= s.n_payloads()) {
                    return Err(PlanError::UnknownPayload {
                        uav: d,
                        epoch: k,
                        payload: p,
                    });
                }
                if c.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(PlanError::OutOfDomain {
                        uav: d,
                        epoch: k,
                        what: "omega (ids must be sorted and unique)",
                    });
                }
            }
            if let Some(k) = t.battery.iter().position(|b| !b.is_finite()) {
                return Err(PlanError::OutOfDomain {
                    uav: d,
                    epoch: k,
                    what: "beta",
                });
            }
        }
        for e in &self.deliveries {
            if e.uav >= s.n_uavs() || e.payload >= s.n_payloads() || e.epoch >= nk {
                return Err(PlanError::EventOutOfRange {
                    uav: e.uav,
                    payload: e.payload,
                    epoch: e.epoch,
                });
            }
        }
        Ok(())
    }

    /// Effort of `uav` at `(k, m)`.
    pub fn mu(&self, uav: UavId, k: Epoch, m: MissionId) -> f64 {
        self.tracks[uav].effort[k][m]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::line3;

    #[test]
    fn idle_plan_has_matching_dimensions() {
        let s = line3();
        let p = MissionPlan::idle(&s);
        assert_eq!(p.check_dimensions(&s), Ok(()));
        assert!(p.tracks[0].location.iter().all(|&l| l == 0));
    }

    #[test]
    fn dimension_errors_are_reported() {
        let s = line3();
        let mut p = MissionPlan::idle(&s);
        p.tracks[0].battery.pop();
        assert!(matches!(
            p.check_dimensions(&s),
            Err(PlanError::TrackLength { field: "beta", .. })
        ));
        let mut p = MissionPlan::idle(&s);
        p.tracks[0].effort[1][0] = 1.5;
        assert!(matches!(p.check_dimensions(&s), Err(PlanError::OutOfDomain { .. })));
        let mut p = MissionPlan::idle(&s);
        p.deliveries.push(DeliveryEvent {
            uav: 3,
            payload: 0,
            epoch: 0,
        });
        assert!(matches!(p.check_dimensions(&s), Err(PlanError::EventOutOfRange { .. })));
    }
}
