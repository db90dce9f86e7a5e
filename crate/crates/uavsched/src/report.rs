//! CSV tables: plan comparisons, sweeps, bounds and benchmarks.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use uavsched_core::bounds::BoundReport;
use uavsched_core::eval::energy_used;
use uavsched_core::{evaluate, MissionPlan, Scenario};

use crate::bench::BenchRow;
use crate::error::{Error, Result};
use crate::sweep::SweepResult;

/// One plan's headline numbers.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanSummary {
    pub scenario: String,
    pub scenario_sha256: String,
    pub algorithm: String,
    pub alpha: Option<Vec<f64>>,
    pub xi: usize,
    pub theta: f64,
    /// Θ over the number of demanded cells.
    pub theta_norm: f64,
    /// `(mission name, Σσ / cells)` per mission.
    pub missions: Vec<(String, f64)>,
    /// Σ_d energy_d / (E_d · horizons).
    pub energy_norm: f64,
    pub deliveries: usize,
    pub uavs_flown: usize,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b > 0.0 {
        a / b
    } else {
        0.0
    }
}

pub fn summarize(
    s: &Scenario,
    scenario_sha256: &str,
    algorithm: &str,
    alpha: Option<Vec<f64>>,
    xi: usize,
    horizons: usize,
    plan: &MissionPlan,
) -> PlanSummary {
    let ev = evaluate(s, plan);
    let cells: usize = ev.cells_by_mission.iter().sum();
    let missions = s
        .missions
        .iter()
        .enumerate()
        .map(|(m, mission)| (mission_label(&mission.name, m), ratio(ev.theta_by_mission[m], ev.cells_by_mission[m] as f64)))
        .collect();
    let energy_norm = (0..s.n_uavs())
        .map(|d| ratio(energy_used(s, plan, d), s.uavs[d].battery_capacity * horizons.max(1) as f64))
        .sum();
    let uavs_flown = plan
        .tracks
        .iter()
        .filter(|t| t.location.iter().any(|&l| !s.is_depot(l)))
        .count();
    PlanSummary {
        scenario: s.name.clone(),
        scenario_sha256: scenario_sha256.into(),
        algorithm: algorithm.into(),
        alpha,
        xi,
        theta: ev.theta,
        theta_norm: ratio(ev.theta, cells as f64),
        missions,
        energy_norm,
        deliveries: plan.deliveries.len(),
        uavs_flown,
    }
}

fn mission_label(name: &str, m: usize) -> String {
    if name.is_empty() {
        format!("m{m}")
    } else {
        name.into()
    }
}

pub fn alpha_label(alpha: &Option<Vec<f64>>) -> String {
    match alpha {
        None => "scenario".into(),
        Some(a) => a.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(";"),
    }
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(csv::Writer::from_path(path)?)
}

fn flush(mut w: csv::Writer<std::fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

/// Long table: one row per plan.
pub fn write_plan_table(path: &Path, rows: &[PlanSummary]) -> Result<()> {
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        for (n, _) in &r.missions {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let mut w = writer(path)?;
    let mut header: Vec<String> = ["scenario", "scenario_sha256", "algorithm", "alpha", "xi", "theta", "theta_norm"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(names.iter().map(|n| format!("{n}_norm")));
    header.extend(["energy_norm", "deliveries", "uavs_flown"].iter().map(|s| s.to_string()));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.scenario.clone(),
            r.scenario_sha256.clone(),
            r.algorithm.clone(),
            alpha_label(&r.alpha),
            r.xi.to_string(),
            r.theta.to_string(),
            r.theta_norm.to_string(),
        ];
        for n in &names {
            let v = r.missions.iter().find(|(m, _)| m == n).map_or(0.0, |x| x.1);
            rec.push(v.to_string());
        }
        rec.push(r.energy_norm.to_string());
        rec.push(r.deliveries.to_string());
        rec.push(r.uavs_flown.to_string());
        w.write_record(&rec)?;
    }
    flush(w, path)
}

/// Wide table: one row per scenario, one column group per algorithm.
pub fn write_comparison(path: &Path, rows: &[PlanSummary]) -> Result<()> {
    let mut algos: Vec<String> = rows.iter().map(|r| r.algorithm.clone()).collect();
    algos.sort();
    algos.dedup();
    let mut names: Vec<String> = Vec::new();
    for r in rows {
        for (n, _) in &r.missions {
            if !names.contains(n) {
                names.push(n.clone());
            }
        }
    }
    let mut by_scenario: BTreeMap<(String, String), BTreeMap<String, &PlanSummary>> = BTreeMap::new();
    for r in rows {
        by_scenario
            .entry((r.scenario.clone(), r.scenario_sha256.clone()))
            .or_default()
            .insert(r.algorithm.clone(), r);
    }
    let mut w = writer(path)?;
    let mut header = vec!["scenario".to_string()];
    for a in &algos {
        header.push(format!("theta_norm_{a}"));
        for n in &names {
            header.push(format!("{n}_norm_{a}"));
        }
        header.push(format!("energy_norm_{a}"));
    }
    w.write_record(&header)?;
    for ((name, _), per) in &by_scenario {
        let mut rec = vec![name.clone()];
        for a in &algos {
            match per.get(a) {
                Some(r) => {
                    rec.push(r.theta_norm.to_string());
                    for n in &names {
                        rec.push(r.missions.iter().find(|(m, _)| m == n).map_or(0.0, |x| x.1).to_string());
                    }
                    rec.push(r.energy_norm.to_string());
                }
                None => rec.extend(std::iter::repeat_n(String::new(), names.len() + 2)),
            }
        }
        w.write_record(&rec)?;
    }
    flush(w, path)
}

/// Per scenario, the sweep of each algorithm.
pub type SweepTable = (String, Vec<(String, SweepResult)>);

pub fn write_sweep(path: &Path, tables: &[SweepTable]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["scenario", "algorithm", "alpha", "theta", "best"])?;
    for (scenario, results) in tables {
        for (algo, r) in results {
            let best = r.best().map(|b| b.alpha.clone());
            for p in &r.points {
                w.write_record([
                    scenario.clone(),
                    algo.clone(),
                    alpha_label(&Some(p.alpha.clone())),
                    p.theta.map_or(String::new(), |t| t.to_string()),
                    (best.as_ref() == Some(&p.alpha)).to_string(),
                ])?;
            }
        }
    }
    flush(w, path)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundSummary {
    pub scenario: String,
    pub upper: f64,
    pub lower: f64,
    pub ratio: Option<f64>,
    pub cycle_epochs: usize,
    pub cycle_exact: bool,
    pub cycle_order: Vec<usize>,
    pub fleet_r: usize,
    pub rho_e: usize,
    pub rho_t: usize,
    pub j: Vec<usize>,
}

impl BoundSummary {
    pub fn new(s: &Scenario, b: &BoundReport) -> Self {
        Self {
            scenario: s.name.clone(),
            upper: b.upper,
            lower: b.lower,
            ratio: b.ratio,
            cycle_epochs: b.cycle_epochs,
            cycle_exact: b.cycle.exact,
            cycle_order: b.cycle.order.clone(),
            fleet_r: b.fleet.r,
            rho_e: b.fleet.rho_e,
            rho_t: b.fleet.rho_t,
            j: b.j.clone(),
        }
    }
}

pub fn write_bounds(path: &Path, rows: &[BoundSummary]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["scenario", "upper", "lower", "ratio", "cycle_epochs", "cycle_exact", "fleet_r", "rho_e", "rho_t"])?;
    for b in rows {
        w.write_record([
            b.scenario.clone(),
            b.upper.to_string(),
            b.lower.to_string(),
            b.ratio.map_or(String::new(), |r| r.to_string()),
            b.cycle_epochs.to_string(),
            b.cycle_exact.to_string(),
            b.fleet_r.to_string(),
            b.rho_e.to_string(),
            b.rho_t.to_string(),
        ])?;
    }
    flush(w, path)
}

pub fn write_bench(path: &Path, rows: &[BenchRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["algorithm", "deliveries", "uavs", "runs", "best_seconds", "median_seconds", "served"])?;
    for r in rows {
        w.write_record([
            r.algorithm.to_string(),
            r.deliveries.to_string(),
            r.uavs.to_string(),
            r.runs.to_string(),
            format!("{:.9}", r.best_seconds),
            format!("{:.9}", r.median_seconds),
            r.served.to_string(),
        ])?;
    }
    flush(w, path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use uavsched_core::gen::fixtures::line;

    #[test]
    fn idle_plan_summarizes_to_zero() {
        let mut s = line(3, 5, 2, &[1.0, 0.5]);
        s.demand[2][0][1] = 1.0;
        s.demand[3][1][2] = 2.0;
        let p = MissionPlan::idle(&s);
        let r = summarize(&s, "h", "greedy", None, 3, 1, &p);
        assert_eq!(r.theta, 0.0);
        assert_eq!(r.energy_norm, 0.0);
        assert!(r.missions.iter().all(|m| m.1 == 0.0));
        assert_eq!(r.missions.len(), 2);
        assert_eq!(r.uavs_flown, 0);
    }

    #[test]
    fn empty_bench_table_has_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("b.csv");
        write_bench(&path, &[]).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "algorithm,deliveries,uavs,runs,best_seconds,median_seconds,served\n");
    }

    #[test]
    fn comparison_has_a_column_group_per_algorithm() {
        let s = line(3, 5, 1, &[1.0, 1.0]);
        let p = MissionPlan::idle(&s);
        let rows = vec![
            summarize(&s, "h", "greedy", None, 3, 1, &p),
            summarize(&s, "h", "insertion", None, 3, 1, &p),
        ];
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        write_comparison(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let header = text.lines().next().unwrap();
        for col in ["m0_norm_greedy", "m1_norm_greedy", "m0_norm_insertion", "m1_norm_insertion"] {
            assert!(header.split(',').any(|c| c == col), "{header}");
        }
        assert_eq!(text.lines().count(), 2);
    }
}
