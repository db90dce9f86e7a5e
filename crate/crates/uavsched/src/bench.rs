//! Runtime scaling of the heuristics against the number of deliveries.

use std::time::Instant;

use uavsched_core::gen::{generate, GenParams, Scale};
use uavsched_core::graph::{build_graph, RouteGraph};
use uavsched_core::planner::{plan_greedy, plan_insertion, PlannerOptions, Weights};
use uavsched_core::Scenario;

use crate::error::Result;
use crate::run::Algorithm;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    /// Fleet size, fixed across the sweep.
    pub uavs: usize,
    pub seed: u64,
    /// Timed runs per point, at least.
    pub repeats: usize,
    /// Keep repeating until this much time per size has been spent.
    pub min_seconds: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            uavs: 3,
            seed: 7,
            repeats: 5,
            min_seconds: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub deliveries: usize,
    pub uavs: usize,
    pub runs: usize,
    pub best_seconds: f64,
    /// The slope fit uses this.
    pub median_seconds: f64,
    pub served: usize,
}

/// The sweep scenario with `deliveries` parcels: a compact grid, a fixed
/// fleet, every window spanning the horizon, and parcels light enough that
/// a few tours can absorb the whole load.
pub fn bench_scenario(deliveries: usize, cfg: &BenchConfig) -> Result<Scenario> {
    let params = GenParams {
        scale: Scale::Custom,
        deliveries,
        locations: 12,
        uavs: (cfg.uavs, cfg.uavs),
        parcel_weight: (0.02, 0.02),
        parcel_capacity: 2.0,
        windows: (GenParams::small().epochs, GenParams::small().epochs),
        ..GenParams::small()
    };
    Ok(generate(&params, cfg.seed)?)
}

fn run_once(s: &Scenario, graph: &RouteGraph, weights: &Weights, algorithm: Algorithm) -> usize {
    let opts = PlannerOptions::default();
    let r = match algorithm {
        Algorithm::Greedy => plan_greedy(s, graph, weights, opts),
        _ => plan_insertion(s, graph, weights, opts),
    };
    match r {
        Ok(p) => p.deliveries.len(),
        Err(uavsched_core::planner::PlanningError::Infeasible { unserved }) => s.deliverable_ids().len() - unserved.len(),
        Err(e) => panic!("bench planner failed: {e}"),
    }
}

/// Time both heuristics at each delivery count. The route graph is built
/// once per scenario, outside the timed region. Sizes are timed in
/// interleaved rounds so that drifting machine speed affects them alike.
pub fn bench(sizes: &[usize], algorithms: &[Algorithm], cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let cases = sizes
        .iter()
        .map(|&n| {
            let s = bench_scenario(n, cfg)?;
            let graph = build_graph(&s, 3)?;
            let weights = Weights::from_scenario(&s);
            Ok((n, s, graph, weights))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    for &algorithm in algorithms {
        let served: Vec<usize> = cases.iter().map(|(_, s, g, w)| run_once(s, g, w, algorithm)).collect();
        let mut times = vec![Vec::new(); cases.len()];
        let budget = cfg.min_seconds * cases.len() as f64;
        let start = Instant::now();
        while times.first().is_some_and(|t| t.len() < cfg.repeats.max(1)) || start.elapsed().as_secs_f64() < budget {
            for (i, (_, s, g, w)) in cases.iter().enumerate() {
                let t = Instant::now();
                std::hint::black_box(run_once(s, g, w, algorithm));
                times[i].push(t.elapsed().as_secs_f64());
            }
        }
        for (i, (n, s, _, _)) in cases.iter().enumerate() {
            let t = &mut times[i];
            t.sort_by(f64::total_cmp);
            rows.push(BenchRow {
                algorithm,
                deliveries: *n,
                uavs: s.n_uavs(),
                runs: t.len(),
                best_seconds: t[0],
                median_seconds: t[t.len() / 2],
                served: served[i],
            });
        }
    }
    rows.sort_by_key(|r| (r.deliveries, r.algorithm));
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`; `None` with fewer than two
/// distinct `x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Slope per algorithm over the rows of a sweep.
pub fn slopes(rows: &[BenchRow]) -> Vec<(Algorithm, Option<f64>)> {
    let mut algos: Vec<Algorithm> = rows.iter().map(|r| r.algorithm).collect();
    algos.sort();
    algos.dedup();
    algos
        .into_iter()
        .map(|a| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.algorithm == a)
                .map(|r| (r.deliveries as f64, r.median_seconds))
                .collect();
            (a, loglog_slope(&pts))
        })
        .collect()
}
