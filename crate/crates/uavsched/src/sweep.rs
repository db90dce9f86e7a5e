//! Grid search over uniform mission weights.

use rayon::prelude::*;
use uavsched_core::Scenario;

use crate::error::{Error, Result};
use crate::run::{plan_scenario, RunConfig};

/// Every α with entries in `{0, step, 2·step, …, 1}` and `Σα ≤ 1`, in
/// lexicographic order. `step` must divide 1.
pub fn alpha_grid(missions: usize, step: f64) -> Result<Vec<Vec<f64>>> {
    let n = (1.0 / step).round();
    if !(step > 0.0) || n < 1.0 || (n * step - 1.0).abs() > 1e-9 {
        return Err(Error::Usage(format!("sweep step {step} does not divide 1")));
    }
    let n = n as usize;
    let mut out = Vec::new();
    let mut cur = vec![0usize; missions];
    fn rec(i: usize, left: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if i == cur.len() {
            out.push(cur.iter().map(|&c| c as f64 / n as f64).collect());
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            rec(i + 1, left - c, n, cur, out);
        }
    }
    rec(0, n, n, &mut cur, &mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub alpha: Vec<f64>,
    /// `None` when the planner found no feasible plan.
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Highest Θ; the earliest grid point wins ties.
    pub fn best(&self) -> Option<&SweepPoint> {
        let mut best: Option<&SweepPoint> = None;
        for p in &self.points {
            if let Some(t) = p.theta {
                if best.is_none_or(|b| t > b.theta.unwrap_or(f64::NEG_INFINITY)) {
                    best = Some(p);
                }
            }
        }
        best
    }

    /// Θ at α ≡ 0, the first grid point.
    pub fn at_zero(&self) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.alpha.iter().all(|&a| a == 0.0))
            .and_then(|p| p.theta)
    }
}

/// Plan `s` once per grid point with `base` settings and α overridden.
/// Grid points run in parallel; results keep grid order.
pub fn sweep(s: &Scenario, base: &RunConfig, step: f64) -> Result<SweepResult> {
    let grid = alpha_grid(s.n_missions(), step)?;
    let points = grid
        .into_par_iter()
        .map(|alpha| {
            let cfg = RunConfig {
                alpha: Some(alpha.clone()),
                ..base.clone()
            };
            match plan_scenario(s, &cfg) {
                Ok(o) => Ok(SweepPoint {
                    alpha,
                    theta: Some(o.theta()),
                }),
                Err(Error::Infeasible(_)) => Ok(SweepPoint { alpha, theta: None }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { points })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of α vectors: C(n + m, m) for `m` missions and `n = 1/step`.
    fn binomial(n: usize, k: usize) -> usize {
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn grid_sizes() {
        assert_eq!(alpha_grid(2, 0.5).unwrap().len(), 6);
        assert_eq!(alpha_grid(1, 0.1).unwrap().len(), 11);
        assert_eq!(alpha_grid(1, 0.25).unwrap().len(), 5);
        for m in 1..4 {
            assert_eq!(alpha_grid(m, 0.1).unwrap().len(), binomial(10 + m, m));
        }
        assert!(alpha_grid(2, 0.3).is_err());
        assert!(alpha_grid(2, 0.0).is_err());
    }

    #[test]
    fn grid_points_are_admissible_and_start_at_zero() {
        let g = alpha_grid(3, 0.1).unwrap();
        assert!(g[0].iter().all(|&a| a == 0.0));
        assert!(g.iter().all(|a| a.iter().sum::<f64>() <= 1.0 + 1e-12));
        let mut sorted = g.clone();
        sorted.dedup();
        assert_eq!(sorted.len(), g.len());
    }

    #[test]
    fn best_prefers_earliest_tie() {
        let r = SweepResult {
            points: vec![
                SweepPoint { alpha: vec![0.0], theta: Some(1.0) },
                SweepPoint { alpha: vec![0.5], theta: Some(2.0) },
                SweepPoint { alpha: vec![1.0], theta: Some(2.0) },
                SweepPoint { alpha: vec![0.7], theta: None },
            ],
        };
        assert_eq!(r.best().unwrap().alpha, vec![0.5]);
        assert_eq!(r.at_zero(), Some(1.0));
    }
}
