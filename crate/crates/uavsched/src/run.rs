//! Planning a scenario end to end: horizon splitting, the chosen algorithm,
//! and the mandatory validation pass.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::{Duration, Instant};

use uavsched_core::exact::{SearchMode, SolverLimits};
use uavsched_core::graph::build_graph;
use uavsched_core::horizon::{auto_split, plan_horizons, split_even};
use uavsched_core::planner::{plan_greedy, plan_insertion, PlannerOptions, PlanningError, Weights};
use uavsched_core::{evaluate, validate_plan, EvaluationReport, MissionPlan, Scenario, ValidationReport};

use crate::error::{Error, Result};
use crate::parallel::solve_exact_parallel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Greedy,
    Insertion,
    Exact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Insertion => "insertion",
            Algorithm::Exact => "exact",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(Algorithm::Greedy),
            "insertion" => Ok(Algorithm::Insertion),
            "exact" => Ok(Algorithm::Exact),
            _ => Err(Error::Usage(format!("unknown algorithm `{s}`"))),
        }
    }
}

/// How the horizon is cut for the heuristics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Horizons {
    /// Sized by battery endurance.
    #[default]
    Auto,
    /// `J` near-equal parts.
    Count(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    /// Uniform α overriding the per-UAV weights of the scenario.
    pub alpha: Option<Vec<f64>>,
    pub xi: usize,
    pub horizons: Horizons,
    pub fake_deliveries: bool,
    pub limits: SolverLimits,
    pub time_budget: Option<Duration>,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        Self {
            algorithm,
            alpha: None,
            xi: 3,
            horizons: Horizons::Auto,
            fake_deliveries: false,
            limits: SolverLimits::default(),
            time_budget: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub plan: MissionPlan,
    pub validation: ValidationReport,
    pub evaluation: EvaluationReport,
    pub horizons: Vec<Range<usize>>,
    pub runtime: Duration,
    /// Search nodes, for the exact solver.
    pub nodes: Option<u64>,
}

impl Outcome {
    pub fn theta(&self) -> f64 {
        self.evaluation.theta
    }
}

pub fn horizon_ranges(s: &Scenario, h: Horizons) -> Vec<Range<usize>> {
    match h {
        Horizons::Auto => auto_split(s),
        Horizons::Count(j) => split_even(s.epochs(), j),
    }
}

fn heuristic(s: &Scenario, cfg: &RunConfig, ranges: &[Range<usize>]) -> Result<MissionPlan, PlanningError> {
    let opts = PlannerOptions {
        fake_deliveries: cfg.fake_deliveries,
    };
    plan_horizons(s, ranges, |sub| {
        let graph = build_graph(sub, cfg.xi)?;
        let weights = match &cfg.alpha {
            Some(a) => Weights::uniform(sub, a),
            None => Weights::from_scenario(sub),
        };
        match cfg.algorithm {
            Algorithm::Greedy => plan_greedy(sub, &graph, &weights, opts),
            _ => plan_insertion(sub, &graph, &weights, opts),
        }
    })
}

/// Plan `s`, then validate. A planner output that fails validation is an
/// internal error and is reported as [`Error::Invalid`].
pub fn plan_scenario(s: &Scenario, cfg: &RunConfig) -> Result<Outcome> {
    s.check()?;
    let start = Instant::now();
    let (plan, horizons, nodes) = match cfg.algorithm {
        Algorithm::Exact => {
            let deadline = cfg.time_budget.map(|b| start + b);
            let sol = solve_exact_parallel(s, cfg.limits, SearchMode::BranchAndBound, deadline)?;
            (sol.plan, vec![0..s.epochs()], Some(sol.nodes))
        }
        _ => {
            let ranges = horizon_ranges(s, cfg.horizons);
            (heuristic(s, cfg, &ranges)?, ranges, None)
        }
    };
    let runtime = start.elapsed();
    let validation = validate_plan(s, &plan)?;
    if !validation.is_valid() {
        return Err(invalid(&validation));
    }
    let evaluation = evaluate(s, &plan);
    Ok(Outcome {
        plan,
        validation,
        evaluation,
        horizons,
        runtime,
        nodes,
    })
}

pub(crate) fn invalid(r: &ValidationReport) -> Error {
    let families: Vec<String> = r.failed().iter().map(|c| c.to_string()).collect();
    Error::Invalid {
        violations: r.violation_count(),
        families: families.join(","),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use uavsched_core::gen::fixtures::line3;
    use uavsched_core::gen::{generate, GenParams};

    #[test]
    fn every_algorithm_plans_the_line() {
        let s = line3();
        for a in [Algorithm::Greedy, Algorithm::Insertion, Algorithm::Exact] {
            let o = plan_scenario(&s, &RunConfig::new(a)).unwrap();
            assert!(o.validation.is_valid());
            assert!(o.theta() <= 3.0 + 1e-9);
        }
        let exact = plan_scenario(&s, &RunConfig::new(Algorithm::Exact)).unwrap();
        assert_eq!(exact.theta(), 3.0);
    }

    #[test]
    fn exact_over_limits_is_a_limits_error() {
        let s = generate(&GenParams::small(), 1).unwrap();
        let e = plan_scenario(&s, &RunConfig::new(Algorithm::Exact)).unwrap_err();
        assert_eq!(e.exit_code(), 4, "{e}");
    }

    #[test]
    fn zero_alpha_still_delivers() {
        let s = generate(&GenParams::small(), 1).unwrap();
        let mut cfg = RunConfig::new(Algorithm::Greedy);
        cfg.alpha = Some(vec![0.0, 0.0]);
        let o = plan_scenario(&s, &cfg).unwrap();
        assert_eq!(o.plan.deliveries.len(), s.deliverable_ids().len());
    }

    #[test]
    fn algorithm_names_round_trip() {
        for a in [Algorithm::Greedy, Algorithm::Insertion, Algorithm::Exact] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("tabu".parse::<Algorithm>().is_err());
    }
}
