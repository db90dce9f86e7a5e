//! Branch-parallel exact search.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use uavsched_core::exact::{ExactError, ExactSolution, Incumbent, Problem, SearchMode, SolverLimits};
use uavsched_core::Scenario;

/// Search the root branches on the rayon pool with a shared incumbent.
/// The returned plan does not depend on the number of threads: each branch
/// keeps its first optimum in search order and the lowest branch wins ties.
pub fn solve_exact_parallel(
    s: &Scenario,
    limits: SolverLimits,
    mode: SearchMode,
    deadline: Option<Instant>,
) -> Result<ExactSolution, ExactError> {
    let problem = Problem::prepare(s, limits, mode)?;
    let incumbent = Incumbent::default();
    let nodes = AtomicU64::new(0);
    let stop = move || deadline.is_some_and(|d| Instant::now() >= d);
    let results = (0..problem.root_branches())
        .into_par_iter()
        .map(|b| problem.solve_branch(b, &incumbent, &nodes, &stop))
        .collect::<Result<Vec<_>, _>>()?;
    problem.finish(&results, nodes.load(Ordering::Relaxed))
}
