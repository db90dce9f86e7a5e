use std::path::PathBuf;

use uavsched_core::bounds::BoundsError;
use uavsched_core::exact::ExactError;
use uavsched_core::gen::GenError;
use uavsched_core::graph::GraphError;
use uavsched_core::planner::PlanningError;
use uavsched_core::{PlanError, ScenarioError};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: expected a `{expected}` file, found `{found}`")]
    Format {
        path: PathBuf,
        expected: &'static str,
        found: String,
    },
    #[error("{path}: unsupported format version {found} (this build reads {supported})")]
    Version {
        path: PathBuf,
        found: u32,
        supported: u32,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Generate(#[from] GenError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("limits exceeded: {0}")]
    Limits(String),
    #[error("plan violates {violations} constraint instance(s) in {families}")]
    Invalid { violations: usize, families: String },
    #[error("plan was made for scenario {plan}, not {scenario}")]
    ScenarioMismatch { plan: String, scenario: String },
    #[error("{0}")]
    Usage(String),
}

impl Error {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 2,
            Error::Invalid { .. } => 3,
            Error::Limits(_) => 4,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<PlanningError> for Error {
    fn from(e: PlanningError) -> Self {
        match e {
            PlanningError::Infeasible { .. } => Error::Infeasible(e.to_string()),
            PlanningError::Scenario(s) => Error::Scenario(s),
            PlanningError::Graph(g) => Error::Graph(g),
            PlanningError::Weights { .. } => Error::Usage(e.to_string()),
        }
    }
}

impl From<ExactError> for Error {
    fn from(e: ExactError) -> Self {
        match e {
            ExactError::Scenario(s) => Error::Scenario(s),
            ExactError::Infeasible(_) => Error::Infeasible(e.to_string()),
            ExactError::Limits { .. } | ExactError::NodeBudget(_) => Error::Limits(e.to_string()),
            ExactError::Interrupted => Error::Limits("time budget exhausted".into()),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
