//! Versioned JSON files for scenarios, plans and validation reports.
//!
//! Every file is an object with a `format` tag and a `version` number next
//! to its payload. Output is pretty-printed with a trailing newline; field
//! order follows the type definitions, so equal values give equal bytes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use uavsched_core::{EvaluationReport, MissionPlan, Scenario, ValidationReport};

use crate::error::{Error, Result};

pub const VERSION: u32 = 1;
pub const SCENARIO_FORMAT: &str = "uavsched-scenario";
pub const PLAN_FORMAT: &str = "uavsched-plan";
pub const VALIDATION_FORMAT: &str = "uavsched-validation";
pub const EVALUATION_FORMAT: &str = "uavsched-evaluation";

/// Planner settings a scenario file may carry; CLI flags override them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PlannerConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub xi: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fake_deliveries: Option<bool>,
}

impl PlannerConfig {
    fn is_empty(&self) -> bool {
        *self == PlannerConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub format: String,
    pub version: u32,
    #[serde(default, skip_serializing_if = "PlannerConfig::is_empty")]
    pub planner: PlannerConfig,
    pub scenario: Scenario,
}

impl ScenarioFile {
    pub fn new(scenario: Scenario) -> Self {
        Self {
            format: SCENARIO_FORMAT.into(),
            version: VERSION,
            planner: PlannerConfig::default(),
            scenario,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub format: String,
    pub version: u32,
    pub scenario_sha256: String,
    pub algorithm: String,
    /// Uniform mission weights used, if they overrode the scenario's.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    pub xi: usize,
    /// Planning horizons as `[start, end)` epoch pairs.
    pub horizons: Vec<[usize; 2]>,
    pub theta: f64,
    pub plan: MissionPlan,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationFile {
    pub format: String,
    pub version: u32,
    pub scenario_sha256: String,
    pub plan_sha256: String,
    pub valid: bool,
    pub violations: usize,
    pub report: ValidationReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationFile {
    pub format: String,
    pub version: u32,
    pub scenario_sha256: String,
    pub report: EvaluationReport,
}

/// Hex SHA-256 of `bytes`.
pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the compact canonical JSON of a scenario.
pub fn scenario_hash(s: &Scenario) -> String {
    sha256_hex(&serde_json::to_vec(s).expect("scenario serializes"))
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut out = serde_json::to_string_pretty(v).expect("value serializes");
    out.push('\n');
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> Result<()> {
    write_text(path, &to_json(v))
}

fn read_tagged<T: DeserializeOwned>(path: &Path, expected: &'static str) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let json = |source| Error::Json {
        path: path.into(),
        source,
    };
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(json)?;
    let found = raw.get("format").and_then(|f| f.as_str()).unwrap_or("").to_string();
    if found != expected {
        return Err(Error::Format {
            path: path.into(),
            expected,
            found,
        });
    }
    let version = raw.get("version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != VERSION {
        return Err(Error::Version {
            path: path.into(),
            found: version,
            supported: VERSION,
        });
    }
    serde_json::from_value(raw).map_err(json)
}

/// Read and structurally check a scenario file.
pub fn read_scenario(path: &Path) -> Result<ScenarioFile> {
    let f: ScenarioFile = read_tagged(path, SCENARIO_FORMAT)?;
    f.scenario.check()?;
    Ok(f)
}

pub fn write_scenario(path: &Path, f: &ScenarioFile) -> Result<()> {
    write_json(path, f)
}

pub fn read_plan(path: &Path) -> Result<PlanFile> {
    read_tagged(path, PLAN_FORMAT)
}

/// Path of the validation report stored next to a plan file.
pub fn sidecar_path(plan: &Path) -> std::path::PathBuf {
    let mut name = plan.file_name().unwrap_or_default().to_os_string();
    name.push(".validation.json");
    plan.with_file_name(name)
}
