use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use uavsched::bench::{bench, slopes, BenchConfig};
use uavsched::io::{
    read_plan, read_scenario, scenario_hash, sha256_hex, sidecar_path, to_json, write_json, write_scenario, write_text,
    EvaluationFile, PlanFile, ScenarioFile, ValidationFile, EVALUATION_FORMAT, PLAN_FORMAT, VALIDATION_FORMAT, VERSION,
};
use uavsched::manifest::{manifest_path, RunManifest};
use uavsched::report::{summarize, write_bench, write_bounds, write_comparison, write_plan_table, write_sweep, BoundSummary};
use uavsched::run::{plan_scenario, Algorithm, Horizons, RunConfig};
use uavsched::sweep::{alpha_grid, sweep};
use uavsched::{Error, Result};
use uavsched_core::bounds::bound_report;
use uavsched_core::exact::mps::export_mps;
use uavsched_core::exact::SolverLimits;
use uavsched_core::gen::{generate_batch, GenParams};
use uavsched_core::graph::build_graph;
use uavsched_core::{evaluate, validate_plan, Scenario};

/// Multi-task UAV fleet planning: deliveries plus coverage and monitoring.
#[derive(Debug, Parser)]
#[command(name = "uavsched", version)]
struct Cli {
    /// Worker threads for batch commands (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate seeded synthetic scenarios.
    Generate(GenerateArgs),
    /// Plan one or more scenarios and validate the result.
    Plan(PlanArgs),
    /// Check a plan against its scenario.
    Validate(ValidateArgs),
    /// Score a plan.
    Evaluate(ValidateArgs),
    /// Upper and lower bounds on the optimum.
    Bound(BoundArgs),
    /// Runtime of the heuristics against the number of deliveries.
    Bench(BenchArgs),
    /// Grid search over uniform mission weights.
    Sweep(SweepArgs),
    /// Tabulate plans for comparison.
    Report(ReportArgs),
    /// Write the exact model as a fixed-format MPS file.
    ExportMps(ExportArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ScaleArg {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AlgoArg {
    Greedy,
    Insertion,
    Exact,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Greedy => Algorithm::Greedy,
            AlgoArg::Insertion => Algorithm::Insertion,
            AlgoArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, value_enum, default_value = "small")]
    scale: ScaleArg,
    /// Topology seed; scenario `i` of the batch uses window seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    count: usize,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct PlannerArgs {
    #[arg(long = "algo", value_enum, default_value = "insertion")]
    algo: AlgoArg,
    /// Uniform mission weights, comma separated.
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    /// Candidate routes per leg.
    #[arg(long)]
    xi: Option<usize>,
    /// `auto` or a horizon count.
    #[arg(long, default_value = "auto", value_parser = parse_horizons)]
    horizons: Horizons,
    /// Let idle UAVs fly toward demand with no parcel.
    #[arg(long)]
    fake_deliveries: bool,
    /// Exact search node budget.
    #[arg(long)]
    node_budget: Option<u64>,
    /// Exact search wall-clock budget in seconds.
    #[arg(long)]
    time_budget: Option<f64>,
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    #[command(flatten)]
    planner: PlannerArgs,
    /// Plan file, for a single scenario.
    #[arg(long, conflicts_with = "out_dir")]
    out: Option<PathBuf>,
    /// Directory receiving `<scenario>.<algo>.plan.json` files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    scenario: PathBuf,
    plan: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    /// Accept narrow windows by treating them as full-horizon.
    #[arg(long)]
    force_proxy: bool,
    #[arg(long, default_value_t = 3)]
    xi: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Delivery counts, comma separated; empty for none.
    #[arg(long, value_delimiter = ',', default_value = "5,10,20,40", value_parser = parse_usize_or_empty)]
    sizes: Vec<Option<usize>>,
    #[arg(long, default_value_t = BenchConfig::default().uavs)]
    uavs: usize,
    #[arg(long, default_value_t = BenchConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = BenchConfig::default().repeats)]
    repeats: usize,
    #[arg(long, default_value_t = BenchConfig::default().min_seconds)]
    min_seconds: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(required = true)]
    scenarios: Vec<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Algorithms to sweep, comma separated.
    #[arg(long = "algo", value_enum, value_delimiter = ',', default_value = "greedy,insertion")]
    algos: Vec<AlgoArg>,
    #[arg(long)]
    xi: Option<usize>,
    #[arg(long, default_value = "auto", value_parser = parse_horizons)]
    horizons: Horizons,
    #[arg(long)]
    fake_deliveries: bool,
    /// Output CSV; with several scenarios, one table holds them all.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Plan files.
    #[arg(required = true)]
    plans: Vec<PathBuf>,
    /// Scenario files the plans were made for, matched by hash.
    #[arg(long, required = true, num_args = 1..)]
    scenarios: Vec<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Debug, Args)]
struct ExportArgs {
    scenario: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_horizons(s: &str) -> std::result::Result<Horizons, String> {
    if s == "auto" {
        return Ok(Horizons::Auto);
    }
    match s.parse::<usize>() {
        Ok(j) if j > 0 => Ok(Horizons::Count(j)),
        _ => Err(format!("expected `auto` or a positive count, got `{s}`")),
    }
}

fn parse_usize_or_empty(s: &str) -> std::result::Result<Option<usize>, String> {
    if s.trim().is_empty() {
        return Ok(None);
    }
    s.trim().parse().map(Some).map_err(|e| format!("{e}"))
}

macro_rules! say {
    ($($t:tt)*) => {
        emit(&format!("{}\n", format_args!($($t)*)))
    };
}

/// Print to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    use std::io::Write;
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn args_vec() -> Vec<String> {
    std::env::args().skip(1).collect()
}

fn load(path: &Path) -> Result<(Scenario, ScenarioFile, String)> {
    let f = read_scenario(path)?;
    let hash = scenario_hash(&f.scenario);
    Ok((f.scenario.clone(), f, hash))
}

fn run_config(p: &PlannerArgs, file: &ScenarioFile) -> RunConfig {
    let mut cfg = RunConfig::new(p.algo.into());
    cfg.alpha = p.alpha.clone().or_else(|| file.planner.alpha.clone());
    cfg.xi = p.xi.or(file.planner.xi).unwrap_or(cfg.xi);
    cfg.horizons = p.horizons;
    cfg.fake_deliveries = p.fake_deliveries || file.planner.fake_deliveries.unwrap_or(false);
    if let Some(n) = p.node_budget {
        cfg.limits = SolverLimits {
            node_budget: n,
            ..cfg.limits
        };
    }
    cfg.time_budget = p.time_budget.map(Duration::from_secs_f64);
    cfg
}

fn file_stem(p: &Path) -> String {
    let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    name.strip_suffix(".json").unwrap_or(&name).to_string()
}

fn cmd_generate(a: &GenerateArgs) -> Result<()> {
    let params = match a.scale {
        ScaleArg::Small => GenParams::small(),
        ScaleArg::Large => GenParams::large(),
    };
    let start = Instant::now();
    let batch = generate_batch(&params, a.seed, a.count)?;
    let mut m = RunManifest::new("generate", args_vec());
    m.seeds = (1..=a.count as u64).map(|i| a.seed.wrapping_add(i)).collect();
    m.time("generate", start.elapsed().as_secs_f64());
    for s in batch {
        let path = a.out_dir.join(format!("{}.json", s.name));
        m.scenario_sha256.push(scenario_hash(&s));
        write_scenario(&path, &ScenarioFile::new(s))?;
        m.record(&path)?;
        say!("{}", path.display());
    }
    m.write(&a.out_dir.join("manifest.json"))
}

fn plan_one(path: &Path, a: &PlannerArgs, out: &Path) -> Result<RunManifest> {
    let (s, file, hash) = load(path)?;
    let cfg = run_config(a, &file);
    let outcome = plan_scenario(&s, &cfg)?;
    let pf = PlanFile {
        format: PLAN_FORMAT.into(),
        version: VERSION,
        scenario_sha256: hash.clone(),
        algorithm: cfg.algorithm.name().into(),
        alpha: cfg.alpha.clone(),
        xi: cfg.xi,
        horizons: outcome.horizons.iter().map(|r| [r.start, r.end]).collect(),
        theta: outcome.theta(),
        plan: outcome.plan.clone(),
    };
    let text = to_json(&pf);
    write_text(out, &text)?;
    let vf = ValidationFile {
        format: VALIDATION_FORMAT.into(),
        version: VERSION,
        scenario_sha256: hash.clone(),
        plan_sha256: sha256_hex(text.as_bytes()),
        valid: outcome.validation.is_valid(),
        violations: outcome.validation.violation_count(),
        report: outcome.validation.clone(),
    };
    let sidecar = sidecar_path(out);
    write_json(&sidecar, &vf)?;
    let eval_path = evaluation_path(out);
    write_json(
        &eval_path,
        &EvaluationFile {
            format: EVALUATION_FORMAT.into(),
            version: VERSION,
            scenario_sha256: hash.clone(),
            report: outcome.evaluation.clone(),
        },
    )?;
    let mut m = RunManifest::new("plan", args_vec());
    m.scenario_sha256.push(hash);
    m.algorithm = Some(cfg.algorithm.name().into());
    m.alpha_grid = cfg.alpha.iter().cloned().collect();
    m.xi = Some(cfg.xi);
    m.time("plan", outcome.runtime.as_secs_f64());
    for p in [out, sidecar.as_path(), eval_path.as_path()] {
        m.record(p)?;
    }
    m.write(&manifest_path(out))?;
    say!("{}: theta={} deliveries={}", out.display(), pf.theta, pf.plan.deliveries.len());
    Ok(m)
}

fn evaluation_path(plan: &Path) -> PathBuf {
    let mut name = plan.file_name().unwrap_or_default().to_os_string();
    name.push(".evaluation.json");
    plan.with_file_name(name)
}

fn cmd_plan(a: &PlanArgs) -> Result<()> {
    let algo: Algorithm = a.planner.algo.into();
    let targets: Vec<(PathBuf, PathBuf)> = match (&a.out, &a.out_dir) {
        (Some(out), None) if a.scenarios.len() == 1 => vec![(a.scenarios[0].clone(), out.clone())],
        (None, Some(dir)) => a
            .scenarios
            .iter()
            .map(|s| (s.clone(), dir.join(format!("{}.{}.plan.json", file_stem(s), algo))))
            .collect(),
        _ => return Err(Error::Usage("give --out for one scenario or --out-dir for several".into())),
    };
    let results: Vec<Result<RunManifest>> = targets.par_iter().map(|(s, o)| plan_one(s, &a.planner, o)).collect();
    let mut first_err = None;
    for (r, (s, _)) in results.into_iter().zip(&targets) {
        if let Err(e) = r {
            if targets.len() > 1 {
                eprintln!("{}: {e}", s.display());
            }
            first_err.get_or_insert(e);
        }
    }
    first_err.map_or(Ok(()), Err)
}

fn load_pair(a: &ValidateArgs) -> Result<(Scenario, PlanFile, String)> {
    let (s, _, hash) = load(&a.scenario)?;
    let pf = read_plan(&a.plan)?;
    if pf.scenario_sha256 != hash {
        return Err(Error::ScenarioMismatch {
            plan: pf.scenario_sha256,
            scenario: hash,
        });
    }
    Ok((s, pf, hash))
}

fn cmd_validate(a: &ValidateArgs) -> Result<()> {
    let (s, pf, hash) = load_pair(a)?;
    let report = validate_plan(&s, &pf.plan)?;
    let bytes = std::fs::read(&a.plan).map_err(|e| Error::Io {
        path: a.plan.clone(),
        source: e,
    })?;
    let vf = ValidationFile {
        format: VALIDATION_FORMAT.into(),
        version: VERSION,
        scenario_sha256: hash,
        plan_sha256: sha256_hex(&bytes),
        valid: report.is_valid(),
        violations: report.violation_count(),
        report,
    };
    match &a.out {
        Some(out) => write_json(out, &vf)?,
        None => emit(&to_json(&vf)),
    }
    if vf.valid {
        Ok(())
    } else {
        let families: Vec<String> = vf.report.failed().iter().map(|c| c.to_string()).collect();
        Err(Error::Invalid {
            violations: vf.violations,
            families: families.join(","),
        })
    }
}

fn cmd_evaluate(a: &ValidateArgs) -> Result<()> {
    let (s, pf, hash) = load_pair(a)?;
    let ef = EvaluationFile {
        format: EVALUATION_FORMAT.into(),
        version: VERSION,
        scenario_sha256: hash,
        report: evaluate(&s, &pf.plan),
    };
    match &a.out {
        Some(out) => write_json(out, &ef),
        None => {
            emit(&to_json(&ef));
            Ok(())
        }
    }
}

fn cmd_bound(a: &BoundArgs) -> Result<()> {
    let start = Instant::now();
    let rows = a
        .scenarios
        .par_iter()
        .map(|p| {
            let (s, _, hash) = load(p)?;
            let graph = build_graph(&s, a.xi)?;
            let b = bound_report(&s, &graph, a.force_proxy)?;
            Ok((BoundSummary::new(&s, &b), hash))
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries: Vec<BoundSummary> = rows.iter().map(|r| r.0.clone()).collect();
    write_bounds(&a.out, &summaries)?;
    let json = a.out.with_extension("json");
    write_json(&json, &summaries)?;
    let mut m = RunManifest::new("bound", args_vec());
    m.scenario_sha256 = rows.into_iter().map(|r| r.1).collect();
    m.xi = Some(a.xi);
    m.time("bound", start.elapsed().as_secs_f64());
    m.record(&a.out)?;
    m.record(&json)?;
    m.write(&manifest_path(&a.out))?;
    for b in &summaries {
        say!("{}: lower={} upper={}", b.scenario, b.lower, b.upper);
    }
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let sizes: Vec<usize> = a.sizes.iter().flatten().copied().collect();
    let cfg = BenchConfig {
        uavs: a.uavs,
        seed: a.seed,
        repeats: a.repeats,
        min_seconds: a.min_seconds,
    };
    let start = Instant::now();
    let rows = bench(&sizes, &[Algorithm::Greedy, Algorithm::Insertion], &cfg)?;
    write_bench(&a.out, &rows)?;
    let mut m = RunManifest::new("bench", args_vec());
    m.seeds = vec![a.seed];
    m.xi = Some(3);
    m.time("bench", start.elapsed().as_secs_f64());
    m.record(&a.out)?;
    m.write(&manifest_path(&a.out))?;
    for (algo, slope) in slopes(&rows) {
        match slope {
            Some(x) => say!("{algo}: log-log slope {x:.3}"),
            None => say!("{algo}: not enough sizes for a slope"),
        }
    }
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    let start = Instant::now();
    let per_scenario = a
        .scenarios
        .par_iter()
        .map(|p| {
            let (s, _, hash) = load(p)?;
            let results = a
                .algos
                .iter()
                .map(|&algo| {
                    let mut base = RunConfig::new(algo.into());
                    base.xi = a.xi.unwrap_or(base.xi);
                    base.horizons = a.horizons;
                    base.fake_deliveries = a.fake_deliveries;
                    Ok((Algorithm::from(algo).name().to_string(), sweep(&s, &base, a.step)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((s, hash, results))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = RunManifest::new("sweep", args_vec());
    if let Some((s, _, _)) = per_scenario.first() {
        m.alpha_grid = alpha_grid(s.n_missions(), a.step)?;
    }
    m.xi = Some(a.xi.unwrap_or(3));
    let mut tables = Vec::new();
    for (s, hash, results) in &per_scenario {
        m.scenario_sha256.push(hash.clone());
        for (algo, r) in results {
            match r.best() {
                Some(b) => say!("{} {algo}: best alpha {:?} theta {}", s.name, b.alpha, b.theta.unwrap_or(0.0)),
                None => say!("{} {algo}: no feasible grid point", s.name),
            }
        }
        tables.push((s.name.clone(), results.clone()));
    }
    write_sweep(&a.out, &tables)?;
    m.time("sweep", start.elapsed().as_secs_f64());
    m.record(&a.out)?;
    m.write(&manifest_path(&a.out))
}

fn cmd_report(a: &ReportArgs) -> Result<()> {
    let scenarios = a
        .scenarios
        .iter()
        .map(|p| load(p).map(|(s, _, h)| (h, s)))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::new();
    let mut m = RunManifest::new("report", args_vec());
    for p in &a.plans {
        let pf = read_plan(p)?;
        let Some((_, s)) = scenarios.iter().find(|(h, _)| *h == pf.scenario_sha256) else {
            return Err(Error::Usage(format!(
                "{}: no scenario given with hash {}",
                p.display(),
                pf.scenario_sha256
            )));
        };
        rows.push(summarize(
            s,
            &pf.scenario_sha256,
            &pf.algorithm,
            pf.alpha.clone(),
            pf.xi,
            pf.horizons.len(),
            &pf.plan,
        ));
        if !m.scenario_sha256.contains(&pf.scenario_sha256) {
            m.scenario_sha256.push(pf.scenario_sha256.clone());
        }
    }
    let plans = a.out_dir.join("plans.csv");
    let comparison = a.out_dir.join("comparison.csv");
    write_plan_table(&plans, &rows)?;
    write_comparison(&comparison, &rows)?;
    m.record(&plans)?;
    m.record(&comparison)?;
    m.write(&a.out_dir.join("manifest.json"))?;
    say!("{}\n{}", plans.display(), comparison.display());
    Ok(())
}

fn cmd_export(a: &ExportArgs) -> Result<()> {
    let (s, _, hash) = load(&a.scenario)?;
    write_text(&a.out, &export_mps(&s))?;
    let mut m = RunManifest::new("export-mps", args_vec());
    m.scenario_sha256.push(hash);
    m.record(&a.out)?;
    m.write(&manifest_path(&a.out))
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Generate(a) => cmd_generate(a),
        Command::Plan(a) => cmd_plan(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Report(a) => cmd_report(a),
        Command::ExportMps(a) => cmd_export(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
