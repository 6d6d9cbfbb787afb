//! Library side of the `heading-consensus` command: scenario loading, runs,
//! output files and the built-in reproductions. `main.rs` only parses flags.

use std::env;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{analyze, AnalysisReport, Tolerances, Trajectory};
use crate::builtin::Builtin;
use crate::dynamics::{simulate, simulate_local_frame, LocalFrameSet, ParamError, SimParams};
use crate::geometry::{Angle, Vec2};
use crate::output::{write_trajectory_csv, Feasibility, IntegrationSettings, RunReport};
use crate::scenario::{check_feasibility, Scenario, ScenarioError};
use crate::scenario_file::{scenario_hash, LoadedScenario, ScenarioFile, ScenarioFileError};

pub const OUT_DIR_ENV: &str = "HEADING_CONSENSUS_OUT";
pub const DEFAULT_OUT_DIR: &str = "out";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("scenario rejected: {0}")]
    Validation(String),
    #[error("invalid run configuration: {0}")]
    Config(#[from] ParamError),
    #[error("{0}")]
    Io(String),
    #[error("reproduction failed:\n{0}")]
    Assertion(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Config(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
            CliError::Assertion(_) => EXIT_ASSERTION,
        }
    }

    fn from_scenario(e: ScenarioError) -> Self {
        CliError::Validation(format!("violates {}: {e}", e.assumption()))
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<ScenarioFileError> for CliError {
    fn from(e: ScenarioFileError) -> Self {
        match e {
            ScenarioFileError::Io { path, source } => CliError::Io(format!("cannot read {path}: {source}")),
            ScenarioFileError::Invalid(inner) => CliError::from_scenario(inner),
            other => CliError::Validation(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FrameMode {
    Global,
    /// Frame orientations drawn from the run's seed.
    LocalRandom,
    /// One orientation per agent, radians.
    Local(Vec<f64>),
}

impl FromStr for FrameMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "global" => Ok(FrameMode::Global),
            "local-random" => Ok(FrameMode::LocalRandom),
            _ => {
                let list = s
                    .strip_prefix("local:")
                    .ok_or_else(|| format!("expected global, local-random or local:θ1,θ2,..., got `{s}`"))?;
                list.split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad frame angle `{t}`: {e}")))
                    .collect::<Result<Vec<_>, _>>()
                    .map(FrameMode::Local)
            }
        }
    }
}

impl fmt::Display for FrameMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrameMode::Global => f.write_str("global"),
            FrameMode::LocalRandom => f.write_str("local-random"),
            FrameMode::Local(a) => {
                let parts: Vec<String> = a.iter().map(|x| x.to_string()).collect();
                write!(f, "local:{}", parts.join(","))
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub scenario: PathBuf,
    pub params: SimParams,
    /// Replaces the scenario's initial headings with ones drawn from this seed.
    pub seed: Option<u64>,
    pub out_dir: PathBuf,
    pub frames: FrameMode,
    /// Run this many independent seeded simulations in parallel.
    pub batch: Option<usize>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(scenario: impl Into<PathBuf>, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            scenario: scenario.into(),
            params: SimParams::default(),
            seed: None,
            out_dir: out_dir.into(),
            frames: FrameMode::Global,
            batch: None,
            tolerances: Tolerances::default(),
        }
    }
}

/// `--out` if given, else `$HEADING_CONSENSUS_OUT`, else `./out`.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| env::var_os(OUT_DIR_ENV).map(PathBuf::from)).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// The outcome of one simulation, before anything is written.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub trajectory: Trajectory,
    pub analysis: AnalysisReport,
    pub report: RunReport,
}

/// Desired-heading propagation must succeed; a missing common target is
/// recorded but does not stop the run, since that is the case the
/// misdirected scenarios exist to show.
fn feasibility_of(scenario: &Scenario) -> Result<Feasibility, CliError> {
    match check_feasibility(scenario) {
        Ok(cert) => Ok(Feasibility { feasible: true, target: Some(cert.target), reason: None }),
        Err(e @ (ScenarioError::NoCommonTarget { .. } | ScenarioError::TargetBehindAgent { .. })) => {
            Ok(Feasibility { feasible: false, target: None, reason: Some(format!("violates {}: {e}", e.assumption())) })
        }
        Err(e) => Err(CliError::from_scenario(e)),
    }
}

fn frames_for(mode: &FrameMode, scenario: &Scenario, seed: u64) -> Result<Option<LocalFrameSet>, CliError> {
    match mode {
        FrameMode::Global => Ok(None),
        FrameMode::LocalRandom => Ok(Some(LocalFrameSet::random(scenario.agent_count(), seed))),
        FrameMode::Local(a) => {
            if a.len() != scenario.agent_count() {
                return Err(ParamError::FrameCount { expected: scenario.agent_count(), got: a.len() }.into());
            }
            Ok(Some(LocalFrameSet::new(a.iter().map(|&x| Angle::new(x)).collect())))
        }
    }
}

/// Simulates and analyzes one loaded scenario.
pub fn execute(
    loaded: &LoadedScenario,
    params: &SimParams,
    frames: &FrameMode,
    tolerances: Tolerances,
) -> Result<RunArtifacts, CliError> {
    let scenario = &loaded.scenario;
    let feasibility = feasibility_of(scenario)?;
    let trajectory = match frames_for(frames, scenario, loaded.seed.unwrap_or(0))? {
        None => simulate(scenario, params),
        Some(f) => simulate_local_frame(scenario, &f, params)?,
    };
    let analysis = analyze(&trajectory, tolerances);
    let settings = IntegrationSettings {
        dt: params.dt(),
        t_final: params.t_final(),
        record_every: params.record_every(),
        frames: frames.to_string(),
    };
    let report =
        RunReport::new(loaded.name.clone(), scenario_hash(scenario), loaded.seed, settings, feasibility, &analysis);
    Ok(RunArtifacts { trajectory, analysis, report })
}

fn write_outputs(dir: &Path, stem_suffix: &str, artifacts: &RunArtifacts) -> Result<(PathBuf, PathBuf), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv_path = dir.join(format!("trajectory{stem_suffix}.csv"));
    let report_path = dir.join(format!("report{stem_suffix}.json"));
    let file = fs::File::create(&csv_path).map_err(|e| CliError::io(&csv_path, e))?;
    write_trajectory_csv(&artifacts.trajectory, std::io::BufWriter::new(file))
        .map_err(|e| CliError::io(&csv_path, e))?;
    fs::write(&report_path, artifacts.report.to_json_pretty()).map_err(|e| CliError::io(&report_path, e))?;
    Ok((csv_path, report_path))
}

/// What one `run` invocation produced.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub reports: Vec<RunReport>,
    pub files: Vec<PathBuf>,
}

impl RunOutcome {
    pub fn summary(&self) -> String {
        let mut lines = Vec::new();
        for (k, r) in self.reports.iter().enumerate() {
            let tag = match (self.reports.len(), r.seed) {
                (1, _) => String::new(),
                (_, Some(seed)) => format!("[seed {seed}] "),
                _ => format!("[{k}] "),
            };
            lines.push(format!("{tag}{}", r.summary()));
            if let Some(reason) = &r.feasibility.reason {
                lines.push(format!("{tag}note: set points are not feasible: {reason}"));
            }
        }
        for f in &self.files {
            lines.push(format!("wrote {}", f.display()));
        }
        lines.join("\n")
    }
}

/// Loads, validates, simulates, analyzes and writes `trajectory.csv` and
/// `report.json` (or one numbered pair per batch member).
pub fn run(config: &RunConfig) -> Result<RunOutcome, CliError> {
    let file = ScenarioFile::load(&config.scenario)?;
    let runs: Vec<(String, LoadedScenario)> = match config.batch {
        None => vec![(String::new(), file.resolve(config.seed)?)],
        Some(0) => return Err(CliError::Validation("--batch must be at least 1".into())),
        Some(n) => {
            let base = config.seed.or(file.seed).unwrap_or(0);
            (0..n as u64)
                .map(|k| {
                    let seed = base.wrapping_add(k);
                    Ok((format!("-seed{seed}"), file.resolve(Some(seed))?))
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    let results: Vec<Result<(RunReport, PathBuf, PathBuf), CliError>> = runs
        .par_iter()
        .map(|(suffix, loaded)| {
            let artifacts = execute(loaded, &config.params, &config.frames, config.tolerances)?;
            let (csv, report) = write_outputs(&config.out_dir, suffix, &artifacts)?;
            Ok((artifacts.report, csv, report))
        })
        .collect();
    let mut outcome = RunOutcome { reports: Vec::new(), files: Vec::new() };
    for r in results {
        let (report, csv, json) = r?;
        outcome.reports.push(report);
        outcome.files.push(csv);
        outcome.files.push(json);
    }
    Ok(outcome)
}

/// One expected-versus-observed comparison in a reproduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub expected: String,
    pub observed: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {}: expected {}, observed {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.observed
        )
    }
}

fn below(name: &'static str, value: f64, bound: f64) -> Check {
    Check { name, expected: format!("< {bound:e}"), observed: format!("{value:.3e}"), passed: value < bound }
}

fn above(name: &'static str, value: f64, bound: f64) -> Check {
    Check { name, expected: format!("> {bound}"), observed: format!("{value:.3e}"), passed: value > bound }
}

fn flag(name: &'static str, value: bool, want: bool) -> Check {
    Check { name, expected: want.to_string(), observed: value.to_string(), passed: value == want }
}

/// Hexagon and misdirected-hexagon edge and root errors must fall below this.
pub const REPRODUCE_EDGE_TOL: f64 = 1e-6;
/// Distance of the hexagon's recovered target from the origin (meters).
pub const REPRODUCE_TARGET_TOL: f64 = 1e-4;
/// Minimum miss distance in the misdirected hexagon (meters).
pub const REPRODUCE_MISS_MIN: f64 = 0.05;
/// Residual bound for the aimed Torricelli run (meters).
pub const REPRODUCE_RESIDUAL_TOL: f64 = 1e-4;

/// The assertions each built-in run must satisfy.
pub fn reproduction_checks(which: Builtin, a: &AnalysisReport) -> Vec<Check> {
    let residual = a.intersection_residual.unwrap_or(f64::INFINITY);
    match which {
        Builtin::Hexagon => {
            let miss = a.intersection_point.map_or(f64::INFINITY, |p| p.distance(Vec2::ZERO));
            vec![
                below("max final edge error", a.max_final_edge_error(), REPRODUCE_EDGE_TOL),
                below("final root error", a.final_root_error(), REPRODUCE_EDGE_TOL),
                below("intersection distance from origin (m)", miss, REPRODUCE_TARGET_TOL),
                flag("forward pointing", a.forward_pointing, true),
                flag("consensus", a.consensus, true),
            ]
        }
        Builtin::HexagonMisdirected => vec![
            below("max final edge error", a.max_final_edge_error(), REPRODUCE_EDGE_TOL),
            above("intersection residual (m)", residual, REPRODUCE_MISS_MIN),
            flag("angles satisfied", a.angles_satisfied, true),
            flag("consensus", a.consensus, false),
        ],
        Builtin::Torricelli => vec![
            flag("consensus", a.consensus, true),
            below("intersection residual (m)", residual, REPRODUCE_RESIDUAL_TOL),
        ],
        Builtin::TorricelliMisdirected => vec![
            flag("consensus", a.consensus, false),
            // consensus implies angles satisfied; recorded for the diff
            flag("angles satisfied", a.angles_satisfied, true),
        ],
    }
}

#[derive(Debug, Clone)]
pub struct Reproduction {
    pub which: Builtin,
    pub checks: Vec<Check>,
    pub report: RunReport,
}

impl Reproduction {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut lines = vec![format!("{}: {}", self.which, self.report.summary())];
        lines.extend(self.checks.iter().map(|c| format!("  {c}")));
        lines.join("\n")
    }
}

/// Runs a built-in scenario with default settings and evaluates its checks.
pub fn reproduce(which: Builtin) -> Result<Reproduction, CliError> {
    let loaded = which.load()?;
    let artifacts = execute(&loaded, &SimParams::default(), &FrameMode::Global, Tolerances::default())?;
    Ok(Reproduction { which, checks: reproduction_checks(which, &artifacts.analysis), report: artifacts.report })
}
