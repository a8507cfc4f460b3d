//! Solve instances with the prescribed searches and report statistics.

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use gencumul_core::engine::{SearchLimits, SearchStats, SearchStatus};
use gencumul_core::RuleMode;
use serde::Serialize;

use crate::instance::{MespInstance, RcpspCprInstance, SmicInstance};
use crate::model::{build_mesp, build_rcpsp_cpr, build_smic, Model};
use crate::search::{greedy_mesp_search, static_est_search};
use crate::solution::{verify_mesp, verify_rcpsp_cpr, verify_smic, Schedule, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    RcpspCpr,
    Smic,
    Mesp,
}

impl Problem {
    pub fn as_str(&self) -> &'static str {
        match self {
            Problem::RcpspCpr => "rcpsp-cpr",
            Problem::Smic => "smic",
            Problem::Mesp => "mesp",
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rcpsp-cpr" => Ok(Problem::RcpspCpr),
            "smic" => Ok(Problem::Smic),
            "mesp" => Ok(Problem::Mesp),
            other => Err(format!("unknown problem `{other}`, expected rcpsp-cpr, smic or mesp")),
        }
    }
}

/// A parsed instance of any of the three problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    RcpspCpr(RcpspCprInstance),
    Smic(SmicInstance),
    Mesp(MespInstance),
}

impl Instance {
    pub fn parse(problem: Problem, text: &str) -> Result<Self, crate::InstanceError> {
        Ok(match problem {
            Problem::RcpspCpr => Instance::RcpspCpr(RcpspCprInstance::parse(text)?),
            Problem::Smic => Instance::Smic(SmicInstance::parse(text)?),
            Problem::Mesp => Instance::Mesp(MespInstance::parse(text)?),
        })
    }

    pub fn problem(&self) -> Problem {
        match self {
            Instance::RcpspCpr(_) => Problem::RcpspCpr,
            Instance::Smic(_) => Problem::Smic,
            Instance::Mesp(_) => Problem::Mesp,
        }
    }

    pub fn build(&self, rules: RuleMode) -> Result<Model, gencumul_core::ModelError> {
        match self {
            Instance::RcpspCpr(i) => build_rcpsp_cpr(i, rules),
            Instance::Smic(i) => build_smic(i, rules),
            Instance::Mesp(i) => build_mesp(i, rules),
        }
    }

    /// Objective value of `sol`, or the first violated requirement.
    pub fn verify(&self, sol: &Schedule) -> Result<i64, Violation> {
        match self {
            Instance::RcpspCpr(i) => verify_rcpsp_cpr(i, sol),
            Instance::Smic(i) => verify_smic(i, sol),
            Instance::Mesp(i) => verify_mesp(i, sol),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub time_limit: Option<Duration>,
    /// Stop at the first solution. MESP always does.
    pub first_solution: bool,
    pub rules: RuleMode,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { time_limit: None, first_solution: false, rules: RuleMode::Auto }
    }
}

/// Solve a built model with the search prescribed for its problem.
/// Returns the statistics and the last solution found.
pub fn solve(problem: Problem, model: &mut Model, opts: &RunOptions) -> (SearchStats, Option<Schedule>) {
    let limits = SearchLimits {
        time_limit: opts.time_limit,
        stop_at_first: opts.first_solution || problem == Problem::Mesp,
    };
    let mut best = None;
    let tasks = model.tasks.clone();
    let mut brancher: Box<dyn gencumul_core::engine::Brancher> = match problem {
        Problem::Mesp => Box::new(greedy_mesp_search(tasks, model.heights.clone())),
        _ => Box::new(static_est_search(tasks)),
    };
    let objective = model.objective;
    let stats = {
        let Model { solver, tasks, heights, .. } = &mut *model;
        let (tasks, heights) = (&*tasks, &*heights);
        solver.solve(brancher.as_mut(), Some(objective), limits, &mut |store| {
            best = Some(Schedule::read(tasks, heights, store));
        })
    };
    (stats, best)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportStatus {
    Optimal,
    Feasible,
    Infeasible,
    Timeout,
    Error,
}

impl From<SearchStatus> for ReportStatus {
    fn from(s: SearchStatus) -> Self {
        match s {
            SearchStatus::Optimal => ReportStatus::Optimal,
            SearchStatus::Feasible => ReportStatus::Feasible,
            SearchStatus::Infeasible => ReportStatus::Infeasible,
            SearchStatus::Timeout => ReportStatus::Timeout,
        }
    }
}

/// One line of the benchmark output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RunReport {
    pub problem: Problem,
    pub instance_path: String,
    pub status: ReportStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective: Option<i64>,
    pub nodes: u64,
    pub backtracks: u64,
    pub elapsed_millis: u64,
    pub time_limit_millis: Option<u64>,
    pub propagator_config: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl RunReport {
    fn new(problem: Problem, path: &Path, opts: &RunOptions) -> Self {
        Self {
            problem,
            instance_path: path.display().to_string(),
            status: ReportStatus::Error,
            objective: None,
            nodes: 0,
            backtracks: 0,
            elapsed_millis: 0,
            time_limit_millis: opts.time_limit.map(|d| d.as_millis() as u64),
            propagator_config: opts.rules.as_str().to_string(),
            error: None,
        }
    }

    pub fn is_error(&self) -> bool {
        self.status == ReportStatus::Error
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports always serialize")
    }
}

/// Parse, build and solve one instance file. Failures become error
/// reports rather than errors.
pub fn run_instance(problem: Problem, path: &Path, opts: &RunOptions) -> (RunReport, Option<Schedule>) {
    let mut report = RunReport::new(problem, path, opts);
    let outcome = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))
        .and_then(|text| Instance::parse(problem, &text).map_err(|e| e.to_string()))
        .and_then(|inst| inst.build(opts.rules).map_err(|e| e.to_string()));
    let mut model = match outcome {
        Ok(m) => m,
        Err(e) => {
            report.error = Some(e);
            return (report, None);
        }
    };
    let (stats, sol) = solve(problem, &mut model, opts);
    report.status = stats.status.into();
    report.objective = match report.status {
        ReportStatus::Optimal | ReportStatus::Feasible => stats.best_objective,
        _ => None,
    };
    report.nodes = stats.nodes;
    report.backtracks = stats.backtracks;
    report.elapsed_millis = stats.elapsed.as_millis() as u64;
    (report, sol)
}

#[derive(Serialize)]
struct CsvRow<'a> {
    problem: &'a str,
    instance: &'a str,
    status: ReportStatus,
    objective: Option<i64>,
    nodes: u64,
    backtracks: u64,
    #[serde(rename = "elapsedMillis")]
    elapsed_millis: u64,
}

/// Writes reports as CSV with a header row.
pub struct CsvReporter<W: io::Write> {
    writer: csv::Writer<W>,
}

impl<W: io::Write> CsvReporter<W> {
    pub fn new(out: W) -> Self {
        Self { writer: csv::Writer::from_writer(out) }
    }

    pub fn write(&mut self, r: &RunReport) -> csv::Result<()> {
        self.writer.serialize(CsvRow {
            problem: r.problem.as_str(),
            instance: &r.instance_path,
            status: r.status,
            objective: r.objective,
            nodes: r.nodes,
            backtracks: r.backtracks,
            elapsed_millis: r.elapsed_millis,
        })?;
        self.writer.flush()?;
        Ok(())
    }
}
