use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use gencumul_core::RuleMode;
use gencumul_problems::bench::{run_instance, CsvReporter, Instance, Problem, RunOptions};
use gencumul_problems::generate_mesp;
use gencumul_problems::solution::Schedule;

#[derive(Debug, Parser)]
#[command(name = "gencumul", version, about = "Scheduling benchmarks on the generalized cumulative constraint")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve instance files, printing one report per instance
    Solve {
        /// rcpsp-cpr, smic or mesp
        #[arg(value_parser = parse_problem)]
        problem: Problem,
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        /// Wall-clock budget per instance, e.g. `30s` or `2min`
        #[arg(long, value_parser = humantime::parse_duration)]
        time_limit: Option<Duration>,
        /// Stop at the first solution (always on for mesp)
        #[arg(long)]
        first_solution: bool,
        /// Emit CSV instead of JSON lines
        #[arg(long)]
        csv: bool,
        #[arg(long, value_enum, default_value_t = Rules::Auto)]
        rules: Rules,
        /// Write the best solution of each instance to DIR/<file stem>.sol
        #[arg(long, value_name = "DIR")]
        solutions: Option<PathBuf>,
    },
    /// Generate a random instance
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Check a solution file against an instance
    Check {
        /// rcpsp-cpr, smic or mesp
        #[arg(value_parser = parse_problem)]
        problem: Problem,
        path: PathBuf,
        #[arg(long)]
        solution: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum GenerateKind {
    Mesp {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file, stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Rules {
    Auto,
    All,
    ForbidOnly,
}

impl From<Rules> for RuleMode {
    fn from(r: Rules) -> Self {
        match r {
            Rules::Auto => RuleMode::Auto,
            Rules::All => RuleMode::All,
            Rules::ForbidOnly => RuleMode::ForbidOnly,
        }
    }
}

fn parse_problem(s: &str) -> Result<Problem, String> {
    s.parse()
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

/// Returns whether every instance went through without error.
fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve { problem, paths, time_limit, first_solution, csv, rules, solutions } => {
            let opts = RunOptions { time_limit, first_solution, rules: rules.into() };
            if let Some(dir) = &solutions {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            }
            let stdout = io::stdout();
            let mut csv_out = csv.then(|| CsvReporter::new(stdout.lock()));
            let mut all_ok = true;
            for path in &paths {
                let (report, sol) = run_instance(problem, path, &opts);
                all_ok &= !report.is_error();
                match csv_out.as_mut() {
                    Some(w) => w.write(&report)?,
                    None => {
                        let mut out = io::stdout().lock();
                        writeln!(out, "{}", report.to_json())?;
                        out.flush()?;
                    }
                }
                if let (Some(dir), Some(sol)) = (&solutions, sol) {
                    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
                    let file = dir.join(format!("{stem}.sol"));
                    fs::write(&file, sol.to_dzn()).with_context(|| format!("cannot write {}", file.display()))?;
                }
            }
            Ok(all_ok)
        }
        Command::Generate { kind: GenerateKind::Mesp { n, seed, out } } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let text = generate_mesp(n, seed).to_dzn();
            match out {
                Some(path) => fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(true)
        }
        Command::Check { problem, path, solution } => {
            let text = fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
            let inst = Instance::parse(problem, &text).with_context(|| format!("invalid instance {}", path.display()))?;
            let sol_text =
                fs::read_to_string(&solution).with_context(|| format!("cannot read {}", solution.display()))?;
            let sol = Schedule::from_dzn(&sol_text).with_context(|| format!("invalid solution {}", solution.display()))?;
            match inst.verify(&sol) {
                Ok(objective) => {
                    println!("valid, objective {objective}");
                    Ok(true)
                }
                Err(v) => {
                    println!("invalid: {v}");
                    Ok(false)
                }
            }
        }
    }
}
