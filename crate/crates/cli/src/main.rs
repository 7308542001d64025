//! `omega`: analysis, Laplace transformations and integration of linear
//! PDE systems read from `.pde` files.

mod render;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use report::Failure;

#[derive(Parser, Debug)]
#[command(
    name = "omega",
    version,
    about = "Generalized Laplace transformations for class-one PDE systems"
)]
struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Completion, compatibility, symbol dimensions, type and complexity.
    Analyze(FileArgs),
    /// One Laplace transformation with its inverse.
    Laplace(FileArgs),
    /// Integrate completely and verify the general solution.
    Solve {
        #[command(flatten)]
        files: FileArgs,
        /// Include the complexity trace of every step.
        #[arg(long)]
        trace: bool,
    },
    /// Relative invariants and the branch label.
    Invariants(FileArgs),
    /// Classical Laplace cascade for one equation in u_xy normal form.
    Classic {
        #[command(flatten)]
        files: FileArgs,
        /// Number of invariants computed on each side.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Types of ω = 1 systems by complexity.
    Zoo {
        #[arg(long, conflicts_with = "upto")]
        kappa: Option<u32>,
        #[arg(long)]
        upto: Option<u32>,
    },
}

#[derive(clap::Args, Debug)]
struct FileArgs {
    /// Input file.
    #[arg(required_unless_present = "all", conflicts_with = "all")]
    file: Option<PathBuf>,
    /// Run on every `.pde` file of a directory.
    #[arg(long, value_name = "DIR")]
    all: Option<PathBuf>,
}

#[derive(Clone, Copy)]
enum Job {
    Analyze,
    Laplace,
    Solve { trace: bool },
    Invariants,
    Classic { depth: Option<usize> },
}

impl Job {
    fn name(self) -> &'static str {
        match self {
            Job::Analyze => "analyze",
            Job::Laplace => "laplace",
            Job::Solve { .. } => "solve",
            Job::Invariants => "invariants",
            Job::Classic { .. } => "classic",
        }
    }

    fn run(self, text: &str) -> Result<Value, Failure> {
        let doc = omega_core::parse::parse(text).map_err(Failure::from)?;
        match self {
            Job::Analyze => report::analyze(&doc),
            Job::Laplace => report::laplace(&doc),
            Job::Solve { trace } => report::solve(&doc, trace),
            Job::Invariants => report::invariants(&doc),
            Job::Classic { depth } => report::classic(&doc, depth),
        }
    }
}

fn run_file(job: Job, path: &Path) -> Value {
    let mut out = json!({ "command": job.name(), "file": path.display().to_string() });
    let result = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(2, "io_error", format!("cannot read {}: {e}", path.display())))
        .and_then(|text| job.run(&text));
    report::finish(&mut out, result);
    out
}

fn run_all(job: Job, dir: &Path) -> Value {
    let mut files: Vec<PathBuf> = match std::fs::read_dir(dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "pde"))
            .collect(),
        Err(e) => {
            let mut out = json!({ "command": job.name(), "all": dir.display().to_string() });
            let f = Failure::new(2, "io_error", format!("cannot read {}: {e}", dir.display()));
            report::finish(&mut out, Err(f));
            return out;
        }
    };
    files.sort();
    let reports: Vec<Value> = files.iter().map(|p| run_file(job, p)).collect();
    let code = reports
        .iter()
        .filter_map(|r| r["exit_code"].as_u64())
        .max()
        .unwrap_or(0);
    json!({
        "command": job.name(),
        "all": dir.display().to_string(),
        "status": if code == 0 { "ok" } else { "error" },
        "exit_code": code,
        "reports": reports,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (job, files) = match cli.command {
        Command::Analyze(f) => (Job::Analyze, f),
        Command::Laplace(f) => (Job::Laplace, f),
        Command::Solve { files, trace } => (Job::Solve { trace }, files),
        Command::Invariants(f) => (Job::Invariants, f),
        Command::Classic { files, depth } => (Job::Classic { depth }, files),
        Command::Zoo { kappa, upto } => {
            let mut out = json!({ "command": "zoo" });
            report::finish(&mut out, Ok(report::zoo(kappa, upto)));
            return emit(&out, cli.json);
        }
    };
    let out = match (files.file, files.all) {
        (_, Some(dir)) => run_all(job, &dir),
        (Some(file), None) => run_file(job, &file),
        (None, None) => unreachable!("clap requires a file or --all"),
    };
    emit(&out, cli.json)
}

fn emit(out: &Value, as_json: bool) -> ExitCode {
    let text = if as_json {
        serde_json::to_string_pretty(out).expect("serializable") + "\n"
    } else {
        render::human(out)
    };
    // A closed pipe downstream is not an error of ours.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    ExitCode::from(out["exit_code"].as_u64().unwrap_or(1) as u8)
}
