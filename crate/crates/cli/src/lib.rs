//! The `metric-center` command line: spec files in, CSV tables and text summaries out.

pub mod commands;
pub mod emit;
pub mod spec;
pub mod verify;
pub mod workspace;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use crate::emit::{Outcome, Summary, Table};
use crate::spec::{emit_spec, TaskCommand};
use crate::verify::{run_suite, Suite};
use crate::workspace::{Resolved, Workspace};

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid specs, engine refusals, IO failures.
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "metric-center", version, about = "Centers, radii and related descriptors of subsets of metric spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Descriptors of each subset.
    Analyze(TargetArgs),
    /// Center of the product of the given subsets, checked against a sampled product when --h is set.
    Product(TargetArgs),
    /// Descriptors of the union of the given separated subsets.
    Union(TargetArgs),
    /// Largest inscribed balls of grid subsets, with their certificate.
    Inscribe(TargetArgs),
    /// Sublevel sets of the distance to the boundary and their Betti numbers.
    Filtrate(TargetArgs),
    /// Randomized property suites.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Text,
}

#[derive(Debug, Args)]
pub struct TargetArgs {
    /// Spec file (JSON).
    #[arg(long)]
    pub spec: PathBuf,
    /// Subsets to use; repeat the flag or separate names with commas.
    #[arg(long = "subset", value_delimiter = ',')]
    pub subsets: Vec<String>,
    /// Resolution of sampled spaces; for `product`, the step of the sampled check.
    #[arg(long)]
    pub h: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    /// Write the report here instead of stdout. With `--format csv` the text summary still goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: Suite,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[arg(long)]
    pub seed: u64,
    /// Sampling step of the suites that sample.
    #[arg(long)]
    pub h: Option<f64>,
    /// Where reproduction specs of failing cases go.
    #[arg(long, default_value = "verify-failures")]
    pub repro_dir: PathBuf,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(rendered.as_bytes()) } else { stdout.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Analyze(a) => targets(TaskCommand::Analyze, a, stdout, stderr),
        Command::Product(a) => targets(TaskCommand::Product, a, stdout, stderr),
        Command::Union(a) => targets(TaskCommand::Union, a, stdout, stderr),
        Command::Inscribe(a) => targets(TaskCommand::Inscribe, a, stdout, stderr),
        Command::Filtrate(a) => targets(TaskCommand::Filtrate, a, stdout, stderr),
        Command::Verify(a) => verify(a, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn groups_together(command: TaskCommand) -> bool {
    matches!(command, TaskCommand::Product | TaskCommand::Union)
}

/// Subset names run together, and their `h`.
type Group = (Vec<String>, Option<f64>);

/// The subset groups to run.
fn plan(command: TaskCommand, args: &TargetArgs, ws: &Workspace) -> Result<Vec<Group>, CliError> {
    let split = |names: &[String], h: Option<f64>| -> Vec<Group> {
        if groups_together(command) {
            vec![(names.to_vec(), h)]
        } else {
            names.iter().map(|n| (vec![n.clone()], h)).collect()
        }
    };
    if !args.subsets.is_empty() {
        return Ok(split(&args.subsets, args.h));
    }
    let tasks: Vec<_> = ws.doc.tasks.iter().filter(|t| t.command == command).collect();
    if !tasks.is_empty() {
        return Ok(tasks.iter().flat_map(|t| split(&t.subsets, args.h.or(t.h))).collect());
    }
    let names: Vec<String> = ws.doc.subsets.names().map(str::to_string).collect();
    if !groups_together(command) && names.len() == 1 {
        return Ok(split(&names, args.h));
    }
    Err(CliError::Usage(format!(
        "{}: name the subsets with --subset; the spec has no {} task{}",
        args.spec.display(),
        command.as_str(),
        if groups_together(command) { "" } else { " and more than one subset" }
    )))
}

fn run_group(command: TaskCommand, ws: &mut Workspace, names: &[String], h: Option<f64>) -> Result<Outcome, CliError> {
    let need = if groups_together(command) { 2 } else { 1 };
    if names.len() < need {
        return Err(CliError::Usage(format!("{} needs at least {need} subsets", command.as_str())));
    }
    // For `product`, h is the step of the sampled check, not a resolution override.
    let resolution = if command == TaskCommand::Product { None } else { h };
    let targets: Vec<Resolved> = names.iter().map(|n| ws.subset(n, resolution)).collect::<Result<_, _>>()?;
    match command {
        TaskCommand::Analyze => commands::analyze(&targets[0]),
        TaskCommand::Inscribe => commands::inscribe(&targets[0]),
        TaskCommand::Filtrate => commands::filtrate(&targets[0]),
        TaskCommand::Product => commands::product(&targets, h),
        TaskCommand::Union => commands::union(&targets),
    }
}

fn targets(command: TaskCommand, args: &TargetArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let mut ws = Workspace::load(&args.spec)?;
    let plan = plan(command, args, &ws)?;
    let outcomes: Vec<Outcome> =
        plan.iter().map(|(names, h)| run_group(command, &mut ws, names, *h)).collect::<Result<_, _>>()?;
    let several = outcomes.len() > 1;
    let join = |part: &dyn Fn(&Outcome) -> &str| -> String {
        outcomes
            .iter()
            .map(|o| if several { format!("# target: {}\n{}", o.target, part(o)) } else { part(o).to_string() })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let (csv, text) = (join(&|o| &o.csv), join(&|o| &o.text));
    deliver(args.format, args.out.as_deref(), &csv, &text, stdout)?;
    let violations: Vec<&String> = outcomes.iter().flat_map(|o| &o.violations).collect();
    for v in &violations {
        let _ = writeln!(stderr, "violation: {v}");
    }
    Ok(if violations.is_empty() { 0 } else { 1 })
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))
}

fn deliver(format: Format, out: Option<&Path>, csv: &str, text: &str, stdout: &mut dyn Write) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Usage(format!("cannot write output: {e}"));
    match (format, out) {
        (Format::Csv, Some(path)) => {
            write_file(path, csv)?;
            stdout.write_all(text.as_bytes()).map_err(io)
        }
        (Format::Csv, None) => stdout.write_all(csv.as_bytes()).map_err(io),
        (Format::Text, Some(path)) => write_file(path, text),
        (Format::Text, None) => stdout.write_all(text.as_bytes()).map_err(io),
    }
}

fn verify(args: &VerifyArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    if args.h.is_some_and(|h| !(h.is_finite() && h > 0.0)) {
        return Err(CliError::Usage("--h must be positive".into()));
    }
    let suites: Vec<Suite> = if args.suite == Suite::All { Suite::EACH.to_vec() } else { vec![args.suite] };
    let mut table = Table::new(&["suite", "case", "status", "detail"]);
    let mut summary = Summary::default();
    summary.add("seed", args.seed).add("cases", args.cases);
    let mut lines = String::new();
    let mut failed = 0;
    for suite in suites {
        let report = run_suite(suite, args.cases, args.seed, args.h);
        let f = report.failures();
        failed += f;
        for r in &report.results {
            table.row(&[suite.name(), &r.case.to_string(), if r.passed { "pass" } else { "fail" }, &r.detail]);
            if let Some(doc) = &r.repro {
                fs::create_dir_all(&args.repro_dir)
                    .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", args.repro_dir.display())))?;
                let path = args.repro_dir.join(format!("{}-seed{}-case{}.json", suite.name(), args.seed, r.case));
                write_file(&path, &emit_spec(doc))?;
                let _ = writeln!(stderr, "{} case {} failed: {}; reproduction in {}", suite.name(), r.case, r.detail, path.display());
            }
        }
        let line = format!(
            "{} cases, {} passed, {} failed (seed {})",
            report.results.len(),
            report.results.len() - f,
            f,
            args.seed
        );
        if let Some(h) = report.h {
            summary.add(&format!("{} h", suite.name()), h);
        }
        summary.add(&format!("suite {}", suite.name()), &line);
        lines.push_str(&format!("suite {}: {line}\n", suite.name()));
    }
    let csv = table.finish(&summary);
    deliver(args.format, args.out.as_deref(), &csv, &lines, stdout)?;
    Ok(if failed == 0 { 0 } else { 1 })
}
