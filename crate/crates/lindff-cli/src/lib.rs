//! Command-line front end for `lindff`.
//!
//! [`run`] parses arguments, executes one subcommand and writes JSON-lines
//! [`ExperimentRecord`]s. Table-producing commands can also write CSV. The
//! exit code is 0 on success, 1 for usage and validation errors and 2 for
//! internal failures.

mod args;
mod bench;
mod commands;
pub mod input;
pub mod record;
pub mod seed;

pub use args::Cli;
pub use record::{parse_record, parse_records, ExperimentRecord, HamiltonianInput, RECORD_VERSION};

use clap::Parser;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Names the default output directory when `--out` / `--csv` are absent.
pub const OUT_DIR_ENV: &str = "LINDFF_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Internal(_) => 2,
        }
    }
}

impl From<lindff::Error> for CliError {
    fn from(e: lindff::Error) -> Self {
        if e.is_validation() {
            CliError::Validation(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}

/// What a command produced, before it is written anywhere.
#[derive(Default)]
pub(crate) struct Emitted {
    pub records: Vec<ExperimentRecord>,
    /// CSV table, when the command has one.
    pub table: Option<String>,
}

/// Shared context handed to every command.
pub(crate) struct Ctx {
    pub argv: Vec<String>,
    pub seed: u64,
}

impl Ctx {
    pub fn record(
        &self,
        kind: &str,
        hamiltonian: Option<&HamiltonianInput>,
        outputs: serde_json::Value,
        cost: Option<lindff::CostReport>,
    ) -> ExperimentRecord {
        ExperimentRecord {
            version: RECORD_VERSION.into(),
            kind: kind.into(),
            command: self.argv.clone(),
            seed: self.seed,
            hamiltonian: hamiltonian.cloned(),
            outputs,
            cost,
            wall_time: None,
        }
    }
}

/// Entry point used by the binary: reads the output directory from the
/// environment.
pub fn run<I, S>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let dir = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    run_with(argv, dir.as_deref(), stdout, stderr)
}

/// [`run`] with the default output directory passed explicitly.
pub fn run_with<I, S>(argv: I, out_dir: Option<&Path>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                1
            } else {
                let _ = stdout.write_all(text.as_bytes());
                0
            };
        }
    };
    match execute(cli, &argv, out_dir, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "lindff: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli, argv: &[String], out_dir: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let ctx = Ctx { argv: argv.iter().skip(1).cloned().collect(), seed: cli.seed };
    let name = cli.command.file_stem();
    let start = Instant::now();
    let mut emitted = commands::dispatch(&cli.command, &ctx)?;
    if cli.timing {
        let secs = start.elapsed().as_secs_f64();
        for r in &mut emitted.records {
            r.wall_time = Some(secs);
        }
    }

    let mut body = String::new();
    for r in &emitted.records {
        body.push_str(&r.to_line());
        body.push('\n');
    }
    let out_path = cli.out.clone().or_else(|| out_dir.map(|d| d.join(format!("{name}.jsonl"))));
    match out_path {
        Some(p) => write_file(&p, &body)?,
        None => stdout.write_all(body.as_bytes()).map_err(|e| CliError::Internal(format!("stdout: {e}")))?,
    }
    if let Some(table) = &emitted.table {
        let csv_path = cli.csv.clone().or_else(|| out_dir.map(|d| d.join(format!("{name}.csv"))));
        if let Some(p) = csv_path {
            write_file(&p, table)?;
        }
    }
    Ok(())
}

fn write_file(path: &Path, body: &str) -> Result<(), CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| CliError::Internal(format!("{}: {e}", parent.display())))?;
    }
    std::fs::write(path, body).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str], dir: Option<&Path>) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("lindff").chain(args.iter().copied());
        let code = run_with(argv, dir, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn help_and_version_exit_zero() {
        let (code, out, _) = run_capture(&["--help"], None);
        assert_eq!(code, 0);
        assert!(out.contains("evolve") && out.contains("bench"));
        assert_eq!(run_capture(&["--version"], None).0, 0);
    }

    #[test]
    fn unknown_subcommand_and_flag_exit_one() {
        let (code, _, err) = run_capture(&["frobnicate"], None);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"));
        assert_eq!(run_capture(&["bounds", "--bogus"], None).0, 1);
    }

    #[test]
    fn validation_error_exits_one() {
        let (code, _, err) = run_capture(&["evolve", "--method", "exact", "--ham", "/nonexistent", "--t", "1"], None);
        assert_eq!(code, 1);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn numerical_guard_maps_to_internal() {
        let e: CliError = lindff::Error::NumericalGuard("x".into()).into();
        assert_eq!(e.exit_code(), 2);
        let v: CliError = lindff::Error::UndefinedGap.into();
        assert_eq!(v.exit_code(), 1);
    }

    #[test]
    fn out_dir_receives_records_and_tables() {
        let dir = tempfile::tempdir().unwrap();
        let (code, out, _) =
            run_capture(&["bench", "ff-vs-dilated", "--t", "1,2", "--eps", "0.1"], Some(dir.path()));
        assert_eq!(code, 0);
        assert!(out.is_empty());
        let records = std::fs::read_to_string(dir.path().join("bench-ff-vs-dilated.jsonl")).unwrap();
        assert_eq!(parse_records(&records).unwrap().len(), 3);
        let table = std::fs::read_to_string(dir.path().join("bench-ff-vs-dilated.csv")).unwrap();
        assert!(table.starts_with("t,"));
    }

    #[test]
    fn explicit_out_wins_over_directory() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("sub/x.jsonl");
        let (code, _, _) = run_capture(
            &["--out", target.to_str().unwrap(), "stateprep", "schedule", "--n", "16", "--mu", "8", "--sigma", "2"],
            Some(dir.path()),
        );
        assert_eq!(code, 0);
        assert!(target.exists());
        assert!(!dir.path().join("stateprep-schedule.jsonl").exists());
    }

    #[test]
    fn timing_is_opt_in() {
        let args = ["bench", "ff-vs-dilated", "--t", "1,2", "--eps", "0.1"];
        let (_, plain, _) = run_capture(&args, None);
        assert!(parse_records(&plain).unwrap().iter().all(|r| r.wall_time.is_none()));
        let mut timed = vec!["--timing"];
        timed.extend(args);
        let (_, out, _) = run_capture(&timed, None);
        assert!(parse_records(&out).unwrap().iter().all(|r| r.wall_time.is_some()));
    }
}
