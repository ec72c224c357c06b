//! Command-line front end for the `gkp-qpc` simulator.
//!
//! Every command writes its tables (CSV/JSON), optional SVG plots and a
//! `<command>.manifest.json` recording the arguments, resolved parameters and the
//! sha256 of each output. `rerun --manifest` replays a manifest.

pub mod args;
pub mod cli;
pub mod commands;
pub mod error;
pub mod output;
pub mod plot;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;

pub use cli::{Cli, Command};
pub use error::CliError;
use output::{Manifest, ManifestDraft};

/// Parses `argv` (program name first) and runs the command.
/// Returns the manifest path for commands that write files.
pub fn run<I, T>(argv: I) -> Result<Option<PathBuf>, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(None);
        }
        Err(e) => {
            let text = e.render().to_string();
            return Err(CliError::Args(text.trim_start_matches("error: ").trim_end().to_string()));
        }
    };
    let recorded: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cli.workers {
        pool = pool.num_threads(w as usize);
    }
    let pool = pool.build().map_err(|e| CliError::Other(e.to_string()))?;
    pool.install(|| execute(cli.command, recorded))
}

fn execute(command: Command, argv: Vec<String>) -> Result<Option<PathBuf>, CliError> {
    let start = Instant::now();
    let (name, produced) = match &command {
        Command::HrmCurves(a) => ("hrm-curves", commands::hrm_curves(a)?),
        Command::Sweep(a) => ("sweep", commands::sweep_cmd(a)?),
        Command::Threshold(a) => ("threshold", commands::threshold_cmd(a)?),
        Command::OptimizeDelta(a) => ("optimize-delta", commands::optimize_delta_cmd(a)?),
        Command::Oracle(a) => ("oracle", commands::oracle_cmd(a)?),
        Command::HashingBound => {
            commands::hashing_bound();
            return Ok(None);
        }
        Command::Rerun(a) => return rerun(&a.manifest, a.out.as_ref(), a.check),
    };
    let manifest = produced.out.finish(ManifestDraft {
        command: name.to_string(),
        argv,
        params: produced.params,
        seed: produced.seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })?;
    Ok(Some(manifest))
}

/// Replaces (or appends) the `--out` value of a recorded argument list.
fn with_out(argv: &[String], out: &std::path::Path) -> Vec<String> {
    let mut result = Vec::with_capacity(argv.len() + 2);
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            result.push(a.clone());
        }
    }
    result.push("--out".into());
    result.push(out.to_string_lossy().into_owned());
    result
}

fn rerun(path: &std::path::Path, out: Option<&PathBuf>, check: bool) -> Result<Option<PathBuf>, CliError> {
    let old = Manifest::load(path)?;
    if old.command == "rerun" {
        return Err(CliError::Args("a rerun manifest cannot be replayed".into()));
    }
    let argv = match out {
        Some(dir) => with_out(&old.argv, dir),
        None => old.argv.clone(),
    };
    let program = std::iter::once(env!("CARGO_PKG_NAME").to_string());
    let new_path = run(program.chain(argv))?;
    if check {
        let new = Manifest::load(new_path.as_deref().ok_or_else(|| CliError::Other("no manifest written".into()))?)?;
        if new.outputs != old.outputs {
            let differing: Vec<&str> =
                old.outputs.iter().filter(|(k, v)| new.outputs.get(*k) != Some(v)).map(|(k, _)| k.as_str()).collect();
            return Err(CliError::Other(format!("outputs differ from the manifest: {}", differing.join(", "))));
        }
        println!("rerun: all {} outputs match", new.outputs.len());
    }
    Ok(new_path)
}

/// Runs the CLI and converts the result into a process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(argv) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
