//! `dwt`: batch front end for the double-well Gibbs solver.
//!
//! One command and one JSON config per invocation. Data goes to `--out` (or
//! stdout); run metadata goes to `<out>.meta.json`, so the data file is
//! byte-identical across runs.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde_json::{json, Value};

use commands::Command;
use config::RunConfig;
use error::{Failure, Outcome};
use output::{sidecar_path, write_file, Format};

#[derive(Debug, Parser)]
#[command(name = "dwt", version, about = "Gibbs measures and zero-temperature limits of double-well potentials")]
struct Cli {
    command: Command,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Data file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Defaults to csv for tabular commands, json otherwise.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

fn init_threads() -> Outcome<()> {
    let Ok(v) = std::env::var("DWT_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Validation(format!("DWT_THREADS={v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numeric(format!("worker pool: {e}")))
}

fn execute(cli: &Cli) -> Outcome<u8> {
    init_threads()?;
    let started = Instant::now();
    let cfg = RunConfig::load(&cli.config)?;
    let artifact = commands::run(cli.command, &cfg)?;
    let (format, data) = artifact.render(cli.format)?;
    for note in &artifact.notes {
        eprintln!("{note}");
    }
    match &cli.out {
        Some(out) => {
            write_file(out, &data)?;
            let mut meta = serde_json::Map::new();
            meta.insert("tool".into(), json!("dwt"));
            meta.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            meta.insert("command".into(), to_name(cli.command));
            meta.insert("config".into(), json!(cli.config.display().to_string()));
            meta.insert("format".into(), json!(format!("{format:?}").to_lowercase()));
            meta.insert("threads".into(), json!(rayon::current_num_threads()));
            meta.insert("elapsed_ms".into(), json!(started.elapsed().as_secs_f64() * 1e3));
            meta.insert("exit".into(), json!(artifact.exit));
            meta.extend(artifact.meta.clone());
            let mut text = serde_json::to_string_pretty(&Value::Object(meta)).map_err(|e| Failure::Io(e.to_string()))?;
            text.push('\n');
            write_file(&sidecar_path(out), &text)?;
        }
        None => print!("{data}"),
    }
    Ok(artifact.exit)
}

fn to_name(cmd: Command) -> Value {
    use clap::ValueEnum;
    json!(cmd.to_possible_value().map(|v| v.get_name().to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("dwt: {e}");
            ExitCode::from(e.code())
        }
    }
}
