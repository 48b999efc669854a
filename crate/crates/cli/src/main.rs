mod job;
mod report;
mod run;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use serde_json::Value;

use crate::report::Render;
use crate::run::{Failure, Outcome, Settings};

/// Exact verification of character-sum identities.
///
/// Exit status: 0 all cases pass, 1 some case failed, 2 schema violation,
/// 3 size bound exceeded, 4 internal invariant breach.
#[derive(Parser, Debug)]
#[command(name = "charsum", version)]
struct Args {
    /// Job document (JSON object or array of objects); "-" reads stdin.
    #[arg(long, value_name = "FILE", conflicts_with = "suite", required_unless_present = "suite")]
    job: Option<PathBuf>,
    /// Run a named suite: acceptance or full.
    #[arg(long, value_name = "NAME")]
    suite: Option<String>,
    /// Extension depth for sweeps; overrides the job's own setting.
    #[arg(long, value_name = "N")]
    depth: Option<u32>,
    /// Largest grid (points) for naive Fourier transforms.
    #[arg(long, value_name = "N", default_value_t = 8192)]
    max_grid: u64,
    /// Seed for sampled checks; overrides the job's own setting.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Add advisory floating-point approximations next to exact values.
    #[arg(long)]
    emit_floats: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let settings = Settings {
        depth: args.depth,
        seed: args.seed,
        max_grid: args.max_grid,
        cache_dir: std::env::var_os("CHARSUM_CACHE_DIR").map(PathBuf::from),
        render: Render { floats: args.emit_floats },
    };
    match execute(&args, &settings) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("charsum: {f}");
            ExitCode::from(f.exit_code() as u8)
        }
    }
}

fn execute(args: &Args, settings: &Settings) -> Result<bool, Failure> {
    let docs = match (&args.job, &args.suite) {
        (_, Some(name)) => vec![serde_json::json!({ "kind": "suite", "name": name })],
        (Some(path), None) => match load(path)? {
            Value::Array(items) => items,
            doc => vec![doc],
        },
        (None, None) => unreachable!("clap requires --job or --suite"),
    };
    // validate everything before running anything
    let jobs = docs.iter().map(run::parse).collect::<Result<Vec<_>, _>>()?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut all = true;
    for (job, doc) in jobs.iter().zip(docs) {
        let outcome = run::run(job, doc, settings, &mut out)?;
        all &= outcome.pass();
        if let Outcome::Report(report) = outcome {
            let text = serde_json::to_string_pretty(&report).expect("reports serialize");
            writeln!(out, "{text}").map_err(|e| Failure::Schema(format!("writing report: {e}")))?;
        }
    }
    Ok(all)
}

fn load(path: &PathBuf) -> Result<Value, Failure> {
    let mut text = String::new();
    let read = if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    read.map_err(|e| Failure::Schema(format!("reading {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Schema(format!("{}: {e}", path.display())))
}
