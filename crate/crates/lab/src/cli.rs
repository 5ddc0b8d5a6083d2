//! Argument handling and exit codes: 0 when every check passes, 1 when a
//! check fails, 2 for usage or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands;
use crate::document::{Document, Settings};
use crate::error::{usage, LabError, Result};
use crate::input::{load_metric, parse_grid, parse_point};
use crate::json;

pub const THREADS_ENV: &str = "RANDERS_LAB_THREADS";

#[derive(Parser, Debug)]
#[command(name = "randers-lab", version, about = "Curvature laboratory for Randers metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Everything pointwise at one (x, y).
    Report(Common),
    /// Route agreement and identity checks on seeded samples.
    Verify(Common),
    /// Class membership tests over an x-grid.
    Classify(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Metric definition file.
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    metric: Option<PathBuf>,
    /// Builtin metric family.
    #[arg(long, value_name = "NAME")]
    builtin: Option<String>,
    /// Parameter binding, repeatable (`n=3`, `a=1,0,0`, `sigma=0.2*x1`).
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Evaluation point, `x=<csv>;y=<csv>`.
    #[arg(long, value_name = "STR")]
    at: Option<String>,
    /// Grid, `x1=lo:hi:steps,...`.
    #[arg(long, value_name = "STR")]
    grid: Option<String>,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Write the JSON document to PATH, or to stdout with `-`.
    #[arg(long, value_name = "PATH|-")]
    json: Option<String>,
    #[arg(long)]
    quiet: bool,
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let k: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|k| *k > 0)
            .ok_or_else(|| usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        b = b.num_threads(k);
    }
    b.build().map_err(|e| usage(format!("thread pool: {e}")))
}

fn execute(command: &Command) -> Result<Document> {
    let (name, c) = match command {
        Command::Report(c) => ("report", c),
        Command::Verify(c) => ("verify", c),
        Command::Classify(c) => ("classify", c),
    };
    if !(c.tol > 0.0) {
        return Err(usage("--tol must be positive"));
    }
    let (metric, source) = load_metric(c.metric.as_ref(), c.builtin.as_deref(), &c.params)?;
    let n = metric.dim();
    let point = c.at.as_deref().map(|a| parse_point(a, n)).transpose()?.unwrap_or_default();
    let settings = Settings {
        samples: c.samples,
        seed: c.seed,
        tol: c.tol,
    };
    let pool = thread_pool()?;
    pool.install(|| match name {
        "report" => commands::report(&metric, source, &point, settings),
        "verify" => {
            if c.samples == 0 {
                return Err(usage("--samples must be positive"));
            }
            commands::verify(&metric, source, settings)
        }
        _ => {
            let grid = match (&c.grid, &point.x) {
                (Some(g), _) => parse_grid(g, n)?,
                (None, Some(x)) => vec![x.clone()],
                (None, None) => vec![vec![0.0; n]],
            };
            commands::classify(&metric, source, &grid, settings)
        }
    })
}

fn emit(doc: &Document, command: &Command) -> Result<()> {
    let c = match command {
        Command::Report(c) | Command::Verify(c) | Command::Classify(c) => c,
    };
    let text = json::to_string(doc);
    let to_stdout = c.json.as_deref() == Some("-");
    match c.json.as_deref() {
        Some("-") => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
        Some(path) => std::fs::write(path, text).map_err(|source| LabError::Io {
            path: path.into(),
            source,
        })?,
        None => {}
    }
    if !c.quiet {
        let human = doc.render();
        if to_stdout {
            eprint!("{human}");
        } else {
            print!("{human}");
        }
    }
    Ok(())
}

/// Runs the tool on `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let result = execute(&cli.command).and_then(|doc| emit(&doc, &cli.command).map(|_| doc));
    match result {
        Ok(doc) if doc.passed => 0,
        Ok(_) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
