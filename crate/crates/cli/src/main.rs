//! `grushin`: command-line front-end for conformal maps on the Grushin plane.
//!
//! Exit codes: 0 on success, 1 when a check runs and fails, 2 on usage or
//! input errors.

mod commands;
mod docs;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {message}")]
    Document { path: String, message: String },
    #[error("{0}")]
    Library(#[from] grushin::Error),
    #[error("usage: {0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: std::io::Error },
}

#[derive(Debug, Parser)]
#[command(name = "grushin", version, about = "Conformal maps on the Grushin plane")]
pub struct Cli {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Write the report here instead of stdout. Relative paths are resolved
    /// against the output directory when one is set.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Directory for relative `--out` paths.
    #[arg(long, global = true, env = "GRUSHIN_OUT_DIR")]
    pub out_dir: Option<PathBuf>,
    /// Report format; `grid` always writes CSV.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a map at points.
    Eval {
        #[arg(long)]
        map: PathBuf,
        /// A point `x,y`; repeatable.
        #[arg(long = "point", required = true, allow_hyphen_values = true, value_parser = parse_point)]
        points: Vec<[f64; 2]>,
    },
    /// Check a map for conformality on a domain; exit 1 if it fails.
    Verify {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        /// Probe cells per rectangle side.
        #[arg(long, default_value_t = 64)]
        resolution: usize,
    },
    /// Carnot–Carathéodory length of a curve.
    Length {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        curve: PathBuf,
    },
    /// Admissibility diagnostics; exit 1 if the curve is not admissible.
    Admissible {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long)]
        curve: PathBuf,
        /// Refinement levels towards each axis crossing.
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Image of a curve under a map, as a polyline curve document.
    PushCurve {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Compare l(g∘γ) with the integral of |∇_H g₁| along γ.
    Distort {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        curve: PathBuf,
        #[arg(long, default_value_t = 256)]
        samples: usize,
    },
    /// Upper and lower bounds on the distance between two points.
    Distance {
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        from: [f64; 2],
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        to: [f64; 2],
        #[arg(long, default_value_t = 33)]
        knots: usize,
        #[arg(long, default_value_t = 2000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Recover (a, b) of an entire map; exit 1 if the map is not of that form.
    ClassifyEntire {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Axis components, side components and side degrees of a domain.
    AxisComponents {
        #[arg(long)]
        domain: PathBuf,
    },
    /// Combinatorial obstruction to conformal equivalence; exit 1 if found.
    Obstruct {
        #[arg(long)]
        first: PathBuf,
        #[arg(long)]
        second: PathBuf,
        /// Do not allow the two half-planes to be exchanged.
        #[arg(long)]
        no_side_swap: bool,
    },
    /// CSV of g, |W̄g| and det D_α g at cell centres inside a domain.
    Grid {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        domain: PathBuf,
        /// Cells per side of the domain's bounding box.
        #[arg(long)]
        resolution: usize,
    },
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y, got {s:?}"))?;
    let coord = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}"));
    Ok([coord(x)?, coord(y)?])
}

/// Rendered report and whether the check it encodes passed.
pub struct Report {
    pub body: String,
    pub passed: bool,
}

impl OutputArgs {
    fn target(&self) -> Option<PathBuf> {
        let out = self.out.as_ref()?;
        Some(match &self.out_dir {
            Some(dir) if out.is_relative() => dir.join(out),
            _ => out.clone(),
        })
    }

    fn emit(&self, body: &str) -> Result<(), CliError> {
        match self.target() {
            Some(path) => {
                fs::write(&path, body).map_err(|source| CliError::Output { path: path.display().to_string(), source })
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(body.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Output { path: "stdout".into(), source })
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.command, cli.output.format).and_then(|r| cli.output.emit(&r.body).map(|_| r.passed)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
