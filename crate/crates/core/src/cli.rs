//! The `conic-center` command line: argument definitions and subcommand
//! bodies. Each command writes to the given streams and returns its exit
//! code, so the binary stays a thin shell.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::concentric::{concentric_center_ratio, concentricity_check, FITTED_TOL};
use crate::conic::{conic_to_ellipse, ConicMatrix};
use crate::error::Error;
use crate::eyesim::write_records_csv;
use crate::fitting::{fit_ellipse, BoundarySample};
use crate::io::{read_conic, read_points_csv, CenterRatioJson, EllipseJson, InputError, SweepConfig};

pub const EXIT_OK: i32 = 0;
/// The input was well formed but the geometry does not admit an answer.
pub const EXIT_DOMAIN: i32 = 2;
/// Unreadable, malformed or invalid input.
pub const EXIT_INPUT: i32 = 3;

/// Caps the number of sweep worker threads.
pub const THREADS_ENV: &str = "CONIC_CENTER_THREADS";

#[derive(Debug, Parser)]
#[command(name = "conic-center", version, about = "Pupil center and radii ratio from two concentric-circle images")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Recover the projected common center and R/r from two ellipses.
    Estimate {
        /// Ellipse or conic JSON of the inner (pupil) boundary.
        #[arg(long)]
        inner: PathBuf,
        /// Ellipse or conic JSON of the outer (iris) boundary.
        #[arg(long)]
        outer: PathBuf,
        /// Largest accepted concentricity.
        #[arg(long, default_value_t = FITTED_TOL)]
        tol: f64,
        /// Keep the argument order even if the inner ellipse is the larger one.
        #[arg(long)]
        no_auto_order: bool,
    },
    /// Fit an ellipse to boundary points (CSV with header `x,y`).
    Fit {
        #[arg(long)]
        points: PathBuf,
    },
    /// Run a synthetic sweep and write the per-cell errors as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match &cli.command {
        Command::Estimate {
            inner,
            outer,
            tol,
            no_auto_order,
        } => cmd_estimate(inner, outer, *tol, !no_auto_order, out, err),
        Command::Fit { points } => cmd_fit(points, out, err),
        Command::Sweep { config, out: path, seed } => cmd_sweep(config, path, *seed, err),
    }
}

fn input_error(err: &mut dyn Write, e: impl std::fmt::Display) -> i32 {
    let _ = writeln!(err, "error: {e}");
    EXIT_INPUT
}

fn print_json<T: serde::Serialize>(out: &mut dyn Write, value: &T) -> std::io::Result<()> {
    serde_json::to_writer(&mut *out, value)?;
    writeln!(out)
}

/// Orders the pair so the smaller-area ellipse comes first. Returns whether
/// the inputs were swapped; pairs that are not both ellipses are left alone.
fn order_by_area(a: ConicMatrix, b: ConicMatrix) -> (ConicMatrix, ConicMatrix, bool) {
    match (conic_to_ellipse(&a), conic_to_ellipse(&b)) {
        (Ok(ea), Ok(eb)) if ea.area() > eb.area() => (b, a, true),
        _ => (a, b, false),
    }
}

pub fn cmd_estimate(
    inner: &Path,
    outer: &Path,
    tol: f64,
    auto_order: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    if !(tol > 0.0 && tol.is_finite()) {
        return input_error(err, format!("tolerance must be positive, got {tol}"));
    }
    let (q1, q2) = match (read_conic(inner), read_conic(outer)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return input_error(err, e),
    };
    let (q1, q2) = if auto_order {
        let (q1, q2, swapped) = order_by_area(q1, q2);
        if swapped {
            let _ = writeln!(err, "note: --outer is the smaller ellipse; using it as the inner one");
        }
        (q1, q2)
    } else {
        (q1, q2)
    };

    match concentric_center_ratio(&q1, &q2, tol) {
        Ok(cr) => match print_json(out, &CenterRatioJson::from(&cr)) {
            Ok(()) => EXIT_OK,
            Err(e) => input_error(err, e),
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if !matches!(e, Error::NotConcentric { .. }) {
                let _ = writeln!(err, "concentricity: {:e}", concentricity_check(&q1, &q2));
            }
            EXIT_DOMAIN
        }
    }
}

pub fn cmd_fit(points: &Path, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let sample = match read_points_csv(points).and_then(|p| BoundarySample::new(p).map_err(|e| InputError(e.to_string()))) {
        Ok(s) => s,
        Err(e) => return input_error(err, e),
    };
    match fit_ellipse(&sample) {
        Ok(e) => match print_json(out, &EllipseJson::from(&e)) {
            Ok(()) => EXIT_OK,
            Err(e) => input_error(err, e),
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_DOMAIN
        }
    }
}

/// Worker count from [`THREADS_ENV`]; `None` when unset.
fn thread_cap() -> Result<Option<usize>, InputError> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(InputError(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
    }
}

pub fn cmd_sweep(config: &Path, out_path: &Path, seed: Option<u64>, err: &mut dyn Write) -> i32 {
    let mut cfg = match SweepConfig::read(config) {
        Ok(c) => c,
        Err(e) => return input_error(err, e),
    };
    if let Some(seed) = seed {
        cfg.options.seed = seed;
    }
    let pool = match thread_cap() {
        Ok(cap) => {
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = cap {
                builder = builder.num_threads(n);
            }
            builder.build()
        }
        Err(e) => return input_error(err, e),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => return input_error(err, e),
    };
    let records = match pool.install(|| cfg.run()) {
        Ok(r) => r,
        Err(e) => return input_error(err, e),
    };

    let write = std::fs::File::create(out_path)
        .and_then(|f| write_records_csv(&records, std::io::BufWriter::new(f)));
    if let Err(e) = write {
        return input_error(err, format!("{}: {e}", out_path.display()));
    }
    let failed = records.iter().filter(|r| r.err_euclidean.is_none()).count();
    if failed > 0 {
        let _ = writeln!(err, "note: {failed} of {} cells produced no valid scene", records.len());
    }
    EXIT_OK
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_subcommands() {
        let cli = Cli::try_parse_from(["conic-center", "estimate", "--inner", "a.json", "--outer", "b.json"]).unwrap();
        match cli.command {
            Command::Estimate { tol, no_auto_order, .. } => {
                assert_eq!(tol, FITTED_TOL);
                assert!(!no_auto_order);
            }
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["conic-center", "fit"]).is_err());
        assert!(Cli::try_parse_from(["conic-center", "sweep", "--config", "c.json", "--out", "o.csv", "--seed", "9"]).is_ok());
    }
}
