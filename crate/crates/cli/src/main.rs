//! `k3wall`: verification, tables, root scans and figures for K3 surfaces
//! of Picard rank one with `H² = 2p`.

mod figure;
mod report;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use k3wall::mukai::{is_prime, Surface};
use k3wall::plane::{enumerate_roots_in_region, grey_region, segment_certificates};
use k3wall::tables::reproduce_tables;

use report::{Outcome, Report};

/// Exit code for malformed invocations, as in `sysexits.h`.
const EXIT_USAGE: u8 = 64;
/// Exit code for an output file that cannot be written.
const EXIT_CANTCREAT: u8 = 73;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] k3wall::Error),
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("resource cap reached: {0}")]
    Capped(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Core(_) => EXIT_USAGE,
            Self::Write { .. } => EXIT_CANTCREAT,
            Self::Capped(_) => Outcome::Capped.code(),
        }
    }
}

#[derive(Parser)]
#[command(name = "k3wall", version, about = "Exact wall-crossing checks for K3 surfaces of Picard rank one")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check for one prime.
    Verify {
        #[arg(long, value_parser = parse_surface)]
        p: Surface,
        /// Largest |s| searched for roots in the grey region.
        #[arg(long, default_value_t = 100_000)]
        smax: i64,
        /// Wall-clock budget in seconds; unfinished checks are reported as capped.
        #[arg(long)]
        budget_sec: Option<f64>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Leave out the runtime section, making the report byte-reproducible.
        #[arg(long)]
        no_timings: bool,
    },
    /// Verify every prime in a range, one line per prime.
    VerifyRange {
        #[arg(long)]
        from: i64,
        #[arg(long)]
        to: i64,
        #[arg(long, default_value_t = 100_000)]
        smax: i64,
    },
    /// Recompute the case tables and diff them against the printed values.
    Tables {
        #[arg(long, value_parser = parse_surface)]
        p: Surface,
    },
    /// Search the grey region for roots and certify its boundary segments.
    Roots {
        #[arg(long, value_parser = parse_surface)]
        p: Surface,
        #[arg(long, default_value_t = 100_000)]
        smax: i64,
    },
    /// Write an SVG figure.
    Figure {
        #[arg(long, value_parser = parse_surface)]
        p: Surface,
        #[arg(long, value_enum)]
        kind: figure::Kind,
        #[arg(long)]
        out: PathBuf,
        /// Largest s of the hole slits drawn.
        #[arg(long, default_value_t = 40)]
        smax: i64,
    },
}

fn parse_surface(s: &str) -> Result<Surface, String> {
    let p: i64 = s.parse().map_err(|e| format!("{s}: {e}"))?;
    Surface::new(p).map_err(|e| e.to_string())
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn summary_line(r: &Report) -> String {
    let failing: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.status.passes())
        .map(|c| format!("{} {:?}", c.name, c.status))
        .collect();
    let verdict = match r.outcome() {
        Outcome::Pass => "pass".to_string(),
        Outcome::Fail => format!("FAIL ({})", failing.join(", ")),
        Outcome::Capped => format!("CAPPED ({})", failing.join(", ")),
    };
    let notes: usize = r.checks.iter().map(|c| c.paper_mismatches.len()).sum();
    let notes = if notes > 0 { format!("; {notes} paper mismatch note(s)") } else { String::new() };
    format!("p = {} m = {}: {verdict}{notes}", r.surface.p, r.surface.m)
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify {
            p,
            smax,
            budget_sec,
            report,
            format,
            no_timings,
        } => {
            let budget = budget_sec.map(|s| Duration::from_secs_f64(s.max(0.0)));
            let r = verify::verify(p, smax, budget, !no_timings);
            let text = match format {
                Format::Json => r.to_json(),
                Format::Md => r.to_markdown(),
            };
            match report {
                Some(path) => {
                    write(&path, &text)?;
                    for c in &r.checks {
                        println!("{}: {:?}", c.name, c.status);
                    }
                    println!("{}", summary_line(&r));
                }
                None => print!("{text}"),
            }
            Ok(r.outcome())
        }
        Command::VerifyRange { from, to, smax } => {
            let primes: Vec<i64> = (from.max(13)..=to).filter(|&p| is_prime(p)).collect();
            let reports: Vec<Report> = primes
                .par_iter()
                .map(|&p| verify::verify(Surface::new(p).expect("prime >= 13"), smax, None, false))
                .collect();
            for r in &reports {
                println!("{}", summary_line(r));
            }
            Ok(reports.iter().map(Report::outcome).max().unwrap_or(Outcome::Pass))
        }
        Command::Tables { p } => {
            for t in reproduce_tables(&p)? {
                println!("{t}");
                for c in t.discrepancies() {
                    println!(
                        "paper mismatch: Table {} {} {}: computed {}, printed {} ({:?})",
                        t.number,
                        c.column,
                        c.row,
                        c.computed.as_deref().unwrap_or("none"),
                        c.printed.as_deref().unwrap_or("none"),
                        c.status
                    );
                }
                println!();
            }
            Ok(Outcome::Pass)
        }
        Command::Roots { p, smax } => {
            let roots = enumerate_roots_in_region(&grey_region(&p), &p, smax);
            let certs = segment_certificates(&p);
            println!("searched roots with 1 <= |s| <= {smax} projecting into the grey region");
            let names: Vec<&str> = certs.iter().map(|c| c.name).collect();
            let proved = certs.iter().all(|c| c.proved);
            let verdict = if proved { "Proved" } else { "NOT proved" };
            if roots.is_empty() {
                println!("no roots found; segments {}: {verdict}", names.join(", "));
            } else {
                for r in &roots {
                    println!("root {r}");
                }
                println!("{} roots found; segments {}: {verdict}", roots.len(), names.join(", "));
            }
            for c in certs.iter().filter(|c| !c.proved) {
                println!("segment {} carries a root projection", c.name);
            }
            Ok(if roots.is_empty() && proved { Outcome::Pass } else { Outcome::Fail })
        }
        Command::Figure { p, kind, out, smax } => {
            write(&out, &figure::render(&p, kind, smax)?)?;
            println!("wrote {}", out.display());
            Ok(Outcome::Pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
