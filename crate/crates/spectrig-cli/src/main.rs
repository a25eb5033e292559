//! `spectrig` — command-line front end for the rigidity toolkit.
//!
//! Exit codes: 0 on success, 1 on invalid input (bad flags, malformed
//! files, out-of-range pairs), 2 when the library detects an internal
//! inconsistency (mutually exclusive certificates both holding, failed
//! re-verification — things that should be impossible and merit a bug
//! report rather than a fixed input).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use spectrig::certify::{analyze, Property};
use spectrig::oracle::search_equivalent;
use spectrig::report;
use spectrig::spectra::build_spectrahedron;
use spectrig::stress::find_psd_stress;
use spectrig::{Error, Framework, Result, ToleranceConfig};

#[derive(Parser)]
#[command(
    name = "spectrig",
    version,
    about = "Certificates for universal rigidity, linked pairs, and spectrahedron geometry of bar frameworks",
    after_help = "Framework files are JSON: {\"dimension\": r, \"vertices\": [[x, y, ...], ...], \
                  \"edges\": [[i, j], ...]} with 1-based vertex indices. All randomness is \
                  seeded; identical inputs and flags give byte-identical output."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every analysis subcommand.
#[derive(Args)]
struct Common {
    /// Framework file (JSON).
    file: PathBuf,
    /// Override for the rank and PSD tolerances (falls back to the
    /// RIGIDITY_TOL environment variable, then to the built-in defaults).
    #[arg(long)]
    tol: Option<f64>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and print the full certificate report.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Seed for the stress search and all other randomness.
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Add wall-clock stage timings to the report. Off by default so
        /// that reports are byte-identical across runs.
        #[arg(long)]
        timings: bool,
    },
    /// Search for a positive semidefinite stress matrix and print it.
    Stress {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Certificate for a single missing pair, e.g. --pair 1,5.
    Linked {
        #[command(flatten)]
        common: Common,
        /// The pair to test, as two 1-based vertex indices "k,l".
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// CSV grid of lambda_min and membership over a 2-D slice of the
    /// spectrahedron (all other y components held at 0).
    Slice {
        #[command(flatten)]
        common: Common,
        /// The two missing pairs spanning the slice, "a,b:c,d" (1-based).
        #[arg(long, value_parser = parse_pairs)]
        pairs: ((usize, usize), (usize, usize)),
        /// Coordinate range for both axes, "lo:hi".
        #[arg(long, value_parser = parse_range, default_value = "-5:5", allow_hyphen_values = true)]
        range: (f64, f64),
        /// Samples per axis; the CSV gets steps^2 data rows.
        #[arg(long, default_value_t = 101)]
        steps: usize,
    },
    /// Randomized search for equivalent frameworks; empirical distance
    /// intervals for every missing pair. Evidence, not proof.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// Embedding dimension searched (defaults to the framework's own).
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 200)]
        restarts: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Validate a framework file against the schema and report its shape.
    CheckFile {
        /// Framework file (JSON).
        file: PathBuf,
    },
}

// ─── flag parsing ──────────────────────────────────────────────────────────

fn parse_pair(text: &str) -> std::result::Result<(usize, usize), String> {
    let parts: Vec<&str> = text.split(',').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected \"k,l\", got {text:?}"));
    };
    let k: usize = a.trim().parse().map_err(|_| format!("not an index: {a:?}"))?;
    let l: usize = b.trim().parse().map_err(|_| format!("not an index: {b:?}"))?;
    if k == 0 || l == 0 {
        return Err("vertex indices are 1-based".into());
    }
    Ok((k, l))
}

type PairOfPairs = ((usize, usize), (usize, usize));

fn parse_pairs(text: &str) -> std::result::Result<PairOfPairs, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected \"a,b:c,d\", got {text:?}"));
    };
    Ok((parse_pair(a)?, parse_pair(b)?))
}

fn parse_range(text: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [a, b] = parts.as_slice() else {
        return Err(format!("expected \"lo:hi\", got {text:?}"));
    };
    let lo: f64 = a.trim().parse().map_err(|_| format!("not a number: {a:?}"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("not a number: {b:?}"))?;
    Ok((lo, hi))
}

// ─── plumbing ──────────────────────────────────────────────────────────────

fn tolerance(flag: Option<f64>) -> Result<ToleranceConfig> {
    let tol = match flag {
        Some(t) => Some(t),
        None => match std::env::var("RIGIDITY_TOL") {
            Ok(text) => Some(text.parse().map_err(|_| {
                Error::invalid(format!("RIGIDITY_TOL must be a number, got {text:?}"))
            })?),
            Err(_) => None,
        },
    };
    let mut cfg = ToleranceConfig::default();
    if let Some(t) = tol {
        if !t.is_finite() || t <= 0.0 || t >= 1.0 {
            return Err(Error::invalid(format!(
                "tolerance must be in (0, 1), got {t}"
            )));
        }
        cfg.rank_tol = t;
        cfg.psd_tol = t;
    }
    Ok(cfg)
}

fn load(path: &PathBuf) -> Result<Framework> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    report::parse_framework(&text)
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 1-based user pair → 0-based internal pair, validated against `n`.
fn internal_pair(pair: (usize, usize), n: usize) -> Result<(usize, usize)> {
    if pair.0 > n || pair.1 > n {
        return Err(Error::invalid(format!(
            "pair ({}, {}) out of range for {n} vertices",
            pair.0, pair.1
        )));
    }
    if pair.0 == pair.1 {
        return Err(Error::invalid(format!(
            "pair ({}, {}) is not a pair of distinct vertices",
            pair.0, pair.1
        )));
    }
    Ok((pair.0 - 1, pair.1 - 1))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze { common, seed, timings } => {
            let fw = load(&common.file)?;
            let cfg = tolerance(common.tol)?;
            let analysis = analyze(&fw, &cfg, seed)?;
            let text = report::build_report(&fw, &analysis, timings).to_json();
            emit(common.out.as_ref(), &text)
        }
        Command::Stress { common, seed } => {
            let fw = load(&common.file)?;
            let cfg = tolerance(common.tol)?;
            let outcome = find_psd_stress(&fw, &cfg, seed)?;
            emit(common.out.as_ref(), &report::stress_search_to_json(&outcome))
        }
        Command::Linked { common, pair, seed } => {
            let fw = load(&common.file)?;
            let cfg = tolerance(common.tol)?;
            let key = internal_pair(pair, fw.n())?;
            let key = (key.0.min(key.1), key.0.max(key.1));
            if !fw.graph().missing_edges().contains(&key) {
                return Err(Error::invalid(format!(
                    "pair ({}, {}) is not a missing edge",
                    pair.0, pair.1
                )));
            }
            // The full analysis handles the no-stress and retry paths, so a
            // single pair is just a projection of it.
            let analysis = analyze(&fw, &cfg, seed)?;
            let cert = analysis
                .linked
                .iter()
                .find(|c| matches!(c.property, Property::UniversallyLinked { pair } if pair == key))
                .ok_or_else(|| {
                    Error::InternalInconsistency("analysis lost a missing pair".into())
                })?;
            emit(common.out.as_ref(), &report::certificate_to_json(cert))
        }
        Command::Slice { common, pairs, range, steps } => {
            let fw = load(&common.file)?;
            let cfg = tolerance(common.tol)?;
            let spec = build_spectrahedron(&fw)?;
            let a = internal_pair(pairs.0, fw.n())?;
            let b = internal_pair(pairs.1, fw.n())?;
            let csv = spec.slice_csv(a, b, range.0, range.1, steps, &cfg)?;
            emit(common.out.as_ref(), &csv)
        }
        Command::Oracle { common, dim, restarts, seed } => {
            let fw = load(&common.file)?;
            let cfg = tolerance(common.tol)?;
            let s = dim.unwrap_or_else(|| fw.dim());
            let result = search_equivalent(&fw, s, restarts, seed, &cfg)?;
            let text = report::build_oracle_report(&fw, &result, s, restarts, seed).to_json();
            emit(common.out.as_ref(), &text)
        }
        Command::CheckFile { file } => {
            let fw = load(&file)?;
            println!(
                "ok: {} vertices in dimension {}, {} edges, {} missing pairs",
                fw.n(),
                fw.dim(),
                fw.graph().edges().count(),
                fw.graph().missing_edges().len()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::InternalInconsistency(_) => 2,
                _ => 1,
            })
        }
    }
}
