//! `k3cox`: curves, cones, Cox ring generator degrees and their verification for the
//! bundled rank-3 K3 lattices or a lattice read from a file.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;
use std::thread;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use k3cox_core::database::{self, LatticeRecord};
use k3cox_core::report::{self, AnalysisOptions, Stages};
use k3cox_core::{Error, GeneratorReport, Mismatch};

const EXIT_MISMATCH: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTATION: u8 = 3;

#[derive(Parser)]
#[command(name = "k3cox", version, about = "Cox ring generator degrees of rank-3 Mori dream K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone)]
enum Command {
    /// Search for the (-2)-curve classes.
    Curves(#[command(flatten)] Common),
    /// Curves, effective and nef cones with their Hilbert bases.
    Cones(#[command(flatten)] Common),
    /// Generator degrees of the Cox ring.
    Generators(#[command(flatten)] Common),
    /// Necessity certificates for each generator degree.
    Minimality(#[command(flatten)] Common),
    /// Compare the computed data with the tables stored in the record.
    Verify(#[command(flatten)] Common),
    /// Run every stage.
    All(#[command(flatten)] Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Bundled lattice by name (`S_1`, `S_{4,1,1}`) or row number; with --input, selects a record of the file.
    #[arg(long)]
    lattice: Option<String>,
    /// Lattice file in the plain-text record format, or JSON (one record or a list).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Worker threads for candidate evaluation.
    #[arg(long)]
    jobs: Option<usize>,
    /// Give up after this many seconds (exit code 3).
    #[arg(long)]
    timeout: Option<u64>,
    /// Skip involution-based elimination of cubes of degree-two classes.
    #[arg(long)]
    no_l1: bool,
    /// Include the verdict and witness of every candidate degree.
    #[arg(long)]
    emit_witnesses: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq, Debug)]
pub enum Format {
    Text,
    Structured,
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Curves(c)
            | Command::Cones(c)
            | Command::Generators(c)
            | Command::Minimality(c)
            | Command::Verify(c)
            | Command::All(c) => c,
        }
    }

    fn stages(&self) -> Stages {
        let none = Stages::NONE;
        match self {
            Command::Curves(_) => Stages { curves: true, ..none },
            Command::Cones(_) => Stages { cones: true, ..none },
            Command::Generators(_) => Stages { generators: true, ..none },
            Command::Minimality(_) => Stages { minimality: true, ..none },
            Command::Verify(_) => Stages { minimality: false, ..Stages::ALL },
            Command::All(_) => Stages::ALL,
        }
    }
}

/// One analysed record, with the comparison when verifying.
pub struct Outcome {
    pub record: LatticeRecord,
    pub report: GeneratorReport,
    pub mismatches: Option<Vec<Mismatch>>,
}

enum Failure {
    Usage(String),
    Computation(String),
}

fn load(c: &Common) -> Result<Vec<LatticeRecord>, Failure> {
    let usage = |e: Error| Failure::Usage(e.to_string());
    let records = match &c.input {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            let json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with(['{', '[']);
            let mut records = if json {
                parse_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?
            } else {
                database::parse_records(&text).map_err(usage)?
            };
            if let Some(name) = &c.lattice {
                records.retain(|r| &r.name == name);
                if records.is_empty() {
                    return Err(usage(Error::UnknownLattice(name.clone())));
                }
            }
            records
        }
        None => match &c.lattice {
            Some(name) => vec![database::find(name).map_err(usage)?.clone()],
            None => database::bundled().to_vec(),
        },
    };
    for r in &records {
        r.validate().map_err(usage)?;
    }
    Ok(records)
}

fn parse_json(text: &str) -> serde_json::Result<Vec<LatticeRecord>> {
    match serde_json::from_str::<Vec<LatticeRecord>>(text) {
        Ok(v) => Ok(v),
        Err(_) => serde_json::from_str::<LatticeRecord>(text).map(|r| vec![r]),
    }
}

fn analyse(cmd: &Command, records: Vec<LatticeRecord>) -> Result<Vec<Outcome>, Failure> {
    let c = cmd.common();
    let opts = AnalysisOptions { stages: cmd.stages(), use_l1: !c.no_l1, ..Default::default() };
    let verify = matches!(cmd, Command::Verify(_));
    records
        .into_iter()
        .map(|record| {
            let mut report = report::analyze(&record, &opts).map_err(|e| Failure::Computation(format!("{}: {e}", record.name)))?;
            let mismatches = if verify {
                Some(report::verify(&record, &report).map_err(|e| Failure::Computation(e.to_string()))?)
            } else {
                None
            };
            if let Some(curves) = report.curves.as_mut() {
                curves.sort();
            }
            if let Some(cones) = report.cones.as_mut() {
                cones.e.sort();
            }
            if !c.emit_witnesses {
                if let Some(g) = report.generators.as_mut() {
                    g.verdicts.retain(|v| v.status.is_kept());
                }
            }
            Ok(Outcome { record, report, mismatches })
        })
        .collect()
}

/// Runs the analysis on its own thread pool, bounded by the timeout.
fn run_bounded(cmd: Command, records: Vec<LatticeRecord>) -> Result<Vec<Outcome>, Failure> {
    let c = cmd.common().clone();
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = c.jobs {
        if j == 0 {
            return Err(Failure::Usage("--jobs must be at least 1".into()));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder.build().map_err(|e| Failure::Computation(e.to_string()))?;
    let work = move || pool.install(|| analyse(&cmd, records));
    let Some(secs) = c.timeout else { return work() };
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let _ = tx.send(work());
    });
    match rx.recv_timeout(Duration::from_secs(secs)) {
        Ok(r) => r,
        Err(_) => Err(Failure::Computation(format!("timed out after {secs} s"))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cmd = cli.command;
    let format = cmd.common().format;
    let outcome = load(cmd.common()).and_then(|records| run_bounded(cmd, records));
    match outcome {
        Ok(outcomes) => {
            print!("{}", render::render(&outcomes, format));
            let mismatched = outcomes.iter().any(|o| o.mismatches.as_ref().is_some_and(|m| !m.is_empty()));
            if mismatched {
                ExitCode::from(EXIT_MISMATCH)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Computation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_COMPUTATION)
        }
    }
}
