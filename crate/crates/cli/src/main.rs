//! `deckfe`: pushover runs of slab-on-girder bridges and overlay slabs
//! described by a model document.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use deckfe_core::io::{curve_csv, to_json};
use deckfe_core::study::{document_capacity, prepare, run_case, summarize, sweep, sweep_table, RunResult};
use deckfe_core::{compare_runs, emit_chart, parse_model_document, Curve, Error, ModelDocument};

/// Exit statuses, one per failure class.
mod exit {
    pub const USAGE: u8 = 2;
    pub const IO: u8 = 3;
    pub const DOCUMENT: u8 = 4;
    pub const MODEL: u8 = 5;
    pub const SOLVER: u8 = 6;
    pub const NOT_APPLICABLE: u8 = 7;
    pub const OUTPUT: u8 = 8;
}

#[derive(Parser)]
#[command(name = "deckfe", version, about = "Nonlinear pushover of bridge decks with delamination")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone)]
struct Common {
    /// Model document to read.
    #[arg(long)]
    document: PathBuf,
    /// Directory for curve, summary and chart files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Also write chart.svg.
    #[arg(long)]
    chart: bool,
    /// Resistance factor applied to the reported nominal capacities.
    #[arg(long)]
    phi: Option<f64>,
    /// Print one progress line per accepted load step on stderr.
    #[arg(long)]
    progress: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Validate the document and build every model it describes.
    Check {
        #[arg(long)]
        document: PathBuf,
    },
    /// Pushover of the intact structure or one damage scenario.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
    },
    /// Nominal capacities of the bridge section.
    Capacity {
        #[arg(long)]
        document: PathBuf,
        #[arg(long)]
        phi: Option<f64>,
    },
    /// Intact run against one damage scenario.
    Compare {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: String,
    },
    /// Intact run and every damage scenario, with a comparison table.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Run the deck alone instead of the full bridge.
        #[arg(long)]
        deck_only: bool,
    },
    /// Pushover of the deck without girders or diaphragms.
    DeckOnly {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scenario: Option<String>,
    },
}

struct Failure {
    code: u8,
    kind: &'static str,
    error: Error,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let (code, kind) = match &error {
            Error::Io(_) => (exit::IO, "io"),
            Error::Document { .. } | Error::InvalidConfig(_) => (exit::DOCUMENT, "document"),
            Error::InvalidInput(_)
            | Error::SingularElement { .. }
            | Error::Asymmetric(_)
            | Error::UnmatchedSurface(_) => (exit::MODEL, "model"),
            Error::Solver(_) => (exit::SOLVER, "solver"),
            Error::NotApplicable(_) => (exit::NOT_APPLICABLE, "not-applicable"),
        };
        Failure { code, kind, error }
    }
}

fn output_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: exit::OUTPUT, kind: "output", error: Error::Io(format!("{}: {e}", path.display())) }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            if !e.use_stderr() {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            report(&Failure { code: exit::USAGE, kind: "usage", error: Error::InvalidInput(e.to_string()) });
            return ExitCode::from(exit::USAGE);
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code)
        }
    }
}

fn report(f: &Failure) {
    let mut obj = json!({ "error": f.kind, "exit_code": f.code, "message": f.error.to_string() });
    if let Error::Document { location, message } = &f.error {
        obj["line"] = json!(location.line);
        obj["column"] = json!(location.column);
        obj["message"] = json!(message);
    }
    eprintln!("{obj}");
}

fn load(path: &Path) -> Result<ModelDocument, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(parse_model_document(&text)?)
}

fn load_common(c: &Common) -> Result<ModelDocument, Failure> {
    if let Some(n) = c.threads {
        if n == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    }
    let mut doc = load(&c.document)?;
    doc.solver.verbose = c.progress;
    fs::create_dir_all(&c.out).map_err(|e| output_failure(&c.out, e))?;
    Ok(doc)
}

fn write(dir: &Path, name: &str, text: &str) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| output_failure(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<(), Failure> {
    write(dir, name, &(to_json(value)? + "\n"))
}

fn curve_of(run: &RunResult, deck_only: bool) -> Curve {
    let points = run
        .record
        .points
        .iter()
        .map(|p| (if deck_only { p.deck_deflection } else { p.girder_deflection }, p.load))
        .collect();
    Curve { name: run.label.clone(), points }
}

fn write_chart(c: &Common, doc: &ModelDocument, runs: &[&RunResult], deck_only: bool) -> Result<(), Failure> {
    if !c.chart {
        return Ok(());
    }
    let nominal = document_capacity(doc, c.phi)?
        .map(|r| if deck_only { r.strip_system_load } else { r.nominal_system_load });
    let curves: Vec<Curve> = runs.iter().map(|r| curve_of(r, deck_only)).collect();
    write(&c.out, "chart.svg", &emit_chart(&curves, nominal)?)
}

fn single(c: &Common, scenario: Option<&str>, deck_only: bool) -> Result<(), Failure> {
    let doc = load_common(c)?;
    let run = run_case(&doc, scenario, deck_only)?;
    write(&c.out, &format!("curve_{}.csv", run.label), &curve_csv(&run.record))?;
    write_json(&c.out, "summary.json", &summarize(&doc, &run, deck_only, c.phi)?)?;
    write_chart(c, &doc, &[&run], deck_only)
}

fn execute(command: Command) -> Result<(), Failure> {
    match command {
        Command::Check { document } => {
            let doc = load(&document)?;
            prepare(&doc, None, false)?;
            for s in &doc.scenarios {
                prepare(&doc, Some(&s.label), false)?;
            }
            document_capacity(&doc, None)?;
            println!("ok");
            Ok(())
        }
        Command::Run { common, scenario } => single(&common, scenario.as_deref(), false),
        Command::DeckOnly { common, scenario } => single(&common, scenario.as_deref(), true),
        Command::Capacity { document, phi } => {
            let doc = load(&document)?;
            let report = document_capacity(&doc, phi)?
                .ok_or_else(|| Error::NotApplicable("capacity needs a bridge document with a [capacity] section".into()))?;
            println!("{}", to_json(&report)?);
            Ok(())
        }
        Command::Compare { common, scenario } => {
            let doc = load_common(&common)?;
            doc.scenario(&scenario)?;
            let (intact, damaged) =
                rayon::join(|| run_case(&doc, None, false), || run_case(&doc, Some(&scenario), false));
            let (intact, damaged) = (intact?, damaged?);
            let comparison = compare_runs(&intact.record, &damaged.record)?;
            for r in [&intact, &damaged] {
                write(&common.out, &format!("curve_{}.csv", r.label), &curve_csv(&r.record))?;
            }
            let summary = json!({
                "intact": summarize(&doc, &intact, false, common.phi)?,
                "damaged": summarize(&doc, &damaged, false, common.phi)?,
                "comparison": comparison,
            });
            write_json(&common.out, "summary.json", &summary)?;
            write_chart(&common, &doc, &[&intact, &damaged], false)
        }
        Command::Sweep { common, deck_only } => {
            let doc = load_common(&common)?;
            let result = sweep(&doc, deck_only)?;
            let table = sweep_table(&doc, &result)?;
            let mut runs = vec![&result.intact];
            runs.extend(result.cases.iter().map(|(r, _)| r));
            for r in &runs {
                write(&common.out, &format!("curve_{}.csv", r.label), &curve_csv(&r.record))?;
            }
            let summaries = runs
                .iter()
                .map(|r| summarize(&doc, r, deck_only, common.phi))
                .collect::<Result<Vec<_>, _>>()?;
            write_json(&common.out, "summary.json", &json!({ "table": table, "runs": summaries }))?;
            println!("{:<10} {:>9} {:>12} {:>10} {:>10}  stop", "case", "coverage", "ultimate_kN", "delta_%", "ductility");
            for row in &table {
                let duct = row.ductility.map_or("-".to_string(), |d| format!("{d:.3}"));
                println!(
                    "{:<10} {:>9.4} {:>12.3} {:>10.3} {:>10}  {}",
                    row.label, row.coverage, row.terminal_load, row.ultimate_delta_pct, duct, row.stop_cause
                );
            }
            write_chart(&common, &doc, &runs, deck_only)
        }
    }
}
