mod example;
mod verify;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use qrank_core::f2linalg::MatF2;
use qrank_core::gf2field::{FieldError, FieldSpec};
use qrank_core::qconstruct::{
    build_css_code, build_proposed_code, certify_distance, compare_table, CertifyOptions, CodeBundle, ProposedOptions, QConstructError,
    SampleOptions, DEFAULT_BUDGET,
};
use qrank_core::stacked_sim::{run_trials, SimError, TrialConfig};

#[derive(Parser)]
#[command(name = "qrank", version, about = "Quantum rank-metric codes for stacked quantum memories")]
struct Cli {
    /// Worker threads for enumeration and simulation; QRANK_THREADS takes
    /// precedence when set.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Proposed,
    Css,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its bundle.
    Construct {
        #[arg(long, value_enum, default_value_t = Method::Proposed)]
        method: Method,
        /// Cells per layer for the proposed code (2m layers).
        #[arg(short = 'm')]
        m: Option<usize>,
        #[arg(short = 'k')]
        k: Option<usize>,
        /// Odd side length for the CSS code.
        #[arg(short = 'n')]
        n: Option<usize>,
        #[arg(short = 'r')]
        r: Option<usize>,
        #[arg(short = 's')]
        s: Option<usize>,
        /// Field modulus in hex, e.g. 13 for x^4+x+1.
        #[arg(long)]
        modulus: Option<String>,
        /// Comma-separated self-dual basis elements in hex.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<String>>,
        /// Normal-basis generator in hex.
        #[arg(long)]
        theta: Option<String>,
    },
    /// Certify the minimum rank distance of a bundle.
    Distance {
        /// Bundle file; stdin when omitted.
        #[arg(long)]
        bundle: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
        /// Fall back to this many random samples when over budget.
        #[arg(long)]
        sample: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Walk through the m = 2, k = 1 construction with every step checked.
    Example,
    /// Compare the square CSS layouts with the 2n x n layout.
    Compare {
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 'k')]
        k: u64,
    },
    /// Monte Carlo check of the accumulated-fault rank bound.
    Simulate {
        #[arg(short = 'm', default_value_t = 8)]
        m: usize,
        #[arg(short = 'n', default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        gates: usize,
        /// Maximum faults per trial.
        #[arg(long, default_value_t = 3)]
        faults: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Re-run the structural checks on a bundle.
    Verify {
        #[arg(long)]
        bundle: Option<PathBuf>,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parameter error: {0}")]
    Param(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Param(_) | CliError::Io(_) => 2,
            CliError::Verification(_) => 3,
            CliError::Budget(_) => 4,
        }
    }
}

impl From<QConstructError> for CliError {
    fn from(e: QConstructError) -> Self {
        match e {
            QConstructError::Verification(_) => CliError::Verification(e.to_string()),
            QConstructError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            _ => CliError::Param(e.to_string()),
        }
    }
}

impl From<FieldError> for CliError {
    fn from(e: FieldError) -> Self {
        CliError::Param(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Param(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn resolve_threads(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("QRANK_THREADS") {
        Ok(v) if !v.trim().is_empty() => {
            v.trim().parse().map(Some).map_err(|_| CliError::Param(format!("QRANK_THREADS={v:?} is not a thread count")))
        }
        _ => Ok(flag),
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn read_bundle(path: Option<&PathBuf>) -> Result<CodeBundle> {
    let text = match path {
        Some(p) => fs::read_to_string(p)?,
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            s
        }
    };
    serde_json::from_str(&text).map_err(|e| CliError::Param(format!("bundle does not parse: {e}")))
}

fn need(value: Option<usize>, flag: &str) -> Result<usize> {
    value.ok_or_else(|| CliError::Param(format!("missing -{flag}")))
}

fn render_bundle(bundle: &CodeBundle, format: Format) -> String {
    match format {
        Format::Json => to_json(bundle),
        Format::Table => format!(
            "construction: {}\nlayers x cells: {} x {}\nparameters: {}\ngenerators:\n{}",
            serde_json::to_value(bundle.provenance.construction).expect("serializable").as_str().unwrap_or_default(),
            bundle.m,
            bundle.n,
            bundle.params,
            bundle.generators.to_text()
        ),
    }
}

fn construct(cmd: &Command, format: Format) -> Result<String> {
    let Command::Construct { method, m, k, n, r, s, modulus, alpha, theta } = cmd else { unreachable!() };
    let bundle = match method {
        Method::Proposed => {
            let (m, k) = (need(*m, "m")?, need(*k, "k")?);
            let degree = u32::try_from(2 * m).map_err(|_| CliError::Param(format!("m = {m} out of range")))?;
            let field = match modulus {
                Some(hex) => {
                    let bits = u64::from_str_radix(hex.trim_start_matches("0x"), 16).map_err(|_| CliError::Param(format!("bad modulus {hex:?}")))?;
                    FieldSpec::new(degree, bits)?
                }
                None => FieldSpec::find_irreducible(degree)?,
            };
            let opts = ProposedOptions {
                field: Some(field),
                alpha: alpha.as_ref().map(|list| list.iter().map(|h| field.parse_element(h)).collect()).transpose()?,
                theta: theta.as_ref().map(|h| field.parse_element(h)).transpose()?,
                congruence: None,
            };
            build_proposed_code(m, k, opts)?.bundle()
        }
        Method::Css => build_css_code(need(*n, "n")?, need(*r, "r")?, need(*s, "s")?)?.bundle(),
    };
    Ok(render_bundle(&bundle, format))
}

fn distance(bundle: Option<&PathBuf>, budget: u64, sample: Option<u64>, seed: u64, threads: Option<usize>, format: Format) -> Result<String> {
    let bundle = read_bundle(bundle)?;
    let code = bundle.code()?;
    let opts = CertifyOptions { budget, threads, sample: sample.map(|samples| SampleOptions { samples, seed }) };
    match certify_distance(&code, opts) {
        Ok(cert) => Ok(match format {
            Format::Json => to_json(&cert),
            Format::Table => format!(
                "D_R = {} ({}, {} vectors)\nwitness: {}\n",
                cert.d,
                if cert.certified { "certified" } else { "upper bound from sampling" },
                cert.enumerated,
                cert.witness
            ),
        }),
        Err(QConstructError::DistanceUndefined) => {
            let note = "the code equals its symplectic dual, so no vector lies outside it";
            Ok(match format {
                Format::Json => to_json(&serde_json::json!({ "D_R": "undefined", "certified": false, "note": note })),
                Format::Table => format!("D_R = undefined ({note})\n"),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn compare(n: u64, k: u64, format: Format) -> Result<String> {
    let table = compare_table(n, k)?;
    Ok(match format {
        Format::Json => to_json(&table),
        Format::Table => {
            let mut out = format!("{:<24}", "");
            for c in &table.columns {
                out += &format!("{:<28}", c.label);
            }
            out += "\n";
            type Cell = fn(&qrank_core::qconstruct::LayoutColumn) -> String;
            let rows: [(&str, Cell); 6] = [
                ("physical qubits N", |c| c.n_qubits.to_string()),
                ("logical qubits K", |c| c.k_logical.to_string()),
                ("rank distance D", |c| c.distance.to_string()),
                ("layers x cells", |c| format!("{} x {}", c.layers, c.cells)),
                ("code rate R", |c| c.rate.to_string()),
                ("relative distance", |c| c.delta.to_string()),
            ];
            for (name, cell) in rows {
                out += &format!("{name:<24}");
                for c in &table.columns {
                    out += &format!("{:<28}", cell(c));
                }
                out += "\n";
            }
            out += &format!("delta ratio vs {}: {}\n", table.columns[0].label, table.delta_ratio_minus);
            out += &format!("delta ratio vs {}: {}\n", table.columns[1].label, table.delta_ratio_plus);
            out
        }
    })
}

fn simulate(cfg: TrialConfig, format: Format) -> Result<String> {
    let (reports, summary) = run_trials(&cfg)?;
    let mut out = String::new();
    if format == Format::Json {
        for r in &reports {
            out += &serde_json::to_string(r).expect("serializable");
            out += "\n";
        }
        out += &serde_json::to_string(&serde_json::json!({ "summary": summary })).expect("serializable");
        out += "\n";
    } else {
        out += &format!(
            "trials: {}\nbound violations: {}\nrank-invariance checks: {} ({} violations)\nmax rank(Q)/4t: {:.4}\n",
            summary.trials, summary.violations, summary.invariance_checks, summary.invariance_violations, summary.max_ratio
        );
    }
    if summary.violations > 0 || summary.invariance_violations > 0 {
        emit(&out, None)?;
        return Err(CliError::Verification(format!("{} bound violations, {} rank-invariance violations", summary.violations, summary.invariance_violations)));
    }
    Ok(out)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<String> {
    let threads = resolve_threads(cli.threads)?;
    match &cli.command {
        cmd @ Command::Construct { .. } => construct(cmd, cli.format),
        Command::Distance { bundle, budget, sample, seed } => distance(bundle.as_ref(), *budget, *sample, *seed, threads, cli.format),
        Command::Example => example::run(threads, cli.format == Format::Json),
        Command::Compare { n, k } => compare(*n, *k, cli.format),
        Command::Simulate { m, n, gates, faults, trials, seed } => simulate(
            TrialConfig { layers: *m, cells: *n, gates: *gates, max_faults: *faults, trials: *trials, seed: *seed, threads },
            cli.format,
        ),
        Command::Verify { bundle } => verify::run(&read_bundle(bundle.as_ref())?, cli.format == Format::Json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli).and_then(|text| emit(&text, cli.out.as_ref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub(crate) fn matrix_lines(m: &MatF2) -> Vec<String> {
    m.row_vectors().iter().map(|r| r.to_string()).collect()
}
