//! `clockwalk` command-line front end.

mod output;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use clockwalk::circuit::DEFAULT_CONTRACT_WIDTH_CAP;
use clockwalk::clockham::{Which, DEFAULT_MAX_DIM};
use clockwalk::pipeline::build_circuit;
use clockwalk::{
    parse_circuit, run_report, BitString, Instance, PipelineError, ReportOptions,
    ReversibleCircuit, SchemaMode,
};

use output::{rounded_json, write_convergence_csv, write_occupation_csv};

#[derive(Debug, Parser)]
#[command(name = "clockwalk", version)]
#[command(about = "Clock Hamiltonians of reversible circuits and their time-averaged walks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a circuit and, for schema modes, check the predicate contract.
    Validate(CircuitArgs),
    /// Print the schema circuit in the text format.
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dump the orbit of the input state as CSV.
    Orbit {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Closed-form analysis of the orbit (no dense oracle).
    Analyze {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Exhaustive structure check of the clock Hamiltonian.
    Verify(CircuitArgs),
    /// Full pipeline. With `--out` the occupation (and convergence) CSVs
    /// are written next to the JSON report.
    Report {
        #[command(flatten)]
        run: RunArgs,
        /// Cross-check against dense diagonalization of the full space.
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write the graph of A (or F) as a `u v` edge list.
    ExportGraph {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_enum, default_value_t = Matrix::A)]
        which: Matrix,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct CircuitArgs {
    #[arg(long)]
    circuit: PathBuf,
    /// raw, toggle or counter:<c>
    #[arg(long, default_value = "toggle", value_parser = parse_mode)]
    schema: SchemaMode,
    /// Cap on the full dimension 2^(m+s) for dense work.
    #[arg(long, env = "CLOCKWALK_MAX_DIM", default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    circuit: CircuitArgs,
    /// Input bits, first input wire leftmost.
    #[arg(long)]
    input: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Matrix {
    A,
    F,
}

fn parse_mode(s: &str) -> Result<SchemaMode, String> {
    s.parse().map_err(|e: PipelineError| e.to_string())
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which is reserved for invariant
    // violations here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let internal = err
                .chain()
                .filter_map(|e| e.downcast_ref::<PipelineError>())
                .any(PipelineError::is_invariant_violation);
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Validate(args) => validate(&args),
        Command::Build { circuit, out } => {
            let g = load_circuit(&circuit.circuit)?;
            let (v, _) = build_circuit(&g, circuit.schema, DEFAULT_CONTRACT_WIDTH_CAP)?;
            emit(out.as_deref(), v.to_text().as_bytes())
        }
        Command::Orbit { run, out } => {
            let inst = instance(&run)?;
            let orbit = inst.orbit()?;
            let mut buf = Vec::new();
            orbit.write_csv(&mut buf, inst.output_wire())?;
            emit(out.as_deref(), &buf)
        }
        Command::Analyze { run, out, format } => {
            report(&run, false, out.as_deref(), format, false)
        }
        Command::Verify(args) => verify(&args),
        Command::Report {
            run,
            oracle,
            out,
            format,
        } => report(&run, oracle, out.as_deref(), format, true),
        Command::ExportGraph {
            circuit,
            which,
            out,
        } => {
            let g = load_circuit(&circuit.circuit)?;
            let (v, _) = build_circuit(&g, circuit.schema, DEFAULT_CONTRACT_WIDTH_CAP)?;
            let op = clockwalk::build_forward_operator(&v)?;
            let which = match which {
                Matrix::A => Which::A,
                Matrix::F => Which::F,
            };
            let m = op.assemble_matrix(which, circuit.max_dim)?;
            let mut buf = Vec::new();
            m.write_edge_list(&mut buf)?;
            emit(out.as_deref(), &buf)
        }
    }
}

fn load_circuit(path: &Path) -> Result<ReversibleCircuit> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_circuit(&text).with_context(|| format!("parsing {}", path.display()))
}

fn instance(run: &RunArgs) -> Result<Instance> {
    let g = load_circuit(&run.circuit.circuit)?;
    let x: BitString = run
        .input
        .parse()
        .with_context(|| format!("input {:?}", run.input))?;
    Ok(Instance::new(
        &g,
        run.circuit.schema,
        &x,
        DEFAULT_CONTRACT_WIDTH_CAP,
    )?)
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

#[derive(Serialize)]
struct ValidateSummary {
    schema: String,
    width: usize,
    gates: usize,
    schema_width: usize,
    schema_gates: usize,
    input_wires: Option<Vec<usize>>,
    output_wire: Option<usize>,
}

fn validate(args: &CircuitArgs) -> Result<()> {
    let g = load_circuit(&args.circuit)?;
    let (v, desc) = build_circuit(&g, args.schema, DEFAULT_CONTRACT_WIDTH_CAP)
        .with_context(|| format!("checking {}", args.circuit.display()))?;
    let summary = ValidateSummary {
        schema: args.schema.to_string(),
        width: g.width(),
        gates: g.len(),
        schema_width: v.width(),
        schema_gates: v.len(),
        input_wires: desc.as_ref().map(|d| d.input_wires.clone()),
        output_wire: desc.as_ref().map(|d| d.output_wire()),
    };
    emit(None, &rounded_json(&summary)?)
}

fn verify(args: &CircuitArgs) -> Result<()> {
    let g = load_circuit(&args.circuit)?;
    let (v, desc) = build_circuit(&g, args.schema, DEFAULT_CONTRACT_WIDTH_CAP)?;
    let op = clockwalk::build_forward_operator(&v)?;
    let rep = op.verify_structure(args.max_dim)?;
    emit(None, &rounded_json(&rep)?)?;
    if rep.is_local_adjacency() {
        Ok(())
    } else if desc.is_some() {
        Err(PipelineError::Invariant(
            "schema circuit produced a non-adjacency or non-local A".into(),
        )
        .into())
    } else {
        bail!("A is not a 5-local 0/1 adjacency matrix")
    }
}

fn report(
    run: &RunArgs,
    oracle: bool,
    out: Option<&Path>,
    format: Format,
    sidecars: bool,
) -> Result<()> {
    let inst = instance(run)?;
    let rep = run_report(
        &inst,
        ReportOptions {
            oracle,
            max_dim: run.circuit.max_dim,
        },
    )?;
    let mut occupation = Vec::new();
    write_occupation_csv(&mut occupation, &rep.occupation)?;
    match format {
        Format::Csv => emit(out, &occupation),
        Format::Json => {
            emit(out, &rounded_json(&rep)?)?;
            let Some(path) = out.filter(|_| sidecars) else {
                return Ok(());
            };
            emit(Some(&sidecar(path, "occupation")?), &occupation)?;
            if let Some(o) = &rep.oracle {
                let mut conv = Vec::new();
                write_convergence_csv(&mut conv, &o.convergence)?;
                emit(Some(&sidecar(path, "convergence")?), &conv)?;
            }
            Ok(())
        }
    }
}

/// `dir/report.json` → `dir/report.<tag>.csv`.
fn sidecar(path: &Path, tag: &str) -> Result<PathBuf> {
    let stem = path
        .file_stem()
        .ok_or_else(|| anyhow!("output path {} has no file name", path.display()))?;
    Ok(path.with_file_name(format!("{}.{tag}.csv", stem.to_string_lossy())))
}
