//! Command-line front end: generate instances, run the decomposition
//! drivers, re-verify certificates, decide feasibility with the exact LP
//! oracle, run the counting audits over a corpus, and time stages.
//!
//! Exit codes: 0 for a feasible verified result, 1 when the mathematics
//! says no (an infeasible verdict, a failed re-verification, or a driver
//! stopping with a structural refusal), 2 for usage, input, or I/O
//! errors. Certificates are only ever written by exact-mode runs; the
//! timing mode reports stage times without certifying anything.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::audits::AuditCheck;
use crate::generators::{edge_hash, generate, manifest, spec_label, GenSpec, Manifest};
use crate::hypergraph::Hypergraph;
use crate::oracle::{lp_feasible_capped, OracleError, DEFAULT_LP_CAP};
use crate::pipeline::{
    decompose_hypergraph, decompose_r2, decompose_r32, verify, Certificate, PipelineError,
    PipelineOutcome,
};
use crate::rat::format_q;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FLAGGED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

const DECOMPOSE_CSV_HEADER: &str = "# fracdecomp decompose csv v1\n\
     instance,n,k,r,driver,delegated,mode,feasible,max_edge_residual,removed_cliques,total_ms\n";
const BENCH_CSV_HEADER: &str = "# fracdecomp bench csv v1\ninstance,stage,millis\n";

#[derive(Parser, Debug)]
#[command(
    name = "fracdecomp",
    version,
    about = "Exact fractional clique decompositions with verified certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for parallel stages (0 uses all cores).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Override the clique enumeration cap for this run.
    #[arg(long, global = true)]
    clique_cap: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate an instance and write it with its manifest.
    Gen(GenArgs),
    /// Run a decomposition driver and write a certificate.
    Decompose(DecomposeArgs),
    /// Re-verify a certificate file against its instance.
    Verify(VerifyArgs),
    /// Decide feasibility with the exact LP oracle.
    Oracle(OracleArgs),
    /// Run the counting audits over a corpus manifest.
    Audit(AuditArgs),
    /// Time clique enumeration and the pipeline stages.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    /// Generator spec as inline JSON, e.g. '{"family":"complete","n":10,"k":2}'.
    #[arg(long)]
    spec: String,
    /// Output path for the instance text file.
    #[arg(long)]
    out: PathBuf,
    /// Output path for the manifest JSON (default: instance path with a
    /// .manifest.json extension).
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PipelineSelect {
    /// Uniform weighting plus basic-gadget corrections.
    Hypergraph,
    /// Averaged edge corrections on a graph host.
    R2,
    /// Full vertex-corrected driver on a graph host.
    R32,
    /// Graphs run the full driver, hypergraphs the uniform one.
    Auto,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Exact rational arithmetic; the only mode that writes certificates.
    Exact,
    /// Stage timing only; never writes certificates.
    FloatTiming,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    /// Instance file (text format, or JSON with a .json extension).
    #[arg(long)]
    input: PathBuf,
    /// Clique order to decompose into.
    #[arg(short, long)]
    r: usize,
    /// Host uniformity; defaults to the instance's own.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long, value_enum, default_value_t = PipelineSelect::Auto)]
    pipeline: PipelineSelect,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Certificate output path (exact mode only).
    #[arg(long)]
    cert: Option<PathBuf>,
    /// CSV summary path; appends one row, writing the header if new.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Instance file the certificate refers to.
    #[arg(long)]
    input: PathBuf,
    /// Certificate JSON to re-verify.
    #[arg(long)]
    cert: PathBuf,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Instance file.
    #[arg(long)]
    input: PathBuf,
    /// Clique order.
    #[arg(short, long)]
    r: usize,
    /// Host uniformity; defaults to the instance's own.
    #[arg(short, long)]
    k: Option<usize>,
    /// Cap on the number of clique variables.
    #[arg(long, default_value_t = DEFAULT_LP_CAP)]
    cap: usize,
    /// Output path for the verdict JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct AuditArgs {
    /// Corpus manifest: a JSON array of generator manifests.
    #[arg(long)]
    manifest: PathBuf,
    /// Clique order the audits are evaluated at.
    #[arg(short, long)]
    r: usize,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// Generator spec as inline JSON; repeat for several instances.
    #[arg(long = "spec", required = true)]
    specs: Vec<String>,
    /// Clique order for enumeration and decomposition.
    #[arg(short, long)]
    r: usize,
    /// CSV output path; stdout when absent.
    #[arg(long)]
    csv: Option<PathBuf>,
}

/// Parses the process arguments, runs the command, and returns the exit
/// code for the process to report.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // A second configuration attempt in the same process is harmless.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    if let Some(cap) = cli.clique_cap {
        std::env::set_var("FRACDECOMP_CLIQUE_CAP", cap.to_string());
    }
    let result = match &cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Audit(args) => cmd_audit(args),
        Command::Bench(args) => cmd_bench(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

type CmdResult = Result<i32, Box<dyn std::error::Error>>;

fn cmd_gen(args: &GenArgs) -> CmdResult {
    let spec: GenSpec = serde_json::from_str(&args.spec)?;
    let g = generate(&spec)?;
    write_file(&args.out, &g.save())?;
    let man = manifest(&spec, &g);
    let man_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| args.out.with_extension("manifest.json"));
    write_file(&man_path, &serde_json::to_string_pretty(&man)?)?;
    println!(
        "generated {} (n={}, k={}, {} edges) -> {}",
        spec_label(&spec),
        g.n(),
        g.k(),
        g.edge_count(),
        args.out.display()
    );
    Ok(EXIT_OK)
}

fn cmd_decompose(args: &DecomposeArgs) -> CmdResult {
    let g = load_instance(&args.input)?;
    let k = args.k.unwrap_or_else(|| g.k());
    let label = instance_label(&args.input);
    let started = Instant::now();
    let outcome = match args.pipeline {
        PipelineSelect::Hypergraph => decompose_hypergraph(&g, args.r, k),
        PipelineSelect::R2 => decompose_r2(&g, args.r),
        PipelineSelect::R32 => decompose_r32(&g, args.r),
        PipelineSelect::Auto => {
            if g.k() == 2 {
                decompose_r32(&g, args.r)
            } else {
                decompose_hypergraph(&g, args.r, g.k())
            }
        }
    };
    let total_ms = started.elapsed().as_millis();
    match outcome {
        Ok(out) => {
            print_outcome(&label, &out);
            if args.mode == Mode::Exact {
                if let Some(path) = &args.cert {
                    write_file(path, &serde_json::to_string_pretty(&out.certificate)?)?;
                    println!("certificate written to {}", path.display());
                }
            }
            if let Some(csv) = &args.csv {
                let mode = match args.mode {
                    Mode::Exact => "exact",
                    Mode::FloatTiming => "float-timing",
                };
                let row = format!(
                    "{label},{},{},{},{},{},{mode},{},{},{},{total_ms}\n",
                    out.certificate.n,
                    out.certificate.k,
                    out.certificate.r,
                    out.driver,
                    out.delegated,
                    out.certificate.feasible,
                    format_q(&out.certificate.max_edge_residual),
                    out.removed_cliques,
                );
                append_csv(csv, DECOMPOSE_CSV_HEADER, &row)?;
            }
            Ok(if out.certificate.feasible {
                EXIT_OK
            } else {
                EXIT_FLAGGED
            })
        }
        Err(e) => {
            eprintln!("decomposition stopped in stage '{}': {e}", e.stage());
            Ok(pipeline_exit_code(&e))
        }
    }
}

/// A structural refusal is a mathematical verdict about the instance and
/// exits 1; contract violations and enumeration failures exit 2.
fn pipeline_exit_code(err: &PipelineError) -> i32 {
    match err {
        PipelineError::DegreeBelowThreshold { .. }
        | PipelineError::NonpositiveScale { .. }
        | PipelineError::NoGadgetHost { .. }
        | PipelineError::CorrectionFamilyTooSmall { .. }
        | PipelineError::BreakdownOrder { .. } => EXIT_FLAGGED,
        PipelineError::InvalidParams { .. }
        | PipelineError::InvalidClique { .. }
        | PipelineError::Gadget { .. }
        | PipelineError::Clique { .. } => EXIT_ERROR,
    }
}

fn print_outcome(label: &str, out: &PipelineOutcome) {
    println!(
        "{label}: driver={} delegated={} feasible={} max_edge_residual={} removed={}",
        out.driver,
        out.delegated,
        out.certificate.feasible,
        format_q(&out.certificate.max_edge_residual),
        out.removed_cliques,
    );
    if let Some(w) = &out.certificate.residual_witness {
        println!("  worst edge: {w:?}");
    }
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    let g = load_instance(&args.input)?;
    let cert: Certificate = serde_json::from_str(&fs::read_to_string(&args.cert)?)?;
    let recomputed = match verify(&g, cert.r, &cert.weighting) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("certificate rejected: {e}");
            return Ok(EXIT_FLAGGED);
        }
    };
    let consistent = recomputed.max_edge_residual == cert.max_edge_residual
        && recomputed.feasible == cert.feasible
        && recomputed.min_weight == cert.min_weight
        && recomputed.max_weight == cert.max_weight;
    if !consistent {
        eprintln!(
            "certificate fields disagree with recomputation: stored residual {}, recomputed {}",
            format_q(&cert.max_edge_residual),
            format_q(&recomputed.max_edge_residual)
        );
        return Ok(EXIT_FLAGGED);
    }
    println!(
        "verified: feasible={} max_edge_residual={}",
        recomputed.feasible,
        format_q(&recomputed.max_edge_residual)
    );
    Ok(if recomputed.feasible {
        EXIT_OK
    } else {
        EXIT_FLAGGED
    })
}

fn cmd_oracle(args: &OracleArgs) -> CmdResult {
    let g = load_instance(&args.input)?;
    let k = args.k.unwrap_or_else(|| g.k());
    match lp_feasible_capped(&g, args.r, k, args.cap) {
        Ok(res) => {
            debug_assert!(res.verify(&g, args.r));
            if let Some(path) = &args.out {
                write_file(path, &serde_json::to_string_pretty(&res)?)?;
            }
            println!(
                "{}: {}",
                instance_label(&args.input),
                if res.feasible { "feasible" } else { "infeasible" }
            );
            Ok(if res.feasible { EXIT_OK } else { EXIT_FLAGGED })
        }
        Err(e @ OracleError::TooLarge { .. }) => {
            eprintln!("{e}");
            Ok(EXIT_ERROR)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_audit(args: &AuditArgs) -> CmdResult {
    let entries: Vec<Manifest> = serde_json::from_str(&fs::read_to_string(&args.manifest)?)?;
    let mut failures: Vec<(String, AuditCheck)> = Vec::new();
    println!("{:<34} {:<30} {:>6} {:>9} {:>11}", "instance", "check", "status", "checked", "violations");
    for entry in &entries {
        let g = generate(&entry.spec)?;
        let label = spec_label(&entry.spec);
        if edge_hash(&g) != entry.edge_hash {
            return Err(format!(
                "manifest hash mismatch for {label}: corpus file is stale"
            )
            .into());
        }
        let checks = crate::audits::audit_all(&g, args.r)?;
        for c in &checks {
            println!(
                "{label:<34} {:<30} {:>6} {:>9} {:>11}",
                c.name,
                c.status(),
                c.checked,
                c.violations
            );
            if c.failed() {
                failures.push((label.clone(), c.clone()));
            }
        }
    }
    if failures.is_empty() {
        println!("all audits pass ({} instances)", entries.len());
        return Ok(EXIT_OK);
    }
    for (label, c) in &failures {
        eprintln!(
            "AUDIT FAILURE {label} {}: {}",
            c.name,
            c.first_witness.as_deref().unwrap_or("no witness recorded")
        );
    }
    Ok(EXIT_FLAGGED)
}

fn cmd_bench(args: &BenchArgs) -> CmdResult {
    let mut rows = String::new();
    for spec_text in &args.specs {
        let spec: GenSpec = serde_json::from_str(spec_text)?;
        let g = generate(&spec)?;
        let label = spec_label(&spec);
        let t = Instant::now();
        let fam = crate::cliques::enumerate_cliques(&g, args.r)?;
        let _ = fam.len();
        let _ = writeln!(rows, "{label},cliques,{}", t.elapsed().as_millis());
        let outcome = if g.k() == 2 {
            decompose_r32(&g, args.r)
        } else {
            decompose_hypergraph(&g, args.r, g.k())
        };
        match outcome {
            Ok(out) => {
                for (stage, ms) in &out.timings {
                    let _ = writeln!(rows, "{label},{stage},{ms}");
                }
            }
            Err(e) => {
                let _ = writeln!(rows, "{label},stopped-{},0", e.stage());
            }
        }
    }
    match &args.csv {
        Some(path) => {
            write_file(path, &format!("{BENCH_CSV_HEADER}{rows}"))?;
            println!("bench rows written to {}", path.display());
        }
        None => print!("{BENCH_CSV_HEADER}{rows}"),
    }
    Ok(EXIT_OK)
}

fn load_instance(path: &Path) -> Result<Hypergraph, Box<dyn std::error::Error>> {
    let text = fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let g = if path.extension().is_some_and(|x| x == "json") {
        Hypergraph::from_json(&text)?
    } else {
        Hypergraph::load(&text)?
    };
    Ok(g)
}

fn instance_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, contents)
}

fn append_csv(path: &Path, header: &str, row: &str) -> std::io::Result<()> {
    let existing = fs::read_to_string(path).unwrap_or_default();
    let mut out = String::new();
    if existing.is_empty() {
        out.push_str(header);
    } else {
        out.push_str(&existing);
    }
    out.push_str(row);
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    fs::write(path, out)
}
