use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::Value;

mod arrays;
mod graphs;
mod input;
mod search;

#[derive(Parser)]
#[command(name = "drgkit", version, about = "Exact parameter analysis for distance-regular graphs")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Emit::Text, global = true)]
    emit: Emit,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
pub struct ArrayInput {
    /// Inline JSON `{"b":[..],"c":[..]}`, the text form `{b;c}`, a file
    /// holding either, or `-` for standard input.
    pub array: String,
}

#[derive(Subcommand)]
enum Command {
    /// Basic feasibility and integrality of every multiplicity.
    Check(ArrayInput),
    /// Eigenvalues and multiplicities; with --theta, the standard sequence of one value.
    Spectrum {
        #[command(flatten)]
        input: ArrayInput,
        /// Exact value, `p` or `p/q`.
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<String>,
    },
    /// Delsarte clique profile and the gamma sequence.
    Gamma(ArrayInput),
    /// Inner products of F_j and C_j and the sign of S_j.
    Sjc {
        #[command(flatten)]
        input: ArrayInput,
        /// A single distance; all of 2..=D by default.
        #[arg(long)]
        j: Option<usize>,
    },
    /// Dual polar recognition by both classifiers, with traces.
    Classify {
        #[command(flatten)]
        input: ArrayInput,
        /// Near-polygon hypothesis used by the equality classifier.
        #[arg(long, value_enum, default_value_t = NearPolygon::Adopted)]
        near_polygon: NearPolygon,
    },
    /// Intersection array of a named family.
    Family {
        #[command(subcommand)]
        family: FamilyCommand,
    },
    /// Construct a graph; --verify certifies it and runs the clique and spectral audits.
    Build {
        #[command(flatten)]
        graph: GraphArgs,
        /// Certify distance-regularity and run the audits.
        #[arg(long)]
        verify: bool,
        /// Write the graph instead of a report (to --out, or standard output).
        #[arg(long, value_enum)]
        export: Option<ExportFormat>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strongly closed subgraph generated by two vertices.
    Closure {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 0)]
        x: usize,
        /// Defaults to the first vertex at --distance from x.
        #[arg(long)]
        y: Option<usize>,
        #[arg(long, default_value_t = 2)]
        distance: usize,
    },
    /// Exhaustive search over the c_2 = 3, a_1 = 1, theta_min = -k/2 cases.
    #[command(name = "search-theorem2")]
    Search {
        /// One case `j,D`; all six by default.
        #[arg(long, value_parser = input::parse_case)]
        case: Option<(usize, usize)>,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
        /// With --emit csv, one row per examined candidate instead of the
        /// candidates that reached the spectral conditions.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NearPolygon {
    /// a_i = c_i a_1
    Adopted,
    /// a_i = c_i (a_1 + 1)
    Printed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportFormat {
    Adjacency,
    Edges,
}

#[derive(Subcommand)]
pub enum FamilyCommand {
    /// Dual polar graph with parameters q, e, D.
    DualPolar {
        #[arg(long)]
        q: i64,
        /// One of 0, 1/2, 1, 3/2, 2.
        #[arg(long)]
        e: String,
        #[arg(long)]
        d: usize,
    },
    /// Hermitian dual polar graph 2A_{2D-1}(r).
    #[command(name = "2a")]
    TwoA {
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: usize,
    },
    /// Symplectic / orthogonal dual polar graph B_D(q) = C_D(q).
    B {
        #[arg(long)]
        q: i64,
        #[arg(long)]
        d: usize,
    },
    /// Hamming graph H(D,q).
    Hamming {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        q: i64,
    },
    /// Johnson graph J(n,d).
    Johnson {
        #[arg(long)]
        n: i64,
        #[arg(long)]
        d: usize,
    },
    /// Odd graph O_k.
    Odd {
        #[arg(long)]
        k: i64,
    },
    /// Folded m-cube, m odd.
    FoldedCube {
        #[arg(long)]
        m: i64,
    },
    /// The (2D+1)-gon.
    OddPolygon {
        #[arg(long)]
        d: usize,
    },
    /// {30,28,24;1,3,15}.
    WittM24,
    /// {8,6,1;1,3,8}.
    #[command(name = "sporadic-27")]
    Sporadic27,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GraphFamily {
    Hamming,
    Johnson,
    Odd,
    FoldedCube,
    SymplecticDualPolar,
}

#[derive(Args)]
pub struct GraphArgs {
    #[arg(long, value_enum)]
    pub family: GraphFamily,
    /// Diameter (hamming, johnson, symplectic-dual-polar).
    #[arg(long)]
    pub d: Option<usize>,
    /// Alphabet size (hamming).
    #[arg(long)]
    pub q: Option<usize>,
    /// Ground set size (johnson).
    #[arg(long)]
    pub n: Option<usize>,
    /// Odd graph parameter.
    #[arg(long)]
    pub k: Option<usize>,
    /// Folded cube dimension.
    #[arg(long)]
    pub m: Option<usize>,
}

/// What a verb hands back: both renderings and the exit code.
pub struct Report {
    pub json: Value,
    pub text: String,
    pub csv: Option<Vec<Vec<String>>>,
    pub failed: bool,
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("DRGKIT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .with_context(|| format!("DRGKIT_THREADS={value:?} is not a thread count"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

fn supports_csv(cmd: &Command) -> bool {
    matches!(cmd, Command::Spectrum { .. } | Command::Search { .. })
}

fn run(cli: Cli) -> Result<bool> {
    if cli.emit == Emit::Csv && !supports_csv(&cli.command) {
        bail!("--emit csv is only available for spectrum and search-theorem2");
    }
    configure_threads()?;
    let report = match cli.command {
        Command::Check(input) => arrays::check(&input::read_array(&input.array)?),
        Command::Spectrum { input, theta } => arrays::spectrum(&input::read_array(&input.array)?, theta.as_deref())?,
        Command::Gamma(input) => arrays::gamma(&input::read_array(&input.array)?),
        Command::Sjc { input, j } => arrays::sjc(&input::read_array(&input.array)?, j)?,
        Command::Classify { input, near_polygon } => arrays::classify(&input::read_array(&input.array)?, near_polygon),
        Command::Family { family } => arrays::family(&family)?,
        Command::Build {
            graph,
            verify,
            export,
            out,
        } => match export {
            Some(format) => {
                graphs::export(&graph, format, out.as_deref())?;
                return Ok(true);
            }
            None => graphs::build(&graph, verify)?,
        },
        Command::Closure { graph, x, y, distance } => graphs::closure(&graph, x, y, distance)?,
        Command::Search { case, mode, all } => {
            if all {
                if cli.emit != Emit::Csv {
                    bail!("--all needs --emit csv");
                }
                return search::stream_all(case, mode);
            }
            search::search(case, mode)?
        }
    };
    emit(&report, cli.emit)?;
    Ok(!report.failed)
}

fn emit(report: &Report, format: Emit) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Emit::Text => writeln!(out, "{}", report.text.trim_end())?,
        Emit::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report.json)?)?,
        Emit::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in report.csv.as_deref().unwrap_or_default() {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<io::Error>().is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(|ce| {
                matches!(ce.kind(), csv::ErrorKind::Io(io) if io.kind() == io::ErrorKind::BrokenPipe)
            })
    })
}
