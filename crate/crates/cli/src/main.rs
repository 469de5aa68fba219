mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "steklov-lab", version, about = "Steklov eigenvalues of surfaces with attached strips")]
pub struct Cli {
    /// key = value file; command-line flags take precedence over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Directory for report files (also STEKLOV_LAB_OUT).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the report as JSON on stdout.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for grid computations.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BaseArgs {
    /// Base mesh file; the unit disk is used when absent.
    #[arg(long)]
    pub base: Option<PathBuf>,
    #[arg(long)]
    pub n_radial: Option<usize>,
    #[arg(long)]
    pub n_angular: Option<usize>,
    /// Rectangle subdivisions across its width.
    #[arg(long)]
    pub nx: Option<usize>,
    /// Rectangle subdivisions along its length.
    #[arg(long)]
    pub ny: Option<usize>,
    /// Glue with reversed orientation.
    #[arg(long)]
    pub reverse: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build a disk, annulus or rectangle mesh.
    Mesh {
        #[arg(long)]
        kind: Option<commands::MeshKind>,
        #[arg(long)]
        n_radial: Option<usize>,
        #[arg(long)]
        n_angular: Option<usize>,
        #[arg(long)]
        r_inner: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        nx: Option<usize>,
        #[arg(long)]
        ny: Option<usize>,
        /// Output mesh file (default: mesh.msh in the output directory).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Steklov spectrum of a mesh file.
    Spectrum {
        #[arg(long)]
        mesh: Option<PathBuf>,
        #[arg(long)]
        count: Option<usize>,
        /// Boundary label with a Dirichlet condition (repeatable).
        #[arg(long)]
        dirichlet: Vec<String>,
        /// Boundary label with a Neumann condition (repeatable).
        #[arg(long)]
        neumann: Vec<String>,
    },
    /// Closed-form spectrum of the strip with a condition on its short sides.
    RectAnalytic {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        condition: Option<commands::CondArg>,
        #[arg(long)]
        count: Option<usize>,
    },
    /// Attach the strip to the base and write the glued mesh.
    Glue {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[command(flatten)]
        base: BaseArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Glued spectra along decreasing epsilon against the limit spectrum.
    ConvergeEps {
        #[arg(long)]
        h: Option<f64>,
        /// Comma-separated, strictly decreasing.
        #[arg(long)]
        eps_list: Option<String>,
        /// Highest eigenvalue index compared.
        #[arg(long)]
        j: Option<usize>,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Glued spectra on a uniform grid of h.
    SweepH {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        h1: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Locate the h where sigma_1 becomes double.
    FindMultiplicity {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h0: Option<f64>,
        #[arg(long)]
        h1: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol_gap: Option<f64>,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Compare sigma_1 with the Neumann and Dirichlet bounds.
    CheckLemmas {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        h: Option<f64>,
        #[arg(long)]
        tol_gap: Option<f64>,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Test the gain of sigma_1 times boundary length after attachment.
    VerifyMonotonicity {
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        tol_gap: Option<f64>,
        #[command(flatten)]
        base: BaseArgs,
    },
    /// Topological type after attaching a band.
    Topology {
        #[arg(long, conflicts_with = "non_orientable")]
        orientable: bool,
        #[arg(long)]
        non_orientable: bool,
        #[arg(long)]
        genus: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, conflicts_with = "different_components")]
        same_component: bool,
        #[arg(long)]
        different_components: bool,
        #[arg(long, conflicts_with = "reverse")]
        preserve: bool,
        #[arg(long)]
        reverse: bool,
    },
}

fn fail(kind: &str, message: &str, code: u8) -> ExitCode {
    eprintln!("{}", serde_json::json!({ "error": kind, "message": message }));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim(), 2),
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e.kind(), &e.to_string(), if e.is_numerical() { 1 } else { 2 }),
    }
}

