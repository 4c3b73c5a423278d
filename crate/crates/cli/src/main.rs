mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hspec_core::builders::MatrixKind;

/// Symmetry-driven spectral decomposition of hypergraph matrices.
///
/// Every command writes one JSON document to stdout (or `--out`). Exit status
/// is 0 when every check the command performs passes, 1 when a check fails,
/// and 2 when the inputs cannot be used at all.
#[derive(Debug, Parser)]
#[command(name = "hspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the units of a hypergraph and its unit contraction.
    Units { hypergraph: PathBuf },
    /// Build a vertex-indexed matrix and report its row sums.
    Matrix {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Fail when the row-sum identity of the kind does not hold.
        #[arg(long)]
        check_row_sums: bool,
    },
    /// Validate an automorphism or unit map, optionally against a matrix kind.
    ValidateSymmetry {
        hypergraph: PathBuf,
        symmetry: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Automorphism)]
        mode: Mode,
        /// Also check that this matrix kind is compatible with the symmetry.
        #[arg(long)]
        kind: Option<MatrixKind>,
        #[arg(long)]
        weights: Option<PathBuf>,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Split the spectrum into blocks, lift eigenvectors, verify against a dense solve.
    Decompose {
        #[command(flatten)]
        job: SymmetryJob,
    },
    /// Like `decompose`, but emit only the verification verdict.
    Verify {
        #[command(flatten)]
        job: SymmetryJob,
    },
    /// Iterate x_{k+1} = M x_k and track synchronization on the orbits of f.
    Dynamics {
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Automorphism document; its orbits are the clusters.
        symmetry: PathBuf,
        /// Initial state document, `{"x0": {label: value}}`.
        x0: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// Divide each iterate by its sup norm.
        #[arg(long)]
        normalize: bool,
        /// Relative synchronization tolerance, scaled by the growth bound.
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Run the randomized property checks on seeded instances.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        instances: usize,
        #[arg(long, default_value_t = 14)]
        max_vertices: usize,
        #[arg(long, default_value_t = hspec_core::oracle::DEFAULT_VERIFY_TOL)]
        tol: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Automorphism,
    Unit,
}

#[derive(Debug, Args)]
pub struct MatrixArgs {
    pub hypergraph: PathBuf,
    #[arg(long)]
    pub kind: MatrixKind,
    /// Weight document for the general_* kinds.
    #[arg(long)]
    pub weights: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TolArgs {
    /// Absolute tolerance for the compatibility identity m_uv = m_f(u)f(v).
    #[arg(long, default_value_t = hspec_core::symmetry::DEFAULT_COMPAT_TOL)]
    pub compat_tol: f64,
}

#[derive(Debug, Args)]
pub struct SymmetryJob {
    #[command(flatten)]
    pub matrix: MatrixArgs,
    pub symmetry: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Automorphism)]
    pub mode: Mode,
    /// Verification tolerance, relative to max(1, ||M||_inf).
    #[arg(long, default_value_t = hspec_core::oracle::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
    #[command(flatten)]
    pub compat: TolArgs,
}

/// A rendered document and whether the command's checks passed.
pub struct Outcome {
    pub document: String,
    pub passed: bool,
}

fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        bail!("{name} must be positive and finite, got {value}");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Units { hypergraph } => commands::units(&hypergraph),
        Command::Matrix { matrix, check_row_sums } => commands::matrix(&matrix, check_row_sums),
        Command::ValidateSymmetry {
            hypergraph,
            symmetry,
            mode,
            kind,
            weights,
            tol,
        } => {
            check_positive("--compat-tol", tol.compat_tol)?;
            commands::validate_symmetry(&hypergraph, &symmetry, mode, kind, weights.as_deref(), tol.compat_tol)
        }
        Command::Decompose { job } => {
            check_positive("--tol", job.tol)?;
            check_positive("--compat-tol", job.compat.compat_tol)?;
            commands::decompose(&job, false)
        }
        Command::Verify { job } => {
            check_positive("--tol", job.tol)?;
            check_positive("--compat-tol", job.compat.compat_tol)?;
            commands::decompose(&job, true)
        }
        Command::Dynamics {
            matrix,
            symmetry,
            x0,
            steps,
            normalize,
            tol,
        } => {
            check_positive("--tol", tol)?;
            commands::dynamics(&matrix, &symmetry, &x0, steps, normalize, tol)
        }
        Command::Selftest {
            seed,
            instances,
            max_vertices,
            tol,
        } => {
            check_positive("--tol", tol)?;
            if max_vertices < 2 {
                bail!("--max-vertices must be at least 2");
            }
            Ok(commands::selftest(seed, instances, max_vertices, tol))
        }
    }
}

/// Caps rayon's pool at `HSPEC_THREADS` when set.
fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var("HSPEC_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("HSPEC_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the thread pool")?;
    Ok(())
}

/// Joins the error chain with `: `, skipping causes whose text the previous
/// message already ends with (library errors often embed their source).
fn render_chain(e: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if msg.ends_with(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    let result = configure_threads().and_then(|()| run(cli)).and_then(|outcome| {
        match &out {
            Some(path) => {
                std::fs::write(path, &outcome.document).with_context(|| format!("writing {}", path.display()))?
            }
            None => print!("{}", outcome.document),
        }
        Ok(outcome.passed)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {}", render_chain(&e));
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn argument_definitions_are_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn kinds_parse_from_their_names() {
        let cli = Cli::try_parse_from(["hspec", "matrix", "h.json", "--kind", "unit_normalized"]).unwrap();
        match cli.command {
            Command::Matrix { matrix, .. } => assert_eq!(matrix.kind, MatrixKind::UnitNormalized),
            other => panic!("parsed as {other:?}"),
        }
        assert!(Cli::try_parse_from(["hspec", "matrix", "h.json", "--kind", "adjacency"]).is_err());
    }

    #[test]
    fn chain_skips_embedded_sources() {
        let inner = anyhow::anyhow!("expected `,` at line 4");
        let e = inner
            .context("malformed document: expected `,` at line 4")
            .context("g.json");
        assert_eq!(render_chain(&e), "g.json: malformed document: expected `,` at line 4");
    }
}
