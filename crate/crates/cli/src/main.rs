use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zn_riemann::symkernel::ZeroTest;
use zn_riemann::{Error, Result};
use zn_riemann_cli::{error_json, run_command, Command, ManifoldSpec, Options};

/// Riemannian geometry of graded charts.
#[derive(Parser)]
#[command(name = "zn-riemann", version)]
struct Cli {
    /// Chart file.
    #[arg(long, global = true)]
    spec: Option<PathBuf>,
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Override the truncation order of the chart.
    #[arg(long, global = true)]
    trunc: Option<u32>,
    /// Seed of the numeric zero test.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance of the numeric zero test.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Homogeneity, symmetry, non-degeneracy and dimension constraints.
    Validate,
    /// Inverse metric and its graded symmetry.
    Inverse,
    /// Christoffel symbols of the Levi-Civita connection.
    Christoffel,
    /// Riemann curvature components.
    Riemann,
    /// Ricci tensor.
    Ricci,
    /// Ricci scalar.
    Scalar,
    /// Connection Laplacian of a function (declared name or expression).
    Laplacian { f: String },
    /// Gradient of a function.
    Gradient { f: String },
    /// Divergence of a vector field (declared name or d/d<coordinate>).
    Divergence { x: String },
    /// Lie derivative of the metric along a vector field.
    Lie { x: String },
    /// Killing equation for a vector field.
    Killing { x: String },
    /// Curvature symmetries and both Bianchi identities.
    Bianchi,
    /// Torsion, metric compatibility and the Koszul formula.
    Compat,
    /// Einstein condition `Ric = kappa g`.
    Einstein { kappa: String },
    /// Cartesian product with a second chart file.
    Product {
        #[arg(long)]
        with: PathBuf,
    },
    /// Warped product with a second chart file.
    Warp {
        mu: String,
        #[arg(long)]
        with: PathBuf,
    },
    /// Full verification suite.
    Report,
}

fn load(path: &PathBuf) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec(format!("cannot read {}: {e}", path.display())))?;
    ManifoldSpec::parse(&text).map_err(|e| match e {
        Error::Syntax {
            line,
            column,
            message,
        } => Error::Syntax {
            line,
            column,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

fn run(cli: &Cli) -> Result<zn_riemann_cli::Outcome> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| Error::Spec("--spec <file> is required".into()))?;
    let spec = load(path)?;
    let command = match &cli.command {
        Cmd::Validate => Command::Validate,
        Cmd::Inverse => Command::Inverse,
        Cmd::Christoffel => Command::Christoffel,
        Cmd::Riemann => Command::Riemann,
        Cmd::Ricci => Command::Ricci,
        Cmd::Scalar => Command::Scalar,
        Cmd::Laplacian { f } => Command::Laplacian(f.clone()),
        Cmd::Gradient { f } => Command::Gradient(f.clone()),
        Cmd::Divergence { x } => Command::Divergence(x.clone()),
        Cmd::Lie { x } => Command::Lie(x.clone()),
        Cmd::Killing { x } => Command::Killing(x.clone()),
        Cmd::Bianchi => Command::Bianchi,
        Cmd::Compat => Command::Compat,
        Cmd::Einstein { kappa } => Command::Einstein(kappa.clone()),
        Cmd::Product { with } => Command::Product(load(with)?),
        Cmd::Warp { mu, with } => Command::Warp(mu.clone(), load(with)?),
        Cmd::Report => Command::Report,
    };
    let test = ZeroTest {
        tolerance: cli.tolerance,
        ..ZeroTest::with_seed(cli.seed)
    };
    run_command(
        &spec,
        &command,
        &Options {
            trunc: cli.trunc,
            test,
        },
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("JSON output")
                );
            } else {
                print!("{}", outcome.text);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                eprintln!("{}", error_json(&e));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(match e {
                Error::Syntax { .. } | Error::Spec(_) | Error::UnknownCoordinate(_) => 2,
                _ => 3,
            })
        }
    }
}
