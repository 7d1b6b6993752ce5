use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stripelab_cli::config::{
    CalibrateParams, Command, DiagramParams, OracleParams, PlaneKind, ScanModel, ScanParams,
};
use stripelab_cli::run::{execute, output_dir, CliError};
use stripelab_cli::{parse_config, ConfigError, RunConfig};

/// Leading-order stripe stability near a Turing instability.
///
/// The output directory is taken from the configuration and can be
/// overridden with the STRIPELAB_OUT environment variable. Exit codes:
/// 0 success, 1 I/O error, 2 configuration error, 3 numerical failure.
#[derive(Parser, Debug)]
#[command(name = "stripelab", version)]
struct Cli {
    /// Configuration file (JSON with comments).
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Run the command stored in the configuration file.
    Run,
    /// Check the Turing conditions.
    Verify,
    /// Linear rates and nonlinear coefficients.
    Coeffs,
    /// Classify a parameter plane and draw it.
    Diagram(DiagramArgs),
    /// Compare oracle spectra with the closed-form lattice blocks.
    Oracle(OracleArgs),
    /// Select the triad-coefficient convention by convergence order.
    Calibrate(CalibrateArgs),
    /// Numerical stability scan of a model over (κ, a).
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
struct DiagramArgs {
    #[arg(long, value_enum)]
    plane: Option<PlaneKind>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    q: Option<f64>,
    #[arg(long)]
    theta: Option<f64>,
}

#[derive(Args, Debug)]
struct OracleArgs {
    #[arg(long)]
    scenario: Option<String>,
    /// Decreasing list of ε, space- or comma-separated.
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct CalibrateArgs {
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    eps_list: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[arg(long, value_enum)]
    model: Option<ScanModel>,
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
}

fn load(path: &Option<PathBuf>) -> Result<Option<RunConfig>, CliError> {
    let Some(path) = path else { return Ok(None) };
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
    Ok(Some(parse_config(&text)?))
}

/// Merge the file configuration with the subcommand and its flags. The file's
/// command parameters are reused when it names the same command.
fn resolve(file: Option<RunConfig>, sub: Sub) -> Result<RunConfig, CliError> {
    let prior = file.as_ref().map(|f| f.command.clone());
    let command = match sub {
        Sub::Run => {
            return file.ok_or_else(|| {
                ConfigError::Range { field: "--config".into(), message: "`run` needs a configuration file".into() }
                    .into()
            })
        }
        Sub::Verify => Command::Verify,
        Sub::Coeffs => Command::Coeffs,
        Sub::Diagram(a) => {
            let mut p = match (prior, a.plane) {
                (Some(Command::Diagram(p)), None) => p,
                (Some(Command::Diagram(p)), Some(plane)) if p.plane == plane => p,
                (_, plane) => DiagramParams::default_for(plane.unwrap_or(PlaneKind::KappaAlpha)),
            };
            p.beta = a.beta.unwrap_or(p.beta);
            p.kappa = a.kappa.unwrap_or(p.kappa);
            p.q = a.q.or(p.q);
            p.theta = a.theta.unwrap_or(p.theta);
            Command::Diagram(p)
        }
        Sub::Oracle(a) => {
            let mut p = match prior {
                Some(Command::Oracle(p)) => p,
                _ => OracleParams {
                    scenario: "hex".into(),
                    eps_list: vec![0.05, 0.025, 0.0125],
                    n: 32,
                    n_lat: 8,
                },
            };
            if let Some(s) = a.scenario {
                p.scenario = s;
            }
            if let Some(e) = a.eps_list {
                p.eps_list = e;
            }
            Command::Oracle(p)
        }
        Sub::Calibrate(a) => {
            let mut p = match prior {
                Some(Command::Calibrate(p)) => p,
                _ => CalibrateParams::default(),
            };
            if let Some(e) = a.eps_list {
                p.eps_list = e;
            }
            Command::Calibrate(p)
        }
        Sub::Scan(a) => {
            let mut p = match prior {
                Some(Command::Scan(p)) => p,
                _ => ScanParams::default_for(0.0),
            };
            p.beta = a.beta.unwrap_or(p.beta);
            p.model = a.model.unwrap_or(p.model);
            Command::Scan(p)
        }
    };
    let cfg = match file {
        Some(f) => RunConfig { command, ..f },
        None => RunConfig::for_command(command),
    };
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = load(&cli.config).and_then(|file| resolve(file, cli.command)).and_then(|cfg| {
        let dir = output_dir(&cfg);
        execute(&cfg, &dir)
    });
    match result {
        Ok(report) => {
            for l in &report.lines {
                println!("{l}");
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("stripelab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
