//! Command-line front end. All real work happens in `zrp_core::cli`; this
//! file only parses arguments, shuttles bytes, and maps outcomes onto the
//! exit-code contract (0 ok, 1 usage, 2 model error, 3 validation failure).

use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zrp_core::cli::{
    cmd_baseline_delta, cmd_baseline_wigner, cmd_fit, cmd_poles, cmd_sweep, cmd_validate,
    parse_config, CliError, EpsGrid, ModelConfig, SweepGrid,
};

#[derive(Parser)]
#[command(
    name = "zrp",
    version,
    about = "Resonance scattering for a zero-range potential with inner structure"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and report observables, reduced and extension parameters
    Fit {
        /// Model config file (JSON); '-' reads stdin
        #[arg(long)]
        config: String,
        #[arg(long)]
        k0: Option<f64>,
        #[arg(long)]
        energy_scale: Option<f64>,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (json)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Evaluate phase shift, S-matrix and cross section over a k grid
    Sweep {
        /// Model config file (JSON); '-' reads stdin
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = 0.0)]
        kmin: f64,
        #[arg(long)]
        kmax: f64,
        #[arg(long, default_value_t = 200)]
        num: usize,
        #[arg(long)]
        k0: Option<f64>,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (json|csv)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Locate and classify S-matrix poles and zeros
    Poles {
        /// Model config file (JSON); '-' reads stdin
        #[arg(long)]
        config: String,
        #[arg(long)]
        k0: Option<f64>,
        /// Energy unit in E = scale * k^2
        #[arg(long)]
        energy_scale: Option<f64>,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (json)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Run the internal consistency battery on a model
    Validate {
        /// Model config file (JSON); '-' reads stdin
        #[arg(long)]
        config: String,
        #[arg(long, default_value_t = 0.0)]
        kmin: f64,
        /// Scan grid upper end; defaults to 2 max k_s + 3
        #[arg(long)]
        kmax: Option<f64>,
        #[arg(long, default_value_t = 201)]
        num: usize,
        #[arg(long)]
        k0: Option<f64>,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (json)
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Textbook comparison curves
    Baseline {
        /// Structureless cross section 4 pi a^2 / (1 + a^2 k^2) over a k grid
        #[arg(long)]
        wigner: bool,
        /// Delta-shell squeezing sequence at zero energy
        #[arg(long)]
        delta: bool,
        /// Delta branch: attractive well (requires a < 0)
        #[arg(long)]
        attractive: bool,
        /// Delta branch: repulsive barrier (requires a > 0)
        #[arg(long)]
        repulsive: bool,
        /// Scattering length
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Shell radius parameter (delta only)
        #[arg(long, allow_negative_numbers = true)]
        r0: Option<f64>,
        /// Log grid of squeezing parameters, MIN:MAX:NUM (delta only)
        #[arg(long, default_value = "1e-6:1e-1:10001")]
        eps_grid: String,
        #[arg(long, default_value_t = 0.0)]
        kmin: f64,
        #[arg(long, default_value_t = 5.0)]
        kmax: f64,
        #[arg(long, default_value_t = 101)]
        num: usize,
        /// Output file; stdout when omitted
        #[arg(long)]
        out: Option<PathBuf>,
        /// Output format (json|csv)
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn read_config_text(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config '{path}': {e}")))
    }
}

fn load_config(
    path: &str,
    k0: Option<f64>,
    energy_scale: Option<f64>,
) -> Result<ModelConfig, CliError> {
    let mut cfg = parse_config(&read_config_text(path)?)?;
    cfg.apply_overrides(k0, energy_scale);
    Ok(cfg)
}

fn write_output(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Io(format!("cannot write '{}': {e}", path.display()))),
        None => {
            print!("{text}");
            io::stdout().flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Fit { config, k0, energy_scale, out, format } => {
            let cfg = load_config(&config, k0, energy_scale)?;
            let text = cmd_fit(&cfg, format.parse()?)?;
            write_output(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Sweep { config, kmin, kmax, num, k0, out, format } => {
            let cfg = load_config(&config, k0, None)?;
            let grid = SweepGrid::new(kmin, kmax, num)?;
            let text = cmd_sweep(&cfg, &grid, format.parse()?)?;
            write_output(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Poles { config, k0, energy_scale, out, format } => {
            let cfg = load_config(&config, k0, energy_scale)?;
            let text = cmd_poles(&cfg, format.parse()?)?;
            write_output(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Validate { config, kmin, kmax, num, k0, out, format } => {
            let cfg = load_config(&config, k0, None)?;
            let grid = kmax.map(|km| SweepGrid::new(kmin, km, num)).transpose()?;
            let outcome = cmd_validate(&cfg, grid, format.parse()?)?;
            write_output(&outcome.rendered, out.as_deref())?;
            if outcome.passed {
                Ok(0)
            } else {
                eprintln!("validation failed");
                Ok(CliError::Validation(String::new()).exit_code() as u8)
            }
        }
        Command::Baseline {
            wigner,
            delta,
            attractive,
            repulsive,
            a,
            r0,
            eps_grid,
            kmin,
            kmax,
            num,
            out,
            format,
        } => {
            let text = match (wigner, delta) {
                (true, false) => {
                    if attractive || repulsive {
                        return Err(CliError::Config(
                            "--attractive/--repulsive apply to --delta only".into(),
                        ));
                    }
                    let grid = SweepGrid::new(kmin, kmax, num)?;
                    cmd_baseline_wigner(a, &grid, format.parse()?)?
                }
                (false, true) => {
                    if attractive == repulsive {
                        return Err(CliError::Config(
                            "--delta needs exactly one of --attractive / --repulsive".into(),
                        ));
                    }
                    let r0 = r0
                        .ok_or_else(|| CliError::Config("--delta requires --r0".into()))?;
                    let eps: EpsGrid = eps_grid.parse()?;
                    cmd_baseline_delta(a, r0, attractive, &eps, format.parse()?)?
                }
                _ => {
                    return Err(CliError::Config(
                        "baseline needs exactly one of --wigner / --delta".into(),
                    ))
                }
            };
            write_output(&text, out.as_deref())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
