use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use logse_lab::{Command, ExperimentConfig};

/// Linearly implicit BDF schemes for the logarithmic Schrödinger equation.
#[derive(Parser)]
#[command(name = "logse-lab", version)]
struct Cli {
    command: Command,
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved config and exit.
    #[arg(long)]
    echo: bool,
    /// `--key value` overrides, e.g. `--scheme.name bdf2 --grid.h 1/64`.
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    overrides: Vec<String>,
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("LOGSE_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("LOGSE_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    let cfg = match ExperimentConfig::from_args(cli.command, cli.config.as_deref(), &cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if cli.echo {
        let _ = write!(std::io::stdout(), "{}", cfg.echo());
        return ExitCode::SUCCESS;
    }
    match logse_lab::run(&cfg) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{}", outcome.summary);
            for f in &outcome.files {
                let _ = writeln!(out, "wrote {}", f.display());
            }
            if !outcome.accepted {
                eprintln!("acceptance window not met");
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
