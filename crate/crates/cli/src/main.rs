use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lkpz_cli::kernel::{kernel_values, write_kernel_csv};
use lkpz_cli::{execute, parse_config, CliError, CliResult, ExperimentConfig, Preset};
use lkpz_core::PeriodicGrid;

#[derive(Parser)]
#[command(name = "lkpz", version, about = "Spectral solver for u_t = -Lu + lambda |grad u|^q")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the preset named in a config file.
    Run { config: PathBuf },
    /// Run a config across its [sweep] q list.
    Sweep { config: PathBuf },
    /// Print p_alpha(x, t) at the requested points.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        /// `N,n,Lbox`
        #[arg(long, value_parser = parse_grid)]
        grid: PeriodicGrid,
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0, 4.0])]
        at: Vec<f64>,
    },
    /// Parse and check a config file without running it.
    Validate { config: PathBuf },
}

fn parse_grid(s: &str) -> Result<PeriodicGrid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [dim, n, l] = parts.as_slice() else {
        return Err(format!("expected N,n,Lbox, got {s:?}"));
    };
    let dim = dim.parse::<usize>().map_err(|e| format!("N: {e}"))?;
    let n = n.parse::<usize>().map_err(|e| format!("n: {e}"))?;
    let l = l.parse::<f64>().map_err(|e| format!("Lbox: {e}"))?;
    PeriodicGrid::new(dim, n, l).map_err(|e| e.to_string())
}

fn load(path: &Path) -> CliResult<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_config(&text)?)
}

fn run(config: &ExperimentConfig) -> CliResult<i32> {
    let execution = execute(config)?;
    print!("{}", execution.report);
    println!("artifacts in {}", execution.output.display());
    Ok(execution.exit_code())
}

fn dispatch(command: Command) -> CliResult<i32> {
    match command {
        Command::Run { config } => run(&load(&config)?),
        Command::Sweep { config } => {
            let mut c = load(&config)?;
            if c.sweep_q.is_empty() {
                return Err(CliError::Setup(format!(
                    "{} has no [sweep] q list",
                    config.display()
                )));
            }
            c.preset = Preset::SweepQ;
            run(&c)
        }
        Command::Kernel { alpha, t, grid, at } => {
            let values = kernel_values(alpha, t, grid, &at)?;
            write_kernel_csv(std::io::stdout().lock(), &values).map_err(|source| CliError::Write {
                path: "<stdout>".into(),
                source,
            })?;
            Ok(0)
        }
        Command::Validate { config } => {
            let c = load(&config)?;
            println!("{}: valid {} config", config.display(), c.preset);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
