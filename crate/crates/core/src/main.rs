use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nlmem::cli::{self, CliError, ScenarioConfig};

#[derive(Parser)]
#[command(name = "nlmem", version, about = "Two-qubit dephasing in a correlated bosonic field")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the covariance, windows and bath of a scenario.
    Validate(Scenario),
    /// Write the coherence-factor trajectory as CSV.
    Evolve(Scenario),
    /// Print the non-Markovianity summary for a scenario.
    Measure(Scenario),
    /// Write the built-in squeezing sweep (one CSV per r plus a summary).
    Fig1 {
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = cli::DEFAULT_GRID_POINTS)]
        grid: usize,
    },
}

#[derive(Args)]
struct Scenario {
    /// Flat key = value config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha1: Option<f64>,
    /// Length of two back-to-back interaction windows.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    /// closed_form, quadrature or discrete:N
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Scenario {
    fn resolve(&self) -> Result<ScenarioConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(r) = self.r {
            cfg.r = r;
        }
        if let Some(a) = self.alpha1 {
            cfg.alpha1 = a;
        }
        if let Some(dt) = self.dt {
            cfg.set_sequential_windows(dt);
        }
        if let Some(n) = self.grid {
            cfg.grid_points = n;
        }
        if let Some(e) = &self.engine {
            cfg.set("engine", e).map_err(|m| CliError::Parse(format!("--engine: {m}")))?;
        }
        if let Some(out) = &self.out {
            cfg.out_path = Some(out.clone());
        }
        Ok(cfg)
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate(s) => {
            let outcome = cli::cmd_validate(&s.resolve()?)?;
            print!("{}", outcome.report);
            if !outcome.passes {
                return Err(CliError::Physics("scenario failed validation".into()));
            }
        }
        Command::Evolve(s) => {
            let cfg = s.resolve()?;
            cli::emit(&cli::cmd_evolve(&cfg)?, cfg.out_path.as_deref())?;
        }
        Command::Measure(s) => {
            let cfg = s.resolve()?;
            let start = std::time::Instant::now();
            let summary = cli::cmd_measure(&cfg)?;
            cli::emit(&summary.text, cfg.out_path.as_deref())?;
            if !summary.converged {
                eprintln!("warning: optimizer did not converge within its budget");
            }
            eprintln!("wall_time_s={:.3}", start.elapsed().as_secs_f64());
        }
        Command::Fig1 { out, grid } => {
            for path in cli::cmd_fig1(&out, grid)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(1);
        }
    };
    match run(parsed.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
