use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hydro_tasks::bench::{emit_report, render_table, run_benchmark, run_once, RunConfig};
use hydro_tasks::validate::run_suite;
use hydro_tasks::Error;

#[derive(Parser)]
#[command(name = "hydro-tasks", version, about = "2D Euler solver with interchangeable parallel strategies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration and print its checksum.
    Run(ConfigArgs),
    /// Time a worker sweep and write the CSV report.
    Bench(ConfigArgs),
    /// Run the oracle suite.
    Validate,
}

/// Flags override the config file key of the same name.
#[derive(Args)]
struct ConfigArgs {
    /// Flat `key = value` file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// blast, sod or uniform.
    #[arg(long)]
    case: Option<String>,
    #[arg(long)]
    nx: Option<String>,
    #[arg(long)]
    ny: Option<String>,
    #[arg(long)]
    steps: Option<String>,
    /// sequential, fine_grain, coarse_grain or task_graph.
    #[arg(long)]
    strategy: Option<String>,
    /// Comma-separated worker counts.
    #[arg(long)]
    workers: Option<String>,
    #[arg(long)]
    p_rows: Option<String>,
    #[arg(long)]
    p_cols: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    cfl: Option<String>,
    /// Task ready-queue order: fifo, lifo or random.
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// CSV report path (bench) or checksum file (run).
    #[arg(long)]
    output: Option<String>,
    /// Seconds a coarse-grain worker waits on a neighbor before failing.
    #[arg(long)]
    spin_timeout: Option<String>,
}

impl ConfigArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let mut config = RunConfig::default();
        if let Some(path) = &self.config {
            config.apply_file(path)?;
        }
        let flags = [
            ("case", &self.case),
            ("nx", &self.nx),
            ("ny", &self.ny),
            ("steps", &self.steps),
            ("strategy", &self.strategy),
            ("workers", &self.workers),
            ("p_rows", &self.p_rows),
            ("p_cols", &self.p_cols),
            ("gamma", &self.gamma),
            ("cfl", &self.cfl),
            ("policy", &self.policy),
            ("seed", &self.seed),
            ("output", &self.output),
            ("spin_timeout", &self.spin_timeout),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        config.validate()?;
        Ok(config)
    }
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run(args) => {
            let config = args.resolve()?;
            let outcome = run_once(&config)?;
            println!("strategy: {}", outcome.strategy);
            println!("time_s: {:.2}", outcome.elapsed.as_secs_f64());
            println!("checksum: {}", outcome.checksum);
            if let Some(path) = &config.output {
                std::fs::write(path, format!("{}\n", outcome.checksum))?;
            }
        }
        Command::Bench(args) => {
            let config = args.resolve()?;
            let records = run_benchmark(&config)?;
            print!("{}", render_table(&records));
            if let Some(first) = records.first() {
                println!("checksum: {}", first.checksum);
            }
            match &config.output {
                Some(path) => emit_report(&records, path)?,
                None => hydro_tasks::bench::write_report(&records, std::io::stdout().lock())?,
            }
        }
        Command::Validate => {
            let results = run_suite()?;
            for r in &results {
                println!("{r}");
            }
            let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
            if !failed.is_empty() {
                return Err(Error::Validation(format!("failed checks: {}", failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::FAILURE
        }
    }
}
