use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use driftless_cli::{artifacts::num, parse_config, CliError, ExperimentConfig, RunOptions, COMPARE_RUNS};

#[derive(Parser, Debug)]
#[command(name = "driftless", version, about = "Run constrained steering experiments from a JSON config")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Simulate the runs listed in the config and write all artifacts
    Run(Common),
    /// Write the feasibility report without simulating
    Feasibility(Common),
    /// Run closed_loop, baseline and baseline_clamped side by side
    Compare(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Path to the experiment config (JSON)
    config: PathBuf,

    /// Output directory, overriding `output_dir`
    #[arg(long)]
    out: Option<PathBuf>,

    /// Execute independent runs concurrently
    #[arg(long)]
    parallel: bool,

    /// Number of checkpoints, overriding `n_checkpoints`
    #[arg(long)]
    checkpoints: Option<usize>,

    /// Integrator substep cap, overriding `h_max`
    #[arg(long)]
    h_max: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<(ExperimentConfig, RunOptions), CliError> {
        let mut cfg = parse_config(&self.config)?;
        if let Some(k) = self.checkpoints {
            cfg.n_checkpoints = k;
        }
        if let Some(h) = self.h_max {
            cfg.h_max = Some(h);
        }
        let opts = RunOptions { out: self.out.clone(), parallel: self.parallel, runs: None };
        Ok((cfg, opts))
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Feasibility(args) => {
            let (cfg, opts) = args.load()?;
            let (_, text) = driftless_cli::run_feasibility(&cfg, &opts)?;
            print!("{text}");
            Ok(driftless_cli::EXIT_OK)
        }
        Command::Run(args) => {
            let (cfg, opts) = args.load()?;
            let exp = driftless_cli::run_experiment(&cfg, &opts)?;
            report(&exp);
            Ok(exp.exit_code())
        }
        Command::Compare(args) => {
            let (cfg, mut opts) = args.load()?;
            opts.runs = Some(COMPARE_RUNS.iter().map(|s| s.to_string()).collect());
            let exp = driftless_cli::run_experiment(&cfg, &opts)?;
            report(&exp);
            Ok(exp.exit_code())
        }
    }
}

fn report(exp: &driftless_cli::Experiment) {
    println!("{:<18} {:>24} {:>24} {:>10}", "run", "final_error", "u_inf_max", "satisfied");
    for (name, result) in &exp.runs {
        match result {
            Ok(r) => println!(
                "{name:<18} {:>24} {:>24} {:>10}",
                num(r.final_error()),
                num(r.u_inf_max),
                r.constraint_satisfied
            ),
            Err(f) => println!("{name:<18} failed: {}", f.error),
        }
    }
    println!("artifacts in {}", exp.out_dir.display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
