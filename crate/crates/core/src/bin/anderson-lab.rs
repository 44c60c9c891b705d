use std::path::PathBuf;
use std::process::ExitCode;

use anderson_lab::harness::{self, ExperimentConfig};
use anderson_lab::msa::ParamMode;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "anderson-lab", version, about = "Monte Carlo experiments for the multi-particle Anderson model")]
struct Cli {
    /// Worker threads; overrides the config.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Refuse scale parameters that violate any admissibility constraint.
    #[arg(long, global = true)]
    strict_params: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment described by a JSON config.
    Run { config: PathBuf },
    /// Summarize result files, refit slopes and emit plot data.
    Report {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config } => ExperimentConfig::load(&config).and_then(|mut cfg| {
            if cli.workers.is_some() {
                cfg.workers = cli.workers;
            }
            if cli.strict_params {
                cfg.param_mode = ParamMode::Strict;
            }
            let r = harness::run(&cfg)?;
            println!("{} -> {}", r.kind, cfg.output.display());
            println!("content_id {}", r.content_id);
            for (k, v) in &r.summary {
                println!("  {k} = {v}");
            }
            println!("  wall_time_s = {:.3}", r.wall_time_s);
            Ok(true)
        }),
        Command::Report { files, out } => harness::report(&files, out.as_deref()).map(|rep| {
            print!("{}", rep.table());
            rep.all_passed()
        }),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
