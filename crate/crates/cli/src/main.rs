//! `dualflow run` estimates the flow of one frame pair; `dualflow bench`
//! runs a sequence-by-algorithm matrix and prints an AAE|EPE|seconds table.

mod bench;
mod exit;
mod overrides;
mod run;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "dualflow", version, about = "TV-L1 optical flow by dual and primal-dual splitting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Estimate the flow between two frames
    Run(run::RunArgs),
    /// Run a benchmark matrix over dataset sequences
    Bench(bench::BenchArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run::cmd_run(&args) {
            Ok(m) => {
                let mut line = format!("{} {}x{} {:.3} s", m.algorithm, m.width, m.height, m.runtime_seconds);
                if let (Some(aae), Some(epe)) = (m.aae_deg, m.epe_px) {
                    line += &format!(" AAE {aae:.3} EPE {epe:.3}");
                }
                println!("{line}");
                ExitCode::SUCCESS
            }
            Err(e) => exit::report(&e),
        },
        Command::Bench(args) => match bench::cmd_bench(&args) {
            Ok(report) => match &args.output {
                Some(path) => match std::fs::write(path, &report) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => exit::report(&e.into()),
                },
                None => {
                    print!("{report}");
                    ExitCode::SUCCESS
                }
            },
            Err(e) => exit::report(&e),
        },
    }
}
