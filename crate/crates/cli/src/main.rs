use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use nmcoh_cli::{execute, Invocation, Mode};

/// Non-Markovian coherence dynamics of a displaced squeezed thermal mode.
#[derive(Debug, Parser)]
#[command(name = "nmcoh", version)]
struct Args {
    /// What to run.
    #[arg(value_enum)]
    mode: Mode,
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Named parameter set fig1..fig15 underneath the config file.
    #[arg(long)]
    preset: Option<String>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation { mode: args.mode, config: args.config, out: args.out, preset: args.preset, threads: args.threads };
    match execute(&inv) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nmcoh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
