use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spinlab::cli::{describe, run, EXIT_INPUT_ERROR, SUBCOMMANDS};

/// Exact numerics for finite quantum spin systems.
#[derive(Parser)]
#[command(name = "spinlab", version)]
struct Args {
    /// One of: spectrum, foel, lieb-mattis, gap-cert, fcs, lr, cluster, ssep, climit.
    subcommand: String,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT_ERROR as u8 } else { 0 });
        }
    };
    if !SUBCOMMANDS.contains(&args.subcommand.as_str()) {
        eprintln!("error: unknown subcommand \"{}\" (expected one of {})", args.subcommand, SUBCOMMANDS.join(", "));
        return ExitCode::from(EXIT_INPUT_ERROR as u8);
    }
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INPUT_ERROR as u8);
        }
    }
    let outcome = run(&args.subcommand, &args.config, &args.out, args.seed);
    let line = describe(&outcome);
    if outcome.error.is_some() {
        eprintln!("{line}");
    } else {
        println!("{line}");
    }
    ExitCode::from(outcome.exit_code as u8)
}
