use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use hodge_cli::{execute, Invocation, CONFIG_ERROR};

/// Run verification suites for Hodge operators on hermitian spaces.
#[derive(Parser, Debug)]
#[command(name = "hodge", version)]
struct Args {
    /// TOML file with [field], [form] and optional [run] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// hodge-identities, algebra-classify, split-reductions, norm-similarity,
    /// geometry, groups, rational-examples or all.
    #[arg(long)]
    suite: Option<String>,
    /// text, csv or json-lines.
    #[arg(long)]
    format: Option<String>,
    /// Include the long-running checks.
    #[arg(long)]
    long: bool,
    /// Largest group order a closure may reach.
    #[arg(long)]
    cap: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let inv = Invocation {
        config: args.config,
        suite: args.suite,
        format: args.format,
        long: args.long,
        cap: args.cap,
    };
    match execute(&inv) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code as u8)
        }
        Err(e) => {
            eprintln!("config error: {e}");
            ExitCode::from(CONFIG_ERROR as u8)
        }
    }
}
