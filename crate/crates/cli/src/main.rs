//! `spantree` command-line tool.
//!
//! Every run prints one report. The JSON form embeds the parsed arguments
//! and the tool version; text and CSV are rendered from that JSON. Exit
//! status: 0 when all checks pass, 1 when a check fails, 2 on usage or
//! input errors.

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use anyhow::Result;
use clap::Parser;
use serde_json::json;

use args::{Cli, Format};

fn report(cli: &Cli) -> Result<(String, bool)> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let outcome = commands::run(&cli.command)?;
    let report = json!({
        "tool": "spantree",
        "version": spantree::VERSION,
        "config": cli,
        "status": if outcome.passed { "pass" } else { "fail" },
        "result": outcome.result,
    });
    let text = match cli.format {
        Format::Json => serde_json::to_string_pretty(&report)? + "\n",
        Format::Text => render::text(&report),
        Format::Csv => render::csv(&report)?,
    };
    Ok((text, outcome.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match report(&cli) {
        Ok((text, passed)) => {
            print!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
