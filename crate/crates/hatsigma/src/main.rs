use std::process::ExitCode;

use clap::Parser;
use hatsigma::cli::{error_json, run, Cli, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::from(Cli::parse());
    match run(&cfg) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            println!("{}", if outcome.passed { "ok" } else { "FAILED" });
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            println!("{}", error_json(&e));
            ExitCode::from(2)
        }
    }
}
