use std::process::ExitCode;

use clap::Parser;
use diverse_match_cli::args::{Cli, Command};
use diverse_match_cli::commands::{cmd_gen, cmd_solve, cmd_sweep};
use diverse_match_cli::error::CliError;
use diverse_match_cli::verify::{run_suite, SUITES};

fn verify(suite: &str) -> Result<String, CliError> {
    let names: Vec<&str> = if suite == "all" { SUITES.to_vec() } else { vec![suite] };
    let mut failed = Vec::new();
    for name in names {
        let report = run_suite(name)?;
        print!("{report}");
        if !report.passed {
            failed.push(report.name);
        }
    }
    if failed.is_empty() {
        Ok("verify: all passed".into())
    } else {
        Err(CliError::Failed(format!("verify: failed {}", failed.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // clap's own usage code would collide with the validation exit code
            return ExitCode::from(if e.use_stderr() { 64 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Verify(a) => verify(&a.suite),
    };
    match result {
        Ok(line) => {
            if matches!(cli.command, Command::Sweep(ref a) if a.out.is_none()) {
                eprintln!("{line}");
            } else {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
