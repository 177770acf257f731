use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ncglue_cli::commands::{run, Cli, Outcome};

/// Writes the outcome; a closed pipe is not an error worth reporting.
fn emit(out: &Outcome, json: bool) -> std::io::Result<()> {
    let mut w = std::io::stdout().lock();
    if json {
        let v = if out.reports.len() == 1 {
            serde_json::to_string_pretty(&out.reports[0])
        } else {
            serde_json::to_string_pretty(&out.reports)
        };
        writeln!(w, "{}", v.expect("reports serialize"))?;
    } else {
        write!(w, "{}", out.text)?;
        for r in &out.reports {
            writeln!(w, "{}", r.line())?;
        }
    }
    w.flush()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {:#}", e);
            return ExitCode::from(2);
        }
    };
    if let Err(e) = emit(&out, cli.json) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    }
    if out.failed() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
