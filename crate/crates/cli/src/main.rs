use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use herd_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &outcome.text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(outcome.text.as_bytes())
            .map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
