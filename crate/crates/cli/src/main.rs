use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use refsys_cli::config::ParseOutcome;
use refsys_cli::{exit, exit_status, run, serialize, RunConfig};

fn main() -> ExitCode {
    let config = match RunConfig::parse_from(std::env::args_os()) {
        Ok(c) => c,
        Err(ParseOutcome::Clap(e)) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(exit::INVALID_CONFIG as u8),
            };
        }
        Err(ParseOutcome::Invalid(e)) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::INVALID_CONFIG as u8);
        }
    };

    let doc = run(&config);
    let bytes = serialize(&doc, config.output_format);
    let written = match &config.output_path {
        Some(path) => std::fs::write(path, &bytes).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout().lock().write_all(&bytes).map_err(|e| format!("cannot write to stdout: {e}")),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(exit::IO as u8);
    }
    ExitCode::from(exit_status(&doc) as u8)
}
