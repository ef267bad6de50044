use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use spectral_envelope_cli::config::Cli;
use spectral_envelope_cli::run;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(outcome.text.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(u8::from(outcome.failed))
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
