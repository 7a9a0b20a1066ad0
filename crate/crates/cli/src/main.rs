use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;

use appraisal_cli::{execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = |key: &str| std::env::var(key).ok().filter(|v| !v.is_empty());
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = execute(&cli.command, &cli.opts, &env, &mut out);
    let _ = out.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
