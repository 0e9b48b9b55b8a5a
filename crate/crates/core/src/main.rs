use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    let cli = crsp::cli::Cli::parse();
    if let Some(n) = threads_from_env() {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match crsp::cli::run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// `CRSP_THREADS`: worker cap, 0 or unset for rayon's default.
fn threads_from_env() -> Option<usize> {
    let raw = std::env::var("CRSP_THREADS").ok()?;
    match raw.trim().parse::<usize>() {
        Ok(0) => None,
        Ok(n) => Some(n),
        Err(_) => {
            eprintln!("warning: ignoring CRSP_THREADS={raw:?}");
            None
        }
    }
}
