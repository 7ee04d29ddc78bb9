use std::process::ExitCode;

use clap::Parser;
use gradbound::cli::{exit_code, run, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Ok(v) = std::env::var("GRADBOUND_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    log::warn!("thread pool: {e}");
                }
            }
            _ => {
                eprintln!("GRADBOUND_THREADS must be a positive integer, got `{v}`");
                return ExitCode::from(2);
            }
        }
    }
    let cli = Cli::parse();
    let result = run(&cli.command);
    if let Err(e) = &result {
        eprintln!("error: {e}");
    }
    ExitCode::from(exit_code(&result))
}
