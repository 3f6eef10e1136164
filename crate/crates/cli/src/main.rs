use std::process::ExitCode;
use std::time::Instant;

use clap::{CommandFactory, Parser};

use string2g_cli::{configure_threads, run, Cli, CliError};

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    if std::env::args_os().len() <= 1 {
        let _ = Cli::command().print_help();
        return ExitCode::from(2);
    }
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Err(e) = configure_threads() {
        return fail(&e);
    }
    let start = Instant::now();
    let report = match run(&cli) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    let out = report.render();
    match &report.config.output {
        Some(path) => {
            if let Err(source) = std::fs::write(path, &out) {
                return fail(&CliError::Io {
                    path: path.clone(),
                    source,
                });
            }
        }
        None => print!("{out}"),
    }
    if let Some(path) = &cli.common.csv {
        if let Err(e) = report.write_csv(path) {
            return fail(&e);
        }
    }
    ExitCode::from(report.exit_code() as u8)
}
