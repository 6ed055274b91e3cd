use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use hdsfft::format;
use hdsfft_cli::bench::write_csv;
use hdsfft_cli::{
    demo_tilt, run_bench, solve, summarize, worstcase_rows, Cli, CliError, Command, Settings,
};

fn output(s: &Settings) -> Result<Box<dyn Write>, CliError> {
    Ok(match &s.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn run(s: &Settings) -> Result<ExitCode, CliError> {
    if let Some(n) = s.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    match s.mode {
        Command::Solve => {
            let outcome = solve(s)?;
            format::write_spectrum(output(s)?, &outcome.recovered)?;
            eprint!("{outcome}");
            if let Some(diag) = &outcome.diagnostics {
                let path = s.sidecar("diag");
                std::fs::write(&path, diag)?;
                eprintln!("diagnostics    {}", path.display());
                return Ok(ExitCode::from(2));
            }
        }
        Command::Bench => {
            let rows = run_bench(s)?;
            write_csv(&rows, output(s)?)?;
            let summary = summarize(&rows);
            if s.out.is_some() {
                write_csv(&summary, File::create(s.sidecar("summary.csv"))?)?;
            }
            write_csv(&summary, io::stderr().lock())?;
        }
        Command::Worstcase => {
            if s.demo_tilt {
                eprint!("{}", demo_tilt(s.bandwidth)?);
            }
            write_csv(&worstcase_rows(s)?, output(s)?)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.resolve().and_then(|s| run(&s)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("hdsfft: {e}");
            ExitCode::FAILURE
        }
    }
}
