use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::Parser;
use rlmc_cli::args::{Cli, Command};
use rlmc_cli::commands::{
    cmd_converge, cmd_extrapolate, cmd_extrapolate_synthetic, cmd_reference, cmd_run, cmd_time_average,
    write_convergence_csv, write_csv, write_extrapolation, write_time_average,
};
use rlmc_cli::{ExperimentConfig, Result};

fn sink(cfg: &ExperimentConfig) -> Result<Box<dyn Write>> {
    Ok(match &cfg.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reference(args) => {
            let cfg = args.experiment()?;
            writeln!(sink(&cfg)?, "{}", cmd_reference(&cfg)?)?;
        }
        Command::Converge(args) => {
            let cfg = args.experiment()?;
            let out = cmd_converge(&cfg)?;
            let mut w = sink(&cfg)?;
            write_convergence_csv(&mut w, &out)?;
            w.flush()?;
        }
        Command::Extrapolate { args, synthetic } => {
            let cfg = args.experiment()?;
            let mut w = sink(&cfg)?;
            match synthetic.as_deref() {
                Some(&[a, b]) => writeln!(w, "improved={}", cmd_extrapolate_synthetic(&cfg, a, b)?)?,
                _ => write_extrapolation(&mut w, &cmd_extrapolate(&cfg)?)?,
            }
            w.flush()?;
        }
        Command::Run(args) => {
            let cfg = args.experiment()?;
            let row = cmd_run(&cfg)?;
            let mut w = sink(&cfg)?;
            write_csv(&mut w, &[row])?;
            w.flush()?;
        }
        Command::TimeAverage(args) => {
            let cfg = args.experiment()?;
            let mut w = sink(&cfg)?;
            write_time_average(&mut w, &cmd_time_average(&cfg)?)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
