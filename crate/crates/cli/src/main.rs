use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cho::text::{render_report, render_sweep};
use cho::{
    parse_model_file, parse_sweep_param, run_analysis, sweep_to_json, AnalysisRequest, CliError,
    MassNorm, OutputFormat, ERROR_EXIT_CODE,
};
use cho_core::boundstate::classify;
use cho_core::sweep::{sweep, SweepParam};

/// Normal-mode and bound-state analysis of coupled harmonic oscillators.
///
/// Exit status: 0 bound, 1 unbound, 2 marginal, 3 error.
#[derive(Debug, Parser)]
#[command(name = "cho", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Full report: matrices, normal modes, bound-state verdict, spectrum.
    Analyze {
        model: PathBuf,
        /// Number of energy levels to list (0 disables the spectrum).
        #[arg(long, default_value_t = cho::report::DEFAULT_LEVELS)]
        levels: usize,
        /// none, geometric, or an explicit reference mass.
        #[arg(long, default_value = "none")]
        mass_norm: MassNorm,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Jacobi convergence tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the bound-state verdict only.
    Check { model: PathBuf },
    /// Scan coupling strengths and localise verdict changes.
    Sweep {
        model: PathBuf,
        /// D:i,j with 1-based indices, or D:all; repeat to drive several
        /// couplings together.
        #[arg(long = "param", required = true, value_parser = parse_sweep_param)]
        params: Vec<SweepParam>,
        #[arg(long, allow_hyphen_values = true)]
        from: f64,
        #[arg(long, allow_hyphen_values = true)]
        to: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze {
            model,
            levels,
            mass_norm,
            format,
            tol,
        } => {
            let req = AnalysisRequest {
                model: parse_model_file(&model)?,
                levels,
                mass_norm,
                output_format: format.into(),
                tolerance_override: tol,
            };
            let report = run_analysis(&req)?;
            match req.output_format {
                OutputFormat::Text => print!("{}", render_report(&report)),
                OutputFormat::Json => println!("{}", report.to_json()),
            }
            Ok(report.exit_code())
        }
        Command::Check { model } => {
            let verdict = classify(&parse_model_file(&model)?)?.verdict;
            println!("{}", verdict.as_str());
            Ok(cho::exit_code(verdict))
        }
        Command::Sweep {
            model,
            params,
            from,
            to,
            steps,
            format,
        } => {
            let report = sweep(&parse_model_file(&model)?, &params, from, to, steps)?;
            match format {
                Format::Text => print!("{}", render_sweep(&report)),
                Format::Json => println!("{}", sweep_to_json(&report)),
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's own exit code 2 would collide with "marginal"
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { ERROR_EXIT_CODE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(ERROR_EXIT_CODE)
        }
    }
}
