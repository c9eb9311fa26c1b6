use clap::{Parser, ValueEnum};
use conecalc::app::commands::{self, error_value, exit_code, Format, Options};
use conecalc::app::json::to_canonical;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Analyze,
    Parametrix,
    Asymptotics,
    Verify,
    EdgeAnalyze,
    EdgeParametrix,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Parametrix => "parametrix",
            Command::Asymptotics => "asymptotics",
            Command::Verify => "verify",
            Command::EdgeAnalyze => "edge-analyze",
            Command::EdgeParametrix => "edge-parametrix",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Json,
    Table,
}

/// Conormal symbols, parametrices and singular asymptotics of cone and edge operators.
#[derive(Debug, Parser)]
#[command(name = "conecalc", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Problem specification (JSON).
    #[arg(long, value_name = "FILE")]
    spec: Option<PathBuf>,
    /// Truncation depth N; overrides the spec.
    #[arg(long, value_name = "N")]
    order: Option<usize>,
    /// Weight gamma; overrides the spec.
    #[arg(long, value_name = "G", allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Tolerance for defect and residual checks.
    #[arg(long, value_name = "T")]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value = "table")]
    format: OutFormat,
    /// Cache directory; overrides CONECALC_CACHE.
    #[arg(long, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Seed for randomized verification suites.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let format = match cli.format {
        OutFormat::Json => Format::Json,
        OutFormat::Table => Format::Table,
    };
    let opts = Options {
        order: cli.order,
        gamma: cli.gamma,
        tol: cli.tol,
        format,
        cache_dir: cli.cache_dir.clone(),
        seed: cli.seed,
    };
    let text = match cli.spec.as_ref().map(std::fs::read_to_string).transpose() {
        Ok(t) => t,
        Err(e) => return fail(&conecalc::Error::Io(e), format),
    };
    match commands::run(cli.command.name(), text.as_deref(), &opts) {
        Ok(out) => {
            for n in &out.notes {
                eprintln!("{n}");
            }
            print!("{}", out.render(format));
            ExitCode::from(out.exit as u8)
        }
        Err(e) => fail(&e, format),
    }
}

fn fail(e: &conecalc::Error, format: Format) -> ExitCode {
    match format {
        Format::Json => println!("{}", to_canonical(&error_value(e))),
        Format::Table => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(e) as u8)
}
