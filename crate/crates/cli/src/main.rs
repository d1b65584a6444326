use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use floquet_cli::problem::MethodChoice;
use floquet_cli::run::{self, Format, Output, Overrides};
use floquet_cli::{parse_problem, CliError};

/// Floquet exponents, driven solves and stability charts for linear
/// periodic systems `y' = a(t) y + f(t)` with `a = a0 - V`.
///
/// Exponents follow the `y = psi(t) exp(-mu t)` convention: a solution grows
/// when Re mu < 0.
#[derive(Debug, Parser)]
#[command(name = "floquet", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Problem file (JSON).
    #[arg(long, global = true)]
    spec: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    method: Option<MethodArg>,

    /// Series order.
    #[arg(long, global = true)]
    order: Option<usize>,

    /// Harmonic cutoff K of the truncated operator.
    #[arg(long, global = true)]
    cutoff: Option<usize>,

    /// Convergence tolerance of the series and the cutoff check.
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Points per sweep axis, or solve points per period.
    #[arg(long, global = true)]
    grid: Option<usize>,

    /// Worker threads for sweeps; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Physical exponents mu_j of every target mode.
    Exponents,
    /// Driven or free trajectory via variation of constants.
    Solve,
    /// Two-parameter sweep of the largest growth rate.
    StabilityChart,
    /// Series errors against the dense eigensolve as V is scaled.
    Compare,
    /// Run the invariant suite on the problem.
    Check,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Rs,
    Wb,
    Direct,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn execute(cli: &Cli) -> Result<Output, CliError> {
    let path = cli
        .spec
        .as_ref()
        .ok_or_else(|| CliError::Usage("--spec <file> is required".into()))?;
    let text = std::fs::read_to_string(path)?;
    let mut spec = parse_problem(&text)?;
    let overrides = Overrides {
        method: cli.method.and_then(|m| match m {
            MethodArg::Rs => MethodChoice::parse("rs"),
            MethodArg::Wb => MethodChoice::parse("wb"),
            MethodArg::Direct => MethodChoice::parse("direct"),
            MethodArg::All => MethodChoice::parse("all"),
        }),
        order: cli.order,
        cutoff: cli.cutoff,
        tol: cli.tol,
        grid: cli.grid,
    };
    overrides.apply(&mut spec)?;
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    if cli.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be positive".into()));
    }
    match cli.command {
        Command::Exponents => run::cmd_exponents(&spec, format),
        Command::Solve => run::cmd_solve(&spec, format),
        Command::StabilityChart => run::cmd_stability_chart(&spec, cli.jobs, format),
        Command::Compare => run::cmd_compare(&spec, format),
        Command::Check => run::cmd_check(&spec, format),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let result = execute(&cli).and_then(|output| {
        match &cli.out {
            Some(path) => std::fs::write(path, &output.text)?,
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout
                    .write_all(output.text.as_bytes())
                    .and_then(|()| stdout.flush())
                {
                    Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                    other => other?,
                }
            }
        }
        Ok(output.failed)
    });
    eprintln!("elapsed: {:.3} s", start.elapsed().as_secs_f64());
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("some results failed; see the error column");
            ExitCode::from(3)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
