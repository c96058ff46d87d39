use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qconv_cli::descriptor::FunctionDescriptor;
use qconv_cli::{
    cmd_check, cmd_convolve, cmd_eval, cmd_fourier, cmd_ifourier, cmd_invert, cmd_moments, cmd_solve, parse_point,
    CliError, Format, Output, Settings,
};

#[derive(Parser)]
#[command(name = "qconv", version, about = "q-convolution, q-Fourier transforms and q-difference solving on L(γ)")]
struct Cli {
    #[arg(long, global = true, default_value_t = 0.5)]
    q: f64,
    #[arg(long, global = true, default_value_t = 0.9)]
    gamma: f64,
    /// Relative tolerance for truncating infinite sums.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 512)]
    max_terms: usize,
    /// Truncation order of series and expansions.
    #[arg(long, global = true, default_value_t = 32)]
    order: usize,
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Function arguments accept a builtin (`u`, `G_k:3`), inline JSON, or `@file.json`.
#[derive(Subcommand)]
enum Command {
    /// Tabulate a function; without points, over the lattice window k ∈ [-8, 20].
    Eval {
        function: String,
        /// Comma-separated points, real or complex (`1+2i`).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        points: Vec<String>,
    },
    /// Moments μ_e for e = 0..=up_to.
    Moments {
        function: String,
        #[arg(default_value_t = 12)]
        up_to: usize,
    },
    /// Convolution product f *_γ g.
    Convolve { f: String, g: String },
    /// Formal q-Fourier transform F̃_γ (or F̃′_γ with --prime).
    Fourier {
        function: String,
        #[arg(long)]
        prime: bool,
    },
    /// Inverse 𝒢_γ of a power_series descriptor.
    Ifourier { series: String },
    /// Convolution inverse with its zero-free radius.
    Invert { function: String },
    /// Solve Σ c_n ∂^n Y = F; OPERATOR is a JSON array such as "[1,0,-0.015625]".
    Solve { operator: String, rhs: String },
    /// Run named identity checks, or `all`.
    Check { names: Vec<String> },
}

fn run(cli: &Cli) -> Result<(Output, bool), CliError> {
    let s = Settings { q: cli.q, gamma: cli.gamma, tol: cli.tol, max_terms: cli.max_terms, order: cli.order };
    let desc = |t: &str| FunctionDescriptor::parse(t);
    let out = match &cli.command {
        Command::Eval { function, points } => {
            let pts = points.iter().map(|p| parse_point(p)).collect::<Result<Vec<_>, _>>()?;
            cmd_eval(&desc(function)?, &pts, &s)?
        }
        Command::Moments { function, up_to } => cmd_moments(&desc(function)?, *up_to, &s)?,
        Command::Convolve { f, g } => cmd_convolve(&desc(f)?, &desc(g)?, &s)?,
        Command::Fourier { function, prime } => cmd_fourier(&desc(function)?, *prime, &s)?,
        Command::Ifourier { series } => cmd_ifourier(&desc(series)?, &s)?,
        Command::Invert { function } => cmd_invert(&desc(function)?, &s)?,
        Command::Solve { operator, rhs } => cmd_solve(operator, &desc(rhs)?, &s)?,
        Command::Check { names } => return cmd_check(names, &s),
    };
    Ok((out, true))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    match run(&cli) {
        Ok((out, ok)) => {
            print!("{}", out.render(format));
            if format == Format::Json {
                println!();
            } else {
                for line in out.report_lines() {
                    eprintln!("{line}");
                }
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
