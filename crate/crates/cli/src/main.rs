use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spd_cli::ingest::{parse_pmf, read_input};
use spd_cli::{
    classify_pmf, model_pmf, parse_floats, parse_models, render, render_classify, render_histogram, render_pmf,
    run, simulate, BinRange, CliError, ConfigError, OutputFormat, PmfModel, RunConfig, TailPolicy,
};

/// Stuttering Poisson fitting, goodness of fit and characterization of count data.
#[derive(Parser)]
#[command(name = "spd", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit models to a count,frequency histogram and report goodness of fit.
    Fit(FitArgs),
    /// Decide whether a probability table is a (generalized) stuttering Poisson law.
    Classify(ClassifyArgs),
    /// Draw a histogram from a stuttering Poisson law.
    Simulate(SimulateArgs),
    /// Print a model's probabilities P_0..=P_N.
    Pmf(PmfArgs),
}

#[derive(Args)]
struct FitArgs {
    /// Histogram file, or - for standard input.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Comma-separated list of poisson, nbd, spd:R (2 <= R <= 8).
    #[arg(long, default_value = "poisson,spd:3,spd:4,nbd")]
    models: String,
    /// Explicit bins A..B (default 0..max observed count).
    #[arg(long)]
    bins: Option<BinRange>,
    /// Whether the bin collecting everything outside the range enters the statistic.
    #[arg(long, default_value = "exclude")]
    tail: TailPolicy,
    /// table, json or csv.
    #[arg(long, default_value = "table")]
    format: OutputFormat,
    /// Seed for bootstrap resampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Clamp negative estimated rates to zero instead of keeping a signed fit.
    #[arg(long)]
    clamp_negative: bool,
    /// Round expected counts to this many decimals before computing eta.
    #[arg(long)]
    round_expected: Option<u32>,
    /// Bootstrap resamples for standard errors of SPD rates.
    #[arg(long, default_value_t = 0)]
    bootstrap: usize,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Probability table (one probability per line, or value,probability rows), or -.
    #[arg(default_value = "-")]
    input: PathBuf,
    /// Number of log-series coefficients to extract.
    #[arg(long, default_value_t = 50)]
    truncation: usize,
    #[arg(long, default_value = "table")]
    format: OutputFormat,
}

#[derive(Args)]
struct SimulateArgs {
    /// Batch rates theta_1,...,theta_r.
    #[arg(long, allow_hyphen_values = true)]
    theta: String,
    #[arg(long)]
    draws: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PmfArgs {
    /// Batch rates theta_1,...,theta_r (negative entries allowed).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["poisson", "nbd"])]
    theta: Option<String>,
    /// Poisson mean.
    #[arg(long, conflicts_with = "nbd")]
    poisson: Option<f64>,
    /// Negative binomial as r,p.
    #[arg(long)]
    nbd: Option<String>,
    /// Largest value printed.
    #[arg(long, default_value_t = 20)]
    truncation: usize,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

fn fit(args: FitArgs) -> Result<ExitCode, CliError> {
    let mut config = RunConfig::new(args.input, parse_models(&args.models)?);
    config.bins = args.bins;
    config.tail = args.tail;
    config.format = args.format;
    config.seed = args.seed;
    config.clamp_negative = args.clamp_negative;
    config.expected_decimals = args.round_expected;
    config.bootstrap = args.bootstrap;
    let report = run(&config)?;
    print!("{}", render(&report, config.format));
    for m in &report.models {
        if let Err(e) = &m.outcome {
            eprintln!("warning: model {} failed: {e}", m.name);
        }
    }
    Ok(if report.all_succeeded() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn classify_cmd(args: ClassifyArgs) -> Result<ExitCode, CliError> {
    let parsed = parse_pmf(&read_input(&args.input)?)?;
    if let Some(mass) = parsed.normalized_from {
        eprintln!("warning: probabilities summed to {mass}; rescaled to 1");
    }
    let report = classify_pmf(&parsed, args.truncation)?;
    print!("{}", render_classify(&report, args.format));
    Ok(ExitCode::SUCCESS)
}

fn simulate_cmd(args: SimulateArgs) -> Result<ExitCode, CliError> {
    let hist = simulate(&parse_floats(&args.theta)?, args.draws, args.seed)?;
    print!("{}", render_histogram(&hist));
    Ok(ExitCode::SUCCESS)
}

fn pmf_cmd(args: PmfArgs) -> Result<ExitCode, CliError> {
    let model = match (args.theta, args.poisson, args.nbd) {
        (Some(t), _, _) => PmfModel::Rates(parse_floats(&t)?),
        (_, Some(l), _) => PmfModel::Poisson(l),
        (_, _, Some(rp)) => match parse_floats(&rp)?.as_slice() {
            &[r, p] => PmfModel::Nbd { r, p },
            _ => return Err(ConfigError::Invalid("--nbd expects r,p".into()).into()),
        },
        _ => return Err(ConfigError::Invalid("one of --theta, --poisson, --nbd is required".into()).into()),
    };
    let (probs, negative) = model_pmf(&model, args.truncation)?;
    if !negative.is_empty() {
        eprintln!("warning: negative probabilities at {negative:?}; not a probability law");
    }
    print!("{}", render_pmf(&probs, args.format));
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Fit(a) => fit(a),
        Command::Classify(a) => classify_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Pmf(a) => pmf_cmd(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
