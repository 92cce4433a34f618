//! `stattree`: descriptive statistics, outlier fences and the test-selection
//! tree over CSV data or the bundled planning table.

mod render;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stattree_core::dataset::{
    builtin_table2, parse_csv, select_response_factor, ColumnValues, Dataset, GroupedSample,
    IngestConfig, MeasurementScale,
};
use stattree_core::descriptive::{boxplot_stats, classify_outliers, describe};
use stattree_core::engine::{analyze, EngineConfig};
use stattree_core::homogeneity::Center;
use stattree_core::location::{Correction, TVariant};
use stattree_core::montecarlo::{
    simulate_error_rates, Distribution, GroupSpec, Scenario, TestKind, Truth,
};
use stattree_core::{DatasetError, StatError, DEFAULT_ALPHA};
use std::process::ExitCode;

const BUILTIN_TABLE2: &str = "builtin:table2";

#[derive(Debug, Parser)]
#[command(name = "stattree", version, about = "Pick and run the right hypothesis test for a one-factor experiment")]
struct Cli {
    /// Output format; `boxplot` defaults to json, everything else to text.
    #[arg(long, global = true, value_enum, env = "STATTREE_FORMAT")]
    format: Option<Format>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Summary statistics of one numeric column.
    Describe {
        /// CSV path, or `builtin:table2`.
        input: String,
        #[arg(long)]
        column: String,
    },
    /// Mild and extreme outliers per group from quartile fences.
    Outliers(Split),
    /// Per-group box plot statistics for external plotting.
    Boxplot(Split),
    /// Run the full decision tree and report every step.
    Analyze {
        #[command(flatten)]
        split: Split,
        #[command(flatten)]
        engine: EngineArgs,
    },
    /// Estimate a test's rejection rate by simulation.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct Split {
    /// CSV path, or `builtin:table2`.
    input: String,
    /// Numeric response column.
    #[arg(long)]
    response: String,
    /// Column whose levels define the groups.
    #[arg(long)]
    factor: String,
}

#[derive(Debug, Args)]
struct EngineArgs {
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Groups smaller than this use Shapiro-Wilk, others Kolmogorov-Smirnov.
    #[arg(long, default_value_t = 30)]
    size_threshold: usize,
    #[arg(long, value_enum, default_value_t = CenterArg::Median)]
    levene_center: CenterArg,
    #[arg(long, value_enum, default_value_t = TVariantArg::Pooled)]
    t_variant: TVariantArg,
    #[arg(long, value_enum, default_value_t = CorrectionArg::None)]
    posthoc_correction: CorrectionArg,
    /// Lilliefors-corrected p-values for Kolmogorov-Smirnov.
    #[arg(long)]
    lilliefors: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CenterArg {
    Median,
    Mean,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TVariantArg {
    Pooled,
    Welch,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CorrectionArg {
    None,
    Bonferroni,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// t, welch, anova, mann-whitney, kruskal-wallis, levene, levene-mean,
    /// shapiro-wilk, ks or pipeline.
    #[arg(long, default_value = "t")]
    test: String,
    #[arg(long, default_value_t = 10_000)]
    replications: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Group spec, repeatable: `normal:MU:SIGMA:N`, `uniform:A:B:N` or
    /// `exponential:LAMBDA:N`. Defaults to two `normal:0:1:20` groups.
    #[arg(long = "group", value_name = "SPEC")]
    groups: Vec<String>,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
enum CliError {
    /// Bad input, bad arguments or data a test cannot handle (exit 2).
    User(String),
    /// A numerical routine failed (exit 1).
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::User(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        CliError::User(e.to_string())
    }
}

impl From<StatError> for CliError {
    fn from(e: StatError) -> Self {
        match e {
            StatError::NoConvergence(_) | StatError::Domain(_) => CliError::Internal(e.to_string()),
            _ => CliError::User(e.to_string()),
        }
    }
}

fn load(input: &str) -> Result<Dataset, CliError> {
    if input == BUILTIN_TABLE2 {
        return Ok(builtin_table2());
    }
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::User(format!("cannot read {input}: {e}")))?;
    parse_csv(&text, &IngestConfig::default()).map_err(|e| CliError::User(format!("{input}: {e}")))
}

fn split(s: &Split) -> Result<GroupedSample, CliError> {
    let mut data = load(&s.input)?;
    // numeric codes such as 1/2 are accepted as group labels
    if matches!(data.column(&s.factor)?.values, ColumnValues::Numeric(_)) {
        data = data.cast_to_categorical(&s.factor, MeasurementScale::Nominal)?;
    }
    Ok(select_response_factor(&data, &s.response, &s.factor)?)
}

fn parse_group(spec: &str) -> Result<GroupSpec, CliError> {
    let bad = || {
        CliError::User(format!(
            "bad group spec {spec:?}; expected normal:MU:SIGMA:N, uniform:A:B:N or exponential:LAMBDA:N"
        ))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    let (kind, rest) = parts.split_first().ok_or_else(bad)?;
    let (n, params) = rest.split_last().ok_or_else(bad)?;
    let n: usize = n.parse().map_err(|_| bad())?;
    let params: Vec<f64> = params
        .iter()
        .map(|p| p.parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let distribution = match (kind.to_ascii_lowercase().as_str(), params.as_slice()) {
        ("normal", &[mu, sigma]) => Distribution::Normal { mu, sigma },
        ("uniform", &[a, b]) => Distribution::Uniform { a, b },
        ("exponential", &[lambda]) => Distribution::Exponential { lambda },
        _ => return Err(bad()),
    };
    Ok(GroupSpec { distribution, n })
}

fn emit<T: serde::Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> Result<(), CliError> {
    match format {
        Format::Json => {
            let s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
            println!("{s}");
        }
        Format::Text => print!("{}", text()),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let text_default = cli.format.unwrap_or(Format::Text);
    match cli.command {
        Command::Describe { input, column } => {
            let data = load(&input)?;
            let summary = describe(&data.sample(&column)?)?;
            let out = render::ColumnSummary { column: &column, summary: &summary };
            emit(text_default, &out, || render::describe(&out))
        }
        Command::Outliers(s) => {
            let g = split(&s)?;
            let reports = g
                .groups()
                .iter()
                .map(|grp| Ok(render::GroupOutliers { label: &grp.label, report: classify_outliers(grp)? }))
                .collect::<Result<Vec<_>, StatError>>()?;
            emit(text_default, &reports, || render::outliers(&reports))
        }
        Command::Boxplot(s) => {
            let g = split(&s)?;
            let stats = g.groups().iter().map(boxplot_stats).collect::<Result<Vec<_>, _>>()?;
            emit(cli.format.unwrap_or(Format::Json), &stats, || render::boxplot(&stats))
        }
        Command::Analyze { split: s, engine } => {
            let config = EngineConfig {
                alpha: engine.alpha,
                size_threshold: engine.size_threshold,
                levene_center: match engine.levene_center {
                    CenterArg::Median => Center::Median,
                    CenterArg::Mean => Center::Mean,
                },
                t_variant: match engine.t_variant {
                    TVariantArg::Pooled => TVariant::Pooled,
                    TVariantArg::Welch => TVariant::Welch,
                },
                posthoc_correction: match engine.posthoc_correction {
                    CorrectionArg::None => Correction::None,
                    CorrectionArg::Bonferroni => Correction::Bonferroni,
                },
                lilliefors: engine.lilliefors,
            };
            // reject a bad alpha before touching the input
            config.validate()?;
            let report = analyze(&split(&s)?, &config)?;
            emit(text_default, &report, || render::analysis(&report))
        }
        Command::Validate(v) => {
            let test: TestKind = v.test.parse().map_err(CliError::User)?;
            let group_specs = if v.groups.is_empty() {
                vec![parse_group("normal:0:1:20")?; 2]
            } else {
                v.groups.iter().map(|s| parse_group(s)).collect::<Result<_, _>>()?
            };
            let same = group_specs.iter().all(|g| g.distribution == group_specs[0].distribution);
            let scenario = Scenario {
                group_specs,
                truth: if same { Truth::Null } else { Truth::Alternative },
                seed: v.seed,
            };
            let report = simulate_error_rates(&scenario, test, v.replications, v.alpha)?;
            emit(text_default, &report, || render::validation(&report))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let (CliError::User(msg) | CliError::Internal(msg)) = &e;
            eprintln!("error: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
