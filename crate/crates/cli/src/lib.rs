//! Batch front end: histogram ingest, model fitting, classification and report rendering.

pub mod ingest;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;
use spd_core::characterize::{classify, Classification, LawKind, Pmf, DEFAULT_NONNEG_TOL};
use spd_core::distribution::{
    nbd_pmf, pmf_checked, poisson_pmf, sample, BatchRates, GspdParams, SpdParams,
};
use spd_core::estimate::{
    bootstrap_spd_standard_errors, fit_nbd, fit_poisson, fit_spd, sample_moments, CountHistogram,
    FitResult, Model, ModelParams, NegativeRatePolicy, SampleMoments,
};
use spd_core::gof::{gof_report, GofOptions, GofReport};
use thiserror::Error;

use crate::ingest::{IngestError, ParsedPmf};

/// Highest SPD order accepted on the command line.
pub const MAX_SPD_ORDER: usize = 8;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown model {0:?}: expected poisson, nbd or spd:R with 2 <= R <= {MAX_SPD_ORDER}")]
    UnknownModel(String),
    #[error("no models selected")]
    NoModels,
    #[error("invalid bin range {0:?}: expected A..B with A <= B")]
    BadBins(String),
    #[error("unknown {kind} {value:?}")]
    UnknownChoice { kind: &'static str, value: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Compute(#[from] spd_core::Error),
}

pub fn parse_model(s: &str) -> Result<Model, ConfigError> {
    let s = s.trim().to_ascii_lowercase();
    match s.as_str() {
        "poisson" | "pd" => return Ok(Model::Poisson),
        "nbd" => return Ok(Model::NegativeBinomial),
        _ => {}
    }
    s.strip_prefix("spd:")
        .and_then(|r| r.parse::<usize>().ok())
        .filter(|r| (2..=MAX_SPD_ORDER).contains(r))
        .map(Model::Spd)
        .ok_or(ConfigError::UnknownModel(s))
}

/// Comma-separated model list, order preserved, duplicates dropped.
pub fn parse_models(s: &str) -> Result<Vec<Model>, ConfigError> {
    let mut out: Vec<Model> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let m = parse_model(part)?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(ConfigError::NoModels);
    }
    Ok(out)
}

/// Inclusive range of counts shown as explicit GoF bins.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BinRange {
    pub first: u64,
    pub last: u64,
}

impl FromStr for BinRange {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ConfigError::BadBins(s.to_string());
        let (a, b) = s.split_once("..").ok_or_else(bad)?;
        let b = b.strip_prefix('=').unwrap_or(b);
        let first: u64 = a.trim().parse().map_err(|_| bad())?;
        let last: u64 = b.trim().parse().map_err(|_| bad())?;
        if first > last {
            return Err(bad());
        }
        Ok(BinRange { first, last })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TailPolicy {
    Include,
    #[default]
    Exclude,
}

impl FromStr for TailPolicy {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "include" => Ok(TailPolicy::Include),
            "exclude" => Ok(TailPolicy::Exclude),
            _ => Err(ConfigError::UnknownChoice { kind: "tail policy", value: s.into() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Table,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(OutputFormat::Table),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(ConfigError::UnknownChoice { kind: "output format", value: s.into() }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: PathBuf,
    pub models: Vec<Model>,
    /// Defaults to `0..=max observed count`.
    pub bins: Option<BinRange>,
    pub tail: TailPolicy,
    pub format: OutputFormat,
    /// Seeds the bootstrap.
    pub seed: Option<u64>,
    pub clamp_negative: bool,
    /// Round expected counts before computing the statistic.
    pub expected_decimals: Option<u32>,
    /// Bootstrap resamples for SPD standard errors; 0 disables.
    pub bootstrap: usize,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, models: Vec<Model>) -> Self {
        RunConfig {
            input: input.into(),
            models,
            bins: None,
            tail: TailPolicy::default(),
            format: OutputFormat::default(),
            seed: None,
            clamp_negative: false,
            expected_decimals: None,
            bootstrap: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.models.is_empty() {
            return Err(ConfigError::NoModels);
        }
        if let Some(b) = self.bins {
            if b.first > b.last {
                return Err(ConfigError::BadBins(format!("{}..{}", b.first, b.last)));
            }
        }
        if self.bootstrap == 1 {
            return Err(ConfigError::Invalid("bootstrap needs at least two resamples".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ModelReport {
    pub fit: FitResult,
    pub gof: GofReport,
    pub standard_errors: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct ModelOutcome {
    pub name: String,
    pub outcome: Result<ModelReport, String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub n: u64,
    pub moments: SampleMoments,
    pub bins: BinRange,
    pub observed: Vec<u64>,
    pub outside: u64,
    pub tail: TailPolicy,
    pub models: Vec<ModelOutcome>,
}

impl RunReport {
    pub fn all_succeeded(&self) -> bool {
        self.models.iter().all(|m| m.outcome.is_ok())
    }
}

fn fit_model(model: Model, hist: &CountHistogram, policy: NegativeRatePolicy) -> spd_core::Result<FitResult> {
    match model {
        Model::Poisson => Ok(fit_poisson(hist)),
        Model::NegativeBinomial => fit_nbd(hist),
        Model::Spd(r) => fit_spd(hist, r, policy),
    }
}

/// Reads the configured input and runs every model on it.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    config.validate()?;
    let hist = ingest::ingest(&config.input)?;
    Ok(run_histogram(config, &hist)?)
}

/// Fits every configured model; a failing model is recorded and the rest still run.
pub fn run_histogram(config: &RunConfig, hist: &CountHistogram) -> Result<RunReport, ConfigError> {
    config.validate()?;
    let bins = config.bins.unwrap_or(BinRange { first: 0, last: hist.max_count() });
    let n = hist.total();
    let observed: Vec<u64> = (bins.first..=bins.last).map(|k| hist.frequency(k)).collect();
    let outside = n - observed.iter().sum::<u64>();
    let observed_f: Vec<f64> = observed.iter().map(|&v| v as f64).collect();
    let policy = if config.clamp_negative {
        NegativeRatePolicy::Clamp
    } else {
        NegativeRatePolicy::Keep
    };

    let evaluate = |model: Model| -> spd_core::Result<ModelReport> {
        let fit = fit_model(model, hist, policy)?;
        let pmf = fit.pmf(bins.last as usize)?;
        let gof = gof_report(
            &observed_f,
            outside as f64,
            &pmf,
            bins.first as usize,
            n,
            GofOptions {
                include_tail: config.tail == TailPolicy::Include,
                expected_decimals: config.expected_decimals,
                fitted_parameters: model.parameter_count(),
            },
        )?;
        let standard_errors = match model {
            Model::Spd(r) if config.bootstrap > 0 => Some(bootstrap_spd_standard_errors(
                hist,
                r,
                config.bootstrap,
                config.seed.unwrap_or(0),
            )?),
            _ => None,
        };
        Ok(ModelReport { fit, gof, standard_errors })
    };

    let models = config
        .models
        .iter()
        .map(|&m| ModelOutcome { name: m.name(), outcome: evaluate(m).map_err(|e| e.to_string()) })
        .collect();
    Ok(RunReport {
        n,
        moments: sample_moments(hist, 4),
        bins,
        observed,
        outside,
        tail: config.tail,
        models,
    })
}

/// Rounds to 10 significant digits so printed output is stable.
pub fn sig10(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.9e}").parse().expect("formatted float parses")
    } else {
        x
    }
}

fn sig10_all(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| sig10(x)).collect()
}

#[derive(Serialize)]
struct JsonReport {
    n: u64,
    moments: JsonMoments,
    models: Vec<JsonModel>,
}

#[derive(Serialize)]
struct JsonMoments {
    m1: f64,
    c2: f64,
    c3: f64,
    c4: f64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonModel {
    Fit(Box<JsonFit>),
    Failed { name: String, error: String },
}

#[derive(Serialize)]
struct JsonFit {
    name: String,
    params: JsonParams,
    lambda_t: f64,
    alphas: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    standard_errors: Option<Vec<f64>>,
    expected: Vec<JsonBin>,
    eta: f64,
    df: u32,
    adjusted_df: u32,
    p_value: f64,
    adjusted_p_value: f64,
    diagnostics: Vec<String>,
}

#[derive(Serialize)]
#[serde(untagged)]
enum JsonParams {
    Poisson { lambda: f64 },
    Nbd { r: f64, p: f64 },
    Rates { theta: Vec<f64>, signed: bool },
}

#[derive(Serialize)]
struct JsonBin {
    bin: String,
    observed: f64,
    expected: f64,
    counted: bool,
}

fn json_params(params: &ModelParams) -> JsonParams {
    match params {
        ModelParams::Poisson { lambda } => JsonParams::Poisson { lambda: sig10(*lambda) },
        ModelParams::NegativeBinomial { r, p } => JsonParams::Nbd { r: sig10(*r), p: sig10(*p) },
        ModelParams::Spd(p) => JsonParams::Rates { theta: sig10_all(p.rates()), signed: false },
        ModelParams::Gspd(p) => JsonParams::Rates { theta: sig10_all(p.rates()), signed: true },
    }
}

pub fn render_json(report: &RunReport) -> String {
    let models = report
        .models
        .iter()
        .map(|m| match &m.outcome {
            Err(e) => JsonModel::Failed { name: m.name.clone(), error: e.clone() },
            Ok(r) => JsonModel::Fit(Box::new(JsonFit {
                name: m.name.clone(),
                params: json_params(&r.fit.params),
                lambda_t: sig10(r.fit.lambda_t),
                alphas: r.fit.alphas.as_deref().map(sig10_all),
                standard_errors: r.standard_errors.as_deref().map(sig10_all),
                expected: r
                    .gof
                    .bins
                    .iter()
                    .map(|b| JsonBin {
                        bin: b.label.clone(),
                        observed: b.observed,
                        expected: sig10(b.expected),
                        counted: b.counted,
                    })
                    .collect(),
                eta: sig10(r.gof.eta),
                df: r.gof.df,
                adjusted_df: r.gof.adjusted_df,
                p_value: sig10(r.gof.p_value),
                adjusted_p_value: sig10(r.gof.adjusted_p_value),
                diagnostics: r.fit.diagnostics.iter().map(|d| d.to_string()).collect(),
            })),
        })
        .collect();
    let m = &report.moments;
    let out = JsonReport {
        n: report.n,
        moments: JsonMoments {
            m1: sig10(m.mean()),
            c2: sig10(m.central(2)),
            c3: sig10(m.central(3)),
            c4: sig10(m.central(4)),
        },
        models,
    };
    let mut s = serde_json::to_string_pretty(&out).expect("report serializes");
    s.push('\n');
    s
}

fn fmt_list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| sig10(x).to_string()).collect();
    format!("({})", items.join(", "))
}

/// Observed row, one expected-count row per model, then the statistics and parameters.
pub fn render_table(report: &RunReport) -> String {
    let mut labels: Vec<String> = (report.bins.first..=report.bins.last).map(|k| k.to_string()).collect();
    labels.push(if report.bins.first == 0 {
        format!(">{}", report.bins.last)
    } else {
        format!("<{} or >{}", report.bins.first, report.bins.last)
    });
    let width = labels.iter().map(String::len).max().unwrap_or(0).max(9) + 1;
    let name_width = report.models.iter().map(|m| m.name.len()).max().unwrap_or(0).max(8) + 2;

    let mut s = String::new();
    let m = &report.moments;
    writeln!(s, "n = {}", report.n).unwrap();
    writeln!(
        s,
        "m1 = {}  c2 = {}  c3 = {}  c4 = {}",
        sig10(m.mean()),
        sig10(m.central(2)),
        sig10(m.central(3)),
        sig10(m.central(4))
    )
    .unwrap();
    writeln!(s).unwrap();

    write!(s, "{:<name_width$}", "model").unwrap();
    for l in &labels {
        write!(s, "{l:>width$}").unwrap();
    }
    writeln!(s, "{:>12}{:>5}{:>10}", "eta", "df", "p-value").unwrap();

    write!(s, "{:<name_width$}", "observed").unwrap();
    for v in report.observed.iter().chain(std::iter::once(&report.outside)) {
        write!(s, "{v:>width$}").unwrap();
    }
    writeln!(s).unwrap();

    for model in &report.models {
        write!(s, "{:<name_width$}", model.name).unwrap();
        match &model.outcome {
            Ok(r) => {
                for b in &r.gof.bins {
                    write!(s, "{:>width$.1}", b.expected).unwrap();
                }
                writeln!(s, "{:>12.4}{:>5}{:>10.4}", r.gof.eta, r.gof.df, r.gof.p_value).unwrap();
            }
            Err(e) => writeln!(s, "  failed: {e}").unwrap(),
        }
    }
    if report.tail == TailPolicy::Exclude {
        writeln!(s, "(tail bin not counted in eta)").unwrap();
    }

    writeln!(s).unwrap();
    for model in &report.models {
        let Ok(r) = &model.outcome else { continue };
        let params = match &r.fit.params {
            ModelParams::Poisson { lambda } => format!("lambda = {}", sig10(*lambda)),
            ModelParams::NegativeBinomial { r, p } => format!("r = {}  p = {}", sig10(*r), sig10(*p)),
            ModelParams::Spd(p) => format!("theta = {}", fmt_list(p.rates())),
            ModelParams::Gspd(p) => format!("theta = {} (signed)", fmt_list(p.rates())),
        };
        write!(s, "{}: {params}  lambda_t = {}", model.name, sig10(r.fit.lambda_t)).unwrap();
        if let Some(a) = &r.fit.alphas {
            write!(s, "  alpha = {}", fmt_list(a)).unwrap();
        }
        writeln!(s).unwrap();
        if let Some(se) = &r.standard_errors {
            writeln!(s, "  bootstrap se = {}", fmt_list(se)).unwrap();
        }
        for d in &r.fit.diagnostics {
            writeln!(s, "  note: {d}").unwrap();
        }
    }
    s
}

/// One row per model and bin.
pub fn render_csv(report: &RunReport) -> String {
    let mut s = String::from("model,bin,observed,expected,counted\n");
    for model in &report.models {
        let Ok(r) = &model.outcome else { continue };
        for b in &r.gof.bins {
            writeln!(s, "{},{},{},{},{}", model.name, b.label, b.observed, sig10(b.expected), b.counted).unwrap();
        }
    }
    s
}

pub fn render(report: &RunReport, format: OutputFormat) -> String {
    match format {
        OutputFormat::Table => render_table(report),
        OutputFormat::Json => render_json(report),
        OutputFormat::Csv => render_csv(report),
    }
}

#[derive(Debug, Clone)]
pub struct ClassifyReport {
    pub classification: Classification,
    pub p0: f64,
    pub truncation: usize,
    pub normalized_from: Option<f64>,
}

pub fn classify_pmf(parsed: &ParsedPmf, truncation: usize) -> Result<ClassifyReport, CliError> {
    if truncation == 0 {
        return Err(ConfigError::Invalid("truncation must be at least 1".into()).into());
    }
    let pmf = Pmf::new(parsed.probs.clone())?;
    let classification = classify(&pmf, truncation, DEFAULT_NONNEG_TOL)?;
    Ok(ClassifyReport {
        classification,
        p0: pmf.p0(),
        truncation,
        normalized_from: parsed.normalized_from,
    })
}

fn kind_name(kind: LawKind) -> &'static str {
    match kind {
        LawKind::Spd => "SPD",
        LawKind::Gspd => "GSPD",
        LawKind::Undecided => "UNDECIDED",
    }
}

#[derive(Serialize)]
struct JsonClassify {
    kind: &'static str,
    p0: f64,
    truncation: usize,
    total_rate: f64,
    rates: Vec<f64>,
    residual: f64,
    normalized_from: Option<f64>,
}

pub fn render_classify(report: &ClassifyReport, format: OutputFormat) -> String {
    let c = &report.classification;
    let total: f64 = c.rates.iter().sum();
    match format {
        OutputFormat::Json => {
            let out = JsonClassify {
                kind: kind_name(c.kind),
                p0: sig10(report.p0),
                truncation: report.truncation,
                total_rate: sig10(total),
                rates: sig10_all(&c.rates),
                residual: sig10(c.residual),
                normalized_from: report.normalized_from.map(sig10),
            };
            let mut s = serde_json::to_string_pretty(&out).expect("report serializes");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("i,rate\n");
            for (i, b) in c.rates.iter().enumerate() {
                writeln!(s, "{},{}", i + 1, sig10(*b)).unwrap();
            }
            s
        }
        OutputFormat::Table => {
            let mut s = String::new();
            writeln!(s, "kind: {}", kind_name(c.kind)).unwrap();
            writeln!(s, "p0 = {}  -ln p0 = {}", sig10(report.p0), sig10(-report.p0.ln())).unwrap();
            writeln!(s, "sum of rates = {}  residual bound = {:e}", sig10(total), c.residual).unwrap();
            writeln!(s, "rates (truncation {}):", report.truncation).unwrap();
            for (i, b) in c.rates.iter().enumerate() {
                writeln!(s, "  theta_{} = {}", i + 1, sig10(*b)).unwrap();
            }
            s
        }
    }
}

/// Comma-separated float list, e.g. `0.5,0.25`.
pub fn parse_floats(s: &str) -> Result<Vec<f64>, ConfigError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| ConfigError::Invalid(format!("{p:?} is not a finite number")))
        })
        .collect()
}

/// Draws `draws` variates from the SPD with rates `theta`.
pub fn simulate(theta: &[f64], draws: usize, seed: u64) -> Result<CountHistogram, CliError> {
    if draws == 0 {
        return Err(ConfigError::Invalid("draws must be positive".into()).into());
    }
    let params = SpdParams::new(theta.to_vec())?;
    Ok(CountHistogram::from_samples(&sample(&params, draws, seed))?)
}

pub fn render_histogram(hist: &CountHistogram) -> String {
    let mut s = String::from("count,frequency\n");
    for (k, v) in hist.iter() {
        writeln!(s, "{k},{v}").unwrap();
    }
    s
}

/// Model whose PMF prefix is dumped by the `pmf` subcommand.
#[derive(Debug, Clone, PartialEq)]
pub enum PmfModel {
    /// Batch rates; negative entries give a signed law.
    Rates(Vec<f64>),
    Poisson(f64),
    Nbd { r: f64, p: f64 },
}

/// `P_0..=P_{n_max}` and the indices of any negative entries.
pub fn model_pmf(model: &PmfModel, n_max: usize) -> Result<(Vec<f64>, Vec<usize>), CliError> {
    match model {
        PmfModel::Rates(theta) => {
            let signed = pmf_checked(&GspdParams::new(theta.clone())?, n_max)?;
            Ok((signed.probs, signed.negative_bins))
        }
        PmfModel::Poisson(lambda) => {
            if !(*lambda >= 0.0 && lambda.is_finite()) {
                return Err(ConfigError::Invalid(format!("lambda = {lambda} must be nonnegative")).into());
            }
            Ok((poisson_pmf(*lambda, n_max), Vec::new()))
        }
        PmfModel::Nbd { r, p } => {
            if !(*r > 0.0 && *p > 0.0 && *p < 1.0) {
                return Err(ConfigError::Invalid(format!("need r > 0 and 0 < p < 1, got r = {r}, p = {p}")).into());
            }
            Ok((nbd_pmf(*r, *p, n_max), Vec::new()))
        }
    }
}

/// `value,probability` rows at full precision so the output reads back losslessly.
pub fn render_pmf(probs: &[f64], format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(&sig10_all(probs)).expect("serializes");
            s.push('\n');
            s
        }
        _ => {
            let mut s = String::from("value,probability\n");
            for (k, p) in probs.iter().enumerate() {
                writeln!(s, "{k},{p:e}").unwrap();
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn claims() -> CountHistogram {
        CountHistogram::from_frequencies(&[96978, 9240, 704, 43, 9]).unwrap()
    }

    #[test]
    fn model_specs() {
        assert_eq!(parse_model("poisson"), Ok(Model::Poisson));
        assert_eq!(parse_model("NBD"), Ok(Model::NegativeBinomial));
        assert_eq!(parse_model("spd:8"), Ok(Model::Spd(8)));
        assert!(parse_model("spd:1").is_err());
        assert!(parse_model("spd:9").is_err());
        assert!(parse_model("spd").is_err());
        assert_eq!(
            parse_models("poisson,spd:3,poisson"),
            Ok(vec![Model::Poisson, Model::Spd(3)])
        );
        assert_eq!(parse_models(""), Err(ConfigError::NoModels));
    }

    #[test]
    fn bin_ranges() {
        assert_eq!("0..4".parse(), Ok(BinRange { first: 0, last: 4 }));
        assert_eq!("1..=3".parse(), Ok(BinRange { first: 1, last: 3 }));
        assert!("4..1".parse::<BinRange>().is_err());
        assert!("4".parse::<BinRange>().is_err());
    }

    #[test]
    fn sig10_rounds() {
        assert_eq!(sig10(0.10108063636), 0.1010806364);
        assert_eq!(sig10(123456789012.0), 123456789000.0);
        assert!(sig10(f64::NAN).is_nan());
    }

    #[test]
    fn one_failure_leaves_other_models() {
        // Equidispersed data: the NBD fit has no solution.
        let hist = CountHistogram::from_frequencies(&[10]).unwrap();
        let config = RunConfig::new("-", vec![Model::NegativeBinomial, Model::Poisson]);
        let report = run_histogram(&config, &hist).unwrap();
        assert!(!report.all_succeeded());
        assert!(report.models[0].outcome.is_err());
        let poisson = report.models[1].outcome.as_ref().unwrap();
        assert_eq!(poisson.fit.lambda_t, 0.0);
        assert_eq!(poisson.gof.eta, 0.0);
        assert!(render_json(&report).contains("\"error\""));
    }

    #[test]
    fn claims_run_renders() {
        let mut config = RunConfig::new(
            "-",
            vec![Model::Poisson, Model::Spd(3), Model::Spd(4), Model::NegativeBinomial],
        );
        config.bins = Some(BinRange { first: 0, last: 4 });
        let report = run_histogram(&config, &claims()).unwrap();
        assert!(report.all_succeeded());
        let table = render_table(&report);
        assert!(table.contains("96978"));
        assert!(table.contains("spd:3"));
        let csv = render_csv(&report);
        assert_eq!(csv.lines().count(), 1 + 4 * 6);
        let json: serde_json::Value = serde_json::from_str(&render_json(&report)).unwrap();
        assert_eq!(json["n"], 106974);
        assert_eq!(json["models"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn pmf_dump_reads_back() {
        let (probs, negative) = model_pmf(&PmfModel::Poisson(1.0), 25).unwrap();
        assert!(negative.is_empty());
        let parsed = ingest::parse_pmf(&render_pmf(&probs, OutputFormat::Csv)).unwrap();
        assert_eq!(parsed.probs, probs);
        let (_, negative) = model_pmf(&PmfModel::Rates(vec![0.1, -0.05]), 5).unwrap();
        assert!(negative.contains(&2));
    }

    #[test]
    fn simulate_histogram() {
        let hist = simulate(&[0.5, 0.25], 1000, 7).unwrap();
        assert_eq!(hist.total(), 1000);
        let again = simulate(&[0.5, 0.25], 1000, 7).unwrap();
        assert_eq!(render_histogram(&hist), render_histogram(&again));
        assert!(simulate(&[0.5, -0.25], 10, 7).is_err());
    }
}
