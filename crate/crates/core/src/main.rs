use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crftiw::cli::io::{self, numbered, RegionTable};
use crftiw::cli::pipeline::{
    load_covariates, load_curves, write_index_report, write_mixture_report,
};
use crftiw::cli::{
    normalize_rate, preprocess_ma, run_pipeline, truncate_to_dyadic, PipelineConfig,
};
use crftiw::evaluate::{
    ari, benchmark, summarize, write_benchmark_csv, write_summary_csv, BenchmarkPlan, Method,
};
use crftiw::npmix::{fit_mixture, map_assign, select_l, MixtureOptions};
use crftiw::simulate::{gen_replicate, ScenarioConfig, ShiftMode};
use crftiw::sindex::{
    covariate_effect, fit_gamma, fit_gamma_constrained, residuals, Bandwidth, IndexOptions,
};
use crftiw::wavelet::{featurize_batch, Transform, WaveletFilter};
use crftiw::{Error, Result};

#[derive(Parser)]
#[command(
    name = "crftiw",
    version,
    about = "Clustering of shifted curves adjusted on covariates"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a simulated data set.
    Simulate(SimulateArgs),
    /// Moving-average smoothing and per-million normalization of raw counts.
    Preprocess(PreprocessArgs),
    /// Per-scale log-energy features of each curve.
    Features(FeaturesArgs),
    /// Single-index regression of features on covariates.
    Regress(RegressArgs),
    /// Nonparametric mixture on residuals.
    Cluster(ClusterArgs),
    /// Elbow choice of the number of clusters.
    SelectL(SelectLArgs),
    /// Features, regression and clustering in one run.
    Pipeline(PipelineArgs),
    /// Simulation study comparing the method with its ablations.
    Benchmark(BenchmarkArgs),
    /// Adjusted Rand index between two partitions.
    Ari(AriArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1)]
    scenario: u8,
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 256)]
    len: usize,
    #[arg(long, default_value_t = 0.3)]
    varsigma: f64,
    #[arg(long, default_value_t = 50)]
    shift: usize,
    #[arg(long, default_value = "circular")]
    shift_mode: ShiftMode,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct PreprocessArgs {
    /// Raw daily counts, `region,t1..tT`.
    #[arg(long)]
    input: PathBuf,
    /// Populations, `region,population`; counts are left unscaled when absent.
    #[arg(long)]
    population: Option<PathBuf>,
    #[arg(long, default_value_t = 7)]
    window: usize,
    #[arg(long)]
    truncate_to_dyadic: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformArg {
    Ti,
    Dwt,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    curves: PathBuf,
    #[arg(long, default_value = "sym8")]
    wavelet: String,
    #[arg(long, value_enum, default_value = "ti")]
    transform: TransformArg,
    #[arg(long)]
    truncate_to_dyadic: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct RegressArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    covariates: PathBuf,
    /// Covariate (name or 0-based position) whose coefficient is held at zero.
    #[arg(long)]
    zero_index: Option<String>,
    #[arg(long)]
    bandwidth_constant: Option<f64>,
    #[arg(long)]
    standardize: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Receives residuals.csv, indexfit.txt and effect.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ClusterArgs {
    #[arg(long)]
    residuals: PathBuf,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
    /// Optional text report of the fitted mixture.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct SelectLArgs {
    /// `L,loglik` file.
    #[arg(long)]
    loglik: PathBuf,
    #[arg(long, default_value_t = 15.0)]
    tau: f64,
}

#[derive(Args)]
struct PipelineArgs {
    /// `key = value` file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    curves: Option<PathBuf>,
    #[arg(long)]
    covariates: Option<PathBuf>,
    #[arg(long)]
    wavelet: Option<String>,
    #[arg(long)]
    bandwidth_constant: Option<f64>,
    /// `3` or an inclusive range such as `1..10`.
    #[arg(long)]
    l: Option<String>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    #[arg(long)]
    truncate_to_dyadic: bool,
    #[arg(long)]
    standardize: bool,
}

#[derive(Args)]
struct BenchmarkArgs {
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u8, 2, 3])]
    scenarios: Vec<u8>,
    #[arg(long, value_delimiter = ',', default_values_t = vec![50usize, 100, 250])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    replicas: usize,
    #[arg(long, value_delimiter = ',', default_values_t = Method::ALL.to_vec())]
    methods: Vec<Method>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    l: usize,
    #[arg(long, default_value = "circular")]
    shift_mode: ShiftMode,
    /// Write 0 instead of wall-clock seconds, making reruns byte-identical.
    #[arg(long)]
    no_timing: bool,
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Worker threads (all cores by default).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct AriArgs {
    /// Reference partition with `region` and `cluster` columns.
    #[arg(long)]
    truth: PathBuf,
    #[arg(long)]
    estimate: PathBuf,
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let config = ScenarioConfig {
        len: a.len,
        varsigma: a.varsigma,
        shift: a.shift,
        shift_mode: a.shift_mode,
        ..ScenarioConfig::new(a.scenario, a.n, a.seed)
    };
    let rep = gen_replicate(&config)?;
    io::write_replicate(&rep, &a.out_dir)
}

fn preprocess(a: PreprocessArgs) -> Result<()> {
    let table = RegionTable::read(&a.input)?;
    let populations: Option<HashMap<String, f64>> = match &a.population {
        Some(path) => {
            let pop = RegionTable::read(path)?;
            Some(
                pop.regions
                    .into_iter()
                    .zip(
                        pop.rows
                            .into_iter()
                            .map(|r| r.first().copied().unwrap_or(f64::NAN)),
                    )
                    .collect(),
            )
        }
        None => None,
    };
    let mut rows = Vec::with_capacity(table.rows.len());
    for (region, raw) in table.regions.iter().zip(&table.rows) {
        let scaled = match &populations {
            Some(pop) => {
                let p = *pop.get(region).ok_or_else(|| {
                    Error::DimensionMismatch(format!("region `{region}` has no population"))
                })?;
                normalize_rate(raw, p)?
            }
            None => raw.clone(),
        };
        let smooth = preprocess_ma(&scaled, a.window)?;
        rows.push(if a.truncate_to_dyadic {
            truncate_to_dyadic(&smooth).to_vec()
        } else {
            smooth
        });
    }
    let len = rows.first().map_or(0, Vec::len);
    RegionTable::new(numbered("t", 1, len), table.regions, rows).write(&a.output)
}

fn features(a: FeaturesArgs) -> Result<()> {
    let set = load_curves(&a.curves, a.truncate_to_dyadic)?;
    let filter = WaveletFilter::by_name(&a.wavelet)?;
    let transform = match a.transform {
        TransformArg::Ti => Transform::TranslationInvariant,
        TransformArg::Dwt => Transform::Orthogonal,
    };
    let f = featurize_batch(&set.curves, &filter, transform)?;
    RegionTable::from_matrix(numbered("y", 0, f.ncols()), set.regions, &f).write(&a.output)
}

fn regress(a: RegressArgs) -> Result<()> {
    let table = RegionTable::read(&a.features)?;
    let features = table.to_matrix()?;
    let mut cov = load_covariates(&a.covariates, &table.regions)?;
    if a.standardize {
        cov = cov.standardize()?;
    }
    let opts = IndexOptions {
        bandwidth: a
            .bandwidth_constant
            .map_or(Bandwidth::RuleOfThumb, Bandwidth::Scaled),
        seed: a.seed,
        ..IndexOptions::default()
    };
    let fit = match &a.zero_index {
        Some(key) => {
            let k = match cov.names().iter().position(|n| n == key) {
                Some(k) => k,
                None => key
                    .parse::<usize>()
                    .map_err(|_| Error::InvalidConstraint(format!("unknown covariate `{key}`")))?,
            };
            fit_gamma_constrained(&features, &cov, &opts, k)?
        }
        None => fit_gamma(&features, &cov, &opts)?,
    };
    std::fs::create_dir_all(&a.out_dir)?;
    let res = residuals(&fit)?;
    RegionTable::from_matrix(numbered("xi", 0, res.ncols()), table.regions.clone(), &res)
        .write(&a.out_dir.join("residuals.csv"))?;
    let mut out = io::create(&a.out_dir.join("indexfit.txt"))?;
    write_index_report(&fit, cov.names(), &mut out)?;
    out.flush()?;
    let effect = covariate_effect(&fit, &cov)?;
    let rows = effect.values.iter().map(|v| vec![*v]).collect();
    RegionTable::new(vec!["effect".into()], table.regions, rows)
        .write(&a.out_dir.join("effect.csv"))
}

fn cluster(a: ClusterArgs) -> Result<()> {
    let table = RegionTable::read(&a.residuals)?;
    let opts = MixtureOptions {
        seed: a.seed,
        ..MixtureOptions::default()
    };
    let (model, post) = fit_mixture(&table.to_matrix()?, a.l, &opts)?;
    let partition = map_assign(&post);
    let mut out = io::create(&a.output)?;
    io::write_partition(&table.regions, &partition, Some(&post), &mut out)?;
    out.flush()?;
    if let Some(path) = &a.report {
        let mut out = io::create(path)?;
        write_mixture_report(&model, &mut out)?;
        out.flush()?;
    }
    println!("{}", model.loglik);
    Ok(())
}

fn select(a: SelectLArgs) -> Result<()> {
    let pairs = io::read_loglik(&a.loglik)?;
    let first = pairs.first().map_or(1, |p| p.0);
    if pairs.iter().enumerate().any(|(k, p)| p.0 != first + k) {
        return Err(Error::Parse("L values must be consecutive".into()));
    }
    let values: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    println!("{}", select_l(&values, a.tau)? + first - 1);
    Ok(())
}

fn pipeline(a: PipelineArgs) -> std::result::Result<(), String> {
    let build = || -> Result<PipelineConfig> {
        let mut config = match &a.config {
            Some(path) => PipelineConfig::from_file(path)?,
            None => PipelineConfig::default(),
        };
        let path = |p: &Path| p.to_string_lossy().into_owned();
        let overrides = [
            ("curves", a.curves.as_deref().map(path)),
            ("covariates", a.covariates.as_deref().map(path)),
            ("wavelet", a.wavelet.clone()),
            (
                "bandwidth_constant",
                a.bandwidth_constant.map(|v| v.to_string()),
            ),
            ("l", a.l.clone()),
            ("tau", a.tau.map(|v| v.to_string())),
            ("seed", a.seed.map(|v| v.to_string())),
            ("method", a.method.clone()),
            ("out_dir", a.out_dir.as_deref().map(path)),
            (
                "truncate_to_dyadic",
                a.truncate_to_dyadic.then(|| "true".into()),
            ),
            ("standardize", a.standardize.then(|| "true".into())),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                config.set(key, &v)?;
            }
        }
        Ok(config)
    };
    let config = build().map_err(|e| format!("[config] {e}"))?;
    let report = run_pipeline(&config).map_err(|e| e.to_string())?;
    println!(
        "L = {} written to {}",
        report.selected_l,
        config.out_dir.display()
    );
    Ok(())
}

fn run_benchmark(a: BenchmarkArgs) -> Result<()> {
    let plan = BenchmarkPlan {
        scenarios: a.scenarios,
        sizes: a.sizes,
        replicas: a.replicas,
        methods: a.methods,
        seed: a.seed,
        l: a.l,
        scenario: ScenarioConfig {
            shift_mode: a.shift_mode,
            ..ScenarioConfig::default()
        },
        timing: !a.no_timing,
        ..BenchmarkPlan::default()
    };
    let run = || benchmark(&plan);
    let rows = match a.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?
            .install(run)?,
        None => run()?,
    };
    let mut out = io::create(&a.output)?;
    write_benchmark_csv(&rows, &mut out)?;
    out.flush()?;
    if let Some(path) = &a.summary {
        let mut out = io::create(path)?;
        write_summary_csv(&summarize(&rows), &mut out)?;
        out.flush()?;
    }
    let failures = rows.iter().filter(|r| r.error.is_some()).count();
    if failures > 0 {
        log::warn!("{failures} of {} cells failed", rows.len());
    }
    Ok(())
}

fn compare(a: AriArgs) -> Result<()> {
    let (truth_regions, truth) = io::read_labels(&a.truth)?;
    let (est_regions, est) = io::read_labels(&a.estimate)?;
    let lookup: HashMap<&str, usize> = est_regions
        .iter()
        .zip(&est)
        .map(|(r, l)| (r.as_str(), *l))
        .collect();
    let aligned = truth_regions
        .iter()
        .map(|r| {
            lookup.get(r.as_str()).copied().ok_or_else(|| {
                Error::DimensionMismatch(format!("region `{r}` missing from estimate"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if est.len() != truth.len() {
        return Err(Error::LengthMismatch(truth.len(), est.len()));
    }
    println!("{}", ari(&truth, &aligned)?);
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a).map_err(|e| format!("[simulate] {e}")),
        Command::Preprocess(a) => preprocess(a).map_err(|e| format!("[preprocess] {e}")),
        Command::Features(a) => features(a).map_err(|e| format!("[features] {e}")),
        Command::Regress(a) => regress(a).map_err(|e| format!("[regress] {e}")),
        Command::Cluster(a) => cluster(a).map_err(|e| format!("[cluster] {e}")),
        Command::SelectL(a) => select(a).map_err(|e| format!("[select-l] {e}")),
        Command::Pipeline(a) => pipeline(a),
        Command::Benchmark(a) => run_benchmark(a).map_err(|e| format!("[benchmark] {e}")),
        Command::Ari(a) => compare(a).map_err(|e| format!("[ari] {e}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
