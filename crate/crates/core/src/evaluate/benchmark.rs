use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use super::ari::ari;
use super::variants::{run_variant, Method, StageOptions};
use crate::cli::io::fmt_f64;
use crate::error::Result;
use crate::simulate::{derive_seed, gen_replicate, Replicate, ScenarioConfig};
use crate::sindex::link_error;

/// Full factorial simulation study.
#[derive(Debug, Clone)]
pub struct BenchmarkPlan {
    pub scenarios: Vec<u8>,
    pub sizes: Vec<usize>,
    pub replicas: usize,
    pub methods: Vec<Method>,
    pub seed: u64,
    /// Number of clusters given to every method.
    pub l: usize,
    /// Template for the generated replicates (scenario, n and seed are overwritten).
    pub scenario: ScenarioConfig,
    pub stages: StageOptions,
    /// Record wall-clock seconds; when false the column is written as 0.
    pub timing: bool,
}

impl Default for BenchmarkPlan {
    fn default() -> Self {
        BenchmarkPlan {
            scenarios: vec![1, 2, 3],
            sizes: vec![50, 100, 250],
            replicas: 100,
            methods: vec![
                Method::Crftiw,
                Method::NoTi,
                Method::NoCov,
                Method::AdjustFirst,
            ],
            seed: 0,
            l: 3,
            scenario: ScenarioConfig::default(),
            stages: StageOptions::default(),
            timing: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub scenario: u8,
    pub n: usize,
    pub replica: usize,
    pub method: Method,
    pub ari: f64,
    /// `|gamma1_hat - gamma1|`; NaN when the method fits no index.
    pub gamma1_err: f64,
    pub link_err: f64,
    pub seconds: f64,
    pub error: Option<String>,
}

/// Scores one method on one replicate. Failures are recorded in the row.
pub fn score_replicate(
    method: Method,
    rep: &Replicate,
    l: usize,
    stages: &StageOptions,
    timing: bool,
) -> BenchmarkRow {
    let started = Instant::now();
    let outcome = run_variant(method, &rep.curves, Some(&rep.covariates), l, stages);
    let seconds = if timing {
        started.elapsed().as_secs_f64()
    } else {
        0.0
    };
    let mut row = BenchmarkRow {
        scenario: rep.config.scenario,
        n: rep.config.n,
        replica: 0,
        method,
        ari: f64::NAN,
        gamma1_err: f64::NAN,
        link_err: f64::NAN,
        seconds,
        error: None,
    };
    let scored = outcome.and_then(|out| {
        row.ari = ari(out.partition.labels(), &rep.labels)?;
        if let Some(fit) = &out.index_fit {
            row.gamma1_err = (fit.gamma()[0] - rep.gamma[0]).abs();
            row.link_err = link_error(fit, |a| rep.true_log_link(a), &rep.gamma, &rep.covariates)?;
        }
        Ok(())
    });
    if let Err(e) = scored {
        log::warn!(
            "scenario {} n {} method {method}: {e}",
            rep.config.scenario,
            rep.config.n
        );
        row.error = Some(e.to_string());
    }
    row
}

/// Runs every (scenario, size, replica) cell in parallel; rows come back in
/// plan order, so the output is deterministic for a given seed.
pub fn benchmark(plan: &BenchmarkPlan) -> Result<Vec<BenchmarkRow>> {
    let mut cells = Vec::new();
    for &scenario in &plan.scenarios {
        for &n in &plan.sizes {
            for replica in 0..plan.replicas {
                cells.push((scenario, n, replica));
            }
        }
    }
    for &scenario in &plan.scenarios {
        ScenarioConfig {
            scenario,
            ..plan.scenario.clone()
        }
        .validate()?;
    }
    let rows: Vec<Vec<BenchmarkRow>> = cells
        .par_iter()
        .map(|&(scenario, n, replica)| {
            let cell_seed = derive_seed(plan.seed, &[scenario as u64, n as u64, replica as u64]);
            let config = ScenarioConfig {
                scenario,
                n,
                seed: cell_seed,
                ..plan.scenario.clone()
            };
            let mut stages = plan.stages.clone();
            stages.index.seed = derive_seed(cell_seed, &[1]);
            stages.mixture.seed = derive_seed(cell_seed, &[2]);
            let rep = match gen_replicate(&config) {
                Ok(rep) => rep,
                Err(e) => {
                    return plan
                        .methods
                        .iter()
                        .map(|&method| BenchmarkRow {
                            scenario,
                            n,
                            replica,
                            method,
                            ari: f64::NAN,
                            gamma1_err: f64::NAN,
                            link_err: f64::NAN,
                            seconds: 0.0,
                            error: Some(e.to_string()),
                        })
                        .collect();
                }
            };
            plan.methods
                .iter()
                .map(|&method| BenchmarkRow {
                    replica,
                    ..score_replicate(method, &rep, plan.l, &stages, plan.timing)
                })
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

pub const BENCHMARK_HEADER: &str = "scenario,n,replica,method,ari,gamma1_err,link_err,seconds";

pub fn write_benchmark_csv<W: Write>(rows: &[BenchmarkRow], mut out: W) -> Result<()> {
    writeln!(out, "{BENCHMARK_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.scenario,
            r.n,
            r.replica,
            r.method,
            fmt_f64(r.ari),
            fmt_f64(r.gamma1_err),
            fmt_f64(r.link_err),
            fmt_f64(r.seconds)
        )?;
    }
    Ok(())
}

/// Boxplot statistics of one metric in one (scenario, n, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: u8,
    pub n: usize,
    pub method: Method,
    pub metric: &'static str,
    pub count: usize,
    pub failures: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Median of the finite values.
pub fn median(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

type Metric = (&'static str, fn(&BenchmarkRow) -> f64);

pub fn summarize(rows: &[BenchmarkRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(u8, usize, Method)> =
        rows.iter().map(|r| (r.scenario, r.n, r.method)).collect();
    keys.sort();
    keys.dedup();
    let metrics: [Metric; 4] = [
        ("ari", |r| r.ari),
        ("gamma1_err", |r| r.gamma1_err),
        ("link_err", |r| r.link_err),
        ("seconds", |r| r.seconds),
    ];
    let mut out = Vec::new();
    for (scenario, n, method) in keys {
        let cell: Vec<&BenchmarkRow> = rows
            .iter()
            .filter(|r| r.scenario == scenario && r.n == n && r.method == method)
            .collect();
        let failures = cell.iter().filter(|r| r.error.is_some()).count();
        for (metric, get) in metrics {
            let mut v: Vec<f64> = cell
                .iter()
                .map(|r| get(r))
                .filter(|x| x.is_finite())
                .collect();
            v.sort_by(f64::total_cmp);
            out.push(SummaryRow {
                scenario,
                n,
                method,
                metric,
                count: v.len(),
                failures,
                min: quantile(&v, 0.0),
                q1: quantile(&v, 0.25),
                median: quantile(&v, 0.5),
                q3: quantile(&v, 0.75),
                max: quantile(&v, 1.0),
            });
        }
    }
    out
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], mut out: W) -> Result<()> {
    writeln!(
        out,
        "scenario,n,method,metric,count,failures,min,q1,median,q3,max"
    )?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.scenario,
            r.n,
            r.method,
            r.metric,
            r.count,
            r.failures,
            fmt_f64(r.min),
            fmt_f64(r.q1),
            fmt_f64(r.median),
            fmt_f64(r.q3),
            fmt_f64(r.max)
        )?;
    }
    Ok(())
}
