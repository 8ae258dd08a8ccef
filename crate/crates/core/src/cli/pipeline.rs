//! End-to-end run: curves and covariates in, artifacts on disk.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::io::{self, fmt_f64, numbered, RegionTable};
use super::preprocess::truncate_to_dyadic;
use super::{Stage, StageError};
use crate::error::{Error, Result};
use crate::evaluate::{cluster_summary, prepare_variant, ClusterSummary, Prepared, StageOptions};
use crate::npmix::{fit_mixture, map_assign, select_l, MixtureModel, Partition, Posteriors};
use crate::simulate::derive_seed;
use crate::sindex::{Bandwidth, CovariateEffect, Covariates, IndexFit};
use crate::wavelet::{Curve, WaveletFilter};

use super::config::PipelineConfig;

/// Curves keyed by region.
#[derive(Debug, Clone)]
pub struct CurveSet {
    pub regions: Vec<String>,
    pub curves: Vec<Curve>,
}

/// Reads a curve file, optionally truncating each series to its latest dyadic part.
pub fn load_curves(path: &Path, truncate: bool) -> Result<CurveSet> {
    let table = RegionTable::read(path)?;
    if table.rows.is_empty() {
        return Err(Error::EmptyInput(format!("{}: no curves", path.display())));
    }
    let curves = table
        .rows
        .iter()
        .map(|row| {
            let values = if truncate {
                truncate_to_dyadic(row)
            } else {
                row.as_slice()
            };
            Curve::new(values.to_vec())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CurveSet {
        regions: table.regions,
        curves,
    })
}

/// Reads covariates and orders their rows like `regions`.
pub fn load_covariates(path: &Path, regions: &[String]) -> Result<Covariates> {
    let table = RegionTable::read(path)?;
    let position: HashMap<&str, usize> = table
        .regions
        .iter()
        .enumerate()
        .map(|(i, r)| (r.as_str(), i))
        .collect();
    let mut data = Array2::zeros((regions.len(), table.columns.len()));
    for (i, region) in regions.iter().enumerate() {
        let k = *position.get(region.as_str()).ok_or_else(|| {
            Error::DimensionMismatch(format!("region `{region}` has no covariates"))
        })?;
        for (j, v) in table.rows[k].iter().enumerate() {
            data[[i, j]] = *v;
        }
    }
    Covariates::new(table.columns, data)
}

/// Stage settings implied by a configuration.
pub fn stage_options(config: &PipelineConfig) -> Result<StageOptions> {
    let mut opts = StageOptions {
        filter: WaveletFilter::by_name(&config.wavelet)?,
        ..StageOptions::default()
    };
    if let Some(c) = config.bandwidth_constant {
        opts.index.bandwidth = Bandwidth::Scaled(c);
    }
    opts.index.seed = derive_seed(config.seed, &[1]);
    opts.mixture.seed = derive_seed(config.seed, &[2]);
    Ok(opts)
}

/// Results of a pipeline run, also written to the output directory.
#[derive(Debug, Clone)]
pub struct PipelineReport {
    pub regions: Vec<String>,
    pub prepared: Prepared,
    /// `(L, smoothed log-likelihood)` for every fitted `L`.
    pub loglik: Vec<(usize, f64)>,
    pub selected_l: usize,
    pub model: MixtureModel,
    pub posteriors: Posteriors,
    /// Labels ordered by increasing mean adjusted total when the summary exists.
    pub partition: Partition,
    pub summary: Option<ClusterSummary>,
}

fn tag(stage: Stage) -> impl FnOnce(Error) -> StageError {
    move |source| StageError { stage, source }
}

/// Reorders clusters so that label 1 has the smallest mean adjusted total.
fn canonicalize(
    model: MixtureModel,
    post: Posteriors,
    partition: Partition,
    summary: &ClusterSummary,
) -> (MixtureModel, Posteriors, Partition) {
    // order[new - 1] = old - 1
    let order: Vec<usize> = summary
        .clusters
        .iter()
        .map(|c| c.source_label - 1)
        .collect();
    let model = model.permuted(&order);
    let m = post.matrix();
    let mut reordered = Array2::zeros(m.dim());
    for (new, &old) in order.iter().enumerate() {
        reordered.column_mut(new).assign(&m.column(old));
    }
    let labels = partition
        .labels()
        .iter()
        .map(|&l| summary.relabel(l).unwrap_or(l))
        .collect();
    (model, Posteriors(reordered), Partition(labels))
}

/// Runs every stage and writes the artifacts into `config.out_dir`.
pub fn run_pipeline(config: &PipelineConfig) -> std::result::Result<PipelineReport, StageError> {
    config.validate().map_err(tag(Stage::Config))?;
    let opts = stage_options(config).map_err(tag(Stage::Config))?;
    let curves_path = config.curves.as_deref().expect("validated");
    let set = load_curves(curves_path, config.truncate_to_dyadic).map_err(tag(Stage::Input))?;
    let covariates = match &config.covariates {
        Some(path) => {
            let cov = load_covariates(path, &set.regions).map_err(tag(Stage::Input))?;
            Some(if config.standardize {
                cov.standardize().map_err(tag(Stage::Input))?
            } else {
                cov
            })
        }
        None => None,
    };

    let prepared = prepare_variant(config.method, &set.curves, covariates.as_ref(), &opts)
        .map_err(|e| {
            let stage = match e {
                Error::NonDyadicLength(_)
                | Error::NonFiniteInput(_)
                | Error::InvalidLevels { .. }
                | Error::DegenerateScale(_)
                | Error::UnknownWavelet(_) => Stage::Features,
                _ => Stage::Regression,
            };
            StageError { stage, source: e }
        })?;

    let n = set.curves.len();
    let mut fits = Vec::new();
    for l in config.l_min..=config.l_max.min(n) {
        let fit =
            fit_mixture(&prepared.residuals, l, &opts.mixture).map_err(tag(Stage::Mixture))?;
        log::info!("L = {l}: smoothed log-likelihood {:.4}", fit.0.loglik);
        fits.push((l, fit));
    }
    if fits.is_empty() {
        return Err(StageError {
            stage: Stage::Mixture,
            source: Error::InvalidL { l: config.l_min, n },
        });
    }
    let loglik: Vec<(usize, f64)> = fits.iter().map(|(l, f)| (*l, f.0.loglik)).collect();
    let selected_l = if fits.len() > 1 {
        let values: Vec<f64> = loglik.iter().map(|p| p.1).collect();
        select_l(&values, config.tau).map_err(tag(Stage::Selection))? + config.l_min - 1
    } else {
        config.l_min
    };
    let (_, (model, posteriors)) = fits
        .into_iter()
        .find(|(l, _)| *l == selected_l)
        .expect("selected L was fitted");
    let partition = map_assign(&posteriors);

    let effect = prepared
        .effect
        .clone()
        .unwrap_or_else(|| CovariateEffect::unit(n));
    let (model, posteriors, partition, summary) =
        match cluster_summary(&partition, &set.curves, &effect) {
            Ok(summary) => {
                let (m, p, part) = canonicalize(model, posteriors, partition.clone(), &summary);
                let summary = cluster_summary(&part, &set.curves, &effect).ok();
                (m, p, part, summary)
            }
            Err(e) => {
                log::warn!("no cluster summary: {e}");
                (model, posteriors, partition, None)
            }
        };

    let report = PipelineReport {
        regions: set.regions,
        prepared,
        loglik,
        selected_l,
        model,
        posteriors,
        partition,
        summary,
    };
    write_artifacts(&report, config).map_err(tag(Stage::Output))?;
    Ok(report)
}

pub fn write_index_report<W: Write>(fit: &IndexFit, names: &[String], mut out: W) -> Result<()> {
    writeln!(out, "n = {}", fit.n())?;
    for (name, g) in names.iter().zip(fit.gamma()) {
        writeln!(out, "gamma.{name} = {}", fmt_f64(*g))?;
    }
    writeln!(out, "bandwidth = {}", fmt_f64(fit.bandwidth()))?;
    writeln!(out, "loss = {}", fmt_f64(fit.loss()))?;
    if let Some(k) = fit.zero_index() {
        writeln!(
            out,
            "constrained = {}",
            names.get(k).map_or("?", String::as_str)
        )?;
    }
    Ok(())
}

pub fn write_mixture_report<W: Write>(model: &MixtureModel, mut out: W) -> Result<()> {
    writeln!(out, "L = {}", model.components())?;
    writeln!(out, "loglik = {}", fmt_f64(model.loglik))?;
    writeln!(out, "iterations = {}", model.iterations)?;
    for (l, p) in model.proportions.iter().enumerate() {
        writeln!(out, "proportion.{} = {}", l + 1, fmt_f64(*p))?;
    }
    for (j, h) in model.bandwidths.iter().enumerate() {
        writeln!(out, "bandwidth.{j} = {}", fmt_f64(*h))?;
    }
    Ok(())
}

pub fn write_summary<W: Write>(summary: &ClusterSummary, mut out: W) -> Result<()> {
    writeln!(
        out,
        "cluster,size,proportion,total_mean,total_sd,effect_mean,effect_sd"
    )?;
    for c in &summary.clusters {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.cluster,
            c.size,
            fmt_f64(c.proportion),
            fmt_f64(c.total_mean),
            fmt_f64(c.total_sd),
            fmt_f64(c.effect_mean),
            fmt_f64(c.effect_sd)
        )?;
    }
    Ok(())
}

fn write_artifacts(report: &PipelineReport, config: &PipelineConfig) -> Result<()> {
    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let p = &report.prepared;
    let width = p.features.ncols();
    RegionTable::from_matrix(numbered("y", 0, width), report.regions.clone(), &p.features)
        .write(&dir.join("features.csv"))?;
    RegionTable::from_matrix(
        numbered("xi", 0, width),
        report.regions.clone(),
        &p.residuals,
    )
    .write(&dir.join("residuals.csv"))?;
    if let Some(fit) = &p.index_fit {
        let names: Vec<String> = match &config.covariates {
            Some(path) => RegionTable::read(path)?.columns,
            None => numbered("x", 1, fit.gamma().len()),
        };
        let mut out = io::create(&dir.join("indexfit.txt"))?;
        writeln!(out, "method = {}", p.method)?;
        write_index_report(fit, &names, &mut out)?;
        out.flush()?;
    }
    if let Some(effect) = &p.effect {
        let rows = effect.values.iter().map(|v| vec![*v]).collect();
        RegionTable::new(vec!["effect".into()], report.regions.clone(), rows)
            .write(&dir.join("effect.csv"))?;
    }
    let mut out = io::create(&dir.join("partition.csv"))?;
    io::write_partition(
        &report.regions,
        &report.partition,
        Some(&report.posteriors),
        &mut out,
    )?;
    out.flush()?;
    let mut out = io::create(&dir.join("loglik_by_L.csv"))?;
    io::write_loglik(&report.loglik, &mut out)?;
    out.flush()?;
    let mut out = io::create(&dir.join("mixture.txt"))?;
    writeln!(out, "selected_L = {}", report.selected_l)?;
    write_mixture_report(&report.model, &mut out)?;
    out.flush()?;
    if let Some(summary) = &report.summary {
        let mut out = io::create(&dir.join("cluster_summary.csv"))?;
        write_summary(summary, &mut out)?;
        out.flush()?;
    }
    Ok(())
}
