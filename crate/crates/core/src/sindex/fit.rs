use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::kernel::{gaussian, nadaraya_watson, nadaraya_watson_excluding, rule_of_thumb, std_dev};
use super::optim::{angles_to_unit, nelder_mead, unit_to_angles, SimplexOptions};
use super::{center_features, Covariates};
use crate::error::{Error, Result};

/// How the kernel bandwidth of the link smoother is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    /// `sd(X gamma) n^{-1/5}`.
    RuleOfThumb,
    /// `C n^{-1/5}` with a user-supplied constant `C`.
    Scaled(f64),
    /// A fixed bandwidth.
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct IndexOptions {
    pub bandwidth: Bandwidth,
    /// Recompute the rule-of-thumb bandwidth for every candidate direction. When
    /// false it is computed once from the equal-weight direction.
    pub per_candidate_bandwidth: bool,
    /// Drop observation `i` from its own link estimate.
    pub leave_one_out: bool,
    pub seed: u64,
    /// Number of simplex searches, started from the best random candidates.
    pub restarts: usize,
    /// Number of seeded random directions screened before the searches.
    pub candidates: usize,
    pub simplex: SimplexOptions,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            bandwidth: Bandwidth::RuleOfThumb,
            per_candidate_bandwidth: true,
            leave_one_out: false,
            seed: 0,
            restarts: 8,
            candidates: 64,
            simplex: SimplexOptions::default(),
        }
    }
}

/// A fitted single-index regression.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexFit {
    gamma: Vec<f64>,
    bandwidth: f64,
    index: Vec<f64>,
    centered: Array2<f64>,
    response: Vec<f64>,
    loss: f64,
    leave_one_out: bool,
    zero_index: Option<usize>,
}

impl IndexFit {
    /// Unit-norm index direction.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    /// Training index values `X_i^T gamma`.
    pub fn index(&self) -> &[f64] {
        &self.index
    }

    /// Column-centered training features.
    pub fn centered(&self) -> &Array2<f64> {
        &self.centered
    }

    /// Pooled squared loss at the fitted direction.
    pub fn loss(&self) -> f64 {
        self.loss
    }

    pub fn leave_one_out(&self) -> bool {
        self.leave_one_out
    }

    /// Coefficient held at zero, if the fit was constrained.
    pub fn zero_index(&self) -> Option<usize> {
        self.zero_index
    }

    pub fn n(&self) -> usize {
        self.index.len()
    }

    /// Shared link estimate at index value `u`. The kernel ratio is linear in
    /// the responses, so this equals the average over columns of the per-column
    /// estimates.
    pub fn link(&self, u: f64) -> Result<f64> {
        nadaraya_watson(&self.index, &self.response, self.bandwidth, u)
    }

    /// Link estimate of feature column `j` alone.
    pub fn link_column(&self, u: f64, j: usize) -> Result<f64> {
        if j >= self.centered.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "column {j} of {}",
                self.centered.ncols()
            )));
        }
        let column = self.centered.column(j).to_vec();
        nadaraya_watson(&self.index, &column, self.bandwidth, u)
    }

    /// Link at covariate row `x`.
    pub fn link_at(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.gamma.len() {
            return Err(Error::DimensionMismatch(format!(
                "covariate row of length {}, expected {}",
                x.len(),
                self.gamma.len()
            )));
        }
        self.link(x.iter().zip(&self.gamma).map(|(a, b)| a * b).sum())
    }

    /// Link values at the training points (leaving each out if so configured).
    pub fn fitted(&self) -> Result<Vec<f64>> {
        (0..self.n())
            .map(|i| {
                let skip = self.leave_one_out.then_some(i);
                nadaraya_watson_excluding(
                    &self.index,
                    &self.response,
                    self.bandwidth,
                    self.index[i],
                    skip,
                )
            })
            .collect()
    }
}

/// Centered features minus the fitted link, row by row.
pub fn residuals(fit: &IndexFit) -> Result<Array2<f64>> {
    let fitted = fit.fitted()?;
    let mut out = fit.centered.clone();
    for (mut row, f) in out.rows_mut().into_iter().zip(fitted) {
        row.mapv_inplace(|v| v - f);
    }
    Ok(out)
}

struct Profile<'a> {
    centered: &'a Array2<f64>,
    response: Vec<f64>,
    covariates: &'a Covariates,
    options: &'a IndexOptions,
    fixed_bandwidth: Option<f64>,
}

impl<'a> Profile<'a> {
    fn new(
        centered: &'a Array2<f64>,
        covariates: &'a Covariates,
        options: &'a IndexOptions,
    ) -> Self {
        let response = centered
            .rows()
            .into_iter()
            .map(|r| r.mean().unwrap_or(0.0))
            .collect();
        let n = centered.nrows();
        let fixed_bandwidth = match options.bandwidth {
            Bandwidth::Fixed(h) => Some(h),
            Bandwidth::Scaled(c) => Some(rule_of_thumb(c, n)),
            Bandwidth::RuleOfThumb if !options.per_candidate_bandwidth => {
                let d = covariates.ncols();
                let equal = vec![1.0 / (d as f64).sqrt(); d];
                Some(rule_of_thumb(std_dev(&covariates.project(&equal)), n))
            }
            Bandwidth::RuleOfThumb => None,
        };
        Profile {
            centered,
            response,
            covariates,
            options,
            fixed_bandwidth,
        }
    }

    fn bandwidth(&self, index: &[f64]) -> f64 {
        self.fixed_bandwidth
            .unwrap_or_else(|| rule_of_thumb(std_dev(index), index.len()))
    }

    /// Kernel-smoothed shared response at every training point, `O(n^2)`.
    fn smooth(&self, index: &[f64], h: f64) -> Option<Vec<f64>> {
        let n = index.len();
        let mut num = vec![0.0; n];
        let mut den = vec![0.0; n];
        let own = if self.options.leave_one_out {
            0.0
        } else {
            gaussian(0.0)
        };
        for i in 0..n {
            num[i] += own * self.response[i];
            den[i] += own;
            for k in i + 1..n {
                let w = gaussian((index[i] - index[k]) / h);
                num[i] += w * self.response[k];
                den[i] += w;
                num[k] += w * self.response[i];
                den[k] += w;
            }
        }
        num.iter()
            .zip(&den)
            .map(|(a, b)| (*b > super::DENOMINATOR_FLOOR).then(|| a / b))
            .collect()
    }

    fn loss(&self, gamma: &[f64]) -> f64 {
        let index = self.covariates.project(gamma);
        let h = self.bandwidth(&index);
        if !(h > 0.0 && h.is_finite()) {
            return f64::INFINITY;
        }
        let Some(fitted) = self.smooth(&index, h) else {
            return f64::INFINITY;
        };
        self.centered
            .rows()
            .into_iter()
            .zip(&fitted)
            .map(|(row, f)| row.iter().map(|c| (c - f) * (c - f)).sum::<f64>())
            .sum()
    }
}

fn embed(free: &[usize], d: usize, sub: &[f64]) -> Vec<f64> {
    let mut gamma = vec![0.0; d];
    for (&k, &v) in free.iter().zip(sub) {
        gamma[k] = v;
    }
    gamma
}

fn canonical_sign(gamma: &mut [f64]) {
    if let Some(first) = gamma.iter().find(|g| **g != 0.0) {
        if *first < 0.0 {
            gamma.iter_mut().for_each(|g| *g = -*g);
        }
    }
}

fn validate(features: &Array2<f64>, covariates: &Covariates) -> Result<()> {
    let (n, d) = (features.nrows(), covariates.ncols());
    if covariates.nrows() != n {
        return Err(Error::DimensionMismatch(format!(
            "{n} feature rows but {} covariate rows",
            covariates.nrows()
        )));
    }
    if n <= d {
        return Err(Error::EmptyInput(format!(
            "need more regions ({n}) than covariates ({d})"
        )));
    }
    if let Some(pos) = features.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput(pos));
    }
    covariates.check_variance()
}

fn search(profile: &Profile<'_>, free: &[usize]) -> Result<Vec<f64>> {
    let d = profile.covariates.ncols();
    let m = free.len();
    if m == 1 {
        return Ok(embed(free, d, &[1.0]));
    }
    let opts = profile.options;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut screened: Vec<(Vec<f64>, f64)> = (0..opts.candidates.max(opts.restarts).max(1))
        .map(|_| {
            let mut v: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            let loss = profile.loss(&embed(free, d, &v));
            (v, loss)
        })
        .collect();
    screened.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut best: Option<(Vec<f64>, f64)> = None;
    for (start, _) in screened.iter().take(opts.restarts.max(1)) {
        let (angles, loss) = nelder_mead(
            |a| profile.loss(&embed(free, d, &angles_to_unit(a))),
            &unit_to_angles(start),
            &opts.simplex,
        );
        if loss.is_finite() && best.as_ref().is_none_or(|b| loss < b.1) {
            best = Some((angles_to_unit(&angles), loss));
        }
    }
    let (sub, _) = best.ok_or(Error::OptimizerFailure)?;
    Ok(embed(free, d, &sub))
}

fn fit_on(
    features: &Array2<f64>,
    covariates: &Covariates,
    options: &IndexOptions,
    zero_index: Option<usize>,
) -> Result<IndexFit> {
    validate(features, covariates)?;
    let centered = center_features(features)?;
    let profile = Profile::new(&centered, covariates, options);
    let d = covariates.ncols();
    let free: Vec<usize> = (0..d).filter(|k| Some(*k) != zero_index).collect();
    let mut gamma = search(&profile, &free)?;
    canonical_sign(&mut gamma);
    let loss = profile.loss(&gamma);
    if !loss.is_finite() {
        return Err(Error::OptimizerFailure);
    }
    let index = covariates.project(&gamma);
    let bandwidth = profile.bandwidth(&index);
    Ok(IndexFit {
        gamma,
        bandwidth,
        index,
        response: profile.response,
        centered,
        loss,
        leave_one_out: options.leave_one_out,
        zero_index,
    })
}

/// Profiled least-squares fit of the index direction.
pub fn fit_gamma(
    features: &Array2<f64>,
    covariates: &Covariates,
    options: &IndexOptions,
) -> Result<IndexFit> {
    fit_on(features, covariates, options, None)
}

/// As [`fit_gamma`] with coefficient `zero_index` held at zero.
pub fn fit_gamma_constrained(
    features: &Array2<f64>,
    covariates: &Covariates,
    options: &IndexOptions,
    zero_index: usize,
) -> Result<IndexFit> {
    let d = covariates.ncols();
    if d < 2 {
        return Err(Error::InvalidConstraint(
            "constraining a coefficient needs at least two covariates".into(),
        ));
    }
    if zero_index >= d {
        return Err(Error::InvalidConstraint(format!(
            "coefficient {zero_index} out of range for {d} covariates"
        )));
    }
    fit_on(features, covariates, options, Some(zero_index))
}

/// Pooled profile loss of raw `features` at direction `gamma`.
pub fn profile_loss(
    features: &Array2<f64>,
    covariates: &Covariates,
    gamma: &[f64],
    options: &IndexOptions,
) -> Result<f64> {
    validate(features, covariates)?;
    let centered = center_features(features)?;
    Ok(Profile::new(&centered, covariates, options).loss(gamma))
}
