use crate::error::{Error, Result};
use crate::npmix::Partition;
use crate::sindex::{std_dev, CovariateEffect};
use crate::wavelet::Curve;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterStats {
    /// Rank by mean adjusted total, starting at 1.
    pub cluster: usize,
    /// Label in the input partition.
    pub source_label: usize,
    pub size: usize,
    pub proportion: f64,
    /// Mean and sd of per-region totals of the effect-adjusted curves.
    pub total_mean: f64,
    pub total_sd: f64,
    pub effect_mean: f64,
    pub effect_sd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSummary {
    pub clusters: Vec<ClusterStats>,
}

impl ClusterSummary {
    /// Maps an input label to its ordered cluster number.
    pub fn relabel(&self, source_label: usize) -> Option<usize> {
        self.clusters
            .iter()
            .find(|c| c.source_label == source_label)
            .map(|c| c.cluster)
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Per-cluster statistics, clusters ordered by increasing mean adjusted total.
///
/// Every label in `1..=max label` must be used.
pub fn cluster_summary(
    partition: &Partition,
    curves: &[Curve],
    effect: &CovariateEffect,
) -> Result<ClusterSummary> {
    let n = partition.len();
    if curves.len() != n {
        return Err(Error::LengthMismatch(n, curves.len()));
    }
    if effect.values.len() != n {
        return Err(Error::LengthMismatch(n, effect.values.len()));
    }
    if n == 0 {
        return Err(Error::EmptyInput("empty partition".into()));
    }
    let max_label = partition.labels().iter().copied().max().unwrap_or(0);
    let mut clusters = Vec::new();
    for label in 1..=max_label {
        let members: Vec<usize> = (0..n).filter(|&i| partition.labels()[i] == label).collect();
        if members.is_empty() {
            return Err(Error::EmptyCluster(label));
        }
        let totals: Vec<f64> = members
            .iter()
            .map(|&i| curves[i].values().iter().sum::<f64>() / effect.values[i])
            .collect();
        let effects: Vec<f64> = members.iter().map(|&i| effect.values[i]).collect();
        clusters.push(ClusterStats {
            cluster: 0,
            source_label: label,
            size: members.len(),
            proportion: members.len() as f64 / n as f64,
            total_mean: mean(&totals),
            total_sd: std_dev(&totals),
            effect_mean: mean(&effects),
            effect_sd: std_dev(&effects),
        });
    }
    clusters.sort_by(|a, b| a.total_mean.total_cmp(&b.total_mean));
    for (k, c) in clusters.iter_mut().enumerate() {
        c.cluster = k + 1;
    }
    Ok(ClusterSummary { clusters })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curves(totals: &[f64]) -> Vec<Curve> {
        totals
            .iter()
            .map(|t| Curve::new(vec![t / 4.0; 4]).unwrap())
            .collect()
    }

    #[test]
    fn single_cluster_matches_globals() {
        let c = curves(&[4.0, 8.0, 12.0]);
        let s = cluster_summary(&Partition(vec![1, 1, 1]), &c, &CovariateEffect::unit(3)).unwrap();
        assert_eq!(s.clusters.len(), 1);
        assert_eq!(s.clusters[0].proportion, 1.0);
        assert!((s.clusters[0].total_mean - 8.0).abs() < 1e-12);
        assert!((s.clusters[0].total_sd - 4.0).abs() < 1e-12);
        assert_eq!(s.clusters[0].effect_mean, 1.0);
    }

    #[test]
    fn ordering_is_canonical() {
        let c = curves(&[100.0, 1.0, 110.0, 2.0]);
        let eff = CovariateEffect::unit(4);
        let a = cluster_summary(&Partition(vec![1, 2, 1, 2]), &c, &eff).unwrap();
        let b = cluster_summary(&Partition(vec![2, 1, 2, 1]), &c, &eff).unwrap();
        let strip = |s: &ClusterSummary| -> Vec<(usize, f64, f64)> {
            s.clusters
                .iter()
                .map(|c| (c.cluster, c.total_mean, c.proportion))
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
        assert_eq!(a.relabel(2), Some(1));
        assert_eq!(b.relabel(2), Some(2));
    }

    #[test]
    fn errors() {
        let c = curves(&[1.0, 2.0]);
        assert_eq!(
            cluster_summary(&Partition(vec![1, 3]), &c, &CovariateEffect::unit(2)).unwrap_err(),
            Error::EmptyCluster(2)
        );
        assert!(matches!(
            cluster_summary(&Partition(vec![1]), &c, &CovariateEffect::unit(1)),
            Err(Error::LengthMismatch(..))
        ));
    }
}
