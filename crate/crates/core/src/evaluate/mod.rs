//! Scoring, ablation variants, the simulation benchmark and per-cluster summaries.

mod ari;
mod benchmark;
mod summary;
mod variants;

pub use ari::ari;
pub use benchmark::{
    benchmark, median, quantile, score_replicate, summarize, write_benchmark_csv,
    write_summary_csv, BenchmarkPlan, BenchmarkRow, SummaryRow, BENCHMARK_HEADER,
};
pub use summary::{cluster_summary, ClusterStats, ClusterSummary};
pub use variants::{prepare_variant, run_variant, Method, Prepared, StageOptions, VariantOutcome};
