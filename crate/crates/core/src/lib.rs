//! Diversity, evenness and concentration indices for topical discussion
//! networks, modelled as contributor → contribution-count tables.
//!
//! ```
//! use tdn_diversity::{metrics, FrequencyTable, SubsampleSpec};
//!
//! let table = FrequencyTable::from_counts([("alice", 2), ("bob", 1)]).unwrap();
//! let suite = metrics::suite(&table, SubsampleSpec::FULL);
//! assert!((suite.shannon_h - 0.636514).abs() < 1e-6);
//! assert!((suite.simpson_lambda - 5.0 / 9.0).abs() < 1e-15);
//! ```
//!
//! The `parallel` feature (on by default) runs the chunked reductions,
//! sharded ingestion and richness sweeps on a rayon pool. Results are
//! bit-identical with and without it.

pub mod error;
pub mod exec;
pub mod freqtable;
pub mod ingest;
pub mod metrics;
pub mod report;
pub mod simulate;
pub mod stats;
pub mod sum;

pub use error::{Error, Result};
pub use exec::Execution;
pub use freqtable::{
    Fraction, FrequencyTable, ProportionMode, ProportionView, Subsample, SubsampleSpec,
    TableSummary,
};
pub use metrics::{MetricKind, MetricSuite};
pub use report::AnalysisReport;
pub use stats::CorrelationResult;
