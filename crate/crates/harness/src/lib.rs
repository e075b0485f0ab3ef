//! Experiment engine, data ingestion and reports for the `cojump` tests.

pub mod analyze;
pub mod config;
pub mod error;
pub mod experiment;
pub mod ingest;
pub mod report;

pub use analyze::{analyze_day, analyze_days, AnalyzeSettings, DayOutcome, DayResult, SkipReason};
pub use config::{ExperimentSpec, MethodSelection, ScenarioSpec, TestSettings};
pub use error::{HarnessError, Result};
pub use experiment::{run_experiment, ExperimentResult, ReplicationRecord, TestKind};
pub use ingest::{ingest_csv, read_days, Columns, DayData, IngestError, InputFormat};
pub use report::{category_counts, format_skipped, format_table2, rows_from_results, Table2Row, TABLE2_HEADER};
