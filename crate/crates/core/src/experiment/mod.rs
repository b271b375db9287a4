//! Configured regret experiments: instance generation, policy runs,
//! aggregation and result files.

mod config;
mod output;
mod run;

pub use config::{
    CatalogSpec, ContextualSpec, EnvironmentSpec, ExperimentConfig, PolicyKind, PolicySpec,
    ValueSpec,
};
pub use output::{
    aggregate_csv, emit_results, manifest_toml, records_csv, EmittedFiles, AGGREGATE_FILE,
    MANIFEST_FILE, RECORDS_FILE,
};
pub use run::{
    draw_instance, run_experiment, run_policy, AggregateRow, Dataset, Instance, PolicyRun,
    ReplicationStreams, RunOptions, Truth,
};
