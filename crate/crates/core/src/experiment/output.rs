//! Writing experiment results to disk.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ExperimentConfig;
use super::run::{Dataset, ReplicationStreams};
use crate::error::{Error, Result};

pub const RECORDS_FILE: &str = "records.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const MANIFEST_FILE: &str = "manifest.toml";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmittedFiles {
    pub records: PathBuf,
    pub aggregate: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    code_version: String,
    rng: &'static str,
    seed: u64,
    streams: Vec<ReplicationStreams>,
    config: &'a ExperimentConfig,
}

/// `replication,t,policy,inst_regret,cum_regret[,realized_payoff]`, ordered by
/// policy, replication, then `t`.
pub fn records_csv(dataset: &Dataset) -> String {
    let log = dataset.config.log_realized;
    let mut out = String::from("replication,t,policy,inst_regret,cum_regret");
    out.push_str(if log { ",realized_payoff\n" } else { "\n" });
    let times = dataset.record_times();
    for run in &dataset.runs {
        let cum = run.cumulative();
        for &t in &times {
            let i = t as usize - 1;
            let _ = write!(
                out,
                "{},{},{},{},{}",
                run.replication, t, run.policy, run.inst_regret[i], cum[i]
            );
            if let Some(realized) = run.realized.as_ref().filter(|_| log) {
                let _ = write!(out, ",{}", realized[i]);
            }
            out.push('\n');
        }
    }
    out
}

/// `t,policy,mean_cum_regret,stderr`, ordered by policy then `t`.
pub fn aggregate_csv(dataset: &Dataset) -> String {
    let mut out = String::from("t,policy,mean_cum_regret,stderr\n");
    for row in dataset.aggregate() {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            row.t, row.policy, row.mean_cum_regret, row.stderr
        );
    }
    out
}

/// Code version, generator, per-replication stream ids and the effective
/// config. Passing the manifest back to the runner reproduces the run.
pub fn manifest_toml(dataset: &Dataset) -> String {
    let config = &dataset.config;
    let manifest = Manifest {
        code_version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        rng: "ChaCha8 seed_from_u64(seed), set_stream(stream)",
        seed: config.seed,
        streams: (0..config.replications)
            .map(|r| ReplicationStreams::for_replication(config, r))
            .collect(),
        config,
    };
    toml::to_string(&manifest).expect("manifest always serializes")
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

/// Writes the record table, aggregate table and manifest into `dir`,
/// creating it if needed.
pub fn emit_results(dataset: &Dataset, dir: &Path) -> Result<EmittedFiles> {
    if dataset.runs.is_empty() {
        return Err(Error::constraint(
            "nothing to write: the dataset has no runs",
        ));
    }
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(EmittedFiles {
        records: write(dir.join(RECORDS_FILE), &records_csv(dataset))?,
        aggregate: write(dir.join(AGGREGATE_FILE), &aggregate_csv(dataset))?,
        manifest: write(dir.join(MANIFEST_FILE), &manifest_toml(dataset))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::run::PolicyRun;

    fn config() -> ExperimentConfig {
        ExperimentConfig::from_toml_str(
            r#"
horizon = 1
replications = 1
seed = 3
[catalog]
messages = 1
revenue = { values = [1.0] }
[environment]
valuation = { values = [0.5] }
abandon_prob = 0.5
abandon_cost = 0.0
[[policy]]
name = "algorithm1"
"#,
        )
        .unwrap()
    }

    #[test]
    fn single_record_is_two_lines() {
        let ds = Dataset {
            config: config(),
            runs: vec![PolicyRun {
                policy: "algorithm1".into(),
                replication: 0,
                inst_regret: vec![0.25],
                realized: None,
            }],
        };
        assert_eq!(
            records_csv(&ds),
            "replication,t,policy,inst_regret,cum_regret\n0,1,algorithm1,0.25,0.25\n"
        );
        assert_eq!(
            aggregate_csv(&ds),
            "t,policy,mean_cum_regret,stderr\n1,algorithm1,0.25,0\n"
        );
    }

    #[test]
    fn empty_dataset_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let ds = Dataset {
            config: config(),
            runs: vec![],
        };
        assert!(emit_results(&ds, dir.path()).is_err());
    }

    #[test]
    fn manifest_round_trips_to_config() {
        let ds = Dataset {
            config: config(),
            runs: vec![],
        };
        let text = manifest_toml(&ds);
        assert!(text.contains("code_version"));
        assert_eq!(ExperimentConfig::from_toml_str(&text).unwrap(), ds.config);
    }
}
