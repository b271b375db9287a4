//! Running configured experiments and measuring regret.

use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, PolicyKind, PolicySpec, ValueSpec, STREAMS_PER_REPLICATION};
use crate::error::{Error, Result};
use crate::glm::{Algorithm2, ContextualBenchmark, ContextualPolicy};
use crate::learner::{Algorithm1, Benchmark, Exploration, SequencePolicy};
use crate::model::{payoff_unchecked, EnvironmentParams, MessageCatalog};
use crate::optimizer::optimal_unchecked;
use crate::simulator::{
    sample_episode, sample_features, stream_rng, ContextualEnvironment, FeatureSpec, SimRng,
};

const INSTANCE_STREAM: u64 = 0;
const FEATURE_STREAM: u64 = 1;
const FIRST_POLICY_STREAM: u64 = 2;

/// The RNG stream ids a replication draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplicationStreams {
    pub replication: u64,
    pub instance: u64,
    pub features: u64,
    /// Policy `k` uses `first_policy + k`.
    pub first_policy: u64,
}

impl ReplicationStreams {
    pub fn for_replication(config: &ExperimentConfig, replication: u64) -> Self {
        let base = replication * STREAMS_PER_REPLICATION;
        let instance_rep = if config.shared_instance {
            0
        } else {
            replication
        };
        Self {
            replication,
            instance: instance_rep * STREAMS_PER_REPLICATION + INSTANCE_STREAM,
            features: base + FEATURE_STREAM,
            first_policy: base + FIRST_POLICY_STREAM,
        }
    }
}

/// The ground truth of one replication.
#[derive(Debug, Clone, PartialEq)]
pub enum Truth {
    Plain(EnvironmentParams),
    Contextual(ContextualEnvironment),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub catalog: MessageCatalog,
    pub truth: Truth,
}

fn draw_values(spec: &ValueSpec, n: usize, rng: &mut SimRng) -> Vec<f64> {
    match spec {
        ValueSpec::Values(v) => v.clone(),
        ValueSpec::Uniform([lo, hi]) => (0..n).map(|_| draw_uniform(*lo, *hi, rng)).collect(),
    }
}

fn draw_uniform(lo: f64, hi: f64, rng: &mut SimRng) -> f64 {
    lo + (hi - lo) * rng.random::<f64>()
}

/// Draws the instance for `replication`: revenues first, then valuations
/// (plain) or per-message valuation coefficients (contextual).
pub fn draw_instance(config: &ExperimentConfig, replication: u64) -> Result<Instance> {
    let streams = ReplicationStreams::for_replication(config, replication);
    let mut rng = stream_rng(config.seed, streams.instance);
    let n = config.catalog.messages;
    let catalog = MessageCatalog::new(draw_values(&config.catalog.revenue, n, &mut rng))?;
    let truth = match (&config.environment, &config.contextual) {
        (Some(env), _) => {
            let u = draw_values(&env.valuation, n, &mut rng);
            Truth::Plain(EnvironmentParams::new(
                u,
                env.abandon_prob,
                env.abandon_cost,
            )?)
        }
        (None, Some(ctx)) => {
            let betas = (0..n)
                .map(|_| {
                    ctx.beta
                        .iter()
                        .map(|[lo, hi]| draw_uniform(*lo, *hi, &mut rng))
                        .collect()
                })
                .collect();
            let features =
                FeatureSpec::new(ctx.features.iter().map(|[lo, hi]| (*lo, *hi)).collect())?;
            Truth::Contextual(ContextualEnvironment::new(
                ctx.alpha.clone(),
                betas,
                ctx.abandon_cost,
                features,
            )?)
        }
        (None, None) => return Err(Error::Config("missing environment".into())),
    };
    Ok(Instance { catalog, truth })
}

/// Per-user regret of one policy in one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyRun {
    pub policy: String,
    pub replication: u64,
    /// `E[U(S*)] - E[U(S_t)]` for `t = 1..=T`, from exact expected payoffs.
    pub inst_regret: Vec<f64>,
    /// Payoff actually realized by each user, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub realized: Option<Vec<f64>>,
}

impl PolicyRun {
    pub fn cumulative(&self) -> Vec<f64> {
        self.inst_regret
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            })
            .collect()
    }

    /// Cumulative regret after `t` users.
    pub fn cumulative_at(&self, t: usize) -> f64 {
        self.inst_regret[..t].iter().sum()
    }
}

fn run_plain<P: SequencePolicy>(
    mut policy: P,
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    horizon: u64,
    rng: &mut SimRng,
    log_realized: bool,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let r = catalog.revenues();
    let (u, p, c) = (env.valuations(), env.abandon_prob(), env.abandon_cost());
    let best = payoff_unchecked(r, u, p, c, optimal_unchecked(r, u, p, c).as_slice());
    let mut regret = Vec::with_capacity(horizon as usize);
    let mut realized = log_realized.then(|| Vec::with_capacity(horizon as usize));
    for _ in 0..horizon {
        let (seq, outcome) = policy.step(|s| sample_episode(r, u, p, c, s.as_slice(), rng));
        regret.push(best - payoff_unchecked(r, u, p, c, seq.as_slice()));
        if let Some(v) = realized.as_mut() {
            v.push(outcome.payoff);
        }
    }
    (regret, realized)
}

#[allow(clippy::too_many_arguments)]
fn run_contextual<P: ContextualPolicy>(
    mut policy: P,
    catalog: &MessageCatalog,
    env: &ContextualEnvironment,
    horizon: u64,
    users: &mut SimRng,
    rng: &mut SimRng,
    log_realized: bool,
) -> Result<(Vec<f64>, Option<Vec<f64>>)> {
    let r = catalog.revenues();
    let c = env.abandon_cost();
    let mut regret = Vec::with_capacity(horizon as usize);
    let mut realized = log_realized.then(|| Vec::with_capacity(horizon as usize));
    for _ in 0..horizon {
        let x = sample_features(env.features(), users);
        let truth = env.params_at(&x)?;
        let (u, p) = (truth.valuations(), truth.abandon_prob());
        let best = payoff_unchecked(r, u, p, c, optimal_unchecked(r, u, p, c).as_slice());
        let (seq, outcome) = policy.step(&x, |s| sample_episode(r, u, p, c, s.as_slice(), rng))?;
        regret.push(best - payoff_unchecked(r, u, p, c, seq.as_slice()));
        if let Some(v) = realized.as_mut() {
            v.push(outcome.payoff);
        }
    }
    Ok((regret, realized))
}

/// Runs policy `index` of `config` on `instance` for one replication.
pub fn run_policy(
    config: &ExperimentConfig,
    instance: &Instance,
    index: usize,
    replication: u64,
) -> Result<PolicyRun> {
    let spec: &PolicySpec = config.policies.get(index).ok_or(Error::InvalidIndex {
        index,
        len: config.policies.len(),
    })?;
    let streams = ReplicationStreams::for_replication(config, replication);
    let mut rng = stream_rng(config.seed, streams.first_policy + index as u64);
    let (t, log) = (config.horizon, config.log_realized);
    let catalog = &instance.catalog;
    let (inst_regret, realized) = match &instance.truth {
        Truth::Plain(env) => {
            let c = env.abandon_cost();
            match spec.name {
                PolicyKind::Algorithm1 => {
                    run_plain(Algorithm1::new(catalog, c)?, catalog, env, t, &mut rng, log)
                }
                PolicyKind::Benchmark1 => run_plain(
                    Benchmark::benchmark1(catalog, c, spec.gamma())?,
                    catalog,
                    env,
                    t,
                    &mut rng,
                    log,
                ),
                PolicyKind::Benchmark2 => run_plain(
                    Benchmark::benchmark2(catalog, c, spec.gamma())?,
                    catalog,
                    env,
                    t,
                    &mut rng,
                    log,
                ),
                PolicyKind::Algorithm2 => {
                    return Err(Error::Config(
                        "algorithm2 needs the contextual setting".into(),
                    ))
                }
            }
        }
        Truth::Contextual(env) => {
            let (c, d, settings) = (env.abandon_cost(), env.dim(), spec.glm_settings());
            let mut users = stream_rng(config.seed, streams.features);
            let bench = |e| ContextualBenchmark::new(catalog, c, d, spec.gamma(), e, settings);
            match spec.name {
                PolicyKind::Algorithm2 => run_contextual(
                    Algorithm2::new(catalog, c, d, settings)?,
                    catalog,
                    env,
                    t,
                    &mut users,
                    &mut rng,
                    log,
                )?,
                PolicyKind::Benchmark1 => run_contextual(
                    bench(Exploration::Singleton)?,
                    catalog,
                    env,
                    t,
                    &mut users,
                    &mut rng,
                    log,
                )?,
                PolicyKind::Benchmark2 => run_contextual(
                    bench(Exploration::FixedHead)?,
                    catalog,
                    env,
                    t,
                    &mut users,
                    &mut rng,
                    log,
                )?,
                PolicyKind::Algorithm1 => {
                    return Err(Error::Config("algorithm1 needs the plain setting".into()))
                }
            }
        }
    };
    Ok(PolicyRun {
        policy: spec.label().to_string(),
        replication,
        inst_regret,
        realized,
    })
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub parallelism: Option<usize>,
    /// Finished (replication, policy) runs are saved here and reused on restart.
    pub checkpoint_dir: Option<PathBuf>,
}

/// All runs of an experiment, ordered by policy (config order), then replication.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub config: ExperimentConfig,
    pub runs: Vec<PolicyRun>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t: u64,
    pub policy: String,
    pub mean_cum_regret: f64,
    pub stderr: f64,
}

impl Dataset {
    /// Users whose rows are emitted: multiples of `record_every`, plus the last.
    pub fn record_times(&self) -> Vec<u64> {
        let (t_max, k) = (self.config.horizon, self.config.record_every);
        let mut times: Vec<u64> = (1..=t_max / k).map(|i| i * k).collect();
        if times.last() != Some(&t_max) {
            times.push(t_max);
        }
        times
    }

    pub fn runs_for<'a>(&'a self, policy: &'a str) -> impl Iterator<Item = &'a PolicyRun> + 'a {
        self.runs.iter().filter(move |r| r.policy == policy)
    }

    /// Cumulative regret at the horizon, one value per replication.
    pub fn final_regrets(&self, policy: &str) -> Vec<f64> {
        self.runs_for(policy)
            .map(|r| r.inst_regret.iter().sum())
            .collect()
    }

    pub fn mean_final_regret(&self, policy: &str) -> f64 {
        let v = self.final_regrets(policy);
        v.iter().sum::<f64>() / v.len() as f64
    }

    /// Mean and standard error of cumulative regret across replications at
    /// each record time, grouped by policy.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let times = self.record_times();
        let mut rows = Vec::new();
        for spec in &self.config.policies {
            let label = spec.label();
            let cums: Vec<Vec<f64>> = self.runs_for(label).map(PolicyRun::cumulative).collect();
            let n = cums.len() as f64;
            for &t in &times {
                let vals: Vec<f64> = cums.iter().map(|c| c[t as usize - 1]).collect();
                let mean = vals.iter().sum::<f64>() / n;
                let stderr = if vals.len() > 1 {
                    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
                    (var / n).sqrt()
                } else {
                    0.0
                };
                rows.push(AggregateRow {
                    t,
                    policy: label.to_string(),
                    mean_cum_regret: mean,
                    stderr,
                });
            }
        }
        rows
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    config: String,
    run: PolicyRun,
}

fn checkpoint_path(dir: &Path, replication: u64, label: &str) -> PathBuf {
    dir.join(format!("rep{replication:05}-{label}.json"))
}

fn load_checkpoint(path: &Path, config_text: &str) -> Option<PolicyRun> {
    let text = std::fs::read_to_string(path).ok()?;
    let cp: Checkpoint = serde_json::from_str(&text).ok()?;
    (cp.config == config_text).then_some(cp.run)
}

fn save_checkpoint(path: &Path, config_text: &str, run: &PolicyRun) -> Result<()> {
    let cp = Checkpoint {
        config: config_text.to_string(),
        run: run.clone(),
    };
    let text = serde_json::to_string(&cp).map_err(|e| Error::constraint(e.to_string()))?;
    let tmp = path.with_extension("json.tmp");
    std::fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Runs every (replication, policy) pair. Results depend only on the config,
/// not on `parallelism` or on resumption from checkpoints.
pub fn run_experiment(config: &ExperimentConfig, options: &RunOptions) -> Result<Dataset> {
    config.validate()?;
    let config_text = config.to_toml_string();
    if let Some(dir) = &options.checkpoint_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let instances: Vec<Instance> = (0..config.replications)
        .map(|rep| draw_instance(config, rep))
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, u64)> = (0..config.policies.len())
        .flat_map(|k| (0..config.replications).map(move |rep| (k, rep)))
        .collect();
    let work = || {
        tasks
            .par_iter()
            .map(|&(k, rep)| {
                let label = config.policies[k].label();
                let path = options
                    .checkpoint_dir
                    .as_deref()
                    .map(|d| checkpoint_path(d, rep, label));
                if let Some(run) = path
                    .as_deref()
                    .and_then(|p| load_checkpoint(p, &config_text))
                {
                    return Ok(run);
                }
                let run = run_policy(config, &instances[rep as usize], k, rep)?;
                if let Some(p) = &path {
                    save_checkpoint(p, &config_text, &run)?;
                }
                Ok(run)
            })
            .collect::<Result<Vec<_>>>()
    };
    let runs = match options.parallelism {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::constraint(format!("cannot build thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    Ok(Dataset {
        config: config.clone(),
        runs,
    })
}
