//! Experiment configuration files (TOML).
//!
//! ```toml
//! horizon = 100000          # users per run
//! replications = 15
//! seed = 2024
//! shared_instance = false   # optional: one instance for all replications
//! record_every = 1          # optional: stride of emitted rows
//! log_realized = false      # optional: add a realized-payoff column
//!
//! [catalog]
//! messages = 30
//! revenue = { uniform = [0.0, 1.0] }      # or { values = [...] }
//!
//! [environment]                          # plain setting ...
//! valuation = { uniform = [0.0, 0.1] }
//! abandon_prob = 0.1
//! abandon_cost = 0.5
//!
//! # [contextual]                         # ... or contextual setting
//! # alpha = [0.25, 0.5, 1.0, 0.8]
//! # beta = [[-2.5, 0.0], [-2.5, 0.0], [0.0, 0.5], [0.0, 0.5]]
//! # features = [[0.0, 1.0], [0.0, 1.0], [0.0, 1.0]]
//! # abandon_cost = 0.5
//!
//! [[policy]]
//! name = "algorithm1"       # algorithm1 | algorithm2 | benchmark1 | benchmark2
//! # label = "..."  gamma = 1.0  lambda = 1.0  lambda_prime = 1.0
//! # refit = "adaptive" | "every_step"
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::{GlmSettings, RefitSchedule, DEFAULT_LAMBDA};
use crate::learner::DEFAULT_GAMMA;

/// Stream ids reserved per replication; policy `k` uses `2 + k`.
pub(crate) const STREAMS_PER_REPLICATION: u64 = 64;
pub(crate) const MAX_POLICIES: usize = (STREAMS_PER_REPLICATION - 2) as usize;

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub horizon: u64,
    pub replications: u64,
    pub seed: u64,
    #[serde(default)]
    pub shared_instance: bool,
    #[serde(default = "one")]
    pub record_every: u64,
    #[serde(default)]
    pub log_realized: bool,
    pub catalog: CatalogSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub environment: Option<EnvironmentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contextual: Option<ContextualSpec>,
    #[serde(rename = "policy")]
    pub policies: Vec<PolicySpec>,
}

/// A list of values given explicitly or drawn i.i.d. uniform on `[lo, hi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ValueSpec {
    Uniform([f64; 2]),
    Values(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogSpec {
    pub messages: usize,
    pub revenue: ValueSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    pub valuation: ValueSpec,
    pub abandon_prob: f64,
    pub abandon_cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContextualSpec {
    /// Continue-probability coefficients; `alpha[0]` is the intercept.
    pub alpha: Vec<f64>,
    /// Per-coordinate ranges the valuation coefficients are drawn from.
    pub beta: Vec<[f64; 2]>,
    /// Ranges of the non-intercept features.
    pub features: Vec<[f64; 2]>,
    pub abandon_cost: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    Algorithm1,
    Algorithm2,
    Benchmark1,
    Benchmark2,
}

impl PolicyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Algorithm1 => "algorithm1",
            PolicyKind::Algorithm2 => "algorithm2",
            PolicyKind::Benchmark1 => "benchmark1",
            PolicyKind::Benchmark2 => "benchmark2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub name: PolicyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refit: Option<RefitSchedule>,
}

impl PolicySpec {
    pub fn new(name: PolicyKind) -> Self {
        Self {
            name,
            label: None,
            gamma: None,
            lambda: None,
            lambda_prime: None,
            refit: None,
        }
    }

    /// Column value in output tables: the label, or the policy name.
    pub fn label(&self) -> &str {
        self.label.as_deref().unwrap_or(self.name.as_str())
    }

    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(DEFAULT_GAMMA)
    }

    pub fn glm_settings(&self) -> GlmSettings {
        GlmSettings {
            lambda: self.lambda.unwrap_or(DEFAULT_LAMBDA),
            lambda_prime: self.lambda_prime.unwrap_or(DEFAULT_LAMBDA),
            refit: self.refit.unwrap_or_default(),
        }
    }
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check_range(what: &str, [lo, hi]: [f64; 2]) -> Result<()> {
    if !lo.is_finite() || !hi.is_finite() || lo > hi {
        return Err(config_err(format!(
            "{what}: range [{lo}, {hi}] is empty or not finite"
        )));
    }
    Ok(())
}

fn check_values(
    what: &str,
    spec: &ValueSpec,
    n: usize,
    ok: impl Fn(f64) -> bool,
    rule: &str,
) -> Result<()> {
    match spec {
        ValueSpec::Uniform(range) => {
            check_range(what, *range)?;
            // [lo, hi) never yields hi unless the range is a point
            let top_ok = if range[0] == range[1] {
                ok(range[1])
            } else {
                ok(range[0]) && (ok(range[1]) || range[1] == 1.0)
            };
            if !top_ok {
                return Err(config_err(format!(
                    "{what}: range {range:?} must satisfy {rule}"
                )));
            }
        }
        ValueSpec::Values(v) => {
            if v.len() != n {
                return Err(config_err(format!(
                    "{what}: {} values for {n} messages",
                    v.len()
                )));
            }
            if let Some(x) = v.iter().find(|x| !ok(**x)) {
                return Err(config_err(format!("{what}: value {x} must satisfy {rule}")));
            }
        }
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let mut table: toml::Table = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        // A run manifest carries the effective config under [config].
        if table.contains_key("code_version") {
            match table.remove("config") {
                Some(toml::Value::Table(t)) => table = t,
                _ => return Err(config_err("manifest has no [config] table")),
            }
        }
        let config: Self = table
            .try_into()
            .map_err(|e: toml::de::Error| config_err(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    pub fn is_contextual(&self) -> bool {
        self.contextual.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon < 1 {
            return Err(config_err("horizon must be at least 1"));
        }
        if self.replications < 1 {
            return Err(config_err("replications must be at least 1"));
        }
        if self.record_every < 1 {
            return Err(config_err("record_every must be at least 1"));
        }
        let n = self.catalog.messages;
        if n < 1 {
            return Err(config_err("catalog needs at least one message"));
        }
        check_values(
            "catalog.revenue",
            &self.catalog.revenue,
            n,
            |r| r.is_finite() && r >= 0.0,
            "finite and >= 0",
        )?;
        match (&self.environment, &self.contextual) {
            (Some(env), None) => {
                check_values(
                    "environment.valuation",
                    &env.valuation,
                    n,
                    |u| (0.0..1.0).contains(&u),
                    "0 <= u < 1",
                )?;
                if !(0.0..=1.0).contains(&env.abandon_prob) {
                    return Err(config_err("environment.abandon_prob must lie in [0, 1]"));
                }
                if !(env.abandon_cost.is_finite() && env.abandon_cost >= 0.0) {
                    return Err(config_err(
                        "environment.abandon_cost must be finite and >= 0",
                    ));
                }
            }
            (None, Some(ctx)) => {
                let d = ctx.features.len() + 1;
                for (j, r) in ctx.features.iter().enumerate() {
                    check_range(&format!("contextual.features[{j}]"), *r)?;
                }
                if ctx.alpha.len() != d {
                    return Err(config_err(format!(
                        "contextual.alpha has {} coefficients, features need {d} (intercept first)",
                        ctx.alpha.len()
                    )));
                }
                if ctx.alpha.iter().any(|a| !a.is_finite()) {
                    return Err(config_err("contextual.alpha must be finite"));
                }
                if ctx.beta.len() != d {
                    return Err(config_err(format!(
                        "contextual.beta has {} ranges, features need {d}",
                        ctx.beta.len()
                    )));
                }
                for (j, r) in ctx.beta.iter().enumerate() {
                    check_range(&format!("contextual.beta[{j}]"), *r)?;
                }
                if !(ctx.abandon_cost.is_finite() && ctx.abandon_cost >= 0.0) {
                    return Err(config_err(
                        "contextual.abandon_cost must be finite and >= 0",
                    ));
                }
            }
            (Some(_), Some(_)) => {
                return Err(config_err(
                    "give either [environment] or [contextual], not both",
                ))
            }
            (None, None) => {
                return Err(config_err("missing [environment] or [contextual] section"))
            }
        }
        if self.policies.is_empty() {
            return Err(config_err("at least one [[policy]] is required"));
        }
        if self.policies.len() > MAX_POLICIES {
            return Err(config_err(format!(
                "at most {MAX_POLICIES} policies per experiment"
            )));
        }
        let mut labels = std::collections::BTreeSet::new();
        for p in &self.policies {
            if !labels.insert(p.label()) {
                return Err(config_err(format!(
                    "duplicate policy label {:?}",
                    p.label()
                )));
            }
            if p.label().is_empty() || p.label().contains([',', '\n', '"']) {
                return Err(config_err(format!(
                    "policy label {:?} must be nonempty without commas or quotes",
                    p.label()
                )));
            }
            match (p.name, self.is_contextual()) {
                (PolicyKind::Algorithm1, true) => {
                    return Err(config_err(
                        "algorithm1 needs the plain [environment] setting",
                    ))
                }
                (PolicyKind::Algorithm2, false) => {
                    return Err(config_err("algorithm2 needs the [contextual] setting"))
                }
                _ => {}
            }
            if let Some(g) = p.gamma {
                if !(g > 0.0 && g.is_finite()) {
                    return Err(config_err(format!("{}: gamma must be positive", p.label())));
                }
            }
            for (key, v) in [("lambda", p.lambda), ("lambda_prime", p.lambda_prime)] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(config_err(format!("{}: {key} must be positive", p.label())));
                    }
                }
            }
        }
        Ok(())
    }
}
