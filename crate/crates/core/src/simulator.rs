//! Episode sampling for plain and contextual users.
//!
//! Randomness comes from [`stream_rng`]: ChaCha8 keyed by a 64-bit seed with
//! the 64-bit stream id selecting an independent substream. Golden outputs
//! depend on this choice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::glm::logistic_link;
use crate::model::{EnvironmentParams, MessageCatalog, Sequence};

pub type SimRng = ChaCha8Rng;

/// Deterministic generator for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Terminal {
    Accepted(usize),
    Abandoned,
    Exhausted,
}

/// One user's interaction with an offered sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeOutcome {
    /// Prefix of the offered sequence the user actually saw.
    pub shown: Vec<usize>,
    pub terminal: Terminal,
    /// `r_i` on acceptance, `-c` on abandonment, 0 otherwise.
    pub payoff: f64,
}

impl EpisodeOutcome {
    /// Shown messages refused without abandoning.
    pub fn skips(&self) -> usize {
        match self.terminal {
            Terminal::Exhausted => self.shown.len(),
            Terminal::Accepted(_) | Terminal::Abandoned => self.shown.len().saturating_sub(1),
        }
    }

    pub fn abandoned(&self) -> bool {
        self.terminal == Terminal::Abandoned
    }

    pub fn accepted(&self) -> Option<usize> {
        match self.terminal {
            Terminal::Accepted(i) => Some(i),
            _ => None,
        }
    }
}

/// Walks `seq` position by position: accept with `u`, else abandon with
/// `1 - q`, else continue.
pub(crate) fn sample_episode<R: Rng + ?Sized>(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
    seq: &[usize],
    rng: &mut R,
) -> EpisodeOutcome {
    let mut shown = Vec::with_capacity(seq.len());
    for &i in seq {
        shown.push(i);
        if rng.random::<f64>() < valuations[i] {
            return EpisodeOutcome {
                shown,
                terminal: Terminal::Accepted(i),
                payoff: revenues[i],
            };
        }
        if rng.random::<f64>() < abandon_prob {
            return EpisodeOutcome {
                shown,
                terminal: Terminal::Abandoned,
                payoff: -cost,
            };
        }
    }
    EpisodeOutcome {
        shown,
        terminal: Terminal::Exhausted,
        payoff: 0.0,
    }
}

pub fn run_episode<R: Rng + ?Sized>(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    seq: &Sequence,
    rng: &mut R,
) -> Result<EpisodeOutcome> {
    env.check_catalog(catalog)?;
    seq.validate(catalog.len())?;
    Ok(sample_episode(
        catalog.revenues(),
        env.valuations(),
        env.abandon_prob(),
        env.abandon_cost(),
        seq.as_slice(),
        rng,
    ))
}

/// Box from which user features are drawn. A feature vector is
/// `(1, z_1, ..., z_k)` with `z_j` uniform on `ranges[j]`; the leading 1 is
/// the intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    ranges: Vec<(f64, f64)>,
}

impl FeatureSpec {
    pub fn new(ranges: Vec<(f64, f64)>) -> Result<Self> {
        for (j, &(lo, hi)) in ranges.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::constraint(format!(
                    "feature range {j} = [{lo}, {hi}] is empty or invalid"
                )));
            }
        }
        Ok(Self { ranges })
    }

    /// Unit box `[0, 1]^k`.
    pub fn unit_box(k: usize) -> Self {
        Self {
            ranges: vec![(0.0, 1.0); k],
        }
    }

    /// Feature dimension including the intercept.
    pub fn dim(&self) -> usize {
        self.ranges.len() + 1
    }

    pub fn ranges(&self) -> &[(f64, f64)] {
        &self.ranges
    }
}

pub fn sample_features<R: Rng + ?Sized>(spec: &FeatureSpec, rng: &mut R) -> Vec<f64> {
    let mut x = Vec::with_capacity(spec.dim());
    x.push(1.0);
    for &(lo, hi) in &spec.ranges {
        x.push(lo + (hi - lo) * rng.random::<f64>());
    }
    x
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Users whose continue probability and valuations are logistic in their
/// features: `q(x) = mu(alpha . x)`, `u_i(x) = mu(beta_i . x)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContextualEnvironment {
    alpha: Vec<f64>,
    betas: Vec<Vec<f64>>,
    abandon_cost: f64,
    features: FeatureSpec,
}

impl ContextualEnvironment {
    pub fn new(
        alpha: Vec<f64>,
        betas: Vec<Vec<f64>>,
        abandon_cost: f64,
        features: FeatureSpec,
    ) -> Result<Self> {
        let d = features.dim();
        if alpha.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: alpha.len(),
            });
        }
        if let Some(b) = betas.iter().find(|b| b.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: b.len(),
            });
        }
        if alpha
            .iter()
            .chain(betas.iter().flatten())
            .any(|v| !v.is_finite())
        {
            return Err(Error::constraint("coefficients must be finite"));
        }
        if !abandon_cost.is_finite() || abandon_cost < 0.0 {
            return Err(Error::constraint(
                "abandonment cost must be finite and nonnegative",
            ));
        }
        Ok(Self {
            alpha,
            betas,
            abandon_cost,
            features,
        })
    }

    pub fn dim(&self) -> usize {
        self.features.dim()
    }

    pub fn num_messages(&self) -> usize {
        self.betas.len()
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[Vec<f64>] {
        &self.betas
    }

    pub fn abandon_cost(&self) -> f64 {
        self.abandon_cost
    }

    pub fn features(&self) -> &FeatureSpec {
        &self.features
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn continue_prob_at(&self, x: &[f64]) -> Result<f64> {
        self.check_x(x)?;
        Ok(logistic_link(dot(&self.alpha, x)))
    }

    pub fn valuations_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_x(x)?;
        Ok(self
            .betas
            .iter()
            .map(|b| logistic_link(dot(b, x)))
            .collect())
    }

    /// The plain-model parameters a user with features `x` behaves under.
    pub fn params_at(&self, x: &[f64]) -> Result<EnvironmentParams> {
        let q = self.continue_prob_at(x)?;
        EnvironmentParams::new(self.valuations_at(x)?, 1.0 - q, self.abandon_cost)
    }
}

pub fn run_contextual_episode<R: Rng + ?Sized>(
    catalog: &MessageCatalog,
    env: &ContextualEnvironment,
    x: &[f64],
    seq: &Sequence,
    rng: &mut R,
) -> Result<EpisodeOutcome> {
    if env.num_messages() != catalog.len() {
        return Err(Error::DimensionMismatch {
            expected: catalog.len(),
            got: env.num_messages(),
        });
    }
    let params = env.params_at(x)?;
    run_episode(catalog, &params, seq, rng)
}
