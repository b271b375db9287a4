//! Count-based learners for the non-contextual problem.
//!
//! [`Algorithm1`] offers, to every user, the optimal sequence under upper
//! confidence bounds on valuations and on the continue probability. The two
//! explore-then-exploit baselines share the same counters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EnvironmentParams, MessageCatalog, Sequence};
use crate::optimizer::{fixed_head_unchecked, optimal_unchecked};
use crate::simulator::EpisodeOutcome;

/// Feedback counters after `t` users.
///
/// Snapshots serialize as JSON:
/// `{"views":[..],"accepts":[..],"skips":n,"abandons":n,"t":n}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LearnerState {
    /// `T_i`: users who saw message `i`.
    views: Vec<u64>,
    /// `c_i`: users who accepted message `i`.
    accepts: Vec<u64>,
    /// `n_e`: refusals not followed by abandonment.
    skips: u64,
    /// `n_a`: abandonments.
    abandons: u64,
    t: u64,
}

/// Ratio estimates; `None` where nothing has been observed yet.
#[derive(Debug, Clone, PartialEq)]
pub struct PointEstimates {
    pub valuations: Vec<Option<f64>>,
    pub continue_prob: Option<f64>,
}

impl PointEstimates {
    /// Unobserved quantities read as 1, the same optimism the UCB learner
    /// starts from.
    pub fn or_one(&self) -> (Vec<f64>, f64) {
        (
            self.valuations.iter().map(|u| u.unwrap_or(1.0)).collect(),
            self.continue_prob.unwrap_or(1.0),
        )
    }
}

/// Upper confidence bounds, clamped to `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UcbView {
    pub valuations: Vec<f64>,
    pub continue_prob: f64,
}

impl LearnerState {
    pub fn new(n: usize) -> Self {
        Self {
            views: vec![0; n],
            accepts: vec![0; n],
            skips: 0,
            abandons: 0,
            t: 0,
        }
    }

    pub fn from_counts(
        views: Vec<u64>,
        accepts: Vec<u64>,
        skips: u64,
        abandons: u64,
        t: u64,
    ) -> Result<Self> {
        let state = Self {
            views,
            accepts,
            skips,
            abandons,
            t,
        };
        state.check()?;
        Ok(state)
    }

    fn check(&self) -> Result<()> {
        if self.views.len() != self.accepts.len() {
            return Err(Error::DimensionMismatch {
                expected: self.views.len(),
                got: self.accepts.len(),
            });
        }
        if let Some(i) = (0..self.views.len()).find(|&i| self.accepts[i] > self.views[i]) {
            return Err(Error::constraint(format!(
                "message {i} has more accepts than views"
            )));
        }
        Ok(())
    }

    pub fn num_messages(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[u64] {
        &self.views
    }

    pub fn accepts(&self) -> &[u64] {
        &self.accepts
    }

    pub fn skips(&self) -> u64 {
        self.skips
    }

    pub fn abandons(&self) -> u64 {
        self.abandons
    }

    /// `N_q = n_e + n_a`, the number of refusals.
    pub fn refusals(&self) -> u64 {
        self.skips + self.abandons
    }

    /// Users processed so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    /// Folds one episode into the counters and advances `t`.
    pub fn record(&mut self, outcome: &EpisodeOutcome) {
        for &i in &outcome.shown {
            self.views[i] += 1;
        }
        if let Some(i) = outcome.accepted() {
            self.accepts[i] += 1;
        }
        self.skips += outcome.skips() as u64;
        if outcome.abandoned() {
            self.abandons += 1;
        }
        self.t += 1;
    }

    pub fn point_estimates(&self) -> PointEstimates {
        PointEstimates {
            valuations: self
                .views
                .iter()
                .zip(&self.accepts)
                .map(|(&v, &c)| (v > 0).then(|| c as f64 / v as f64))
                .collect(),
            continue_prob: (self.refusals() > 0)
                .then(|| self.skips as f64 / self.refusals() as f64),
        }
    }

    /// `min(1, estimate + sqrt(2 ln t / count))`, or 1 for unobserved counts.
    pub fn ucb_view(&self) -> UcbView {
        let log_t = (self.t.max(1) as f64).ln();
        let bound = |hits: u64, trials: u64| {
            if trials == 0 {
                1.0
            } else {
                let n = trials as f64;
                (hits as f64 / n + (2.0 * log_t / n).sqrt()).min(1.0)
            }
        };
        UcbView {
            valuations: self
                .views
                .iter()
                .zip(&self.accepts)
                .map(|(&v, &c)| bound(c, v))
                .collect(),
            continue_prob: bound(self.skips, self.refusals()),
        }
    }

    pub fn snapshot(&self) -> String {
        serde_json::to_string(self).expect("counters always serialize")
    }

    pub fn restore(json: &str) -> Result<Self> {
        let state: Self = serde_json::from_str(json)
            .map_err(|e| Error::constraint(format!("bad learner snapshot: {e}")))?;
        state.check()?;
        Ok(state)
    }
}

/// A policy choosing one sequence per user without side information.
pub trait SequencePolicy {
    fn propose(&mut self) -> Sequence;

    fn observe(&mut self, seq: &Sequence, outcome: &EpisodeOutcome);

    fn state(&self) -> &LearnerState;

    /// Proposes, lets `run` play the episode, and learns from it.
    fn step(&mut self, run: impl FnOnce(&Sequence) -> EpisodeOutcome) -> (Sequence, EpisodeOutcome)
    where
        Self: Sized,
    {
        let seq = self.propose();
        let outcome = run(&seq);
        self.observe(&seq, &outcome);
        (seq, outcome)
    }
}

fn check_cost(cost: f64) -> Result<()> {
    if !cost.is_finite() || cost < 0.0 {
        return Err(Error::constraint(format!(
            "abandonment cost must be finite and nonnegative, got {cost}"
        )));
    }
    Ok(())
}

/// Simultaneous UCB learning of valuations and the continue probability.
#[derive(Debug, Clone)]
pub struct Algorithm1 {
    revenues: Vec<f64>,
    cost: f64,
    state: LearnerState,
}

impl Algorithm1 {
    pub fn new(catalog: &MessageCatalog, cost: f64) -> Result<Self> {
        check_cost(cost)?;
        Ok(Self {
            revenues: catalog.revenues().to_vec(),
            cost,
            state: LearnerState::new(catalog.len()),
        })
    }

    /// Resumes from a saved state.
    pub fn with_state(catalog: &MessageCatalog, cost: f64, state: LearnerState) -> Result<Self> {
        if state.num_messages() != catalog.len() {
            return Err(Error::DimensionMismatch {
                expected: catalog.len(),
                got: state.num_messages(),
            });
        }
        let mut a = Self::new(catalog, cost)?;
        a.state = state;
        Ok(a)
    }

    /// The optimistic parameters the next sequence is optimized against.
    pub fn optimistic_params(&self) -> EnvironmentParams {
        let view = self.state.ucb_view();
        EnvironmentParams::from_estimates(view.valuations, view.continue_prob, self.cost)
            .expect("UCB values are finite")
    }
}

impl SequencePolicy for Algorithm1 {
    fn propose(&mut self) -> Sequence {
        let view = self.state.ucb_view();
        optimal_unchecked(
            &self.revenues,
            &view.valuations,
            1.0 - view.continue_prob,
            self.cost,
        )
    }

    fn observe(&mut self, _seq: &Sequence, outcome: &EpisodeOutcome) {
        self.state.record(outcome);
    }

    fn state(&self) -> &LearnerState {
        &self.state
    }
}

/// How an explore-then-exploit baseline probes an under-explored message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exploration {
    /// Offer the message alone.
    Singleton,
    /// Put the message first, followed by the estimated-optimal tail.
    FixedHead,
}

/// Default exploration multiplier `gamma`.
pub const DEFAULT_GAMMA: f64 = 1.0;

/// Least-explored message whose view count is below `gamma ln t`, ties to the
/// lowest index.
pub fn exploration_target(views: &[u64], gamma: f64, t: u64) -> Option<usize> {
    let threshold = gamma * (t.max(1) as f64).ln();
    views
        .iter()
        .enumerate()
        .filter(|(_, &v)| (v as f64) < threshold)
        .min_by_key(|&(i, &v)| (v, i))
        .map(|(i, _)| i)
}

/// Explore-then-exploit baseline.
///
/// While some message has been seen fewer than `gamma ln t` times the least
/// explored one is probed; otherwise the optimal sequence under the ratio
/// estimates is offered.
#[derive(Debug, Clone)]
pub struct Benchmark {
    revenues: Vec<f64>,
    cost: f64,
    gamma: f64,
    exploration: Exploration,
    state: LearnerState,
}

impl Benchmark {
    pub fn new(
        catalog: &MessageCatalog,
        cost: f64,
        gamma: f64,
        exploration: Exploration,
    ) -> Result<Self> {
        check_cost(cost)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::constraint(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            revenues: catalog.revenues().to_vec(),
            cost,
            gamma,
            exploration,
            state: LearnerState::new(catalog.len()),
        })
    }

    /// Single-message exploration.
    pub fn benchmark1(catalog: &MessageCatalog, cost: f64, gamma: f64) -> Result<Self> {
        Self::new(catalog, cost, gamma, Exploration::Singleton)
    }

    /// Fixed-head exploration.
    pub fn benchmark2(catalog: &MessageCatalog, cost: f64, gamma: f64) -> Result<Self> {
        Self::new(catalog, cost, gamma, Exploration::FixedHead)
    }
}

impl SequencePolicy for Benchmark {
    fn propose(&mut self) -> Sequence {
        let (u, q) = self.state.point_estimates().or_one();
        let t = self.state.t() + 1;
        match exploration_target(&self.state.views, self.gamma, t) {
            Some(i) => match self.exploration {
                Exploration::Singleton => Sequence::new(vec![i]),
                Exploration::FixedHead => {
                    fixed_head_unchecked(&self.revenues, &u, 1.0 - q, self.cost, i)
                }
            },
            None => optimal_unchecked(&self.revenues, &u, 1.0 - q, self.cost),
        }
    }

    fn observe(&mut self, _seq: &Sequence, outcome: &EpisodeOutcome) {
        self.state.record(outcome);
    }

    fn state(&self) -> &LearnerState {
        &self.state
    }
}
