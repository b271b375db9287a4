//! Contextual learning with logistic models (GLM-UCB).
//!
//! Each message `i` has a logistic model of acceptance in the user features,
//! and one more model describes the probability of staying after a refusal.
//! Coefficients are ridge-penalized maximum likelihood estimates fitted by
//! Newton iterations (IRLS). The optimistic value of a model at `x` is
//! `mu(theta . x) + rho(t) |x|_{M^-1}` with `rho(t) = sqrt(2 ln t)` and `M`
//! the regularized design matrix of the model's observations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::learner::{exploration_target, Exploration};
use crate::linalg::{Cholesky, SpdMatrix};
use crate::model::{MessageCatalog, Sequence};
use crate::optimizer::{fixed_head_unchecked, optimal_unchecked};
use crate::simulator::EpisodeOutcome;

/// Default ridge strength for both the valuation and abandonment models.
pub const DEFAULT_LAMBDA: f64 = 1.0;

const MAX_NEWTON_ITERS: usize = 100;
const NEWTON_TOL: f64 = 1e-8;

/// `exp(z) / (1 + exp(z))` without overflow.
pub fn logistic_link(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + exp(z))` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Grouped binary observations: row `k` reports `successes[k]` out of
/// `trials[k]` Bernoulli draws at features `x_k`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct BinomialData {
    dim: usize,
    xs: Vec<f64>,
    successes: Vec<f64>,
    trials: Vec<f64>,
}

impl BinomialData {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            ..Default::default()
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn push(&mut self, x: &[f64], successes: f64, trials: f64) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        if !(trials.is_finite() && trials > 0.0) || !(0.0..=trials).contains(&successes) {
            return Err(Error::constraint(format!(
                "need 0 <= successes <= trials, trials > 0; got {successes}/{trials}"
            )));
        }
        self.xs.extend_from_slice(x);
        self.successes.push(successes);
        self.trials.push(trials);
        Ok(())
    }

    fn rows(&self) -> impl Iterator<Item = (&[f64], f64, f64)> {
        self.xs
            .chunks_exact(self.dim.max(1))
            .zip(&self.successes)
            .zip(&self.trials)
            .map(|((x, &y), &n)| (x, y, n))
    }
}

/// Penalized log-likelihood, its gradient and the negated Hessian at `beta`.
fn evaluate(data: &BinomialData, lambda: f64, beta: &[f64]) -> (f64, Vec<f64>, SpdMatrix) {
    let d = data.dim;
    let mut objective = -0.5 * lambda * dot(beta, beta);
    let mut grad: Vec<f64> = beta.iter().map(|b| -lambda * b).collect();
    let mut info = SpdMatrix::scaled_identity(d, lambda);
    for (x, y, n) in data.rows() {
        let z = dot(beta, x);
        let mu = logistic_link(z);
        objective += y * z - n * softplus(z);
        let resid = y - n * mu;
        for (g, xi) in grad.iter_mut().zip(x) {
            *g += resid * xi;
        }
        info.add_outer(x, n * mu * (1.0 - mu));
    }
    (objective, grad, info)
}

/// Ridge-penalized logistic maximum likelihood by Newton iterations, started
/// from `init`.
///
/// Stops when no coefficient moves by more than `1e-8`, or after 100
/// iterations. A step that lowers the objective is halved until it does not.
pub fn fit_logistic(data: &BinomialData, lambda: f64, init: &[f64]) -> Result<Vec<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::constraint(format!(
            "ridge strength must be positive, got {lambda}"
        )));
    }
    if init.len() != data.dim {
        return Err(Error::DimensionMismatch {
            expected: data.dim,
            got: init.len(),
        });
    }
    let mut beta = init.to_vec();
    // (objective, coefficients, direction, step length) of the last accepted point
    let mut last: Option<(f64, Vec<f64>, Vec<f64>, f64)> = None;
    for _ in 0..MAX_NEWTON_ITERS {
        let (objective, grad, info) = evaluate(data, lambda, &beta);
        if !objective.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::EstimationFailure(
                "non-finite likelihood during Newton iterations".into(),
            ));
        }
        if let Some((prev_obj, prev_beta, dir, step)) = &mut last {
            if objective < *prev_obj - 1e-12 * prev_obj.abs().max(1.0) && *step > 1e-10 {
                *step *= 0.5;
                for ((b, p), d) in beta.iter_mut().zip(prev_beta.iter()).zip(dir.iter()) {
                    *b = p + *step * d;
                }
                continue;
            }
        }
        let dir = info.cholesky()?.solve(&grad);
        let change = dir.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let prev = beta.clone();
        for (b, d) in beta.iter_mut().zip(&dir) {
            *b += d;
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(Error::EstimationFailure("non-finite coefficients".into()));
        }
        if change < NEWTON_TOL {
            return Ok(beta);
        }
        last = Some((objective, prev, dir, 1.0));
    }
    Ok(beta)
}

/// Fits binary observations `(x, outcome)` from a zero start.
pub fn quasi_mle(observations: &[(Vec<f64>, bool)], lambda: f64) -> Result<Vec<f64>> {
    let dim = observations.first().map_or(0, |(x, _)| x.len());
    let mut data = BinomialData::new(dim);
    for (x, y) in observations {
        data.push(x, if *y { 1.0 } else { 0.0 }, 1.0)?;
    }
    fit_logistic(&data, lambda, &vec![0.0; dim])
}

/// One logistic model with its observations, design matrix and estimate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticArm {
    lambda: f64,
    data: BinomialData,
    design: SpdMatrix,
    coef: Vec<f64>,
    stale: bool,
    #[serde(skip)]
    factor: Option<Cholesky>,
}

impl LogisticArm {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::constraint(format!(
                "ridge strength must be positive, got {lambda}"
            )));
        }
        let design = SpdMatrix::scaled_identity(dim, lambda);
        let factor = design.cholesky().ok();
        Ok(Self {
            lambda,
            data: BinomialData::new(dim),
            design,
            coef: vec![0.0; dim],
            stale: false,
            factor,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn design(&self) -> &SpdMatrix {
        &self.design
    }

    pub fn data(&self) -> &BinomialData {
        &self.data
    }

    /// Adds `trials` draws at `x`; the design matrix gains `trials * x x^T`.
    pub fn add(&mut self, x: &[f64], successes: f64, trials: f64) -> Result<()> {
        self.data.push(x, successes, trials)?;
        self.design.add_outer(x, trials);
        self.stale = true;
        self.factor = None;
        Ok(())
    }

    /// Re-estimates the coefficients, warm-started from the current ones.
    /// On failure the previous estimate is kept.
    pub fn refit(&mut self) -> Result<()> {
        if !self.stale {
            return Ok(());
        }
        self.stale = false;
        self.coef = fit_logistic(&self.data, self.lambda, &self.coef)?;
        Ok(())
    }

    fn factor(&mut self) -> Result<&Cholesky> {
        if self.factor.is_none() {
            let f = match self.design.cholesky() {
                Ok(f) => f,
                Err(_) => {
                    self.design.add_diagonal(self.lambda);
                    self.design.cholesky()?
                }
            };
            self.factor = Some(f);
        }
        Ok(self.factor.as_ref().expect("factor just set"))
    }

    pub fn mean(&self, x: &[f64]) -> f64 {
        logistic_link(dot(&self.coef, x))
    }

    /// `|x|_{M^-1} = sqrt(x^T M^-1 x)`.
    pub fn inverse_norm(&mut self, x: &[f64]) -> Result<f64> {
        Ok(self.factor()?.inverse_quad_form(x).sqrt())
    }

    /// `min(1, mu(theta . x) + rho |x|_{M^-1})`.
    pub fn upper_bound(&mut self, x: &[f64], rho: f64) -> Result<f64> {
        let bonus = if rho == 0.0 {
            0.0
        } else {
            rho * self.inverse_norm(x)?
        };
        Ok((self.mean(x) + bonus).min(1.0))
    }
}

/// Exploration radius `sqrt(2 ln t)`.
pub fn exploration_radius(t: f64) -> f64 {
    (2.0 * t.max(1.0).ln()).sqrt()
}

/// When the coefficients are re-estimated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RefitSchedule {
    /// After every user.
    EveryStep,
    /// Every user up to `t = 1000`, then every `ceil(t / 100)` users.
    #[default]
    Adaptive,
}

impl RefitSchedule {
    fn due(self, t: u64, last_refit: u64) -> bool {
        match self {
            RefitSchedule::EveryStep => true,
            RefitSchedule::Adaptive => t <= 1000 || t - last_refit >= t.div_ceil(100),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlmSettings {
    /// Ridge strength `lambda` of the valuation models.
    pub lambda: f64,
    /// Ridge strength `lambda'` of the abandonment model.
    pub lambda_prime: f64,
    pub refit: RefitSchedule,
}

impl Default for GlmSettings {
    fn default() -> Self {
        Self {
            lambda: DEFAULT_LAMBDA,
            lambda_prime: DEFAULT_LAMBDA,
            refit: RefitSchedule::Adaptive,
        }
    }
}

/// Per-message acceptance models, the stay-after-refusal model, and view
/// counts.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlmLearnerState {
    dim: usize,
    settings: GlmSettings,
    messages: Vec<LogisticArm>,
    abandonment: LogisticArm,
    views: Vec<u64>,
    t: u64,
    last_refit: u64,
    estimation_failures: u64,
}

impl GlmLearnerState {
    pub fn new(num_messages: usize, dim: usize, settings: GlmSettings) -> Result<Self> {
        Ok(Self {
            dim,
            settings,
            messages: (0..num_messages)
                .map(|_| LogisticArm::new(dim, settings.lambda))
                .collect::<Result<_>>()?,
            abandonment: LogisticArm::new(dim, settings.lambda_prime)?,
            views: vec![0; num_messages],
            t: 0,
            last_refit: 0,
            estimation_failures: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn views(&self) -> &[u64] {
        &self.views
    }

    pub fn message(&self, i: usize) -> &LogisticArm {
        &self.messages[i]
    }

    pub fn abandonment(&self) -> &LogisticArm {
        &self.abandonment
    }

    /// Refits that failed and kept their previous estimate.
    pub fn estimation_failures(&self) -> u64 {
        self.estimation_failures
    }

    fn check_x(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Logs one user's feedback and refits when the schedule says so.
    ///
    /// Every shown message gains a row (accepted or not). Each refusal that
    /// did not end the visit counts as a stay, an abandonment as a leave; the
    /// user contributes one grouped row with `n_k` = stays + leaves.
    pub fn record(&mut self, x: &[f64], outcome: &EpisodeOutcome) -> Result<()> {
        self.check_x(x)?;
        let accepted = outcome.accepted();
        for &i in &outcome.shown {
            self.messages[i].add(x, if accepted == Some(i) { 1.0 } else { 0.0 }, 1.0)?;
            self.views[i] += 1;
        }
        let stays = outcome.skips() as f64;
        let refusals = stays + if outcome.abandoned() { 1.0 } else { 0.0 };
        if refusals > 0.0 {
            self.abandonment.add(x, stays, refusals)?;
        }
        self.t += 1;
        if self.settings.refit.due(self.t, self.last_refit) {
            self.refit();
        }
        Ok(())
    }

    /// Refits every model with new data. Returns the number of failures.
    pub fn refit(&mut self) -> u64 {
        self.last_refit = self.t;
        let mut failed = 0;
        for arm in self
            .messages
            .iter_mut()
            .chain(std::iter::once(&mut self.abandonment))
        {
            if arm.refit().is_err() {
                failed += 1;
            }
        }
        self.estimation_failures += failed;
        failed
    }

    /// `(mu(beta_i . x) for each i, mu(alpha . x))`.
    pub fn point_values(&self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.check_x(x)?;
        Ok((
            self.messages.iter().map(|m| m.mean(x)).collect(),
            self.abandonment.mean(x),
        ))
    }

    /// Optimistic valuations and continue probability at `x` for user `t`.
    pub fn glm_ucb_values(&mut self, x: &[f64], t: u64) -> Result<(Vec<f64>, f64)> {
        self.check_x(x)?;
        let rho = exploration_radius(t as f64);
        let u = self
            .messages
            .iter_mut()
            .map(|m| m.upper_bound(x, rho))
            .collect::<Result<Vec<_>>>()?;
        let q = self.abandonment.upper_bound(x, rho)?;
        Ok((u, q))
    }

    pub fn snapshot(&self) -> String {
        serde_json::to_string(self).expect("learner state always serializes")
    }

    pub fn restore(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::constraint(format!("bad learner snapshot: {e}")))
    }
}

/// A policy that sees the user's features before choosing.
pub trait ContextualPolicy {
    fn propose(&mut self, x: &[f64]) -> Result<Sequence>;

    fn observe(&mut self, x: &[f64], seq: &Sequence, outcome: &EpisodeOutcome) -> Result<()>;

    fn state(&self) -> &GlmLearnerState;

    fn step(
        &mut self,
        x: &[f64],
        run: impl FnOnce(&Sequence) -> EpisodeOutcome,
    ) -> Result<(Sequence, EpisodeOutcome)>
    where
        Self: Sized,
    {
        let seq = self.propose(x)?;
        let outcome = run(&seq);
        self.observe(x, &seq, &outcome)?;
        Ok((seq, outcome))
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

/// GLM-UCB: after showing each message once, offer the optimal sequence
/// under optimistic logistic estimates at the user's features.
#[derive(Debug, Clone)]
pub struct Algorithm2 {
    revenues: Vec<f64>,
    cost: f64,
    state: GlmLearnerState,
    /// Steps where the bounds could not be computed and point estimates were used.
    fallbacks: u64,
}

impl Algorithm2 {
    pub fn new(
        catalog: &MessageCatalog,
        cost: f64,
        dim: usize,
        settings: GlmSettings,
    ) -> Result<Self> {
        check_cost(cost)?;
        Ok(Self {
            revenues: catalog.revenues().to_vec(),
            cost,
            state: GlmLearnerState::new(catalog.len(), dim, settings)?,
            fallbacks: 0,
        })
    }

    pub fn fallbacks(&self) -> u64 {
        self.fallbacks
    }
}

impl ContextualPolicy for Algorithm2 {
    fn propose(&mut self, x: &[f64]) -> Result<Sequence> {
        self.state.check_x(x)?;
        let t = self.state.t();
        if (t as usize) < self.revenues.len() {
            return Ok(Sequence::new(vec![t as usize]));
        }
        let (u, q) = match self.state.glm_ucb_values(x, t + 1) {
            Ok(v) => v,
            Err(Error::EstimationFailure(_)) => {
                self.fallbacks += 1;
                self.state.point_values(x)?
            }
            Err(e) => return Err(e),
        };
        Ok(optimal_unchecked(&self.revenues, &u, 1.0 - q, self.cost))
    }

    fn observe(&mut self, x: &[f64], _seq: &Sequence, outcome: &EpisodeOutcome) -> Result<()> {
        self.state.record(x, outcome)
    }

    fn state(&self) -> &GlmLearnerState {
        &self.state
    }
}

/// Explore-then-exploit baselines on logistic point estimates.
#[derive(Debug, Clone)]
pub struct ContextualBenchmark {
    revenues: Vec<f64>,
    cost: f64,
    gamma: f64,
    exploration: Exploration,
    state: GlmLearnerState,
}

impl ContextualBenchmark {
    pub fn new(
        catalog: &MessageCatalog,
        cost: f64,
        dim: usize,
        gamma: f64,
        exploration: Exploration,
        settings: GlmSettings,
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
            state: GlmLearnerState::new(catalog.len(), dim, settings)?,
        })
    }
}

impl ContextualPolicy for ContextualBenchmark {
    fn propose(&mut self, x: &[f64]) -> Result<Sequence> {
        let (u, q) = self.state.point_values(x)?;
        let t = self.state.t() + 1;
        Ok(
            match exploration_target(self.state.views(), self.gamma, t) {
                Some(i) => match self.exploration {
                    Exploration::Singleton => Sequence::new(vec![i]),
                    Exploration::FixedHead => {
                        fixed_head_unchecked(&self.revenues, &u, 1.0 - q, self.cost, i)
                    }
                },
                None => optimal_unchecked(&self.revenues, &u, 1.0 - q, self.cost),
            },
        )
    }

    fn observe(&mut self, x: &[f64], _seq: &Sequence, outcome: &EpisodeOutcome) -> Result<()> {
        self.state.record(x, outcome)
    }

    fn state(&self) -> &GlmLearnerState {
        &self.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::Terminal;

    #[test]
    fn link_values() {
        assert_eq!(logistic_link(0.0), 0.5);
        assert!((logistic_link(0.25) - 0.562_176_500_885_798_1).abs() < 1e-15);
        assert!(logistic_link(700.0) <= 1.0 && logistic_link(700.0).is_finite());
        assert!(logistic_link(-700.0) > 0.0);
        for z in [0.1, 1.7, 5.0, 30.0, 123.0] {
            assert!((logistic_link(-z) - (1.0 - logistic_link(z))).abs() < 1e-15);
        }
        assert!((softplus(800.0) - 800.0).abs() < 1e-12);
        assert!((softplus(0.0) - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn single_observation_matches_grid_search() {
        let b = quasi_mle(&[(vec![1.0], true)], 1.0).unwrap();
        // objective: ln mu(b) - b^2 / 2
        let f = |b: f64| logistic_link(b).ln() - 0.5 * b * b;
        let (mut lo, mut hi) = (-3.0, 3.0);
        for _ in 0..6 {
            let steps = 1000;
            let h = (hi - lo) / steps as f64;
            let best = (0..=steps)
                .map(|k| lo + k as f64 * h)
                .max_by(|a, b| f(*a).total_cmp(&f(*b)))
                .unwrap();
            lo = best - h;
            hi = best + h;
        }
        let grid = 0.5 * (lo + hi);
        assert!((b[0] - grid).abs() < 1e-6, "{} vs {grid}", b[0]);
    }

    #[test]
    fn separated_data_stays_finite() {
        let obs: Vec<(Vec<f64>, bool)> = (0..50)
            .map(|k| (vec![1.0, k as f64 / 50.0], false))
            .collect();
        let b = quasi_mle(&obs, 1.0).unwrap();
        assert!(b.iter().all(|v| v.is_finite()));
        for (x, _) in &obs {
            assert!(logistic_link(dot(&b, x)) < 0.5);
        }
        let weak = quasi_mle(&obs, 1e-3).unwrap();
        assert!(weak[0] < b[0]);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(quasi_mle(&[(vec![1.0], true)], 0.0).is_err());
        assert!(quasi_mle(&[(vec![1.0], true), (vec![1.0, 2.0], false)], 1.0).is_err());
        let mut data = BinomialData::new(2);
        assert!(data.push(&[1.0, 0.0], 3.0, 2.0).is_err());
        assert!(data.push(&[1.0, 0.0], 0.0, 0.0).is_err());
    }

    #[test]
    fn grouped_rows_equal_repeated_rows() {
        let mut grouped = BinomialData::new(2);
        grouped.push(&[1.0, 0.3], 2.0, 5.0).unwrap();
        grouped.push(&[1.0, 0.9], 1.0, 1.0).unwrap();
        let mut flat = Vec::new();
        for k in 0..5 {
            flat.push((vec![1.0, 0.3], k < 2));
        }
        flat.push((vec![1.0, 0.9], true));
        let a = fit_logistic(&grouped, 1.0, &[0.0, 0.0]).unwrap();
        let b = quasi_mle(&flat, 1.0).unwrap();
        assert!((a[0] - b[0]).abs() < 1e-10 && (a[1] - b[1]).abs() < 1e-10);
    }

    #[test]
    fn bonus_examples() {
        let mut arm = LogisticArm::new(3, 1.0).unwrap();
        let x = [0.0, 1.0, 0.0];
        let e2 = std::f64::consts::E.powi(2);
        assert!((exploration_radius(e2) - 2.0).abs() < 1e-15);
        assert!((exploration_radius(std::f64::consts::E) - 2f64.sqrt()).abs() < 1e-15);
        assert!((arm.inverse_norm(&x).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(arm.upper_bound(&x, exploration_radius(e2)).unwrap(), 1.0);
        assert_eq!(arm.upper_bound(&x, exploration_radius(1.0)).unwrap(), 0.5);

        let before = arm.inverse_norm(&x).unwrap();
        arm.add(&x, 1.0, 1.0).unwrap();
        assert!(arm.inverse_norm(&x).unwrap() < before);
    }

    #[test]
    fn accept_on_first_message_leaves_abandonment_untouched() {
        let mut s = GlmLearnerState::new(3, 2, GlmSettings::default()).unwrap();
        let x = [1.0, 0.4];
        s.record(
            &x,
            &EpisodeOutcome {
                shown: vec![1],
                terminal: Terminal::Accepted(1),
                payoff: 1.0,
            },
        )
        .unwrap();
        assert!((s.message(1).design().get(1, 1) - 1.16).abs() < 1e-15);
        assert_eq!(
            s.abandonment().design(),
            &SpdMatrix::scaled_identity(2, 1.0)
        );
        assert!(s.abandonment().data().is_empty());

        s.record(
            &x,
            &EpisodeOutcome {
                shown: vec![0, 2],
                terminal: Terminal::Abandoned,
                payoff: -0.5,
            },
        )
        .unwrap();
        // one stay and one leave: weight 2
        assert!((s.abandonment().design().get(1, 1) - (1.0 + 2.0 * 0.16)).abs() < 1e-15);
        assert_eq!(s.views(), &[1, 1, 1]);
    }

    #[test]
    fn initialization_offers_each_message_once() {
        let cat = MessageCatalog::new(vec![0.5, 0.2, 0.9]).unwrap();
        let mut alg = Algorithm2::new(&cat, 0.5, 2, GlmSettings::default()).unwrap();
        let x = [1.0, 0.5];
        for j in 0..3 {
            let (seq, _) = alg
                .step(&x, |s| EpisodeOutcome {
                    shown: s.as_slice().to_vec(),
                    terminal: Terminal::Exhausted,
                    payoff: 0.0,
                })
                .unwrap();
            assert_eq!(seq.as_slice(), &[j]);
        }
        assert!(alg.propose(&[1.0]).is_err());
    }

    #[test]
    fn snapshot_roundtrip() {
        let mut s = GlmLearnerState::new(2, 2, GlmSettings::default()).unwrap();
        s.record(
            &[1.0, 0.2],
            &EpisodeOutcome {
                shown: vec![0, 1],
                terminal: Terminal::Accepted(1),
                payoff: 1.0,
            },
        )
        .unwrap();
        let mut back = GlmLearnerState::restore(&s.snapshot()).unwrap();
        assert_eq!(back.message(0).coefficients(), s.message(0).coefficients());
        assert_eq!(back.views(), s.views());
        let a = back.glm_ucb_values(&[1.0, 0.5], 10).unwrap();
        let b = s.glm_ucb_values(&[1.0, 0.5], 10).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refit_schedule() {
        let s = RefitSchedule::Adaptive;
        assert!(s.due(1000, 999));
        assert!(!s.due(5000, 4990));
        assert!(s.due(5000, 4950));
        assert!(RefitSchedule::EveryStep.due(5000, 4999));
    }
}
