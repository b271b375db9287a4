//! Sequential choice model with geometric abandonment.
//!
//! A user walks down an ordered sequence of messages. At each message she
//! accepts with probability `u_i` (the platform earns `r_i`), otherwise she
//! abandons with probability `p` (the platform pays `c`) or moves on to the
//! next message. Running out of messages ends the episode with payoff 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The available messages and their revenues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageCatalog {
    revenues: Vec<f64>,
}

impl MessageCatalog {
    pub fn new(revenues: Vec<f64>) -> Result<Self> {
        if revenues.is_empty() {
            return Err(Error::constraint("catalog must hold at least one message"));
        }
        if let Some((i, r)) = revenues
            .iter()
            .enumerate()
            .find(|(_, r)| !r.is_finite() || **r < 0.0)
        {
            return Err(Error::constraint(format!(
                "revenue of message {i} must be finite and nonnegative, got {r}"
            )));
        }
        Ok(Self { revenues })
    }

    pub fn len(&self) -> usize {
        self.revenues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.revenues.is_empty()
    }

    pub fn revenues(&self) -> &[f64] {
        &self.revenues
    }

    pub fn revenue(&self, index: usize) -> f64 {
        self.revenues[index]
    }
}

/// Valuations, abandonment probability and abandonment cost.
///
/// Ground-truth parameters built with [`EnvironmentParams::new`] keep every
/// valuation in `[0, 1)`. Learners hand optimistic or estimated parameters to
/// the optimizer through [`EnvironmentParams::from_estimates`], which also
/// admits a valuation of exactly 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentParams {
    valuations: Vec<f64>,
    abandon_prob: f64,
    abandon_cost: f64,
}

fn check_probability(name: &str, v: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::constraint(format!(
            "{name} must lie in [0, 1], got {v}"
        )));
    }
    Ok(())
}

fn check_cost(c: f64) -> Result<()> {
    if !c.is_finite() || c < 0.0 {
        return Err(Error::constraint(format!(
            "abandonment cost must be finite and nonnegative, got {c}"
        )));
    }
    Ok(())
}

impl EnvironmentParams {
    pub fn new(valuations: Vec<f64>, abandon_prob: f64, abandon_cost: f64) -> Result<Self> {
        for (i, &u) in valuations.iter().enumerate() {
            if !(0.0..1.0).contains(&u) {
                return Err(Error::constraint(format!(
                    "valuation of message {i} must lie in [0, 1), got {u}"
                )));
            }
        }
        check_probability("abandonment probability", abandon_prob)?;
        check_cost(abandon_cost)?;
        Ok(Self {
            valuations,
            abandon_prob,
            abandon_cost,
        })
    }

    /// Parameters assembled from learner estimates or confidence bounds.
    ///
    /// Values are clamped into `[0, 1]`; a valuation of 1 is allowed here.
    /// `continue_prob` is `q`, the per-skip probability of staying.
    pub fn from_estimates(
        valuations: Vec<f64>,
        continue_prob: f64,
        abandon_cost: f64,
    ) -> Result<Self> {
        if valuations.iter().any(|u| u.is_nan()) || continue_prob.is_nan() {
            return Err(Error::constraint("estimates must not be NaN"));
        }
        check_cost(abandon_cost)?;
        let valuations = valuations.into_iter().map(|u| u.clamp(0.0, 1.0)).collect();
        let q = continue_prob.clamp(0.0, 1.0);
        Ok(Self {
            valuations,
            abandon_prob: 1.0 - q,
            abandon_cost,
        })
    }

    pub fn valuations(&self) -> &[f64] {
        &self.valuations
    }

    pub fn valuation(&self, index: usize) -> f64 {
        self.valuations[index]
    }

    pub fn abandon_prob(&self) -> f64 {
        self.abandon_prob
    }

    pub fn continue_prob(&self) -> f64 {
        1.0 - self.abandon_prob
    }

    pub fn abandon_cost(&self) -> f64 {
        self.abandon_cost
    }

    pub(crate) fn check_catalog(&self, catalog: &MessageCatalog) -> Result<()> {
        if self.valuations.len() != catalog.len() {
            return Err(Error::DimensionMismatch {
                expected: catalog.len(),
                got: self.valuations.len(),
            });
        }
        Ok(())
    }
}

/// An ordered list of message indices; position 0 is shown first.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Sequence(Vec<usize>);

impl Sequence {
    pub fn new(indices: Vec<usize>) -> Self {
        Self(indices)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }

    /// Checks indices are in range for `n` messages and never repeat.
    pub fn validate(&self, n: usize) -> Result<()> {
        let mut seen = vec![false; n];
        for &i in &self.0 {
            if i >= n {
                return Err(Error::InvalidIndex { index: i, len: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::constraint(format!(
                    "message {i} appears twice in the sequence"
                )));
            }
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Sequence {
    fn from(v: Vec<usize>) -> Self {
        Self(v)
    }
}

impl std::fmt::Display for Sequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "]")
    }
}

/// Outcome probabilities and expected payoff of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffBreakdown {
    /// `p_i(S)` for every catalog message (0 when not in the sequence).
    pub select_probs: Vec<f64>,
    /// Total abandonment probability `p_a(S)`.
    pub abandon_prob_total: f64,
    /// Probability the user sees every message and neither accepts nor abandons.
    pub exhausted_prob: f64,
    pub expected_payoff: f64,
}

fn check_inputs(catalog: &MessageCatalog, env: &EnvironmentParams, seq: &Sequence) -> Result<()> {
    env.check_catalog(catalog)?;
    seq.validate(catalog.len())
}

/// Single pass over the sequence. `reach` is the probability the user is
/// still present and undecided when position `l` is shown, which for
/// geometric patience is `q^(l-1) * prod_{k<l} (1 - u_I(k))`.
fn walk(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
    seq: &[usize],
    mut on_select: impl FnMut(usize, f64),
) -> (f64, f64, f64) {
    let q = 1.0 - abandon_prob;
    let mut reach = 1.0;
    let mut revenue = 0.0;
    let mut abandon = 0.0;
    for &i in seq {
        let u = valuations[i];
        let select = reach * u;
        on_select(i, select);
        revenue += select * revenues[i];
        let miss = reach * (1.0 - u);
        abandon += miss * abandon_prob;
        reach = miss * q;
    }
    (revenue - cost * abandon, abandon, reach)
}

/// Expected payoff without validation or allocation; callers guarantee `seq`
/// is valid for the slices.
pub(crate) fn payoff_unchecked(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
    seq: &[usize],
) -> f64 {
    walk(revenues, valuations, abandon_prob, cost, seq, |_, _| {}).0
}

/// `p_i(S)` for every message in the catalog.
pub fn selection_probabilities(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    seq: &Sequence,
) -> Result<Vec<f64>> {
    Ok(expected_payoff(catalog, env, seq)?.select_probs)
}

/// `p_a(S)`, the probability that the user abandons somewhere along `seq`.
pub fn abandonment_probability(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    seq: &Sequence,
) -> Result<f64> {
    check_inputs(catalog, env, seq)?;
    let (_, abandon, _) = walk(
        catalog.revenues(),
        env.valuations(),
        env.abandon_prob(),
        env.abandon_cost(),
        seq.as_slice(),
        |_, _| {},
    );
    Ok(abandon)
}

/// `E[U(S)] = sum_i p_i(S) r_i - c p_a(S)` with its components.
pub fn expected_payoff(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    seq: &Sequence,
) -> Result<PayoffBreakdown> {
    check_inputs(catalog, env, seq)?;
    let mut select_probs = vec![0.0; catalog.len()];
    let (expected_payoff, abandon_prob_total, exhausted) = walk(
        catalog.revenues(),
        env.valuations(),
        env.abandon_prob(),
        env.abandon_cost(),
        seq.as_slice(),
        |i, p| select_probs[i] = p,
    );
    Ok(PayoffBreakdown {
        select_probs,
        abandon_prob_total,
        // An empty sequence shows nothing, so nothing is "exhausted" either.
        exhausted_prob: if seq.is_empty() { 0.0 } else { exhausted },
        expected_payoff,
    })
}

/// Checks a survival table `survival[k] = P(W > k)` against a sequence of
/// length `m`: at least `m + 1` entries, `survival[0] = 1`, values in
/// `[0, 1]` and nonincreasing.
pub fn validate_survival(survival: &[f64], m: usize) -> Result<()> {
    if survival.len() < m + 1 {
        return Err(Error::constraint(format!(
            "survival table has {} entries, a sequence of length {m} needs {}",
            survival.len(),
            m + 1
        )));
    }
    if let Some(&s0) = survival.first() {
        if s0 != 1.0 {
            return Err(Error::constraint(format!(
                "survival[0] = P(W > 0) must be 1, got {s0}"
            )));
        }
    }
    for (k, w) in survival.windows(2).enumerate() {
        if !(0.0..=1.0).contains(&w[1]) {
            return Err(Error::constraint(format!(
                "survival[{}] must lie in [0, 1], got {}",
                k + 1,
                w[1]
            )));
        }
        if w[1] > w[0] {
            return Err(Error::constraint(format!(
                "survival must be nonincreasing: survival[{}] = {} > survival[{k}] = {}",
                k + 1,
                w[1],
                w[0]
            )));
        }
    }
    Ok(())
}

/// Expected payoff under an arbitrary patience distribution.
///
/// `survival[k]` is `P(W > k)`; the user reaches position `l` undecided with
/// probability `P(W >= l) = survival[l - 1]` times the no-accept product, and
/// abandons at the `k`-th unsatisfying message with probability
/// `P(W = k) = survival[k - 1] - survival[k]`.
pub fn expected_payoff_general_w(
    catalog: &MessageCatalog,
    valuations: &[f64],
    survival: &[f64],
    cost: f64,
    seq: &Sequence,
) -> Result<f64> {
    if valuations.len() != catalog.len() {
        return Err(Error::DimensionMismatch {
            expected: catalog.len(),
            got: valuations.len(),
        });
    }
    if let Some((i, u)) = valuations
        .iter()
        .enumerate()
        .find(|(_, u)| !(0.0..=1.0).contains(*u))
    {
        return Err(Error::constraint(format!(
            "valuation of message {i} must lie in [0, 1], got {u}"
        )));
    }
    check_cost(cost)?;
    seq.validate(catalog.len())?;
    validate_survival(survival, seq.len())?;
    Ok(payoff_general_unchecked(
        catalog.revenues(),
        valuations,
        survival,
        cost,
        seq.as_slice(),
    ))
}

pub(crate) fn payoff_general_unchecked(
    revenues: &[f64],
    valuations: &[f64],
    survival: &[f64],
    cost: f64,
    seq: &[usize],
) -> f64 {
    // no_accept = prod_{k < l} (1 - u_I(k))
    let mut no_accept = 1.0;
    let mut payoff = 0.0;
    for (pos, &i) in seq.iter().enumerate() {
        let u = valuations[i];
        payoff += survival[pos] * no_accept * u * revenues[i];
        no_accept *= 1.0 - u;
        payoff -= cost * (survival[pos] - survival[pos + 1]) * no_accept;
    }
    payoff
}

/// Survival table of geometric patience with continue probability `q`,
/// covering sequences up to length `m`.
pub fn geometric_survival(continue_prob: f64, m: usize) -> Vec<f64> {
    (0..=m).map(|k| continue_prob.powi(k as i32)).collect()
}
