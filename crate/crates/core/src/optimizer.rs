//! Exact sequence optimization under geometric abandonment.
//!
//! Every message with a positive marginal payoff `r u - c p (1 - u)` is
//! shown, in decreasing order of its score
//! `(r u - c p (1 - u)) / (1 - q (1 - u))`. Sorting makes this `O(N log N)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{EnvironmentParams, MessageCatalog, Sequence};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredMessage {
    pub index: usize,
    pub score: f64,
    pub marginal_payoff: f64,
}

/// Expected payoff of showing the message once: revenue if accepted minus
/// abandonment cost if refused.
pub fn marginal_payoff(revenue: f64, valuation: f64, cost: f64, abandon_prob: f64) -> f64 {
    revenue * valuation - cost * abandon_prob * (1.0 - valuation)
}

pub fn score(revenue: f64, valuation: f64, cost: f64, abandon_prob: f64) -> Result<f64> {
    let denom = 1.0 - (1.0 - abandon_prob) * (1.0 - valuation);
    if denom <= 0.0 {
        return Err(Error::DegenerateScore);
    }
    Ok(marginal_payoff(revenue, valuation, cost, abandon_prob) / denom)
}

/// Descending score, ascending index on ties.
fn by_score(a: &ScoredMessage, b: &ScoredMessage) -> Ordering {
    b.score.total_cmp(&a.score).then(a.index.cmp(&b.index))
}

/// Scores of all messages whose marginal payoff is strictly positive.
/// Degenerate messages (`p = 0`, `u = 0`) have zero marginal payoff and never
/// reach the score computation.
fn positive_messages(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
    exclude: Option<usize>,
) -> Vec<ScoredMessage> {
    let q = 1.0 - abandon_prob;
    let mut out: Vec<ScoredMessage> = revenues
        .iter()
        .zip(valuations)
        .enumerate()
        .filter(|&(i, _)| Some(i) != exclude)
        .filter_map(|(index, (&r, &u))| {
            let marginal = marginal_payoff(r, u, cost, abandon_prob);
            (marginal > 0.0).then(|| ScoredMessage {
                index,
                score: marginal / (1.0 - q * (1.0 - u)),
                marginal_payoff: marginal,
            })
        })
        .collect();
    out.sort_by(by_score);
    out
}

/// Every message that can be scored, sorted by descending score.
pub fn scored_messages(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
) -> Result<Vec<ScoredMessage>> {
    env.check_catalog(catalog)?;
    let p = env.abandon_prob();
    let c = env.abandon_cost();
    let mut out = Vec::with_capacity(catalog.len());
    for (index, (&r, &u)) in catalog.revenues().iter().zip(env.valuations()).enumerate() {
        match score(r, u, c, p) {
            Ok(s) => out.push(ScoredMessage {
                index,
                score: s,
                marginal_payoff: marginal_payoff(r, u, c, p),
            }),
            Err(Error::DegenerateScore) => {}
            Err(e) => return Err(e),
        }
    }
    out.sort_by(by_score);
    Ok(out)
}

pub(crate) fn optimal_unchecked(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
) -> Sequence {
    Sequence::new(
        positive_messages(revenues, valuations, abandon_prob, cost, None)
            .into_iter()
            .map(|m| m.index)
            .collect(),
    )
}

pub(crate) fn fixed_head_unchecked(
    revenues: &[f64],
    valuations: &[f64],
    abandon_prob: f64,
    cost: f64,
    head: usize,
) -> Sequence {
    let mut seq = Vec::with_capacity(revenues.len());
    seq.push(head);
    seq.extend(
        positive_messages(revenues, valuations, abandon_prob, cost, Some(head))
            .into_iter()
            .map(|m| m.index),
    );
    Sequence::new(seq)
}

/// The payoff-maximizing sequence for known parameters.
pub fn optimal_sequence(catalog: &MessageCatalog, env: &EnvironmentParams) -> Result<Sequence> {
    env.check_catalog(catalog)?;
    Ok(optimal_unchecked(
        catalog.revenues(),
        env.valuations(),
        env.abandon_prob(),
        env.abandon_cost(),
    ))
}

/// The best sequence that must open with `head`.
///
/// The remainder is the unconstrained optimum over the other messages; the
/// head is shown even when its own marginal payoff is not positive.
pub fn optimal_sequence_with_fixed_head(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    head: usize,
) -> Result<Sequence> {
    env.check_catalog(catalog)?;
    if head >= catalog.len() {
        return Err(Error::InvalidIndex {
            index: head,
            len: catalog.len(),
        });
    }
    Ok(fixed_head_unchecked(
        catalog.revenues(),
        env.valuations(),
        env.abandon_prob(),
        env.abandon_cost(),
        head,
    ))
}
