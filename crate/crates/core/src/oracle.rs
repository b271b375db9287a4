//! Brute-force ground truth for small catalogs.
//!
//! Enumerates every ordered, duplicate-free subset of the catalog, by length
//! and then in lexicographic order, and keeps the first sequence reaching the
//! best payoff. No pruning.

use crate::error::{Error, Result};
use crate::model::{self, EnvironmentParams, MessageCatalog, Sequence};

/// Default cap on catalog size (8 messages is ~110k sequences).
pub const DEFAULT_MAX_N: usize = 8;

/// Number of ordered duplicate-free subsets of `n` messages, empty included.
pub fn sequence_count(n: usize) -> u64 {
    (0..=n as u64)
        .map(|m| ((n as u64 - m + 1)..=n as u64).product::<u64>())
        .sum()
}

/// Calls `visit` on every sequence of length `0..=n`, shorter first, each
/// length in lexicographic order.
pub fn for_each_sequence(n: usize, mut visit: impl FnMut(&[usize])) {
    fn extend(
        n: usize,
        target: usize,
        used: &mut [bool],
        buf: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if buf.len() == target {
            visit(buf);
            return;
        }
        for i in 0..n {
            if !used[i] {
                used[i] = true;
                buf.push(i);
                extend(n, target, used, buf, visit);
                buf.pop();
                used[i] = false;
            }
        }
    }
    let mut used = vec![false; n];
    let mut buf = Vec::with_capacity(n);
    for m in 0..=n {
        extend(n, m, &mut used, &mut buf, &mut visit);
    }
}

fn search(n: usize, max_n: usize, objective: impl Fn(&[usize]) -> f64) -> Result<(Sequence, f64)> {
    if n > max_n {
        return Err(Error::SizeGuard { n, max: max_n });
    }
    let mut best = Vec::new();
    let mut best_value = f64::NEG_INFINITY;
    for_each_sequence(n, |seq| {
        let v = objective(seq);
        if v > best_value {
            best_value = v;
            best.clear();
            best.extend_from_slice(seq);
        }
    });
    Ok((Sequence::new(best), best_value))
}

/// Exhaustive optimum under geometric abandonment.
pub fn enumerate_optimal(
    catalog: &MessageCatalog,
    env: &EnvironmentParams,
    max_n: usize,
) -> Result<(Sequence, f64)> {
    env.check_catalog(catalog)?;
    search(catalog.len(), max_n, |seq| {
        model::payoff_unchecked(
            catalog.revenues(),
            env.valuations(),
            env.abandon_prob(),
            env.abandon_cost(),
            seq,
        )
    })
}

/// Exhaustive optimum under an arbitrary patience distribution given by its
/// survival table `survival[k] = P(W > k)` (at least `N + 1` entries).
pub fn enumerate_optimal_general_w(
    catalog: &MessageCatalog,
    valuations: &[f64],
    survival: &[f64],
    cost: f64,
    max_n: usize,
) -> Result<(Sequence, f64)> {
    let n = catalog.len();
    if n > max_n {
        return Err(Error::SizeGuard { n, max: max_n });
    }
    // Full-length validation once; every candidate is then valid.
    let full = Sequence::new((0..n).collect());
    model::expected_payoff_general_w(catalog, valuations, survival, cost, &full)?;
    search(n, max_n, |seq| {
        model::payoff_general_unchecked(catalog.revenues(), valuations, survival, cost, seq)
    })
}
