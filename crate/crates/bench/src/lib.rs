//! Instance generators shared by the benchmarks.

use rand::Rng;
use scbandit::{stream_rng, EnvironmentParams, MessageCatalog, Sequence};

/// Revenues on `[0, 1)`, valuations on `[0, u_max)`.
pub fn instance(
    n: usize,
    u_max: f64,
    abandon_prob: f64,
    cost: f64,
    seed: u64,
) -> (MessageCatalog, EnvironmentParams) {
    let mut rng = stream_rng(seed, 0);
    let r = (0..n).map(|_| rng.random::<f64>()).collect();
    let u = (0..n).map(|_| u_max * rng.random::<f64>()).collect();
    (
        MessageCatalog::new(r).expect("valid revenues"),
        EnvironmentParams::new(u, abandon_prob, cost).expect("valid parameters"),
    )
}

/// Every message, in index order.
pub fn full_sequence(n: usize) -> Sequence {
    Sequence::new((0..n).collect())
}

/// `n` logistic observations in dimension `d` (intercept first).
pub fn logistic_data(n: usize, d: usize, seed: u64) -> Vec<(Vec<f64>, bool)> {
    let mut rng = stream_rng(seed, 1);
    let beta: Vec<f64> = (0..d)
        .map(|j| if j % 2 == 0 { -0.5 } else { 0.8 })
        .collect();
    (0..n)
        .map(|_| {
            let mut x = vec![1.0];
            x.extend((1..d).map(|_| rng.random::<f64>()));
            let z: f64 = beta.iter().zip(&x).map(|(b, v)| b * v).sum();
            let y = rng.random::<f64>() < scbandit::logistic_link(z);
            (x, y)
        })
        .collect()
}
