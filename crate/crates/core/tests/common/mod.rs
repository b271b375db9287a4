#![allow(dead_code)]

use rand::Rng;
use scbandit::{EnvironmentParams, MessageCatalog, SimRng};

pub const ABANDON_PROBS: [f64; 3] = [0.05, 0.1, 0.3];
pub const COSTS: [f64; 3] = [0.1, 0.5, 2.0];

/// Revenues uniform on `[0, 1)`, valuations uniform on `[0, u_max)`.
pub fn random_instance(
    rng: &mut SimRng,
    n: usize,
    u_max: f64,
    p: f64,
    c: f64,
) -> (MessageCatalog, EnvironmentParams) {
    let r = (0..n).map(|_| rng.random::<f64>()).collect();
    let u = (0..n).map(|_| u_max * rng.random::<f64>()).collect();
    (
        MessageCatalog::new(r).unwrap(),
        EnvironmentParams::new(u, p, c).unwrap(),
    )
}

/// An instance with `n` in `2..=max_n` and `(p, c)` from the test grids.
pub fn grid_instance(rng: &mut SimRng, max_n: usize) -> (MessageCatalog, EnvironmentParams) {
    let n = rng.random_range(2..=max_n);
    let p = ABANDON_PROBS[rng.random_range(0..3)];
    let c = COSTS[rng.random_range(0..3)];
    random_instance(rng, n, 1.0, p, c)
}

/// A random nonincreasing survival table of length `len` with `s[0] = 1`.
pub fn random_survival(rng: &mut SimRng, len: usize) -> Vec<f64> {
    let mut s = vec![1.0];
    for _ in 1..len {
        let last = *s.last().unwrap();
        s.push(last * rng.random::<f64>().sqrt());
    }
    s
}

/// A pair `(hi, lo)` of survival tables with `hi >= lo` pointwise.
pub fn ordered_survival_pair(rng: &mut SimRng, len: usize) -> (Vec<f64>, Vec<f64>) {
    let a = random_survival(rng, len);
    let b = random_survival(rng, len);
    let hi = a.iter().zip(&b).map(|(x, y)| x.max(*y)).collect();
    let lo = a.iter().zip(&b).map(|(x, y)| x.min(*y)).collect();
    (hi, lo)
}
