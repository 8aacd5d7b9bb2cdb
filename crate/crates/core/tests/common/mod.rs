#![allow(dead_code)]

use nalgebra::DMatrix;
use proptest::prelude::*;
use varlab::ergodic::{MarkovOperator, StateFn};
use varlab::NormSpec;

pub fn space_strategy(max_dim: usize) -> impl Strategy<Value = NormSpec> {
    (prop_oneof![Just(1.0), Just(1.5), Just(2.0), Just(3.0), Just(f64::INFINITY)], 1..=max_dim)
        .prop_map(|(r, d)| NormSpec::new(r, d).unwrap())
}

/// Row-stochastic matrix from positive weights.
pub fn stochastic(k: usize, weights: &[f64]) -> MarkovOperator {
    let mut m = DMatrix::from_row_slice(k, k, &weights[..k * k]);
    for i in 0..k {
        let s: f64 = m.row(i).sum();
        m.row_mut(i).iter_mut().for_each(|v| *v /= s);
    }
    MarkovOperator::new(m).unwrap()
}

/// Symmetric stochastic matrix `I + (W − diag(W 1)) / c` from symmetric
/// nonnegative `W`.
pub fn symmetric_stochastic(k: usize, weights: &[f64]) -> MarkovOperator {
    let mut w = DMatrix::from_fn(k, k, |i, j| weights[i.min(j) * k + i.max(j)]);
    for i in 0..k {
        w[(i, i)] = 0.0;
    }
    let sums: Vec<f64> = (0..k).map(|i| w.row(i).sum()).collect();
    let c = sums.iter().copied().fold(0.0, f64::max) * 1.25 + 1e-3;
    let mut q = w / c;
    for i in 0..k {
        q[(i, i)] = 1.0 - sums[i] / c;
    }
    // exact row sums: put the rounding into the diagonal
    for i in 0..k {
        let off: f64 = (0..k).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        q[(i, i)] = 1.0 - off;
    }
    MarkovOperator::new(q).unwrap()
}

pub fn state_fn(space: NormSpec, k: usize, values: &[f64]) -> StateFn {
    let m = space.dim();
    StateFn::new(space, DMatrix::from_row_slice(k, m, &values[..k * m])).unwrap()
}
