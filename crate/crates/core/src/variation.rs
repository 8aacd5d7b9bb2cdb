//! q-variation norms, λ-jump counts, and the dyadic long/short splitting of a
//! partition, each paired with an exhaustive oracle.

use std::collections::BTreeMap;

use crate::error::{invalid, Error, Result};
use crate::normed::NormSpec;

/// Largest family accepted by [`vq_norm_bruteforce`].
pub const VQ_BRUTEFORCE_MAX: usize = 18;
/// Largest family accepted by [`jump_count_bruteforce`].
pub const JUMP_BRUTEFORCE_MAX: usize = 14;

/// A finite family `(t_i, a_i)` with strictly increasing times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeFamily {
    space: NormSpec,
    times: Vec<f64>,
    values: Vec<f64>,
}

impl TimeFamily {
    pub fn new(space: NormSpec, times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: times.len(),
                actual: values.len(),
            });
        }
        let mut flat = Vec::with_capacity(values.len() * space.dim());
        for v in &values {
            space.check(v)?;
            flat.extend_from_slice(v);
        }
        Self::from_flat(space, times, flat)
    }

    /// Times and row-major coordinates (`times.len() * space.dim()` values).
    pub fn from_flat(space: NormSpec, times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::Empty("time family"));
        }
        if values.len() != times.len() * space.dim() {
            return Err(Error::DimensionMismatch {
                expected: times.len() * space.dim(),
                actual: values.len(),
            });
        }
        check_increasing(&times)?;
        Ok(Self { space, times, values })
    }

    /// Family indexed by `1, 2, …, n`.
    pub fn sequence(space: NormSpec, values: Vec<Vec<f64>>) -> Result<Self> {
        let times = (1..=values.len()).map(|i| i as f64).collect();
        Self::new(space, times, values)
    }

    /// Scalar family indexed by `1, 2, …, n`.
    pub fn scalars(values: &[f64]) -> Result<Self> {
        let times = (1..=values.len()).map(|i| i as f64).collect();
        Self::from_flat(NormSpec::scalar(), times, values.to_vec())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn space(&self) -> NormSpec {
        self.space
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn time(&self, i: usize) -> f64 {
        self.times[i]
    }

    pub fn value(&self, i: usize) -> &[f64] {
        let m = self.space.dim();
        &self.values[i * m..(i + 1) * m]
    }

    /// Right-continuous step extension: the value at the last time `≤ t`, or
    /// the first value when `t` precedes every time.
    pub fn value_at(&self, t: f64) -> &[f64] {
        let idx = self.times.partition_point(|&s| s <= t);
        self.value(idx.saturating_sub(1))
    }

    /// The subfamily at the given (strictly increasing) positions.
    pub fn subfamily(&self, keep: &[usize]) -> Result<Self> {
        let times = keep.iter().map(|&i| self.times[i]).collect();
        let mut values = Vec::with_capacity(keep.len() * self.space.dim());
        for &i in keep {
            values.extend_from_slice(self.value(i));
        }
        Self::from_flat(self.space, times, values)
    }
}

pub(crate) fn check_increasing(times: &[f64]) -> Result<()> {
    for (i, w) in times.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::NotIncreasing { index: i + 1 });
        }
    }
    Ok(())
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if !(q >= 1.0) || q.is_infinite() {
        return Err(Error::InvalidExponent {
            value: q,
            reason: "variation exponent must be finite and >= 1",
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn pow_q(x: f64, q: f64) -> f64 {
    if q == 2.0 {
        x * x
    } else if q == 1.0 {
        x
    } else if q.fract() == 0.0 && q <= 32.0 {
        x.powi(q as i32)
    } else {
        x.powf(q)
    }
}

/// `sup (head(i_0)^q + Σ dist(i_{k-1}, i_k)^q)` over nonempty increasing index
/// sequences of `0..n`, by the O(n²) longest-path recursion.
pub(crate) fn variation_power(
    n: usize,
    q: f64,
    head: impl Fn(usize) -> f64,
    dist: impl Fn(usize, usize) -> f64,
) -> f64 {
    let mut best = Vec::with_capacity(n);
    let mut overall = 0.0f64;
    for j in 0..n {
        let mut b = pow_q(head(j), q);
        for (i, &bi) in best.iter().enumerate() {
            let cand = bi + pow_q(dist(i, j), q);
            if cand > b {
                b = cand;
            }
        }
        best.push(b);
        overall = overall.max(b);
    }
    overall
}

/// Same supremum without the head term: the pure difference variation.
pub(crate) fn difference_variation_power(n: usize, q: f64, dist: impl Fn(usize, usize) -> f64) -> f64 {
    variation_power(n, q, |_| 0.0, dist)
}

/// `‖(a_t)‖_{v_q}^q`, computed exactly.
pub fn vq_norm_pow(fam: &TimeFamily, q: f64) -> Result<f64> {
    check_q(q)?;
    let s = fam.space;
    Ok(variation_power(
        fam.len(),
        q,
        |j| s.norm_of(fam.value(j)),
        |i, j| s.dist(fam.value(j), fam.value(i)),
    ))
}

/// The q-variation norm `‖(a_t)‖_{v_q}` including the head term.
pub fn vq_norm_exact(fam: &TimeFamily, q: f64) -> Result<f64> {
    Ok(vq_norm_pow(fam, q)?.powf(q.recip()))
}

/// Exhaustive maximization over all `2^n − 1` nonempty subsequences.
pub fn vq_norm_bruteforce(fam: &TimeFamily, q: f64) -> Result<f64> {
    check_q(q)?;
    let n = fam.len();
    if n > VQ_BRUTEFORCE_MAX {
        return Err(Error::TooLarge {
            what: "time family",
            len: n,
            max: VQ_BRUTEFORCE_MAX,
        });
    }
    let s = fam.space;
    let mut best = 0.0f64;
    for mask in 1u32..(1u32 << n) {
        let mut prev: Option<usize> = None;
        let mut total = 0.0;
        for i in 0..n {
            if mask & (1 << i) == 0 {
                continue;
            }
            total += match prev {
                None => s.norm_of(fam.value(i)).powf(q),
                Some(p) => s.dist(fam.value(i), fam.value(p)).powf(q),
            };
            prev = Some(i);
        }
        best = best.max(total);
    }
    Ok(best.powf(q.recip()))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(())
}

/// `N(a, λ)`: the largest number of chained pairs `s_1 < t_1 ≤ s_2 < t_2 ≤ …`
/// with `‖a_{t_k} − a_{s_k}‖ > λ`.
///
/// Earliest-completion greedy: close a pair at the first `t` that has a
/// partner in `[start, t)`, then restart from `t`.
pub fn jump_count(fam: &TimeFamily, lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    let s = fam.space;
    let mut start = 0;
    let mut count = 0;
    for t in 1..fam.len() {
        if (start..t).any(|i| s.dist(fam.value(t), fam.value(i)) > lambda) {
            count += 1;
            start = t;
        }
    }
    Ok(count)
}

/// Exhaustive search over every chained pair system.
pub fn jump_count_bruteforce(fam: &TimeFamily, lambda: f64) -> Result<usize> {
    check_lambda(lambda)?;
    let n = fam.len();
    if n > JUMP_BRUTEFORCE_MAX {
        return Err(Error::TooLarge {
            what: "time family",
            len: n,
            max: JUMP_BRUTEFORCE_MAX,
        });
    }
    fn search(fam: &TimeFamily, lambda: f64, start: usize) -> usize {
        let s = fam.space;
        let mut best = 0;
        for a in start..fam.len() {
            for b in a + 1..fam.len() {
                if s.dist(fam.value(b), fam.value(a)) > lambda {
                    best = best.max(1 + search(fam, lambda, b));
                }
            }
        }
        best
    }
    Ok(search(fam, lambda, 0))
}

/// `‖a‖_{v_q}^q − λ^q N(a, λ)`, which is never negative.
pub fn jump_variation_gap(fam: &TimeFamily, lambda: f64, q: f64) -> Result<f64> {
    let n = jump_count(fam, lambda)?;
    Ok(vq_norm_pow(fam, q)? - lambda.powf(q) * n as f64)
}

/// Half-open interval `(lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }
}

/// Partition intervals split into short pieces (each inside one dyadic block
/// `(2^k, 2^{k+1}]`) and long pieces with power-of-two endpoints.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalSplit {
    pub short_by_block: BTreeMap<i32, Vec<Interval>>,
    pub long: Vec<Interval>,
}

impl IntervalSplit {
    pub fn short(&self) -> impl Iterator<Item = &Interval> {
        self.short_by_block.values().flatten()
    }

    /// Every emitted interval, sorted by left endpoint.
    pub fn all(&self) -> Vec<Interval> {
        let mut all: Vec<Interval> = self.short().chain(&self.long).copied().collect();
        all.sort_by(|a, b| a.lo.total_cmp(&b.lo));
        all
    }
}

fn pow2(k: i32) -> f64 {
    2f64.powi(k)
}

/// Smallest `k` with `2^k > x`.
fn first_power_above(x: f64) -> i32 {
    let mut k = x.log2().floor() as i32;
    while pow2(k) <= x {
        k += 1;
    }
    while pow2(k - 1) > x {
        k -= 1;
    }
    k
}

/// Largest `k` with `2^k ≤ x`.
pub(crate) fn last_power_at_most(x: f64) -> i32 {
    let mut k = x.log2().floor() as i32;
    while pow2(k) > x {
        k -= 1;
    }
    while pow2(k + 1) <= x {
        k += 1;
    }
    k
}

/// Index of the dyadic block `(2^k, 2^{k+1}]` containing `t`.
pub fn dyadic_block(t: f64) -> i32 {
    let j = last_power_at_most(t);
    if pow2(j) == t {
        j - 1
    } else {
        j
    }
}

pub fn split_intervals(times: &[f64]) -> Result<IntervalSplit> {
    if times.len() < 2 {
        return Err(invalid("times", "at least two times are required"));
    }
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(invalid("times", "times must be positive"));
    }
    check_increasing(times)?;
    let mut split = IntervalSplit::default();
    for w in times.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let m = first_power_above(lo);
        let n = last_power_at_most(hi);
        if m > n {
            split
                .short_by_block
                .entry(dyadic_block(hi))
                .or_default()
                .push(Interval::new(lo, hi));
            continue;
        }
        let (pm, pn) = (pow2(m), pow2(n));
        if lo < pm {
            split.short_by_block.entry(m - 1).or_default().push(Interval::new(lo, pm));
        }
        if m < n {
            split.long.push(Interval::new(pm, pn));
        }
        if pn < hi {
            split.short_by_block.entry(n).or_default().push(Interval::new(pn, hi));
        }
    }
    Ok(split)
}

/// ℓ^q aggregates of the increments of a family over its own partition and over
/// the short and long pieces of [`split_intervals`], using the step extension
/// [`TimeFamily::value_at`] at split points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitAggregates {
    pub partition: f64,
    pub short: f64,
    pub long: f64,
}

pub fn split_aggregates(fam: &TimeFamily, q: f64) -> Result<SplitAggregates> {
    check_q(q)?;
    let split = split_intervals(fam.times())?;
    let s = fam.space;
    let gap = |iv: &Interval| pow_q(s.dist(fam.value_at(iv.hi), fam.value_at(iv.lo)), q);
    let partition: f64 = (1..fam.len())
        .map(|i| pow_q(s.dist(fam.value(i), fam.value(i - 1)), q))
        .sum();
    let short: f64 = split.short().map(gap).sum();
    let long: f64 = split.long.iter().map(gap).sum();
    let root = q.recip();
    Ok(SplitAggregates {
        partition: partition.powf(root),
        short: short.powf(root),
        long: long.powf(root),
    })
}
