//! Seeded corpus generators. Element `i` of an experiment's corpus is drawn
//! from its own ChaCha8 stream keyed by `(seed, experiment, i)`, so the corpus
//! does not depend on evaluation order.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use varlab::ergodic::{MarkovOperator, StateFn};
use varlab::martingale::{DyadicGrid, GridFn};
use varlab::variation::TimeFamily;
use varlab::NormSpec;

use crate::error::{config_err, HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusKind {
    /// Independent standard normal coordinates.
    RandomGaussian,
    /// One nonzero point carrying a Gaussian vector.
    Spike,
    /// Sum of dyadic martingale differences with balanced random signs.
    RademacherMartingale,
    /// `Σ_k ε_k cos(2π 2^k x / N + φ_k) e_{k mod m}` along the first axis.
    Lacunary,
    /// Independent integers in `-8..=8`.
    RandomInteger,
}

impl CorpusKind {
    pub fn name(self) -> &'static str {
        match self {
            CorpusKind::RandomGaussian => "random-gaussian",
            CorpusKind::Spike => "spike",
            CorpusKind::RademacherMartingale => "rademacher-martingale",
            CorpusKind::Lacunary => "lacunary",
            CorpusKind::RandomInteger => "random-integer",
        }
    }
}

impl FromStr for CorpusKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        [
            CorpusKind::RandomGaussian,
            CorpusKind::Spike,
            CorpusKind::RademacherMartingale,
            CorpusKind::Lacunary,
            CorpusKind::RandomInteger,
        ]
        .into_iter()
        .find(|k| k.name() == s.trim())
        .ok_or_else(|| config_err(format!("unknown corpus kind `{s}`")))
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// FNV-1a, used only to turn the experiment name into stream key bits.
fn name_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

pub fn rng_for(seed: u64, experiment: &str, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&name_key(experiment).to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn gaussians(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| gaussian(rng)).collect()
}

/// Flat row-major samples of a `kind` function on `n_points` sites arranged
/// as a `d`-dimensional torus of side `side` (axis 0 slowest).
fn samples(kind: CorpusKind, d: usize, side: usize, m: usize, rng: &mut impl Rng) -> Vec<f64> {
    let n_points = side.pow(d as u32);
    match kind {
        CorpusKind::RandomGaussian => gaussians(rng, n_points * m),
        CorpusKind::RandomInteger => (0..n_points * m).map(|_| rng.random_range(-8i32..=8) as f64).collect(),
        CorpusKind::Spike => {
            let mut v = vec![0.0; n_points * m];
            let at = rng.random_range(0..n_points);
            v[at * m..(at + 1) * m].copy_from_slice(&gaussians(rng, m));
            v
        }
        CorpusKind::Lacunary => {
            let levels = side.trailing_zeros().max(1) as usize;
            let terms: Vec<(f64, f64, usize)> = (0..levels)
                .map(|k| {
                    let eps = if rng.random::<bool>() { 1.0 } else { -1.0 };
                    (eps, rng.random_range(0.0..2.0 * PI), k % m)
                })
                .collect();
            let stride = n_points / side;
            let mut v = vec![0.0; n_points * m];
            for p in 0..n_points {
                let x0 = (p / stride) as f64;
                for (k, &(eps, phase, coord)) in terms.iter().enumerate() {
                    let freq = (1u64 << k) as f64;
                    v[p * m + coord] += eps * (2.0 * PI * freq * x0 / side as f64 + phase).cos();
                }
            }
            v
        }
        CorpusKind::RademacherMartingale => {
            let depth = side.trailing_zeros() as usize;
            let grid = DyadicGrid::new(d, depth).expect("grid checked by caller");
            let mut v = vec![0.0; n_points * m];
            for level in (0..depth).rev() {
                // each cube at `level + 1` splits into 2^d children at `level`;
                // half the children get +x and half −x
                let parents = grid.cube_count(level + 1);
                let child_side = 1usize << level;
                for parent in 0..parents {
                    let x = gaussians(rng, m);
                    let mut signs: Vec<f64> = (0..1usize << d).map(|c| if c % 2 == 0 { 1.0 } else { -1.0 }).collect();
                    signs.shuffle(rng);
                    let corner = cube_corner(&grid, level + 1, parent);
                    for (c, s) in signs.iter().enumerate() {
                        let offset: Vec<usize> = (0..d).map(|a| (c >> (d - 1 - a)) & 1).collect();
                        for p in cube_points(&grid, &corner, &offset, child_side) {
                            for j in 0..m {
                                v[p * m + j] += s * x[j];
                            }
                        }
                    }
                }
            }
            v
        }
    }
}

/// Lowest corner of cube `index` at `level`.
fn cube_corner(grid: &DyadicGrid, level: usize, index: usize) -> Vec<usize> {
    let per_axis = grid.side() >> level;
    let d = grid.d();
    let mut rem = index;
    let mut coords = vec![0usize; d];
    for a in (0..d).rev() {
        coords[a] = (rem % per_axis) << level;
        rem /= per_axis;
    }
    coords
}

fn cube_points(grid: &DyadicGrid, corner: &[usize], child: &[usize], side: usize) -> Vec<usize> {
    let d = grid.d();
    let mut out = Vec::with_capacity(side.pow(d as u32));
    for code in 0..side.pow(d as u32) {
        let mut rem = code;
        let mut c = vec![0usize; d];
        for a in (0..d).rev() {
            c[a] = corner[a] + child[a] * side + rem % side;
            rem /= side;
        }
        out.push(grid.index(&c));
    }
    out
}

pub fn grid_fn(kind: CorpusKind, grid: DyadicGrid, space: NormSpec, rng: &mut impl Rng) -> Result<GridFn> {
    let v = samples(kind, grid.d(), grid.side(), space.dim(), rng);
    Ok(GridFn::new(grid, space, v)?)
}

/// A state function on `k` states, laid out as a one-dimensional torus.
/// `rademacher-martingale` needs `k` to be a power of two.
pub fn state_fn(kind: CorpusKind, k: usize, space: NormSpec, rng: &mut impl Rng) -> Result<StateFn> {
    if kind == CorpusKind::RademacherMartingale && !k.is_power_of_two() {
        return Err(config_err(format!("rademacher-martingale needs a power-of-two state count, got {k}")));
    }
    let m = space.dim();
    let v = samples(kind, 1, k, m, rng);
    Ok(StateFn::new(space, DMatrix::from_row_slice(k, m, &v))?)
}

/// Family of `n` samples of a `kind` function at increasing times with
/// random gaps.
pub fn time_family(kind: CorpusKind, space: NormSpec, n: usize, rng: &mut impl Rng) -> Result<TimeFamily> {
    if kind == CorpusKind::RademacherMartingale && !n.is_power_of_two() {
        return Err(config_err(format!("rademacher-martingale needs a power-of-two length, got {n}")));
    }
    let mut t = 0.0;
    let times: Vec<f64> = (0..n)
        .map(|_| {
            t += 0.05 + rng.random::<f64>();
            t
        })
        .collect();
    Ok(TimeFamily::from_flat(space, times, samples(kind, 1, n, space.dim(), rng))?)
}

/// Dense row-stochastic matrix with entries bounded away from zero, so the
/// spectral gap is far above 1e-3.
pub fn random_chain(k: usize, rng: &mut impl Rng) -> Result<MarkovOperator> {
    let mut m = DMatrix::from_fn(k, k, |_, _| rng.random_range(0.05..1.0));
    for i in 0..k {
        let s: f64 = m.row(i).sum();
        m.row_mut(i).iter_mut().for_each(|v| *v /= s);
    }
    Ok(MarkovOperator::new(m)?)
}

/// Symmetric doubly stochastic matrix `I + (W − diag(W 1)) / c` with `W`
/// symmetric, nonnegative, and `c` a quarter above the largest row sum.
pub fn symmetric_chain(k: usize, rng: &mut impl Rng) -> Result<MarkovOperator> {
    let mut w = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let v = rng.random_range(0.05..1.0);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let c = (0..k).map(|i| w.row(i).sum()).fold(0.0, f64::max) * 1.25;
    let mut q: DMatrix<f64> = w / c;
    for i in 0..k {
        let off: f64 = (0..k).filter(|&j| j != i).map(|j| q[(i, j)]).sum();
        q[(i, i)] = 1.0 - off;
    }
    Ok(MarkovOperator::new(q)?)
}

/// Strictly increasing positive indices starting at 1 with `len` entries and
/// ratios in `[1, max_ratio]`, so both branches of the split occur.
pub fn index_sequence(len: usize, max_ratio: f64, cap: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx = vec![1usize];
    while idx.len() < len {
        let last = *idx.last().expect("nonempty");
        let next = ((last as f64) * rng.random_range(1.0..max_ratio)).ceil() as usize;
        let next = next.max(last + 1);
        if next > cap {
            break;
        }
        idx.push(next);
    }
    idx
}

pub fn signs(k: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..k).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use varlab::martingale::{cond_expect, mart_diff};

    #[test]
    fn streams_are_keyed() {
        let a: u64 = rng_for(1, "x", 0).random();
        assert_eq!(a, rng_for(1, "x", 0).random::<u64>());
        assert_ne!(a, rng_for(1, "x", 1).random::<u64>());
        assert_ne!(a, rng_for(1, "y", 0).random::<u64>());
        assert_ne!(a, rng_for(2, "x", 0).random::<u64>());
    }

    #[test]
    fn rademacher_martingale_has_mean_zero_differences() {
        for d in 1..=2 {
            let grid = DyadicGrid::new(d, 3).unwrap();
            let space = NormSpec::new(2.0, 2).unwrap();
            let f = grid_fn(CorpusKind::RademacherMartingale, grid, space, &mut rng_for(3, "t", 0)).unwrap();
            assert!(f.mean().iter().all(|v| v.abs() < 1e-12));
            for level in 1..=3 {
                let dl = mart_diff(&f, level).unwrap();
                let coarse = cond_expect(&dl, level).unwrap();
                assert!(coarse.max_norm() < 1e-12);
                // every difference is ±x on its cubes, so its norm is constant there
                assert!(dl.max_norm() > 0.0);
            }
        }
    }

    #[test]
    fn generators_produce_valid_objects() {
        let mut rng = rng_for(0, "g", 0);
        let space = NormSpec::new(3.0, 2).unwrap();
        let grid = DyadicGrid::new(2, 3).unwrap();
        for kind in ["random-gaussian", "spike", "lacunary", "random-integer", "rademacher-martingale"] {
            let kind: CorpusKind = kind.parse().unwrap();
            let f = grid_fn(kind, grid, space, &mut rng).unwrap();
            assert!(f.max_norm() > 0.0, "{kind}");
            state_fn(kind, 16, space, &mut rng).unwrap();
        }
        let spike = grid_fn(CorpusKind::Spike, grid, space, &mut rng).unwrap();
        assert_eq!(spike.norms().iter().filter(|&&v| v > 0.0).count(), 1);
        assert!(state_fn(CorpusKind::RademacherMartingale, 12, space, &mut rng).is_err());
        let t = symmetric_chain(7, &mut rng).unwrap();
        assert!(t.is_symmetric() && t.is_doubly_stochastic());
        random_chain(5, &mut rng).unwrap();
        let idx = index_sequence(10, 3.0, 50, &mut rng);
        assert!(idx.windows(2).all(|w| w[0] < w[1]) && *idx.last().unwrap() <= 50);
    }
}
