//! Centered ball and cube averages on the periodic grid, their variation
//! operators, and the short/long/martingale comparison.

use crate::error::{invalid, Error, Result};
use crate::martingale::{cond_expect, dyadic_bmo_norm, mart_diff, mart_variation, DyadicGrid, GridFn};
use crate::normed::NormSpec;
use crate::variation::{check_increasing, check_q, difference_variation_power, last_power_at_most, pow_q, variation_power};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AvgKernelShape {
    /// Euclidean ball `{|y|_2 < t}`.
    Ball,
    /// Cube `{|y|_∞ < t}`.
    Cube,
}

impl AvgKernelShape {
    pub fn name(&self) -> &'static str {
        match self {
            AvgKernelShape::Ball => "ball",
            AvgKernelShape::Cube => "cube",
        }
    }
}

impl std::str::FromStr for AvgKernelShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ball" => Ok(AvgKernelShape::Ball),
            "cube" => Ok(AvgKernelShape::Cube),
            _ => Err(invalid("shape", format!("expected ball or cube, got {s:?}"))),
        }
    }
}

/// Strictly increasing positive radii, each at most half the torus side.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiiSet {
    radii: Vec<f64>,
}

impl RadiiSet {
    pub fn new(radii: Vec<f64>, grid: &DyadicGrid) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::Empty("radii"));
        }
        check_increasing(&radii)?;
        let half = (grid.side() / 2) as f64;
        if let Some(&t) = radii.iter().find(|&&t| !(t > 0.0) || t > half) {
            return Err(invalid("radius", format!("{t} outside (0, {half}]")));
        }
        Ok(Self { radii })
    }

    /// One representative radius for every distinct discrete ball (or cube)
    /// with radius at most `N/2`. Averages are piecewise constant in `t`
    /// between these, so the variation over this set is the variation over
    /// all `t ∈ (0, N/2]`.
    pub fn change_points(grid: &DyadicGrid, shape: AvgKernelShape) -> Self {
        let half = (grid.side() / 2) as f64;
        let radii = match shape {
            AvgKernelShape::Cube => (0..grid.side() / 2).map(|j| j as f64 + 0.5).collect(),
            AvgKernelShape::Ball => {
                let reachable = sums_of_squares(grid.d(), (half * half) as usize);
                (0..reachable.len())
                    .filter(|&k| reachable[k] && (k as f64 + 0.5) <= half * half)
                    .map(|k| (k as f64 + 0.5).sqrt())
                    .collect()
            }
        };
        Self { radii }
    }

    /// The dyadic radii `2^0, …, 2^{J-1}`.
    pub fn dyadic(grid: &DyadicGrid) -> Self {
        Self {
            radii: (0..grid.depth()).map(|k| (1u64 << k) as f64).collect(),
        }
    }

    pub fn union(&self, other: &RadiiSet) -> RadiiSet {
        let mut radii: Vec<f64> = self.radii.iter().chain(&other.radii).copied().collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        RadiiSet { radii }
    }

    /// Keeps the radii at the given (increasing) positions.
    pub fn subset(&self, keep: &[usize]) -> Result<RadiiSet> {
        let radii: Vec<f64> = keep
            .iter()
            .map(|&i| self.radii.get(i).copied().ok_or(invalid("keep", format!("index {i} out of range"))))
            .collect::<Result<_>>()?;
        if radii.is_empty() {
            return Err(Error::Empty("radii"));
        }
        check_increasing(&radii)?;
        Ok(RadiiSet { radii })
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }
}

/// `reachable[k]` iff `k` is a sum of `d` squares, for `k ≤ max`.
fn sums_of_squares(d: usize, max: usize) -> Vec<bool> {
    let mut reach = vec![false; max + 1];
    reach[0] = true;
    for _ in 0..d {
        let mut next = vec![false; max + 1];
        for (k, _) in reach.iter().enumerate().filter(|(_, &r)| r) {
            let mut y = 0;
            while k + y * y <= max {
                next[k + y * y] = true;
                y += 1;
            }
        }
        reach = next;
    }
    reach
}

/// Largest integer `h ≥ 0` with `h² < r`, for `r > 0`.
fn half_width_below(r: f64) -> i64 {
    let mut h = r.sqrt().floor() as i64;
    while h > 0 && (h * h) as f64 >= r {
        h -= 1;
    }
    while (((h + 1) * (h + 1)) as f64) < r {
        h += 1;
    }
    h
}

/// `A_t f(x)`: the mean of `f(x + y)` over lattice offsets `y` with `|y| < t`
/// (Euclidean or max norm), offsets taken modulo the torus.
pub fn ball_average(f: &GridFn, t: f64, shape: AvgKernelShape) -> Result<GridFn> {
    let grid = f.grid();
    let n = grid.side();
    if !(t > 0.0) || t > (n / 2) as f64 {
        return Err(invalid("t", format!("radius {t} outside (0, {}]", n / 2)));
    }
    if t <= 1.0 {
        return Ok(f.clone());
    }
    let d = grid.d();
    let m = f.dim();
    let outer = (t.ceil() as i64) - 1;

    // rows of the kernel: offsets y' in the first d-1 axes with a half-width
    // along the last axis
    let width = 2 * outer + 1;
    let mut rows: Vec<(Vec<i64>, i64)> = Vec::new();
    for code in 0..width.pow((d - 1) as u32) {
        let mut y = vec![0i64; d - 1];
        let mut rest = code;
        for v in y.iter_mut().rev() {
            *v = rest % width - outer;
            rest /= width;
        }
        let h = match shape {
            AvgKernelShape::Cube => Some(outer),
            AvgKernelShape::Ball => {
                let s: i64 = y.iter().map(|v| v * v).sum();
                let r = t * t - s as f64;
                (r > 0.0).then(|| half_width_below(r))
            }
        };
        if let Some(h) = h {
            rows.push((y, h));
        }
    }
    let count: i64 = rows.iter().map(|(_, h)| 2 * h + 1).sum();
    let inv = (count as f64).recip();

    // prefix sums along the last axis, one block of (n+1)*m per line
    let lines = grid.len() / n;
    let mut pref = vec![0.0; lines * (n + 1) * m];
    let vals = f.values();
    for line in 0..lines {
        let base = line * (n + 1) * m;
        for i in 0..n {
            for c in 0..m {
                pref[base + (i + 1) * m + c] = pref[base + i * m + c] + vals[(line * n + i) * m + c];
            }
        }
    }
    let window = |line: usize, center: usize, h: usize, c: usize| -> f64 {
        let base = line * (n + 1) * m;
        let p = |i: usize| pref[base + i * m + c];
        let len = 2 * h + 1;
        let start = (center + n - h) % n;
        if start + len <= n {
            p(start + len) - p(start)
        } else {
            p(n) - p(start) + p(start + len - n)
        }
    };

    let ni = n as i64;
    let mut out = vec![0.0; vals.len()];
    let mut acc = vec![0.0; m];
    for x in 0..grid.len() {
        let line = x / n;
        let last = x % n;
        // coordinates of the line in the first d-1 axes
        let mut lc = vec![0i64; d - 1];
        let mut rest = line;
        for axis in (0..d - 1).rev() {
            lc[axis] = (rest % n) as i64;
            rest /= n;
        }
        acc.iter_mut().for_each(|a| *a = 0.0);
        for (yp, h) in &rows {
            let target = lc
                .iter()
                .zip(yp)
                .fold(0usize, |idx, (a, b)| idx * n + (a + b).rem_euclid(ni) as usize);
            for (c, a) in acc.iter_mut().enumerate() {
                *a += window(target, last, *h as usize, c);
            }
        }
        for c in 0..m {
            out[x * m + c] = acc[c] * inv;
        }
    }
    GridFn::new(grid, f.space(), out)
}

fn averages(f: &GridFn, radii: &RadiiSet, shape: AvgKernelShape) -> Result<Vec<GridFn>> {
    radii.radii.iter().map(|&t| ball_average(f, t, shape)).collect()
}

fn check_radii(f: &GridFn, radii: &RadiiSet) -> Result<()> {
    RadiiSet::new(radii.radii.clone(), &f.grid()).map(|_| ())
}

fn check_q0(q0: f64) -> Result<()> {
    if !(q0 >= 2.0) || q0.is_infinite() {
        return Err(Error::InvalidExponent { value: q0, reason: "q0 must be finite and >= 2" });
    }
    Ok(())
}

/// Pointwise `v_q` norm of `t ↦ A_t f(x)` over `radii`.
pub fn vq_of_averages(f: &GridFn, q: f64, radii: &RadiiSet, shape: AvgKernelShape) -> Result<GridFn> {
    check_q(q)?;
    check_radii(f, radii)?;
    let avgs = averages(f, radii, shape)?;
    let s = f.space();
    let out = (0..f.grid().len())
        .map(|x| {
            variation_power(
                avgs.len(),
                q,
                |j| s.norm_of(avgs[j].value(x)),
                |i, j| s.dist(avgs[j].value(x), avgs[i].value(x)),
            )
            .powf(q.recip())
        })
        .collect();
    GridFn::scalar(f.grid(), out)
}

/// Short variation: per closed dyadic block `[2^k, 2^{k+1}]`, the pure
/// difference `q0`-variation of the averages at the radii in that block,
/// summed over blocks.
pub fn short_variation(f: &GridFn, q0: f64, radii: &RadiiSet, shape: AvgKernelShape) -> Result<GridFn> {
    check_q0(q0)?;
    check_radii(f, radii)?;
    let avgs = averages(f, radii, shape)?;
    let r = &radii.radii;
    let lo = last_power_at_most(r[0]);
    let hi = last_power_at_most(r[r.len() - 1]);
    let blocks: Vec<Vec<usize>> = (lo..=hi)
        .map(|k| {
            let (a, b) = (2f64.powi(k), 2f64.powi(k + 1));
            (0..r.len()).filter(|&i| a <= r[i] && r[i] <= b).collect::<Vec<_>>()
        })
        .filter(|b| b.len() >= 2)
        .collect();
    let s = f.space();
    let out = (0..f.grid().len())
        .map(|x| {
            blocks
                .iter()
                .map(|idx| {
                    difference_variation_power(idx.len(), q0, |i, j| {
                        s.dist(avgs[idx[j]].value(x), avgs[idx[i]].value(x))
                    })
                })
                .sum::<f64>()
                .powf(q0.recip())
        })
        .collect();
    GridFn::scalar(f.grid(), out)
}

/// Long variation: `(Σ_{k=0}^{J-1} ‖A_{2^k} f − E_k f‖^{q0})^{1/q0}`.
pub fn long_variation(f: &GridFn, q0: f64, shape: AvgKernelShape) -> Result<GridFn> {
    check_q0(q0)?;
    let grid = f.grid();
    let s = f.space();
    let mut acc = vec![0.0; grid.len()];
    for k in 0..grid.depth() {
        let a = ball_average(f, (1u64 << k) as f64, shape)?;
        let e = cond_expect(f, k)?;
        for (x, slot) in acc.iter_mut().enumerate() {
            *slot += pow_q(s.dist(a.value(x), e.value(x)), q0);
        }
    }
    GridFn::scalar(grid, acc.into_iter().map(|v| v.powf(q0.recip())).collect())
}

/// Pointwise pieces of the comparison `V_q ≤ 3 (SV_{q0} + LV_{q0} + v_q(E f))`.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterTerms {
    pub variation: Vec<f64>,
    pub short: Vec<f64>,
    pub long: Vec<f64>,
    pub martingale: Vec<f64>,
}

impl MasterTerms {
    /// `max(0, V − 3(SV + LV + MV))` at each point.
    pub fn residual(&self) -> Vec<f64> {
        (0..self.variation.len())
            .map(|x| (self.variation[x] - 3.0 * (self.short[x] + self.long[x] + self.martingale[x])).max(0.0))
            .collect()
    }
}

/// The short variation is taken over `radii` together with the dyadic radii
/// `2^0, …, 2^{J-1}`, which the comparison routes through.
pub fn master_terms(f: &GridFn, q: f64, q0: f64, radii: &RadiiSet, shape: AvgKernelShape) -> Result<MasterTerms> {
    check_q0(q0)?;
    check_q(q)?;
    if !(q > q0) {
        return Err(Error::InvalidExponent { value: q, reason: "q must exceed q0" });
    }
    let grid = f.grid();
    Ok(MasterTerms {
        variation: vq_of_averages(f, q, radii, shape)?.values().to_vec(),
        short: short_variation(f, q0, &radii.union(&RadiiSet::dyadic(&grid)), shape)?.values().to_vec(),
        long: long_variation(f, q0, shape)?.values().to_vec(),
        martingale: mart_variation(f, q)?.values().to_vec(),
    })
}

/// Pointwise `max(0, V_q − 3(SV_{q0} + LV_{q0} + v_q(E f)))`; zero everywhere
/// when the comparison holds.
pub fn master_decomposition_check(
    f: &GridFn,
    q: f64,
    q0: f64,
    radii: &RadiiSet,
    shape: AvgKernelShape,
) -> Result<GridFn> {
    GridFn::scalar(f.grid(), master_terms(f, q, q0, radii, shape)?.residual())
}

/// `sup_x ‖A_{2^k} d_n(x)‖^{q0} / (2^{n-k} A_{2^k}(‖d_n‖^{q0})(x))`, with
/// `d_n = mart_diff(f, n)` and `0/0 = 0`.
pub fn probe_pointwise_lv(f: &GridFn, k: usize, n: usize, q0: f64, shape: AvgKernelShape) -> Result<f64> {
    check_q0(q0)?;
    let depth = f.grid().depth();
    if !(1 <= n && n <= k && k < depth) {
        return Err(invalid("indices", format!("need 1 <= n <= k <= J-1, got n={n}, k={k}, J={depth}")));
    }
    let dn = mart_diff(f, n)?;
    let t = (1u64 << k) as f64;
    let num = ball_average(&dn, t, shape)?;
    let pow_norms = GridFn::scalar(f.grid(), dn.norms().iter().map(|v| pow_q(*v, q0)).collect())?;
    let den = ball_average(&pow_norms, t, shape)?;
    let scale = 2f64.powi(n as i32 - k as i32);
    let s = f.space();
    let mut best = 0.0f64;
    for x in 0..f.grid().len() {
        let a = pow_q(s.norm_of(num.value(x)), q0);
        let b = scale * den.values()[x];
        if a > 0.0 {
            best = best.max(if b > 0.0 { a / b } else { f64::INFINITY });
        }
    }
    Ok(best)
}

/// `λ |{V_q f > λ}| / mean ‖f‖` under the normalized counting measure.
pub fn weak11_ratio(f: &GridFn, q: f64, radii: &RadiiSet, shape: AvgKernelShape, lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let v = vq_of_averages(f, q, radii, shape)?;
    Ok(weak11_from_variation(f, v.values(), lambda))
}

/// [`weak11_ratio`] for a precomputed variation function.
pub fn weak11_from_variation(f: &GridFn, variation: &[f64], lambda: f64) -> f64 {
    let mass = f.lp_norm(1.0);
    let level = variation.iter().filter(|&&v| v > lambda).count() as f64 / variation.len() as f64;
    if level == 0.0 {
        0.0
    } else {
        lambda * level / mass
    }
}

/// `‖V_q f‖_{BMO_d} / ‖f‖_∞`.
pub fn bmo_ratio(f: &GridFn, q: f64, radii: &RadiiSet, shape: AvgKernelShape) -> Result<f64> {
    let sup = f.max_norm();
    if sup == 0.0 {
        return Err(invalid("f", "ratio undefined for the zero function"));
    }
    Ok(dyadic_bmo_norm(&vq_of_averages(f, q, radii, shape)?)? / sup)
}

/// One-sided average `(1/(n+1)) Σ_{k=0}^{n} f(j − k)` on a one-dimensional
/// torus.
pub fn one_sided_avg(f: &GridFn, n: usize) -> Result<GridFn> {
    let grid = f.grid();
    if grid.d() != 1 {
        return Err(invalid("f", "one-sided averages are one-dimensional"));
    }
    let side = grid.side();
    if n >= side {
        return Err(invalid("n", format!("{n} >= torus side {side}")));
    }
    let m = f.dim();
    let inv = ((n + 1) as f64).recip();
    let mut out = vec![0.0; side * m];
    for j in 0..side {
        for k in 0..=n {
            let src = f.value((j + side - k) % side);
            for c in 0..m {
                out[j * m + c] += src[c];
            }
        }
        out[j * m..(j + 1) * m].iter_mut().for_each(|v| *v *= inv);
    }
    GridFn::new(grid, f.space(), out)
}

/// `‖σ‖_1 ‖b‖_{q0} − ‖σ ∗ b‖_{q0}` for finitely supported sequences.
pub fn young_convolution_residual(sigma: &[f64], b: &[f64], q0: f64) -> Result<f64> {
    check_q(q0)?;
    if sigma.is_empty() || b.is_empty() {
        return Ok(0.0);
    }
    let mut conv = vec![0.0; sigma.len() + b.len() - 1];
    for (i, s) in sigma.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            conv[i + j] += s * v;
        }
    }
    let lq = |v: &[f64]| v.iter().map(|x| pow_q(x.abs(), q0)).sum::<f64>().powf(q0.recip());
    let l1: f64 = sigma.iter().map(|x| x.abs()).sum();
    Ok(l1 * lq(b) - lq(&conv))
}

/// `A_t f` for a scalar field given as a plain slice.
pub fn average_scalar(grid: DyadicGrid, field: &[f64], t: f64, shape: AvgKernelShape) -> Result<Vec<f64>> {
    let g = GridFn::new(grid, NormSpec::scalar(), field.to_vec())?;
    Ok(ball_average(&g, t, shape)?.values().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(j: usize, v: &[f64]) -> GridFn {
        GridFn::scalar(DyadicGrid::new(1, j).unwrap(), v.to_vec()).unwrap()
    }

    /// Direct summation over all offsets.
    fn naive_average(f: &GridFn, t: f64, shape: AvgKernelShape) -> Vec<f64> {
        let grid = f.grid();
        let n = grid.side() as i64;
        let d = grid.d();
        let m = f.dim();
        let mut offsets = Vec::new();
        let r = t.ceil() as i64;
        let total = (2 * r + 1).pow(d as u32);
        for code in 0..total {
            let mut y = Vec::with_capacity(d);
            let mut c = code;
            for _ in 0..d {
                y.push(c % (2 * r + 1) - r);
                c /= 2 * r + 1;
            }
            let inside = match shape {
                AvgKernelShape::Ball => (y.iter().map(|v| v * v).sum::<i64>() as f64) < t * t,
                AvgKernelShape::Cube => y.iter().all(|v| (v.abs() as f64) < t),
            };
            if inside {
                offsets.push(y);
            }
        }
        let mut out = vec![0.0; f.values().len()];
        for x in 0..grid.len() {
            let c = grid.coords(x);
            for y in &offsets {
                let p: Vec<usize> = c.iter().zip(y).map(|(a, b)| (*a as i64 + b).rem_euclid(n) as usize).collect();
                let v = f.value(grid.index(&p));
                for k in 0..m {
                    out[x * m + k] += v[k] / offsets.len() as f64;
                }
            }
        }
        out
    }

    #[test]
    fn ball_average_examples() {
        let f = line(2, &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(ball_average(&f, 0.5, AvgKernelShape::Ball).unwrap(), f);
        let a = ball_average(&f, 1.5, AvgKernelShape::Ball).unwrap();
        assert!((a.values()[1] - 3.0).abs() < 1e-14);
        assert!(ball_average(&f, 2.5, AvgKernelShape::Ball).is_err());
        assert!(ball_average(&f, 0.0, AvgKernelShape::Cube).is_err());
    }

    #[test]
    fn ball_average_matches_direct_summation() {
        let grid = DyadicGrid::new(2, 3).unwrap();
        let space = NormSpec::new(3.0, 2).unwrap();
        let f = GridFn::from_fn(grid, space, |c| vec![(c[0] * 7 + c[1] * 3) as f64 % 5.0, c[1] as f64 - 0.5 * c[0] as f64]).unwrap();
        for shape in [AvgKernelShape::Ball, AvgKernelShape::Cube] {
            for t in [1.2, 1.5, 2.0, 2.3, 3.1, 4.0] {
                let fast = ball_average(&f, t, shape).unwrap();
                let slow = naive_average(&f, t, shape);
                for (a, b) in fast.values().iter().zip(&slow) {
                    assert!((a - b).abs() < 1e-12, "{shape:?} t={t}: {a} vs {b}");
                }
            }
        }
        let grid3 = DyadicGrid::new(3, 2).unwrap();
        let g = GridFn::from_fn(grid3, NormSpec::scalar(), |c| vec![(c[0] + 2 * c[1] + 3 * c[2]) as f64]).unwrap();
        for t in [1.5, 2.0] {
            let fast = ball_average(&g, t, AvgKernelShape::Ball).unwrap();
            let slow = naive_average(&g, t, AvgKernelShape::Ball);
            assert!(fast.values().iter().zip(&slow).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }

    #[test]
    fn change_points_cover_every_distinct_ball() {
        let grid = DyadicGrid::new(2, 3).unwrap();
        let ball = RadiiSet::change_points(&grid, AvgKernelShape::Ball);
        // squared norms up to 16 reachable as sums of two squares
        let expect: Vec<f64> = [0, 1, 2, 4, 5, 8, 9, 10, 13, 16]
            .iter()
            .filter(|&&k| (k as f64 + 0.5) <= 16.0)
            .map(|&k| (k as f64 + 0.5).sqrt())
            .collect();
        assert_eq!(ball.radii(), &expect[..]);
        let cube = RadiiSet::change_points(&grid, AvgKernelShape::Cube);
        assert_eq!(cube.radii(), &[0.5, 1.5, 2.5, 3.5]);
    }

    #[test]
    fn radii_validation() {
        let grid = DyadicGrid::new(1, 3).unwrap();
        assert!(RadiiSet::new(vec![], &grid).is_err());
        assert!(RadiiSet::new(vec![1.0, 1.0], &grid).is_err());
        assert!(RadiiSet::new(vec![1.0, 4.5], &grid).is_err());
        assert!(RadiiSet::new(vec![0.5, 4.0], &grid).is_ok());
    }

    #[test]
    fn constant_function_variations() {
        let grid = DyadicGrid::new(1, 4).unwrap();
        let space = NormSpec::new(2.0, 2).unwrap();
        let c = GridFn::constant(grid, space, &[3.0, 4.0]).unwrap();
        let radii = RadiiSet::change_points(&grid, AvgKernelShape::Ball);
        let v = vq_of_averages(&c, 3.0, &radii, AvgKernelShape::Ball).unwrap();
        assert!(v.values().iter().all(|x| (x - 5.0).abs() < 1e-12));
        let sv = short_variation(&c, 2.0, &radii, AvgKernelShape::Ball).unwrap();
        assert!(sv.values().iter().all(|x| x.abs() < 1e-12));
        let lv = long_variation(&c, 2.0, AvgKernelShape::Cube).unwrap();
        assert!(lv.values().iter().all(|x| x.abs() < 1e-12));
        let res = master_decomposition_check(&c, 4.0, 2.0, &radii, AvgKernelShape::Ball).unwrap();
        assert!(res.values().iter().all(|&x| x == 0.0));
        assert_eq!(bmo_ratio(&c, 3.0, &radii, AvgKernelShape::Ball).unwrap(), 0.0);
    }

    #[test]
    fn single_radius_and_two_radius_blocks() {
        let f = line(3, &[1.0, -2.0, 0.5, 3.0, 0.0, 1.0, 2.0, -1.0]);
        let grid = f.grid();
        let one = RadiiSet::new(vec![2.5], &grid).unwrap();
        let v = vq_of_averages(&f, 2.0, &one, AvgKernelShape::Ball).unwrap();
        let a = ball_average(&f, 2.5, AvgKernelShape::Ball).unwrap();
        for (x, y) in v.values().iter().zip(a.values()) {
            assert!((x - y.abs()).abs() < 1e-14);
        }
        let two = RadiiSet::new(vec![2.5, 3.5], &grid).unwrap();
        let sv = short_variation(&f, 2.0, &two, AvgKernelShape::Ball).unwrap();
        let b = ball_average(&f, 3.5, AvgKernelShape::Ball).unwrap();
        for x in 0..grid.len() {
            assert!((sv.values()[x] - (b.values()[x] - a.values()[x]).abs()).abs() < 1e-14);
        }
        assert!(master_decomposition_check(&f, 4.0, 2.0, &one, AvgKernelShape::Cube)
            .unwrap()
            .values()
            .iter()
            .all(|&r| r == 0.0));
    }

    #[test]
    fn master_requires_ordered_exponents() {
        let f = line(3, &[1.0; 8]);
        let radii = RadiiSet::dyadic(&f.grid());
        assert!(master_decomposition_check(&f, 2.0, 2.0, &radii, AvgKernelShape::Ball).is_err());
        assert!(master_decomposition_check(&f, 4.0, 1.5, &radii, AvgKernelShape::Ball).is_err());
    }

    #[test]
    fn lv_probe_indices() {
        let f = line(4, &(0..16).map(|i| ((i * 5) % 7) as f64).collect::<Vec<_>>());
        assert!(probe_pointwise_lv(&f, 2, 3, 2.0, AvgKernelShape::Ball).is_err());
        assert!(probe_pointwise_lv(&f, 2, 0, 2.0, AvgKernelShape::Ball).is_err());
        assert!(probe_pointwise_lv(&f, 4, 1, 2.0, AvgKernelShape::Ball).is_err());
        let r = probe_pointwise_lv(&f, 2, 2, 2.0, AvgKernelShape::Ball).unwrap();
        assert!(r.is_finite() && r > 0.0);
        let c = line(4, &[2.0; 16]);
        assert_eq!(probe_pointwise_lv(&c, 3, 1, 2.0, AvgKernelShape::Cube).unwrap(), 0.0);
    }

    #[test]
    fn weak11_examples() {
        let mut spike = vec![0.0; 16];
        spike[3] = 16.0;
        let f = line(4, &spike);
        let radii = RadiiSet::change_points(&f.grid(), AvgKernelShape::Ball);
        let v = vq_of_averages(&f, 2.0, &radii, AvgKernelShape::Ball).unwrap();
        let top = v.values().iter().copied().fold(0.0, f64::max);
        assert_eq!(weak11_ratio(&f, 2.0, &radii, AvgKernelShape::Ball, top * 1.01).unwrap(), 0.0);
        let r1 = weak11_ratio(&f, 2.0, &radii, AvgKernelShape::Ball, 0.7).unwrap();
        let r2 = weak11_ratio(&f.scale(3.0), 2.0, &radii, AvgKernelShape::Ball, 2.1).unwrap();
        assert!(r1.is_finite() && (r1 - r2).abs() < 1e-12 * r1);
    }

    #[test]
    fn one_sided_examples() {
        let f = line(2, &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(one_sided_avg(&f, 0).unwrap(), f);
        assert_eq!(one_sided_avg(&f, 1).unwrap().values()[2], 4.0);
        assert_eq!(one_sided_avg(&f, 1).unwrap().values()[0], 4.0);
        assert!(one_sided_avg(&f, 4).is_err());
        let c = line(2, &[2.5; 4]);
        assert!(one_sided_avg(&c, 3).unwrap().values().iter().all(|&v| v == 2.5));
    }

    #[test]
    fn young_examples() {
        let b = [1.0, 2.0, 0.5];
        assert!(young_convolution_residual(&[1.0], &b, 2.0).unwrap().abs() < 1e-15);
        let sigma = [0.5, 0.25, 0.25];
        let r = young_convolution_residual(&sigma, &[1.0], 3.0).unwrap();
        let l3 = sigma.iter().map(|x: &f64| x.powi(3)).sum::<f64>().cbrt();
        assert!((r - (1.0 - l3)).abs() < 1e-15);
    }
}
