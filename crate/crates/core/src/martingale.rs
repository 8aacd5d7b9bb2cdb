//! Dyadic filtration on the periodic grid `(ℤ/2^J)^d`, conditional
//! expectations, martingale differences, dyadic BMO, and the vector-valued
//! Calderón–Zygmund decomposition.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::normed::NormSpec;
use crate::variation::{check_q, pow_q, variation_power};

/// The torus `(ℤ/2^J)^d`, modelling `[0,1)^d` at spacing `2^{-J}`. Points are
/// stored row-major with axis 0 slowest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DyadicGrid {
    d: usize,
    depth: usize,
}

impl DyadicGrid {
    pub fn new(d: usize, depth: usize) -> Result<Self> {
        if d == 0 || depth == 0 {
            return Err(invalid("grid", "dimension and depth must be >= 1"));
        }
        if depth * d > 26 {
            return Err(invalid("grid", format!("2^(J*d) = 2^{} points is too large", depth * d)));
        }
        Ok(Self { d, depth })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Points per axis, `N = 2^J`.
    pub fn side(&self) -> usize {
        1 << self.depth
    }

    pub fn len(&self) -> usize {
        1 << (self.depth * self.d)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coords(&self, idx: usize) -> Vec<usize> {
        let n = self.side();
        let mut c = vec![0; self.d];
        let mut rest = idx;
        for axis in (0..self.d).rev() {
            c[axis] = rest % n;
            rest /= n;
        }
        c
    }

    pub fn index(&self, coords: &[usize]) -> usize {
        let n = self.side();
        coords.iter().fold(0, |acc, &c| acc * n + (c % n))
    }

    /// Number of level-`level` cubes (side `2^level`).
    pub fn cube_count(&self, level: usize) -> usize {
        1 << ((self.depth - level) * self.d)
    }

    /// Index of the level-`level` cube containing point `idx`.
    pub fn cube_of(&self, idx: usize, level: usize) -> usize {
        let n = self.side();
        let per_axis = n >> level;
        let mut rest = idx;
        let mut out = 0;
        let mut mult = 1;
        for _ in 0..self.d {
            let c = rest % n;
            rest /= n;
            out += (c >> level) * mult;
            mult *= per_axis;
        }
        out
    }

    fn check_level(&self, level: usize) -> Result<()> {
        if level > self.depth {
            return Err(Error::LevelOutOfRange { level, max: self.depth });
        }
        Ok(())
    }
}

/// A dyadic cube of side `2^level` grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DyadicCube {
    pub level: usize,
    /// Row-major index among the level-`level` cubes.
    pub index: usize,
}

impl DyadicCube {
    pub fn side(&self) -> usize {
        1 << self.level
    }

    /// Lower corner in grid coordinates.
    pub fn corner(&self, grid: &DyadicGrid) -> Vec<usize> {
        let per_axis = grid.side() >> self.level;
        let mut c = vec![0; grid.d()];
        let mut rest = self.index;
        for axis in (0..grid.d()).rev() {
            c[axis] = (rest % per_axis) << self.level;
            rest /= per_axis;
        }
        c
    }

    pub fn contains(&self, grid: &DyadicGrid, idx: usize) -> bool {
        grid.cube_of(idx, self.level) == self.index
    }

    /// Grid indices of the points of the cube, in row-major order.
    pub fn points(&self, grid: &DyadicGrid) -> Vec<usize> {
        (0..grid.len()).filter(|&i| self.contains(grid, i)).collect()
    }

    fn children(&self, grid: &DyadicGrid) -> impl Iterator<Item = DyadicCube> {
        let d = grid.d();
        let parent_axis = grid.side() >> self.level;
        let child_axis = parent_axis * 2;
        let mut pc = vec![0; d];
        let mut rest = self.index;
        for axis in (0..d).rev() {
            pc[axis] = rest % parent_axis;
            rest /= parent_axis;
        }
        let level = self.level - 1;
        (0..1usize << d).map(move |bits| {
            let index = (0..d).fold(0, |acc, axis| {
                let bit = (bits >> (d - 1 - axis)) & 1;
                acc * child_axis + 2 * pc[axis] + bit
            });
            DyadicCube { level, index }
        })
    }
}

/// A `B`-valued function on a [`DyadicGrid`], stored point-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    grid: DyadicGrid,
    space: NormSpec,
    values: Vec<f64>,
}

impl GridFn {
    pub fn new(grid: DyadicGrid, space: NormSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * space.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * space.dim(),
                actual: values.len(),
            });
        }
        Ok(Self { grid, space, values })
    }

    pub fn from_fn(grid: DyadicGrid, space: NormSpec, mut f: impl FnMut(&[usize]) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * space.dim());
        for idx in 0..grid.len() {
            let v = f(&grid.coords(idx));
            space.check(&v)?;
            values.extend(v);
        }
        Self::new(grid, space, values)
    }

    pub fn scalar(grid: DyadicGrid, values: Vec<f64>) -> Result<Self> {
        Self::new(grid, NormSpec::scalar(), values)
    }

    pub fn constant(grid: DyadicGrid, space: NormSpec, c: &[f64]) -> Result<Self> {
        space.check(c)?;
        let values = c.iter().copied().cycle().take(grid.len() * space.dim()).collect();
        Self::new(grid, space, values)
    }

    pub fn grid(&self) -> DyadicGrid {
        self.grid
    }

    pub fn space(&self) -> NormSpec {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, idx: usize) -> &[f64] {
        let m = self.space.dim();
        &self.values[idx * m..(idx + 1) * m]
    }

    pub fn is_scalar(&self) -> bool {
        self.space.dim() == 1
    }

    /// Pointwise norms `x ↦ ‖f(x)‖`.
    pub fn norms(&self) -> Vec<f64> {
        self.values.chunks_exact(self.dim()).map(|v| self.space.norm_of(v)).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.norms().into_iter().fold(0.0, f64::max)
    }

    /// `(mean_x ‖f(x)‖^p)^{1/p}` under the normalized counting measure.
    pub fn lp_norm(&self, p: f64) -> f64 {
        mean_lp(&self.norms(), p)
    }

    /// Mean of `f` over the whole grid.
    pub fn mean(&self) -> Vec<f64> {
        let m = self.dim();
        let mut acc = vec![0.0; m];
        for v in self.values.chunks_exact(m) {
            acc.iter_mut().zip(v).for_each(|(a, x)| *a += x);
        }
        let n = self.grid.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    pub fn sub(&self, other: &GridFn) -> Result<GridFn> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &GridFn) -> Result<GridFn> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, alpha: f64) -> GridFn {
        GridFn {
            values: self.values.iter().map(|x| alpha * x).collect(),
            ..self.clone()
        }
    }

    /// Periodic translate `x ↦ f(x + shift)`.
    pub fn translate(&self, shift: &[usize]) -> GridFn {
        let m = self.dim();
        let mut values = Vec::with_capacity(self.values.len());
        for idx in 0..self.grid.len() {
            let c: Vec<usize> = self.grid.coords(idx).iter().zip(shift).map(|(a, b)| a + b).collect();
            values.extend_from_slice(self.value(self.grid.index(&c)));
        }
        debug_assert_eq!(values.len(), self.grid.len() * m);
        GridFn { values, ..self.clone() }
    }

    fn zip_with(&self, other: &GridFn, op: impl Fn(f64, f64) -> f64) -> Result<GridFn> {
        if self.grid != other.grid || self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.values.len(),
                actual: other.values.len(),
            });
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| op(*a, *b)).collect();
        Ok(GridFn { values, ..self.clone() })
    }

    /// Text fixture: a header line `d J m r` (with `r = inf` for the max norm)
    /// followed by one line of `m` coordinates per grid point, row-major.
    pub fn to_text(&self) -> String {
        let r = if self.space.is_sup_norm() {
            "inf".to_string()
        } else {
            self.space.r().to_string()
        };
        let mut out = format!("{} {} {} {}\n", self.grid.d, self.grid.depth, self.dim(), r);
        for v in self.values.chunks_exact(self.dim()) {
            let line: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<GridFn> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, reason: "missing header".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let perr = |line: usize, reason: String| Error::Parse { line, reason };
        if fields.len() != 4 {
            return Err(perr(1, format!("header needs `d J m r`, got {header:?}")));
        }
        let int = |s: &str| s.parse::<usize>().map_err(|e| perr(1, format!("{s:?}: {e}")));
        let (d, depth, m) = (int(fields[0])?, int(fields[1])?, int(fields[2])?);
        let r = match fields[3] {
            "inf" | "∞" => f64::INFINITY,
            s => s.parse::<f64>().map_err(|e| perr(1, format!("{s:?}: {e}")))?,
        };
        let grid = DyadicGrid::new(d, depth)?;
        let space = NormSpec::new(r, m)?;
        let mut values = Vec::with_capacity(grid.len() * m);
        let mut rows = 0;
        for (no, line) in lines {
            let before = values.len();
            for tok in line.split_whitespace() {
                values.push(tok.parse::<f64>().map_err(|e| perr(no + 1, format!("{tok:?}: {e}")))?);
            }
            if values.len() - before != m {
                return Err(perr(no + 1, format!("expected {m} coordinates, got {}", values.len() - before)));
            }
            rows += 1;
        }
        if rows != grid.len() {
            return Err(perr(rows + 1, format!("expected {} points, got {rows}", grid.len())));
        }
        GridFn::new(grid, space, values)
    }
}

/// `(mean |v|^p)^{1/p}`.
pub fn mean_lp(values: &[f64], p: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    if p.is_infinite() {
        return values.iter().fold(0.0, |m, x| m.max(x.abs()));
    }
    let s: f64 = values.iter().map(|x| pow_q(x.abs(), p)).sum();
    (s / values.len() as f64).powf(p.recip())
}

/// `E_level f`: averages over the dyadic cubes of side `2^level` points.
pub fn cond_expect(f: &GridFn, level: usize) -> Result<GridFn> {
    let grid = f.grid;
    grid.check_level(level)?;
    if level == 0 {
        return Ok(f.clone());
    }
    let m = f.dim();
    let mut sums = vec![0.0; grid.cube_count(level) * m];
    for idx in 0..grid.len() {
        let c = grid.cube_of(idx, level);
        for (s, x) in sums[c * m..(c + 1) * m].iter_mut().zip(f.value(idx)) {
            *s += x;
        }
    }
    let inv = 0.5f64.powi((level * grid.d) as i32);
    sums.iter_mut().for_each(|s| *s *= inv);
    let mut values = Vec::with_capacity(f.values.len());
    for idx in 0..grid.len() {
        let c = grid.cube_of(idx, level);
        values.extend_from_slice(&sums[c * m..(c + 1) * m]);
    }
    Ok(GridFn { values, ..f.clone() })
}

/// `d_level = E_{level-1} f − E_level f` for `level ∈ 1..=J`.
pub fn mart_diff(f: &GridFn, level: usize) -> Result<GridFn> {
    if level == 0 {
        return Err(invalid("level", "martingale differences start at level 1"));
    }
    f.grid.check_level(level)?;
    cond_expect(f, level - 1)?.sub(&cond_expect(f, level)?)
}

/// Both sides of the martingale cotype inequality for one function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CotypeTerms {
    /// `mean ‖E_J f‖^{q0}`.
    pub head: f64,
    /// `Σ_{ℓ=1}^{J} mean ‖d_ℓ‖^{q0}`.
    pub differences: f64,
    /// `mean ‖f‖^{q0}`.
    pub rhs: f64,
    /// `mean ‖E_J f‖` (head term without the exponent).
    pub head_unpowered: f64,
}

impl CotypeTerms {
    pub fn lhs(&self) -> f64 {
        self.head + self.differences
    }

    /// Variant with the head term taken without the exponent.
    pub fn lhs_unpowered_head(&self) -> f64 {
        self.head_unpowered + self.differences
    }

    pub fn ratio(&self) -> f64 {
        self.lhs() / self.rhs
    }
}

pub fn cotype_functional(f: &GridFn, q0: f64) -> Result<CotypeTerms> {
    if !(q0 >= 2.0) || q0.is_infinite() {
        return Err(Error::InvalidExponent { value: q0, reason: "cotype exponent must be finite and >= 2" });
    }
    let depth = f.grid.depth;
    let levels: Vec<GridFn> = (0..=depth).map(|l| cond_expect(f, l)).collect::<Result<_>>()?;
    let mean_pow = |g: &GridFn| g.norms().iter().map(|x| pow_q(*x, q0)).sum::<f64>() / g.grid.len() as f64;
    let top = &levels[depth];
    let head = mean_pow(top);
    let head_unpowered = top.norms().iter().sum::<f64>() / top.grid.len() as f64;
    let mut differences = 0.0;
    for l in 1..=depth {
        differences += mean_pow(&levels[l - 1].sub(&levels[l])?);
    }
    Ok(CotypeTerms {
        head,
        differences,
        rhs: mean_pow(f),
        head_unpowered,
    })
}

/// Pointwise `v_q` norm of the martingale `(E_J f(x), E_{J-1} f(x), …, E_0 f(x))`.
pub fn mart_variation(f: &GridFn, q: f64) -> Result<GridFn> {
    check_q(q)?;
    let depth = f.grid.depth;
    // coarse to fine
    let levels: Vec<GridFn> = (0..=depth).rev().map(|l| cond_expect(f, l)).collect::<Result<_>>()?;
    let s = f.space;
    let out = (0..f.grid.len())
        .map(|x| {
            variation_power(
                levels.len(),
                q,
                |j| s.norm_of(levels[j].value(x)),
                |i, j| s.dist(levels[j].value(x), levels[i].value(x)),
            )
            .powf(q.recip())
        })
        .collect();
    GridFn::scalar(f.grid, out)
}

/// Dyadic BMO norm `sup_Q inf_a avg_Q |g − a|` of a scalar grid function; the
/// infimum is attained at the (lower) median of `g` on `Q`.
pub fn dyadic_bmo_norm(g: &GridFn) -> Result<f64> {
    if !g.is_scalar() {
        return Err(Error::DimensionMismatch { expected: 1, actual: g.dim() });
    }
    let grid = g.grid;
    let mut best = 0.0f64;
    for level in 1..=grid.depth {
        let mut buckets: Vec<Vec<f64>> = vec![Vec::with_capacity(1 << (level * grid.d)); grid.cube_count(level)];
        for (idx, &v) in g.values.iter().enumerate() {
            buckets[grid.cube_of(idx, level)].push(v);
        }
        for mut b in buckets {
            b.sort_by(f64::total_cmp);
            let med = b[(b.len() - 1) / 2];
            let dev = b.iter().map(|x| (x - med).abs()).sum::<f64>() / b.len() as f64;
            best = best.max(dev);
        }
    }
    Ok(best)
}

/// Sums of a nonnegative scalar field over every dyadic cube, built bottom-up
/// so that a parent's sum is the floating-point sum of its children's sums.
struct CubeSums {
    by_level: Vec<Vec<f64>>,
}

impl CubeSums {
    fn new(grid: &DyadicGrid, field: &[f64]) -> Self {
        let mut by_level = vec![field.to_vec()];
        for level in 1..=grid.depth {
            let mut sums = vec![0.0; grid.cube_count(level)];
            let prev = &by_level[level - 1];
            for (index, s) in sums.iter_mut().enumerate() {
                *s = DyadicCube { level, index }.children(grid).map(|c| prev[c.index]).sum();
            }
            by_level.push(sums);
        }
        Self { by_level }
    }

    fn average(&self, grid: &DyadicGrid, cube: DyadicCube) -> f64 {
        self.by_level[cube.level][cube.index] * 0.5f64.powi((cube.level * grid.d) as i32)
    }
}

/// The part of `f − avg_Q f` living on one selected cube.
#[derive(Debug, Clone, PartialEq)]
pub struct BadPart {
    pub cube: DyadicCube,
    /// Grid indices of the cube's points.
    pub points: Vec<usize>,
    /// Values of `b_i` at `points`, point-major.
    pub values: Vec<f64>,
}

impl BadPart {
    /// `b_i` as a grid function, zero off its cube.
    pub fn to_grid_fn(&self, grid: DyadicGrid, space: NormSpec) -> GridFn {
        let m = space.dim();
        let mut values = vec![0.0; grid.len() * m];
        for (k, &p) in self.points.iter().enumerate() {
            values[p * m..(p + 1) * m].copy_from_slice(&self.values[k * m..(k + 1) * m]);
        }
        GridFn { grid, space, values }
    }
}

/// Output of [`cz_decompose`].
#[derive(Debug, Clone, PartialEq)]
pub struct CzParts {
    pub lambda: f64,
    pub cubes: Vec<DyadicCube>,
    pub good: GridFn,
    pub bad: Vec<BadPart>,
}

impl CzParts {
    /// Membership mask of `Ω = ∪ Q_i`.
    pub fn omega(&self) -> Vec<bool> {
        let grid = self.good.grid;
        let mut mask = vec![false; grid.len()];
        for b in &self.bad {
            for &p in &b.points {
                mask[p] = true;
            }
        }
        mask
    }

    /// Membership mask of `Ω* = ∪ Q_i*`, the union of the concentric cubes of
    /// three times the side.
    pub fn omega_star(&self) -> Vec<bool> {
        let grid = self.good.grid;
        let n = grid.side();
        let mut mask = vec![false; grid.len()];
        for cube in &self.cubes {
            let side = cube.side();
            let corner = cube.corner(&grid);
            for (idx, slot) in mask.iter_mut().enumerate() {
                let inside = grid.coords(idx).iter().zip(&corner).all(|(&x, &a)| {
                    3 * side >= n || (x + n + side - a) % n < 3 * side
                });
                *slot |= inside;
            }
        }
        mask
    }
}

/// Stopping-time decomposition `f = g + Σ b_i` at height `λ`, selecting the
/// maximal dyadic cubes on which the average of `‖f‖` exceeds `λ`.
pub fn cz_decompose(f: &GridFn, lambda: f64) -> Result<CzParts> {
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let grid = f.grid;
    let sums = CubeSums::new(&grid, &f.norms());
    let root = DyadicCube { level: grid.depth, index: 0 };
    let root_average = sums.average(&grid, root);
    if root_average > lambda {
        return Err(Error::ThresholdBelowRootAverage { lambda, root_average });
    }

    let mut cubes = Vec::new();
    let mut stack = vec![root];
    while let Some(parent) = stack.pop() {
        if parent.level == 0 {
            continue;
        }
        let children: Vec<DyadicCube> = parent.children(&grid).collect();
        for child in children.into_iter().rev() {
            if sums.average(&grid, child) > lambda {
                cubes.push(child);
            } else {
                stack.push(child);
            }
        }
    }
    cubes.sort();

    let m = f.dim();
    let mut good = f.clone();
    let mut bad = Vec::with_capacity(cubes.len());
    for &cube in &cubes {
        let points = cube.points(&grid);
        let mut avg = vec![0.0; m];
        for &p in &points {
            avg.iter_mut().zip(f.value(p)).for_each(|(a, x)| *a += x);
        }
        let inv = 0.5f64.powi((cube.level * grid.d) as i32);
        avg.iter_mut().for_each(|a| *a *= inv);
        let mut values = Vec::with_capacity(points.len() * m);
        for &p in &points {
            values.extend(f.value(p).iter().zip(&avg).map(|(x, a)| x - a));
            good.values[p * m..(p + 1) * m].copy_from_slice(&avg);
        }
        bad.push(BadPart { cube, points, values });
    }
    Ok(CzParts { lambda, cubes, good, bad })
}

/// Uncentered maximal function over all discrete (periodic) cubes containing
/// each point.
pub fn uncentered_maximal(grid: &DyadicGrid, field: &[f64]) -> Vec<f64> {
    let n = grid.side();
    let d = grid.d();
    let mut result = vec![f64::NEG_INFINITY; grid.len()];
    let stride = |axis: usize| n.pow((d - 1 - axis) as u32);
    for s in 1..=n {
        // box sums with lower corner at each point
        let mut boxed = field.to_vec();
        for axis in 0..d {
            boxed = slide(grid, &boxed, stride(axis), s);
        }
        let inv = (s as f64).powi(d as i32).recip();
        boxed.iter_mut().for_each(|v| *v *= inv);
        // a point x lies in the boxes with corners in (x - s, x] per axis
        let mut best = boxed;
        for axis in 0..d {
            best = slide_back(grid, &best, stride(axis), s);
        }
        for (r, b) in result.iter_mut().zip(best) {
            *r = r.max(b);
        }
    }
    result
}

fn slide(grid: &DyadicGrid, v: &[f64], stride: usize, s: usize) -> Vec<f64> {
    let n = grid.side();
    let mut out = vec![0.0; v.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let c = (idx / stride) % n;
        let base = idx - c * stride;
        *o = (0..s).map(|k| v[base + ((c + k) % n) * stride]).sum();
    }
    out
}

fn slide_back(grid: &DyadicGrid, v: &[f64], stride: usize, s: usize) -> Vec<f64> {
    let n = grid.side();
    let mut out = vec![0.0; v.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        let c = (idx / stride) % n;
        let base = idx - c * stride;
        *o = (0..s).map(|k| v[base + ((c + n - k) % n) * stride]).fold(f64::NEG_INFINITY, f64::max);
    }
    out
}

/// Outcome of one property of the decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct CzProperty {
    pub name: &'static str,
    pub holds: bool,
    /// Largest amount by which the property's inequality is exceeded (≤ 0 when
    /// it holds with room to spare).
    pub worst_excess: f64,
}

/// Checks disjointness and properties (i)–(vi) of a decomposition against `f`.
///
/// `tol` is an absolute slack applied only to the two identities that involve
/// floating-point cancellation (`f = g + Σ b_i` and `Σ_{Q_i} b_i = 0`) and to
/// the `L^p` bound on `g`; every other inequality is checked without slack.
pub fn cz_check(f: &GridFn, parts: &CzParts, tol: f64) -> Vec<CzProperty> {
    let grid = f.grid;
    let d = grid.d as i32;
    let lambda = parts.lambda;
    let m = f.dim();
    let norms = f.norms();
    let omega = parts.omega();
    let mut out = Vec::new();
    let mut push = |name, excess: f64, holds: bool| out.push(CzProperty { name, holds, worst_excess: excess });

    let mut count = vec![0u32; grid.len()];
    for b in &parts.bad {
        for &p in &b.points {
            count[p] += 1;
        }
    }
    let disjoint = count.iter().all(|&c| c <= 1);
    push("disjoint", if disjoint { 0.0 } else { 1.0 }, disjoint);

    // (i)
    let excess = norms
        .iter()
        .zip(&omega)
        .filter(|(_, &inside)| !inside)
        .map(|(x, _)| x - lambda)
        .fold(f64::NEG_INFINITY, f64::max);
    push("(i) |f| <= lambda off Omega", excess, !(excess > 0.0));

    // (ii)
    let sums = CubeSums::new(&grid, &norms);
    let mut holds = true;
    let mut excess = f64::NEG_INFINITY;
    let upper = 2f64.powi(d) * lambda;
    for &cube in &parts.cubes {
        let avg = sums.average(&grid, cube);
        holds &= lambda < avg && avg <= upper;
        excess = excess.max((lambda - avg).max(avg - upper));
    }
    push("(ii) lambda < avg_Q |f| <= 2^d lambda", excess, holds);

    // (iii)
    let maximal = uncentered_maximal(&grid, &norms);
    let star = parts.omega_star();
    let mut holds = true;
    let mut excess = f64::NEG_INFINITY;
    for x in 0..grid.len() {
        if omega[x] {
            holds &= maximal[x] > lambda;
            excess = excess.max(lambda - maximal[x]);
        }
        if !star[x] {
            holds &= maximal[x] <= 4f64.powi(d) * lambda;
            excess = excess.max(maximal[x] - 4f64.powi(d) * lambda);
        }
    }
    push("(iii) Omega in {M>lambda}, {M>4^d lambda} in Omega*", excess, holds);

    // (iv)
    let mut recon = parts.good.values.clone();
    for b in &parts.bad {
        for (k, &p) in b.points.iter().enumerate() {
            for j in 0..m {
                recon[p * m + j] += b.values[k * m + j];
            }
        }
    }
    let excess = recon
        .iter()
        .zip(&f.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    push("(iv) f = g + sum b_i", excess - tol, excess <= tol);

    // (v)
    let gnorms = parts.good.norms();
    let gmax = gnorms.iter().copied().fold(0.0, f64::max);
    let mut holds = gmax <= upper;
    let mut excess = gmax - upper;
    let f1: f64 = norms.iter().sum::<f64>() / grid.len() as f64;
    for p in [1.0, 1.5, 2.0, 3.0] {
        let lhs = gnorms.iter().map(|x| x.powf(p)).sum::<f64>() / grid.len() as f64;
        let rhs = 2f64.powf(d as f64 * (p - 1.0)) * lambda.powf(p - 1.0) * f1;
        let slack = tol * rhs.abs();
        holds &= lhs <= rhs + slack;
        excess = excess.max(lhs - rhs - slack);
    }
    push("(v) |g| <= 2^d lambda, |g|_p^p <= 2^{d(p-1)} lambda^{p-1} |f|_1", excess, holds);

    // (vi)
    let mut holds = true;
    let mut excess = f64::NEG_INFINITY;
    let bound = 2f64.powi(d + 1) * lambda;
    for b in &parts.bad {
        let mut total = vec![0.0; m];
        let mut mass = 0.0;
        for v in b.values.chunks_exact(m) {
            total.iter_mut().zip(v).for_each(|(t, x)| *t += x);
            mass += f.space.norm_of(v);
        }
        let zero_excess = total.iter().fold(0.0f64, |a, t| a.max(t.abs())) - tol;
        let avg = mass / b.points.len() as f64;
        holds &= zero_excess <= 0.0 && avg <= bound;
        excess = excess.max(zero_excess).max(avg - bound);
    }
    push("(vi) sum b_i = 0, avg_Q |b_i| <= 2^{d+1} lambda", excess, holds);
    out
}
