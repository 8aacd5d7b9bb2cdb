//! Stochastic-matrix models of positive contractions: ergodic and fractional
//! averages, `m`-th differences `Δ^m_n = T^n (T − I)^m`, the summation-by-parts
//! identities behind the variation estimate for `(n^m Δ^m_n f)`, and the
//! elementary estimates they rely on.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::normed::NormSpec;
use crate::semigroup::DiffusionSemigroup;
use crate::variation::{check_q, pow_q, variation_power, TimeFamily};

/// Entry and row-sum tolerance for validating stochastic matrices.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// Row-stochastic nonnegative `K × K` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovOperator {
    matrix: DMatrix<f64>,
    symmetric: bool,
    doubly_stochastic: bool,
}

impl MarkovOperator {
    /// Validates the matrix and detects the symmetric and doubly-stochastic
    /// flags.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let k = matrix.nrows();
        if k == 0 || matrix.ncols() != k {
            return Err(Error::InvalidOperator(format!("matrix must be square and nonempty, got {}x{}", k, matrix.ncols())));
        }
        if let Some(v) = matrix.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::InvalidOperator(format!("entry {v} is not a finite nonnegative number")));
        }
        for i in 0..k {
            let s: f64 = matrix.row(i).sum();
            if (s - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidOperator(format!("row {i} sums to {s}")));
            }
        }
        let asym = (0..k)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| (matrix[(i, j)] - matrix[(j, i)]).abs())
            .fold(0.0, f64::max);
        let doubly = (0..k).all(|j| (matrix.column(j).sum() - 1.0).abs() <= STOCHASTIC_TOL);
        Ok(Self {
            symmetric: asym <= STOCHASTIC_TOL,
            doubly_stochastic: doubly,
            matrix,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidOperator("rows must all have length K".into()));
        }
        Self::new(DMatrix::from_row_iterator(k, k, rows.iter().flatten().copied()))
    }

    pub fn identity(k: usize) -> Result<Self> {
        Self::new(DMatrix::identity(k, k))
    }

    /// The two-state swap `[[0,1],[1,0]]`.
    pub fn swap() -> Self {
        Self::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).expect("valid swap")
    }

    /// Lazy symmetric random walk on the cycle `ℤ/K`: stay with probability
    /// `stay`, otherwise move to a uniformly chosen neighbour.
    pub fn cycle_walk(k: usize, stay: f64) -> Result<Self> {
        if k < 3 || !(0.0..=1.0).contains(&stay) {
            return Err(invalid("cycle_walk", format!("need K >= 3 and stay in [0,1], got K={k}, stay={stay}")));
        }
        let mut m = DMatrix::zeros(k, k);
        for i in 0..k {
            m[(i, i)] = stay;
            m[(i, (i + 1) % k)] += (1.0 - stay) / 2.0;
            m[(i, (i + k - 1) % k)] += (1.0 - stay) / 2.0;
        }
        Self::new(m)
    }

    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        self.doubly_stochastic
    }

    /// Text fixture: `K flags` where flags is `none` or a comma-separated
    /// subset of `symmetric,doubly_stochastic`, followed by `K` rows.
    pub fn to_text(&self) -> String {
        let mut flags = Vec::new();
        if self.symmetric {
            flags.push("symmetric");
        }
        if self.doubly_stochastic {
            flags.push("doubly_stochastic");
        }
        let flags = if flags.is_empty() { "none".to_string() } else { flags.join(",") };
        let mut out = format!("{} {}\n", self.k(), flags);
        for i in 0..self.k() {
            let row: Vec<String> = self.matrix.row(i).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    /// Parses a fixture; declared flags must agree with the matrix.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let perr = |line: usize, reason: String| Error::Parse { line, reason };
        let (_, header) = lines.next().ok_or(perr(1, "missing header".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.is_empty() || fields.len() > 2 {
            return Err(perr(1, format!("header needs `K flags`, got {header:?}")));
        }
        let k: usize = fields[0].parse().map_err(|e| perr(1, format!("{:?}: {e}", fields[0])))?;
        let (mut want_sym, mut want_ds) = (false, false);
        for flag in fields.get(1).copied().unwrap_or("none").split(',') {
            match flag {
                "none" => {}
                "symmetric" => want_sym = true,
                "doubly_stochastic" => want_ds = true,
                other => return Err(perr(1, format!("unknown flag {other:?}"))),
            }
        }
        let mut rows = Vec::with_capacity(k);
        for (no, line) in lines {
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|e| perr(no + 1, format!("{t:?}: {e}"))))
                .collect::<Result<_>>()?;
            if row.len() != k {
                return Err(perr(no + 1, format!("expected {k} entries, got {}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != k {
            return Err(perr(rows.len() + 2, format!("expected {k} rows, got {}", rows.len())));
        }
        let op = Self::from_rows(&rows)?;
        if want_sym && !op.symmetric {
            return Err(Error::InvalidOperator("declared symmetric but is not".into()));
        }
        if want_ds && !op.doubly_stochastic {
            return Err(Error::InvalidOperator("declared doubly stochastic but is not".into()));
        }
        Ok(op)
    }
}

/// A `B`-valued function on the states `{0, …, K−1}`, one row per state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateFn {
    values: DMatrix<f64>,
    space: NormSpec,
}

impl StateFn {
    pub fn new(space: NormSpec, values: DMatrix<f64>) -> Result<Self> {
        if values.ncols() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), actual: values.ncols() });
        }
        if values.nrows() == 0 {
            return Err(Error::Empty("state function"));
        }
        Ok(Self { values, space })
    }

    pub fn from_rows(space: NormSpec, rows: &[Vec<f64>]) -> Result<Self> {
        for r in rows {
            space.check(r)?;
        }
        Self::new(space, DMatrix::from_row_iterator(rows.len(), space.dim(), rows.iter().flatten().copied()))
    }

    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::new(NormSpec::scalar(), DMatrix::from_column_slice(values.len(), 1, values))
    }

    pub fn constant(space: NormSpec, k: usize, c: &[f64]) -> Result<Self> {
        space.check(c)?;
        Self::new(space, DMatrix::from_fn(k, space.dim(), |_, j| c[j]))
    }

    pub fn k(&self) -> usize {
        self.values.nrows()
    }

    pub fn space(&self) -> NormSpec {
        self.space
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn value(&self, state: usize) -> Vec<f64> {
        self.values.row(state).iter().copied().collect()
    }

    pub fn norms(&self) -> Vec<f64> {
        (0..self.k()).map(|i| self.space.norm_of(&self.value(i))).collect()
    }

    pub fn max_norm(&self) -> f64 {
        self.norms().into_iter().fold(0.0, f64::max)
    }

    /// `(mean_ω ‖f(ω)‖^p)^{1/p}` under the uniform probability on states.
    pub fn lp_norm(&self, p: f64) -> f64 {
        crate::martingale::mean_lp(&self.norms(), p)
    }

    /// `max_ω ‖f(ω) − g(ω)‖`.
    pub fn dist_max(&self, other: &StateFn) -> f64 {
        (0..self.k())
            .map(|i| self.space.dist(&self.value(i), &other.value(i)))
            .fold(0.0, f64::max)
    }

    pub(crate) fn with_matrix(&self, values: DMatrix<f64>) -> StateFn {
        StateFn { values, space: self.space }
    }
}

fn check_dims(t: &MarkovOperator, f: &StateFn) -> Result<()> {
    if t.k() != f.k() {
        return Err(Error::DimensionMismatch { expected: t.k(), actual: f.k() });
    }
    Ok(())
}

/// `T f`, acting on each coordinate.
pub fn apply(t: &MarkovOperator, f: &StateFn) -> Result<StateFn> {
    check_dims(t, f)?;
    Ok(f.with_matrix(&t.matrix * &f.values))
}

/// `T^k f` for `k = 0..=n`.
pub fn powers(t: &MarkovOperator, f: &StateFn, n: usize) -> Result<Vec<DMatrix<f64>>> {
    check_dims(t, f)?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(f.values.clone());
    for k in 0..n {
        out.push(&t.matrix * &out[k]);
    }
    Ok(out)
}

/// `M_n(T) f = (1/(n+1)) Σ_{k=0}^{n} T^k f`.
pub fn ergodic_avg(t: &MarkovOperator, n: usize, f: &StateFn) -> Result<StateFn> {
    Ok(f.with_matrix(ergodic_averages(t, f, n)?.pop().expect("n+1 averages")))
}

/// `M_k(T) f` for `k = 0..=n`, by running sums.
pub fn ergodic_averages(t: &MarkovOperator, f: &StateFn, n: usize) -> Result<Vec<DMatrix<f64>>> {
    check_dims(t, f)?;
    let mut cur = f.values.clone();
    let mut sum = cur.clone();
    let mut out = Vec::with_capacity(n + 1);
    out.push(sum.clone());
    for k in 1..=n {
        cur = &t.matrix * &cur;
        sum += &cur;
        out.push(&sum / (k + 1) as f64);
    }
    Ok(out)
}

/// `(1/t) ∫_0^t e^{rL} f dr` with `L = Q − I` for symmetric `Q`.
pub fn ergodic_avg_continuous(q: &MarkovOperator, t: f64, f: &StateFn) -> Result<StateFn> {
    if !(t > 0.0) {
        return Err(invalid("t", format!("must be positive, got {t}")));
    }
    let s = DiffusionSemigroup::from_markov(q)?;
    s.spectral_apply(f, |mu| {
        let x = t * mu;
        if x.abs() < 1e-12 {
            1.0 + x / 2.0
        } else {
            x.exp_m1() / x
        }
    })
}

/// `Δ^m_n f = T^n (T − I)^m f`.
pub fn delta_mn(t: &MarkovOperator, m: usize, n: usize, f: &StateFn) -> Result<StateFn> {
    check_dims(t, f)?;
    Ok(f.with_matrix(DeltaTable::new(t, f, &[m], n)?.get(m, n).clone()))
}

/// Memoized `Δ^r_j f` for a few orders `r` and all `j ≤ max_j`, each order
/// built as `T^j` applied to `(T − I)^r f`.
pub struct DeltaTable {
    orders: Vec<usize>,
    tables: Vec<Vec<DMatrix<f64>>>,
}

impl DeltaTable {
    pub fn new(t: &MarkovOperator, f: &StateFn, orders: &[usize], max_j: usize) -> Result<Self> {
        check_dims(t, f)?;
        let mut tables = Vec::with_capacity(orders.len());
        for &r in orders {
            let mut g = f.values.clone();
            for _ in 0..r {
                g = &t.matrix * &g - &g;
            }
            let mut row = Vec::with_capacity(max_j + 1);
            row.push(g);
            for j in 0..max_j {
                row.push(&t.matrix * &row[j]);
            }
            tables.push(row);
        }
        Ok(Self { orders: orders.to_vec(), tables })
    }

    pub fn get(&self, r: usize, j: usize) -> &DMatrix<f64> {
        let i = self.orders.iter().position(|&o| o == r).expect("order in table");
        &self.tables[i][j]
    }
}

/// `A^α_n = (α+1)(α+2)…(α+n)/n!`.
pub fn frac_coeff(alpha: Complex64, n: usize) -> Complex64 {
    frac_coeffs(alpha, n)[n]
}

/// `A^α_k` for `k = 0..=n`.
pub fn frac_coeffs(alpha: Complex64, n: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut a = Complex64::new(1.0, 0.0);
    out.push(a);
    for k in 1..=n {
        a = a * (alpha + k as f64) / k as f64;
        out.push(a);
    }
    out
}

/// Complex-valued state function `re + i·im`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexStateFn {
    pub re: StateFn,
    pub im: StateFn,
}

/// `M^α_n f = (n+1)^{−α} Σ_{k=0}^{n} A^{α−1}_{n−k} T^k f` (principal branch).
pub fn frac_average(t: &MarkovOperator, alpha: Complex64, n: usize, f: &StateFn) -> Result<ComplexStateFn> {
    let pw = powers(t, f, n)?;
    let coeffs = frac_coeffs(alpha - 1.0, n);
    let scale = (-alpha * ((n + 1) as f64).ln()).exp();
    let (r, c) = f.values.shape();
    let mut re = DMatrix::zeros(r, c);
    let mut im = DMatrix::zeros(r, c);
    for (k, p) in pw.iter().enumerate() {
        let w = coeffs[n - k] * scale;
        re += p * w.re;
        im += p * w.im;
    }
    Ok(ComplexStateFn {
        re: f.with_matrix(re),
        im: f.with_matrix(im),
    })
}

/// Residual of an identity together with its scale: the largest term, the
/// mass of the summands that cancel inside `A_n`, and `n^{m−1}‖f‖_∞`, the
/// size the terms would have without the decay of `Δ^m_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub residual: f64,
    pub scale: f64,
}

impl Residual {
    /// `residual / scale`, with `0/0 = 0`.
    pub fn relative(&self) -> f64 {
        if self.residual == 0.0 {
            0.0
        } else {
            self.residual / self.scale
        }
    }
}

fn max_state_norm(space: NormSpec, m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| space.norm_of(&m.row(i).iter().copied().collect::<Vec<_>>()))
        .fold(0.0, f64::max)
}

/// Which form of a printed identity to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentityForm {
    /// The algebraically consistent form.
    Consistent,
    /// The form exactly as typeset, kept for comparison.
    AsPrinted,
}

/// `max_ω Σ_{j=lo}^{hi} (j+1) ‖Δ^{m+1}_j f(ω)‖`, the size of the terms that
/// cancel inside [`weighted_sum`].
fn summand_mass(table: &DeltaTable, m: usize, lo: usize, hi: usize, space: NormSpec) -> f64 {
    let k = table.get(m + 1, lo).nrows();
    (0..k)
        .map(|w| {
            (lo..=hi)
                .map(|j| {
                    let row: Vec<f64> = table.get(m + 1, j).row(w).iter().copied().collect();
                    (j + 1) as f64 * space.norm_of(&row)
                })
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// `Σ_{j=lo}^{hi} (j+1) Δ^{m+1}_j f`.
fn weighted_sum(table: &DeltaTable, m: usize, lo: usize, hi: usize, shape: (usize, usize)) -> DMatrix<f64> {
    let mut acc = DMatrix::zeros(shape.0, shape.1);
    for j in lo..=hi {
        acc += table.get(m + 1, j) * (j + 1) as f64;
    }
    acc
}

fn ipow(n: usize, e: i64) -> f64 {
    (n as f64).powi(e as i32)
}

/// Residual of
/// `n^m Δ^m_{2n+1} = A_n − B_n + n^{m−1}Δ^{m−1}_{2n+1} − n^{m−1}Δ^{m−1}_{n+1}`
/// with `A_n = n^{m−1} Σ_{j=n}^{2n} (j+1)Δ^{m+1}_j` and
/// `B_n = n^{m−1}(n+1)(Δ^m_{2n+1} − Δ^m_n)`, applied to `f`.
///
/// [`IdentityForm::AsPrinted`] multiplies `B_n` by `(n+1)/n`.
pub fn decomposition_formula_residual_with(
    t: &MarkovOperator,
    m: usize,
    n: usize,
    f: &StateFn,
    form: IdentityForm,
) -> Result<Residual> {
    if m < 1 || n < 1 {
        return Err(invalid("m, n", format!("need m >= 1 and n >= 1, got m={m}, n={n}")));
    }
    let table = DeltaTable::new(t, f, &[m - 1, m, m + 1], 2 * n + 1)?;
    let shape = f.values.shape();
    let mi = m as i64;
    let lhs = table.get(m, 2 * n + 1) * ipow(n, mi);
    let a_n = weighted_sum(&table, m, n, 2 * n, shape) * ipow(n, mi - 1);
    let mut b_n = (table.get(m, 2 * n + 1) - table.get(m, n)) * (ipow(n, mi - 1) * (n + 1) as f64);
    if form == IdentityForm::AsPrinted {
        b_n *= (n + 1) as f64 / n as f64;
    }
    let d1 = table.get(m - 1, 2 * n + 1) * ipow(n, mi - 1);
    let d2 = table.get(m - 1, n + 1) * ipow(n, mi - 1);
    let rhs = &a_n - &b_n + &d1 - &d2;
    let s = f.space;
    let scale = [&lhs, &a_n, &b_n, &d1, &d2]
        .iter()
        .map(|m| max_state_norm(s, m))
        .fold(summand_mass(&table, m, n, 2 * n, s) * ipow(n, mi - 1), f64::max)
        .max(f.max_norm() * ipow(n, mi - 1));
    Ok(Residual {
        residual: max_state_norm(s, &(lhs - rhs)),
        scale,
    })
}

pub fn decomposition_formula_residual(t: &MarkovOperator, m: usize, n: usize, f: &StateFn) -> Result<Residual> {
    decomposition_formula_residual_with(t, m, n, f, IdentityForm::Consistent)
}

fn check_index_sequence(indices: &[usize]) -> Result<()> {
    if indices.first() != Some(&1) {
        return Err(invalid("indices", "sequence must start at n_0 = 1"));
    }
    for (k, w) in indices.windows(2).enumerate() {
        if w[0] >= w[1] {
            return Err(Error::NotIncreasing { index: k + 1 });
        }
    }
    Ok(())
}

/// `max_k ‖A_{n_k} f − A_{n_{k−1}} f − (a_k + b_k + c_k) f‖` for the three-way
/// split of consecutive increments of `A_n = n^{m−1} Σ_{j=n}^{2n}(j+1)Δ^{m+1}_j`.
///
/// When `2n_{k−1} < n_k`, the consistent form of `b_k` carries the prefactor
/// `n_{k−1}^{m−1}`; [`IdentityForm::AsPrinted`] uses `n_k^{m−1}` there.
pub fn abc_split_residual_with(
    t: &MarkovOperator,
    m: usize,
    indices: &[usize],
    f: &StateFn,
    form: IdentityForm,
) -> Result<Residual> {
    check_index_sequence(indices)?;
    let top = *indices.last().expect("nonempty");
    let table = DeltaTable::new(t, f, &[m + 1], 2 * top)?;
    let shape = f.values.shape();
    let e = m as i64 - 1;
    let big_a = |n: usize| weighted_sum(&table, m, n, 2 * n, shape) * ipow(n, e);
    let sum = |lo: usize, hi: usize| {
        if lo > hi {
            DMatrix::zeros(shape.0, shape.1)
        } else {
            weighted_sum(&table, m, lo, hi, shape)
        }
    };
    let s = f.space;
    let mut out = Residual { residual: 0.0, scale: 0.0 };
    for w in indices.windows(2) {
        let (p, n) = (w[0], w[1]);
        let (a, b, c) = if 2 * p >= n {
            (
                sum(2 * p + 1, 2 * n) * ipow(n, e),
                sum(p, n - 1) * -ipow(p, e),
                sum(n, 2 * p) * (ipow(n, e) - ipow(p, e)),
            )
        } else {
            let pre = match form {
                IdentityForm::Consistent => ipow(p, e),
                IdentityForm::AsPrinted => ipow(n, e),
            };
            (
                sum(n, 2 * n) * ipow(n, e),
                sum(p, 2 * p) * -pre,
                DMatrix::zeros(shape.0, shape.1),
            )
        };
        let (an, ap) = (big_a(n), big_a(p));
        let diff = &an - &ap - (&a + &b + &c);
        out.residual = out.residual.max(max_state_norm(s, &diff));
        for term in [&an, &ap, &a, &b, &c] {
            out.scale = out.scale.max(max_state_norm(s, term));
        }
        out.scale = out
            .scale
            .max(summand_mass(&table, m, n, 2 * n, s) * ipow(n, e))
            .max(summand_mass(&table, m, p, 2 * p, s) * ipow(p, e))
            .max(f.max_norm() * ipow(n, e).max(ipow(p, e)));
    }
    Ok(out)
}

pub fn abc_split_residual(t: &MarkovOperator, m: usize, indices: &[usize], f: &StateFn) -> Result<Residual> {
    abc_split_residual_with(t, m, indices, f, IdentityForm::Consistent)
}

/// `c_k` of the split is identically zero in the branch `2n_{k−1} < n_k`.
pub fn c_vanishes(prev: usize, next: usize) -> bool {
    2 * prev < next
}

/// `Λ_j = Σ_{k : n_k ≤ j ≤ 2n_{k−1}} |(n_k^{m−1} − n_{k−1}^{m−1}) / n_k^{m−1}|^{q0}`.
pub fn lambda_j(m: usize, q0: f64, indices: &[usize], j: usize) -> Result<f64> {
    if !(q0 >= 2.0) || q0.is_infinite() {
        return Err(Error::InvalidExponent { value: q0, reason: "q0 must be finite and >= 2" });
    }
    check_index_sequence(indices)?;
    if m == 1 {
        return Ok(0.0);
    }
    let e = m as i64 - 1;
    Ok(indices
        .windows(2)
        .filter(|w| w[1] <= j && j <= 2 * w[0])
        .map(|w| {
            let (p, n) = (ipow(w[0], e), ipow(w[1], e));
            pow_q(((n - p) / n).abs(), q0)
        })
        .sum())
}

fn elementary_exponents(m: usize, q0: f64) -> Result<(f64, f64)> {
    if !(q0 > 1.0) || q0.is_infinite() {
        return Err(Error::InvalidExponent { value: q0, reason: "q0 must be finite and > 1" });
    }
    Ok(((1.0 - q0 * m as f64) / (q0 - 1.0), (q0 - 1.0) / q0))
}

/// `(Σ_{j=n}^{2n} (j+1)^{(1−q0 m)/(q0−1)})^{(q0−1)/q0} / n^{1−m}`.
pub fn elementary_sum_constant(m: usize, q0: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let (s, outer) = elementary_exponents(m, q0)?;
    let sum: f64 = (n..=2 * n).map(|j| ((j + 1) as f64).powf(s)).sum();
    Ok(sum.powf(outer) / (n as f64).powf(1.0 - m as f64))
}

/// [`elementary_sum_constant`] for every `n = 1..=n_max`, by sliding the
/// window `{n+1, …, 2n+1}` in the direction in which its sum grows, so no
/// step subtracts a term larger than those it adds.
pub fn elementary_sum_constants(m: usize, q0: f64, n_max: usize) -> Result<Vec<f64>> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be >= 1"));
    }
    let (s, outer) = elementary_exponents(m, q0)?;
    let g = |i: usize| (i as f64).powf(s);
    let mut window = vec![0.0; n_max + 1];
    if s >= 0.0 {
        window[1] = g(2) + g(3);
        for n in 1..n_max {
            window[n + 1] = window[n] + (g(2 * n + 2) + g(2 * n + 3) - g(n + 1));
        }
    } else {
        window[n_max] = (n_max + 1..=2 * n_max + 1).rev().map(g).sum();
        for n in (2..=n_max).rev() {
            window[n - 1] = window[n] + (g(n) - (g(2 * n) + g(2 * n + 1)));
        }
    }
    Ok((1..=n_max)
        .map(|n| window[n].powf(outer) / (n as f64).powf(1.0 - m as f64))
        .collect())
}

/// `3 ‖δ‖_{v_1} ‖z‖_{v_q} − ‖(δ_n z_n)‖_{v_q}`.
pub fn weighted_variation_gap(delta: &[f64], z: &TimeFamily, q: f64) -> Result<f64> {
    if delta.len() != z.len() {
        return Err(Error::DimensionMismatch { expected: z.len(), actual: delta.len() });
    }
    check_q(q)?;
    let s = z.space();
    let dv1 = variation_power(delta.len(), 1.0, |j| delta[j].abs(), |i, j| (delta[j] - delta[i]).abs());
    let zq = crate::variation::vq_norm_exact(z, q)?;
    let scaled = |j: usize| -> Vec<f64> { z.value(j).iter().map(|x| delta[j] * x).collect() };
    let prod = variation_power(z.len(), q, |j| s.norm_of(&scaled(j)), |i, j| s.dist(&scaled(j), &scaled(i)))
        .powf(q.recip());
    Ok(3.0 * dv1 * zq - prod)
}

/// Littlewood–Paley function together with its truncation history.
#[derive(Debug, Clone, PartialEq)]
pub struct LittlewoodPaley {
    /// `Φ_{m,q0}(f)(ω)` truncated at `n_max`.
    pub values: Vec<f64>,
    /// `partial[j-1][ω] = Σ_{i=1}^{j} (1/(i+1)) ‖(i+1)^{m+1} Δ^{m+1}_i f(ω)‖^{q0}`.
    pub partial: Vec<Vec<f64>>,
}

/// `Φ_{m,q0}(f)(ω) = (Σ_{j=1}^{n_max} (1/(j+1)) ‖(j+1)^{m+1} Δ^{m+1}_j f(ω)‖^{q0})^{1/q0}`.
pub fn littlewood_paley_phi(t: &MarkovOperator, m: usize, q0: f64, f: &StateFn, n_max: usize) -> Result<LittlewoodPaley> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be >= 1"));
    }
    check_q(q0)?;
    let table = DeltaTable::new(t, f, &[m + 1], n_max)?;
    let k = f.k();
    let s = f.space;
    let mut acc = vec![0.0; k];
    let mut partial = Vec::with_capacity(n_max);
    for j in 1..=n_max {
        let d = table.get(m + 1, j);
        let w = ((j + 1) as f64).powi(m as i32 + 1);
        for (state, a) in acc.iter_mut().enumerate() {
            let v: Vec<f64> = d.row(state).iter().map(|x| x * w).collect();
            *a += pow_q(s.norm_of(&v), q0) / (j + 1) as f64;
        }
        partial.push(acc.clone());
    }
    Ok(LittlewoodPaley {
        values: acc.iter().map(|a| a.powf(q0.recip())).collect(),
        partial,
    })
}

/// Per state, the `v_q` norm of `(M_n(T) f(ω))_{n=0..=n_max}`.
pub fn variation_of_averages(t: &MarkovOperator, f: &StateFn, q: f64, n_max: usize) -> Result<StateFn> {
    check_q(q)?;
    if !(q > 2.0) {
        return Err(Error::InvalidExponent { value: q, reason: "variation of ergodic averages needs q > 2" });
    }
    let avgs = ergodic_averages(t, f, n_max)?;
    let s = f.space;
    let rows: Vec<Vec<Vec<f64>>> = (0..f.k())
        .map(|state| avgs.iter().map(|a| a.row(state).iter().copied().collect()).collect())
        .collect();
    let out: Vec<f64> = rows
        .iter()
        .map(|seq| {
            variation_power(seq.len(), q, |j| s.norm_of(&seq[j]), |i, j| s.dist(&seq[j], &seq[i])).powf(q.recip())
        })
        .collect();
    StateFn::scalar(&out)
}
