//! Symmetric diffusion semigroups `e^{tL}` of reversible chains, Poisson
//! kernels on the line and circle, and the lacunary experiments for the
//! necessity of Rademacher cotype.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::ergodic::{MarkovOperator, StateFn};
use crate::error::{invalid, Error, Result};
use crate::martingale::mean_lp;
use crate::normed::NormSpec;
use crate::variation::{check_increasing, check_q, jump_count, variation_power, TimeFamily};

/// Validation tolerance for the generator's symmetry and row sums.
pub const GENERATOR_TOL: f64 = 1e-12;
/// Eigenvalues below this in magnitude span the null space of `L`.
pub const NULL_EIGEN_TOL: f64 = 1e-10;

/// `T_t = e^{tL}` for a symmetric generator `L` with nonnegative off-diagonal
/// entries and zero row sums, evaluated spectrally.
#[derive(Debug, Clone)]
pub struct DiffusionSemigroup {
    generator: DMatrix<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl DiffusionSemigroup {
    pub fn new(generator: DMatrix<f64>) -> Result<Self> {
        let k = generator.nrows();
        if k == 0 || generator.ncols() != k {
            return Err(Error::InvalidOperator("generator must be square and nonempty".into()));
        }
        let mut asym = 0.0f64;
        for i in 0..k {
            let s: f64 = generator.row(i).sum();
            if s.abs() > GENERATOR_TOL {
                return Err(Error::InvalidOperator(format!("generator row {i} sums to {s}")));
            }
            for j in 0..k {
                asym = asym.max((generator[(i, j)] - generator[(j, i)]).abs());
                if i != j && generator[(i, j)] < 0.0 {
                    return Err(Error::InvalidOperator(format!("off-diagonal entry ({i},{j}) is negative")));
                }
            }
        }
        if asym > GENERATOR_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        let eig = SymmetricEigen::new(generator.clone());
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().map(|&mu| mu.min(0.0)).collect(),
            eigenvectors: eig.eigenvectors,
            generator,
        })
    }

    /// `L = Q − I` for a symmetric stochastic `Q`.
    pub fn from_markov(q: &MarkovOperator) -> Result<Self> {
        if !q.is_symmetric() {
            return Err(Error::NotSymmetric(
                (q.matrix() - q.matrix().transpose()).abs().max(),
            ));
        }
        let k = q.k();
        Self::new(q.matrix() - DMatrix::<f64>::identity(k, k))
    }

    pub fn k(&self) -> usize {
        self.generator.nrows()
    }

    pub fn generator(&self) -> &DMatrix<f64> {
        &self.generator
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Largest nonzero eigenvalue (the spectral gap is its negative), if any.
    pub fn gap_eigenvalue(&self) -> Option<f64> {
        self.eigenvalues
            .iter()
            .copied()
            .filter(|mu| mu.abs() >= NULL_EIGEN_TOL)
            .fold(None, |acc: Option<f64>, mu| Some(acc.map_or(mu, |a| a.max(mu))))
    }

    /// `V diag(φ(μ_i)) Vᵀ`.
    pub fn spectral_matrix(&self, phi: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (j, &mu) in self.eigenvalues.iter().enumerate() {
            let w = phi(mu);
            scaled.column_mut(j).iter_mut().for_each(|x| *x *= w);
        }
        scaled * v.transpose()
    }

    /// `V diag(φ(μ_i)) Vᵀ f`, coordinatewise.
    pub fn spectral_apply(&self, f: &StateFn, phi: impl Fn(f64) -> f64) -> Result<StateFn> {
        if f.k() != self.k() {
            return Err(Error::DimensionMismatch { expected: self.k(), actual: f.k() });
        }
        let v = &self.eigenvectors;
        let mut coeffs = v.transpose() * f.matrix();
        for (i, &mu) in self.eigenvalues.iter().enumerate() {
            let w = phi(mu);
            coeffs.row_mut(i).iter_mut().for_each(|x| *x *= w);
        }
        StateFn::new(f.space(), v * coeffs)
    }

    /// The matrix `e^{tL}`.
    pub fn matrix_at(&self, t: f64) -> Result<DMatrix<f64>> {
        check_time(t)?;
        Ok(self.spectral_matrix(|mu| (t * mu).exp()))
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(invalid("t", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

/// `T_t f = e^{tL} f`.
pub fn semigroup_apply(s: &DiffusionSemigroup, t: f64, f: &StateFn) -> Result<StateFn> {
    check_time(t)?;
    if t == 0.0 {
        if f.k() != s.k() {
            return Err(Error::DimensionMismatch { expected: s.k(), actual: f.k() });
        }
        return Ok(f.clone());
    }
    s.spectral_apply(f, |mu| (t * mu).exp())
}

/// `t^m ∂_t^m T_t f = t^m L^m e^{tL} f`.
pub fn derivative_family(s: &DiffusionSemigroup, m: usize, t: f64, f: &StateFn) -> Result<StateFn> {
    if m == 0 {
        return semigroup_apply(s, t, f);
    }
    if !(t > 0.0) || t.is_infinite() {
        return Err(invalid("t", format!("must be positive for m >= 1, got {t}")));
    }
    s.spectral_apply(f, |mu| (t * mu).powi(m as i32) * (t * mu).exp())
}

fn orbit(s: &DiffusionSemigroup, f: &StateFn, times: &[f64]) -> Result<Vec<StateFn>> {
    if times.is_empty() {
        return Err(Error::Empty("times"));
    }
    check_increasing(times)?;
    if !(times[0] > 0.0) {
        return Err(invalid("times", "must be positive"));
    }
    times.iter().map(|&t| semigroup_apply(s, t, f)).collect()
}

fn check_q_above_2(q: f64) -> Result<()> {
    check_q(q)?;
    if !(q > 2.0) {
        return Err(Error::InvalidExponent { value: q, reason: "semigroup variation needs q > 2" });
    }
    Ok(())
}

/// Per state, the `v_q` norm of `(T_t f(ω))_{t ∈ times}`.
pub fn semigroup_variation(s: &DiffusionSemigroup, f: &StateFn, q: f64, times: &[f64]) -> Result<StateFn> {
    check_q_above_2(q)?;
    let orbit = orbit(s, f, times)?;
    let sp = f.space();
    let out: Vec<f64> = (0..f.k())
        .map(|w| {
            let vals: Vec<Vec<f64>> = orbit.iter().map(|g| g.value(w)).collect();
            variation_power(vals.len(), q, |j| sp.norm_of(&vals[j]), |i, j| sp.dist(&vals[j], &vals[i]))
                .powf(q.recip())
        })
        .collect();
    StateFn::scalar(&out)
}

/// Per state, the `λ`-jump count of `(T_t f(ω))_{t ∈ times}`.
pub fn semigroup_jump_counts(s: &DiffusionSemigroup, f: &StateFn, lambda: f64, times: &[f64]) -> Result<Vec<usize>> {
    let orbit = orbit(s, f, times)?;
    (0..f.k())
        .map(|w| {
            let fam = TimeFamily::new(f.space(), times.to_vec(), orbit.iter().map(|g| g.value(w)).collect())?;
            jump_count(&fam, lambda)
        })
        .collect()
}

/// `λ ‖N((T_t f)_t, λ)^{1/q}‖_p / ‖f‖_p`.
pub fn jump_estimate_ratio(
    s: &DiffusionSemigroup,
    f: &StateFn,
    q: f64,
    p: f64,
    lambda: f64,
    times: &[f64],
) -> Result<f64> {
    check_q_above_2(q)?;
    if !(lambda > 0.0) {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    let counts = semigroup_jump_counts(s, f, lambda, times)?;
    let roots: Vec<f64> = counts.iter().map(|&n| (n as f64).powf(q.recip())).collect();
    let num = lambda * mean_lp(&roots, p);
    let den = f.lp_norm(p);
    Ok(if num == 0.0 { 0.0 } else { num / den })
}

/// Orthogonal projection of each coordinate onto the null space of `L`, the
/// limit of `T_t f` as `t → ∞`.
pub fn mean_projection(s: &DiffusionSemigroup, f: &StateFn) -> Result<StateFn> {
    s.spectral_apply(f, |mu| if mu.abs() < NULL_EIGEN_TOL { 1.0 } else { 0.0 })
}

/// For each `δ`, `‖ω ↦ sup_{t ≤ δ} ‖T_t f(ω) − f(ω)‖‖_p` over the grid formed by
/// all points `δ' k / 64` (`k = 1..=64`, `δ'` ranging over `deltas`) that lie
/// in `(0, δ]`. Sharing one grid makes the profile monotone in `δ`.
pub fn convergence_rate_profile(s: &DiffusionSemigroup, f: &StateFn, p: f64, deltas: &[f64]) -> Result<Vec<f64>> {
    const STEPS: usize = 64;
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0) || d.is_infinite()) {
        return Err(invalid("deltas", format!("must be positive and finite, got {d}")));
    }
    let mut grid: Vec<f64> = deltas
        .iter()
        .flat_map(|&d| (1..=STEPS).map(move |k| d * k as f64 / STEPS as f64))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let sp = f.space();
    // running sup of the pointwise deviation along the sorted grid
    let mut running = vec![0.0f64; f.k()];
    let mut sups = Vec::with_capacity(grid.len());
    for &t in &grid {
        let g = semigroup_apply(s, t, f)?;
        for (w, r) in running.iter_mut().enumerate() {
            *r = r.max(sp.dist(&g.value(w), &f.value(w)));
        }
        sups.push(running.clone());
    }
    Ok(deltas
        .iter()
        .map(|&d| {
            let idx = grid.partition_point(|&t| t <= d);
            if idx == 0 {
                0.0
            } else {
                mean_lp(&sups[idx - 1], p)
            }
        })
        .collect())
}

/// `‖T_t f − P f‖_p` for each `t`, with `P` the mean projection.
pub fn convergence_at_infinity(s: &DiffusionSemigroup, f: &StateFn, p: f64, times: &[f64]) -> Result<Vec<f64>> {
    let proj = mean_projection(s, f)?;
    let sp = f.space();
    times
        .iter()
        .map(|&t| {
            let g = semigroup_apply(s, t, f)?;
            let dev: Vec<f64> = (0..f.k()).map(|w| sp.dist(&g.value(w), &proj.value(w))).collect();
            Ok(mean_lp(&dev, p))
        })
        .collect()
}

fn check_positive_t(t: f64) -> Result<()> {
    if !(t > 0.0) || t.is_infinite() {
        return Err(invalid("t", format!("must be positive and finite, got {t}")));
    }
    Ok(())
}

/// `P_t(x) = (1/t) (1/π) (1 + (x/t)²)^{−1}`.
pub fn poisson_line(t: f64, x: f64) -> Result<f64> {
    check_positive_t(t)?;
    let u = x / t;
    Ok(1.0 / (t * PI * (1.0 + u * u)))
}

/// `ℙ_t(θ) = Σ_{n∈ℤ} e^{−t|n|} e^{2πinθ}` in closed form.
pub fn poisson_circle(t: f64, theta: f64) -> Result<f64> {
    check_positive_t(t)?;
    let r = (-t).exp();
    let r2 = (-2.0 * t).exp();
    Ok(-(-2.0 * t).exp_m1() / (1.0 - 2.0 * r * (2.0 * PI * theta).cos() + r2))
}

/// `Σ_{|n| ≤ N} e^{−t|n|} e^{2πinθ}`.
pub fn poisson_circle_series(t: f64, theta: f64, n: usize) -> Result<f64> {
    check_positive_t(t)?;
    let tail: f64 = (1..=n)
        .rev()
        .map(|k| (-t * k as f64).exp() * (2.0 * PI * k as f64 * theta).cos())
        .sum();
    Ok(1.0 + 2.0 * tail)
}

/// `Σ_{|n| ≤ N} P_t(x + n)`, summed from the smallest terms up.
pub fn periodized_poisson_line(t: f64, x: f64, n: usize) -> Result<f64> {
    check_positive_t(t)?;
    let mut acc = 0.0;
    for k in (1..=n).rev() {
        acc += poisson_line(t, x + k as f64)? + poisson_line(t, x - k as f64)?;
    }
    Ok(acc + poisson_line(t, x)?)
}

/// `|ℙ_{2πt}(x) − Σ_{|n| ≤ N} P_t(x + n)|`.
///
/// The Fourier transform of `P_t` is `e^{−2πt|ξ|}`, so the periodization of
/// `P_t` is the circle kernel at parameter `2πt`.
pub fn poisson_summation_residual(t: f64, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("N", "must be >= 1"));
    }
    Ok((poisson_circle(2.0 * PI * t, x)? - periodized_poisson_line(t, x, n)?).abs())
}

/// `|ℙ_t(x) − Σ_{|n| ≤ N} P_t(x + n)|`, pairing the kernels at equal `t`.
pub fn poisson_summation_residual_unscaled(t: f64, x: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(invalid("N", "must be >= 1"));
    }
    Ok((poisson_circle(t, x)? - periodized_poisson_line(t, x, n)?).abs())
}

/// Upper bound `(2/π) t / (N + 1/2 − |x|)` on the two tails of the periodized
/// sum beyond `|n| = N`, for `|x| ≤ 1/2`.
pub fn poisson_tail_bound(t: f64, x: f64, n: usize) -> f64 {
    let a = n as f64 + 0.5 - x.abs();
    2.0 * t / (PI * a)
}

/// `t_i = ln(1 + 1/(2^i − 1))`.
pub fn lacunary_time(i: u32) -> f64 {
    let p = 2f64.powi(i as i32);
    (1.0 / (p - 1.0)).ln_1p()
}

/// `|e^{−t_i 2^i} − e^{−t_{i+1} 2^i}|`.
pub fn lacunary_gap(i: u32) -> Result<f64> {
    if i == 0 || i > 1000 {
        return Err(invalid("i", format!("must be in 1..=1000, got {i}")));
    }
    let p = 2f64.powi(i as i32);
    Ok(((-lacunary_time(i) * p).exp() - (-lacunary_time(i + 1) * p).exp()).abs())
}

/// `(Σ_k ‖x_k‖^q)^{1/q} / ‖ ‖Σ_k ε_k e^{2πi 2^k θ} x_k‖ ‖_{L^q[0,1]}` with
/// `x_k` the standard basis vectors of `ℓ^r_ℂ`; each coordinate's modulus is
/// used in the `ℓ^r` norm. The `L^q` norm uses `2^{K+4}` equispaced nodes
/// (eight times the Nyquist count of the top frequency).
pub fn cotype_necessity_ratio(space: NormSpec, q: f64, signs: &[f64]) -> Result<f64> {
    cotype_necessity_ratio_on_grid(space, q, signs, 1usize << (signs.len() + 4))
}

/// [`cotype_necessity_ratio`] with an explicit quadrature size.
pub fn cotype_necessity_ratio_on_grid(space: NormSpec, q: f64, signs: &[f64], nodes: usize) -> Result<f64> {
    let k = signs.len();
    if k == 0 {
        return Err(Error::Empty("signs"));
    }
    if k > space.dim() {
        return Err(Error::TooLarge { what: "frequency count", len: k, max: space.dim() });
    }
    if k > 20 {
        return Err(Error::TooLarge { what: "frequency count", len: k, max: 20 });
    }
    if nodes < 1 << (k + 3) {
        return Err(invalid("quadrature", format!("{nodes} nodes cannot resolve frequency 2^{k}; need >= 2^{}", k + 3)));
    }
    check_q(q)?;
    let mut moduli = vec![0.0; space.dim()];
    let mut acc = 0.0;
    for node in 0..nodes {
        let theta = node as f64 / nodes as f64;
        for (c, eps) in signs.iter().enumerate() {
            let phase = 2.0 * PI * 2f64.powi(c as i32 + 1) * theta;
            let (re, im) = (eps * phase.cos(), eps * phase.sin());
            moduli[c] = re.hypot(im);
        }
        acc += space.norm_of(&moduli).powf(q);
    }
    let lq = (acc / nodes as f64).powf(q.recip());
    let lhs = (k as f64).powf(q.recip());
    Ok(lhs / lq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state_generator() -> DiffusionSemigroup {
        DiffusionSemigroup::from_markov(&MarkovOperator::swap()).unwrap()
    }

    fn cycle(k: usize) -> DiffusionSemigroup {
        DiffusionSemigroup::from_markov(&MarkovOperator::cycle_walk(k, 0.5).unwrap()).unwrap()
    }

    fn wave(k: usize) -> StateFn {
        let rows: Vec<Vec<f64>> = (0..k).map(|i| vec![(i as f64 * 0.9).sin(), (i * i % 5) as f64 - 2.0]).collect();
        StateFn::from_rows(NormSpec::new(3.0, 2).unwrap(), &rows).unwrap()
    }

    #[test]
    fn validation() {
        let bad = DMatrix::from_row_slice(2, 2, &[-1.0, 1.0, 0.5, -0.5]);
        assert!(matches!(DiffusionSemigroup::new(bad), Err(Error::NotSymmetric(_))));
        let neg = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert!(DiffusionSemigroup::new(neg).is_err());
        let chain = MarkovOperator::from_rows(&[vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert!(DiffusionSemigroup::from_markov(&chain).is_err());
    }

    #[test]
    fn apply_examples() {
        let s = two_state_generator();
        let f = StateFn::scalar(&[1.0, -1.0]).unwrap();
        assert_eq!(semigroup_apply(&s, 0.0, &f).unwrap(), f);
        let g = semigroup_apply(&s, 2f64.ln(), &f).unwrap();
        assert!((g.value(0)[0] - 0.25).abs() < 1e-14);
        let c = StateFn::scalar(&[3.0, 3.0]).unwrap();
        assert!(semigroup_apply(&s, 5.0, &c).unwrap().dist_max(&c) < 1e-14);
        assert!(semigroup_apply(&s, -1.0, &f).is_err());
    }

    #[test]
    fn derivative_examples() {
        let s = cycle(6);
        let f = wave(6);
        assert_eq!(derivative_family(&s, 0, 0.7, &f).unwrap(), semigroup_apply(&s, 0.7, &f).unwrap());
        let c = StateFn::constant(NormSpec::scalar(), 6, &[2.0]).unwrap();
        assert!(derivative_family(&s, 2, 1.3, &c).unwrap().max_norm() < 1e-14);
        assert!(derivative_family(&s, 1, 0.0, &f).is_err());
        // the two-state eigenvalue -2 gives t (-2) e^{-2t} on f = (1, -1)
        let s2 = two_state_generator();
        let g = StateFn::scalar(&[1.0, -1.0]).unwrap();
        let t = 0.5;
        let d = derivative_family(&s2, 1, t, &g).unwrap();
        assert!((d.value(0)[0] - (-2.0 * t) * (-2.0 * t).exp()).abs() < 1e-14);
        // and the derivative matches a central difference of T_t
        let h = 1e-5;
        let fd = (semigroup_apply(&s, 1.0 + h, &f).unwrap().matrix() - semigroup_apply(&s, 1.0 - h, &f).unwrap().matrix()) / (2.0 * h);
        let exact = derivative_family(&s, 1, 1.0, &f).unwrap();
        assert!((exact.matrix() - fd).abs().max() < 1e-8);
    }

    #[test]
    fn variation_and_jumps() {
        let s = cycle(8);
        let c = StateFn::constant(NormSpec::new(2.0, 2).unwrap(), 8, &[3.0, 4.0]).unwrap();
        let times: Vec<f64> = (0..20).map(|i| 2f64.powi(i - 10)).collect();
        let v = semigroup_variation(&s, &c, 4.0, &times).unwrap();
        assert!(v.norms().iter().all(|x| (x - 5.0).abs() < 1e-12));
        let f = wave(8);
        let one = semigroup_variation(&s, &f, 3.0, &[0.5]).unwrap();
        let at = semigroup_apply(&s, 0.5, &f).unwrap();
        for (a, b) in one.norms().iter().zip(at.norms()) {
            assert!((a - b).abs() < 1e-14);
        }
        let v = semigroup_variation(&s, &f, 3.0, &times).unwrap();
        for lambda in [0.01, 0.1, 0.5, 1.0] {
            let n = semigroup_jump_counts(&s, &f, lambda, &times).unwrap();
            for (w, &count) in n.iter().enumerate() {
                assert!(lambda.powi(3) * count as f64 <= v.norms()[w].powi(3));
            }
        }
        let top = v.max_norm();
        assert_eq!(jump_estimate_ratio(&s, &f, 3.0, 2.0, top * 2.0, &times).unwrap(), 0.0);
        assert!(semigroup_variation(&s, &f, 2.0, &times).is_err());
    }

    #[test]
    fn projection_and_convergence() {
        let s = cycle(8);
        let f = wave(8);
        let p = mean_projection(&s, &f).unwrap();
        let mean: Vec<f64> = (0..2).map(|c| (0..8).map(|w| f.value(w)[c]).sum::<f64>() / 8.0).collect();
        for w in 0..8 {
            assert!(p.value(w).iter().zip(&mean).all(|(a, b)| (a - b).abs() < 1e-12));
        }
        let gap = s.gap_eigenvalue().unwrap();
        for t in [0.5, 2.0, 8.0] {
            let d = semigroup_apply(&s, t, &f).unwrap().dist_max(&p);
            assert!(d <= (t * gap).exp() * f.max_norm() * 2f64.sqrt() * 8f64.sqrt() + 1e-12);
        }
        let deltas = [1.0, 0.5, 0.25, 0.125, 0.01];
        let prof = convergence_rate_profile(&s, &f, 2.0, &deltas).unwrap();
        assert!(prof.windows(2).all(|w| w[1] <= w[0]));
        assert!(prof[4] < 0.05 * prof[0]);
        let c = StateFn::constant(NormSpec::scalar(), 8, &[1.0]).unwrap();
        assert!(convergence_rate_profile(&s, &c, 2.0, &deltas).unwrap().iter().all(|&v| v < 1e-12));
    }

    #[test]
    fn poisson_kernels() {
        assert!((poisson_line(1.0, 0.0).unwrap() - 1.0 / PI).abs() < 1e-16);
        assert_eq!(poisson_line(2.0, 3.0).unwrap(), 0.5 * poisson_line(1.0, 1.5).unwrap());
        assert!(poisson_line(0.0, 1.0).is_err());
        assert!((poisson_circle(2f64.ln(), 0.0).unwrap() - 3.0).abs() < 1e-14);
        for t in [0.15, 0.5, 2.0] {
            for theta in [0.0, 0.13, 0.5, 0.77] {
                let a = poisson_circle(t, theta).unwrap();
                let b = poisson_circle_series(t, theta, 200).unwrap();
                assert!((a - b).abs() <= 1e-10, "t={t} theta={theta}");
            }
        }
        // at t = 0.1 the dropped tail 2 Σ_{n>200} e^{-tn} is about 4e-8
        let t: f64 = 0.1;
        let tail = 2.0 * (-t * 201.0).exp() / (1.0 - (-t).exp());
        let err = poisson_circle(t, 0.0).unwrap() - poisson_circle_series(t, 0.0, 200).unwrap();
        assert!((err - tail).abs() < 1e-4 * tail);
    }

    #[test]
    fn poisson_summation() {
        let mut prev = f64::INFINITY;
        for n in [1, 10, 100, 1000, 10_000] {
            let r = poisson_summation_residual(1.0, 0.3, n).unwrap();
            assert!(r <= prev);
            assert!(r <= poisson_tail_bound(1.0, 0.3, n));
            prev = r;
        }
        assert!(prev <= 1e-3);
        // pairing equal parameters leaves an O(1) discrepancy
        assert!(poisson_summation_residual_unscaled(1.0, 0.3, 10_000).unwrap() > 0.3);
        let a = periodized_poisson_line(1.0, 0.3, 50).unwrap();
        let b = periodized_poisson_line(1.0, 1.3, 50).unwrap();
        let shift = poisson_line(1.0, 1.3 + 50.0).unwrap() - poisson_line(1.0, 0.3 - 50.0).unwrap();
        assert!((b - a - shift).abs() < 1e-14);
    }

    #[test]
    fn lacunary_examples() {
        assert_eq!(lacunary_gap(1).unwrap(), 0.3125);
        let limit = (-0.5f64).exp() - (-1.0f64).exp();
        assert!((lacunary_gap(40).unwrap() - limit).abs() < 1e-6);
        assert!(lacunary_gap(0).is_err());
    }

    #[test]
    fn cotype_ratio_examples() {
        for r in [1.0, 2.0, 4.0, f64::INFINITY] {
            let sp = NormSpec::new(r, 3).unwrap();
            assert!((cotype_necessity_ratio(sp, 2.0, &[1.0]).unwrap() - 1.0).abs() < 1e-12);
        }
        let l2 = NormSpec::new(2.0, 16).unwrap();
        for k in [2, 4, 8, 16] {
            let signs: Vec<f64> = (0..k).map(|i| if i % 3 == 0 { -1.0 } else { 1.0 }).collect();
            assert!((cotype_necessity_ratio(l2, 2.0, &signs).unwrap() - 1.0).abs() < 1e-10);
        }
        let l4 = NormSpec::new(4.0, 16).unwrap();
        let r = cotype_necessity_ratio(l4, 2.0, &[1.0; 16]).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
        assert!(cotype_necessity_ratio(NormSpec::new(4.0, 2).unwrap(), 2.0, &[1.0; 3]).is_err());
        assert!(cotype_necessity_ratio_on_grid(l4, 2.0, &[1.0; 4], 64).is_err());
    }
}
