//! Contract tolerances. Reports mark a row `pass` or `fail` only against one
//! of these.

/// `vq_norm_exact` against the subset oracle, relative.
pub const VQ_ORACLE_REL: f64 = 1e-12;
/// Summation-by-parts identities for `Δ^m_n`, relative to [`crate::ergodic::Residual::scale`].
pub const EXACT_IDENTITY_REL: f64 = 1e-10;
/// Fractional averages against powers, ergodic averages and differences.
pub const FRAC_AVERAGE: f64 = 1e-12;
/// Positivity, symmetry, stochasticity and the semigroup law for `e^{tL}`.
pub const SEMIGROUP_AXIOM: f64 = 1e-10;
/// Poisson summation residual at `N = 10^4`.
pub const POISSON_SUMMATION: f64 = 1e-3;
/// Circle kernel closed form against the series truncated at `|n| ≤ 200`.
pub const POISSON_SERIES: f64 = 1e-10;
/// Martingale cotype functional in `ℓ^2` with `q0 = 2`, relative.
pub const HILBERT_EXACT_REL: f64 = 1e-12;
/// Lacunary gap against its limit for `i ≥ 30`.
pub const LACUNARY_LIMIT: f64 = 1e-6;
/// Expected log-log slope of the cotype-necessity ratio for `ℓ^4`, `q = 2`.
pub const COTYPE_SLOPE_L4: f64 = 0.25;
pub const COTYPE_SLOPE_TOL: f64 = 0.04;
/// Cotype-necessity ratio in `ℓ^2`, `q = 2`, against 1.
pub const COTYPE_L2: f64 = 1e-10;
/// Lower bound for gaps that are nonnegative in exact arithmetic.
pub const NONNEGATIVE_GAP: f64 = -1e-12;
/// Last-quartile dispersion of refinement sweeps.
pub const PLATEAU_DISPERSION: f64 = 0.10;
/// Last-quartile dispersion of the running supremum of the elementary sums.
pub const ELEMENTARY_DISPERSION: f64 = 0.05;
/// Growth allowed in the `LV` probe constant when `J` increases.
pub const LV_PROBE_GROWTH: f64 = 0.10;
