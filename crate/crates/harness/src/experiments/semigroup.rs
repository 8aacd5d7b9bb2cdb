use std::f64::consts::E;

use rand::Rng;
use varlab::ergodic::StateFn;
use varlab::semigroup::*;
use varlab::tolerance::*;
use varlab::NormSpec;

use super::{fmax, fmin, join, require, Ctx};
use crate::config::Params;
use crate::corpus;
use crate::error::Result;
use crate::report::Row;
use crate::stats::estimate_constant;

pub fn semigroup_axioms(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let k_max = p.usize("K_max", 10)?;
    let ts = p.f64_list("t", &[0.1, 1.0, 10.0])?;
    let sp = NormSpec::new(p.f64("r", 2.0)?, p.usize("dim", 2)?)?;
    require(k_max >= 2 && ts.iter().all(|&t| t >= 0.0), || "need K_max >= 2 and t >= 0".into())?;
    let per = ctx.map_corpus(|_, rng| {
        let k = rng.random_range(2..=k_max);
        let s = DiffusionSemigroup::from_markov(&corpus::symmetric_chain(k, rng)?)?;
        let f = corpus::state_fn(ctx.kind, k, sp, rng)?;
        let mut out = Vec::new();
        for &t in &ts {
            let m = s.matrix_at(t)?;
            let min_entry = m.min();
            let asym = (&m - m.transpose()).abs().max();
            let row_err = (0..k).map(|i| (m.row(i).sum() - 1.0).abs()).fold(0.0, f64::max);
            let mut law = 0.0f64;
            for &u in &ts {
                let lhs = semigroup_apply(&s, u, &semigroup_apply(&s, t, &f)?)?;
                law = law.max(lhs.dist_max(&semigroup_apply(&s, u + t, &f)?));
            }
            out.push([min_entry, asym, row_err, law]);
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    for (ti, &t) in ts.iter().enumerate() {
        let col = |c: usize| per.iter().map(move |x| x[ti][c]);
        let tag = |row: Row| row.with("t", t).with("K_max", k_max);
        let min_entry = fmin(col(0));
        let asym = fmax(col(1));
        let row_err = fmax(col(2));
        let law = fmax(col(3));
        rows.push(tag(Row::check("min_entry", min_entry, min_entry >= -SEMIGROUP_AXIOM)));
        rows.push(tag(Row::check("max_asymmetry", asym, asym <= SEMIGROUP_AXIOM)));
        rows.push(tag(Row::check("max_row_sum_error", row_err, row_err <= SEMIGROUP_AXIOM)));
        rows.push(tag(Row::check("max_law_error", law, law <= SEMIGROUP_AXIOM)).with("s", join(&ts)));
    }
    Ok(rows)
}

/// Geometric grid `2^{i/ρ}`, `|i| ≤ span·ρ`.
pub fn geometric_times(span: usize, per_octave: usize) -> Vec<f64> {
    let top = (span * per_octave) as i64;
    (-top..=top).map(|i| 2f64.powf(i as f64 / per_octave as f64)).collect()
}

struct Fixed {
    s: DiffusionSemigroup,
    k: usize,
}

/// One chain for the whole experiment, drawn from a stream no corpus
/// element uses.
fn fixed_chain(ctx: &Ctx, p: &Params) -> Result<Fixed> {
    let k = p.usize("K", 16)?;
    require(k >= 2, || "K must be >= 2".into())?;
    let mut rng = corpus::rng_for(ctx.seed, ctx.name, u64::MAX);
    Ok(Fixed { s: DiffusionSemigroup::from_markov(&corpus::symmetric_chain(k, &mut rng)?)?, k })
}

/// `sup_f ‖V_q f‖_p / ‖f‖_p` with `q = max(2, r) + 1/2` over geometric time
/// grids refined by doubling the points per octave.
pub fn semigroup_variation_sweep(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let chain = fixed_chain(ctx, p)?;
    let rs = p.f64_list("r", &[2.0, 3.0, 4.0])?;
    let dim = p.usize("dim", 3)?;
    let pp = p.f64("p", 2.0)?;
    let span = p.usize("span", 12)?;
    let refinements = p.usize_list("per_octave", &[1, 2, 4, 8, 16])?;
    require(!refinements.is_empty() && refinements.iter().all(|&r| r >= 1), || "per_octave must be >= 1".into())?;
    let mut rows = Vec::new();
    for &r in &rs {
        let sp = NormSpec::new(r, dim)?;
        let q = sp.cotype_exponent() + 0.5;
        require(q.is_finite(), || "r = inf has no finite cotype exponent".into())?;
        let per = ctx.map_corpus(|_, rng| {
            let f = corpus::state_fn(ctx.kind, chain.k, sp, rng)?;
            refinements
                .iter()
                .map(|&rho| {
                    let v = semigroup_variation(&chain.s, &f, q, &geometric_times(span, rho))?;
                    Ok(v.lp_norm(pp) / f.lp_norm(pp))
                })
                .collect::<Result<Vec<f64>>>()
        })?;
        let seq: Vec<f64> = (0..refinements.len()).map(|i| fmax(per.iter().map(|x| x[i]))).collect();
        let tag = |row: Row| row.with("r", r).with("q", q).with("p", pp).with("K", chain.k).with("span", span);
        for (&rho, &v) in refinements.iter().zip(&seq) {
            rows.push(tag(Row::record("ratio", v)).with("per_octave", rho));
        }
        let s = estimate_constant(&seq)?;
        rows.push(tag(Row::record("max_ratio", s.max)).with("per_octave", join(&refinements)));
        rows.push(tag(Row::check("plateau_dispersion", s.dispersion, s.dispersion <= PLATEAU_DISPERSION)).with("per_octave", join(&refinements)));
    }
    Ok(rows)
}

/// Jump estimate ratios and the domination `λ^q N ≤ V_q^q` at every state.
pub fn jump_estimate(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let chain = fixed_chain(ctx, p)?;
    let sp = NormSpec::new(p.f64("r", 3.0)?, p.usize("dim", 3)?)?;
    let q = p.f64("q", 3.5)?;
    let pp = p.f64("p", 2.0)?;
    let lambdas = p.f64_list("lambda", &[0.05, 0.1, 0.2, 0.5, 1.0])?;
    let times = geometric_times(p.usize("span", 12)?, p.usize("per_octave", 4)?);
    let per = ctx.map_corpus(|_, rng| {
        let f: StateFn = corpus::state_fn(ctx.kind, chain.k, sp, rng)?;
        let v = semigroup_variation(&chain.s, &f, q, &times)?.norms();
        let mut ratios = Vec::new();
        let mut violations = 0usize;
        for &l in &lambdas {
            ratios.push(jump_estimate_ratio(&chain.s, &f, q, pp, l, &times)?);
            let n = semigroup_jump_counts(&chain.s, &f, l, &times)?;
            violations += n.iter().zip(&v).filter(|(&n, &v)| l.powf(q) * n as f64 > v.powf(q)).count();
        }
        Ok((ratios, violations))
    })?;
    let tag = |row: Row| row.with("q", q).with("p", pp).with("r", sp.r()).with("dim", sp.dim()).with("K", chain.k);
    let mut rows: Vec<Row> = lambdas
        .iter()
        .enumerate()
        .map(|(i, &l)| tag(Row::record("max_jump_ratio", fmax(per.iter().map(|x| x.0[i])))).with("lambda", l))
        .collect();
    let violations: usize = per.iter().map(|x| x.1).sum();
    rows.push(tag(Row::check("domination_violations", violations as f64, violations == 0)).with("lambda", join(&lambdas)));
    Ok(rows)
}

pub fn poisson_summation(_ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let t = p.f64("t", 1.0)?;
    let x = p.f64("x", 0.3)?;
    let ns = p.usize_list("N", &[10, 100, 1000, 10_000])?;
    let series_ts = p.f64_list("series_t", &[0.1, 0.15, 0.2, 0.5, 1.0, 2.0])?;
    let series_n = p.usize("series_N", 200)?;
    let nodes = p.usize("theta_nodes", 64)?;
    require(!ns.is_empty() && nodes >= 1, || "need N values and theta nodes".into())?;
    let mut rows = Vec::new();
    let mut residuals = Vec::new();
    for &n in &ns {
        let r = poisson_summation_residual(t, x, n)?;
        residuals.push(r);
        let tag = |row: Row| row.with("t", t).with("x", x).with("N", n);
        rows.push(tag(Row::record("residual", r)));
        rows.push(tag(Row::record("tail_bound", poisson_tail_bound(t, x, n))));
        rows.push(tag(Row::record("residual_unscaled_kernel", poisson_summation_residual_unscaled(t, x, n)?)));
    }
    let last = *residuals.last().expect("nonempty");
    let n_last = *ns.last().expect("nonempty");
    rows.push(Row::check("residual_at_largest_N", last, last <= POISSON_SUMMATION).with("t", t).with("x", x).with("N", n_last));
    let increases = residuals.windows(2).filter(|w| w[1] > w[0]).count();
    rows.push(Row::check("increases_in_N", increases as f64, increases == 0).with("t", t).with("x", x).with("N", join(&ns)));
    for &st in &series_ts {
        let err = (0..nodes)
            .map(|i| {
                let theta = i as f64 / nodes as f64;
                Ok((poisson_circle(st, theta)? - poisson_circle_series(st, theta, series_n)?).abs())
            })
            .collect::<Result<Vec<f64>>>()?;
        let err = fmax(err);
        let tail = 2.0 * (-st * (series_n + 1) as f64).exp() / (1.0 - (-st).exp());
        let tag = |row: Row| row.with("t", st).with("N", series_n);
        rows.push(tag(Row::check("series_max_error", err, err <= POISSON_SERIES)));
        rows.push(tag(Row::record("series_tail_bound", tail)));
    }
    Ok(rows)
}

pub fn lacunary(_ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let is = p.usize_list("i", &[1..=40].into_iter().flatten().collect::<Vec<_>>())?;
    let i_min = p.usize("i_min", 30)?;
    require(!is.is_empty(), || "need i values".into())?;
    let stated = (-1f64).exp() - (-2f64).exp();
    let actual = (-0.5f64).exp() - 1.0 / E;
    let mut rows = Vec::new();
    let mut far = Vec::new();
    for &i in &is {
        let g = lacunary_gap(i as u32)?;
        rows.push(Row::record("gap", g).with("i", i));
        if i >= i_min {
            far.push((g - stated).abs());
        }
    }
    if is.contains(&1) {
        let g = lacunary_gap(1)?;
        rows.push(Row::check("gap_at_1", g, g == 0.3125).with("i", 1));
    }
    if !far.is_empty() {
        let worst = fmax(far.iter().copied());
        rows.push(Row::check("max_distance_to_exp1_minus_exp2", worst, worst <= LACUNARY_LIMIT).with("i", format!(">={i_min}")));
        let worst_actual = fmax(
            is.iter().filter(|&&i| i >= i_min).map(|&i| (lacunary_gap(i as u32).expect("valid index") - actual).abs()),
        );
        rows.push(Row::record("max_distance_to_exp_half_minus_exp1", worst_actual).with("i", format!(">={i_min}")));
    }
    Ok(rows)
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Ratio growth in `K` for lacunary sums with random signs. The `ℓ^4`, `q = 2`
/// slope and the `ℓ^2`, `q = 2` values are contracts.
pub fn cotype_necessity(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let rs = p.f64_list("r", &[2.0, 4.0])?;
    let q = p.f64("q", 2.0)?;
    let ks = p.usize_list("K", &[4, 8, 16])?;
    require(ks.len() >= 2 && ks.iter().all(|&k| (1..=20).contains(&k)), || "need at least two K values in 1..=20".into())?;
    let dim = *ks.iter().max().expect("nonempty");
    let mut rows = Vec::new();
    for &r in &rs {
        let sp = NormSpec::new(r, dim)?;
        let mut worst = Vec::new();
        for &k in &ks {
            let ratios = ctx.map_corpus(|_, rng| Ok(cotype_necessity_ratio(sp, q, &corpus::signs(k, rng))?))?;
            let (hi, lo) = (fmax(ratios.iter().copied()), fmin(ratios.iter().copied()));
            let tag = |row: Row| row.with("r", r).with("q", q).with("K", k);
            rows.push(tag(Row::record("max_ratio", hi)));
            rows.push(tag(Row::record("min_ratio", lo)));
            if r == 2.0 && q == 2.0 {
                let dev = (hi - 1.0).abs().max((lo - 1.0).abs());
                rows.push(tag(Row::check("l2_deviation_from_1", dev, dev <= COTYPE_L2)));
            }
            worst.push(hi);
        }
        let kx: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
        let slope = loglog_slope(&kx, &worst);
        let tag = |row: Row| row.with("r", r).with("q", q).with("K", join(&ks));
        if r == 4.0 && q == 2.0 {
            let ok = (slope - COTYPE_SLOPE_L4).abs() <= COTYPE_SLOPE_TOL;
            rows.push(tag(Row::check("loglog_slope", slope, ok)));
        } else {
            rows.push(tag(Row::record("loglog_slope", slope)));
        }
    }
    Ok(rows)
}
