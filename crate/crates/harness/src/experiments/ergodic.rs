use num_complex::Complex64;
use rand::Rng;
use varlab::ergodic::*;
use varlab::tolerance::{ELEMENTARY_DISPERSION, EXACT_IDENTITY_REL, FRAC_AVERAGE, NONNEGATIVE_GAP, PLATEAU_DISPERSION};
use varlab::variation::TimeFamily;
use varlab::diffavg::young_convolution_residual;
use varlab::NormSpec;

use super::{fmax, fmin, join, require, Ctx};
use crate::config::Params;
use crate::corpus;
use crate::error::Result;
use crate::report::Row;
use crate::stats::{estimate_constant, plateau_dispersion};

fn space(p: &Params, r: f64, dim: usize) -> Result<NormSpec> {
    Ok(NormSpec::new(p.f64("r", r)?, p.usize("dim", dim)?)?)
}

/// Summation-by-parts identities on random chains; the as-printed variants
/// are recorded next to the consistent ones.
pub fn ergodic_identity(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let sp = space(p, 3.0, 2)?;
    let k_max = p.usize("K_max", 8)?;
    let n_max = p.usize("n_max", 50)?;
    let ms = p.usize_list("m", &[0, 1, 2, 3])?;
    require(k_max >= 2 && n_max >= 2 && !ms.is_empty(), || "need K_max >= 2, n_max >= 2 and some m".into())?;
    let per = ctx.map_corpus(|i, rng| {
        let m = ms[i % ms.len()];
        let k = rng.random_range(2..=k_max);
        let t = corpus::random_chain(k, rng)?;
        let f = corpus::state_fn(ctx.kind, k, sp, rng)?;
        let n = rng.random_range(1..=n_max);
        let max_ratio = rng.random_range(1.1..4.0);
        let len = rng.random_range(2..=8);
        let idx = corpus::index_sequence(len, max_ratio, n_max, rng);
        let decomposition = if m >= 1 {
            Some((
                decomposition_formula_residual(&t, m, n, &f)?.relative(),
                decomposition_formula_residual_with(&t, m, n, &f, IdentityForm::AsPrinted)?.relative(),
            ))
        } else {
            None
        };
        let abc = (
            abc_split_residual(&t, m, &idx, &f)?.relative(),
            abc_split_residual_with(&t, m, &idx, &f, IdentityForm::AsPrinted)?.relative(),
        );
        Ok((m, decomposition, abc))
    })?;
    let mut rows = Vec::new();
    for &m in &ms {
        let mine: Vec<_> = per.iter().filter(|x| x.0 == m).collect();
        if mine.is_empty() {
            continue;
        }
        let tag = |row: Row| row.with("m", m).with("K_max", k_max).with("n_max", n_max).with("r", sp.r()).with("dim", sp.dim());
        if m >= 1 {
            let worst = fmax(mine.iter().filter_map(|x| x.1.map(|d| d.0))).max(0.0);
            rows.push(tag(Row::check("decomposition_rel_residual", worst, worst <= EXACT_IDENTITY_REL)));
            rows.push(tag(Row::record("decomposition_as_printed_rel_residual", fmax(mine.iter().filter_map(|x| x.1.map(|d| d.1))))));
        }
        let worst = fmax(mine.iter().map(|x| x.2 .0)).max(0.0);
        rows.push(tag(Row::check("abc_rel_residual", worst, worst <= EXACT_IDENTITY_REL)));
        rows.push(tag(Row::record("abc_as_printed_rel_residual", fmax(mine.iter().map(|x| x.2 .1)))));
    }
    Ok(rows)
}

/// `M^0_n = T^n f`, `M^1_n = M_n(T) f` and the negative orders. The literal
/// negative-order comparison is against `(n+1)^m Δ^m_n f`; the shifted one is
/// against `(n+1)^m Δ^m_{n−m} f` for `n ≥ m`. Both are relative to
/// `(n+1)^m max ‖f‖`.
pub fn fractional_averages(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let sp = space(p, 2.0, 2)?;
    let k_max = p.usize("K_max", 8)?;
    let n_max = p.usize("n_max", 64)?;
    let ms = p.usize_list("m", &[1, 2, 3])?;
    require(k_max >= 2, || "K_max must be >= 2".into())?;
    let top_m = ms.iter().copied().max().unwrap_or(0);
    let per = ctx.map_corpus(|_, rng| {
        let k = rng.random_range(2..=k_max);
        let t = corpus::random_chain(k, rng)?;
        let f = corpus::state_fn(ctx.kind, k, sp, rng)?;
        let orders: Vec<usize> = (0..=top_m).collect();
        let table = DeltaTable::new(&t, &f, &orders, n_max)?;
        let avgs = ergodic_averages(&t, &f, n_max)?;
        let fmax_norm = f.max_norm();
        let err = |m: &ComplexStateFn, target: &nalgebra::DMatrix<f64>| -> Result<f64> {
            let target = StateFn::new(sp, target.clone())?;
            Ok(m.re.dist_max(&target).max(m.im.max_norm()))
        };
        let mut e0 = 0.0f64;
        let mut e1 = 0.0f64;
        let mut literal = vec![0.0f64; ms.len()];
        let mut shifted = vec![0.0f64; ms.len()];
        for n in 0..=n_max {
            e0 = e0.max(err(&frac_average(&t, Complex64::new(0.0, 0.0), n, &f)?, table.get(0, n))?);
            e1 = e1.max(err(&frac_average(&t, Complex64::new(1.0, 0.0), n, &f)?, &avgs[n])?);
            for (mi, &m) in ms.iter().enumerate() {
                let w = ((n + 1) as f64).powi(m as i32);
                let scale = w * fmax_norm;
                let neg = frac_average(&t, Complex64::new(-(m as f64), 0.0), n, &f)?;
                literal[mi] = literal[mi].max(err(&neg, &(table.get(m, n) * w))? / scale);
                if n >= m {
                    shifted[mi] = shifted[mi].max(err(&neg, &(table.get(m, n - m) * w))? / scale);
                }
            }
        }
        Ok((e0, e1, literal, shifted))
    })?;
    let tag = |row: Row| row.with("K_max", k_max).with("n_max", n_max).with("r", sp.r()).with("dim", sp.dim());
    let e0 = fmax(per.iter().map(|x| x.0));
    let e1 = fmax(per.iter().map(|x| x.1));
    let mut rows = vec![
        tag(Row::check("m0_vs_powers_max_error", e0, e0 <= FRAC_AVERAGE)).with("m", 0),
        tag(Row::check("m1_vs_ergodic_avg_max_error", e1, e1 <= FRAC_AVERAGE)).with("m", 1),
    ];
    for (mi, &m) in ms.iter().enumerate() {
        let lit = fmax(per.iter().map(|x| x.2[mi]));
        let sh = fmax(per.iter().map(|x| x.3[mi]));
        rows.push(tag(Row::check("neg_order_vs_delta_n_max_rel_error", lit, lit <= FRAC_AVERAGE)).with("m", format!("-{m}")));
        rows.push(tag(Row::check("neg_order_vs_delta_n_minus_m_max_rel_error", sh, sh <= FRAC_AVERAGE)).with("m", format!("-{m}")));
    }
    Ok(rows)
}

/// `Λ_j` against its bounds. `Λ_j` is a sum of indicators of the windows
/// `[n_k, 2n_{k−1}]`, so its maximum is attained at some `n_k`; both window
/// ends are evaluated.
pub fn lambda_j_bounds(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let ms = p.usize_list("m", &[0, 1, 2, 3])?;
    let q0s = p.f64_list("q0", &[2.0, 3.0])?;
    let len_max = p.usize("len_max", 24)?;
    let cap = p.usize("cap", 100_000)?;
    require(len_max >= 2, || "len_max must be >= 2".into())?;
    let per = ctx.map_corpus(|_, rng| {
        let len = rng.random_range(2..=len_max);
        let max_ratio = rng.random_range(1.05..3.5);
        let idx = corpus::index_sequence(len, max_ratio, cap, rng);
        let js: Vec<usize> = idx.windows(2).flat_map(|w| [w[1], 2 * w[0], 2 * w[0] + 1]).collect();
        let mut out = Vec::new();
        for &m in &ms {
            for &q0 in &q0s {
                let worst = js.iter().map(|&j| lambda_j(m, q0, &idx, j)).collect::<varlab::Result<Vec<f64>>>()?;
                out.push(fmax(worst));
            }
        }
        Ok(out)
    })?;
    let mut rows = Vec::new();
    let mut c = 0;
    for &m in &ms {
        for &q0 in &q0s {
            let worst = fmax(per.iter().map(|x| x[c])).max(0.0);
            c += 1;
            let (bound, holds) = match m {
                1 => (0.0, worst == 0.0),
                0 => (2f64.powf(q0), worst <= 2f64.powf(q0)),
                _ => {
                    let b = 2f64.powf((m as f64 - 1.0) * q0);
                    (b, worst <= b)
                }
            };
            rows.push(Row::check("max_lambda_j", worst, holds).with("m", m).with("q0", q0).with("bound", bound).with("len_max", len_max));
        }
    }
    Ok(rows)
}

/// Running supremum of the elementary sums over `n ≤ n_max`, plus the
/// weighted-variation and Young-convolution gaps on random pairs.
pub fn elementary_constants(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let ms = p.usize_list("m", &[0, 1, 2, 3])?;
    let q0s = p.f64_list("q0", &[2.0, 3.0])?;
    let n_max = p.usize("n_max", 100_000)?;
    let qs = p.f64_list("q", &[2.0, 3.0, 4.0])?;
    let len_max = p.usize("len_max", 12)?;
    require(len_max >= 1, || "len_max must be >= 1".into())?;
    let mut rows = Vec::new();
    for &m in &ms {
        for &q0 in &q0s {
            let values = elementary_sum_constants(m, q0, n_max)?;
            let mut sup = f64::NEG_INFINITY;
            let running: Vec<f64> = values
                .iter()
                .map(|&v| {
                    sup = sup.max(v);
                    sup
                })
                .collect();
            let s = estimate_constant(&running)?;
            let tag = |row: Row| row.with("m", m).with("q0", q0).with("n_max", n_max);
            rows.push(tag(Row::record("sup", s.max)));
            let ok = s.max.is_finite() && s.dispersion <= ELEMENTARY_DISPERSION;
            rows.push(tag(Row::check("plateau_dispersion", s.dispersion, ok)));
        }
    }
    let sp = NormSpec::new(3.0, 2)?;
    let per = ctx.map_corpus(|_, rng| {
        let n = rng.random_range(1..=len_max);
        let delta: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let z = corpus::time_family(ctx.kind, sp, n, rng)?;
        let z = TimeFamily::new(sp, (0..n).map(|i| i as f64).collect(), (0..n).map(|i| z.value(i).to_vec()).collect())?;
        let gaps = qs.iter().map(|&q| weighted_variation_gap(&delta, &z, q)).collect::<varlab::Result<Vec<f64>>>()?;
        let sigma: Vec<f64> = (0..rng.random_range(1..=len_max)).map(|_| rng.random_range(0.0..3.0)).collect();
        let b: Vec<f64> = (0..rng.random_range(1..=len_max)).map(|_| rng.random_range(0.0..3.0)).collect();
        let young = q0s.iter().map(|&q0| young_convolution_residual(&sigma, &b, q0)).collect::<varlab::Result<Vec<f64>>>()?;
        Ok((gaps, young))
    })?;
    for (qi, &q) in qs.iter().enumerate() {
        let g = fmin(per.iter().map(|x| x.0[qi]));
        rows.push(Row::check("min_weighted_variation_gap", g, g >= NONNEGATIVE_GAP).with("q", q).with("len_max", len_max));
    }
    for (qi, &q0) in q0s.iter().enumerate() {
        let g = fmin(per.iter().map(|x| x.1[qi]));
        rows.push(Row::check("min_young_residual", g, g >= NONNEGATIVE_GAP).with("q0", q0).with("len_max", len_max));
    }
    Ok(rows)
}

fn cycle_chain(p: &Params) -> Result<MarkovOperator> {
    let k = p.usize("K", 32)?;
    let stay = p.f64("stay", 0.5)?;
    Ok(MarkovOperator::cycle_walk(k, stay)?)
}

/// `‖Φ_{m,q0} f‖_p / ‖f‖_p` on the lazy cycle walk, with the change between
/// truncation at `n_max/2` and `n_max`.
pub fn littlewood_paley(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let t = cycle_chain(p)?;
    let sp = space(p, 3.0, 2)?;
    let ms = p.usize_list("m", &[0, 1, 2])?;
    let q0s = p.f64_list("q0", &[2.0, 3.0])?;
    let n_max = p.usize("n_max", 256)?;
    let pp = p.f64("p", 2.0)?;
    require(n_max >= 2, || "n_max must be >= 2".into())?;
    let fs = ctx.map_corpus(|_, rng| corpus::state_fn(ctx.kind, t.k(), sp, rng))?;
    let mut rows = Vec::new();
    for &m in &ms {
        for &q0 in &q0s {
            let mut ratio = 0.0f64;
            let mut change = 0.0f64;
            for f in &fs {
                let lp = littlewood_paley_phi(&t, m, q0, f, n_max)?;
                let full = varlab::martingale::mean_lp(&lp.values, pp);
                let half: Vec<f64> = lp.partial[n_max / 2 - 1].iter().map(|v| v.powf(q0.recip())).collect();
                let half = varlab::martingale::mean_lp(&half, pp);
                ratio = ratio.max(full / f.lp_norm(pp));
                if full > 0.0 {
                    change = change.max((full - half) / full);
                }
            }
            let tag = |row: Row| row.with("m", m).with("q0", q0).with("K", t.k()).with("n_max", n_max).with("p", pp);
            rows.push(tag(Row::record("max_phi_ratio", ratio)));
            rows.push(tag(Row::record("truncation_rel_change", change)));
        }
    }
    Ok(rows)
}

/// `sup_f ‖v_q((M_n f)_{n ≤ n_max})‖_p / ‖f‖_p` on the lazy cycle walk as
/// `n_max` grows.
pub fn ergodic_variation(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let t = cycle_chain(p)?;
    let sp = space(p, 3.0, 2)?;
    let q = p.f64("q", 4.0)?;
    let pp = p.f64("p", 2.0)?;
    let n_maxes = p.usize_list("n_max", &[256, 288, 320, 352, 384, 416, 448, 480, 512])?;
    require(!n_maxes.is_empty(), || "need n_max values".into())?;
    let per = ctx.map_corpus(|_, rng| {
        let f = corpus::state_fn(ctx.kind, t.k(), sp, rng)?;
        n_maxes
            .iter()
            .map(|&n| Ok(variation_of_averages(&t, &f, q, n)?.lp_norm(pp) / f.lp_norm(pp)))
            .collect::<Result<Vec<f64>>>()
    })?;
    let seq: Vec<f64> = (0..n_maxes.len()).map(|i| fmax(per.iter().map(|x| x[i]))).collect();
    let tag = |row: Row| row.with("K", t.k()).with("q", q).with("p", pp).with("r", sp.r()).with("dim", sp.dim());
    let mut rows: Vec<Row> = n_maxes.iter().zip(&seq).map(|(&n, &r)| tag(Row::record("ratio", r)).with("n_max", n)).collect();
    let d = plateau_dispersion(&seq);
    rows.push(tag(Row::check("plateau_dispersion", d, d <= PLATEAU_DISPERSION)).with("n_max", join(&n_maxes)));
    Ok(rows)
}
