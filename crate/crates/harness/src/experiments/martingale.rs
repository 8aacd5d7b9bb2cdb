use rand::Rng;
use varlab::martingale::*;
use varlab::tolerance::HILBERT_EXACT_REL;
use varlab::NormSpec;

use super::{fmax, join, rel_err, require, Ctx};
use crate::config::Params;
use crate::corpus;
use crate::error::Result;
use crate::report::Row;

/// Cotype functional with `q0 = max(2, r)`; exactness is only a contract in
/// `ℓ^2`.
pub fn martingale_cotype(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let d = p.usize("d", 2)?;
    let depth = p.usize("J", 3)?;
    let dim = p.usize("dim", 3)?;
    let rs = p.f64_list("r", &[2.0, 1.5, 3.0, 4.0])?;
    let grid = DyadicGrid::new(d, depth)?;
    let mut rows = Vec::new();
    for &r in &rs {
        let space = NormSpec::new(r, dim)?;
        let q0 = space.cotype_exponent();
        require(q0.is_finite(), || "r = inf has no finite martingale cotype".into())?;
        let terms = ctx.map_corpus(|_, rng| {
            let f = corpus::grid_fn(ctx.kind, grid, space, rng)?;
            Ok(cotype_functional(&f, q0)?)
        })?;
        let shared = |row: Row| row.with("r", r).with("q0", q0).with("d", d).with("J", depth).with("dim", dim);
        if r == 2.0 {
            let worst = fmax(terms.iter().map(|t| rel_err(t.lhs(), t.rhs)));
            rows.push(shared(Row::check("hilbert_rel_error", worst, worst <= HILBERT_EXACT_REL)));
        }
        rows.push(shared(Row::record("max_ratio", fmax(terms.iter().map(|t| t.ratio())))));
        rows.push(shared(Row::record(
            "max_ratio_unpowered_head",
            fmax(terms.iter().map(|t| t.lhs_unpowered_head() / t.rhs)),
        )));
    }
    Ok(rows)
}

/// Six properties of the decomposition plus disjointness, checked with zero
/// tolerance. `λ` is an odd multiple of 1/128 between the root average and
/// the maximum of `‖f‖`, so on integer data every comparison is exact.
pub fn cz_properties(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let ds = p.usize_list("d", &[1, 2])?;
    let max_depth = p.usize("J_max", 6)?;
    let rs = p.f64_list("r", &[1.0, f64::INFINITY])?;
    let max_dim = p.usize("dim_max", 2)?;
    require(max_depth >= 1 && max_dim >= 1 && !ds.is_empty() && !rs.is_empty(), || "empty grid".into())?;
    let per = ctx.map_corpus(|i, rng| {
        let d = ds[i % ds.len()];
        let r = rs[(i / ds.len()) % rs.len()];
        let depth = rng.random_range(1..=max_depth);
        let space = NormSpec::new(r, rng.random_range(1..=max_dim))?;
        let f = corpus::grid_fn(ctx.kind, DyadicGrid::new(d, depth)?, space, rng)?;
        let norms = f.norms();
        let root = norms.iter().sum::<f64>() / norms.len() as f64;
        let top = fmax(norms.iter().copied());
        let target = root + rng.random::<f64>() * (top - root);
        let mut lambda = (target * 64.0).floor() / 64.0 + 1.0 / 128.0;
        while lambda < root {
            lambda += 1.0 / 64.0;
        }
        let parts = cz_decompose(&f, lambda)?;
        let reproducible = cz_decompose(&f, lambda)? == parts;
        Ok((cz_check(&f, &parts, 0.0), reproducible, parts.cubes.len()))
    })?;
    let shared = |row: Row| row.with("d", join(&ds)).with("J_max", max_depth).with("r", join(&rs)).with("dim_max", max_dim);
    let mut rows = Vec::new();
    for (k, prop) in per[0].0.iter().enumerate() {
        let held = per.iter().filter(|x| x.0[k].holds).count();
        let worst = fmax(per.iter().map(|x| x.0[k].worst_excess));
        rows.push(shared(Row::check(format!("{}_holds", prop.name), held as f64, held == per.len())));
        rows.push(shared(Row::record(format!("{}_worst_excess", prop.name), worst)));
    }
    let repro = per.iter().filter(|x| x.1).count();
    rows.push(shared(Row::check("reproducible", repro as f64, repro == per.len())));
    rows.push(shared(Row::record("mean_selected_cubes", per.iter().map(|x| x.2 as f64).sum::<f64>() / per.len() as f64)));
    Ok(rows)
}
