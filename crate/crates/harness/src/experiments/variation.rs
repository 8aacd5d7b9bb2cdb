use rand::Rng;
use varlab::tolerance::VQ_ORACLE_REL;
use varlab::variation::*;
use varlab::NormSpec;

use super::{fmin, fmax, rel_err, require, Ctx};
use crate::config::Params;
use crate::corpus;
use crate::error::Result;
use crate::report::Row;

fn family_params(p: &Params, dim_default: usize, bound: usize) -> Result<(usize, usize, Vec<f64>)> {
    let n_max = p.usize("n_max", 12)?;
    let dim = p.usize("dim", dim_default)?;
    let rs = p.f64_list("r", &[1.0, 2.0, 3.0, f64::INFINITY])?;
    require((1..=bound).contains(&n_max), || format!("n_max must be in 1..={bound}"))?;
    require(!rs.is_empty() && dim >= 1, || "need at least one r and dim >= 1".into())?;
    Ok((n_max, dim, rs))
}

pub fn variation_oracle(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let (n_max, dim, rs) = family_params(p, 3, VQ_BRUTEFORCE_MAX)?;
    let qs = p.f64_list("q", &[1.0, 2.0, 2.5, 4.0])?;
    let per = ctx.map_corpus(|i, rng| {
        let space = NormSpec::new(rs[i % rs.len()], dim)?;
        let n = rng.random_range(1..=n_max);
        let fam = corpus::time_family(ctx.kind, space, n, rng)?;
        qs.iter()
            .map(|&q| Ok(rel_err(vq_norm_exact(&fam, q)?, vq_norm_bruteforce(&fam, q)?)))
            .collect::<Result<Vec<f64>>>()
    })?;
    let mut rows = Vec::new();
    for (ri, &r) in rs.iter().enumerate() {
        let mine: Vec<&Vec<f64>> = per.iter().skip(ri).step_by(rs.len()).collect();
        for (qi, &q) in qs.iter().enumerate() {
            let worst = fmax(mine.iter().map(|e| e[qi])).max(0.0);
            rows.push(
                Row::check("max_rel_error", worst, worst <= VQ_ORACLE_REL)
                    .with("r", r)
                    .with("q", q)
                    .with("dim", dim)
                    .with("n_max", n_max)
                    .with("families", mine.len()),
            );
        }
    }
    Ok(rows)
}

pub fn jump_oracle(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let (n_max, dim, rs) = family_params(p, 2, JUMP_BRUTEFORCE_MAX)?;
    let qs = p.f64_list("q", &[2.0, 3.0, 4.0])?;
    let per_family = p.usize("lambdas", 4)?;
    require(per_family >= 1, || "lambdas must be >= 1".into())?;
    let per = ctx.map_corpus(|i, rng| {
        let space = NormSpec::new(rs[i % rs.len()], dim)?;
        let n = rng.random_range(1..=n_max);
        let fam = corpus::time_family(ctx.kind, space, n, rng)?;
        let mut mismatches = 0usize;
        let mut gaps = vec![f64::INFINITY; qs.len()];
        for _ in 0..per_family {
            let lambda = rng.random_range(0.05..3.0);
            if jump_count(&fam, lambda)? != jump_count_bruteforce(&fam, lambda)? {
                mismatches += 1;
            }
            for (g, &q) in gaps.iter_mut().zip(&qs) {
                *g = g.min(jump_variation_gap(&fam, lambda, q)?);
            }
        }
        Ok((mismatches, gaps))
    })?;
    let mut rows = Vec::new();
    for (ri, &r) in rs.iter().enumerate() {
        let mine: Vec<&(usize, Vec<f64>)> = per.iter().skip(ri).step_by(rs.len()).collect();
        let mismatches: usize = mine.iter().map(|m| m.0).sum();
        let shared = |row: Row| row.with("r", r).with("dim", dim).with("n_max", n_max).with("families", mine.len());
        rows.push(shared(Row::check("greedy_mismatches", mismatches as f64, mismatches == 0)).with("q", "-"));
        for (qi, &q) in qs.iter().enumerate() {
            let gap = fmin(mine.iter().map(|m| m.1[qi]));
            rows.push(shared(Row::check("min_jump_gap", gap, gap >= 0.0)).with("q", q));
        }
    }
    Ok(rows)
}
