use varlab::diffavg::*;
use varlab::martingale::{DyadicGrid, GridFn};
use varlab::tolerance::{LV_PROBE_GROWTH, PLATEAU_DISPERSION};
use varlab::variation::{jump_count, TimeFamily};
use varlab::NormSpec;

use super::{fmax, join, require, Ctx};
use crate::config::Params;
use crate::corpus;
use crate::error::Result;
use crate::report::Row;
use crate::stats::estimate_constant;

struct Setting {
    d: usize,
    space: NormSpec,
    shapes: Vec<AvgKernelShape>,
}

impl Setting {
    fn read(p: &Params, d: usize, dim: usize) -> Result<Self> {
        let d = p.usize("d", d)?;
        let space = NormSpec::new(p.f64("r", 2.0)?, p.usize("dim", dim)?)?;
        let shapes = p.list("shape", "ball,cube")?;
        require(!shapes.is_empty(), || "need at least one shape".into())?;
        Ok(Setting { d, space, shapes })
    }

    fn tag(&self, row: Row, shape: AvgKernelShape) -> Row {
        row.with("shape", shape.name()).with("d", self.d).with("r", self.space.r()).with("dim", self.space.dim())
    }
}

pub fn master_decomposition(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let set = Setting::read(p, 1, 2)?;
    let depth = p.usize("J", 8)?;
    let q = p.f64("q", 4.0)?;
    let q0 = p.f64("q0", 2.0)?;
    let grid = DyadicGrid::new(set.d, depth)?;
    let mut rows = Vec::new();
    for &shape in &set.shapes {
        let radii = RadiiSet::change_points(&grid, shape);
        let per = ctx.map_corpus(|_, rng| {
            let f = corpus::grid_fn(ctx.kind, grid, set.space, rng)?;
            let t = master_terms(&f, q, q0, &radii, shape)?;
            let residual = fmax(t.residual());
            let ratio = fmax((0..t.variation.len()).map(|x| {
                let bound = 3.0 * (t.short[x] + t.long[x] + t.martingale[x]);
                if t.variation[x] == 0.0 {
                    0.0
                } else {
                    t.variation[x] / bound
                }
            }));
            Ok((residual, ratio))
        })?;
        let residual = fmax(per.iter().map(|x| x.0));
        let tag = |row: Row| set.tag(row, shape).with("J", depth).with("q", q).with("q0", q0);
        rows.push(tag(Row::check("max_residual", residual, residual == 0.0)));
        rows.push(tag(Row::record("max_ratio_to_bound", fmax(per.iter().map(|x| x.1)))));
    }
    Ok(rows)
}

/// Empirical constant of the pointwise long-variation estimate: the sup of
/// the probe over the corpus and all `1 ≤ n ≤ k ≤ J−1`, for each `J`.
pub fn lv_probe(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let set = Setting::read(p, 1, 2)?;
    let depths = p.usize_list("J", &[6, 8])?;
    let q0 = p.f64("q0", 2.0)?;
    require(depths.iter().all(|&j| j >= 2), || "J must be >= 2".into())?;
    let mut rows = Vec::new();
    for &shape in &set.shapes {
        let mut constants = Vec::new();
        for &depth in &depths {
            let grid = DyadicGrid::new(set.d, depth)?;
            let per = ctx.map_corpus(|_, rng| {
                let f = corpus::grid_fn(ctx.kind, grid, set.space, rng)?;
                let mut best = 0.0f64;
                for k in 1..depth {
                    for n in 1..=k {
                        best = best.max(probe_pointwise_lv(&f, k, n, q0, shape)?);
                    }
                }
                Ok(best)
            })?;
            let c = fmax(per);
            constants.push(c);
            rows.push(set.tag(Row::record("constant", c), shape).with("J", depth).with("q0", q0));
        }
        for (w, js) in constants.windows(2).zip(depths.windows(2)) {
            let growth = w[1] / w[0] - 1.0;
            rows.push(
                set.tag(Row::check("growth", growth, growth <= LV_PROBE_GROWTH), shape)
                    .with("J", format!("{}->{}", js[0], js[1]))
                    .with("q0", q0),
            );
        }
    }
    Ok(rows)
}

/// Weak-type ratio `λ |{V_q f > λ}| / ‖f‖_1` and the jump inequality
/// `λ^q N((A_t f(x))_t, λ) ≤ V_q f(x)^q` at every point.
pub fn weak11(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let set = Setting::read(p, 1, 2)?;
    let depth = p.usize("J", 8)?;
    let q = p.f64("q", 4.0)?;
    let lambdas = p.f64_list("lambda", &[0.25, 0.5, 1.0, 2.0])?;
    require(lambdas.iter().all(|&l| l > 0.0), || "lambda must be positive".into())?;
    let grid = DyadicGrid::new(set.d, depth)?;
    let mut rows = Vec::new();
    for &shape in &set.shapes {
        let radii = RadiiSet::change_points(&grid, shape);
        let per = ctx.map_corpus(|_, rng| {
            let f = corpus::grid_fn(ctx.kind, grid, set.space, rng)?;
            let v = vq_of_averages(&f, q, &radii, shape)?;
            let ratios: Vec<f64> = lambdas.iter().map(|&l| weak11_from_variation(&f, v.values(), l)).collect();
            let avgs: Vec<GridFn> = radii.radii().iter().map(|&t| ball_average(&f, t, shape)).collect::<varlab::Result<_>>()?;
            let mut violations = 0usize;
            for x in 0..grid.len() {
                let fam = TimeFamily::new(set.space, radii.radii().to_vec(), avgs.iter().map(|a| a.value(x).to_vec()).collect())?;
                for &l in &lambdas {
                    if l.powf(q) * jump_count(&fam, l)? as f64 > v.values()[x].powf(q) {
                        violations += 1;
                    }
                }
            }
            Ok((ratios, violations))
        })?;
        let tag = |row: Row| set.tag(row, shape).with("J", depth).with("q", q);
        for (li, &l) in lambdas.iter().enumerate() {
            rows.push(tag(Row::record("max_weak11_ratio", fmax(per.iter().map(|x| x.0[li])))).with("lambda", l));
        }
        let violations: usize = per.iter().map(|x| x.1).sum();
        rows.push(tag(Row::check("jump_inequality_violations", violations as f64, violations == 0)).with("lambda", join(&lambdas)));
    }
    Ok(rows)
}

pub fn bmo(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let set = Setting::read(p, 1, 2)?;
    let depth = p.usize("J", 8)?;
    let q = p.f64("q", 4.0)?;
    let grid = DyadicGrid::new(set.d, depth)?;
    let mut rows = Vec::new();
    for &shape in &set.shapes {
        let radii = RadiiSet::change_points(&grid, shape);
        let per = ctx.map_corpus(|_, rng| {
            let f = corpus::grid_fn(ctx.kind, grid, set.space, rng)?;
            Ok(bmo_ratio(&f, q, &radii, shape)?)
        })?;
        let s = estimate_constant(&per)?;
        let tag = |row: Row| set.tag(row, shape).with("J", depth).with("q", q);
        rows.push(tag(Row::record("max_bmo_ratio", s.max)));
        rows.push(tag(Row::record("p95_bmo_ratio", s.p95)));
    }
    Ok(rows)
}

/// `sup_f ‖V_q(A) f‖_p / ‖f‖_p` as the torus grows; the last-quartile
/// dispersion of the sequence over `J` is the plateau contract.
pub fn averages_variation(ctx: &Ctx, p: &Params) -> Result<Vec<Row>> {
    let set = Setting::read(p, 1, 1)?;
    let depths = p.usize_list("J", &[4, 5, 6, 7, 8, 9, 10])?;
    let ps = p.f64_list("p", &[1.5, 2.0, 3.0])?;
    let q = p.f64("q", 4.0)?;
    require(!depths.is_empty() && !ps.is_empty(), || "need J and p values".into())?;
    let mut rows = Vec::new();
    for &shape in &set.shapes {
        // ratios[J][p]
        let mut ratios = Vec::new();
        for &depth in &depths {
            let grid = DyadicGrid::new(set.d, depth)?;
            let radii = RadiiSet::change_points(&grid, shape);
            let per = ctx.map_corpus(|_, rng| {
                let f = corpus::grid_fn(ctx.kind, grid, set.space, rng)?;
                let v = vq_of_averages(&f, q, &radii, shape)?;
                Ok(ps.iter().map(|&pp| v.lp_norm(pp) / f.lp_norm(pp)).collect::<Vec<f64>>())
            })?;
            ratios.push((0..ps.len()).map(|pi| fmax(per.iter().map(|x| x[pi]))).collect::<Vec<f64>>());
        }
        for (pi, &pp) in ps.iter().enumerate() {
            let tag = |row: Row| set.tag(row, shape).with("q", q).with("p", pp);
            let seq: Vec<f64> = ratios.iter().map(|r| r[pi]).collect();
            for (&depth, &r) in depths.iter().zip(&seq) {
                rows.push(tag(Row::record("ratio", r)).with("J", depth));
            }
            let s = estimate_constant(&seq)?;
            rows.push(tag(Row::record("max_ratio", s.max)).with("J", join(&depths)));
            rows.push(tag(Row::check("plateau_dispersion", s.dispersion, s.dispersion <= PLATEAU_DISPERSION)).with("J", join(&depths)));
        }
    }
    Ok(rows)
}
