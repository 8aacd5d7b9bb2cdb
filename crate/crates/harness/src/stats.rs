use crate::error::{config_err, Result};

/// Empirical constant of a sample of ratios.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantSummary {
    pub max: f64,
    /// Nearest-rank 95th percentile.
    pub p95: f64,
    /// [`plateau_dispersion`] of the samples in the given order.
    pub dispersion: f64,
}

/// `samples` are read in refinement order; the dispersion only looks at the
/// last quartile.
pub fn estimate_constant(samples: &[f64]) -> Result<ConstantSummary> {
    if samples.is_empty() {
        return Err(config_err("estimate_constant needs at least one sample"));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(config_err("estimate_constant got a NaN sample"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let rank = (0.95 * sorted.len() as f64).ceil() as usize;
    Ok(ConstantSummary {
        max: sorted[sorted.len() - 1],
        p95: sorted[rank.max(1) - 1],
        dispersion: plateau_dispersion(samples),
    })
}

/// `(max − min) / max |x|` over the last `⌈n/4⌉` samples; 0 when they are all
/// zero.
pub fn plateau_dispersion(samples: &[f64]) -> f64 {
    let tail = &samples[samples.len() - samples.len().div_ceil(4)..];
    let hi = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = hi.abs().max(lo.abs());
    if scale == 0.0 {
        0.0
    } else {
        (hi - lo) / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let s = estimate_constant(&[2.5; 7]).unwrap();
        assert_eq!((s.max, s.p95, s.dispersion), (2.5, 2.5, 0.0));
        assert_eq!(estimate_constant(&[1.0, 2.0, 3.0, 4.0]).unwrap().max, 4.0);
        assert!(estimate_constant(&[]).is_err());
        let geometric: Vec<f64> = (1..=20).map(|k| 3.0 - 2f64.powi(-k)).collect();
        let s = estimate_constant(&geometric).unwrap();
        assert!(s.dispersion < 1e-3, "{}", s.dispersion);
        assert!(s.dispersion > 0.0);
    }

    #[test]
    fn nearest_rank_percentile() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(estimate_constant(&v).unwrap().p95, 95.0);
        assert_eq!(estimate_constant(&[7.0]).unwrap().p95, 7.0);
        let v: Vec<f64> = (1..=10).map(f64::from).collect();
        assert_eq!(estimate_constant(&v).unwrap().p95, 10.0);
    }

    #[test]
    fn dispersion_uses_last_quartile() {
        // last quartile of 8 samples is the final 2
        assert_eq!(plateau_dispersion(&[100.0, 1.0, 50.0, 3.0, 9.0, 0.0, 4.0, 5.0]), 0.2);
        assert_eq!(plateau_dispersion(&[0.0, 0.0]), 0.0);
    }
}
