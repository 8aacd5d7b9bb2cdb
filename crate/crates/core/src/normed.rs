//! Finite-dimensional ℓ^r spaces used as the target Banach space of every
//! vector-valued operator in the crate.

use crate::error::{Error, Result};

/// The norm of `ℓ^r(ℝ^dim)`. `r = f64::INFINITY` selects the max norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormSpec {
    r: f64,
    dim: usize,
}

impl NormSpec {
    pub fn new(r: f64, dim: usize) -> Result<Self> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::InvalidExponent {
                value: r,
                reason: "norm exponent must satisfy r >= 1",
            });
        }
        if dim == 0 {
            return Err(crate::error::invalid("dim", "dimension must be positive"));
        }
        Ok(Self { r, dim })
    }

    /// One-dimensional space; every ℓ^r norm reduces to the absolute value.
    pub fn scalar() -> Self {
        Self { r: 2.0, dim: 1 }
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sup_norm(&self) -> bool {
        self.r.is_infinite()
    }

    /// Norm of a coordinate slice, checking its length.
    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        self.check(v)?;
        Ok(self.norm_of(v))
    }

    pub(crate) fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: v.len(),
            });
        }
        Ok(())
    }

    /// Norm without the length check. The caller guarantees `v.len() == dim`.
    #[inline]
    pub fn norm_of(&self, v: &[f64]) -> f64 {
        lr_norm(v.iter().copied(), self.r)
    }

    /// `‖u − v‖` without materializing the difference.
    #[inline]
    pub fn dist(&self, u: &[f64], v: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), v.len());
        lr_norm(u.iter().zip(v).map(|(a, b)| a - b), self.r)
    }

    /// Martingale cotype of ℓ^r: `max(2, r)`, infinite for the max norm.
    pub fn cotype_exponent(&self) -> f64 {
        self.r.max(2.0)
    }
}

#[inline]
fn lr_norm(it: impl Iterator<Item = f64>, r: f64) -> f64 {
    if r == 2.0 {
        it.map(|x| x * x).sum::<f64>().sqrt()
    } else if r == 1.0 {
        it.map(f64::abs).sum()
    } else if r.is_infinite() {
        it.fold(0.0, |m, x| m.max(x.abs()))
    } else {
        it.map(|x| x.abs().powf(r)).sum::<f64>().powf(r.recip())
    }
}

/// An element of a [`NormSpec`] space.
#[derive(Debug, Clone, PartialEq)]
pub struct VecB {
    coords: Vec<f64>,
    space: NormSpec,
}

impl VecB {
    pub fn new(space: NormSpec, coords: Vec<f64>) -> Result<Self> {
        space.check(&coords)?;
        Ok(Self { coords, space })
    }

    pub fn zero(space: NormSpec) -> Self {
        Self {
            coords: vec![0.0; space.dim],
            space,
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn space(&self) -> NormSpec {
        self.space
    }

    pub fn norm(&self) -> f64 {
        self.space.norm_of(&self.coords)
    }

    pub fn sub(&self, other: &VecB) -> Result<VecB> {
        self.same_space(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a - b).collect();
        Ok(VecB { coords, space: self.space })
    }

    pub fn add(&self, other: &VecB) -> Result<VecB> {
        self.same_space(other)?;
        let coords = self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect();
        Ok(VecB { coords, space: self.space })
    }

    pub fn scale(&self, alpha: f64) -> VecB {
        VecB {
            coords: self.coords.iter().map(|x| alpha * x).collect(),
            space: self.space,
        }
    }

    fn same_space(&self, other: &VecB) -> Result<()> {
        if self.space.dim != other.space.dim {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim,
                actual: other.space.dim,
            });
        }
        Ok(())
    }
}

/// Norm of `v` in `space`.
pub fn norm(space: &NormSpec, v: &VecB) -> Result<f64> {
    space.norm(v.coords())
}

pub fn cotype_exponent(space: &NormSpec) -> f64 {
    space.cotype_exponent()
}

/// ℓ^q aggregate of nonnegative values; `q = ∞` gives the maximum and an empty
/// list gives 0.
pub fn seq_lq(values: &[f64], q: f64) -> f64 {
    lr_norm(values.iter().copied(), q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(space: NormSpec, c: &[f64]) -> VecB {
        VecB::new(space, c.to_vec()).unwrap()
    }

    #[test]
    fn norm_examples() {
        let l2 = NormSpec::new(2.0, 2).unwrap();
        let linf = NormSpec::new(f64::INFINITY, 2).unwrap();
        let l1 = NormSpec::new(1.0, 2).unwrap();
        assert_eq!(norm(&l2, &v(l2, &[3.0, 4.0])).unwrap(), 5.0);
        assert_eq!(norm(&linf, &v(linf, &[3.0, 4.0])).unwrap(), 4.0);
        assert_eq!(norm(&l1, &v(l1, &[3.0, 4.0])).unwrap(), 7.0);
        let l3 = NormSpec::new(3.0, 2).unwrap();
        assert!((l3.norm_of(&[3.0, 4.0]) - 91f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch() {
        let l2 = NormSpec::new(2.0, 3).unwrap();
        assert_eq!(
            l2.norm(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, actual: 2 })
        );
        assert!(VecB::new(l2, vec![1.0]).is_err());
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(NormSpec::new(0.5, 2).is_err());
        assert!(NormSpec::new(f64::NAN, 2).is_err());
        assert!(NormSpec::new(2.0, 0).is_err());
    }

    #[test]
    fn cotype_examples() {
        assert_eq!(NormSpec::new(1.5, 1).unwrap().cotype_exponent(), 2.0);
        assert_eq!(NormSpec::new(3.0, 1).unwrap().cotype_exponent(), 3.0);
        assert_eq!(NormSpec::new(2.0, 1).unwrap().cotype_exponent(), 2.0);
        assert!(NormSpec::new(f64::INFINITY, 1).unwrap().cotype_exponent().is_infinite());
    }

    #[test]
    fn seq_lq_examples() {
        assert!((seq_lq(&[1.0, 1.0, 1.0], 2.0) - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(seq_lq(&[], 3.0), 0.0);
        assert_eq!(seq_lq(&[], f64::INFINITY), 0.0);
        assert!((seq_lq(&[2.0], 7.0) - 2.0).abs() < 1e-15);
        assert_eq!(seq_lq(&[1.0, 5.0, 2.0], f64::INFINITY), 5.0);
    }

    #[test]
    fn vector_arithmetic() {
        let s = NormSpec::new(2.0, 2).unwrap();
        let a = v(s, &[1.0, 2.0]);
        let b = v(s, &[4.0, 6.0]);
        assert_eq!(b.sub(&a).unwrap().norm(), 5.0);
        assert_eq!(a.add(&b).unwrap().coords(), &[5.0, 8.0]);
        assert_eq!(a.scale(-2.0).norm(), 2.0 * a.norm());
        assert_eq!(VecB::zero(s).norm(), 0.0);
    }
}
