use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::fiber::{FiberBasis, FiberVector};
use crate::geometry::{Mode, TransverseField};

/// A basic spinor field `φ(x) = Σ_k e^{2πi k·x} φ_k` with fiber values in a
/// truncated Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    basis: Arc<FiberBasis>,
    field: TransverseField<DVector<Complex64>>,
}

impl SpinorField {
    pub fn zeros(basis: Arc<FiberBasis>, dim: usize, cutoff: i32) -> Self {
        SpinorField { basis, field: TransverseField::new(dim, cutoff) }
    }

    pub fn from_field(
        basis: Arc<FiberBasis>,
        field: TransverseField<DVector<Complex64>>,
    ) -> Result<Self> {
        for (_, v) in field.iter() {
            if v.len() != basis.dim() {
                return Err(Error::DimensionMismatch { expected: basis.dim(), got: v.len() });
            }
        }
        Ok(SpinorField { basis, field })
    }

    /// The field equal to `v` at every point.
    pub fn constant(v: &FiberVector, dim: usize, cutoff: i32) -> Self {
        Self::single_mode(v, Mode::zero(dim), cutoff).expect("zero mode fits any cutoff")
    }

    /// `e^{2πi k·x} v`.
    pub fn single_mode(v: &FiberVector, k: Mode, cutoff: i32) -> Result<Self> {
        let mut field = TransverseField::new(k.dim(), cutoff);
        field.insert(k, v.coeffs().clone())?;
        Ok(SpinorField { basis: v.basis().clone(), field })
    }

    /// Pseudo-random coefficients on levels `≤ max_level` and modes
    /// `|k|∞ ≤ radius`.
    pub fn random<R: Rng>(
        basis: Arc<FiberBasis>,
        dim: usize,
        cutoff: i32,
        radius: i32,
        max_level: usize,
        rng: &mut R,
    ) -> Self {
        let keep = basis.dim_up_to(max_level);
        let d = basis.dim();
        let mut field = TransverseField::new(dim, cutoff);
        for k in Mode::cube(dim, radius) {
            let v = DVector::from_fn(d, |i, _| {
                if i < keep {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            field.accumulate(k, Complex64::new(1.0, 0.0), &v);
        }
        SpinorField { basis, field }
    }

    pub fn basis(&self) -> &Arc<FiberBasis> {
        &self.basis
    }

    pub fn field(&self) -> &TransverseField<DVector<Complex64>> {
        &self.field
    }

    pub fn into_field(self) -> TransverseField<DVector<Complex64>> {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn aliasing(&self) -> f64 {
        self.field.aliasing()
    }

    pub(crate) fn wrap(&self, field: TransverseField<DVector<Complex64>>) -> SpinorField {
        SpinorField { basis: self.basis.clone(), field }
    }

    /// Highest occupied level over all modes.
    pub fn top_level(&self) -> Option<usize> {
        let mut top = None;
        for (_, v) in self.field.iter() {
            if let Some(i) = (0..v.len()).rev().find(|&i| v[i].norm() > 0.0) {
                let l = self.basis.level_of(i);
                top = Some(top.map_or(l, |t: usize| t.max(l)));
            }
        }
        top
    }

    /// Keeps only the levels `≤ max_level`.
    pub fn truncated_to(&self, max_level: usize) -> SpinorField {
        let keep = self.basis.dim_up_to(max_level);
        self.wrap(self.field.map(|_, v| {
            let mut w = v.clone();
            w.rows_mut(keep, v.len() - keep).fill(Complex64::new(0.0, 0.0));
            w
        }))
    }

    /// The level-`ℓ` component.
    pub fn level_component(&self, level: usize) -> Result<SpinorField> {
        let range = self.basis.level_range(level)?;
        Ok(self.wrap(self.field.map(|_, v| {
            DVector::from_fn(v.len(), |i, _| {
                if range.contains(&i) { v[i] } else { Complex64::new(0.0, 0.0) }
            })
        })))
    }

    pub fn scale(&self, c: Complex64) -> SpinorField {
        self.wrap(self.field.scale(c))
    }

    pub fn plus(&self, other: &SpinorField) -> SpinorField {
        self.wrap(self.field.plus(&other.field))
    }

    pub fn minus(&self, other: &SpinorField) -> SpinorField {
        self.wrap(self.field.minus(&other.field))
    }

    pub fn axpy(&mut self, c: Complex64, other: &SpinorField) {
        self.field.axpy(c, &other.field);
    }

    /// Unweighted `L²` norm.
    pub fn norm(&self) -> f64 {
        self.field.norm_sqr().sqrt()
    }
}
