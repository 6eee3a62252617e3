use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::FiberBasis;
use crate::error::{Error, Result};

/// A fiber state: coefficients in the orthonormal Hermite basis.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberVector {
    basis: Arc<FiberBasis>,
    coeffs: DVector<Complex64>,
}

impl FiberVector {
    pub fn new(basis: Arc<FiberBasis>, coeffs: DVector<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.dim() {
            return Err(Error::DimensionMismatch { expected: basis.dim(), got: coeffs.len() });
        }
        Ok(FiberVector { basis, coeffs })
    }

    pub fn zeros(basis: Arc<FiberBasis>) -> Self {
        let dim = basis.dim();
        FiberVector { basis, coeffs: DVector::zeros(dim) }
    }

    pub fn unit(basis: Arc<FiberBasis>, ordinal: usize) -> Self {
        let mut v = Self::zeros(basis);
        v.coeffs[ordinal] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn basis(&self) -> &Arc<FiberBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &DVector<Complex64> {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> DVector<Complex64> {
        self.coeffs
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    /// Highest level carrying a nonzero coefficient, `None` for the zero vector.
    pub fn top_level(&self) -> Option<usize> {
        (0..self.coeffs.len())
            .rev()
            .find(|&i| self.coeffs[i] != Complex64::new(0.0, 0.0))
            .map(|i| self.basis.level_of(i))
    }
}

/// `⟨f, g⟩ = Σ f_β · conj(g_β)`, linear in the first slot.
pub fn fiber_inner(f: &FiberVector, g: &FiberVector) -> Result<Complex64> {
    if f.basis != g.basis {
        return Err(Error::BasisMismatch);
    }
    Ok(f.coeffs.iter().zip(g.coeffs.iter()).map(|(a, b)| a * b.conj()).sum())
}

/// A dense operator on the truncated fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct FiberOperator {
    basis: Arc<FiberBasis>,
    matrix: DMatrix<Complex64>,
}

impl FiberOperator {
    pub fn new(basis: Arc<FiberBasis>, matrix: DMatrix<Complex64>) -> Result<Self> {
        let d = basis.dim();
        if matrix.nrows() != d || matrix.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: if matrix.nrows() != d { matrix.nrows() } else { matrix.ncols() },
            });
        }
        Ok(FiberOperator { basis, matrix })
    }

    pub fn zeros(basis: Arc<FiberBasis>) -> Self {
        let d = basis.dim();
        FiberOperator { basis, matrix: DMatrix::zeros(d, d) }
    }

    pub fn identity(basis: Arc<FiberBasis>) -> Self {
        let d = basis.dim();
        FiberOperator { basis, matrix: DMatrix::identity(d, d) }
    }

    pub fn basis(&self) -> &Arc<FiberBasis> {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn apply(&self, v: &FiberVector) -> Result<FiberVector> {
        if self.basis != v.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(FiberVector { basis: self.basis.clone(), coeffs: &self.matrix * &v.coeffs })
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &FiberOperator) -> Result<FiberOperator> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(FiberOperator { basis: self.basis.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn commutator(&self, other: &FiberOperator) -> Result<FiberOperator> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        let m = &self.matrix * &other.matrix - &other.matrix * &self.matrix;
        Ok(FiberOperator { basis: self.basis.clone(), matrix: m })
    }

    pub fn adjoint(&self) -> FiberOperator {
        FiberOperator { basis: self.basis.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scaled(&self, c: Complex64) -> FiberOperator {
        FiberOperator { basis: self.basis.clone(), matrix: self.matrix.map(|z| z * c) }
    }

    pub fn sub(&self, other: &FiberOperator) -> Result<FiberOperator> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch);
        }
        Ok(FiberOperator { basis: self.basis.clone(), matrix: &self.matrix - &other.matrix })
    }

    /// Largest entry modulus among the columns of level `≤ max_level`.
    pub fn max_abs_on_levels(&self, max_level: usize) -> f64 {
        let cols = self.basis.dim_up_to(max_level);
        self.matrix.columns(0, cols).iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}
