use std::ops::Deref;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Components of a normal vector in the unitary frame
/// `(e₁,…,eₙ, Je₁,…,Jeₙ)`. Complex entries represent complexified sections.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCoeffs(DVector<Complex64>);

impl NormalCoeffs {
    pub fn new(components: DVector<Complex64>) -> Self {
        NormalCoeffs(components)
    }

    pub fn from_real(components: &[f64]) -> Self {
        NormalCoeffs(DVector::from_iterator(
            components.len(),
            components.iter().map(|&x| Complex64::new(x, 0.0)),
        ))
    }

    pub fn zeros(dim: usize) -> Self {
        NormalCoeffs(DVector::zeros(dim))
    }

    pub fn into_inner(self) -> DVector<Complex64> {
        self.0
    }

    pub fn check_len(&self, expected: usize) -> Result<()> {
        if self.0.len() != expected {
            return Err(Error::DimensionMismatch { expected, got: self.0.len() });
        }
        Ok(())
    }
}

impl Deref for NormalCoeffs {
    type Target = DVector<Complex64>;
    fn deref(&self) -> &Self::Target {
        &self.0
    }
}

/// Gram matrix of `ω₀` in the frame, `ω₀(s,t) = sᵀ Ω t`.
pub fn omega_matrix(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, n + i)] = 1.0;
        m[(n + i, i)] = -1.0;
    }
    m
}

/// `J₀`: `e_i ↦ e_{n+i}`, `e_{n+i} ↦ −e_i`.
pub fn complex_structure(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(n + i, i)] = 1.0;
        m[(i, n + i)] = -1.0;
    }
    m
}

/// Complex-bilinear extension of `ω₀`.
pub fn omega(s: &DVector<Complex64>, t: &DVector<Complex64>) -> Complex64 {
    let n = s.len() / 2;
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        acc += s[i] * t[n + i] - s[n + i] * t[i];
    }
    acc
}

/// `max |AᵀΩ + ΩA|`, zero exactly when `A ∈ sp(n)` (complexified).
pub fn sp_defect(a: &DMatrix<Complex64>) -> f64 {
    let dim = a.nrows();
    let n = dim / 2;
    let om = omega_matrix(n).map(|x| Complex64::new(x, 0.0));
    let d = a.transpose() * &om + &om * a;
    d.iter().fold(0.0, |m, z| m.max(z.norm()))
}

pub fn standard_frame_vector(dim: usize, a: usize) -> DVector<Complex64> {
    let mut v = DVector::zeros(dim);
    v[a] = Complex64::new(1.0, 0.0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_relations() {
        let n = 2;
        let om = omega_matrix(n);
        let j = complex_structure(n);
        // ω(s, Jt) = g(s, t) = sᵀt
        assert_eq!(&om * &j, DMatrix::identity(2 * n, 2 * n));
        assert_eq!(&j * &j, -DMatrix::<f64>::identity(2 * n, 2 * n));
        let jc = j.map(|x| Complex64::new(x, 0.0));
        assert!(sp_defect(&jc) < 1e-15);
    }

    #[test]
    fn symplectic_frame_pairs() {
        let n = 3;
        for i in 0..n {
            for j in 0..n {
                let v = standard_frame_vector(2 * n, i);
                let w = standard_frame_vector(2 * n, n + j);
                let want = if i == j { 1.0 } else { 0.0 };
                assert_eq!(omega(&v, &w).re, want);
            }
        }
    }
}
