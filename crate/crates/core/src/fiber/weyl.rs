use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{sp_defect, FiberBasis, FiberOperator, FiberVector, NormalCoeffs};
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);
const SP_TOL: f64 = 1e-12;

/// Generators, Hamilton operator and quadratic actions on one truncated fiber.
///
/// The quadratic actions are computed on a basis two levels larger and then
/// compressed, so `Π_L Q(A) Π_L` is exact rather than a product of two
/// truncated generators.
#[derive(Debug, Clone)]
pub struct WeylFiber {
    basis: Arc<FiberBasis>,
    generators: Vec<DMatrix<Complex64>>,
    quadratic: Vec<DMatrix<Complex64>>,
}

impl WeylFiber {
    pub fn new(basis: Arc<FiberBasis>) -> Self {
        let n = basis.n();
        let dim = basis.dim();
        let generators = generator_matrices(&basis);
        let extended = FiberBasis::build(n, basis.max_level() + 2);
        let ext = generator_matrices(&extended);
        let mut quadratic = Vec::with_capacity(4 * n * n);
        for a in 0..2 * n {
            for b in 0..2 * n {
                // Q(E_ab) = (1/2i) σ(c_b) σ(e_a), with c_b = w_b or −v_{b−n}
                let (c, sign) = if b < n { (n + b, 1.0) } else { (b - n, -1.0) };
                let prod = &ext[c] * &ext[a];
                let scale = Complex64::new(sign, 0.0) / (2.0 * I);
                quadratic.push(prod.view((0, 0), (dim, dim)).map(|z| z * scale));
            }
        }
        WeylFiber { basis, generators, quadratic }
    }

    pub fn basis(&self) -> &Arc<FiberBasis> {
        &self.basis
    }

    pub fn n(&self) -> usize {
        self.basis.n()
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// `σ_L(e_a)` for frame index `a`.
    pub fn generator(&self, a: usize) -> &DMatrix<Complex64> {
        &self.generators[a]
    }

    /// `σ_L(v) = Σ_a v_a σ_L(e_a)`.
    pub fn clifford_matrix(&self, v: &DVector<Complex64>) -> DMatrix<Complex64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (a, g) in self.generators.iter().enumerate() {
            if v[a] != Complex64::new(0.0, 0.0) {
                m.zip_apply(g, |x, y| *x += v[a] * y);
            }
        }
        m
    }

    pub fn clifford_generator(&self, v: &NormalCoeffs) -> Result<FiberOperator> {
        v.check_len(2 * self.n())?;
        FiberOperator::new(self.basis.clone(), self.clifford_matrix(v))
    }

    /// Diagonal entry `−(|β| + n/2)` of `H₀` at an ordinal.
    pub fn hamilton_eigenvalue(&self, ordinal: usize) -> f64 {
        -(self.basis.level_of(ordinal) as f64 + self.n() as f64 / 2.0)
    }

    pub fn hamilton_operator(&self) -> FiberOperator {
        let d = self.dim();
        let diag = DVector::from_fn(d, |i, _| Complex64::new(self.hamilton_eigenvalue(i), 0.0));
        FiberOperator::new(self.basis.clone(), DMatrix::from_diagonal(&diag))
            .expect("square by construction")
    }

    pub fn level_projection(&self, level: usize) -> Result<FiberOperator> {
        let range = self.basis.level_range(level)?;
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for i in range {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        FiberOperator::new(self.basis.clone(), m)
    }

    /// Projection onto levels `≤ max_level`, the states on which an operator
    /// built from `L − max_level` generators is exact.
    pub fn protected_projection(&self, max_level: usize) -> FiberOperator {
        let d = self.dim();
        let keep = self.basis.dim_up_to(max_level);
        let mut m = DMatrix::zeros(d, d);
        for i in 0..keep {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        FiberOperator::new(self.basis.clone(), m).expect("square by construction")
    }

    pub fn vacuum_state(&self) -> FiberVector {
        FiberVector::unit(self.basis.clone(), 0)
    }

    /// `Q(A)` for complex `A` without the `sp(n)` check; linear in `A`.
    pub fn quadratic_matrix(&self, a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let dim2 = 2 * self.n();
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for r in 0..dim2 {
            for c in 0..dim2 {
                let coef = a[(r, c)];
                if coef != Complex64::new(0.0, 0.0) {
                    m.zip_apply(&self.quadratic[r * dim2 + c], |x, y| *x += coef * y);
                }
            }
        }
        m
    }

    /// `(1/2i) Σ_j {σ(w_j)σ(Av_j) − σ(v_j)σ(Aw_j)}` for `A ∈ sp(n,ℝ)`.
    pub fn quadratic_action(&self, a: &DMatrix<f64>) -> Result<FiberOperator> {
        let dim2 = 2 * self.n();
        if a.nrows() != dim2 || a.ncols() != dim2 {
            return Err(Error::DimensionMismatch { expected: dim2, got: a.nrows() });
        }
        let ac = a.map(|x| Complex64::new(x, 0.0));
        let defect = sp_defect(&ac);
        if defect > SP_TOL {
            return Err(Error::NotSymplectic { defect });
        }
        FiberOperator::new(self.basis.clone(), self.quadratic_matrix(&ac))
    }
}

/// `σ(e_j) = i·x_j` and `σ(e_{n+j}) = ∂_j` in the orthonormal Hermite basis.
fn generator_matrices(basis: &FiberBasis) -> Vec<DMatrix<Complex64>> {
    let n = basis.n();
    let d = basis.dim();
    let mut pos = vec![DMatrix::<Complex64>::zeros(d, d); n];
    let mut der = vec![DMatrix::<Complex64>::zeros(d, d); n];
    for (col, beta) in basis.indices().iter().enumerate() {
        for j in 0..n {
            let k = beta.entries()[j] as f64;
            if let Some(row) = beta.shifted(j, 1).and_then(|b| basis.ordinal(&b)) {
                let c = ((k + 1.0) / 2.0).sqrt();
                pos[j][(row, col)] = Complex64::new(c, 0.0);
                der[j][(row, col)] = Complex64::new(-c, 0.0);
            }
            if let Some(row) = beta.shifted(j, -1).and_then(|b| basis.ordinal(&b)) {
                let c = (k / 2.0).sqrt();
                pos[j][(row, col)] = Complex64::new(c, 0.0);
                der[j][(row, col)] = Complex64::new(c, 0.0);
            }
        }
    }
    pos.into_iter().map(|m| m * I).chain(der).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{complex_structure, fiber_inner};

    fn fiber(n: usize, l: usize) -> WeylFiber {
        WeylFiber::new(FiberBasis::new(n, l).unwrap())
    }

    #[test]
    fn ladder_on_vacuum() {
        let f = fiber(1, 8);
        let up = f.generator(0).column(0).clone_owned();
        assert!((up[1] - Complex64::new(0.0, 0.5f64.sqrt())).norm() < 1e-15);
        let down = f.generator(1).column(0).clone_owned();
        assert!((down[1] + 0.5f64.sqrt()).norm() < 1e-15);
        assert!(f.clifford_matrix(&DVector::zeros(2)).iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn hamilton_values() {
        let f = fiber(2, 4);
        let b = f.basis().clone();
        let i = b.ordinal(&crate::fiber::MultiIndex::new(vec![1, 2])).unwrap();
        assert_eq!(f.hamilton_eigenvalue(i), -4.0);
        assert_eq!(f.hamilton_eigenvalue(0), -1.0);
    }

    #[test]
    fn complex_structure_acts_as_minus_i_hamilton() {
        let f = fiber(1, 8);
        let j = complex_structure(1);
        let q = f.quadratic_action(&j).unwrap();
        let h = f.hamilton_operator();
        let diff = q.sub(&h.scaled(-I)).unwrap();
        assert!(diff.max_abs() < 1e-14, "{}", diff.max_abs());
    }

    #[test]
    fn rejects_non_symplectic() {
        let f = fiber(1, 4);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(f.quadratic_action(&a), Err(Error::NotSymplectic { .. })));
    }

    #[test]
    fn vacuum_normalized() {
        let f = fiber(2, 3);
        let v = f.vacuum_state();
        assert_eq!(fiber_inner(&v, &v).unwrap(), Complex64::new(1.0, 0.0));
    }
}
