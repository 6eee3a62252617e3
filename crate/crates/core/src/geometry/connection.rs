use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::field::{Mode, ModeValue, TransverseField};
use crate::error::{Error, Result};
use crate::fiber::{complex_structure, sp_defect};

/// Flags are decided at this absolute tolerance.
pub const FLAG_TOL: f64 = 1e-12;

pub(crate) fn to_complex(m: &DMatrix<f64>) -> DMatrix<Complex64> {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Connection coefficients `∇_{e_X} e_k = Σ_l Γ(X)_{lk} e_l`.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    n: usize,
    gamma: Vec<TransverseField<DMatrix<Complex64>>>,
    is_symplectic: bool,
    is_torsion_free: bool,
    preserves_j: bool,
}

impl ConnectionData {
    pub fn new(n: usize, gamma: Vec<TransverseField<DMatrix<Complex64>>>) -> Result<Self> {
        let dim = 2 * n;
        if gamma.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: gamma.len() });
        }
        for g in &gamma {
            for (_, m) in g.iter() {
                if m.nrows() != dim || m.ncols() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: m.nrows() });
                }
            }
            if g.reality_defect() > FLAG_TOL {
                return Err(Error::InvalidParameter(
                    "connection coefficients must be real-valued".into(),
                ));
            }
        }
        let mut c = ConnectionData {
            n,
            gamma,
            is_symplectic: false,
            is_torsion_free: false,
            preserves_j: false,
        };
        c.is_symplectic = c.symplectic_defect() <= FLAG_TOL;
        c.is_torsion_free = c.torsion_defect() <= FLAG_TOL;
        c.preserves_j = c.j_defect() <= FLAG_TOL;
        Ok(c)
    }

    pub fn flat(n: usize, cutoff: i32) -> Self {
        let gamma = (0..2 * n).map(|_| TransverseField::new(2 * n, cutoff)).collect();
        ConnectionData::new(n, gamma).expect("flat connection is valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gamma(&self, x: usize) -> &TransverseField<DMatrix<Complex64>> {
        &self.gamma[x]
    }

    pub fn gammas(&self) -> &[TransverseField<DMatrix<Complex64>>] {
        &self.gamma
    }

    pub fn is_symplectic(&self) -> bool {
        self.is_symplectic
    }

    pub fn is_torsion_free(&self) -> bool {
        self.is_torsion_free
    }

    pub fn preserves_j(&self) -> bool {
        self.preserves_j
    }

    pub fn is_flat_coefficients(&self) -> bool {
        self.gamma.iter().all(|g| g.iter().all(|(_, m)| m.norm_squared() == 0.0))
    }

    /// Largest `|k|∞` among the coefficients.
    pub fn radius(&self) -> i32 {
        self.gamma.iter().map(TransverseField::radius).max().unwrap_or(0)
    }

    /// `max |Γ(X)ᵀΩ + ΩΓ(X)|` over directions and modes.
    pub fn symplectic_defect(&self) -> f64 {
        self.gamma
            .iter()
            .flat_map(|g| g.iter().map(|(_, m)| sp_defect(m)))
            .fold(0.0, f64::max)
    }

    /// `max |[Γ(X), J]|`, the size of `∇J`.
    pub fn j_defect(&self) -> f64 {
        let j = to_complex(&complex_structure(self.n));
        self.gamma
            .iter()
            .flat_map(|g| g.iter().map(|(_, m)| (m * &j - &j * m).camax()))
            .fold(0.0, f64::max)
    }

    /// Torsion field `T(e_a, e_b) = Γ(a)e_b − Γ(b)e_a`.
    pub fn torsion(&self, a: usize, b: usize) -> TransverseField<DVector<Complex64>> {
        let cutoff = self.gamma[a].cutoff().max(self.gamma[b].cutoff());
        let dim = 2 * self.n;
        let mut t = TransverseField::new(dim, cutoff);
        for (k, m) in self.gamma[a].iter() {
            t.accumulate(k.clone(), Complex64::new(1.0, 0.0), &m.column(b).clone_owned());
        }
        for (k, m) in self.gamma[b].iter() {
            t.accumulate(k.clone(), Complex64::new(-1.0, 0.0), &m.column(a).clone_owned());
        }
        t.pruned()
    }

    fn torsion_defect(&self) -> f64 {
        let dim = 2 * self.n;
        let mut worst: f64 = 0.0;
        for a in 0..dim {
            for b in a + 1..dim {
                for (_, v) in self.torsion(a, b).iter() {
                    worst = worst.max(v.camax());
                }
            }
        }
        worst
    }

    /// Same coefficients re-truncated at a new cutoff.
    pub fn with_cutoff(&self, cutoff: i32) -> Self {
        ConnectionData {
            n: self.n,
            gamma: self.gamma.iter().map(|g| g.with_cutoff(cutoff)).collect(),
            ..*self
        }
    }
}

/// Snapshot of the structure flags, for reporting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConnectionDataFlags {
    pub is_symplectic: bool,
    pub is_torsion_free: bool,
    pub preserves_j: bool,
}

impl ConnectionData {
    pub fn flags(&self) -> ConnectionDataFlags {
        ConnectionDataFlags {
            is_symplectic: self.is_symplectic,
            is_torsion_free: self.is_torsion_free,
            preserves_j: self.preserves_j,
        }
    }
}

/// Replaces `∇′` by `∇′ + ½(∇′J)J`, which is symplectic and preserves `J`
/// (hence also `g_Q`). A connection already preserving `J` is returned as is.
pub fn make_j_compatible(connection: &ConnectionData) -> Result<ConnectionData> {
    if !connection.is_symplectic {
        return Err(Error::NotSymplectic { defect: connection.symplectic_defect() });
    }
    if connection.preserves_j {
        return Ok(connection.clone());
    }
    let j = to_complex(&complex_structure(connection.n));
    let gamma = connection
        .gamma
        .iter()
        .map(|g| {
            g.map(|_, m| {
                let nj = m * &j - &j * m;
                m + (nj * &j).scaled(Complex64::new(0.5, 0.0))
            })
            .pruned()
        })
        .collect();
    let out = ConnectionData::new(connection.n, gamma)?;
    if !out.is_symplectic || !out.preserves_j {
        return Err(Error::Numerical(format!(
            "J-compatible projection failed: sp defect {:e}, J defect {:e}",
            out.symplectic_defect(),
            out.j_defect()
        )));
    }
    Ok(out)
}

/// `Γ(X)` for the symmetric perturbation `ω₀(Γ(X)s, t) = S(X, s, t)`,
/// i.e. `Γ(X) = Ω S_X`.
pub(crate) fn gamma_from_symmetric(n: usize, s: &[Complex64]) -> Vec<DMatrix<Complex64>> {
    let dim = 2 * n;
    let om = to_complex(&crate::fiber::omega_matrix(n));
    (0..dim)
        .map(|x| {
            let sx = DMatrix::from_fn(dim, dim, |a, b| s[x * dim * dim + a * dim + b]);
            &om * sx
        })
        .collect()
}

pub(crate) fn zero_mode_is_real<V: ModeValue>(entries: &[(Mode, V)]) -> bool {
    entries
        .iter()
        .filter(|(k, _)| k.is_zero())
        .all(|(_, v)| {
            let mut d = v.clone();
            d.axpy(Complex64::new(-1.0, 0.0), &v.conj());
            d.norm_sqr() == 0.0
        })
}
