use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::calculus::{DiracVariant, SpinorCalculus, VecField, I, ONE};
use crate::error::{Error, Result};
use crate::geometry::{Mode, TransverseField};

/// Largest trial space assembled densely; the level range shrinks to fit.
pub const MAX_TRIAL_DIM: usize = 1200;

/// Hermiticity must emerge to this relative accuracy.
pub const HERMITIAN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorName {
    Dprime,
    Dtildeprime,
    D,
    Dtilde,
    P,
    ConnLaplacian,
    /// The Hermitian curvature term `iF`.
    F,
    HJ,
}

impl OperatorName {
    pub const ALL: [OperatorName; 8] = [
        OperatorName::Dprime,
        OperatorName::Dtildeprime,
        OperatorName::D,
        OperatorName::Dtilde,
        OperatorName::P,
        OperatorName::ConnLaplacian,
        OperatorName::F,
        OperatorName::HJ,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorName::Dprime => "Dprime",
            OperatorName::Dtildeprime => "Dtildeprime",
            OperatorName::D => "D",
            OperatorName::Dtilde => "Dtilde",
            OperatorName::P => "P",
            OperatorName::ConnLaplacian => "ConnLaplacian",
            OperatorName::F => "F",
            OperatorName::HJ => "HJ",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|o| o.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown operator `{s}`")))
    }
}

/// One trial function `e^{2πi k·x} h_β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialFunction {
    pub mode: Mode,
    pub ordinal: usize,
    pub level: usize,
}

/// Galerkin matrices `M_ij = ⟨A e_j, e_i⟩` and `G_ij = ⟨e_j, e_i⟩` over a
/// trial space of Fourier modes times protected fiber levels.
#[derive(Debug, Clone)]
pub struct AssembledOperator {
    pub name: OperatorName,
    pub trial: Vec<TrialFunction>,
    pub matrix: DMatrix<Complex64>,
    pub gram: DMatrix<Complex64>,
    /// `max|M − M*| / max(1, max|M|)`.
    pub hermitian_residual: f64,
    /// Highest trial level.
    pub max_level: usize,
    pub restricted_level: Option<usize>,
}

/// One eigenvalue with the dominant mode size and level of its eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenEntry {
    pub value: f64,
    pub mode_norm_sq: i64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub operator: OperatorName,
    pub restricted_level: Option<usize>,
    pub max_level: usize,
    pub hermitian_residual: f64,
    pub entries: Vec<EigenEntry>,
}

impl Spectrum {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn min(&self) -> Option<f64> {
        self.entries.first().map(|e| e.value)
    }
}

impl AssembledOperator {
    /// The sub-matrix coupling input mode `k_in` to output mode `k_out`.
    pub fn block(&self, k_out: &Mode, k_in: &Mode) -> Option<DMatrix<Complex64>> {
        let rows: Vec<usize> = (0..self.trial.len()).filter(|&i| &self.trial[i].mode == k_out).collect();
        let cols: Vec<usize> = (0..self.trial.len()).filter(|&j| &self.trial[j].mode == k_in).collect();
        if rows.is_empty() || cols.is_empty() {
            return None;
        }
        Some(DMatrix::from_fn(rows.len(), cols.len(), |a, b| self.matrix[(rows[a], cols[b])]))
    }

    /// `max |M_ij|` over entries joining different levels, relative to
    /// `max(1, max|M|)`.
    pub fn level_offdiagonal(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, ti) in self.trial.iter().enumerate() {
            for (j, tj) in self.trial.iter().enumerate() {
                if ti.level != tj.level {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst / self.matrix.camax().max(1.0)
    }

    /// Solves `M x = λ G x` after validating Hermiticity.
    pub fn spectrum(&self) -> Result<Spectrum> {
        if self.hermitian_residual > HERMITIAN_TOL {
            return Err(Error::NotHermitian {
                name: self.name.as_str().into(),
                residual: self.hermitian_residual,
            });
        }
        let chol = self
            .gram
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Numerical("Gram matrix is not positive definite".into()))?;
        let l = chol.l();
        let x = l
            .solve_lower_triangular(&self.matrix)
            .ok_or_else(|| Error::Numerical("singular Gram factor".into()))?;
        let c = l
            .solve_lower_triangular(&x.adjoint())
            .ok_or_else(|| Error::Numerical("singular Gram factor".into()))?
            .adjoint();
        // validated above; the solver reads one triangle only
        let c = (&c + c.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = c.symmetric_eigen();
        let lh = l.adjoint();
        let mut entries = Vec::with_capacity(self.trial.len());
        for (col, &value) in eig.eigenvalues.iter().enumerate() {
            let y: DVector<Complex64> = eig.eigenvectors.column(col).clone_owned();
            let v = lh.solve_upper_triangular(&y).unwrap_or(y);
            let mut by_mode: BTreeMap<i64, f64> = BTreeMap::new();
            let mut by_level: BTreeMap<usize, f64> = BTreeMap::new();
            for (t, z) in self.trial.iter().zip(v.iter()) {
                *by_mode.entry(t.mode.norm_sqr()).or_default() += z.norm_sqr();
                *by_level.entry(t.level).or_default() += z.norm_sqr();
            }
            entries.push(EigenEntry {
                value,
                mode_norm_sq: argmax(&by_mode),
                level: argmax(&by_level),
            });
        }
        entries.sort_by(|a, b| {
            a.value
                .total_cmp(&b.value)
                .then(a.level.cmp(&b.level))
                .then(a.mode_norm_sq.cmp(&b.mode_norm_sq))
        });
        Ok(Spectrum {
            operator: self.name,
            restricted_level: self.restricted_level,
            max_level: self.max_level,
            hermitian_residual: self.hermitian_residual,
            entries,
        })
    }
}

fn argmax<K: Copy + Ord>(m: &BTreeMap<K, f64>) -> K {
    let mut best: Option<(K, f64)> = None;
    for (&k, &w) in m {
        // ties resolve to the smallest key, since the map iterates in order
        if best.is_none_or(|(_, bw)| w > bw * (1.0 + 1e-9)) {
            best = Some((k, w));
        }
    }
    best.expect("non-empty trial space").0
}

impl SpinorCalculus {
    pub fn operator_raise(&self, name: OperatorName) -> usize {
        let q = self.connection_raise();
        match name {
            OperatorName::Dprime | OperatorName::Dtildeprime | OperatorName::D | OperatorName::Dtilde => {
                self.dirac_raise()
            }
            OperatorName::P => {
                if self.model().flags().fiber_only { 2 + q } else { self.p_raise() }
            }
            OperatorName::ConnLaplacian => 2 * q,
            OperatorName::F => 2 + q,
            OperatorName::HJ => 0,
        }
    }

    pub(crate) fn apply_named(&self, name: OperatorName, p: &VecField) -> VecField {
        match name {
            OperatorName::Dprime => self.dirac_raw(DiracVariant::Dprime, p),
            OperatorName::Dtildeprime => self.dirac_raw(DiracVariant::Dtildeprime, p),
            OperatorName::D => self.dirac_raw(DiracVariant::D, p),
            OperatorName::Dtilde => self.dirac_raw(DiracVariant::Dtilde, p),
            OperatorName::P => self.p_raw(p),
            OperatorName::ConnLaplacian => self.conn_lap_raw(p),
            OperatorName::F => self.f_raw(p).scale(I),
            OperatorName::HJ => self.hamilton_raw(p),
        }
    }

    fn trial_space(&self, name: OperatorName, restrict: Option<usize>) -> Result<(Vec<TrialFunction>, usize)> {
        let protected = self.protected_level(self.operator_raise(name))?;
        let modes = if self.model().flags().fiber_only {
            vec![Mode::zero(self.model().dim())]
        } else {
            Mode::cube(self.model().dim(), self.model().cutoff())
        };
        let basis = self.basis();
        let (lo, hi) = match restrict {
            Some(l) if l > protected => {
                return Err(Error::LevelOutOfRange { level: l, max: protected });
            }
            Some(l) => (l, l),
            None => {
                let mut hi = protected;
                while hi > 0 && modes.len() * basis.dim_up_to(hi) > MAX_TRIAL_DIM {
                    hi -= 1;
                }
                (0, hi)
            }
        };
        let mut trial = Vec::new();
        for k in &modes {
            for l in lo..=hi {
                for ordinal in basis.level_range(l)? {
                    trial.push(TrialFunction { mode: k.clone(), ordinal, level: l });
                }
            }
        }
        if trial.len() > MAX_TRIAL_DIM {
            return Err(Error::InvalidParameter(format!(
                "trial space of dimension {} exceeds {MAX_TRIAL_DIM}",
                trial.len()
            )));
        }
        Ok((trial, hi))
    }

    /// Assembles the named operator over modes `|k|∞ ≤ K` and protected
    /// levels, or over the single level `restrict`.
    pub fn assemble(&self, name: OperatorName, restrict: Option<usize>) -> Result<AssembledOperator> {
        let (trial, max_level) = self.trial_space(name, restrict)?;
        let dim = self.model().dim();
        let cutoff = self.model().cutoff();
        let d = self.basis().dim();
        let rho = self.model().leaf_density();
        let index: BTreeMap<(Mode, usize), usize> =
            trial.iter().enumerate().map(|(i, t)| ((t.mode.clone(), t.ordinal), i)).collect();
        let size = trial.len();
        let mut matrix = DMatrix::zeros(size, size);
        let mut gram = DMatrix::zeros(size, size);
        for (j, tj) in trial.iter().enumerate() {
            let mut unit = DVector::zeros(d);
            unit[tj.ordinal] = ONE;
            let mut e = TransverseField::new(dim, self.model().work_cutoff());
            e.insert(tj.mode.clone(), unit.clone())?;
            let image = self.apply_named(name, &e);
            // ⟨f, e_i⟩_ρ = Σ_q ρ_q f_{k_i − q}[β_i] = (ρ f)_{k_i}[β_i]
            let weighted = rho.product(&image, cutoff, |r, v| v * *r);
            let weighted_e = rho.product(&e, cutoff, |r, v| v * *r);
            for (src, dst) in [(&weighted, &mut matrix), (&weighted_e, &mut gram)] {
                for (k, v) in src.iter() {
                    for (ordinal, z) in v.iter().enumerate() {
                        if let Some(&i) = index.get(&(k.clone(), ordinal)) {
                            dst[(i, j)] = *z;
                        }
                    }
                }
            }
        }
        let scale = matrix.camax().max(1.0);
        let hermitian_residual = (&matrix - matrix.adjoint()).camax() / scale;
        Ok(AssembledOperator {
            name,
            trial,
            matrix,
            gram,
            hermitian_residual,
            max_level,
            restricted_level: restrict,
        })
    }

    pub fn spectrum(&self, name: OperatorName, restrict: Option<usize>) -> Result<Spectrum> {
        self.assemble(name, restrict)?.spectrum()
    }
}
