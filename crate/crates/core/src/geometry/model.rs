use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use super::connection::{
    gamma_from_symmetric, make_j_compatible, to_complex, zero_mode_is_real, ConnectionData,
    FLAG_TOL,
};
use super::curvature::{chsc_curvature, connection_curvature, CurvatureTensor};
use super::density::density_coefficients;
use super::field::{Mode, ModeValue, TransverseField};
use crate::error::{Error, Result};
use crate::fiber::{complex_structure, omega_matrix, sp_defect};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Catalog of desk-scale models. Perturbation coefficients are given for
/// one of each `±k` pair; the conjugate partner is filled in so every field
/// is real-valued. Zero-mode coefficients must be real.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    /// Point foliation of `T²ⁿ` with the flat Kähler structure.
    FlatKahlerTorus { n: usize, cutoff: i32 },
    /// A minimal flow with flat transverse Kähler structure over `T²`.
    HeisenbergFlow { cutoff: i32 },
    /// Circle leaves with length `e^{f}`; `warp` holds the coefficients of `f`.
    WarpedNonTaut { n: usize, cutoff: i32, warp: Vec<(Mode, Complex64)> },
    /// `ω₀(Γ(X)s, t) = S(X, s, t)` with `S` totally symmetric, flattened as
    /// `S[x·4n² + s·2n + t]`.
    SymmetricPerturbedFedosov { n: usize, cutoff: i32, tensor: Vec<(Mode, Vec<Complex64>)> },
    /// `Γ(X) = A(X) ∈ sp(n,ℝ)`, one matrix per frame direction.
    TorsionPerturbedSymplectic {
        n: usize,
        cutoff: i32,
        perturbation: Vec<(Mode, Vec<DMatrix<Complex64>>)>,
    },
    /// A single point carrying the constant holomorphic sectional curvature
    /// tensor with constant `h`.
    ChscFiber { n: usize, h: f64 },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::FlatKahlerTorus { .. } => "flat-kahler-torus",
            ModelSpec::HeisenbergFlow { .. } => "heisenberg-flow",
            ModelSpec::WarpedNonTaut { .. } => "warped-non-taut",
            ModelSpec::SymmetricPerturbedFedosov { .. } => "symmetric-perturbed-fedosov",
            ModelSpec::TorsionPerturbedSymplectic { .. } => "torsion-perturbed-symplectic",
            ModelSpec::ChscFiber { .. } => "chsc-fiber",
        }
    }

    /// `f = amplitude·cos(2πx₁)`.
    pub fn warped_cosine(n: usize, cutoff: i32, amplitude: f64) -> Self {
        let mut k = vec![0; 2 * n];
        k[0] = 1;
        ModelSpec::WarpedNonTaut {
            n,
            cutoff,
            warp: vec![(Mode::new(k), Complex64::new(amplitude / 2.0, 0.0))],
        }
    }

    /// A random symmetric perturbation on the zero mode and two `|k|∞ = 1`
    /// modes, with entries of size `amplitude`.
    pub fn random_symmetric_fedosov<R: Rng>(
        n: usize,
        cutoff: i32,
        amplitude: f64,
        rng: &mut R,
    ) -> Self {
        let dim = 2 * n;
        let mut tensor = Vec::new();
        for (k, complex) in perturbation_modes(dim, cutoff, rng) {
            let mut s = vec![Complex64::new(0.0, 0.0); dim * dim * dim];
            for a in 0..dim {
                for b in a..dim {
                    for c in b..dim {
                        let re = amplitude * rng.gen_range(-1.0..1.0);
                        let im = if complex { amplitude * rng.gen_range(-1.0..1.0) } else { 0.0 };
                        let v = Complex64::new(re, im);
                        for (x, y, z) in permutations(a, b, c) {
                            s[x * dim * dim + y * dim + z] = v;
                        }
                    }
                }
            }
            tensor.push((k, s));
        }
        ModelSpec::SymmetricPerturbedFedosov { n, cutoff, tensor }
    }

    /// A random `sp(n,ℝ)`-valued perturbation on the zero mode and two
    /// `|k|∞ = 1` modes.
    pub fn random_torsion<R: Rng>(n: usize, cutoff: i32, amplitude: f64, rng: &mut R) -> Self {
        let dim = 2 * n;
        let om = omega_matrix(n);
        let mut perturbation = Vec::new();
        for (k, complex) in perturbation_modes(dim, cutoff, rng) {
            let mats = (0..dim)
                .map(|_| {
                    // A = Ω S with S symmetric lies in sp(n)
                    let mut s = DMatrix::<Complex64>::zeros(dim, dim);
                    for a in 0..dim {
                        for b in a..dim {
                            let re = amplitude * rng.gen_range(-1.0..1.0);
                            let im =
                                if complex { amplitude * rng.gen_range(-1.0..1.0) } else { 0.0 };
                            s[(a, b)] = Complex64::new(re, im);
                            s[(b, a)] = s[(a, b)];
                        }
                    }
                    to_complex(&om) * s
                })
                .collect();
            perturbation.push((k, mats));
        }
        ModelSpec::TorsionPerturbedSymplectic { n, cutoff, perturbation }
    }
}

fn permutations(a: usize, b: usize, c: usize) -> [(usize, usize, usize); 6] {
    [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]
}

/// The zero mode plus two distinct modes with `|k|∞ = 1` (or only the zero
/// mode when the cutoff is 0). The flag marks modes allowed complex values.
fn perturbation_modes<R: Rng>(dim: usize, cutoff: i32, rng: &mut R) -> Vec<(Mode, bool)> {
    let mut out = vec![(Mode::zero(dim), false)];
    if cutoff < 1 {
        return out;
    }
    // one representative of each ±k pair: first nonzero component positive
    let candidates: Vec<Mode> = Mode::cube(dim, 1)
        .into_iter()
        .filter(|k| k.components().iter().find(|&&c| c != 0).is_some_and(|&c| c > 0))
        .collect();
    let first = rng.gen_range(0..candidates.len());
    let mut second = rng.gen_range(0..candidates.len() - 1);
    if second >= first {
        second += 1;
    }
    out.push((candidates[first].clone(), true));
    out.push((candidates[second].clone(), true));
    out
}

/// Structure flags, computed from the data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelFlags {
    pub symplectic: bool,
    pub torsion_free: bool,
    pub preserves_j: bool,
    pub minimal: bool,
    pub fedosov: bool,
    pub kahler: bool,
    /// Fiber-only model without a transverse base.
    pub fiber_only: bool,
    /// Dimension of the leaves (0 for the point foliation).
    pub leaf_dim: usize,
    /// Constant holomorphic sectional curvature, when the model has one.
    pub chsc_h: Option<f64>,
}

/// A validated model foliation over the transverse torus `T²ⁿ`.
#[derive(Debug, Clone)]
pub struct FoliationModel {
    name: String,
    n: usize,
    cutoff: i32,
    work_cutoff: i32,
    connection: ConnectionData,
    torsion: Vec<TransverseField<DVector<Complex64>>>,
    tau: TransverseField<DVector<Complex64>>,
    kappa_form: TransverseField<DVector<Complex64>>,
    kappa_sharp: TransverseField<DVector<Complex64>>,
    kappa_sharp_g: TransverseField<DVector<Complex64>>,
    log_density: TransverseField<Complex64>,
    leaf_density: TransverseField<Complex64>,
    density_quadrature_error: f64,
    fiber_curvature: Option<CurvatureTensor>,
    flags: ModelFlags,
}

fn hermitian_complete<V: ModeValue>(
    dim: usize,
    cutoff: i32,
    entries: &[(Mode, V)],
) -> Result<TransverseField<V>> {
    if !zero_mode_is_real(entries) {
        return Err(Error::InvalidParameter("zero-mode coefficients must be real".into()));
    }
    let mut f = TransverseField::new(dim, cutoff);
    for (k, v) in entries {
        if k.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: k.dim() });
        }
        f.insert(k.clone(), v.clone())?;
        if !k.is_zero() {
            f.insert(k.neg(), v.conj())?;
        }
    }
    Ok(f.pruned())
}

/// Builds and validates a catalog model.
pub fn build_model(spec: &ModelSpec) -> Result<FoliationModel> {
    match spec {
        ModelSpec::FlatKahlerTorus { n, cutoff } => {
            check_common(*n, *cutoff)?;
            assemble(spec.name(), *n, *cutoff, ConnectionData::flat(*n, *cutoff), None, 0, None)
        }
        ModelSpec::HeisenbergFlow { cutoff } => {
            check_common(1, *cutoff)?;
            assemble(spec.name(), 1, *cutoff, ConnectionData::flat(1, *cutoff), None, 1, None)
        }
        ModelSpec::WarpedNonTaut { n, cutoff, warp } => {
            check_common(*n, *cutoff)?;
            let f = hermitian_complete(2 * n, *cutoff, warp)?;
            if f.is_empty() {
                return Err(Error::InvalidParameter("warped model needs a nonzero warp".into()));
            }
            assemble(spec.name(), *n, *cutoff, ConnectionData::flat(*n, *cutoff), Some(f), 1, None)
        }
        ModelSpec::SymmetricPerturbedFedosov { n, cutoff, tensor } => {
            check_common(*n, *cutoff)?;
            let dim = 2 * n;
            let mut entries = Vec::with_capacity(tensor.len());
            for (k, s) in tensor {
                if s.len() != dim * dim * dim {
                    return Err(Error::DimensionMismatch { expected: dim * dim * dim, got: s.len() });
                }
                let defect = symmetry_defect(dim, s);
                if defect > FLAG_TOL {
                    return Err(Error::NotSymmetric { defect });
                }
                entries.push((k.clone(), gamma_from_symmetric(*n, s)));
            }
            let conn = connection_from_entries(*n, *cutoff, &entries)?;
            assemble(spec.name(), *n, *cutoff, conn, None, 0, None)
        }
        ModelSpec::TorsionPerturbedSymplectic { n, cutoff, perturbation } => {
            check_common(*n, *cutoff)?;
            let dim = 2 * n;
            for (_, mats) in perturbation {
                if mats.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: mats.len() });
                }
                for m in mats {
                    let defect = sp_defect(m);
                    if defect > FLAG_TOL {
                        return Err(Error::NotSymplectic { defect });
                    }
                }
            }
            let conn = connection_from_entries(*n, *cutoff, perturbation)?;
            if conn.is_torsion_free() {
                return Err(Error::InvalidParameter(
                    "perturbation has no torsion; use the symmetric Fedosov model".into(),
                ));
            }
            assemble(spec.name(), *n, *cutoff, conn, None, 0, None)
        }
        ModelSpec::ChscFiber { n, h } => {
            if *n < 1 {
                return Err(Error::InvalidParameter(format!("n = {n} < 1")));
            }
            if !h.is_finite() {
                return Err(Error::InvalidParameter("h must be finite".into()));
            }
            let r = chsc_curvature(*n, *h);
            assemble(spec.name(), *n, 0, ConnectionData::flat(*n, 0), None, 0, Some((r, *h)))
        }
    }
}

fn check_common(n: usize, cutoff: i32) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("n = {n} < 1")));
    }
    if cutoff < 1 {
        return Err(Error::InvalidParameter(format!("Fourier cutoff K = {cutoff} < 1")));
    }
    Ok(())
}

fn symmetry_defect(dim: usize, s: &[Complex64]) -> f64 {
    let at = |a: usize, b: usize, c: usize| s[a * dim * dim + b * dim + c];
    let mut worst: f64 = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                for (x, y, z) in permutations(a, b, c) {
                    worst = worst.max((at(a, b, c) - at(x, y, z)).norm());
                }
            }
        }
    }
    worst
}

fn connection_from_entries(
    n: usize,
    cutoff: i32,
    entries: &[(Mode, Vec<DMatrix<Complex64>>)],
) -> Result<ConnectionData> {
    let dim = 2 * n;
    let mut gamma = Vec::with_capacity(dim);
    for x in 0..dim {
        let per_dir: Vec<(Mode, DMatrix<Complex64>)> =
            entries.iter().map(|(k, m)| (k.clone(), m[x].clone())).collect();
        gamma.push(hermitian_complete(dim, cutoff, &per_dir)?);
    }
    ConnectionData::new(n, gamma)
}

fn assemble(
    name: &str,
    n: usize,
    cutoff: i32,
    connection: ConnectionData,
    log_density: Option<TransverseField<Complex64>>,
    leaf_dim: usize,
    chsc: Option<(CurvatureTensor, f64)>,
) -> Result<FoliationModel> {
    let dim = 2 * n;
    let log_density = log_density.unwrap_or_else(|| TransverseField::new(dim, cutoff));
    let coeff_radius = connection.radius().max(log_density.radius());
    let work_cutoff = if chsc.is_some() { 0 } else { cutoff + 6 * coeff_radius.max(1) };
    let connection = connection.with_cutoff(work_cutoff);
    let log_density = log_density.with_cutoff(work_cutoff);

    // κ = −df, κ♯ = Ωκ (ω-dual), κ^{♯g} = κ (g-dual in the orthonormal frame)
    let om = to_complex(&omega_matrix(n));
    let mut kappa_form = TransverseField::new(dim, work_cutoff);
    for x in 0..dim {
        let dx = log_density.derivative(x);
        for (k, v) in dx.iter() {
            let mut e = DVector::zeros(dim);
            e[x] = -v;
            kappa_form.accumulate(k.clone(), ONE, &e);
        }
    }
    let kappa_form = kappa_form.pruned();
    let kappa_sharp = kappa_form.map(|_, v| &om * v);
    let kappa_sharp_g = kappa_form.clone();

    let torsion: Vec<_> = (0..dim)
        .flat_map(|a| (0..dim).map(move |b| (a, b)))
        .map(|(a, b)| connection.torsion(a, b))
        .collect();
    let mut tau = TransverseField::new(dim, work_cutoff);
    for i in 0..n {
        tau.axpy(ONE, &torsion[i * dim + n + i]);
    }
    let tau = tau.pruned();

    let density_radius = 2 * work_cutoff + 2;
    let (leaf_density, density_quadrature_error) = density_coefficients(&log_density, density_radius);

    let minimal = kappa_form.is_empty();
    let symplectic = connection.is_symplectic();
    let torsion_free = connection.is_torsion_free();
    let preserves_j = connection.preserves_j();
    let fedosov = symplectic && torsion_free;
    let kahler = fedosov && preserves_j;
    let (fiber_curvature, chsc_h) = match chsc {
        Some((r, h)) => (Some(r), Some(h)),
        None => {
            let flat = connection_curvature(&connection, work_cutoff).max_abs() <= FLAG_TOL;
            (None, if kahler && flat { Some(0.0) } else { None })
        }
    };
    let flags = ModelFlags {
        symplectic,
        torsion_free,
        preserves_j,
        minimal,
        fedosov,
        kahler,
        fiber_only: fiber_curvature.is_some(),
        leaf_dim,
        chsc_h,
    };
    Ok(FoliationModel {
        name: name.to_string(),
        n,
        cutoff,
        work_cutoff,
        connection,
        torsion,
        tau,
        kappa_form,
        kappa_sharp,
        kappa_sharp_g,
        log_density,
        leaf_density,
        density_quadrature_error,
        fiber_curvature,
        flags,
    })
}

impl FoliationModel {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Transverse dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// Fourier cutoff `K` of the model data and test fields.
    pub fn cutoff(&self) -> i32 {
        self.cutoff
    }

    /// Cutoff used for intermediate products.
    pub fn work_cutoff(&self) -> i32 {
        self.work_cutoff
    }

    pub fn connection(&self) -> &ConnectionData {
        &self.connection
    }

    pub fn torsion(&self, a: usize, b: usize) -> &TransverseField<DVector<Complex64>> {
        &self.torsion[a * self.dim() + b]
    }

    pub fn tau(&self) -> &TransverseField<DVector<Complex64>> {
        &self.tau
    }

    pub fn kappa_form(&self) -> &TransverseField<DVector<Complex64>> {
        &self.kappa_form
    }

    pub fn kappa_sharp(&self) -> &TransverseField<DVector<Complex64>> {
        &self.kappa_sharp
    }

    pub fn kappa_sharp_g(&self) -> &TransverseField<DVector<Complex64>> {
        &self.kappa_sharp_g
    }

    /// `κ♯ + τ`, the combination entering the Dirac corrections.
    pub fn kappa_tau(&self) -> TransverseField<DVector<Complex64>> {
        self.kappa_sharp.plus(&self.tau)
    }

    /// `f` with leaf density `ρ = e^f`.
    pub fn log_density(&self) -> &TransverseField<Complex64> {
        &self.log_density
    }

    /// Fourier coefficients of the leaf density `ρ`.
    pub fn leaf_density(&self) -> &TransverseField<Complex64> {
        &self.leaf_density
    }

    pub fn density_quadrature_error(&self) -> f64 {
        self.density_quadrature_error
    }

    pub fn fiber_curvature(&self) -> Option<&CurvatureTensor> {
        self.fiber_curvature.as_ref()
    }

    pub fn flags(&self) -> ModelFlags {
        self.flags
    }

    pub fn j_matrix(&self) -> DMatrix<Complex64> {
        to_complex(&complex_structure(self.n))
    }

    pub fn omega_matrix(&self) -> DMatrix<Complex64> {
        to_complex(&omega_matrix(self.n))
    }

    /// `∫ h μ_M = Σ_k h_k ρ_{−k}`.
    pub fn integrate(&self, h: &TransverseField<Complex64>) -> Complex64 {
        h.iter()
            .filter_map(|(k, v)| self.leaf_density.get(&k.neg()).map(|r| v * r))
            .sum()
    }

    /// The same foliation with its connection replaced by the
    /// `J`-compatible one.
    pub fn with_j_compatible_connection(&self) -> Result<FoliationModel> {
        if self.flags.fiber_only {
            return Ok(self.clone());
        }
        let conn = make_j_compatible(&self.connection)?;
        let f = if self.log_density.is_empty() { None } else { Some(self.log_density.clone()) };
        let name = format!("{}+j-compatible", self.name);
        let mut m = assemble(&name, self.n, self.cutoff, conn, f, self.flags.leaf_dim, None)?;
        m.work_cutoff = self.work_cutoff.max(m.work_cutoff);
        Ok(m)
    }
}
