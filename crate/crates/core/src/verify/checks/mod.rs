//! The check registry. Each check draws its random data from its own seeded
//! generator, so results do not depend on which other checks run or on the
//! order rayon schedules them in.

mod geometry;
mod operator;
mod spectral;
mod weyl;

use nalgebra::DVector;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{FoliationModel, Mode, TransverseField};
use crate::spinor::{SpinorCalculus, SpinorField, Spectrum};
use crate::Complex64;

pub(crate) type VecField = TransverseField<DVector<Complex64>>;
pub(crate) type ScalarField = TransverseField<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Weyl,
    Geometry,
    Operator,
    Spectral,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Weyl, Suite::Geometry, Suite::Operator, Suite::Spectral];

    pub fn as_str(self) -> &'static str {
        match self {
            Suite::Weyl => "weyl",
            Suite::Geometry => "geometry",
            Suite::Operator => "operator",
            Suite::Spectral => "spectral",
        }
    }
}

/// Whether the residual must stay below the tolerance, or (for negative
/// controls) reach at least the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    AtMost,
    AtLeast,
}

/// What a check measured.
#[derive(Debug, Clone, Default)]
pub struct Outcome {
    pub residual: f64,
    pub aliasing: f64,
    pub note: Option<String>,
    pub spectrum: Option<Spectrum>,
}

impl Outcome {
    pub(crate) fn new(residual: f64) -> Self {
        Outcome { residual, ..Default::default() }
    }

    pub(crate) fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub(crate) fn aliasing(mut self, a: f64) -> Self {
        self.aliasing = a;
        self
    }

    pub(crate) fn spectrum(mut self, s: Spectrum) -> Self {
        self.spectrum = Some(s);
        self
    }
}

pub(crate) type RunFn = fn(&Ctx, &mut ChaCha8Rng) -> Result<Outcome>;

/// A named identity with its formula and default tolerance.
#[derive(Clone)]
pub struct CheckDef {
    pub name: &'static str,
    pub suite: Suite,
    pub anchor: &'static str,
    pub tolerance: f64,
    pub expectation: Expectation,
    pub(crate) run: RunFn,
}

impl std::fmt::Debug for CheckDef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CheckDef")
            .field("name", &self.name)
            .field("suite", &self.suite)
            .field("tolerance", &self.tolerance)
            .finish()
    }
}

pub(crate) const fn at_most(
    name: &'static str,
    suite: Suite,
    anchor: &'static str,
    tolerance: f64,
    run: RunFn,
) -> CheckDef {
    CheckDef { name, suite, anchor, tolerance, expectation: Expectation::AtMost, run }
}

pub(crate) const fn at_least(
    name: &'static str,
    suite: Suite,
    anchor: &'static str,
    tolerance: f64,
    run: RunFn,
) -> CheckDef {
    CheckDef { name, suite, anchor, tolerance, expectation: Expectation::AtLeast, run }
}

/// All checks, in report order.
pub fn registry() -> Vec<CheckDef> {
    let mut all = weyl::checks();
    all.extend(geometry::checks());
    all.extend(operator::checks());
    all.extend(spectral::checks());
    all
}

/// Shared, read-only state for one run.
pub struct Ctx {
    pub model: FoliationModel,
    pub calc: SpinorCalculus,
}

impl Ctx {
    pub fn new(model: FoliationModel, calc: SpinorCalculus) -> Self {
        Ctx { model, calc }
    }

    pub(crate) fn n(&self) -> usize {
        self.model.n()
    }

    pub(crate) fn dim(&self) -> usize {
        self.model.dim()
    }

    pub(crate) fn max_level(&self) -> usize {
        self.calc.max_level()
    }

    /// Test-field level for an operator raising by `raise`: protected and
    /// at most `L − 3`.
    pub(crate) fn level(&self, raise: usize) -> Result<usize> {
        let l = self.max_level();
        let protected = l.checked_sub(raise).ok_or_else(|| {
            Error::Hypothesis(format!("truncation level {l} is below the operator's level raise {raise}"))
        })?;
        Ok(protected.min(l.saturating_sub(3)))
    }

    pub(crate) fn field(&self, raise: usize, rng: &mut ChaCha8Rng) -> Result<SpinorField> {
        Ok(self.calc.random_field(self.level(raise)?, rng))
    }

    pub(crate) fn vacuum_field(&self, rng: &mut ChaCha8Rng) -> SpinorField {
        self.calc.random_field(0, rng)
    }

    fn radius(&self) -> i32 {
        if self.model.flags().fiber_only { 0 } else { (self.model.cutoff() - 1).max(0) }
    }

    /// Random complex section on modes `|k|∞ ≤ K − 1`.
    pub(crate) fn vector_field(&self, rng: &mut ChaCha8Rng) -> VecField {
        let dim = self.dim();
        let mut f = TransverseField::new(dim, self.model.cutoff());
        for k in Mode::cube(dim, self.radius()) {
            let v = DVector::from_fn(dim, |_, _| complex(rng));
            f.accumulate(k, Complex64::new(1.0, 0.0), &v);
        }
        f
    }

    pub(crate) fn scalar_field(&self, rng: &mut ChaCha8Rng) -> ScalarField {
        let mut f = TransverseField::new(self.dim(), self.model.cutoff());
        for k in Mode::cube(self.dim(), self.radius()) {
            f.accumulate(k, Complex64::new(1.0, 0.0), &complex(rng));
        }
        f
    }

    pub(crate) fn require(&self, ok: bool, why: &str) -> Result<()> {
        if ok { Ok(()) } else { Err(Error::Hypothesis(why.into())) }
    }

    pub(crate) fn require_transverse(&self) -> Result<()> {
        self.require(!self.model.flags().fiber_only, "model has no transverse directions")
    }

    pub(crate) fn require_parallel_j(&self) -> Result<()> {
        self.require(self.model.flags().preserves_j, "connection does not preserve J")
    }

    pub(crate) fn require_kahler(&self) -> Result<()> {
        self.require(self.model.flags().kahler, "model is not Kähler")
    }

    pub(crate) fn require_chsc(&self) -> Result<f64> {
        self.require_kahler()?;
        self.model
            .flags()
            .chsc_h
            .ok_or_else(|| Error::Hypothesis("curvature is not of constant holomorphic type".into()))
    }
}

pub(crate) fn complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub(crate) fn real_vector(dim: usize, rng: &mut ChaCha8Rng) -> DVector<Complex64> {
    DVector::from_fn(dim, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), 0.0))
}

pub(crate) fn relative(num: f64, den: f64) -> f64 {
    if den > 0.0 { num / den } else { num }
}

pub(crate) fn sup_scalar(f: &ScalarField) -> f64 {
    f.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max)
}

pub(crate) fn sup_vector(f: &VecField) -> f64 {
    f.iter().map(|(_, v)| v.camax()).fold(0.0, f64::max)
}
