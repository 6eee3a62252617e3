use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// A Fourier wave vector `k ∈ ℤ²ⁿ`, carrying `e^{2πi k·x}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Mode(Vec<i32>);

impl Mode {
    pub fn new(components: Vec<i32>) -> Self {
        Mode(components)
    }

    pub fn zero(dim: usize) -> Self {
        Mode(vec![0; dim])
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn linf(&self) -> i32 {
        self.0.iter().map(|k| k.abs()).max().unwrap_or(0)
    }

    pub fn norm_sqr(&self) -> i64 {
        self.0.iter().map(|&k| (k as i64) * (k as i64)).sum()
    }

    pub fn add(&self, other: &Mode) -> Mode {
        Mode(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Mode) -> Mode {
        Mode(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Mode {
        Mode(self.0.iter().map(|k| -k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&k| k == 0)
    }

    /// All modes with `|k|∞ ≤ radius`, in ascending order.
    pub fn cube(dim: usize, radius: i32) -> Vec<Mode> {
        let side = (2 * radius + 1) as usize;
        let total = side.pow(dim as u32);
        let mut out = Vec::with_capacity(total);
        for mut idx in 0..total {
            let mut k = vec![0; dim];
            for slot in k.iter_mut().rev() {
                *slot = (idx % side) as i32 - radius;
                idx /= side;
            }
            out.push(Mode(k));
        }
        out
    }
}

/// Values a Fourier coefficient may take.
pub trait ModeValue: Clone {
    fn zeros_like(&self) -> Self;
    fn axpy(&mut self, c: Complex64, x: &Self);
    fn norm_sqr(&self) -> f64;
    fn conj(&self) -> Self;
    fn scaled(&self, c: Complex64) -> Self {
        let mut z = self.zeros_like();
        z.axpy(c, self);
        z
    }
}

impl ModeValue for Complex64 {
    fn zeros_like(&self) -> Self {
        ZERO
    }
    fn axpy(&mut self, c: Complex64, x: &Self) {
        *self += c * x;
    }
    fn norm_sqr(&self) -> f64 {
        Complex64::norm_sqr(self)
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
}

impl ModeValue for DVector<Complex64> {
    fn zeros_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn axpy(&mut self, c: Complex64, x: &Self) {
        self.zip_apply(x, |a, b| *a += c * b);
    }
    fn norm_sqr(&self) -> f64 {
        self.norm_squared()
    }
    fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }
}

impl ModeValue for DMatrix<Complex64> {
    fn zeros_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn axpy(&mut self, c: Complex64, x: &Self) {
        self.zip_apply(x, |a, b| *a += c * b);
    }
    fn norm_sqr(&self) -> f64 {
        self.norm_squared()
    }
    fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }
}

/// A truncated Fourier series `f(x) = Σ_k e^{2πi k·x} f_k` on `T^dim`.
///
/// Products keep every mode up to `cutoff`; anything beyond is dropped and
/// its energy added to `aliasing` (a sum of squared norms).
#[derive(Debug, Clone, PartialEq)]
pub struct TransverseField<V> {
    dim: usize,
    cutoff: i32,
    modes: BTreeMap<Mode, V>,
    aliasing: f64,
}

impl<V: ModeValue> TransverseField<V> {
    pub fn new(dim: usize, cutoff: i32) -> Self {
        TransverseField { dim, cutoff, modes: BTreeMap::new(), aliasing: 0.0 }
    }

    pub fn constant(dim: usize, cutoff: i32, value: V) -> Self {
        let mut f = Self::new(dim, cutoff);
        f.modes.insert(Mode::zero(dim), value);
        f
    }

    /// Builds a field from explicit coefficients, rejecting modes past `cutoff`.
    pub fn from_modes(dim: usize, cutoff: i32, entries: Vec<(Mode, V)>) -> Result<Self> {
        let mut f = Self::new(dim, cutoff);
        for (k, v) in entries {
            f.insert(k, v)?;
        }
        Ok(f)
    }

    /// Adds `v` at mode `k`.
    pub fn insert(&mut self, k: Mode, v: V) -> Result<()> {
        if k.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: k.dim() });
        }
        if k.linf() > self.cutoff {
            return Err(Error::CutoffExceeded { mode: k.0, cutoff: self.cutoff });
        }
        match self.modes.get_mut(&k) {
            Some(slot) => slot.axpy(Complex64::new(1.0, 0.0), &v),
            None => {
                self.modes.insert(k, v);
            }
        }
        Ok(())
    }

    /// Adds `c·v` at mode `k`, recording it as aliasing when out of range.
    pub fn accumulate(&mut self, k: Mode, c: Complex64, v: &V) {
        if k.linf() > self.cutoff {
            self.aliasing += c.norm_sqr() * v.norm_sqr();
            return;
        }
        match self.modes.get_mut(&k) {
            Some(slot) => slot.axpy(c, v),
            None => {
                self.modes.insert(k, v.scaled(c));
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> i32 {
        self.cutoff
    }

    /// Sum of squared norms discarded above the cutoff so far.
    pub fn aliasing(&self) -> f64 {
        self.aliasing
    }

    pub fn add_aliasing(&mut self, energy: f64) {
        self.aliasing += energy;
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn get(&self, k: &Mode) -> Option<&V> {
        self.modes.get(k)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Mode, &V)> {
        self.modes.iter()
    }

    pub fn zero_mode(&self) -> Option<&V> {
        self.modes.get(&Mode::zero(self.dim))
    }

    /// Largest `|k|∞` present.
    pub fn radius(&self) -> i32 {
        self.modes.keys().map(Mode::linf).max().unwrap_or(0)
    }

    pub fn with_cutoff(&self, cutoff: i32) -> Self {
        let mut out = Self::new(self.dim, cutoff);
        out.aliasing = self.aliasing;
        for (k, v) in &self.modes {
            out.accumulate(k.clone(), Complex64::new(1.0, 0.0), v);
        }
        out
    }

    pub fn map<W: ModeValue>(&self, mut f: impl FnMut(&Mode, &V) -> W) -> TransverseField<W> {
        TransverseField {
            dim: self.dim,
            cutoff: self.cutoff,
            modes: self.modes.iter().map(|(k, v)| (k.clone(), f(k, v))).collect(),
            aliasing: self.aliasing,
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, v| v.scaled(c))
    }

    /// `self + c·other`.
    pub fn axpy(&mut self, c: Complex64, other: &Self) {
        for (k, v) in &other.modes {
            self.accumulate(k.clone(), c, v);
        }
        self.aliasing += c.norm_sqr() * other.aliasing;
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(1.0, 0.0), other);
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// `∂/∂x_a`, exact on the series.
    pub fn derivative(&self, a: usize) -> Self {
        self.map(|k, v| v.scaled(Complex64::new(0.0, 2.0 * PI * k.0[a] as f64)))
    }

    /// Pointwise bilinear product, truncated at `cutoff`.
    pub fn product<W: ModeValue, U: ModeValue>(
        &self,
        other: &TransverseField<W>,
        cutoff: i32,
        mut f: impl FnMut(&V, &W) -> U,
    ) -> TransverseField<U> {
        let mut out = TransverseField::new(self.dim, cutoff);
        for (k, a) in &self.modes {
            for (m, b) in &other.modes {
                let v = f(a, b);
                out.accumulate(k.add(m), Complex64::new(1.0, 0.0), &v);
            }
        }
        out.aliasing += self.aliasing + other.aliasing;
        out
    }

    /// Unweighted `∫|f|² dx` (Parseval).
    pub fn norm_sqr(&self) -> f64 {
        self.modes.values().map(ModeValue::norm_sqr).sum()
    }

    /// `max_k ‖f_{−k} − conj(f_k)‖`; zero for real-valued fields.
    pub fn reality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, v) in &self.modes {
            let mut d = v.conj();
            if let Some(w) = self.modes.get(&k.neg()) {
                d.axpy(Complex64::new(-1.0, 0.0), w);
            }
            worst = worst.max(d.norm_sqr().sqrt());
        }
        worst
    }

    /// Value at a point `x ∈ [0,1)^dim`.
    pub fn evaluate(&self, x: &[f64]) -> Option<V> {
        let mut iter = self.modes.iter();
        let (k0, v0) = iter.next()?;
        let phase = |k: &Mode| {
            let t: f64 = k.0.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum();
            Complex64::from_polar(1.0, 2.0 * PI * t)
        };
        let mut acc = v0.scaled(phase(k0));
        for (k, v) in iter {
            acc.axpy(phase(k), v);
        }
        Some(acc)
    }

    /// Drops exactly-zero coefficients.
    pub fn pruned(mut self) -> Self {
        self.modes.retain(|_, v| v.norm_sqr() > 0.0);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_field(amp: f64) -> TransverseField<Complex64> {
        TransverseField::from_modes(
            2,
            3,
            vec![
                (Mode::new(vec![1, 0]), Complex64::new(amp / 2.0, 0.0)),
                (Mode::new(vec![-1, 0]), Complex64::new(amp / 2.0, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn cube_enumeration() {
        let c = Mode::cube(2, 1);
        assert_eq!(c.len(), 9);
        assert_eq!(c[0], Mode::new(vec![-1, -1]));
        assert_eq!(c[4], Mode::zero(2));
    }

    #[test]
    fn derivative_of_cosine_is_minus_sine() {
        let f = cos_field(1.0);
        let df = f.derivative(0);
        let x = [0.13, 0.7];
        let got = df.evaluate(&x).unwrap();
        let want = -2.0 * PI * (2.0 * PI * x[0]).sin();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn product_matches_pointwise_and_tracks_aliasing() {
        let f = cos_field(1.0);
        let sq = f.product(&f, 3, |a, b| a * b);
        let x = [0.31, 0.2];
        let want = (2.0 * PI * x[0]).cos().powi(2);
        assert!((sq.evaluate(&x).unwrap() - want).norm() < 1e-14);
        assert_eq!(sq.aliasing(), 0.0);
        let clipped = f.product(&f, 1, |a, b| a * b);
        assert!((clipped.aliasing() - 2.0 * 0.0625).abs() < 1e-15);
    }

    #[test]
    fn reality_and_cutoff() {
        let f = cos_field(0.3);
        assert_eq!(f.reality_defect(), 0.0);
        let bad = TransverseField::from_modes(
            2,
            1,
            vec![(Mode::new(vec![2, 0]), Complex64::new(1.0, 0.0))],
        );
        assert!(matches!(bad, Err(Error::CutoffExceeded { .. })));
    }
}
