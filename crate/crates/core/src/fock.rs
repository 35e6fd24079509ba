//! Truncated Fock-space vectors.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::sum::{ComplexNeumaier, Neumaier};
use crate::{Error, Result};

/// Amplitudes `amp[n] = ⟨n|ψ⟩` for `n < dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    amp: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amp: Vec<Complex64>) -> Result<Self> {
        if amp.is_empty() {
            return Err(Error::DimensionTooSmall { dim: 0, reason: "a Fock vector needs at least one level" });
        }
        Ok(FockVector { amp })
    }

    pub fn zeros(dim: usize) -> Self {
        FockVector { amp: vec![Complex64::new(0.0, 0.0); dim.max(1)] }
    }

    /// Number state `|n⟩` in a space of dimension `max(dim, n + 1)`.
    pub fn basis(dim: usize, n: usize) -> Self {
        let mut v = FockVector::zeros(dim.max(n + 1));
        v.amp[n] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.amp.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amp
    }

    pub fn get(&self, n: usize) -> Complex64 {
        self.amp.get(n).copied().unwrap_or_default()
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amp
    }

    pub fn norm_sqr(&self) -> f64 {
        let mut s = Neumaier::default();
        for a in &self.amp {
            s.add(a.norm_sqr());
        }
        s.value()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`; the shorter vector is zero-padded.
    pub fn inner(&self, other: &FockVector) -> Complex64 {
        let mut s = ComplexNeumaier::default();
        for (a, b) in self.amp.iter().zip(&other.amp) {
            s.add(a.conj() * b);
        }
        s.value()
    }

    /// Copy resized to `dim`, dropping or zero-padding the top.
    pub fn resized(&self, dim: usize) -> FockVector {
        let mut amp = self.amp.clone();
        amp.resize(dim.max(1), Complex64::new(0.0, 0.0));
        FockVector { amp }
    }

    pub fn scaled(&self, c: Complex64) -> FockVector {
        FockVector { amp: self.amp.iter().map(|a| a * c).collect() }
    }

    /// `self + c·other`, in the larger of the two dimensions.
    pub fn add_scaled(&self, c: Complex64, other: &FockVector) -> FockVector {
        let mut out = self.resized(self.dim().max(other.dim()));
        for (o, b) in out.amp.iter_mut().zip(&other.amp) {
            *o += c * b;
        }
        out
    }

    /// `‖self − other‖` with zero padding.
    pub fn distance(&self, other: &FockVector) -> f64 {
        let mut s = Neumaier::default();
        for n in 0..self.dim().max(other.dim()) {
            s.add((self.get(n) - other.get(n)).norm_sqr());
        }
        s.value().sqrt()
    }

    /// Same ray with the first significant amplitude made positive real.
    ///
    /// "Significant" means at least `1e-8` of the largest modulus, so that
    /// roundoff in nominally empty levels does not pick the gauge.
    pub fn gauge_fixed(&self) -> FockVector {
        let max = self.amp.iter().map(|a| a.norm()).fold(0.0, f64::max);
        match self.amp.iter().find(|a| a.norm() > 1e-8 * max) {
            Some(a) if max > 0.0 => self.scaled(a.conj() / a.norm()),
            _ => self.clone(),
        }
    }

    /// Distance between the two rays after gauge fixing both.
    pub fn gauge_distance(&self, other: &FockVector) -> f64 {
        self.gauge_fixed().distance(&other.gauge_fixed())
    }
}
