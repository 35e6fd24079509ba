//! k-hypercats: eigenstates of `â_f^k`, one per residue class `j mod k`.
//!
//! A kitten is built either directly in the Fock basis,
//! `|z;k,j⟩ ∝ Σ_ν z^{νk+j}/sqrt(ρ(νk+j)) |νk+j⟩`, or as the discrete Fourier
//! transform of the `k` rotated coherent states `|z e^{2πil/k}⟩`:
//!
//! ```text
//! |z;k,j⟩ = (1/k) sqrt(F/F^j) Σ_l e^{-2πijl/k} |z e^{2πil/k}⟩
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::dd;
use crate::fock::FockVector;
use crate::hyperfunc::{self, kitten_norm, kitten_norm_complex, norm_series, norm_series_complex, ModelParams};
use crate::states::{hcs, raw_amplitudes, CoherentLabel, AUTO_DIM_TAIL, EXPLICIT_DIM_MASS};
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Sectors whose Gram eigenvalue falls below this are refused by [`kitten_dft`].
pub const DEGENERATE_LAMBDA: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct KittenSpec {
    pub k: usize,
    pub j: usize,
    pub z: Complex64,
    pub params: ModelParams,
}

impl KittenSpec {
    pub fn new(k: usize, j: usize, z: Complex64, params: ModelParams) -> Self {
        KittenSpec { k, j, z, params }
    }

    pub fn x(&self) -> f64 {
        self.z.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        hyperfunc::validate_sector(&self.params, self.k, self.j)?;
        self.params.check_domain(self.x())
    }
}

/// `e^{2πi m/k}`, with `m` reduced mod `k` first and quarter turns exact.
pub fn root_of_unity(m: i64, k: usize) -> Complex64 {
    let k = k as i64;
    let m = m.rem_euclid(k);
    if (4 * m) % k == 0 {
        return match 4 * m / k {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        };
    }
    let t = 2.0 * PI * m as f64 / k as f64;
    Complex64::new(t.cos(), t.sin())
}

/// `Σ_{l<k} e^{2πi d l/k}` summed in floating point, unreduced angles.
pub fn orthogonality_kernel(d: i64, k: usize) -> Complex64 {
    (0..k)
        .map(|l| {
            let t = 2.0 * PI * (d * l as i64) as f64 / k as f64;
            Complex64::new(t.cos(), t.sin())
        })
        .sum()
}

/// Smallest dimension leaving a tail below `1e-24 · target` (at least `min`).
fn dim_for_target(params: &ModelParams, x: f64, target: f64, min: usize) -> Result<usize> {
    if let Some(n) = params.trunc() {
        return Ok((n + 1).max(min));
    }
    let c = params.coeffs();
    let limit = if params.p() == params.q() + 1 { x } else { 0.0 };
    let cap = hyperfunc::max_terms();
    let mut t = 1.0;
    for n in 0..cap {
        let r1 = x * c.ratio(n + 1)?;
        let r2 = x * c.ratio(n + 2)?;
        let next = t * r1;
        let rhat = r1.max(r2).max(limit);
        if n + 1 >= min && rhat < 1.0 && next / (1.0 - rhat) < AUTO_DIM_TAIL * target {
            return Ok(n + 1);
        }
        t = next;
    }
    Err(Error::NotConverged { terms: cap })
}

fn kitten_dim(spec: &KittenSpec, fj: f64, dim: Option<usize>) -> Result<usize> {
    match dim {
        Some(d) => Ok(d.max(1)),
        None if fj > 0.0 => dim_for_target(&spec.params, spec.x(), fj, spec.j + 1),
        None => Ok(spec.params.trunc().map_or(spec.j + 1, |n| n + 1)),
    }
}

/// Kitten built directly on the sector `n ≡ j (mod k)`.
pub fn kitten_fock(spec: &KittenSpec, dim: Option<usize>) -> Result<FockVector> {
    spec.validate()?;
    let fj = kitten_norm(&spec.params, spec.k, spec.j, spec.x())?;
    let dim = kitten_dim(spec, fj, dim)?;
    let phase = spec.params.phase();
    if fj == 0.0 {
        // z = 0 leaves only the lone |j⟩
        if dim <= spec.j {
            return Err(Error::DimensionTooSmall { dim, reason: "the sector starts above the space" });
        }
        return Ok(FockVector::basis(dim, spec.j).scaled(phase.factor(spec.j)));
    }
    let mut raw = raw_amplitudes(&spec.params, spec.z, dim)?;
    let mut mass = Neumaier::default();
    for (n, a) in raw.iter_mut().enumerate() {
        if n % spec.k != spec.j {
            *a = Complex64::new(0.0, 0.0);
        } else {
            mass.add(a.norm_sqr());
        }
    }
    if mass.value() < EXPLICIT_DIM_MASS * fj {
        return Err(Error::DimensionTooSmall { dim, reason: "less than 1 - 1e-12 of the sector norm fits" });
    }
    let scale = 1.0 / fj.sqrt();
    FockVector::new(raw.into_iter().enumerate().map(|(n, a)| a * phase.factor(n) * scale).collect())
}

/// `Σ_l e^{-2πijl/k} |z e^{2πil/k}⟩`, unnormalized.
fn dft_sum(params: &ModelParams, z: Complex64, k: usize, j: usize, dim: usize) -> Result<FockVector> {
    let mut out = FockVector::zeros(dim);
    for l in 0..k {
        let zl = z * root_of_unity(l as i64, k);
        let v = hcs(&CoherentLabel::new(zl, params.clone()), Some(dim))?;
        out = out.add_scaled(root_of_unity(-((j * l) as i64), k), &v);
    }
    Ok(out)
}

/// Kitten as the Fourier transform of the rotated coherent states.
pub fn kitten_dft(spec: &KittenSpec, dim: Option<usize>) -> Result<FockVector> {
    spec.validate()?;
    let x = spec.x();
    let f = norm_series(&spec.params, x)?;
    let fj = kitten_norm(&spec.params, spec.k, spec.j, x)?;
    let lambda = spec.k as f64 * fj / f;
    if lambda.is_nan() || lambda < DEGENERATE_LAMBDA {
        return Err(Error::DegenerateSector { j: spec.j, lambda });
    }
    let dim = kitten_dim(spec, fj, dim)?;
    let sum = dft_sum(&spec.params, spec.z, spec.k, spec.j, dim)?;
    Ok(sum.scaled(Complex64::new((f / fj).sqrt() / spec.k as f64, 0.0)))
}

/// Gram matrix of the `k` rotated coherent states and its eigenvalues.
#[derive(Debug, Clone, PartialEq)]
pub struct GramData {
    pub k: usize,
    /// Row-major `k × k`, `G_{jl} = ⟨z ω^j | z ω^l⟩ = C_{l−j}`.
    pub entries: Vec<Complex64>,
    /// `λ_j = Σ_l e^{-2πijl/k} C_l`.
    pub eigenvalues: Vec<f64>,
}

impl GramData {
    pub fn entry(&self, j: usize, l: usize) -> Complex64 {
        self.entries[j * self.k + l]
    }
}

pub fn gram(params: &ModelParams, k: usize, z: Complex64) -> Result<GramData> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive"));
    }
    let x = z.norm_sqr();
    params.check_domain(x)?;
    let f = norm_series(params, x)?;
    let row: Vec<Complex64> =
        (0..k).map(|m| Ok(norm_series_complex(params, root_of_unity(m as i64, k) * x)? / f)).collect::<Result<_>>()?;
    let mut entries = Vec::with_capacity(k * k);
    for j in 0..k {
        for l in 0..k {
            entries.push(row[(l + k - j) % k]);
        }
    }
    let eigenvalues = (0..k)
        .map(|j| {
            let s: Complex64 = (0..k).map(|l| root_of_unity(-((j * l) as i64), k) * row[l]).sum();
            s.re
        })
        .collect();
    Ok(GramData { k, entries, eigenvalues })
}

/// `⟨z;k,j|z′;k,l⟩ = δ_{jl} F^j(z̄ z′) / sqrt(F^j(|z|²) F^j(|z′|²))`.
pub fn kitten_overlap(a: &KittenSpec, b: &KittenSpec) -> Result<Complex64> {
    if a.params != b.params || a.k != b.k {
        return Err(Error::Mismatch);
    }
    a.validate()?;
    b.validate()?;
    if a.j != b.j {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let p = &a.params;
    let fa = kitten_norm(p, a.k, a.j, a.x())?;
    let fb = kitten_norm(p, b.k, b.j, b.x())?;
    if fa == 0.0 || fb == 0.0 {
        // a kitten at z = 0 is a bare number state
        let va = kitten_fock(a, None)?;
        let vb = kitten_fock(b, None)?;
        return Ok(va.inner(&vb));
    }
    Ok(kitten_norm_complex(p, a.k, a.j, a.z.conj() * b.z)? / (fa * fb).sqrt())
}

/// `|n⟩` from `Q` equally spaced coherent states on the circle of radius `r`
/// (trapezoid rule for `sqrt(F ρ(n)) r^{-n} (1/2π) ∮ e^{-inθ} |r e^{iθ}⟩ dθ`).
///
/// The family's phase convention is divided out, so the target is `|n⟩`.
/// The error is the aliased sector `n + Q, n + 2Q, …`.
pub fn circle_number_state_continuous(
    params: &ModelParams,
    n: usize,
    r: f64,
    qpts: Option<usize>,
    dim: Option<usize>,
) -> Result<FockVector> {
    if r.is_nan() || r < 0.0 || (r == 0.0 && n > 0) {
        return Err(Error::Precondition("the circle needs r > 0"));
    }
    params.check_index(n)?;
    let x = r * r;
    params.check_domain(x)?;
    let q = qpts.unwrap_or((8 * (n + 1)).max(64)).max(1);
    let f = norm_series(params, x)?;
    let dim = match dim {
        Some(d) => d.max(n + 1),
        None => crate::states::auto_dim(params, x)?.max(n + 1),
    };
    let mut out = FockVector::zeros(dim);
    for l in 0..q {
        let zl = root_of_unity(l as i64, q) * r;
        let v = hcs(&CoherentLabel::new(zl, params.clone()), Some(dim))?;
        out = out.add_scaled(root_of_unity(-((n * l) as i64), q), &v);
    }
    let pref = (f * hyperfunc::rho(params, n)?).sqrt() / (r.powi(n as i32) * q as f64);
    Ok(out.scaled(params.phase().factor(n).conj() * pref))
}

/// Exact finite circle representation of `|n⟩` for a truncated family:
/// the `k = N + 1` kitten built from `N + 1` coherent states of radius `r`.
pub fn circle_number_state_discrete(params: &ModelParams, n: usize, r: f64) -> Result<FockVector> {
    let Some(top) = params.trunc() else {
        return Err(Error::Precondition("the discrete circle needs a truncated family"));
    };
    params.check_index(n)?;
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Precondition("the circle needs r > 0"));
    }
    let k = top + 1;
    let x = r * r;
    let f = norm_series(params, x)?;
    let fn_ = kitten_norm(params, k, n, x)?;
    // Component m of the superposition is ⟨m|r⟩ Σ_l ω^{l(m−n)}; the root sums
    // are formed in double-double since ⟨0|r⟩/⟨n|r⟩ can reach 1e17.
    let h = hcs(&CoherentLabel::new(Complex64::new(r, 0.0), params.clone()), Some(k))?;
    let sums = dd::root_sums(k, (0..k as i64).map(|m| m - n as i64));
    let pref = params.phase().factor(n).conj() * (f / fn_).sqrt() / k as f64;
    let amp = h.amplitudes().iter().zip(&sums).map(|(a, s)| a * s * pref).collect();
    FockVector::new(amp)
}

/// `|⟨n|v⟩| / ‖v‖`.
pub fn number_state_fidelity(v: &FockVector, n: usize) -> f64 {
    v.get(n).norm() / v.norm()
}
