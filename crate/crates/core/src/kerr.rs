//! Coherent states in a Kerr medium: `|n⟩ → e^{-iΩt n^κ} |n⟩`.
//!
//! At `t = τ/k` (`τ = 2π/Ω`, `κ = 2`) the phases `e^{-2πi n²/k}` only depend
//! on `n mod k`, and the state splits into kittens or, equivalently, into
//! coherent states on the circle `|z₀ e^{2πil/k}⟩`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::fock::FockVector;
use crate::hyperfunc::{self, convergence_domain, kitten_norm, norm_series, norm_series_complex, ModelParams};
use crate::kittens::{kitten_fock, root_of_unity, KittenSpec};
use crate::quadrature::GaussLegendre;
use crate::states::{hcs, CoherentLabel};
use crate::{Error, Result};

/// Weights below this count as absent in the circle decomposition.
pub const WEIGHT_EPS: f64 = 1e-12;

/// Evolution time, either an exact fraction `a/k` of the revival time or a
/// raw accumulated phase rate `Ωt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KerrTime {
    Fraction { a: i64, k: u64 },
    OmegaT(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KerrParams {
    pub time: KerrTime,
    pub kappa: u32,
}

impl KerrParams {
    /// `t = (a/k) τ`.
    pub fn fraction(a: i64, k: u64, kappa: u32) -> Result<Self> {
        if k == 0 || kappa == 0 {
            return Err(Error::Precondition("need k >= 1 and kappa >= 1"));
        }
        Ok(KerrParams { time: KerrTime::Fraction { a, k }, kappa })
    }

    pub fn omega_t(omega_t: f64, kappa: u32) -> Result<Self> {
        if kappa == 0 || !omega_t.is_finite() {
            return Err(Error::Precondition("need finite Ωt and kappa >= 1"));
        }
        Ok(KerrParams { time: KerrTime::OmegaT(omega_t), kappa })
    }

    /// `Ωt`.
    pub fn phase_rate(&self) -> f64 {
        match self.time {
            KerrTime::Fraction { a, k } => 2.0 * PI * a as f64 / k as f64,
            KerrTime::OmegaT(w) => w,
        }
    }

    /// `e^{-iφ_n}`; exact modular arithmetic for fractional times.
    pub fn phase(&self, n: usize) -> Complex64 {
        match self.time {
            KerrTime::Fraction { a, k } => {
                let k128 = k as i128;
                let mut pow = 1i128;
                let base = n as i128 % k128;
                for _ in 0..self.kappa {
                    pow = pow * base % k128;
                }
                let m = (a as i128).rem_euclid(k128) * pow % k128;
                root_of_unity(-(m as i64), k as usize)
            }
            KerrTime::OmegaT(w) => {
                let phi = w * (n as f64).powi(self.kappa as i32);
                Complex64::new(phi.cos(), -phi.sin())
            }
        }
    }
}

/// Applies the Kerr phases to an arbitrary state.
pub fn kerr_apply(state: &FockVector, kp: &KerrParams) -> FockVector {
    let amp = state.amplitudes().iter().enumerate().map(|(n, a)| a * kp.phase(n)).collect();
    FockVector::new(amp).expect("same dimension")
}

pub fn kerr_evolve(label: &CoherentLabel, kp: &KerrParams, dim: Option<usize>) -> Result<FockVector> {
    Ok(kerr_apply(&hcs(label, dim)?, kp))
}

/// Coefficients `c_j = sqrt(F^j/F) e^{-2πij²/k}` of the state at `τ/k` on the kittens.
pub fn kitten_decomposition(label: &CoherentLabel, k: usize) -> Result<Vec<Complex64>> {
    let x = label.x();
    label.params.check_domain(x)?;
    let f = norm_series(&label.params, x)?;
    (0..k)
        .map(|j| {
            let fj = kitten_norm(&label.params, k, j, x)?;
            Ok(root_of_unity(-((j * j) as i64), k) * (fj / f).sqrt())
        })
        .collect()
}

/// `Σ_j c_j |z₀; k, j⟩` in dimension `dim`.
pub fn reconstruct_from_kittens(label: &CoherentLabel, k: usize, dim: usize) -> Result<FockVector> {
    let c = kitten_decomposition(label, k)?;
    let mut out = FockVector::zeros(dim);
    for (j, cj) in c.iter().enumerate() {
        if cj.norm() == 0.0 {
            continue;
        }
        let v = kitten_fock(&KittenSpec::new(k, j, label.z, label.params.clone()), Some(dim))?;
        out = out.add_scaled(*cj, &v);
    }
    Ok(out)
}

/// `w_l = (1/k) Σ_j e^{-2πij(j+l)/k}`, the weights on `|z₀ e^{2πil/k}⟩`.
pub fn circle_weights(k: usize) -> Vec<Complex64> {
    (0..k)
        .map(|l| {
            let s: Complex64 = (0..k).map(|j| root_of_unity(-((j * (j + l)) as i64), k)).sum();
            s / k as f64
        })
        .collect()
}

/// Circle form of the state at `τ/k` for a given label (same weights for all labels).
pub fn circle_superposition_form(label: &CoherentLabel, k: usize) -> Result<Vec<Complex64>> {
    label.params.check_domain(label.x())?;
    Ok(circle_weights(k))
}

/// `Σ_l w_l |z₀ e^{2πil/k}⟩` in dimension `dim`.
pub fn reconstruct_from_circle(label: &CoherentLabel, k: usize, dim: usize) -> Result<FockVector> {
    let mut out = FockVector::zeros(dim);
    for (l, w) in circle_weights(k).iter().enumerate() {
        if w.norm() < WEIGHT_EPS {
            continue;
        }
        let zl = label.z * root_of_unity(l as i64, k);
        out = out.add_scaled(*w, &hcs(&CoherentLabel::new(zl, label.params.clone()), Some(dim))?);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    Odd,
    Mult4,
    EvenNot4,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentLayout {
    /// Number of coherent components on the circle.
    pub m: usize,
    /// Angle of the first component relative to `arg z₀`.
    pub rotation_offset: f64,
    pub case_tag: CaseTag,
}

pub fn component_layout(k: usize) -> ComponentLayout {
    if k % 2 == 1 {
        ComponentLayout { m: k, rotation_offset: 0.0, case_tag: CaseTag::Odd }
    } else if k.is_multiple_of(4) {
        ComponentLayout { m: k / 2, rotation_offset: 0.0, case_tag: CaseTag::Mult4 }
    } else {
        ComponentLayout { m: k / 2, rotation_offset: 2.0 * PI / k as f64, case_tag: CaseTag::EvenNot4 }
    }
}

/// Component centres `z₀ e^{i(2πl/m + offset)}`.
pub fn predicted_centers(z0: Complex64, k: usize) -> Vec<Complex64> {
    let lay = component_layout(k);
    (0..lay.m)
        .map(|l| {
            let t = 2.0 * PI * l as f64 / lay.m as f64 + lay.rotation_offset;
            z0 * Complex64::new(t.cos(), t.sin())
        })
        .collect()
}

/// Rectangular window of the complex plane sampled on an `nx × ny` lattice
/// that includes the edges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// `281 × 281` points over `|x|, |y| ≤ 3.5`.
    pub fn default_window() -> Self {
        GridSpec { x_min: -3.5, x_max: 3.5, y_min: -3.5, y_max: 3.5, nx: 281, ny: 281 }
    }

    pub fn point(&self, ix: usize, iy: usize) -> Complex64 {
        let step = |lo: f64, hi: f64, n: usize, i: usize| {
            if n <= 1 {
                lo
            } else {
                lo + (hi - lo) * i as f64 / (n - 1) as f64
            }
        };
        Complex64::new(step(self.x_min, self.x_max, self.nx, ix), step(self.y_min, self.y_max, self.ny, iy))
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / (self.nx.max(2) - 1) as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / (self.ny.max(2) - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Row-major: `index = iy * nx + ix`.
    pub fn coords(&self, index: usize) -> (usize, usize) {
        (index % self.nx, index / self.nx)
    }
}

/// Husimi function values; `None` marks cells outside the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub spec: GridSpec,
    pub values: Vec<Option<f64>>,
    /// Largest |closed form − Fock route| over the spot-checked cells.
    pub spot_check: Option<f64>,
}

impl HusimiGrid {
    pub fn get(&self, ix: usize, iy: usize) -> Option<f64> {
        self.values[iy * self.spec.nx + ix]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().fold(0.0, |a, &b| a.max(b))
    }

    /// 8-neighbour strict maxima above `frac · max`, largest first.
    pub fn local_maxima(&self, frac: f64) -> Vec<(usize, usize, f64)> {
        let (nx, ny) = (self.spec.nx, self.spec.ny);
        let thr = frac * self.max();
        let mut out = Vec::new();
        for iy in 0..ny {
            for ix in 0..nx {
                let Some(v) = self.get(ix, iy) else { continue };
                if v <= thr {
                    continue;
                }
                let mut is_max = true;
                'nb: for dy in -1i64..=1 {
                    for dx in -1i64..=1 {
                        if dx == 0 && dy == 0 {
                            continue;
                        }
                        let (jx, jy) = (ix as i64 + dx, iy as i64 + dy);
                        if jx < 0 || jy < 0 || jx >= nx as i64 || jy >= ny as i64 {
                            continue;
                        }
                        if self.get(jx as usize, jy as usize).is_some_and(|w| w >= v) {
                            is_max = false;
                            break 'nb;
                        }
                    }
                }
                if is_max {
                    out.push((ix, iy, v));
                }
            }
        }
        out.sort_by(|a, b| b.2.total_cmp(&a.2));
        out
    }
}

/// Evaluates `Q(z) = |⟨z|ψ⟩|²` through the Fock expansion of `ψ`.
#[derive(Debug, Clone)]
pub struct FockHusimi {
    params: ModelParams,
    /// `conj(phase(n)) ψ_n / sqrt(ρ(n))`.
    coeffs: Vec<Complex64>,
    edge: f64,
}

impl FockHusimi {
    pub fn new(state: &FockVector, params: &ModelParams) -> Result<Self> {
        let c = params.coeffs();
        let phase = params.phase();
        let mut inv_sqrt_rho = 1.0;
        let mut coeffs = Vec::with_capacity(state.dim());
        for (n, a) in state.amplitudes().iter().enumerate() {
            if n > 0 {
                inv_sqrt_rho *= if params.trunc().is_some_and(|t| n > t) { 0.0 } else { c.ratio(n)?.sqrt() };
            }
            coeffs.push(phase.factor(n).conj() * a * inv_sqrt_rho);
        }
        Ok(FockHusimi { params: params.clone(), coeffs, edge: convergence_domain(params).edge() })
    }

    pub fn value(&self, z: Complex64) -> Option<f64> {
        let x = z.norm_sqr();
        if x > self.edge {
            return None;
        }
        let f = norm_series(&self.params, x).ok()?;
        let w = z.conj();
        let s = self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * w + c);
        Some(s.norm_sqr() / f)
    }
}

/// Closed-form Husimi function of the Kerr state at `τ/k`:
/// `⟨z|ψ⟩ = Σ_l w_l 𝒩(z̄ z₀ e^{2πil/k}) / sqrt(𝒩(|z|²) 𝒩(|z₀|²))`.
#[derive(Debug, Clone)]
pub struct KerrHusimi {
    params: ModelParams,
    terms: Vec<(Complex64, Complex64)>,
    norm0: f64,
    edge: f64,
    fock: FockHusimi,
}

impl KerrHusimi {
    pub fn new(label: &CoherentLabel, k: usize) -> Result<Self> {
        let x0 = label.x();
        label.params.check_domain(x0)?;
        let norm0 = norm_series(&label.params, x0)?;
        let terms = circle_weights(k)
            .into_iter()
            .enumerate()
            .filter(|(_, w)| w.norm() >= WEIGHT_EPS)
            .map(|(l, w)| (w, label.z * root_of_unity(l as i64, k)))
            .collect();
        let kp = KerrParams::fraction(1, k as u64, 2)?;
        let state = kerr_evolve(label, &kp, None)?;
        let fock = FockHusimi::new(&state, &label.params)?;
        Ok(KerrHusimi { params: label.params.clone(), terms, norm0, edge: convergence_domain(&label.params).edge(), fock })
    }

    pub fn value(&self, z: Complex64) -> Option<f64> {
        let x = z.norm_sqr();
        if x > self.edge {
            return None;
        }
        let f = norm_series(&self.params, x).ok()?;
        let mut s = Complex64::new(0.0, 0.0);
        for (w, zl) in &self.terms {
            s += w * norm_series_complex(&self.params, z.conj() * zl).ok()?;
        }
        Some(s.norm_sqr() / (f * self.norm0))
    }

    pub fn fock_value(&self, z: Complex64) -> Option<f64> {
        self.fock.value(z)
    }
}

/// Cells whose index is a multiple of this are cross-checked (1%).
pub const SPOT_CHECK_STRIDE: usize = 100;

/// Husimi grid of an arbitrary state (Fock route).
pub fn husimi(state: &FockVector, params: &ModelParams, spec: &GridSpec) -> Result<HusimiGrid> {
    let h = FockHusimi::new(state, params)?;
    let values = (0..spec.len()).map(|i| {
        let (ix, iy) = spec.coords(i);
        h.value(spec.point(ix, iy))
    });
    Ok(HusimiGrid { spec: *spec, values: values.collect(), spot_check: None })
}

/// Value and optional spot-check deviation of one cell of [`husimi_kerr`].
pub fn kerr_cell(h: &KerrHusimi, spec: &GridSpec, index: usize) -> (Option<f64>, Option<f64>) {
    let (ix, iy) = spec.coords(index);
    let z = spec.point(ix, iy);
    let v = h.value(z);
    let dev = if index.is_multiple_of(SPOT_CHECK_STRIDE) {
        match (v, h.fock_value(z)) {
            (Some(a), Some(b)) => Some((a - b).abs()),
            _ => None,
        }
    } else {
        None
    };
    (v, dev)
}

/// Assembles a grid from per-cell results (in index order).
pub fn assemble(spec: &GridSpec, cells: impl IntoIterator<Item = (Option<f64>, Option<f64>)>) -> HusimiGrid {
    let mut values = Vec::with_capacity(spec.len());
    let mut spot: Option<f64> = None;
    for (v, d) in cells {
        values.push(v);
        if let Some(d) = d {
            spot = Some(spot.map_or(d, |s| s.max(d)));
        }
    }
    HusimiGrid { spec: *spec, values, spot_check: spot }
}

/// Husimi grid of the Kerr state at `τ/k` by the closed-form overlaps,
/// spot-checked against the Fock route on 1% of the cells.
pub fn husimi_kerr(label: &CoherentLabel, k: usize, spec: &GridSpec) -> Result<HusimiGrid> {
    let h = KerrHusimi::new(label, k)?;
    Ok(assemble(spec, (0..spec.len()).map(|i| kerr_cell(&h, spec, i))))
}

/// Width of the marginal `f(x) ∝ ₁F₁(α; β; x²)^{-1/2}` on the real line:
/// `σ² = ∫ x² f / ∫ f`.
pub fn width_sigma(alpha: f64, beta: f64) -> Result<f64> {
    let params = ModelParams::new(&[alpha], &[beta])?;
    if params.is_truncated() {
        return Err(Error::Precondition("width_sigma needs positive parameters"));
    }
    let gl = GaussLegendre::new(40);
    let (mut n0, mut n2) = (0.0, 0.0);
    let g = |x: f64| hyperfunc::pfq(&params, x * x).map(|v| 1.0 / v.sqrt());
    for i in 0..10_000usize {
        let (a, b) = (i as f64, i as f64 + 1.0);
        let mut p0 = 0.0;
        let mut p2 = 0.0;
        for (t, w) in gl.nodes().iter().zip(gl.weights()) {
            let x = 0.5 * (a + b) + 0.5 * t;
            let v = g(x)?;
            p0 += 0.5 * w * v;
            p2 += 0.5 * w * x * x * v;
        }
        n0 += p0;
        n2 += p2;
        if i >= 2 && p0 < 1e-12 * n0 && p2 < 1e-12 * n2 {
            return Ok((n2 / n0).sqrt());
        }
    }
    Err(Error::Divergent)
}

/// `floor(2πr / 3σ)`, at least one.
pub fn max_distinguishable(r: f64, sigma: f64) -> usize {
    let m = (2.0 * PI * r / (3.0 * sigma)).floor();
    if m.is_finite() && m >= 1.0 {
        m as usize
    } else {
        1
    }
}
