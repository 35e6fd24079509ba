//! Hypergeometric coherent states in the Fock basis.
//!
//! `|z; α, β⟩ = 𝒩(|z|²)^{-1/2} Σ zⁿ phase(n) / sqrt(ρ(n)) |n⟩`, the eigenstates
//! of the deformed annihilation operator `â_f = â f(n̂)`.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::fock::FockVector;
use crate::hyperfunc::{self, norm_series, norm_series_complex, ModelParams, PhaseRule};
use crate::sum::Neumaier;
use crate::{Error, Result};

/// Tail mass left out by the automatic dimension, relative to the norm.
pub const AUTO_DIM_TAIL: f64 = 1e-24;
/// Fraction of the norm an explicit dimension has to hold.
pub const EXPLICIT_DIM_MASS: f64 = 1.0 - 1e-12;

/// A point `z` of the coherent-state manifold of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentLabel {
    pub z: Complex64,
    pub params: ModelParams,
}

impl CoherentLabel {
    pub fn new(z: Complex64, params: ModelParams) -> Self {
        CoherentLabel { z, params }
    }

    /// `x = |z|²`.
    pub fn x(&self) -> f64 {
        self.z.norm_sqr()
    }
}

/// A named family from the catalogue.
#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: String,
    pub params: ModelParams,
}

/// Names accepted by [`Preset::lookup`]; the ones marked with `s` need a spin.
pub const PRESET_NAMES: &[&str] = &[
    "canonical",
    "perelomov-su11 (s)",
    "bg-su11 (s)",
    "sg",
    "dual-sg",
    "inverse-bosonic",
    "dual-inverse-bosonic",
    "hydrogen",
    "gp-su2 (s)",
    "bg-su2 (s)",
];

impl Preset {
    fn make(name: &str, alpha: &[f64], beta: &[f64], phase: PhaseRule) -> Result<Preset> {
        Ok(Preset { name: name.into(), params: ModelParams::new(alpha, beta)?.with_phase(phase) })
    }

    pub fn canonical() -> Preset {
        Preset { name: "canonical".into(), params: ModelParams::canonical() }
    }

    /// `α = 2s`, disk domain.
    pub fn perelomov_su11(s: f64) -> Result<Preset> {
        positive_spin(s)?;
        Self::make("perelomov-su11", &[2.0 * s], &[], PhaseRule::One)
    }

    /// `β = 2s`, whole plane.
    pub fn barut_girardello_su11(s: f64) -> Result<Preset> {
        positive_spin(s)?;
        Self::make("bg-su11", &[], &[2.0 * s], PhaseRule::One)
    }

    /// Susskind–Glogower, `f(n) = 1/sqrt(n)`.
    pub fn susskind_glogower() -> Preset {
        Self::make("sg", &[1.0], &[], PhaseRule::One).expect("valid")
    }

    pub fn dual_susskind_glogower() -> Preset {
        Self::make("dual-sg", &[], &[1.0], PhaseRule::One).expect("valid")
    }

    /// `α = (1, 1)`: radius of convergence zero, states are ill-defined.
    pub fn inverse_bosonic() -> Preset {
        Self::make("inverse-bosonic", &[1.0, 1.0], &[], PhaseRule::One).expect("valid")
    }

    pub fn dual_inverse_bosonic() -> Preset {
        Self::make("dual-inverse-bosonic", &[], &[1.0, 1.0], PhaseRule::One).expect("valid")
    }

    /// `f(n) = sqrt(n+2)/(n+1)`, spectrum `1 − 1/(n+1)²`.
    pub fn hydrogen() -> Preset {
        Self::make("hydrogen", &[2.0, 2.0], &[3.0], PhaseRule::One).expect("valid")
    }

    /// Spin-s Gilmore–Perelomov states, `α = −2s`, amplitudes `binom(2s,n)^{1/2} (iz)ⁿ`.
    pub fn gilmore_perelomov_su2(s: f64) -> Result<Preset> {
        su2_spin(s)?;
        Self::make("gp-su2", &[-2.0 * s], &[], PhaseRule::IPow)
    }

    /// The "almost" eigenstates, `β = −2s`, amplitudes `binom(2s,n)^{-1/2} (iz)ⁿ/n!`.
    pub fn barut_girardello_su2(s: f64) -> Result<Preset> {
        su2_spin(s)?;
        Self::make("bg-su2", &[], &[-2.0 * s], PhaseRule::IPow)
    }

    /// Confluent `₁F₁` family `(α; β)`.
    pub fn confluent(alpha: f64, beta: f64) -> Result<Preset> {
        Self::make("confluent", &[alpha], &[beta], PhaseRule::One)
    }

    pub fn lookup(name: &str, spin: Option<f64>) -> Result<Preset> {
        let need = || spin.ok_or(Error::Precondition("this preset needs a spin s"));
        match name {
            "canonical" => Ok(Self::canonical()),
            "perelomov-su11" => Self::perelomov_su11(need()?),
            "bg-su11" => Self::barut_girardello_su11(need()?),
            "sg" => Ok(Self::susskind_glogower()),
            "dual-sg" => Ok(Self::dual_susskind_glogower()),
            "inverse-bosonic" => Ok(Self::inverse_bosonic()),
            "dual-inverse-bosonic" => Ok(Self::dual_inverse_bosonic()),
            "hydrogen" => Ok(Self::hydrogen()),
            "gp-su2" => Self::gilmore_perelomov_su2(need()?),
            "bg-su2" => Self::barut_girardello_su2(need()?),
            _ => Err(Error::Precondition("unknown preset")),
        }
    }
}

fn positive_spin(s: f64) -> Result<()> {
    if s.is_finite() && s > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { value: s, reason: "spin must be positive" })
    }
}

fn su2_spin(s: f64) -> Result<()> {
    positive_spin(s)?;
    if (2.0 * s).fract() != 0.0 {
        return Err(Error::InvalidParameter { value: s, reason: "SU(2) spin must be a half-integer" });
    }
    Ok(())
}

/// Smallest dimension whose neglected tail is below `1e-24` of the norm
/// (`N + 1` for truncated families).
pub fn auto_dim(params: &ModelParams, x: f64) -> Result<usize> {
    if let Some(n) = params.trunc() {
        return Ok(n + 1);
    }
    let norm = hyperfunc::pfq(params, x)?;
    let c = params.coeffs();
    // ratios approach x when p = q + 1 and 0 otherwise
    let limit = if params.p() == params.q() + 1 { x } else { 0.0 };
    let cap = hyperfunc::max_terms();
    let mut t = 1.0;
    for n in 0..cap {
        let r1 = x * c.ratio(n + 1)?;
        let r2 = x * c.ratio(n + 2)?;
        let next = t * r1;
        let rhat = r1.max(r2).max(limit);
        if rhat < 1.0 && next / (1.0 - rhat) < AUTO_DIM_TAIL * norm {
            return Ok(n + 1);
        }
        t = next;
    }
    Err(Error::NotConverged { terms: cap })
}

/// Unnormalized amplitudes `zⁿ/sqrt(ρ(n))` for `n < dim` (zero past `N`).
pub(crate) fn raw_amplitudes(params: &ModelParams, z: Complex64, dim: usize) -> Result<Vec<Complex64>> {
    let c = params.coeffs();
    let top = params.trunc().map_or(dim, |n| dim.min(n + 1));
    let mut out = Vec::with_capacity(dim);
    let mut a = Complex64::new(1.0, 0.0);
    for n in 0..dim {
        if n >= top {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        if n > 0 {
            a *= z * c.ratio(n)?.sqrt();
        }
        out.push(a);
    }
    Ok(out)
}

/// Coherent state `|z; α, β⟩`; `dim = None` picks the dimension automatically.
pub fn hcs(label: &CoherentLabel, dim: Option<usize>) -> Result<FockVector> {
    let params = &label.params;
    let x = label.x();
    params.check_domain(x)?;
    let norm = norm_series(params, x)?;
    let dim = match dim {
        Some(d) => d.max(1),
        None => auto_dim(params, x)?,
    };
    let raw = raw_amplitudes(params, label.z, dim)?;
    let mut mass = Neumaier::default();
    for a in &raw {
        mass.add(a.norm_sqr());
    }
    if mass.value() < EXPLICIT_DIM_MASS * norm {
        return Err(Error::DimensionTooSmall { dim, reason: "less than 1 - 1e-12 of the norm fits" });
    }
    let scale = 1.0 / norm.sqrt();
    let phase = params.phase();
    FockVector::new(raw.into_iter().enumerate().map(|(n, a)| a * phase.factor(n) * scale).collect())
}

/// `⟨a|b⟩ = 𝒩(z̄ z′) / sqrt(𝒩(|z|²) 𝒩(|z′|²))`.
pub fn overlap(a: &CoherentLabel, b: &CoherentLabel) -> Result<Complex64> {
    if a.params != b.params {
        return Err(Error::Mismatch);
    }
    let p = &a.params;
    let na = norm_series(p, a.x())?;
    let nb = norm_series(p, b.x())?;
    Ok(norm_series_complex(p, a.z.conj() * b.z)? / (na * nb).sqrt())
}

/// `(p, α) ↔ (q, β)`, i.e. `f → 1/f`. The phase rule is kept.
pub fn dual(params: &ModelParams) -> ModelParams {
    ModelParams::new(params.beta(), params.alpha()).expect("same entries, still valid").with_phase(params.phase())
}

/// `f(n)` with the phase step of the family, `|f(n)| phase(n−1)/phase(n)`.
pub fn f_complex(params: &ModelParams, n: usize) -> Result<Complex64> {
    Ok(params.phase().step() * hyperfunc::f_factor(params, n)?)
}

/// `â_f`: `amp′_n = sqrt(n+1) f(n+1) amp_{n+1}`; not renormalized.
pub fn annihilate_f(params: &ModelParams, state: &FockVector) -> Result<FockVector> {
    let amp = state.amplitudes();
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); amp.len()];
    for n in 0..amp.len() - 1 {
        let a = amp[n + 1];
        if a == Complex64::new(0.0, 0.0) {
            continue;
        }
        out[n] = ((n + 1) as f64).sqrt() * f_complex(params, n + 1)? * a;
    }
    FockVector::new(out)
}

/// `â_f†`: `amp′_{n+1} = sqrt(n+1) conj(f(n+1)) amp_n`, in the same dimension.
///
/// A nonzero top amplitude would be pushed out of the space and is reported
/// as [`Error::TopOfSpace`]. Truncated families use the operator truncated to
/// `0..=N`, so weight on `|N⟩` is simply dropped there.
pub fn create_f(params: &ModelParams, state: &FockVector) -> Result<FockVector> {
    let amp = state.amplitudes();
    let dim = amp.len();
    let top = params.trunc().map_or(dim - 1, |n| n.min(dim - 1));
    let zero = Complex64::new(0.0, 0.0);
    if params.trunc().is_none() && amp[dim - 1] != zero {
        return Err(Error::TopOfSpace);
    }
    let mut out = alloc::vec![zero; dim];
    for n in 0..top {
        if amp[n] == zero {
            continue;
        }
        out[n + 1] = ((n + 1) as f64).sqrt() * f_complex(params, n + 1)?.conj() * amp[n];
    }
    if params.trunc().is_some() && amp[top + 1..].iter().any(|a| *a != zero) {
        return Err(Error::BeyondTruncation { n: top + 1, trunc: top });
    }
    FockVector::new(out)
}

/// How far a truncated state is from being an eigenstate of `â_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenResidual {
    /// `‖â_f|z⟩ − z|z⟩‖`, computed in the Fock basis.
    pub residual: f64,
    /// `𝒩^{-1} |z|^{2(N+1)} / ρ(N)`, the exact value of `residual²`.
    pub closed_form_sq: f64,
    /// `|z|^{2(N+1)} / (N!)^{q−p+1}`.
    pub bound: f64,
}

pub fn eigen_residual(label: &CoherentLabel, k_power: usize) -> Result<EigenResidual> {
    if k_power != 1 {
        return Err(Error::Precondition("the residual bound covers only the first power of a_f"));
    }
    let params = &label.params;
    let Some(n) = params.trunc() else {
        return Err(Error::Precondition("eigen_residual needs a truncated family"));
    };
    let (p, q) = (params.p(), params.q());
    let x = label.x();
    if !(q + 1 > p || (q + 1 == p && x < 1.0)) {
        return Err(Error::Precondition("needs q > p - 1, or q = p - 1 with |z| < 1"));
    }
    let state = hcs(label, Some(n + 1))?;
    let diff = annihilate_f(params, &state)?.add_scaled(-label.z, &state);
    let norm = norm_series(params, x)?;
    let x_top = x.powi(n as i32 + 1);
    let closed_form_sq = x_top / (norm * hyperfunc::rho(params, n)?);
    let n_fact = hyperfunc::pochhammer(1.0, n);
    let bound = x_top / n_fact.powi((q + 1 - p) as i32);
    Ok(EigenResidual { residual: diff.norm(), closed_form_sq, bound })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperfunc::pfq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn label(z: Complex64, p: &Preset) -> CoherentLabel {
        CoherentLabel::new(z, p.params.clone())
    }

    #[test]
    fn vacuum_at_origin() {
        let v = hcs(&label(c(0.0, 0.0), &Preset::canonical()), None).unwrap();
        assert_eq!(v, FockVector::basis(1, 0));
    }

    #[test]
    fn perelomov_half_is_geometric() {
        let p = Preset::perelomov_su11(0.5).unwrap();
        assert_eq!(p.params, Preset::susskind_glogower().params);
        let v = hcs(&label(c(0.6, 0.0), &p), None).unwrap();
        for (n, a) in v.amplitudes().iter().enumerate() {
            let exact = (1.0f64 - 0.36).sqrt() * 0.6f64.powi(n as i32);
            assert!((a - exact).norm() < 1e-15);
        }
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gilmore_perelomov_su2_amplitudes() {
        let p = Preset::gilmore_perelomov_su2(1.0).unwrap();
        let z = c(0.5, 0.0);
        let v = hcs(&label(z, &p), None).unwrap();
        assert_eq!(v.dim(), 3);
        for (n, b) in [1.0f64, 2.0, 1.0].into_iter().enumerate() {
            let exact = b.sqrt() * (c(0.0, 1.0) * z).powi(n as i32) / (1.0 + 0.25);
            assert!((v.get(n) - exact).norm() < 1e-15, "n = {n}");
        }
    }

    #[test]
    fn auto_dim_and_explicit_dim() {
        let l = label(c(2.0, 0.0), &Preset::canonical());
        let v = hcs(&l, None).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-14);
        assert!(matches!(hcs(&l, Some(5)), Err(Error::DimensionTooSmall { .. })));
        assert!(hcs(&l, Some(v.dim() + 10)).is_ok());
        let inv = label(c(0.1, 0.0), &Preset::inverse_bosonic());
        assert!(matches!(hcs(&inv, None), Err(Error::IllDefined { .. })));
    }

    #[test]
    fn overlaps() {
        let can = Preset::canonical();
        let a = label(c(1.0, 0.0), &can);
        let b = label(c(0.0, 1.0), &can);
        assert!((overlap(&a, &a).unwrap() - 1.0).norm() < 1e-15);
        let o = overlap(&a, &b).unwrap();
        assert!((o.norm() - (-1.0f64).exp()).abs() < 1e-15);
        let fock = hcs(&a, Some(60)).unwrap().inner(&hcs(&b, Some(60)).unwrap());
        assert!((fock - o).norm() < 1e-14);
        let sg = Preset::susskind_glogower();
        let o = overlap(&label(c(0.5, 0.0), &sg), &label(c(0.25, 0.0), &sg)).unwrap();
        let exact = 0.75f64.sqrt() * 0.9375f64.sqrt() / (1.0 - 0.125);
        assert!((o - exact).norm() < 1e-15);
        assert_eq!(overlap(&a, &label(c(0.1, 0.0), &sg)), Err(Error::Mismatch));
    }

    #[test]
    fn duality() {
        let can = ModelParams::canonical();
        assert_eq!(dual(&can), can);
        assert_eq!(dual(&Preset::susskind_glogower().params), Preset::dual_susskind_glogower().params);
        let h = Preset::hydrogen().params;
        assert_eq!(dual(&dual(&h)), h);
    }

    #[test]
    fn ladder_on_number_states() {
        let can = ModelParams::canonical();
        assert_eq!(annihilate_f(&can, &FockVector::basis(3, 1)).unwrap(), FockVector::basis(3, 0));
        assert_eq!(create_f(&can, &FockVector::basis(3, 0)).unwrap(), FockVector::basis(3, 1));
        let sg = Preset::susskind_glogower().params;
        for n in 1..6 {
            let down = annihilate_f(&sg, &FockVector::basis(8, n)).unwrap();
            assert!(down.distance(&FockVector::basis(8, n - 1)) < 1e-15);
            let up = create_f(&sg, &FockVector::basis(8, n)).unwrap();
            assert!(up.distance(&FockVector::basis(8, n + 1)) < 1e-15);
        }
        assert_eq!(create_f(&can, &FockVector::basis(3, 2)), Err(Error::TopOfSpace));
    }

    #[test]
    fn barut_girardello_eigenstates() {
        for p in [Preset::canonical(), Preset::barut_girardello_su11(1.5).unwrap(), Preset::hydrogen()] {
            let l = label(c(0.4, -0.5), &p);
            let v = hcs(&l, None).unwrap().resized(hcs(&l, None).unwrap().dim() + 1);
            let r = annihilate_f(&p.params, &v).unwrap().add_scaled(-l.z, &v).norm();
            assert!(r < 1e-10, "{}: {r}", p.name);
        }
    }

    #[test]
    fn residual_examples() {
        let bg = Preset::barut_girardello_su2(2.0).unwrap();
        let r = eigen_residual(&label(c(0.5, 0.0), &bg), 1).unwrap();
        assert!(r.residual * r.residual < 0.5f64.powi(10) / 576.0);
        assert!(r.residual * r.residual < r.bound);
        assert_eq!(eigen_residual(&label(c(0.0, 0.0), &bg), 1).unwrap().residual, 0.0);
        let gp = Preset::gilmore_perelomov_su2(3.0).unwrap();
        // q − p + 1 = 0 for GP, needs |z| < 1
        let r = eigen_residual(&label(c(0.3, 0.0), &gp), 1).unwrap();
        let sq = r.residual * r.residual;
        assert!(((sq - r.closed_form_sq) / r.closed_form_sq).abs() < 1e-12, "{sq} {}", r.closed_form_sq);
        assert!(eigen_residual(&label(c(1.2, 0.0), &gp), 1).is_err());
        assert!(eigen_residual(&label(c(0.3, 0.0), &gp), 2).is_err());
    }

    #[test]
    fn normalization_matches_series() {
        let p = Preset::perelomov_su11(1.0).unwrap();
        let l = label(c(0.3, 0.4), &p);
        let v = hcs(&l, None).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-13);
        assert!((pfq(&p.params, 0.25).unwrap() - 1.0 / 0.75f64.powi(2)).abs() < 1e-13);
    }
}
