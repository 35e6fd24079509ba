//! Resolution of the identity through the moment problem
//! `∫₀ᴿ ω(x) xⁿ dx = ρ(n)`, for families whose weight is elementary.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::hyperfunc::{self, kitten_norm, ModelParams};
use crate::kittens::KittenSpec;
use crate::quadrature::GaussLegendre;
use crate::states::Preset;
use crate::stats::photon_pdf;
use crate::{Error, Result};

/// Gauss–Legendre nodes used by the moment integrals.
pub const DEFAULT_NODES: usize = 200;
/// Highest moment checked by default.
pub const DEFAULT_MAX_N: usize = 20;
/// Residual a registered weight has to beat.
pub const MOMENT_TOL: f64 = 1e-8;
/// A control residual below this would mean the check cannot tell weights apart.
pub const CONTROL_TOL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Support {
    /// `[0, 1]`
    Unit,
    /// `[0, ∞)`
    HalfLine,
}

impl Support {
    pub fn radius(self) -> f64 {
        match self {
            Support::Unit => 1.0,
            Support::HalfLine => f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    /// `e^{-x}`
    Exponential,
    /// `(2s − 1)(1 − x)^{2s−2}`
    Beta { two_s: f64 },
    /// `2 e^{-2√x}`, a `K_{1/2}` Bessel weight
    SqrtExponential,
    /// `1`
    Flat,
}

impl Density {
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Density::Exponential => (-x).exp(),
            Density::Beta { two_s } => (two_s - 1.0) * (1.0 - x).powf(two_s - 2.0),
            Density::SqrtExponential => 2.0 * (-2.0 * x.sqrt()).exp(),
            Density::Flat => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    pub family: String,
    pub params: ModelParams,
    pub support: Support,
    pub density: Density,
    pub note: &'static str,
}

fn spec(p: Preset, support: Support, density: Density, note: &'static str) -> WeightSpec {
    WeightSpec { family: p.name, params: p.params, support, density, note }
}

/// Weights with a closed form, each checked against `ρ(n)`.
pub fn registered_weights() -> Vec<WeightSpec> {
    let mut v = alloc::vec![spec(Preset::canonical(), Support::HalfLine, Density::Exponential, "Gamma integral")];
    for s in [1.0, 1.5, 2.0, 3.0] {
        let mut w = spec(
            Preset::perelomov_su11(s).expect("positive spin"),
            Support::Unit,
            Density::Beta { two_s: 2.0 * s },
            "Beta integral n!/(2s)_n",
        );
        w.family = alloc::format!("perelomov-su11:s={s}");
        v.push(w);
    }
    let mut w = spec(
        Preset::barut_girardello_su11(0.75).expect("positive spin"),
        Support::HalfLine,
        Density::SqrtExponential,
        "K_{1/2} case of the Bessel weight, moments (2n+1)!/4^n",
    );
    w.family = String::from("bg-su11:s=0.75");
    v.push(w);
    v
}

/// Flat weight on `[0, 1]` offered for SG; its moments are `1/(n+1) ≠ 1`.
pub fn negative_control() -> WeightSpec {
    spec(Preset::susskind_glogower(), Support::Unit, Density::Flat, "deliberately wrong: flat weight for SG")
}

/// Families known to lack a registered elementary weight.
pub fn unregistered_families() -> Vec<Preset> {
    alloc::vec![Preset::dual_susskind_glogower()]
}

/// `∫ ω(x) g(x) dx` over the support.
pub fn integrate(w: &WeightSpec, mut g: impl FnMut(f64) -> f64) -> Result<f64> {
    let gl = GaussLegendre::new(DEFAULT_NODES);
    let v = match (w.support, w.density) {
        (Support::Unit, d) => gl.integrate(0.0, 1.0, |x| d.eval(x) * g(x)),
        // x = v², v = u/(1−u): keeps the e^{-2√x} tail smooth in u
        (Support::HalfLine, Density::SqrtExponential) => gl.integrate(0.0, 1.0, |u| {
            let v = u / (1.0 - u);
            let x = v * v;
            2.0 * v / ((1.0 - u) * (1.0 - u)) * w.density.eval(x) * g(x)
        }),
        (Support::HalfLine, d) => gl.integrate(0.0, 1.0, |u| {
            let x = u / (1.0 - u);
            d.eval(x) * g(x) / ((1.0 - u) * (1.0 - u))
        }),
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Divergent)
    }
}

/// `|∫ ω xⁿ − ρ(n)| / ρ(n)`.
pub fn moment_residual(w: &WeightSpec, n: usize) -> Result<f64> {
    let rho = hyperfunc::rho(&w.params, n)?;
    let m = integrate(w, |x| x.powi(n as i32))?;
    Ok((m - rho).abs() / rho)
}

/// `ω(x) F^j(x)`, the weight of sector `j`.
pub fn kitten_weight(w: &WeightSpec, params: &ModelParams, k: usize, j: usize, x: f64) -> Result<f64> {
    if params != &w.params {
        return Err(Error::Mismatch);
    }
    Ok(w.density.eval(x) * kitten_norm(params, k, j, x)?)
}

/// `⟨m| Σ_j ∫ ω_{kj} |z;k,j⟩⟨z;k,j| |m⟩`, which must be 1.
pub fn closure_diagonal(w: &WeightSpec, k: usize, m: usize) -> Result<f64> {
    let j = m % k;
    let mut err = None;
    let v = integrate(w, |x| {
        if x == 0.0 {
            return if m == 0 { 1.0 } else { 0.0 };
        }
        // far tail: ω has underflowed while F^j would overflow
        if w.density.eval(x) < 1e-280 {
            return 0.0;
        }
        let s = KittenSpec::new(k, j, Complex64::new(x.sqrt(), 0.0), w.params.clone());
        match kitten_weight(w, &w.params, k, j, x).and_then(|kw| Ok(kw / w.density.eval(x) * photon_pdf(&s, m)?)) {
            Ok(v) => v,
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Verified,
    Failed,
    /// Negative control failing as it should.
    ExpectedFail,
    /// Negative control passing: the harness is broken.
    UnexpectedPass,
    NoWeight,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Verified => "verified",
            Status::Failed => "failed",
            Status::ExpectedFail => "expected-fail",
            Status::UnexpectedPass => "unexpected-pass",
            Status::NoWeight => "no weight registered",
        }
    }

    pub fn is_ok(self) -> bool {
        matches!(self, Status::Verified | Status::ExpectedFail | Status::NoWeight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityRow {
    pub family: String,
    pub n: Option<usize>,
    pub residual: Option<f64>,
    pub status: Status,
}

/// Moment checks of every registered weight, the unregistered families and
/// the negative control.
pub fn identity_report(max_n: usize) -> Vec<IdentityRow> {
    let mut rows = Vec::new();
    for w in registered_weights() {
        for n in 0..=max_n {
            let r = moment_residual(&w, n);
            let status = match r {
                Ok(r) if r < MOMENT_TOL => Status::Verified,
                _ => Status::Failed,
            };
            rows.push(IdentityRow { family: w.family.clone(), n: Some(n), residual: r.ok(), status });
        }
    }
    for p in unregistered_families() {
        rows.push(IdentityRow { family: p.name, n: None, residual: None, status: Status::NoWeight });
    }
    let w = negative_control();
    let n = 7.min(max_n);
    let r = moment_residual(&w, n).ok();
    let status = match r {
        Some(r) if r < CONTROL_TOL => Status::UnexpectedPass,
        _ => Status::ExpectedFail,
    };
    rows.push(IdentityRow { family: alloc::format!("{} (flat control)", w.family), n: Some(n), residual: r, status });
    rows
}
