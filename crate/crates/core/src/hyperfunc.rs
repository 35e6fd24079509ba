//! Pochhammer products, the weights `ρ(n)`, and generalized hypergeometric series.
//!
//! Every series here is summed through its term ratio
//!
//! ```text
//! t_n / t_{n-1} = x · Π(a_i + n - 1) / (n · Π(b_i + n - 1))
//! ```
//!
//! and stops once `|t_n| / Σ|t| < tol` holds for three consecutive terms.
//! Truncated families (some negative integer parameter) use absolute values of
//! the Pochhammer factors, so all their weights are positive.

use alloc::vec::Vec;
use core::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use num_complex::Complex64;

use crate::{Error, Result};

/// Default hard cap on the number of series terms.
pub const DEFAULT_MAX_TERMS: usize = 10_000;
/// Default relative tail tolerance of the termination rule.
pub const DEFAULT_TOLERANCE: f64 = 1e-15;
/// Margin kept from the unit circle for `p = q + 1` families with `η ≥ 0`.
pub const BOUNDARY_MARGIN: f64 = 1e-9;

const STREAK: usize = 3;
const LOG_SPACE_FROM: usize = 30;

static MAX_TERMS: AtomicUsize = AtomicUsize::new(DEFAULT_MAX_TERMS);
// 0 stands for the default
static TOLERANCE_BITS: AtomicU64 = AtomicU64::new(0);

/// Current cap on the number of series terms.
pub fn max_terms() -> usize {
    MAX_TERMS.load(Ordering::Relaxed)
}

/// Overrides the series term cap (process wide).
pub fn set_max_terms(n: usize) {
    MAX_TERMS.store(n.max(1), Ordering::Relaxed);
}

/// Current relative tolerance of the termination rule.
pub fn tolerance() -> f64 {
    match TOLERANCE_BITS.load(Ordering::Relaxed) {
        0 => DEFAULT_TOLERANCE,
        bits => f64::from_bits(bits),
    }
}

/// Overrides the termination tolerance (process wide). Non-positive or
/// non-finite values are ignored.
pub fn set_tolerance(tol: f64) {
    if tol.is_finite() && tol > 0.0 {
        TOLERANCE_BITS.store(tol.to_bits(), Ordering::Relaxed);
    }
}

/// Unit-modulus phase attached to the amplitude of `|n⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseRule {
    #[default]
    One,
    /// `iⁿ`, the convention of the SU(2) families.
    IPow,
    /// `(-1)ⁿ`.
    SignPow,
}

impl PhaseRule {
    pub fn factor(self, n: usize) -> Complex64 {
        match self {
            PhaseRule::One => Complex64::new(1.0, 0.0),
            PhaseRule::IPow => match n % 4 {
                0 => Complex64::new(1.0, 0.0),
                1 => Complex64::new(0.0, 1.0),
                2 => Complex64::new(-1.0, 0.0),
                _ => Complex64::new(0.0, -1.0),
            },
            PhaseRule::SignPow => Complex64::new(if n.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0),
        }
    }

    /// `phase(n-1) / phase(n)`, the factor the ladder operators pick up.
    pub fn step(self) -> Complex64 {
        match self {
            PhaseRule::One => Complex64::new(1.0, 0.0),
            PhaseRule::IPow => Complex64::new(0.0, -1.0),
            PhaseRule::SignPow => Complex64::new(-1.0, 0.0),
        }
    }
}

/// Parameters `(α; β)` of a hypergeometric family.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    alpha: Vec<f64>,
    beta: Vec<f64>,
    sign_count: usize,
    trunc: Option<usize>,
    phase: PhaseRule,
}

impl ModelParams {
    pub fn new(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        let mut sign_count = 0;
        let mut trunc: Option<usize> = None;
        for &v in alpha.iter().chain(beta) {
            if !v.is_finite() {
                return Err(Error::InvalidParameter { value: v, reason: "not finite" });
            }
            if v == 0.0 {
                return Err(Error::InvalidParameter { value: v, reason: "parameters must be nonzero" });
            }
            if v < 0.0 {
                if v.fract() != 0.0 {
                    return Err(Error::InvalidParameter { value: v, reason: "negative parameters must be negative integers" });
                }
                sign_count += 1;
                let m = (-v) as usize;
                trunc = Some(trunc.map_or(m, |t| t.max(m)));
            }
        }
        Ok(ModelParams { alpha: alpha.to_vec(), beta: beta.to_vec(), sign_count, trunc, phase: PhaseRule::One })
    }

    /// `p = q = 0`, `f ≡ 1`.
    pub fn canonical() -> Self {
        ModelParams::new(&[], &[]).expect("empty lists are valid")
    }

    pub fn with_phase(mut self, phase: PhaseRule) -> Self {
        self.phase = phase;
        self
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn p(&self) -> usize {
        self.alpha.len()
    }

    pub fn q(&self) -> usize {
        self.beta.len()
    }

    pub fn sign_count(&self) -> usize {
        self.sign_count
    }

    /// Truncation order `N`, present iff some parameter is negative.
    pub fn trunc(&self) -> Option<usize> {
        self.trunc
    }

    pub fn is_truncated(&self) -> bool {
        self.trunc.is_some()
    }

    pub fn phase(&self) -> PhaseRule {
        self.phase
    }

    /// `η = Σα − Σβ`.
    pub fn eta(&self) -> f64 {
        self.alpha.iter().sum::<f64>() - self.beta.iter().sum::<f64>()
    }

    pub(crate) fn coeffs(&self) -> Coeffs<'_> {
        Coeffs { upper: &self.alpha, lower: &self.beta, abs: self.is_truncated() }
    }

    /// Last admissible Fock index (`N` when truncated).
    pub(crate) fn limit(&self) -> Option<usize> {
        self.trunc
    }

    pub(crate) fn check_index(&self, n: usize) -> Result<()> {
        match self.trunc {
            Some(t) if n > t => Err(Error::BeyondTruncation { n, trunc: t }),
            _ => Ok(()),
        }
    }

    /// Rejects arguments with `|x|` outside the convergence domain.
    pub fn check_domain(&self, abs_x: f64) -> Result<()> {
        if self.is_truncated() {
            return if abs_x.is_finite() { Ok(()) } else { Err(Error::OutOfDomain { x: abs_x, radius: f64::INFINITY }) };
        }
        check_list_domain(self.p(), self.q(), self.eta(), abs_x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    WholePlane,
    UnitDisk,
    UnitDiskWithBoundary,
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceDomain {
    pub kind: DomainKind,
    pub eta: f64,
}

impl ConvergenceDomain {
    /// Largest admissible `|x|`.
    pub fn edge(&self) -> f64 {
        match self.kind {
            DomainKind::WholePlane => f64::INFINITY,
            DomainKind::UnitDisk => 1.0 - BOUNDARY_MARGIN,
            DomainKind::UnitDiskWithBoundary => 1.0,
            DomainKind::Empty => 0.0,
        }
    }
}

pub fn convergence_domain(params: &ModelParams) -> ConvergenceDomain {
    let eta = params.eta();
    if params.is_truncated() {
        return ConvergenceDomain { kind: DomainKind::WholePlane, eta };
    }
    ConvergenceDomain { kind: list_domain(params.p(), params.q(), eta), eta }
}

fn list_domain(p: usize, q: usize, eta: f64) -> DomainKind {
    if p < q + 1 {
        DomainKind::WholePlane
    } else if p > q + 1 {
        DomainKind::Empty
    } else if eta < 0.0 {
        DomainKind::UnitDiskWithBoundary
    } else {
        DomainKind::UnitDisk
    }
}

fn check_list_domain(p: usize, q: usize, eta: f64, abs_x: f64) -> Result<()> {
    let kind = list_domain(p, q, eta);
    if kind == DomainKind::Empty {
        return Err(Error::IllDefined { p, q });
    }
    let edge = ConvergenceDomain { kind, eta }.edge();
    if abs_x.is_nan() || abs_x > edge {
        return Err(Error::OutOfDomain { x: abs_x, radius: edge });
    }
    Ok(())
}

/// Rising factorial `(a)_n`, in log space for `n > 30`.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    if n <= LOG_SPACE_FROM {
        (0..n).map(|m| a + m as f64).product()
    } else {
        let (ln, sign) = ln_pochhammer(a, n);
        if sign == 0.0 {
            0.0
        } else {
            sign * ln.exp()
        }
    }
}

/// `(ln|(a)_n|, sign((a)_n))`; the sign is 0 when a factor vanishes.
pub fn ln_pochhammer(a: f64, n: usize) -> (f64, f64) {
    let mut ln = 0.0;
    let mut sign = 1.0;
    for m in 0..n {
        let v = a + m as f64;
        if v == 0.0 {
            return (f64::NEG_INFINITY, 0.0);
        }
        if v < 0.0 {
            sign = -sign;
        }
        ln += v.abs().ln();
    }
    (ln, sign)
}

/// `f(n) = sqrt(Π|β+n-1| / Π|α+n-1|)`.
pub fn f_factor(params: &ModelParams, n: usize) -> Result<f64> {
    params.check_index(n)?;
    let shift = n as f64 - 1.0;
    let num: f64 = params.beta.iter().map(|b| (b + shift).abs()).product();
    let den: f64 = params.alpha.iter().map(|a| (a + shift).abs()).product();
    if den == 0.0 {
        return Err(Error::Pole { n });
    }
    Ok((num / den).sqrt())
}

/// `ρ(n) = n! Π|(β)_n| / Π|(α)_n| = n! f(n)!²`.
pub fn rho(params: &ModelParams, n: usize) -> Result<f64> {
    params.check_index(n)?;
    let pole = || {
        // first m ≤ n where some factor vanishes
        (1..=n)
            .find(|&m| {
                let s = m as f64 - 1.0;
                params.alpha.iter().chain(&params.beta).any(|v| v + s == 0.0)
            })
            .unwrap_or(n)
    };
    if n <= LOG_SPACE_FROM {
        let mut r = pochhammer(1.0, n);
        for b in &params.beta {
            r *= pochhammer(*b, n).abs();
        }
        let mut den = 1.0;
        for a in &params.alpha {
            den *= pochhammer(*a, n).abs();
        }
        if r == 0.0 || den == 0.0 {
            return Err(Error::Pole { n: pole() });
        }
        Ok(r / den)
    } else {
        let mut ln = ln_pochhammer(1.0, n).0;
        for b in &params.beta {
            let (l, s) = ln_pochhammer(*b, n);
            if s == 0.0 {
                return Err(Error::Pole { n: pole() });
            }
            ln += l;
        }
        for a in &params.alpha {
            let (l, s) = ln_pochhammer(*a, n);
            if s == 0.0 {
                return Err(Error::Pole { n: pole() });
            }
            ln -= l;
        }
        Ok(ln.exp())
    }
}

/// `E_n = ω n f(n)²`.
pub fn energy_level(params: &ModelParams, omega: f64, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let f = f_factor(params, n)?;
    Ok(omega * n as f64 * f * f)
}

/// `Δ_i[a/b] = [a/b, (a+1)/b, …, (a+i-1)/b]`.
pub fn delta_list(a: f64, b: usize, i: usize) -> Vec<f64> {
    (0..i).map(|m| (a + m as f64) / b as f64).collect()
}

/// Upper/lower parameter lists of a series, seen through its term ratio.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Coeffs<'a> {
    pub upper: &'a [f64],
    pub lower: &'a [f64],
    pub abs: bool,
}

impl Coeffs<'_> {
    /// `Π(a+n-1) / (n Π(b+n-1))`, so that `t_n = t_{n-1} · x · ratio(n)`.
    pub fn ratio(&self, n: usize) -> Result<f64> {
        let s = n as f64 - 1.0;
        let mut num = 1.0;
        for a in self.upper {
            num *= a + s;
        }
        let mut den = n as f64;
        for b in self.lower {
            den *= b + s;
        }
        if den == 0.0 {
            return Err(Error::Pole { n });
        }
        let r = num / den;
        Ok(if self.abs { r.abs() } else { r })
    }
}

/// Tracks the "three small terms in a row" stopping rule.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Stopper {
    tol: f64,
    streak: usize,
}

impl Stopper {
    pub fn new() -> Self {
        Stopper { tol: tolerance(), streak: 0 }
    }

    /// Feeds one term; true once the series can stop.
    pub fn push(&mut self, term_abs: f64, sum_abs: f64) -> bool {
        if term_abs == 0.0 || term_abs <= self.tol * sum_abs {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        self.streak >= STREAK
    }
}

/// Normalized sector series `Σ_{n ≡ n0 (mod k), n ≥ n0} w(n) t_n / t_{n0}`.
///
/// Only sector terms enter the stopping rule. `limit` caps the index for
/// truncated families.
pub(crate) fn sector_series(
    c: Coeffs<'_>,
    x: f64,
    k: usize,
    n0: usize,
    limit: Option<usize>,
    mut w: impl FnMut(usize) -> f64,
) -> Result<f64> {
    let cap = max_terms();
    let mut ratio = 1.0; // t_n / t_{n0}
    let mut sum = w(n0);
    let mut abs_sum = sum.abs();
    let mut stop = Stopper::new();
    let mut n = n0;
    loop {
        if let Some(l) = limit {
            if n + k > l {
                return Ok(sum);
            }
        }
        for _ in 0..k {
            n += 1;
            ratio *= x * c.ratio(n)?;
        }
        if n > cap {
            return Err(Error::NotConverged { terms: cap });
        }
        let term = w(n) * ratio;
        sum += term;
        abs_sum += term.abs();
        if !abs_sum.is_finite() {
            return Err(Error::Overflow);
        }
        if stop.push(term.abs(), abs_sum) {
            return Ok(sum);
        }
    }
}

/// `t_b / t_a = Π_{m=a+1}^{b} x·ratio(m)` for `a ≤ b`.
pub(crate) fn term_ratio(c: Coeffs<'_>, x: f64, a: usize, b: usize) -> Result<f64> {
    let mut r = 1.0;
    for m in a + 1..=b {
        r *= x * c.ratio(m)?;
    }
    Ok(r)
}

/// Complex sector series `Σ_{n ≡ j (mod k)} w^n · ratio-products`, from `n = 0`.
fn complex_series(c: Coeffs<'_>, w: Complex64, k: usize, j: usize, limit: Option<usize>) -> Result<Complex64> {
    let cap = max_terms();
    let mut t = Complex64::new(1.0, 0.0);
    for m in 1..=j {
        t *= w * c.ratio(m)?;
    }
    if let Some(l) = limit {
        if j > l {
            return Ok(Complex64::new(0.0, 0.0));
        }
    }
    let mut sum = t;
    let mut abs_sum = t.norm();
    let mut stop = Stopper::new();
    let mut n = j;
    loop {
        if let Some(l) = limit {
            if n + k > l {
                return Ok(sum);
            }
        }
        for _ in 0..k {
            n += 1;
            t *= w * c.ratio(n)?;
        }
        if n > cap {
            return Err(Error::NotConverged { terms: cap });
        }
        sum += t;
        let a = t.norm();
        abs_sum += a;
        if !abs_sum.is_finite() {
            return Err(Error::Overflow);
        }
        if stop.push(a, abs_sum) {
            return Ok(sum);
        }
    }
}

/// `pFq(α; β; x) = Σ xⁿ/ρ(n)` for a family with positive parameters.
pub fn pfq(params: &ModelParams, x: f64) -> Result<f64> {
    if params.is_truncated() {
        return Err(Error::Precondition("pfq needs positive parameters; use pfq_truncated"));
    }
    params.check_domain(x.abs())?;
    sector_series(params.coeffs(), x, 1, 0, None, |_| 1.0)
}

/// Complex-argument series `Σ wⁿ/ρ(n)`.
pub fn pfq_complex(params: &ModelParams, w: Complex64) -> Result<Complex64> {
    if params.is_truncated() {
        return Err(Error::Precondition("pfq_complex needs positive parameters; use norm_series_complex"));
    }
    params.check_domain(w.norm())?;
    complex_series(params.coeffs(), w, 1, 0, None)
}

/// Finite sum `Σ_{n≤N} xⁿ/|ρ(n)|` of a truncated family.
pub fn pfq_truncated(params: &ModelParams, x: f64) -> Result<f64> {
    let Some(n) = params.trunc() else {
        return Err(Error::Precondition("pfq_truncated needs a truncated family"));
    };
    if !x.is_finite() {
        return Err(Error::OutOfDomain { x, radius: f64::INFINITY });
    }
    let c = params.coeffs();
    let mut t = 1.0;
    let mut sum = 1.0;
    for m in 1..=n {
        t *= x * c.ratio(m)?;
        sum += t;
    }
    Ok(sum)
}

/// Normalization `𝒩(x)` of either kind of family.
pub fn norm_series(params: &ModelParams, x: f64) -> Result<f64> {
    if params.is_truncated() {
        pfq_truncated(params, x)
    } else {
        pfq(params, x)
    }
}

/// Complex normalization series of either kind of family.
pub fn norm_series_complex(params: &ModelParams, w: Complex64) -> Result<Complex64> {
    kitten_norm_complex(params, 1, 0, w)
}

fn check_sector(params: &ModelParams, k: usize, j: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive"));
    }
    if j >= k {
        return Err(Error::Precondition("sector index j must lie in 0..k"));
    }
    if let Some(n) = params.trunc() {
        if (n + 1) % k != 0 {
            return Err(Error::SectorMismatch { k, trunc: n });
        }
    }
    Ok(())
}

pub(crate) fn validate_sector(params: &ModelParams, k: usize, j: usize) -> Result<()> {
    check_sector(params, k, j)
}

/// Sector normalization `F^j(x) = Σ_ν x^{νk+j}/ρ(νk+j)`.
pub fn kitten_norm(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<f64> {
    check_sector(params, k, j)?;
    params.check_domain(x.abs())?;
    let c = params.coeffs();
    let lead = term_ratio(c, x, 0, j)?;
    if lead == 0.0 {
        return Ok(0.0);
    }
    let s = sector_series(c, x, k, j, params.limit(), |_| 1.0)?;
    Ok(lead * s)
}

/// Sector normalization at a complex argument.
pub fn kitten_norm_complex(params: &ModelParams, k: usize, j: usize, w: Complex64) -> Result<Complex64> {
    check_sector(params, k, j)?;
    params.check_domain(w.norm())?;
    complex_series(params.coeffs(), w, k, j, params.limit())
}

/// Generalized hypergeometric series with arbitrary parameter lists.
pub fn hypergeometric(upper: &[f64], lower: &[f64], x: f64) -> Result<f64> {
    let eta = upper.iter().sum::<f64>() - lower.iter().sum::<f64>();
    check_list_domain(upper.len(), lower.len(), eta, x.abs())?;
    let c = Coeffs { upper, lower, abs: false };
    sector_series(c, x, 1, 0, None, |_| 1.0)
}

fn appendix_argument(params: &ModelParams, k: usize, x: f64) -> f64 {
    let e = params.p() as i32 - params.q() as i32 - 1;
    (x * (k as f64).powi(e)).powi(k as i32)
}

/// `F^j` rebuilt as one large hypergeometric function of `(x k^{p-q-1})^k`:
///
/// ```text
/// F^j = (α)_j/(β)_j · x^j/j! · F(Δ_k[(α+j)/k], 1; Δ_k[(β+j)/k], Δ_k[(j+1)/k]; y)
/// ```
pub fn kitten_norm_appendix(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<f64> {
    if params.is_truncated() {
        return Err(Error::Precondition("the rearranged series needs positive parameters"));
    }
    check_sector(params, k, j)?;
    params.check_domain(x.abs())?;
    let mut pre = x.powi(j as i32) / pochhammer(1.0, j);
    for a in params.alpha() {
        pre *= pochhammer(*a, j);
    }
    for b in params.beta() {
        pre /= pochhammer(*b, j);
    }
    let mut upper = Vec::new();
    for a in params.alpha() {
        upper.extend(delta_list(a + j as f64, k, k));
    }
    upper.push(1.0);
    let mut lower = Vec::new();
    for b in params.beta() {
        lower.extend(delta_list(b + j as f64, k, k));
    }
    lower.extend(delta_list(j as f64 + 1.0, k, k));
    Ok(pre * hypergeometric(&upper, &lower, appendix_argument(params, k, x))?)
}

/// The `j = 0` form, with the redundant `1` cancelled:
/// `F^0 = F(Δ_k[α/k]; Δ_k[β/k], Δ_{k-1}[1/k]; y)`.
pub fn kitten_norm_appendix_j0(params: &ModelParams, k: usize, x: f64) -> Result<f64> {
    if params.is_truncated() {
        return Err(Error::Precondition("the rearranged series needs positive parameters"));
    }
    check_sector(params, k, 0)?;
    params.check_domain(x.abs())?;
    let mut upper = Vec::new();
    for a in params.alpha() {
        upper.extend(delta_list(*a, k, k));
    }
    let mut lower = Vec::new();
    for b in params.beta() {
        lower.extend(delta_list(*b, k, k));
    }
    lower.extend(delta_list(1.0, k, k - 1));
    hypergeometric(&upper, &lower, appendix_argument(params, k, x))
}
