//! Photon-number statistics of coherent states and kittens.
//!
//! Ratios such as `F^{j+k-1}/F^j` are `0/0` at `x = 0`, so everything is
//! evaluated from normalized sector series
//! `S(n0, w) = Σ_{n ≡ n0 (mod k), n ≥ n0} w(n) t_n / t_{n0}` together with the
//! exact leading ratios `t_b/t_a`.

use num_complex::Complex64;

use crate::hyperfunc::{self, sector_series, term_ratio, ModelParams};
use crate::kittens::KittenSpec;
use crate::{Error, Result};

/// `|𝒬|` below this is reported as Poissonian.
pub const POISSON_DEADBAND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    Sub,
    Poisson,
    Super,
}

impl Classification {
    pub fn of(q: f64) -> Self {
        if q.abs() < POISSON_DEADBAND {
            Classification::Poisson
        } else if q < 0.0 {
            Classification::Sub
        } else {
            Classification::Super
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Sub => "sub",
            Classification::Poisson => "poisson",
            Classification::Super => "super",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatReport {
    pub mean_n: f64,
    pub std_n: f64,
    pub mandel_q: f64,
    pub fano: f64,
    pub classification: Classification,
}

impl StatReport {
    fn new(mean: f64, q: f64) -> Self {
        StatReport {
            mean_n: mean,
            std_n: (mean * (q + 1.0)).max(0.0).sqrt(),
            mandel_q: q,
            fano: q + 1.0,
            classification: Classification::of(q),
        }
    }
}

fn check(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<()> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::OutOfDomain { x, radius: f64::NAN });
    }
    KittenSpec::new(k, j, Complex64::new(x.sqrt(), 0.0), params.clone()).validate()
}

/// First `n ≥ min` with `n ≡ j (mod k)`.
fn sector_start(j: usize, k: usize, min: usize) -> usize {
    if min <= j {
        j
    } else {
        j + (min - j).div_ceil(k) * k
    }
}

fn beyond(params: &ModelParams, n: usize) -> bool {
    params.trunc().is_some_and(|t| n > t)
}

fn s(params: &ModelParams, x: f64, k: usize, n0: usize, w: impl FnMut(usize) -> f64) -> Result<f64> {
    sector_series(params.coeffs(), x, k, n0, params.limit(), w)
}

fn t(params: &ModelParams, x: f64, a: usize, b: usize) -> Result<f64> {
    term_ratio(params.coeffs(), x, a, b)
}

/// `|⟨m|z;k,j⟩|² = δ_{j, m mod k} x^m/ρ(m) / F^j`.
pub fn photon_pdf(spec: &KittenSpec, m: usize) -> Result<f64> {
    spec.validate()?;
    let (p, k, j, x) = (&spec.params, spec.k, spec.j, spec.x());
    if m % k != j || m < j || beyond(p, m) {
        return Ok(0.0);
    }
    Ok(t(p, x, j, m)? / s(p, x, k, j, |_| 1.0)?)
}

/// `(⟨n⟩, ⟨n(n−1)⟩/⟨n⟩)`; the ratio is `None` when the sector is just `|0⟩`.
fn moments(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<(f64, Option<f64>)> {
    check(params, k, j, x)?;
    let n0 = sector_start(j, k, 1);
    if beyond(params, n0) {
        return Ok((0.0, None));
    }
    let base = s(params, x, k, j, |_| 1.0)?;
    let d1 = s(params, x, k, n0, |n| n as f64)?;
    let mean = t(params, x, j, n0)? * d1 / base;
    let n1 = sector_start(j, k, 2);
    let ratio = if beyond(params, n1) {
        0.0
    } else {
        let d2 = s(params, x, k, n1, |n| (n * (n - 1)) as f64)?;
        t(params, x, n0, n1)? * d2 / d1
    };
    Ok((mean, Some(ratio)))
}

/// `⟨n̂⟩` of the kitten `(k, j)` at `x = |z|²`.
pub fn mean_n(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<f64> {
    Ok(moments(params, k, j, x)?.0)
}

/// `σ_n̂ = sqrt(⟨n̂²⟩ − ⟨n̂⟩²)`.
pub fn std_n(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<f64> {
    let (mean, ratio) = moments(params, k, j, x)?;
    Ok(match ratio {
        Some(r) => (mean * (r - mean + 1.0)).max(0.0).sqrt(),
        None => 0.0,
    })
}

/// Mean, spread and Mandel parameter `𝒬 = ⟨n(n−1)⟩/⟨n⟩ − ⟨n⟩` of n̂.
pub fn mandel(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<StatReport> {
    let (mean, ratio) = moments(params, k, j, x)?;
    let r = ratio.ok_or(Error::Precondition("the vacuum-only sector has no Mandel parameter"))?;
    Ok(StatReport::new(mean, r - mean))
}

/// `g(i) = x F^{i−1}/F^i`, indices mod `k`.
fn g(params: &ModelParams, k: usize, i: usize, x: f64) -> Result<f64> {
    let si = s(params, x, k, i, |_| 1.0)?;
    if i >= 1 {
        let c = params.coeffs().ratio(i)?;
        if c == 0.0 {
            return Err(Error::Pole { n: i });
        }
        Ok(s(params, x, k, i - 1, |_| 1.0)? / (c * si))
    } else {
        let prev = s(params, x, k, k - 1, |_| 1.0)?;
        Ok(x * t(params, x, 0, k - 1)? * prev / si)
    }
}

/// Statistics of the deformed number operator `n̂_f = â_f† â_f` (`k ≥ 3`):
/// `⟨n̂_f⟩ = x F^{j−1}/F^j`, `𝒬_f = x(F^{j−2}/F^{j−1} − F^{j−1}/F^j)`.
///
/// `𝒬_f` and `σ = sqrt(⟨n̂_f⟩(𝒬_f + 1))` are the normally ordered ones,
/// built on `⟨â_f†² â_f²⟩ = x² F^{j−2}/F^j`.
pub fn mandel_nf(params: &ModelParams, k: usize, j: usize, x: f64) -> Result<StatReport> {
    if k < 3 {
        return Err(Error::Precondition("n_f statistics need k >= 3"));
    }
    check(params, k, j, x)?;
    let gj = g(params, k, j, x)?;
    let gprev = g(params, k, (j + k - 1) % k, x)?;
    Ok(StatReport::new(gj, gprev - gj))
}

/// Sign of `x² Π_k''/Π_k` up to a positive factor, `Π_k = Σ_{n<k} t_n / F`.
///
/// Written through the head `A` (`n < k`) and tail `B` (`n ≥ k`) sums so that
/// no two nearly equal quantities are subtracted at small `x`.
fn inflection_sign(params: &ModelParams, k: usize, x: f64) -> Result<f64> {
    let lim = params.limit().map_or(k - 1, |t| t.min(k - 1));
    let (mut sa, mut na, mut ma) = (0.0, 0.0, 0.0);
    let mut tn = 1.0;
    for n in 0..=lim {
        if n > 0 {
            tn *= x * params.coeffs().ratio(n)?;
        }
        sa += tn;
        na += n as f64 * tn;
        ma += (n * n.saturating_sub(1)) as f64 * tn;
    }
    if beyond(params, k) {
        return Ok(0.0);
    }
    let t0k = t(params, x, 0, k)?;
    let sb = s(params, x, 1, k, |_| 1.0)?;
    let nb = s(params, x, 1, k, |n| n as f64)?;
    let mb = s(params, x, 1, k, |n| (n * (n - 1)) as f64)?;
    let m1f = (na + t0k * nb) / (sa + t0k * sb);
    Ok(2.0 * m1f * (nb * sa - na * sb) - (mb * sa - ma * sb))
}

/// Inflection point `z_c` of `Π_k(x) = Σ_{n<k} xⁿ/ρ(n) / F(x)`.
pub fn critical_z(params: &ModelParams, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::Precondition("k must be positive"));
    }
    let dom = hyperfunc::convergence_domain(params);
    if dom.kind == hyperfunc::DomainKind::Empty {
        return Err(Error::IllDefined { p: params.p(), q: params.q() });
    }
    let edge = dom.edge();
    let lo = 1e-6;
    let grid: alloc::vec::Vec<f64> = if edge.is_finite() {
        let hi = edge * (1.0 - 1e-6);
        (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0).collect()
    } else {
        let mut v = alloc::vec::Vec::new();
        let mut x = lo;
        while x < 1e5 {
            v.push(x);
            x *= 1.01;
        }
        v
    };
    let mut prev: Option<(f64, f64)> = None;
    for &x in &grid {
        let Ok(sx) = inflection_sign(params, k, x) else { break };
        if let Some((xp, sp)) = prev {
            if sp < 0.0 && sx > 0.0 || sp > 0.0 && sx < 0.0 {
                return Ok(bisect(params, k, xp, x, sp)?.sqrt());
            }
        }
        if sx != 0.0 {
            prev = Some((x, sx));
        }
    }
    Err(Error::NoSignChange)
}

fn bisect(params: &ModelParams, k: usize, mut a: f64, mut b: f64, sa: f64) -> Result<f64> {
    while b - a > 1e-10 * b.max(1e-3) {
        let m = 0.5 * (a + b);
        let sm = inflection_sign(params, k, m)?;
        if sm == 0.0 {
            return Ok(m);
        }
        if (sm < 0.0) == (sa < 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::Preset;
    use std::vec::Vec;

    fn spec(p: &ModelParams, k: usize, j: usize, x: f64) -> KittenSpec {
        KittenSpec::new(k, j, Complex64::new(x.sqrt(), 0.0), p.clone())
    }

    /// Brute-force moments from the distribution itself.
    fn brute(p: &ModelParams, k: usize, j: usize, x: f64) -> (f64, f64) {
        let pdf: Vec<f64> = (0..3000).map(|m| photon_pdf(&spec(p, k, j, x), m).unwrap()).collect();
        let m1: f64 = pdf.iter().enumerate().map(|(m, v)| m as f64 * v).sum();
        let m2: f64 = pdf.iter().enumerate().map(|(m, v)| (m * m) as f64 * v).sum();
        (m1, (m2 - m1 * m1).sqrt())
    }

    #[test]
    fn pdf_examples() {
        let sg = Preset::susskind_glogower().params;
        let x: f64 = 0.4;
        for (k, j) in [(3, 0), (3, 2), (5, 1)] {
            assert!((photon_pdf(&spec(&sg, k, j, x), j).unwrap() - (1.0 - x.powi(k as i32))).abs() < 1e-15);
            let m = j + 2 * k;
            let v = (1.0 - x.powi(k as i32)) * x.powi(2 * k as i32);
            assert!((photon_pdf(&spec(&sg, k, j, x), m).unwrap() - v).abs() < 1e-15);
            assert_eq!(photon_pdf(&spec(&sg, k, j, x), j + 1).unwrap(), 0.0);
        }
        let can = ModelParams::canonical();
        let mut fact = 1.0;
        for m in 0..10 {
            if m > 0 {
                fact *= m as f64;
            }
            let poisson = (-2.0f64).exp() * 2.0f64.powi(m) / fact;
            assert!((photon_pdf(&spec(&can, 1, 0, 2.0), m as usize).unwrap() - poisson).abs() < 1e-15);
        }
    }

    #[test]
    fn means() {
        let can = ModelParams::canonical();
        assert!((mean_n(&can, 1, 0, 3.7).unwrap() - 3.7).abs() < 1e-14);
        assert!((mean_n(&can, 5, 3, 1e-9).unwrap() - 3.0).abs() < 1e-9);
        assert_eq!(mean_n(&can, 5, 3, 0.0).unwrap(), 3.0);
        let per = Preset::perelomov_su11(1.0).unwrap().params;
        assert!((mean_n(&per, 1, 0, 0.5).unwrap() - 2.0).abs() < 1e-13);
        // shift formula x F^{j+k-1}/F^j is exact for f ≡ 1
        let x = 2.3;
        for j in 0..4 {
            let shift = x * hyperfunc::kitten_norm(&can, 4, (j + 3) % 4, x).unwrap() / hyperfunc::kitten_norm(&can, 4, j, x).unwrap();
            assert!((mean_n(&can, 4, j, x).unwrap() - shift).abs() < 1e-13);
        }
    }

    #[test]
    fn spreads() {
        let can = ModelParams::canonical();
        assert!((std_n(&can, 1, 0, 2.5).unwrap() - 2.5f64.sqrt()).abs() < 1e-14);
        assert_eq!(std_n(&can, 4, 2, 0.0).unwrap(), 0.0);
        let conf = Preset::confluent(1.0, 3.0).unwrap().params;
        let (_, sd) = brute(&conf, 2, 1, 0.8);
        assert!((std_n(&conf, 2, 1, 0.8).unwrap() - sd).abs() < 1e-12);
    }

    #[test]
    fn mandel_limits() {
        let conf = Preset::confluent(1.0, 4.0).unwrap().params;
        assert!((mandel(&conf, 5, 0, 0.0).unwrap().mandel_q - 4.0).abs() < 1e-15);
        for j in 1..5 {
            assert!((mandel(&conf, 5, j, 0.0).unwrap().mandel_q + 1.0).abs() < 1e-15);
        }
        let eq = Preset::confluent(2.0, 2.0).unwrap().params;
        for x in [0.1, 1.0, 7.0] {
            let r = mandel(&eq, 1, 0, x).unwrap();
            assert_eq!(r.classification, Classification::Poisson, "{x}: {}", r.mandel_q);
        }
        let gp = Preset::gilmore_perelomov_su2(2.0).unwrap().params;
        assert!(mandel(&gp, 5, 0, 0.3).is_err());
    }

    #[test]
    fn deformed_number_statistics() {
        let can = ModelParams::canonical();
        for j in 0..3 {
            let a = mandel_nf(&can, 3, j, 1.7).unwrap();
            let b = mandel(&can, 3, j, 1.7).unwrap();
            assert!((a.mean_n - b.mean_n).abs() < 1e-13);
            assert!((a.mandel_q - b.mandel_q).abs() < 1e-12);
        }
        let bg = Preset::barut_girardello_su11(1.5).unwrap().params;
        let f1 = hyperfunc::f_factor(&bg, 1).unwrap();
        assert!((mandel_nf(&bg, 4, 1, 1e-12).unwrap().mean_n - f1 * f1).abs() < 1e-9);
        assert!(mandel_nf(&can, 2, 0, 1.0).is_err());
    }

    #[test]
    fn critical_points() {
        let can = ModelParams::canonical();
        // the inflection of e^{-x} Σ_{n<k} xⁿ/n! sits at x = k − 1
        for k in 2..6 {
            let zc = critical_z(&can, k).unwrap();
            assert!((zc * zc - (k - 1) as f64).abs() < 1e-8, "k = {k}: {}", zc * zc);
        }
        let per = Preset::perelomov_su11(3.0).unwrap().params;
        let zc = critical_z(&per, 5).unwrap();
        assert!((zc * zc - 4.0 / 9.0).abs() < 1e-8);
        assert!(matches!(critical_z(&can, 1), Err(Error::NoSignChange)));
    }
}
