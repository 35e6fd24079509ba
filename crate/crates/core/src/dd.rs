//! Double-double complex arithmetic, for sums of roots of unity whose
//! cancellation has to survive amplification by large amplitude ratios.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::kittens::root_of_unity;

#[derive(Debug, Clone, Copy, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn split(a: f64) -> (f64, f64) {
    let t = 134_217_729.0 * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    fn from(a: f64) -> Dd {
        Dd { hi: a, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let r = quick_two_sum(s, e + t);
        quick_two_sum(r.hi, r.lo + f)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        quick_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct DdComplex {
    re: Dd,
    im: Dd,
}

impl DdComplex {
    const ZERO: DdComplex = DdComplex { re: Dd::ZERO, im: Dd::ZERO };

    fn from(z: Complex64) -> DdComplex {
        DdComplex { re: Dd::from(z.re), im: Dd::from(z.im) }
    }

    fn add(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, o: DdComplex) -> DdComplex {
        DdComplex { re: self.re.mul(o.re).add(self.im.mul(o.im).neg()), im: self.re.mul(o.im).add(self.im.mul(o.re)) }
    }

    fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

/// `ω^0, …, ω^{k−1}` for `ω = e^{2πi/k}`, accurate to about `k·1e-32`.
fn roots(k: usize) -> Vec<DdComplex> {
    // Newton on z^k = 1, starting from the double-precision root
    let mut w = DdComplex::from(root_of_unity(1, k));
    for _ in 0..2 {
        let mut p = DdComplex::from(Complex64::new(1.0, 0.0));
        for _ in 0..k {
            p = p.mul(w);
        }
        let d = Complex64::new(p.re.add(Dd::from(-1.0)).value(), p.im.value());
        let c = w.value() * d / k as f64;
        w = w.add(DdComplex::from(-c));
    }
    let mut out = Vec::with_capacity(k);
    let mut p = DdComplex::from(Complex64::new(1.0, 0.0));
    for _ in 0..k {
        out.push(p);
        p = p.mul(w);
    }
    out
}

/// `Σ_{l<k} e^{2πi d l/k}` for every `d` in `ds`.
pub(crate) fn root_sums(k: usize, ds: impl IntoIterator<Item = i64>) -> Vec<Complex64> {
    let pw = roots(k);
    let kk = k as i64;
    ds.into_iter()
        .map(|d| {
            let d = d.rem_euclid(kk);
            let mut s = DdComplex::ZERO;
            for l in 0..kk {
                s = s.add(pw[((l * d) % kk) as usize]);
            }
            s.value()
        })
        .collect()
}
