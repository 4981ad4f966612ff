//! Minimal double-double arithmetic (value + error term, ~31 significant
//! digits).
//!
//! Two computations in this crate subtract numbers that agree to many
//! digits: the spectral sum behind the Q-function evaluated far above the
//! inner spectrum, and polynomial coefficient expansion with mixed signs.
//! Carrying the rounding error of each step explicitly keeps those results
//! correctly rounded in f64 without pulling in an arbitrary-precision
//! dependency. Only the handful of operations actually used are provided.

use num_complex::Complex64;

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

/// Error-free sum of two f64 (Knuth's TwoSum).
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// Error-free sum assuming |a| >= |b| or a == 0.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Error-free product via fused multiply-add.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let s2 = s2 + t1;
        let (s1, s2) = quick_two_sum(s1, s2);
        let s2 = s2 + t2;
        let (hi, lo) = quick_two_sum(s1, s2);
        Dd { hi, lo }
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn mul_f64(self, a: f64) -> Dd {
        let (p, e) = two_prod(self.hi, a);
        let e = e + self.lo * a;
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r = r.sub(o.mul_f64(q2));
        let q3 = r.hi / o.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e }.add(Dd::from_f64(q3))
    }
}

/// Complex number with double-double components.
#[derive(Clone, Copy, Debug)]
pub(crate) struct DdC {
    pub re: Dd,
    pub im: Dd,
}

impl DdC {
    pub const ZERO: DdC = DdC { re: Dd::ZERO, im: Dd::ZERO };

    #[inline]
    pub fn from_c64(z: Complex64) -> DdC {
        DdC { re: Dd::from_f64(z.re), im: Dd::from_f64(z.im) }
    }

    #[inline]
    pub fn from_f64(x: f64) -> DdC {
        DdC { re: Dd::from_f64(x), im: Dd::ZERO }
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    #[inline]
    pub fn conj(self) -> DdC {
        DdC { re: self.re, im: self.im.neg() }
    }

    #[inline]
    pub fn add(self, o: DdC) -> DdC {
        DdC { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    #[inline]
    pub fn mul(self, o: DdC) -> DdC {
        DdC {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    /// Scale by a real double-double.
    #[inline]
    pub fn scale(self, a: Dd) -> DdC {
        DdC { re: self.re.mul(a), im: self.im.mul(a) }
    }

    #[inline]
    pub fn div(self, o: DdC) -> DdC {
        let den = o.re.mul(o.re).add(o.im.mul(o.im));
        let num = self.mul(o.conj());
        DdC { re: num.re.div(den), im: num.im.div(den) }
    }
}
