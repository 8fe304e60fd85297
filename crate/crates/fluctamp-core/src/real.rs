//! Double-double scalar for the phase-space engine.
//!
//! Heralded branch probabilities come out of sums of O(1) polynomial moments
//! that cancel down to the probability itself, so plain `f64` loses every
//! digit once a click probability drops to ~1e-14. A value here is the
//! unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`, giving ~32 digits.
//! Algorithms follow the usual error-free transformations (two-sum, FMA
//! two-product) with Newton-corrected division and square root.

use core::cmp::Ordering;
use core::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Real {
    hi: f64,
    lo: f64,
}

#[cfg(feature = "std")]
#[inline(always)]
fn fma(a: f64, b: f64, c: f64) -> f64 {
    a.mul_add(b, c)
}

#[cfg(not(feature = "std"))]
#[inline(always)]
fn fma(a: f64, b: f64, c: f64) -> f64 {
    libm::fma(a, b, c)
}

#[inline(always)]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline(always)]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline(always)]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, fma(a, b, -p))
}

impl Real {
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub const fn from_parts(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn abs(&self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -*self
        } else {
            *self
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 { ZERO } else { Self::from_f64(f64::NAN) };
        }
        if !self.hi.is_finite() {
            return self;
        }
        let x = 1.0 / libm::sqrt(self.hi);
        let ax = self.hi * x;
        let (p, e) = two_prod(ax, ax);
        let diff = self - Self { hi: p, lo: e };
        let s = Self::from_f64(ax) + Self::from_f64(diff.hi * x * 0.5);
        s + (self - s * s) / (s * 2.0)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return ZERO;
        }
        if self.hi == 0.0 && self.lo == 0.0 {
            return ONE;
        }
        // exp(x) = 2^k · (1 + s)^(2^9), s = expm1(r / 2^9), r = x − k ln 2
        let k = libm::round(self.hi / LN_2.hi);
        let r = (self - LN_2 * k) * (1.0 / 512.0);
        let mut term = r;
        let mut s = r;
        let mut n = 1.0;
        loop {
            n += 1.0;
            term = term * r / n;
            s += term;
            if term.hi.abs() <= 1e-34 * s.hi.abs().max(1e-300) || n > 30.0 {
                break;
            }
        }
        for _ in 0..9 {
            s = s * 2.0 + s * s;
        }
        let y = s + ONE;
        let scale = k as i32;
        Self { hi: libm::scalbn(y.hi, scale), lo: libm::scalbn(y.lo, scale) }
    }

    pub fn powi(self, n: i32) -> Self {
        if n == 0 {
            return ONE;
        }
        let mut base = self;
        let mut e = n.unsigned_abs();
        let mut acc = ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        if n < 0 {
            ONE / acc
        } else {
            acc
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Self::from_f64(x)
    }
}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            ord => ord,
        }
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Real {
    type Output = Real;
    #[inline]
    fn add(self, b: Real) -> Real {
        let (s1, s2) = two_sum(self.hi, b.hi);
        let (t1, t2) = two_sum(self.lo, b.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Real { hi, lo }
    }
}

impl Sub for Real {
    type Output = Real;
    #[inline]
    fn sub(self, b: Real) -> Real {
        self + (-b)
    }
}

impl Mul for Real {
    type Output = Real;
    #[inline]
    fn mul(self, b: Real) -> Real {
        let (p1, p2) = two_prod(self.hi, b.hi);
        let p2 = p2 + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p1, p2);
        Real { hi, lo }
    }
}

impl Mul<f64> for Real {
    type Output = Real;
    #[inline]
    fn mul(self, b: f64) -> Real {
        let (p1, p2) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p1, p2 + self.lo * b);
        Real { hi, lo }
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, b: Real) -> Real {
        let q1 = self.hi / b.hi;
        let r = self - b * q1;
        let q2 = r.hi / b.hi;
        let r = r - b * q2;
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Real { hi, lo } + Real::from_f64(q3)
    }
}

impl Div<f64> for Real {
    type Output = Real;
    fn div(self, b: f64) -> Real {
        self / Real::from_f64(b)
    }
}

impl AddAssign for Real {
    fn add_assign(&mut self, b: Real) {
        *self = *self + b;
    }
}

impl SubAssign for Real {
    fn sub_assign(&mut self, b: Real) {
        *self = *self - b;
    }
}

impl MulAssign for Real {
    fn mul_assign(&mut self, b: Real) {
        *self = *self * b;
    }
}

impl DivAssign for Real {
    fn div_assign(&mut self, b: Real) {
        *self = *self / b;
    }
}

#[inline]
pub(crate) fn real(x: f64) -> Real {
    Real::from_f64(x)
}

#[inline]
pub(crate) fn to_f64(x: Real) -> f64 {
    x.hi + x.lo
}

pub(crate) const ZERO: Real = Real::from_f64(0.0);
pub(crate) const ONE: Real = Real::from_f64(1.0);
const LN_2: Real = Real::from_parts(core::f64::consts::LN_2, 2.3190468138462996e-17);
const PI: Real = Real::from_parts(core::f64::consts::PI, 1.2246467991473532e-16);
const SQRT_2: Real = Real::from_parts(core::f64::consts::SQRT_2, -9.667293313452913e-17);

pub(crate) fn pi() -> Real {
    PI
}

pub(crate) fn sqrt2() -> Real {
    SQRT_2
}

/// √(1 − r²) to double-double accuracy, so that r² + t² = 1 to ~1e-32.
pub(crate) fn transmissivity(r: f64) -> Real {
    let r = real(r);
    (ONE - r * r).sqrt()
}
