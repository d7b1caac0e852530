//! Closed f64 intervals with outward rounding.
//!
//! Logarithmic quantities (Weil functions, heights, twisted heights) are
//! carried as intervals so that inequality verdicts close to a threshold can
//! be reported as indeterminate instead of being decided by rounding noise.
//! Operations whose float result is exact stay degenerate (`lo == hi`).

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::rat::ln_bigint;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

/// Three-valued outcome of an interval comparison.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails,
    Indeterminate,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

fn add_down(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e < 0.0 || !s.is_finite() && s > 0.0 {
        s.next_down()
    } else {
        s
    }
}

fn add_up(a: f64, b: f64) -> f64 {
    let (s, e) = two_sum(a, b);
    if e > 0.0 || !s.is_finite() && s < 0.0 {
        s.next_up()
    } else {
        s
    }
}

fn mul_down(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_finite() && a.mul_add(b, -p) < 0.0 {
        p.next_down()
    } else {
        p
    }
}

fn mul_up(a: f64, b: f64) -> f64 {
    let p = a * b;
    if p.is_finite() && a.mul_add(b, -p) > 0.0 {
        p.next_up()
    } else {
        p
    }
}

impl Interval {
    pub const ZERO: Interval = Interval { lo: 0.0, hi: 0.0 };

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "inverted interval [{lo}, {hi}]");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    /// Symmetric enclosure `value ± err`.
    pub fn around(value: f64, err: f64) -> Self {
        Interval { lo: (value - err).next_down(), hi: (value + err).next_up() }
    }

    pub fn mid(&self) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            0.5 * self.lo + 0.5 * self.hi
        }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn add(&self, o: &Interval) -> Interval {
        Interval { lo: add_down(self.lo, o.lo), hi: add_up(self.hi, o.hi) }
    }

    pub fn sub(&self, o: &Interval) -> Interval {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi, hi: -self.lo }
    }

    pub fn mul(&self, o: &Interval) -> Interval {
        let lows = [
            mul_down(self.lo, o.lo),
            mul_down(self.lo, o.hi),
            mul_down(self.hi, o.lo),
            mul_down(self.hi, o.hi),
        ];
        let highs = [
            mul_up(self.lo, o.lo),
            mul_up(self.lo, o.hi),
            mul_up(self.hi, o.lo),
            mul_up(self.hi, o.hi),
        ];
        Interval {
            lo: lows.iter().copied().fold(f64::INFINITY, f64::min),
            hi: highs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    pub fn max(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.max(o.lo), hi: self.hi.max(o.hi) }
    }

    pub fn min(&self, o: &Interval) -> Interval {
        Interval { lo: self.lo.min(o.lo), hi: self.hi.min(o.hi) }
    }

    /// Enclosure of an exact rational.
    pub fn from_rational(q: &BigRational) -> Interval {
        let v = crate::rat::to_f64(q);
        if BigRational::from_float(v).as_ref() == Some(q) {
            Interval::point(v)
        } else {
            Interval { lo: v.next_down(), hi: v.next_up() }
        }
    }

    /// Enclosure of `ln q` for a positive rational `q`; exact zero for `q = 1`.
    pub fn ln_rational(q: &BigRational) -> Interval {
        assert!(q.is_positive(), "ln of a non-positive rational");
        if q.is_one() {
            return Interval::ZERO;
        }
        let (vn, en) = ln_bigint(q.numer());
        let (vd, ed) = ln_bigint(q.denom());
        let v = vn - vd;
        let err = en + ed + 2.0 * f64::EPSILON * v.abs();
        Interval::around(v, err)
    }

    /// Enclosure of `ln` over a positive rational enclosure `[lo, hi]`.
    pub fn ln_of_bounds(lo: &BigRational, hi: &BigRational) -> Interval {
        let a = Interval::ln_rational(lo);
        let b = Interval::ln_rational(hi);
        Interval { lo: a.lo, hi: b.hi }
    }

    /// `ln p` for a prime (or any integer > 1).
    pub fn ln_u64(p: u64) -> Interval {
        if p == 1 {
            return Interval::ZERO;
        }
        let v = (p as f64).ln();
        Interval::around(v, 2.0 * f64::EPSILON * v.abs() + if p > (1 << 53) { 1e-15 } else { 0.0 })
    }

    /// Three-valued test of `self >= 0`.
    pub fn nonnegative(&self) -> Verdict {
        if self.lo >= 0.0 {
            Verdict::Holds
        } else if self.hi < 0.0 {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{:e}, {:e}]", self.lo, self.hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat;

    #[test]
    fn exact_operations_stay_exact() {
        let z = Interval::ZERO.add(&Interval::ZERO);
        assert!(z.is_exact() && z.lo == 0.0);
        let p = Interval::point(0.5).mul(&Interval::point(4.0));
        assert_eq!(p, Interval::point(2.0));
        assert!(Interval::ln_rational(&rat(1, 1)).is_exact());
    }

    #[test]
    fn inexact_sums_are_widened() {
        let s = Interval::point(0.1).add(&Interval::point(0.2));
        assert!(s.lo < s.hi);
        assert!(s.contains(0.30000000000000004));
    }

    #[test]
    fn ln_encloses() {
        let i = Interval::ln_rational(&rat(4, 3));
        assert!(i.contains((4.0f64 / 3.0).ln()));
        assert!(i.width() < 1e-14);
        let big = Interval::ln_rational(&BigRational::new(
            num_bigint::BigInt::from(10).pow(60),
            num_bigint::BigInt::from(7),
        ));
        let expect = 60.0 * 10f64.ln() - 7f64.ln();
        assert!((big.mid() - expect).abs() < 1e-12);
    }

    #[test]
    fn verdicts() {
        assert_eq!(Interval::new(0.0, 1.0).nonnegative(), Verdict::Holds);
        assert_eq!(Interval::new(-2.0, -1.0).nonnegative(), Verdict::Fails);
        assert_eq!(Interval::new(-1e-17, 1e-17).nonnegative(), Verdict::Indeterminate);
    }
}
