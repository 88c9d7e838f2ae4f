//! Exact rational helpers: floor/frac on the circle, dyadic snapping,
//! certified square-root enclosures, decimal rendering, and a small
//! quadratic-extension number type used by the fold algebra.

use num::bigint::Sign;
use num::{BigInt, One, Signed, Zero};

use crate::Rat;

/// Shorthand for a rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Largest integer `k` with `k <= x`.
pub fn floor_int(x: &Rat) -> BigInt {
    x.floor().to_integer()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rat) -> Rat {
    x - x.floor()
}

/// Smallest integer `k` with `k >= x`.
pub fn ceil_int(x: &Rat) -> BigInt {
    x.ceil().to_integer()
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: &Rat) -> Rat {
    let f = frac(x);
    let complement = Rat::one() - &f;
    if f <= complement {
        f
    } else {
        complement
    }
}

/// Arc-length distance on the circle `R/Z`.
pub fn circle_dist(a: &Rat, b: &Rat) -> Rat {
    dist_to_integer(&(a - b))
}

/// Round `x` down to a multiple of `2^-grid_log2`. Exact; the defect is in `[0, 2^-grid_log2)`.
pub fn snap_down(x: &Rat, grid_log2: u32) -> Rat {
    let scale = BigInt::one() << grid_log2;
    let scaled = x * Rat::from_integer(scale.clone());
    Rat::new(floor_int(&scaled), scale)
}

/// Floor of the integer square root (input must be nonnegative).
pub fn isqrt(n: &BigInt) -> BigInt {
    assert!(n.sign() != Sign::Minus, "isqrt of negative integer");
    n.sqrt()
}

/// True if `x` is the square of a rational, returning the exact root.
pub fn exact_sqrt(x: &Rat) -> Option<Rat> {
    if x.is_negative() {
        return None;
    }
    let ns = isqrt(x.numer());
    let ds = isqrt(x.denom());
    if &(&ns * &ns) == x.numer() && &(&ds * &ds) == x.denom() {
        Some(Rat::new(ns, ds))
    } else {
        None
    }
}

/// Rational enclosure `[lo, hi]` of `sqrt(x)` with `hi - lo <= 2^-prec_log2`.
pub fn sqrt_enclosure(x: &Rat, prec_log2: u32) -> (Rat, Rat) {
    assert!(!x.is_negative(), "sqrt of negative rational");
    if x.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    if let Some(r) = exact_sqrt(x) {
        return (r.clone(), r);
    }
    // sqrt(a/b) = sqrt(a*b)/b; scale so the integer sqrt carries the precision.
    let shift = 2 * (prec_log2 as usize + x.denom().bits() as usize + 2);
    let scaled = (x.numer() * x.denom()) << shift;
    let root = isqrt(&scaled);
    let den = x.denom() * (BigInt::one() << (shift / 2));
    let lo = Rat::new(root.clone(), den.clone());
    let hi = Rat::new(root + BigInt::one(), den);
    (lo, hi)
}

/// Certified upper bound on `sqrt(x)` within `2^-prec_log2` of the true value.
pub fn sqrt_upper(x: &Rat, prec_log2: u32) -> Rat {
    sqrt_enclosure(x, prec_log2).1
}

/// Fixed-point decimal rendering with `digits` places, truncated toward zero.
/// Deterministic; used for all CSV/SVG/JSON decimal columns.
pub fn decimal_string(x: &Rat, digits: u32) -> String {
    let sign = if x.is_negative() { "-" } else { "" };
    let a = x.abs();
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = floor_int(&(&a * Rat::from_integer(scale.clone())));
    let int_part = &scaled / &scale;
    let frac_part = &scaled % &scale;
    let mut frac_str = frac_part.to_string();
    while (frac_str.len() as u32) < digits {
        frac_str.insert(0, '0');
    }
    format!("{sign}{int_part}.{frac_str}")
}

/// Render as `num/den` (canonical reduced form).
pub fn ratio_string(x: &Rat) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Closed rational interval with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatInterval {
    pub lo: Rat,
    pub hi: Rat,
}

impl RatInterval {
    pub fn new(lo: Rat, hi: Rat) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        RatInterval { lo, hi }
    }

    pub fn point(x: Rat) -> Self {
        RatInterval { lo: x.clone(), hi: x }
    }

    pub fn length(&self) -> Rat {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rat) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RatInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn intersects(&self, other: &RatInterval) -> bool {
        !(self.hi < other.lo || other.hi < self.lo)
    }

    pub fn midpoint(&self) -> Rat {
        (&self.lo + &self.hi) / rat_int(2)
    }
}

/// Number of the form `a + b*sqrt(s)` with `a, b, s` rational and `s >= 0`.
///
/// Closed under addition of rationals, multiplication by rationals, and
/// squaring; this is exactly what one fold application needs. Comparisons
/// between values over the same radicand (or against rationals) are exact
/// sign computations, no floating point.
#[derive(Debug, Clone)]
pub struct QuadVal {
    pub a: Rat,
    pub b: Rat,
    pub s: Rat,
}

impl QuadVal {
    pub fn from_rat(a: Rat) -> Self {
        QuadVal { a, b: Rat::zero(), s: Rat::zero() }
    }

    /// `a + b*sqrt(s)`, normalizing exact squares into the rational part.
    pub fn new(a: Rat, b: Rat, s: Rat) -> Self {
        assert!(!s.is_negative(), "negative radicand");
        if b.is_zero() || s.is_zero() {
            return QuadVal::from_rat(a);
        }
        if let Some(r) = exact_sqrt(&s) {
            return QuadVal::from_rat(a + b * r);
        }
        QuadVal { a, b, s }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<Rat> {
        if self.is_rational() {
            Some(self.a.clone())
        } else {
            None
        }
    }

    pub fn add_rat(&self, r: &Rat) -> QuadVal {
        QuadVal { a: &self.a + r, b: self.b.clone(), s: self.s.clone() }
    }

    pub fn mul_rat(&self, r: &Rat) -> QuadVal {
        if r.is_zero() {
            return QuadVal::from_rat(Rat::zero());
        }
        QuadVal { a: &self.a * r, b: &self.b * r, s: self.s.clone() }
    }

    /// Exact square; lands back in the rationals when `a = 0`.
    pub fn square(&self) -> QuadVal {
        let a2 = &self.a * &self.a + &self.b * &self.b * &self.s;
        let cross = rat_int(2) * &self.a * &self.b;
        QuadVal::new(a2, cross, self.s.clone())
    }

    /// Exact sign of `a + b*sqrt(s)`.
    pub fn sign(&self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        if self.b.is_zero() {
            return if self.a.is_zero() {
                Equal
            } else if self.a.is_positive() {
                Greater
            } else {
                Less
            };
        }
        // compare a against -b*sqrt(s): square both sides with sign care
        let lhs_neg = self.a.is_negative();
        let b_pos = self.b.is_positive();
        if !lhs_neg && b_pos {
            return Greater; // nonneg + positive
        }
        if lhs_neg && !b_pos {
            return Less;
        }
        // opposite signs: compare a^2 vs b^2 s
        let a2 = &self.a * &self.a;
        let b2s = &self.b * &self.b * &self.s;
        match a2.cmp(&b2s) {
            Equal => Equal,
            Greater => {
                if lhs_neg {
                    Less
                } else {
                    Greater
                }
            }
            Less => {
                if b_pos {
                    Greater
                } else {
                    Less
                }
            }
        }
    }

    /// Exact comparison against a rational.
    pub fn cmp_rat(&self, r: &Rat) -> std::cmp::Ordering {
        self.add_rat(&(-r.clone())).sign()
    }

    /// Exact comparison against another value over the same radicand.
    pub fn cmp_same_radicand(&self, other: &QuadVal) -> std::cmp::Ordering {
        assert!(
            self.is_rational() || other.is_rational() || self.s == other.s,
            "comparison across distinct radicands"
        );
        let s = if self.is_rational() { other.s.clone() } else { self.s.clone() };
        QuadVal::new(&self.a - &other.a, &self.b - &other.b, s).sign()
    }

    /// Compare against a value over a possibly different radicand by refining
    /// enclosures. Exact when both sides are rational or share a radicand;
    /// otherwise the values must separate within the precision budget.
    pub fn cmp_refine(&self, other: &QuadVal, max_prec_log2: u32) -> Option<std::cmp::Ordering> {
        if self.is_rational() || other.is_rational() || self.s == other.s {
            return Some(self.cmp_same_radicand(other));
        }
        let mut prec = 64;
        loop {
            let a = self.enclosure(prec);
            let b = other.enclosure(prec);
            if a.hi < b.lo {
                return Some(std::cmp::Ordering::Less);
            }
            if b.hi < a.lo {
                return Some(std::cmp::Ordering::Greater);
            }
            if prec >= max_prec_log2 {
                return None;
            }
            prec = (prec * 2).min(max_prec_log2);
        }
    }

    /// Rational enclosure of width `<= 2^-prec_log2` (up to the coefficient scale).
    pub fn enclosure(&self, prec_log2: u32) -> RatInterval {
        if self.is_rational() {
            return RatInterval::point(self.a.clone());
        }
        let (rlo, rhi) = sqrt_enclosure(&self.s, prec_log2 + 8);
        if self.b.is_positive() {
            RatInterval::new(&self.a + &self.b * rlo, &self.a + &self.b * rhi)
        } else {
            RatInterval::new(&self.a + &self.b * rhi, &self.a + &self.b * rlo)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floor_frac_basics() {
        assert_eq!(floor_int(&rat(7, 2)), BigInt::from(3));
        assert_eq!(floor_int(&rat(-7, 2)), BigInt::from(-4));
        assert_eq!(frac(&rat(-1, 3)), rat(2, 3));
        assert_eq!(ceil_int(&rat(5, 3)), BigInt::from(2));
    }

    #[test]
    fn circle_distance_wraps() {
        assert_eq!(circle_dist(&rat(1, 10), &rat(9, 10)), rat(1, 5));
        assert_eq!(dist_to_integer(&rat(7, 4)), rat(1, 4));
    }

    #[test]
    fn snapping_rounds_down_exactly() {
        let x = rat(10, 3);
        let s = snap_down(&x, 8);
        assert!(s <= x);
        assert!(&x - &s < rat(1, 256));
        assert!((BigInt::from(256) % s.denom()).is_zero());
        assert_eq!(snap_down(&rat(3, 4), 2), rat(3, 4));
    }

    #[test]
    fn sqrt_bounds_bracket() {
        let x = rat(2, 1);
        let (lo, hi) = sqrt_enclosure(&x, 40);
        assert!(&lo * &lo <= x && x <= &hi * &hi);
        assert!(&hi - &lo <= Rat::new(BigInt::one(), BigInt::one() << 40));
        assert_eq!(exact_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(sqrt_upper(&rat(1, 100), 40), rat(1, 10));
    }

    #[test]
    fn decimal_rendering_is_fixed_width() {
        assert_eq!(decimal_string(&rat(1, 3), 6), "0.333333");
        assert_eq!(decimal_string(&rat(-1, 8), 4), "-0.1250");
        assert_eq!(decimal_string(&rat_int(2), 2), "2.00");
    }

    #[test]
    fn quadval_sign_and_compare() {
        use std::cmp::Ordering::*;
        // 1 - sqrt(2) < 0 < 2 - sqrt(2)
        let v = QuadVal::new(rat_int(1), rat_int(-1), rat_int(2));
        assert_eq!(v.sign(), Less);
        let w = QuadVal::new(rat_int(2), rat_int(-1), rat_int(2));
        assert_eq!(w.sign(), Greater);
        assert_eq!(w.cmp_same_radicand(&v), Greater);
        // sqrt(9/4) normalizes to rational 3/2
        let r = QuadVal::new(Rat::zero(), rat_int(1), rat(9, 4));
        assert_eq!(r.as_rational(), Some(rat(3, 2)));
        // squaring 0 + 1*sqrt(5) gives exactly 5
        let s = QuadVal::new(Rat::zero(), rat_int(1), rat_int(5));
        assert_eq!(s.square().as_rational(), Some(rat_int(5)));
    }

    #[test]
    fn quadval_enclosure_brackets_value() {
        let v = QuadVal::new(rat_int(1), rat(1, 3), rat_int(2)); // 1 + sqrt(2)/3
        let enc = v.enclosure(50);
        assert!(enc.length() < rat(1, 1 << 30));
        // check by squaring the offset: (x-1)*3 should bracket sqrt(2)
        let lo3 = (&enc.lo - rat_int(1)) * rat_int(3);
        let hi3 = (&enc.hi - rat_int(1)) * rat_int(3);
        assert!(&lo3 * &lo3 <= rat_int(2));
        assert!(rat_int(2) <= &hi3 * &hi3);
    }
}
