//! Exact arithmetic on the Gaussian integers.

use std::cmp::Ordering;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted magnitude of either coordinate. Norms then stay below 2^61.
pub const COORD_LIMIT: i64 = 1 << 30;

/// A Gaussian integer `re + im·i` with both coordinates bounded by [`COORD_LIMIT`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "(i64, i64)", into = "(i64, i64)")]
pub struct GaussInt {
    re: i64,
    im: i64,
}

/// The four units of ℤ[i].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Unit {
    One,
    I,
    NegOne,
    NegI,
}

impl Unit {
    pub const ALL: [Unit; 4] = [Unit::One, Unit::I, Unit::NegOne, Unit::NegI];

    pub fn value(self) -> GaussInt {
        match self {
            Unit::One => GaussInt::ONE,
            Unit::I => GaussInt::I,
            Unit::NegOne => GaussInt::new(-1, 0),
            Unit::NegI => GaussInt::new(0, -1),
        }
    }

    pub fn from_gauss(z: GaussInt) -> Option<Unit> {
        match (z.re, z.im) {
            (1, 0) => Some(Unit::One),
            (0, 1) => Some(Unit::I),
            (-1, 0) => Some(Unit::NegOne),
            (0, -1) => Some(Unit::NegI),
            _ => None,
        }
    }

    pub fn inverse(self) -> Unit {
        match self {
            Unit::One => Unit::One,
            Unit::I => Unit::NegI,
            Unit::NegOne => Unit::NegOne,
            Unit::NegI => Unit::I,
        }
    }
}

#[inline]
fn in_range(v: i128) -> bool {
    v.unsigned_abs() <= COORD_LIMIT as u128
}

impl GaussInt {
    pub const ZERO: GaussInt = GaussInt { re: 0, im: 0 };
    pub const ONE: GaussInt = GaussInt { re: 1, im: 0 };
    pub const I: GaussInt = GaussInt { re: 0, im: 1 };
    /// The ramified prime `1 + i`.
    pub const ONE_PLUS_I: GaussInt = GaussInt { re: 1, im: 1 };

    /// Panics if a coordinate exceeds [`COORD_LIMIT`]; use [`GaussInt::try_new`] for untrusted input.
    #[track_caller]
    pub fn new(re: i64, im: i64) -> Self {
        match Self::try_new(re, im) {
            Ok(z) => z,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_new(re: i64, im: i64) -> Result<Self> {
        if re.unsigned_abs() > COORD_LIMIT as u64 || im.unsigned_abs() > COORD_LIMIT as u64 {
            return Err(Error::Overflow(format!(
                "Gaussian integer ({re}, {im}) exceeds coordinate limit 2^30"
            )));
        }
        Ok(GaussInt { re, im })
    }

    fn from_wide(re: i128, im: i128) -> Option<Self> {
        (in_range(re) && in_range(im)).then_some(GaussInt {
            re: re as i64,
            im: im as i64,
        })
    }

    #[inline]
    pub fn re(self) -> i64 {
        self.re
    }

    #[inline]
    pub fn im(self) -> i64 {
        self.im
    }

    /// `re² + im²`, exact.
    #[inline]
    pub fn norm(self) -> u64 {
        (self.re * self.re + self.im * self.im) as u64
    }

    #[inline]
    pub fn conj(self) -> Self {
        GaussInt {
            re: self.re,
            im: -self.im,
        }
    }

    /// Multiplication by `i`.
    #[inline]
    pub fn mul_i(self) -> Self {
        GaussInt {
            re: -self.im,
            im: self.re,
        }
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.re == 0 && self.im == 0
    }

    #[inline]
    pub fn is_unit(self) -> bool {
        self.norm() == 1
    }

    pub fn associates(self) -> [GaussInt; 4] {
        let a = self.mul_i();
        let b = a.mul_i();
        [self, a, b, b.mul_i()]
    }

    /// The associate with `re > 0, im ≥ 0`; zero maps to zero.
    pub fn canonical(self) -> Self {
        self.canonical_with_unit().0
    }

    /// Returns `(c, u)` with `c` canonical and `self = u · c`.
    pub fn canonical_with_unit(self) -> (GaussInt, Unit) {
        if self.is_zero() {
            return (self, Unit::One);
        }
        // self = u·c  ⇔  c = u⁻¹·self; walk the rotations self, -i·self, -self, i·self.
        let mut c = self;
        for u in Unit::ALL {
            if c.re > 0 && c.im >= 0 {
                return (c, u);
            }
            // c ← c · (-i)
            c = GaussInt { re: c.im, im: -c.re };
        }
        unreachable!("every nonzero Gaussian integer has a first-quadrant associate")
    }

    pub fn is_canonical(self) -> bool {
        self.re > 0 && self.im >= 0
    }

    /// `1 + i` divides `self`, equivalently `re + im` is even.
    #[inline]
    pub fn is_even(self) -> bool {
        (self.re + self.im).rem_euclid(2) == 0
    }

    /// Argument in `[0, 2π)`.
    pub fn arg(self) -> Result<f64> {
        if self.is_zero() {
            return Err(Error::ZeroArgument);
        }
        Ok(arg_of(self.re, self.im))
    }

    pub fn checked_add(self, rhs: Self) -> Option<Self> {
        Self::from_wide(self.re as i128 + rhs.re as i128, self.im as i128 + rhs.im as i128)
    }

    pub fn checked_sub(self, rhs: Self) -> Option<Self> {
        Self::from_wide(self.re as i128 - rhs.re as i128, self.im as i128 - rhs.im as i128)
    }

    pub fn checked_mul(self, rhs: Self) -> Option<Self> {
        let (a, b) = wide_mul(self, rhs);
        Self::from_wide(a, b)
    }

    /// Exact quotient `self / d` when `d` divides `self`.
    pub fn div_exact(self, d: GaussInt) -> Option<GaussInt> {
        if d.is_zero() {
            return None;
        }
        let (num_re, num_im) = wide_mul(self, d.conj());
        let n = d.norm() as i128;
        if num_re % n != 0 || num_im % n != 0 {
            return None;
        }
        Self::from_wide(num_re / n, num_im / n)
    }

    /// `self` divides `x`.
    pub fn divides(self, x: GaussInt) -> bool {
        if self.is_zero() {
            return x.is_zero();
        }
        let (num_re, num_im) = wide_mul(x, self.conj());
        let n = self.norm() as i128;
        num_re % n == 0 && num_im % n == 0
    }

    /// Total order used for prime lists: norm, then `re`, then `im`.
    pub fn norm_order(self, other: GaussInt) -> Ordering {
        (self.norm(), self.re, self.im).cmp(&(other.norm(), other.re, other.im))
    }
}

#[inline]
pub(crate) fn arg_of(re: i64, im: i64) -> f64 {
    let t = (im as f64).atan2(re as f64);
    if t < 0.0 {
        let r = t + TAU;
        // atan2 of a tiny negative angle can round up to exactly 2π.
        if r >= TAU {
            0.0
        } else {
            r
        }
    } else {
        t
    }
}

#[inline]
fn wide_mul(a: GaussInt, b: GaussInt) -> (i128, i128) {
    let (ar, ai, br, bi) = (a.re as i128, a.im as i128, b.re as i128, b.im as i128);
    (ar * br - ai * bi, ar * bi + ai * br)
}

impl fmt::Debug for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.re, self.im)
    }
}

impl fmt::Display for GaussInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re, self.im) {
            (r, 0) => write!(f, "{r}"),
            (0, i) => write!(f, "{i}i"),
            (r, i) if i < 0 => write!(f, "{r}-{}i", -i),
            (r, i) => write!(f, "{r}+{i}i"),
        }
    }
}

impl TryFrom<(i64, i64)> for GaussInt {
    type Error = Error;
    fn try_from((re, im): (i64, i64)) -> Result<Self> {
        GaussInt::try_new(re, im)
    }
}

impl From<GaussInt> for (i64, i64) {
    fn from(z: GaussInt) -> Self {
        (z.re, z.im)
    }
}

impl Add for GaussInt {
    type Output = GaussInt;
    #[track_caller]
    fn add(self, rhs: Self) -> Self {
        self.checked_add(rhs)
            .expect("Gaussian integer addition left the coordinate range")
    }
}

impl Sub for GaussInt {
    type Output = GaussInt;
    #[track_caller]
    fn sub(self, rhs: Self) -> Self {
        self.checked_sub(rhs)
            .expect("Gaussian integer subtraction left the coordinate range")
    }
}

impl Mul for GaussInt {
    type Output = GaussInt;
    #[track_caller]
    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(rhs)
            .expect("Gaussian integer product left the coordinate range")
    }
}

impl Neg for GaussInt {
    type Output = GaussInt;
    fn neg(self) -> Self {
        GaussInt {
            re: -self.re,
            im: -self.im,
        }
    }
}

/// Euclidean division with the remainder placed in the residue box `B_q`:
/// `x = quotient·q + remainder` with `0 ≤ ⟨r,q⟩ < N(q)` and `0 ≤ ⟨r,iq⟩ < N(q)`.
pub fn divide_into_box(x: GaussInt, q: GaussInt) -> Result<(GaussInt, GaussInt)> {
    if q.is_zero() {
        return Err(Error::ModulusZero);
    }
    // x·q̄ = k·N(q) + r·q̄, and r·q̄ = ⟨r,q⟩ + i⟨r,iq⟩.
    let (u, v) = wide_mul(x, q.conj());
    let n = q.norm() as i128;
    let k = GaussInt::from_wide(u.div_euclid(n), v.div_euclid(n))
        .ok_or_else(|| Error::Overflow("box quotient out of range".into()))?;
    let kq = wide_mul(k, q);
    let r = GaussInt::from_wide(x.re as i128 - kq.0, x.im as i128 - kq.1)
        .ok_or_else(|| Error::Overflow("box remainder out of range".into()))?;
    Ok((k, r))
}

/// The box coordinates `(⟨r,q⟩, ⟨r,iq⟩)` of `r` relative to `q`, i.e. `r·q̄`.
pub fn box_coordinates(r: GaussInt, q: GaussInt) -> (i64, i64) {
    let (u, v) = wide_mul(r, q.conj());
    (u as i64, v as i64)
}

/// Canonical greatest common divisor. `gcd(a, 0) = canonical(a)`.
pub fn gcd(a: GaussInt, b: GaussInt) -> Result<GaussInt> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::UndefinedGcd);
    }
    let (mut x, mut y) = (a, b);
    while !y.is_zero() {
        let r = nearest_remainder(x, y);
        x = y;
        y = r;
    }
    Ok(x.canonical())
}

/// `x - y·round(x/y)`; the remainder has norm at most `N(y)/2`.
fn nearest_remainder(x: GaussInt, y: GaussInt) -> GaussInt {
    let (u, v) = wide_mul(x, y.conj());
    let n = y.norm() as i128;
    let round = |t: i128| (2 * t + n).div_euclid(2 * n);
    let k = GaussInt::from_wide(round(u), round(v)).expect("gcd quotient within range");
    let ky = wide_mul(k, y);
    GaussInt::from_wide(x.re as i128 - ky.0, x.im as i128 - ky.1).expect("gcd remainder within range")
}

/// Canonical divisors of `z` by direct enumeration; intended for small norms.
pub fn divisors_brute(z: GaussInt) -> Vec<GaussInt> {
    if z.is_zero() {
        return Vec::new();
    }
    let n = z.norm();
    let r = (n as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for re in 1..=r {
        for im in 0..=r {
            let d = GaussInt { re, im };
            let dn = d.norm();
            if dn <= n && n.is_multiple_of(dn) && d.divides(z) {
                out.push(d);
            }
        }
    }
    out.sort_by(|a, b| a.norm_order(*b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    #[test]
    fn norm_examples() {
        assert_eq!(g(0, 0).norm(), 0);
        assert_eq!(g(3, 4).norm(), 25);
        assert_eq!(g(2, 1).norm(), 5);
    }

    #[test]
    fn rejects_wide_coordinates() {
        assert!(GaussInt::try_new(COORD_LIMIT, -COORD_LIMIT).is_ok());
        assert!(matches!(GaussInt::try_new(COORD_LIMIT + 1, 0), Err(Error::Overflow(_))));
        let big = g(COORD_LIMIT, 0);
        assert!(big.checked_mul(big).is_none());
        assert!(big.checked_add(big).is_none());
    }

    #[test]
    fn box_division_examples() {
        assert_eq!(divide_into_box(g(0, 0), g(1, 1)).unwrap(), (g(0, 0), g(0, 0)));
        let (k, r) = divide_into_box(g(1, 0), g(1, 1)).unwrap();
        assert_eq!(r, g(0, 1));
        assert_eq!(k, g(0, -1));
        let q = g(5, -3);
        assert_eq!(divide_into_box(q, q).unwrap().1, GaussInt::ZERO);
        assert!(matches!(
            divide_into_box(g(3, 1), GaussInt::ZERO),
            Err(Error::ModulusZero)
        ));
    }

    #[test]
    fn gcd_examples() {
        let z = g(-4, 6);
        assert_eq!(gcd(z, GaussInt::ZERO).unwrap(), z.canonical());
        assert_eq!(gcd(GaussInt::ZERO, z).unwrap(), z.canonical());
        assert_eq!(gcd(z, z).unwrap(), z.canonical());
        assert!(matches!(gcd(GaussInt::ZERO, GaussInt::ZERO), Err(Error::UndefinedGcd)));

        // Brute-force: the only common canonical divisor of 2+i and 1+2i is 1.
        let (a, b) = (g(2, 1), g(1, 2));
        let common: Vec<_> = divisors_brute(a).into_iter().filter(|d| d.divides(b)).collect();
        assert_eq!(common, vec![GaussInt::ONE]);
        assert_eq!(gcd(a, b).unwrap(), GaussInt::ONE);
    }

    #[test]
    fn evenness_examples() {
        assert!(g(1, 1).is_even());
        assert!(!g(1, 0).is_even());
        assert!(g(2, 4).is_even());
    }

    #[test]
    fn evenness_matches_norm_parity_exhaustively() {
        for re in -100i64..=100 {
            for im in -100i64..=100 {
                let z = g(re, im);
                if z.norm() > 10_000 {
                    continue;
                }
                assert_eq!(z.is_even(), z.norm().is_multiple_of(2), "{z:?}");
                assert_eq!(z.is_even(), GaussInt::ONE_PLUS_I.divides(z), "{z:?}");
            }
        }
    }

    #[test]
    fn arg_examples() {
        assert_eq!(g(1, 0).arg().unwrap(), 0.0);
        assert!((g(0, 1).arg().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((g(1, 1).arg().unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!((g(1, -1).arg().unwrap() - 7.0 * std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(matches!(GaussInt::ZERO.arg(), Err(Error::ZeroArgument)));
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(g(0, 3).canonical(), g(3, 0));
        assert_eq!(g(-2, -1).canonical(), g(2, 1));
        assert_eq!(g(1, -2).canonical(), g(2, 1));
        assert_eq!(GaussInt::ZERO.canonical(), GaussInt::ZERO);
    }

    #[test]
    fn box_remainder_is_a_complete_residue_system() {
        // For every q with N(q) ≤ 200: remainders of a window of integers land in B_q,
        // depend only on the class mod q, and hit exactly N(q) values.
        for re in 0i64..=15 {
            for im in -15i64..=15 {
                let q = g(re, im);
                let n = q.norm();
                if n == 0 || n > 200 {
                    continue;
                }
                let mut seen = std::collections::HashSet::new();
                for a in -20i64..=20 {
                    for b in -20i64..=20 {
                        let x = g(a, b);
                        let (k, r) = divide_into_box(x, q).unwrap();
                        assert_eq!(k * q + r, x);
                        let (u, v) = box_coordinates(r, q);
                        assert!((0..n as i64).contains(&u) && (0..n as i64).contains(&v));
                        let shifted = divide_into_box(x + q * g(3, -2), q).unwrap().1;
                        assert_eq!(shifted, r);
                        seen.insert(r);
                    }
                }
                assert_eq!(seen.len() as u64, n, "q = {q:?}");
            }
        }
    }

    fn small() -> impl Strategy<Value = GaussInt> {
        (-3000i64..3000, -3000i64..3000).prop_map(|(a, b)| g(a, b))
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(z in small(), w in small()) {
            prop_assert_eq!((z * w).norm(), z.norm() * w.norm());
        }

        #[test]
        fn canonical_is_associate_invariant(z in small()) {
            let c = z.canonical();
            for a in z.associates() {
                prop_assert_eq!(a.canonical(), c);
            }
            if !z.is_zero() {
                prop_assert!(c.is_canonical());
                let (c2, u) = z.canonical_with_unit();
                prop_assert_eq!(u.value() * c2, z);
            }
        }

        #[test]
        fn gcd_divides_and_is_greatest(a in small(), b in small()) {
            prop_assume!(!(a.is_zero() && b.is_zero()));
            let d = gcd(a, b).unwrap();
            prop_assert!(d.divides(a) && d.divides(b));
        }
    }

    #[test]
    fn brute_force_common_divisors_divide_gcd() {
        for (a, b) in [(g(12, 4), g(6, -8)), (g(15, 0), g(9, 12)), (g(7, 1), g(3, 11))] {
            let d = gcd(a, b).unwrap();
            for c in divisors_brute(a) {
                if c.divides(b) {
                    assert!(c.divides(d), "{c:?} ∤ gcd {d:?}");
                }
            }
        }
    }
}
