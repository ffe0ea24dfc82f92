//! Points of ℝ² ≅ ℂ and the real pairing behind every exponential.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{divide_into_box, gcd, GaussInt};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct ComplexPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> ComplexPoint<T> {
    pub fn new(x: T, y: T) -> Self {
        ComplexPoint { x, y }
    }

    pub fn from_gauss(z: GaussInt) -> Self {
        ComplexPoint::new(T::of(z.re() as f64), T::of(z.im() as f64))
    }

    /// The quotient `a / q` as a point of ℂ.
    pub fn ratio(a: GaussInt, q: GaussInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ModulusZero);
        }
        // a/q = a·q̄ / N(q)
        let n = q.norm() as f64;
        let re = a.re() as f64 * q.re() as f64 + a.im() as f64 * q.im() as f64;
        let im = a.im() as f64 * q.re() as f64 - a.re() as f64 * q.im() as f64;
        Ok(ComplexPoint::new(T::of(re / n), T::of(im / n)))
    }

    /// Squared Euclidean length, the norm `N(ξ)` of a real point.
    pub fn norm(self) -> T {
        self.x * self.x + self.y * self.y
    }

    pub fn sup_norm(self) -> T {
        self.x.abs().max(self.y.abs())
    }

    /// Representative of the class mod ℤ² with coordinates in `[-1/2, 1/2)`.
    pub fn reduce_torus(self) -> Self {
        let half = T::of(0.5);
        let r = |t: T| {
            let s = t - (t + half).floor();
            if s >= half {
                s - T::one()
            } else {
                s
            }
        };
        ComplexPoint::new(r(self.x), r(self.y))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl<T: Real> std::ops::Sub for ComplexPoint<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        ComplexPoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Real> std::ops::Add for ComplexPoint<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ComplexPoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Real> std::ops::Neg for ComplexPoint<T> {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexPoint::new(-self.x, -self.y)
    }
}

/// `⟨z, w⟩ = Re z · Re w + Im z · Im w`.
#[inline]
pub fn pairing<T: Real>(z: ComplexPoint<T>, w: ComplexPoint<T>) -> T {
    z.x * w.x + z.y * w.y
}

/// `⟨n, ξ⟩` for a lattice point `n`.
#[inline]
pub fn pair_lattice<T: Real>(n: GaussInt, xi: ComplexPoint<T>) -> T {
    T::of(n.re() as f64) * xi.x + T::of(n.im() as f64) * xi.y
}

/// A reduced fraction `a/q` with `a ∈ B_q` and `gcd(a, q)` a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalPoint {
    a: GaussInt,
    q: GaussInt,
}

impl RationalPoint {
    pub fn new(a: GaussInt, q: GaussInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ModulusZero);
        }
        let non_reduced = || Error::NonReduced {
            a: a.to_string(),
            q: q.to_string(),
        };
        if divide_into_box(a, q)?.1 != a {
            return Err(non_reduced());
        }
        // gcd(0, q) is a unit only for unit q; then a = 0 is the single residue.
        if !gcd(a, q)?.is_unit() {
            return Err(non_reduced());
        }
        Ok(RationalPoint { a, q })
    }

    pub fn zero() -> Self {
        RationalPoint {
            a: GaussInt::ZERO,
            q: GaussInt::ONE,
        }
    }

    pub fn a(self) -> GaussInt {
        self.a
    }

    pub fn q(self) -> GaussInt {
        self.q
    }

    pub fn to_point<T: Real>(self) -> ComplexPoint<T> {
        ComplexPoint::ratio(self.a, self.q).expect("q is nonzero")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_examples() {
        let p = |x: f64, y: f64| ComplexPoint::new(x, y);
        assert_eq!(pairing(p(1.0, 0.0), p(0.0, 1.0)), 0.0);
        assert_eq!(pairing(p(0.0, 1.0), p(0.5, 0.5)), 0.5);
        let z = GaussInt::new(3, -7);
        let zp = ComplexPoint::<f64>::from_gauss(z);
        assert_eq!(pairing(zp, zp), z.norm() as f64);
        // Scalar-generic: same answer in f32.
        assert_eq!(
            pairing(ComplexPoint::<f32>::new(0.0, 1.0), ComplexPoint::new(0.5, 0.5)),
            0.5
        );
    }

    #[test]
    fn ratio_and_reduction() {
        let r: ComplexPoint<f64> = ComplexPoint::ratio(GaussInt::I, GaussInt::new(1, 1)).unwrap();
        assert_eq!(r, ComplexPoint::new(0.5, 0.5));
        let t = ComplexPoint::new(0.75, -0.5).reduce_torus();
        assert_eq!(t, ComplexPoint::new(-0.25, -0.5));
        assert_eq!(
            ComplexPoint::new(0.5, 1.25).reduce_torus(),
            ComplexPoint::new(-0.5, 0.25)
        );
    }

    #[test]
    fn rational_point_validation() {
        let q = GaussInt::new(2, 1);
        assert!(RationalPoint::new(GaussInt::new(0, 1), q).is_ok());
        // Not in the box.
        assert!(RationalPoint::new(GaussInt::new(2, 1), q).is_err());
        // Not coprime: 1+i shares the factor 1+i with 2.
        assert!(RationalPoint::new(GaussInt::new(1, 1), GaussInt::new(2, 0)).is_err());
        assert!(RationalPoint::new(GaussInt::ZERO, GaussInt::ONE).is_ok());
    }
}
