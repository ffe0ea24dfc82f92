//! Residue boxes `B_q`, their reduced residues and the Fourier transform over them.

use std::collections::HashMap;

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{box_coordinates, divide_into_box, gcd, GaussInt};
use crate::scalar::Real;

/// Largest modulus norm a box will be built for.
pub const MAX_BOX_NORM: u64 = 1 << 22;

/// `B_q`: the lattice points `r` with `0 ≤ ⟨r, q⟩ < N(q)` and `0 ≤ ⟨r, iq⟩ < N(q)`.
#[derive(Clone, Debug)]
pub struct ResidueBox {
    q: GaussInt,
    points: Vec<GaussInt>,
    dual: Vec<GaussInt>,
    index: HashMap<GaussInt, usize>,
    reduced: Vec<usize>,
}

fn enumerate_box(q: GaussInt) -> Vec<GaussInt> {
    let n = q.norm() as i64;
    // B_q is the half-open square spanned by q and iq.
    let corners = [
        (0, 0),
        (q.re(), q.im()),
        (-q.im(), q.re()),
        (q.re() - q.im(), q.im() + q.re()),
    ];
    let (lo_re, hi_re) = (
        corners.iter().map(|c| c.0).min().unwrap(),
        corners.iter().map(|c| c.0).max().unwrap(),
    );
    let (lo_im, hi_im) = (
        corners.iter().map(|c| c.1).min().unwrap(),
        corners.iter().map(|c| c.1).max().unwrap(),
    );
    let mut pts = Vec::with_capacity(n as usize);
    for re in lo_re..=hi_re {
        for im in lo_im..=hi_im {
            let r = GaussInt::new(re, im);
            let (x, y) = box_coordinates(r, q);
            if (0..n).contains(&x) && (0..n).contains(&y) {
                pts.push(r);
            }
        }
    }
    pts.sort_by_key(|&r| box_coordinates(r, q));
    pts
}

/// `e(k / n)` for `k = 0..n`.
fn roots_of_unity<T: Real>(n: u64) -> Vec<Complex<T>> {
    (0..n)
        .map(|k| {
            let angle = std::f64::consts::TAU * k as f64 / n as f64;
            Complex::new(T::of(angle.cos()), T::of(angle.sin()))
        })
        .collect()
}

/// `N(q)·⟨x, n/q⟩ = Re(x · n̄ · q)`, an exact integer.
#[inline]
fn scaled_pairing(x: GaussInt, n: GaussInt, q: GaussInt) -> i128 {
    let c_re = n.re() as i128 * q.re() as i128 + n.im() as i128 * q.im() as i128;
    let c_im = n.re() as i128 * q.im() as i128 - n.im() as i128 * q.re() as i128;
    x.re() as i128 * c_re - x.im() as i128 * c_im
}

impl ResidueBox {
    pub fn new(q: GaussInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ModulusZero);
        }
        let n = q.norm();
        if n > MAX_BOX_NORM {
            return Err(Error::Capacity {
                required_bytes: n * 64,
                budget_bytes: MAX_BOX_NORM * 64,
                hint: format!("N(q) = {n} exceeds the residue box limit {MAX_BOX_NORM}"),
            });
        }
        let points = enumerate_box(q);
        assert_eq!(points.len() as u64, n, "box of {q:?} must hold N(q) points");
        let dual = enumerate_box(q.conj());
        let index = points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let reduced = points
            .iter()
            .enumerate()
            .filter(|(_, &p)| gcd(p, q).map(|g| g.is_unit()).unwrap_or(false))
            .map(|(i, _)| i)
            .collect();
        Ok(ResidueBox {
            q,
            points,
            dual,
            index,
            reduced,
        })
    }

    pub fn modulus(&self) -> GaussInt {
        self.q
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Members of `B_q`, ordered lexicographically by `(⟨r, q⟩, ⟨r, iq⟩)`.
    pub fn points(&self) -> &[GaussInt] {
        &self.points
    }

    /// Members of `B_{q̄}`, the index set of the transform.
    pub fn dual_points(&self) -> &[GaussInt] {
        &self.dual
    }

    /// `𝔸_q`: the points of `B_q` coprime to `q`.
    pub fn reduced(&self) -> impl Iterator<Item = GaussInt> + '_ {
        self.reduced.iter().map(|&i| self.points[i])
    }

    pub fn reduced_len(&self) -> usize {
        self.reduced.len()
    }

    pub fn index_of(&self, r: GaussInt) -> Option<usize> {
        self.index.get(&r).copied()
    }

    /// Position of the residue class of `x`.
    pub fn index_of_class(&self, x: GaussInt) -> Result<usize> {
        let (_, r) = divide_into_box(x, self.q)?;
        Ok(self.index[&r])
    }

    /// `(ℱ f)(x) = Σ_{n ∈ B_q} f(n) e(−⟨x, n/q⟩)` for `x ∈ B_{q̄}`, in [`Self::dual_points`] order.
    pub fn dft<T: Real>(&self, f: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        self.transform(f, &self.points, &self.dual, -1)
    }

    /// Inverse of [`Self::dft`]: `f(n) = N(q)⁻¹ Σ_{x ∈ B_{q̄}} g(x) e(⟨x, n/q⟩)`.
    pub fn inverse_dft<T: Real>(&self, g: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let mut out = self.transform(g, &self.dual, &self.points, 1)?;
        let scale = T::of(1.0 / self.q.norm() as f64);
        for v in &mut out {
            *v = *v * scale;
        }
        Ok(out)
    }

    /// Direct summation; `input` is indexed by `from`, output by `to`.
    fn transform<T: Real>(
        &self,
        input: &[Complex<T>],
        from: &[GaussInt],
        to: &[GaussInt],
        sign: i128,
    ) -> Result<Vec<Complex<T>>> {
        let n = self.q.norm();
        if input.len() as u64 != n {
            return Err(Error::SizeMismatch {
                expected: n as usize,
                got: input.len(),
            });
        }
        let roots = roots_of_unity::<T>(n);
        let modulus = n as i128;
        // The pairing is symmetric in which side is the "frequency": ⟨x, n/q⟩ with x ∈ B_{q̄}, n ∈ B_q.
        let forward = sign < 0;
        Ok(to
            .iter()
            .map(|&t| {
                let mut acc = Complex::new(T::zero(), T::zero());
                for (&s, &v) in from.iter().zip(input) {
                    let (x, m) = if forward { (t, s) } else { (s, t) };
                    let k = (sign * scaled_pairing(x, m, self.q)).rem_euclid(modulus);
                    acc = acc + v * roots[k as usize];
                }
                acc
            })
            .collect())
    }

    /// `|Σ|f|² − N(q)⁻¹ Σ|ℱf|²| / Σ|f|²`.
    pub fn parseval_defect<T: Real>(&self, f: &[Complex<T>]) -> Result<f64> {
        let g = self.dft(f)?;
        let lhs: f64 = f.iter().map(|v| v.norm_sqr().as_f64()).sum();
        let rhs: f64 = g.iter().map(|v| v.norm_sqr().as_f64()).sum::<f64>() / self.q.norm() as f64;
        Ok(if lhs == 0.0 { rhs } else { (lhs - rhs).abs() / lhs })
    }
}

/// Outcome of a character-sum identity check.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrthogonalityVerdict {
    pub q: GaussInt,
    pub divisor: GaussInt,
    pub n: GaussInt,
    pub sum_re: f64,
    pub sum_im: f64,
    pub expected: f64,
    pub pass: bool,
}

/// `Σ_{r ∈ B_q} e(⟨r, n/d̄⟩)` against `N(q)·[d̄ | n]`, with tolerance `1e-8·N(q)`.
fn character_sum_check(boxq: &ResidueBox, d: GaussInt, n: GaussInt) -> OrthogonalityVerdict {
    let q = boxq.modulus();
    let dn = d.norm();
    // ⟨r, n/d̄⟩ = Re(r · n̄ · d̄) / N(d)
    let mut sum = Complex::new(0.0f64, 0.0);
    for &r in boxq.points() {
        let k = scaled_pairing(r, n, d.conj()).rem_euclid(dn as i128);
        sum += crate::scalar::e(k as f64 / dn as f64);
    }
    let expected = if d.conj().divides(n) { q.norm() as f64 } else { 0.0 };
    let tol = 1e-8 * q.norm() as f64;
    OrthogonalityVerdict {
        q,
        divisor: d,
        n,
        sum_re: sum.re,
        sum_im: sum.im,
        expected,
        pass: (sum.re - expected).abs() <= tol && sum.im.abs() <= tol,
    }
}

/// Checks `Σ_{r ∈ B_q} e(⟨r, n/q̄⟩) = N(q)` when `q̄ | n` and `0` otherwise.
pub fn orthogonality_check(boxq: &ResidueBox, n: GaussInt) -> OrthogonalityVerdict {
    character_sum_check(boxq, boxq.modulus(), n)
}

/// The same identity with `q̄` replaced by `d̄` for a divisor `d | q`.
pub fn orthogonality_divisor_check(boxq: &ResidueBox, d: GaussInt, n: GaussInt) -> Result<OrthogonalityVerdict> {
    if d.is_zero() || !d.divides(boxq.modulus()) {
        return Err(Error::InvalidParameter(format!(
            "{d} does not divide {}",
            boxq.modulus()
        )));
    }
    Ok(character_sum_check(boxq, d, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn g(re: i64, im: i64) -> GaussInt {
        GaussInt::new(re, im)
    }

    fn c(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    /// Brute-force transform straight from the definition, in floating point.
    fn dft_oracle(q: GaussInt, pts: &[GaussInt], dual: &[GaussInt], f: &[Complex<f64>]) -> Vec<Complex<f64>> {
        let qp = crate::point::ComplexPoint::<f64>::from_gauss(q);
        let nq = q.norm() as f64;
        dual.iter()
            .map(|&x| {
                pts.iter()
                    .zip(f)
                    .map(|(&n, &v)| {
                        // n/q = n·q̄/N(q)
                        let w = crate::point::ComplexPoint::<f64>::new(
                            (n.re() as f64 * qp.x + n.im() as f64 * qp.y) / nq,
                            (n.im() as f64 * qp.x - n.re() as f64 * qp.y) / nq,
                        );
                        let t = x.re() as f64 * w.x + x.im() as f64 * w.y;
                        v * Complex::from_polar(1.0, -std::f64::consts::TAU * t)
                    })
                    .sum()
            })
            .collect()
    }

    #[test]
    fn box_examples() {
        let b = ResidueBox::new(g(2, 1)).unwrap();
        assert_eq!(b.len(), 5);
        for p in [g(0, 0), g(0, 1), g(0, 2), g(1, 1), g(1, 2)] {
            assert!(b.index_of(p).is_some(), "{p:?}");
        }
        assert_eq!(b.reduced_len(), 4);
        let b = ResidueBox::new(g(1, 1)).unwrap();
        assert_eq!(b.points(), &[g(0, 0), g(0, 1)]);
        assert_eq!(b.dual_points(), &[g(0, 0), g(1, 0)]);
        assert!(matches!(ResidueBox::new(GaussInt::ZERO), Err(Error::ModulusZero)));
    }

    #[test]
    fn box_of_4_plus_2i_tiles_by_translates_of_2_plus_i() {
        let big = ResidueBox::new(g(4, 2)).unwrap();
        assert_eq!(big.len(), 20);
        let small = ResidueBox::new(g(2, 1)).unwrap();
        let outer = ResidueBox::new(g(2, 0)).unwrap();
        // B_{(2+i)·2} = B_{2+i} + (2+i)·B_2
        let mut tiled: Vec<GaussInt> = outer
            .points()
            .iter()
            .flat_map(|&t| small.points().iter().map(move |&s| s + g(2, 1) * t))
            .collect();
        tiled.sort_by_key(|&r| box_coordinates(r, g(4, 2)));
        assert_eq!(tiled, big.points());
    }

    #[test]
    fn dft_of_delta_and_constant() {
        let b = ResidueBox::new(g(3, 2)).unwrap();
        let mut delta = vec![c(0.0); b.len()];
        delta[b.index_of(GaussInt::ZERO).unwrap()] = c(1.0);
        for v in b.dft(&delta).unwrap() {
            assert!((v - c(1.0)).norm() < 1e-12);
        }
        let ones = vec![c(1.0); b.len()];
        let f = b.dft(&ones).unwrap();
        for (x, v) in b.dual_points().iter().zip(f) {
            let want = if x.is_zero() { b.len() as f64 } else { 0.0 };
            assert!((v - c(want)).norm() < 1e-9, "{x:?}");
        }
    }

    #[test]
    fn dft_matches_direct_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for q in [g(2, 1), g(1, 1), g(4, 2), g(5, -3)] {
            let b = ResidueBox::new(q).unwrap();
            let f: Vec<_> = (0..b.len())
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let want = dft_oracle(q, b.points(), b.dual_points(), &f);
            for (a, w) in b.dft(&f).unwrap().iter().zip(want) {
                assert!((a - w).norm() < 1e-12 * b.len() as f64);
            }
        }
    }

    #[test]
    fn round_trip_and_parseval_in_f32() {
        let b = ResidueBox::new(g(2, 3)).unwrap();
        let f: Vec<Complex<f32>> = (0..b.len())
            .map(|i| Complex::new(i as f32, -(i as f32) / 2.0))
            .collect();
        let back = b.inverse_dft(&b.dft(&f).unwrap()).unwrap();
        for (a, w) in back.iter().zip(&f) {
            assert!((a - w).norm() < 1e-3);
        }
        assert!(b.parseval_defect(&f).unwrap() < 1e-5);
        assert!(matches!(b.dft::<f32>(&f[1..]), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn orthogonality_examples() {
        let b = ResidueBox::new(g(1, 1)).unwrap();
        let v = orthogonality_check(&b, g(1, -1));
        assert!(v.pass && (v.sum_re - 2.0).abs() < 1e-12);
        let v = orthogonality_check(&b, g(1, 0));
        assert!(v.pass && v.sum_re.abs() < 1e-12 && v.expected == 0.0);
        let b = ResidueBox::new(g(6, 3)).unwrap();
        assert!(orthogonality_check(&b, GaussInt::ZERO).pass);
        for d in crate::gaussian::divisors_brute(g(6, 3)) {
            for n in [g(1, 0), g(2, -1), g(3, 0), g(6, -3), g(4, 7)] {
                assert!(orthogonality_divisor_check(&b, d, n).unwrap().pass);
            }
        }
        assert!(orthogonality_divisor_check(&b, g(1, 1), g(1, 0)).is_err());
    }

    proptest! {
        #[test]
        fn box_points_are_distinct_residues(re in -9i64..=9, im in -9i64..=9) {
            prop_assume!(re != 0 || im != 0);
            let q = g(re, im);
            let b = ResidueBox::new(q).unwrap();
            prop_assert_eq!(b.len() as u64, q.norm());
            for &p in b.points() {
                prop_assert_eq!(divide_into_box(p, q).unwrap().1, p);
            }
            prop_assert_eq!(b.dual_points().len() as u64, q.norm());
        }

        #[test]
        fn round_trip_random(re in 1i64..=10, im in -10i64..=10, seed in any::<u64>()) {
            let q = g(re, im);
            let b = ResidueBox::new(q).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let f: Vec<_> = (0..b.len())
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let back = b.inverse_dft(&b.dft(&f).unwrap()).unwrap();
            let scale: f64 = f.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            let err: f64 = back.iter().zip(&f).map(|(a, w)| (a - w).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(err <= 1e-10 * scale);
            prop_assert!(b.parseval_defect(&f).unwrap() <= 1e-10);
        }
    }
}
