//! Angular sectors, the sector measures `M_N^ω` and `A_N^ω` as lattice arrays,
//! their exponential sums and FFT auto-convolutions.

use std::f64::consts::TAU;
use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::gaussian::GaussInt;
use crate::point::{pair_lattice, ComplexPoint};
use crate::scalar::Real;
use crate::tables::ArithmeticTable;

/// A half-open arc `[θ₀, θ₁)` of directions, possibly wrapping through 0, or the full circle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    theta0: f64,
    length: f64,
    full_circle: bool,
}

impl Sector {
    pub fn full() -> Self {
        Sector {
            theta0: 0.0,
            length: TAU,
            full_circle: true,
        }
    }

    /// `[θ₀, θ₁)` with both endpoints taken mod 2π. Equal endpoints are rejected.
    pub fn new(theta0: f64, theta1: f64) -> Result<Self> {
        if !theta0.is_finite() || !theta1.is_finite() {
            return Err(Error::InvalidParameter("sector endpoints must be finite".into()));
        }
        let t0 = theta0.rem_euclid(TAU);
        let length = (theta1 - theta0).rem_euclid(TAU);
        if length == 0.0 {
            return Err(Error::EmptySector);
        }
        Ok(Sector {
            theta0: t0,
            length,
            full_circle: false,
        })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn theta1(&self) -> f64 {
        (self.theta0 + self.length).rem_euclid(TAU)
    }

    /// `|ω|`, in `(0, 2π]`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_full(&self) -> bool {
        self.full_circle
    }

    pub fn contains_angle(&self, theta: f64) -> bool {
        self.full_circle || (theta - self.theta0).rem_euclid(TAU) < self.length
    }

    /// Membership of `arg(z)`; zero is never a member.
    pub fn contains(&self, z: GaussInt) -> bool {
        match z.arg() {
            Ok(t) => self.contains_angle(t),
            Err(_) => false,
        }
    }

    /// Angular distance from `arg(z)` to the complement of the sector; infinite for the full circle.
    pub fn boundary_distance(&self, z: GaussInt) -> Result<f64> {
        let theta = z.arg()?;
        if self.full_circle {
            return Ok(f64::INFINITY);
        }
        let d = (theta - self.theta0).rem_euclid(TAU);
        Ok(if d < self.length { d.min(self.length - d) } else { 0.0 })
    }
}

/// Real values on the lattice square `[−W, W]²`, zero outside.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeArray<T> {
    half_width: usize,
    values: Vec<T>,
}

impl<T: Real> LatticeArray<T> {
    pub fn zeros(half_width: usize) -> Self {
        let side = 2 * half_width + 1;
        LatticeArray {
            half_width,
            values: vec![T::zero(); side * side],
        }
    }

    pub fn from_values(half_width: usize, values: Vec<T>) -> Result<Self> {
        let side = 2 * half_width + 1;
        if values.len() != side * side {
            return Err(Error::SizeMismatch {
                expected: side * side,
                got: values.len(),
            });
        }
        Ok(LatticeArray { half_width, values })
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn side(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Row-major values, row index `re + W`, column index `im + W`.
    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    fn offset(&self, re: i64, im: i64) -> Option<usize> {
        let w = self.half_width as i64;
        if re.abs() > w || im.abs() > w {
            return None;
        }
        Some(((re + w) as usize) * self.side() + (im + w) as usize)
    }

    #[inline]
    pub fn get(&self, z: GaussInt) -> T {
        self.offset(z.re(), z.im()).map_or(T::zero(), |i| self.values[i])
    }

    pub fn set(&mut self, z: GaussInt, v: T) -> Result<()> {
        let i = self.offset(z.re(), z.im()).ok_or(Error::OutOfRange {
            what: "lattice coordinate",
            value: z.re().unsigned_abs().max(z.im().unsigned_abs()),
            limit: self.half_width as u64,
        })?;
        self.values[i] = v;
        Ok(())
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().fold(T::zero(), |a, &b| a.max(b))
    }

    /// Nonzero cells as `(z, value)`.
    pub fn support(&self) -> impl Iterator<Item = (GaussInt, T)> + '_ {
        let w = self.half_width as i64;
        let side = self.side();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != T::zero())
            .map(move |(i, &v)| (GaussInt::new((i / side) as i64 - w, (i % side) as i64 - w), v))
    }

    /// Zero-padded copy with a larger half-width.
    pub fn widen(&self, half_width: usize) -> Self {
        assert!(half_width >= self.half_width);
        let mut out = Self::zeros(half_width);
        for (z, v) in self.support() {
            out.set(z, v).expect("fits in wider array");
        }
        out
    }

    pub fn scale(&mut self, factor: T) {
        for v in &mut self.values {
            *v = *v * factor;
        }
    }

    /// CSV rows `re,im,value` over the nonzero cells.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "re,im,value")?;
        for (z, v) in self.support() {
            writeln!(w, "{},{},{:e}", z.re(), z.im(), v.as_f64())?;
        }
        Ok(())
    }

    /// Binary dump: magic, half-width `W` (u64), dtype byte width (u8), then the row-major values, little endian.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(b"GZLATTIC")?;
        w.write_all(&(self.half_width as u64).to_le_bytes())?;
        let width = std::mem::size_of::<T>() as u8;
        w.write_all(&[width])?;
        for v in &self.values {
            match width {
                4 => w.write_all(&(v.as_f64() as f32).to_le_bytes())?,
                _ => w.write_all(&v.as_f64().to_le_bytes())?,
            }
        }
        Ok(())
    }
}

/// Every nonzero `n` with `N(n) < N` and `arg(n) ∈ ω`.
pub fn sector_points(n_bound: u64, sector: &Sector) -> Vec<GaussInt> {
    let w = half_width_for(n_bound) as i64;
    let mut pts = Vec::new();
    for re in -w..=w {
        for im in -w..=w {
            let z = GaussInt::new(re, im);
            let n = z.norm();
            if n > 0 && n < n_bound && sector.contains(z) {
                pts.push(z);
            }
        }
    }
    pts
}

/// Smallest `W` with every `N(n) < N` inside `[−W, W]²`.
pub fn half_width_for(n_bound: u64) -> usize {
    if n_bound <= 1 {
        return 0;
    }
    let mut w = ((n_bound - 1) as f64).sqrt() as u64;
    while (w + 1) * (w + 1) < n_bound {
        w += 1;
    }
    while w * w > n_bound - 1 {
        w -= 1;
    }
    w as usize
}

/// Per-point weight `|ω| / (2πN)` of the counting measure.
pub fn counting_weight(n_bound: u64, sector: &Sector) -> f64 {
    sector.length() / (TAU * n_bound as f64)
}

/// Per-unit-Λ weight `2π / (|ω| N)` of the von Mangoldt measure.
pub fn von_mangoldt_weight(n_bound: u64, sector: &Sector) -> f64 {
    TAU / (sector.length() * n_bound as f64)
}

fn check_table(table: &ArithmeticTable, n_bound: u64) -> Result<()> {
    if n_bound > table.n_max() + 1 {
        return Err(Error::OutOfRange {
            what: "N",
            value: n_bound,
            limit: table.n_max() + 1,
        });
    }
    Ok(())
}

/// `M_N^ω`: weight `|ω|/(2πN)` on each `n ≠ 0` with `N(n) < N`, `arg(n) ∈ ω`.
pub fn build_m<T: Real>(n_bound: u64, sector: &Sector) -> LatticeArray<T> {
    let mut out = LatticeArray::zeros(half_width_for(n_bound));
    let wt = T::of(counting_weight(n_bound, sector));
    for z in sector_points(n_bound, sector) {
        out.set(z, wt).expect("inside");
    }
    out
}

/// `A_N^ω`: weight `2π Λ(n) / (|ω| N)` on each `n` with `N(n) < N`, `arg(n) ∈ ω`.
pub fn build_a<T: Real>(table: &ArithmeticTable, n_bound: u64, sector: &Sector) -> Result<LatticeArray<T>> {
    check_table(table, n_bound)?;
    let mut out = LatticeArray::zeros(half_width_for(n_bound));
    let wt = von_mangoldt_weight(n_bound, sector);
    for z in sector_points(n_bound, sector) {
        let l = table.lambda_or_zero(z);
        if l != 0.0 {
            out.set(z, T::of(wt * l))?;
        }
    }
    Ok(out)
}

/// 0/1 indicator of primes (or of prime powers) `n` with `N(n) < N` and `arg(n) ∈ ω`.
pub fn build_prime_indicator<T: Real>(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    use_prime_powers: bool,
) -> Result<LatticeArray<T>> {
    check_table(table, n_bound)?;
    let mut out = LatticeArray::zeros(half_width_for(n_bound));
    for z in sector_points(n_bound, sector) {
        let hit = if use_prime_powers {
            table.lambda_or_zero(z) != 0.0
        } else {
            table.is_prime_fast(z)
        };
        if hit {
            out.set(z, T::one())?;
        }
    }
    Ok(out)
}

/// Scale factors folded into a convolution.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    /// Weight of a single input copy, e.g. `|ω|/(2πN)`.
    pub per_copy: f64,
    /// `per_copy^order`.
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct ConvolutionResult<T> {
    pub order: u32,
    pub values: LatticeArray<T>,
    pub normalization: Normalization,
}

/// Exact linear convolution via the zero-padded FFT.
pub fn convolve<T: Real>(a: &LatticeArray<T>, b: &LatticeArray<T>) -> Result<LatticeArray<T>> {
    let out = fft::convolve_square(a.values(), a.side(), b.values(), b.side())?;
    LatticeArray::from_values(a.half_width() + b.half_width(), out)
}

/// `a ∗ a` or `a ∗ a ∗ a`; `per_copy` records the weight already inside `a`.
pub fn auto_convolve<T: Real>(a: &LatticeArray<T>, order: u32, per_copy: f64) -> Result<ConvolutionResult<T>> {
    if !(2..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "convolution order {order} must be 2 or 3"
        )));
    }
    let out = fft::convolve_power(a.values(), a.side(), order)?;
    Ok(ConvolutionResult {
        order,
        values: LatticeArray::from_values(order as usize * a.half_width(), out)?,
        normalization: Normalization {
            per_copy,
            total: per_copy.powi(order as i32),
        },
    })
}

fn check_beta<T: Real>(beta: ComplexPoint<T>) -> Result<()> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter("β must be finite".into()));
    }
    if beta.norm() >= T::one() {
        return Err(Error::InvalidParameter(format!(
            "exponential sum of M needs N(β) < 1, got {}",
            beta.norm().as_f64()
        )));
    }
    Ok(())
}

/// `M̂_N^ω(β) = (|ω|/2πN) Σ_{N(n)<N, arg n ∈ ω} e(−⟨n, β⟩)`.
pub fn exp_sum_m(n_bound: u64, sector: &Sector, beta: ComplexPoint<f64>) -> Result<Complex<f64>> {
    check_beta(beta)?;
    Ok(exp_sum_m_unchecked(n_bound, sector, beta))
}

/// As [`exp_sum_m`] without the `N(β) < 1` restriction; the sum is 1-periodic in each coordinate.
pub fn exp_sum_m_unchecked(n_bound: u64, sector: &Sector, beta: ComplexPoint<f64>) -> Complex<f64> {
    let w = half_width_for(n_bound) as i64;
    let s: Complex<f64> = (-w..=w)
        .into_par_iter()
        .map(|re| {
            let mut acc = Complex::new(0.0, 0.0);
            for im in -w..=w {
                let z = GaussInt::new(re, im);
                let n = z.norm();
                if n > 0 && n < n_bound && sector.contains(z) {
                    acc += crate::scalar::e(-pair_lattice(z, beta));
                }
            }
            acc
        })
        .sum();
    s * counting_weight(n_bound, sector)
}

/// `Σ_{N(n)<N, arg n ∈ ω} Λ(n) e(⟨n, α⟩)`, unnormalized.
pub fn exp_sum_a(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    alpha: ComplexPoint<f64>,
) -> Result<Complex<f64>> {
    check_table(table, n_bound)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter("α must be finite".into()));
    }
    let w = half_width_for(n_bound) as i64;
    Ok((-w..=w)
        .into_par_iter()
        .map(|re| {
            let mut acc = Complex::new(0.0, 0.0);
            for im in -w..=w {
                let z = GaussInt::new(re, im);
                let n = z.norm();
                if n == 0 || n >= n_bound {
                    continue;
                }
                let l = table.lambda_or_zero(z);
                if l != 0.0 && sector.contains(z) {
                    acc += crate::scalar::e(pair_lattice(z, alpha)) * l;
                }
            }
            acc
        })
        .sum())
}

/// `min_x conv(x)·N / δ(x)^p` over the given targets, with `δ = 1` on the full circle.
pub fn lower_bound_constant<T: Real>(
    conv: &LatticeArray<T>,
    n_bound: u64,
    sector: &Sector,
    targets: &[GaussInt],
    delta_power: i32,
) -> Result<f64> {
    let mut best = f64::INFINITY;
    for &x in targets {
        let d = sector.boundary_distance(x)?;
        let d = if d.is_finite() { d } else { 1.0 };
        best = best.min(conv.get(x).as_f64() * n_bound as f64 / d.powi(delta_power));
    }
    if best.is_infinite() {
        return Err(Error::EmptySample("no lower-bound targets".into()));
    }
    Ok(best)
}
