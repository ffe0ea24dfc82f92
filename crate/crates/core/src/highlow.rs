//! Multipliers on the torus: the hat cutoff, windowed approximations around rational
//! points, the Lo/Hi split of the von Mangoldt multiplier and its spatial form.
//!
//! Transforms use the forward convention `f̂(ξ) = Σ f(n) e(−⟨n, ξ⟩)`, so a grid of size
//! `m` holds `f̂(j/m, k/m)` and the inverse is `f(x) = ∫ f̂(ξ) e(⟨x, ξ⟩) dξ`.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fft::fft2;
use crate::gaussian::GaussInt;
use crate::point::{pair_lattice, ComplexPoint, RationalPoint};
use crate::ramanujan::{canonical_up_to, tau_multiplicative, GaussRatio};
use crate::residue::ResidueBox;
use crate::scalar::Real;
use crate::sector::{build_a, build_m, counting_weight, sector_points, LatticeArray, Sector};
use crate::tables::ArithmeticTable;

/// Default grid resolution.
pub const DEFAULT_GRID: usize = 1024;
/// Largest grid the automatic refinement will allocate.
pub const MAX_GRID: usize = 4096;

type Point = ComplexPoint<f64>;

/// Complex samples of a function on 𝕋² at the points `(j/m, k/m)`, row-major in `j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<T> {
    m: usize,
    values: Vec<Complex<T>>,
}

impl<T: Real> GridFunction<T> {
    pub fn zeros(m: usize) -> Self {
        GridFunction {
            m,
            values: vec![Complex::new(T::zero(), T::zero()); m * m],
        }
    }

    pub fn from_values(m: usize, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != m * m {
            return Err(Error::SizeMismatch {
                expected: m * m,
                got: values.len(),
            });
        }
        Ok(GridFunction { m, values })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.values[j * self.m + k]
    }

    /// The grid point `(j/m, k/m)`.
    pub fn point(&self, j: usize, k: usize) -> ComplexPoint<T> {
        let m = T::of(self.m as f64);
        ComplexPoint::new(T::of(j as f64) / m, T::of(k as f64) / m)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm().as_f64()).fold(0.0, f64::max)
    }

    /// `m⁻² Σ |g|²`, the quadrature of `∫ |g|²`.
    pub fn mean_square(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr().as_f64()).sum::<f64>() / (self.m * self.m) as f64
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.m != other.m {
            return Err(Error::SizeMismatch {
                expected: self.m,
                got: other.m,
            });
        }
        Ok(GridFunction {
            m: self.m,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    /// Quadrature of the inverse transform at every `x mod m`, indexed `[x₁ mod m][x₂ mod m]`.
    pub fn inverse_all(&self) -> Vec<Complex<T>> {
        let mut buf = self.values.clone();
        fft2(&mut buf, self.m, true);
        let scale = T::one() / T::of((self.m * self.m) as f64);
        buf.iter_mut().for_each(|v| *v = *v * scale);
        buf
    }

    /// `m⁻² Σ_ξ g(ξ) e(⟨x, ξ⟩)`.
    pub fn inverse_at(&self, x: GaussInt) -> Complex<T> {
        let m = self.m as i64;
        let row: Vec<Complex<T>> = (0..m)
            .map(|k| crate::scalar::e(T::of((x.im() * k).rem_euclid(m) as f64 / m as f64)))
            .collect();
        let mut acc = Complex::new(T::zero(), T::zero());
        for (j, line) in self.values.chunks_exact(self.m).enumerate() {
            let inner = line
                .iter()
                .zip(&row)
                .fold(Complex::new(T::zero(), T::zero()), |s, (v, r)| s + *v * *r);
            let phase = crate::scalar::e(T::of((x.re() * j as i64).rem_euclid(m) as f64 / m as f64));
            acc = acc + inner * phase;
        }
        acc * (T::one() / T::of((self.m * self.m) as f64))
    }

    /// Binary dump: `m` as u64, then row-major `(re, im)` pairs as little-endian f64.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(&(self.m as u64).to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.re.as_f64().to_le_bytes())?;
            w.write_all(&v.im.as_f64().to_le_bytes())?;
        }
        Ok(())
    }

    /// CSV rows `xi_x,xi_y,abs` of the modulus on every `stride`-th grid point.
    pub fn write_abs_csv<W: Write>(&self, mut w: W, stride: usize) -> Result<()> {
        writeln!(w, "xi_x,xi_y,abs")?;
        let stride = stride.max(1);
        for j in (0..self.m).step_by(stride) {
            for k in (0..self.m).step_by(stride) {
                let p = self.point(j, k);
                writeln!(
                    w,
                    "{},{},{:e}",
                    p.x.as_f64(),
                    p.y.as_f64(),
                    self.get(j, k).norm().as_f64()
                )?;
            }
        }
        Ok(())
    }
}

/// `t ↦ max(0, 1 − |t|)`.
#[inline]
fn hat(t: f64) -> f64 {
    (1.0 - t.abs()).max(0.0)
}

/// Tensor product of 1-D hats; zero once either coordinate has magnitude ≥ 1.
pub fn eta(xi: Point) -> f64 {
    hat(xi.x) * hat(xi.y)
}

/// `Δ_s(ξ) = η(16^s ξ)` for the representative of `ξ` in `[−½, ½)²`.
pub fn delta(s: u32, xi: Point) -> f64 {
    let r = xi.reduce_torus();
    let scale = 16f64.powi(s as i32);
    eta(ComplexPoint::new(r.x * scale, r.y * scale))
}

/// Axis half-width `16^{−s}` of the support of `Δ_s`.
pub fn window_half_width(s: u32) -> f64 {
    16f64.powi(-(s as i32))
}

/// 1-D factor of the inverse transform of `Δ_s` at the integer `y`.
pub fn fejer_1d(s: u32, y: i64) -> f64 {
    if s == 0 {
        // Hat of half-width 1 restricted to [−½, ½).
        if y == 0 {
            0.75
        } else if y % 2 == 0 {
            0.0
        } else {
            1.0 / (std::f64::consts::PI.powi(2) * (y * y) as f64)
        }
    } else {
        let w = window_half_width(s);
        if y == 0 {
            return w;
        }
        let t = std::f64::consts::PI * w * y as f64;
        w * (t.sin() / t).powi(2)
    }
}

/// `Δ̌_s(x) = ∫ Δ_s(ξ) e(⟨x, ξ⟩) dξ`, a product of Fejér-type kernels.
pub fn fejer_kernel(s: u32, x: GaussInt) -> f64 {
    fejer_1d(s, x.re()) * fejer_1d(s, x.im())
}

/// Smallest grid with four samples across the `Δ_s` window: `4·16^s`.
pub fn required_grid(s: u32) -> u64 {
    4u64.saturating_mul(16u64.saturating_pow(s))
}

/// Applies the refinement rule: keeps `m` if it resolves `Δ_s`, otherwise raises it up to [`MAX_GRID`].
pub fn resolve_grid(m: usize, s: u32) -> Result<usize> {
    let required = required_grid(s);
    if m as u64 >= required {
        Ok(m)
    } else if required <= MAX_GRID as u64 {
        Ok(required as usize)
    } else {
        Err(Error::Resolution {
            requested: m,
            required: usize::try_from(required).unwrap_or(usize::MAX),
        })
    }
}

fn check_grid(m: usize) -> Result<()> {
    if m == 0 || m > MAX_GRID {
        return Err(Error::InvalidParameter(format!(
            "grid size {m} must lie in 1..={MAX_GRID}"
        )));
    }
    Ok(())
}

/// Transform of a lattice array on the grid, optionally modulated by `e(⟨n, c⟩)`,
/// which shifts the transform to `f̂(ξ − c)`.
pub fn lattice_hat(arr: &LatticeArray<f64>, m: usize, shift: Option<Point>) -> Result<GridFunction<f64>> {
    check_grid(m)?;
    let mut buf = vec![Complex::new(0.0, 0.0); m * m];
    let mi = m as i64;
    for (z, v) in arr.support() {
        let phase = shift.map_or(Complex::new(1.0, 0.0), |c| crate::scalar::e(pair_lattice(z, c)));
        let j = z.re().rem_euclid(mi) as usize;
        let k = z.im().rem_euclid(mi) as usize;
        buf[j * m + k] += phase * v;
    }
    fft2(&mut buf, m, false);
    GridFunction::from_values(m, buf)
}

/// `M̂_N^ω` on the grid.
pub fn m_hat_grid(n_bound: u64, sector: &Sector, m: usize) -> Result<GridFunction<f64>> {
    lattice_hat(&build_m(n_bound, sector), m, None)
}

/// `Â_N^ω` on the grid.
pub fn a_hat_grid(table: &ArithmeticTable, n_bound: u64, sector: &Sector, m: usize) -> Result<GridFunction<f64>> {
    lattice_hat(&build_a(table, n_bound, sector)?, m, None)
}

/// `L̂^{a,q}(ξ) = Φ(a, q̄) M̂_N^ω(ξ − a/q)` on the grid.
pub fn build_l(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    aq: RationalPoint,
    m: usize,
) -> Result<GridFunction<f64>> {
    let coef = GaussRatio::new(table, aq.a(), aq.q().conj())?.to_f64();
    let mut g = lattice_hat(&build_m(n_bound, sector), m, Some(aq.to_point()))?;
    g.values.iter_mut().for_each(|v| *v *= coef);
    Ok(g)
}

/// A window term `coef · M̂(ξ − c) Δ_s(ξ − c)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WindowTerm {
    pub center: RationalPoint,
    pub coefficient: f64,
    pub s: u32,
}

/// `(a/q, Φ(a, q̄))` for canonical square-free `q` with `lo ≤ N(q) < hi` and `a ∈ 𝔸_q`.
pub fn rational_terms(table: &ArithmeticTable, lo: u64, hi: u64, s: u32) -> Result<Vec<WindowTerm>> {
    let mut out = Vec::new();
    for q in canonical_up_to(hi).into_iter().filter(|q| q.norm() >= lo) {
        if table.mu(q)? == 0 {
            continue;
        }
        let boxq = ResidueBox::new(q)?;
        for a in boxq.reduced() {
            out.push(WindowTerm {
                center: RationalPoint::new(a, q)?,
                coefficient: GaussRatio::new(table, a, q.conj())?.to_f64(),
                s,
            });
        }
    }
    Ok(out)
}

/// Grid indices `i` with `|i/m − c|` (on the circle) strictly inside the half-width `h`.
fn window_indices(c: f64, h: f64, m: usize) -> Vec<usize> {
    let mf = m as f64;
    let lo = ((c - h) * mf).floor() as i64;
    let hi = ((c + h) * mf).ceil() as i64;
    let mut out: Vec<usize> = (lo..=hi)
        .filter(|&i| {
            let d = (i as f64 / mf - c).abs();
            d < h
        })
        .map(|i| i.rem_euclid(m as i64) as usize)
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Sums the window terms on the grid. Each term is evaluated either by direct summation over
/// the lattice support at the window points or, for wide windows, from a shifted FFT.
pub fn windowed_sum(n_bound: u64, sector: &Sector, terms: &[WindowTerm], m: usize) -> Result<GridFunction<f64>> {
    check_grid(m)?;
    let pts = sector_points(n_bound, sector);
    let wt = counting_weight(n_bound, sector);
    let m_arr = build_m::<f64>(n_bound, sector);
    let mut grid = GridFunction::<f64>::zeros(m);
    let fft_cost = (m * m) as f64 * (m as f64).log2() * 8.0;
    for term in terms {
        let c: Point = term.center.to_point();
        let h = window_half_width(term.s);
        let rows = window_indices(c.x, h, m);
        let cols = window_indices(c.y, h, m);
        let direct_cost = (rows.len() * cols.len() * pts.len()) as f64;
        let value_at = |j: usize, k: usize, mhat: Complex<f64>| -> Complex<f64> {
            let xi = grid.point(j, k);
            mhat * (term.coefficient * delta(term.s, xi - c))
        };
        let mut updates = Vec::with_capacity(rows.len() * cols.len());
        if direct_cost > fft_cost {
            let shifted = lattice_hat(&m_arr, m, Some(c))?;
            for &j in &rows {
                for &k in &cols {
                    updates.push((j, k, value_at(j, k, shifted.get(j, k))));
                }
            }
        } else {
            let cells: Vec<(usize, usize)> = rows.iter().flat_map(|&j| cols.iter().map(move |&k| (j, k))).collect();
            updates = cells
                .par_iter()
                .map(|&(j, k)| {
                    let beta = grid.point(j, k) - c;
                    let mut acc = Complex::new(0.0, 0.0);
                    for &n in &pts {
                        acc += crate::scalar::e(-pair_lattice(n, beta));
                    }
                    (j, k, value_at(j, k, acc * wt))
                })
                .collect();
        }
        for (j, k, v) in updates {
            grid.values[j * m + k] += v;
        }
    }
    Ok(grid)
}

/// Largest number of window terms simultaneously nonzero at a grid point.
pub fn max_active_terms(terms: &[WindowTerm], m: usize) -> usize {
    let mut counts = std::collections::HashMap::<(usize, usize), usize>::new();
    for term in terms {
        let c: Point = term.center.to_point();
        let h = window_half_width(term.s);
        for j in window_indices(c.x, h, m) {
            for k in window_indices(c.y, h, m) {
                let xi = ComplexPoint::new(j as f64 / m as f64, k as f64 / m as f64);
                if delta(term.s, xi - c) > 0.0 {
                    *counts.entry((j, k)).or_default() += 1;
                }
            }
        }
    }
    counts.values().copied().max().unwrap_or(0)
}

/// `q₀` with `Q = 2^{q₀}`.
pub fn smoothness_exponent(q_bound: u64) -> Result<u32> {
    if q_bound == 0 || !q_bound.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("Q = {q_bound} must be a power of two")));
    }
    Ok(q_bound.trailing_zeros())
}

/// The Lo window terms: every reduced `a/q` with `N(q) < Q`, windowed by `Δ_{q₀}`.
pub fn lo_terms(table: &ArithmeticTable, q_bound: u64) -> Result<Vec<WindowTerm>> {
    let q0 = smoothness_exponent(q_bound)?;
    rational_terms(table, 1, q_bound, q0)
}

/// `L̂o(ξ) = Σ_{N(q)<Q} Σ_{a ∈ 𝔸_q} Φ(a, q̄) M̂(ξ − a/q) Δ_{q₀}(ξ − a/q)`.
/// The grid is refined to resolve `Δ_{q₀}`; the returned grid carries the size used.
pub fn build_lo(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    q_bound: u64,
    m: usize,
) -> Result<GridFunction<f64>> {
    let q0 = smoothness_exponent(q_bound)?;
    let m = resolve_grid(m, q0)?;
    windowed_sum(n_bound, sector, &lo_terms(table, q_bound)?, m)
}

/// `Ĥi = Â_N − L̂o` on the (refined) grid.
pub fn build_hi(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    q_bound: u64,
    m: usize,
) -> Result<GridFunction<f64>> {
    let lo = build_lo(table, n_bound, sector, q_bound, m)?;
    a_hat_grid(table, n_bound, sector, lo.m())?.sub(&lo)
}

/// `(M_N^ω ∗ Δ̌_s)(x)` by direct summation over the support of `M`.
pub fn smoothed_m(n_bound: u64, sector: &Sector, s: u32, x: GaussInt) -> f64 {
    let wt = counting_weight(n_bound, sector);
    sector_points(n_bound, sector)
        .iter()
        .map(|&n| fejer_kernel(s, x - n))
        .sum::<f64>()
        * wt
}

/// `Σ_{N(q)<Q} μ(q) τ_q(x) / φ(q)` over canonical `q`.
pub fn lo_arithmetic_factor(table: &ArithmeticTable, q_bound: u64, x: GaussInt) -> Result<f64> {
    let mut total = 0.0;
    for q in canonical_up_to(q_bound) {
        let mu = table.mu(q)?;
        if mu != 0 {
            total += mu as f64 * tau_multiplicative(table, q, x)? as f64 / table.phi(q)? as f64;
        }
    }
    Ok(total)
}

/// Spatial form of Lo: `(M ∗ Δ̌_{q₀})(x) · Σ_{N(q)<Q} μ(q) τ_q(x) / φ(q)`.
pub fn lo_spatial(table: &ArithmeticTable, n_bound: u64, sector: &Sector, q_bound: u64, x: GaussInt) -> Result<f64> {
    let q0 = smoothness_exponent(q_bound)?;
    if q_bound > table.n_max() + 1 {
        return Err(Error::OutOfRange {
            what: "Q",
            value: q_bound,
            limit: table.n_max() + 1,
        });
    }
    let arith = lo_arithmetic_factor(table, q_bound, x)?;
    if arith == 0.0 {
        return Ok(0.0);
    }
    Ok(smoothed_m(n_bound, sector, q0, x) * arith)
}

/// Outcome of [`kernel_error`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelError {
    pub error: f64,
    pub m: usize,
    pub s_max: u32,
    pub sup_a: f64,
    pub sup_b: f64,
    pub terms: usize,
}

/// The window terms of `B̂_N` up to shell `s_max`: `a/q` with `2^s ≤ N(q) < 2^{s+1}` windowed by `Δ_s`.
pub fn kernel_terms(table: &ArithmeticTable, s_max: u32) -> Result<Vec<WindowTerm>> {
    let mut terms = Vec::new();
    for s in 0..=s_max {
        terms.extend(rational_terms(table, 1 << s, 1 << (s + 1), s)?);
    }
    Ok(terms)
}

/// `max_ξ |Â_N(ξ) − B̂_N(ξ)|` on the grid with `B̂_N` truncated at `s_max`.
pub fn kernel_error(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    m: usize,
    s_max: u32,
) -> Result<KernelError> {
    let m = resolve_grid(m, s_max)?;
    let terms = kernel_terms(table, s_max)?;
    let b = windowed_sum(n_bound, sector, &terms, m)?;
    let a = a_hat_grid(table, n_bound, sector, m)?;
    Ok(KernelError {
        error: a.sub(&b)?.sup_norm(),
        m,
        s_max,
        sup_a: a.sup_norm(),
        sup_b: b.sup_norm(),
        terms: terms.len(),
    })
}
