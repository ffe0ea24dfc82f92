//! Sieved arithmetic data on ℤ[i]: Gaussian primes, Λ, μ, φ, factorizations and r₂.
//!
//! Values are stored once per canonical representative (`re > 0, im ≥ 0`); lookups
//! canonicalize first, so every stored function is associate-invariant by construction.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::{GaussInt, Unit};

const NO_FACTOR: u32 = u32::MAX;
const FLAG_PRIME: u8 = 1;
const FLAG_PRIME_POWER: u8 = 2;

/// Default memory budget for [`ArithmeticTable::build`].
pub const DEFAULT_BUDGET_BYTES: u64 = 4 << 30;

const CACHE_MAGIC: &[u8; 8] = b"GZTABLE\0";
const CACHE_VERSION: u32 = 1;
const CACHE_LITTLE_ENDIAN: u8 = b'L';

/// `z = unit · Π primeᵉ` with canonical primes in increasing norm order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factorization {
    pub unit: Unit,
    pub factors: Vec<(GaussInt, u32)>,
}

impl Factorization {
    pub fn product(&self) -> GaussInt {
        self.factors
            .iter()
            .fold(self.unit.value(), |acc, &(p, e)| (0..e).fold(acc, |acc, _| acc * p))
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// All canonical divisors, including 1 and the canonical form of the number itself.
    pub fn divisors(&self) -> Vec<GaussInt> {
        let mut out = vec![GaussInt::ONE];
        for &(p, e) in &self.factors {
            let len = out.len();
            let mut power = GaussInt::ONE;
            for _ in 0..e {
                power = power * p;
                for i in 0..len {
                    out.push((out[i] * power).canonical());
                }
            }
        }
        out.sort_by(|a, b| a.norm_order(*b));
        out
    }
}

/// Precomputed arithmetic functions for every canonical `z` with `0 < N(z) ≤ n_max`.
#[derive(Clone, Debug)]
pub struct ArithmeticTable {
    n_max: u64,
    side: i64,
    primes: Vec<GaussInt>,
    spf: Vec<u32>,
    lambda: Vec<f64>,
    mu: Vec<i8>,
    phi: Vec<u64>,
    flags: Vec<u8>,
    r2: Vec<u32>,
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn rational_sieve(limit: u64) -> Vec<bool> {
    let n = limit as usize;
    let mut is_p = vec![true; n + 1];
    is_p[0] = false;
    if n >= 1 {
        is_p[1] = false;
    }
    let mut i = 2;
    while i * i <= n {
        if is_p[i] {
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    is_p
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128;
    let mut b128 = (b % m) as u128;
    let m128 = m as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m128;
        }
        b128 = b128 * b128 % m128;
        e >>= 1;
    }
    b = r as u64;
    b
}

/// `a² + b² = p` with `a > b > 0` for a prime `p ≡ 1 (mod 4)`, by Cornacchia's method.
pub fn two_squares(p: u64) -> Option<(u64, u64)> {
    if p % 4 != 1 {
        return None;
    }
    // A square root of -1 mod p from any quadratic non-residue.
    let t = (2..p).find_map(|c| {
        let s = pow_mod(c, (p - 1) / 4, p);
        (s * s % p == p - 1).then_some(s)
    })?;
    let bound = isqrt(p);
    let (mut a, mut b) = (p, t);
    while b > bound {
        let r = a % b;
        a = b;
        b = r;
    }
    let c2 = p - b * b;
    let c = isqrt(c2);
    if c * c != c2 {
        return None;
    }
    Some((b.max(c), b.min(c)))
}

impl ArithmeticTable {
    /// Sieves with the default memory budget.
    pub fn build(n_max: u64) -> Result<Self> {
        Self::build_with_budget(n_max, DEFAULT_BUDGET_BYTES)
    }

    /// Bytes needed for a table of bound `n_max`.
    pub fn required_bytes(n_max: u64) -> u64 {
        let side = isqrt(n_max);
        let cells = side * (side + 1);
        // spf + lambda + mu + phi + flags per cell, r₂ and the rational sieve per integer.
        cells * (4 + 8 + 1 + 8 + 1) + (n_max + 1) * (4 + 1)
    }

    pub fn build_with_budget(n_max: u64, budget_bytes: u64) -> Result<Self> {
        if n_max < 2 {
            return Err(Error::InvalidParameter(format!(
                "table bound n_max = {n_max} must be at least 2"
            )));
        }
        let required = Self::required_bytes(n_max);
        if required > budget_bytes || n_max > (1u64 << 40) {
            return Err(Error::Capacity {
                required_bytes: required,
                budget_bytes,
                hint: format!("lower n_max (currently {n_max}) or raise the memory budget"),
            });
        }

        let side = isqrt(n_max) as i64;
        let is_rational_prime = rational_sieve(n_max);
        let mut primes = Vec::new();
        for p in 2..=n_max {
            if !is_rational_prime[p as usize] {
                continue;
            }
            match p % 4 {
                2 => primes.push(GaussInt::ONE_PLUS_I),
                1 => {
                    let (a, b) = two_squares(p).expect("p ≡ 1 mod 4 is a sum of two squares");
                    primes.push(GaussInt::new(a as i64, b as i64));
                    primes.push(GaussInt::new(b as i64, a as i64));
                }
                _ => {
                    if p.checked_mul(p).is_some_and(|n| n <= n_max) {
                        primes.push(GaussInt::new(p as i64, 0));
                    }
                }
            }
        }
        primes.sort_by(|a, b| a.norm_order(*b));

        let cells = (side * (side + 1)) as usize;
        let mut spf = vec![NO_FACTOR; cells];
        let index = |z: GaussInt| ((z.re() - 1) * (side + 1) + z.im()) as usize;
        for (pi, &rho) in primes.iter().enumerate() {
            let bound = n_max / rho.norm();
            let r = isqrt(bound) as i64;
            for re in 1..=r {
                let rem = bound - (re * re) as u64;
                let top = isqrt(rem) as i64;
                for im in 0..=top {
                    let z = (rho * GaussInt::new(re, im)).canonical();
                    let slot = &mut spf[index(z)];
                    if *slot == NO_FACTOR {
                        *slot = pi as u32;
                    }
                }
            }
        }

        let mut lambda = vec![0.0f64; cells];
        let mut mu = vec![0i8; cells];
        let mut phi = vec![0u64; cells];
        let mut flags = vec![0u8; cells];
        let row = (side + 1) as usize;
        lambda
            .par_chunks_mut(row)
            .zip(mu.par_chunks_mut(row))
            .zip(phi.par_chunks_mut(row))
            .zip(flags.par_chunks_mut(row))
            .enumerate()
            .for_each(|(r, (((lam, mu), phi), flags))| {
                let re = r as i64 + 1;
                for im in 0..=side {
                    let z = GaussInt::new(re, im);
                    if z.norm() > n_max {
                        continue;
                    }
                    let (l, m, f, fl) = cell_values(z, &primes, &spf, side);
                    let c = im as usize;
                    lam[c] = l;
                    mu[c] = m;
                    phi[c] = f;
                    flags[c] = fl;
                }
            });

        let mut r2 = vec![0u32; n_max as usize + 1];
        for a in -side..=side {
            let rem = n_max - (a * a) as u64;
            let top = isqrt(rem) as i64;
            for b in -top..=top {
                r2[(a * a + b * b) as usize] += 1;
            }
        }

        Ok(ArithmeticTable {
            n_max,
            side,
            primes,
            spf,
            lambda,
            mu,
            phi,
            flags,
            r2,
        })
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    /// Canonical Gaussian primes with `N(ρ) ≤ n_max`, ordered by norm, then `re`, then `im`.
    pub fn primes(&self) -> &[GaussInt] {
        &self.primes
    }

    /// Canonical primes with `N(ρ) < bound`.
    pub fn primes_below(&self, bound: u64) -> &[GaussInt] {
        let end = self.primes.partition_point(|p| p.norm() < bound);
        &self.primes[..end]
    }

    #[inline]
    fn slot(&self, z: GaussInt) -> Option<usize> {
        let n = z.norm();
        if n == 0 || n > self.n_max {
            return None;
        }
        let c = z.canonical();
        Some(((c.re() - 1) * (self.side + 1) + c.im()) as usize)
    }

    fn checked_slot(&self, z: GaussInt) -> Result<usize> {
        self.slot(z).ok_or(Error::OutOfRange {
            what: "N(z)",
            value: z.norm(),
            limit: self.n_max,
        })
    }

    pub fn contains(&self, z: GaussInt) -> bool {
        self.slot(z).is_some()
    }

    /// von Mangoldt: `log N(ρ)` on unit multiples of prime powers, else 0.
    pub fn lambda(&self, z: GaussInt) -> Result<f64> {
        Ok(self.lambda[self.checked_slot(z)?])
    }

    pub fn mu(&self, z: GaussInt) -> Result<i8> {
        Ok(self.mu[self.checked_slot(z)?])
    }

    pub fn phi(&self, z: GaussInt) -> Result<u64> {
        Ok(self.phi[self.checked_slot(z)?])
    }

    pub fn is_prime(&self, z: GaussInt) -> Result<bool> {
        Ok(self.flags[self.checked_slot(z)?] & FLAG_PRIME != 0)
    }

    pub fn is_prime_power(&self, z: GaussInt) -> Result<bool> {
        Ok(self.flags[self.checked_slot(z)?] & FLAG_PRIME_POWER != 0)
    }

    /// Unchecked-range convenience for hot loops: zero outside the table.
    #[inline]
    pub fn lambda_or_zero(&self, z: GaussInt) -> f64 {
        self.slot(z).map_or(0.0, |s| self.lambda[s])
    }

    #[inline]
    pub fn is_prime_fast(&self, z: GaussInt) -> bool {
        self.slot(z).is_some_and(|s| self.flags[s] & FLAG_PRIME != 0)
    }

    pub fn factorize(&self, z: GaussInt) -> Result<Factorization> {
        self.checked_slot(z)?;
        let mut rest = z;
        let mut factors: Vec<(GaussInt, u32)> = Vec::new();
        loop {
            let c = rest.canonical();
            if c == GaussInt::ONE {
                break;
            }
            let rho = self.primes[self.spf[self.slot(c).expect("divisor in range")] as usize];
            rest = rest.div_exact(rho).expect("smallest prime factor divides");
            match factors.last_mut() {
                Some((p, e)) if *p == rho => *e += 1,
                _ => factors.push((rho, 1)),
            }
        }
        let unit = Unit::from_gauss(rest).expect("cofactor is a unit");
        Ok(Factorization { unit, factors })
    }

    /// `|{m ∈ ℤ[i] : N(m) = n}|`.
    pub fn r2(&self, n: u64) -> Result<u64> {
        self.r2.get(n as usize).map(|&c| c as u64).ok_or(Error::OutOfRange {
            what: "n",
            value: n,
            limit: self.n_max,
        })
    }

    /// Canonical square-free `z` with every prime factor of norm `< q_bound` and `N(z) < norm_cap`.
    pub fn smooth_moduli(&self, q_bound: u64, norm_cap: u64) -> Result<Vec<GaussInt>> {
        if q_bound > self.n_max + 1 {
            return Err(Error::OutOfRange {
                what: "Q",
                value: q_bound,
                limit: self.n_max + 1,
            });
        }
        let primes = self.primes_below(q_bound);
        let mut out = Vec::new();
        fn walk(primes: &[GaussInt], start: usize, acc: GaussInt, cap: u64, out: &mut Vec<GaussInt>) {
            if acc.norm() >= cap {
                return;
            }
            out.push(acc.canonical());
            for (i, &p) in primes.iter().enumerate().skip(start) {
                if (acc.norm() as u128) * (p.norm() as u128) >= cap as u128 {
                    // Primes are norm-sorted; later ones only get larger.
                    break;
                }
                walk(primes, i + 1, acc * p, cap, out);
            }
        }
        walk(primes, 0, GaussInt::ONE, norm_cap, &mut out);
        out.sort_by(|a, b| a.norm_order(*b));
        Ok(out)
    }

    /// Writes the versioned binary cache.
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&[CACHE_LITTLE_ENDIAN, 0, 0, 0])?;
        w.write_all(&self.n_max.to_le_bytes())?;
        w.write_all(&(self.spf.len() as u64).to_le_bytes())?;
        w.write_all(&(self.primes.len() as u64).to_le_bytes())?;
        for p in &self.primes {
            w.write_all(&p.re().to_le_bytes())?;
            w.write_all(&p.im().to_le_bytes())?;
        }
        // Fixed-width 24-byte cell records.
        for i in 0..self.spf.len() {
            w.write_all(&self.spf[i].to_le_bytes())?;
            w.write_all(&[self.mu[i] as u8, self.flags[i], 0, 0])?;
            w.write_all(&self.phi[i].to_le_bytes())?;
            w.write_all(&self.lambda[i].to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a cache written by [`ArithmeticTable::save`], validating the header.
    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::CacheFormat("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::CacheFormat(format!(
                "unsupported version {version}, expected {CACHE_VERSION}"
            )));
        }
        let mut endian = [0u8; 4];
        r.read_exact(&mut endian)?;
        if endian[0] != CACHE_LITTLE_ENDIAN {
            return Err(Error::CacheFormat("unsupported endianness".into()));
        }
        let n_max = read_u64(&mut r)?;
        let cells = read_u64(&mut r)? as usize;
        let n_primes = read_u64(&mut r)? as usize;
        let side = isqrt(n_max) as i64;
        if n_max < 2 || cells != (side * (side + 1)) as usize {
            return Err(Error::CacheFormat("cell count does not match n_max".into()));
        }
        let mut primes = Vec::with_capacity(n_primes);
        for _ in 0..n_primes {
            let re = read_u64(&mut r)? as i64;
            let im = read_u64(&mut r)? as i64;
            primes.push(GaussInt::try_new(re, im).map_err(|e| Error::CacheFormat(e.to_string()))?);
        }
        let mut spf = Vec::with_capacity(cells);
        let mut mu = Vec::with_capacity(cells);
        let mut flags = Vec::with_capacity(cells);
        let mut phi = Vec::with_capacity(cells);
        let mut lambda = Vec::with_capacity(cells);
        let mut rec = [0u8; 24];
        for _ in 0..cells {
            r.read_exact(&mut rec)?;
            let s = u32::from_le_bytes(rec[0..4].try_into().unwrap());
            if s != NO_FACTOR && s as usize >= n_primes {
                return Err(Error::CacheFormat("prime index out of range".into()));
            }
            spf.push(s);
            mu.push(rec[4] as i8);
            flags.push(rec[5]);
            phi.push(u64::from_le_bytes(rec[8..16].try_into().unwrap()));
            lambda.push(f64::from_le_bytes(rec[16..24].try_into().unwrap()));
        }
        let mut r2 = vec![0u32; n_max as usize + 1];
        for a in -side..=side {
            let top = isqrt(n_max - (a * a) as u64) as i64;
            for b in -top..=top {
                r2[(a * a + b * b) as usize] += 1;
            }
        }
        Ok(ArithmeticTable {
            n_max,
            side,
            primes,
            spf,
            lambda,
            mu,
            phi,
            flags,
            r2,
        })
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

/// (Λ, μ, φ, flags) of a canonical `z`, from the smallest-prime-factor chain.
fn cell_values(z: GaussInt, primes: &[GaussInt], spf: &[u32], side: i64) -> (f64, i8, u64, u8) {
    let index = |c: GaussInt| ((c.re() - 1) * (side + 1) + c.im()) as usize;
    let mut rest = z;
    let mut distinct = 0u32;
    let mut squarefree = true;
    let mut phi = 1u64;
    let mut last: Option<GaussInt> = None;
    let mut total_exponent = 0u32;
    loop {
        let c = rest.canonical();
        if c == GaussInt::ONE {
            break;
        }
        let rho = primes[spf[index(c)] as usize];
        rest = rest.div_exact(rho).expect("smallest prime factor divides");
        total_exponent += 1;
        if last == Some(rho) {
            squarefree = false;
            phi *= rho.norm();
        } else {
            distinct += 1;
            phi *= rho.norm() - 1;
            last = Some(rho);
        }
    }
    let mu = if !squarefree {
        0
    } else if distinct.is_multiple_of(2) {
        1
    } else {
        -1
    };
    let (lambda, mut flags) = match (distinct, last) {
        (1, Some(rho)) => ((rho.norm() as f64).ln(), FLAG_PRIME_POWER),
        _ => (0.0, 0),
    };
    if distinct == 1 && total_exponent == 1 {
        flags |= FLAG_PRIME;
    }
    (lambda, mu, phi, flags)
}
