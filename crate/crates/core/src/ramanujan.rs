//! Ramanujan sums `τ_q(x)` over ℤ[i], computed three ways, plus the Gauss-sum ratio
//! `Φ(a, q)`, the Cohen identity and the moment statistic over smooth moduli.

use num_complex::Complex;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gaussian::{gcd, GaussInt};
use crate::residue::ResidueBox;
use crate::tables::ArithmeticTable;

/// `Σ_{n ∈ 𝔸_q} e(⟨x, n/q⟩)` by direct summation over the reduced residues of `boxq`.
pub fn tau_exponential_in(boxq: &ResidueBox, x: GaussInt) -> Complex<f64> {
    let q = boxq.modulus();
    let nq = q.norm() as i128;
    boxq.reduced()
        .map(|n| {
            // N(q)·⟨x, n/q⟩ = Re(x · n̄ · q)
            let c_re = n.re() as i128 * q.re() as i128 + n.im() as i128 * q.im() as i128;
            let c_im = n.re() as i128 * q.im() as i128 - n.im() as i128 * q.re() as i128;
            let k = (x.re() as i128 * c_re - x.im() as i128 * c_im).rem_euclid(nq);
            crate::scalar::e(k as f64 / nq as f64)
        })
        .sum()
}

/// Real part of the exponential-sum route; panics if the imaginary part exceeds `1e-8·φ(q)`.
pub fn tau_exponential(q: GaussInt, x: GaussInt) -> Result<f64> {
    let boxq = ResidueBox::new(q)?;
    let v = tau_exponential_in(&boxq, x);
    assert!(
        v.im.abs() <= 1e-8 * boxq.reduced_len() as f64,
        "τ_{q}({x}) has imaginary part {}",
        v.im
    );
    Ok(v.re)
}

/// `Σ_{d | gcd(q, x̄)} μ(q/d) N(d)`.
pub fn tau_divisor(table: &ArithmeticTable, q: GaussInt, x: GaussInt) -> Result<i64> {
    let g = gcd(q, x.conj())?;
    let mut total = 0i64;
    for d in table.factorize(g)?.divisors() {
        let cofactor = q.div_exact(d).expect("d divides q");
        total += table.mu(cofactor)? as i64 * d.norm() as i64;
    }
    Ok(total)
}

/// `μ(q/g) φ(q) / φ(q/g)` with `g = gcd(q, x̄)`.
pub fn tau_multiplicative(table: &ArithmeticTable, q: GaussInt, x: GaussInt) -> Result<i64> {
    let g = gcd(q, x.conj())?;
    let cofactor = q.div_exact(g).expect("gcd divides q");
    let mu = table.mu(cofactor)? as i64;
    if mu == 0 {
        return Ok(0);
    }
    Ok(mu * (table.phi(q)? / table.phi(cofactor)?) as i64)
}

/// `τ_ρ(x)` for a prime `ρ`: `N(ρ) − 1` when `ρ | x̄`, else `−1`. Needs no table.
#[inline]
pub fn tau_at_prime(rho: GaussInt, x: GaussInt) -> i64 {
    if rho.divides(x.conj()) {
        rho.norm() as i64 - 1
    } else {
        -1
    }
}

/// Exact `Φ(a, q) = τ_q(a) / φ(q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GaussRatio {
    pub a: GaussInt,
    pub q: GaussInt,
    pub value: Ratio<i64>,
}

impl GaussRatio {
    pub fn new(table: &ArithmeticTable, a: GaussInt, q: GaussInt) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::ModulusZero);
        }
        let tau = tau_multiplicative(table, q, a)?;
        let phi = table.phi(q)? as i64;
        Ok(GaussRatio {
            a,
            q,
            value: Ratio::new(tau, phi),
        })
    }

    pub fn to_f64(self) -> f64 {
        *self.value.numer() as f64 / *self.value.denom() as f64
    }
}

/// Both sides of `Σ_{r ∈ 𝔸_{q̄}} τ_q(x + r) = μ(q) τ_q(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CohenVerdict {
    pub q: GaussInt,
    pub x: GaussInt,
    pub lhs: i64,
    pub rhs: i64,
    pub pass: bool,
}

/// Cohen identity with the box of `q̄` supplied by the caller.
pub fn cohen_identity_in(table: &ArithmeticTable, conj_box: &ResidueBox, x: GaussInt) -> Result<CohenVerdict> {
    let q = conj_box.modulus().conj();
    let mut lhs = 0i64;
    for r in conj_box.reduced() {
        lhs += tau_divisor(table, q, x + r)?;
    }
    let rhs = table.mu(q)? as i64 * tau_divisor(table, q, x)?;
    Ok(CohenVerdict {
        q,
        x,
        lhs,
        rhs,
        pass: lhs == rhs,
    })
}

pub fn cohen_identity_check(table: &ArithmeticTable, q: GaussInt, x: GaussInt) -> Result<CohenVerdict> {
    cohen_identity_in(table, &ResidueBox::new(q.conj())?, x)
}

/// Number of canonical divisors of `q`.
pub fn divisor_count(table: &ArithmeticTable, q: GaussInt) -> Result<u64> {
    Ok(table.factorize(q)?.factors.iter().map(|&(_, e)| e as u64 + 1).product())
}

/// `N⁻¹ Σ_{N(x) < N} (Σ_q |τ_q(x)|)^k` over canonical non-unit `q` with `N(q) < Q`.
pub fn bourgain_moment(table: &ArithmeticTable, n_bound: u64, q_bound: u64, k: u32) -> Result<f64> {
    if !(1..=8).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "moment order k = {k} must lie in 1..=8"
        )));
    }
    if q_bound > table.n_max() + 1 {
        return Err(Error::OutOfRange {
            what: "Q",
            value: q_bound,
            limit: table.n_max() + 1,
        });
    }
    if n_bound == 0 {
        return Err(Error::InvalidParameter("N must be positive".into()));
    }
    let moduli: Vec<(GaussInt, i64, u64)> = canonical_up_to(q_bound)
        .into_iter()
        .filter(|q| q.norm() >= 2)
        .map(|q| Ok((q, table.mu(q)? as i64, table.phi(q)?)))
        .collect::<Result<_>>()?;
    let r = (n_bound as f64).sqrt() as i64 + 1;
    let mut total = 0.0f64;
    for a in -r..=r {
        for b in -r..=r {
            let x = GaussInt::new(a, b);
            if x.norm() >= n_bound {
                continue;
            }
            let mut inner = 0i64;
            for &(q, _, phi_q) in &moduli {
                let g = gcd(q, x.conj())?;
                let cofactor = q.div_exact(g).expect("gcd divides q");
                let mu = table.mu(cofactor)? as i64;
                if mu != 0 {
                    inner += (phi_q / table.phi(cofactor)?) as i64;
                }
            }
            total += (inner as f64).powi(k as i32);
        }
    }
    Ok(total / n_bound as f64)
}

/// Canonical nonzero Gaussian integers with `N(q) < bound`, in norm order.
pub fn canonical_up_to(bound: u64) -> Vec<GaussInt> {
    let r = (bound as f64).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for re in 1..=r {
        for im in 0..=r {
            let q = GaussInt::new(re, im);
            if q.norm() < bound {
                out.push(q);
            }
        }
    }
    out.sort_by(|a, b| a.norm_order(*b));
    out
}
