//! Singular series, main terms and sector-restricted Goldbach scans over ℤ[i].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;
use crate::gaussian::GaussInt;
use crate::highlow::smoothness_exponent;
use crate::ramanujan::tau_at_prime;
use crate::sector::{
    auto_convolve, build_a, build_m, build_prime_indicator, counting_weight, half_width_for, von_mangoldt_weight,
    LatticeArray, Sector,
};
use crate::tables::ArithmeticTable;

/// FFT cells below this fraction of the largest cell are treated as candidate zeros.
pub const ZERO_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_ADMISSIBILITY_C: f64 = 1.0;
pub const DEFAULT_B_EXPONENT: f64 = 10.0;
/// The sum form enumerates `2^k` moduli for `k` primes below `Q`.
pub const MAX_SUM_FORM_PRIMES: usize = 26;
/// Lower edges of the boundary-distance strata in scan reports.
pub const STRATA_EDGES: [f64; 4] = [0.0, 0.001, 0.01, 0.1];

const ONE_PLUS_I: GaussInt = GaussInt::ONE_PLUS_I;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(x: GaussInt) -> Parity {
        if x.is_even() {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    /// The parity a sum of `order` primes lands on generically.
    pub fn for_order(order: u32) -> Parity {
        if order.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

fn check_order(order: u32) -> Result<()> {
    if !(2..=3).contains(&order) {
        return Err(Error::InvalidParameter(format!("order {order} must be 2 or 3")));
    }
    Ok(())
}

/// Truncated singular series `Π_{N(ρ)<Q}(1 + τ_ρ(x)/φ(ρ)²)` (order 2) or
/// `Π_{N(ρ)<Q}(1 + μ(ρ)τ_ρ(x)/φ(ρ)³)` (order 3), split as `h(x)·𝒢`.
#[derive(Clone, Debug)]
pub struct SingularSeries {
    order: u32,
    q_bound: u64,
    global: f64,
    /// `(ρ, φ(ρ))` for canonical primes below `Q`, norm-sorted.
    primes: Vec<(GaussInt, f64)>,
}

impl SingularSeries {
    pub fn new(table: &ArithmeticTable, order: u32, q_bound: u64) -> Result<Self> {
        check_order(order)?;
        if q_bound > table.n_max() + 1 {
            return Err(Error::OutOfRange {
                what: "Q",
                value: q_bound,
                limit: table.n_max() + 1,
            });
        }
        let primes: Vec<(GaussInt, f64)> = table
            .primes_below(q_bound)
            .iter()
            .map(|&p| Ok((p, table.phi(p)? as f64)))
            .collect::<Result<_>>()?;
        let global = primes
            .iter()
            .filter(|(p, _)| *p != ONE_PLUS_I)
            .map(|(_, phi)| 1.0 - 1.0 / (phi * phi))
            .product();
        Ok(SingularSeries {
            order,
            q_bound,
            global,
            primes,
        })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn q_bound(&self) -> u64 {
        self.q_bound
    }

    /// `𝒢 = Π_{ρ ≠ 1+i, N(ρ)<Q}(1 − 1/φ(ρ)²)`; a lower bound for every non-ramified factor of either order.
    pub fn global(&self) -> f64 {
        self.global
    }

    pub fn primes(&self) -> impl Iterator<Item = GaussInt> + '_ {
        self.primes.iter().map(|(p, _)| *p)
    }

    /// Signed coefficient `μ(ρ)^{order−2} τ_ρ(x) / φ(ρ)^order` of the prime `ρ`.
    #[inline]
    fn coefficient(&self, rho: GaussInt, phi: f64, x: GaussInt) -> f64 {
        let t = tau_at_prime(rho, x) as f64;
        if self.order == 2 {
            t / (phi * phi)
        } else {
            -t / (phi * phi * phi)
        }
    }

    fn check_target(x: GaussInt) -> Result<()> {
        if x.is_zero() {
            return Err(Error::InvalidParameter(
                "the singular series is not evaluated at x = 0".into(),
            ));
        }
        Ok(())
    }

    /// Product form.
    pub fn value(&self, x: GaussInt) -> Result<f64> {
        Self::check_target(x)?;
        Ok(self
            .primes
            .iter()
            .map(|&(rho, phi)| 1.0 + self.coefficient(rho, phi, x))
            .product())
    }

    /// `h(x) = value(x) / 𝒢`.
    pub fn local(&self, x: GaussInt) -> Result<f64> {
        Self::check_target(x)?;
        Ok(self
            .primes
            .iter()
            .map(|&(rho, phi)| {
                let f = 1.0 + self.coefficient(rho, phi, x);
                if rho == ONE_PLUS_I {
                    f
                } else {
                    f / (1.0 - 1.0 / (phi * phi))
                }
            })
            .product())
    }

    /// Sum over every square-free `Q`-smooth canonical `q` of `|μ(q)| τ_q(x)/φ(q)²` (order 2)
    /// or `μ(q) τ_q(x)/φ(q)³` (order 3), with `τ_q` factored over the primes of `q`.
    pub fn sum_form(&self, x: GaussInt) -> Result<f64> {
        Self::check_target(x)?;
        if self.primes.len() > MAX_SUM_FORM_PRIMES {
            return Err(Error::Overflow(format!(
                "sum form over 2^{} moduli (limit 2^{MAX_SUM_FORM_PRIMES})",
                self.primes.len()
            )));
        }
        let coefs: Vec<f64> = self
            .primes
            .iter()
            .map(|&(rho, phi)| self.coefficient(rho, phi, x))
            .collect();
        // terms[j] is the summand of the modulus whose prime set is the bit pattern of j.
        let mut terms = Vec::with_capacity(1 << coefs.len());
        terms.push(1.0);
        for c in coefs {
            let len = terms.len();
            for j in 0..len {
                let t = terms[j] * c;
                terms.push(t);
            }
        }
        Ok(terms.iter().sum())
    }
}

pub fn singular_series(table: &ArithmeticTable, order: u32, q_bound: u64, x: GaussInt) -> Result<f64> {
    SingularSeries::new(table, order, q_bound)?.value(x)
}

pub fn series_sum_form(table: &ArithmeticTable, order: u32, q_bound: u64, x: GaussInt) -> Result<f64> {
    SingularSeries::new(table, order, q_bound)?.sum_form(x)
}

/// `𝒢` for primes below `Q`.
pub fn global_constant(table: &ArithmeticTable, q_bound: u64) -> Result<f64> {
    Ok(SingularSeries::new(table, 2, q_bound)?.global())
}

/// `∫_0^1 (1 − u)³ cos(a u) du`.
fn cubic_hat_cosine(a: f64) -> f64 {
    if a.abs() < 1e-2 {
        let a2 = a * a;
        0.25 - a2 / 120.0 + a2 * a2 / 6720.0
    } else {
        3.0 / (a * a) - 6.0 * (1.0 - a.cos()) / a.powi(4)
    }
}

/// 1-D inverse transform of the cubed hat `max(0, 1 − 16^s|t|)³`, for `s ≥ 1`.
pub fn cubed_window_kernel(s: u32, y: i64) -> f64 {
    let w = 16f64.powi(-(s as i32));
    2.0 * w * cubic_hat_cosine(std::f64::consts::TAU * y as f64 * w)
}

/// Evaluator of `Main(x)`: the sector convolution factor times the singular series.
#[derive(Clone, Debug)]
pub struct MainTerm {
    series: SingularSeries,
    conv: LatticeArray<f64>,
    /// 1-D kernel on `[−L, L]` when the ternary factor is smoothed.
    kernel: Option<Vec<f64>>,
}

impl MainTerm {
    /// `order = 2`: `M∗M`; `order = 3`: `M∗M∗M`, or with `smooth` its convolution with the
    /// inverse transform of `Δ_{q₀}³`, `Q = 2^{q₀}`.
    pub fn new(
        table: &ArithmeticTable,
        n_bound: u64,
        sector: &Sector,
        q_bound: u64,
        order: u32,
        smooth: bool,
    ) -> Result<Self> {
        let series = SingularSeries::new(table, order, q_bound)?;
        // Convolve the 0/1 support so the counts can be rounded to exact integers.
        let mut m = build_m::<f64>(n_bound, sector);
        let wt = counting_weight(n_bound, sector);
        m.scale(1.0 / wt);
        let raw = auto_convolve(&m, order, 1.0)?.values;
        let scale = wt.powi(order as i32);
        let conv = LatticeArray::from_values(
            raw.half_width(),
            raw.values().iter().map(|v| v.round() * scale).collect(),
        )?;
        let kernel = if smooth {
            if order != 3 {
                return Err(Error::InvalidParameter(
                    "smoothing applies to the ternary main term".into(),
                ));
            }
            let s = smoothness_exponent(q_bound)?;
            if s == 0 {
                return Err(Error::InvalidParameter("smoothing needs Q ≥ 2".into()));
            }
            let l = 2 * conv.half_width() as i64;
            Some((-l..=l).map(|y| cubed_window_kernel(s, y)).collect())
        } else {
            None
        };
        Ok(MainTerm { series, conv, kernel })
    }

    pub fn series(&self) -> &SingularSeries {
        &self.series
    }

    /// The convolution factor at `x`.
    pub fn convolution(&self, x: GaussInt) -> f64 {
        let Some(k) = &self.kernel else {
            return self.conv.get(x);
        };
        let h = self.conv.half_width() as i64;
        let l = (k.len() / 2) as i64;
        let mut total = 0.0;
        for re in -h..=h {
            let ky = x.re() - re;
            if ky.abs() > l {
                continue;
            }
            let kr = k[(ky + l) as usize];
            let mut row = 0.0;
            for im in -h..=h {
                let kx = x.im() - im;
                if kx.abs() <= l {
                    row += k[(kx + l) as usize] * self.conv.get(GaussInt::new(re, im));
                }
            }
            total += kr * row;
        }
        total
    }

    pub fn at(&self, x: GaussInt) -> Result<f64> {
        let series = self.series.value(x)?;
        if series == 0.0 {
            return Ok(0.0);
        }
        Ok(self.convolution(x) * series)
    }
}

/// `Main(x)` for a single target; build a [`MainTerm`] to evaluate many.
pub fn main_term(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    q_bound: u64,
    order: u32,
    x: GaussInt,
) -> Result<f64> {
    MainTerm::new(table, n_bound, sector, q_bound, order, false)?.at(x)
}

/// Per-target counts from a scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetCount {
    pub n: GaussInt,
    /// Ordered representations as a sum of indicator points.
    pub count: u64,
    /// Normalized `A_N^{∗order}(n)`.
    pub weighted: f64,
    /// `None` on the full circle.
    pub boundary_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Exceptional {
    pub n: GaussInt,
    pub norm: u64,
    pub boundary_distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Stratum {
    pub distance_lo: f64,
    pub distance_hi: Option<f64>,
    pub targets: usize,
    pub exceptional: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramBin {
    /// Counts `c` with `lo ≤ c < hi`.
    pub lo: u64,
    pub hi: u64,
    pub targets: usize,
}

/// Median, deciles and range of a ratio sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioStats {
    pub samples: usize,
    pub median: f64,
    /// 10%, 20%, …, 90% quantiles.
    pub deciles: Vec<f64>,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

impl RatioStats {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample("no admissible targets".into()));
        }
        values.sort_by(f64::total_cmp);
        let q = |p: f64| {
            let pos = p * (values.len() - 1) as f64;
            let lo = pos.floor() as usize;
            let hi = pos.ceil() as usize;
            values[lo] + (values[hi] - values[lo]) * (pos - lo as f64)
        };
        Ok(RatioStats {
            samples: values.len(),
            median: q(0.5),
            deciles: (1..10).map(|i| q(i as f64 / 10.0)).collect(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            min: values[0],
            max: values[values.len() - 1],
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GoldbachReport {
    pub n_bound: u64,
    pub sector: Sector,
    pub parity: Parity,
    pub order: u32,
    pub norm_range: (u64, u64),
    pub use_prime_powers: bool,
    /// Targets covered by the assertions (admissible ones for ternary scans).
    pub targets: usize,
    #[serde(skip)]
    pub counts: Vec<TargetCount>,
    pub histogram: Vec<HistogramBin>,
    /// Targets whose FFT count fell below the zero threshold and were searched exactly.
    pub fft_candidates: usize,
    /// Targets whose FFT count rounds to zero.
    pub fft_zeros: Vec<GaussInt>,
    /// Candidates without a representation under exact search.
    pub exceptional: Vec<Exceptional>,
    pub strata: Vec<Stratum>,
    pub admissibility_cutoff: Option<f64>,
    /// Targets inside the boundary cutoff; never asserted on.
    pub boundary_targets: usize,
    pub boundary_exceptional: Vec<Exceptional>,
    /// Largest distance of an FFT count from the nearest integer.
    pub max_rounding_residual: f64,
    pub ratios: Option<RatioStats>,
}

impl GoldbachReport {
    pub fn exceptional_density(&self) -> f64 {
        if self.targets == 0 {
            0.0
        } else {
            self.exceptional.len() as f64 / self.targets as f64
        }
    }

    /// The FFT zeros and the exact re-verification agree exactly.
    pub fn candidates_confirmed(&self) -> bool {
        let mut a: Vec<GaussInt> = self
            .exceptional
            .iter()
            .chain(&self.boundary_exceptional)
            .map(|e| e.n)
            .collect();
        let mut b = self.fft_zeros.clone();
        a.sort_by_key(|z| (z.re(), z.im()));
        b.sort_by_key(|z| (z.re(), z.im()));
        a == b
    }
}

/// Ordered representations `n = p₁ + … + p_k` with every `pᵢ` an indicator point, by exact search.
/// Stops at the first hit unless `exhaustive`.
pub fn exact_representations(
    indicator: &LatticeArray<f64>,
    points: &[GaussInt],
    n: GaussInt,
    order: u32,
    exhaustive: bool,
) -> u64 {
    let mut hits = 0;
    if order == 2 {
        for &p in points {
            if indicator.get(n - p) != 0.0 {
                hits += 1;
                if !exhaustive {
                    return hits;
                }
            }
        }
    } else {
        for &p in points {
            hits += exact_representations(indicator, points, n - p, order - 1, exhaustive);
            if hits > 0 && !exhaustive {
                return hits;
            }
        }
    }
    hits
}

fn histogram(counts: &[TargetCount]) -> Vec<HistogramBin> {
    let mut bins: Vec<HistogramBin> = Vec::new();
    for c in counts {
        // Bin 0 holds zero counts, bin k holds [2^{k−1}, 2^k).
        let k = (64 - c.count.leading_zeros()) as usize;
        while bins.len() <= k {
            let j = bins.len();
            let (lo, hi) = if j == 0 { (0, 1) } else { (1u64 << (j - 1), 1u64 << j) };
            bins.push(HistogramBin { lo, hi, targets: 0 });
        }
        bins[k].targets += 1;
    }
    bins
}

fn stratum_index(d: Option<f64>) -> usize {
    let d = d.unwrap_or(f64::INFINITY);
    STRATA_EDGES.iter().rposition(|&e| d >= e).unwrap_or(0)
}

fn targets_in(sector: &Sector, norm_range: (u64, u64), parity: Parity) -> Vec<GaussInt> {
    let w = half_width_for(norm_range.1 + 1) as i64;
    let mut out = Vec::new();
    for re in -w..=w {
        for im in -w..=w {
            let z = GaussInt::new(re, im);
            let n = z.norm();
            if n >= norm_range.0 && n <= norm_range.1 && n > 0 && Parity::of(z) == parity && sector.contains(z) {
                out.push(z);
            }
        }
    }
    out
}

struct ScanSpec<'a> {
    table: &'a ArithmeticTable,
    n_bound: u64,
    sector: &'a Sector,
    norm_range: (u64, u64),
    order: u32,
    use_prime_powers: bool,
    cutoff: Option<f64>,
}

fn scan(spec: ScanSpec<'_>) -> Result<GoldbachReport> {
    let ScanSpec {
        table,
        n_bound,
        sector,
        norm_range,
        order,
        use_prime_powers,
        cutoff,
    } = spec;
    if norm_range.0 > norm_range.1 {
        return Err(Error::InvalidParameter(format!("empty norm range {norm_range:?}")));
    }
    let indicator = build_prime_indicator::<f64>(table, n_bound, sector, use_prime_powers)?;
    let points: Vec<GaussInt> = indicator.support().map(|(z, _)| z).collect();
    let conv = auto_convolve(&indicator, order, 1.0)?.values;
    let weighted = auto_convolve(
        &build_a::<f64>(table, n_bound, sector)?,
        order,
        von_mangoldt_weight(n_bound, sector),
    )?
    .values;
    let threshold = ZERO_THRESHOLD * conv.max_value();

    let parity = Parity::for_order(order);
    let targets = targets_in(sector, norm_range, parity);
    let counts: Vec<TargetCount> = targets
        .par_iter()
        .map(|&n| {
            let v = conv.get(n);
            Ok(TargetCount {
                n,
                count: v.round().max(0.0) as u64,
                weighted: weighted.get(n),
                boundary_distance: if sector.is_full() {
                    None
                } else {
                    Some(sector.boundary_distance(n)?)
                },
            })
        })
        .collect::<Result<_>>()?;
    let max_rounding_residual = targets
        .iter()
        .map(|&n| {
            let v = conv.get(n);
            (v - v.round()).abs()
        })
        .fold(0.0, f64::max);

    let fft_zeros: Vec<GaussInt> = counts.iter().filter(|c| c.count == 0).map(|c| c.n).collect();
    let candidates = counts.iter().filter(|c| conv.get(c.n) < threshold).count();
    let confirmed: Vec<Exceptional> = counts
        .par_iter()
        .filter(|c| conv.get(c.n) < threshold)
        .filter(|c| exact_representations(&indicator, &points, c.n, order, false) == 0)
        .map(|c| Exceptional {
            n: c.n,
            norm: c.n.norm(),
            boundary_distance: c.boundary_distance,
        })
        .collect();

    let admissible = |d: Option<f64>| cutoff.is_none_or(|t| d.is_none_or(|d| d > t));
    let (exceptional, boundary_exceptional): (Vec<_>, Vec<_>) =
        confirmed.into_iter().partition(|e| admissible(e.boundary_distance));
    let mut strata: Vec<Stratum> = STRATA_EDGES
        .iter()
        .enumerate()
        .map(|(i, &lo)| Stratum {
            distance_lo: lo,
            distance_hi: STRATA_EDGES.get(i + 1).copied(),
            targets: 0,
            exceptional: 0,
        })
        .collect();
    for c in &counts {
        strata[stratum_index(c.boundary_distance)].targets += 1;
    }
    for e in exceptional.iter().chain(&boundary_exceptional) {
        strata[stratum_index(e.boundary_distance)].exceptional += 1;
    }
    let boundary_targets = counts.iter().filter(|c| !admissible(c.boundary_distance)).count();

    Ok(GoldbachReport {
        n_bound,
        sector: *sector,
        parity,
        order,
        norm_range,
        use_prime_powers,
        targets: counts.len() - boundary_targets,
        histogram: histogram(&counts),
        counts,
        fft_candidates: candidates,
        fft_zeros,
        exceptional,
        strata,
        admissibility_cutoff: cutoff,
        boundary_targets,
        boundary_exceptional,
        max_rounding_residual,
        ratios: None,
    })
}

/// Even targets `n` with `N(n)` in the inclusive `norm_range` and `arg(n) ∈ ω`, against
/// summands of norm `< N` in the sector.
pub fn scan_binary(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    norm_range: (u64, u64),
    use_prime_powers: bool,
) -> Result<GoldbachReport> {
    scan(ScanSpec {
        table,
        n_bound,
        sector,
        norm_range,
        order: 2,
        use_prime_powers,
        cutoff: None,
    })
}

/// `C (log N)^{−B/3}`.
pub fn admissibility_cutoff(n_bound: u64, c: f64, b_exponent: f64) -> f64 {
    c * (n_bound as f64).ln().powf(-b_exponent / 3.0)
}

/// Odd targets as in [`scan_binary`]; those within the admissibility cutoff of the sector
/// boundary are reported separately and excluded from `exceptional`.
pub fn scan_ternary(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    c: f64,
    b_exponent: f64,
    norm_range: (u64, u64),
) -> Result<GoldbachReport> {
    scan(ScanSpec {
        table,
        n_bound,
        sector,
        norm_range,
        order: 3,
        use_prime_powers: false,
        cutoff: Some(admissibility_cutoff(n_bound, c, b_exponent)),
    })
}

/// Statistics of `A_N^{∗order}(x) / Main(x)` over the sampled `x` with `Main(x) > 0`.
pub fn compare_counts(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    q_bound: u64,
    order: u32,
    sample: &[GaussInt],
) -> Result<RatioStats> {
    let main = MainTerm::new(table, n_bound, sector, q_bound, order, false)?;
    let a = build_a::<f64>(table, n_bound, sector)?;
    let conv = auto_convolve(&a, order, von_mangoldt_weight(n_bound, sector))?.values;
    let mut ratios = Vec::new();
    for &x in sample {
        if x.is_zero() {
            continue;
        }
        let m = main.at(x)?;
        if m > 0.0 {
            ratios.push(conv.get(x) / m);
        }
    }
    RatioStats::from_values(ratios)
}

/// `⟨A 1_F, 1_G⟩ = Σ_{x ∈ G, y ∈ F} A(x − y)` for indicators on `[0, side)²`, row-major.
pub fn improving_pairing(a: &LatticeArray<f64>, f: &[bool], g: &[bool], side: usize) -> Result<f64> {
    let rev: Vec<f64> = (0..side * side)
        .map(|i| if f[side * side - 1 - i] { 1.0 } else { 0.0 })
        .collect();
    let gv: Vec<f64> = g.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    // corr[n + side − 1] = #{(y, x) ∈ F × G : x − y = n}
    let corr = fft::convolve_square(&gv, side, &rev, side)?;
    let out_side = 2 * side - 1;
    let off = side as i64 - 1;
    let mut total = 0.0;
    for i in 0..out_side {
        for j in 0..out_side {
            let c = corr[i * out_side + j].round();
            if c != 0.0 {
                total += c * a.get(GaussInt::new(i as i64 - off, j as i64 - off));
            }
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ImprovingReport {
    pub n_bound: u64,
    pub p: f64,
    pub pairs: usize,
    pub seed: u64,
    pub max_ratio: f64,
    pub mean_ratio: f64,
    pub ratios: Vec<f64>,
}

/// `⟨A 1_F, 1_G⟩ / (N^{1−2/p} |F|^{1/p} |G|^{1/p})` over seeded random pairs `F, G ⊂ [0, √N]²`,
/// each set drawn with its own density in `[0.01, 0.5)`.
pub fn improving_check(
    table: &ArithmeticTable,
    n_bound: u64,
    sector: &Sector,
    p: f64,
    pairs: usize,
    seed: u64,
) -> Result<ImprovingReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p = {p} must exceed 1")));
    }
    let a = build_a::<f64>(table, n_bound, sector)?;
    let side = (n_bound as f64).sqrt().floor() as usize + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<bool> {
        let density = rng.gen_range(0.01..0.5);
        (0..side * side).map(|_| rng.gen_bool(density)).collect()
    };
    let scale = (n_bound as f64).powf(1.0 - 2.0 / p);
    let mut ratios = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let f = draw(&mut rng);
        let g = draw(&mut rng);
        let nf = f.iter().filter(|&&b| b).count() as f64;
        let ng = g.iter().filter(|&&b| b).count() as f64;
        if nf == 0.0 || ng == 0.0 {
            ratios.push(0.0);
            continue;
        }
        let ip = improving_pairing(&a, &f, &g, side)?;
        ratios.push(ip / (scale * nf.powf(1.0 / p) * ng.powf(1.0 / p)));
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    let mean_ratio = if ratios.is_empty() {
        0.0
    } else {
        ratios.iter().sum::<f64>() / ratios.len() as f64
    };
    Ok(ImprovingReport {
        n_bound,
        p,
        pairs,
        seed,
        max_ratio,
        mean_ratio,
        ratios,
    })
}

/// Seeded uniform sample of targets of the given parity with `N(x)` in `[lo, hi]`.
pub fn sample_targets(
    norm_range: (u64, u64),
    parity: Parity,
    sector: &Sector,
    count: usize,
    seed: u64,
) -> Vec<GaussInt> {
    let w = half_width_for(norm_range.1 + 1) as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count.saturating_mul(10_000).max(1) {
        attempts += 1;
        let z = GaussInt::new(rng.gen_range(-w..=w), rng.gen_range(-w..=w));
        let n = z.norm();
        if n >= norm_range.0 && n <= norm_range.1 && n > 0 && Parity::of(z) == parity && sector.contains(z) {
            out.push(z);
        }
    }
    out
}
