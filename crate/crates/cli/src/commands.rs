//! One function per experiment. Each returns JSON results, the names of failed invariants
//! and its CSV files.

use gaussprimes::goldbach::{self, Parity, SingularSeries};
use gaussprimes::highlow::{self, lo_terms, max_active_terms};
use gaussprimes::ramanujan::bourgain_moment;
use gaussprimes::sector::exp_sum_m;
use gaussprimes::{ArithmeticTable, ComplexPoint, GaussInt, Sector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::report::{CsvFile, Outcome, Report};
use crate::suites::{identity_suites, series_suite};
use crate::{is_gaussian_prime_trial, loglog_slope, CliError};

type Produced = (Value, Vec<String>, Vec<CsvFile>);

pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let sector = cfg.sector.to_sector()?;
    let (results, failures, csv) = match cfg.command {
        Command::ExpDecay => exp_decay(cfg, &sector)?,
        cmd => {
            let table = ArithmeticTable::build(cfg.table_size())?;
            match cmd {
                Command::Sieve => sieve(cfg, &table)?,
                Command::VerifyIdentities => verify_identities(cfg, &table)?,
                Command::RamanujanMoments => ramanujan_moments(cfg, &table)?,
                Command::HighlowReport => highlow_report(cfg, &table, &sector)?,
                Command::KernelError => kernel_error(cfg, &table, &sector)?,
                Command::ImprovingCheck => improving(cfg, &table, &sector)?,
                Command::GoldbachScan => goldbach_scan(cfg, &table, &sector)?,
                Command::SingularSeries => singular_series(cfg, &table)?,
                Command::CompareCounts => compare_counts(cfg, &table, &sector)?,
                Command::ExpDecay => unreachable!(),
            }
        }
    };
    Ok(Outcome {
        report: Report::new(cfg, results, failures),
        csv,
    })
}

fn csv_name(cfg: &RunConfig, suffix: &str) -> String {
    format!("{}-{suffix}.csv", cfg.command.name())
}

fn sieve(cfg: &RunConfig, table: &ArithmeticTable) -> Result<Produced, CliError> {
    let n_max = table.n_max();
    let r2_sum: u64 = (0..n_max).map(|n| table.r2(n)).sum::<Result<u64, _>>()?;
    let check_bound = n_max.min(10_000);
    let w = (check_bound as f64).sqrt() as i64 + 1;
    let mut checked = 0u64;
    let mut mismatches = Vec::new();
    for re in -w..=w {
        for im in -w..=w {
            let z = GaussInt::new(re, im);
            if z.is_zero() || z.norm() > check_bound {
                continue;
            }
            checked += 1;
            if table.is_prime(z)? != is_gaussian_prime_trial(z) {
                mismatches.push(z);
            }
        }
    }
    let mut failures = Vec::new();
    if !mismatches.is_empty() {
        failures.push(format!(
            "sieve_trial_division: {} mismatches, first {}",
            mismatches.len(),
            mismatches[0]
        ));
    }
    let mut primes = CsvFile::new(csv_name(cfg, "primes"), "re,im,norm");
    for p in table.primes() {
        primes.push(format!("{},{},{}", p.re(), p.im(), p.norm()));
    }
    let results = json!({
        "n_max": n_max,
        "canonical_primes": table.primes().len(),
        "r2_mean": r2_sum as f64 / n_max as f64,
        "trial_division_checked": checked,
        "trial_division_mismatches": mismatches.len(),
        "table_bytes": ArithmeticTable::required_bytes(n_max),
    });
    Ok((results, failures, vec![primes]))
}

fn verify_identities(cfg: &RunConfig, table: &ArithmeticTable) -> Result<Produced, CliError> {
    let suites = identity_suites(table, table.n_max())?;
    let failures = suites
        .iter()
        .filter(|s| s.asserted && !s.pass())
        .map(|s| format!("{}: {}", s.name, s.first_failure.clone().unwrap_or_default()))
        .collect();
    let mut csv = CsvFile::new(csv_name(cfg, "suites"), "suite,checked,passed,asserted");
    for s in &suites {
        csv.push(format!("{},{},{},{}", s.name, s.checked, s.passed, s.asserted));
    }
    Ok((
        json!({ "norm_max": table.n_max(), "suites": suites }),
        failures,
        vec![csv],
    ))
}

fn ramanujan_moments(cfg: &RunConfig, table: &ArithmeticTable) -> Result<Produced, CliError> {
    let qs: Vec<u64> = (2..=cfg.q.trailing_zeros()).map(|j| 1u64 << j).collect();
    let mut moments = Vec::new();
    let mut csv = CsvFile::new(csv_name(cfg, "moments"), "q,moment");
    for &q in &qs {
        let m = bourgain_moment(table, cfg.n, q, cfg.k)?;
        csv.push(format!("{q},{m:e}"));
        moments.push(m);
    }
    let xs: Vec<f64> = qs.iter().map(|&q| q as f64).collect();
    let slope = loglog_slope(&xs, &moments);
    let results = json!({
        "n": cfg.n,
        "k": cfg.k,
        "q_values": qs,
        "moments": moments,
        "growth_exponent": slope,
    });
    Ok((results, Vec::new(), vec![csv]))
}

/// Seeded `β` with `N·N(β)` log-uniform in `[10², 10⁴]` (capped below `N`) and uniform direction.
pub fn decay_sample(n: u64, count: usize, seed: u64) -> Vec<ComplexPoint<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hi = 1e4f64.min(0.99 * n as f64);
    let lo = 1e2f64.min(hi / 2.0);
    (0..count)
        .map(|_| {
            let t = (rng.gen_range(lo.ln()..hi.ln())).exp();
            let r = (t / n as f64).sqrt();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            ComplexPoint::new(r * a.cos(), r * a.sin())
        })
        .collect()
}

fn exp_decay(cfg: &RunConfig, sector: &Sector) -> Result<Produced, CliError> {
    let betas = decay_sample(cfg.n, cfg.samples, cfg.seed);
    let mut csv = CsvFile::new(csv_name(cfg, "samples"), "beta_x,beta_y,n_norm_beta,abs_m_hat");
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for b in betas {
        let v = exp_sum_m(cfg.n, sector, b)?.norm();
        let t = cfg.n as f64 * b.norm();
        csv.push(format!("{:e},{:e},{t:e},{v:e}", b.x, b.y));
        xs.push(t);
        ys.push(v);
    }
    let results = json!({
        "n": cfg.n,
        "samples": xs.len(),
        "slope": loglog_slope(&xs, &ys),
        "max_abs": ys.iter().copied().fold(0.0, f64::max),
    });
    Ok((results, Vec::new(), vec![csv]))
}

fn highlow_report(cfg: &RunConfig, table: &ArithmeticTable, sector: &Sector) -> Result<Produced, CliError> {
    let qs: Vec<u64> = (1..=cfg.q.trailing_zeros()).map(|j| 1u64 << j).collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut resolved_q = Vec::new();
    let mut sups = Vec::new();
    let mut last_hi = None;
    for &q in &qs {
        let lo = match highlow::build_lo(table, cfg.n, sector, q, cfg.grid_m) {
            Ok(lo) => lo,
            Err(e @ gaussprimes::Error::Resolution { .. }) => {
                rows.push(json!({ "q": q, "resolved": false, "error": e.to_string() }));
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let a = highlow::a_hat_grid(table, cfg.n, sector, lo.m())?;
        let hi = a.sub(&lo)?;
        let terms = lo_terms(table, q)?;
        let overlap = max_active_terms(&terms, lo.m());
        if overlap > 1 {
            failures.push(format!(
                "window_disjointness: Q = {q} has {overlap} overlapping windows"
            ));
        }
        rows.push(json!({
            "q": q,
            "resolved": true,
            "grid_m": lo.m(),
            "terms": terms.len(),
            "max_active_terms": overlap,
            "sup_a_hat": a.sup_norm(),
            "sup_lo_hat": lo.sup_norm(),
            "sup_hi_hat": hi.sup_norm(),
            "hi_hat_at_zero": hi.get(0, 0).norm(),
            "hi_mean_square": hi.mean_square(),
        }));
        resolved_q.push(q as f64);
        sups.push(hi.sup_norm());
        last_hi = Some(hi);
    }
    if resolved_q.is_empty() {
        return Err(gaussprimes::Error::Resolution {
            requested: cfg.grid_m,
            required: highlow::required_grid(1) as usize,
        }
        .into());
    }
    // The slope is the same in any logarithm base.
    let slope = loglog_slope(&resolved_q, &sups);
    let mut csv = CsvFile::new(csv_name(cfg, "hi"), "xi_x,xi_y,abs");
    if let Some(hi) = last_hi {
        let stride = (hi.m() / 256).max(1);
        for j in (0..hi.m()).step_by(stride) {
            for k in (0..hi.m()).step_by(stride) {
                let p = hi.point(j, k);
                csv.push(format!("{},{},{:e}", p.x, p.y, hi.get(j, k).norm()));
            }
        }
    }
    let results = json!({
        "n": cfg.n,
        "grid_m": cfg.grid_m,
        "rows": rows,
        "sup_hi_slope_log2": slope,
        "strictly_decreasing": sups.windows(2).all(|w| w[1] < w[0]),
    });
    Ok((results, failures, vec![csv]))
}

fn kernel_error(cfg: &RunConfig, table: &ArithmeticTable, sector: &Sector) -> Result<Produced, CliError> {
    let mut ns: Vec<u64> = (3..=9).map(|e| 10u64.pow(e)).filter(|&v| v < cfg.n).collect();
    ns.push(cfg.n);
    let mut rows = Vec::new();
    let mut csv = CsvFile::new(csv_name(cfg, "sweep"), "n,error,sup_a_hat,sup_b_hat");
    let mut errors = Vec::new();
    for &n in &ns {
        let k = highlow::kernel_error(table, n, sector, cfg.grid_m, cfg.s_max)?;
        csv.push(format!("{n},{:e},{:e},{:e}", k.error, k.sup_a, k.sup_b));
        rows.push(json!({
            "n": n,
            "grid_m": k.m,
            "s_max": k.s_max,
            "terms": k.terms,
            "error": k.error,
            "sup_a_hat": k.sup_a,
            "sup_b_hat": k.sup_b,
        }));
        errors.push(k.error);
    }
    let results = json!({
        "rows": rows,
        "decreasing_in_n": errors.windows(2).all(|w| w[1] < w[0]),
    });
    Ok((results, Vec::new(), vec![csv]))
}

/// Seeds `seed, seed + 1, …, seed + 4`.
pub const IMPROVING_SEEDS: u64 = 5;
pub const IMPROVING_ENVELOPE: f64 = 50.0;

fn improving(cfg: &RunConfig, table: &ArithmeticTable, sector: &Sector) -> Result<Produced, CliError> {
    let mut per_seed = Vec::new();
    let mut csv = CsvFile::new(csv_name(cfg, "ratios"), "seed,pair,ratio");
    for s in 0..IMPROVING_SEEDS {
        let r = goldbach::improving_check(table, cfg.n, sector, cfg.p, cfg.pairs, cfg.seed + s)?;
        for (i, v) in r.ratios.iter().enumerate() {
            csv.push(format!("{},{i},{v:e}", r.seed));
        }
        per_seed.push(r);
    }
    let maxes: Vec<f64> = per_seed.iter().map(|r| r.max_ratio).collect();
    let max = maxes.iter().copied().fold(0.0, f64::max);
    let min = maxes.iter().copied().fold(f64::INFINITY, f64::min);
    let mut failures = Vec::new();
    if !(max.is_finite() && max <= IMPROVING_ENVELOPE) {
        failures.push(format!(
            "improving_envelope: max ratio {max} exceeds {IMPROVING_ENVELOPE}"
        ));
    }
    let results = json!({
        "n": cfg.n,
        "p": cfg.p,
        "pairs": cfg.pairs,
        "seeds": per_seed.iter().map(|r| json!({"seed": r.seed, "max_ratio": r.max_ratio, "mean_ratio": r.mean_ratio})).collect::<Vec<_>>(),
        "max_ratio": max,
        "seed_spread": if min > 0.0 { max / min } else { f64::INFINITY },
    });
    Ok((results, failures, vec![csv]))
}

fn goldbach_scan(cfg: &RunConfig, table: &ArithmeticTable, sector: &Sector) -> Result<Produced, CliError> {
    let range = cfg.norm_range();
    let report = if cfg.order == 2 {
        goldbach::scan_binary(table, cfg.n, sector, range, cfg.prime_powers)?
    } else {
        goldbach::scan_ternary(table, cfg.n, sector, cfg.c, cfg.b, range)?
    };
    let mut failures = Vec::new();
    if !report.candidates_confirmed() {
        failures.push("exact_reverification: FFT zeros and exact search disagree".into());
    }
    if cfg.order == 3 && !report.exceptional.is_empty() {
        failures.push(format!(
            "ternary_exceptional: {} admissible targets without representation, first {}",
            report.exceptional.len(),
            report.exceptional[0].n
        ));
    }
    let mut csv = CsvFile::new(csv_name(cfg, "counts"), "re,im,norm,count,weighted,boundary_distance");
    for c in &report.counts {
        let d = c.boundary_distance.map_or_else(String::new, |d| format!("{d:e}"));
        csv.push(format!(
            "{},{},{},{},{:e},{d}",
            c.n.re(),
            c.n.im(),
            c.n.norm(),
            c.count,
            c.weighted
        ));
    }
    let mut results = serde_json::to_value(&report)?;
    results["exceptional_density"] = json!(report.exceptional_density());
    Ok((results, failures, vec![csv]))
}

fn singular_series(cfg: &RunConfig, table: &ArithmeticTable) -> Result<Produced, CliError> {
    let norm_max = cfg.norm_hi.unwrap_or(cfg.n);
    let suite = series_suite(table, cfg.q, norm_max)?;
    let failures = suite
        .suites()
        .iter()
        .filter(|s| !s.pass())
        .map(|s| format!("{}: {}", s.name, s.first_failure.clone().unwrap_or_default()))
        .collect();
    let s2 = SingularSeries::new(table, 2, cfg.q)?;
    let s3 = SingularSeries::new(table, 3, cfg.q)?;
    let mut csv = CsvFile::new(csv_name(cfg, "values"), "re,im,order2,order3,local2");
    let plot_max = norm_max.min(2_000);
    let w = (plot_max as f64).sqrt() as i64 + 1;
    for re in -w..=w {
        for im in -w..=w {
            let x = GaussInt::new(re, im);
            if x.is_zero() || x.norm() > plot_max {
                continue;
            }
            csv.push(format!(
                "{re},{im},{:e},{:e},{:e}",
                s2.value(x)?,
                s3.value(x)?,
                s2.local(x)?
            ));
        }
    }
    Ok((serde_json::to_value(&suite)?, failures, vec![csv]))
}

fn compare_counts(cfg: &RunConfig, table: &ArithmeticTable, sector: &Sector) -> Result<Produced, CliError> {
    let range = cfg.norm_range();
    let sample = goldbach::sample_targets(range, Parity::for_order(cfg.order), sector, cfg.samples, cfg.seed);
    let stats = goldbach::compare_counts(table, cfg.n, sector, cfg.q, cfg.order, &sample)?;
    let mut csv = CsvFile::new(csv_name(cfg, "deciles"), "quantile,ratio");
    for (i, d) in stats.deciles.iter().enumerate() {
        csv.push(format!("{},{d:e}", (i + 1) as f64 / 10.0));
    }
    let results = json!({
        "n": cfg.n,
        "q": cfg.q,
        "order": cfg.order,
        "norm_range": range,
        "sampled": sample.len(),
        "stats": stats,
    });
    Ok((results, Vec::new(), vec![csv]))
}
