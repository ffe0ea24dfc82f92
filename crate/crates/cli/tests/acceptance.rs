//! Acceptance run: one line per criterion, then a non-zero exit if any criterion failed.

use std::time::Instant;

use gaussprimes::goldbach::{self, Parity};
use gaussprimes::highlow::{build_hi, build_lo, lo_spatial};
use gaussprimes::ramanujan::{bourgain_moment, canonical_up_to};
use gaussprimes::sector::exp_sum_m;
use gaussprimes::{ArithmeticTable, GaussInt, ResidueBox, Sector};
use gaussprimes_cli::commands::{decay_sample, execute};
use gaussprimes_cli::report::without_timestamp;
use gaussprimes_cli::suites::{identity_suites, series_suite};
use gaussprimes_cli::{is_gaussian_prime_trial, loglog_slope, Command, RunConfig};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

const SCAN_N: u64 = 100_001;

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let table = ArithmeticTable::build(200).unwrap();
    let suites = identity_suites(&table, 200).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let failed: Vec<String> = suites
        .iter()
        .filter(|s| !s.pass())
        .map(|s| {
            format!(
                "{} {}/{} (first: {})",
                s.name,
                s.passed,
                s.checked,
                s.first_failure.clone().unwrap_or_default()
            )
        })
        .collect();
    let passed: Vec<&str> = suites.iter().filter(|s| s.pass()).map(|s| s.name.as_str()).collect();
    verdict(
        failed.is_empty() && secs <= 60.0,
        format!(
            "{secs:.1}s; passed [{}]; failed [{}]",
            passed.join(", "),
            failed.join("; ")
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_parseval: f64 = 0.0;
    let mut worst_roundtrip: f64 = 0.0;
    let mut moduli = 0;
    for q in canonical_up_to(201).into_iter().filter(|q| q.norm() >= 2) {
        moduli += 1;
        let boxq = ResidueBox::new(q).unwrap();
        for _ in 0..100 {
            let f: Vec<Complex<f64>> = (0..boxq.len())
                .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            worst_parseval = worst_parseval.max(boxq.parseval_defect(&f).unwrap());
            let back = boxq.inverse_dft(&boxq.dft(&f).unwrap()).unwrap();
            let num: f64 = f.iter().zip(&back).map(|(a, b)| (a - b).norm_sqr()).sum();
            let den: f64 = f.iter().map(|a| a.norm_sqr()).sum();
            worst_roundtrip = worst_roundtrip.max((num / den).sqrt());
        }
    }
    verdict(
        worst_parseval <= 1e-10 && worst_roundtrip <= 1e-10,
        format!("{moduli} moduli x 100 vectors; parseval {worst_parseval:.1e}, round trip {worst_roundtrip:.1e}"),
    )
}

fn criterion_3() -> Verdict {
    let table = ArithmeticTable::build(1_000_000).unwrap();
    let mut mismatches = 0;
    let mut checked = 0;
    for re in -100i64..=100 {
        for im in -100i64..=100 {
            let z = GaussInt::new(re, im);
            if z.is_zero() || z.norm() > 10_000 {
                continue;
            }
            checked += 1;
            if table.is_prime(z).unwrap() != is_gaussian_prime_trial(z) {
                mismatches += 1;
            }
        }
    }
    let r2: u64 = (0..1_000_000).map(|n| table.r2(n).unwrap()).sum();
    let mean = r2 as f64 / 1e6;
    verdict(
        mismatches == 0 && (2.8..=3.6).contains(&mean),
        format!("{checked} points, {mismatches} mismatches; mean r2 {mean:.5}"),
    )
}

fn criterion_4() -> Verdict {
    let table = ArithmeticTable::build(10_000).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for q in [4, 16, 64] {
        let s = series_suite(&table, q, 10_000).unwrap();
        pass &= s.pass();
        let failed: Vec<&str> = s
            .suites()
            .iter()
            .filter(|r| !r.pass())
            .map(|r| r.name.as_str())
            .collect();
        parts.push(format!(
            "Q={q}: G={:.4}, sum form err {:.1e}, failed {:?}",
            s.global, s.max_sum_form_error, failed
        ));
    }
    verdict(pass, parts.join("; "))
}

/// Trial-division primes of norm `< n_bound` in the sector, as a dense square.
struct PrimeOracle {
    half: i64,
    hit: Vec<bool>,
}

impl PrimeOracle {
    fn new(n_bound: u64, sector: &Sector) -> Self {
        let half = (n_bound as f64).sqrt() as i64 + 1;
        let side = (2 * half + 1) as usize;
        let mut hit = vec![false; side * side];
        for re in -half..=half {
            for im in -half..=half {
                let z = GaussInt::new(re, im);
                if !z.is_zero() && z.norm() < n_bound && sector.contains(z) && is_gaussian_prime_trial(z) {
                    hit[((re + half) as usize) * side + (im + half) as usize] = true;
                }
            }
        }
        PrimeOracle { half, hit }
    }

    fn get(&self, z: GaussInt) -> bool {
        let side = 2 * self.half + 1;
        let (r, i) = (z.re() + self.half, z.im() + self.half);
        (0..side).contains(&r) && (0..side).contains(&i) && self.hit[(r * side + i) as usize]
    }

    /// Ordered pairs `(p, n − p)` of oracle primes.
    fn binary_count(&self, n: GaussInt) -> u64 {
        let mut c = 0;
        for re in -self.half..=self.half {
            for im in -self.half..=self.half {
                let p = GaussInt::new(re, im);
                if self.get(p) && self.get(n - p) {
                    c += 1;
                }
            }
        }
        c
    }
}

fn criterion_5() -> Verdict {
    let start = Instant::now();
    let table = ArithmeticTable::build(SCAN_N).unwrap();
    let full = Sector::full();
    let r = goldbach::scan_binary(&table, SCAN_N, &full, (4, 100_000), false).unwrap();
    let quarter = Sector::new(0.0, std::f64::consts::FRAC_PI_4).unwrap();
    let s = goldbach::scan_binary(&table, SCAN_N, &quarter, (50_000, 100_000), false).unwrap();
    let secs = start.elapsed().as_secs_f64();

    // Independent re-verification with trial-division primes.
    let mut oracle_ok = r.candidates_confirmed() && s.candidates_confirmed();
    let mut rechecked = 0;
    for (report, sector) in [(&r, &full), (&s, &quarter)] {
        let oracle = PrimeOracle::new(SCAN_N, sector);
        for e in report.exceptional.iter().chain(&report.boundary_exceptional) {
            oracle_ok &= oracle.binary_count(e.n) == 0;
            rechecked += 1;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..10 {
            let c = &report.counts[rng.gen_range(0..report.counts.len())];
            oracle_ok &= oracle.binary_count(c.n) == c.count;
            rechecked += 1;
        }
    }

    let interior = s
        .strata
        .iter()
        .find(|st| st.distance_hi.is_none())
        .expect("open stratum");
    let interior_share = 1.0 - interior.exceptional as f64 / interior.targets.max(1) as f64;
    let density = r.exceptional_density();
    verdict(
        density <= 0.01 && oracle_ok && interior.targets > 0 && interior_share >= 0.99 && secs <= 120.0,
        format!(
            "{secs:.1}s; full circle {} targets, density {density:.2e}; sector {} targets with distance > {}, \
             represented {:.2}%, {} exceptional overall; {rechecked} oracle rechecks {}",
            r.targets,
            interior.targets,
            interior.distance_lo,
            100.0 * interior_share,
            s.exceptional.len() + s.boundary_exceptional.len(),
            if oracle_ok { "agree" } else { "DISAGREE" }
        ),
    )
}

fn criterion_6() -> Verdict {
    let table = ArithmeticTable::build(SCAN_N).unwrap();
    let (c, b) = (goldbach::DEFAULT_ADMISSIBILITY_C, goldbach::DEFAULT_B_EXPONENT);
    let full = goldbach::scan_ternary(&table, SCAN_N, &Sector::full(), c, b, (10_000, 100_000)).unwrap();
    let sixth = Sector::new(0.0, std::f64::consts::PI / 6.0).unwrap();
    let sec = goldbach::scan_ternary(&table, SCAN_N, &sixth, c, b, (10_000, 100_000)).unwrap();
    let unit_cutoff = goldbach::admissibility_cutoff(SCAN_N, 1.0, b);
    let worst = sec
        .exceptional
        .iter()
        .filter_map(|e| e.boundary_distance)
        .fold(0.0f64, f64::max);
    let mut detail = format!(
        "full circle {} targets, {} exceptional; sector {} admissible targets (cutoff {:.2e}), {} exceptional, {} boundary targets, {} boundary exceptional",
        full.targets,
        full.exceptional.len(),
        sec.targets,
        sec.admissibility_cutoff.unwrap_or(0.0),
        sec.exceptional.len(),
        sec.boundary_targets,
        sec.boundary_exceptional.len()
    );
    if let Some(first) = sec.exceptional.first() {
        detail += &format!(
            "; first {}, largest exceptional distance {worst:.2e}, smallest passing C > {:.1}",
            first.n,
            worst / unit_cutoff
        );
    }
    verdict(
        full.exceptional.is_empty()
            && sec.exceptional.is_empty()
            && full.candidates_confirmed()
            && sec.candidates_confirmed(),
        detail,
    )
}

fn criterion_7() -> Verdict {
    let n = 100_000;
    let table = ArithmeticTable::build(n).unwrap();
    let full = Sector::full();
    let sample = goldbach::sample_targets((n / 2, 3 * n / 4), Parity::Even, &full, 500, 7);
    let stats = goldbach::compare_counts(&table, n, &full, 64, 2, &sample).unwrap();
    verdict(
        stats.samples >= 500 && (0.5..=2.0).contains(&stats.median),
        format!(
            "{} samples, median {:.4}, deciles 10% {:.4} / 90% {:.4}",
            stats.samples, stats.median, stats.deciles[0], stats.deciles[8]
        ),
    )
}

fn criterion_8() -> Verdict {
    let n = 100_000;
    let full = Sector::full();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for b in decay_sample(n, 200, 8) {
        xs.push(n as f64 * b.norm());
        ys.push(exp_sum_m(n, &full, b).unwrap().norm());
    }
    let slope = loglog_slope(&xs, &ys).unwrap_or(f64::NAN);
    verdict(slope <= -0.6, format!("200 samples, slope {slope:.3}"))
}

fn criterion_9() -> Verdict {
    let n = 10_000;
    let table = ArithmeticTable::build(n).unwrap();
    let full = Sector::full();
    let mut sups = Vec::new();
    let mut parts = Vec::new();
    for q in [4u64, 8, 16] {
        match build_hi(&table, n, &full, q, 1024) {
            Ok(hi) => {
                parts.push(format!(
                    "Q={q}: sup {:.4} (m={}, |Hi(0)| {:.3})",
                    hi.sup_norm(),
                    hi.m(),
                    hi.get(0, 0).norm()
                ));
                sups.push((q as f64, hi.sup_norm()));
            }
            Err(e) => parts.push(format!("Q={q}: {e}")),
        }
    }
    let all = sups.len() == 3;
    let decreasing = sups.windows(2).all(|w| w[1].1 < w[0].1);
    let (qs, vs): (Vec<f64>, Vec<f64>) = sups.iter().copied().unzip();
    let slope = loglog_slope(&qs, &vs).unwrap_or(f64::NAN);
    verdict(
        all && decreasing && slope <= -0.5,
        format!("{}; log2 slope {slope:.3}", parts.join("; ")),
    )
}

fn criterion_10() -> Verdict {
    let n = 1_000;
    let table = ArithmeticTable::build(n).unwrap();
    let full = Sector::full();
    let lo = build_lo(&table, n, &full, 4, 1024).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let r = (n as f64).sqrt() as i64;
    let mut pairs = Vec::new();
    while pairs.len() < 50 {
        let x = GaussInt::new(rng.gen_range(-r..=r), rng.gen_range(-r..=r));
        if x.norm() >= n {
            continue;
        }
        pairs.push((x, lo.inverse_at(x).re, lo_spatial(&table, n, &full, 4, x).unwrap()));
    }
    let scale = pairs.iter().map(|p| p.2.abs()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for &(_, grid, spatial) in &pairs {
        if spatial != 0.0 {
            let rel = (grid - spatial).abs() / spatial.abs();
            worst = worst.max(rel);
            ok &= rel <= 0.02;
        } else {
            ok &= grid.abs() <= 0.02 * scale;
        }
    }
    let zeros = pairs.iter().filter(|p| p.2 == 0.0).count();
    verdict(
        ok,
        format!("50 points ({zeros} with vanishing arithmetic factor), worst relative {worst:.2e}"),
    )
}

fn criterion_11() -> Verdict {
    let n = 100_000;
    let table = ArithmeticTable::build(64).unwrap();
    let qs = [8u64, 16, 32];
    let moments: Vec<f64> = qs.iter().map(|&q| bourgain_moment(&table, n, q, 3).unwrap()).collect();
    let xs: Vec<f64> = qs.iter().map(|&q| q as f64).collect();
    let slope = loglog_slope(&xs, &moments).unwrap_or(f64::NAN);
    verdict(
        slope <= 3.5,
        format!("moments {moments:.1?}, growth exponent {slope:.3}"),
    )
}

fn criterion_12() -> Verdict {
    let n = 10_000;
    let table = ArithmeticTable::build(n).unwrap();
    let full = Sector::full();
    let maxes: Vec<f64> = (1..=5)
        .map(|seed| {
            goldbach::improving_check(&table, n, &full, 1.5, 100, seed)
                .unwrap()
                .max_ratio
        })
        .collect();
    let hi = maxes.iter().copied().fold(0.0, f64::max);
    let lo = maxes.iter().copied().fold(f64::INFINITY, f64::min);
    verdict(
        hi <= 50.0 && hi < 2.0 * lo,
        format!("per-seed max {maxes:.4?}, spread {:.3}", hi / lo),
    )
}

fn criterion_13() -> Verdict {
    let settings: [(Command, &[(&str, &str)]); 10] = [
        (Command::Sieve, &[("n_max", "20000")]),
        (Command::VerifyIdentities, &[("n_max", "60")]),
        (Command::RamanujanMoments, &[("n", "2000"), ("q", "8")]),
        (Command::ExpDecay, &[("n", "5000"), ("samples", "40")]),
        (Command::HighlowReport, &[("n", "2000"), ("q", "4")]),
        (
            Command::KernelError,
            &[("n", "2000"), ("grid_m", "256"), ("s_max", "1")],
        ),
        (Command::ImprovingCheck, &[("n", "900"), ("pairs", "10")]),
        (
            Command::GoldbachScan,
            &[("n", "3000"), ("order", "3"), ("sector", "0:0.5pi")],
        ),
        (Command::SingularSeries, &[("n", "500"), ("q", "16")]),
        (Command::CompareCounts, &[("n", "3000"), ("q", "16"), ("samples", "60")]),
    ];
    let mut differing = Vec::new();
    for (command, kv) in settings {
        let mut cfg = RunConfig::new(command);
        for (k, v) in kv {
            cfg.set(k, v).unwrap();
        }
        cfg.validate().unwrap();
        let a = execute(&cfg).unwrap();
        let b = execute(&cfg).unwrap();
        let same = without_timestamp(&a.report.to_json().unwrap()).unwrap()
            == without_timestamp(&b.report.to_json().unwrap()).unwrap()
            && a.csv == b.csv;
        if !same {
            differing.push(command.name());
        }
    }
    verdict(
        differing.is_empty(),
        format!("10 commands run twice; differing {differing:?}"),
    )
}

fn main() {
    let criteria: [fn() -> Verdict; 13] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
        criterion_13,
    ];
    let mut failed = Vec::new();
    for (i, run) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        println!(
            "criterion {}: {} [{:.1}s] {}",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
        if !v.pass {
            failed.push(i + 1);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 13 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
