//! Run configuration: defaults, a flat `key = value` file, and command-line overrides.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use gaussprimes::Sector;
use serde::Serialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Sieve,
    VerifyIdentities,
    RamanujanMoments,
    ExpDecay,
    HighlowReport,
    KernelError,
    ImprovingCheck,
    GoldbachScan,
    SingularSeries,
    CompareCounts,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Sieve => "sieve",
            Command::VerifyIdentities => "verify-identities",
            Command::RamanujanMoments => "ramanujan-moments",
            Command::ExpDecay => "exp-decay",
            Command::HighlowReport => "highlow-report",
            Command::KernelError => "kernel-error",
            Command::ImprovingCheck => "improving-check",
            Command::GoldbachScan => "goldbach-scan",
            Command::SingularSeries => "singular-series",
            Command::CompareCounts => "compare-counts",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        <Command as ValueEnum>::from_str(s, true)
    }
}

/// An angle in radians, or a multiple of π written `0.25pi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Angle {
    pub value: f64,
    pub times_pi: bool,
}

impl Angle {
    pub fn radians(self) -> f64 {
        if self.times_pi {
            self.value * std::f64::consts::PI
        } else {
            self.value
        }
    }
}

impl FromStr for Angle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let (body, times_pi) = match s.strip_suffix("pi").or_else(|| s.strip_suffix('π')) {
            Some(b) => (b.trim(), true),
            None => (s, false),
        };
        let value = match body {
            "" if times_pi => 1.0,
            "-" if times_pi => -1.0,
            _ => body.parse::<f64>().map_err(|_| format!("bad angle {s:?}"))?,
        };
        if !value.is_finite() {
            return Err(format!("angle {s:?} is not finite"));
        }
        Ok(Angle { value, times_pi })
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.times_pi {
            write!(f, "{}pi", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// `full`, or `θ₀:θ₁` describing the arc `[θ₀, θ₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum SectorSpec {
    Full,
    Arc(Angle, Angle),
}

impl SectorSpec {
    pub fn to_sector(self) -> Result<Sector, gaussprimes::Error> {
        match self {
            SectorSpec::Full => Ok(Sector::full()),
            SectorSpec::Arc(a, b) => Sector::new(a.radians(), b.radians()),
        }
    }
}

impl FromStr for SectorSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("full") {
            return Ok(SectorSpec::Full);
        }
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| format!("sector {s:?} is neither \"full\" nor \"a:b\""))?;
        Ok(SectorSpec::Arc(a.parse()?, b.parse()?))
    }
}

impl fmt::Display for SectorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorSpec::Full => write!(f, "full"),
            SectorSpec::Arc(a, b) => write!(f, "{a}:{b}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    /// Table range; derived from the command's needs when unset.
    pub n_max: Option<u64>,
    pub n: u64,
    pub q: u64,
    pub grid_m: usize,
    pub sector: SectorSpec,
    pub order: u32,
    pub p: f64,
    pub k: u32,
    pub seed: u64,
    pub samples: usize,
    pub pairs: usize,
    pub s_max: u32,
    pub norm_lo: Option<u64>,
    pub norm_hi: Option<u64>,
    pub c: f64,
    pub b: f64,
    pub prime_powers: bool,
    pub smooth: bool,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

/// Every configurable key, in file order.
pub const KEYS: [&str; 21] = [
    "command",
    "n_max",
    "n",
    "q",
    "grid_m",
    "sector",
    "order",
    "p",
    "k",
    "seed",
    "samples",
    "pairs",
    "s_max",
    "norm_lo",
    "norm_hi",
    "c",
    "b",
    "prime_powers",
    "smooth",
    "out",
    "threads",
];

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, CliError> {
    let v = v.trim();
    if v.is_empty() || v == "auto" {
        Ok(None)
    } else {
        parse(key, v).map(Some)
    }
}

fn show_opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n_max: None,
            n: 10_000,
            q: 16,
            grid_m: 1024,
            sector: SectorSpec::Full,
            order: 2,
            p: 1.5,
            k: 3,
            seed: 1,
            samples: 200,
            pairs: 100,
            s_max: 2,
            norm_lo: None,
            norm_hi: None,
            c: 1.0,
            b: 10.0,
            prime_powers: false,
            smooth: false,
            out: PathBuf::from("gaussprimes-out"),
            threads: None,
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key {
            "command" => self.command = parse(key, v)?,
            "n_max" => self.n_max = parse_opt(key, v)?,
            "n" => self.n = parse(key, v)?,
            "q" => self.q = parse(key, v)?,
            "grid_m" => self.grid_m = parse(key, v)?,
            "sector" => {
                self.sector = v
                    .parse()
                    .map_err(|e: String| CliError::Config(format!("sector: {e}")))?
            }
            "order" => self.order = parse(key, v)?,
            "p" => self.p = parse(key, v)?,
            "k" => self.k = parse(key, v)?,
            "seed" => self.seed = parse(key, v)?,
            "samples" => self.samples = parse(key, v)?,
            "pairs" => self.pairs = parse(key, v)?,
            "s_max" => self.s_max = parse(key, v)?,
            "norm_lo" => self.norm_lo = parse_opt(key, v)?,
            "norm_hi" => self.norm_hi = parse_opt(key, v)?,
            "c" => self.c = parse(key, v)?,
            "b" => self.b = parse(key, v)?,
            "prime_powers" => self.prime_powers = parse(key, v)?,
            "smooth" => self.smooth = parse(key, v)?,
            "out" => self.out = PathBuf::from(v),
            "threads" => self.threads = parse_opt(key, v)?,
            _ => return Err(CliError::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "command" => self.command.name().to_string(),
            "n_max" => show_opt(&self.n_max),
            "n" => self.n.to_string(),
            "q" => self.q.to_string(),
            "grid_m" => self.grid_m.to_string(),
            "sector" => self.sector.to_string(),
            "order" => self.order.to_string(),
            "p" => self.p.to_string(),
            "k" => self.k.to_string(),
            "seed" => self.seed.to_string(),
            "samples" => self.samples.to_string(),
            "pairs" => self.pairs.to_string(),
            "s_max" => self.s_max.to_string(),
            "norm_lo" => show_opt(&self.norm_lo),
            "norm_hi" => show_opt(&self.norm_hi),
            "c" => self.c.to_string(),
            "b" => self.b.to_string(),
            "prime_powers" => self.prime_powers.to_string(),
            "smooth" => self.smooth.to_string(),
            "out" => self.out.display().to_string(),
            "threads" => show_opt(&self.threads),
            _ => return None,
        })
    }

    /// Applies `key = value` lines; `#` starts a comment.
    pub fn apply_file(&mut self, text: &str) -> Result<(), CliError> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn to_file_string(&self) -> String {
        KEYS.iter()
            .map(|k| format!("{k} = {}\n", self.get(k).expect("known key")))
            .collect()
    }

    pub fn from_file_str(text: &str) -> Result<Self, CliError> {
        let mut cfg = RunConfig::new(Command::Sieve);
        cfg.apply_file(text)?;
        Ok(cfg)
    }

    /// Table range the command needs.
    pub fn required_table(&self) -> u64 {
        match self.command {
            Command::Sieve => self.n,
            Command::VerifyIdentities => 2,
            Command::RamanujanMoments | Command::SingularSeries => self.q,
            Command::ExpDecay => 2,
            _ => self.n.max(self.q),
        }
    }

    /// `n_max` if set; otherwise the command's requirement, or 200 as the identity-suite bound.
    pub fn table_size(&self) -> u64 {
        let default = match self.command {
            Command::VerifyIdentities => 200,
            _ => self.required_table(),
        };
        self.n_max.unwrap_or(default).max(2)
    }

    pub fn norm_range(&self) -> (u64, u64) {
        let hi = self.norm_hi.unwrap_or(self.n.saturating_sub(1));
        let lo = self.norm_lo.unwrap_or(match self.command {
            Command::CompareCounts => self.n / 2,
            _ => 4,
        });
        let hi = match (self.command, self.norm_hi) {
            (Command::CompareCounts, None) => 3 * self.n / 4,
            _ => hi,
        };
        (lo, hi)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.sector
            .to_sector()
            .map_err(|e| CliError::Config(format!("sector {}: {e}", self.sector)))?;
        if self.n < 2 {
            return bad(format!("n = {} must be at least 2", self.n));
        }
        if self.q == 0 {
            return bad("q must be positive".into());
        }
        if !(2..=3).contains(&self.order) {
            return bad(format!("order = {} must be 2 or 3", self.order));
        }
        if !(self.p > 1.0 && self.p.is_finite()) {
            return bad(format!("p = {} must exceed 1", self.p));
        }
        if !(1..=8).contains(&self.k) {
            return bad(format!("k = {} must lie in 1..=8", self.k));
        }
        if self.grid_m == 0 || self.grid_m > gaussprimes::highlow::MAX_GRID {
            return bad(format!(
                "grid_m = {} must lie in 1..={}",
                self.grid_m,
                gaussprimes::highlow::MAX_GRID
            ));
        }
        if self.samples == 0 || self.pairs == 0 {
            return bad("samples and pairs must be positive".into());
        }
        if !(self.c > 0.0 && self.c.is_finite() && self.b > 0.0 && self.b.is_finite()) {
            return bad("admissibility constants c and b must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        let (lo, hi) = self.norm_range();
        if lo > hi {
            return bad(format!("empty norm range [{lo}, {hi}]"));
        }
        if let Some(m) = self.n_max {
            let need = self.required_table();
            if m < need {
                return bad(format!("n_max = {m} is below the {need} this command needs"));
            }
        }
        if matches!(self.command, Command::HighlowReport | Command::RamanujanMoments) && !self.q.is_power_of_two() {
            return bad(format!(
                "q = {} must be a power of two for {}",
                self.q,
                self.command.name()
            ));
        }
        Ok(())
    }
}
