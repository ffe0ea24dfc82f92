//! Command-line experiments over the `gaussprimes` library: configuration, dispatch and
//! JSON/CSV report emission.

pub mod commands;
pub mod config;
pub mod report;
pub mod suites;

pub use config::{Angle, Command, RunConfig, SectorSpec};
pub use report::{Outcome, Report};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "GAUSSPRIMES_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] gaussprimes::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for errors a different configuration would avoid, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use gaussprimes::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(
                E::Capacity { .. }
                | E::Resolution { .. }
                | E::OutOfRange { .. }
                | E::EmptySector
                | E::InvalidParameter(_)
                | E::EmptySample(_),
            ) => 2,
            _ => 1,
        }
    }

    pub fn hint(&self) -> Option<String> {
        use gaussprimes::Error as E;
        match self {
            CliError::Core(E::Capacity { .. }) => Some("lower n or n_max, or raise the memory budget".into()),
            CliError::Core(E::Resolution { required, .. }) => Some(format!(
                "raise grid_m to at least {required} (maximum {}) or lower q",
                gaussprimes::highlow::MAX_GRID
            )),
            CliError::Core(E::OutOfRange { .. }) => Some("raise n_max so the table covers n and q".into()),
            CliError::Core(E::EmptySample(_)) => Some("widen the norm range or change the parity of the sample".into()),
            _ => None,
        }
    }
}

/// Runs the configured experiment and writes `<out>/<command>.json` plus its CSV files.
pub fn run(config: &RunConfig) -> Result<Outcome, CliError> {
    config.validate()?;
    let outcome = commands::execute(config)?;
    outcome.write(&config.out)?;
    Ok(outcome)
}

/// Least-squares slope of `ln y` against `ln x` over the pairs with both positive.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Gaussian primality by rational trial division: `N(z)` a rational prime, or `z` a unit
/// times a rational prime `p ≡ 3 (mod 4)`.
pub fn is_gaussian_prime_trial(z: gaussprimes::GaussInt) -> bool {
    fn is_prime(n: u64) -> bool {
        if n < 2 {
            return false;
        }
        let mut d = 2;
        while d * d <= n {
            if n.is_multiple_of(d) {
                return false;
            }
            d += 1;
        }
        true
    }
    let (a, b) = (z.re().unsigned_abs(), z.im().unsigned_abs());
    if a == 0 || b == 0 {
        let p = a.max(b);
        return p % 4 == 3 && is_prime(p);
    }
    is_prime(z.norm())
}
