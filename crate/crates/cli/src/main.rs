use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use gaussprimes_cli::{run, CliError, Command, RunConfig, THREADS_ENV};

const AFTER_HELP: &str = "\
Settings are resolved as defaults < --config file < flags. The file holds one `key = value`
per line (keys as the flags, with underscores); `#` starts a comment. `--print-config`
writes the resolved file and exits. Sectors are `full` or `a:b` for [a, b), with angles in
radians or as multiples of pi, e.g. `0:0.25pi`. GAUSSPRIMES_THREADS overrides `threads`.

Every run writes <out>/<command>.json (schema 1) and CSV files with these columns:
  sieve-primes.csv               re,im,norm
  verify-identities-suites.csv   suite,checked,passed,asserted
  ramanujan-moments-moments.csv  q,moment
  exp-decay-samples.csv          beta_x,beta_y,n_norm_beta,abs_m_hat
  highlow-report-hi.csv          xi_x,xi_y,abs          (largest resolved q)
  kernel-error-sweep.csv         n,error,sup_a_hat,sup_b_hat
  improving-check-ratios.csv     seed,pair,ratio
  goldbach-scan-counts.csv       re,im,norm,count,weighted,boundary_distance
  singular-series-values.csv     re,im,order2,order3,local2
  compare-counts-deciles.csv     quantile,ratio

Exit status: 0 success, 1 failed invariant (named in the output), 2 configuration error.";

#[derive(Parser, Debug)]
#[command(name = "gaussprimes", version, about = "Fourier-analytic experiments on the Gaussian integers", after_help = AFTER_HELP)]
struct Cli {
    /// Experiment to run; may instead come from the config file.
    #[arg(value_enum)]
    command: Option<Command>,
    /// Flat key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Print the resolved configuration file and exit.
    #[arg(long)]
    print_config: bool,
    /// Arithmetic table range (default: what the command needs).
    #[arg(long)]
    n_max: Option<String>,
    /// Norm bound N of the sector measures [default: 10000].
    #[arg(long, short = 'n')]
    n: Option<String>,
    /// Smoothness bound Q [default: 16].
    #[arg(long, short = 'q')]
    q: Option<String>,
    /// Torus grid size [default: 1024].
    #[arg(long)]
    grid_m: Option<String>,
    /// `full` or `a:b` [default: full].
    #[arg(long)]
    sector: Option<String>,
    /// 2 (binary) or 3 (ternary) [default: 2].
    #[arg(long)]
    order: Option<String>,
    /// Exponent of the improving estimate [default: 1.5].
    #[arg(long)]
    p: Option<String>,
    /// Moment order [default: 3].
    #[arg(long)]
    k: Option<String>,
    /// Seed for every randomized harness [default: 1].
    #[arg(long)]
    seed: Option<String>,
    /// Sampled targets or frequencies [default: 200].
    #[arg(long)]
    samples: Option<String>,
    /// Random indicator pairs per seed [default: 100].
    #[arg(long)]
    pairs: Option<String>,
    /// Largest shell of the kernel approximation [default: 2].
    #[arg(long)]
    s_max: Option<String>,
    /// Smallest target norm (default depends on the command).
    #[arg(long)]
    norm_lo: Option<String>,
    /// Largest target norm (default depends on the command).
    #[arg(long)]
    norm_hi: Option<String>,
    /// Admissibility constant C [default: 1].
    #[arg(long)]
    c: Option<String>,
    /// Admissibility exponent B [default: 10].
    #[arg(long)]
    b: Option<String>,
    /// Scan prime powers instead of primes.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    prime_powers: Option<String>,
    /// Smooth the ternary main term.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    smooth: Option<String>,
    /// Output directory [default: gaussprimes-out].
    #[arg(long, short = 'o')]
    out: Option<String>,
    /// Worker threads.
    #[arg(long)]
    threads: Option<String>,
}

impl Cli {
    fn flags(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("n_max", &self.n_max),
            ("n", &self.n),
            ("q", &self.q),
            ("grid_m", &self.grid_m),
            ("sector", &self.sector),
            ("order", &self.order),
            ("p", &self.p),
            ("k", &self.k),
            ("seed", &self.seed),
            ("samples", &self.samples),
            ("pairs", &self.pairs),
            ("s_max", &self.s_max),
            ("norm_lo", &self.norm_lo),
            ("norm_hi", &self.norm_hi),
            ("c", &self.c),
            ("b", &self.b),
            ("prime_powers", &self.prime_powers),
            ("smooth", &self.smooth),
            ("out", &self.out),
            ("threads", &self.threads),
        ]
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = RunConfig::new(Command::Sieve);
        let mut have_command = false;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            have_command = text
                .lines()
                .any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("command"));
            cfg.apply_file(&text)?;
        }
        if let Some(c) = self.command {
            cfg.command = c;
            have_command = true;
        }
        if !have_command {
            return Err(CliError::Config("no command given".into()));
        }
        for (key, v) in self.flags() {
            if let Some(v) = v {
                cfg.set(key, v)?;
            }
        }
        if let Ok(t) = std::env::var(THREADS_ENV) {
            cfg.set("threads", &t)?;
        }
        Ok(cfg)
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("error: {e}");
    if let Some(h) = e.hint() {
        eprintln!("hint: {h}");
    }
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match cli.resolve().and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cli.print_config {
        print!("{}", cfg.to_file_string());
        return ExitCode::SUCCESS;
    }
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("warning: thread pool already initialized: {e}");
        }
    }
    match run(&cfg) {
        Ok(outcome) => {
            println!("{}: {}", outcome.report.command, outcome.report.status);
            println!("report: {}", outcome.json_path(&cfg.out).display());
            if outcome.report.passed() {
                ExitCode::SUCCESS
            } else {
                for f in &outcome.report.failures {
                    eprintln!("assertion failed: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => fail(&e),
    }
}
