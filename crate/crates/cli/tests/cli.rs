use std::process::Command as Process;

use gaussprimes_cli::config::KEYS;
use gaussprimes_cli::report::without_timestamp;
use gaussprimes_cli::{loglog_slope, run, Angle, CliError, Command, RunConfig, SectorSpec};
use serde_json::Value;

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_gaussprimes"))
}

fn sample_config() -> RunConfig {
    let mut cfg = RunConfig::new(Command::GoldbachScan);
    for (k, v) in [
        ("n_max", "5000"),
        ("n", "3000"),
        ("q", "32"),
        ("grid_m", "512"),
        ("sector", "0:0.25pi"),
        ("order", "3"),
        ("p", "1.25"),
        ("k", "4"),
        ("seed", "17"),
        ("samples", "33"),
        ("pairs", "7"),
        ("s_max", "1"),
        ("norm_lo", "100"),
        ("norm_hi", "2000"),
        ("c", "2.5"),
        ("b", "6"),
        ("prime_powers", "true"),
        ("smooth", "true"),
        ("out", "some/dir"),
        ("threads", "3"),
    ] {
        cfg.set(k, v).unwrap();
    }
    cfg
}

#[test]
fn config_file_round_trip_keeps_every_key() {
    let cfg = sample_config();
    let text = cfg.to_file_string();
    for k in KEYS {
        assert!(text.lines().any(|l| l.starts_with(k)), "{k} missing from\n{text}");
    }
    let back = RunConfig::from_file_str(&text).unwrap();
    assert_eq!(back, cfg);
    for k in KEYS {
        assert_eq!(back.get(k), cfg.get(k), "{k}");
    }
}

#[test]
fn config_file_comments_and_unknown_keys() {
    let cfg = RunConfig::from_file_str("# comment\ncommand = sieve  # trailing\n\nn_max = 300\n").unwrap();
    assert_eq!(cfg.command, Command::Sieve);
    assert_eq!(cfg.n_max, Some(300));
    assert!(matches!(
        RunConfig::from_file_str("bogus = 1\n"),
        Err(CliError::Config(_))
    ));
    assert!(matches!(
        RunConfig::from_file_str("n = ten\n"),
        Err(CliError::Config(_))
    ));
}

#[test]
fn angles_and_sectors_parse() {
    let a: Angle = "0.25pi".parse().unwrap();
    assert!((a.radians() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
    assert_eq!("pi".parse::<Angle>().unwrap().radians(), std::f64::consts::PI);
    assert_eq!("π".parse::<Angle>().unwrap().radians(), std::f64::consts::PI);
    assert_eq!("1.5".parse::<Angle>().unwrap().radians(), 1.5);
    assert!("abc".parse::<Angle>().is_err());
    assert_eq!("full".parse::<SectorSpec>().unwrap(), SectorSpec::Full);
    let s: SectorSpec = "0:0.5pi".parse().unwrap();
    assert_eq!(s.to_string(), "0:0.5pi");
    assert!("0-1".parse::<SectorSpec>().is_err());
}

#[test]
fn validation_rejects_bad_parameters() {
    let bad = [
        ("sector", "1:1"),
        ("order", "4"),
        ("p", "1"),
        ("k", "9"),
        ("threads", "0"),
        ("samples", "0"),
    ];
    for (k, v) in bad {
        let mut cfg = RunConfig::new(Command::GoldbachScan);
        cfg.set(k, v).unwrap();
        let err = cfg.validate().unwrap_err();
        assert_eq!(err.exit_code(), 2, "{k} = {v}: {err}");
    }
    let mut cfg = RunConfig::new(Command::HighlowReport);
    cfg.set("q", "12").unwrap();
    assert!(cfg.validate().is_err());
}

#[test]
fn exit_codes_separate_configuration_from_failures() {
    use gaussprimes::Error as E;
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    assert_eq!(CliError::Core(E::EmptySector).exit_code(), 2);
    assert_eq!(
        CliError::Core(E::Resolution {
            requested: 8,
            required: 64
        })
        .exit_code(),
        2
    );
    assert!(CliError::Core(E::Resolution {
        requested: 8,
        required: 64
    })
    .hint()
    .unwrap()
    .contains("64"));
    assert_eq!(CliError::Core(E::ModulusZero).exit_code(), 1);
}

#[test]
fn loglog_slope_recovers_power_law() {
    let xs = [1.0, 2.0, 4.0, 8.0];
    let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-0.75)).collect();
    assert!((loglog_slope(&xs, &ys).unwrap() + 0.75).abs() < 1e-12);
    assert_eq!(loglog_slope(&[1.0], &[1.0]), None);
}

#[test]
fn run_writes_report_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::new(Command::GoldbachScan);
    cfg.set("n", "2000").unwrap();
    cfg.out = dir.path().to_path_buf();
    let outcome = run(&cfg).unwrap();
    assert!(outcome.report.passed(), "{:?}", outcome.report.failures);
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("goldbach-scan.json")).unwrap()).unwrap();
    assert_eq!(json["schema"], 1);
    assert_eq!(json["parameters"]["n"], "2000");
    assert_eq!(json["results"]["exceptional"].as_array().unwrap().len(), 0);
    let csv = std::fs::read_to_string(dir.path().join("goldbach-scan-counts.csv")).unwrap();
    assert!(csv.starts_with("re,im,norm,count,weighted,boundary_distance\n"));
    assert_eq!(
        csv.lines().count() - 1,
        json["results"]["targets"].as_u64().unwrap() as usize
    );
}

#[test]
fn binary_verify_identities_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["verify-identities", "--n-max", "50", "-o"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("verify-identities.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "pass");
}

#[test]
fn binary_empty_sector_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["goldbach-scan", "--sector", "1:1", "-o"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("goldbach-scan.json").exists());
}

#[test]
fn binary_missing_command_exits_two() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn binary_config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("run.conf");
    std::fs::write(&file, "command = sieve\nn_max = 100000\n").unwrap();
    let out = bin()
        .arg("--config")
        .arg(&file)
        .args(["--n-max", "20000", "--print-config"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let cfg = RunConfig::from_file_str(&String::from_utf8(out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.command, Command::Sieve);
    assert_eq!(cfg.n_max, Some(20000));
}

#[test]
fn binary_reruns_are_identical_apart_from_timestamp() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for _ in 0..2 {
        let out = bin()
            .args(["improving-check", "-n", "900", "--pairs", "5", "--seed", "3", "-o"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(dir.path().join("improving-check.json")).unwrap();
        reports.push(without_timestamp(&text).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
