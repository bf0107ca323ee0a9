use std::path::{Path, PathBuf};
use std::process::Command;

use gls_tailbound_cli::{run, EXIT_CHECKS_FAILED, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn cli(args: &[&str]) -> Run {
    cli_with_env(args, None)
}

fn cli_with_env(args: &[&str], env_config: Option<PathBuf>) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("gls-tailbound").chain(args.iter().copied());
    let code = run(argv, env_config, &mut out, &mut err);
    Run {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

/// Data rows of a CSV output, split into cells (comments and header dropped).
fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    let k = header
        .split(',')
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows(csv).into_iter().map(|r| r[k].clone()).collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s:?}"))
}

fn config_hash(csv: &str) -> &str {
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# gls-tailbound "), "{first}");
    first.rsplit("config=").next().unwrap()
}

#[test]
fn outer_l2_norm_in_one_dimension() {
    let r = cli(&[
        "norm", "--family", "outer", "--a", "1", "--gamma", "0", "--d", "1", "--p", "2",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let norm = num(&column(&r.stdout, "norm")[0]);
    assert!((norm - 2f64.sqrt()).abs() < 1e-12, "{norm}");
}

#[test]
fn exponent_outside_the_range_is_rejected() {
    let r = cli(&["norm", "--d", "2", "--p", "2"]);
    assert_eq!(r.code, EXIT_COMPUTE);
    assert!(r.stderr.contains("out of integrability range"), "{}", r.stderr);
    assert!(r.stderr.contains("(2, inf)"), "{}", r.stderr);
    assert!(r.stdout.is_empty());
}

#[test]
fn default_norm_grid_stays_inside_the_range() {
    for family in ["outer", "inner", "sum"] {
        let r = cli(&["norm", "--family", family, "--d", "2", "--b", "3"]);
        assert_eq!(r.code, EXIT_OK, "{family}: {}", r.stderr);
        assert_eq!(rows(&r.stdout).len(), 40);
    }
}

#[test]
fn norm_with_psi_reports_ratio_and_gls_norm() {
    let r = cli(&[
        "norm", "--family", "inner", "--b", "2", "--psi", "natural", "--p", "1.2,1.8",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    for ratio in column(&r.stdout, "ratio") {
        assert!((num(&ratio) - 1.0).abs() < 1e-12);
    }
    assert!(r.stdout.contains("# gls_norm=1 "), "{}", r.stdout);
}

#[test]
fn norm_from_a_tail_table() {
    // tail of an indicator of a unit-measure set: every L^p norm is 1
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tail.csv");
    std::fs::write(&path, "# indicator\nt,T\n0.5,1\n1,1\n").unwrap();
    let r = cli(&["norm", "--tail-file", path.to_str().unwrap(), "--p", "1,2,7.5"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    for v in column(&r.stdout, "norm") {
        assert!((num(&v) - 1.0).abs() < 1e-9, "{v}");
    }
}

#[test]
fn outer_tail_example() {
    let r = cli(&[
        "tail", "--family", "outer", "--a", "1", "--gamma", "0", "--d", "1", "--t", "0.5",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let t = num(&column(&r.stdout, "T")[0]);
    assert!((t - 2.0).abs() < 1e-12, "{t}");
}

#[test]
fn asymptotic_column_is_empty_outside_its_regime() {
    let r = cli(&[
        "tail", "--family", "inner", "--b", "1", "--nu", "1", "--t", "0.5,10",
    ]);
    assert_eq!(r.code, EXIT_OK);
    let rs = rows(&r.stdout);
    assert_eq!(rs[0][2..], ["", "0", ""]);
    assert_eq!(rs[1][3], "1");
    assert!((num(&rs[1][1]) - 0.349_105_600_548_139_9).abs() < 1e-12);
}

#[test]
fn corrected_variant_changes_only_when_a_differs_from_one() {
    let base = ["tail", "--a", "2", "--gamma", "1", "--t", "1e-6"];
    let classic = cli(&base);
    let corrected = cli(&[&base[..], &["--variant", "corrected"]].concat());
    let p = num(&column(&classic.stdout, "T_asymptotic")[0]);
    let c = num(&column(&corrected.stdout, "T_asymptotic")[0]);
    assert!((c / p - 4.0).abs() < 1e-12, "a^(a gamma d) = 4, got {}", c / p);
}

#[test]
fn constant_psi_envelope_example() {
    let r = cli(&[
        "bound",
        "--psi",
        "parametric",
        "--psi-a",
        "1",
        "--psi-b",
        "3",
        "--psi-alpha",
        "0",
        "--psi-beta",
        "0",
        "--u",
        "1",
        "--t",
        "2.718281828459045",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let big_r = num(&column(&r.stdout, "R")[0]);
    assert!((big_r - (-3f64).exp()).abs() < 1e-5, "{big_r}");
    assert!((big_r - 0.049787).abs() < 5e-7);
    assert_eq!(column(&r.stdout, "dominance"), ["ok"]);
}

#[test]
fn default_bound_uses_the_natural_norm_and_dominates() {
    for family in ["outer", "inner", "sum"] {
        let r = cli(&[
            "bound", "--family", family, "--gamma", "1", "--d", "2", "--b", "2",
        ]);
        assert_eq!(r.code, EXIT_OK, "{family}: {}", r.stderr);
        assert!(r.stdout.contains("# gls_norm=1 "), "{}", r.stdout);
        assert!(column(&r.stdout, "dominance").iter().all(|d| d == "ok"));
    }
}

#[test]
fn understated_norm_fails_the_dominance_check() {
    let r = cli(&[
        "bound",
        "--psi",
        "parametric",
        "--psi-a",
        "2",
        "--psi-b",
        "3",
        "--u",
        "0.1",
        "--t",
        "0.2,0.5",
    ]);
    assert_eq!(r.code, EXIT_CHECKS_FAILED, "{}", r.stdout);
    assert!(column(&r.stdout, "dominance").contains(&"FAIL".to_string()));
    assert!(r.stderr.contains("dominance check failed"));
}

#[test]
fn divergent_gls_norm_needs_an_explicit_u() {
    let r = cli(&["bound", "--psi", "power", "--m", "2", "--d", "2"]);
    assert_eq!(r.code, EXIT_COMPUTE);
    assert!(r.stderr.contains("infinite"), "{}", r.stderr);
}

#[test]
fn unit_zeta_reproduces_the_plain_bound() {
    let t = "1e-4,0.01,0.2,0.9";
    let plain = cli(&["bound", "--gamma", "1", "--d", "2", "--t", t]);
    let op = cli(&[
        "operator-bound",
        "--op",
        "none",
        "--gamma",
        "1",
        "--d",
        "2",
        "--t",
        t,
    ]);
    assert_eq!((plain.code, op.code), (EXIT_OK, EXIT_OK));
    for (a, b) in column(&plain.stdout, "R").iter().zip(column(&op.stdout, "R")) {
        let (a, b) = (num(a), num(&b));
        assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
    }
}

#[test]
fn classical_profile_warns_when_joint_validity_fails() {
    let r = cli(&["operator-bound", "--op", "classical", "--Cd", "1.5", "--t", "0.3"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.stderr.contains("a·d > 1 fails"), "{}", r.stderr);
    assert!(r.stdout.contains("# warning: joint-validity"));
    assert!(r.stdout.contains("# operator: classical_riesz[Cd=1.5]"));

    let ok = cli(&["operator-bound", "--op", "classical", "--d", "2", "--t", "0.3"]);
    assert!(!ok.stderr.contains("a·d > 1 fails"), "{}", ok.stderr);
}

#[test]
fn riesz_type_operator_json_carries_transfer_metadata() {
    let r = cli(&[
        "operator-bound",
        "--op",
        "riesz-type",
        "--C",
        "2",
        "--alpha",
        "1",
        "--beta",
        "0.5",
        "--a1",
        "2",
        "--b1",
        "20",
        "--t",
        "0.1",
        "--format",
        "json",
    ]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(v["tool"], "gls-tailbound");
    assert_eq!(v["report"]["v"], 1);
    assert_eq!(v["transfer"]["operator"]["kind"], "riesz_type");
    assert_eq!(v["transfer"]["interval"]["lo"], 2.0);
    assert_eq!(v["transfer"]["interval"]["hi"], 20.0);
    assert_eq!(v["transfer"]["certificate"], 1.0);
    assert_eq!(v["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn verify_runs_selected_suites() {
    let r = cli(&["verify", "--suite", "stein"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    let checks: Vec<_> = r.stdout.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert!(checks[0].starts_with("stein_roundtrip"), "{}", r.stdout);
    assert_eq!(checks.len(), 2, "{}", r.stdout);

    let json = cli(&["verify", "--suite", "quadrature,riesz", "--format", "json"]);
    let lines: Vec<serde_json::Value> = json
        .stdout
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.iter().all(|l| l["pass"] == true));
    assert!(lines.iter().any(|l| l["check"] == "gamma_identity"));
    assert!(lines.iter().all(|l| l["check"] != "stein_roundtrip"));
}

#[test]
fn verify_default_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.jsonl");
    let r = cli(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.stdout);
    assert!(r.stdout.contains(" 0 failed"));
    let jsonl = std::fs::read_to_string(out).unwrap();
    assert!(jsonl.lines().count() > 1000);
}

#[test]
fn zero_tolerance_fails_verification() {
    let r = cli(&["verify", "--suite", "stein", "--tol", "0"]);
    assert_eq!(r.code, EXIT_CHECKS_FAILED);
    let neg = cli(&["verify", "--tol", "-1"]);
    assert_eq!(neg.code, EXIT_USAGE);
    let unknown = cli(&["verify", "--suite", "nope"]);
    assert_eq!(unknown.code, EXIT_USAGE);
    assert!(unknown.stderr.contains("known: stein"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bound", "--bogus"][..],
        &["tail", "--grid-n", "1"],
        &["tail", "--grid-min", "5", "--grid-max", "1"],
        &["tail", "--grid-log", "--grid-min", "0"],
        &["tail", "--family", "inner", "--nu", "0"],
        &["bound", "--clip", "0"],
        &["tail", "--t", "-1"],
        &["bound", "--psi", "table"],
        &["frobnicate"],
    ] {
        let r = cli(args);
        assert_eq!(r.code, EXIT_USAGE, "{args:?}: {}", r.stderr);
        assert!(!r.stderr.is_empty());
    }
    let help = cli(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("operator-bound"));
}

#[test]
fn config_file_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        "# shared settings\nfamily = outer\na = 2\ngamma = 1\nt = 0.01\n",
    )
    .unwrap();
    let cfg_s = cfg.to_str().unwrap();

    let from_file = cli(&["tail", "--config", cfg_s]);
    let explicit = cli(&["tail", "--a", "2", "--gamma", "1", "--t", "0.01"]);
    assert_eq!(from_file.code, EXIT_OK, "{}", from_file.stderr);
    assert_eq!(
        from_file.stdout, explicit.stdout,
        "same resolved config, same bytes"
    );

    let overridden = cli(&["tail", "--config", cfg_s, "--a", "1"]);
    assert!(overridden.stdout.contains("f[a=1,gamma=1,d=1]"));
    assert_ne!(config_hash(&overridden.stdout), config_hash(&from_file.stdout));

    // environment file applies unless --config is given
    let via_env = cli_with_env(&["tail"], Some(cfg.clone()));
    assert_eq!(via_env.stdout, from_file.stdout);
    let other = dir.path().join("other.conf");
    std::fs::write(&other, "a = 3\n").unwrap();
    let both = cli_with_env(
        &["tail", "--config", other.to_str().unwrap(), "--t", "0.01"],
        Some(cfg),
    );
    assert!(both.stdout.contains("f[a=3,gamma=0,d=1]"), "{}", both.stdout);
}

#[test]
fn bad_config_files_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    for (body, needle) in [
        ("colour = red\n", "unknown key"),
        ("a = two\n", "config key `a`"),
        ("a\n", "key = value"),
    ] {
        let cfg = dir.path().join("bad.conf");
        std::fs::write(&cfg, body).unwrap();
        let r = cli(&["tail", "--config", cfg.to_str().unwrap()]);
        assert_eq!(r.code, EXIT_USAGE, "{body}");
        assert!(r.stderr.contains(needle), "{}", r.stderr);
    }
    let missing = cli(&["tail", "--config", dir.path().join("absent").to_str().unwrap()]);
    assert_eq!(missing.code, EXIT_USAGE);
}

#[test]
fn output_file_does_not_change_the_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["operator-bound", "--op", "classical", "--d", "3", "--grid-n", "7"];
    for p in [&a, &b] {
        let r = cli(&[&args[..], &["--out", p.to_str().unwrap()]].concat());
        assert_eq!(r.code, EXIT_OK, "{}", r.stderr);
        assert!(r.stdout.is_empty());
    }
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x, y);
    assert_eq!(String::from_utf8(x).unwrap(), cli(&args).stdout);
}

#[test]
fn json_and_csv_share_the_config_hash() {
    let csv = cli(&["tail", "--t", "0.1"]);
    let json = cli(&["tail", "--t", "0.1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&json.stdout).unwrap();
    // the format itself is part of the resolved config
    assert_ne!(v["config_sha256"].as_str().unwrap(), config_hash(&csv.stdout));
    assert_eq!(v["rows"][0]["t"], 0.1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
}

fn binary() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_gls-tailbound"))
}

#[test]
fn binary_honours_the_exit_code_contract() {
    let status = |args: &[&str]| {
        Command::new(binary())
            .args(args)
            .env_remove("GLS_TAILBOUND_CONFIG")
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&["tail", "--t", "0.5"]), Some(EXIT_OK));
    assert_eq!(
        status(&["verify", "--suite", "riesz", "--tol", "0"]),
        Some(EXIT_CHECKS_FAILED)
    );
    assert_eq!(status(&["tail", "--nope"]), Some(EXIT_USAGE));
    assert_eq!(status(&["norm", "--p", "0.5"]), Some(EXIT_COMPUTE));
}

#[test]
fn binary_reads_the_config_environment_variable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("env.conf");
    std::fs::write(&cfg, "family = inner\nb = 1\nnu = 1\nt = 10\n").unwrap();
    let out = Command::new(binary())
        .arg("tail")
        .env("GLS_TAILBOUND_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let s = String::from_utf8(out.stdout).unwrap();
    assert!((num(&column(&s, "T")[0]) - 0.349_105_600_548_139_9).abs() < 1e-12);
}
