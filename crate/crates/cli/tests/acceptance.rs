//! Acceptance gate: one PASS/FAIL line per criterion, each with its pinned
//! tolerances and time budget.
//!
//! Runs without the libtest harness so the lines are always visible in
//! `cargo test` output. The process exits nonzero when a criterion fails
//! that is not listed in `KNOWN_FAILURES`, or when a listed one passes
//! (so the list cannot go stale).

use std::path::Path;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use gls_tailbound::gls::natural_function;
use gls_tailbound::model::{AsymptoticVariant, InnerModel, Model, OuterModel};
use gls_tailbound::numerics::MaximizeOptions;
use gls_tailbound::verify::{
    additivity_check, asymptotic_ratio_study, classical_riesz_check, decades, dominance_audit,
    dominance_cases, fenchel_closed_form_check, gamma_identity_check, identity_pipeline_check, log_grid,
    random_riesz_profiles, random_sum_cases, random_transfer_pairs, stein_matrix, stein_roundtrip,
    subgaussian_envelope_check, transfer_normalization_check, zeta_minimizer_check, RatioStudy,
    VerificationReport,
};

const SEED: u64 = 20_240_601;

type Criterion = (u32, &'static str, u64, fn() -> Verdict);

/// Criteria that cannot hold as stated; see the README.
/// 8: the inner-model ratio approaches 1 from below (≈0.87 at t = 1e10).
const KNOWN_FAILURES: &[u32] = &[8];

struct Verdict {
    pass: bool,
    detail: String,
}

fn from_reports(reports: &[VerificationReport]) -> Verdict {
    let failed: Vec<_> = reports.iter().filter(|r| !r.pass).collect();
    let worst = reports.iter().map(|r| r.discrepancy()).fold(0.0f64, f64::max);
    let mut detail = format!(
        "{} checks, {} failed, worst discrepancy {worst:.2e}",
        reports.len(),
        failed.len()
    );
    if let Some(f) = failed.first() {
        detail.push_str(&format!(
            "; first failure: {} {} ({:?})",
            f.check, f.params, f.note
        ));
    }
    Verdict {
        pass: !reports.is_empty() && failed.is_empty(),
        detail,
    }
}

fn mx() -> MaximizeOptions<f64> {
    MaximizeOptions::default()
}

fn stein() -> Verdict {
    let reports: Vec<_> = stein_matrix()
        .iter()
        .map(|(m, p)| stein_roundtrip(m, *p, 1e-6))
        .collect();
    from_reports(&reports)
}

fn gamma_identity() -> Verdict {
    let mut reports = Vec::new();
    for lambda in [0.5, 1.0, 3.0] {
        for alpha in [0.0, 1.0, 2.5, 7.0] {
            reports.push(gamma_identity_check(lambda, alpha, 1e-8));
        }
    }
    from_reports(&reports)
}

fn fenchel() -> Verdict {
    let mut reports = Vec::new();
    for m in [1.0f64, 2.0, 3.0] {
        // interior regime: stationary point e^{my-1} between 1.5 and 1000
        let ys: Vec<f64> = log_grid(1.5, 1000.0, 10)
            .iter()
            .map(|p| (1.0 + p.ln()) / m)
            .collect();
        reports.extend(fenchel_closed_form_check(m, &ys, 1e-6, &mx()));
    }
    reports.extend(subgaussian_envelope_check(&[2.0, 3.0, 5.0], 1e-5, &mx()));
    from_reports(&reports)
}

fn dominance() -> Verdict {
    let mut reports = Vec::new();
    for (m, ts) in dominance_cases() {
        assert_eq!(ts.len(), 200);
        let psi = natural_function(&m, mx().clip).expect("natural function");
        reports.extend(dominance_audit(&m, &psi, &ts, 1e-12, &mx()));
    }
    from_reports(&reports)
}

fn zeta() -> Verdict {
    let reports: Vec<_> = random_riesz_profiles(100, SEED)
        .iter()
        .flat_map(|z| zeta_minimizer_check(z, 1e-8, 1e-10, &mx()))
        .collect();
    from_reports(&reports)
}

fn riesz_shape() -> Verdict {
    let reports: Vec<_> = [0.5, 1.0, 3.0]
        .iter()
        .flat_map(|&cd| classical_riesz_check(cd, 1e-8, 1e-10, 0.1, &mx()))
        .collect();
    from_reports(&reports)
}

fn transfer() -> Verdict {
    let pairs = random_transfer_pairs(20, SEED);
    let mut reports: Vec<_> = pairs
        .iter()
        .map(|(m, z)| transfer_normalization_check(m, z, 1e-12, &mx()))
        .collect();
    let f = Model::Outer(OuterModel::new(1.0, 1.0, 2).expect("valid"));
    let g = Model::Inner(InnerModel::new(1.0, 1.0, 2).expect("valid"));
    reports.extend(identity_pipeline_check(
        &f,
        &log_grid(1e-4, 0.9 * f.sup_norm(), 12),
        1e-12,
        &mx(),
    ));
    reports.extend(identity_pipeline_check(
        &g,
        &log_grid(1e-2, 1e4, 12),
        1e-12,
        &mx(),
    ));
    from_reports(&reports)
}

fn asymptotic() -> Verdict {
    let window = |s: &RatioStudy, t: f64| s.ratio_at(t).is_some_and(|r| (1.0..=1.25).contains(&r));
    let outer = asymptotic_ratio_study(
        &Model::Outer(OuterModel::new(1.0, 1.0, 1).expect("valid")),
        AsymptoticVariant::Classic,
        &decades(-2, -10),
    );
    let inner = asymptotic_ratio_study(
        &Model::Inner(InnerModel::new(1.0, 1.0, 1).expect("valid")),
        AsymptoticVariant::Classic,
        &decades(2, 10),
    );
    let f21 = Model::Outer(OuterModel::new(2.0, 1.0, 1).expect("valid"));
    let classic = asymptotic_ratio_study(&f21, AsymptoticVariant::Classic, &decades(-2, -10));
    let corrected = asymptotic_ratio_study(&f21, AsymptoticVariant::Corrected, &decades(-2, -10));
    let closer = classic.errors.is_empty()
        && corrected.errors.is_empty()
        && classic.rows.len() == corrected.rows.len()
        && classic
            .rows
            .iter()
            .zip(&corrected.rows)
            .all(|(p, c)| (c.ratio - 1.0).abs() < (p.ratio - 1.0).abs());

    let outer_ok = outer.monotone_toward_one && window(&outer, 1e-10);
    let inner_ok = inner.monotone_toward_one && window(&inner, 1e10);
    let part = |ok: bool| if ok { "ok" } else { "FAIL" };
    Verdict {
        pass: outer_ok && inner_ok && closer,
        detail: format!(
            "outer f(1,1) monotone={} ratio(1e-10)={:.4} [{}]; inner g(1,1) monotone={} ratio(1e10)={:.4} [{}]; \
             corrected closer for a=2 [{}]",
            outer.monotone_toward_one,
            outer.ratio_at(1e-10).unwrap_or(f64::NAN),
            part(outer_ok),
            inner.monotone_toward_one,
            inner.ratio_at(1e10).unwrap_or(f64::NAN),
            part(inner_ok),
            part(closer),
        ),
    }
}

fn additivity() -> Verdict {
    let reports: Vec<_> = random_sum_cases(50, SEED)
        .iter()
        .map(|(s, p)| additivity_check(s, *p, 1e-10))
        .collect();
    from_reports(&reports)
}

fn cli_determinism() -> Verdict {
    let exe = Path::new(env!("CARGO_BIN_EXE_gls-tailbound"));
    let dir = std::env::temp_dir().join(format!("gls-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).expect("temp dir");
    let args = [
        "operator-bound",
        "--family",
        "outer",
        "--a",
        "1",
        "--gamma",
        "1",
        "--d",
        "2",
        "--op",
        "riesz-type",
        "--C",
        "2",
        "--alpha",
        "1",
        "--beta",
        "0.5",
        "--a1",
        "2.5",
        "--b1",
        "40",
        "--grid-min",
        "1e-4",
        "--grid-max",
        "0.5",
        "--grid-n",
        "40",
        "--grid-log",
    ];
    let run = |name: &str| {
        let out = dir.join(name);
        let status = Command::new(exe)
            .args(args)
            .arg("--out")
            .arg(&out)
            .env_remove("GLS_TAILBOUND_CONFIG")
            .stderr(Stdio::null())
            .status()
            .expect("spawn");
        (status.code(), std::fs::read(&out).unwrap_or_default())
    };
    let (c1, b1) = run("first.csv");
    let (c2, b2) = run("second.csv");
    let identical = c1 == Some(0) && c2 == Some(0) && !b1.is_empty() && b1 == b2;

    let ok = Command::new(exe)
        .args(["verify", "--suite", "stein"])
        .output()
        .expect("spawn");
    let fault = Command::new(exe)
        .args(["verify", "--suite", "stein", "--tol", "0"])
        .output()
        .expect("spawn");
    let _ = std::fs::remove_dir_all(&dir);
    let contract = ok.status.code() == Some(0) && fault.status.code() == Some(1);
    Verdict {
        pass: identical && contract,
        detail: format!(
            "{} bytes, identical={identical}; verify exit {:?}, with --tol 0 exit {:?}",
            b1.len(),
            ok.status.code(),
            fault.status.code()
        ),
    }
}

fn main() {
    let criteria: [Criterion; 10] = [
        (1, "Stein round trips (rel 1e-6)", 5, stein),
        (2, "Gamma-identity quadrature (rel 1e-8)", 1, gamma_identity),
        (
            3,
            "Fenchel closed form (rel 1e-6) and sub-Gaussian envelope (rel 1e-5)",
            1,
            fenchel,
        ),
        (
            4,
            "Dominance of the natural-function envelope (slack 1e-12)",
            10,
            dominance,
        ),
        (5, "Riesz-type zeta minimizer (p 1e-8, value rel 1e-10)", 2, zeta),
        (
            6,
            "Classical Riesz shape (p 1e-8, value rel 1e-10, band [0.9, 1.1])",
            1,
            riesz_shape,
        ),
        (
            7,
            "Transfer normalization and identity pipeline (1e-12)",
            2,
            transfer,
        ),
        (8, "Asymptotic ratios (window [1, 1.25])", 5, asymptotic),
        (9, "Disjoint-support additivity (rel 1e-10)", 1, additivity),
        (10, "CLI determinism and exit-code contract", 2, cli_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, name, budget_s, run) in criteria {
        let start = Instant::now();
        let verdict = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget_s);
        let pass = verdict.pass && in_time;
        println!(
            "{} [{id:>2}] {name}: {}; {:.3} s (budget {budget_s} s{})",
            if pass { "PASS" } else { "FAIL" },
            verdict.detail,
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" },
        );
        if pass == KNOWN_FAILURES.contains(&id) {
            unexpected.push(id);
        }
    }
    if unexpected.is_empty() {
        println!("acceptance: all outcomes as expected (known failures: {KNOWN_FAILURES:?})");
    } else {
        println!("acceptance: unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
