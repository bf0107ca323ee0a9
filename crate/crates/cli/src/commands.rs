use std::fs::File;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use gls_tailbound::fenchel::tail_envelope;
use gls_tailbound::gls::{gls_norm, natural_function, norm_from_tail, GeneratingFunction, LpProfile};
use gls_tailbound::io::{format_number, read_psi_table, read_tail_table, write_bound_csv};
use gls_tailbound::model::{AsymptoticVariant, InnerModel, LevelSet, Model, OuterModel, SumModel, TailCurve};
use gls_tailbound::numerics::{Interval, MaximizeOptions};
use gls_tailbound::operator::{theorem_tail_bound, BoundInput, OperatorProfile};
use gls_tailbound::verify::{all_pass, run_suites, summary_table, write_jsonl, Suite, SuiteOptions};
use gls_tailbound::{BoundReport64, GeneratingFunction64, GlsNorm64, Model64};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;
use crate::config::{load_config, sha256_hex, GridSpec, Resolver};
use crate::{CliError, Outcome, VERSION};

/// Relative slack of the dominance audit `T(t) <= R(t)`.
const DOMINANCE_SLACK: f64 = 1e-9;

type Res<T> = Result<T, CliError>;

pub(crate) fn execute(
    cli: Cli,
    env_config: Option<PathBuf>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Res<Outcome> {
    let file = match cli.config.or(env_config) {
        Some(path) => load_config(&path)?,
        None => Default::default(),
    };
    let mut ctx = Ctx {
        res: Resolver::new(file),
        command: cli.command.name(),
    };
    match cli.command {
        Command::Norm(a) => norm(&mut ctx, a, stdout),
        Command::Tail(a) => tail(&mut ctx, a, stdout),
        Command::Bound(a) => bound(&mut ctx, a, stdout, stderr),
        Command::OperatorBound(a) => operator_bound(&mut ctx, a, stdout, stderr),
        Command::Verify(a) => verify(&mut ctx, a, stdout),
    }
}

struct Ctx {
    res: Resolver,
    command: &'static str,
}

impl Ctx {
    fn hash(&self) -> String {
        sha256_hex(&self.res.canonical(self.command))
    }

    /// The two leading comment lines of every output.
    fn header(&self) -> Vec<String> {
        vec![
            format!("gls-tailbound {VERSION} config={}", self.hash()),
            format!("config: {}", self.res.canonical(self.command)),
        ]
    }

    fn envelope(&self, body: Value) -> Value {
        let mut v = json!({
            "tool": "gls-tailbound",
            "version": VERSION,
            "command": self.command,
            "config_sha256": self.hash(),
            "config": self.res.canonical(self.command),
        });
        if let (Value::Object(env), Value::Object(body)) = (&mut v, body) {
            env.extend(body);
        }
        v
    }

    fn output(&mut self, o: &OutputArgs) -> Res<(Option<PathBuf>, Format)> {
        let out = self.res.opt("out", o.out.clone())?;
        let format = self.res.get("format", o.format, Format::Csv)?;
        Ok((out, format))
    }
}

fn emit(out: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Res<()> {
    match out {
        Some(path) => std::fs::write(path, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn json_bytes(v: &Value) -> Res<Vec<u8>> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| CliError::Usage(e.to_string()))?;
    b.push(b'\n');
    Ok(b)
}

fn cell(x: f64) -> Res<String> {
    if x.is_nan() {
        Ok(String::new())
    } else {
        Ok(format_number(x)?)
    }
}

fn model_error(e: gls_tailbound::Error) -> CliError {
    CliError::Usage(e.to_string())
}

// ---------------------------------------------------------------------------
// shared resolution

fn resolve_model(r: &mut Resolver, m: &ModelArgs) -> Res<Model64> {
    let family = r.get("family", m.family, Family::Outer)?;
    let d = r.get("d", m.d, 1u32)?;
    let outer = |r: &mut Resolver| -> Res<OuterModel<f64>> {
        let a = r.get("a", m.a, 1.0)?;
        let gamma = r.get("gamma", m.gamma, 0.0)?;
        OuterModel::new(a, gamma, d).map_err(model_error)
    };
    let inner = |r: &mut Resolver| -> Res<InnerModel<f64>> {
        let b = r.get("b", m.b, 2.0)?;
        let nu = r.get("nu", m.nu, 1.0)?;
        InnerModel::new(b, nu, d).map_err(model_error)
    };
    Ok(match family {
        Family::Outer => Model::Outer(outer(r)?),
        Family::Inner => Model::Inner(inner(r)?),
        Family::Sum => {
            let o = outer(r)?;
            let i = inner(r)?;
            Model::Sum(SumModel::new(o, i).map_err(model_error)?)
        }
    })
}

fn resolve_search(r: &mut Resolver, s: &SearchArgs) -> Res<MaximizeOptions<f64>> {
    let clip = r.get("clip", s.clip, 1e-6)?;
    if !(clip > 0.0 && clip < 0.5) {
        return Err(CliError::Usage(format!("clip must be in (0, 0.5), got {clip}")));
    }
    let p_max = r.get("pmax", s.pmax, 1e4)?;
    if !(p_max > 1.0 && p_max.is_finite()) {
        return Err(CliError::Usage(format!(
            "pmax must be finite and > 1, got {p_max}"
        )));
    }
    Ok(MaximizeOptions {
        clip,
        p_max,
        ..MaximizeOptions::default()
    })
}

fn resolve_grid(r: &mut Resolver, g: &GridArgs, default: GridSpec) -> Res<Vec<f64>> {
    let spec = GridSpec {
        min: r.get("grid-min", g.grid_min, default.min)?,
        max: r.get("grid-max", g.grid_max, default.max)?,
        n: r.get("grid-n", g.grid_n, default.n)?,
        log: r.get("grid-log", g.grid_log, default.log)?,
    };
    spec.validate()?;
    Ok(spec.points())
}

/// Explicit list if given (flag or config), otherwise the grid.
fn resolve_points(
    r: &mut Resolver,
    key: &str,
    explicit: Option<Vec<f64>>,
    g: &GridArgs,
    default: GridSpec,
) -> Res<Vec<f64>> {
    match r.opt(key, explicit)? {
        Some(v) if v.is_empty() => Err(CliError::Usage(format!("--{key} needs at least one value"))),
        Some(v) => Ok(v),
        None => resolve_grid(r, g, default),
    }
}

fn positive_levels(t: &[f64]) -> Res<()> {
    match t.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
        Some(bad) => Err(CliError::Usage(format!(
            "levels t must be positive and finite, got {bad}"
        ))),
        None => Ok(()),
    }
}

/// Default level grid covering the model's nontrivial regime.
fn default_levels(m: &Model64) -> GridSpec {
    let (min, max) = match m {
        Model::Outer(_) => (1e-6, 0.999 * m.sup_norm()),
        Model::Inner(_) => (1e-2, 1e6),
        Model::Sum(_) => (1e-6, 1e6),
    };
    GridSpec {
        min,
        max,
        n: 50,
        log: true,
    }
}

/// Default exponent grid spanning the interior of `dom`.
fn default_exponents(dom: &Interval<f64>) -> GridSpec {
    let width = if dom.hi.is_finite() { dom.hi - dom.lo } else { 20.0 };
    let min = if dom.lo_closed {
        dom.lo
    } else {
        dom.lo + 0.02 * width
    };
    let max = if dom.hi.is_finite() {
        dom.hi - 0.02 * width
    } else {
        dom.lo + width
    };
    GridSpec {
        min,
        max,
        n: 40,
        log: false,
    }
}

/// `ψ` from the flags; `None` when no `--psi` was given and none is required.
fn resolve_psi(
    r: &mut Resolver,
    a: &PsiArgs,
    model: Option<&Model64>,
    clip: f64,
    default: Option<PsiChoice>,
) -> Res<Option<(PsiChoice, GeneratingFunction64)>> {
    let choice = match (r.opt("psi", a.psi)?, default) {
        (Some(c), _) => c,
        (None, Some(c)) => {
            r.note("psi", crate::config::ConfigValue::render(&c));
            c
        }
        (None, None) => return Ok(None),
    };
    let psi = match choice {
        PsiChoice::Natural => {
            let m = model.ok_or_else(|| CliError::Usage("--psi natural needs a model".into()))?;
            natural_function(m, clip)?
        }
        PsiChoice::Parametric => {
            let lo = r.get("psi-a", a.psi_a, 1.0)?;
            let hi = r.get("psi-b", a.psi_b, f64::INFINITY)?;
            let alpha = r.get("psi-alpha", a.psi_alpha, 0.0)?;
            let beta = r.get("psi-beta", a.psi_beta, 0.0)?;
            let scale = r.get("psi-scale", a.psi_scale, 1.0)?;
            GeneratingFunction::parametric_scaled(scale, lo, hi, alpha, beta).map_err(model_error)?
        }
        PsiChoice::Power => {
            let m = r.get("m", a.m, 2.0)?;
            GeneratingFunction::power(m).map_err(model_error)?
        }
        PsiChoice::Iwaniec => {
            let p0 = r.get("p0", a.p0, 2.0)?;
            let theta = r.get("theta", a.theta, 1.0)?;
            GeneratingFunction::iwaniec_sbordone(p0, theta).map_err(model_error)?
        }
        PsiChoice::Table => {
            let path: PathBuf = r.required("psi-file", a.psi_file.clone())?;
            let table = read_psi_table(open(&path)?)?;
            GeneratingFunction::tabulated(table)?
        }
    };
    Ok(Some((choice, psi)))
}

fn open(path: &Path) -> Res<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| CliError::Usage(format!("cannot open {}: {e}", path.display())))
}

fn psi_comment(choice: PsiChoice, psi: &GeneratingFunction64) -> String {
    format!(
        "psi: {} on {}",
        crate::config::ConfigValue::render(&choice),
        psi.domain
    )
}

fn gls_comment(n: &GlsNorm64) -> Res<String> {
    Ok(format!(
        "gls_norm={} argmax_p={} boundary={} divergent={} converged={}",
        if n.divergent {
            "inf".to_string()
        } else {
            format_number(n.value)?
        },
        format_number(n.argmax_p)?,
        n.boundary_hit.as_str(),
        u8::from(n.divergent),
        u8::from(n.converged),
    ))
}

// ---------------------------------------------------------------------------
// norm

#[derive(Serialize)]
struct NormRow {
    p: f64,
    norm: f64,
    ln_norm: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    psi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio: Option<f64>,
}

fn norm(ctx: &mut Ctx, a: NormArgs, stdout: &mut dyn Write) -> Res<Outcome> {
    let r = &mut ctx.res;
    let opts = resolve_search(r, &a.search)?;
    let tail_file: Option<PathBuf> = r.opt("tail-file", a.tail_file.clone())?;

    let (source, profile, model) = match &tail_file {
        Some(path) => {
            let rel_tol = r.get("rel-tol", a.rel_tol, 1e-10)?;
            if !(rel_tol > 0.0 && rel_tol < 1.0) {
                return Err(CliError::Usage(format!(
                    "rel-tol must be in (0, 1), got {rel_tol}"
                )));
            }
            let table = read_tail_table(open(path)?)?;
            let dom = Interval::closed_open(1.0, f64::INFINITY)?;
            let curve = TailCurve::tabulated(table);
            let profile = LpProfile::from_tail(curve.clone(), dom, rel_tol);
            (
                format!("tail table {}", path.display()),
                (profile, Some((curve, rel_tol))),
                None,
            )
        }
        None => {
            let m = resolve_model(r, &a.model)?;
            (m.label(), (LpProfile::from_model(m)?, None), Some(m))
        }
    };
    let (profile, tail_curve) = profile;
    let domain = profile.domain;
    let ps = resolve_points(r, "p", a.p.clone(), &a.grid, default_exponents(&domain))?;
    let psi = resolve_psi(r, &a.psi, model.as_ref(), opts.clip, None)?;
    let (out, format) = ctx.output(&a.output)?;

    let mut rows = Vec::with_capacity(ps.len());
    for &p in &ps {
        domain.check(p, "integrability interval")?;
        let ln_norm = profile.ln_eval(p)?;
        let (psi_v, ratio) = match &psi {
            Some((_, g)) => {
                let ln_psi = g.ln_eval(p).ok();
                (ln_psi.map(f64::exp), ln_psi.map(|s| (ln_norm - s).exp()))
            }
            None => (None, None),
        };
        rows.push(NormRow {
            p,
            norm: ln_norm.exp(),
            ln_norm,
            psi: psi_v,
            ratio,
        });
    }
    let gls = match &psi {
        Some((_, g)) => Some(match &tail_curve {
            Some((curve, rel_tol)) => norm_from_tail(curve, g, &opts, *rel_tol)?.norm,
            None => gls_norm(&profile, g, &opts)?,
        }),
        None => None,
    };

    let bytes = match format {
        Format::Json => json_bytes(&ctx.envelope(json!({
            "source": source,
            "domain": domain,
            "psi": psi.as_ref().map(|(c, g)| json!({"kind": crate::config::ConfigValue::render(c), "domain": g.domain})),
            "gls_norm": gls,
            "rows": rows,
        })))?,
        Format::Csv => {
            let mut s = String::new();
            let mut comments = ctx.header();
            comments.push(format!("source: {source} (integrable on {domain})"));
            if let Some((c, g)) = &psi {
                comments.push(psi_comment(*c, g));
            }
            if let Some(n) = &gls {
                comments.push(gls_comment(n)?);
            }
            for c in comments {
                s.push_str(&format!("# {c}\n"));
            }
            s.push_str(if psi.is_some() { "p,norm,ln_norm,psi,ratio\n" } else { "p,norm,ln_norm\n" });
            for row in &rows {
                s.push_str(&format!("{},{},{}", cell(row.p)?, cell(row.norm)?, cell(row.ln_norm)?));
                if psi.is_some() {
                    let psi_cell = row.psi.map(cell).transpose()?.unwrap_or_default();
                    let ratio_cell = row.ratio.map(cell).transpose()?.unwrap_or_default();
                    s.push_str(&format!(",{psi_cell},{ratio_cell}"));
                }
                s.push('\n');
            }
            s.into_bytes()
        }
    };
    emit(out.as_deref(), &bytes, stdout)?;
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// tail

#[derive(Serialize)]
struct TailRow {
    t: f64,
    tail: f64,
    asymptotic: Option<f64>,
    ratio: Option<f64>,
}

fn tail(ctx: &mut Ctx, a: TailArgs, stdout: &mut dyn Write) -> Res<Outcome> {
    let r = &mut ctx.res;
    let m = resolve_model(r, &a.model)?;
    let variant = match r.get("variant", a.variant, Variant::Classic)? {
        Variant::Classic => AsymptoticVariant::Classic,
        Variant::Corrected => AsymptoticVariant::Corrected,
    };
    let level_set = if r.get("exact-levelset", a.exact_levelset, false)? {
        LevelSet::Exact
    } else {
        LevelSet::Shell
    };
    let ts = resolve_points(r, "t", a.t.clone(), &a.grid, default_levels(&m))?;
    positive_levels(&ts)?;
    let (out, format) = ctx.output(&a.output)?;

    let mut rows = Vec::with_capacity(ts.len());
    for &t in &ts {
        let exact = m.tail(t, level_set)?;
        // outside its regime the leading-order formula is simply not reported
        let asymptotic = m
            .tail_asymptotic(t, variant)
            .ok()
            .filter(|v| v.is_finite() && *v > 0.0);
        rows.push(TailRow {
            t,
            tail: exact,
            asymptotic,
            ratio: asymptotic.map(|v| exact / v),
        });
    }

    let bytes = match format {
        Format::Json => json_bytes(&ctx.envelope(json!({
            "model": m,
            "level_set": level_set,
            "variant": variant,
            "rows": rows,
        })))?,
        Format::Csv => {
            let mut s = String::new();
            let mut comments = ctx.header();
            comments.push(format!("model: {}", m.label()));
            for c in comments {
                s.push_str(&format!("# {c}\n"));
            }
            s.push_str("t,T,T_asymptotic,asymptotic_valid,ratio\n");
            for row in &rows {
                let (asym, ratio) = match row.asymptotic {
                    Some(v) => (cell(v)?, cell(row.ratio.unwrap_or(f64::NAN))?),
                    None => (String::new(), String::new()),
                };
                s.push_str(&format!(
                    "{},{},{asym},{},{ratio}\n",
                    cell(row.t)?,
                    cell(row.tail)?,
                    u8::from(row.asymptotic.is_some())
                ));
            }
            s.into_bytes()
        }
    };
    emit(out.as_deref(), &bytes, stdout)?;
    Ok(Outcome::Ok)
}

// ---------------------------------------------------------------------------
// bound / operator-bound

fn write_report(
    ctx: &Ctx,
    report: &BoundReport64,
    mut comments: Vec<String>,
    extra_json: Value,
    format: Format,
) -> Res<Vec<u8>> {
    Ok(match format {
        Format::Json => {
            let mut body = json!({ "report": report });
            if let (Value::Object(b), Value::Object(extra)) = (&mut body, extra_json) {
                b.extend(extra);
            }
            json_bytes(&ctx.envelope(body))?
        }
        Format::Csv => {
            let mut all = ctx.header();
            all.append(&mut comments);
            let mut buf = Vec::new();
            write_bound_csv(report, &all, &mut buf)?;
            buf
        }
    })
}

fn finish_report(report: &BoundReport64, stderr: &mut dyn Write) -> Res<Outcome> {
    for w in &report.warnings {
        writeln!(stderr, "warning: {w}")?;
    }
    if report.has_dominance() && !report.dominance_holds() {
        writeln!(
            stderr,
            "dominance check failed: the envelope is below the exact tail"
        )?;
        return Ok(Outcome::ChecksFailed);
    }
    Ok(Outcome::Ok)
}

fn bound(ctx: &mut Ctx, a: BoundArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Res<Outcome> {
    let r = &mut ctx.res;
    let m = resolve_model(r, &a.model)?;
    let opts = resolve_search(r, &a.search)?;
    let (choice, psi) = resolve_psi(r, &a.psi, Some(&m), opts.clip, Some(PsiChoice::Natural))?
        .expect("a default generating function is supplied");
    let ts = resolve_points(r, "t", a.t.clone(), &a.grid, default_levels(&m))?;
    positive_levels(&ts)?;
    let given_u = r.opt("u", a.u)?;
    let (out, format) = ctx.output(&a.output)?;

    let (u, norm) = match given_u {
        Some(u) if u > 0.0 && u.is_finite() => (u, None),
        Some(u) => return Err(CliError::Usage(format!("u must be positive and finite, got {u}"))),
        None => {
            let n = gls_norm(&LpProfile::from_model(m)?, &psi, &opts)?;
            if n.divergent || !n.value.is_finite() {
                return Err(CliError::Compute(gls_tailbound::Error::Evaluation(format!(
                    "the GLS norm of {} under this psi is infinite; pass --u or choose another psi",
                    m.label()
                ))));
            }
            (n.value, Some(n))
        }
    };
    let mut report = tail_envelope(&psi, u, &ts, &opts)?;
    report.attach_dominance(&m.tail_curve(LevelSet::Exact), DOMINANCE_SLACK)?;

    let mut comments = vec![format!("model: {}", m.label()), psi_comment(choice, &psi)];
    comments.push(match &norm {
        Some(n) => gls_comment(n)?,
        None => format!("u={} (given)", format_number(u)?),
    });
    let extra = json!({ "model": m, "psi_domain": psi.domain, "gls_norm": norm });
    let bytes = write_report(ctx, &report, comments, extra, format)?;
    emit(out.as_deref(), &bytes, stdout)?;
    finish_report(&report, stderr)
}

fn operator_bound(
    ctx: &mut Ctx,
    a: OperatorBoundArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Res<Outcome> {
    let r = &mut ctx.res;
    let m = resolve_model(r, &a.model)?;
    let opts = resolve_search(r, &a.search)?;
    let op = r.get("op", a.op.op, OpChoice::None)?;
    let profile = match op {
        OpChoice::None => OperatorProfile::identity(),
        OpChoice::RieszType => OperatorProfile::riesz_type(
            r.get("C", a.op.c, 1.0)?,
            r.get("alpha", a.op.alpha, 0.0)?,
            r.get("beta", a.op.beta, 0.0)?,
            r.get("a1", a.op.a1, 1.0)?,
            r.get("b1", a.op.b1, f64::INFINITY)?,
        )
        .map_err(model_error)?,
        OpChoice::Classical => {
            OperatorProfile::classical_riesz(r.get("Cd", a.op.cd, 1.0)?).map_err(model_error)?
        }
    };
    let c_high = r.opt("c-high", a.op.c_high)?;
    if let Some(c) = c_high.filter(|c| !(*c > 0.0 && c.is_finite())) {
        return Err(CliError::Usage(format!(
            "c-high must be positive and finite, got {c}"
        )));
    }
    let ts = resolve_points(r, "t", a.t.clone(), &a.grid, default_levels(&m))?;
    positive_levels(&ts)?;
    let (out, format) = ctx.output(&a.output)?;

    let mut thm = theorem_tail_bound(&BoundInput::Model(m), &profile, &ts, c_high, &opts)?;
    if op == OpChoice::None {
        thm.report
            .attach_dominance(&m.tail_curve(LevelSet::Exact), DOMINANCE_SLACK)?;
    }
    let t = &thm.transfer;
    let comments = vec![
        format!("model: {}", m.label()),
        format!("operator: {}", profile.label()),
        format!("interval: {}", t.interval),
        format!("certificate: {}", format_number(t.certificate)?),
    ];
    let extra = json!({
        "model": m,
        "transfer": {
            "kind": profile.label(),
            "operator": t.operator,
            "interval": t.interval,
            "certificate": t.certificate,
            "c_high": c_high,
        },
    });
    let bytes = write_report(ctx, &thm.report, comments, extra, format)?;
    emit(out.as_deref(), &bytes, stdout)?;
    finish_report(&thm.report, stderr)
}

// ---------------------------------------------------------------------------
// verify

fn verify(ctx: &mut Ctx, a: VerifyArgs, stdout: &mut dyn Write) -> Res<Outcome> {
    let r = &mut ctx.res;
    let names: Vec<String> = r.get(
        "suite",
        a.suite.clone(),
        Suite::ALL.iter().map(|s| s.name().to_string()).collect(),
    )?;
    let suites = names
        .iter()
        .map(|n| {
            Suite::parse(n).ok_or_else(|| {
                let known: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
                CliError::Usage(format!("unknown suite `{n}` (known: {})", known.join(", ")))
            })
        })
        .collect::<Res<Vec<_>>>()?;
    let tol = r.opt("tol", a.tol)?;
    if let Some(t) = tol.filter(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(CliError::Usage(format!("tol must be finite and >= 0, got {t}")));
    }
    let seed = r.get("seed", a.seed, SuiteOptions::default().seed)?;
    let maximize = resolve_search(r, &a.search)?;
    let (out, format) = ctx.output(&a.output)?;

    let reports = run_suites(
        &suites,
        &SuiteOptions {
            seed,
            tol_override: tol,
            maximize,
        },
    );
    let mut jsonl = Vec::new();
    write_jsonl(&reports, &mut jsonl)?;
    if let Some(path) = &out {
        std::fs::write(path, &jsonl)?;
    }
    if out.is_none() && format == Format::Json {
        stdout.write_all(&jsonl)?;
    } else {
        let mut s = String::new();
        for c in ctx.header() {
            s.push_str(&format!("# {c}\n"));
        }
        s.push_str(&summary_table(&reports));
        let failed = reports.iter().filter(|r| !r.pass).count();
        s.push_str(&format!("{} checks, {} failed\n", reports.len(), failed));
        stdout.write_all(s.as_bytes())?;
    }
    Ok(if all_pass(&reports) {
        Outcome::Ok
    } else {
        Outcome::ChecksFailed
    })
}
