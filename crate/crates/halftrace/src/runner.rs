//! Command drivers behind the CLI binary.
//!
//! Each driver resolves its configuration to a canonical text form, derives a
//! digest from it, runs the requested sweep, prints one JSON report per case
//! to stdout, and appends a [`RunRecord`] per report under
//! `<out>/<digest>/records.jsonl`. Reruns with identical configuration land
//! in the same directory. Drivers return `Ok(all_passed)`; hard errors map to
//! process exit codes through [`Error::exit_code`].

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use itertools::Itertools;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bc_algebra::{
    build_frame, closed_form_b, delta_leading_closed, lemma_sign, observed_degree, sp_phi_b,
    trace_pb, trace_pb_closed, BoundarySpec, CharacteristicData, MAX_M,
};
use crate::config;
use crate::error::{Error, Result};
use crate::green_kernel::{
    g_integral, min_abs_delta_on_arc, weyl_arc_integral, weyl_arc_value, DEFAULT_EPS_LADDER,
};
use crate::spectral_solver::{assemble, perturbed_model, TrustPolicy};
use crate::trace_experiment::{
    default_nmax, ingest_perturbation, regularized_partial_sums, trace_via_spectral_function,
    TraceReport, REL_FLOOR,
};

/// Identity-sweep tolerances at `tol_scale = 1`.
const TOL_TRACE: f64 = 1e-8;
const TOL_INVOLUTION: f64 = 1e-10;
const TOL_LIMIT: f64 = 1e-10;
const TOL_ALTERNATION: f64 = 1e-8;
const TOL_LEADING_REL: f64 = 1e-9;
/// Weyl-arc and layer-integral tolerances at `tol_scale = 1`.
const TOL_ARC_REL: f64 = 1e-6;
const TOL_LAYER_REL: f64 = 1e-2;
/// Trace-experiment pass threshold on the floored relative error.
const TOL_TRACE_REL: f64 = 0.10;

/// Options shared by every subcommand, after precedence resolution.
#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub out: PathBuf,
    pub tol_scale: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
}

impl GlobalOpts {
    /// Results directory precedence: `--out` flag, then `HALFTRACE_RESULTS_DIR`,
    /// then `runs`.
    pub fn resolve(
        out: Option<PathBuf>,
        tol_scale: f64,
        seed: u64,
        jobs: Option<usize>,
    ) -> Result<Self> {
        let out = out
            .or_else(|| std::env::var_os("HALFTRACE_RESULTS_DIR").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("runs"));
        if !tol_scale.is_finite() || tol_scale <= 0.0 {
            return Err(Error::InvalidSpec(format!(
                "tol-scale must be positive and finite, got {tol_scale}"
            )));
        }
        if jobs == Some(0) {
            return Err(Error::InvalidSpec("jobs must be at least 1".into()));
        }
        Ok(Self { out, tol_scale, seed, jobs })
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.unwrap_or(0))
            .build()
            .map_err(|e| Error::InvalidSpec(format!("thread pool: {e}")))
    }
}

/// One persisted report. `config_digest` is the SHA-256 of the resolved
/// configuration text, so identical invocations collide on purpose.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub config_digest: String,
    pub timestamp: String,
    pub report: Value,
    pub pass: bool,
}

pub fn digest_of(resolved_config: &str) -> String {
    let mut h = Sha256::new();
    h.update(resolved_config.as_bytes());
    format!("{:x}", h.finalize())
}

/// Prints reports to stdout and appends run records under the digest directory.
struct RecordSink {
    command: String,
    digest: String,
    path: PathBuf,
    all_pass: bool,
}

impl RecordSink {
    fn new(opts: &GlobalOpts, command: String, resolved_config: &str) -> Result<Self> {
        let digest = digest_of(resolved_config);
        let dir = opts.out.join(&digest);
        fs::create_dir_all(&dir)?;
        Ok(Self { command, digest, path: dir.join("records.jsonl"), all_pass: true })
    }

    fn emit(&mut self, report: Value, pass: bool) -> Result<()> {
        println!("{}", serde_json::to_string(&report)?);
        let record = RunRecord {
            command: self.command.clone(),
            config_digest: self.digest.clone(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
            report,
            pass,
        };
        let mut file = fs::OpenOptions::new().create(true).append(true).open(&self.path)?;
        writeln!(file, "{}", serde_json::to_string(&record)?)?;
        self.all_pass &= pass;
        Ok(())
    }
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Parses an inclusive order range: `1..3`, `2..2`, or a single `3`.
pub fn parse_m_range(text: &str) -> Result<(usize, usize)> {
    let bad = |msg: &str| Error::InvalidSpec(format!("m-range `{text}`: {msg}"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => (
            a.trim().parse::<usize>().map_err(|_| bad("expected LO..HI with integer bounds"))?,
            b.trim().parse::<usize>().map_err(|_| bad("expected LO..HI with integer bounds"))?,
        ),
        None => {
            let v = text.trim().parse::<usize>().map_err(|_| bad("expected an integer or LO..HI"))?;
            (v, v)
        }
    };
    if lo == 0 {
        return Err(bad("orders start at 1"));
    }
    if hi < lo {
        return Err(bad("upper bound below lower bound"));
    }
    if hi > MAX_M {
        return Err(bad(&format!("orders above {MAX_M} are not supported")));
    }
    Ok((lo, hi))
}

pub struct IdentitiesArgs {
    pub m_range: String,
    pub random_perturbed: usize,
}

struct CaseOutcome {
    report: Value,
    pass: bool,
    /// First failing identity name, for the stderr diagnostic.
    failed: Option<&'static str>,
}

/// Checks one boundary spec against every algebraic identity: Sp(ℙ𝔹) vs the
/// closed form, 𝔹² = I, the limit matrix vs its closed form, the alternation
/// values of (𝔹φ_n, φ_n), and the Δ degree/leading structure.
fn identity_case(spec: &BoundarySpec, ts: f64) -> Result<CaseOutcome> {
    let m = spec.m;
    let degrees = spec.degrees();
    let kappa = spec.kappa();
    let frame = build_frame(m, &degrees)?;
    let data = CharacteristicData::build(spec, &frame)?;

    let t = trace_pb(&data)?;
    let closed = trace_pb_closed(m, &degrees);
    let e_trace = (t - closed).abs();

    let b2 = &data.b_limit * &data.b_limit;
    let mut e_inv = 0.0f64;
    for r in 0..m {
        for c in 0..m {
            let want = if r == c { 1.0 } else { 0.0 };
            e_inv = e_inv.max((b2[(r, c)] - Complex64::from(want)).norm());
        }
    }

    let b_closed = closed_form_b(&frame, &degrees)?;
    let mut e_limit = 0.0f64;
    for r in 0..m {
        for c in 0..m {
            e_limit = e_limit.max((data.b_limit[(r, c)] - b_closed[(r, c)]).norm());
        }
    }

    let mut e_alt = 0.0f64;
    for n in 0..=(8 * m as i64) {
        let sp = sp_phi_b(&frame, &degrees, n)?;
        let target = lemma_sign(m, &degrees, n);
        e_alt = e_alt.max((sp - Complex64::from(target)).norm());
    }

    let leading_closed = delta_leading_closed(spec, &frame);
    let e_leading =
        (data.delta.coeff(kappa) - leading_closed).norm() / leading_closed.norm().max(1e-300);
    let degree_ok = observed_degree(&data.delta) == Some(kappa)
        && (0..m * m).all(|i| observed_degree(&data.delta_ab[i]).is_none_or(|d| d <= kappa));

    let mut failed = None;
    let mut check = |name: &'static str, err: f64, tol: f64| {
        if err > tol * ts && failed.is_none() {
            failed = Some(name);
        }
    };
    check("trace_pb", e_trace, TOL_TRACE);
    check("involution", e_inv, TOL_INVOLUTION);
    check("limit_vs_closed", e_limit, TOL_LIMIT);
    check("alternation", e_alt, TOL_ALTERNATION);
    check("delta_leading", e_leading, TOL_LEADING_REL);
    if !degree_ok && failed.is_none() {
        failed = Some("delta_degree");
    }

    let pass = failed.is_none();
    let max_abs_error = e_trace.max(e_inv).max(e_limit).max(e_alt).max(e_leading);
    let report = json!({
        "m": m,
        "K": degrees,
        "trace_pb": t,
        "trace_pb_closed": closed,
        "max_abs_error": max_abs_error,
        "pass": pass,
    });
    Ok(CaseOutcome { report, pass, failed })
}

/// Sweeps every C(2m, m) one-term family for each order in the range, plus an
/// optional batch of randomized lower-order-perturbed specs.
pub fn cmd_identities(opts: &GlobalOpts, args: &IdentitiesArgs) -> Result<bool> {
    let (lo, hi) = parse_m_range(&args.m_range)?;
    let resolved = format!(
        "identities\nm_range = {lo}..{hi}\nrandom_perturbed = {}\nseed = {}\ntol_scale = {}\n",
        args.random_perturbed, opts.seed, opts.tol_scale
    );
    let command = format!(
        "identities --m-range {lo}..{hi} --random-perturbed {}",
        args.random_perturbed
    );
    let mut sink = RecordSink::new(opts, command, &resolved)?;

    let mut specs = Vec::new();
    for m in lo..=hi {
        for degrees in (0..2 * m).combinations(m) {
            specs.push(BoundarySpec::one_term(m, &degrees)?);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..args.random_perturbed {
        let m = rand::Rng::gen_range(&mut rng, 1..=5usize);
        let mut degrees = rand::seq::index::sample(&mut rng, 2 * m, m).into_vec();
        degrees.sort_unstable();
        specs.push(BoundarySpec::random_perturbed(m, &degrees, &mut rng)?);
    }

    let ts = opts.tol_scale;
    let outcomes: Vec<Result<CaseOutcome>> =
        opts.pool()?.install(|| specs.par_iter().map(|spec| identity_case(spec, ts)).collect());

    let mut reported_failure = false;
    for (spec, outcome) in specs.iter().zip(outcomes) {
        let outcome = outcome?;
        if let (Some(name), false) = (outcome.failed, reported_failure) {
            eprintln!(
                "identity failure: m={} K={:?} identity={name}",
                spec.m,
                spec.degrees()
            );
            reported_failure = true;
        }
        sink.emit(outcome.report, outcome.pass)?;
    }
    Ok(sink.all_pass)
}

pub struct GreenArgs {
    pub m: Option<usize>,
    pub k: Vec<usize>,
    pub lambdas: Vec<f64>,
    pub eps: Vec<f64>,
    pub bc: Option<PathBuf>,
}

/// Loads the boundary spec for `green`: either a one-term family from
/// `--m/--K` or a general coefficient file from `--bc`.
fn green_spec(args: &GreenArgs) -> Result<BoundarySpec> {
    match &args.bc {
        Some(path) => {
            if !args.k.is_empty() {
                return Err(Error::InvalidSpec("choose either --K or --bc, not both".into()));
            }
            let spec = config::parse_boundary_config(&fs::read_to_string(path)?)?;
            if args.m.is_some_and(|m| m != spec.m) {
                return Err(Error::InvalidSpec(format!(
                    "--m {} disagrees with the boundary file (m = {})",
                    args.m.unwrap(),
                    spec.m
                )));
            }
            Ok(spec)
        }
        None => {
            let m = args
                .m
                .ok_or_else(|| Error::InvalidSpec("--m is required without --bc".into()))?;
            if args.k.is_empty() {
                return Err(Error::InvalidSpec("--K is required without --bc".into()));
            }
            BoundarySpec::one_term(m, &args.k)
        }
    }
}

/// Evaluates the Weyl-arc integral at each λ and the damped layer integral
/// over the ε ladder, comparing both against their closed forms.
pub fn cmd_green(opts: &GlobalOpts, args: &GreenArgs) -> Result<bool> {
    let spec = green_spec(args)?;
    let m = spec.m;
    let degrees = spec.degrees();
    let lambdas: Vec<f64> =
        if args.lambdas.is_empty() { vec![1e2, 1e4, 1e6] } else { args.lambdas.clone() };
    let eps: Vec<f64> =
        if args.eps.is_empty() { DEFAULT_EPS_LADDER.to_vec() } else { args.eps.clone() };
    if lambdas.iter().any(|&l| !l.is_finite() || l <= 0.0) {
        return Err(Error::InvalidSpec("arc radii λ must be positive and finite".into()));
    }

    let resolved = format!(
        "green\nm = {m}\nconditions = {}\nlambdas = {lambdas:?}\neps = {eps:?}\ntol_scale = {}\n",
        spec_signature(&spec),
        opts.tol_scale
    );
    let command = format!("green --m {m} --K {}", degrees.iter().join(","));
    let mut sink = RecordSink::new(opts, command, &resolved)?;

    let frame = build_frame(m, &degrees)?;
    let data = CharacteristicData::build(&spec, &frame)?;
    let ts = opts.tol_scale;

    for &lambda in &lambdas {
        let (min_abs, scale) = min_abs_delta_on_arc(&data, lambda, 512);
        if min_abs < 1e-8 * scale {
            eprintln!(
                "the arc at λ = {lambda:.6e} passes within |Δ| = {min_abs:.3e} of a \
                 characteristic zero; retry with a larger radius, e.g. --lambda {:.6e}",
                4.0 * lambda
            );
            return Err(Error::NearSpectrum { abs_delta: min_abs, scale });
        }
        let computed = weyl_arc_integral(m, lambda)?;
        let target = weyl_arc_value(m, lambda);
        let rel_error = (computed - target).abs() / target.abs();
        let pass = rel_error <= TOL_ARC_REL * ts;
        sink.emit(
            json!({
                "m": m,
                "K": degrees,
                "lambda": lambda,
                "computed": computed,
                "target": target,
                "rel_error": rel_error,
            }),
            pass,
        )?;
    }

    let layer = g_integral(&data, &eps, TOL_LAYER_REL * ts)?;
    let rel_error = (layer.extrapolated - layer.closed).norm() / layer.closed.norm();
    let pass = rel_error <= TOL_LAYER_REL * ts;
    sink.emit(
        json!({
            "m": m,
            "K": degrees,
            "epsilon": eps,
            "computed": complex_json(layer.extrapolated),
            "target": complex_json(layer.closed),
            "rel_error": rel_error,
        }),
        pass,
    )?;
    Ok(sink.all_pass)
}

/// Canonical rendering of a spec's condition polynomials for digest input.
fn spec_signature(spec: &BoundarySpec) -> String {
    spec.conditions
        .iter()
        .map(|p| p.coeffs.iter().map(|c| format!("{}+{}i", c.re, c.im)).join(","))
        .join("; ")
}

pub struct TraceArgs {
    pub model: PathBuf,
    pub perturbation: PathBuf,
    pub nmax: Option<usize>,
    pub csv: Option<PathBuf>,
}

/// Runs one finite-difference experiment through both summation routes.
pub fn cmd_trace(opts: &GlobalOpts, args: &TraceArgs) -> Result<bool> {
    let model_text = fs::read_to_string(&args.model)?;
    let pert_text = fs::read_to_string(&args.perturbation)?;
    let model = config::parse_model_config(&model_text)?;
    let pert = ingest_perturbation(config::parse_perturbation_config(&pert_text)?)?;
    for w in model.discreteness_warnings() {
        eprintln!("warning: {w}");
    }

    let resolved = format!(
        "trace\nmodel <<<\n{model_text}>>>\nperturbation <<<\n{pert_text}>>>\nnmax = {:?}\nseed = {}\ntol_scale = {}\n",
        args.nmax, opts.seed, opts.tol_scale
    );
    let command = format!(
        "trace --model {} --perturbation {}",
        args.model.display(),
        args.perturbation.display()
    );
    let mut sink = RecordSink::new(opts, command, &resolved)?;

    let disc = assemble(&model)?;
    let disc_q = assemble(&perturbed_model(&model, &pert.q)?)?;
    let seed = opts.seed;
    let (lams, mus) = opts.pool()?.install(|| {
        rayon::join(
            || disc.solve_trusted(TrustPolicy::PairResolution, seed),
            || disc_q.solve_trusted(TrustPolicy::PairResolution, seed),
        )
    });
    let (lams, mus) = (lams?, mus?);

    let nmax = match args.nmax {
        Some(n) => n,
        None => default_nmax(&lams, &mus),
    };
    let r1 = regularized_partial_sums(&lams, &mus, &pert, model.m, &model.degrees, nmax)?;
    let ladder = lams.eigenvalues[..nmax].to_vec();
    let r2 = trace_via_spectral_function(&lams, &disc, &pert, &model.degrees, &ladder)?;

    if let Some(path) = &args.csv {
        let mut out = String::from("N,partial_sum\n");
        for (i, s) in r1.partial_sums.iter().enumerate() {
            out.push_str(&format!("{},{s:.17e}\n", i + 1));
        }
        fs::write(path, out)?;
    }

    for report in [&r1, &r2] {
        if !report.converged {
            eprintln!(
                "tail not settled (variation {:.3e} over window {}); raise N or X in the model \
                 config, or lower --nmax below {nmax}",
                report.variation, report.window
            );
            return Err(Error::LadderDiverged {
                spread: report.variation,
                tol: 0.25 * report.rhs.abs().max(REL_FLOOR),
            });
        }
    }

    let ts = opts.tol_scale;
    for report in [r1, r2] {
        eprintln!(
            "{:?}: extrapolated {:.6e} vs closed form {:.6e} (rel_error {:.3e}, {} suspect pairings)",
            report.route,
            report.extrapolated,
            report.rhs,
            report.rel_error,
            report.pairing_suspect.len()
        );
        let pass = report.rel_error <= TOL_TRACE_REL * ts;
        sink.emit(trace_report_json(&report, nmax)?, pass)?;
    }
    Ok(sink.all_pass)
}

fn trace_report_json(report: &TraceReport, nmax: usize) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    v.as_object_mut()
        .expect("TraceReport serializes to an object")
        .insert("nmax".into(), json!(nmax));
    Ok(v)
}

pub struct ReportArgs {
    pub digest: Option<String>,
}

/// Pretty-prints stored run records: one digest's records, or an index of all
/// digests under the results directory.
pub fn cmd_report(opts: &GlobalOpts, args: &ReportArgs) -> Result<bool> {
    match &args.digest {
        Some(digest) => {
            let path = opts.out.join(digest).join("records.jsonl");
            if !path.is_file() {
                return Err(Error::InvalidSpec(format!(
                    "no records under {}",
                    path.display()
                )));
            }
            let mut records = Vec::new();
            for line in fs::read_to_string(&path)?.lines() {
                if !line.trim().is_empty() {
                    records.push(serde_json::from_str::<Value>(line)?);
                }
            }
            let all_pass = records
                .iter()
                .all(|r| r.get("pass").and_then(Value::as_bool).unwrap_or(false));
            println!("{}", serde_json::to_string_pretty(&records)?);
            Ok(all_pass)
        }
        None => {
            let mut index = Vec::new();
            if opts.out.is_dir() {
                let mut dirs: Vec<PathBuf> =
                    fs::read_dir(&opts.out)?.filter_map(|e| e.ok().map(|e| e.path())).collect();
                dirs.sort();
                for dir in dirs {
                    let path = dir.join("records.jsonl");
                    if !path.is_file() {
                        continue;
                    }
                    let text = fs::read_to_string(&path)?;
                    let mut count = 0usize;
                    let mut pass = true;
                    let mut command = String::new();
                    for line in text.lines().filter(|l| !l.trim().is_empty()) {
                        let v: Value = serde_json::from_str(line)?;
                        count += 1;
                        pass &= v.get("pass").and_then(Value::as_bool).unwrap_or(false);
                        if command.is_empty() {
                            if let Some(c) = v.get("command").and_then(Value::as_str) {
                                command = c.to_string();
                            }
                        }
                    }
                    index.push(json!({
                        "digest": dir.file_name().unwrap_or_default().to_string_lossy(),
                        "command": command,
                        "records": count,
                        "pass": pass,
                    }));
                }
            }
            println!("{}", serde_json::to_string_pretty(&index)?);
            Ok(true)
        }
    }
}
