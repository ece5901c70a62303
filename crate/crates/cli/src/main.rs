//! `hhcert`: corrected-trapezoid identity checks, third-derivative remainder
//! bounds, hypothesis checks and certified integration from the command line.
//!
//! Exit codes: 0 success, 1 failed check or detected violation, 2 usage or
//! configuration error.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use hhcert_core::bounds::{bound, BoundSpec, BoundValue, Requirement, Theorem};
use hhcert_core::harness::{
    check_hh_classical, remainder_ratio, run_inequality_suite, sharpness_search, tournament,
    CampaignReport, Family, HarnessConfig, Instance, SharpnessResult,
};
use hhcert_core::identity::{verify_identity_eta, PathSegment};
use hhcert_core::invex::{
    abs_third_derivative_power, check_invex_set, check_preinvex, check_preinvex_with,
    check_prequasiinvex, check_prequasiinvex_with, Domain, EtaMap, HypothesisReport,
    HYPOTHESIS_REL_TOL,
};
use hhcert_core::quadrature::{
    integrate_certified, true_error, CertificateMode, CertifiedResult, Refinement,
};
use hhcert_core::{Error, Result, VERSION};
use serde::Serialize;

use config::{Config, Format, HypothesisKind, Subject};
use report::{emit, Report};

#[derive(Debug, Parser)]
#[command(name = "hhcert", version, about, allow_negative_numbers = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare both sides of the corrected-trapezoid remainder identity.
    VerifyIdentity,
    /// Evaluate one remainder bound and compare it with the actual remainder.
    Bound,
    /// Sampled invex-set, preinvexity or prequasiinvexity check.
    CheckHypothesis,
    /// Composite corrected-trapezoid integration with an error certificate.
    Integrate,
    /// Seeded inequality campaign over a function family.
    Suite,
    /// All six main bounds across a grid of exponents.
    Tournament,
    /// Classical Hermite–Hadamard sandwich check.
    HhClassical,
}

#[derive(Debug, clap::Args)]
struct Flags {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Function of x (or t), e.g. "pow(x,4) - sin(x)".
    #[arg(long = "f", global = true, allow_hyphen_values = true)]
    function: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    a: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b: Option<f64>,
    /// difference | scaled | paper_piecewise.
    #[arg(long, global = true)]
    eta: Option<String>,
    /// Scale for the scaled map.
    #[arg(long, global = true, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// T2.1, T2.2, T2.3, T3.1, T3.2, T3.3, C2.1, C2.2, C2.3 or C2.4.
    #[arg(long, global = true)]
    theorem: Option<Theorem>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    q: Option<f64>,
    /// Use the tighter constant where one exists (T3.3).
    #[arg(long, global = true)]
    tight: bool,
    /// Absolute tolerance for the identity check.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    ratio_tol: Option<f64>,
    #[arg(long, global = true)]
    oracle_tol: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample grid size for hypothesis checks.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// poly6 | exp | trig | mixed | quadratic | monomial4.
    #[arg(long, global = true, value_parser = parse_family)]
    family: Option<Family>,
    /// Also run a sharpness search with this many restarts per bound.
    #[arg(long, global = true)]
    sharpness: Option<usize>,
    #[arg(long, global = true, allow_hyphen_values = true, value_delimiter = ',')]
    q_grid: Option<Vec<f64>>,
    #[arg(long, global = true, value_enum)]
    hypothesis: Option<HypothesisKind>,
    #[arg(long, global = true, value_enum)]
    subject: Option<Subject>,
    /// Membership box for sets wider than the sampled range.
    #[arg(long = "box", global = true, allow_hyphen_values = true, num_args = 2, value_names = ["LO", "HI"])]
    bounding_box: Option<Vec<f64>>,
    /// hypothesis | sup.
    #[arg(long, global = true, value_parser = parse_mode)]
    mode: Option<CertificateMode>,
    /// Refine until the certificate is at most this.
    #[arg(long, global = true, conflicts_with = "n")]
    target: Option<f64>,
    /// Use exactly this many equal subintervals.
    #[arg(long, global = true)]
    n: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_mode(s: &str) -> std::result::Result<CertificateMode, String> {
    match s {
        "hypothesis" => Ok(CertificateMode::Hypothesis),
        "sup" => Ok(CertificateMode::Sup),
        _ => Err(format!("unknown mode '{s}' (expected hypothesis or sup)")),
    }
}

fn parse_eta(kind: &str, lambda: Option<f64>) -> Result<EtaMap> {
    match kind {
        "difference" => Ok(EtaMap::Difference),
        "paper_piecewise" | "paper-piecewise" => Ok(EtaMap::PaperPiecewise),
        "scaled" => EtaMap::scaled(
            lambda.ok_or_else(|| Error::InvalidArgument("--eta scaled needs --lambda".into()))?,
        ),
        _ => Err(Error::InvalidArgument(format!(
            "unknown η map '{kind}' (expected difference, scaled or paper_piecewise; tables go in --config)"
        ))),
    }
}

fn resolve(flags: Flags, command: &str) -> Result<Config> {
    let mut cfg = match &flags.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    if let Some(f) = flags.function {
        cfg.function = Some(f);
    }
    cfg.a = flags.a.or(cfg.a);
    cfg.b = flags.b.or(cfg.b);
    match (flags.eta.as_deref(), flags.lambda) {
        (Some(kind), lambda) => cfg.eta = parse_eta(kind, lambda)?,
        (None, Some(lambda)) => cfg.eta = EtaMap::scaled(lambda)?,
        (None, None) => {}
    }
    if let Some(t) = flags.theorem {
        let q = cfg.theorem.map_or(1.0, |s| s.q);
        cfg.theorem = Some(BoundSpec {
            theorem: t,
            q,
            tight: false,
        });
    }
    if let Some(q) = flags.q {
        cfg.q = Some(q);
        if let Some(s) = cfg.theorem.as_mut() {
            s.q = q;
        }
    }
    if flags.tight {
        cfg.theorem = cfg.theorem.map(|s| s.tight());
    }
    if let Some(t) = flags.tol {
        cfg.tolerances.identity = t;
    }
    if let Some(t) = flags.ratio_tol {
        cfg.tolerances.ratio = t;
    }
    if let Some(t) = flags.oracle_tol {
        cfg.tolerances.oracle = t;
    }
    cfg.seed = flags.seed.unwrap_or(cfg.seed);
    cfg.grid = flags.grid.or(cfg.grid);
    cfg.trials = flags.trials.unwrap_or(cfg.trials);
    cfg.family = flags.family.unwrap_or(cfg.family);
    cfg.sharpness_iterations = flags.sharpness.unwrap_or(cfg.sharpness_iterations);
    if let Some(g) = flags.q_grid {
        cfg.q_grid = g;
    }
    cfg.hypothesis = flags.hypothesis.unwrap_or(cfg.hypothesis);
    cfg.subject = flags.subject.unwrap_or(cfg.subject);
    if let Some(b) = flags.bounding_box {
        cfg.bounding_box = Some([b[0], b[1]]);
    }
    cfg.mode = flags.mode.unwrap_or(cfg.mode);
    if let Some(t) = flags.target {
        cfg.refinement = Refinement::Target(t);
    }
    if let Some(n) = flags.n {
        cfg.refinement = Refinement::Fixed(n);
    }
    if let Some(out) = flags.out {
        cfg.output.path = Some(out);
    }
    cfg.output.format = flags.format.unwrap_or(cfg.output.format);
    cfg.resolve_grid(command);
    cfg.validate()?;
    Ok(cfg)
}

fn grid(cfg: &Config) -> usize {
    cfg.grid.expect("grid is resolved before dispatch")
}

fn instance(cfg: &Config) -> Result<Instance> {
    Ok(Instance {
        family: None,
        f: cfg.function()?,
        map: cfg.eta.clone(),
        a: cfg.point('a')?,
        b: cfg.point('b')?,
    })
}

fn run_verify_identity(cfg: &Config) -> Result<bool> {
    let f = cfg.function()?;
    let r = verify_identity_eta(
        &f,
        &cfg.eta,
        cfg.point('a')?,
        cfg.point('b')?,
        cfg.tolerances.identity,
    )?;
    let passed = r.passed;
    emit(
        &Report {
            version: VERSION,
            command: "verify-identity",
            passed,
            config: cfg,
            result: &r,
        },
        &[&r],
    )?;
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct BoundOutcome {
    bound: BoundValue,
    /// The remainder the bound controls.
    lhs: f64,
    ratio: f64,
    hypothesis: HypothesisReport,
    /// For bounds that assume `f'(b) = f'(b+h)`: whether that holds.
    #[serde(skip_serializing_if = "Option::is_none")]
    slopes_match: Option<bool>,
    hypothesis_pass: bool,
    violation: bool,
}

#[derive(Debug, Serialize)]
struct BoundRow {
    theorem: Theorem,
    q: f64,
    h: f64,
    a3: f64,
    b3: f64,
    bound: f64,
    lhs: f64,
    ratio: f64,
    hypothesis_pass: bool,
}

fn run_bound(cfg: &Config) -> Result<bool> {
    let spec = cfg.spec()?;
    let inst = instance(cfg)?;
    let ev = inst.evaluate(cfg.tolerances.oracle)?;
    let bv = bound(&spec, ev.segment.h, &ev.derivatives)?;
    let req = spec.theorem.requirement();
    let q = match req {
        Requirement::Preinvex => spec.q,
        Requirement::Prequasiinvex => 1.0,
    };
    let hypothesis = inst.check_hypothesis(&ev, req, q, grid(cfg))?;
    let equal_slopes = spec.theorem.assumes_equal_slopes();
    let slopes_match = equal_slopes.then_some(ev.slope_mismatch <= HYPOTHESIS_REL_TOL);
    let lhs = if equal_slopes { ev.lhs_plain } else { ev.lhs };
    let ratio = remainder_ratio(lhs, bv.value);
    let hypothesis_pass = hypothesis.passed && slopes_match.unwrap_or(true);
    let violation = hypothesis_pass && ratio > 1.0 + cfg.tolerances.ratio;
    let row = BoundRow {
        theorem: spec.theorem,
        q: spec.q,
        h: bv.h,
        a3: ev.derivatives.a3,
        b3: ev.derivatives.b3,
        bound: bv.value,
        lhs,
        ratio,
        hypothesis_pass,
    };
    let outcome = BoundOutcome {
        bound: bv,
        lhs,
        ratio,
        hypothesis,
        slopes_match,
        hypothesis_pass,
        violation,
    };
    emit(
        &Report {
            version: VERSION,
            command: "bound",
            passed: !violation,
            config: cfg,
            result: &outcome,
        },
        &[row],
    )?;
    Ok(!violation)
}

#[derive(Debug, Serialize)]
struct HypothesisRow {
    passed: bool,
    checked: usize,
    worst_slack: f64,
    tolerance: f64,
    witness_u: Option<f64>,
    witness_v: Option<f64>,
    witness_t: Option<f64>,
}

fn run_check_hypothesis(cfg: &Config) -> Result<bool> {
    let (a, b) = (cfg.point('a')?, cfg.point('b')?);
    let (lo, hi) = (a.min(b), a.max(b));
    let dom = match cfg.bounding_box {
        Some([blo, bhi]) => Domain::unbounded(lo, hi, blo, bhi)?,
        None => Domain::new(lo, hi)?,
    };
    let n = grid(cfg);
    let map = &cfg.eta;
    let r = match cfg.hypothesis {
        HypothesisKind::InvexSet => check_invex_set(map, &dom, n)?,
        kind => {
            let f = cfg.function()?;
            let preinvex = kind == HypothesisKind::Preinvex;
            match cfg.subject {
                Subject::F if preinvex => check_preinvex(&f, map, &dom, n)?,
                Subject::F => check_prequasiinvex(&f, map, &dom, n)?,
                Subject::AbsThirdDerivative => {
                    let q = cfg.theorem.map(|s| s.q).or(cfg.q).unwrap_or(1.0);
                    if !(q > 0.0) || !q.is_finite() {
                        return Err(Error::InvalidArgument(format!(
                            "q must be positive, got {q}"
                        )));
                    }
                    let g = abs_third_derivative_power(&f, q);
                    if preinvex {
                        check_preinvex_with(g, map, &dom, n)?
                    } else {
                        check_prequasiinvex_with(g, map, &dom, n)?
                    }
                }
            }
        }
    };
    let row = HypothesisRow {
        passed: r.passed,
        checked: r.checked,
        worst_slack: r.worst_slack,
        tolerance: r.tolerance,
        witness_u: r.witness.map(|w| w.u),
        witness_v: r.witness.map(|w| w.v),
        witness_t: r.witness.map(|w| w.t),
    };
    emit(
        &Report {
            version: VERSION,
            command: "check-hypothesis",
            passed: r.passed,
            config: cfg,
            result: &r,
        },
        &[row],
    )?;
    Ok(r.passed)
}

#[derive(Debug, Serialize)]
struct IntegrateOutcome {
    #[serde(flatten)]
    certified: CertifiedResult,
    /// Distance to the reference quadrature value.
    true_error: f64,
}

fn run_integrate(cfg: &Config) -> Result<bool> {
    let f = cfg.function()?;
    let seg = PathSegment::from_eta(&cfg.eta, cfg.point('a')?, cfg.point('b')?)?;
    let certified = integrate_certified(&f, &seg, cfg.mode, cfg.refinement)?;
    let err = true_error(&f, &certified, cfg.tolerances.oracle)?;
    let passed =
        err <= certified.certificate * (1.0 + cfg.tolerances.ratio) + cfg.tolerances.oracle;
    let outcome = IntegrateOutcome {
        certified,
        true_error: err,
    };
    emit(
        &Report {
            version: VERSION,
            command: "integrate",
            passed,
            config: cfg,
            result: &outcome,
        },
        &outcome.certified.partition,
    )?;
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct SuiteOutcome<'a> {
    campaign: &'a CampaignReport,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sharpness: Vec<SharpnessResult>,
}

#[derive(Debug, Serialize)]
struct SuiteRow<'a> {
    trial: usize,
    family: &'a str,
    a: f64,
    b: f64,
    h: f64,
    theorem: Theorem,
    q: f64,
    lhs: Option<f64>,
    bound: Option<f64>,
    ratio: Option<f64>,
    hypothesis_pass: bool,
}

fn run_suite(cfg: &Config) -> Result<bool> {
    let specs = cfg.suite_specs()?;
    let hc = HarnessConfig {
        grid_n: grid(cfg),
        oracle_tol: cfg.tolerances.oracle,
        ratio_tol: cfg.tolerances.ratio,
        eta: cfg.eta.clone(),
    };
    let campaign = run_inequality_suite(cfg.family, &specs, cfg.trials, cfg.seed, &hc)?;
    let mut sharpness = Vec::new();
    if cfg.sharpness_iterations > 0 {
        for spec in &specs {
            sharpness.push(sharpness_search(
                spec,
                cfg.family,
                cfg.sharpness_iterations,
                cfg.seed,
                &hc,
            )?);
        }
    }
    let passed = campaign.violations == 0
        && sharpness
            .iter()
            .all(|s| s.ratio <= 1.0 + cfg.tolerances.ratio);
    let rows: Vec<SuiteRow> = campaign
        .rows
        .iter()
        .map(|r| SuiteRow {
            trial: r.trial,
            family: &r.family,
            a: r.a,
            b: r.b,
            h: r.h,
            theorem: r.theorem,
            q: r.q,
            lhs: r.lhs,
            bound: r.bound,
            ratio: r.ratio,
            hypothesis_pass: r.hypothesis_pass,
        })
        .collect();
    let outcome = SuiteOutcome {
        campaign: &campaign,
        sharpness,
    };
    emit(
        &Report {
            version: VERSION,
            command: "suite",
            passed,
            config: cfg,
            result: &outcome,
        },
        &rows,
    )?;
    Ok(passed)
}

#[derive(Debug, Serialize)]
struct TournamentRowCsv {
    q: f64,
    #[serde(rename = "T2.1")]
    t21: Option<f64>,
    #[serde(rename = "T2.2")]
    t22: Option<f64>,
    #[serde(rename = "T2.3")]
    t23: Option<f64>,
    #[serde(rename = "T3.1")]
    t31: Option<f64>,
    #[serde(rename = "T3.2")]
    t32: Option<f64>,
    #[serde(rename = "T3.3")]
    t33: Option<f64>,
    winner: Theorem,
}

fn run_tournament(cfg: &Config) -> Result<bool> {
    let table = tournament(&instance(cfg)?, &cfg.q_grid)?;
    let rows: Vec<TournamentRowCsv> = table
        .rows
        .iter()
        .map(|r| {
            let v = |k: usize| r.values[k].value;
            TournamentRowCsv {
                q: r.q,
                t21: v(0),
                t22: v(1),
                t23: v(2),
                t31: v(3),
                t32: v(4),
                t33: v(5),
                winner: r.winner,
            }
        })
        .collect();
    emit(
        &Report {
            version: VERSION,
            command: "tournament",
            passed: true,
            config: cfg,
            result: &table,
        },
        &rows,
    )?;
    Ok(true)
}

#[derive(Debug, Serialize)]
struct HhRow {
    passed: bool,
    midpoint_value: f64,
    mean_value: f64,
    endpoint_average: f64,
    midpoint_side_holds: bool,
    endpoint_side_holds: bool,
}

fn run_hh_classical(cfg: &Config) -> Result<bool> {
    let f = cfg.function()?;
    let r = check_hh_classical(&f, cfg.point('a')?, cfg.point('b')?, grid(cfg))?;
    let row = HhRow {
        passed: r.passed,
        midpoint_value: r.midpoint_value,
        mean_value: r.mean_value,
        endpoint_average: r.endpoint_average,
        midpoint_side_holds: r.midpoint_side_holds,
        endpoint_side_holds: r.endpoint_side_holds,
    };
    emit(
        &Report {
            version: VERSION,
            command: "hh-classical",
            passed: r.passed,
            config: cfg,
            result: &r,
        },
        &[row],
    )?;
    Ok(r.passed)
}

/// Errors in the inputs themselves are usage errors; errors met while
/// computing count as a failed check.
fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Parse(_)
        | Error::InvalidEta(_)
        | Error::InvalidDomain { .. }
        | Error::InvalidSpec(_)
        | Error::InvalidArgument(_)
        | Error::EtaOutsideTable { .. } => 2,
        Error::Domain { .. } | Error::NoConvergence { .. } | Error::BudgetExhausted { .. } => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = match cli.command {
        Command::VerifyIdentity => "verify-identity",
        Command::Bound => "bound",
        Command::CheckHypothesis => "check-hypothesis",
        Command::Integrate => "integrate",
        Command::Suite => "suite",
        Command::Tournament => "tournament",
        Command::HhClassical => "hh-classical",
    };
    let outcome = resolve(cli.flags, name).and_then(|cfg| match cli.command {
        Command::VerifyIdentity => run_verify_identity(&cfg),
        Command::Bound => run_bound(&cfg),
        Command::CheckHypothesis => run_check_hypothesis(&cfg),
        Command::Integrate => run_integrate(&cfg),
        Command::Suite => run_suite(&cfg),
        Command::Tournament => run_tournament(&cfg),
        Command::HhClassical => run_hh_classical(&cfg),
    });
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hhcert {name}: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
