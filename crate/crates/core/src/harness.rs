//! Seeded property campaigns over function families.
//!
//! Every inequality is conditional on a hypothesis about `|f'''|^q`, so each
//! trial is first gated on the sampled hypothesis check; only gated trials
//! can count as violations.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound, BoundSpec, DerivativeData, Requirement, Theorem};
use crate::error::{Error, Result};
use crate::expr::ExprFunction;
use crate::identity::{corrected_trapezoid_from, PathSegment};
use crate::invex::{
    abs_third_derivative_power, check_preinvex_with, check_prequasiinvex_with, Domain, EtaMap,
    HypothesisReport, HYPOTHESIS_REL_TOL,
};
use crate::oracle::{AdaptiveSimpson, DEFAULT_ABS_TOL};

pub const DEFAULT_CAMPAIGN_GRID: usize = 17;
pub const RATIO_TOL: f64 = 1e-9;
/// `|lhs|` at or below this counts as zero when the bound itself is zero.
pub const ZERO_REMAINDER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Degree-6 polynomials, coefficients uniform in [−5, 5].
    Poly6,
    /// `c·exp(λx)`, `c ∈ [−5, 5]`, `λ ∈ [−2, 2]`.
    Exp,
    /// `c·sin(ωx)` or `c·cos(ωx)`, `ω ∈ [0.2, 3]`.
    Trig,
    /// Uniform choice among poly6, exp and trig per trial.
    Mixed,
    /// Quadratics (`f''' ≡ 0`).
    Quadratic,
    /// `c·x⁴`.
    Monomial4,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::Poly6 => "poly6",
            Family::Exp => "exp",
            Family::Trig => "trig",
            Family::Mixed => "mixed",
            Family::Quadratic => "quadratic",
            Family::Monomial4 => "monomial4",
        }
    }

    /// Parameter ranges for the function part (excluding `b`, `h`).
    fn ranges(self) -> Vec<(f64, f64)> {
        match self {
            Family::Poly6 => vec![(-5.0, 5.0); 7],
            Family::Quadratic => vec![(-5.0, 5.0); 3],
            Family::Exp => vec![(-5.0, 5.0), (-2.0, 2.0)],
            Family::Trig => vec![(-5.0, 5.0), (0.2, 3.0)],
            Family::Monomial4 => vec![(-5.0, 5.0)],
            Family::Mixed => unreachable!("mixed resolves to a concrete family first"),
        }
    }

    /// A representative member with `b = 0`, `h = 1`.
    fn canonical(self) -> (Vec<f64>, bool) {
        match self {
            Family::Poly6 => (vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0], false),
            Family::Quadratic => (vec![0.0, 0.0, 1.0], false),
            Family::Exp => (vec![1.0, 1.0], false),
            Family::Trig => (vec![1.0, 1.0], false),
            Family::Monomial4 => (vec![1.0], false),
            Family::Mixed => Family::Poly6.canonical(),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            Family::Poly6,
            Family::Exp,
            Family::Trig,
            Family::Mixed,
            Family::Quadratic,
            Family::Monomial4,
        ]
        .into_iter()
        .find(|f| f.label() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown family '{s}'")))
    }
}

/// A concrete family member: function parameters plus the segment.
#[derive(Debug, Clone, PartialEq)]
struct Member {
    family: Family,
    params: Vec<f64>,
    /// Trig only: cosine instead of sine.
    cosine: bool,
    b: f64,
    h: f64,
}

impl Member {
    fn source(&self) -> String {
        let p = &self.params;
        match self.family {
            Family::Poly6 | Family::Quadratic => {
                let mut s = format!("({:?})", p[0]);
                for (k, c) in p.iter().enumerate().skip(1) {
                    s.push_str(&format!(" + ({c:?})*pow(x,{k})"));
                }
                s
            }
            Family::Exp => format!("({:?})*exp(({:?})*x)", p[0], p[1]),
            Family::Trig => {
                let name = if self.cosine { "cos" } else { "sin" };
                format!("({:?})*{name}(({:?})*x)", p[0], p[1])
            }
            Family::Monomial4 => format!("({:?})*pow(x,4)", p[0]),
            Family::Mixed => unreachable!(),
        }
    }

    fn function(&self) -> ExprFunction {
        ExprFunction::parse(&self.source()).expect("generated sources are well-formed")
    }
}

fn sample_member(family: Family, rng: &mut ChaCha8Rng) -> Member {
    let family = if family == Family::Mixed {
        [Family::Poly6, Family::Exp, Family::Trig][rng.random_range(0..3)]
    } else {
        family
    };
    let params = family
        .ranges()
        .into_iter()
        .map(|(lo, hi)| rng.random_range(lo..=hi))
        .collect();
    let cosine = family == Family::Trig && rng.random_bool(0.5);
    let b = rng.random_range(-2.0..=2.0);
    let magnitude = rng.random_range(0.1..=2.0);
    let h = if rng.random_bool(0.5) {
        magnitude
    } else {
        -magnitude
    };
    Member {
        family,
        params,
        cosine,
        b,
        h,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnessConfig {
    pub grid_n: usize,
    pub oracle_tol: f64,
    pub ratio_tol: f64,
    pub eta: EtaMap,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            grid_n: DEFAULT_CAMPAIGN_GRID,
            oracle_tol: DEFAULT_ABS_TOL,
            ratio_tol: RATIO_TOL,
            eta: EtaMap::Difference,
        }
    }
}

/// Instance without a bound selection: `f`, η, and the points `a`, `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub family: Option<Family>,
    pub f: ExprFunction,
    pub map: EtaMap,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub trial: usize,
    pub family: String,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub theorem: Theorem,
    pub q: f64,
}

/// Everything about an instance that does not depend on the bound selected.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub segment: PathSegment,
    pub derivatives: DerivativeData,
    /// `∫ f − Q`, the corrected-trapezoid remainder.
    pub lhs: f64,
    /// `∫ f − h(f(b)+f(b+h))/2`, the plain trapezoid remainder.
    pub lhs_plain: f64,
    /// `|f'(b) − f'(b+h)|` relative to `max(1, |f'(b)|, |f'(b+h)|)`.
    pub slope_mismatch: f64,
    hull: Domain,
}

impl Instance {
    /// Difference-map instance from a base point and step.
    pub fn from_segment(f: ExprFunction, b: f64, h: f64) -> Self {
        Self {
            family: None,
            f,
            map: EtaMap::Difference,
            a: b + h,
            b,
        }
    }

    pub fn evaluate(&self, oracle_tol: f64) -> Result<Evaluated> {
        let segment = PathSegment::from_eta(&self.map, self.a, self.b)?;
        let ja = self.f.eval_jet3(self.a)?;
        let jb = self.f.eval_jet3(segment.b)?;
        let jc = self.f.eval_jet3(segment.end())?;
        let integral = AdaptiveSimpson::new(oracle_tol)
            .integrate(|x| self.f.eval(x), segment.b, segment.end())?
            .value;
        let h = segment.h;
        let lhs = integral - corrected_trapezoid_from(h, jb.d0, jb.d1, jc.d0, jc.d1);
        let lhs_plain = integral - h * 0.5 * (jb.d0 + jc.d0);
        let slope_mismatch = (jb.d1 - jc.d1).abs() / 1f64.max(jb.d1.abs()).max(jc.d1.abs());
        let lo = self.a.min(segment.b).min(segment.end());
        let hi = self.a.max(segment.b).max(segment.end());
        Ok(Evaluated {
            segment,
            derivatives: DerivativeData::from_third_derivatives(ja.d3, jb.d3)?,
            lhs,
            lhs_plain,
            slope_mismatch,
            hull: Domain::new(lo, hi)?,
        })
    }

    /// Sampled check of the hypothesis `requirement` on `|f'''|^q`, over the
    /// hull of `a`, `b` and the path end.
    pub fn check_hypothesis(
        &self,
        ev: &Evaluated,
        requirement: Requirement,
        q: f64,
        grid_n: usize,
    ) -> Result<HypothesisReport> {
        let g = abs_third_derivative_power(&self.f, q);
        match requirement {
            Requirement::Preinvex => check_preinvex_with(g, &self.map, &ev.hull, grid_n),
            Requirement::Prequasiinvex => check_prequasiinvex_with(g, &self.map, &ev.hull, grid_n),
        }
    }
}

/// `|lhs| / bound`, with `0/0` read as 0 and `x/0` as infinity.
pub fn remainder_ratio(lhs: f64, bound_value: f64) -> f64 {
    if bound_value > 0.0 {
        lhs.abs() / bound_value
    } else if lhs.abs() <= ZERO_REMAINDER_TOL {
        0.0
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub family: String,
    pub function: String,
    pub a: f64,
    pub b: f64,
    pub h: f64,
    pub theorem: Theorem,
    pub q: f64,
    pub lhs: Option<f64>,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
    pub hypothesis_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub spec: BoundSpec,
    pub trials: usize,
    pub hypothesis_passed: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub argmax: Option<InstanceSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub family: Family,
    pub seed: u64,
    pub trials: usize,
    pub hypothesis_passed: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub argmax: Option<InstanceSummary>,
    pub per_spec: Vec<SpecSummary>,
    pub rows: Vec<TrialRow>,
}

impl CampaignReport {
    pub fn summary_for(&self, theorem: Theorem) -> impl Iterator<Item = &SpecSummary> {
        self.per_spec
            .iter()
            .filter(move |s| s.spec.theorem == theorem)
    }
}

/// The generator for trial `trial` under `seed`: one ChaCha stream per
/// trial, so any prefix of trials is reproducible on its own.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

fn evaluate_specs(
    trial: usize,
    family_label: &str,
    instance: &Instance,
    specs: &[BoundSpec],
    config: &HarnessConfig,
) -> Vec<TrialRow> {
    let function = instance.f.source().to_string();
    let base = |spec: &BoundSpec, h: f64| TrialRow {
        trial,
        family: family_label.to_string(),
        function: function.clone(),
        a: instance.a,
        b: instance.b,
        h,
        theorem: spec.theorem,
        q: spec.q,
        lhs: None,
        bound: None,
        ratio: None,
        hypothesis_pass: false,
    };
    let ev = match instance.evaluate(config.oracle_tol) {
        Ok(ev) => ev,
        Err(_) => {
            let h = instance
                .map
                .eval(instance.a, instance.b)
                .unwrap_or(f64::NAN);
            return specs.iter().map(|s| base(s, h)).collect();
        }
    };
    let h = ev.segment.h;
    // one hypothesis check per (requirement, q); the quasi check is q-free
    // since x ↦ x^q is increasing
    let mut cache: HashMap<(Requirement, u64), bool> = HashMap::new();
    specs
        .iter()
        .map(|spec| {
            let mut row = base(spec, h);
            let req = spec.theorem.requirement();
            let q = match req {
                Requirement::Preinvex => spec.q,
                Requirement::Prequasiinvex => 1.0,
            };
            let held = *cache.entry((req, q.to_bits())).or_insert_with(|| {
                instance
                    .check_hypothesis(&ev, req, q, config.grid_n)
                    .map(|r| r.passed)
                    .unwrap_or(false)
            });
            let slopes_ok =
                !spec.theorem.assumes_equal_slopes() || ev.slope_mismatch <= HYPOTHESIS_REL_TOL;
            let lhs = if spec.theorem.assumes_equal_slopes() {
                ev.lhs_plain
            } else {
                ev.lhs
            };
            if let Ok(bv) = bound(spec, h, &ev.derivatives) {
                row.lhs = Some(lhs);
                row.bound = Some(bv.value);
                row.ratio = Some(remainder_ratio(lhs, bv.value));
                row.hypothesis_pass = held && slopes_ok;
            }
            row
        })
        .collect()
}

fn summarize_rows(rows: &[TrialRow], specs: &[BoundSpec], ratio_tol: f64) -> Vec<SpecSummary> {
    let mut out: Vec<SpecSummary> = specs
        .iter()
        .map(|s| SpecSummary {
            spec: *s,
            trials: 0,
            hypothesis_passed: 0,
            violations: 0,
            max_ratio: 0.0,
            argmax: None,
        })
        .collect();
    for chunk in rows.chunks(specs.len()) {
        for (summary, row) in out.iter_mut().zip(chunk) {
            summary.trials += 1;
            if !row.hypothesis_pass {
                continue;
            }
            summary.hypothesis_passed += 1;
            let ratio = row.ratio.unwrap_or(f64::INFINITY);
            if ratio > 1.0 + ratio_tol {
                summary.violations += 1;
            }
            // strict comparison keeps the earliest trial on ties
            if ratio > summary.max_ratio || summary.argmax.is_none() {
                summary.max_ratio = ratio;
                summary.argmax = Some(row_summary(row));
            }
        }
    }
    out
}

fn row_summary(row: &TrialRow) -> InstanceSummary {
    InstanceSummary {
        trial: row.trial,
        family: row.family.clone(),
        function: row.function.clone(),
        a: row.a,
        b: row.b,
        h: row.h,
        theorem: row.theorem,
        q: row.q,
    }
}

fn instance_for_trial(family: Family, seed: u64, trial: usize, map: &EtaMap) -> (Family, Instance) {
    let mut rng = trial_rng(seed, trial);
    let m = sample_member(family, &mut rng);
    // for maps other than the difference, η(a, b) decides the actual path
    let instance = Instance {
        family: Some(m.family),
        f: m.function(),
        map: map.clone(),
        a: m.b + m.h,
        b: m.b,
    };
    (m.family, instance)
}

/// Seeded campaign: `trials` instances drawn from `family`, each evaluated
/// against every spec in `specs`.
pub fn run_inequality_suite(
    family: Family,
    specs: &[BoundSpec],
    trials: usize,
    seed: u64,
    config: &HarnessConfig,
) -> Result<CampaignReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    if specs.is_empty() {
        return Err(Error::InvalidArgument("no bound specs given".into()));
    }
    for s in specs {
        s.validate()?;
    }
    config.eta.validate()?;
    let rows: Vec<TrialRow> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (fam, instance) = instance_for_trial(family, seed, trial, &config.eta);
            evaluate_specs(trial, fam.label(), &instance, specs, config)
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    let per_spec = summarize_rows(&rows, specs, config.ratio_tol);
    let mut report = CampaignReport {
        family,
        seed,
        trials,
        hypothesis_passed: per_spec.iter().map(|s| s.hypothesis_passed).sum(),
        violations: per_spec.iter().map(|s| s.violations).sum(),
        max_ratio: 0.0,
        argmax: None,
        per_spec,
        rows,
    };
    for s in &report.per_spec {
        if s.argmax.is_some() && (report.argmax.is_none() || s.max_ratio > report.max_ratio) {
            report.max_ratio = s.max_ratio;
            report.argmax = s.argmax.clone();
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremValue {
    pub theorem: Theorem,
    /// `None` when the theorem is not defined at this `q`.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentRow {
    pub q: f64,
    pub values: Vec<TheoremValue>,
    pub winner: Theorem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TournamentTable {
    pub h: f64,
    pub eta_ba: f64,
    pub derivatives: DerivativeData,
    pub rows: Vec<TournamentRow>,
}

/// All six main bounds at each `q`, with the smallest marked.
pub fn tournament_from_data(
    h: f64,
    d: &DerivativeData,
    q_grid: &[f64],
) -> Result<Vec<TournamentRow>> {
    if q_grid.is_empty() {
        return Err(Error::InvalidArgument("q grid is empty".into()));
    }
    q_grid
        .iter()
        .map(|&q| {
            if !(q >= 1.0) || !q.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "tournament q must be ≥ 1, got {q}"
                )));
            }
            let values: Vec<TheoremValue> = Theorem::MAIN
                .iter()
                .map(|&t| TheoremValue {
                    theorem: t,
                    value: BoundSpec::new(t, q)
                        .ok()
                        .and_then(|s| bound(&s, h, d).ok())
                        .map(|b| b.value),
                })
                .collect();
            let mut winner: Option<(Theorem, f64)> = None;
            for tv in &values {
                if let Some(v) = tv.value {
                    // strict: earlier theorems win ties
                    if winner.is_none_or(|(_, best)| v < best) {
                        winner = Some((tv.theorem, v));
                    }
                }
            }
            Ok(TournamentRow {
                q,
                values,
                winner: winner.expect("T2.1 is defined for every q ≥ 1").0,
            })
        })
        .collect()
}

pub fn tournament(instance: &Instance, q_grid: &[f64]) -> Result<TournamentTable> {
    let seg = PathSegment::from_eta(&instance.map, instance.a, instance.b)?;
    let d = DerivativeData::from_third_derivatives(
        instance.f.third_derivative(instance.a)?,
        instance.f.third_derivative(instance.b)?,
    )?;
    Ok(TournamentTable {
        h: seg.h,
        eta_ba: instance.map.eval(instance.b, instance.a)?,
        derivatives: d,
        rows: tournament_from_data(seg.h, &d, q_grid)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub spec: BoundSpec,
    pub family: Family,
    pub best: Option<InstanceSummary>,
    pub ratio: f64,
    pub evaluations: usize,
}

const SEGMENT_RANGES: [(f64, f64); 2] = [(-2.0, 2.0), (-2.0, 2.0)];
const MIN_STEP: f64 = 0.1;

/// Random-restart coordinate ascent on the family parameters, maximizing
/// `|lhs|/bound` over hypothesis-passing instances. The first restart starts
/// from the family's canonical member.
pub fn sharpness_search(
    spec: &BoundSpec,
    family: Family,
    iterations: usize,
    seed: u64,
    config: &HarnessConfig,
) -> Result<SharpnessResult> {
    spec.validate()?;
    if iterations == 0 {
        return Err(Error::InvalidArgument(
            "iterations must be at least 1".into(),
        ));
    }
    let mut evaluations = 0usize;
    let mut objective = |m: &Member| -> f64 {
        evaluations += 1;
        if !(m.h.abs() >= MIN_STEP) {
            return f64::NEG_INFINITY;
        }
        let instance = Instance::from_segment(m.function(), m.b, m.h);
        let row = evaluate_specs(
            0,
            m.family.label(),
            &instance,
            std::slice::from_ref(spec),
            config,
        )
        .pop()
        .expect("one spec in, one row out");
        match (row.hypothesis_pass, row.ratio) {
            (true, Some(r)) => r,
            _ => f64::NEG_INFINITY,
        }
    };

    let mut best: Option<(Member, f64)> = None;
    for restart in 0..iterations {
        let mut rng = trial_rng(seed, restart);
        let mut m = if restart == 0 {
            let fam = if family == Family::Mixed {
                Family::Poly6
            } else {
                family
            };
            let (params, cosine) = fam.canonical();
            Member {
                family: fam,
                params,
                cosine,
                b: 0.0,
                h: 1.0,
            }
        } else {
            sample_member(family, &mut rng)
        };
        let mut ranges = m.family.ranges();
        ranges.extend(SEGMENT_RANGES);
        let mut steps: Vec<f64> = ranges.iter().map(|(lo, hi)| 0.1 * (hi - lo)).collect();
        let mut current = objective(&m);
        for _sweep in 0..40 {
            let mut improved = false;
            for k in 0..ranges.len() {
                for dir in [1.0, -1.0] {
                    let mut cand = m.clone();
                    let slot = coordinate(&mut cand, k);
                    let (lo, hi) = ranges[k];
                    *slot = (*slot + dir * steps[k]).clamp(lo, hi);
                    let val = objective(&cand);
                    if val > current {
                        current = val;
                        m = cand;
                        improved = true;
                        break;
                    }
                }
            }
            if !improved {
                for s in &mut steps {
                    *s *= 0.5;
                }
                if steps
                    .iter()
                    .zip(&ranges)
                    .all(|(s, (lo, hi))| *s < 1e-3 * (hi - lo))
                {
                    break;
                }
            }
        }
        if current.is_finite() && best.as_ref().is_none_or(|(_, r)| current > *r) {
            best = Some((m, current));
        }
    }
    Ok(match best {
        Some((m, ratio)) => SharpnessResult {
            spec: *spec,
            family,
            best: Some(InstanceSummary {
                trial: 0,
                family: m.family.label().to_string(),
                function: m.source(),
                a: m.b + m.h,
                b: m.b,
                h: m.h,
                theorem: spec.theorem,
                q: spec.q,
            }),
            ratio,
            evaluations,
        },
        None => SharpnessResult {
            spec: *spec,
            family,
            best: None,
            ratio: 0.0,
            evaluations,
        },
    })
}

/// Mutable access to coordinate `k` of the search vector `params ++ [b, h]`.
fn coordinate(m: &mut Member, k: usize) -> &mut f64 {
    let n = m.params.len();
    match k {
        k if k < n => &mut m.params[k],
        k if k == n => &mut m.b,
        _ => &mut m.h,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HhSide {
    /// `f(midpoint) > mean`.
    Midpoint,
    /// `mean > (f(a)+f(b))/2`.
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhViolation {
    pub side: HhSide,
    pub a: f64,
    pub b: f64,
    pub midpoint_value: f64,
    pub mean_value: f64,
    pub endpoint_average: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HhReport {
    pub passed: bool,
    /// Number of sub-intervals checked (pairs of grid points).
    pub checked: usize,
    pub midpoint_side_holds: bool,
    pub endpoint_side_holds: bool,
    /// Largest relative excess `f(mid) − mean` over all sub-intervals.
    pub midpoint_worst_slack: f64,
    /// Largest relative excess `mean − (f(a)+f(b))/2` over all sub-intervals.
    pub endpoint_worst_slack: f64,
    pub tolerance: f64,
    /// Values on the full interval `[a, b]`.
    pub midpoint_value: f64,
    pub mean_value: f64,
    pub endpoint_average: f64,
    /// Worst violating sub-interval, midpoint side first.
    pub witness: Option<HhViolation>,
}

/// Classical Hermite–Hadamard sandwich
/// `f((a+b)/2) ≤ (1/(b−a))∫f ≤ (f(a)+f(b))/2`, checked on `[a, b]` and on
/// every sub-interval between points of a `grid_n` grid.
pub fn check_hh_classical(f: &ExprFunction, a: f64, b: f64, grid_n: usize) -> Result<HhReport> {
    if !(a < b) {
        return Err(Error::InvalidArgument(format!(
            "need a < b, got a = {a}, b = {b}"
        )));
    }
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be at least 2, got {grid_n}"
        )));
    }
    let xs = crate::invex::uniform_grid(a, b, grid_n);
    let pairs: Vec<(usize, usize)> = (0..grid_n)
        .flat_map(|i| ((i + 1)..grid_n).map(move |j| (i, j)))
        .collect();
    let oracle = AdaptiveSimpson::default();
    let values: Vec<(f64, f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (lo, hi) = (xs[i], xs[j]);
            let mid = f.eval(0.5 * (lo + hi))?;
            let mean = oracle.integrate(|x| f.eval(x), lo, hi)?.value / (hi - lo);
            let ends = 0.5 * (f.eval(lo)? + f.eval(hi)?);
            Ok((mid, mean, ends))
        })
        .collect::<Result<_>>()?;
    let mut worst: [Option<(f64, usize)>; 2] = [None, None];
    for (k, &(mid, mean, ends)) in values.iter().enumerate() {
        let scale = 1f64.max(mid.abs()).max(mean.abs()).max(ends.abs());
        for (side, slack) in [(mid - mean) / scale, (mean - ends) / scale]
            .into_iter()
            .enumerate()
        {
            if worst[side].is_none_or(|(s, _)| slack > s) {
                worst[side] = Some((slack, k));
            }
        }
    }
    let [(left, kl), (right, kr)] = worst.map(|w| w.expect("at least one pair"));
    let violation = |side: HhSide, k: usize| {
        let (mid, mean, ends) = values[k];
        HhViolation {
            side,
            a: xs[pairs[k].0],
            b: xs[pairs[k].1],
            midpoint_value: mid,
            mean_value: mean,
            endpoint_average: ends,
        }
    };
    let midpoint_side_holds = left <= HYPOTHESIS_REL_TOL;
    let endpoint_side_holds = right <= HYPOTHESIS_REL_TOL;
    let witness = if !midpoint_side_holds {
        Some(violation(HhSide::Midpoint, kl))
    } else if !endpoint_side_holds {
        Some(violation(HhSide::Endpoints, kr))
    } else {
        None
    };
    let full = pairs
        .iter()
        .position(|&p| p == (0, grid_n - 1))
        .expect("full interval is always checked");
    let (midpoint_value, mean_value, endpoint_average) = values[full];
    Ok(HhReport {
        passed: midpoint_side_holds && endpoint_side_holds,
        checked: pairs.len(),
        midpoint_side_holds,
        endpoint_side_holds,
        midpoint_worst_slack: left,
        endpoint_worst_slack: right,
        tolerance: HYPOTHESIS_REL_TOL,
        midpoint_value,
        mean_value,
        endpoint_average,
        witness,
    })
}
