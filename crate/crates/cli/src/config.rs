//! The resolved run configuration: a JSON file, then command-line overrides.

use std::path::{Path, PathBuf};

use hhcert_core::bounds::{BoundSpec, Theorem};
use hhcert_core::harness::{Family, DEFAULT_CAMPAIGN_GRID, RATIO_TOL};
use hhcert_core::identity::DEFAULT_TOL;
use hhcert_core::invex::{EtaMap, DEFAULT_GRID};
use hhcert_core::oracle::DEFAULT_ABS_TOL;
use hhcert_core::quadrature::{CertificateMode, Refinement};
use hhcert_core::{Error, ExprFunction, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Absolute tolerance for the two sides of the identity.
    pub identity: f64,
    /// Relative slack on `|lhs|/bound ≤ 1`.
    pub ratio: f64,
    /// Absolute tolerance of the reference quadrature.
    pub oracle: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            identity: DEFAULT_TOL,
            ratio: RATIO_TOL,
            oracle: DEFAULT_ABS_TOL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    /// Not embedded in reports, so the same run written to two places is
    /// byte-identical.
    #[serde(skip_serializing)]
    pub path: Option<PathBuf>,
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum HypothesisKind {
    InvexSet,
    #[default]
    Preinvex,
    Prequasiinvex,
}

/// What `check-hypothesis` tests: `f` itself or `|f'''|^q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Subject {
    #[default]
    F,
    AbsThirdDerivative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub function: Option<String>,
    pub eta: EtaMap,
    pub a: Option<f64>,
    pub b: Option<f64>,
    /// Single bound selection (`bound`, and `suite` when set).
    pub theorem: Option<BoundSpec>,
    /// Exponent for `|f'''|^q` in `check-hypothesis` when no theorem is set.
    pub q: Option<f64>,
    /// Bound selections for `suite` when `theorem` is unset.
    pub specs: Vec<BoundSpec>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub grid: Option<usize>,
    pub family: Family,
    pub trials: usize,
    pub sharpness_iterations: usize,
    pub q_grid: Vec<f64>,
    pub hypothesis: HypothesisKind,
    pub subject: Subject,
    pub bounding_box: Option<[f64; 2]>,
    pub mode: CertificateMode,
    pub refinement: Refinement,
    pub output: Output,
}

pub const DEFAULT_TRIALS: usize = 200;
pub const DEFAULT_TARGET: f64 = 1e-8;

pub fn default_suite_specs() -> Vec<BoundSpec> {
    let mut specs = Vec::new();
    for t in Theorem::MAIN {
        if !t.needs_conjugate() {
            specs.push(BoundSpec::new(t, 1.0).expect("q = 1 is valid without a conjugate"));
        }
        specs.push(BoundSpec::new(t, 2.0).expect("q = 2 is valid for every main theorem"));
    }
    specs
}

impl Default for Config {
    fn default() -> Self {
        Self {
            function: None,
            eta: EtaMap::Difference,
            a: None,
            b: None,
            theorem: None,
            q: None,
            specs: default_suite_specs(),
            tolerances: Tolerances::default(),
            seed: 0,
            grid: None,
            family: Family::Poly6,
            trials: DEFAULT_TRIALS,
            sharpness_iterations: 0,
            q_grid: vec![1.0, 1.5, 2.0, 3.0, 4.0, 8.0],
            hypothesis: HypothesisKind::default(),
            subject: Subject::default(),
            bounding_box: None,
            mode: CertificateMode::Hypothesis,
            refinement: Refinement::Target(DEFAULT_TARGET),
            output: Output::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::InvalidArgument(format!("invalid config {}: {e}", path.display())))
    }

    pub fn function(&self) -> Result<ExprFunction> {
        let src = self
            .function
            .as_deref()
            .ok_or_else(|| Error::InvalidArgument("no function given (--f)".into()))?;
        Ok(ExprFunction::parse(src)?)
    }

    pub fn point(&self, which: char) -> Result<f64> {
        let v = if which == 'a' { self.a } else { self.b };
        match v {
            Some(v) if v.is_finite() => Ok(v),
            Some(v) => Err(Error::InvalidArgument(format!(
                "--{which} must be finite, got {v}"
            ))),
            None => Err(Error::InvalidArgument(format!("missing --{which}"))),
        }
    }

    pub fn spec(&self) -> Result<BoundSpec> {
        let spec = self
            .theorem
            .ok_or_else(|| Error::InvalidArgument("no theorem given (--theorem)".into()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn suite_specs(&self) -> Result<Vec<BoundSpec>> {
        let specs = match self.theorem {
            Some(s) => vec![s],
            None => self.specs.clone(),
        };
        for s in &specs {
            s.validate()?;
        }
        Ok(specs)
    }

    /// Fills in per-command defaults so the embedded config shows what ran.
    pub fn resolve_grid(&mut self, command: &str) {
        if self.grid.is_none() {
            self.grid = Some(match command {
                "suite" | "hh-classical" => DEFAULT_CAMPAIGN_GRID,
                _ => DEFAULT_GRID,
            });
        }
    }

    /// Checks shared by every command.
    pub fn validate(&self) -> Result<()> {
        self.eta.validate()?;
        let t = &self.tolerances;
        for (name, v) in [
            ("identity", t.identity),
            ("ratio", t.ratio),
            ("oracle", t.oracle),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "{name} tolerance must be positive, got {v}"
                )));
            }
        }
        if let Some(g) = self.grid {
            if g < 2 {
                return Err(Error::InvalidArgument(format!(
                    "grid must be at least 2, got {g}"
                )));
            }
        }
        Ok(())
    }
}
