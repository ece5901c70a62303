//! Third-derivative bounds on the corrected-trapezoid remainder.
//!
//! Every bound has the shape `h⁴ · C(p, q) · M(A, B)` with `h = η(a, b)`,
//! `A = |f'''(a)|`, `B = |f'''(b)|` and `M` either a power mean (preinvex
//! family, T2.x) or the maximum (prequasiinvex family, T3.x). The moment
//! integrals behind the constants are exposed individually so they can be
//! checked against quadrature.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma_difference;

/// `∫₀¹ t(1−t)|2t−1| dt`.
pub fn moment_c1() -> f64 {
    1.0 / 16.0
}

/// `∫₀¹ t²(1−t)|2t−1| dt = ∫₀¹ t(1−t)²|2t−1| dt`.
pub fn moment_c2() -> f64 {
    1.0 / 32.0
}

/// `∫₀¹ t(1−t)|2t−1|^p dt = 1/(2(p+1)(p+3))`.
pub fn holder_weighted_moment(p: f64) -> Result<f64> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Hölder exponent p must exceed 1, got {p}"
        )));
    }
    Ok(1.0 / (2.0 * (p + 1.0) * (p + 3.0)))
}

/// `Γ(1+p)/Γ(3/2+p)`, through a log-gamma difference.
pub fn gamma_ratio(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "gamma ratio needs p > 0, got {p}"
        )));
    }
    Ok(ln_gamma_difference(1.0 + p, 0.5).exp())
}

/// `∫₀¹ (t−t²)^p dt = 2^{−1−2p} √π Γ(1+p)/Γ(3/2+p)`.
pub fn beta_moment(p: f64) -> Result<f64> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "beta moment needs p > 0, got {p}"
        )));
    }
    Ok(2f64.powf(-1.0 - 2.0 * p) * PI.sqrt() * gamma_ratio(p)?)
}

/// `∫₀¹ t|2t−1|^q dt = ∫₀¹ (1−t)|2t−1|^q dt = 1/(2(q+1))`.
pub fn abs_moment(q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "abs moment needs q > 0, got {q}"
        )));
    }
    Ok(1.0 / (2.0 * (q + 1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Theorem {
    #[serde(rename = "T2.1")]
    T2_1,
    #[serde(rename = "T2.2")]
    T2_2,
    #[serde(rename = "T2.3")]
    T2_3,
    #[serde(rename = "T3.1")]
    T3_1,
    #[serde(rename = "T3.2")]
    T3_2,
    #[serde(rename = "T3.3")]
    T3_3,
    #[serde(rename = "C2.1")]
    C2_1,
    #[serde(rename = "C2.2")]
    C2_2,
    #[serde(rename = "C2.3")]
    C2_3,
    #[serde(rename = "C2.4")]
    C2_4,
}

/// Which sampled hypothesis on `|f'''|^q` a bound needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Requirement {
    Preinvex,
    Prequasiinvex,
}

impl Theorem {
    /// The six main theorems in tie-break order.
    pub const MAIN: [Theorem; 6] = [
        Theorem::T2_1,
        Theorem::T2_2,
        Theorem::T2_3,
        Theorem::T3_1,
        Theorem::T3_2,
        Theorem::T3_3,
    ];

    pub const ALL: [Theorem; 10] = [
        Theorem::T2_1,
        Theorem::T2_2,
        Theorem::T2_3,
        Theorem::T3_1,
        Theorem::T3_2,
        Theorem::T3_3,
        Theorem::C2_1,
        Theorem::C2_2,
        Theorem::C2_3,
        Theorem::C2_4,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Theorem::T2_1 => "T2.1",
            Theorem::T2_2 => "T2.2",
            Theorem::T2_3 => "T2.3",
            Theorem::T3_1 => "T3.1",
            Theorem::T3_2 => "T3.2",
            Theorem::T3_3 => "T3.3",
            Theorem::C2_1 => "C2.1",
            Theorem::C2_2 => "C2.2",
            Theorem::C2_3 => "C2.3",
            Theorem::C2_4 => "C2.4",
        }
    }

    pub fn requirement(self) -> Requirement {
        match self {
            Theorem::T2_1 | Theorem::T2_2 | Theorem::T2_3 | Theorem::C2_1 | Theorem::C2_2 => {
                Requirement::Preinvex
            }
            _ => Requirement::Prequasiinvex,
        }
    }

    /// Hölder-type bounds need `q > 1` and a conjugate `p`.
    pub fn needs_conjugate(self) -> bool {
        matches!(
            self,
            Theorem::T2_2 | Theorem::T2_3 | Theorem::T3_2 | Theorem::T3_3
        )
    }

    /// Corollaries that drop the derivative correction and assume `f'(b) = f'(b+h)`.
    pub fn assumes_equal_slopes(self) -> bool {
        matches!(self, Theorem::C2_2 | Theorem::C2_4)
    }

    /// Bounds stated only for `q = 1`.
    pub fn fixed_q_one(self) -> bool {
        matches!(self, Theorem::C2_1 | Theorem::C2_3)
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Theorem::ALL
            .into_iter()
            .find(|t| t.label().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown theorem '{s}'")))
    }
}

fn default_q() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundSpec {
    pub theorem: Theorem,
    #[serde(default = "default_q")]
    pub q: f64,
    /// T3.3 only: multiply the printed constant by `2^{−1/p}`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub tight: bool,
}

impl BoundSpec {
    pub fn new(theorem: Theorem, q: f64) -> Result<Self> {
        let s = Self {
            theorem,
            q,
            tight: false,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn tight(mut self) -> Self {
        self.tight = true;
        self
    }

    /// `p = q/(q−1)` for the Hölder bounds; `None` otherwise.
    pub fn p(&self) -> Option<f64> {
        self.theorem
            .needs_conjugate()
            .then(|| self.q / (self.q - 1.0))
    }

    pub fn validate(&self) -> Result<()> {
        let q = self.q;
        if !q.is_finite() {
            return Err(Error::InvalidSpec(format!("q must be finite, got {q}")));
        }
        if self.theorem.fixed_q_one() && q != 1.0 {
            return Err(Error::InvalidSpec(format!(
                "{} is stated for q = 1, got {q}",
                self.theorem
            )));
        }
        if self.theorem.needs_conjugate() {
            if !(q > 1.0) {
                return Err(Error::InvalidSpec(format!(
                    "{} needs q > 1, got {q}",
                    self.theorem
                )));
            }
            let p = q / (q - 1.0);
            if !p.is_finite() || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidSpec(format!(
                    "q = {q} has no usable conjugate exponent"
                )));
            }
        } else if !(q >= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "{} needs q ≥ 1, got {q}",
                self.theorem
            )));
        }
        if self.tight && self.theorem != Theorem::T3_3 {
            return Err(Error::InvalidSpec(
                "the tight variant exists only for T3.3".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeData {
    /// `|f'''(a)|`
    pub a3: f64,
    /// `|f'''(b)|`
    pub b3: f64,
}

impl DerivativeData {
    pub fn new(a3: f64, b3: f64) -> Result<Self> {
        if !(a3 >= 0.0 && b3 >= 0.0 && a3.is_finite() && b3.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "derivative data must be finite and nonnegative, got ({a3}, {b3})"
            )));
        }
        Ok(Self { a3, b3 })
    }

    /// From raw (signed) third derivatives.
    pub fn from_third_derivatives(fa3: f64, fb3: f64) -> Result<Self> {
        Self::new(fa3.abs(), fb3.abs())
    }

    fn max(&self) -> f64 {
        self.a3.max(self.b3)
    }

    /// `(A^q + B^q)^{1/q}`, scaled by the max to avoid overflow.
    fn power_sum(&self, q: f64) -> f64 {
        let m = self.max();
        if m == 0.0 {
            return 0.0;
        }
        m * ((self.a3 / m).powf(q) + (self.b3 / m).powf(q)).powf(1.0 / q)
    }

    /// `((A^q + B^q)/2)^{1/q}`.
    fn power_mean(&self, q: f64) -> f64 {
        let m = self.max();
        if m == 0.0 {
            return 0.0;
        }
        m * (0.5 * ((self.a3 / m).powf(q) + (self.b3 / m).powf(q))).powf(1.0 / q)
    }
}

/// Constants that went into a bound, for audit trails in reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ConstantsUsed {
    /// The full factor multiplying `h⁴·M(A, B)`.
    pub leading: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holder_weighted_moment: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta_moment: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_moment: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tight_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    pub spec: BoundSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    pub h: f64,
    pub derivatives: DerivativeData,
    pub constants_used: ConstantsUsed,
    /// C2.2 at `q = 1` only: the alternative printed form `h⁴/384·(A^q+B^q)^{1/q}`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_variant: Option<f64>,
}

/// Evaluates the right-hand side selected by `spec` with `h = η(a, b)`.
pub fn bound(spec: &BoundSpec, h: f64, d: &DerivativeData) -> Result<BoundValue> {
    spec.validate()?;
    if !h.is_finite() {
        return Err(Error::InvalidArgument(format!("h must be finite, got {h}")));
    }
    let q = spec.q;
    let p = spec.p();
    let h4 = h.powi(4);
    let mut c = ConstantsUsed::default();
    let mut printed_variant = None;

    let (leading, weight) = match spec.theorem {
        Theorem::T2_1 | Theorem::C2_2 | Theorem::C2_1 => {
            c.c1 = Some(moment_c1());
            c.c2 = Some(moment_c2());
            if spec.theorem == Theorem::C2_1 {
                // q = 1: ((A+B)/2)/192 = (A+B)/384
                (1.0 / 384.0, d.a3 + d.b3)
            } else {
                if spec.theorem == Theorem::C2_2 && q == 1.0 {
                    printed_variant = Some(h4 / 384.0 * d.power_sum(q));
                }
                (1.0 / 192.0, d.power_mean(q))
            }
        }
        Theorem::T3_1 | Theorem::C2_3 | Theorem::C2_4 => {
            c.c1 = Some(moment_c1());
            (1.0 / 192.0, d.max())
        }
        Theorem::T2_2 | Theorem::T3_2 => {
            let p = p.expect("validated");
            let hm = holder_weighted_moment(p)?;
            c.holder_weighted_moment = Some(hm);
            let factor = ((p + 1.0) * (p + 3.0)).powf(-1.0 / p);
            if spec.theorem == Theorem::T2_2 {
                (factor / (24.0 * 6f64.powf(1.0 / q)), d.power_sum(q))
            } else {
                (factor / (24.0 * 3f64.powf(1.0 / q)), d.max())
            }
        }
        Theorem::T2_3 | Theorem::T3_3 => {
            let p = p.expect("validated");
            let gr = gamma_ratio(p)?;
            c.gamma_ratio = Some(gr);
            c.beta_moment = Some(beta_moment(p)?);
            c.abs_moment = Some(abs_moment(q)?);
            let factor = (PI.sqrt() * gr).powf(1.0 / p) * (q + 1.0).powf(-1.0 / q);
            if spec.theorem == Theorem::T2_3 {
                (factor / 96.0, d.power_sum(q))
            } else {
                let mut lead = factor / 48.0;
                if spec.tight {
                    let t = 2f64.powf(-1.0 / p);
                    c.tight_factor = Some(t);
                    lead *= t;
                }
                (lead, d.max())
            }
        }
    };
    c.leading = leading;
    Ok(BoundValue {
        value: h4 * leading * weight,
        spec: *spec,
        p,
        h,
        derivatives: *d,
        constants_used: c,
        printed_variant,
    })
}
