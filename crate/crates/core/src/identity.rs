//! The corrected-trapezoid identity over an η-path.
//!
//! With `h = η(a, b)` and `Q = h·(f(b) + f(b+h))/2 + (h²/12)·(f'(b) − f'(b+h))`,
//!
//! ```text
//! ∫_b^{b+h} f(x) dx − Q = (h⁴/12) ∫₀¹ t(1−t)(2t−1) f'''(b + t·h) dt
//! ```
//!
//! Both sides are computed here by independent routes: the left through the
//! Simpson oracle applied to `f`, the right through the same oracle applied
//! to the kernel-weighted jet of `f`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ExprFunction;
use crate::invex::EtaMap;
use crate::oracle::AdaptiveSimpson;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// `t(1−t)(2t−1)`, the remainder kernel.
pub fn kernel(t: f64) -> f64 {
    t * (1.0 - t) * (2.0 * t - 1.0)
}

/// The η-path from `b` to `b + h`, where `h = η(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathSegment {
    pub b: f64,
    pub h: f64,
    pub a: f64,
}

impl PathSegment {
    /// Segment with an explicit step, `a` recorded as `b + h`.
    pub fn new(b: f64, h: f64) -> Result<Self> {
        Self::with_other(b, h, b + h)
    }

    pub fn with_other(b: f64, h: f64, a: f64) -> Result<Self> {
        if !(b.is_finite() && h.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "segment b = {b}, h = {h} is not finite"
            )));
        }
        if h == 0.0 {
            return Err(Error::InvalidArgument("η(a, b) must be nonzero".into()));
        }
        Ok(Self { b, h, a })
    }

    /// `h = η(a, b)` from the map, so the path starts at `b`.
    pub fn from_eta(map: &EtaMap, a: f64, b: f64) -> Result<Self> {
        let h = map.eval(a, b)?;
        Self::with_other(b, h, a)
    }

    /// `c = b + η(a, b)`.
    pub fn end(&self) -> f64 {
        self.b + self.h
    }

    /// The path as an unoriented interval `[min, max]`.
    pub fn hull(&self) -> (f64, f64) {
        let c = self.end();
        (self.b.min(c), self.b.max(c))
    }
}

/// `Q = h·(f(b)+f(b+h))/2 + (h²/12)·(f'(b) − f'(b+h))`.
pub fn corrected_trapezoid(f: &ExprFunction, seg: &PathSegment) -> Result<f64> {
    let jb = f.eval_jet3(seg.b)?;
    let jc = f.eval_jet3(seg.end())?;
    Ok(corrected_trapezoid_from(seg.h, jb.d0, jb.d1, jc.d0, jc.d1))
}

pub(crate) fn corrected_trapezoid_from(h: f64, fb: f64, db: f64, fc: f64, dc: f64) -> f64 {
    h * 0.5 * (fb + fc) + h * h / 12.0 * (db - dc)
}

/// `∫₀¹ t(1−t)(2t−1) f'''(b + t·h) dt`, to absolute tolerance `tol`.
pub fn kernel_integral(f: &ExprFunction, seg: &PathSegment, tol: f64) -> Result<f64> {
    Ok(kernel_integral_estimate(f, seg, tol)?.value)
}

fn kernel_integral_estimate(
    f: &ExprFunction,
    seg: &PathSegment,
    tol: f64,
) -> Result<crate::oracle::QuadEstimate> {
    AdaptiveSimpson::new(tol).integrate(
        |t| Ok(kernel(t) * f.third_derivative(seg.b + t * seg.h)?),
        0.0,
        1.0,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_diff: f64,
    pub quadrature_error_estimate: f64,
    pub tol_abs: f64,
    pub tol_rel: f64,
    pub passed: bool,
    /// η(a, b), the step actually used.
    pub eta_ab: f64,
    /// η(b, a), when the segment came from a map; may differ for asymmetric maps.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_ba: Option<f64>,
}

/// Left side of the identity, `∫_b^{b+h} f − Q`, via the oracle at tolerance `oracle_tol`.
pub fn identity_lhs(f: &ExprFunction, seg: &PathSegment, oracle_tol: f64) -> Result<(f64, f64)> {
    let integral = AdaptiveSimpson::new(oracle_tol).integrate(|x| f.eval(x), seg.b, seg.end())?;
    let q = corrected_trapezoid(f, seg)?;
    Ok((integral.value - q, integral.error_estimate))
}

/// Computes both sides independently and compares them under
/// `|lhs − rhs| ≤ max(tol, DEFAULT_REL_TOL·max(|lhs|, |rhs|))`.
pub fn verify_identity(f: &ExprFunction, seg: &PathSegment, tol: f64) -> Result<IdentityReport> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let (lhs, lhs_err) = identity_lhs(f, seg, tol / 10.0)?;
    let h4 = seg.h.powi(4);
    // scale the kernel tolerance so the rhs carries the same absolute accuracy
    let k = kernel_integral_estimate(f, seg, (tol / 10.0 / (h4 / 12.0)).min(1e-3))?;
    let rhs = h4 / 12.0 * k.value;
    let abs_diff = (lhs - rhs).abs();
    let passed = abs_diff <= tol.max(DEFAULT_REL_TOL * lhs.abs().max(rhs.abs()));
    Ok(IdentityReport {
        lhs,
        rhs,
        abs_diff,
        quadrature_error_estimate: lhs_err + h4 / 12.0 * k.error_estimate,
        tol_abs: tol,
        tol_rel: DEFAULT_REL_TOL,
        passed,
        eta_ab: seg.h,
        eta_ba: None,
    })
}

/// As [`verify_identity`], building the segment from `η` and recording `η(b, a)`.
pub fn verify_identity_eta(
    f: &ExprFunction,
    map: &EtaMap,
    a: f64,
    b: f64,
    tol: f64,
) -> Result<IdentityReport> {
    let seg = PathSegment::from_eta(map, a, b)?;
    let mut report = verify_identity(f, &seg, tol)?;
    report.eta_ba = Some(map.eval(b, a)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::integrate_plain;

    fn f(s: &str) -> ExprFunction {
        ExprFunction::parse(s).unwrap()
    }

    #[test]
    fn kernel_has_zero_mean_and_is_antisymmetric() {
        let m = integrate_plain(kernel, 0.0, 1.0, 1e-15).unwrap().value;
        assert!(m.abs() < 1e-14);
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            assert!((kernel(t) + kernel(1.0 - t)).abs() < 1e-14);
        }
    }

    #[test]
    fn corrected_trapezoid_examples() {
        let seg = PathSegment::new(0.0, 1.0).unwrap();
        assert!((corrected_trapezoid(&f("x*x*x"), &seg).unwrap() - 0.25).abs() < 1e-15);
        assert!((corrected_trapezoid(&f("pow(x,4)"), &seg).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        let seg = PathSegment::new(-1.5, 2.5).unwrap();
        assert!((corrected_trapezoid(&f("7.25"), &seg).unwrap() - 7.25 * 2.5).abs() < 1e-14);
    }

    #[test]
    fn kernel_integral_examples() {
        let seg = PathSegment::new(0.0, 1.0).unwrap();
        assert!(
            kernel_integral(&f("x*x*x - 2*x"), &seg, 1e-13)
                .unwrap()
                .abs()
                < 1e-14
        );
        assert!((kernel_integral(&f("pow(x,4)"), &seg, 1e-13).unwrap() - 0.4).abs() < 1e-12);
        let e = std::f64::consts::E;
        assert!(
            (kernel_integral(&f("exp(x)"), &seg, 1e-13).unwrap() - (7.0 * e - 19.0)).abs() < 1e-12
        );
    }

    #[test]
    fn identity_for_quartic() {
        let seg = PathSegment::new(0.0, 1.0).unwrap();
        let r = verify_identity(&f("pow(x,4)"), &seg, DEFAULT_TOL).unwrap();
        assert!(r.passed);
        assert!((r.lhs - 1.0 / 30.0).abs() < 1e-10);
        assert!((r.rhs - 1.0 / 30.0).abs() < 1e-10);
    }

    #[test]
    fn identity_for_exp() {
        let seg = PathSegment::new(0.0, 1.0).unwrap();
        let r = verify_identity(&f("exp(x)"), &seg, DEFAULT_TOL).unwrap();
        let want = (7.0 * std::f64::consts::E - 19.0) / 12.0;
        assert!(r.passed);
        assert!((r.lhs - want).abs() < 1e-10 && (r.rhs - want).abs() < 1e-10);
    }

    #[test]
    fn identity_with_negative_step() {
        let seg = PathSegment::new(1.0, -1.7).unwrap();
        let r = verify_identity(&f("sin(2*x) + pow(x,5)"), &seg, DEFAULT_TOL).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn cubic_has_zero_remainder() {
        let seg = PathSegment::new(-0.3, 1.9).unwrap();
        let r = verify_identity(&f("3*x*x*x - x*x + 4"), &seg, DEFAULT_TOL).unwrap();
        assert!(r.lhs.abs() < 1e-12 && r.rhs.abs() < 1e-12);
    }

    #[test]
    fn eta_segment_records_both_orientations() {
        let r = verify_identity_eta(
            &f("pow(x,4)"),
            &EtaMap::PaperPiecewise,
            1.0,
            -1.0,
            DEFAULT_TOL,
        )
        .unwrap();
        // opposite signs: η(1, −1) = −1 − 1 = −2 and η(−1, 1) = 1 − (−1) = 2
        assert_eq!(r.eta_ab, -2.0);
        assert_eq!(r.eta_ba, Some(2.0));
        assert!(r.passed);
    }

    #[test]
    fn zero_step_rejected() {
        assert!(PathSegment::new(1.0, 0.0).is_err());
        assert!(PathSegment::from_eta(&EtaMap::Difference, 2.0, 2.0).is_err());
    }
}
