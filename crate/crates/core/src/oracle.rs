//! Adaptive Simpson quadrature with interval bisection.
//!
//! This is the independent reference integrator: identity verification,
//! moment cross-checks and true-error measurements all go through it, and
//! it never touches the corrected-trapezoid rule or the jet machinery.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_MAX_DEPTH: u32 = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveSimpson {
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveSimpson {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            max_depth: DEFAULT_MAX_DEPTH,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadEstimate {
    pub value: f64,
    /// Sum of the per-leaf Richardson error estimates.
    pub error_estimate: f64,
    pub evaluations: usize,
}

/// Neumaier-compensated running sum.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for v in iter {
            s.add(v);
        }
        s
    }
}

struct Run<'a, F> {
    f: &'a F,
    max_depth: u32,
    value: CompensatedSum,
    error: f64,
    evaluations: usize,
}

impl<F> Run<'_, F>
where
    F: Fn(f64) -> Result<f64>,
{
    fn eval(&mut self, x: f64) -> Result<f64> {
        self.evaluations += 1;
        (self.f)(x)
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &mut self,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<()> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = self.eval(lm)?;
        let frm = self.eval(rm)?;
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let halves = left + right;
        let delta = halves - whole;
        // accept at tolerance, or once the difference is at roundoff level
        let roundoff = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if delta.abs() <= 15.0 * tol || delta.abs() <= roundoff {
            self.value.add(halves + delta / 15.0);
            self.error += delta.abs() / 15.0;
            return Ok(());
        }
        if depth >= self.max_depth || !(lm > a && m > lm && rm > m && b > rm) {
            return Err(Error::NoConvergence {
                a,
                b,
                depth: self.max_depth,
            });
        }
        self.refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1)?;
        self.refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1)
    }
}

impl AdaptiveSimpson {
    pub fn new(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    /// Oriented integral of `f` from `a` to `b` (negative when `b < a`).
    pub fn integrate<F>(&self, f: F, a: f64, b: f64) -> Result<QuadEstimate>
    where
        F: Fn(f64) -> Result<f64>,
    {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "integration limits must be finite, got [{a}, {b}]"
            )));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "quadrature tolerance must be positive, got {}",
                self.abs_tol
            )));
        }
        if a == b {
            return Ok(QuadEstimate {
                value: 0.0,
                error_estimate: 0.0,
                evaluations: 0,
            });
        }
        let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
        let mut run = Run {
            f: &f,
            max_depth: self.max_depth,
            value: CompensatedSum::default(),
            error: 0.0,
            evaluations: 0,
        };
        let fa = run.eval(lo)?;
        let fm = run.eval(0.5 * (lo + hi))?;
        let fb = run.eval(hi)?;
        let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
        run.refine(lo, hi, fa, fm, fb, whole, self.abs_tol, 0)?;
        Ok(QuadEstimate {
            value: sign * run.value.value(),
            error_estimate: run.error,
            evaluations: run.evaluations,
        })
    }
}

/// Convenience wrapper for infallible integrands.
pub fn integrate_plain<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<QuadEstimate>
where
    F: Fn(f64) -> f64,
{
    AdaptiveSimpson::new(abs_tol).integrate(|x| Ok(f(x)), a, b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = integrate_plain(|x| x * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((q.value - 4.0).abs() < 1e-14);
    }

    #[test]
    fn oriented_integral() {
        let fwd = integrate_plain(f64::exp, 0.0, 1.0, 1e-13).unwrap();
        let back = integrate_plain(f64::exp, 1.0, 0.0, 1e-13).unwrap();
        let exact = std::f64::consts::E - 1.0;
        assert!((fwd.value - exact).abs() < 1e-13);
        assert_eq!(back.value, -fwd.value);
    }

    #[test]
    fn large_magnitude_terminates_at_roundoff() {
        let q = integrate_plain(|x| 5.0 * (4.0 * x).exp(), -2.0, 2.0, 1e-12).unwrap();
        let exact = 1.25 * ((8.0f64).exp() - (-8.0f64).exp());
        assert!((q.value - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn kink_on_bisection_point() {
        let q =
            integrate_plain(|t| t * (1.0 - t) * (2.0 * t - 1.0).abs(), 0.0, 1.0, 1e-12).unwrap();
        assert!((q.value - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn non_convergence_reported() {
        let solver = AdaptiveSimpson {
            abs_tol: 1e-14,
            max_depth: 3,
        };
        let r = solver.integrate(|x: f64| Ok(x.sin() * 40.0), 0.0, 30.0);
        assert!(matches!(r, Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let s: CompensatedSum = [1.0, 1e-16, 1e-16, -1.0].into_iter().collect();
        assert_eq!(s.value(), 2e-16);
    }
}
