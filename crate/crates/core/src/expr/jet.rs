use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Value and first three derivatives of a function at a point.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet3 {
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
}

impl Jet3 {
    pub const fn new(d0: f64, d1: f64, d2: f64, d3: f64) -> Self {
        Self { d0, d1, d2, d3 }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0)
    }

    /// The identity function seeded at `x`.
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0, 0.0, 0.0)
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.d0, self.d1, self.d2, self.d3]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|v| v.is_finite())
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.d0, k * self.d1, k * self.d2, k * self.d3)
    }

    /// Composes an outer function with derivatives `phi = [φ, φ', φ'', φ''']`
    /// evaluated at `self.d0` (Faà di Bruno, truncated at order 3).
    pub fn compose(self, phi: [f64; 4]) -> Self {
        let (g1, g2, g3) = (self.d1, self.d2, self.d3);
        Self::new(
            phi[0],
            phi[1] * g1,
            phi[2] * g1 * g1 + phi[1] * g2,
            phi[3] * g1 * g1 * g1 + 3.0 * phi[2] * g1 * g2 + phi[1] * g3,
        )
    }

    /// `1/self`; the caller guarantees `self.d0 != 0`.
    pub fn recip(self) -> Self {
        let r = 1.0 / self.d0;
        let r2 = r * r;
        self.compose([r, -r2, 2.0 * r2 * r, -6.0 * r2 * r2])
    }

    pub fn exp(self) -> Self {
        let e = self.d0.exp();
        self.compose([e; 4])
    }

    /// Natural log; the caller guarantees `self.d0 > 0`.
    pub fn ln(self) -> Self {
        let r = 1.0 / self.d0;
        self.compose([self.d0.ln(), r, -r * r, 2.0 * r * r * r])
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.d0.sin_cos();
        self.compose([s, c, -s, -c])
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.d0.sin_cos();
        self.compose([c, -s, -c, s])
    }

    /// `|self|` away from the kink; the caller guarantees `self.d0 != 0`.
    pub fn abs(self) -> Self {
        let sign = self.d0.signum();
        self.compose([self.d0.abs(), sign, 0.0, 0.0])
    }
}

impl Add for Jet3 {
    type Output = Jet3;
    fn add(self, rhs: Jet3) -> Jet3 {
        Jet3::new(
            self.d0 + rhs.d0,
            self.d1 + rhs.d1,
            self.d2 + rhs.d2,
            self.d3 + rhs.d3,
        )
    }
}

impl Sub for Jet3 {
    type Output = Jet3;
    fn sub(self, rhs: Jet3) -> Jet3 {
        Jet3::new(
            self.d0 - rhs.d0,
            self.d1 - rhs.d1,
            self.d2 - rhs.d2,
            self.d3 - rhs.d3,
        )
    }
}

impl Neg for Jet3 {
    type Output = Jet3;
    fn neg(self) -> Jet3 {
        Jet3::new(-self.d0, -self.d1, -self.d2, -self.d3)
    }
}

/// Leibniz rule up to the third derivative.
impl Mul for Jet3 {
    type Output = Jet3;
    fn mul(self, g: Jet3) -> Jet3 {
        let f = self;
        Jet3::new(
            f.d0 * g.d0,
            f.d1 * g.d0 + f.d0 * g.d1,
            f.d2 * g.d0 + 2.0 * f.d1 * g.d1 + f.d0 * g.d2,
            f.d3 * g.d0 + 3.0 * f.d2 * g.d1 + 3.0 * f.d1 * g.d2 + f.d0 * g.d3,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recip_of_variable() {
        // 1/x at x=2: 1/2, -1/4, 2/8, -6/16
        let j = Jet3::variable(2.0).recip();
        assert_eq!(j.as_array(), [0.5, -0.25, 0.25, -0.375]);
    }

    #[test]
    fn compose_matches_chain_rule_for_exp_of_square() {
        // exp(x^2) at x=1: e, 2e, 6e, 20e
        let x = Jet3::variable(1.0);
        let j = (x * x).exp();
        let e = std::f64::consts::E;
        for (got, want) in j.as_array().iter().zip([e, 2.0 * e, 6.0 * e, 20.0 * e]) {
            assert!((got - want).abs() < 1e-12 * want);
        }
    }
}
