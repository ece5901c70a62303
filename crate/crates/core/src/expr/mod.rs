//! Expression trees for the integrand and exact third-order jets.
//!
//! Derivatives come from truncated Taylor (jet) arithmetic, so `f'''` is
//! exact to roundoff with no finite differencing. `abs` is accepted by the
//! grammar; its kink is allowed for plain value evaluation and refused for
//! jets.

mod jet;
mod parser;

use std::fmt;

pub use jet::Jet3;

use crate::error::{Error, ParseError, Result};

/// Jets refuse `abs` evaluated this close to its kink.
pub const KINK_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sin,
    Cos,
    Abs,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    /// Power with a constant exponent.
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

impl Node {
    pub fn has_var(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.has_var(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.has_var() || b.has_var()
            }
        }
    }

    /// True when the tree contains an `abs` node.
    pub fn is_non_smooth(&self) -> bool {
        match self {
            Node::Const(_) | Node::Var => false,
            Node::Call(Func::Abs, _) => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.is_non_smooth(),
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.is_non_smooth() || b.is_non_smooth()
            }
        }
    }

    /// Evaluates a variable-free subtree; domain problems come back as NaN.
    pub(crate) fn eval_const(&self) -> f64 {
        self.value(0.0).unwrap_or(f64::NAN)
    }

    fn value(&self, x: f64) -> Result<f64> {
        Ok(match self {
            Node::Const(c) => *c,
            Node::Var => x,
            Node::Neg(a) => -a.value(x)?,
            Node::Add(a, b) => a.value(x)? + b.value(x)?,
            Node::Sub(a, b) => a.value(x)? - b.value(x)?,
            Node::Mul(a, b) => a.value(x)? * b.value(x)?,
            Node::Div(a, b) => {
                let num = a.value(x)?;
                let den = b.value(x)?;
                if den == 0.0 {
                    return Err(Error::Domain {
                        x,
                        reason: "division by zero",
                    });
                }
                num / den
            }
            Node::Pow(a, c) => pow_value(a.value(x)?, *c, x)?,
            Node::Call(f, a) => {
                let u = a.value(x)?;
                match f {
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(Error::Domain {
                                x,
                                reason: "log of non-positive argument",
                            });
                        }
                        u.ln()
                    }
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Abs => u.abs(),
                }
            }
        })
    }

    fn jet(&self, x: f64) -> Result<Jet3> {
        Ok(match self {
            Node::Const(c) => Jet3::constant(*c),
            Node::Var => Jet3::variable(x),
            Node::Neg(a) => -a.jet(x)?,
            Node::Add(a, b) => a.jet(x)? + b.jet(x)?,
            Node::Sub(a, b) => a.jet(x)? - b.jet(x)?,
            Node::Mul(a, b) => a.jet(x)? * b.jet(x)?,
            Node::Div(a, b) => {
                let den = b.jet(x)?;
                if den.d0 == 0.0 {
                    return Err(Error::Domain {
                        x,
                        reason: "division by zero",
                    });
                }
                a.jet(x)? * den.recip()
            }
            Node::Pow(a, c) => {
                let u = a.jet(x)?;
                u.compose(pow_derivatives(u.d0, *c, x)?)
            }
            Node::Call(f, a) => {
                let u = a.jet(x)?;
                match f {
                    Func::Exp => u.exp(),
                    Func::Log => {
                        if u.d0 <= 0.0 {
                            return Err(Error::Domain {
                                x,
                                reason: "log of non-positive argument",
                            });
                        }
                        u.ln()
                    }
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Abs => {
                        if u.d0.abs() <= KINK_TOLERANCE {
                            return Err(Error::Domain {
                                x,
                                reason: "abs evaluated at its kink",
                            });
                        }
                        u.abs()
                    }
                }
            }
        })
    }
}

fn is_integer(c: f64) -> bool {
    c.fract() == 0.0 && c.abs() < i32::MAX as f64
}

fn pow_value(u: f64, c: f64, x: f64) -> Result<f64> {
    if is_integer(c) {
        if u == 0.0 && c < 0.0 {
            return Err(Error::Domain {
                x,
                reason: "division by zero",
            });
        }
        return Ok(u.powi(c as i32));
    }
    if u < 0.0 || (u == 0.0 && c < 0.0) {
        return Err(Error::Domain {
            x,
            reason: "pow of non-positive base with non-integer exponent",
        });
    }
    Ok(u.powf(c))
}

/// `[u^c, c u^(c-1), c(c-1) u^(c-2), c(c-1)(c-2) u^(c-3)]`.
fn pow_derivatives(u: f64, c: f64, x: f64) -> Result<[f64; 4]> {
    let integer = is_integer(c);
    if !integer && u <= 0.0 {
        return Err(Error::Domain {
            x,
            reason: "pow of non-positive base with non-integer exponent",
        });
    }
    let mut out = [0.0; 4];
    let mut coef = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        if k > 0 {
            coef *= c - (k as f64 - 1.0);
        }
        if coef == 0.0 {
            // falling factorial vanished: all further derivatives are zero
            break;
        }
        let e = c - k as f64;
        let base = if integer {
            if u == 0.0 && e < 0.0 {
                return Err(Error::Domain {
                    x,
                    reason: "division by zero",
                });
            }
            u.powi(e as i32)
        } else {
            u.powf(e)
        };
        *slot = coef * base;
    }
    Ok(out)
}

/// A parsed single-variable function `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprFunction {
    source: String,
    root: Node,
    var: char,
}

/// Alias used where the tree itself, rather than the function, is meant.
pub type ExprAst = ExprFunction;

impl ExprFunction {
    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let (root, var) = parser::parse(text)?;
        Ok(Self {
            source: text.to_string(),
            root,
            var,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// The variable letter used in the source (`x` unless `t` appears).
    pub fn variable(&self) -> char {
        self.var
    }

    pub fn is_smooth(&self) -> bool {
        !self.root.is_non_smooth()
    }

    /// Value-only evaluation. Always permitted at `abs` kinks.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.root.value(x)
    }

    /// Exact `(f, f', f'', f''')` at `x`.
    pub fn eval_jet3(&self, x: f64) -> Result<Jet3> {
        let j = self.root.jet(x)?;
        if !j.is_finite() {
            return Err(Error::Domain {
                x,
                reason: "non-finite derivative",
            });
        }
        Ok(j)
    }

    pub fn third_derivative(&self, x: f64) -> Result<f64> {
        Ok(self.eval_jet3(x)?.d3)
    }
}

impl fmt::Display for ExprFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var => f.write_str("x"),
            Node::Neg(a) => write!(f, "-({a})"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "({a} * {b})"),
            Node::Div(a, b) => write!(f, "({a} / {b})"),
            Node::Pow(a, c) => write!(f, "pow({a}, {c:?})"),
            Node::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

impl std::str::FromStr for ExprFunction {
    type Err = ParseError;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Self::parse(s)
    }
}
