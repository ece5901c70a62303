//! Corrected-trapezoid quadrature over η-paths with third-derivative error
//! bounds for preinvex and prequasiinvex `|f'''|^q`.
//!
//! * [`expr`]: function language and exact order-3 jets.
//! * [`invex`]: η-maps and sampled hypothesis checks.
//! * [`identity`]: the remainder identity and its two-sided verification.
//! * [`bounds`]: the theorem bounds and their moment constants.
//! * [`quadrature`]: certified composite integration.
//! * [`harness`]: seeded campaigns, tournaments and sharpness search.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod expr;
pub mod harness;
pub mod identity;
pub mod invex;
pub mod oracle;
pub mod quadrature;
pub mod special;

pub use error::{Error, ParseError, Result};
pub use expr::{ExprFunction, Jet3};

/// Version string embedded in reports.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));
