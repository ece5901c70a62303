//! η-maps and sampled checks of invexity, preinvexity and prequasiinvexity.
//!
//! The checks are grid samplers: a failure comes with a concrete witness
//! `(u, v, t)`, a pass only means no violation was found on the grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::ExprFunction;

pub const DEFAULT_GRID: usize = 65;
/// Relative slack allowed before a sampled inequality counts as violated.
pub const HYPOTHESIS_REL_TOL: f64 = 1e-9;
/// Absolute slack for set-membership of path points.
pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// One affine piece of a tabulated η: on `u ∈ u_range`, `v ∈ v_range`,
/// `η(v, u) = v_coef·v + u_coef·u + offset`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtaPiece {
    pub u_range: [f64; 2],
    pub v_range: [f64; 2],
    pub v_coef: f64,
    pub u_coef: f64,
    #[serde(default)]
    pub offset: f64,
}

impl EtaPiece {
    fn contains(&self, v: f64, u: f64) -> bool {
        self.u_range[0] <= u && u <= self.u_range[1] && self.v_range[0] <= v && v <= self.v_range[1]
    }

    fn interiors_overlap(&self, other: &EtaPiece) -> bool {
        let open_overlap = |a: [f64; 2], b: [f64; 2]| a[0].max(b[0]) < a[1].min(b[1]);
        open_overlap(self.u_range, other.u_range) && open_overlap(self.v_range, other.v_range)
    }
}

/// The bifunction η(v, u) that selects the path `u + t·η(v, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EtaMap {
    /// `η(v, u) = v − u`; invexity reduces to convexity.
    Difference,
    /// `η(v, u) = λ·(v − u)`.
    Scaled {
        lambda: f64,
    },
    /// `v − u` when `u` and `v` share a sign (zero counts as either sign),
    /// `u − v` otherwise.
    PaperPiecewise,
    Table {
        pieces: Vec<EtaPiece>,
    },
}

impl EtaMap {
    pub fn scaled(lambda: f64) -> Result<Self> {
        let m = EtaMap::Scaled { lambda };
        m.validate()?;
        Ok(m)
    }

    pub fn table(pieces: Vec<EtaPiece>) -> Result<Self> {
        let m = EtaMap::Table { pieces };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            EtaMap::Scaled { lambda } if !lambda.is_finite() || *lambda == 0.0 => Err(
                Error::InvalidEta(format!("scale must be finite and nonzero, got {lambda}")),
            ),
            EtaMap::Table { pieces } => {
                if pieces.is_empty() {
                    return Err(Error::InvalidEta("table has no pieces".into()));
                }
                for (i, p) in pieces.iter().enumerate() {
                    let ok = |r: [f64; 2]| r[0].is_finite() && r[1].is_finite() && r[0] <= r[1];
                    if !ok(p.u_range) || !ok(p.v_range) {
                        return Err(Error::InvalidEta(format!(
                            "piece {i} has a malformed range"
                        )));
                    }
                    if ![p.v_coef, p.u_coef, p.offset].iter().all(|c| c.is_finite()) {
                        return Err(Error::InvalidEta(format!(
                            "piece {i} has non-finite coefficients"
                        )));
                    }
                    if let Some(j) = pieces[..i].iter().position(|q| q.interiors_overlap(p)) {
                        return Err(Error::InvalidEta(format!("pieces {j} and {i} overlap")));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// η(v, u).
    pub fn eval(&self, v: f64, u: f64) -> Result<f64> {
        Ok(match self {
            EtaMap::Difference => v - u,
            EtaMap::Scaled { lambda } => lambda * (v - u),
            EtaMap::PaperPiecewise => {
                let same_sign = (v <= 0.0 && u <= 0.0) || (v >= 0.0 && u >= 0.0);
                if same_sign {
                    v - u
                } else {
                    u - v
                }
            }
            EtaMap::Table { pieces } => {
                let p = pieces
                    .iter()
                    .find(|p| p.contains(v, u))
                    .ok_or(Error::EtaOutsideTable { v, u })?;
                p.v_coef * v + p.u_coef * u + p.offset
            }
        })
    }

    /// `u + t·η(v, u)`.
    pub fn path_point(&self, u: f64, v: f64, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "path parameter {t} outside [0, 1]"
            )));
        }
        Ok(u + t * self.eval(v, u)?)
    }
}

/// One-dimensional candidate set `[lo, hi]`. When `bounding_box` is set,
/// grid samples still come from `[lo, hi]` but path points are tested for
/// membership against the box (a stand-in for an unbounded set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounding_box: Option<[f64; 2]>,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidDomain { lo, hi });
        }
        Ok(Self {
            lo,
            hi,
            bounding_box: None,
        })
    }

    /// Sampling range `[lo, hi]` inside an unbounded set approximated by `[box_lo, box_hi]`.
    pub fn unbounded(lo: f64, hi: f64, box_lo: f64, box_hi: f64) -> Result<Self> {
        let mut d = Self::new(lo, hi)?;
        if !(box_lo <= lo && hi <= box_hi) {
            return Err(Error::InvalidDomain {
                lo: box_lo,
                hi: box_hi,
            });
        }
        d.bounding_box = Some([box_lo, box_hi]);
        Ok(d)
    }

    fn membership_bounds(&self) -> (f64, f64) {
        match self.bounding_box {
            Some([a, b]) => (a, b),
            None => (self.lo, self.hi),
        }
    }

    /// `n` equispaced points including both ends.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        uniform_grid(self.lo, self.hi, n)
    }
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let last = (n - 1) as f64;
    (0..n)
        .map(|i| {
            if i == n - 1 {
                hi
            } else {
                lo + (hi - lo) * (i as f64 / last)
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub u: f64,
    pub v: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub passed: bool,
    pub checked: usize,
    /// Largest normalized violation seen; negative when every sample had room.
    pub worst_slack: f64,
    pub tolerance: f64,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hypothesis {
    InvexSet,
    Preinvex,
    Prequasiinvex,
}

#[derive(Clone, Copy)]
struct Cell {
    slack: f64,
    witness: Witness,
}

fn better(a: Cell, b: Cell) -> Cell {
    // larger slack wins; ties go to the lexicographically smallest triple
    let key = |c: &Cell| (c.witness.u, c.witness.v, c.witness.t);
    if b.slack > a.slack || (b.slack == a.slack && key(&b) < key(&a)) {
        b
    } else {
        a
    }
}

fn validate_grid(grid_n: usize) -> Result<()> {
    if grid_n < 2 {
        return Err(Error::InvalidArgument(format!(
            "grid_n must be at least 2, got {grid_n}"
        )));
    }
    Ok(())
}

/// Runs `slack(i, j, t)` over grid indices `u = xs[i]`, `v = xs[j]` and
/// reduces deterministically.
fn sweep<S>(xs: &[f64], tolerance: f64, slack: S) -> Result<HypothesisReport>
where
    S: Fn(usize, usize, f64) -> Result<f64> + Sync,
{
    let grid_n = xs.len();
    let ts = uniform_grid(0.0, 1.0, grid_n);
    // one row per u; rows are reduced in index order so the result does not
    // depend on scheduling
    let rows: Vec<Result<Cell>> = (0..grid_n)
        .into_par_iter()
        .map(|i| {
            let u = xs[i];
            let mut best = Cell {
                slack: f64::NEG_INFINITY,
                witness: Witness { u, v: u, t: 0.0 },
            };
            for (j, &v) in xs.iter().enumerate() {
                for &t in &ts {
                    let s = slack(i, j, t)?;
                    best = better(
                        best,
                        Cell {
                            slack: s,
                            witness: Witness { u, v, t },
                        },
                    );
                }
            }
            Ok(best)
        })
        .collect();
    let mut best: Option<Cell> = None;
    for row in rows {
        let row = row?;
        best = Some(match best {
            None => row,
            Some(b) => better(b, row),
        });
    }
    let best = best.expect("grid has at least two points");
    let passed = best.slack <= tolerance;
    Ok(HypothesisReport {
        passed,
        checked: grid_n * grid_n * grid_n,
        worst_slack: best.slack,
        tolerance,
        witness: (!passed).then_some(best.witness),
    })
}

/// Grid points and `g` evaluated at each of them.
fn tabulate<G>(g: &G, dom: &Domain, grid_n: usize) -> Result<(Vec<f64>, Vec<f64>)>
where
    G: Fn(f64) -> Result<f64>,
{
    validate_grid(grid_n)?;
    let xs = dom.grid(grid_n);
    let gx = xs.iter().map(|&x| g(x)).collect::<Result<Vec<_>>>()?;
    Ok((xs, gx))
}

/// Every path point `u + t·η(v,u)` for grid `u, v, t` lies in the domain.
pub fn check_invex_set(map: &EtaMap, dom: &Domain, grid_n: usize) -> Result<HypothesisReport> {
    validate_grid(grid_n)?;
    let (lo, hi) = dom.membership_bounds();
    let xs = dom.grid(grid_n);
    sweep(&xs, MEMBERSHIP_TOL, |i, j, t| {
        let p = map.path_point(xs[i], xs[j], t)?;
        Ok((lo - p).max(p - hi))
    })
}

/// Sampled preinvexity of an arbitrary scalar function `g`.
pub fn check_preinvex_with<G>(
    g: G,
    map: &EtaMap,
    dom: &Domain,
    grid_n: usize,
) -> Result<HypothesisReport>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let (xs, gx) = tabulate(&g, dom, grid_n)?;
    sweep(&xs, HYPOTHESIS_REL_TOL, |i, j, t| {
        let (gu, gv) = (gx[i], gx[j]);
        let gp = g(map.path_point(xs[i], xs[j], t)?)?;
        let scale = 1f64.max(gu.abs()).max(gv.abs()).max(gp.abs());
        Ok((gp - ((1.0 - t) * gu + t * gv)) / scale)
    })
}

/// Sampled prequasiinvexity of an arbitrary scalar function `g`.
pub fn check_prequasiinvex_with<G>(
    g: G,
    map: &EtaMap,
    dom: &Domain,
    grid_n: usize,
) -> Result<HypothesisReport>
where
    G: Fn(f64) -> Result<f64> + Sync,
{
    let (xs, gx) = tabulate(&g, dom, grid_n)?;
    sweep(&xs, HYPOTHESIS_REL_TOL, |i, j, t| {
        let (gu, gv) = (gx[i], gx[j]);
        let gp = g(map.path_point(xs[i], xs[j], t)?)?;
        let scale = 1f64.max(gu.abs()).max(gv.abs()).max(gp.abs());
        Ok((gp - gu.max(gv)) / scale)
    })
}

pub fn check_preinvex(
    f: &ExprFunction,
    map: &EtaMap,
    dom: &Domain,
    grid_n: usize,
) -> Result<HypothesisReport> {
    check_preinvex_with(|x| f.eval(x), map, dom, grid_n)
}

pub fn check_prequasiinvex(
    f: &ExprFunction,
    map: &EtaMap,
    dom: &Domain,
    grid_n: usize,
) -> Result<HypothesisReport> {
    check_prequasiinvex_with(|x| f.eval(x), map, dom, grid_n)
}

/// `|f'''|^q`, the quantity every bound's hypothesis is stated for.
pub fn abs_third_derivative_power(
    f: &ExprFunction,
    q: f64,
) -> impl Fn(f64) -> Result<f64> + Sync + '_ {
    move |x| Ok(f.third_derivative(x)?.abs().powf(q))
}
