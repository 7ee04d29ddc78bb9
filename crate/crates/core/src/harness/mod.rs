//! Empirical constants for the pointwise and norm inequalities, with
//! refinement and domain sweeps.
//!
//! An inequality `L ≤ C R` is measured by `c_emp = max L/R` over the grid
//! points where `R` is not negligible (`R ≥ θ max R`).

pub mod cases;
pub mod endpoint;
pub mod identity;
pub mod poincare;
pub mod probe;
pub mod sobolev;
pub mod suite;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Point, ScalarField};
use crate::lorentz::conjugate;

pub use cases::{explore_gauge, run_case, CaseId, CaseParams, CaseReport, ExploreReport, InequalityCase, MemberReport};
pub use suite::{BumpParams, Suite};

/// Default relative threshold below which the right-hand side is masked out.
pub const DEFAULT_THETA: f64 = 1e-6;

/// Largest relative change of `c_emp` between resolutions that counts as stable.
pub const STABILITY_TOLERANCE: f64 = 0.2;

/// Exponents of an inequality together with their derived companions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentSet {
    pub n: usize,
    pub p: f64,
    pub q: Option<f64>,
    pub alpha: f64,
}

impl ExponentSet {
    pub fn new(n: usize, p: f64, q: Option<f64>, alpha: f64) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::UnsupportedDimension(n));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("exponent p = {p} must be at least 1")));
        }
        if let Some(q) = q {
            if !(q > 0.0) {
                return Err(Error::InvalidParameter(format!("exponent q = {q} must be positive")));
            }
        }
        if !(alpha > 0.0 && alpha < n as f64) {
            return Err(Error::InvalidParameter(format!("order {alpha} outside (0, {n})")));
        }
        Ok(Self { n, p, q, alpha })
    }

    pub fn p_prime(&self) -> f64 {
        conjugate(self.p)
    }

    pub fn n_prime(&self) -> f64 {
        conjugate(self.n as f64)
    }

    /// `np/(n-p)`, defined for `p < n`.
    pub fn p_star(&self) -> Option<f64> {
        let n = self.n as f64;
        (self.p < n).then(|| n * self.p / (n - self.p))
    }
}

/// One measured constant, with optional sweeps attached.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalConstantReport {
    pub c_emp: f64,
    /// Grid point attaining `c_emp`; absent for norm inequalities.
    pub argmax: Option<Point>,
    /// Number of points that passed the mask.
    pub masked_points: usize,
    /// `(h, c_emp)` pairs.
    pub refinement: Vec<(f64, f64)>,
    /// `(R, c_emp)` pairs.
    pub domain: Vec<(f64, f64)>,
    pub growth_exponent: Option<f64>,
}

impl EmpiricalConstantReport {
    /// A constant measured as a single ratio of two numbers.
    pub fn scalar(lhs: f64, rhs: f64) -> Result<Self> {
        if !(rhs > 0.0) {
            return Err(Error::EmptyMask);
        }
        Ok(Self {
            c_emp: lhs / rhs,
            argmax: None,
            masked_points: 1,
            refinement: Vec::new(),
            domain: Vec::new(),
            growth_exponent: None,
        })
    }
}

/// `max |lhs| / rhs` over the points with `rhs ≥ θ max rhs`.
pub fn empirical_constant(lhs: &ScalarField, rhs: &ScalarField, theta: f64) -> Result<EmpiricalConstantReport> {
    if lhs.grid() != rhs.grid() {
        return Err(Error::GridMismatch);
    }
    if !(0.0..1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("mask threshold {theta} outside [0, 1)")));
    }
    let top = rhs.values().iter().cloned().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Err(Error::EmptyMask);
    }
    let cut = theta * top;
    let mut best = (0.0, None);
    let mut kept = 0;
    for (k, (l, r)) in lhs.values().iter().zip(rhs.values()).enumerate() {
        if *r > 0.0 && *r >= cut {
            kept += 1;
            let ratio = l.abs() / r;
            if best.1.is_none() || ratio > best.0 {
                best = (ratio, Some(k));
            }
        }
    }
    Ok(EmpiricalConstantReport {
        c_emp: best.0,
        argmax: best.1.map(|k| lhs.grid().center(k)),
        masked_points: kept,
        refinement: Vec::new(),
        domain: Vec::new(),
        growth_exponent: None,
    })
}

/// Largest relative change between consecutive entries of a series.
pub fn drift(series: &[f64]) -> f64 {
    series.windows(2).map(|w| (w[1] - w[0]).abs() / w[0].abs().max(w[1].abs()).max(f64::MIN_POSITIVE)).fold(0.0, f64::max)
}

/// `max/min` of a set of positive constants.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}
