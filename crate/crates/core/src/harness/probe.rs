//! Growth of an empirical constant along a family of grids.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::GridSpec;
use crate::numeric::log_log_slope;

use super::cases::{run_case, CaseReport, InequalityCase};
use super::suite::Suite;
use super::{drift, STABILITY_TOLERANCE};

/// Which parameter a probe varies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axis", rename_all = "snake_case")]
pub enum ProbeAxis {
    /// Half-widths `R` at fixed spacing `h`.
    Domain { radii: Vec<f64>, spacing: f64 },
    /// Resolutions `N` on the box of half-width `R`; the slope is taken
    /// against `1/h`.
    Refinement { half_width: f64, cells: Vec<usize> },
}

impl ProbeAxis {
    fn grids(&self, dim: usize) -> Result<Vec<GridSpec>> {
        match self {
            Self::Domain { radii, spacing } => {
                if !(*spacing > 0.0) {
                    return Err(Error::InvalidParameter(format!("spacing {spacing} must be positive")));
                }
                radii
                    .iter()
                    .map(|r| {
                        let cells = ((2.0 * r / spacing / 2.0).round() as usize).max(1) * 2;
                        GridSpec::new(dim, cells, *r)
                    })
                    .collect()
            }
            Self::Refinement { half_width, cells } => cells.iter().map(|c| GridSpec::new(dim, *c, *half_width)).collect(),
        }
    }

    fn abscissa(&self, grid: &GridSpec) -> f64 {
        match self {
            Self::Domain { .. } => grid.half_width(),
            Self::Refinement { .. } => 1.0 / grid.spacing(),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            Self::Domain { radii, .. } => radii.clone(),
            Self::Refinement { cells, .. } => cells.iter().map(|&c| c as f64).collect(),
        }
    }
}

/// Checks that a sweep has at least `min` strictly increasing geometric steps.
fn check_geometric(values: &[f64], min: usize) -> Result<()> {
    if values.len() < min {
        return Err(Error::InvalidParameter(format!("need at least {min} sweep points, got {}", values.len())));
    }
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::InvalidParameter("sweep values must be positive".into()));
    }
    let ratios: Vec<f64> = values.windows(2).map(|w| w[1] / w[0]).collect();
    if ratios.iter().any(|r| *r <= 1.0) {
        return Err(Error::InvalidParameter("sweep values must increase".into()));
    }
    let first = ratios[0];
    if ratios.iter().any(|r| (r / first - 1.0).abs() > 1e-6) {
        return Err(Error::InvalidParameter("sweep values must form a geometric sequence".into()));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub case: InequalityCase,
    pub axis: ProbeAxis,
    /// `(R or 1/h, aggregate c_emp)`.
    pub series: Vec<(f64, f64)>,
    /// Least-squares slope of `log c_emp`.
    pub exponent: f64,
    pub reports: Vec<CaseReport>,
}

/// Fits the growth exponent of `case` along `axis`; needs four or more
/// geometric points.
pub fn divergence_probe(case: &InequalityCase, suite: &Suite, axis: &ProbeAxis) -> Result<ProbeReport> {
    check_geometric(&axis.values(), 4)?;
    let grids = axis.grids(suite.dim)?;
    let reports = grids.iter().map(|g| run_case(case, suite, g)).collect::<Result<Vec<_>>>()?;
    let series: Vec<(f64, f64)> = grids.iter().zip(&reports).map(|(g, r)| (axis.abscissa(g), r.aggregate.c_emp)).collect();
    if series.iter().any(|s| !(s.1 > 0.0 && s.1.is_finite())) {
        return Err(Error::InvalidParameter("degenerate series: a constant is zero or not finite".into()));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = series.iter().copied().unzip();
    Ok(ProbeReport { case: case.clone(), axis: axis.clone(), exponent: log_log_slope(&xs, &ys), series, reports })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    /// `(h, aggregate c_emp)`, coarsest first.
    pub series: Vec<(f64, f64)>,
    /// Largest relative change between consecutive resolutions.
    pub drift: f64,
    /// Largest relative change of any single member's constant.
    pub member_drift: f64,
    pub stable: bool,
    pub reports: Vec<CaseReport>,
}

/// Runs `case` at each resolution on the box of half-width `half_width`.
pub fn refinement_study(case: &InequalityCase, suite: &Suite, half_width: f64, cells: &[usize]) -> Result<RefinementStudy> {
    if cells.len() < 2 {
        return Err(Error::InvalidParameter("refinement needs at least two resolutions".into()));
    }
    let reports =
        cells.iter().map(|&c| run_case(case, suite, &GridSpec::new(suite.dim, c, half_width)?)).collect::<Result<Vec<_>>>()?;
    let series: Vec<(f64, f64)> = reports.iter().map(|r| (2.0 * r.half_width / r.cells as f64, r.aggregate.c_emp)).collect();
    let agg: Vec<f64> = series.iter().map(|s| s.1).collect();
    let d = drift(&agg);
    let members = reports[0].members.len();
    let member_drift = (0..members)
        .map(|m| {
            let s: Vec<f64> = reports.iter().filter_map(|r| r.members.get(m)).map(|x| x.report.c_emp).collect();
            drift(&s)
        })
        .fold(0.0, f64::max);
    Ok(RefinementStudy { series, drift: d, member_drift, stable: d <= STABILITY_TOLERANCE, reports })
}
