//! Weighted Sobolev ratios along a power-weight family.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{lp_norm, GridSpec, ScalarField};
use crate::geometry::CubeFamily;
use crate::lorentz::conjugate;
use crate::maximal::{cube_maximal, iterated_maximal, MaximalGauge};
use crate::numeric::log_log_slope;
use crate::singular::{maximal_rough, SphereFunction};
use crate::weights::{apq_constant, WeightSpec};

use super::suite::BumpParams;

/// Both sides of `‖w Tf‖_{p*} ≤ C ‖w ∇f‖_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevRatio {
    pub lhs: f64,
    pub rhs: f64,
}

impl SobolevRatio {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

fn sobolev_exponent(grid: &GridSpec, p: f64) -> Result<f64> {
    let n = grid.dim() as f64;
    if !(p >= 1.0 && p < n) {
        return Err(Error::InvalidParameter(format!("Sobolev exponent needs 1 <= p < n, got {p}")));
    }
    Ok(n * p / (n - p))
}

/// `‖w tf‖_{p*}` and `‖w grad‖_p`, with `grad = |∇f|`.
pub fn sobolev_ratio(tf: &ScalarField, grad: &ScalarField, w: &ScalarField, p: f64) -> Result<SobolevRatio> {
    let ps = sobolev_exponent(tf.grid(), p)?;
    Ok(SobolevRatio { lhs: lp_norm(&tf.mul(w)?, ps, None)?, rhs: lp_norm(&grad.mul(w)?, p, None)? })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevOperator {
    Identity,
    Maximal,
    IteratedMaximal,
    MaximalRough,
}

impl SobolevOperator {
    pub const ALL: [Self; 4] = [Self::Identity, Self::Maximal, Self::IteratedMaximal, Self::MaximalRough];
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevPoint {
    /// Power of the weight `|x|^{-a}`.
    pub a: f64,
    /// `[w]_{A_{p,p*}}`.
    pub weight_constant: f64,
    /// Largest `‖wTf‖_{p*}/‖w∇f‖_p` over the bumps.
    pub raw: f64,
    /// `raw / [w]^{1/n'}`.
    pub normalized: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SobolevTrend {
    pub operator: SobolevOperator,
    pub points: Vec<SobolevPoint>,
    /// Log-log slope of `raw` against `[w]_{A_{p,p*}}` along the family.
    pub exponent: Option<f64>,
    /// Whether `exponent` stays at or below `1/n'` (with 0.1 slack).
    pub consistent: Option<bool>,
}

/// Ratios for `T ∈ {Id, M, M², T★_Ω}` along the power weights `|x|^{-a}`.
/// `T★_Ω` is skipped when no kernel is given.
pub fn sobolev_suite(
    bumps: &[BumpParams],
    omega: Option<&SphereFunction>,
    grid: &GridSpec,
    p: f64,
    a_values: &[f64],
) -> Result<Vec<SobolevTrend>> {
    sobolev_exponent(grid, p)?;
    if bumps.is_empty() || a_values.is_empty() {
        return Err(Error::InvalidParameter("Sobolev suite needs bumps and weight powers".into()));
    }
    let inv_np = 1.0 / conjugate(grid.dim() as f64);
    let family = CubeFamily::standard(grid);
    let ps = sobolev_exponent(grid, p)?;
    let weights = a_values
        .iter()
        .map(|&a| {
            let w = WeightSpec::Power { a, center: vec![] }.build(grid)?;
            let c = apq_constant(&w, p, ps, &CubeFamily::for_weights(grid))?.value;
            Ok((a, w, c))
        })
        .collect::<Result<Vec<_>>>()?;
    let ops: Vec<SobolevOperator> =
        SobolevOperator::ALL.into_iter().filter(|o| *o != SobolevOperator::MaximalRough || omega.is_some()).collect();
    let mut raw = vec![vec![0.0f64; weights.len()]; ops.len()];
    for b in bumps {
        let f = b.field(grid)?;
        let grad = b.gradient_magnitude(grid)?;
        for (i, op) in ops.iter().enumerate() {
            let tf = match op {
                SobolevOperator::Identity => f.abs(),
                SobolevOperator::Maximal => cube_maximal(&f, &MaximalGauge::mean(), &family)?,
                SobolevOperator::IteratedMaximal => iterated_maximal(&f, 2, &family)?,
                SobolevOperator::MaximalRough => maximal_rough(&f, omega.expect("filtered above"))?,
            };
            for (j, (_, w, _)) in weights.iter().enumerate() {
                raw[i][j] = raw[i][j].max(sobolev_ratio(&tf, &grad, w, p)?.ratio());
            }
        }
    }
    Ok(ops
        .into_iter()
        .zip(raw)
        .map(|(operator, row)| {
            let points: Vec<SobolevPoint> = weights
                .iter()
                .zip(&row)
                .map(|((a, _, c), r)| SobolevPoint { a: *a, weight_constant: *c, raw: *r, normalized: r / c.powf(inv_np) })
                .collect();
            let xs: Vec<f64> = points.iter().map(|q| q.weight_constant).collect();
            let ys: Vec<f64> = points.iter().map(|q| q.raw).collect();
            let spread = xs.iter().cloned().fold(0.0, f64::max) / xs.iter().cloned().fold(f64::INFINITY, f64::min);
            let exponent = (points.len() >= 2 && spread > 1.0 + 1e-9).then(|| log_log_slope(&xs, &ys));
            SobolevTrend { operator, consistent: exponent.map(|e| e <= inv_np + 0.1), exponent, points }
        })
        .collect())
}
