//! Weight constants over cube families and two-weight sufficient conditions
//! for the Riesz potential.
//!
//! Averages are over cubes of the family with respect to `dx/|Q|`. Apart
//! from `A_1`, the constants need every cube inside the box, since a weight
//! is only known there.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{norm, read_grid_file, sub, GridSpec, ScalarField};
use crate::geometry::{Cube, CubeFamily, Placement, Scale};
use crate::lorentz::{associate, bp_classify, conjugate, orlicz_uniform, BClass, BClassReport, Verdict, YoungFunction};
use crate::maximal::{corner_gather, corner_reduce, spread_max, Reduce};
use crate::numeric::{fft_convolve, log_log_slope, CompensatedSum, Shape};
use crate::potential::riesz_kernel;

/// Log-log slope beyond which the end of a per-scale series counts as divergent.
const TREND_THRESHOLD: f64 = 0.1;

/// Supremum of a cube functional over a family, with the cube attaining it
/// and the supremum at each scale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightConstantReport {
    pub value: f64,
    pub witness: Option<Cube>,
    /// Cube sides (in cells), finest first.
    pub scales: Vec<usize>,
    pub cube_count: usize,
    /// Supremum at each scale, aligned with `scales`.
    pub series: Vec<f64>,
    /// Non-finite values, or a per-scale series still growing at its finest
    /// end (as cubes shrink) or its coarsest end (as cubes grow). Scales with
    /// a single cube are left out of the trend.
    pub divergent: bool,
}

impl WeightConstantReport {
    fn from_scales(family: &CubeFamily, per_scale: Vec<(f64, Option<Cube>)>) -> Self {
        let scales: Vec<usize> = family.scales().iter().map(|s| s.side).collect();
        let series: Vec<f64> = per_scale.iter().map(|(v, _)| *v).collect();
        let (value, witness) =
            per_scale
                .into_iter()
                .fold((f64::NEG_INFINITY, None), |best, cur| if cur.0 > best.0 || cur.0.is_nan() { cur } else { best });
        let trend: Vec<usize> = family.scales().iter().take_while(|s| s.count > 1).map(|s| s.side).collect();
        let divergent = !value.is_finite() || series_diverges(&trend, &series[..trend.len()]);
        Self { value, witness, scales, cube_count: family.len(), series, divergent }
    }
}

/// Trend test on the three finest and three coarsest scales.
pub fn series_diverges(sides: &[usize], series: &[f64]) -> bool {
    let pts: Vec<(f64, f64)> =
        sides.iter().zip(series).filter(|(_, v)| v.is_finite() && **v > 0.0).map(|(s, v)| (*s as f64, *v)).collect();
    if pts.len() < 3 {
        return false;
    }
    let slope = |w: &[(f64, f64)]| {
        let xs: Vec<f64> = w.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = w.iter().map(|p| p.1).collect();
        log_log_slope(&xs, &ys)
    };
    slope(&pts[..3]) < -TREND_THRESHOLD || slope(&pts[pts.len() - 3..]) > TREND_THRESHOLD
}

fn check_weight(w: &ScalarField) -> Result<()> {
    match w.values().iter().position(|v| *v <= 0.0) {
        Some(index) => Err(Error::NonPositiveWeight { index, value: w.values()[index] }),
        None => Ok(()),
    }
}

fn check_family(w: &ScalarField, family: &CubeFamily, inside: bool) -> Result<()> {
    if w.grid() != family.grid() {
        return Err(Error::GridMismatch);
    }
    if inside && family.placement() != Placement::Inside {
        return Err(Error::InvalidParameter("weight constants need a family of cubes inside the box".into()));
    }
    Ok(())
}

fn corner_cube(dim: usize, scale: &Scale, flat: usize) -> Cube {
    let a = Shape::cube(dim, scale.count).unflat(flat);
    let mut lo = [0i64; 3];
    for ax in 0..dim {
        lo[ax] = scale.corner(a[ax]);
    }
    Cube::new(dim, lo, scale.side)
}

fn argmax(dim: usize, scale: &Scale, values: &[f64]) -> (f64, Option<Cube>) {
    let mut best = (f64::NEG_INFINITY, None);
    for (k, v) in values.iter().enumerate() {
        if *v > best.0 || (v.is_nan() && best.1.is_none()) {
            best = (*v, Some(k));
        }
    }
    (best.0, best.1.map(|k| corner_cube(dim, scale, k)))
}

/// Per-scale averages of `values` over the cubes of the scale (`dx/|Q|`).
fn averages(values: &[f64], grid: &GridSpec, scale: &Scale) -> Vec<f64> {
    let vol = (scale.side as f64).powi(grid.dim() as i32);
    corner_reduce(values, grid.dim(), grid.cells(), scale, Reduce::Sum).into_iter().map(|s| s / vol).collect()
}

fn powered(w: &ScalarField, e: f64) -> Vec<f64> {
    w.values().iter().map(|v| v.powf(e)).collect()
}

/// `[w]_{A_1} = sup_Q ⨍_Q w / min_Q w`, which is `max_x Mw(x)/w(x)` over the family.
pub fn a1_constant(w: &ScalarField, family: &CubeFamily) -> Result<WeightConstantReport> {
    check_weight(w)?;
    check_family(w, family, false)?;
    let g = *w.grid();
    let per_scale = family
        .scales()
        .iter()
        .map(|scale| {
            let avg = averages(w.values(), &g, scale);
            let min = corner_reduce(w.values(), g.dim(), g.cells(), scale, Reduce::Min);
            let ratio: Vec<f64> = avg.iter().zip(&min).map(|(a, m)| a / m).collect();
            argmax(g.dim(), scale, &ratio)
        })
        .collect();
    Ok(WeightConstantReport::from_scales(family, per_scale))
}

/// `[w]_{A_p} = sup_Q (⨍w)(⨍w^{1-p'})^{p-1}`.
pub fn ap_constant(w: &ScalarField, p: f64, family: &CubeFamily) -> Result<WeightConstantReport> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("A_p needs 1 < p < ∞, got {p}")));
    }
    check_weight(w)?;
    check_family(w, family, true)?;
    let g = *w.grid();
    let dual = powered(w, 1.0 - conjugate(p));
    let per_scale = family
        .scales()
        .iter()
        .map(|scale| {
            let a = averages(w.values(), &g, scale);
            let b = averages(&dual, &g, scale);
            let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y.powf(p - 1.0)).collect();
            argmax(g.dim(), scale, &prod)
        })
        .collect();
    Ok(WeightConstantReport::from_scales(family, per_scale))
}

/// `[w]_{A_{p,q}} = sup_Q (⨍w^q)(⨍w^{-p'})^{q/p'}`.
pub fn apq_constant(w: &ScalarField, p: f64, q: f64, family: &CubeFamily) -> Result<WeightConstantReport> {
    if !(p > 1.0 && p.is_finite() && q >= p && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("A_(p,q) needs 1 < p <= q < ∞, got ({p}, {q})")));
    }
    check_weight(w)?;
    check_family(w, family, true)?;
    let g = *w.grid();
    let pp = conjugate(p);
    let up = powered(w, q);
    let down = powered(w, -pp);
    let per_scale = family
        .scales()
        .iter()
        .map(|scale| {
            let a = averages(&up, &g, scale);
            let b = averages(&down, &g, scale);
            let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y.powf(q / pp)).collect();
            argmax(g.dim(), scale, &prod)
        })
        .collect();
    Ok(WeightConstantReport::from_scales(family, per_scale))
}

/// Scales of `family` restricted to the inside of one of its cubes of side
/// `side`, with corners relative to that cube.
fn inner_scales(family: &CubeFamily, side: usize) -> Vec<Scale> {
    family
        .scales()
        .iter()
        .filter(|s| s.side <= side)
        .map(|s| Scale { side: s.side, stride: s.stride, first: 0, count: (side - s.side) / s.stride + 1 })
        .collect()
}

/// Fujii–Wilson constant `sup_Q w(Q)^{-1} ∫_Q M(1_Q w)`, with `M` taken over
/// the cubes of the family inside `Q`.
pub fn ainf_constant(w: &ScalarField, family: &CubeFamily) -> Result<WeightConstantReport> {
    check_weight(w)?;
    check_family(w, family, true)?;
    let g = *w.grid();
    let dim = g.dim();
    let per_scale = family
        .scales()
        .iter()
        .map(|scale| {
            let inner = inner_scales(family, scale.side);
            let count = Shape::cube(dim, scale.count).len();
            let ratios: Vec<f64> = (0..count)
                .into_par_iter()
                .map(|k| {
                    let q = corner_cube(dim, scale, k);
                    let local: Vec<f64> = q.cells(&g).iter().map(|&c| w.values()[c]).collect();
                    let mut m = vec![0.0; local.len()];
                    for s in &inner {
                        let vol = (s.side as f64).powi(dim as i32);
                        let avg: Vec<f64> =
                            corner_reduce(&local, dim, scale.side, s, Reduce::Sum).into_iter().map(|v| v / vol).collect();
                        spread_max(&avg, dim, scale.side, s, &mut m);
                    }
                    let mut num = CompensatedSum::new();
                    let mut den = CompensatedSum::new();
                    m.iter().for_each(|v| num.add(*v));
                    local.iter().for_each(|v| den.add(*v));
                    num.value() / den.value()
                })
                .collect();
            argmax(dim, scale, &ratios)
        })
        .collect();
    Ok(WeightConstantReport::from_scales(family, per_scale))
}

/// `[w]_{A_{1,n'}} = [w^{n'}]_{A_1}`.
pub fn a1n_constant(w: &ScalarField, family: &CubeFamily) -> Result<WeightConstantReport> {
    let n = w.grid().dim() as f64;
    if n < 2.0 {
        return Err(Error::UnsupportedDimension(1));
    }
    a1_constant(&w.map(|v| v.powf(conjugate(n))), family)
}

/// Which bump condition to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum BumpMode {
    /// `|Q|^{α/n+1/q-1/p} ‖u^{1/q}‖_Φ ‖v^{-1/p}‖_Ψ` with `Φ̄ ∈ B_{q'}`, `Ψ̄ ∈ B_p`.
    Joint { phi: YoungFunction, psi: YoungFunction },
    /// Two terms, each bumping one factor, with `Φ̄ ∈ B_{q',p'}`, `Ψ̄ ∈ B_{p,q}`; needs `p < q`.
    Separated { phi: YoungFunction, psi: YoungFunction },
    /// Joint with `Φ = t^q log^{q/q'+δ}`, `Ψ = t^{p'} log^{p'/p+δ}`.
    LogBump { delta: f64 },
    /// Separated with `p = q`, log powers `2p-1+δ` and `2p'-1+δ`.
    DiagonalLog { delta: f64 },
}

/// One class requirement and its numerical verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub function: String,
    pub class: String,
    pub report: BClassReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpReport {
    /// Sum of the suprema of the terms.
    pub value: f64,
    /// One report per term of the condition.
    pub terms: Vec<WeightConstantReport>,
    pub classes: Vec<ClassCheck>,
    pub divergent: bool,
}

fn require(function: &YoungFunction, p: f64, class: BClass) -> Result<ClassCheck> {
    let bar = associate(function)?;
    let report = bp_classify(&bar, p, class);
    let class_label = match class {
        BClass::Bp => format!("B_{p}"),
        BClass::Bpq { q } => format!("B_({p},{q})"),
    };
    let function = format!("associate of {}", function.label());
    if report.verdict != Verdict::Member {
        return Err(Error::BClassNotVerified { function, class: class_label, verdict: report.verdict.to_string() });
    }
    Ok(ClassCheck { function, class: class_label, report })
}

/// Evaluates a two-weight bump condition for `I_α : L^p(v) → L^q(u)`.
///
/// Refuses with [`Error::BClassNotVerified`] unless every class hypothesis
/// of the mode is numerically verified.
pub fn bump_check(
    u: &ScalarField,
    v: &ScalarField,
    p: f64,
    q: f64,
    alpha: f64,
    mode: &BumpMode,
    family: &CubeFamily,
) -> Result<BumpReport> {
    check_weight(u)?;
    check_weight(v)?;
    check_family(u, family, true)?;
    check_family(v, family, true)?;
    let g = *u.grid();
    let dim = g.dim();
    if !(p > 1.0 && q >= p && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("bump conditions need 1 < p <= q < ∞, got ({p}, {q})")));
    }
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::InvalidParameter(format!("order {alpha} outside (0, {dim})")));
    }
    let (pp, qq) = (conjugate(p), conjugate(q));
    let (phi, psi, separated, classes) = match *mode {
        BumpMode::Joint { phi, psi } => {
            let c = vec![require(&phi, qq, BClass::Bp)?, require(&psi, p, BClass::Bp)?];
            (phi, psi, false, c)
        }
        BumpMode::Separated { phi, psi } => {
            if p >= q {
                return Err(Error::InvalidParameter("separated bumps need p < q".into()));
            }
            let c = vec![require(&phi, qq, BClass::Bpq { q: pp })?, require(&psi, p, BClass::Bpq { q })?];
            (phi, psi, true, c)
        }
        BumpMode::LogBump { delta } => {
            let phi = YoungFunction::power_log(q, q / qq + delta)?;
            let psi = YoungFunction::power_log(pp, pp / p + delta)?;
            let c = vec![require(&phi, qq, BClass::Bp)?, require(&psi, p, BClass::Bp)?];
            (phi, psi, false, c)
        }
        BumpMode::DiagonalLog { delta } => {
            if p != q {
                return Err(Error::InvalidParameter("the diagonal log bump needs p = q".into()));
            }
            let phi = YoungFunction::power_log(p, 2.0 * p - 1.0 + delta)?;
            let psi = YoungFunction::power_log(pp, 2.0 * pp - 1.0 + delta)?;
            (phi, psi, true, Vec::new())
        }
    };
    let big_u = powered(u, 1.0 / q);
    let big_v = powered(v, -1.0 / p);
    let sigma = powered(v, 1.0 - pp);
    let exponent = alpha / dim as f64 + 1.0 / q - 1.0 / p;
    let h = g.spacing();
    let mut terms: Vec<Vec<(f64, Option<Cube>)>> = vec![Vec::new(); if separated { 2 } else { 1 }];
    for scale in family.scales() {
        let factor = ((scale.side as f64 * h).powi(dim as i32)).powf(exponent);
        let bu = corner_gather(&big_u, &g, scale, |buf, vol| orlicz_uniform(buf, vol as usize, &phi));
        let bv = corner_gather(&big_v, &g, scale, |buf, vol| orlicz_uniform(buf, vol as usize, &psi));
        if separated {
            let au = averages(u.values(), &g, scale);
            let asg = averages(&sigma, &g, scale);
            let t1: Vec<f64> = (0..bu.len()).map(|k| factor * bu[k] * asg[k].powf(1.0 / pp)).collect();
            let t2: Vec<f64> = (0..bu.len()).map(|k| factor * au[k].powf(1.0 / q) * bv[k]).collect();
            terms[0].push(argmax(dim, scale, &t1));
            terms[1].push(argmax(dim, scale, &t2));
        } else {
            let t: Vec<f64> = (0..bu.len()).map(|k| factor * bu[k] * bv[k]).collect();
            terms[0].push(argmax(dim, scale, &t));
        }
    }
    let terms: Vec<WeightConstantReport> = terms.into_iter().map(|t| WeightConstantReport::from_scales(family, t)).collect();
    let value = terms.iter().map(|t| t.value).sum();
    let divergent = terms.iter().any(|t| t.divergent);
    Ok(BumpReport { value, terms, classes, divergent })
}

/// Both testing conditions for `I_1 : L^p(v) → L^q(u)`, with `σ = v^{1-p'}`:
/// `(∫_Q I_1(1_Q σ)^q u)^{1/q} / (∫_Q σ)^{1/p}` and
/// `(∫_Q I_1(1_Q u)^{p'} σ)^{1/p'} / (∫_Q u)^{1/q'}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestingReport {
    pub forward: WeightConstantReport,
    pub dual: WeightConstantReport,
    /// Cubes skipped because a right-hand side vanished.
    pub skipped: usize,
}

pub fn testing_check(u: &ScalarField, v: &ScalarField, p: f64, q: f64, family: &CubeFamily) -> Result<TestingReport> {
    check_weight(u)?;
    check_weight(v)?;
    check_family(u, family, true)?;
    check_family(v, family, true)?;
    if !(p > 1.0 && q >= p && q.is_finite()) {
        return Err(Error::InvalidParameter(format!("testing conditions need 1 < p <= q < ∞, got ({p}, {q})")));
    }
    let g = *u.grid();
    let dim = g.dim();
    let h = g.spacing();
    let vol = g.cell_volume();
    let (pp, qq) = (conjugate(p), conjugate(q));
    let sigma = powered(v, 1.0 - pp);
    let kernel = riesz_kernel(dim, 1.0, h);
    let mut forward = Vec::new();
    let mut dual = Vec::new();
    let mut skipped = 0;
    for scale in family.scales() {
        let count = Shape::cube(dim, scale.count).len();
        let rows: Vec<(f64, f64, usize)> = (0..count)
            .into_par_iter()
            .map(|k| {
                let cube = corner_cube(dim, scale, k);
                let cells = cube.cells(&g);
                let lu: Vec<f64> = cells.iter().map(|&c| u.values()[c]).collect();
                let ls: Vec<f64> = cells.iter().map(|&c| sigma[c]).collect();
                let i_s = fft_convolve(&ls, dim, scale.side, scale.side, 0, &kernel);
                let i_u = fft_convolve(&lu, dim, scale.side, scale.side, 0, &kernel);
                let mut a = CompensatedSum::new();
                let mut b = CompensatedSum::new();
                let mut ms = CompensatedSum::new();
                let mut mu = CompensatedSum::new();
                for j in 0..cells.len() {
                    a.add(i_s[j].powf(q) * lu[j] * vol);
                    b.add(i_u[j].powf(pp) * ls[j] * vol);
                    ms.add(ls[j] * vol);
                    mu.add(lu[j] * vol);
                }
                let (rs, ru) = (ms.value().powf(1.0 / p), mu.value().powf(1.0 / qq));
                let mut skip = 0;
                let f = if rs > 0.0 {
                    a.value().powf(1.0 / q) / rs
                } else {
                    skip += 1;
                    0.0
                };
                let d = if ru > 0.0 {
                    b.value().powf(1.0 / pp) / ru
                } else {
                    skip += 1;
                    0.0
                };
                (f, d, skip)
            })
            .collect();
        skipped += rows.iter().map(|r| r.2).sum::<usize>();
        let fw: Vec<f64> = rows.iter().map(|r| r.0).collect();
        let dw: Vec<f64> = rows.iter().map(|r| r.1).collect();
        forward.push(argmax(dim, scale, &fw));
        dual.push(argmax(dim, scale, &dw));
    }
    Ok(TestingReport {
        forward: WeightConstantReport::from_scales(family, forward),
        dual: WeightConstantReport::from_scales(family, dual),
        skipped,
    })
}

/// A weight described in a configuration file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    /// `|x - center|^{-a}`, evaluated at cell centers.
    Power {
        a: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `floor + amplitude · bump((x - center)/radius)`.
    Bump {
        center: Vec<f64>,
        radius: f64,
        amplitude: f64,
        #[serde(default = "one")]
        floor: f64,
    },
    /// Cell values read from a grid file on the same grid.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl WeightSpec {
    pub fn build(&self, grid: &GridSpec) -> Result<ScalarField> {
        let point = |c: &[f64]| {
            let mut x = [0.0; 3];
            for (slot, v) in x.iter_mut().zip(c).take(grid.dim()) {
                *slot = *v;
            }
            x
        };
        let w = match self {
            Self::Power { a, center } => {
                let c = point(center);
                ScalarField::from_fn(*grid, |x| norm(&sub(x, &c)).powf(-a))?
            }
            Self::Bump { center, radius, amplitude, floor } => {
                let c = point(center);
                ScalarField::from_fn(*grid, |x| floor + crate::field::bump_profile(x, &c, *radius, *amplitude))?
            }
            Self::File { path } => {
                let w = read_grid_file(path)?;
                if w.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                w
            }
        };
        check_weight(&w)?;
        Ok(w)
    }
}
