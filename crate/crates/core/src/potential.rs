//! Riesz potentials of grid fields and of finite atomic measures.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{norm, sub, GridSpec, Point, ScalarField};
use crate::geometry::{gauss_legendre, Cube};
use crate::lorentz::conjugate;
use crate::numeric::{fft_convolve, CompensatedSum, Shape};

/// A finite sum of point masses `Σ m_i δ_{y_i}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    dim: usize,
    points: Vec<Point>,
    masses: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(dim: usize, points: Vec<Point>, masses: Vec<f64>) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        if points.is_empty() {
            return Err(Error::EmptyMeasure);
        }
        if points.len() != masses.len() {
            return Err(Error::InvalidParameter(format!("{} points but {} masses", points.len(), masses.len())));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(Error::InvalidParameter(format!("mass {m} is not positive")));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter("mass point is not finite".into()));
        }
        let mut points = points;
        for p in &mut points {
            p[dim..].fill(0.0);
        }
        Ok(Self { dim, points, masses })
    }

    /// Unit mass at `x`.
    pub fn dirac(dim: usize, x: Point) -> Result<Self> {
        Self::new(dim, vec![x], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn translated(&self, shift: &Point) -> Self {
        let mut out = self.clone();
        for p in &mut out.points {
            for ax in 0..self.dim {
                p[ax] += shift[ax];
            }
        }
        out
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.dim, self.points.clone(), self.masses.iter().map(|m| m * factor).collect())
    }

    /// The masses whose points satisfy `keep`, or `None` if none do.
    pub fn restricted<F: Fn(&Point) -> bool>(&self, keep: F) -> Option<Self> {
        let (points, masses): (Vec<Point>, Vec<f64>) =
            self.points.iter().zip(&self.masses).filter(|(p, _)| keep(p)).map(|(p, m)| (*p, *m)).unzip();
        Self::new(self.dim, points, masses).ok()
    }
}

fn check_order(alpha: f64, dim: usize) -> Result<()> {
    if !(alpha > 0.0 && alpha < dim as f64) {
        return Err(Error::InvalidParameter(format!("order {alpha} outside (0, {dim})")));
    }
    Ok(())
}

/// `∫_{[-1/2,1/2]^n} |z|^{α-n} dz`.
///
/// In one dimension this is `2 (1/2)^α / α`. Otherwise the cube splits into
/// its half-size copy, which carries `2^{-α}` of the total by homogeneity, and
/// a shell on which the kernel is smooth and Gauss–Legendre is accurate.
pub fn unit_cell_integral(dim: usize, alpha: f64) -> f64 {
    if dim == 1 {
        return 2.0 * 0.5f64.powf(alpha) / alpha;
    }
    let (xs, ws) = gauss_legendre(8);
    let sub = 4usize;
    let width = 1.0 / sub as f64;
    let shape = Shape::cube(dim, sub);
    let mut acc = CompensatedSum::new();
    for flat in 0..shape.len() {
        let c = shape.unflat(flat);
        if (0..dim).all(|ax| c[ax] == 1 || c[ax] == 2) {
            continue;
        }
        let q = Shape::cube(dim, xs.len());
        for node in 0..q.len() {
            let t = q.unflat(node);
            let mut r2 = 0.0;
            let mut w = 1.0;
            for ax in 0..dim {
                let x = -0.5 + (c[ax] as f64 + 0.5 * (xs[t[ax]] + 1.0)) * width;
                r2 += x * x;
                w *= 0.5 * width * ws[t[ax]];
            }
            acc.add(w * r2.powf(0.5 * (alpha - dim as f64)));
        }
    }
    acc.value() / (1.0 - (-alpha).exp2())
}

/// Cell offset between the first cells of `from` and `to`, if their lattices agree.
fn lattice_shift(from: &GridSpec, to: &GridSpec) -> Result<i64> {
    if from.dim() != to.dim() || !from.is_aligned_with(to) {
        return Err(Error::GridMismatch);
    }
    Ok(((from.half_width() - to.half_width()) / from.spacing()).round() as i64)
}

pub(crate) fn riesz_kernel(dim: usize, alpha: f64, h: f64) -> impl Fn([i64; 3]) -> f64 {
    let vol = h.powi(dim as i32);
    let center = unit_cell_integral(dim, alpha) * h.powf(alpha);
    move |o: [i64; 3]| {
        let r2 = (o[0] * o[0] + o[1] * o[1] + o[2] * o[2]) as f64;
        if r2 == 0.0 {
            center
        } else {
            (r2 * h * h).powf(0.5 * (alpha - dim as f64)) * vol
        }
    }
}

/// `I_α f(x) = ∫ f(y) |x - y|^{α-n} dy` on the cell centers of `eval_grid`,
/// which must share the lattice of `f`'s grid. The cell of `y = x` uses the
/// exact integral of the kernel over that cell.
pub fn riesz_potential(f: &ScalarField, alpha: f64, eval_grid: &GridSpec) -> Result<ScalarField> {
    let g = f.grid();
    check_order(alpha, g.dim())?;
    let shift = lattice_shift(eval_grid, g)?;
    let kernel = riesz_kernel(g.dim(), alpha, g.spacing());
    let out = fft_convolve(f.values(), g.dim(), g.cells(), eval_grid.cells(), -shift, kernel);
    ScalarField::from_values(*eval_grid, out)
}

/// Same sum as [`riesz_potential`], accumulated term by term.
pub fn riesz_potential_direct(f: &ScalarField, alpha: f64, eval_grid: &GridSpec) -> Result<ScalarField> {
    let g = *f.grid();
    check_order(alpha, g.dim())?;
    let shift = lattice_shift(eval_grid, &g)?;
    let kernel = riesz_kernel(g.dim(), alpha, g.spacing());
    let dim = g.dim();
    let values: Vec<f64> = (0..eval_grid.len())
        .into_par_iter()
        .map(|k| {
            let i = eval_grid.multi_index(k);
            let mut acc = CompensatedSum::new();
            for (j, v) in f.values().iter().enumerate() {
                if *v == 0.0 {
                    continue;
                }
                let jj = g.multi_index(j);
                let mut o = [0i64; 3];
                for ax in 0..dim {
                    o[ax] = i[ax] as i64 - shift - jj[ax] as i64;
                }
                acc.add(v * kernel(o));
            }
            acc.value()
        })
        .collect();
    ScalarField::from_values(*eval_grid, values)
}

/// `I_α μ(x) = Σ_i m_i |x - y_i|^{α-n}` at the cell centers of `grid`.
pub fn riesz_potential_measure(mu: &DiscreteMeasure, alpha: f64, grid: &GridSpec) -> Result<ScalarField> {
    if mu.dim() != grid.dim() {
        return Err(Error::UnsupportedDimension(mu.dim()));
    }
    check_order(alpha, grid.dim())?;
    let values: Vec<f64> =
        (0..grid.len()).into_par_iter().map(|k| potential_at(mu, alpha, &grid.center(k))).collect::<Result<_>>()?;
    ScalarField::from_values(*grid, values)
}

/// `I_α μ(x)` at one point.
pub fn potential_at(mu: &DiscreteMeasure, alpha: f64, x: &Point) -> Result<f64> {
    let e = 0.5 * (alpha - mu.dim() as f64);
    let mut acc = CompensatedSum::new();
    for (y, m) in mu.points().iter().zip(mu.masses()) {
        let d = sub(x, y);
        let r2 = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
        if r2 == 0.0 {
            return Err(Error::CoincidentPoint { point: x[..mu.dim()].to_vec() });
        }
        acc.add(m * r2.powf(e));
    }
    Ok(acc.value())
}

/// The weight `(I_α μ)^r`.
pub fn a1_power_weight(mu: &DiscreteMeasure, alpha: f64, r: f64, grid: &GridSpec) -> Result<ScalarField> {
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("power {r} must be nonnegative")));
    }
    if r == 0.0 {
        return Ok(ScalarField::constant(*grid, 1.0));
    }
    Ok(riesz_potential_measure(mu, alpha, grid)?.map(|v| v.powf(r)))
}

/// The local step of the `A_1` argument on one cube.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KolmogorovReport {
    /// `(⨍_Q I_α(1_{2Q} μ)^r)^{1/r}`, or 1 when `r = 0`.
    pub lhs: f64,
    /// `inf_{x∈Q} I_α μ(x)` over cell centers.
    pub rhs: f64,
    /// Whether `r < (n/α)'`, the range in which the estimate is expected.
    pub admissible: bool,
}

impl KolmogorovReport {
    pub fn ratio(&self) -> f64 {
        self.lhs / self.rhs
    }
}

/// Both sides of the Kolmogorov step for the cube `q` of `grid`.
pub fn kolmogorov_local_estimate(
    mu: &DiscreteMeasure,
    alpha: f64,
    q: &Cube,
    r: f64,
    grid: &GridSpec,
) -> Result<KolmogorovReport> {
    check_order(alpha, grid.dim())?;
    if !(r.is_finite() && r >= 0.0) {
        return Err(Error::InvalidParameter(format!("power {r} must be nonnegative")));
    }
    let cells = q.cells(grid);
    if cells.len() != q.cell_count() {
        return Err(Error::RegionOutsideDomain);
    }
    let mut rhs = f64::INFINITY;
    for &k in &cells {
        rhs = rhs.min(potential_at(mu, alpha, &grid.center(k))?);
    }
    let admissible = r < conjugate(grid.dim() as f64 / alpha);
    if r == 0.0 {
        return Ok(KolmogorovReport { lhs: 1.0, rhs, admissible });
    }
    let doubled = q.dilate(2);
    let lhs = match mu.restricted(|p| doubled.contains_point(grid, p)) {
        None => 0.0,
        Some(local) => {
            let mut acc = CompensatedSum::new();
            for &k in &cells {
                acc.add(cell_mean_power(&local, alpha, r, grid, &grid.center(k))?);
            }
            (acc.value() / cells.len() as f64).powf(1.0 / r)
        }
    };
    Ok(KolmogorovReport { lhs, rhs, admissible })
}

/// Sub-cells per axis used where the potential is singular.
const NEAR_REFINE: usize = 16;

/// `⨍_cell (I_α μ)^r`: the center value, or a refined midpoint average for
/// cells within two cell diagonals of a mass.
fn cell_mean_power(mu: &DiscreteMeasure, alpha: f64, r: f64, grid: &GridSpec, c: &Point) -> Result<f64> {
    let dim = grid.dim();
    let h = grid.spacing();
    if distance_to_support(mu, c) > 2.0 * h * (dim as f64).sqrt() {
        return Ok(potential_at(mu, alpha, c)?.powf(r));
    }
    let sub = Shape::cube(dim, NEAR_REFINE);
    let mut acc = CompensatedSum::new();
    for flat in 0..sub.len() {
        let t = sub.unflat(flat);
        let mut x = *c;
        for ax in 0..dim {
            x[ax] += ((t[ax] as f64 + 0.5) / NEAR_REFINE as f64 - 0.5) * h;
        }
        acc.add(potential_at(mu, alpha, &x)?.powf(r));
    }
    Ok(acc.value() / sub.len() as f64)
}

/// Distance from `x` to the nearest mass point.
pub fn distance_to_support(mu: &DiscreteMeasure, x: &Point) -> f64 {
    mu.points().iter().map(|y| norm(&sub(x, y))).fold(f64::INFINITY, f64::min)
}
