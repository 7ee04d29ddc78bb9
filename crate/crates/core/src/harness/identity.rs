//! Residuals of the exact identities behind the pointwise estimates, with
//! their convergence orders under refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{gradient, make_bump, GridSpec, Point, ScalarField};
use crate::geometry::{gauss_legendre, unit_ball_volume, SphereQuadrature};
use crate::numeric::{compensated_sum, log_log_slope};
use crate::potential::riesz_potential;
use crate::singular::{
    ball_weak_norm_identity, beurling, riesz_transform, BeurlingMode, ComplexField, RieszMode, SphereFunction,
};

/// Residuals of one identity at a sequence of spacings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    /// `(h, residual)`, coarsest first.
    pub residuals: Vec<(f64, f64)>,
    /// Least-squares slope of `log residual` against `log h`.
    pub order: Option<f64>,
}

impl IdentityResidual {
    fn new(name: &str, residuals: Vec<(f64, f64)>) -> Self {
        let order = (residuals.len() >= 2 && residuals.iter().all(|r| r.1 > 0.0)).then(|| {
            let (h, r): (Vec<f64>, Vec<f64>) = residuals.iter().copied().unzip();
            log_log_slope(&h, &r)
        });
        Self { name: name.to_string(), residuals, order }
    }

    /// Whether every refinement step reduced the residual.
    pub fn decreasing(&self) -> bool {
        self.residuals.windows(2).all(|w| w[1].1 < w[0].1)
    }

    pub fn finest(&self) -> f64 {
        self.residuals.last().map_or(f64::NAN, |r| r.1)
    }
}

/// Per-point check of the dyadic absorption bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionReport {
    /// Points where the sums were taken.
    pub points: Vec<Point>,
    /// `Σ_k r_k ⨍_{B_k}|∇f|` at each point.
    pub sums: Vec<f64>,
    /// Largest `(1 - 2^{1-n}) S / A` with `A` the sum over annuli; at most 1.
    pub annulus_ratio: f64,
    /// Largest `ω_n (1 - 2^{1-n}) S / I_1(|∇f|)`; at most 1 up to discretisation.
    pub potential_ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub spherical_mean: IdentityResidual,
    pub riesz: IdentityResidual,
    /// Planar only.
    pub beurling: Option<IdentityResidual>,
    /// `(k, lhs, rhs)` for the ball weak-norm identity on `B(0, 2^k)`.
    pub ball_weak_norm: Vec<(i32, f64, f64)>,
    pub absorption: AbsorptionReport,
}

fn rel_l2(a: &ScalarField, b: &ScalarField) -> f64 {
    let d = compensated_sum(a.values().iter().zip(b.values()).map(|(x, y)| (x - y) * (x - y)));
    let s = compensated_sum(b.values().iter().map(|y| y * y));
    (d / s).sqrt()
}

struct TestBump {
    center: Point,
    radius: f64,
}

impl TestBump {
    fn on(grid: &GridSpec) -> Self {
        let r = grid.half_width();
        let mut center = [0.0; 3];
        let off = [0.05, -0.1, 0.075];
        for ax in 0..grid.dim() {
            center[ax] = off[ax] * r;
        }
        Self { center, radius: 0.5 * r }
    }

    fn field(&self, grid: &GridSpec) -> Result<ScalarField> {
        make_bump(grid, &self.center, self.radius, 1.0)
    }
}

/// Coarser grids `N/4, N/2, N` with the same box.
fn ladder(grid: &GridSpec) -> Result<Vec<GridSpec>> {
    let n = grid.cells();
    if n < 16 || !n.is_multiple_of(8) {
        return Err(Error::InvalidParameter(format!("identity suite needs N divisible by 8 and at least 16, got {n}")));
    }
    [n / 4, n / 2, n].into_iter().map(|c| GridSpec::new(grid.dim(), c, grid.half_width())).collect()
}

/// `Σ_i w_i f(x - t y_i)` against `Σ_i w_i ∫_t^∞ ∇f(x - r y_i)·y_i dr`, with
/// `f` and a differenced `∇f` interpolated between cell centers. Relative to
/// `max|f|`, largest over a few points near the bump.
pub fn spherical_mean_residual(grid: &GridSpec, quad: &SphereQuadrature) -> Result<f64> {
    if quad.dim() != grid.dim() {
        return Err(Error::UnsupportedDimension(quad.dim()));
    }
    let bump = TestBump::on(grid);
    let f = bump.field(grid)?;
    let grad = gradient(&f);
    let dim = grid.dim();
    let t = 0.5 * bump.radius;
    let (gx, gw) = gauss_legendre(4);
    let shifts = [[0.0, 0.0, 0.0], [0.3, 0.0, 0.1], [-0.25, 0.2, -0.15], [0.1, -0.4, 0.2]];
    let mut worst = 0.0f64;
    for s in shifts {
        let mut x = bump.center;
        for ax in 0..dim {
            x[ax] += s[ax] * bump.radius;
        }
        let dist = crate::field::norm(&crate::field::sub(&x, &bump.center));
        let top = dist + bump.radius;
        let panels = (4.0 * (top - t) / grid.spacing()).ceil().max(1.0) as usize;
        let width = (top - t) / panels as f64;
        let along = |y: &Point, r: f64| {
            let mut z = [0.0; 3];
            for ax in 0..dim {
                z[ax] = x[ax] - r * y[ax];
            }
            z
        };
        let pairs: Vec<(f64, f64)> = quad
            .nodes()
            .par_iter()
            .zip(quad.weights())
            .map(|(y, w)| {
                let lhs = w * f.interpolate(&along(y, t));
                let mut acc = 0.0;
                for p in 0..panels {
                    let a = t + p as f64 * width;
                    for (u, v) in gx.iter().zip(&gw) {
                        let r = a + 0.5 * width * (u + 1.0);
                        let z = along(y, r);
                        let d: f64 = (0..dim).map(|ax| grad.component(ax).interpolate(&z) * y[ax]).sum();
                        acc += 0.5 * width * v * d;
                    }
                }
                (lhs, w * acc)
            })
            .collect();
        let lhs = compensated_sum(pairs.iter().map(|p| p.0));
        let rhs = compensated_sum(pairs.iter().map(|p| p.1));
        worst = worst.max((lhs - rhs).abs() / f.max_abs());
    }
    Ok(worst)
}

/// Relative `L²` distance between `R_1 f` and `(1-n)^{-1} ∂_1 I_1 f`.
pub fn riesz_residual(grid: &GridSpec, quad: &SphereQuadrature) -> Result<f64> {
    let f = TestBump::on(grid).field(grid)?;
    let r = riesz_transform(&f, 0, RieszMode::Pv, quad)?;
    let n = grid.dim() as f64;
    let d = gradient(&riesz_potential(&f, 1.0, grid)?);
    Ok(rel_l2(&r, &d.component(0).scale(1.0 / (1.0 - n))))
}

/// Relative `L²` distance between `Sf` and `∂(Cf)`, `∂ = (∂_x - i∂_y)/2`.
pub fn beurling_residual(grid: &GridSpec, quad: &SphereQuadrature) -> Result<f64> {
    let f = ComplexField::real(TestBump::on(grid).field(grid)?);
    let s = beurling(&f, BeurlingMode::S, quad)?;
    let c = beurling(&f, BeurlingMode::Cauchy, quad)?;
    let gr = gradient(&c.re);
    let gi = gradient(&c.im);
    let re = gr.component(0).add(gi.component(1))?.scale(0.5);
    let im = gi.component(0).zip_with(gr.component(1), |a, b| a - b)?.scale(0.5);
    let num = compensated_sum(
        (0..grid.len()).map(|k| (s.re.values()[k] - re.values()[k]).powi(2) + (s.im.values()[k] - im.values()[k]).powi(2)),
    );
    let den = compensated_sum((0..grid.len()).map(|k| re.values()[k].powi(2) + im.values()[k].powi(2)));
    Ok((num / den).sqrt())
}

/// Sums over the balls `B(x, h 2^k)` that reach past the box, for each point.
pub fn absorption_check(grad: &ScalarField, points: &[Point]) -> Result<AbsorptionReport> {
    let grid = *grad.grid();
    let dim = grid.dim();
    let n = dim as i32;
    let omega = unit_ball_volume(dim);
    let factor = 1.0 - 2f64.powi(1 - n);
    let h = grid.spacing();
    let diameter = 2.0 * grid.half_width() * (dim as f64).sqrt();
    let levels = ((diameter / h).log2().ceil() as usize).max(1) + 1;
    let i1 = riesz_potential(grad, 1.0, &grid)?;
    let vol = grid.cell_volume();
    let mut sums = Vec::with_capacity(points.len());
    let mut annulus_ratio = 0.0f64;
    let mut potential_ratio = 0.0f64;
    for x in points {
        if !grid.contains(x) {
            return Err(Error::RegionOutsideDomain);
        }
        // mass of each annulus h 2^{k-1} ≤ |y| < h 2^k, with the first one the whole ball
        let mut shells = vec![0.0; levels];
        for k in 0..grid.len() {
            let d = crate::field::norm(&crate::field::sub(&grid.center(k), x));
            let level = if d < h { 0 } else { (d / h).log2().floor() as usize + 1 };
            if level < levels {
                shells[level] += grad.values()[k] * vol;
            }
        }
        let mut inside = 0.0;
        let mut s = 0.0;
        let mut a = 0.0;
        for (k, shell) in shells.iter().enumerate() {
            inside += shell;
            let r = h * 2f64.powi(k as i32);
            let scale = 1.0 / (omega * r.powi(n - 1));
            s += scale * inside;
            a += scale * shell;
        }
        sums.push(s);
        if a > 0.0 {
            annulus_ratio = annulus_ratio.max(factor * s / a);
        }
        let i = i1.interpolate(x);
        if i > 0.0 {
            potential_ratio = potential_ratio.max(omega * factor * s / i);
        }
    }
    Ok(AbsorptionReport { points: points.to_vec(), sums, annulus_ratio, potential_ratio })
}

/// All identity residuals on `N/4, N/2, N` for the box of `grid`.
pub fn identity_suite(grid: &GridSpec, quad: &SphereQuadrature) -> Result<IdentityReport> {
    if grid.dim() < 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    let grids = ladder(grid)?;
    let series = |f: &dyn Fn(&GridSpec) -> Result<f64>| -> Result<Vec<(f64, f64)>> {
        grids.iter().map(|g| Ok((g.spacing(), f(g)?))).collect()
    };
    let spherical_mean = IdentityResidual::new("spherical-mean", series(&|g| spherical_mean_residual(g, quad))?);
    let riesz = IdentityResidual::new("riesz", series(&|g| riesz_residual(g, quad))?);
    let beurling = if grid.dim() == 2 {
        let last = &grids[1..];
        let r = last.iter().map(|g| Ok((g.spacing(), beurling_residual(g, quad)?))).collect::<Result<Vec<_>>>()?;
        Some(IdentityResidual::new("beurling", r))
    } else {
        None
    };
    let omega = SphereFunction::from_fn(quad.clone(), |y| 1.0 + y[0] - 0.5 * y[1] * y[1])?;
    let ball_weak_norm =
        (-2..=2).map(|k| ball_weak_norm_identity(&omega, k).map(|(l, r)| (k, l, r))).collect::<Result<Vec<_>>>()?;
    let bump = TestBump::on(grid);
    let grad = gradient(&bump.field(grid)?).magnitude();
    let mut points = Vec::new();
    for s in [0.0, 0.5, 1.5] {
        let mut x = bump.center;
        x[0] += s * bump.radius;
        points.push(x);
    }
    let absorption = absorption_check(&grad, &points)?;
    Ok(IdentityReport { spherical_mean, riesz, beurling, ball_weak_norm, absorption })
}
