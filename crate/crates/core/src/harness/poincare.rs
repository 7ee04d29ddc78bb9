//! Poincaré-type inequalities on balls and cubes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, Point, ScalarField};
use crate::geometry::{Ball, Cube};
use crate::lorentz::{conjugate, lorentz_uniform, LorentzIndex};
use crate::numeric::compensated_sum;

/// Relative size below which a gradient average counts as zero.
const FLAT: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Ball(Ball),
    Cube(Cube),
}

impl Region {
    fn cells(&self, grid: &GridSpec) -> Result<Vec<usize>> {
        let (inside, cells) = match self {
            Self::Ball(b) => (b.inside_box(grid), b.cells(grid)),
            Self::Cube(q) => (q.inside_box(grid), q.cells(grid)),
        };
        if !inside {
            return Err(Error::RegionOutsideDomain);
        }
        if cells.is_empty() {
            return Err(Error::EmptyRegion);
        }
        Ok(cells)
    }

    /// Radius of a ball, side length of a cube.
    pub fn size(&self, grid: &GridSpec) -> f64 {
        match self {
            Self::Ball(b) => b.radius,
            Self::Cube(q) => q.sidelength(grid),
        }
    }
}

/// Which oscillation is measured against `r ⨍|∇f|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum PoincareVariant {
    /// `⨍|f - f_B| ≤ C r ⨍|∇f|`
    OneOne,
    /// `(⨍|f - f_B|^q)^{1/q} ≤ C r (⨍|∇f|^p)^{1/p}`, `1 ≤ p < n`, `q ≤ p*`
    Classical { p: f64, q: f64 },
    /// `‖f - f_B‖_{L^{n',1}(B)} ≤ C r ⨍|∇f|`
    Lorentz,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoincareReport {
    pub max_ratio: f64,
    /// Index of the region attaining `max_ratio`.
    pub worst: Option<usize>,
    /// Ratio per region; `None` where the gradient vanishes on the region.
    pub ratios: Vec<Option<f64>>,
    pub evaluated: usize,
}

fn mean(values: impl Iterator<Item = f64>, count: usize) -> f64 {
    compensated_sum(values) / count as f64
}

/// Largest ratio of the two sides over `regions`. `grad` is `|∇f|`.
pub fn poincare_check(
    f: &ScalarField,
    grad: &ScalarField,
    regions: &[Region],
    variant: PoincareVariant,
) -> Result<PoincareReport> {
    let grid = *f.grid();
    if grad.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let n = grid.dim() as f64;
    let p = match variant {
        PoincareVariant::OneOne => 1.0,
        PoincareVariant::Classical { p, q } => {
            let pstar = if p < n { n * p / (n - p) } else { f64::NAN };
            if !(p >= 1.0 && p < n && q >= 1.0 && q <= pstar * (1.0 + 1e-12)) {
                return Err(Error::InvalidParameter(format!(
                    "classical Poincaré needs 1 <= p < n and 1 <= q <= p*, got ({p}, {q})"
                )));
            }
            p
        }
        PoincareVariant::Lorentz => {
            if grid.dim() < 2 {
                return Err(Error::UnsupportedDimension(grid.dim()));
            }
            1.0
        }
    };
    let floor = FLAT * grad.max_abs();
    let mut ratios = Vec::with_capacity(regions.len());
    for region in regions {
        let cells = region.cells(&grid)?;
        let m = cells.len();
        let g = mean(cells.iter().map(|&k| grad.values()[k].powf(p)), m).powf(1.0 / p);
        if !(g > floor) {
            ratios.push(None);
            continue;
        }
        let avg = mean(cells.iter().map(|&k| f.values()[k]), m);
        let mut osc: Vec<f64> = cells.iter().map(|&k| (f.values()[k] - avg).abs()).collect();
        let lhs = match variant {
            PoincareVariant::OneOne => mean(osc.iter().copied(), m),
            PoincareVariant::Classical { q, .. } => mean(osc.iter().map(|v| v.powf(q)), m).powf(1.0 / q),
            PoincareVariant::Lorentz => lorentz_uniform(&mut osc, 1.0 / m as f64, LorentzIndex::new(conjugate(n), 1.0)?),
        };
        ratios.push(Some(lhs / (region.size(&grid) * g)));
    }
    let mut worst = None;
    let mut max_ratio = 0.0;
    for (k, r) in ratios.iter().enumerate() {
        if let Some(r) = r {
            if worst.is_none() || *r > max_ratio {
                max_ratio = *r;
                worst = Some(k);
            }
        }
    }
    Ok(PoincareReport { max_ratio, worst, evaluated: ratios.iter().flatten().count(), ratios })
}

/// Seeded balls inside the box with centers within `spread` of `near`
/// (per axis) and radii in `[0.25, 1] spread`, at least four cells across.
pub fn random_balls(grid: &GridSpec, count: usize, seed: u64, near: &Point, spread: f64) -> Result<Vec<Ball>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let min_radius = 2.0 * grid.spacing();
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 1000 * count.max(1) {
            return Err(Error::InvalidParameter("no ball of the requested size fits in the box".into()));
        }
        let radius = rng.random_range(0.25..1.0) * spread;
        let mut center = [0.0; 3];
        for ax in 0..grid.dim() {
            center[ax] = near[ax] + rng.random_range(-1.0..1.0) * spread;
        }
        if radius < min_radius {
            continue;
        }
        let ball = Ball::new(center, radius)?;
        if ball.inside_box(grid) {
            out.push(ball);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::suite::bump_suite;

    #[test]
    fn constants_have_no_oscillation() {
        let g = GridSpec::new(2, 32, 2.0).unwrap();
        let f = ScalarField::constant(g, 3.0);
        let grad = ScalarField::constant(g, 1.0);
        let b = [Region::Ball(Ball::new([0.1, 0.2, 0.0], 0.7).unwrap())];
        for v in [PoincareVariant::OneOne, PoincareVariant::Lorentz, PoincareVariant::Classical { p: 1.0, q: 2.0 }] {
            assert_eq!(poincare_check(&f, &grad, &b, v).unwrap().max_ratio, 0.0);
        }
    }

    #[test]
    fn linear_functions_give_a_radius_free_constant() {
        // f = x_1 on balls centred at the origin: ⨍|f - f_B| = r·⨍_{B_1}|y_1|
        let ratio = |n: usize, r: f64| {
            let g = GridSpec::new(2, n, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x| x[0]).unwrap();
            let grad = ScalarField::constant(g, 1.0);
            let b = [Region::Ball(Ball::new([0.0; 3], r).unwrap())];
            poincare_check(&f, &grad, &b, PoincareVariant::OneOne).unwrap().max_ratio
        };
        let exact = 4.0 / (3.0 * std::f64::consts::PI);
        assert!((ratio(256, 0.9) / exact - 1.0).abs() < 0.01);
        assert!((ratio(256, 0.9) / ratio(512, 0.45) - 1.0).abs() < 0.01);
    }

    #[test]
    fn outside_regions_and_bad_exponents_are_rejected() {
        let g = GridSpec::new(2, 16, 1.0).unwrap();
        let f = ScalarField::constant(g, 1.0);
        let out = [Region::Ball(Ball::new([0.9, 0.0, 0.0], 0.5).unwrap())];
        assert!(matches!(poincare_check(&f, &f, &out, PoincareVariant::OneOne), Err(Error::RegionOutsideDomain)));
        let inside = [Region::Cube(Cube::new(2, [4, 4, 0], 4))];
        assert!(poincare_check(&f, &f, &inside, PoincareVariant::Classical { p: 1.0, q: 3.0 }).is_err());
        assert!(poincare_check(&f, &f, &inside, PoincareVariant::Classical { p: 1.0, q: 2.0 }).is_ok());
    }

    #[test]
    fn variants_are_ordered_on_bumps() {
        // ‖·‖_1 ≤ ‖·‖_{n'} ≤ C ‖·‖_{n',1} for normalized averages
        let g = GridSpec::new(2, 64, 4.0).unwrap();
        let b = bump_suite(2, 1, 1, 1.0)[0];
        let f = b.field(&g).unwrap();
        let grad = b.gradient_magnitude(&g).unwrap();
        let balls = random_balls(&g, 20, 3, &b.center, b.radius).unwrap();
        let regions: Vec<Region> = balls.into_iter().map(Region::Ball).collect();
        let a = poincare_check(&f, &grad, &regions, PoincareVariant::OneOne).unwrap();
        let c = poincare_check(&f, &grad, &regions, PoincareVariant::Classical { p: 1.0, q: 2.0 }).unwrap();
        let l = poincare_check(&f, &grad, &regions, PoincareVariant::Lorentz).unwrap();
        for k in 0..regions.len() {
            if let (Some(x), Some(y), Some(z)) = (a.ratios[k], c.ratios[k], l.ratios[k]) {
                assert!(x <= y * (1.0 + 1e-12) && y <= z * (1.0 + 1e-12), "{x} {y} {z}");
            }
        }
        assert!(l.max_ratio.is_finite() && l.evaluated > 0);
    }
}
