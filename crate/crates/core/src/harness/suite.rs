//! Seeded test material: smooth bumps, sphere kernels and a small measure.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{bump_gradient, bump_profile, make_bump, norm, GridSpec, Point, ScalarField, VectorField};
use crate::geometry::{sphere_quadrature, SphereQuadrature};
use crate::potential::DiscreteMeasure;
use crate::singular::SphereFunction;

/// Parameters of one bump `A exp(1 - 1/(1 - |x-c|^2/ρ^2))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpParams {
    pub center: Point,
    pub radius: f64,
    pub amplitude: f64,
}

impl BumpParams {
    pub fn field(&self, grid: &GridSpec) -> Result<ScalarField> {
        make_bump(grid, &self.center, self.radius, self.amplitude)
    }

    /// Exact gradient sampled at cell centers.
    pub fn gradient(&self, grid: &GridSpec) -> Result<VectorField> {
        let components = (0..grid.dim())
            .map(|j| ScalarField::from_fn(*grid, |x| bump_gradient(x, &self.center, self.radius, self.amplitude)[j]))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(components)
    }

    pub fn gradient_magnitude(&self, grid: &GridSpec) -> Result<ScalarField> {
        ScalarField::from_fn(*grid, |x| norm(&bump_gradient(x, &self.center, self.radius, self.amplitude)))
    }

    pub fn value(&self, x: &Point) -> f64 {
        bump_profile(x, &self.center, self.radius, self.amplitude)
    }
}

/// Bumps with radius in `[1, 2]·scale`, amplitude in `[0.5, 2]` and center
/// in `[-1, 1]^n·scale`, so every support lies in `[-3 scale, 3 scale]^n`.
pub fn bump_suite(dim: usize, count: usize, seed: u64, scale: f64) -> Vec<BumpParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let radius = rng.random_range(1.0..2.0) * scale;
            let amplitude = rng.random_range(0.5..2.0);
            let mut center = [0.0; 3];
            for c in center.iter_mut().take(dim) {
                *c = rng.random_range(-1.0..1.0) * scale;
            }
            BumpParams { center, radius, amplitude }
        })
        .collect()
}

/// How the sphere kernels of a suite are produced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[derive(Default)]
pub enum OmegaSpec {
    /// Seeded random low-order kernels, `count` of them.
    #[default]
    Random,
    /// `a_0 + Σ_k a_k cos kθ + b_k sin kθ` on the circle, given as `[a_k, b_k]`.
    Harmonics { constant: f64, coefficients: Vec<[f64; 2]> },
}

/// Default number of sphere nodes for a dimension.
pub fn default_quadrature(dim: usize) -> Result<Arc<SphereQuadrature>> {
    let nodes = match dim {
        1 => 2,
        2 => 256,
        3 => 2 * 16 * 16,
        _ => return Err(Error::UnsupportedDimension(dim)),
    };
    Ok(Arc::new(sphere_quadrature(dim, nodes)?))
}

pub fn omega_suite(quad: &Arc<SphereQuadrature>, spec: &OmegaSpec, count: usize, seed: u64) -> Result<Vec<SphereFunction>> {
    match spec {
        OmegaSpec::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0a6a);
            (0..count).map(|_| SphereFunction::random(quad.clone(), &mut rng)).collect()
        }
        OmegaSpec::Harmonics { constant, coefficients } => {
            if quad.dim() != 2 {
                return Err(Error::UnsupportedDimension(quad.dim()));
            }
            let omega = SphereFunction::from_fn(quad.clone(), |y| {
                let th = y[1].atan2(y[0]);
                constant
                    + coefficients
                        .iter()
                        .enumerate()
                        .map(|(k, [a, b])| {
                            let m = (k + 1) as f64;
                            a * (m * th).cos() + b * (m * th).sin()
                        })
                        .sum::<f64>()
            })?;
            Ok(vec![omega])
        }
    }
}

/// A unit atom near the origin and two lighter atoms off center, placed off
/// every dyadic lattice so no cell center coincides with an atom.
pub fn atom_measure(dim: usize, scale: f64) -> Result<DiscreteMeasure> {
    let pick = |x: [f64; 3]| {
        let mut p = [0.0; 3];
        for ax in 0..dim {
            p[ax] = x[ax] * scale;
        }
        p
    };
    let points = vec![pick([0.0123, -0.0071, 0.0037]), pick([1.2345, 0.6789, -0.3141]), pick([-0.9137, 1.1071, 0.2718])];
    DiscreteMeasure::new(dim, points, vec![1.0, 0.5, 0.5])
}

/// Everything a case needs besides the grid.
#[derive(Clone, Debug)]
pub struct Suite {
    pub dim: usize,
    pub bumps: Vec<BumpParams>,
    pub quad: Arc<SphereQuadrature>,
    pub omegas: Vec<SphereFunction>,
    pub measure: DiscreteMeasure,
    pub seed: u64,
}

impl Suite {
    pub fn generate(dim: usize, bumps: usize, omegas: usize, seed: u64, omega: &OmegaSpec) -> Result<Self> {
        let quad = default_quadrature(dim)?;
        let omegas = if dim >= 2 { omega_suite(&quad, omega, omegas, seed)? } else { Vec::new() };
        Ok(Self { dim, bumps: bump_suite(dim, bumps, seed, 1.0), quad, omegas, measure: atom_measure(dim, 1.0)?, seed })
    }

    /// The same suite cut down to its first `bumps` bumps and `omegas` kernels.
    pub fn truncated(&self, bumps: usize, omegas: usize) -> Self {
        Self {
            bumps: self.bumps.iter().take(bumps).cloned().collect(),
            omegas: self.omegas.iter().take(omegas).cloned().collect(),
            ..self.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bumps_are_reproducible_and_fit() {
        let a = bump_suite(2, 20, 7, 1.0);
        assert_eq!(a, bump_suite(2, 20, 7, 1.0));
        assert_ne!(a, bump_suite(2, 20, 8, 1.0));
        let g = GridSpec::new(2, 32, 4.0).unwrap();
        for b in &a {
            assert!((1.0..2.0).contains(&b.radius) && (0.5..2.0).contains(&b.amplitude));
            assert!(b.field(&g).is_ok());
        }
    }

    #[test]
    fn exact_gradient_matches_differences() {
        // central differences are second order: halving h cuts the error by about 4
        let b = bump_suite(2, 1, 3, 1.0)[0];
        let err = |n: usize| {
            let g = GridSpec::new(2, n, 4.0).unwrap();
            let exact = b.gradient(&g).unwrap();
            let fd = crate::field::gradient(&b.field(&g).unwrap());
            (0..2)
                .map(|j| {
                    let e = exact.component(j).values();
                    let d = fd.component(j).values();
                    e.iter().zip(d).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / exact.component(j).max_abs()
                })
                .fold(0.0, f64::max)
        };
        let (coarse, fine) = (err(128), err(256));
        assert!(fine < 0.015 && coarse / fine > 3.0, "{coarse} {fine}");
    }

    #[test]
    fn kernels_and_measure() {
        let s = Suite::generate(2, 3, 4, 11, &OmegaSpec::Random).unwrap();
        assert_eq!(s.omegas.len(), 4);
        assert!(s.omegas.iter().all(|o| !o.is_mean_zero()));
        let h = OmegaSpec::Harmonics { constant: 0.0, coefficients: vec![[1.0, 0.0]] };
        let one = omega_suite(&s.quad, &h, 5, 0).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one[0].is_mean_zero());
        for n in [64, 128, 256] {
            let g = GridSpec::new(2, n, 4.0).unwrap();
            assert!(crate::potential::riesz_potential_measure(&s.measure, 1.0, &g).is_ok());
        }
        let t = s.truncated(1, 2);
        assert_eq!((t.bumps.len(), t.omegas.len()), (1, 2));
    }
}
