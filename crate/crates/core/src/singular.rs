//! Rough singular integrals with homogeneous kernels `Ω(y')/|y|^n`, their
//! maximal truncations, Riesz transforms and the planar Cauchy and
//! Ahlfors–Beurling operators.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{GridSpec, Point, ScalarField};
use crate::geometry::SphereQuadrature;
use crate::lorentz::{LorentzIndex, StepDistribution};
use crate::numeric::{fft_convolve, CompensatedSum};
use crate::polar::{self, AngularBatch, Support};

/// Values of `Ω` at the nodes of a sphere quadrature.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereFunction {
    quad: Arc<SphereQuadrature>,
    values: Vec<f64>,
    mean_zero: bool,
    ln_norm: f64,
    weak_norm: f64,
}

impl SphereFunction {
    pub fn new(quad: impl Into<Arc<SphereQuadrature>>, values: Vec<f64>) -> Result<Self> {
        let quad = quad.into();
        if values.len() != quad.len() {
            return Err(Error::InvalidParameter(format!("{} values for {} sphere nodes", values.len(), quad.len())));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        let w = quad.weights();
        let mut total = CompensatedSum::new();
        let mut mass = CompensatedSum::new();
        for (v, s) in values.iter().zip(w) {
            total.add(s * v);
            mass.add(s * v.abs());
        }
        let mean_zero = total.value().abs() <= 1e-10 * mass.value();
        let dim = quad.dim() as f64;
        let ln_norm = lr(&quad, &values, dim);
        let weak_norm = weak(&quad, &values);
        Ok(Self { quad, values, mean_zero, ln_norm, weak_norm })
    }

    pub fn from_fn<F: Fn(&Point) -> f64>(quad: impl Into<Arc<SphereQuadrature>>, f: F) -> Result<Self> {
        let quad = quad.into();
        let values = quad.nodes().iter().map(f).collect();
        Self::new(quad, values)
    }

    /// A smooth random function: `a_0 ∈ [0.5, 1.5]` plus low-order terms
    /// with coefficients in `[-1, 1]` (circular harmonics of order 1 to 4 in
    /// the plane, monomials of degree 1 and 2 on `S^2`). Not mean zero.
    pub fn random<R: Rng>(quad: impl Into<Arc<SphereQuadrature>>, rng: &mut R) -> Result<Self> {
        let quad = quad.into();
        let a0 = rng.random_range(0.5..1.5);
        let values = match quad.dim() {
            1 => quad.nodes().iter().map(|_| a0 + rng.random_range(-1.0..1.0)).collect(),
            2 => {
                let c: Vec<(f64, f64)> = (0..4).map(|_| (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                quad.nodes()
                    .iter()
                    .map(|y| {
                        let th = y[1].atan2(y[0]);
                        a0 + c
                            .iter()
                            .enumerate()
                            .map(|(k, (a, b))| {
                                let m = (k + 1) as f64;
                                a * (m * th).cos() + b * (m * th).sin()
                            })
                            .sum::<f64>()
                    })
                    .collect()
            }
            _ => {
                let lin: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
                let quad_c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
                quad.nodes()
                    .iter()
                    .map(|y| {
                        let deg2 = [y[0] * y[0], y[1] * y[1], y[2] * y[2], y[0] * y[1], y[1] * y[2], y[0] * y[2]];
                        a0 + (0..3).map(|i| lin[i] * y[i]).sum::<f64>() + (0..6).map(|i| quad_c[i] * deg2[i]).sum::<f64>()
                    })
                    .collect()
            }
        };
        Self::new(quad, values)
    }

    pub fn quad(&self) -> &SphereQuadrature {
        &self.quad
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_mean_zero(&self) -> bool {
        self.mean_zero
    }

    /// `Σ σ_i Ω(y'_i)`.
    pub fn integral(&self) -> f64 {
        self.quad.integrate_values(&self.values)
    }

    /// `‖Ω‖_{L^r(S^{n-1})}`.
    pub fn lr_norm(&self, r: f64) -> f64 {
        if r == self.quad.dim() as f64 {
            self.ln_norm
        } else {
            lr(&self.quad, &self.values, r)
        }
    }

    /// `‖Ω‖_{L^{n,∞}(S^{n-1})}`.
    pub fn weak_norm(&self) -> f64 {
        self.weak_norm
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.quad.clone(), self.values.iter().map(|v| v * factor).collect())
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.quad.clone(), self.values.iter().map(|v| f(*v)).collect())
    }
}

fn lr(quad: &SphereQuadrature, values: &[f64], r: f64) -> f64 {
    if r.is_infinite() {
        return values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let s: Vec<f64> = values.iter().map(|v| v.abs().powf(r)).collect();
    quad.integrate_values(&s).powf(1.0 / r)
}

fn weak(quad: &SphereQuadrature, values: &[f64]) -> f64 {
    let dist = StepDistribution::from_samples(values.iter().copied().zip(quad.weights().iter().copied()).collect());
    dist.lorentz(LorentzIndex { p: quad.dim() as f64, q: f64::INFINITY })
}

/// `Ω - σ(S^{n-1})^{-1} ∫Ω dσ`.
pub fn project_mean_zero(omega: &SphereFunction) -> SphereFunction {
    let mean = omega.integral() / omega.quad.total_weight();
    let values: Vec<f64> = omega.values.iter().map(|v| v - mean).collect();
    let mut out = SphereFunction::new(omega.quad.clone(), values).expect("finite values");
    out.mean_zero = true;
    out
}

/// `sup_λ λ σ{|Ω| > λ}^{1/n}`.
pub fn sphere_weak_norm(omega: &SphereFunction) -> f64 {
    omega.weak_norm
}

/// The two sides of `‖Ω‖_{L^{n,∞}(B(0,2^k), dy/|B|)} = σ(S^{n-1})^{-1/n} ‖Ω‖_{L^{n,∞}(S^{n-1})}`
/// for the degree-zero extension of `Ω`. The ball is cut into radial shells
/// times the angular cells of the quadrature; each piece carries its exact
/// volume.
pub fn ball_weak_norm_identity(omega: &SphereFunction, k: i32) -> Result<(f64, f64)> {
    if !(-30..=30).contains(&k) {
        return Err(Error::InvalidParameter(format!("ball scale 2^{k} out of range")));
    }
    const SHELLS: usize = 64;
    let n = omega.quad.dim() as i32;
    let radius = (k as f64).exp2();
    let mut samples = Vec::with_capacity(SHELLS * omega.values.len());
    let mut volume = CompensatedSum::new();
    for m in 0..SHELLS {
        let a = radius * m as f64 / SHELLS as f64;
        let b = radius * (m + 1) as f64 / SHELLS as f64;
        let shell = (b.powi(n) - a.powi(n)) / n as f64;
        for (v, s) in omega.values.iter().zip(omega.quad.weights()) {
            samples.push((*v, s * shell));
            volume.add(s * shell);
        }
    }
    let total = volume.value();
    for s in samples.iter_mut() {
        s.1 /= total;
    }
    let idx = LorentzIndex { p: n as f64, q: f64::INFINITY };
    let lhs = StepDistribution::from_samples(samples).lorentz(idx);
    let rhs = omega.quad.total_weight().powf(-1.0 / n as f64) * omega.weak_norm;
    Ok((lhs, rhs))
}

fn check_omegas(grid: &GridSpec, omegas: &[&SphereFunction]) -> Result<()> {
    let Some(first) = omegas.first() else {
        return Err(Error::InvalidParameter("no kernel given".into()));
    };
    for o in omegas {
        if o.quad.dim() != grid.dim() {
            return Err(Error::UnsupportedDimension(o.quad.dim()));
        }
        if o.quad != first.quad {
            return Err(Error::InvalidParameter("kernels must share one quadrature".into()));
        }
    }
    Ok(())
}

fn batch_of(omegas: &[&SphereFunction]) -> AngularBatch {
    let k = omegas.len();
    let m = omegas[0].values.len();
    let mut vals = vec![0.0; m * k];
    for (c, o) in omegas.iter().enumerate() {
        for i in 0..m {
            vals[i * k + c] = o.values[i];
        }
    }
    AngularBatch::new(&omegas[0].quad, &vals, k)
}

/// Smallest admissible truncation radius on `grid`.
pub fn truncation_floor(grid: &GridSpec) -> f64 {
    grid.spacing() / 2.0
}

/// `T^t_Ω f(x) = ∫_{|y|>t} Ω(y') |y|^{-n} f(x - y) dy` for several kernels at once.
pub fn truncated_rough_batch(f: &ScalarField, omegas: &[&SphereFunction], t: f64) -> Result<Vec<ScalarField>> {
    let grid = *f.grid();
    check_omegas(&grid, omegas)?;
    if !(t.is_finite() && t >= truncation_floor(&grid) * (1.0 - 1e-12)) {
        return Err(Error::InvalidParameter(format!("truncation {t} below the grid floor {}", truncation_floor(&grid))));
    }
    let k = omegas.len();
    let Some(support) = Support::of(f) else {
        return Ok(vec![ScalarField::zeros(grid); k]);
    };
    let batch = batch_of(omegas);
    let flat: Vec<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map_init(Vec::new, |sums, p| {
            let x = grid.center(p);
            polar::shell_sums(&support, &batch, t, &x, false, sums);
            let mut out = vec![0.0; k];
            for chunk in sums.chunks(k) {
                for c in 0..k {
                    out[c] += chunk[c] * polar::DU;
                }
            }
            out
        })
        .collect();
    unzip_fields(grid, flat, k)
}

pub fn truncated_rough(f: &ScalarField, omega: &SphereFunction, t: f64) -> Result<ScalarField> {
    Ok(truncated_rough_batch(f, &[omega], t)?.remove(0))
}

fn unzip_fields(grid: GridSpec, flat: Vec<Vec<f64>>, k: usize) -> Result<Vec<ScalarField>> {
    (0..k).map(|c| ScalarField::from_values(grid, flat.iter().map(|v| v[c]).collect())).collect()
}

/// `T★_Ω f = sup_t |T^t_Ω f|` over `t = (h/2) 2^{j/2}` at the given points.
pub fn maximal_rough_at(f: &ScalarField, omegas: &[&SphereFunction], points: &[Point]) -> Result<Vec<Vec<f64>>> {
    let grid = *f.grid();
    check_omegas(&grid, omegas)?;
    for o in omegas {
        if !o.mean_zero {
            log::warn!("maximal truncation of a kernel without mean zero");
        }
    }
    let k = omegas.len();
    let Some(support) = Support::of(f) else {
        return Ok(vec![vec![0.0; k]; points.len()]);
    };
    let batch = batch_of(omegas);
    let base = truncation_floor(&grid);
    Ok(points
        .par_iter()
        .map_init(Vec::new, |sums, x| {
            let first = polar::shell_sums(&support, &batch, base, x, false, sums);
            let mut out = vec![0.0; k];
            polar::max_truncation(sums, first, k, &mut out);
            out
        })
        .collect())
}

/// `T★_Ω f` on every cell center, for several kernels at once.
pub fn maximal_rough_batch(f: &ScalarField, omegas: &[&SphereFunction]) -> Result<Vec<ScalarField>> {
    let grid = *f.grid();
    let points: Vec<Point> = (0..grid.len()).map(|p| grid.center(p)).collect();
    let flat = maximal_rough_at(f, omegas, &points)?;
    unzip_fields(grid, flat, omegas.len())
}

pub fn maximal_rough(f: &ScalarField, omega: &SphereFunction) -> Result<ScalarField> {
    Ok(maximal_rough_batch(f, &[omega])?.remove(0))
}

/// Contributions of the dyadic annuli `2^i t ≤ |y| < 2^{i+1} t` to
/// `T^t_Ω f(x)`; their sum is the truncated integral.
pub fn annulus_contributions(f: &ScalarField, omega: &SphereFunction, t: f64, x: &Point) -> Result<Vec<f64>> {
    let grid = *f.grid();
    check_omegas(&grid, &[omega])?;
    if t < truncation_floor(&grid) * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!("truncation {t} below the grid floor")));
    }
    let Some(support) = Support::of(f) else {
        return Ok(Vec::new());
    };
    let batch = batch_of(&[omega]);
    let mut sums = Vec::new();
    let first = polar::shell_sums(&support, &batch, t, x, false, &mut sums);
    let per_octave = polar::PER_OCTAVE as i64;
    let mut out = Vec::new();
    for (s, v) in sums.iter().enumerate() {
        let octave = ((first + s as i64).div_euclid(per_octave)) as usize;
        if out.len() <= octave {
            out.resize(octave + 1, 0.0);
        }
        out[octave] += v * polar::DU;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RieszMode {
    /// Principal value, truncated at half a cell.
    Pv,
    /// Supremum of absolute truncations.
    Maximal,
}

/// `Ω_j(y') = y'_j` on the nodes of `quad`.
pub fn riesz_kernel(quad: &SphereQuadrature, j: usize) -> Result<SphereFunction> {
    if j >= quad.dim() {
        return Err(Error::InvalidParameter(format!("Riesz index {j} in dimension {}", quad.dim())));
    }
    SphereFunction::from_fn(quad.clone(), |y| y[j])
}

/// `R_j f(x) = pv ∫ y_j |y|^{-n-1} f(x - y) dy`, i.e. `(1-n)^{-1} ∂_j I_1 f`.
pub fn riesz_transform(f: &ScalarField, j: usize, mode: RieszMode, quad: &SphereQuadrature) -> Result<ScalarField> {
    if f.grid().dim() < 2 {
        return Err(Error::UnsupportedDimension(f.grid().dim()));
    }
    let omega = riesz_kernel(quad, j)?;
    match mode {
        RieszMode::Pv => truncated_rough(f, &omega, truncation_floor(f.grid())),
        RieszMode::Maximal => maximal_rough(f, &omega),
    }
}

/// A complex field as a pair of real fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexField {
    pub re: ScalarField,
    pub im: ScalarField,
}

impl ComplexField {
    pub fn new(re: ScalarField, im: ScalarField) -> Result<Self> {
        if re.grid() != im.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { re, im })
    }

    pub fn real(re: ScalarField) -> Self {
        let im = ScalarField::zeros(*re.grid());
        Self { re, im }
    }

    pub fn grid(&self) -> &GridSpec {
        self.re.grid()
    }

    pub fn modulus(&self) -> ScalarField {
        self.re.zip_with(&self.im, f64::hypot).expect("same grid")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BeurlingMode {
    /// `Sf = pv -(1/π) ∫ f(z - w) w^{-2} dA(w)`.
    S,
    /// `sup_t |S^t f|`, returned as the real part.
    SMax,
    /// `Cf(z) = (1/π) ∫ f(ζ) (z - ζ)^{-1} dA(ζ)`.
    Cauchy,
}

/// The Ahlfors–Beurling operator, its maximal truncation, or the Cauchy
/// transform in the plane.
pub fn beurling(f: &ComplexField, mode: BeurlingMode, quad: &SphereQuadrature) -> Result<ComplexField> {
    let grid = *f.grid();
    if grid.dim() != 2 {
        return Err(Error::UnsupportedDimension(grid.dim()));
    }
    if quad.dim() != 2 {
        return Err(Error::UnsupportedDimension(quad.dim()));
    }
    if mode == BeurlingMode::Cauchy {
        return cauchy(f);
    }
    // Ω(θ) = -(1/π) e^{-2iθ} = ωr + i ωi
    let wr = SphereFunction::from_fn(quad.clone(), |y| -(y[0] * y[0] - y[1] * y[1]) / PI)?;
    let wi = SphereFunction::from_fn(quad.clone(), |y| 2.0 * y[0] * y[1] / PI)?;
    let parts = [&f.re, &f.im];
    match mode {
        BeurlingMode::S => {
            let t = truncation_floor(&grid);
            let u = truncated_rough_batch(parts[0], &[&wr, &wi], t)?;
            let v = truncated_rough_batch(parts[1], &[&wr, &wi], t)?;
            let re = u[0].zip_with(&v[1], |a, b| a - b)?;
            let im = v[0].zip_with(&u[1], |a, b| a + b)?;
            ComplexField::new(re, im)
        }
        BeurlingMode::SMax => {
            let batch = batch_of(&[&wr, &wi]);
            let base = truncation_floor(&grid);
            let supports = [Support::of(parts[0]), Support::of(parts[1])];
            let values: Vec<f64> = (0..grid.len())
                .into_par_iter()
                .map_init(
                    || (Vec::new(), Vec::new()),
                    |(su, sv), p| {
                        let x = grid.center(p);
                        let fu = supports[0].as_ref().map(|s| polar::shell_sums(s, &batch, base, &x, false, su));
                        let fv = supports[1].as_ref().map(|s| polar::shell_sums(s, &batch, base, &x, false, sv));
                        if fu.is_none() {
                            su.clear();
                        }
                        if fv.is_none() {
                            sv.clear();
                        }
                        complex_max_truncation(su, fu.unwrap_or(0), sv, fv.unwrap_or(0))
                    },
                )
                .collect();
            Ok(ComplexField::real(ScalarField::from_values(grid, values)?))
        }
        BeurlingMode::Cauchy => unreachable!(),
    }
}

/// `sup_j |S^{t_j}|` from the shell sums of `u` and `v` against `(ωr, ωi)`.
fn complex_max_truncation(su: &[f64], fu: i64, sv: &[f64], fv: i64) -> f64 {
    let lo = match (su.is_empty(), sv.is_empty()) {
        (true, true) => return 0.0,
        (false, true) => fu,
        (true, false) => fv,
        (false, false) => fu.min(fv),
    };
    let hi = (fu + (su.len() / 2) as i64).max(fv + (sv.len() / 2) as i64);
    let get = |s: &[f64], first: i64, m: i64, c: usize| {
        let idx = m - first;
        if idx < 0 || idx as usize >= s.len() / 2 {
            0.0
        } else {
            s[idx as usize * 2 + c]
        }
    };
    let (mut re, mut im) = (0.0, 0.0);
    let mut best: f64 = 0.0;
    for m in (lo..hi).rev() {
        let (ur, ui) = (get(su, fu, m, 0), get(su, fu, m, 1));
        let (vr, vi) = (get(sv, fv, m, 0), get(sv, fv, m, 1));
        re += (ur - vi) * polar::DU;
        im += (vr + ui) * polar::DU;
        if m % polar::SHELLS_PER_LEVEL == 0 || m == lo {
            best = best.max(re.hypot(im));
        }
    }
    best
}

fn cauchy(f: &ComplexField) -> Result<ComplexField> {
    let grid = *f.grid();
    let h = grid.spacing();
    let n = grid.cells();
    let kr = move |o: [i64; 3]| {
        let r2 = (o[0] * o[0] + o[1] * o[1]) as f64;
        if r2 == 0.0 {
            0.0
        } else {
            o[0] as f64 / (r2 * h) * h * h / PI
        }
    };
    let ki = move |o: [i64; 3]| {
        let r2 = (o[0] * o[0] + o[1] * o[1]) as f64;
        if r2 == 0.0 {
            0.0
        } else {
            -(o[1] as f64) / (r2 * h) * h * h / PI
        }
    };
    let conv = |v: &ScalarField, k: &dyn Fn([i64; 3]) -> f64| fft_convolve(v.values(), 2, n, n, 0, k);
    let (ur, ui) = (conv(&f.re, &kr), conv(&f.re, &ki));
    let (vr, vi) = (conv(&f.im, &kr), conv(&f.im, &ki));
    let re: Vec<f64> = ur.iter().zip(&vi).map(|(a, b)| a - b).collect();
    let im: Vec<f64> = vr.iter().zip(&ui).map(|(a, b)| a + b).collect();
    ComplexField::new(ScalarField::from_values(grid, re)?, ScalarField::from_values(grid, im)?)
}
