//! Uniform cell-centered grids over `[-R, R]^n`, scalar and vector fields
//! sampled on them, smooth compactly supported bumps, finite-difference
//! gradients and weighted Lebesgue norms.
//!
//! All integrals are midpoint Riemann sums over cell centers. Values outside
//! the box are zero: fields are compactly supported strictly inside it.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, Shape};

/// A point of `R^n`, `n <= 3`; unused trailing coordinates are zero.
pub type Point = [f64; 3];

pub fn norm(x: &Point) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
}

pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Cell-centered grid: `cells` cells per axis over `[-half_width, half_width]^dim`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    cells: usize,
    half_width: f64,
}

impl GridSpec {
    pub fn new(dim: usize, cells: usize, half_width: f64) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if cells < 2 || !cells.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("cells per axis must be even and >= 2, got {cells}")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width must be positive, got {half_width}")));
        }
        Ok(Self { dim, cells, half_width })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Total number of cells, `N^n`.
    pub fn len(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Shape {
        Shape::cube(self.dim, self.cells)
    }

    /// Multi-index of a flat (row-major) index; unused axes are 0.
    #[inline]
    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for ax in (0..self.dim).rev() {
            idx[ax] = rest % self.cells;
            rest /= self.cells;
        }
        idx
    }

    #[inline]
    pub fn flat_index(&self, idx: [usize; 3]) -> usize {
        let mut flat = 0;
        for &i in idx.iter().take(self.dim) {
            flat = flat * self.cells + i;
        }
        flat
    }

    #[inline]
    pub fn coordinate(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing()
    }

    #[inline]
    pub fn center(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for ax in 0..self.dim {
            x[ax] = self.coordinate(idx[ax]);
        }
        x
    }

    /// Index of the cell whose half-open extent contains coordinate `x`
    /// (may be out of range).
    #[inline]
    pub fn cell_of(&self, x: f64) -> i64 {
        ((x + self.half_width) / self.spacing()).floor() as i64
    }

    pub fn contains(&self, x: &Point) -> bool {
        (0..self.dim).all(|ax| x[ax].abs() <= self.half_width)
    }

    /// Same spacing, twice the cells (the refinement `h -> h/2` at fixed `R`).
    pub fn refined(&self) -> Self {
        Self { cells: self.cells * 2, ..*self }
    }

    /// A grid with the same spacing over a different box. Cell centers of
    /// the two grids are aligned.
    pub fn with_half_width(&self, half_width: f64) -> Result<Self> {
        let cells = (2.0 * half_width / self.spacing()).round() as usize;
        let grid = Self::new(self.dim, cells, half_width)?;
        if (grid.spacing() - self.spacing()).abs() > 1e-12 * self.spacing() {
            return Err(Error::InvalidGrid(format!(
                "half-width {half_width} is not an even multiple of the spacing {}",
                self.spacing()
            )));
        }
        Ok(grid)
    }

    /// True when the other grid has the same spacing and aligned cell centers.
    pub fn is_aligned_with(&self, other: &GridSpec) -> bool {
        self.dim == other.dim && (self.spacing() - other.spacing()).abs() <= 1e-12 * self.spacing()
    }
}

/// A real function sampled at the cell centers of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    grid: GridSpec,
    values: Vec<f64>,
    support_radius: Option<f64>,
}

impl ScalarField {
    pub fn from_values(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { grid, values, support_radius: None })
    }

    pub fn from_fn<F: Fn(&Point) -> f64>(grid: GridSpec, f: F) -> Result<Self> {
        let values = (0..grid.len()).map(|k| f(&grid.center(k))).collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, values: vec![0.0; grid.len()], support_radius: None }
    }

    pub fn constant(grid: GridSpec, c: f64) -> Self {
        Self { grid, values: vec![c; grid.len()], support_radius: None }
    }

    /// Records that the field vanishes at every cell with `|x| > radius`.
    /// Cells that violate the claim are zeroed.
    pub fn with_support_radius(mut self, radius: f64) -> Self {
        for k in 0..self.values.len() {
            if norm(&self.grid.center(k)) > radius {
                self.values[k] = 0.0;
            }
        }
        self.support_radius = Some(radius);
        self
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn support_radius(&self) -> Option<f64> {
        self.support_radius
    }

    pub fn value_at(&self, idx: [usize; 3]) -> f64 {
        self.values[self.grid.flat_index(idx)]
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Self {
        Self { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect(), support_radius: None }
    }

    pub fn abs(&self) -> Self {
        let mut out = self.map(f64::abs);
        out.support_radius = self.support_radius;
        out
    }

    pub fn scale(&self, lambda: f64) -> Self {
        let mut out = self.map(|v| lambda * v);
        out.support_radius = self.support_radius;
        out
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &Self, f: F) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
            support_radius: None,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Midpoint-rule integral over the box.
    pub fn integral(&self) -> f64 {
        let mut acc = CompensatedSum::new();
        for &v in &self.values {
            acc.add(v);
        }
        acc.value() * self.grid.cell_volume()
    }

    /// Smallest ball (center, radius) found to contain every nonzero cell,
    /// or `None` for the zero field. The radius includes half a cell diagonal.
    pub fn support_ball(&self) -> Option<(Point, f64)> {
        let dim = self.grid.dim();
        let mut lo = [usize::MAX; 3];
        let mut hi = [0usize; 3];
        let mut any = false;
        for (k, &v) in self.values.iter().enumerate() {
            if v != 0.0 {
                any = true;
                let idx = self.grid.multi_index(k);
                for ax in 0..dim {
                    lo[ax] = lo[ax].min(idx[ax]);
                    hi[ax] = hi[ax].max(idx[ax]);
                }
            }
        }
        if !any {
            return None;
        }
        let h = self.grid.spacing();
        let mut center = [0.0; 3];
        let mut r2 = 0.0;
        for ax in 0..dim {
            let a = self.grid.coordinate(lo[ax]) - 0.5 * h;
            let b = self.grid.coordinate(hi[ax]) + 0.5 * h;
            center[ax] = 0.5 * (a + b);
            r2 += (0.5 * (b - a)).powi(2);
        }
        Some((center, r2.sqrt()))
    }

    /// Multilinear interpolation between cell centers, with zero beyond the
    /// outermost centers' neighbours.
    #[inline]
    pub fn interpolate(&self, x: &Point) -> f64 {
        interpolate_values(&self.grid, &self.values, x)
    }
}

#[inline]
pub(crate) fn interpolate_values(grid: &GridSpec, values: &[f64], x: &Point) -> f64 {
    let dim = grid.dim();
    let n = grid.cells() as i64;
    let inv_h = 1.0 / grid.spacing();
    let r = grid.half_width();
    let mut base = [0i64; 3];
    let mut frac = [0.0f64; 3];
    for ax in 0..dim {
        let u = (x[ax] + r) * inv_h - 0.5;
        let f = u.floor();
        base[ax] = f as i64;
        frac[ax] = u - f;
        if base[ax] < -1 || base[ax] >= n {
            return 0.0;
        }
    }
    let corners = 1usize << dim;
    let mut acc = 0.0;
    for c in 0..corners {
        let mut w = 1.0;
        let mut flat = 0usize;
        let mut inside = true;
        for ax in 0..dim {
            let bit = (c >> ax) & 1;
            let i = base[ax] + bit as i64;
            if i < 0 || i >= n {
                inside = false;
                break;
            }
            w *= if bit == 1 { frac[ax] } else { 1.0 - frac[ax] };
            flat = flat * n as usize + i as usize;
        }
        if inside && w != 0.0 {
            acc += w * values[flat];
        }
    }
    acc
}

/// `n` component fields on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    components: Vec<ScalarField>,
}

impl VectorField {
    pub fn new(components: Vec<ScalarField>) -> Result<Self> {
        let Some(first) = components.first() else {
            return Err(Error::InvalidParameter("vector field needs components".into()));
        };
        if components.len() != first.grid().dim() || components.iter().any(|c| c.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[ScalarField] {
        &self.components
    }

    pub fn component(&self, j: usize) -> &ScalarField {
        &self.components[j]
    }

    pub fn grid(&self) -> &GridSpec {
        self.components[0].grid()
    }

    /// Pointwise Euclidean length `|∇f|`.
    pub fn magnitude(&self) -> ScalarField {
        let grid = *self.grid();
        let values =
            (0..grid.len()).map(|k| self.components.iter().map(|c| c.values[k] * c.values[k]).sum::<f64>().sqrt()).collect();
        ScalarField { grid, values, support_radius: None }
    }
}

/// Value of the standard bump `A exp(1 - 1/(1 - |x-c|^2/ρ^2))`.
pub fn bump_profile(x: &Point, center: &Point, radius: f64, amplitude: f64) -> f64 {
    let d = sub(x, center);
    let s2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (radius * radius);
    if s2 >= 1.0 {
        0.0
    } else {
        amplitude * (1.0 - 1.0 / (1.0 - s2)).exp()
    }
}

/// Analytic gradient of [`bump_profile`].
pub fn bump_gradient(x: &Point, center: &Point, radius: f64, amplitude: f64) -> Point {
    let d = sub(x, center);
    let s2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) / (radius * radius);
    if s2 >= 1.0 {
        return [0.0; 3];
    }
    let f = amplitude * (1.0 - 1.0 / (1.0 - s2)).exp();
    let c = -2.0 * f / (radius * radius * (1.0 - s2) * (1.0 - s2));
    [c * d[0], c * d[1], c * d[2]]
}

/// A smooth bump supported in `B(center, radius)`; the ball must fit in the box.
pub fn make_bump(grid: &GridSpec, center: &Point, radius: f64, amplitude: f64) -> Result<ScalarField> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter(format!("bump radius {radius}")));
    }
    let dim = grid.dim();
    let excess = (0..dim).map(|ax| center[ax].abs() + radius - grid.half_width()).fold(f64::NEG_INFINITY, f64::max);
    if excess > 0.0 {
        return Err(Error::BumpOutsideDomain { center: center[..dim].to_vec(), radius, half_width: grid.half_width(), excess });
    }
    let field = ScalarField::from_fn(*grid, |x| bump_profile(x, center, radius, amplitude))?;
    Ok(field.with_support_radius(norm(center) + radius))
}

/// Central differences in the interior, second-order one-sided stencils on
/// the first and last cell of each axis.
pub fn gradient(f: &ScalarField) -> VectorField {
    let grid = *f.grid();
    let dim = grid.dim();
    let n = grid.cells();
    let h = grid.spacing();
    let stride = |ax: usize| n.pow((dim - 1 - ax) as u32);
    let v = f.values();
    let components = (0..dim)
        .map(|ax| {
            let s = stride(ax);
            let values = (0..grid.len())
                .map(|k| {
                    let i = grid.multi_index(k)[ax];
                    if n < 3 {
                        return if i == 0 { (v[k + s] - v[k]) / h } else { (v[k] - v[k - s]) / h };
                    }
                    if i == 0 {
                        (-3.0 * v[k] + 4.0 * v[k + s] - v[k + 2 * s]) / (2.0 * h)
                    } else if i == n - 1 {
                        (3.0 * v[k] - 4.0 * v[k - s] + v[k - 2 * s]) / (2.0 * h)
                    } else {
                        (v[k + s] - v[k - s]) / (2.0 * h)
                    }
                })
                .collect();
            ScalarField { grid, values, support_radius: None }
        })
        .collect();
    VectorField { components }
}

/// `(Σ |f|^p w h^n)^{1/p}` with `w` a measure density (1 when absent);
/// `p = ∞` gives `max |f|`.
pub fn lp_norm(f: &ScalarField, p: f64, weight: Option<&ScalarField>) -> Result<f64> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::InvalidParameter(format!("exponent p = {p} must be positive")));
    }
    if let Some(w) = weight {
        if w.grid() != f.grid() {
            return Err(Error::GridMismatch);
        }
        if let Some(index) = w.values().iter().position(|&x| x <= 0.0) {
            return Err(Error::NonPositiveWeight { index, value: w.values()[index] });
        }
    }
    if p.is_infinite() {
        return Ok(f.max_abs());
    }
    let mut acc = CompensatedSum::new();
    for (k, &v) in f.values().iter().enumerate() {
        let w = weight.map_or(1.0, |w| w.values()[k]);
        acc.add(v.abs().powf(p) * w);
    }
    Ok((acc.value() * f.grid().cell_volume()).powf(1.0 / p))
}

/// Text grid format: a header line `n N R`, then the `N^n` values in
/// row-major order, one per line. Values are written in shortest
/// round-trip form so reading back is bit-exact.
pub fn format_grid(field: &ScalarField) -> String {
    let g = field.grid();
    let mut out = String::with_capacity(field.values().len() * 24);
    let _ = writeln!(out, "{} {} {}", g.dim(), g.cells(), g.half_width());
    for v in field.values() {
        let _ = writeln!(out, "{v:e}");
    }
    out
}

pub fn parse_grid(text: &str) -> Result<ScalarField> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::GridFormat("missing header".into()))?;
    let parts: Vec<&str> = header.split_whitespace().collect();
    if parts.len() != 3 {
        return Err(Error::GridFormat(format!("bad header `{header}`")));
    }
    let bad = |what: &str| Error::GridFormat(format!("bad {what} in header `{header}`"));
    let dim: usize = parts[0].parse().map_err(|_| bad("dimension"))?;
    let cells: usize = parts[1].parse().map_err(|_| bad("cell count"))?;
    let half_width: f64 = parts[2].parse().map_err(|_| bad("half-width"))?;
    let grid = GridSpec::new(dim, cells, half_width)?;
    let values = lines
        .enumerate()
        .map(|(k, l)| l.trim().parse::<f64>().map_err(|_| Error::GridFormat(format!("value {k}: `{l}`"))))
        .collect::<Result<Vec<f64>>>()?;
    if values.len() != grid.len() {
        return Err(Error::GridFormat(format!("expected {} values, found {}", grid.len(), values.len())));
    }
    ScalarField::from_values(grid, values)
}

pub fn write_grid_file(path: &Path, field: &ScalarField) -> Result<()> {
    std::fs::write(path, format_grid(field))?;
    Ok(())
}

pub fn read_grid_file(path: &Path) -> Result<ScalarField> {
    parse_grid(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grid2(n: usize) -> GridSpec {
        GridSpec::new(2, n, 2.0).unwrap()
    }

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(3, 8, 1.0).unwrap();
        assert_eq!(g.len(), 512);
        assert!((g.spacing() - 0.25).abs() < 1e-15);
        let k = g.flat_index([1, 2, 3]);
        assert_eq!(g.multi_index(k), [1, 2, 3]);
        let x = g.center(k);
        assert!((x[0] + 0.625).abs() < 1e-15 && (x[2] + 0.125).abs() < 1e-15);
        assert!(GridSpec::new(2, 7, 1.0).is_err());
        assert!(GridSpec::new(4, 8, 1.0).is_err());
        assert!(GridSpec::new(2, 8, 0.0).is_err());
    }

    #[test]
    fn bump_pointwise_values() {
        let c = [0.3, -0.2, 0.0];
        let a = 1.7;
        assert!((bump_profile(&c, &c, 0.8, a) - a).abs() < 1e-15);
        let edge = [c[0] + 0.8, c[1], 0.0];
        assert_eq!(bump_profile(&edge, &c, 0.8, a), 0.0);
        let mid = [c[0] + 0.8 / 2f64.sqrt(), c[1], 0.0];
        assert!((bump_profile(&mid, &c, 0.8, a) - a * (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn bump_outside_box_is_rejected_with_bound() {
        let g = grid2(16);
        match make_bump(&g, &[1.5, 0.0, 0.0], 1.0, 1.0) {
            Err(Error::BumpOutsideDomain { excess, .. }) => assert!((excess - 0.5).abs() < 1e-12),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn bump_records_support() {
        let g = grid2(32);
        let f = make_bump(&g, &[0.5, 0.0, 0.0], 1.0, 1.0).unwrap();
        let rho = f.support_radius().unwrap();
        for k in 0..g.len() {
            if norm(&g.center(k)) > rho {
                assert_eq!(f.values()[k], 0.0);
            }
        }
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let f = ScalarField::constant(grid2(8), 3.0);
        let g = gradient(&f);
        assert!(g.components().iter().all(|c| c.max_abs() < 1e-12));
    }

    #[test]
    fn gradient_of_linear_field_is_exact() {
        let g = grid2(16);
        let f = ScalarField::from_fn(g, |x| x[0]).unwrap();
        let d = gradient(&f);
        assert!(d.component(0).values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        assert!(d.component(1).max_abs() < 1e-12);
    }

    fn bump_gradient_error(n: usize) -> f64 {
        let g = GridSpec::new(2, n, 2.0).unwrap();
        let c = [0.1, -0.05, 0.0];
        let f = make_bump(&g, &c, 1.2, 1.0).unwrap();
        let d = gradient(&f);
        let mut err: f64 = 0.0;
        for k in 0..g.len() {
            let exact = bump_gradient(&g.center(k), &c, 1.2, 1.0);
            for ax in 0..2 {
                err = err.max((d.component(ax).values()[k] - exact[ax]).abs());
            }
        }
        err
    }

    #[test]
    fn bump_gradient_converges_at_second_order() {
        let e1 = bump_gradient_error(64);
        let e2 = bump_gradient_error(128);
        let e3 = bump_gradient_error(256);
        let order = (e2 / e3).log2();
        assert!(e1 > e2 && e2 > e3);
        assert!(order >= 1.9, "measured order {order}");
    }

    #[test]
    fn indicator_norm_is_cube_volume_power() {
        let g = grid2(32);
        // cube [-0.5, 0.5)^2 covers exactly 8x8 cells of side 1/8
        let f = ScalarField::from_fn(g, |x| if x[0].abs() < 0.5 && x[1].abs() < 0.5 { 1.0 } else { 0.0 }).unwrap();
        for p in [1.0, 2.0, 3.5] {
            assert!((lp_norm(&f, p, None).unwrap() - 1.0).abs() < 1e-12);
        }
        assert_eq!(lp_norm(&f, f64::INFINITY, None).unwrap(), 1.0);
        assert!(lp_norm(&f, 0.0, None).is_err());
        assert!(lp_norm(&f, -1.0, None).is_err());
    }

    /// Radial oracle for the L^2 norm of the unit bump in the plane:
    /// ||f||_2^2 = 2π ∫_0^1 exp(2 - 2/(1-r^2)) r dr, by composite Simpson.
    fn bump_l2_oracle() -> f64 {
        let m = 200_000;
        let h = 1.0 / m as f64;
        let g = |r: f64| {
            if r >= 1.0 {
                0.0
            } else {
                (2.0 - 2.0 / (1.0 - r * r)).exp() * r
            }
        };
        let mut s = g(0.0) + g(1.0);
        for k in 1..m {
            s += g(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        (2.0 * std::f64::consts::PI * s * h / 3.0).sqrt()
    }

    #[test]
    fn bump_l2_norm_matches_radial_quadrature() {
        let g = GridSpec::new(2, 256, 1.5).unwrap();
        let f = make_bump(&g, &[0.0; 3], 1.0, 1.0).unwrap();
        let oracle = bump_l2_oracle();
        assert!((lp_norm(&f, 2.0, None).unwrap() - oracle).abs() < 1e-3);
    }

    #[test]
    fn weighted_norm_uses_density() {
        let g = grid2(8);
        let f = ScalarField::constant(g, 2.0);
        let w = ScalarField::constant(g, 4.0);
        let plain = lp_norm(&f, 2.0, None).unwrap();
        let weighted = lp_norm(&f, 2.0, Some(&w)).unwrap();
        assert!((weighted - 2.0 * plain).abs() < 1e-12);
        let bad = ScalarField::constant(g, 0.0);
        assert!(lp_norm(&f, 2.0, Some(&bad)).is_err());
    }

    #[test]
    fn interpolation_is_exact_for_linear_fields() {
        let g = grid2(16);
        let f = ScalarField::from_fn(g, |x| 2.0 * x[0] - x[1] + 0.5).unwrap();
        for x in [[0.13, -0.71, 0.0], [1.2, 0.9, 0.0], [-1.5, 1.5, 0.0]] {
            assert!((f.interpolate(&x) - (2.0 * x[0] - x[1] + 0.5)).abs() < 1e-12);
        }
        assert_eq!(f.interpolate(&[5.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn grid_file_round_trips_bit_exactly() {
        let g = GridSpec::new(2, 8, 1.25).unwrap();
        let f = ScalarField::from_fn(g, |x| (x[0] * 3.1).sin() * 1e-7 + x[1].exp()).unwrap();
        let text = format_grid(&f);
        assert!(text.starts_with("2 8 1.25\n"));
        let back = parse_grid(&text).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert!(parse_grid("2 8 1.25\n1.0\n").is_err());
    }

    proptest! {
        #[test]
        fn lp_norm_is_homogeneous(lambda in -50.0f64..50.0, p in 0.5f64..6.0, seed in 0u64..1000) {
            let g = GridSpec::new(2, 8, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x| ((x[0] * 7.0 + seed as f64).sin() + x[1]).cos()).unwrap();
            let a = lp_norm(&f.scale(lambda), p, None).unwrap();
            let b = lambda.abs() * lp_norm(&f, p, None).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b.max(1e-300));
        }

        #[test]
        fn lp_norm_triangle_inequality(p in 1.0f64..5.0, s1 in 0.0f64..10.0, s2 in 0.0f64..10.0) {
            let g = GridSpec::new(2, 8, 1.0).unwrap();
            let f = ScalarField::from_fn(g, |x| (x[0] * s1).sin() - x[1]).unwrap();
            let h = ScalarField::from_fn(g, |x| (x[1] * s2).cos() * x[0]).unwrap();
            let lhs = lp_norm(&f.add(&h).unwrap(), p, None).unwrap();
            let rhs = lp_norm(&f, p, None).unwrap() + lp_norm(&h, p, None).unwrap();
            prop_assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }
}
