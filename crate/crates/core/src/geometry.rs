//! Cubes, balls, cube families and sphere quadratures.
//!
//! Cubes are lattice-aligned: a cube covers the cells `lo[k] .. lo[k] + side`
//! along each axis, so membership of a cell center is half-open by
//! construction. Cubes may stick out of the box; the part outside holds zeros.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{norm, sub, GridSpec, Point, ScalarField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cube {
    pub dim: usize,
    pub lo: [i64; 3],
    pub side: usize,
}

impl Cube {
    pub fn new(dim: usize, lo: [i64; 3], side: usize) -> Self {
        let mut lo = lo;
        lo[dim..].fill(0);
        Self { dim, lo, side }
    }

    /// The lattice cube of `side` cells whose center is nearest to `center`.
    pub fn centered(grid: &GridSpec, center: &Point, side: usize) -> Self {
        let mut lo = [0i64; 3];
        let h = grid.spacing();
        for (ax, slot) in lo.iter_mut().enumerate().take(grid.dim()) {
            let first = (center[ax] + grid.half_width()) / h - side as f64 / 2.0;
            *slot = first.round() as i64;
        }
        Self::new(grid.dim(), lo, side)
    }

    pub fn center(&self, grid: &GridSpec) -> Point {
        let h = grid.spacing();
        let mut c = [0.0; 3];
        for (ax, slot) in c.iter_mut().enumerate().take(self.dim) {
            *slot = -grid.half_width() + (self.lo[ax] as f64 + self.side as f64 / 2.0) * h;
        }
        c
    }

    pub fn sidelength(&self, grid: &GridSpec) -> f64 {
        self.side as f64 * grid.spacing()
    }

    pub fn volume(&self, grid: &GridSpec) -> f64 {
        self.sidelength(grid).powi(self.dim as i32)
    }

    /// Number of cells, counting those outside the box.
    pub fn cell_count(&self) -> usize {
        self.side.pow(self.dim as u32)
    }

    pub fn contains_index(&self, idx: [usize; 3]) -> bool {
        (0..self.dim).all(|ax| {
            let i = idx[ax] as i64;
            i >= self.lo[ax] && i < self.lo[ax] + self.side as i64
        })
    }

    pub fn contains_point(&self, grid: &GridSpec, x: &Point) -> bool {
        let h = grid.spacing();
        (0..self.dim).all(|ax| {
            let a = -grid.half_width() + self.lo[ax] as f64 * h;
            x[ax] >= a && x[ax] < a + self.side as f64 * h
        })
    }

    pub fn inside_box(&self, grid: &GridSpec) -> bool {
        (0..self.dim).all(|ax| self.lo[ax] >= 0 && self.lo[ax] + self.side as i64 <= grid.cells() as i64)
    }

    /// Per-axis index range of the cells of the cube that lie in the box.
    pub fn clipped_range(&self, grid: &GridSpec) -> Option<[(usize, usize); 3]> {
        let n = grid.cells() as i64;
        let mut r = [(0usize, 1usize); 3];
        for ax in 0..self.dim {
            let a = self.lo[ax].max(0);
            let b = (self.lo[ax] + self.side as i64).min(n);
            if a >= b {
                return None;
            }
            r[ax] = (a as usize, b as usize);
        }
        Some(r)
    }

    /// Flat indices of the in-box cells of the cube.
    pub fn cells(&self, grid: &GridSpec) -> Vec<usize> {
        let Some(r) = self.clipped_range(grid) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for i0 in r[0].0..r[0].1 {
            for i1 in r[1].0..r[1].1 {
                for i2 in r[2].0..r[2].1 {
                    out.push(grid.flat_index([i0, i1, i2]));
                }
            }
        }
        out
    }

    /// The concentric cube with `factor` times the side.
    pub fn dilate(&self, factor: usize) -> Self {
        let side = self.side * factor;
        let shift = ((side - self.side) / 2) as i64;
        let mut lo = self.lo;
        for v in lo.iter_mut().take(self.dim) {
            *v -= shift;
        }
        Self::new(self.dim, lo, side)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidParameter(format!("ball radius {radius}")));
        }
        Ok(Self { center, radius })
    }

    pub fn contains(&self, x: &Point) -> bool {
        norm(&sub(x, &self.center)) < self.radius
    }

    pub fn inside_box(&self, grid: &GridSpec) -> bool {
        (0..grid.dim()).all(|ax| self.center[ax].abs() + self.radius <= grid.half_width())
    }

    /// Cells whose centers lie in the open ball.
    pub fn cells(&self, grid: &GridSpec) -> Vec<usize> {
        let dim = grid.dim();
        let n = grid.cells() as i64;
        let mut r = [(0usize, 1usize); 3];
        for (ax, slot) in r.iter_mut().enumerate().take(dim) {
            let a = grid.cell_of(self.center[ax] - self.radius).clamp(0, n - 1);
            let b = grid.cell_of(self.center[ax] + self.radius).clamp(0, n - 1);
            *slot = (a as usize, b as usize + 1);
        }
        let mut out = Vec::new();
        for i0 in r[0].0..r[0].1 {
            for i1 in r[1].0..r[1].1 {
                for i2 in r[2].0..r[2].1 {
                    let k = grid.flat_index([i0, i1, i2]);
                    if self.contains(&grid.center(k)) {
                        out.push(k);
                    }
                }
            }
        }
        out
    }
}

/// Where the cubes of a family may sit relative to the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Placement {
    /// Every cube meets the box; used for functions extended by zero.
    Intersecting,
    /// Every cube lies inside the box; used for weights, which are only
    /// known on the box.
    Inside,
}

/// One scale of a family: cubes of `side` cells with lower corners
/// `first + a * stride`, `a = 0..count`, along every axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub side: usize,
    pub stride: usize,
    pub first: i64,
    pub count: usize,
}

impl Scale {
    pub fn corner(&self, a: usize) -> i64 {
        self.first + (a * self.stride) as i64
    }

    /// Corner indices `a` whose cube covers cell `i` along one axis.
    pub fn covering(&self, i: usize) -> Option<(usize, usize)> {
        let i = i as i64;
        let t = self.stride as i64;
        let lo = (i - self.side as i64 + 1 - self.first).div_euclid(t)
            + i64::from((i - self.side as i64 + 1 - self.first).rem_euclid(t) != 0);
        let hi = (i - self.first).div_euclid(t);
        let lo = lo.max(0);
        let hi = hi.min(self.count as i64 - 1);
        (lo <= hi).then_some((lo as usize, hi as usize))
    }
}

/// A finite family of lattice cubes over a grid: for each side `s = 2^j`
/// the cubes whose corners lie on the sublattice of stride `max(1, s/density)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubeFamily {
    grid: GridSpec,
    placement: Placement,
    density: usize,
    scales: Vec<Scale>,
}

impl CubeFamily {
    pub fn new(grid: &GridSpec, j_min: u32, j_max: u32, density: usize, placement: Placement) -> Result<Self> {
        if j_min > j_max || density == 0 || !density.is_power_of_two() {
            return Err(Error::InvalidParameter(format!("cube family scales {j_min}..={j_max}, density {density}")));
        }
        let n = grid.cells() as i64;
        let mut scales = Vec::new();
        for j in j_min..=j_max {
            let side = 1usize << j;
            let stride = (side / density).max(1);
            let t = stride as i64;
            let (lo, hi) = match placement {
                Placement::Intersecting => (1 - side as i64, n - 1),
                Placement::Inside => (0, n - side as i64),
            };
            if hi < lo {
                continue;
            }
            let first = lo.div_euclid(t) * t + if lo.rem_euclid(t) != 0 { t } else { 0 };
            let last = hi.div_euclid(t) * t;
            if last < first {
                continue;
            }
            let count = ((last - first) / t + 1) as usize;
            scales.push(Scale { side, stride, first, count });
        }
        if scales.is_empty() {
            return Err(Error::InvalidParameter("cube family has no scale".into()));
        }
        Ok(Self { grid: *grid, placement, density, scales })
    }

    /// Sides `1 .. 2N`, four corner offsets per side, cubes meeting the box.
    pub fn standard(grid: &GridSpec) -> Self {
        let j_max = (2 * grid.cells()).ilog2();
        Self::new(grid, 0, j_max, 4, Placement::Intersecting).expect("valid family")
    }

    /// Non-overlapping dyadic cubes: exactly one cube per scale contains each point.
    pub fn dyadic(grid: &GridSpec) -> Self {
        let j_max = (2 * grid.cells()).ilog2();
        Self::new(grid, 0, j_max, 1, Placement::Intersecting).expect("valid family")
    }

    /// Sides `1 .. N`, four corner offsets per side, cubes inside the box.
    pub fn for_weights(grid: &GridSpec) -> Self {
        let j_max = grid.cells().ilog2();
        Self::new(grid, 0, j_max, 4, Placement::Inside).expect("valid family")
    }

    /// Dyadic cubes inside the box.
    pub fn dyadic_inside(grid: &GridSpec) -> Self {
        let j_max = grid.cells().ilog2();
        Self::new(grid, 0, j_max, 1, Placement::Inside).expect("valid family")
    }

    /// Sub-family restricted to sides in `[min_side, max_side]`.
    pub fn restrict_sides(&self, min_side: usize, max_side: usize) -> Result<Self> {
        let scales: Vec<Scale> = self.scales.iter().copied().filter(|s| s.side >= min_side && s.side <= max_side).collect();
        if scales.is_empty() {
            return Err(Error::InvalidParameter("restricted family is empty".into()));
        }
        Ok(Self { scales, ..self.clone() })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn placement(&self) -> Placement {
        self.placement
    }

    pub fn density(&self) -> usize {
        self.density
    }

    pub fn scales(&self) -> &[Scale] {
        &self.scales
    }

    pub fn len(&self) -> usize {
        let dim = self.grid.dim() as u32;
        self.scales.iter().map(|s| s.count.pow(dim)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All cubes of one scale.
    pub fn scale_cubes(&self, scale: &Scale) -> Vec<Cube> {
        let dim = self.grid.dim();
        let counts: Vec<usize> = (0..3).map(|ax| if ax < dim { scale.count } else { 1 }).collect();
        let mut out = Vec::with_capacity(counts.iter().product());
        for a0 in 0..counts[0] {
            for a1 in 0..counts[1] {
                for a2 in 0..counts[2] {
                    let mut lo = [0i64; 3];
                    for (ax, a) in [a0, a1, a2].into_iter().enumerate().take(dim) {
                        lo[ax] = scale.corner(a);
                    }
                    out.push(Cube::new(dim, lo, scale.side));
                }
            }
        }
        out
    }

    pub fn cubes(&self) -> Vec<Cube> {
        self.scales.iter().flat_map(|s| self.scale_cubes(s)).collect()
    }

    /// Every cube of the family containing the cell with multi-index `idx`.
    pub fn cubes_containing_index(&self, idx: [usize; 3]) -> Vec<Cube> {
        let dim = self.grid.dim();
        let mut out = Vec::new();
        for s in &self.scales {
            let mut ranges = [(0usize, 0usize); 3];
            let mut ok = true;
            for ax in 0..dim {
                match s.covering(idx[ax]) {
                    Some(r) => ranges[ax] = r,
                    None => ok = false,
                }
            }
            if !ok {
                continue;
            }
            for a0 in ranges[0].0..=ranges[0].1 {
                for a1 in ranges[1].0..=ranges[1].1 {
                    for a2 in ranges[2].0..=ranges[2].1 {
                        let mut lo = [0i64; 3];
                        for (ax, a) in [a0, a1, a2].into_iter().enumerate().take(dim) {
                            lo[ax] = s.corner(a);
                        }
                        out.push(Cube::new(dim, lo, s.side));
                    }
                }
            }
        }
        out
    }

    /// Every cube of the family containing the point `x` of the box.
    pub fn cubes_containing(&self, x: &Point) -> Vec<Cube> {
        let n = self.grid.cells() as i64;
        let mut idx = [0usize; 3];
        for (ax, slot) in idx.iter_mut().enumerate().take(self.grid.dim()) {
            *slot = self.grid.cell_of(x[ax]).clamp(0, n - 1) as usize;
        }
        let out = self.cubes_containing_index(idx);
        assert!(!out.is_empty(), "cube family does not cover {x:?}");
        out
    }
}

/// Mean of `f` over the cell centers of the box inside `q`.
pub fn average(f: &ScalarField, q: &Cube) -> Result<f64> {
    let cells = q.cells(f.grid());
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let v = f.values();
    let sum = crate::numeric::compensated_sum(cells.iter().map(|&k| v[k]));
    Ok(sum / cells.len() as f64)
}

/// Mean of `f` over the cell centers inside the ball.
pub fn ball_average(f: &ScalarField, b: &Ball) -> Result<f64> {
    let cells = b.cells(f.grid());
    if cells.is_empty() {
        return Err(Error::EmptyRegion);
    }
    let v = f.values();
    let sum = crate::numeric::compensated_sum(cells.iter().map(|&k| v[k]));
    Ok(sum / cells.len() as f64)
}

/// Surface measure of the unit sphere `S^{n-1}`.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => f64::NAN,
    }
}

/// Volume of the unit ball of `R^n`.
pub fn unit_ball_volume(dim: usize) -> f64 {
    sphere_area(dim) / dim as f64
}

/// Nodes on `S^{n-1}` with positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereQuadrature {
    dim: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    /// Number of azimuthal nodes per ring (n = 3) or total nodes (n = 2).
    ring: usize,
}

impl SphereQuadrature {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn integrate_values(&self, values: &[f64]) -> f64 {
        crate::numeric::compensated_sum(self.weights.iter().zip(values).map(|(w, v)| w * v))
    }

    pub fn total_weight(&self) -> f64 {
        crate::numeric::compensated_sum(self.weights.iter().copied())
    }

    pub fn integrate<F: Fn(&Point) -> f64>(&self, f: F) -> f64 {
        crate::numeric::compensated_sum(self.nodes.iter().zip(&self.weights).map(|(y, w)| w * f(y)))
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(k: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=k {
                let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                p0 = p1;
                p1 = p2;
            }
            let pk = if k == 0 {
                1.0
            } else if k == 1 {
                x
            } else {
                p1
            };
            let pkm1 = if k == 1 { 1.0 } else { p0 };
            dp = k as f64 * (x * pk - pkm1) / (x * x - 1.0);
            let dx = pk / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    (nodes, weights)
}

/// `n = 1`: the two points `±1`. `n = 2`: `M` equi-angular nodes
/// `θ_i = 2π(i + 1/2)/M`. `n = 3`: `M = 2k^2` nodes, Gauss-Legendre in
/// `cos θ` times `2k` uniform azimuths.
pub fn sphere_quadrature(dim: usize, node_count: usize) -> Result<SphereQuadrature> {
    match dim {
        1 => Ok(SphereQuadrature { dim, nodes: vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], weights: vec![1.0, 1.0], ring: 2 }),
        2 => {
            if node_count < 8 {
                return Err(Error::InvalidParameter(format!("circle quadrature needs at least 8 nodes, got {node_count}")));
            }
            let m = node_count;
            let nodes = (0..m)
                .map(|i| {
                    let th = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    [th.cos(), th.sin(), 0.0]
                })
                .collect();
            Ok(SphereQuadrature { dim, nodes, weights: vec![2.0 * PI / m as f64; m], ring: m })
        }
        3 => {
            let k = ((node_count as f64 / 2.0).sqrt()).round() as usize;
            if k < 2 || 2 * k * k != node_count {
                return Err(Error::InvalidParameter(format!("sphere quadrature needs M = 2k^2 with k >= 2, got {node_count}")));
            }
            let (z, wz) = gauss_legendre(k);
            let ring = 2 * k;
            let mut nodes = Vec::with_capacity(node_count);
            let mut weights = Vec::with_capacity(node_count);
            for (zi, wi) in z.iter().zip(&wz) {
                let s = (1.0 - zi * zi).sqrt();
                for j in 0..ring {
                    let ph = 2.0 * PI * (j as f64 + 0.5) / ring as f64;
                    nodes.push([s * ph.cos(), s * ph.sin(), *zi]);
                    weights.push(wi * 2.0 * PI / ring as f64);
                }
            }
            Ok(SphereQuadrature { dim, nodes, weights, ring })
        }
        d => Err(Error::UnsupportedDimension(d)),
    }
}
