//! Polar quadrature around an evaluation point.
//!
//! Radii are log-spaced: shell `m` is `[b_m, b_{m+1})` with
//! `b_m = base · 2^{m/8}`, sampled at its geometric midpoint, so
//! `∫ g(r) dr/r ≈ Σ g(r_m) · ln2/8`. Only shells that meet the support ball
//! of the field are visited. In the plane the angular rule is coarsened at
//! small radii by merging neighbouring nodes, which keeps
//! `Σ σ_i Ω_i` exact, and restricted to the arc that can hit the support.

use std::f64::consts::{LN_2, PI};

use crate::field::{interpolate_values, norm, sub, GridSpec, Point, ScalarField};
use crate::geometry::SphereQuadrature;

pub(crate) const PER_OCTAVE: f64 = 8.0;
pub(crate) const DU: f64 = LN_2 / PER_OCTAVE;
/// Angular samples per cell of arc length.
const ARC_SAMPLES_PER_CELL: f64 = 2.0;
const MIN_RING: usize = 16;

#[inline]
pub(crate) fn boundary(base: f64, m: i64) -> f64 {
    base * (m as f64 / PER_OCTAVE).exp2()
}

#[inline]
pub(crate) fn midpoint(base: f64, m: i64) -> f64 {
    base * ((m as f64 + 0.5) / PER_OCTAVE).exp2()
}

/// Shell index containing radius `r` (may be negative).
#[inline]
pub(crate) fn shell_of(base: f64, r: f64) -> i64 {
    ((r / base).log2() * PER_OCTAVE).floor() as i64
}

/// One angular resolution: node directions and, per node, `k` coefficients
/// (the σ-weighted sums of the batch functions over merged nodes).
struct Ring {
    nodes: Vec<Point>,
    coef: Vec<f64>,
}

/// A batch of `k` sphere functions prepared for polar sampling.
pub(crate) struct AngularBatch {
    dim: usize,
    k: usize,
    /// Finest first; level `l` merges `2^l` neighbouring nodes (plane only).
    rings: Vec<Ring>,
}

impl AngularBatch {
    /// `values[i * k + c]` is function `c` at node `i`.
    pub(crate) fn new(quad: &SphereQuadrature, values: &[f64], k: usize) -> Self {
        let dim = quad.dim();
        let m = quad.len();
        debug_assert_eq!(values.len(), m * k);
        let w = quad.weights();
        let mut coef: Vec<f64> = (0..m * k).map(|idx| w[idx / k] * values[idx]).collect();
        let mut rings = vec![Ring { nodes: quad.nodes().to_vec(), coef: coef.clone() }];
        if dim == 2 {
            let mut size = m;
            while size.is_multiple_of(2) && size / 2 >= MIN_RING {
                let half = size / 2;
                let merged: Vec<f64> = (0..half * k)
                    .map(|idx| {
                        let (g, c) = (idx / k, idx % k);
                        coef[2 * g * k + c] + coef[(2 * g + 1) * k + c]
                    })
                    .collect();
                let nodes = (0..half)
                    .map(|g| {
                        let th = 2.0 * PI * (g as f64 + 0.5) / half as f64;
                        [th.cos(), th.sin(), 0.0]
                    })
                    .collect();
                rings.push(Ring { nodes, coef: merged.clone() });
                coef = merged;
                size = half;
            }
        }
        Self { dim, k, rings }
    }

    pub(crate) fn width(&self) -> usize {
        self.k
    }

    fn ring_for(&self, r: f64, h: f64) -> &Ring {
        if self.dim != 2 {
            return &self.rings[0];
        }
        let needed = (2.0 * PI * r / h * ARC_SAMPLES_PER_CELL).ceil() as usize;
        let mut best = &self.rings[0];
        for ring in &self.rings {
            if ring.nodes.len() >= needed.max(MIN_RING) {
                best = ring;
            }
        }
        best
    }
}

/// A field with the ball that contains everything interpolation can see.
pub(crate) struct Support<'a> {
    pub grid: GridSpec,
    pub values: &'a [f64],
    pub center: Point,
    pub radius: f64,
}

impl<'a> Support<'a> {
    /// `None` for the zero field.
    pub(crate) fn of(f: &'a ScalarField) -> Option<Self> {
        let (center, radius) = f.support_ball()?;
        let g = *f.grid();
        let reach = g.spacing() * (g.dim() as f64).sqrt();
        Some(Self { grid: g, values: f.values(), center, radius: radius + reach })
    }

    #[inline]
    pub(crate) fn sample(&self, x: &Point) -> f64 {
        interpolate_values(&self.grid, self.values, x)
    }
}

/// Shell sums around `x`: for every shell `m` in the returned range,
/// `out[(m - first) * k + c] = Σ_nodes coef_c · F(f(x - r_m y'))` with
/// `F = |·|` when `absolute`. Returns the first shell index.
pub(crate) fn shell_sums(
    support: &Support<'_>,
    batch: &AngularBatch,
    base: f64,
    x: &Point,
    absolute: bool,
    out: &mut Vec<f64>,
) -> i64 {
    out.clear();
    let k = batch.width();
    let h = support.grid.spacing();
    let v = sub(x, &support.center);
    let d = norm(&v);
    let rho = support.radius;
    let r_lo = (d - rho).max(base);
    let r_hi = d + rho;
    if r_hi <= base {
        return 0;
    }
    let first = shell_of(base, r_lo).max(0);
    let last = shell_of(base, r_hi);
    let theta_v = v[1].atan2(v[0]);
    for m in first..=last {
        let r = midpoint(base, m);
        let ring = batch.ring_for(r, h);
        let start = out.len();
        out.resize(start + k, 0.0);
        let acc = &mut out[start..];
        let count = ring.nodes.len();
        let mut visit = |i: usize| {
            let y = &ring.nodes[i];
            let p = [x[0] - r * y[0], x[1] - r * y[1], x[2] - r * y[2]];
            let mut val = support.sample(&p);
            if val == 0.0 {
                return;
            }
            if absolute {
                val = val.abs();
            }
            let c = &ring.coef[i * k..(i + 1) * k];
            for (a, w) in acc.iter_mut().zip(c) {
                *a += w * val;
            }
        };
        if batch.dim == 2 && d > 0.0 {
            // directions y' with |x - r y' - c| < ρ
            let kappa = (d * d + r * r - rho * rho) / (2.0 * r * d);
            if kappa >= 1.0 {
                continue;
            }
            if kappa <= -1.0 {
                (0..count).for_each(&mut visit);
                continue;
            }
            let delta = kappa.acos();
            let scale = count as f64 / (2.0 * PI);
            let lo = ((theta_v - delta) * scale - 0.5).floor() as i64;
            let hi = ((theta_v + delta) * scale - 0.5).ceil() as i64;
            if hi - lo + 1 >= count as i64 {
                (0..count).for_each(&mut visit);
            } else {
                for g in lo..=hi {
                    visit(g.rem_euclid(count as i64) as usize);
                }
            }
        } else {
            (0..count).for_each(&mut visit);
        }
    }
    first
}

/// Truncation levels `t_j = base · 2^{j/2}`, i.e. every fourth shell boundary.
pub(crate) const SHELLS_PER_LEVEL: i64 = 4;

/// `sup_j |T^{t_j}|` for each batch member, from shell sums, over levels
/// `t_j < max_t` starting at `t_0 = base`. The sums are suffix sums, so
/// truncations beyond the support contribute zero.
pub(crate) fn max_truncation(sums: &[f64], first: i64, k: usize, out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    let shells = sums.len() / k;
    if shells == 0 {
        return;
    }
    let mut tail = vec![0.0; k];
    // walk shells from the outside in, recording the tail at level boundaries
    for s in (0..shells).rev() {
        let m = first + s as i64;
        for c in 0..k {
            tail[c] += sums[s * k + c] * DU;
        }
        if m % SHELLS_PER_LEVEL == 0 || s == 0 {
            for c in 0..k {
                out[c] = out[c].max(tail[c].abs());
            }
        }
    }
}
