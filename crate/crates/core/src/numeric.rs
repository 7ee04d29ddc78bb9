//! Small numerical helpers shared by the operator modules: compensated sums,
//! least-squares slopes, and an n-dimensional FFT convolution.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// Neumaier-compensated running sum. Order-fixed, so repeated runs agree bitwise.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    sxy / sxx
}

/// Slope of log(y) against log(x).
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    fit_slope(&lx, &ly)
}

/// Shape of a row-major array of dimension `dim` (unused trailing axes are 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub dim: usize,
    pub extent: [usize; 3],
}

impl Shape {
    pub fn cube(dim: usize, side: usize) -> Self {
        let mut extent = [1; 3];
        extent[..dim].fill(side);
        Self { dim, extent }
    }

    pub fn len(&self) -> usize {
        self.extent.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn flat(&self, idx: [usize; 3]) -> usize {
        (idx[0] * self.extent[1] + idx[1]) * self.extent[2] + idx[2]
    }

    #[inline]
    pub fn unflat(&self, mut flat: usize) -> [usize; 3] {
        let i2 = flat % self.extent[2];
        flat /= self.extent[2];
        let i1 = flat % self.extent[1];
        [flat / self.extent[1], i1, i2]
    }
}

fn fft_axes(data: &mut [Complex64], shape: Shape, inverse: bool, planner: &mut FftPlanner<f64>) {
    for axis in 0..shape.dim {
        let len = shape.extent[axis];
        if len == 1 {
            continue;
        }
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let stride: usize = shape.extent[axis + 1..].iter().product();
        let outer: usize = shape.extent[..axis].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for o in 0..outer {
            for s in 0..stride {
                let base = o * len * stride + s;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

/// Discrete correlation of `input` (cube of side `n_in`) against a translation
/// invariant kernel, evaluated on a cube of side `n_out`:
///
/// `out[i] = sum_j input[j] * kernel(i + shift - j)`
///
/// with offsets measured in cells per axis. Computed with a zero-padded FFT
/// whose period is large enough that no wrap-around reaches the output window.
pub fn fft_convolve<K>(input: &[f64], dim: usize, n_in: usize, n_out: usize, shift: i64, kernel: K) -> Vec<f64>
where
    K: Fn([i64; 3]) -> f64,
{
    // Offsets o = i + shift - j range over [shift - (n_in-1), shift + n_out - 1].
    let o_min = shift - (n_in as i64 - 1);
    let klen = n_in + n_out - 1;
    let period = klen.max(n_in);
    let shape = Shape::cube(dim, period);
    let mut a = vec![Complex64::new(0.0, 0.0); shape.len()];
    let mut b = vec![Complex64::new(0.0, 0.0); shape.len()];
    let in_shape = Shape::cube(dim, n_in);
    for (flat, v) in input.iter().enumerate() {
        let idx = in_shape.unflat(flat);
        a[shape.flat(idx)] = Complex64::new(*v, 0.0);
    }
    let k_shape = Shape::cube(dim, klen);
    for flat in 0..k_shape.len() {
        let u = k_shape.unflat(flat);
        let mut off = [0i64; 3];
        for ax in 0..dim {
            off[ax] = u[ax] as i64 + o_min;
        }
        b[shape.flat(u)] = Complex64::new(kernel(off), 0.0);
    }
    let mut planner = FftPlanner::new();
    fft_axes(&mut a, shape, false, &mut planner);
    fft_axes(&mut b, shape, false, &mut planner);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= *y;
    }
    fft_axes(&mut a, shape, true, &mut planner);
    let scale = 1.0 / shape.len() as f64;
    let out_shape = Shape::cube(dim, n_out);
    let mut out = vec![0.0; out_shape.len()];
    // out[i] = full[i + n_in - 1] per axis.
    for (flat, slot) in out.iter_mut().enumerate() {
        let i = out_shape.unflat(flat);
        let mut idx = [0usize; 3];
        for ax in 0..dim {
            idx[ax] = i[ax] + n_in - 1;
        }
        *slot = a[shape.flat(idx)].re * scale;
    }
    out
}
