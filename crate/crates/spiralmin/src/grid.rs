//! Real-valued functions sampled on a uniform symmetric grid over `[-S, S]`
//! with finite-difference derivative access and local cubic interpolation.

use crate::error::{Error, Result};

/// How many nodes at each end use the six-point edge stencils of
/// [`GridFunction::d1`] and [`GridFunction::d2`] (when `n >= 13`).
pub(crate) const EDGE_NODES: usize = 5;

/// `dC(t, k)/dt` of the Newton forward polynomial, offsets `t = 0..4`,
/// orders `k = 1..5`.
const DC: [[f64; 5]; 5] = [
    [1.0, -1.0 / 2.0, 1.0 / 3.0, -1.0 / 4.0, 1.0 / 5.0],
    [1.0, 1.0 / 2.0, -1.0 / 6.0, 1.0 / 12.0, -1.0 / 20.0],
    [1.0, 3.0 / 2.0, 1.0 / 3.0, -1.0 / 12.0, 1.0 / 30.0],
    [1.0, 5.0 / 2.0, 11.0 / 6.0, 1.0 / 4.0, -1.0 / 20.0],
    [1.0, 7.0 / 2.0, 13.0 / 3.0, 25.0 / 12.0, 1.0 / 5.0],
];

/// `d²C(t, k)/dt²` for orders `k = 2..5`, offsets `t = 0..4`.
const DDC: [[f64; 4]; 5] = [
    [1.0, -1.0, 11.0 / 12.0, -5.0 / 6.0],
    [1.0, 0.0, -1.0 / 12.0, 1.0 / 12.0],
    [1.0, 1.0, -1.0 / 12.0, 0.0],
    [1.0, 2.0, 11.0 / 12.0, -1.0 / 12.0],
    [1.0, 3.0, 35.0 / 12.0, 5.0 / 6.0],
];

fn binom(k: usize, j: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..j {
        b = b * (k - i) as f64 / (i + 1) as f64;
    }
    b
}

/// Value-space weights of the left-end six-point stencils: `(w1, w2)` with
/// `f'(s_t) = Σ_j w1[t][j] v[j] / h` and `f''(s_t) = Σ_j w2[t][j] v[j] / h²`
/// for offsets `t = 0..4`. The right end mirrors with `w1` negated.
pub(crate) fn edge_stencil_weights() -> ([[f64; 6]; 5], [[f64; 6]; 5]) {
    let mut w1 = [[0.0; 6]; 5];
    let mut w2 = [[0.0; 6]; 5];
    for t in 0..EDGE_NODES {
        for k in 1..=5usize {
            // Δᵏf = Σ_j (−1)^{k−j} C(k, j) v[j]
            for j in 0..=k {
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                let dk = sign * binom(k, j);
                w1[t][j] += DC[t][k - 1] * dk;
                if k >= 2 {
                    w2[t][j] += DDC[t][k - 2] * dk;
                }
            }
        }
    }
    (w1, w2)
}

/// A function of `s` sampled at `s_i = -S + i·h`, `h = 2S/(n−1)`, with `n`
/// odd so that `s = 0` is a grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    half_width: f64,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(half_width: f64, values: Vec<f64>) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        let n = values.len();
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidArgument(format!(
                "grid needs an odd number of nodes >= 3, got {n}"
            )));
        }
        Ok(GridFunction { half_width, values })
    }

    pub fn zeros(half_width: f64, n: usize) -> Result<Self> {
        Self::new(half_width, vec![0.0; n])
    }

    pub fn from_fn(half_width: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let mut g = Self::zeros(half_width, n)?;
        for i in 0..n {
            g.values[i] = f(g.s(i));
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_width / (self.values.len() - 1) as f64
    }

    /// Index of the node at `s = 0`.
    pub fn center(&self) -> usize {
        self.values.len() / 2
    }

    pub fn s(&self, i: usize) -> f64 {
        let c = self.center() as isize;
        (i as isize - c) as f64 * self.h()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn sup_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Difference pyramid `Δ¹f..Δ⁵f` over the six nodes at the left end
    /// (`reversed` walks from the right end instead). Built by repeated
    /// subtraction of nearby values so the cancellations stay exact.
    fn edge_differences(&self, reversed: bool) -> [f64; 5] {
        let v = &self.values;
        let n = v.len();
        let mut row: [f64; 6] = std::array::from_fn(|k| if reversed { v[n - 1 - k] } else { v[k] });
        let mut out = [0.0; 5];
        for (level, slot) in out.iter_mut().enumerate() {
            for i in 0..5 - level {
                row[i] = row[i + 1] - row[i];
            }
            *slot = row[0];
        }
        out
    }

    /// First derivative at every node: centered `O(h²)` in the interior, and
    /// `O(h⁴)` six-point stencils at the five nodes nearest each end. The edge
    /// treatment keeps the truncation structure uniform across the stencil
    /// seam, which the fixed-point solver needs for an artifact-free residual.
    pub fn d1(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h = self.h();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
        }
        if n >= 13 {
            let fw = self.edge_differences(false);
            let bw = self.edge_differences(true);
            for t in 0..5 {
                let dot = |d: &[f64; 5]| -> f64 { (0..5).map(|k| DC[t][k] * d[k]).sum() };
                out[t] = dot(&fw) / h;
                out[n - 1 - t] = -dot(&bw) / h;
            }
        } else {
            out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            out[n - 1] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
        }
        out
    }

    /// Second derivative at every node: centered `O(h²)` in the interior and
    /// `O(h⁴)` six-point stencils at the five nodes nearest each end.
    pub fn d2(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h2 = self.h() * self.h();
        let mut out = vec![0.0; n];
        for i in 1..n - 1 {
            out[i] = ((v[i + 1] - v[i]) - (v[i] - v[i - 1])) / h2;
        }
        if n >= 13 {
            let fw = self.edge_differences(false);
            let bw = self.edge_differences(true);
            for t in 0..5 {
                let dot = |d: &[f64; 5]| -> f64 { (0..4).map(|k| DDC[t][k] * d[k + 1]).sum() };
                out[t] = dot(&fw) / h2;
                out[n - 1 - t] = dot(&bw) / h2;
            }
        } else if n >= 4 {
            out[0] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
            out[n - 1] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
        } else {
            out[0] = (v[0] - 2.0 * v[1] + v[2]) / h2;
            out[n - 1] = out[0];
        }
        out
    }

    /// Node slopes by a fourth-order centered stencil (second-order one-sided
    /// near the ends), used by the C¹ cubic interpolant.
    fn slopes(&self) -> Vec<f64> {
        let v = &self.values;
        let n = v.len();
        let h = self.h();
        let mut out = self.d1();
        for i in 2..n.saturating_sub(2) {
            out[i] = (-v[i + 2] + 8.0 * v[i + 1] - 8.0 * v[i - 1] + v[i - 2]) / (12.0 * h);
        }
        out
    }

    /// Cubic Hermite interpolation between nodes (C¹, high-order slopes).
    pub fn eval_cubic(&self, s: f64) -> Result<f64> {
        let half = self.half_width;
        if !(s.is_finite() && s >= -half - 1e-12 && s <= half + 1e-12) {
            return Err(Error::OutOfDomain { s, half_width: half });
        }
        let s = s.clamp(-half, half);
        let h = self.h();
        let n = self.values.len();
        let x = (s + half) / h;
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        let slopes = self.slopes();
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (slopes[i] * h, slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1)
    }

    /// Pointwise linear combination `a·self + b·other` on a shared grid.
    pub fn axpy(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        if self.n() != other.n() || self.half_width != other.half_width {
            return Err(Error::InvalidArgument("grid mismatch".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        GridFunction::new(self.half_width, values)
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            half_width: self.half_width,
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }
}

/// Interpolant with precomputed slopes, for repeated evaluation of the same
/// grid function (the per-call slope computation in [`GridFunction::eval_cubic`]
/// is O(n)).
pub struct CubicInterpolant<'a> {
    grid: &'a GridFunction,
    slopes: Vec<f64>,
}

impl<'a> CubicInterpolant<'a> {
    pub fn new(grid: &'a GridFunction) -> Self {
        CubicInterpolant { grid, slopes: grid.slopes() }
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        let half = self.grid.half_width;
        if !(s.is_finite() && s >= -half - 1e-12 && s <= half + 1e-12) {
            return Err(Error::OutOfDomain { s, half_width: half });
        }
        let s = s.clamp(-half, half);
        let h = self.grid.h();
        let n = self.grid.n();
        let x = (s + half) / h;
        let i = (x.floor() as usize).min(n - 2);
        let t = x - i as f64;
        let (y0, y1) = (self.grid.values[i], self.grid.values[i + 1]);
        let (m0, m1) = (self.slopes[i] * h, self.slopes[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        Ok((2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * m0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * m1)
    }
}
