// Copyright 2026 the rmtlab authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Shared numerical utilities: principal-value quadrature on grids, inversion
//! of the finite Hilbert transform with power-law tail corrections, and the
//! order statistics used by the distribution fits.
//!
//! Everything here is deterministic given its inputs; no hidden RNG.

use serde::Serialize;

use crate::{Error, Result};

/// Power-law tail model `values(x) ≈ coefficient · |x|^exponent` beyond the
/// ends of a grid.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailModel {
    pub exponent: f64,
    pub coefficient: f64,
}

/// A real function tabulated on a strictly increasing grid, optionally with a
/// power-law model for both tails.
#[derive(Debug, Clone)]
pub struct GridFunction {
    grid: Vec<f64>,
    values: Vec<f64>,
    pub tail_model: Option<TailModel>,
}

impl GridFunction {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::Input(format!(
                "grid length {} != value length {}",
                grid.len(),
                values.len()
            )));
        }
        if grid.len() < 2 {
            return Err(Error::Input("grid needs at least two points".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Input("grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("grid values must be finite".into()));
        }
        Ok(Self { grid, values, tail_model: None })
    }

    pub fn with_tail(mut self, tail: TailModel) -> Result<Self> {
        if tail.exponent >= -1.0 {
            return Err(Error::Input(format!(
                "tail exponent {} is not integrable (need < -1)",
                tail.exponent
            )));
        }
        self.tail_model = Some(tail);
        Ok(self)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn support(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    /// Linear interpolation inside the grid; clamped at the ends.
    pub fn interpolate(&self, x: f64) -> f64 {
        let n = self.grid.len();
        if x <= self.grid[0] {
            return self.values[0];
        }
        if x >= self.grid[n - 1] {
            return self.values[n - 1];
        }
        let idx = match self.grid.binary_search_by(|g| g.partial_cmp(&x).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i,
        };
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        let (y0, y1) = (self.values[idx - 1], self.values[idx]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }

    /// Fit a power-law tail `c·|x|^p` to the outermost fraction of the grid
    /// (both sides pooled) by least squares in log-log coordinates.
    pub fn fit_tail(&self, fraction: f64) -> Result<TailModel> {
        let n = self.grid.len();
        let k = ((n as f64 * fraction) as usize).max(4);
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n {
            let edge = i < k / 2 || i >= n - k / 2;
            if edge && self.values[i] != 0.0 {
                xs.push(self.grid[i].abs().ln());
                ys.push(self.values[i].abs().ln());
            }
        }
        if xs.len() < 4 {
            return Err(Error::Precision("not enough tail points for a fit".into()));
        }
        let (slope, intercept, _r2) = linear_fit(&xs, &ys);
        // Recover the common sign from the outermost values.
        let sign = if self.values[n - 1] >= 0.0 { 1.0 } else { -1.0 };
        Ok(TailModel { exponent: slope, coefficient: sign * intercept.exp() })
    }
}

pub(crate) fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..x.len() {
        acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    }
    acc
}

/// Ordinary least squares `y = slope·x + intercept`; returns (slope,
/// intercept, R²).
pub fn linear_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        sxy += (a - mx) * (b - my);
        syy += (b - my) * (b - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Principal value of `∫ f(t)/(x−t) dt` over the grid of `f`, by singularity
/// subtraction:
///
/// `∫ (f(t)−f(x))/(x−t) dt + f(x)·ln|(x−a)/(b−x)|` on support `[a, b]`.
///
/// Second-order accurate on smooth integrands; `x` must lie strictly inside
/// the grid.
pub fn pv_integral(f: &GridFunction, x: f64) -> Result<f64> {
    let (a, b) = f.support();
    if x <= a || x >= b {
        return Err(Error::Domain(format!("pv point {x} outside open support ({a}, {b})")));
    }
    let fx = f.interpolate(x);
    let grid = f.grid();
    let vals = f.values();
    let n = grid.len();
    let mut integrand = Vec::with_capacity(n);
    for i in 0..n {
        let t = grid[i];
        let dt = x - t;
        if dt.abs() < 1e-13 * (1.0 + x.abs()) {
            // Removable point: limit is -f'(x). Central slope where possible.
            let (j0, j1) = if i == 0 {
                (0, 1)
            } else if i + 1 == n {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            let slope = (vals[j1] - vals[j0]) / (grid[j1] - grid[j0]);
            integrand.push(-slope);
        } else {
            integrand.push((vals[i] - fx) / dt);
        }
    }
    let smooth = trapezoid(grid, &integrand);
    Ok(smooth + fx * ((x - a).abs() / (b - x).abs()).ln())
}

/// Principal-value Stieltjes transform `⨍ ρ(λ)/(x−λ) dλ` of a density grid.
///
/// This is the real part of the Stieltjes transform on the real axis for `x`
/// inside the support.
pub fn principal_value_stieltjes(density: &GridFunction, x: f64) -> Result<f64> {
    pv_integral(density, x)
}

/// Contribution of the two power-law tails of `f` to `∫ f(t)/(x−t) dt`
/// outside the grid, computed by a substitution `t = edge/s` quadrature.
fn tail_pv_contribution(f: &GridFunction, x: f64) -> f64 {
    let Some(tail) = f.tail_model else { return 0.0 };
    let (a, b) = f.support();
    let nodes = 400;
    let mut acc = 0.0;
    // Right tail: t in (b, ∞), t = b/s with s in (0,1).
    // f(t) ≈ c·t^p (even continuation) or sign-split: use model as-is on the
    // right, mirrored with the parity implied by the grid values.
    let right_coeff = tail.coefficient;
    let left_sign = if f.values()[0] * f.values()[f.len() - 1] >= 0.0 { 1.0 } else { -1.0 };
    let left_coeff = left_sign * tail.coefficient;
    for k in 0..nodes {
        let s = (k as f64 + 0.5) / nodes as f64;
        let ds = 1.0 / nodes as f64;
        // right tail
        let t = b / s;
        let ft = right_coeff * t.abs().powf(tail.exponent);
        acc += ft / (x - t) * (b / (s * s)) * ds;
        // left tail (a < 0 assumed for two-sided grids; if a > 0 the tail is
        // still handled by the same substitution)
        let t2 = a / s;
        let ft2 = left_coeff * t2.abs().powf(tail.exponent);
        acc += ft2 / (x - t2) * (-a / (s * s)) * ds;
    }
    acc
}

/// Forward principal-value transform with tail correction:
/// `(T f)(y) = ⨍ f(u)/(u−y) du` over the whole line, using the grid inside
/// the tabulated range and the power-law tail model beyond it.
///
/// Note `(T f)(y) = −⨍ f(u)/(y−u) du`, so this is the negative of
/// [`pv_integral`] plus its tail completion.
pub fn pv_transform_with_tails(f: &GridFunction, y: f64) -> Result<f64> {
    let whole_line = pv_integral(f, y)? + tail_pv_contribution(f, y);
    Ok(-whole_line)
}

/// Inverse of the finite Hilbert-type transform `Γ(y) = ⨍ F(u)/(u−y) du`:
///
/// `F(u) = −(1/π²) ⨍ Γ(y)/(y−u) dy`
///
/// evaluated on the same grid. `gamma` must carry a tail model so the
/// integral over the whole line can be completed analytically; the result is
/// returned without a tail model (fit one with [`GridFunction::fit_tail`] if
/// needed).
pub fn hilbert_inverse(gamma: &GridFunction) -> Result<GridFunction> {
    if gamma.tail_model.is_none() {
        return Err(Error::Input("hilbert_inverse requires a tail model".into()));
    }
    let grid = gamma.grid().to_vec();
    let n = grid.len();
    let (a, b) = gamma.support();
    let margin = 1e-9 * (b - a);
    let mut out = Vec::with_capacity(n);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    for i in 0..n {
        let u = grid[i].clamp(a + margin, b - margin);
        // F(u) = −(1/π²)(T Γ)(u) = +(1/π²) ⨍ Γ(y)/(u−y) dy.
        let whole_line = pv_integral(gamma, u)? + tail_pv_contribution(gamma, u);
        out.push(whole_line / pi2);
    }
    GridFunction::new(grid, out)
}

/// Two-sided Kolmogorov–Smirnov statistic of `samples` against a reference
/// CDF, using the exact order-statistics formula.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("ks_statistic on empty sample set".into()));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in s.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    Ok(d)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("ks_two_sample on empty sample set".into()));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());
    let (mut i, mut j) = (0usize, 0usize);
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        if xs[i] <= ys[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Linear-interpolated order statistic (inclusive convention): for p in
/// [0, 1] the quantile sits at rank `p·(n−1)` of the sorted sample.
pub fn quantile(samples: &[f64], p: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Input("quantile of empty sample set".into()));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("quantile level {p} outside [0, 1]")));
    }
    let mut s = samples.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let h = p * (s.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    if lo == hi {
        return Ok(s[lo]);
    }
    Ok(s[lo] + (h - lo as f64) * (s[hi] - s[lo]))
}

/// Median convenience wrapper.
pub fn median(samples: &[f64]) -> Result<f64> {
    quantile(samples, 0.5)
}
