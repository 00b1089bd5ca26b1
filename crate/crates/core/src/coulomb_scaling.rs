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

//! The scaling function Γ(y) of a log-gas responding to an imaginary probe
//! charge, and the associated density-perturbation profile F(u).
//!
//! Γ solves the Riccati equation
//!
//! ```text
//! −Γ²(y)/2 + πρ₀·Γ(y) = d/dy [ (Γ(0) − Γ(y)) / y ]
//! ```
//!
//! with the matching condition Γ(0) = πρ₀ and admits the closed form
//! Γ(y)/Γ(0) = 1 − Ψ′(v)/Ψ(v) with Ψ(v) = v^{3/4}·I_{−3/4}(v) and
//! v = Γ(0)·y²/4. Ψ is entire in v (even series), which this module
//! evaluates directly; a ratio-of-asymptotics branch takes over for large v
//! where e^v would overflow. F is recovered from Γ by inverting the
//! principal-value transform Γ(y) = ⨍ F(u)/(u−y) du.

use statrs::function::gamma::gamma;

use crate::numerics::{
    hilbert_inverse, pv_transform_with_tails, GridFunction, TailModel,
};
use crate::{Error, Result};

/// Crossover between the entire-series and asymptotic-ratio branches of
/// Ψ′/Ψ. Both branches agree to ~1e−14 here.
const SERIES_ASYMPTOTIC_SWITCH: f64 = 30.0;

/// Modified Bessel function of the first kind I_ν(x) for real x ≥ 0 by its
/// power series; accurate to better than 1e−10 relative for x ≤ 30.
pub fn bessel_i(nu: f64, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::InvalidParameter("bessel_i needs x >= 0".into()));
    }
    if x > 600.0 {
        return Err(Error::InvalidParameter(format!("bessel_i overflow range x={x}")));
    }
    if x == 0.0 {
        if nu == 0.0 {
            return Ok(1.0);
        }
        if nu > 0.0 {
            return Ok(0.0);
        }
        return Err(Error::Evaluation(format!("I_nu diverges at 0 for nu={nu}")));
    }
    let half = 0.5 * x;
    let mut term = half.powf(nu) / gamma(nu + 1.0);
    let mut acc = term;
    for m in 1..500 {
        let mf = m as f64;
        term *= half * half / (mf * (mf + nu));
        acc += term;
        if term.abs() < 1e-17 * acc.abs() {
            return Ok(acc);
        }
    }
    Err(Error::NoConvergence(format!("bessel series stalled at x={x}, nu={nu}")))
}

/// Ψ(v) = v^{3/4} I_{−3/4}(v) = 2^{3/4} Σ_m (v/2)^{2m} / (m! Γ(m+1/4)),
/// entire in v. Valid for moderate v (overflows near v ≈ 700).
pub fn psi(v: f64) -> f64 {
    let c0 = 2f64.powf(0.75) / gamma(0.25);
    let mut term = c0;
    let mut acc = term;
    for m in 1..500 {
        let mf = m as f64;
        term *= v * v / (mf * (4.0 * mf - 3.0));
        acc += term;
        if term < 1e-18 * acc {
            break;
        }
    }
    acc
}

/// Ψ′(v), the termwise derivative of [`psi`].
pub fn psi_prime(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let c0 = 2f64.powf(0.75) / gamma(0.25);
    let mut term = c0;
    let mut acc = 0.0;
    for m in 1..500 {
        let mf = m as f64;
        term *= v * v / (mf * (4.0 * mf - 3.0));
        acc += term * mf;
        if term * mf < 1e-18 * acc.abs() + 1e-300 {
            break;
        }
    }
    acc * 2.0 / v
}

/// Γ(y)/Γ(0) as a function of v = Γ(0)·y²/4: equals 1 − Ψ′(v)/Ψ(v), with an
/// asymptotic ratio expansion beyond the overflow range of the raw series.
pub fn gamma_ratio_of_v(v: f64) -> f64 {
    if v == 0.0 {
        return 1.0;
    }
    if v <= SERIES_ASYMPTOTIC_SWITCH {
        // Recurrence form of the even series: term ratio v²/(m(4m−3)).
        let mut term = 1.0f64;
        let mut s = 1.0f64; // Σ term_m
        let mut sp = 0.0f64; // Σ m·term_m
        for m in 1..500 {
            let mf = m as f64;
            term *= v * v / (mf * (4.0 * mf - 3.0));
            s += term;
            sp += mf * term;
            if term < 1e-18 * s {
                break;
            }
        }
        1.0 - (2.0 / v) * sp / s
    } else {
        // 1 − Ψ′/Ψ = −1/(4v) − S′(v)/S(v) with the large-argument series
        // S(v) = Σ_k (−1)^k c_k v^{−k}, c_k = c_{k−1}(9/4 − (2k−1)²)/(8k).
        let mut c = 1.0f64;
        let mut s = 1.0f64;
        let mut sp = 0.0f64; // S′(v)
        let mut prev = f64::MAX;
        for k in 1..=20 {
            let kf = k as f64;
            c *= (2.25 - (2.0 * kf - 1.0) * (2.0 * kf - 1.0)) / (8.0 * kf);
            let term = c * v.powi(-(k as i32));
            if term.abs() > prev {
                break; // asymptotic series turned
            }
            prev = term.abs();
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * term;
            sp += -sign * kf * term / v;
        }
        -0.25 / v - sp / s
    }
}

/// Grids of Γ(y) (and optionally F(u)) for one value of Γ(0).
///
/// The matching condition ties Γ(0) to the local unperturbed density,
/// Γ(0) = πρ₀(x); profiles are computed with πρ₀ ≡ gamma0. The ζ flag
/// records which sign branch of the probe the profile represents; the
/// opposite branch is F → −F.
#[derive(Debug, Clone)]
pub struct ScalingProfile {
    pub gamma0: f64,
    pub y_grid: Vec<f64>,
    pub gamma: Vec<f64>,
    pub f_grid: Vec<f64>,
    pub f: Vec<f64>,
    pub zeta: i8,
}

/// Evaluate the closed-form Γ on a grid. Even in y by construction
/// (it depends on y only through v = Γ(0)y²/4).
pub fn gamma_profile(gamma0: f64, y_grid: &[f64]) -> Result<ScalingProfile> {
    if !(gamma0 > 0.0) {
        return Err(Error::InvalidParameter(format!("gamma0={gamma0} must be > 0")));
    }
    if y_grid.len() < 2 {
        return Err(Error::InvalidParameter("y grid needs at least two points".into()));
    }
    let gamma: Vec<f64> =
        y_grid.iter().map(|&y| gamma0 * gamma_ratio_of_v(gamma0 * y * y / 4.0)).collect();
    Ok(ScalingProfile {
        gamma0,
        y_grid: y_grid.to_vec(),
        gamma,
        f_grid: Vec::new(),
        f: Vec::new(),
        zeta: 1,
    })
}

/// The default grid: spacing 0.005 on [−2, 2], geometric out to ±40.
pub fn default_y_grid() -> Vec<f64> {
    let mut pos: Vec<f64> = Vec::new();
    let mut y = 0.0;
    while y <= 2.0 + 1e-12 {
        pos.push(y);
        y += 0.005;
    }
    let mut y = *pos.last().unwrap();
    while y < 40.0 {
        y *= 1.005;
        pos.push(y.min(40.0));
    }
    let mut grid: Vec<f64> = pos.iter().rev().skip_while(|&&v| v == 0.0).map(|&v| -v).collect();
    grid.extend(pos.iter());
    grid.dedup();
    grid
}

/// Maximum interior residual of the Riccati equation
/// −Γ²/2 + πρ₀Γ = d/dy[(Γ(0)−Γ)/y] with πρ₀ = gamma0, using 4th-order
/// central differences. Requires a uniformly spaced grid.
pub fn ode_residual(profile: &ScalingProfile) -> Result<f64> {
    let y = &profile.y_grid;
    let n = y.len();
    if n < 5 {
        return Err(Error::Input("need at least 5 grid points".into()));
    }
    let h = y[1] - y[0];
    for w in y.windows(2) {
        if ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0) {
            return Err(Error::Input("ode_residual needs a uniform grid".into()));
        }
    }
    if h > 0.01 && y[0].abs() < 1.0 {
        log::warn!("grid spacing {h} is coarse near y=0; residual accuracy degrades");
    }
    let g0 = profile.gamma0;
    // H(y) = (Γ(0) − Γ(y))/y, with the y→0 limit H(0) = 0 from the series
    // Γ = Γ0 − Γ0²y²/2 + O(y⁶).
    let hfun: Vec<f64> = y
        .iter()
        .zip(&profile.gamma)
        .map(|(&yi, &gi)| if yi.abs() < 1e-12 { 0.0 } else { (g0 - gi) / yi })
        .collect();
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let rhs = (-hfun[i + 2] + 8.0 * hfun[i + 1] - 8.0 * hfun[i - 1] + hfun[i - 2]) / (12.0 * h);
        let gi = profile.gamma[i];
        let lhs = -0.5 * gi * gi + g0 * gi;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

/// Fit c in Γ(y) ≈ c·y^{−2} on y ∈ [10, 40] and return c·πρ₀/Γ(0) (= c for
/// matched profiles), which must come out −1. R² below 0.99 is a range
/// error (the grid does not reach the tail regime).
pub fn asymptotic_matching(profile: &ScalingProfile) -> Result<f64> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (&y, &g) in profile.y_grid.iter().zip(&profile.gamma) {
        let ay = y.abs();
        if (10.0..=40.0).contains(&ay) {
            xs.push(ay.powi(-2));
            ys.push(g);
        }
    }
    if xs.len() < 8 {
        return Err(Error::Domain("grid has too few points in the tail band [10, 40]".into()));
    }
    // Single-parameter least squares through the origin.
    let sxy: f64 = xs.iter().zip(&ys).map(|(a, b)| a * b).sum();
    let sxx: f64 = xs.iter().map(|a| a * a).sum();
    let c = sxy / sxx;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let ss_res: f64 = xs.iter().zip(&ys).map(|(a, b)| (b - c * a) * (b - c * a)).sum();
    let ss_tot: f64 = ys.iter().map(|b| (b - my) * (b - my)).sum();
    let r2 = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    if r2 < 0.99 {
        return Err(Error::Domain(format!("tail fit R²={r2:.4} < 0.99; not in the y^-2 regime")));
    }
    // πρ₀ ≡ gamma0 for matched profiles, so the normalized coefficient is c.
    Ok(c)
}

/// Recover the density-perturbation profile F(u) by inverting the
/// principal-value transform; fills the `f_grid`/`f` fields. F is odd and
/// integrates to zero (charge neutrality of the perturbation).
pub fn density_perturbation(profile: &ScalingProfile) -> Result<ScalingProfile> {
    let y_max = profile.y_grid.last().copied().unwrap_or(0.0);
    if y_max < 20.0 {
        log::warn!("grid extent |y| <= {y_max} is short; the y^-2 tail correction degrades");
    }
    let c = asymptotic_matching(profile)?;
    let gamma_fn = GridFunction::new(profile.y_grid.clone(), profile.gamma.clone())?
        .with_tail(TailModel { exponent: -2.0, coefficient: c })?;
    let f_fn = hilbert_inverse(&gamma_fn)?;
    let mut out = profile.clone();
    out.f_grid = f_fn.grid().to_vec();
    out.f = f_fn.values().to_vec();
    Ok(out)
}

/// Re-apply the forward transform ⨍ F(u)/(u−y) du to a recovered F and
/// report the sup-norm deviation from Γ over |y| ≤ `y_cap`.
pub fn round_trip_error(profile: &ScalingProfile, y_cap: f64) -> Result<f64> {
    if profile.f.is_empty() {
        return Err(Error::Input("profile has no F part; run density_perturbation".into()));
    }
    let f_fn = GridFunction::new(profile.f_grid.clone(), profile.f.clone())?;
    let tail = f_fn.fit_tail(0.1)?;
    let f_fn = f_fn.with_tail(tail)?;
    let mut worst = 0.0f64;
    for (&y, &g) in profile.y_grid.iter().zip(&profile.gamma) {
        if y.abs() > y_cap || y.abs() < 1e-9 {
            continue;
        }
        let back = pv_transform_with_tails(&f_fn, y)?;
        worst = worst.max((back - g).abs());
    }
    Ok(worst)
}
