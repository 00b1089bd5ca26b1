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

//! Statistics of the Stieltjes transform evaluated on the real axis.
//!
//! Inside the spectral bulk g(x) does not self-average: sampled through a
//! small window around x it follows a Cauchy law whose center is the
//! principal-value transform g_R(x) and whose half-width is πρ(x). This
//! module builds those sample sets, fits and tests the Cauchy law, estimates
//! the density from the tail rule P[|g| > 1/ε] = 2ερ(x), runs the cavity
//! population dynamics, and carries the two analytic constructions for
//! window-sampling and the picket-fence spectrum.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Distribution;
use serde::Serialize;

use crate::ensembles::Spectrum;
use crate::numerics::{ks_statistic, quantile};
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;

/// Law of the window variable u in g(x + ηu).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowLaw {
    /// Uniform on [−1, 1].
    Uniform,
    /// Standard Cauchy, R(u) = 1/(π(1+u²)).
    Cauchy,
    /// R(u) = (2/π)(1+u²)^{−2}, the normalized squared-Lorentzian window.
    SquaredCauchy,
}

impl WindowLaw {
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        match self {
            WindowLaw::Uniform => 2.0 * rng.random::<f64>() - 1.0,
            WindowLaw::Cauchy => (PI * (rng.random::<f64>() - 0.5)).tan(),
            WindowLaw::SquaredCauchy => loop {
                let theta = PI * (rng.random::<f64>() - 0.5);
                let c = theta.cos();
                if rng.random::<f64>() < c * c {
                    return theta.tan();
                }
            },
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            WindowLaw::Uniform => "uniform",
            WindowLaw::Cauchy => "cauchy",
            WindowLaw::SquaredCauchy => "squared_cauchy",
        }
    }
}

/// Where the window sampler gets its spectra from.
pub enum SpectrumSource<'a> {
    /// One fixed spectrum reused for every draw.
    Fixed(&'a Spectrum),
    /// A fresh spectrum per draw, produced from the draw index.
    Fresh {
        sampler: Box<dyn Fn(u64) -> Result<Spectrum> + 'a>,
        bulk: Option<(f64, f64)>,
        label: String,
    },
}

impl SpectrumSource<'_> {
    fn bulk(&self) -> Option<(f64, f64)> {
        match self {
            SpectrumSource::Fixed(s) => s.bulk(),
            SpectrumSource::Fresh { bulk, .. } => *bulk,
        }
    }

    fn label(&self) -> String {
        match self {
            SpectrumSource::Fixed(s) => format!(
                "fixed spectrum (n={}, kind={:?})",
                s.len(),
                s.spec.as_ref().map(|sp| sp.kind)
            ),
            SpectrumSource::Fresh { label, .. } => format!("fresh: {label}"),
        }
    }
}

/// Monte Carlo samples of g evaluated at jittered real points.
#[derive(Debug, Clone)]
pub struct ResolventSampleSet {
    pub x: f64,
    pub eta: f64,
    pub window_law: WindowLaw,
    pub samples: Vec<f64>,
    pub source: String,
}

/// Cauchy fit of a resolvent sample set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CauchyFit {
    /// Estimate of g_R(x), the principal-value part.
    pub center: f64,
    /// Estimate of πρ(x).
    pub half_width: f64,
    pub method: FitMethod,
    /// KS distance between the empirical CDF and the fitted Cauchy CDF.
    pub ks: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMethod {
    Quantile,
    MaxLikelihood,
}

/// Empirical vs predicted characteristic function E[e^{ikg}].
#[derive(Debug, Clone)]
pub struct CharFnEstimate {
    pub k_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub predicted: Vec<Complex64>,
    pub max_deviation: f64,
}

/// Population of g-values for the cavity iteration
/// g ← 1/(x − Σᵢ wᵢ² gᵢ) with Gaussian weights of variance σ²/n_terms.
#[derive(Debug, Clone)]
pub struct CavityPool {
    pub x: f64,
    pub sigma2: f64,
    pub members: Vec<f64>,
    pub n_terms: usize,
    /// Updates discarded because the new member overflowed.
    pub resampled: u64,
}

impl CavityPool {
    pub fn new(x: f64, sigma2: f64, members: Vec<f64>, n_terms: usize) -> Result<Self> {
        if n_terms < 100 {
            return Err(Error::InvalidParameter(format!(
                "n_terms={n_terms} too small (need >= 100)"
            )));
        }
        if members.len() < 100 {
            return Err(Error::InvalidParameter("pool needs at least 100 members".into()));
        }
        if members.len() < 10_000 {
            log::warn!("cavity pool of {} members is below production size 1e4", members.len());
        }
        if members.iter().any(|m| !m.is_finite()) {
            return Err(Error::Input("non-finite pool member".into()));
        }
        Ok(Self { x, sigma2, members, n_terms, resampled: 0 })
    }

    /// Pool initialized at a constant value.
    pub fn constant(x: f64, sigma2: f64, value: f64, size: usize, n_terms: usize) -> Result<Self> {
        Self::new(x, sigma2, vec![value; size], n_terms)
    }

    /// Pool initialized with exact Cauchy(center, half_width) draws.
    pub fn cauchy_initialized(
        x: f64,
        sigma2: f64,
        center: f64,
        half_width: f64,
        size: usize,
        n_terms: usize,
        seed: u64,
    ) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..size)
            .map(|_| center + half_width * (PI * (rng.random::<f64>() - 0.5)).tan())
            .collect();
        Self::new(x, sigma2, members, n_terms)
    }
}

/// Cauchy cumulative distribution with location `center` and scale
/// `half_width`.
pub fn cauchy_cdf(x: f64, center: f64, half_width: f64) -> f64 {
    0.5 + ((x - center) / half_width).atan() / PI
}

/// Exact Stieltjes transform on the real axis: g(x) = (1/N) Σ 1/(x−λᵢ).
pub fn stieltjes_real(spectrum: &Spectrum, x: f64) -> Result<f64> {
    let mut acc = 0.0;
    for &lam in spectrum.values() {
        let d = x - lam;
        if d == 0.0 {
            return Err(Error::Evaluation(format!(
                "probe x={x} collides exactly with an eigenvalue; jitter the probe"
            )));
        }
        acc += 1.0 / d;
    }
    Ok(acc / spectrum.len() as f64)
}

/// Stieltjes transform at a complex point z (no collision possible off the
/// real axis).
pub fn stieltjes_complex(spectrum: &Spectrum, z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &lam in spectrum.values() {
        acc += (z - lam).inv();
    }
    acc / spectrum.len() as f64
}

/// Draw `n_samples` values of g(x + ηu) with u from the window law.
///
/// The probe x must lie inside the bulk of the source density (the Cauchy
/// law is only claimed there). Exact collisions re-jitter u.
pub fn sample_g_window(
    source: &SpectrumSource,
    x: f64,
    eta: f64,
    window_law: WindowLaw,
    n_samples: usize,
    seed: u64,
) -> Result<ResolventSampleSet> {
    if !(eta > 0.0) {
        return Err(Error::InvalidParameter(format!("eta={eta} must be > 0")));
    }
    if let Some((a, b)) = source.bulk() {
        if x <= a || x >= b {
            return Err(Error::Domain(format!(
                "probe x={x} outside the bulk support ({a}, {b})"
            )));
        }
    }
    let mut set = ResolventSampleSet {
        x,
        eta,
        window_law,
        samples: Vec::with_capacity(n_samples),
        source: source.label(),
    };
    if n_samples == 0 {
        return Ok(set);
    }

    let mut warn_band: Option<usize> = None;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fixed = match source {
        SpectrumSource::Fixed(s) => Some(*s),
        SpectrumSource::Fresh { .. } => None,
    };
    for draw in 0..n_samples as u64 {
        let fresh;
        let spectrum: &Spectrum = match source {
            SpectrumSource::Fixed(_) => fixed.unwrap(),
            SpectrumSource::Fresh { sampler, .. } => {
                fresh = sampler(draw)?;
                &fresh
            }
        };
        if warn_band.is_none() {
            let n = spectrum.len() as f64;
            if eta < 10.0 / n || eta > 0.2 {
                warn_band = Some(spectrum.len());
            }
        }
        let mut attempts = 0;
        let g = loop {
            let u = window_law.sample(&mut rng);
            match stieltjes_real(spectrum, x + eta * u) {
                Ok(g) => break g,
                Err(_) if attempts < 100 => attempts += 1,
                Err(e) => return Err(e),
            }
        };
        set.samples.push(g);
    }
    if let Some(n) = warn_band {
        log::warn!("window width eta={eta} outside the band [10/N, 0.2] for N={n}");
    }
    Ok(set)
}

/// Fit a Cauchy law to a sample set. The quantile method takes
/// center = median and half_width = IQR/2 (exact for Cauchy, robust, and
/// moment-free); the ML method iterates the Cauchy likelihood fixed point.
pub fn fit_cauchy(samples: &[f64], method: FitMethod) -> Result<CauchyFit> {
    if samples.len() < 100 {
        return Err(Error::Precision(format!(
            "need at least 100 samples to fit, got {}",
            samples.len()
        )));
    }
    let first = samples[0];
    if samples.iter().all(|&s| s == first) {
        return Err(Error::Input("degenerate sample set (all values equal)".into()));
    }
    let (center, half_width) = match method {
        FitMethod::Quantile => {
            let q1 = quantile(samples, 0.25)?;
            let q2 = quantile(samples, 0.5)?;
            let q3 = quantile(samples, 0.75)?;
            (q2, 0.5 * (q3 - q1))
        }
        FitMethod::MaxLikelihood => {
            let mut m = quantile(samples, 0.5)?;
            let q1 = quantile(samples, 0.25)?;
            let q3 = quantile(samples, 0.75)?;
            let mut gamma = 0.5 * (q3 - q1);
            let n = samples.len() as f64;
            for _ in 0..200 {
                let mut sw = 0.0;
                let mut swx = 0.0;
                for &s in samples {
                    let w = 1.0 / ((s - m) * (s - m) + gamma * gamma);
                    sw += w;
                    swx += w * s;
                }
                let m_new = swx / sw;
                let gamma_new = (n / (2.0 * sw)).sqrt();
                let shift = (m_new - m).abs() + (gamma_new - gamma).abs();
                m = m_new;
                gamma = gamma_new;
                if shift < 1e-12 {
                    break;
                }
            }
            (m, gamma)
        }
    };
    if !(half_width > 0.0) {
        return Err(Error::Input("fit produced a non-positive half-width".into()));
    }
    let ks = ks_statistic(samples, |g| cauchy_cdf(g, center, half_width))?;
    Ok(CauchyFit { center, half_width, method, ks })
}

/// Density estimate from the tail rule: for each threshold G,
/// ρ̂ = G · P̂[|g − center| > G] / 2; returns the threshold average and a
/// standard error.
pub fn tail_density_estimate(
    samples: &[f64],
    center: f64,
    thresholds: &[f64],
) -> Result<(f64, f64)> {
    if thresholds.is_empty() {
        return Err(Error::InvalidParameter("no thresholds given".into()));
    }
    let n = samples.len() as f64;
    let mut estimates = Vec::with_capacity(thresholds.len());
    let mut variances = Vec::with_capacity(thresholds.len());
    for &g_thr in thresholds {
        if !(g_thr > 0.0) {
            return Err(Error::InvalidParameter(format!("threshold {g_thr} must be > 0")));
        }
        let exceed = samples.iter().filter(|&&s| (s - center).abs() > g_thr).count();
        if exceed < 20 {
            return Err(Error::Precision(format!(
                "only {exceed} exceedances above G={g_thr}; need >= 20"
            )));
        }
        let p = exceed as f64 / n;
        estimates.push(g_thr * p / 2.0);
        variances.push((g_thr / 2.0) * (g_thr / 2.0) * p * (1.0 - p) / n);
    }
    let k = estimates.len() as f64;
    let mean = estimates.iter().sum::<f64>() / k;
    // Nested exceedance counts are positively correlated; the rms of the
    // per-threshold errors is a conservative scale.
    let stderr = (variances.iter().sum::<f64>() / k).sqrt();
    Ok((mean, stderr))
}

/// Run `iterations` single-member updates of the cavity population dynamics.
///
/// One update replaces a pool member with 1/(x − Σᵢ wᵢ² gᵢ) where the wᵢ are
/// n_terms Gaussian weights of variance σ²/n_terms. The gᵢ are the diagonal
/// resolvent entries of a single realization: they share one trace draw, so
/// the sum equals σ̂²·g with g one pool member and σ̂² = Σwᵢ² a scaled
/// χ²_{n_terms} variable. (Summing n_terms *independent* pool members
/// instead couples every update to the pool's empirical mean, which for a
/// Cauchy-distributed pool is itself heavy-tailed and makes the whole pool
/// wander.) The χ² weight noise, of relative size √(2/n_terms), is what
/// keeps the Cauchy fixed point stable. Overflowing updates are resampled
/// and counted.
pub fn cavity_population_run(
    mut pool: CavityPool,
    iterations: u64,
    seed: u64,
) -> Result<CavityPool> {
    let size = pool.members.len();
    let chi2 = rand_distr::ChiSquared::new(pool.n_terms as f64)
        .map_err(|e| Error::InvalidParameter(format!("chi-squared dof {}: {e}", pool.n_terms)))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut done = 0u64;
    let mut guard = 0u64;
    while done < iterations {
        guard += 1;
        if guard > 10 * iterations + 1000 {
            return Err(Error::NoConvergence(
                "cavity updates keep overflowing; pool diverged".into(),
            ));
        }
        let g = pool.members[rng.random_range(0..size)];
        let sigma_hat2 = pool.sigma2 * chi2.sample(&mut rng) / pool.n_terms as f64;
        let new = 1.0 / (pool.x - sigma_hat2 * g);
        if !new.is_finite() || new.abs() > 1e12 {
            pool.resampled += 1;
            continue;
        }
        let victim = rng.random_range(0..size);
        pool.members[victim] = new;
        done += 1;
    }
    Ok(pool)
}

/// Compare the empirical characteristic function of a g-sample set with the
/// Cauchy prediction exp(i·k·g_R − |k|·πρ).
pub fn char_fn_compare(
    samples: &[f64],
    k_grid: &[f64],
    g_r: f64,
    pi_rho: f64,
) -> Result<CharFnEstimate> {
    if samples.is_empty() {
        return Err(Error::Input("empty sample set".into()));
    }
    let mut sorted = k_grid.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (lo, hi) in sorted.iter().zip(sorted.iter().rev()) {
        if (lo + hi).abs() > 1e-12 {
            return Err(Error::InvalidParameter("k grid must be symmetric about 0".into()));
        }
    }
    let n = samples.len() as f64;
    let mut values = Vec::with_capacity(k_grid.len());
    let mut predicted = Vec::with_capacity(k_grid.len());
    let mut max_dev = 0.0f64;
    for &k in k_grid {
        let mut acc = Complex64::new(0.0, 0.0);
        for &g in samples {
            acc += Complex64::new(0.0, k * g).exp();
        }
        let emp = acc / n;
        let pred = Complex64::new(-k.abs() * pi_rho, k * g_r).exp();
        max_dev = max_dev.max((emp - pred).norm());
        values.push(emp);
        predicted.push(pred);
    }
    Ok(CharFnEstimate { k_grid: k_grid.to_vec(), values, predicted, max_deviation: max_dev })
}

fn check_picket_u(u: f64) -> Result<()> {
    if u == 0.0 {
        return Err(Error::Evaluation("u=0 is the pole of the picket sum".into()));
    }
    if u.abs() >= 0.5 {
        return Err(Error::InvalidParameter(format!("u={u} outside (-1/2, 1/2) \\ {{0}}")));
    }
    Ok(())
}

/// Partial sum S(u, L) = 1/u + 2u Σ_{k=1..L} 1/(u²−k²) of the picket-fence
/// resolvent; converges to π·cot(πu) at rate ~2u/L.
pub fn picket_partial_sum(u: f64, l_terms: usize) -> Result<f64> {
    check_picket_u(u)?;
    if l_terms < 1 {
        return Err(Error::InvalidParameter("need at least one term".into()));
    }
    let u2 = u * u;
    let mut acc = 0.0;
    // Sum smallest terms first to keep the floating-point error down.
    for k in (1..=l_terms).rev() {
        let kf = k as f64;
        acc += 1.0 / (u2 - kf * kf);
    }
    Ok(1.0 / u + 2.0 * u * acc)
}

/// Closed form of the infinite picket sum: π·cot(πu).
pub fn picket_closed_form(u: f64) -> Result<f64> {
    check_picket_u(u)?;
    Ok(PI / (PI * u).tan())
}

/// Forward map of the picket construction: g = g_R + πρ·cot(πu).
pub fn picket_forward(u: f64, g_r: f64, rho: f64) -> Result<f64> {
    check_picket_u(u)?;
    Ok(g_r + PI * rho / (PI * u).tan())
}

/// Inverse map: u = π⁻¹·arccot((g − g_R)/(πρ)) folded into (−1/2, 1/2].
/// Uniform u pushes forward to Cauchy(g_R, πρ).
pub fn picket_inverse_map(g: f64, g_r: f64, rho: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter(format!("rho={rho} must be > 0")));
    }
    let w = (g - g_r) / (PI * rho);
    // arccot with range (0, π).
    let mut u = 1.0f64.atan2(w) / PI;
    if u > 0.5 {
        u -= 1.0;
    }
    Ok(u)
}
