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

//! Eigenvalue point processes and matrix ensembles.
//!
//! Samplers for the dense GOE, the tridiagonal realization of the β-ensemble
//! (Gaussian diagonal, chi-distributed subdiagonal), a single-particle
//! Metropolis chain for general confining potentials, Poisson and
//! picket-fence synthetic spectra, heavy-tailed (Lévy) matrices and rank-one
//! spiked GOE deformations. Every sampler is a pure function of an
//! [`EnsembleSpec`] whose seed fully determines the output.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::gamma;

use crate::linalg;
use crate::numerics::GridFunction;
use crate::{Error, Result};

/// Which point process / matrix law to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Goe,
    BetaTridiagonal,
    CoulombMetropolis,
    Poisson,
    PicketFence,
    Levy,
    SpikedGoe,
}

/// Confining potential V(λ) as a polynomial coefficient list
/// (`coeffs[k]` multiplies λ^k), with its derivative V′ and the companion
/// polynomial P entering the one-cut density
/// ρ₀(λ) = (1/2π)·√(4P(λ) − V′²(λ)).
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSpec {
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub companion: Vec<f64>,
}

impl PotentialSpec {
    /// The quadratic default V(λ) = λ²/2, V′(λ) = λ, P(z) = 1.
    pub fn quadratic() -> Self {
        Self { v: vec![0.0, 0.0, 0.5], v_prime: vec![0.0, 1.0], companion: vec![1.0] }
    }

    /// Build from V coefficients; V′ is derived, the companion defaults to
    /// zero coefficients of the right degree and can be filled in with
    /// [`PotentialSpec::with_companion`].
    pub fn from_v(v: Vec<f64>) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::InvalidParameter("potential needs degree >= 1".into()));
        }
        let v_prime: Vec<f64> = v.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect();
        let companion = vec![0.0; v_prime.len().saturating_sub(1).max(1)];
        Ok(Self { v, v_prime, companion })
    }

    /// Attach companion coefficients; degree(P) must be degree(V′) − 1.
    pub fn with_companion(mut self, p: Vec<f64>) -> Result<Self> {
        if p.len() != self.v_prime.len().saturating_sub(1).max(1) {
            return Err(Error::InvalidParameter(format!(
                "companion degree {} incompatible with V' degree {}",
                p.len().saturating_sub(1),
                self.v_prime.len().saturating_sub(1)
            )));
        }
        self.companion = p;
        Ok(self)
    }

    pub fn eval_v(&self, x: f64) -> f64 {
        horner(&self.v, x)
    }

    pub fn eval_v_prime(&self, x: f64) -> f64 {
        horner(&self.v_prime, x)
    }

    pub fn eval_companion(&self, x: f64) -> f64 {
        horner(&self.companion, x)
    }

    /// A potential is confining when its leading term has even degree and a
    /// positive coefficient.
    pub fn is_confining(&self) -> bool {
        match self.v.iter().rposition(|&c| c != 0.0) {
            Some(deg) => deg >= 2 && deg % 2 == 0 && self.v[deg] > 0.0,
            None => false,
        }
    }
}

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Full description of an ensemble draw. The seed pins the sample exactly:
/// identical specs produce bit-identical output.
#[derive(Debug, Clone)]
pub struct EnsembleSpec {
    pub kind: EnsembleKind,
    pub n: usize,
    pub sigma2: f64,
    pub beta: f64,
    pub mu_tail: Option<f64>,
    pub spike: Option<f64>,
    pub time: Option<f64>,
    pub potential: PotentialSpec,
    pub seed: u64,
    /// Bulk support of the limiting density, when known; used by the
    /// window-sampling machinery to reject probes outside the spectrum.
    pub bulk: Option<(f64, f64)>,
}

impl EnsembleSpec {
    fn base(kind: EnsembleKind, n: usize, sigma2: f64, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!("matrix size n={n} must be >= 2")));
        }
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma2={sigma2} must be > 0")));
        }
        Ok(Self {
            kind,
            n,
            sigma2,
            beta: 1.0,
            mu_tail: None,
            spike: None,
            time: None,
            potential: PotentialSpec::quadratic(),
            seed,
            bulk: None,
        })
    }

    pub fn goe(n: usize, sigma2: f64, seed: u64) -> Result<Self> {
        let mut s = Self::base(EnsembleKind::Goe, n, sigma2, seed)?;
        let edge = 2.0 * sigma2.sqrt();
        s.bulk = Some((-edge, edge));
        Ok(s)
    }

    pub fn beta_tridiagonal(n: usize, beta: f64, sigma2: f64, seed: u64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta={beta} must be > 0")));
        }
        let mut s = Self::base(EnsembleKind::BetaTridiagonal, n, sigma2, seed)?;
        s.beta = beta;
        let edge = 2.0 * sigma2.sqrt();
        s.bulk = Some((-edge, edge));
        Ok(s)
    }

    pub fn coulomb(n: usize, beta: f64, potential: PotentialSpec, seed: u64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::InvalidParameter(format!("beta={beta} must be > 0")));
        }
        if !potential.is_confining() {
            return Err(Error::InvalidParameter(
                "potential is not confining (needs even leading degree, positive coefficient)"
                    .into(),
            ));
        }
        let mut s = Self::base(EnsembleKind::CoulombMetropolis, n, 1.0, seed)?;
        s.beta = beta;
        s.potential = potential;
        Ok(s)
    }

    pub fn levy(n: usize, mu_tail: f64, seed: u64) -> Result<Self> {
        if !(mu_tail > 0.0 && mu_tail < 2.0) {
            return Err(Error::InvalidParameter(format!("mu={mu_tail} must lie in (0, 2)")));
        }
        let mut s = Self::base(EnsembleKind::Levy, n, 1.0, seed)?;
        s.mu_tail = Some(mu_tail);
        Ok(s)
    }

    pub fn spiked_goe(n: usize, spike: f64, sigma2: f64, time: f64, seed: u64) -> Result<Self> {
        if time < 0.0 {
            return Err(Error::InvalidParameter(format!("time t={time} must be >= 0")));
        }
        let mut s = Self::base(EnsembleKind::SpikedGoe, n, sigma2, seed)?;
        s.spike = Some(spike);
        s.time = Some(time);
        let edge = 2.0 * (sigma2 * time).sqrt();
        s.bulk = Some((-edge, edge));
        Ok(s)
    }
}

/// Ordered eigenvalue list (descending) with the spec that produced it.
#[derive(Debug, Clone)]
pub struct Spectrum {
    values: Vec<f64>,
    pub spec: Option<EnsembleSpec>,
}

impl Spectrum {
    /// Wrap a value list, sorting it into descending order.
    pub fn new(mut values: Vec<f64>, spec: Option<EnsembleSpec>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("empty spectrum".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite eigenvalue".into()));
        }
        values.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(Self { values, spec })
    }

    /// Eigenvalues λ₁ ≥ λ₂ ≥ … ≥ λ_N.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Bulk support interval inherited from the ensemble spec, if known.
    pub fn bulk(&self) -> Option<(f64, f64)> {
        self.spec.as_ref().and_then(|s| s.bulk)
    }
}

/// Spectrum plus the orthonormal eigenbasis (columns).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub spectrum: Spectrum,
    pub basis: DMatrix<f64>,
}

/// Dense GOE sample: symmetric, off-diagonal variance σ²/N, diagonal 2σ²/N.
pub fn sample_goe(spec: &EnsembleSpec) -> Result<DMatrix<f64>> {
    if spec.kind != EnsembleKind::Goe {
        return Err(Error::InvalidParameter("sample_goe needs kind = goe".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(goe_matrix(spec.n, spec.sigma2, &mut rng))
}

/// GOE matrix body shared by the static and Brownian samplers.
pub(crate) fn goe_matrix(n: usize, sigma2: f64, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let off = (sigma2 / n as f64).sqrt();
    let diag = (2.0 * sigma2 / n as f64).sqrt();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let g: f64 = StandardNormal.sample(rng);
            let x = if i == j { diag * g } else { off * g };
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

/// Spectrum of the tridiagonal β-ensemble realization: Gaussian diagonal of
/// variance 2σ²/(Nβ) and subdiagonal entries σ·χ_{β(N−k)}/√(Nβ). The joint
/// eigenvalue law is the Coulomb-gas density with V(λ) = λ²/(2σ²) and the
/// limiting density is the semicircle on [−2σ, 2σ]; the eigensolve is O(N²).
pub fn sample_beta_tridiagonal(spec: &EnsembleSpec) -> Result<Spectrum> {
    if spec.kind != EnsembleKind::BetaTridiagonal {
        return Err(Error::InvalidParameter(
            "sample_beta_tridiagonal needs kind = beta_tridiagonal".into(),
        ));
    }
    if !(spec.beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta={} must be > 0", spec.beta)));
    }
    let n = spec.n;
    let sigma = spec.sigma2.sqrt();
    let scale = 1.0 / (n as f64 * spec.beta).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut d = Vec::with_capacity(n);
    for _ in 0..n {
        let g: f64 = StandardNormal.sample(&mut rng);
        d.push(std::f64::consts::SQRT_2 * sigma * scale * g);
    }
    let mut e = Vec::with_capacity(n - 1);
    for k in 1..n {
        let dof = spec.beta * (n - k) as f64;
        let chi2 = ChiSquared::new(dof)
            .map_err(|err| Error::InvalidParameter(format!("chi-squared dof {dof}: {err}")))?;
        e.push(sigma * scale * chi2.sample(&mut rng).sqrt());
    }
    let values = linalg::tridiagonal_eigenvalues(&d, &e)?;
    Spectrum::new(values, Some(spec.clone()))
}

/// Single-particle Metropolis sampler for the Coulomb-gas joint density with
/// an arbitrary confining polynomial potential. Step size is auto-tuned
/// towards ~30% acceptance during burn-in (the first half of the sweep
/// budget); returns the final configuration.
pub fn sample_coulomb_metropolis(spec: &EnsembleSpec, steps: usize) -> Result<Spectrum> {
    if spec.kind != EnsembleKind::CoulombMetropolis {
        return Err(Error::InvalidParameter(
            "sample_coulomb_metropolis needs kind = coulomb_metropolis".into(),
        ));
    }
    if !spec.potential.is_confining() {
        return Err(Error::InvalidParameter("potential is not confining".into()));
    }
    let n = spec.n;
    let nf = n as f64;
    let beta = spec.beta;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    // Deterministic initial configuration: equispaced on [−1, 1].
    let mut lambda: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / nf).collect();
    if steps == 0 {
        return Spectrum::new(lambda, Some(spec.clone()));
    }

    let mut step = 1.0 / nf.sqrt();
    let burn_in = steps / 2;
    let window = 1000.min(steps.max(1));
    let mut accepted_in_window = 0usize;
    let mut proposals_in_window = 0usize;

    for s in 0..steps {
        let i = rng.random_range(0..n);
        let old = lambda[i];
        let g: f64 = StandardNormal.sample(&mut rng);
        let new = old + step * g;
        // ΔE = (Nβ/2)[V(new) − V(old)] − β Σ_{j≠i} [ln|new−λj| − ln|old−λj|]
        let mut delta = 0.5 * nf * beta * (spec.potential.eval_v(new) - spec.potential.eval_v(old));
        let mut reject = false;
        for (j, &lj) in lambda.iter().enumerate() {
            if j == i {
                continue;
            }
            let dn = (new - lj).abs();
            if dn == 0.0 {
                reject = true;
                break;
            }
            delta -= beta * (dn.ln() - (old - lj).abs().ln());
        }
        let accept = !reject && (delta <= 0.0 || rng.random::<f64>() < (-delta).exp());
        if accept {
            lambda[i] = new;
            accepted_in_window += 1;
        }
        proposals_in_window += 1;
        if s < burn_in && proposals_in_window >= window {
            let rate = accepted_in_window as f64 / proposals_in_window as f64;
            if rate > 0.35 {
                step *= 1.15;
            } else if rate < 0.25 {
                step *= 0.85;
            }
            accepted_in_window = 0;
            proposals_in_window = 0;
        }
    }
    Spectrum::new(lambda, Some(spec.clone()))
}

/// Synthetic point-process kind for [`synthetic_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    Poisson,
    PicketFence,
}

fn check_profile(profile: &GridFunction) -> Result<()> {
    let total = profile.integral();
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidParameter(format!(
            "density profile integrates to {total}, not 1"
        )));
    }
    if profile.values().iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidParameter("density profile must be nonnegative".into()));
    }
    Ok(())
}

/// Synthetic spectra: `Poisson` draws n i.i.d. points from the profile,
/// `PicketFence` builds a deterministic locally equispaced comb with spacing
/// Δ = 1/(nρ(x0)) around x0 and a seeded uniform phase offset u ∈ [−1/2, 1/2]
/// (in units of Δ).
pub fn synthetic_spectrum(
    kind: SyntheticKind,
    n: usize,
    profile: &GridFunction,
    x0: f64,
    seed: u64,
) -> Result<Spectrum> {
    check_profile(profile)?;
    if n < 2 {
        return Err(Error::InvalidParameter("need n >= 2 points".into()));
    }
    match kind {
        SyntheticKind::Poisson => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // Inverse-CDF sampling on the trapezoid cumulative of the grid.
            let grid = profile.grid();
            let vals = profile.values();
            let mut cdf = Vec::with_capacity(grid.len());
            cdf.push(0.0);
            for i in 1..grid.len() {
                let inc = 0.5 * (vals[i] + vals[i - 1]) * (grid[i] - grid[i - 1]);
                cdf.push(cdf[i - 1] + inc);
            }
            let total = *cdf.last().unwrap();
            let mut points = Vec::with_capacity(n);
            for _ in 0..n {
                let target = rng.random::<f64>() * total;
                let idx = cdf.partition_point(|&c| c < target).clamp(1, grid.len() - 1);
                let (c0, c1) = (cdf[idx - 1], cdf[idx]);
                let frac = if c1 > c0 { (target - c0) / (c1 - c0) } else { 0.5 };
                points.push(grid[idx - 1] + frac * (grid[idx] - grid[idx - 1]));
            }
            let mut spec = EnsembleSpec::base(EnsembleKind::Poisson, n, 1.0, seed)?;
            spec.bulk = Some(profile.support());
            Spectrum::new(points, Some(spec))
        }
        SyntheticKind::PicketFence => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = rng.random::<f64>() - 0.5;
            picket_fence_with_offset(n, profile, x0, u)
        }
    }
}

/// Picket-fence construction with an explicit phase offset u ∈ [−1/2, 1/2]:
/// the comb is x0 − uΔ + kΔ with Δ = 1/(nρ(x0)), positioned so the points
/// cover the profile support. The eigenvalue closest to x0 sits at distance
/// uΔ below it.
pub fn picket_fence_with_offset(
    n: usize,
    profile: &GridFunction,
    x0: f64,
    u: f64,
) -> Result<Spectrum> {
    check_profile(profile)?;
    if !(-0.5..=0.5).contains(&u) {
        return Err(Error::InvalidParameter(format!("offset u={u} outside [-1/2, 1/2]")));
    }
    let rho = profile.interpolate(x0);
    if rho <= 0.0 {
        return Err(Error::InvalidParameter(format!("profile density vanishes at x0={x0}")));
    }
    let delta = 1.0 / (n as f64 * rho);
    let (a, _b) = profile.support();
    let below = (((x0 - a) / delta).round() as usize).min(n - 1);
    let base = x0 - u * delta - below as f64 * delta;
    let values: Vec<f64> = (0..n).map(|k| base + k as f64 * delta).collect();
    let mut spec = EnsembleSpec::base(EnsembleKind::PicketFence, n, 1.0, u.to_bits())?;
    spec.bulk = Some(profile.support());
    Spectrum::new(values, Some(spec))
}

/// Tail amplitude c_N of the Lévy entry density f(w) = c_N·|w|^{−1−μ},
/// calibrated so that Σᵢ wᵢ²·gᵢ over N independent entries converges to the
/// stable law of index μ/2 whose scale parameter is literally
/// C = mean(|g|^{μ/2}) in the characteristic-function convention
/// exp(−C|k|^α(1 − iβ·sgn k·tan(πα/2))).
pub fn levy_tail_amplitude(n: usize, mu: f64) -> f64 {
    let alpha = 0.5 * mu;
    mu / (2.0 * n as f64 * gamma(1.0 - alpha) * (std::f64::consts::PI * alpha / 2.0).cos())
}

/// Core half-width w₀ of the Lévy entry law: half the probability mass is a
/// uniform core on [−w₀, w₀], half a symmetric Pareto tail with density
/// c_N·|w|^{−1−μ} beyond it.
pub fn levy_core_halfwidth(n: usize, mu: f64) -> f64 {
    (4.0 * levy_tail_amplitude(n, mu) / mu).powf(1.0 / mu)
}

pub(crate) fn levy_entry(rng: &mut ChaCha8Rng, w0: f64, mu: f64) -> f64 {
    if rng.random::<f64>() < 0.5 {
        // uniform core
        w0 * (2.0 * rng.random::<f64>() - 1.0)
    } else {
        let sign = if rng.random::<f64>() < 0.5 { 1.0 } else { -1.0 };
        let magnitude = w0 * rng.random::<f64>().powf(-1.0 / mu);
        sign * magnitude
    }
}

/// Symmetric heavy-tailed matrix with i.i.d. entries (up to symmetry) whose
/// tail density is c_N·|w|^{−1−μ} ~ N^{−1}|w|^{−1−μ} up to the calibration
/// constant of [`levy_tail_amplitude`].
pub fn sample_levy_matrix(spec: &EnsembleSpec) -> Result<DMatrix<f64>> {
    if spec.kind != EnsembleKind::Levy {
        return Err(Error::InvalidParameter("sample_levy_matrix needs kind = levy".into()));
    }
    let mu = spec
        .mu_tail
        .ok_or_else(|| Error::InvalidParameter("levy spec without mu".into()))?;
    if !(0.0 < mu && mu < 2.0) {
        return Err(Error::InvalidParameter(format!("mu={mu} must lie in (0, 2)")));
    }
    let n = spec.n;
    let w0 = levy_core_halfwidth(n, mu);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let w = levy_entry(&mut rng, w0, mu);
            m[(i, j)] = w;
            m[(j, i)] = w;
        }
    }
    Ok(m)
}

/// Rank-one spiked deformation M = μ₁·e₁e₁ᵀ + W(t) where W(t) is a GOE of
/// variance scale σ²t.
pub fn sample_spiked(spec: &EnsembleSpec) -> Result<DMatrix<f64>> {
    if spec.kind != EnsembleKind::SpikedGoe {
        return Err(Error::InvalidParameter("sample_spiked needs kind = spiked_goe".into()));
    }
    let t = spec.time.ok_or_else(|| Error::InvalidParameter("spiked spec without t".into()))?;
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t={t} must be >= 0")));
    }
    let mu1 =
        spec.spike.ok_or_else(|| Error::InvalidParameter("spiked spec without spike".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut m = if t > 0.0 {
        goe_matrix(spec.n, spec.sigma2 * t, &mut rng)
    } else {
        DMatrix::zeros(spec.n, spec.n)
    };
    m[(0, 0)] += mu1;
    Ok(m)
}

/// Full eigendecomposition of a real symmetric matrix; values descending,
/// basis columns orthonormal.
pub fn eigen_decompose(matrix: &DMatrix<f64>) -> Result<EigenSystem> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Input("eigen_decompose needs a square matrix".into()));
    }
    let asym = linalg::max_asymmetry(matrix);
    if asym > 1e-10 {
        return Err(Error::Input(format!("matrix asymmetry {asym:.3e} exceeds 1e-10")));
    }
    let (values, basis) = linalg::eigen_sym(matrix)?;
    Ok(EigenSystem { spectrum: Spectrum::new(values, None)?, basis })
}

/// Semicircle density with variance scale σ²: ρ(x) = √(4σ²−x²)/(2πσ²).
pub fn semicircle_density(x: f64, sigma2: f64) -> f64 {
    let r2 = 4.0 * sigma2;
    if x * x >= r2 {
        return 0.0;
    }
    (r2 - x * x).sqrt() / (2.0 * std::f64::consts::PI * sigma2)
}

/// Semicircle cumulative distribution on [−2σ, 2σ].
pub fn semicircle_cdf(x: f64, sigma2: f64) -> f64 {
    let sigma = sigma2.sqrt();
    let edge = 2.0 * sigma;
    if x <= -edge {
        return 0.0;
    }
    if x >= edge {
        return 1.0;
    }
    let xs = x / sigma;
    0.5 + xs * (4.0 - xs * xs).sqrt() / (4.0 * std::f64::consts::PI)
        + (xs / 2.0).asin() / std::f64::consts::PI
}

/// Principal value of the semicircle Stieltjes transform inside the bulk:
/// g_R(x) = x/(2σ²).
pub fn semicircle_gr(x: f64, sigma2: f64) -> f64 {
    x / (2.0 * sigma2)
}

/// Uniform density 1/(b−a) on [a, b] as a grid function.
pub fn uniform_profile(a: f64, b: f64, points: usize) -> Result<GridFunction> {
    if !(b > a) {
        return Err(Error::InvalidParameter("need b > a".into()));
    }
    let n = points.max(2);
    let grid: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
    let vals = vec![1.0 / (b - a); n];
    GridFunction::new(grid, vals)
}

/// Semicircle density tabulated on a uniform grid (σ² scale).
pub fn semicircle_profile(sigma2: f64, points: usize) -> Result<GridFunction> {
    let edge = 2.0 * sigma2.sqrt();
    let n = points.max(3);
    let grid: Vec<f64> =
        (0..n).map(|i| -edge + 2.0 * edge * i as f64 / (n - 1) as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| semicircle_density(x, sigma2)).collect();
    GridFunction::new(grid, vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::ks_statistic;

    #[test]
    fn goe_rejects_degenerate_scale() {
        assert!(EnsembleSpec::goe(100, 0.0, 1).is_err());
        assert!(EnsembleSpec::goe(1, 1.0, 1).is_err());
    }

    #[test]
    fn goe_reproducible() {
        let spec = EnsembleSpec::goe(20, 1.0, 99).unwrap();
        let a = sample_goe(&spec).unwrap();
        let b = sample_goe(&spec).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn goe_offdiagonal_variance() {
        // n=2, σ²=1: off-diagonal variance is σ²/N = 1/2.
        let mut acc = 0.0;
        let reps = 100_000;
        for seed in 0..reps {
            let spec = EnsembleSpec::goe(2, 1.0, seed).unwrap();
            let m = sample_goe(&spec).unwrap();
            acc += m[(0, 1)] * m[(0, 1)];
        }
        let var = acc / reps as f64;
        assert!((var - 0.5).abs() < 0.01, "var={var}");
    }

    #[test]
    fn goe_semicircle_ks() {
        let spec = EnsembleSpec::goe(500, 1.0, 7).unwrap();
        let m = sample_goe(&spec).unwrap();
        let ev = linalg::eigenvalues_sym(&m).unwrap();
        let d = ks_statistic(&ev, |x| semicircle_cdf(x, 1.0)).unwrap();
        assert!(d < 0.05, "KS={d}");
        // Soft support check.
        assert!(ev[0] < 2.5 && *ev.last().unwrap() > -2.5);
    }

    #[test]
    fn beta2_tridiagonal_semicircle() {
        let spec = EnsembleSpec::beta_tridiagonal(1000, 2.0, 1.0, 13).unwrap();
        let s = sample_beta_tridiagonal(&spec).unwrap();
        let d = ks_statistic(s.values(), |x| semicircle_cdf(x, 1.0)).unwrap();
        assert!(d < 0.05, "KS={d}");
    }

    #[test]
    fn beta1_tridiagonal_matches_dense_goe() {
        // Pool 1e5 eigenvalues from each construction; two-sample KS < 0.02.
        let per = 500;
        let reps = 200;
        let mut pool_t = Vec::with_capacity(per * reps);
        let mut pool_g = Vec::with_capacity(per * reps);
        for r in 0..reps as u64 {
            let st = EnsembleSpec::beta_tridiagonal(per, 1.0, 1.0, 1000 + r).unwrap();
            pool_t.extend_from_slice(sample_beta_tridiagonal(&st).unwrap().values());
            let sg = EnsembleSpec::goe(per, 1.0, 5000 + r).unwrap();
            let m = sample_goe(&sg).unwrap();
            pool_g.extend(linalg::eigenvalues_sym(&m).unwrap());
        }
        let d = crate::numerics::ks_two_sample(&pool_t, &pool_g).unwrap();
        assert!(d < 0.02, "two-sample KS={d}");
    }

    #[test]
    fn beta4_more_rigid_than_beta1() {
        // Variance of λ_max shrinks as β grows.
        let reps = 10_000u64;
        let n = 4;
        let var = |beta: f64, offset: u64| {
            let mut xs = Vec::with_capacity(reps as usize);
            for seed in 0..reps {
                let s = EnsembleSpec::beta_tridiagonal(n, beta, 1.0, offset + seed).unwrap();
                xs.push(sample_beta_tridiagonal(&s).unwrap().values()[0]);
            }
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / xs.len() as f64
        };
        let v1 = var(1.0, 0);
        let v4 = var(4.0, 1_000_000);
        assert!(v4 < v1, "v1={v1} v4={v4}");
    }

    #[test]
    fn beta_tridiagonal_rejects_bad_beta() {
        assert!(EnsembleSpec::beta_tridiagonal(100, 0.0, 1.0, 1).is_err());
        assert!(EnsembleSpec::beta_tridiagonal(100, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn metropolis_zero_steps_identity() {
        let spec = EnsembleSpec::coulomb(50, 2.0, PotentialSpec::quadratic(), 3).unwrap();
        let s = sample_coulomb_metropolis(&spec, 0).unwrap();
        // Equispaced initial configuration, sorted descending.
        let mut expect: Vec<f64> =
            (0..50).map(|i| -1.0 + 2.0 * (i as f64 + 0.5) / 50.0).collect();
        expect.reverse();
        assert_eq!(s.values(), expect.as_slice());
    }

    #[test]
    fn metropolis_quadratic_semicircle() {
        let spec = EnsembleSpec::coulomb(200, 2.0, PotentialSpec::quadratic(), 17).unwrap();
        let s = sample_coulomb_metropolis(&spec, 1_000_000).unwrap();
        let d = ks_statistic(s.values(), |x| semicircle_cdf(x, 1.0)).unwrap();
        assert!(d < 0.08, "KS={d}");
    }

    #[test]
    fn metropolis_quartic_one_cut_density() {
        // V = λ⁴/4: ρ₀(λ) = (1/2π)√(4P(λ) − λ⁶) with P(z) = z² + c and c
        // fixed by normalization of ρ₀.
        let pot = PotentialSpec::from_v(vec![0.0, 0.0, 0.0, 0.0, 0.25]).unwrap();
        let spec = EnsembleSpec::coulomb(200, 2.0, pot, 23).unwrap();
        let s = sample_coulomb_metropolis(&spec, 1_200_000).unwrap();

        let density = |x: f64, c: f64| {
            let inside = 4.0 * (x * x + c) - x.powi(6);
            if inside <= 0.0 {
                0.0
            } else {
                inside.sqrt() / (2.0 * std::f64::consts::PI)
            }
        };
        let normalize = |c: f64| {
            let mut acc = 0.0;
            let n = 4000;
            let h = 8.0 / n as f64;
            for i in 0..n {
                let x = -4.0 + (i as f64 + 0.5) * h;
                acc += density(x, c) * h;
            }
            acc
        };
        let (mut lo, mut hi) = (0.0, 5.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if normalize(mid) < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c = 0.5 * (lo + hi);
        let n_grid = 4000;
        let h = 8.0 / n_grid as f64;
        let mut cdf_grid = vec![0.0f64; n_grid + 1];
        for i in 0..n_grid {
            let x = -4.0 + (i as f64 + 0.5) * h;
            cdf_grid[i + 1] = cdf_grid[i] + density(x, c) * h;
        }
        let cdf = |x: f64| {
            let pos = ((x + 4.0) / h).clamp(0.0, n_grid as f64);
            let i = pos.floor() as usize;
            let frac = pos - i as f64;
            if i >= n_grid {
                cdf_grid[n_grid]
            } else {
                cdf_grid[i] + frac * (cdf_grid[i + 1] - cdf_grid[i])
            }
        };
        let d = ks_statistic(s.values(), cdf).unwrap();
        assert!(d < 0.1, "KS={d} (c={c})");
    }

    #[test]
    fn metropolis_rejects_nonconfining() {
        let odd = PotentialSpec::from_v(vec![0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(EnsembleSpec::coulomb(10, 1.0, odd, 1).is_err());
        let negative = PotentialSpec::from_v(vec![0.0, 0.0, -1.0]).unwrap();
        assert!(EnsembleSpec::coulomb(10, 1.0, negative, 1).is_err());
    }

    #[test]
    fn picket_zero_offset_hits_x0() {
        let profile = uniform_profile(-2.0, 2.0, 401).unwrap();
        let s = picket_fence_with_offset(1000, &profile, 0.0, 0.0).unwrap();
        let closest = s
            .values()
            .iter()
            .fold(f64::MAX, |acc, &v| if v.abs() < acc.abs() { v } else { acc });
        assert!(closest.abs() < 1e-12, "closest={closest}");
    }

    #[test]
    fn picket_spacing_exact() {
        let profile = uniform_profile(-2.0, 2.0, 401).unwrap();
        let s = picket_fence_with_offset(1000, &profile, 0.3, 0.2).unwrap();
        let delta = 4.0 / 1000.0;
        let mut vals = s.values().to_vec();
        vals.reverse(); // ascending
        for w in vals.windows(2) {
            assert!(((w[1] - w[0]) - delta).abs() < 1e-12, "spacing {}", w[1] - w[0]);
        }
    }

    #[test]
    fn picket_offset_uniform_over_seeds() {
        let profile = uniform_profile(-2.0, 2.0, 101).unwrap();
        let mut offsets = Vec::new();
        for seed in 0..10_000 {
            let s =
                synthetic_spectrum(SyntheticKind::PicketFence, 16, &profile, 0.0, seed).unwrap();
            // Recover u from the point closest to x0 = 0.
            let delta = 4.0 / 16.0;
            let closest = s
                .values()
                .iter()
                .fold(f64::MAX, |acc, &v| if v.abs() < acc.abs() { v } else { acc });
            offsets.push((0.0 - closest) / delta + 0.5); // in [0, 1]
        }
        let d = ks_statistic(&offsets, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(d < 0.05, "KS={d}");
    }

    #[test]
    fn poisson_spacing_exponential() {
        let profile = uniform_profile(-2.0, 2.0, 401).unwrap();
        let n = 1000;
        let mut gaps = Vec::new();
        for seed in 0..200 {
            let s = synthetic_spectrum(SyntheticKind::Poisson, n, &profile, 0.0, seed).unwrap();
            let mut v = s.values().to_vec();
            v.reverse();
            // central region only, where the density is flat
            for w in v.windows(2) {
                if w[0] > -1.0 && w[1] < 1.0 {
                    gaps.push(w[1] - w[0]);
                }
            }
        }
        let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
        let expect = 1.0 / (n as f64 * 0.25);
        assert!((mean / expect - 1.0).abs() < 0.05, "mean gap {mean} vs {expect}");
        let d = ks_statistic(&gaps, |x| 1.0 - (-x / expect).exp()).unwrap();
        assert!(d < 0.05, "KS={d}");
    }

    #[test]
    fn poisson_rejects_unnormalized_profile() {
        let grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.01).collect();
        let vals = vec![2.5; grid.len()];
        let bad = GridFunction::new(grid, vals).unwrap();
        assert!(synthetic_spectrum(SyntheticKind::Poisson, 10, &bad, 0.5, 1).is_err());
    }

    #[test]
    fn levy_rejects_bad_mu() {
        assert!(EnsembleSpec::levy(100, 0.0, 1).is_err());
        assert!(EnsembleSpec::levy(100, 2.0, 1).is_err());
    }

    #[test]
    fn levy_hill_tail_exponent() {
        let spec = EnsembleSpec::levy(500, 1.0, 31).unwrap();
        let m = sample_levy_matrix(&spec).unwrap();
        let mut mags: Vec<f64> = Vec::with_capacity(500 * 501 / 2);
        for i in 0..500 {
            for j in i..500 {
                mags.push(m[(i, j)].abs());
            }
        }
        mags.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let k = mags.len() / 100; // top 1%
        let xk = mags[k];
        let hill: f64 = mags[..k].iter().map(|x| (x / xk).ln()).sum::<f64>() / k as f64;
        let tail_exponent = 1.0 + 1.0 / hill;
        assert!((tail_exponent - 2.0).abs() < 0.2, "tail exponent {tail_exponent}");
    }

    #[test]
    fn levy_tail_flatness() {
        // P(|W| > w)·N·w^μ flat within 20% over a decade.
        let n = 500;
        let mu = 1.0;
        let spec = EnsembleSpec::levy(n, mu, 77).unwrap();
        let m = sample_levy_matrix(&spec).unwrap();
        let mut mags: Vec<f64> = Vec::new();
        for i in 0..n {
            for j in i..n {
                mags.push(m[(i, j)].abs());
            }
        }
        let total = mags.len() as f64;
        let w0 = levy_core_halfwidth(n, mu);
        let mut ratios = Vec::new();
        for &w in &[10.0 * w0, 30.0 * w0, 100.0 * w0] {
            let above = mags.iter().filter(|&&x| x > w).count() as f64 / total;
            ratios.push(above * n as f64 * w.powf(mu));
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        assert!(max / min < 1.2, "ratios {ratios:?}");
    }

    #[test]
    fn levy_variance_diverges_for_mu_below_two() {
        let spec = EnsembleSpec::levy(500, 1.5, 41).unwrap();
        let m = sample_levy_matrix(&spec).unwrap();
        let mut entries: Vec<f64> = Vec::new();
        for i in 0..500 {
            for j in i..500 {
                entries.push(m[(i, j)]);
            }
        }
        let batch_var =
            |xs: &[f64]| xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
        let first = batch_var(&entries[..entries.len() / 10]);
        let all = batch_var(&entries);
        assert!(
            all / first > 1.5 || first / all > 1.5,
            "variance stabilized: {first} vs {all}"
        );
    }

    #[test]
    fn levy_sign_balance() {
        let spec = EnsembleSpec::levy(300, 1.0, 53).unwrap();
        let m = sample_levy_matrix(&spec).unwrap();
        let mut pos = 0usize;
        let mut tot = 0usize;
        for i in 0..300 {
            for j in i..300 {
                tot += 1;
                if m[(i, j)] > 0.0 {
                    pos += 1;
                }
            }
        }
        let z = (pos as f64 - tot as f64 / 2.0) / (0.5 * (tot as f64).sqrt());
        assert!(z.abs() < 3.0, "sign imbalance z={z}");
    }

    #[test]
    fn spiked_at_time_zero() {
        let spec = EnsembleSpec::spiked_goe(50, 2.0, 1.0, 0.0, 1).unwrap();
        let m = sample_spiked(&spec).unwrap();
        let es = eigen_decompose(&m).unwrap();
        assert!((es.spectrum.values()[0] - 2.0).abs() < 1e-12);
        for &v in &es.spectrum.values()[1..] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn spiked_negative_time_rejected() {
        assert!(EnsembleSpec::spiked_goe(50, 2.0, 1.0, -1.0, 1).is_err());
    }

    #[test]
    fn spiked_lambda_max_tracks_theory() {
        // λ₁(t) = μ₁ + σ²t/μ₁ below the transition.
        let mut acc = 0.0;
        let reps = 3;
        for seed in 0..reps {
            let spec = EnsembleSpec::spiked_goe(2000, 2.0, 1.0, 1.0, 100 + seed).unwrap();
            let m = sample_spiked(&spec).unwrap();
            let top = linalg::lanczos_top(&m, 250, 1e-10, 1).unwrap();
            acc += top.value;
        }
        let mean = acc / reps as f64;
        assert!((mean - 2.5).abs() < 0.05, "lambda1 {mean}");
    }

    #[test]
    fn spiked_beyond_transition_at_edge() {
        let t = 5.0;
        let mut acc = 0.0;
        let reps = 3;
        for seed in 0..reps {
            let spec = EnsembleSpec::spiked_goe(2000, 2.0, 1.0, t, 200 + seed).unwrap();
            let m = sample_spiked(&spec).unwrap();
            let top = linalg::lanczos_top(&m, 400, 1e-10, 1).unwrap();
            acc += top.value;
        }
        let mean = acc / reps as f64;
        let edge = 2.0 * t.sqrt();
        assert!((mean - edge).abs() < 0.1, "lambda1 {mean} vs edge {edge}");
    }

    #[test]
    fn eigen_decompose_identity_and_diag() {
        let id = DMatrix::<f64>::identity(3, 3);
        let es = eigen_decompose(&id).unwrap();
        assert_eq!(es.spectrum.values(), &[1.0, 1.0, 1.0]);

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let es = eigen_decompose(&d).unwrap();
        assert_eq!(es.spectrum.values(), &[3.0, 2.0, 1.0]);
    }

    #[test]
    fn eigen_decompose_reconstruction() {
        let spec = EnsembleSpec::goe(100, 1.0, 3).unwrap();
        let m = sample_goe(&spec).unwrap();
        let es = eigen_decompose(&m).unwrap();
        // Orthonormality
        let qtq = es.basis.transpose() * &es.basis;
        let mut ortho_err = 0.0f64;
        for i in 0..100 {
            for j in 0..100 {
                let target = if i == j { 1.0 } else { 0.0 };
                ortho_err = ortho_err.max((qtq[(i, j)] - target).abs());
            }
        }
        assert!(ortho_err < 1e-10, "orthonormality {ortho_err}");
        // Reconstruction
        let lam = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            es.spectrum.values().to_vec(),
        ));
        let rec = &es.basis * lam * es.basis.transpose();
        let scale = m.iter().fold(0.0f64, |a, &x| a.max(x.abs()));
        let mut err = 0.0f64;
        for i in 0..100 {
            for j in 0..100 {
                err = err.max((rec[(i, j)] - m[(i, j)]).abs());
            }
        }
        assert!(err < 1e-8 * scale, "reconstruction {err}");
    }

    #[test]
    fn eigen_decompose_rejects_asymmetric() {
        let mut m = DMatrix::<f64>::zeros(3, 3);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0 + 1e-6;
        assert!(eigen_decompose(&m).is_err());
    }

    #[test]
    fn semicircle_cdf_sane() {
        assert!((semicircle_cdf(0.0, 1.0) - 0.5).abs() < 1e-12);
        assert_eq!(semicircle_cdf(2.0, 1.0), 1.0);
        assert_eq!(semicircle_cdf(-2.0, 1.0), 0.0);
        assert!((semicircle_density(0.0, 1.0) - 1.0 / std::f64::consts::PI).abs() < 1e-12);
    }
}
