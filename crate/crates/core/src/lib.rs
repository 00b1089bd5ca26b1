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

//! # rmtlab
//!
//! A numerical laboratory for spectral statistics of large random matrices.
//!
//! The crate is organised around a handful of classic constructions:
//!
//! - [`ensembles`] — samplers for GOE, tridiagonal β-ensembles, Coulomb-gas
//!   Metropolis chains, Poisson / picket-fence point processes, heavy-tailed
//!   (Lévy) matrices and rank-one spiked deformations, plus dense symmetric
//!   eigendecomposition.
//! - [`resolvent_stats`] — the Stieltjes transform evaluated *on* the real
//!   axis, its windowed sampling law (a Cauchy distribution inside the bulk),
//!   tail-based density estimation and the cavity population dynamics.
//! - [`coulomb_scaling`] — the scaling function Γ(y) describing the response
//!   of a log-gas to an imaginary probe charge, with its Riccati ODE residual
//!   and the density-perturbation profile F(u).
//! - [`dyson_flow`] — additive matrix Brownian motion, the eigenvalue SDE,
//!   the Burgers flow of the Stieltjes transform solved by characteristics,
//!   eigenvector overlaps and the rank-one spike transition.
//! - [`levy`] — α-stable laws and the self-consistent spectral density of
//!   Lévy matrices.
//! - [`numerics`] — principal-value quadrature, Hilbert inversion and small
//!   statistical utilities shared by everything above.
//!
//! All samplers take explicit 64-bit seeds and are bit-reproducible for a
//! fixed build.

pub mod coulomb_scaling;
pub mod dyson_flow;
pub mod ensembles;
pub mod levy;
pub mod linalg;
pub mod numerics;
pub mod resolvent_stats;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation received an out-of-range parameter.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested evaluation point lies outside the region where the
    /// quantity is defined (e.g. a probe outside the spectral bulk).
    #[error("domain error: {0}")]
    Domain(String),

    /// A pointwise evaluation hit a pole or an exact collision.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// An iterative solver exhausted its budget.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    /// Not enough data for the requested statistical precision.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// Malformed input data (non-symmetric matrix, empty sample set, ...).
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
