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

//! Dense and tridiagonal symmetric eigen-solvers.
//!
//! The tridiagonal path (implicit-shift QL, eigenvalues only) is O(N²) and is
//! what makes large β-ensemble sampling cheap. The dense path wraps
//! [`nalgebra::SymmetricEigen`]. Extremal eigenpairs of large matrices use a
//! Lanczos iteration with full reorthogonalization.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

const QL_MAX_SWEEPS: usize = 50;

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
/// algorithm. `diag` has length n, `offdiag` length n−1. Returns the
/// eigenvalues sorted in descending order.
pub fn tridiagonal_eigenvalues(diag: &[f64], offdiag: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Input("empty tridiagonal matrix".into()));
    }
    if offdiag.len() + 1 != n {
        return Err(Error::Input(format!(
            "offdiagonal length {} does not match diagonal length {}",
            offdiag.len(),
            n
        )));
    }
    let mut d = diag.to_vec();
    let mut e = offdiag.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Locate the first negligible subdiagonal element at or after l.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > QL_MAX_SWEEPS {
                return Err(Error::NoConvergence(format!(
                    "QL sweep limit exceeded at index {l}"
                )));
            }
            // Wilkinson-style shift from the 2x2 block at l.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(if g >= 0.0 { 1.0 } else { -1.0 }));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Deflate: the rotation chain collapsed early.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    d.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(d)
}

/// Maximum absolute asymmetry `max |A_ij - A_ji|` of a square matrix.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

/// Full symmetric eigendecomposition, eigenvalues sorted descending with the
/// eigenvector columns permuted to match.
pub fn eigen_sym(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Input("eigen_sym needs a square matrix".into()));
    }
    let se = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| se.eigenvalues[j].partial_cmp(&se.eigenvalues[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut basis = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        basis.set_column(dst, &se.eigenvectors.column(src));
    }
    Ok((values, basis))
}

/// Eigenvalues only of a dense symmetric matrix, sorted descending.
pub fn eigenvalues_sym(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Input("eigenvalues_sym needs a square matrix".into()));
    }
    let mut v: Vec<f64> = a.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(v)
}

/// Result of a Lanczos extremal-eigenpair run.
#[derive(Debug, Clone)]
pub struct TopEigenpair {
    pub value: f64,
    pub vector: DVector<f64>,
    pub iterations: usize,
    /// Residual estimate |β_k s_k| for the converged Ritz pair.
    pub residual: f64,
}

/// Largest eigenvalue and eigenvector of a dense symmetric matrix via Lanczos
/// with full reorthogonalization.
///
/// Converges to the algebraically largest eigenvalue (no shift needed even if
/// the spectrum is nearly symmetric). `tol` is a relative residual target.
pub fn lanczos_top(a: &DMatrix<f64>, max_iter: usize, tol: f64, seed: u64) -> Result<TopEigenpair> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::Input("lanczos_top needs a square matrix".into()));
    }
    let m = max_iter.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = DVector::from_fn(n, |_, _| rng.random::<f64>() - 0.5);
    v /= v.norm();

    let mut basis: Vec<DVector<f64>> = vec![v.clone()];
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);

    let mut w = a * &v;
    for k in 0..m {
        let alpha = v.dot(&w);
        alphas.push(alpha);
        w.axpy(-alpha, &v, 1.0);
        if k > 0 {
            // w already had the beta*v_{k-1} term removed below.
        }
        // Full reorthogonalization, two passes.
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let beta = w.norm();

        // Ritz extraction on the k+1 sized tridiagonal.
        let kk = alphas.len();
        let mut t = DMatrix::zeros(kk, kk);
        for i in 0..kk {
            t[(i, i)] = alphas[i];
            if i + 1 < kk {
                t[(i, i + 1)] = betas[i];
                t[(i + 1, i)] = betas[i];
            }
        }
        let se = t.symmetric_eigen();
        let mut top = 0;
        for i in 1..kk {
            if se.eigenvalues[i] > se.eigenvalues[top] {
                top = i;
            }
        }
        let theta = se.eigenvalues[top];
        let s_last = se.eigenvectors[(kk - 1, top)];
        let residual = (beta * s_last).abs();
        let converged = residual <= tol * theta.abs().max(1.0);

        if converged || beta <= f64::EPSILON * theta.abs().max(1.0) || kk == n || k + 1 == m {
            let mut vec = DVector::zeros(n);
            for (i, q) in basis.iter().enumerate() {
                vec.axpy(se.eigenvectors[(i, top)], q, 1.0);
            }
            vec /= vec.norm();
            return Ok(TopEigenpair {
                value: theta,
                vector: vec,
                iterations: kk,
                residual,
            });
        }

        betas.push(beta);
        let v_next = &w / beta;
        w = a * &v_next;
        w.axpy(-beta, &v, 1.0);
        v = v_next;
        basis.push(v.clone());
    }
    Err(Error::NoConvergence("lanczos iteration budget exhausted".into()))
}
