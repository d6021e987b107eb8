//! Photon-number statistics of two-mode Gaussian states.
//!
//! With `n̂ = (x̂² + p̂² - 1)/2`, the number moments follow from the first
//! and second quadrature moments by Gaussian (Isserlis) factorization. For
//! a single mode with mean `μ` and covariance block `V`:
//!
//! ```text
//! ⟨n⟩      = (tr V - 1)/2 + |μ|²/2
//! Var(n)   = tr(V²)/2 - 1/4 + μᵀ V μ
//! Cov(a,b) = tr(C Cᵀ)/2 + μ_aᵀ C μ_b
//! ```
//!
//! where `C` is the off-diagonal covariance block. The `-1/4` comes from
//! `[a, a†] = 1`; it is what makes vacuum noiseless and coherent light
//! Poissonian.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gaussian::GaussianState;

/// Means, variances and cross-covariance of `n̂_a`, `n̂_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhotonMoments {
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    pub cov_ab: f64,
}

impl PhotonMoments {
    pub fn total_mean(&self) -> f64 {
        self.mean_a + self.mean_b
    }
}

fn block(state: &GaussianState, row: usize, col: usize) -> Matrix2<f64> {
    state.cov().fixed_view::<2, 2>(row, col).into_owned()
}

fn mode_mean(state: &GaussianState, offset: usize) -> Vector2<f64> {
    state.mean().fixed_rows::<2>(offset).into_owned()
}

fn single_mode(v: &Matrix2<f64>, mu: &Vector2<f64>) -> (f64, f64) {
    let mean = (v.trace() - 1.0) / 2.0 + mu.norm_squared() / 2.0;
    let var = (v * v).trace() / 2.0 - 0.25 + (mu.transpose() * v * mu)[0];
    (mean, var.max(0.0))
}

/// Exact number moments of a Gaussian state.
///
/// Fails if the covariance violates the uncertainty relation, which can
/// only happen through an upstream bug.
pub fn photon_moments(state: &GaussianState) -> Result<PhotonMoments> {
    state.validate()?;
    let (va, vb, c) = (block(state, 0, 0), block(state, 2, 2), block(state, 0, 2));
    let (mu_a, mu_b) = (mode_mean(state, 0), mode_mean(state, 2));
    let (mean_a, var_a) = single_mode(&va, &mu_a);
    let (mean_b, var_b) = single_mode(&vb, &mu_b);
    let cov_ab = (c * c.transpose()).trace() / 2.0 + (mu_a.transpose() * c * mu_b)[0];
    Ok(PhotonMoments {
        mean_a,
        mean_b,
        var_a,
        var_b,
        cov_ab,
    })
}

/// `Δ²(n̂_a + n̂_b)`.
pub fn variance_of_sum(m: &PhotonMoments) -> f64 {
    m.var_a + m.var_b + 2.0 * m.cov_ab
}

/// `⟨(n̂_a + n̂_b)²⟩`.
pub fn expected_n_squared(m: &PhotonMoments) -> f64 {
    variance_of_sum(m) + m.total_mean().powi(2)
}
