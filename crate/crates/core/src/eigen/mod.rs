//! Lowest eigenpairs of the assembled (generalized) symmetric problems.

mod band;
mod dense;
mod lobpcg;

use alloc::boxed::Box;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::assembly::SparseSymmetricProblem;
use crate::math::{norm2, sqrt};

pub use dense::{dense_oracle, DENSE_ORACLE_CAP};
pub use lobpcg::smallest_eigenpairs;

/// Preconditioner applied to LOBPCG residuals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Preconditioner {
    /// `diag(A)⁻¹`.
    Diagonal,
    /// `(A - σM)⁻¹` by banded Cholesky, with `σ` moved just below the lowest
    /// Ritz value once it has settled.
    #[default]
    ShiftInvert,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EigenRequest {
    pub k: usize,
    /// Relative residual `‖Av - λMv‖ / (|λ| ‖v‖_M + 1)` required for every returned pair.
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    pub preconditioner: Preconditioner,
}

impl Default for EigenRequest {
    fn default() -> Self {
        Self { k: 2, tol: 1e-10, max_iter: 1000, seed: 20_061_009, preconditioner: Preconditioner::ShiftInvert }
    }
}

impl EigenRequest {
    pub fn with_k(k: usize) -> Self {
        Self { k, ..Self::default() }
    }

    pub fn validate(&self, dim: usize) -> Result<(), EigenError> {
        if self.k < 2 || self.k > dim {
            return Err(EigenError::InvalidRequest("k must lie in 2..=dimension"));
        }
        if !(self.tol >= 1e-14 && self.tol.is_finite()) {
            return Err(EigenError::InvalidRequest("tol must be at least 1e-14"));
        }
        if self.max_iter == 0 {
            return Err(EigenError::InvalidRequest("max_iter must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// `M`-orthonormal; the first one is sign-normalized to a positive sum.
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl EigenResult {
    pub fn gap(&self) -> f64 {
        self.values[1] - self.values[0]
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EigenError {
    #[error("invalid eigen request: {0}")]
    InvalidRequest(&'static str),
    #[error("eigensolver did not converge in {} iterations (worst residual {:.3e})", .best.iterations, worst(&.best.residuals))]
    NotConverged { best: Box<EigenResult> },
    #[error("search space collapsed and restarts were exhausted")]
    BreakdownRestart,
    #[error("dimension {dim} exceeds the dense oracle cap {cap}")]
    TooLarge { dim: usize, cap: usize },
}

fn worst(r: &[f64]) -> f64 {
    r.iter().cloned().fold(0.0, f64::max)
}

pub(crate) fn m_dot(mass: Option<&[f64]>, x: &[f64], y: &[f64]) -> f64 {
    match mass {
        Some(m) => x.iter().zip(y).zip(m).map(|((a, b), w)| a * w * b).sum(),
        None => x.iter().zip(y).map(|(a, b)| a * b).sum(),
    }
}

/// `‖Av - λMv‖ / (|λ| ‖v‖_M + 1)`.
pub fn relative_residual(problem: &SparseSymmetricProblem, value: f64, vector: &[f64]) -> f64 {
    let mut r = problem.stiffness.mul_vec(vector);
    let mass = problem.mass();
    for (i, ri) in r.iter_mut().enumerate() {
        *ri -= value * mass.map_or(1.0, |m| m[i]) * vector[i];
    }
    norm2(&r) / (value.abs() * sqrt(m_dot(mass, vector, vector)) + 1.0)
}

/// Flips signs: the ground vector gets a positive sum, every other vector a
/// positive entry at its first largest-magnitude position.
pub(crate) fn normalize_signs(vectors: &mut [Vec<f64>]) {
    for (k, v) in vectors.iter_mut().enumerate() {
        let flip = if k == 0 {
            v.iter().sum::<f64>() < 0.0
        } else {
            let mut best = 0.0_f64;
            let mut sign = 1.0;
            for &x in v.iter() {
                if x.abs() > best {
                    best = x.abs();
                    sign = x;
                }
            }
            sign < 0.0
        };
        if flip {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

pub(crate) fn finalize(
    problem: &SparseSymmetricProblem,
    values: Vec<f64>,
    mut vectors: Vec<Vec<f64>>,
    iterations: usize,
    converged: bool,
) -> EigenResult {
    normalize_signs(&mut vectors);
    let residuals = values.iter().zip(&vectors).map(|(&l, v)| relative_residual(problem, l, v)).collect();
    EigenResult { values, vectors, residuals, iterations, converged }
}
