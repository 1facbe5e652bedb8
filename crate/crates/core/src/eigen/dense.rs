//! Full dense decomposition, used as a test oracle and for tiny systems.

use alloc::vec::Vec;

use nalgebra::SymmetricEigen;

use super::{finalize, EigenError, EigenResult};
use crate::assembly::SparseSymmetricProblem;
use crate::math::sqrt;

/// Largest dimension accepted by [`dense_oracle`].
pub const DENSE_ORACLE_CAP: usize = 2000;

/// Ascending eigenpairs of `M^{-1/2} A M^{-1/2}`, mapped back to `M`-orthonormal vectors.
pub(crate) fn dense_pairs(problem: &SparseSymmetricProblem) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = problem.dim();
    let mut a = problem.stiffness.to_dense();
    let scale: Vec<f64> = match problem.mass() {
        Some(m) => m.iter().map(|&v| 1.0 / sqrt(v)).collect(),
        None => alloc::vec![1.0; n],
    };
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] *= scale[i] * scale[j];
        }
    }
    let sym = (&a + a.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| eig.eigenvectors[(i, k)] * scale[i]).collect())
        .collect();
    (values, vectors)
}

/// All eigenpairs of a problem of dimension at most [`DENSE_ORACLE_CAP`].
pub fn dense_oracle(problem: &SparseSymmetricProblem) -> Result<EigenResult, EigenError> {
    let n = problem.dim();
    if n > DENSE_ORACLE_CAP {
        return Err(EigenError::TooLarge { dim: n, cap: DENSE_ORACLE_CAP });
    }
    let (values, vectors) = dense_pairs(problem);
    Ok(finalize(problem, values, vectors, 0, true))
}
