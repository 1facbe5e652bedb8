//! Block locally optimal preconditioned conjugate gradient (LOBPCG) for the
//! lowest eigenpairs of `A x = λ M x` with diagonal `M`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::band::BandCholesky;
use super::dense::dense_pairs;
use super::{finalize, m_dot, EigenError, EigenRequest, EigenResult, Preconditioner};
use crate::assembly::SparseSymmetricProblem;
use crate::math::sqrt;

const GUARD_COLUMNS: usize = 2;
const DROP_TOLERANCE: f64 = 1e-10;
const MAX_RESTARTS: usize = 3;

enum Precond {
    Diagonal(Vec<f64>),
    Shift { factor: BandCholesky, refined: bool, scratch: Vec<f64> },
}

impl Precond {
    fn new(problem: &SparseSymmetricProblem, kind: Preconditioner) -> Self {
        match kind {
            Preconditioner::Diagonal => {
                let d = problem.stiffness.diagonal();
                Precond::Diagonal(d.iter().map(|&v| if v.abs() > 0.0 { 1.0 / v.abs() } else { 1.0 }).collect())
            }
            Preconditioner::ShiftInvert => {
                let factor = BandCholesky::factor(problem, 0.0).or_else(|| {
                    let low = problem.stiffness.gershgorin_lower(problem.mass()) - 1.0;
                    BandCholesky::factor(problem, low)
                });
                match factor {
                    Some(factor) => Precond::Shift { factor, refined: false, scratch: vec![0.0; problem.dim()] },
                    None => Self::new(problem, Preconditioner::Diagonal),
                }
            }
        }
    }

    fn apply(&mut self, r: &mut [f64]) {
        match self {
            Precond::Diagonal(d) => r.iter_mut().zip(d.iter()).for_each(|(x, w)| *x *= w),
            Precond::Shift { factor, scratch, .. } => factor.solve_in_place(r, scratch),
        }
    }

    /// Moves the shift just below the lowest Ritz value once it is well separated.
    fn refine(&mut self, problem: &SparseSymmetricProblem, theta: &[f64], abs_res0: f64) {
        if let Precond::Shift { factor, refined, .. } = self {
            if *refined || theta.len() < 2 {
                return;
            }
            let gap = theta[1] - theta[0];
            if gap > 0.0 && abs_res0 < 0.1 * gap {
                *refined = true;
                let sigma = theta[0] - 0.1 * gap;
                if sigma > factor.shift() {
                    if let Some(f) = BandCholesky::factor(problem, sigma) {
                        *factor = f;
                    }
                }
            }
        }
    }
}

fn random_block(n: usize, b: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..b)
        .map(|_| (0..n).map(|_| (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5).collect())
        .collect()
}

/// Appends the `M`-orthonormalized part of each candidate to `basis`; returns how many were kept.
fn extend_orthonormal(mass: Option<&[f64]>, basis: &mut Vec<Vec<f64>>, candidates: Vec<Vec<f64>>) -> usize {
    let mut kept = 0;
    for mut v in candidates {
        let original = sqrt(m_dot(mass, &v, &v));
        if !(original > 0.0 && original.is_finite()) {
            continue;
        }
        let mut norm = original;
        for _ in 0..3 {
            for q in basis.iter() {
                let c = m_dot(mass, q, &v);
                v.iter_mut().zip(q).for_each(|(x, qi)| *x -= c * qi);
            }
            let after = sqrt(m_dot(mass, &v, &v));
            let settled = after > 0.5 * norm;
            norm = after;
            if settled {
                break;
            }
        }
        if norm > DROP_TOLERANCE * original {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
            kept += 1;
        }
    }
    kept
}

fn combine(columns: &[Vec<f64>], coeffs: &DMatrix<f64>, rows: core::ops::Range<usize>, col: usize) -> Vec<f64> {
    let n = columns[0].len();
    let mut out = vec![0.0; n];
    for r in rows {
        let c = coeffs[(r, col)];
        if c != 0.0 {
            out.iter_mut().zip(&columns[r]).for_each(|(o, x)| *o += c * x);
        }
    }
    out
}

/// The `request.k` lowest eigenpairs, ascending.
///
/// Deterministic for a fixed `request.seed`. Tiny systems are solved densely.
pub fn smallest_eigenpairs(
    problem: &SparseSymmetricProblem,
    request: &EigenRequest,
) -> Result<EigenResult, EigenError> {
    let n = problem.dim();
    request.validate(n)?;
    let k = request.k;
    let b = (k + GUARD_COLUMNS).min(n);
    if n <= 4 * b {
        let (mut values, mut vectors) = dense_pairs(problem);
        values.truncate(k);
        vectors.truncate(k);
        return Ok(finalize(problem, values, vectors, 0, true));
    }
    let mass = problem.mass();
    let a = &problem.stiffness;
    let mut precond = Precond::new(problem, request.preconditioner);

    let mut x = Vec::with_capacity(b);
    if extend_orthonormal(mass, &mut x, random_block(n, b, request.seed)) < b {
        return Err(EigenError::BreakdownRestart);
    }
    let mut p: Vec<Vec<f64>> = Vec::new();
    let mut theta = vec![0.0; b];
    let mut restarts = 0;
    let mut residuals = vec![f64::INFINITY; b];
    let mut first = true;

    for iter in 0..=request.max_iter {
        let ax: Vec<Vec<f64>> = x.iter().map(|v| a.mul_vec(v)).collect();
        if first {
            // Rayleigh-Ritz within the starting block.
            let (vals, vecs) = ritz(&x, &ax);
            let xs = (0..b).map(|j| combine(&x, &vecs, 0..b, j)).collect();
            x = xs;
            theta = vals;
            first = false;
            continue;
        }
        let mut r: Vec<Vec<f64>> = Vec::with_capacity(b);
        for j in 0..b {
            let mut rj = ax[j].clone();
            for (i, ri) in rj.iter_mut().enumerate() {
                *ri -= theta[j] * mass.map_or(1.0, |m| m[i]) * x[j][i];
            }
            let xnorm = sqrt(m_dot(mass, &x[j], &x[j]));
            residuals[j] = crate::math::norm2(&rj) / (theta[j].abs() * xnorm + 1.0);
            r.push(rj);
        }
        if residuals[..k].iter().all(|&res| res < request.tol) {
            return Ok(finish(problem, &theta, x, k, iter, true));
        }
        if iter == request.max_iter {
            let best = finish(problem, &theta, x, k, iter, false);
            return Err(EigenError::NotConverged { best: Box::new(best) });
        }
        precond.refine(problem, &theta, residuals[0] * (theta[0].abs() + 1.0));

        let active: Vec<usize> = (0..b).filter(|&j| j >= k || residuals[j] >= request.tol).collect();
        let w: Vec<Vec<f64>> = active
            .iter()
            .map(|&j| {
                let mut wj = core::mem::take(&mut r[j]);
                precond.apply(&mut wj);
                wj
            })
            .collect();

        let mut basis = x.clone();
        let kept_w = extend_orthonormal(mass, &mut basis, w);
        extend_orthonormal(mass, &mut basis, core::mem::take(&mut p));
        if kept_w == 0 {
            restarts += 1;
            if restarts > MAX_RESTARTS {
                return Err(EigenError::BreakdownRestart);
            }
            let fresh = random_block(n, active.len().max(1), request.seed.wrapping_add(restarts as u64));
            basis.truncate(b);
            if extend_orthonormal(mass, &mut basis, fresh) == 0 {
                return Err(EigenError::BreakdownRestart);
            }
        }
        let mut abasis = ax;
        abasis.extend(basis[b..].iter().map(|v| a.mul_vec(v)));
        let (vals, vecs) = ritz(&basis, &abasis);
        let m = basis.len();
        theta = vals[..b].to_vec();
        x = (0..b).map(|j| combine(&basis, &vecs, 0..m, j)).collect();
        p = active.iter().map(|&j| combine(&basis, &vecs, b..m, j)).collect();
    }
    unreachable!("loop returns on its last iteration")
}

fn finish(
    problem: &SparseSymmetricProblem,
    theta: &[f64],
    mut x: Vec<Vec<f64>>,
    k: usize,
    iterations: usize,
    converged: bool,
) -> EigenResult {
    x.truncate(k);
    finalize(problem, theta[..k].to_vec(), x, iterations, converged)
}

/// Ritz values (ascending) and coefficient vectors for an `M`-orthonormal basis.
fn ritz(basis: &[Vec<f64>], abasis: &[Vec<f64>]) -> (Vec<f64>, DMatrix<f64>) {
    let m = basis.len();
    let mut g = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v: f64 = basis[i].iter().zip(&abasis[j]).map(|(x, y)| x * y).sum();
            let w: f64 = basis[j].iter().zip(&abasis[i]).map(|(x, y)| x * y).sum();
            g[(i, j)] = 0.5 * (v + w);
            g[(j, i)] = g[(i, j)];
        }
    }
    let eig = SymmetricEigen::new(g);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vecs)
}
