//! Banded Cholesky factorization of `A - σM` under a bandwidth-reducing
//! relabelling of the unknowns.

use alloc::vec;
use alloc::vec::Vec;

use crate::assembly::SparseSymmetricProblem;
use crate::math::sqrt;
use crate::waveguide::EndCondition;

/// Column order that turns the periodic ring of `s`-columns into a band:
/// `0, n-1, 1, n-2, 2, ...`, so ring neighbours are at most two slots apart.
fn interleaved_columns(n: usize) -> Vec<usize> {
    let mut order = Vec::with_capacity(n);
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        order.push(lo);
        lo += 1;
        if lo < hi {
            hi -= 1;
            order.push(hi);
        }
    }
    order
}

/// New-to-old relabelling for the grid layout of `problem`.
pub(crate) fn band_ordering(problem: &SparseSymmetricProblem) -> Vec<usize> {
    let g = &problem.grid;
    let rows = g.rows();
    if problem.dim() != g.unknowns() {
        return (0..problem.dim()).collect();
    }
    let columns: Vec<usize> = match problem.end_bc {
        EndCondition::Periodic => interleaved_columns(g.n_s),
        EndCondition::Neumann => (0..g.n_s).collect(),
    };
    columns.iter().flat_map(|&c| (0..rows).map(move |j| c * rows + j)).collect()
}

#[derive(Debug, Clone)]
pub(crate) struct BandCholesky {
    n: usize,
    bw: usize,
    /// new index → old index
    perm: Vec<usize>,
    /// row `i` holds `L[i, i-bw..=i]`
    l: Vec<f64>,
    shift: f64,
}

impl BandCholesky {
    /// Factors `A - σM`; `None` if it is not numerically positive definite.
    pub(crate) fn factor(problem: &SparseSymmetricProblem, shift: f64) -> Option<Self> {
        let n = problem.dim();
        let perm = band_ordering(problem);
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let a = &problem.stiffness;
        let bw = a.bandwidth_under(&inv);
        let width = bw + 1;
        let mut l = vec![0.0; n * width];
        let mass = problem.mass();
        for (new, &old) in perm.iter().enumerate() {
            for (j, v) in a.row(old) {
                let jn = inv[j];
                if jn <= new {
                    l[new * width + (jn + bw - new)] += v;
                }
            }
            l[new * width + bw] -= shift * mass.map_or(1.0, |m| m[old]);
        }
        for i in 0..n {
            let k0 = i.saturating_sub(bw);
            for j in k0..=i {
                let (ri, rj) = (i * width + (k0 + bw - i), j * width + (k0 + bw - j));
                let len = j - k0;
                let mut s = l[i * width + (j + bw - i)];
                let dot: f64 = l[ri..ri + len].iter().zip(&l[rj..rj + len]).map(|(x, y)| x * y).sum();
                s -= dot;
                if j < i {
                    l[i * width + (j + bw - i)] = s / l[j * width + bw];
                } else {
                    if !(s > 0.0 && s.is_finite()) {
                        return None;
                    }
                    l[i * width + bw] = sqrt(s);
                }
            }
        }
        Some(Self { n, bw, perm, l, shift })
    }

    pub(crate) fn shift(&self) -> f64 {
        self.shift
    }

    /// Solves `(A - σM) x = b` in place, with `scratch.len() == n`.
    pub(crate) fn solve_in_place(&self, b: &mut [f64], scratch: &mut [f64]) {
        let (n, bw, width) = (self.n, self.bw, self.bw + 1);
        for (new, &old) in self.perm.iter().enumerate() {
            scratch[new] = b[old];
        }
        for i in 0..n {
            let k0 = i.saturating_sub(bw);
            let row = &self.l[i * width + (k0 + bw - i)..i * width + bw];
            let dot: f64 = row.iter().zip(&scratch[k0..i]).map(|(x, y)| x * y).sum();
            scratch[i] = (scratch[i] - dot) / self.l[i * width + bw];
        }
        for i in (0..n).rev() {
            let xi = scratch[i] / self.l[i * width + bw];
            scratch[i] = xi;
            let k0 = i.saturating_sub(bw);
            let row = &self.l[i * width + (k0 + bw - i)..i * width + bw];
            for (y, lik) in scratch[k0..i].iter_mut().zip(row) {
                *y -= lik * xi;
            }
        }
        for (new, &old) in self.perm.iter().enumerate() {
            b[old] = scratch[new];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble_flat;
    use crate::waveguide::{Grid, SegmentSpec};

    #[test]
    fn interleaving_keeps_ring_neighbours_close() {
        let order = interleaved_columns(7);
        assert_eq!(order, vec![0, 6, 1, 5, 2, 4, 3]);
        let mut pos = [0; 7];
        for (p, &c) in order.iter().enumerate() {
            pos[c] = p;
        }
        for c in 0..7 {
            assert!(pos[c].abs_diff(pos[(c + 1) % 7]) <= 2);
        }
    }

    #[test]
    fn solve_inverts_the_shifted_matrix() {
        let grid = Grid::new(9, 6, 3.0, 0.4);
        let p = assemble_flat(&grid, &SegmentSpec::periodic(1)).unwrap();
        let f = BandCholesky::factor(&p, 10.0).unwrap();
        let x: Vec<f64> = (0..p.dim()).map(|i| (i as f64 * 0.37).sin()).collect();
        let mut b = p.stiffness.mul_vec(&x);
        for (bi, xi) in b.iter_mut().zip(&x) {
            *bi -= 10.0 * xi;
        }
        let mut scratch = vec![0.0; p.dim()];
        f.solve_in_place(&mut b, &mut scratch);
        let err = b.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "{err}");
    }

    #[test]
    fn indefinite_shift_is_refused() {
        let grid = Grid::new(8, 4, 2.0, 0.5);
        let p = assemble_flat(&grid, &SegmentSpec::periodic(1)).unwrap();
        // λ₁ ≈ (π/1)² ≈ 9.4
        assert!(BandCholesky::factor(&p, 9.0).is_some());
        assert!(BandCholesky::factor(&p, 12.0).is_none());
    }
}
