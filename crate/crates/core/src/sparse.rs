//! Compressed-row sparse matrices.

use alloc::vec;
use alloc::vec::Vec;

/// Square matrix in compressed-row layout with sorted, duplicate-free columns.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from `(row, col, value)` triplets. Duplicates are summed in
    /// insertion order, so symmetric pairs pushed in the same order stay
    /// bitwise symmetric.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0; n + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            assert!(r < n && c < n, "triplet ({r}, {c}) outside a {n}x{n} matrix");
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self { n, row_ptr, cols, vals }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(column, value)` pairs of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[r.clone()].iter().copied().zip(self.vals[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[r.clone()].binary_search(&j) {
            Ok(k) => self.vals[r.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    /// All stored entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `max |a_ij - a_ji|` over stored entries.
    pub fn max_asymmetry(&self) -> f64 {
        self.triplets().map(|(i, j, v)| (v - self.get(j, i)).abs()).fold(0.0, f64::max)
    }

    /// Lower bound on the spectrum of `M⁻¹A` for a positive diagonal `M`
    /// (Gershgorin discs).
    pub fn gershgorin_lower(&self, mass: Option<&[f64]>) -> f64 {
        (0..self.n)
            .map(|i| {
                let (d, off) = self.row(i).fold((0.0, 0.0), |(d, off), (j, v)| {
                    if j == i {
                        (d + v, off)
                    } else {
                        (d, off + v.abs())
                    }
                });
                (d - off) / mass.map_or(1.0, |m| m[i])
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest `|i - j|` over stored entries after relabelling `old → new` by `inv`.
    pub fn bandwidth_under(&self, inv: &[usize]) -> usize {
        self.triplets().map(|(i, j, _)| inv[i].abs_diff(inv[j])).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        let mut d = nalgebra::DMatrix::zeros(self.n, self.n);
        for (i, j, v) in self.triplets() {
            d[(i, j)] += v;
        }
        d
    }
}

/// Accumulates a symmetric matrix as a sum of edge Laplacians and diagonal terms.
#[derive(Debug, Default)]
pub(crate) struct SymmetricBuilder {
    n: usize,
    triplets: Vec<(usize, usize, f64)>,
}

impl SymmetricBuilder {
    pub(crate) fn new(n: usize) -> Self {
        Self { n, triplets: Vec::with_capacity(5 * n) }
    }

    /// Adds `w (e_a - e_b)(e_a - e_b)ᵀ`; both off-diagonal entries get the same value.
    pub(crate) fn edge(&mut self, a: usize, b: usize, w: f64) {
        self.triplets.push((a, a, w));
        self.triplets.push((b, b, w));
        self.triplets.push((a, b, -w));
        self.triplets.push((b, a, -w));
    }

    pub(crate) fn diag(&mut self, a: usize, v: f64) {
        self.triplets.push((a, a, v));
    }

    pub(crate) fn finish(self) -> CsrMatrix {
        CsrMatrix::from_triplets(self.n, self.triplets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, vec![(0, 1, 1.0), (0, 0, 2.0), (0, 1, 0.5), (1, 1, 3.0)]);
        assert_eq!(m.get(0, 1), 1.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.nnz(), 3);
        assert_eq!(m.mul_vec(&[1.0, 2.0]), vec![5.0, 6.0]);
    }

    #[test]
    fn builder_is_exactly_symmetric() {
        let mut b = SymmetricBuilder::new(3);
        b.edge(0, 1, 0.1);
        b.edge(1, 2, 0.7);
        b.edge(0, 1, 0.2);
        b.diag(2, 1.0);
        let m = b.finish();
        assert_eq!(m.max_asymmetry(), 0.0);
        assert_eq!(m.get(0, 1), -(0.1 + 0.2));
        assert!(m.gershgorin_lower(None) >= -1e-15);
    }
}
