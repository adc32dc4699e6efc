//! Compressed-row sparse matrices.

use crate::error::{check_len, Error, Result};

/// General sparse matrix in compressed-row form with sorted, unique column
/// indices in every row.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CsrMatrix {
            nrows,
            ncols,
            row_ptr: vec![0; nrows + 1],
            col_idx: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        CsrMatrix {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    /// Builds a matrix from `(row, col, value)` triplets. Duplicates are summed
    /// in the order they appear, so the result does not depend on anything but
    /// the input sequence.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut order: Vec<usize> = (0..triplets.len()).collect();
        order.sort_by_key(|&k| (triplets[k].0, triplets[k].1));

        let mut row_ptr = vec![0; nrows + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for &k in &order {
            let (r, c, v) = triplets[k];
            assert!(r < nrows && c < ncols, "triplet ({r}, {c}) out of bounds");
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..nrows {
            row_ptr[i + 1] += row_ptr[i];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Column indices and values of row `i`.
    pub fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        (&self.col_idx[r.clone()], &self.values[r])
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.nrows).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&j, &v)| (i, j, v))
        })
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.mul_vec_add(1.0, x, &mut y);
        y
    }

    /// `y += alpha * A x`
    pub fn mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
            *yi += alpha * s;
        }
    }

    /// `y += alpha * A^T x`
    pub fn transpose_mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            let (cols, vals) = self.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                y[j] += alpha * v * xi;
            }
        }
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= alpha);
        out
    }

    /// `sum_k c_k A_k` over matrices of equal shape; the pattern is the union.
    pub fn linear_combination(terms: &[(f64, &CsrMatrix)]) -> Result<CsrMatrix> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::InvalidArgument("empty linear combination".into()));
        };
        let (nrows, ncols) = (first.nrows, first.ncols);
        let mut triplets = Vec::new();
        for (c, m) in terms {
            check_len("linear combination rows", nrows, m.nrows)?;
            check_len("linear combination cols", ncols, m.ncols)?;
            triplets.extend(m.triplets().map(|(i, j, v)| (i, j, c * v)));
        }
        Ok(CsrMatrix::from_triplets(nrows, ncols, &triplets))
    }

    /// Extracts the block `rows x cols` (half-open ranges).
    pub fn block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> CsrMatrix {
        let mut triplets = Vec::new();
        for i in rows.clone() {
            let (cs, vs) = self.row(i);
            for (&j, &v) in cs.iter().zip(vs) {
                if cols.contains(&j) {
                    triplets.push((i - rows.start, j - cols.start, v));
                }
            }
        }
        CsrMatrix::from_triplets(rows.len(), cols.len(), &triplets)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

/// Square sparse matrix whose values are symmetric to `1e-14` relative.
///
/// Houses the bilinear forms of the kinetic energy, the stored energy and the
/// quadratic part of the viscous dissipation.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSymmetric(CsrMatrix);

impl SparseSymmetric {
    pub const SYMMETRY_TOL: f64 = 1e-14;

    pub fn new(m: CsrMatrix) -> Result<Self> {
        check_len("symmetric matrix columns", m.nrows, m.ncols)?;
        let scale = m.max_abs();
        for (i, j, v) in m.triplets() {
            if j > i {
                let w = m.get(j, i);
                if (v - w).abs() > Self::SYMMETRY_TOL * scale {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not symmetric at ({i}, {j}): {v} vs {w}"
                    )));
                }
            } else if j < i && m.get(j, i) == 0.0 && v != 0.0 {
                // structurally unsymmetric entry with no transpose partner
                if v.abs() > Self::SYMMETRY_TOL * scale {
                    return Err(Error::InvalidArgument(format!(
                        "matrix not structurally symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(SparseSymmetric(m))
    }

    /// Builds from triplets, adding each off-diagonal entry to both halves.
    pub fn from_upper_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut full = Vec::with_capacity(2 * triplets.len());
        for &(i, j, v) in triplets {
            full.push((i, j, v));
            if i != j {
                full.push((j, i, v));
            }
        }
        SparseSymmetric(CsrMatrix::from_triplets(n, n, &full))
    }

    /// Builds from triplets that already contain both halves.
    pub fn from_full_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Result<Self> {
        Self::new(CsrMatrix::from_triplets(n, n, triplets))
    }

    pub fn identity(n: usize) -> Self {
        SparseSymmetric(CsrMatrix::identity(n))
    }

    pub fn zeros(n: usize) -> Self {
        SparseSymmetric(CsrMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.0.mul_vec(x)
    }

    pub fn mul_vec_add(&self, alpha: f64, x: &[f64], y: &mut [f64]) {
        self.0.mul_vec_add(alpha, x, y)
    }

    /// `x^T A x`
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let (cols, vals) = self.0.row(i);
                let s: f64 = cols.iter().zip(vals).map(|(&j, &v)| v * x[j]).sum();
                x[i] * s
            })
            .sum()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.get(i, i)).collect()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        SparseSymmetric(self.0.scaled(alpha))
    }

    pub fn linear_combination(terms: &[(f64, &SparseSymmetric)]) -> Result<Self> {
        let raw: Vec<(f64, &CsrMatrix)> = terms.iter().map(|(c, m)| (*c, &m.0)).collect();
        Ok(SparseSymmetric(CsrMatrix::linear_combination(&raw)?))
    }

    /// Embeds `self` as the leading block of a larger zero matrix.
    pub fn padded(&self, n: usize) -> Self {
        assert!(n >= self.dim());
        let t: Vec<_> = self.0.triplets().collect();
        SparseSymmetric(CsrMatrix::from_triplets(n, n, &t))
    }

    /// Replaces the rows and columns of `fixed` dofs by those of the identity.
    pub fn with_fixed_dofs(&self, fixed: &[bool]) -> Self {
        assert_eq!(fixed.len(), self.dim());
        let t: Vec<_> = self
            .0
            .triplets()
            .filter(|&(i, j, _)| !fixed[i] && !fixed[j])
            .chain((0..self.dim()).filter(|&i| fixed[i]).map(|i| (i, i, 1.0)))
            .collect();
        SparseSymmetric(CsrMatrix::from_triplets(self.dim(), self.dim(), &t))
    }

    /// Splits a matrix over stacked `(u, z)` into the `uu`, `uz` and `zz` blocks.
    pub fn split(&self, n_u: usize) -> (SparseSymmetric, CsrMatrix, SparseSymmetric) {
        let n = self.dim();
        (
            SparseSymmetric(self.0.block(0..n_u, 0..n_u)),
            self.0.block(0..n_u, n_u..n),
            SparseSymmetric(self.0.block(n_u..n, n_u..n)),
        )
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (1, 0, 2.0), (0, 0, 3.0)]);
        assert_eq!(m.get(0, 0), 4.0);
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn unsymmetric_rejected() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0), (1, 0, 2.0)]);
        assert!(SparseSymmetric::new(m).is_err());
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 1, 1.0)]);
        assert!(SparseSymmetric::new(m).is_err());
    }

    #[test]
    fn split_blocks_reassemble() {
        let a = SparseSymmetric::from_upper_triplets(
            3,
            &[(0, 0, 4.0), (0, 2, -1.0), (1, 1, 3.0), (1, 2, 0.5), (2, 2, 2.0)],
        );
        let (uu, uz, zz) = a.split(2);
        assert_eq!(uu.dim(), 2);
        assert_eq!(uz.nrows(), 2);
        assert_eq!(uz.ncols(), 1);
        assert_eq!(uz.get(0, 0), -1.0);
        assert_eq!(uz.get(1, 0), 0.5);
        assert_eq!(zz.get(0, 0), 2.0);
        let x = [1.0, -2.0, 0.5];
        let full = a.quad_form(&x);
        let mut uzz = vec![0.0; 2];
        uz.mul_vec_add(1.0, &x[2..], &mut uzz);
        let parts = uu.quad_form(&x[..2]) + 2.0 * dot(&x[..2], &uzz) + zz.quad_form(&x[2..]);
        assert!((full - parts).abs() < 1e-14);
    }

    #[test]
    fn fixed_dofs_become_identity() {
        let a = SparseSymmetric::from_upper_triplets(2, &[(0, 0, 4.0), (0, 1, 1.0), (1, 1, 3.0)]);
        let b = a.with_fixed_dofs(&[false, true]);
        assert_eq!(b.get(0, 0), 4.0);
        assert_eq!(b.get(0, 1), 0.0);
        assert_eq!(b.get(1, 1), 1.0);
    }

    #[test]
    fn transpose_product_matches() {
        let m = CsrMatrix::from_triplets(2, 3, &[(0, 0, 1.0), (0, 2, 2.0), (1, 1, -1.0)]);
        let mut y = vec![0.0; 3];
        m.transpose_mul_vec_add(1.0, &[1.0, 2.0], &mut y);
        assert_eq!(y, vec![1.0, -2.0, 2.0]);
    }
}
