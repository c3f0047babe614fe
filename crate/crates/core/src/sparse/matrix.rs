//! Compressed sparse row matrices with a fixed pattern.

use std::io::Write;

/// CSR matrix with sorted, duplicate-free column indices in every row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a zero matrix from per-row column lists, which get sorted and
    /// deduplicated.
    pub fn from_pattern(ncols: usize, rows: Vec<Vec<u32>>) -> Self {
        let nrows = rows.len();
        let mut row_ptr = Vec::with_capacity(nrows + 1);
        row_ptr.push(0);
        let mut col_idx = Vec::new();
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            debug_assert!(r.last().is_none_or(|&c| (c as usize) < ncols));
            col_idx.extend_from_slice(&r);
            row_ptr.push(col_idx.len());
        }
        let values = vec![0.0; col_idx.len()];
        Self {
            nrows,
            ncols,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Sums duplicate entries.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut rows = vec![Vec::new(); nrows];
        for &(r, c, _) in triplets {
            rows[r].push(c as u32);
        }
        let mut m = Self::from_pattern(ncols, rows);
        for &(r, c, v) in triplets {
            m.add_at(r, c, v);
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, &(0..n).map(|i| (i, i, 1.0)).collect::<Vec<_>>())
    }

    /// Same pattern, all values zero.
    pub fn zeros_like(&self) -> Self {
        Self {
            values: vec![0.0; self.values.len()],
            ..self.clone()
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

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn row(&self, r: usize) -> (&[u32], &[f64]) {
        let range = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[range.clone()], &self.values[range])
    }

    pub fn position(&self, r: usize, c: usize) -> Option<usize> {
        let start = self.row_ptr[r];
        let cols = &self.col_idx[start..self.row_ptr[r + 1]];
        cols.binary_search(&(c as u32)).ok().map(|p| start + p)
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.position(r, c).map_or(0.0, |p| self.values[p])
    }

    /// Adds `v` to entry `(r, c)`, which must be part of the pattern.
    pub fn add_at(&mut self, r: usize, c: usize, v: f64) {
        let p = self
            .position(r, c)
            .unwrap_or_else(|| panic!("entry ({r}, {c}) is not in the sparsity pattern"));
        self.values[p] += v;
    }

    /// Adds a dense row-major block `scale * local` at `rows x cols`.
    pub fn add_block(&mut self, rows: &[usize], cols: &[usize], local: &[f64], scale: f64) {
        debug_assert_eq!(local.len(), rows.len() * cols.len());
        for (i, &r) in rows.iter().enumerate() {
            let start = self.row_ptr[r];
            let end = self.row_ptr[r + 1];
            let pattern = &self.col_idx[start..end];
            for (j, &c) in cols.iter().enumerate() {
                let v = local[i * cols.len() + j];
                if v == 0.0 {
                    continue;
                }
                let p = pattern
                    .binary_search(&(c as u32))
                    .unwrap_or_else(|_| panic!("entry ({r}, {c}) is not in the sparsity pattern"));
                self.values[start + p] += scale * v;
            }
        }
    }

    /// `self += scale * other`; both must share one pattern.
    pub fn add_scaled(&mut self, other: &SparseMatrix, scale: f64) {
        assert!(
            self.row_ptr == other.row_ptr && self.col_idx == other.col_idx,
            "patterns differ"
        );
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.values.iter_mut().for_each(|v| *v *= s);
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.ncols);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[p] * x[self.col_idx[p] as usize];
            }
            *yr = s;
        }
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let ay = self.matvec(y);
        x.iter().zip(&ay).map(|(a, b)| a * b).sum()
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut counts = vec![0usize; self.ncols + 1];
        for &c in &self.col_idx {
            counts[c as usize + 1] += 1;
        }
        for i in 0..self.ncols {
            counts[i + 1] += counts[i];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0u32; self.nnz()];
        let mut values = vec![0.0; self.nnz()];
        for r in 0..self.nrows {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[p] as usize;
                col_idx[next[c]] = r as u32;
                values[next[c]] = self.values[p];
                next[c] += 1;
            }
        }
        SparseMatrix {
            nrows: self.ncols,
            ncols: self.nrows,
            row_ptr,
            col_idx,
            values,
        }
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry magnitude.
    pub fn symmetry_defect(&self) -> f64 {
        let t = self.transpose();
        let scale = self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for r in 0..self.nrows {
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[p] as usize;
                worst = worst.max((self.values[p] - t.get(r, c)).abs());
            }
        }
        worst / scale
    }

    /// Principal submatrix on the given sorted index set.
    pub fn submatrix(&self, keep: &[usize]) -> SparseMatrix {
        let mut map = vec![u32::MAX; self.ncols];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new as u32;
        }
        let mut trip = Vec::new();
        for (new_r, &r) in keep.iter().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if map[c as usize] != u32::MAX {
                    trip.push((new_r, map[c as usize] as usize, v));
                }
            }
        }
        SparseMatrix::from_triplets(keep.len(), keep.len(), &trip)
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for (r, row) in d.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c as usize] += v;
            }
        }
        d
    }

    /// Writes nonzero entries as `row col value` lines with 0-based indices.
    pub fn write_triplets(&self, out: &mut impl Write) -> std::io::Result<()> {
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                if v != 0.0 {
                    writeln!(out, "{r} {c} {v:.17e}")?;
                }
            }
        }
        Ok(())
    }
}

pub fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn norm_inf(x: &[f64]) -> f64 {
    x.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}
