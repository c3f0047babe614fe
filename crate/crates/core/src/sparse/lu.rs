//! Left-looking sparse LU with threshold partial pivoting, applied to the
//! matrix symmetrically permuted by an approximate minimum degree ordering
//! of `A + A^T`.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::sparse::linalg::amd;
use faer::sparse::SymbolicSparseColMatRef;

use crate::error::{Error, Result};

use super::matrix::SparseMatrix;

/// Tuning of [`SparseLu`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuOptions {
    /// A diagonal candidate is kept as pivot when its magnitude is at least
    /// this fraction of the largest candidate in the column.
    pub pivot_threshold: f64,
}

impl Default for LuOptions {
    fn default() -> Self {
        Self { pivot_threshold: 0.1 }
    }
}

/// `P_r (Q A Q^T) = L U` with unit lower `L`, both stored by columns in
/// pivot order.
#[derive(Debug, Clone)]
pub struct SparseLu {
    n: usize,
    /// `perm[k]` is the original index placed at position `k`.
    perm: Vec<usize>,
    /// Row pivoting: `row_pivot[i]` is the pivot step of permuted row `i`.
    row_pivot: Vec<u32>,
    l_ptr: Vec<usize>,
    l_idx: Vec<u32>,
    l_val: Vec<f64>,
    u_ptr: Vec<usize>,
    u_idx: Vec<u32>,
    u_val: Vec<f64>,
}

fn amd_order(a: &SparseMatrix) -> Result<Vec<usize>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    // The CSR arrays of A are the CSC arrays of A^T, which has the same
    // symmetrized pattern.
    let col_ptr: Vec<u32> = a.row_ptr().iter().map(|&p| p as u32).collect();
    let sym = SymbolicSparseColMatRef::new_checked(n, n, &col_ptr, None, a.col_idx());
    let mut perm = vec![0u32; n];
    let mut perm_inv = vec![0u32; n];
    let req = amd::order_scratch::<u32>(n, a.nnz());
    let mut mem = MemBuffer::try_new(req).map_err(|e| Error::Backend(format!("{e:?}")))?;
    amd::order(
        &mut perm,
        &mut perm_inv,
        sym,
        amd::Control::default(),
        MemStack::new(&mut mem),
    )
    .map_err(|e| Error::Backend(format!("{e:?}")))?;
    Ok(perm.into_iter().map(|p| p as usize).collect())
}

impl SparseLu {
    pub fn factor(a: &SparseMatrix, opts: LuOptions) -> Result<Self> {
        assert_eq!(a.nrows(), a.ncols(), "LU needs a square matrix");
        assert!(a.nnz() < u32::MAX as usize, "index type overflow");
        let n = a.nrows();
        let perm = amd_order(a)?;
        let mut inv = vec![0u32; n];
        for (k, &p) in perm.iter().enumerate() {
            inv[p] = k as u32;
        }
        // Columns of C = Q A Q^T: column k holds column perm[k] of A, which is
        // row perm[k] of A^T.
        let at = a.transpose();
        let mut c_ptr = Vec::with_capacity(n + 1);
        c_ptr.push(0usize);
        let mut c_idx = Vec::with_capacity(a.nnz());
        let mut c_val = Vec::with_capacity(a.nnz());
        for &p in &perm {
            let (cols, vals) = at.row(p);
            c_idx.extend(cols.iter().map(|&r| inv[r as usize]));
            c_val.extend_from_slice(vals);
            c_ptr.push(c_idx.len());
        }
        drop(at);

        const NONE: u32 = u32::MAX;
        let mut row_pivot = vec![NONE; n];
        let mut x = vec![0.0f64; n];
        let mut stack: Vec<(u32, usize)> = Vec::new();
        let mut reach: Vec<u32> = Vec::with_capacity(n);
        let mut mark = vec![usize::MAX; n];
        let guess = 2 * a.nnz();
        let mut l_ptr = Vec::with_capacity(n + 1);
        let mut l_idx: Vec<u32> = Vec::with_capacity(guess);
        let mut l_val: Vec<f64> = Vec::with_capacity(guess);
        let mut u_ptr = Vec::with_capacity(n + 1);
        let mut u_idx: Vec<u32> = Vec::with_capacity(guess);
        let mut u_val: Vec<f64> = Vec::with_capacity(guess);
        l_ptr.push(0);
        u_ptr.push(0);

        for k in 0..n {
            // Nonzero pattern of L \ C(:, k) in topological order.
            reach.clear();
            for p in c_ptr[k]..c_ptr[k + 1] {
                let i = c_idx[p] as usize;
                if mark[i] == k {
                    continue;
                }
                mark[i] = k;
                stack.push((i as u32, 0));
                while let Some(&(j, mut next)) = stack.last() {
                    let col = row_pivot[j as usize];
                    let mut child = None;
                    if col != NONE {
                        let col = col as usize;
                        let start = l_ptr[col] + 1;
                        let end = l_ptr[col + 1];
                        while start + next < end {
                            let c = l_idx[start + next] as usize;
                            next += 1;
                            if mark[c] != k {
                                child = Some(c);
                                break;
                            }
                        }
                    }
                    let top = stack.len() - 1;
                    stack[top].1 = next;
                    match child {
                        Some(c) => {
                            mark[c] = k;
                            stack.push((c as u32, 0));
                        }
                        None => {
                            reach.push(j);
                            stack.pop();
                        }
                    }
                }
            }
            for p in c_ptr[k]..c_ptr[k + 1] {
                x[c_idx[p] as usize] = c_val[p];
            }
            for &j in reach.iter().rev() {
                let col = row_pivot[j as usize];
                if col == NONE {
                    continue;
                }
                let xj = x[j as usize];
                if xj == 0.0 {
                    continue;
                }
                let col = col as usize;
                for p in l_ptr[col] + 1..l_ptr[col + 1] {
                    x[l_idx[p] as usize] -= l_val[p] * xj;
                }
            }
            let mut best = -1.0f64;
            let mut ipiv = NONE;
            for &i in &reach {
                if row_pivot[i as usize] == NONE {
                    let v = x[i as usize].abs();
                    if v > best {
                        best = v;
                        ipiv = i;
                    }
                } else {
                    u_idx.push(row_pivot[i as usize]);
                    u_val.push(x[i as usize]);
                }
            }
            if ipiv == NONE || best <= 0.0 || !best.is_finite() {
                return Err(Error::SingularMatrix(k));
            }
            if row_pivot[k] == NONE && mark[k] == k && x[k].abs() >= opts.pivot_threshold * best {
                ipiv = k as u32;
            }
            let pivot = x[ipiv as usize];
            u_idx.push(k as u32);
            u_val.push(pivot);
            u_ptr.push(u_idx.len());
            row_pivot[ipiv as usize] = k as u32;
            l_idx.push(ipiv);
            l_val.push(1.0);
            for &i in &reach {
                let i = i as usize;
                if row_pivot[i] == NONE {
                    l_idx.push(i as u32);
                    l_val.push(x[i] / pivot);
                }
                x[i] = 0.0;
            }
            l_ptr.push(l_idx.len());
        }
        for r in l_idx.iter_mut() {
            *r = row_pivot[*r as usize];
        }
        l_idx.shrink_to_fit();
        l_val.shrink_to_fit();
        u_idx.shrink_to_fit();
        u_val.shrink_to_fit();
        Ok(Self {
            n,
            perm,
            row_pivot,
            l_ptr,
            l_idx,
            l_val,
            u_ptr,
            u_idx,
            u_val,
        })
    }

    /// Number of stored entries in `L` and `U`.
    pub fn fill(&self) -> usize {
        self.l_val.len() + self.u_val.len()
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        assert_eq!(b.len(), n);
        let mut z = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            z[self.row_pivot[k] as usize] = b[p];
        }
        for j in 0..n {
            let zj = z[j];
            if zj != 0.0 {
                for p in self.l_ptr[j] + 1..self.l_ptr[j + 1] {
                    z[self.l_idx[p] as usize] -= self.l_val[p] * zj;
                }
            }
        }
        for j in (0..n).rev() {
            let last = self.u_ptr[j + 1] - 1;
            let zj = z[j] / self.u_val[last];
            z[j] = zj;
            if zj != 0.0 {
                for p in self.u_ptr[j]..last {
                    z[self.u_idx[p] as usize] -= self.u_val[p] * zj;
                }
            }
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = z[k];
        }
        x
    }
}
