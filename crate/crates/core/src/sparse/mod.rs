//! Sparse matrices and direct solvers.

mod lu;
mod matrix;

pub use lu::{LuOptions, SparseLu};
pub use matrix::{dot, norm2, norm_inf, SparseMatrix};

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::ldlt::factor::LdltRegularization;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::cholesky::{
    factorize_symbolic_cholesky, CholeskySymbolicParams, LdltRef, SymbolicCholesky, SymmetricOrdering,
};
use faer::sparse::{SparseColMat, SymbolicSparseColMat, Triplet};
use faer::{Conj, Par, Side};

use crate::error::{Error, Result};

/// A factorized matrix that can solve repeatedly.
pub trait Factorization: Send + Sync {
    fn solve(&self, b: &[f64]) -> Vec<f64>;

    /// Stored factor entries, when the backend reports them.
    fn fill(&self) -> Option<usize> {
        None
    }
}

/// A direct solver backend.
pub trait LinearSolver: Send + Sync {
    fn name(&self) -> &'static str;
    fn factor(&self, a: &SparseMatrix) -> Result<Box<dyn Factorization>>;

    /// Symmetric backends get the condensed symmetric system.
    fn requires_symmetric(&self) -> bool {
        false
    }
}

/// Own left-looking LU on an AMD ordering.
#[derive(Debug, Clone, Copy, Default)]
pub struct AmdLuSolver {
    pub options: LuOptions,
}

impl Factorization for SparseLu {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        SparseLu::solve(self, b)
    }

    fn fill(&self) -> Option<usize> {
        Some(SparseLu::fill(self))
    }
}

impl LinearSolver for AmdLuSolver {
    fn name(&self) -> &'static str {
        "amd-lu"
    }

    fn factor(&self, a: &SparseMatrix) -> Result<Box<dyn Factorization>> {
        Ok(Box::new(SparseLu::factor(a, self.options)?))
    }
}

/// faer's supernodal/simplicial sparse LU.
#[derive(Debug, Clone, Copy, Default)]
pub struct FaerLuSolver;

struct FaerFactor(faer::sparse::linalg::solvers::Lu<usize, f64>);

impl Factorization for FaerFactor {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let rhs = faer::Col::<f64>::from_fn(b.len(), |i| b[i]);
        let x = self.0.solve(&rhs);
        (0..b.len()).map(|i| x[i]).collect()
    }
}

impl LinearSolver for FaerLuSolver {
    fn name(&self) -> &'static str {
        "faer-lu"
    }

    fn factor(&self, a: &SparseMatrix) -> Result<Box<dyn Factorization>> {
        let mut trip = Vec::with_capacity(a.nnz());
        for r in 0..a.nrows() {
            let (cols, vals) = a.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                trip.push(Triplet::new(r, c as usize, v));
            }
        }
        let m = SparseColMat::<usize, f64>::try_new_from_triplets(a.nrows(), a.ncols(), &trip)
            .map_err(|e| Error::Backend(format!("{e:?}")))?;
        let lu = m.sp_lu().map_err(|e| Error::Backend(format!("{e:?}")))?;
        Ok(Box::new(FaerFactor(lu)))
    }
}

/// faer's supernodal `LDL^T` on an AMD ordering, for symmetric matrices.
/// Pivot signs follow the diagonal: positive diagonals are expected to stay
/// positive, the others negative. Pivots that come out with the wrong sign or
/// below `1e-14` of the largest diagonal are replaced, and the solve is then
/// only approximate, which iterative refinement repairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct FaerLdltSolver;

struct LdltFactor {
    symbolic: SymbolicCholesky<usize>,
    values: Vec<f64>,
    fill: usize,
}

impl Factorization for LdltFactor {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut rhs = faer::Mat::<f64>::from_fn(n, 1, |i, _| b[i]);
        let par = Par::Seq;
        let mut mem = MemBuffer::new(self.symbolic.solve_in_place_scratch::<f64>(1, par));
        LdltRef::new(&self.symbolic, &self.values).solve_in_place_with_conj(
            Conj::No,
            rhs.as_mut(),
            par,
            MemStack::new(&mut mem),
        );
        (0..n).map(|i| rhs[(i, 0)]).collect()
    }

    fn fill(&self) -> Option<usize> {
        Some(self.fill)
    }
}

impl LinearSolver for FaerLdltSolver {
    fn name(&self) -> &'static str {
        "faer-ldlt"
    }

    fn requires_symmetric(&self) -> bool {
        true
    }

    fn factor(&self, a: &SparseMatrix) -> Result<Box<dyn Factorization>> {
        let defect = a.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::Backend(format!("LDL^T needs a symmetric matrix, defect {defect:.3e}")));
        }
        let n = a.nrows();
        // lower triangle in CSC is the upper triangle of the CSR rows
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_ptr.push(0usize);
        let mut diag = vec![0.0; n];
        for r in 0..n {
            let (cols, v) = a.row(r);
            for (&c, &x) in cols.iter().zip(v) {
                let c = c as usize;
                if c == r {
                    diag[r] = x;
                }
                if c >= r {
                    row_idx.push(c);
                    vals.push(x);
                }
            }
            col_ptr.push(row_idx.len());
        }
        let sym = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let mat = SparseColMat::new(sym, vals);
        let symbolic = factorize_symbolic_cholesky(
            mat.symbolic(),
            Side::Lower,
            SymmetricOrdering::Amd,
            CholeskySymbolicParams::default(),
        )
        .map_err(|e| Error::Backend(format!("{e:?}")))?;
        let signs: Vec<i8> = diag.iter().map(|&d| if d > 0.0 { 1 } else { -1 }).collect();
        let scale = diag.iter().fold(0.0f64, |m, d| m.max(d.abs()));
        let mut values = vec![0.0; symbolic.len_val()];
        let par = Par::Seq;
        let mut mem = MemBuffer::try_new(symbolic.factorize_numeric_ldlt_scratch::<f64>(par, Default::default()))
            .map_err(|_| Error::Backend("out of memory for the LDL^T workspace".into()))?;
        symbolic
            .factorize_numeric_ldlt(
                &mut values,
                mat.as_ref(),
                Side::Lower,
                LdltRegularization {
                    dynamic_regularization_signs: Some(&signs),
                    dynamic_regularization_delta: 1e-10 * scale,
                    dynamic_regularization_epsilon: 1e-14 * scale,
                },
                par,
                MemStack::new(&mut mem),
                Default::default(),
            )
            .map_err(|e| Error::Backend(format!("{e:?}")))?;
        let fill = values.len();
        Ok(Box::new(LdltFactor { symbolic, values, fill }))
    }
}

/// Linear solver backends selectable by name.
pub struct SolverRegistry {
    entries: Vec<Box<dyn LinearSolver>>,
}

impl Default for SolverRegistry {
    fn default() -> Self {
        let mut r = Self { entries: Vec::new() };
        r.register(Box::new(AmdLuSolver::default()));
        r.register(Box::new(FaerLuSolver));
        r.register(Box::new(FaerLdltSolver));
        r
    }
}

impl SolverRegistry {
    pub fn register(&mut self, solver: Box<dyn LinearSolver>) {
        self.entries.retain(|s| s.name() != solver.name());
        self.entries.push(solver);
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|s| s.name()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&dyn LinearSolver> {
        self.entries
            .iter()
            .find(|s| s.name() == name)
            .map(|s| s.as_ref())
            .ok_or_else(|| Error::UnknownStrategy {
                kind: "linear solver",
                name: name.to_string(),
                known: self.names().join(", "),
            })
    }
}

/// Relative residual `|A x - b| / |b|` (absolute if `b = 0`).
pub fn relative_residual(a: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let ax = a.matvec(x);
    let r: Vec<f64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm2(b);
    if nb > 0.0 {
        norm2(&r) / nb
    } else {
        norm2(&r)
    }
}

/// Solves with the factorization and refines until the relative residual is
/// below `tol` or `max_refine` correction steps were taken.
pub fn solve_refined(
    a: &SparseMatrix,
    factor: &dyn Factorization,
    b: &[f64],
    tol: f64,
    max_refine: usize,
) -> (Vec<f64>, f64) {
    let mut x = factor.solve(b);
    let mut res = relative_residual(a, &x, b);
    for _ in 0..max_refine {
        if res <= tol * 1e-2 {
            break;
        }
        let ax = a.matvec(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(p, q)| p - q).collect();
        let dx = factor.solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(p, q)| p + q).collect();
        let new_res = relative_residual(a, &candidate, b);
        if new_res >= res {
            break;
        }
        x = candidate;
        res = new_res;
    }
    (x, res)
}
