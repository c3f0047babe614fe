//! Static condensation of the displacement block.
//!
//! The constraint rows read `M (u^n - k v_s^n) = M u^{n-1}` with a nonsingular
//! solid mass matrix `M`, so they hold exactly when `u^n = u^{n-1} + k v_s^n`
//! coefficient by coefficient. Substituting this into the remaining rows and
//! negating the pressure rows leaves a symmetric indefinite system in
//! `(v_f, p, v_s)`.

use crate::fem::FieldRole;
use crate::sparse::SparseMatrix;

use super::BlockLayout;

#[derive(Debug, Clone)]
pub struct Condensation {
    /// Matrix on the kept unknowns, with pressure rows negated.
    pub matrix: SparseMatrix,
    /// Global index of every kept unknown.
    keep: Vec<usize>,
    /// Row signs applied to the kept rows.
    sign: Vec<f64>,
    /// Displacement columns of the kept rows, unsigned.
    coupling: SparseMatrix,
    layout: BlockLayout,
    k: f64,
}

impl Condensation {
    /// Condenses the eliminated time-step matrix `a` of step size `k`.
    pub fn new(layout: &BlockLayout, a: &SparseMatrix, k: f64) -> Self {
        let u = layout.range(FieldRole::Displacement);
        let vs = layout.range(FieldRole::SolidVelocity);
        let p = layout.range(FieldRole::Pressure);
        let n = layout.total();
        let keep: Vec<usize> = (0..n).filter(|i| !u.contains(i)).collect();
        let mut map = vec![usize::MAX; n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let sign: Vec<f64> = keep.iter().map(|i| if p.contains(i) { -1.0 } else { 1.0 }).collect();
        let mut rows = Vec::with_capacity(keep.len());
        let mut coupling_trip = Vec::new();
        for &g in &keep {
            let (cols, _) = a.row(g);
            let mut cr: Vec<u32> = Vec::with_capacity(cols.len());
            for &c in cols {
                let c = c as usize;
                if u.contains(&c) {
                    cr.push(map[vs.start + (c - u.start)] as u32);
                } else {
                    cr.push(map[c] as u32);
                }
            }
            rows.push(cr);
        }
        let mut matrix = SparseMatrix::from_pattern(keep.len(), rows);
        for (r, &g) in keep.iter().enumerate() {
            let (cols, vals) = a.row(g);
            for (&c, &v) in cols.iter().zip(vals) {
                let c = c as usize;
                if v == 0.0 {
                    continue;
                }
                if u.contains(&c) {
                    matrix.add_at(r, map[vs.start + (c - u.start)], sign[r] * k * v);
                    coupling_trip.push((r, c - u.start, v));
                } else {
                    matrix.add_at(r, map[c], sign[r] * v);
                }
            }
        }
        let coupling = SparseMatrix::from_triplets(keep.len(), u.len(), &coupling_trip);
        Self {
            matrix,
            keep,
            sign,
            coupling,
            layout: *layout,
            k,
        }
    }

    /// Right-hand side of the condensed system from the full one.
    pub fn rhs(&self, b: &[f64], u_prev: &[f64]) -> Vec<f64> {
        let cu = self.coupling.matvec(u_prev);
        self.keep
            .iter()
            .enumerate()
            .map(|(r, &g)| self.sign[r] * (b[g] - cu[r]))
            .collect()
    }

    /// Full state from the condensed solution.
    pub fn expand(&self, y: &[f64], u_prev: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.layout.total()];
        for (&g, &v) in self.keep.iter().zip(y) {
            x[g] = v;
        }
        let u = self.layout.range(FieldRole::Displacement);
        let vs = self.layout.range(FieldRole::SolidVelocity);
        for i in 0..u.len() {
            x[u.start + i] = u_prev[i] + self.k * x[vs.start + i];
        }
        x
    }

    /// Kept unknowns of a full vector, in condensed order.
    pub fn restrict(&self, x: &[f64]) -> Vec<f64> {
        self.keep.iter().map(|&g| x[g]).collect()
    }
}
