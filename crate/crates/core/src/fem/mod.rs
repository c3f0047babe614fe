//! Finite element spaces: reference bases, dof numbering and field evaluation.

mod basis;
mod dofmap;

pub use basis::{normal_derivative, BasisTable, CellMap, ReferenceBasis};
pub use dofmap::{DofMap, FieldRole};

use crate::geometry::Point;
use crate::mesh::Mesh;

/// Read-only view of a (possibly vector valued) discrete field stored
/// component-major: component `c` of scalar dof `i` is `coeffs[c * n + i]`.
#[derive(Debug, Clone, Copy)]
pub struct FieldView<'a> {
    pub dofmap: &'a DofMap,
    pub coeffs: &'a [f64],
    pub components: usize,
}

/// Value and gradient of every component at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointEval {
    pub value: [f64; 2],
    pub grad: [Point; 2],
}

impl<'a> FieldView<'a> {
    pub fn new(dofmap: &'a DofMap, coeffs: &'a [f64], components: usize) -> Self {
        assert_eq!(coeffs.len(), components * dofmap.n_dofs(), "coefficient length mismatch");
        Self {
            dofmap,
            coeffs,
            components,
        }
    }

    /// Evaluates the field restricted to the polynomial of `cell` at the
    /// physical point `x`, which may lie outside the cell.
    pub fn eval(&self, cell: usize, x: Point) -> PointEval {
        let map = self.dofmap.cell_map(cell);
        let table = self.dofmap.basis().tabulate(map.to_reference(x), map.h);
        self.eval_table(cell, &table)
    }

    pub fn eval_table(&self, cell: usize, table: &BasisTable) -> PointEval {
        let dofs = self.dofmap.cell_dofs(cell);
        let n = self.dofmap.n_dofs();
        let mut out = PointEval::default();
        for c in 0..self.components {
            let coeffs = &self.coeffs[c * n..(c + 1) * n];
            for (l, &d) in dofs.iter().enumerate() {
                let u = coeffs[d as usize];
                out.value[c] += u * table.values[l];
                out.grad[c][0] += u * table.grads[l][0];
                out.grad[c][1] += u * table.grads[l][1];
            }
        }
        out
    }

    /// Jump `[d^j_n v]` of component `component` across an interior face at
    /// the point `x` on it, plus side minus minus side.
    pub fn normal_derivative_jump(&self, mesh: &Mesh, face: usize, component: usize, j: usize, x: Point) -> f64 {
        let f = mesh.face(face);
        let (Some(minus), Some(plus)) = (f.cells[0], f.cells[1]) else {
            panic!("face {face} is on the boundary");
        };
        let n = self.dofmap.n_dofs();
        let coeffs = &self.coeffs[component * n..(component + 1) * n];
        let side_value = |cell: usize| -> f64 {
            let map = self.dofmap.cell_map(cell);
            let table = self.dofmap.basis().tabulate(map.to_reference(x), map.h);
            self.dofmap
                .cell_dofs(cell)
                .iter()
                .enumerate()
                .map(|(l, &d)| coeffs[d as usize] * normal_derivative(&table, l, f.axis, j))
                .sum()
        };
        side_value(plus) - side_value(minus)
    }
}
