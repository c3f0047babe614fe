//! Uniform quadrilateral background mesh of `(-1, 1)^2`.

use crate::error::{Error, Result};
use crate::geometry::Point;

/// A mesh face. `cells[0]` is the cell on the minus side and `cells[1]` the
/// cell on the plus side of the face, so the normal `e_axis` points from the
/// first into the second. Boundary faces miss one of them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Face {
    pub axis: usize,
    pub vertices: [usize; 2],
    pub cells: [Option<usize>; 2],
}

impl Face {
    pub fn is_interior(&self) -> bool {
        self.cells[0].is_some() && self.cells[1].is_some()
    }

    pub fn normal(&self) -> Point {
        if self.axis == 0 {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    }
}

/// Uniform `n x n` Cartesian mesh. Cells are numbered `j * n + i`, vertices
/// `j * (n + 1) + i`. Faces normal to `x` come first, then faces normal to `y`.
#[derive(Debug, Clone)]
pub struct Mesh {
    n: usize,
    h: f64,
    lower: Point,
    faces: Vec<Face>,
}

/// Builds the background mesh with `n` cells per direction.
pub fn build_mesh(n: usize) -> Result<Mesh> {
    Mesh::new(n)
}

impl Mesh {
    pub const LOWER: Point = [-1.0, -1.0];
    pub const UPPER: Point = [1.0, 1.0];

    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidMesh(format!(
                "need at least 2 cells per direction, got {n}"
            )));
        }
        if n % 2 == 1 {
            log::warn!("odd mesh size n = {n}: the mesh is not nested in the next coarser level");
        }
        let h = (Self::UPPER[0] - Self::LOWER[0]) / n as f64;
        let nv = n + 1;
        let mut faces = Vec::with_capacity(2 * n * (n + 1));
        for j in 0..n {
            for i in 0..=n {
                faces.push(Face {
                    axis: 0,
                    vertices: [j * nv + i, (j + 1) * nv + i],
                    cells: [
                        (i > 0).then(|| j * n + i - 1),
                        (i < n).then_some(j * n + i),
                    ],
                });
            }
        }
        for j in 0..=n {
            for i in 0..n {
                faces.push(Face {
                    axis: 1,
                    vertices: [j * nv + i, j * nv + i + 1],
                    cells: [
                        (j > 0).then(|| (j - 1) * n + i),
                        (j < n).then_some(j * n + i),
                    ],
                });
            }
        }
        Ok(Self {
            n,
            h,
            lower: Self::LOWER,
            faces,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cell side length.
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn n_cells(&self) -> usize {
        self.n * self.n
    }

    pub fn n_vertices(&self) -> usize {
        (self.n + 1) * (self.n + 1)
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn cell_ij(&self, cell: usize) -> (usize, usize) {
        (cell % self.n, cell / self.n)
    }

    pub fn vertex(&self, v: usize) -> Point {
        let nv = self.n + 1;
        [
            self.lower[0] + (v % nv) as f64 * self.h,
            self.lower[1] + (v / nv) as f64 * self.h,
        ]
    }

    /// Lower-left corner of a cell.
    pub fn cell_origin(&self, cell: usize) -> Point {
        let (i, j) = self.cell_ij(cell);
        [
            self.lower[0] + i as f64 * self.h,
            self.lower[1] + j as f64 * self.h,
        ]
    }

    pub fn cell_bounds(&self, cell: usize) -> (Point, Point) {
        let o = self.cell_origin(cell);
        (o, [o[0] + self.h, o[1] + self.h])
    }

    pub fn cell_center(&self, cell: usize) -> Point {
        let o = self.cell_origin(cell);
        [o[0] + 0.5 * self.h, o[1] + 0.5 * self.h]
    }

    /// Corners in counterclockwise order starting at the lower left.
    pub fn cell_corners(&self, cell: usize) -> [Point; 4] {
        let (lo, hi) = self.cell_bounds(cell);
        [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]]
    }

    /// Faces of a cell ordered left, right, bottom, top.
    pub fn cell_faces(&self, cell: usize) -> [usize; 4] {
        let (i, j) = self.cell_ij(cell);
        let n = self.n;
        let off = n * (n + 1);
        [
            j * (n + 1) + i,
            j * (n + 1) + i + 1,
            off + j * n + i,
            off + (j + 1) * n + i,
        ]
    }

    /// Cells sharing a face with `cell`.
    pub fn cell_neighbors(&self, cell: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cell_faces(cell).into_iter().filter_map(move |f| {
            let face = &self.faces[f];
            let other = if face.cells[0] == Some(cell) {
                face.cells[1]
            } else {
                face.cells[0]
            };
            other.map(|c| (f, c))
        })
    }

    /// Cell index along one axis containing coordinate `x`, clamped so that
    /// points on the upper boundary land in the last cell.
    pub fn axis_index(&self, x: f64, axis: usize) -> Option<usize> {
        let s = (x - self.lower[axis]) / self.h;
        if !(-1e-12..=self.n as f64 + 1e-12).contains(&s) {
            return None;
        }
        Some((s.floor().max(0.0) as usize).min(self.n - 1))
    }

    /// The cell containing `x`. Points on shared edges go to the cell with
    /// the larger index.
    pub fn locate(&self, x: Point) -> Option<usize> {
        Some(self.cell_index(self.axis_index(x[0], 0)?, self.axis_index(x[1], 1)?))
    }

    /// Cells of the mesh refined `ratio` times contained in `cell`.
    pub fn children(&self, cell: usize, ratio: usize) -> Vec<usize> {
        let (i, j) = self.cell_ij(cell);
        let nf = self.n * ratio;
        let mut out = Vec::with_capacity(ratio * ratio);
        for b in 0..ratio {
            for a in 0..ratio {
                out.push((j * ratio + b) * nf + i * ratio + a);
            }
        }
        out
    }
}
