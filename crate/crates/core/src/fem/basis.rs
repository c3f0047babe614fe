//! Tensor-product Lagrange bases on the reference square `[0, 1]^2`.

use crate::geometry::Point;

/// Equispaced tensor-product Lagrange basis of degree `order` per direction.
/// Local dof `b * (order + 1) + a` sits at the node `(a, b) / order`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceBasis {
    order: usize,
    nodes: Vec<f64>,
}

/// Values and physical derivatives of all shape functions at one point.
/// Hessians are stored as `[xx, xy, yy]`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BasisTable {
    pub values: Vec<f64>,
    pub grads: Vec<Point>,
    pub hessians: Vec<[f64; 3]>,
}

impl ReferenceBasis {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Lagrange elements need degree at least 1");
        Self {
            order,
            nodes: (0..=order).map(|a| a as f64 / order as f64).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_dofs(&self) -> usize {
        (self.order + 1) * (self.order + 1)
    }

    /// Reference coordinates of local node `i`.
    pub fn node(&self, i: usize) -> Point {
        let m = self.order + 1;
        [self.nodes[i % m], self.nodes[i / m]]
    }

    /// Values, first and second derivatives of the 1D Lagrange polynomials.
    fn eval_1d(&self, t: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.order + 1;
        let nodes = &self.nodes;
        let mut v = vec![0.0; m];
        let mut d1 = vec![0.0; m];
        let mut d2 = vec![0.0; m];
        for a in 0..m {
            let denom: f64 = (0..m).filter(|&b| b != a).map(|b| nodes[a] - nodes[b]).product();
            let factor = |skip: &[usize]| -> f64 {
                (0..m)
                    .filter(|b| *b != a && !skip.contains(b))
                    .map(|b| t - nodes[b])
                    .product()
            };
            v[a] = factor(&[]) / denom;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for p in (0..m).filter(|&p| p != a) {
                s1 += factor(&[p]);
                for q in (0..m).filter(|&q| q != a && q != p) {
                    s2 += factor(&[p, q]);
                }
            }
            d1[a] = s1 / denom;
            d2[a] = s2 / denom;
        }
        (v, d1, d2)
    }

    /// Tabulates the basis at reference point `xhat` on a cell of side `h`,
    /// returning derivatives with respect to physical coordinates.
    pub fn tabulate(&self, xhat: Point, h: f64) -> BasisTable {
        let (vx, dx, ddx) = self.eval_1d(xhat[0]);
        let (vy, dy, ddy) = self.eval_1d(xhat[1]);
        let m = self.order + 1;
        let n = m * m;
        let mut table = BasisTable {
            values: Vec::with_capacity(n),
            grads: Vec::with_capacity(n),
            hessians: Vec::with_capacity(n),
        };
        let ih = 1.0 / h;
        let ih2 = ih * ih;
        for b in 0..m {
            for a in 0..m {
                table.values.push(vx[a] * vy[b]);
                table.grads.push([dx[a] * vy[b] * ih, vx[a] * dy[b] * ih]);
                table
                    .hessians
                    .push([ddx[a] * vy[b] * ih2, dx[a] * dy[b] * ih2, vx[a] * ddy[b] * ih2]);
            }
        }
        table
    }
}

/// Affine map between the reference square and a mesh cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellMap {
    pub origin: Point,
    pub h: f64,
}

impl CellMap {
    pub fn to_reference(&self, x: Point) -> Point {
        [(x[0] - self.origin[0]) / self.h, (x[1] - self.origin[1]) / self.h]
    }

    pub fn to_physical(&self, xhat: Point) -> Point {
        [self.origin[0] + self.h * xhat[0], self.origin[1] + self.h * xhat[1]]
    }

    pub fn jacobian_determinant(&self) -> f64 {
        self.h * self.h
    }
}

/// The `j`-th normal derivative of a shape function along the axis-aligned
/// unit normal `e_axis`, for `j` in `0..=2`.
pub fn normal_derivative(table: &BasisTable, i: usize, axis: usize, j: usize) -> f64 {
    match j {
        0 => table.values[i],
        1 => table.grads[i][axis],
        2 => table.hessians[i][2 * axis],
        _ => panic!("normal derivatives above second order are not tabulated"),
    }
}
