//! Gauss rules on cells, cut cells, interface arcs and faces.

use crate::geometry::{PolarCell, PolarPiece, Point, Side};
use crate::mesh::Mesh;

/// Quadrature points with positive weights in physical coordinates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QuadratureRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn integrate(&self, f: impl Fn(Point) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Quadrature on interface arcs. `normals` holds the unit normal of the
/// fluid domain at each point, which points into the solid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct InterfaceRule {
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
    pub normals: Vec<Point>,
}

impl InterfaceRule {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Gauss-Legendre rule with `npts` points on `[0, 1]`, exact for polynomials
/// of degree `2 npts - 1`.
pub fn gauss_1d(npts: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(npts >= 1, "a Gauss rule needs at least one point");
    let n = npts;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        dp = if d != 0.0 { d } else { dp };
        let weight = 1.0 / ((1.0 - z * z) * dp * dp);
        x[i] = 0.5 * (1.0 - z);
        x[n - 1 - i] = 0.5 * (1.0 + z);
        w[i] = weight;
        w[n - 1 - i] = weight;
    }
    (x, w)
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, dp)
}

/// Tensor Gauss rule on the box `[lo, hi]`.
pub fn tensor_rule(lo: Point, hi: Point, npts: usize) -> QuadratureRule {
    let (x, w) = gauss_1d(npts);
    let (dx, dy) = (hi[0] - lo[0], hi[1] - lo[1]);
    let mut rule = QuadratureRule::default();
    for (yj, wj) in x.iter().zip(&w) {
        for (xi, wi) in x.iter().zip(&w) {
            rule.points.push([lo[0] + xi * dx, lo[1] + yj * dy]);
            rule.weights.push(wi * wj * dx * dy);
        }
    }
    rule
}

/// Quadrature on the part of a cut cell belonging to `side`. Each polar piece
/// uses `2 npts` Gauss points in angle and `npts` points in radius, so the
/// radial integration is exact for polynomials of degree `2 npts - 2`.
/// Slivers below `1e-14` of the cell area get an empty rule.
pub fn cut_cell_rule(polar: &PolarCell, side: Side, npts: usize) -> QuadratureRule {
    let (pieces, area) = match side {
        Side::Fluid => (&polar.fluid, polar.fluid_area()),
        Side::Solid => (&polar.solid, polar.solid_area()),
    };
    let cell_area = polar.cell_area();
    if area < 1e-14 * cell_area {
        return QuadratureRule::default();
    }
    polar_rule(polar, pieces, npts)
}

fn polar_rule(polar: &PolarCell, pieces: &[PolarPiece], npts: usize) -> QuadratureRule {
    let (xr, wr) = gauss_1d(npts);
    let (xt, wt) = gauss_1d(2 * npts);
    let c = polar.center();
    let mut rule = QuadratureRule::default();
    for piece in pieces {
        let [t0, t1] = piece.theta;
        for (s, ws) in xt.iter().zip(&wt) {
            let theta = t0 + s * (t1 - t0);
            let (sin, cos) = theta.sin_cos();
            let r0 = polar.radius_of(piece.lower, theta);
            let r1 = polar.radius_of(piece.upper, theta);
            if r1 <= r0 {
                continue;
            }
            for (q, wq) in xr.iter().zip(&wr) {
                let rho = r0 + q * (r1 - r0);
                rule.points.push([c[0] + rho * cos, c[1] + rho * sin]);
                rule.weights.push(ws * (t1 - t0) * wq * (r1 - r0) * rho);
            }
        }
    }
    rule
}

/// Gauss rule with `npts` points per arc, parametrized by angle.
pub fn interface_rule(polar: &PolarCell, npts: usize) -> InterfaceRule {
    let (xt, wt) = gauss_1d(npts);
    let c = polar.center();
    let r = polar.radius();
    let mut rule = InterfaceRule::default();
    for arc in &polar.arcs {
        for (s, ws) in xt.iter().zip(&wt) {
            let theta = arc[0] + s * (arc[1] - arc[0]);
            let (sin, cos) = theta.sin_cos();
            rule.points.push([c[0] + r * cos, c[1] + r * sin]);
            rule.weights.push(ws * r * (arc[1] - arc[0]));
            rule.normals.push([-cos, -sin]);
        }
    }
    rule
}

/// Gauss rule along a mesh face.
pub fn face_rule(mesh: &Mesh, face: usize, npts: usize) -> QuadratureRule {
    let f = mesh.face(face);
    let a = mesh.vertex(f.vertices[0]);
    let b = mesh.vertex(f.vertices[1]);
    let (x, w) = gauss_1d(npts);
    let len = mesh.h();
    QuadratureRule {
        points: x
            .iter()
            .map(|t| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])])
            .collect(),
        weights: w.iter().map(|wi| wi * len).collect(),
    }
}
