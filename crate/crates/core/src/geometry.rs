//! Circular level set, point classification and the polar description of a
//! rectangle cut by the circle.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Position of a point relative to the zero level set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointClass {
    Solid,
    Fluid,
    Interface,
}

/// Which subdomain a quantity lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Fluid,
    Solid,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Fluid, Side::Solid];

    pub fn label(self) -> &'static str {
        match self {
            Side::Fluid => "fluid",
            Side::Solid => "solid",
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Fluid => Side::Solid,
            Side::Solid => Side::Fluid,
        }
    }
}

/// `phi(x) = |x - c|^2 - r^2`, negative inside the solid disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSet {
    center: Point,
    radius_squared: f64,
}

/// A zero of the level set on a straight segment `a + t (b - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeCrossing {
    pub t: f64,
    pub point: Point,
}

impl LevelSet {
    pub fn circle(center: Point, radius_squared: f64) -> Result<Self> {
        if !(radius_squared > 0.0) || !radius_squared.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "squared radius must be positive and finite, got {radius_squared}"
            )));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidGeometry("center must be finite".into()));
        }
        Ok(Self {
            center,
            radius_squared,
        })
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius_squared(&self) -> f64 {
        self.radius_squared
    }

    pub fn radius(&self) -> f64 {
        self.radius_squared.sqrt()
    }

    pub fn eval(&self, x: Point) -> f64 {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        dx * dx + dy * dy - self.radius_squared
    }

    pub fn gradient(&self, x: Point) -> Point {
        [2.0 * (x[0] - self.center[0]), 2.0 * (x[1] - self.center[1])]
    }

    /// Unit normal of the interface pointing out of the solid.
    pub fn outward_solid_normal(&self, x: Point) -> Point {
        let dx = x[0] - self.center[0];
        let dy = x[1] - self.center[1];
        let len = dx.hypot(dy);
        [dx / len, dy / len]
    }

    fn tolerance(&self, x: Point) -> f64 {
        1e-12 * (1.0 + x[0] * x[0] + x[1] * x[1])
    }

    pub fn classify(&self, x: Point) -> PointClass {
        let v = self.eval(x);
        if v.abs() <= self.tolerance(x) {
            PointClass::Interface
        } else if v < 0.0 {
            PointClass::Solid
        } else {
            PointClass::Fluid
        }
    }

    pub fn point_at_angle(&self, theta: f64) -> Point {
        let r = self.radius();
        [
            self.center[0] + r * theta.cos(),
            self.center[1] + r * theta.sin(),
        ]
    }

    /// Zeros of the level set on the closed segment from `a` to `b`, sorted by
    /// parameter. A tangential touch is a double root and is reported once.
    pub fn edge_zero_crossings(&self, a: Point, b: Point) -> Vec<EdgeCrossing> {
        let d = [b[0] - a[0], b[1] - a[1]];
        let e = [a[0] - self.center[0], a[1] - self.center[1]];
        let qa = d[0] * d[0] + d[1] * d[1];
        if qa == 0.0 {
            return Vec::new();
        }
        let qb = e[0] * d[0] + e[1] * d[1];
        let qc = e[0] * e[0] + e[1] * e[1] - self.radius_squared;
        let disc = qb * qb - qa * qc;
        let mut roots: Vec<f64> = Vec::with_capacity(2);
        if disc < 0.0 {
            return Vec::new();
        }
        if disc == 0.0 {
            roots.push(-qb / qa);
        } else {
            let q = -(qb + qb.signum() * disc.sqrt());
            let (mut t1, mut t2) = if q == 0.0 {
                let s = (-qc / qa).sqrt();
                (-s, s)
            } else {
                (q / qa, qc / q)
            };
            if t1 > t2 {
                std::mem::swap(&mut t1, &mut t2);
            }
            roots.push(t1);
            if t2 != t1 {
                roots.push(t2);
            }
        }
        roots
            .into_iter()
            .filter(|t| (0.0..=1.0).contains(t))
            .map(|t| EdgeCrossing {
                t,
                point: [a[0] + t * d[0], a[1] + t * d[1]],
            })
            .collect()
    }

    /// Number of crossings that change sign along the segment. Tangential
    /// touches and zeros at the endpoints do not count.
    pub fn transversal_crossings(&self, a: Point, b: Point) -> usize {
        let d = [b[0] - a[0], b[1] - a[1]];
        let e = [a[0] - self.center[0], a[1] - self.center[1]];
        let qa = d[0] * d[0] + d[1] * d[1];
        let qb = e[0] * d[0] + e[1] * d[1];
        let qc = e[0] * e[0] + e[1] * e[1] - self.radius_squared;
        let disc = qb * qb - qa * qc;
        if qa == 0.0 || disc <= 0.0 {
            return 0;
        }
        self.edge_zero_crossings(a, b)
            .iter()
            .filter(|c| c.t > 0.0 && c.t < 1.0)
            .count()
    }
}

/// One edge of an axis-aligned rectangle: the line `x = coord` (`axis = 0`)
/// or `y = coord` (`axis = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeLine {
    pub axis: usize,
    pub coord: f64,
}

/// A radial bound along a ray from the circle center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialBound {
    Center,
    Circle,
    Edge(EdgeLine),
}

/// Part of a cell swept by rays with angles in `theta` on which one side
/// occupies the radial interval `[lower(theta), upper(theta)]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPiece {
    pub theta: [f64; 2],
    pub lower: RadialBound,
    pub upper: RadialBound,
}

/// Polar decomposition of a rectangle about the circle center. Every ray
/// through the center meets a rectangle in one interval, and the disk in one
/// interval starting at the center, so each side's portion along a ray is a
/// single interval and all resulting quadrature weights are positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarCell {
    center: Point,
    radius: f64,
    cell_area: f64,
    pub solid: Vec<PolarPiece>,
    pub fluid: Vec<PolarPiece>,
    /// Angular intervals of interface arcs inside the cell.
    pub arcs: Vec<[f64; 2]>,
}

fn unwrap_near(theta: f64, reference: f64) -> f64 {
    let mut d = theta - reference;
    while d > PI {
        d -= 2.0 * PI;
    }
    while d <= -PI {
        d += 2.0 * PI;
    }
    reference + d
}

impl PolarCell {
    /// Builds the decomposition of `[lo, hi]`.
    pub fn new(level_set: &LevelSet, lo: Point, hi: Point) -> Self {
        let c = level_set.center();
        let r = level_set.radius();
        let corners = [lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]];
        let contains_center = (lo[0]..=hi[0]).contains(&c[0]) && (lo[1]..=hi[1]).contains(&c[1]);
        let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
        let reference = (mid[1] - c[1]).atan2(mid[0] - c[0]);

        let mut breaks: Vec<f64> = Vec::with_capacity(12);
        let (start, end) = if contains_center {
            (reference - PI, reference + PI)
        } else {
            let angles: Vec<f64> = corners
                .iter()
                .map(|p| unwrap_near((p[1] - c[1]).atan2(p[0] - c[0]), reference))
                .collect();
            let lo_t = angles.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi_t = angles.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            breaks.extend(angles);
            (lo_t, hi_t)
        };
        if contains_center {
            for p in &corners {
                let mut t = unwrap_near((p[1] - c[1]).atan2(p[0] - c[0]), reference);
                if t <= start {
                    t += 2.0 * PI;
                }
                breaks.push(t);
            }
        }
        let mut crossing_angles = Vec::new();
        for e in 0..4 {
            for x in level_set.edge_zero_crossings(corners[e], corners[(e + 1) % 4]) {
                let mut t = unwrap_near((x.point[1] - c[1]).atan2(x.point[0] - c[0]), reference);
                if contains_center && t <= start {
                    t += 2.0 * PI;
                }
                crossing_angles.push(t);
            }
        }
        breaks.extend(crossing_angles.iter().copied());
        breaks.push(start);
        breaks.push(end);
        breaks.retain(|t| *t >= start && *t <= end);
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));

        let mut cell = PolarCell {
            center: c,
            radius: r,
            cell_area: (hi[0] - lo[0]) * (hi[1] - lo[1]),
            solid: Vec::new(),
            fluid: Vec::new(),
            arcs: Vec::new(),
        };
        for w in breaks.windows(2) {
            let (t0, t1) = (w[0], w[1]);
            if t1 <= t0 {
                continue;
            }
            let tm = 0.5 * (t0 + t1);
            let Some((inner, outer)) = ray_slab(c, lo, hi, tm) else {
                continue;
            };
            let rho_in = cell.radius_of(inner, tm);
            let rho_out = cell.radius_of(outer, tm);
            if rho_out <= rho_in {
                continue;
            }
            if rho_in < r {
                let upper = if r < rho_out { RadialBound::Circle } else { outer };
                cell.solid.push(PolarPiece {
                    theta: [t0, t1],
                    lower: inner,
                    upper,
                });
            }
            if rho_out > r {
                let lower = if r > rho_in { RadialBound::Circle } else { inner };
                cell.fluid.push(PolarPiece {
                    theta: [t0, t1],
                    lower,
                    upper: outer,
                });
            }
            if rho_in < r && r < rho_out {
                match cell.arcs.last_mut() {
                    Some(last) if last[1] == t0 => last[1] = t1,
                    _ => cell.arcs.push([t0, t1]),
                }
            }
        }
        cell
    }

    pub fn center(&self) -> Point {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn cell_area(&self) -> f64 {
        self.cell_area
    }

    /// Distance from the center to `bound` along the ray at angle `theta`.
    pub fn radius_of(&self, bound: RadialBound, theta: f64) -> f64 {
        match bound {
            RadialBound::Center => 0.0,
            RadialBound::Circle => self.radius,
            RadialBound::Edge(e) => {
                let dir = if e.axis == 0 { theta.cos() } else { theta.sin() };
                (e.coord - self.center[e.axis]) / dir
            }
        }
    }

    /// Exact area of the pieces, integrating `rho^2 / 2` in closed form.
    pub fn area(pieces: &[PolarPiece], center: Point, radius: f64) -> f64 {
        pieces
            .iter()
            .map(|p| {
                sector_integral(p.upper, p.theta, center, radius)
                    - sector_integral(p.lower, p.theta, center, radius)
            })
            .sum()
    }

    pub fn solid_area(&self) -> f64 {
        Self::area(&self.solid, self.center, self.radius)
    }

    pub fn fluid_area(&self) -> f64 {
        Self::area(&self.fluid, self.center, self.radius)
    }

    pub fn arc_length(&self) -> f64 {
        self.arcs.iter().map(|a| self.radius * (a[1] - a[0])).sum()
    }
}

/// `int_{theta} rho(theta)^2 / 2 dtheta` for a single radial bound.
fn sector_integral(bound: RadialBound, theta: [f64; 2], center: Point, radius: f64) -> f64 {
    let [a, b] = theta;
    match bound {
        RadialBound::Center => 0.0,
        RadialBound::Circle => 0.5 * radius * radius * (b - a),
        RadialBound::Edge(e) => {
            let d = e.coord - center[e.axis];
            // tan(b) - tan(a) and cot(a) - cot(b), written to avoid cancellation
            let s = (b - a).sin();
            let factor = if e.axis == 0 {
                s / (a.cos() * b.cos())
            } else {
                s / (a.sin() * b.sin())
            };
            0.5 * d * d * factor
        }
    }
}

/// Entry and exit edges of the ray from `c` at angle `theta` through the box,
/// with the entry clamped at the ray origin.
fn ray_slab(c: Point, lo: Point, hi: Point, theta: f64) -> Option<(RadialBound, RadialBound)> {
    let dir = [theta.cos(), theta.sin()];
    let mut t_in = 0.0;
    let mut b_in = RadialBound::Center;
    let mut t_out = f64::INFINITY;
    let mut b_out = None;
    for axis in 0..2 {
        if dir[axis] == 0.0 {
            if c[axis] < lo[axis] || c[axis] > hi[axis] {
                return None;
            }
            continue;
        }
        let (near, far) = if dir[axis] > 0.0 {
            (lo[axis], hi[axis])
        } else {
            (hi[axis], lo[axis])
        };
        let t_near = (near - c[axis]) / dir[axis];
        let t_far = (far - c[axis]) / dir[axis];
        if t_near > t_in {
            t_in = t_near;
            b_in = RadialBound::Edge(EdgeLine { axis, coord: near });
        }
        if t_far < t_out {
            t_out = t_far;
            b_out = Some(RadialBound::Edge(EdgeLine { axis, coord: far }));
        }
    }
    match b_out {
        Some(b) if t_out > t_in => Some((b_in, b)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tangent_edge_reports_one_root() {
        let ls = LevelSet::circle([0.0, 0.0], 1.0).unwrap();
        let c = ls.edge_zero_crossings([-1.0, 1.0], [1.0, 1.0]);
        assert_eq!(c.len(), 1);
        assert!((c[0].t - 0.5).abs() < 1e-15);
        assert_eq!(ls.transversal_crossings([-1.0, 1.0], [1.0, 1.0]), 0);
    }

    #[test]
    fn full_disk_inside_one_cell() {
        let ls = LevelSet::circle([0.1, 0.2], 0.01).unwrap();
        let pc = PolarCell::new(&ls, [-1.0, -1.0], [1.0, 1.0]);
        assert!((pc.solid_area() - PI * 0.01).abs() < 1e-14);
        assert!((pc.fluid_area() - (4.0 - PI * 0.01)).abs() < 1e-13);
        assert!((pc.arc_length() - 2.0 * PI * 0.1).abs() < 1e-14);
    }

    #[test]
    fn quarter_disk_in_unit_square() {
        let ls = LevelSet::circle([0.0, 0.0], 0.25).unwrap();
        let pc = PolarCell::new(&ls, [0.0, 0.0], [1.0, 1.0]);
        assert!((pc.solid_area() - PI * 0.25 / 4.0).abs() < 1e-14);
        assert!((pc.arc_length() - PI * 0.5 / 2.0).abs() < 1e-14);
    }
}
