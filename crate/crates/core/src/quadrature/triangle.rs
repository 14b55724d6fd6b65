//! Splitting a triangle into signed right triangles around a point, and
//! the edge-midpoint rule.

use crate::error::{domain, Result};
use crate::mesh::signed_area;

use super::duffy::Point;

/// A right triangle `y q p` (right angle at `q`) with a sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedRightTriangle {
    pub sign: f64,
    pub y: Point,
    pub q: Point,
    pub p: Point,
}

impl SignedRightTriangle {
    pub fn area(&self) -> f64 {
        signed_area(self.y, self.q, self.p).abs()
    }
}

/// Signed right-triangle decomposition of `T` seen from an arbitrary point
/// `y`: `1_T = Σ sign · 1_{y q p}` almost everywhere. Each edge `(a, b)`
/// contributes the triangle `(y, a, b)` with its orientation sign, and that
/// triangle is written as a sum or difference of the two right triangles
/// cut by the foot `q` of `y` on the edge line.
pub(crate) fn signed_right_triangles(corners: [Point; 3], y: Point) -> Vec<SignedRightTriangle> {
    let area_t = signed_area(corners[0], corners[1], corners[2]);
    let scale = area_t.abs();
    let orient_t = area_t.signum();
    let mut out = Vec::with_capacity(6);
    for k in 0..3 {
        let (a, b) = (corners[k], corners[(k + 1) % 3]);
        let orient = signed_area(y, a, b);
        if orient.abs() <= 1e-14 * scale {
            continue;
        }
        let sign = orient.signum() * orient_t;
        let e = [b[0] - a[0], b[1] - a[1]];
        let len2 = e[0] * e[0] + e[1] * e[1];
        let t = ((y[0] - a[0]) * e[0] + (y[1] - a[1]) * e[1]) / len2;
        let q = [a[0] + t * e[0], a[1] + t * e[1]];
        // positions of a and b along the edge measured from q
        let len = len2.sqrt();
        let (tau_a, tau_b) = (-t * len, (1.0 - t) * len);
        let tiny = 1e-12 * len;
        if tau_b.abs() > tiny {
            out.push(SignedRightTriangle {
                sign: sign * tau_b.signum(),
                y,
                q,
                p: b,
            });
        }
        if tau_a.abs() > tiny {
            out.push(SignedRightTriangle {
                sign: -sign * tau_a.signum(),
                y,
                q,
                p: a,
            });
        }
    }
    out
}

/// Decomposition of `T` into at most four signed right triangles having `y`
/// as a non-right corner, for `y` on the boundary of `T`.
pub fn split_right_triangles(corners: [Point; 3], y: Point) -> Result<Vec<SignedRightTriangle>> {
    let area = signed_area(corners[0], corners[1], corners[2]);
    if area == 0.0 || !area.is_finite() {
        return domain("degenerate triangle");
    }
    let mut on_edge = false;
    for k in 0..3 {
        let (a, b) = (corners[k], corners[(k + 1) % 3]);
        let e = [b[0] - a[0], b[1] - a[1]];
        let len2 = e[0] * e[0] + e[1] * e[1];
        let t = ((y[0] - a[0]) * e[0] + (y[1] - a[1]) * e[1]) / len2;
        let dist = signed_area(y, a, b).abs() * 2.0 / len2.sqrt();
        if dist <= 1e-10 * len2.sqrt() && (-1e-10..=1.0 + 1e-10).contains(&t) {
            on_edge = true;
        }
    }
    if !on_edge {
        return domain(format!("point {y:?} is not on the boundary of the triangle"));
    }
    Ok(signed_right_triangles(corners, y))
}

/// `area(T)/3 · Σ g(m_k)` over the edge midpoints; exact for quadratics.
pub fn edge_midpoint_rule(corners: [Point; 3], g: impl Fn(Point) -> f64) -> f64 {
    let area = signed_area(corners[0], corners[1], corners[2]).abs();
    edge_midpoints(corners).iter().map(|&m| g(m)).sum::<f64>() * area / 3.0
}

pub(crate) fn edge_midpoints(c: [Point; 3]) -> [Point; 3] {
    let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    [mid(c[0], c[1]), mid(c[1], c[2]), mid(c[2], c[0])]
}
