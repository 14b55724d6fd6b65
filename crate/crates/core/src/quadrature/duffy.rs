//! Generalized Duffy transformation for `|x - y|^{-2s}` on a right triangle
//! `y q p` with the right angle at `q`:
//!
//! `x = y + u^β (q - y) + u^β v (p - q)`, `β = 1 / (2(1 - s))`,
//!
//! which turns the corner singularity at `y` into a bounded integrand.

use crate::error::{domain, Result};

use super::gauss::GaussLegendre;

pub type Point = [f64; 2];

/// Tensor Gauss rule on `(0,1)²` paired with the exponent `β`.
#[derive(Debug, Clone)]
pub struct DuffyRule {
    s: f64,
    beta: f64,
    /// `(u, v, weight)`.
    points: Vec<(f64, f64, f64)>,
}

pub const DEFAULT_DUFFY_ORDER: usize = 8;

impl DuffyRule {
    pub fn new(s: f64, order: usize) -> Result<Self> {
        if !(s > 0.0 && s < 1.0) {
            return domain(format!("Duffy rule needs s in (0,1), got {s}"));
        }
        if order == 0 {
            return domain("Duffy rule order must be positive");
        }
        let g = GaussLegendre::new(order);
        let mut points = Vec::with_capacity(order * order);
        for (u, wu) in g.nodes.iter().zip(&g.weights) {
            for (v, wv) in g.nodes.iter().zip(&g.weights) {
                points.push((*u, *v, wu * wv));
            }
        }
        Ok(Self {
            s,
            beta: 1.0 / (2.0 * (1.0 - s)),
            points,
        })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn points(&self) -> &[(f64, f64, f64)] {
        &self.points
    }
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// `∫_T f(e_x) |x - y|^{-2s} dx` over the right triangle `T = y q p`
/// (right angle at `q`), where `e_x = (x - y)/|x - y|`.
pub fn duffy_integrate(y: Point, q: Point, p: Point, rule: &DuffyRule, f: impl Fn(Point) -> f64) -> Result<f64> {
    let qy = sub(q, y);
    let pq = sub(p, q);
    let (a, b) = (norm(qy), norm(pq));
    if a == 0.0 || b == 0.0 {
        return domain("degenerate right triangle");
    }
    if dot(qy, pq).abs() > 1e-10 * a * b {
        return domain("triangle has no right angle at q");
    }
    let area = 0.5 * a * b;
    let s = rule.s;
    let beta = rule.beta;
    let u_exp = 2.0 * beta * (1.0 - s) - 1.0;
    let mut acc = 0.0;
    for &(u, v, w) in &rule.points {
        let dir = [qy[0] + v * pq[0], qy[1] + v * pq[1]];
        let len2 = a * a + v * v * b * b;
        let len = len2.sqrt();
        let e = [dir[0] / len, dir[1] / len];
        acc += w * f(e) * beta * u.powf(u_exp) / len2.powf(s);
    }
    Ok(2.0 * area * acc)
}

/// Second moments `∫_T (e e^T) |x-y|^{-2s} dx` as `[xx, xy, yy]`. With
/// affine `φ`, `(φ(x)-φ(y))(ψ(x)-ψ(y)) K(x-y) = ½c (∇φ·e)(∇ψ·e) |x-y|^{-2s}`
/// in 2D, so these three numbers give every local stiffness entry.
pub fn duffy_moments(y: Point, q: Point, p: Point, rule: &DuffyRule) -> Result<[f64; 3]> {
    let qy = sub(q, y);
    let pq = sub(p, q);
    let (a, b) = (norm(qy), norm(pq));
    if a == 0.0 || b == 0.0 {
        return domain("degenerate right triangle");
    }
    if dot(qy, pq).abs() > 1e-10 * a * b {
        return domain("triangle has no right angle at q");
    }
    let s = rule.s;
    let beta = rule.beta;
    let u_exp = 2.0 * beta * (1.0 - s) - 1.0;
    let mut m = [0.0; 3];
    for &(u, v, w) in &rule.points {
        let dir = [qy[0] + v * pq[0], qy[1] + v * pq[1]];
        let len2 = a * a + v * v * b * b;
        let scale = w * beta * u.powf(u_exp) / len2.powf(s) / len2;
        m[0] += scale * dir[0] * dir[0];
        m[1] += scale * dir[0] * dir[1];
        m[2] += scale * dir[1] * dir[1];
    }
    let area2 = a * b;
    Ok([area2 * m[0], area2 * m[1], area2 * m[2]])
}
