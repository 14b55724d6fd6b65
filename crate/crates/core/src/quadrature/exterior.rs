//! `κ(x) = ∫_{∁Ω} K(x - y) dy`, the exterior interaction of a point of `Ω`.
//!
//! In polar coordinates around `x` the radial integral is explicit,
//! `∫_ρ^∞ K(r) r dr = c/(4s) ρ^{-2s}`, so in 2D
//! `κ(x) = c/(4s) ∫ ρ(θ)^{-2s} dθ`, where `ρ(θ)` is the distance to `∂Ω`.
//! On a boundary edge at distance `d` from `x`, `ρ = d / cos φ` with `φ`
//! measured from the normal, and `∫ cos^{2s} φ dφ` is an incomplete beta
//! function. Summing over the oriented boundary edges with the signed
//! angle sweep handles non-star-shaped domains as well.

use statrs::function::beta::{beta, beta_reg};

use crate::error::{domain, Result};
use crate::kernel::{Kernel, RadialKernel};
use crate::mesh::TriMesh;

use super::duffy::Point;
use super::elem1d::{elem_integral_1d, BivariatePoly};

/// `∫_0^φ cos^{2s} ψ dψ` for `|φ| < π/2`.
fn cos_power_integral(s: f64, phi: f64) -> f64 {
    let x = phi.sin().powi(2).min(1.0);
    let (a, b) = (0.5, s + 0.5);
    0.5 * beta(a, b) * beta_reg(a, b, x) * phi.signum()
}

/// Exact `∫_{∁Ω} K(x - y) dy` for `x` inside a polygonal `Ω` given by its
/// boundary edges (oriented with `Ω` on the left).
pub fn polygon_exterior_integral(kernel: &Kernel, vertices: &[Point], edges: &[(usize, usize)], x: Point) -> f64 {
    let s = kernel.s();
    let mut total = 0.0;
    for &(ia, ib) in edges {
        let (a, b) = (vertices[ia], vertices[ib]);
        let (ax, ay) = (a[0] - x[0], a[1] - x[1]);
        let (bx, by) = (b[0] - x[0], b[1] - x[1]);
        let cross = ax * by - ay * bx;
        let e = [b[0] - a[0], b[1] - a[1]];
        let len = (e[0] * e[0] + e[1] * e[1]).sqrt();
        if cross.abs() <= 1e-14 * len * len {
            continue;
        }
        // unit normal from x towards the edge line
        let d = cross.abs() / len;
        let sgn = cross.signum();
        let n = [sgn * e[1] / len, -sgn * e[0] / len];
        let t = [-n[1], n[0]];
        let angle = |px: f64, py: f64| (px * t[0] + py * t[1]).atan2(px * n[0] + py * n[1]);
        let (pa, pb) = (angle(ax, ay), angle(bx, by));
        total += d.powf(-2.0 * s) * (cos_power_integral(s, pb) - cos_power_integral(s, pa));
    }
    kernel.constant() / (4.0 * s) * total
}

/// `∫_{∁Ω} K(x - y) dy` for `x ∈ Ω ⊂ ℝ²`. Splitting at a radius `R` with
/// `B(x,R) ⊃ Ω` gives the annulus `B(x,R) \ Ω` plus the tail beyond `R`;
/// both pieces come out of the same polar formula, so only the containment
/// of `Ω` is checked and the value does not depend on `R`.
pub fn exterior_integral(x: Point, mesh: &TriMesh, kernel: &Kernel, radius: f64) -> Result<f64> {
    if kernel.dim() != 2 {
        return domain("2D exterior integral needs a 2D kernel");
    }
    let far = mesh
        .vertices()
        .iter()
        .map(|v| ((v[0] - x[0]).powi(2) + (v[1] - x[1]).powi(2)).sqrt())
        .fold(0.0, f64::max);
    if !(radius > far) {
        return domain(format!("ball of radius {radius} around {x:?} does not contain the domain"));
    }
    Ok(polygon_exterior_integral(kernel, mesh.vertices(), &mesh.boundary_edges(), x))
}

/// 1D exterior integral `∫_{ℝ \ (a,b)} K(x - y) dy` for `a < x < b`.
pub fn exterior_integral_1d(x: f64, a: f64, b: f64, kernel: &Kernel) -> Result<f64> {
    if kernel.dim() != 1 {
        return domain("1D exterior integral needs a 1D kernel");
    }
    if !(a < x && x < b) {
        return domain(format!("point {x} not inside ({a}, {b})"));
    }
    let gamma = kernel.gamma();
    let right = (b - x).powf(1.0 - gamma) / (gamma - 1.0);
    let left = (x - a).powf(1.0 - gamma) / (gamma - 1.0);
    Ok(kernel.prefactor() * (left + right))
}

/// `∫_I ∫_{ℝ \ (a,b)} K(x - y) dy dx` over a subinterval `I = [lo, hi]` of
/// `(a, b)`, through unbounded elementary integrals.
pub fn exterior_strip_1d(lo: f64, hi: f64, a: f64, b: f64, kernel: &Kernel) -> Result<f64> {
    let one = BivariatePoly::constant(1.0);
    let gamma = kernel.gamma();
    let right = elem_integral_1d(lo, hi, b, f64::INFINITY, gamma, &one)?;
    let left = elem_integral_1d(f64::NEG_INFINITY, a, lo, hi, gamma, &one)?;
    Ok(kernel.prefactor() * (left + right))
}
