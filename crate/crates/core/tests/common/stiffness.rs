//! Brute-force oracle for the 1D stiffness matrix.
//!
//! The oracle writes `⟨φ_i, φ_j⟩_H = c ∫_0^∞ z^{-1-2s} G(z) dz` with
//! `G(z) = ∫ (φ_i(x) - φ_i(x+z)) (φ_j(x) - φ_j(x+z)) dx`, evaluates `G`
//! exactly by Gauss rules between breakpoints, integrates each polynomial
//! piece of `G` by tanh-sinh, and adds the constant tail beyond the support.
//! On the first piece `G(z) = a z² + b z³`; its coefficients come from two
//! samples, since `x + z` rounds to `x` for tiny `z`.

use fraclap::assembly::assemble_1d;
use fraclap::kernel::Kernel;
use fraclap::mesh::Mesh1D;
use fraclap::quadrature::GaussLegendre;

fn hat(x: &[f64], i: usize, t: f64) -> f64 {
    if t <= x[i - 1] || t >= x[i + 1] {
        0.0
    } else if t <= x[i] {
        (t - x[i - 1]) / (x[i] - x[i - 1])
    } else {
        (x[i + 1] - t) / (x[i + 1] - x[i])
    }
}

fn g_of_z(x: &[f64], i: usize, j: usize, z: f64) -> f64 {
    let mut bps: Vec<f64> = x.iter().flat_map(|&p| [p, p - z]).collect();
    bps.sort_by(f64::total_cmp);
    let rule = GaussLegendre::new(3);
    let mut acc = 0.0;
    for w in bps.windows(2) {
        if w[1] > w[0] {
            acc += rule.integrate(w[0], w[1], |t| {
                (hat(x, i, t) - hat(x, i, t + z)) * (hat(x, j, t) - hat(x, j, t + z))
            });
        }
    }
    acc
}

pub fn oracle_entry(x: &[f64], i: usize, j: usize, s: f64, c: f64) -> f64 {
    let span = x[x.len() - 1] - x[0];
    // breakpoints of G: all node differences
    let mut zs: Vec<f64> = Vec::new();
    for a in x {
        for b in x {
            if a > b {
                zs.push(a - b);
            }
        }
    }
    zs.push(0.0);
    zs.sort_by(f64::total_cmp);
    zs.dedup_by(|a, b| (*a - *b).abs() < 1e-13);
    let z1 = zs[1];
    let (g1, g2) = (g_of_z(x, i, j, 0.5 * z1), g_of_z(x, i, j, z1));
    // a (z1/2)² + b (z1/2)³ = g1, a z1² + b z1³ = g2
    let b = 2.0 * (g2 - 4.0 * g1) / z1.powi(3);
    let a = (g2 - b * z1.powi(3)) / (z1 * z1);
    let mut acc = a * z1.powf(2.0 - 2.0 * s) / (2.0 - 2.0 * s) + b * z1.powf(3.0 - 2.0 * s) / (3.0 - 2.0 * s);
    for w in zs[1..].windows(2) {
        acc += super::tanh_sinh(|z| z.powf(-1.0 - 2.0 * s) * g_of_z(x, i, j, z), w[0], w[1]);
    }
    // beyond the span the shifted copies are disjoint: G = 2 ∫ φ_i φ_j
    let g_inf = g_of_z(x, i, j, 2.0 * span + 1.0);
    acc += g_inf * span.powf(-2.0 * s) / (2.0 * s);
    c * acc
}

/// Largest relative deviation of the assembled stiffness entries from the oracle.
pub fn worst_deviation(nodes: &[f64], s: f64) -> f64 {
    let mesh = Mesh1D::new(nodes.to_vec()).unwrap();
    let k = Kernel::new(1, s).unwrap();
    let g = assemble_1d(&mesh, &k, None).unwrap();
    let n = g.dof_count();
    let mut worst: f64 = 0.0;
    for a in 0..n {
        for b in a..n {
            let o = oracle_entry(nodes, a + 1, b + 1, s, k.constant());
            worst = worst.max(super::rel_err(g.s().get(a, b), o));
        }
    }
    worst
}

pub fn check_mesh(nodes: Vec<f64>, s: f64, tol: f64) -> f64 {
    let worst = worst_deviation(&nodes, s);
    assert!(worst < tol, "s={s}: worst relative deviation {worst:e}");
    worst
}
