//! 1D stiffness matrix from closed-form elementary integrals.
//!
//! `⟨φ_i, φ_j⟩_H` is a sum over pairs of pieces of the real line: the
//! elements touching `supp φ_i ∪ supp φ_j`, plus the two half-lines left
//! over. On a half-line both basis functions vanish, so only elements of
//! `supp φ_i ∩ supp φ_j` interact with it, through `φ_i φ_j (x)` alone.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::kernel::{Kernel, RadialKernel};
use crate::linalg::SymMatrix;
use crate::mesh::{Mesh, Mesh1D};
use crate::quadrature::elem1d::wedge_integral;
use crate::quadrature::same_interval_integral;

use super::{potential_matrix, GramPair, Potential, QuadTable};

/// Values of the hat function of node `i` at the ends of element `e`.
fn hat_on(i: usize, e: usize) -> (f64, f64) {
    ((e == i) as u8 as f64, (e + 1 == i) as u8 as f64)
}

/// Coefficients of `(c0 + c1 ξ + c2 η)(d0 + d1 ξ + d2 η)`.
fn product(c: [f64; 3], d: [f64; 3]) -> [[f64; 3]; 3] {
    let mut r = [[0.0; 3]; 3];
    r[0][0] = c[0] * d[0];
    r[1][0] = c[0] * d[1] + c[1] * d[0];
    r[0][1] = c[0] * d[2] + c[2] * d[0];
    r[2][0] = c[1] * d[1];
    r[1][1] = c[1] * d[2] + c[2] * d[1];
    r[0][2] = c[2] * d[2];
    r
}

fn is_zero(r: &[[f64; 3]; 3]) -> bool {
    r.iter().flatten().all(|&v| v == 0.0)
}

/// `⟨φ_i, φ_j⟩_H` for interior nodes `i ≤ j`.
fn stiffness_entry(x: &[f64], i: usize, j: usize, kernel: &Kernel) -> Result<f64> {
    let gamma = kernel.gamma();
    let half_c = kernel.prefactor();
    let mut elems = vec![i - 1, i, j - 1, j];
    elems.sort_unstable();
    elems.dedup();
    let h = |e: usize| x[e + 1] - x[e];
    let mut total = 0.0;

    for (k, &e1) in elems.iter().enumerate() {
        // same element: φ(x) - φ(y) = slope · (x - y)
        let slope = |n: usize| {
            let (fa, fb) = hat_on(n, e1);
            (fb - fa) / h(e1)
        };
        let ss = slope(i) * slope(j);
        if ss != 0.0 {
            total += ss * half_c * same_interval_integral(h(e1), gamma)?;
        }
        for &e2 in &elems[k + 1..] {
            // x ∈ e1 with ξ = x_{e1+1} - x, y ∈ e2 with η = y - x_{e2}
            let diff = |n: usize| {
                let (fa, fb) = hat_on(n, e1);
                let (gc, gd) = hat_on(n, e2);
                [fb - gc, (fa - fb) / h(e1), -(gd - gc) / h(e2)]
            };
            let r = product(diff(i), diff(j));
            if is_zero(&r) {
                continue;
            }
            let gap = x[e2] - x[e1 + 1];
            total += 2.0 * half_c * wedge_integral(h(e1), h(e2), gap, gamma, &r)?;
        }
    }

    // exterior of supp φ_i ∪ supp φ_j
    let (left, right) = (x[elems[0]], x[elems[elems.len() - 1] + 1]);
    for e in [i - 1, i] {
        if e != j - 1 && e != j {
            continue;
        }
        let (fa, fb) = hat_on(i, e);
        let (ga, gb) = hat_on(j, e);
        let he = h(e);
        // y-range to the left: η = x - x_e
        let mut r = [[0.0; 3]; 3];
        let (p, q) = ([fa, (fb - fa) / he, 0.0], [ga, (gb - ga) / he, 0.0]);
        let pq = product(p, q);
        for k in 0..3 {
            r[0][k] = pq[k][0];
        }
        total += 2.0 * half_c * wedge_integral(f64::INFINITY, he, x[e] - left, gamma, &r)?;
        // to the right: ξ = x_{e+1} - x
        let (p, q) = ([fb, (fa - fb) / he, 0.0], [gb, (ga - gb) / he, 0.0]);
        let r = product(p, q);
        total += 2.0 * half_c * wedge_integral(he, f64::INFINITY, right - x[e + 1], gamma, &r)?;
    }
    Ok(total)
}

pub(super) fn matrices(mesh: &Mesh1D, kernel: &Kernel) -> Result<(SymMatrix, SymMatrix)> {
    if kernel.dim() != 1 {
        return domain("1D assembly needs a 1D kernel");
    }
    let x = mesh.nodes();
    let n = x.len() - 2;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|a| (a..n).map(|b| stiffness_entry(x, a + 1, b + 1, kernel)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let mut s = SymMatrix::zeros(n);
    for (a, row) in rows.into_iter().enumerate() {
        s.upper_row_mut(a).copy_from_slice(&row);
    }
    let mut m = SymMatrix::zeros(n);
    for a in 0..n {
        let i = a + 1;
        m.set(a, a, (x[i + 1] - x[i - 1]) / 3.0);
        if a + 1 < n {
            m.set(a, a + 1, (x[i + 1] - x[i]) / 6.0);
        }
    }
    Ok((s, m))
}

/// Gram pair on an interval mesh; `v` adds `∫ V φ_i φ_j` to the stiffness.
pub fn assemble_1d(mesh: &Mesh1D, kernel: &Kernel, v: Option<&Potential>) -> Result<GramPair> {
    let (mut s, m) = matrices(mesh, kernel)?;
    let shared = std::sync::Arc::new(Mesh::from(mesh.clone()));
    if let Some(v) = v {
        let table = QuadTable::new(&shared);
        s.axpy(1.0, &potential_matrix(&table, m.order(), v));
    }
    GramPair::new(s, m, shared, *kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_interval_mesh;

    #[test]
    fn far_entries_negative_and_symmetric_mesh_symmetric() {
        let mesh = make_interval_mesh(-1.0, 1.0, 10).unwrap();
        let k = Kernel::new(1, 0.5).unwrap();
        let g = assemble_1d(&mesh, &k, None).unwrap();
        let s = g.s();
        let n = s.order();
        for i in 0..n {
            assert!(s.get(i, i) > 0.0);
            for j in i + 2..n {
                assert!(s.get(i, j) < 0.0, "{i} {j}");
            }
            for j in 0..n {
                let r = s.get(n - 1 - i, n - 1 - j);
                assert!((s.get(i, j) - r).abs() < 1e-12 * s.get(0, 0));
            }
        }
        assert!(g.factor().is_ok());
    }

    #[test]
    fn constant_potential_adds_mass() {
        let mesh = make_interval_mesh(-1.0, 1.0, 10).unwrap();
        let k = Kernel::new(1, 0.3).unwrap();
        let g0 = assemble_1d(&mesh, &k, None).unwrap();
        let g1 = assemble_1d(&mesh, &k, Some(&|_| 2.5)).unwrap();
        let n = g0.dof_count();
        for i in 0..n {
            for j in i..n {
                let d = g1.s().get(i, j) - g0.s().get(i, j) - 2.5 * g0.m().get(i, j);
                assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hat_norm_scales_like_h_power() {
        // ‖φ(·/h)‖_H² = h^{1-2s} ‖φ‖_H² on the whole line
        for sv in [0.25, 0.5, 0.8] {
            let k = Kernel::new(1, sv).unwrap();
            let diag = |count: usize| {
                let mesh = make_interval_mesh(-1.0, 1.0, count).unwrap();
                let g = assemble_1d(&mesh, &k, None).unwrap();
                g.s().get(count / 2 - 1, count / 2 - 1)
            };
            let (a, b) = (diag(17), diag(33));
            assert!((b / a - 0.5f64.powf(1.0 - 2.0 * sv)).abs() < 1e-12, "{sv}");
        }
    }
}
