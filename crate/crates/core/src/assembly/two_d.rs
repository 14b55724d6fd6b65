//! 2D stiffness matrix on triangulations.
//!
//! `⟨φ_a, φ_b⟩_H = ∫_Ω∫_Ω d_a d_b K + 2 ∫_Ω φ_a φ_b κ`, with
//! `d_a(x, y) = φ_a(x) - φ_a(y)` and `κ` the exterior integral of `K`.
//! The outer variable `y` runs over edge midpoints (the rule exact for
//! quadratics on each triangle). For fixed `y` and an inner triangle `T`,
//! `d_a = c_a + g_a·(x - y)` is affine on `T`, so the inner integral only
//! needs the moments `∫_T K`, `∫_T r K`, `∫_T r rᵀ K` with `r = x - y`.
//! When `y` lies on `∂T` all `c_a` vanish and the remaining second moment
//! is computed by generalized Duffy quadrature on right triangles.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::kernel::{Kernel, RadialKernel};
use crate::linalg::SymMatrix;
use crate::mesh::{signed_area, Mesh, TriMesh};
use crate::quadrature::{
    duffy_moments, exterior_integral, split_right_triangles, DuffyRule, Point, TriangleRule, DEFAULT_DUFFY_ORDER,
};

use super::{potential_matrix, weighted_mass, GramPair, Potential, QuadTable, NO_DOF};

#[derive(Debug, Clone)]
pub struct Assembly2dOptions {
    /// Points per direction of the Duffy tensor rule.
    pub duffy_order: usize,
    /// A sub-triangle is integrated directly once its distance to the
    /// outer point exceeds this many of its diameters.
    pub separation: f64,
    /// Conical-product points per direction on regular sub-triangles.
    pub inner_points: usize,
    /// Truncation radius for the exterior integral, in domain diameters.
    pub exterior_radius: f64,
}

impl Default for Assembly2dOptions {
    fn default() -> Self {
        Self {
            duffy_order: DEFAULT_DUFFY_ORDER,
            separation: 1.0,
            inner_points: 6,
            exterior_radius: 5.0,
        }
    }
}

const MAX_DEPTH: usize = 12;
const CHUNKS: usize = 64;

fn point_segment_distance(y: Point, a: Point, b: Point) -> f64 {
    let e = [b[0] - a[0], b[1] - a[1]];
    let t = (((y[0] - a[0]) * e[0] + (y[1] - a[1]) * e[1]) / (e[0] * e[0] + e[1] * e[1])).clamp(0.0, 1.0);
    let d = [a[0] + t * e[0] - y[0], a[1] + t * e[1] - y[1]];
    (d[0] * d[0] + d[1] * d[1]).sqrt()
}

fn distance_to_triangle(y: Point, c: &[Point; 3]) -> f64 {
    let inside = {
        let s0 = signed_area(y, c[0], c[1]);
        let s1 = signed_area(y, c[1], c[2]);
        let s2 = signed_area(y, c[2], c[0]);
        (s0 >= 0.0 && s1 >= 0.0 && s2 >= 0.0) || (s0 <= 0.0 && s1 <= 0.0 && s2 <= 0.0)
    };
    if inside {
        return 0.0;
    }
    (0..3)
        .map(|k| point_segment_distance(y, c[k], c[(k + 1) % 3]))
        .fold(f64::INFINITY, f64::min)
}

fn diameter(c: &[Point; 3]) -> f64 {
    let d = |a: Point, b: Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    d(c[0], c[1]).max(d(c[1], c[2])).max(d(c[2], c[0]))
}

/// `[∫ |r|^{-γ}, ∫ r_x |r|^{-γ}, ∫ r_y |r|^{-γ}, ∫ r_x² .., ∫ r_x r_y .., ∫ r_y² ..]`
/// over `T` with `r = x - y`, for `y` outside the closed triangle.
fn regular_moments(y: Point, c: [Point; 3], gamma: f64, rule: &TriangleRule, opts: &Assembly2dOptions, depth: usize) -> [f64; 6] {
    let dist = distance_to_triangle(y, &c);
    if depth < MAX_DEPTH && dist < opts.separation * diameter(&c) {
        let mid = |a: Point, b: Point| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        let (m0, m1, m2) = (mid(c[0], c[1]), mid(c[1], c[2]), mid(c[2], c[0]));
        let mut out = [0.0; 6];
        for sub in [[c[0], m0, m2], [m0, c[1], m1], [m2, m1, c[2]], [m0, m1, m2]] {
            let part = regular_moments(y, sub, gamma, rule, opts, depth + 1);
            for k in 0..6 {
                out[k] += part[k];
            }
        }
        return out;
    }
    let area2 = (signed_area(c[0], c[1], c[2]) * 2.0).abs();
    let mut out = [0.0; 6];
    for &(l1, l2, w) in &rule.points {
        let l0 = 1.0 - l1 - l2;
        let r = [
            l0 * c[0][0] + l1 * c[1][0] + l2 * c[2][0] - y[0],
            l0 * c[0][1] + l1 * c[1][1] + l2 * c[2][1] - y[1],
        ];
        let k = w * area2 * (r[0] * r[0] + r[1] * r[1]).powf(-0.5 * gamma);
        out[0] += k;
        out[1] += k * r[0];
        out[2] += k * r[1];
        out[3] += k * r[0] * r[0];
        out[4] += k * r[0] * r[1];
        out[5] += k * r[1] * r[1];
    }
    out
}

/// Gradients of the three barycentric coordinates of `c`.
fn barycentric_gradients(c: &[Point; 3]) -> [[f64; 2]; 3] {
    let a2 = 2.0 * signed_area(c[0], c[1], c[2]);
    let g = |p: Point, q: Point| [(p[1] - q[1]) / a2, (q[0] - p[0]) / a2];
    [g(c[1], c[2]), g(c[2], c[0]), g(c[0], c[1])]
}

struct OuterPoint {
    y: Point,
    weight: f64,
    ends: [usize; 2],
    /// Triangles having this edge.
    owners: Vec<usize>,
}

fn outer_points(mesh: &TriMesh) -> Vec<OuterPoint> {
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut out: Vec<OuterPoint> = Vec::new();
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let w = mesh.area(t) / 3.0;
        for k in 0..3 {
            let (a, b) = (tri[k], tri[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            let id = *index.entry(key).or_insert_with(|| {
                let (pa, pb) = (mesh.vertices()[a], mesh.vertices()[b]);
                out.push(OuterPoint {
                    y: [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])],
                    weight: 0.0,
                    ends: [key.0, key.1],
                    owners: Vec::new(),
                });
                out.len() - 1
            });
            out[id].weight += w;
            out[id].owners.push(t);
        }
    }
    out
}

pub(super) fn matrices(mesh: &TriMesh, kernel: &Kernel, opts: &Assembly2dOptions) -> Result<(SymMatrix, SymMatrix)> {
    if kernel.dim() != 2 {
        return domain("2D assembly needs a 2D kernel");
    }
    let wrapped = Mesh::from(mesh.clone());
    let dofs = wrapped.vertex_dofs();
    let n = wrapped.dof_count();
    let dof = |v: usize| dofs[v].unwrap_or(NO_DOF);
    let duffy = DuffyRule::new(kernel.s(), opts.duffy_order)?;
    let rule = TriangleRule::new(opts.inner_points);
    let gamma = kernel.gamma();
    let half_c = kernel.prefactor();
    let tris = mesh.triangles();
    let corners: Vec<[Point; 3]> = (0..tris.len()).map(|t| mesh.corners(t)).collect();
    let grads: Vec<[[f64; 2]; 3]> = corners.iter().map(barycentric_gradients).collect();
    let outer = outer_points(mesh);

    let chunk = outer.len().div_ceil(CHUNKS).max(1);
    let partials: Vec<SymMatrix> = outer
        .par_chunks(chunk)
        .map(|pts| -> Result<SymMatrix> {
            let mut s = SymMatrix::zeros(n);
            for op in pts {
                for (t, tri) in tris.iter().enumerate() {
                    // local dofs: vertices of T, then the edge ends
                    let mut ids: Vec<usize> = Vec::with_capacity(5);
                    let mut cs: Vec<f64> = Vec::with_capacity(5);
                    let mut gs: Vec<[f64; 2]> = Vec::with_capacity(5);
                    let singular = op.owners.contains(&t);
                    let bary = if singular { [0.0; 3] } else { mesh.barycentric(t, op.y) };
                    for k in 0..3 {
                        let d = dof(tri[k]);
                        if d == NO_DOF {
                            continue;
                        }
                        let on_edge = op.ends.contains(&tri[k]);
                        ids.push(d);
                        cs.push(if singular { 0.0 } else { bary[k] - if on_edge { 0.5 } else { 0.0 } });
                        gs.push(grads[t][k]);
                    }
                    for &v in &op.ends {
                        let d = dof(v);
                        if d == NO_DOF || tri.contains(&v) {
                            continue;
                        }
                        ids.push(d);
                        cs.push(-0.5);
                        gs.push([0.0, 0.0]);
                    }
                    if ids.is_empty() {
                        continue;
                    }
                    let w = op.weight * half_c;
                    if singular {
                        let mut m2 = [0.0; 3];
                        for part in split_right_triangles(corners[t], op.y)? {
                            let m = duffy_moments(part.y, part.q, part.p, &duffy)?;
                            for k in 0..3 {
                                m2[k] += part.sign * m[k];
                            }
                        }
                        for a in 0..ids.len() {
                            for b in 0..ids.len() {
                                if ids[a] > ids[b] {
                                    continue;
                                }
                                let (ga, gb) = (gs[a], gs[b]);
                                let v = ga[0] * gb[0] * m2[0] + (ga[0] * gb[1] + ga[1] * gb[0]) * m2[1] + ga[1] * gb[1] * m2[2];
                                s.add(ids[a], ids[b], w * v);
                            }
                        }
                    } else {
                        let m = regular_moments(op.y, corners[t], gamma, &rule, opts, 0);
                        for a in 0..ids.len() {
                            for b in 0..ids.len() {
                                if ids[a] > ids[b] {
                                    continue;
                                }
                                let (ca, cb, ga, gb) = (cs[a], cs[b], gs[a], gs[b]);
                                let v = ca * cb * m[0]
                                    + ca * (gb[0] * m[1] + gb[1] * m[2])
                                    + cb * (ga[0] * m[1] + ga[1] * m[2])
                                    + ga[0] * gb[0] * m[3]
                                    + (ga[0] * gb[1] + ga[1] * gb[0]) * m[4]
                                    + ga[1] * gb[1] * m[5];
                                s.add(ids[a], ids[b], w * v);
                            }
                        }
                    }
                }
            }
            Ok(s)
        })
        .collect::<Result<_>>()?;
    let mut s = SymMatrix::zeros(n);
    for p in &partials {
        s.axpy(1.0, p);
    }

    // 2 ∫ φ_a φ_b κ
    let table = QuadTable::new(&wrapped);
    let radius = opts.exterior_radius * mesh.diameter();
    let kappa: Vec<f64> = table
        .points()
        .par_iter()
        .map(|&x| {
            let far = mesh
                .vertices()
                .iter()
                .map(|v| ((v[0] - x[0]).powi(2) + (v[1] - x[1]).powi(2)).sqrt())
                .fold(0.0, f64::max);
            exterior_integral(x, mesh, kernel, radius.max(1.01 * far))
        })
        .collect::<Result<_>>()?;
    let ext = weighted_mass(&table, n, &kappa);
    s.axpy(2.0, &ext);

    let mut m = SymMatrix::zeros(n);
    for (t, tri) in tris.iter().enumerate() {
        let area = mesh.area(t);
        for a in 0..3 {
            for b in 0..3 {
                let (da, db) = (dof(tri[a]), dof(tri[b]));
                if da == NO_DOF || db == NO_DOF || da > db {
                    continue;
                }
                m.add(da, db, if a == b { area / 6.0 } else { area / 12.0 });
            }
        }
    }
    Ok((s, m))
}

/// Gram pair on a triangulation; `v` adds `∫ V φ_i φ_j` to the stiffness.
pub fn assemble_2d(mesh: &TriMesh, kernel: &Kernel, v: Option<&Potential>, opts: &Assembly2dOptions) -> Result<GramPair> {
    let (mut s, m) = matrices(mesh, kernel, opts)?;
    let shared = std::sync::Arc::new(Mesh::from(mesh.clone()));
    if let Some(v) = v {
        let table = QuadTable::new(&shared);
        s.axpy(1.0, &potential_matrix(&table, m.order(), v));
    }
    GramPair::new(s, m, shared, *kernel)
}
