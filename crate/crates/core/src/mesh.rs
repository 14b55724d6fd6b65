//! Interval partitions and conforming triangulations, with the P1 function
//! space of coefficients on interior nodes (zero on the boundary and outside).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{domain, Result};

/// Partition `x_0 < x_1 < ... < x_{M-1}` of `Ω = (x_0, x_{M-1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
}

impl Mesh1D {
    pub fn new(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return domain(format!("1D mesh needs at least 3 nodes, got {}", nodes.len()));
        }
        if nodes.iter().any(|x| !x.is_finite()) || nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return domain("1D mesh nodes must be finite and strictly increasing");
        }
        Ok(Self { nodes })
    }

    /// Uniform partition of `[a, b]` with `count` nodes.
    pub fn uniform(a: f64, b: f64, count: usize) -> Result<Self> {
        if !(a < b) {
            return domain(format!("interval [{a}, {b}] is empty"));
        }
        if count < 3 {
            return domain(format!("node count {count} < 3"));
        }
        let h = (b - a) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|k| a + k as f64 * h).collect();
        nodes[count - 1] = b;
        Self::new(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    /// Midpoint insertion: `M` nodes become `2M - 1`.
    pub fn refine(&self) -> Self {
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(self.nodes[self.nodes.len() - 1]);
        Self { nodes }
    }
}

/// Conforming triangulation with positively oriented triangles.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    on_boundary: Vec<bool>,
}

pub(crate) fn signed_area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
}

fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl TriMesh {
    /// Validates orientation, index ranges and edge conformity. Negatively
    /// oriented triangles are rejected rather than flipped.
    pub fn new(vertices: Vec<[f64; 2]>, triangles: Vec<[usize; 3]>, boundary: &[usize]) -> Result<Self> {
        let nv = vertices.len();
        if triangles.is_empty() {
            return domain("triangulation has no triangles");
        }
        for t in &triangles {
            if t.iter().any(|&v| v >= nv) {
                return domain(format!("triangle {t:?} references a missing vertex"));
            }
            let area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
            if !(area > 0.0) {
                return domain(format!("triangle {t:?} has non-positive signed area {area}"));
            }
        }
        let mut edges: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &triangles {
            for k in 0..3 {
                *edges.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        if let Some((e, _)) = edges.iter().find(|(_, &c)| c > 2) {
            return domain(format!("edge {e:?} shared by more than two triangles"));
        }
        let mut on_boundary = vec![false; nv];
        for &b in boundary {
            if b >= nv {
                return domain(format!("boundary index {b} out of range"));
            }
            on_boundary[b] = true;
        }
        Ok(Self {
            vertices,
            triangles,
            on_boundary,
        })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.on_boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.on_boundary[v]).collect()
    }

    pub fn interior_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| !self.on_boundary[v]).collect()
    }

    pub fn corners(&self, t: usize) -> [[f64; 2]; 3] {
        let tri = self.triangles[t];
        [self.vertices[tri[0]], self.vertices[tri[1]], self.vertices[tri[2]]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    /// Edges owned by a single triangle, oriented so that `Ω` lies on the left.
    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *count.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut out = Vec::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                if count[&edge_key(a, b)] == 1 {
                    out.push((a, b));
                }
            }
        }
        out
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max(((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt());
            }
        }
        d
    }

    /// Regular 1-to-4 split. `place` positions each new edge midpoint and is
    /// told whether the edge lies on the boundary.
    pub fn refine_with(&self, place: impl Fn([f64; 2], bool) -> [f64; 2]) -> Self {
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                *count.entry(edge_key(t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        let mut vertices = self.vertices.clone();
        let mut on_boundary = self.on_boundary.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let mut m = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                let key = edge_key(a, b);
                m[k] = *mid.entry(key).or_insert_with(|| {
                    let (pa, pb) = (self.vertices[a], self.vertices[b]);
                    let boundary_edge = count[&key] == 1;
                    let p = place([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])], boundary_edge);
                    vertices.push(p);
                    on_boundary.push(boundary_edge);
                    vertices.len() - 1
                });
            }
            // m[0] on (t0,t1), m[1] on (t1,t2), m[2] on (t2,t0)
            triangles.push([t[0], m[0], m[2]]);
            triangles.push([m[0], t[1], m[1]]);
            triangles.push([m[2], m[1], t[2]]);
            triangles.push([m[0], m[1], m[2]]);
        }
        Self {
            vertices,
            triangles,
            on_boundary,
        }
    }

    pub fn refine(&self) -> Self {
        self.refine_with(|p, _| p)
    }

    /// Barycentric coordinates of `x` in triangle `t`.
    pub fn barycentric(&self, t: usize, x: [f64; 2]) -> [f64; 3] {
        let [a, b, c] = self.corners(t);
        let area = signed_area(a, b, c);
        [
            signed_area(x, b, c) / area,
            signed_area(a, x, c) / area,
            signed_area(a, b, x) / area,
        ]
    }

    /// Triangle containing `x` (closed), if any.
    pub fn locate(&self, x: [f64; 2], tol: f64) -> Option<(usize, [f64; 3])> {
        (0..self.triangles.len()).find_map(|t| {
            let l = self.barycentric(t, x);
            l.iter().all(|&v| v >= -tol).then_some((t, l))
        })
    }
}

/// Regular hexagon fan around the origin, refined `level` times with new
/// boundary vertices projected onto the circle of radius `radius`.
pub fn make_disk_mesh(radius: f64, level: usize) -> Result<TriMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return domain(format!("disk radius {radius} must be positive"));
    }
    let mut vertices = vec![[0.0, 0.0]];
    for k in 0..6 {
        let a = k as f64 * PI / 3.0;
        vertices.push([radius * a.cos(), radius * a.sin()]);
    }
    let triangles = (0..6).map(|k| [0, 1 + k, 1 + (k + 1) % 6]).collect();
    let mut mesh = TriMesh::new(vertices, triangles, &[1, 2, 3, 4, 5, 6])?;
    for _ in 0..level {
        mesh = mesh.refine_with(|p, boundary| {
            if boundary {
                let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
                [p[0] * radius / r, p[1] * radius / r]
            } else {
                p
            }
        });
    }
    Ok(mesh)
}

pub fn make_interval_mesh(a: f64, b: f64, count: usize) -> Result<Mesh1D> {
    Mesh1D::uniform(a, b, count)
}

/// A mesh of either dimension together with its interior-node numbering.
#[derive(Debug, Clone, PartialEq)]
pub enum Mesh {
    Interval(Mesh1D),
    Triangles(TriMesh),
}

impl From<Mesh1D> for Mesh {
    fn from(m: Mesh1D) -> Self {
        Mesh::Interval(m)
    }
}

impl From<TriMesh> for Mesh {
    fn from(m: TriMesh) -> Self {
        Mesh::Triangles(m)
    }
}

impl Mesh {
    pub fn dim(&self) -> usize {
        match self {
            Mesh::Interval(_) => 1,
            Mesh::Triangles(_) => 2,
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Mesh::Interval(m) => m.node_count(),
            Mesh::Triangles(m) => m.vertices.len(),
        }
    }

    /// Vertex index of every degree of freedom, in dof order.
    pub fn dof_vertices(&self) -> Vec<usize> {
        match self {
            Mesh::Interval(m) => (1..m.node_count() - 1).collect(),
            Mesh::Triangles(m) => m.interior_vertices(),
        }
    }

    pub fn dof_count(&self) -> usize {
        match self {
            Mesh::Interval(m) => m.node_count() - 2,
            Mesh::Triangles(m) => m.on_boundary.iter().filter(|b| !**b).count(),
        }
    }

    /// `vertex -> dof` lookup.
    pub fn vertex_dofs(&self) -> Vec<Option<usize>> {
        let mut map = vec![None; self.vertex_count()];
        for (d, v) in self.dof_vertices().into_iter().enumerate() {
            map[v] = Some(d);
        }
        map
    }

    pub fn vertex_point(&self, v: usize) -> [f64; 2] {
        match self {
            Mesh::Interval(m) => [m.nodes[v], 0.0],
            Mesh::Triangles(m) => m.vertices[v],
        }
    }

    pub fn refine(&self) -> Mesh {
        match self {
            Mesh::Interval(m) => Mesh::Interval(m.refine()),
            Mesh::Triangles(m) => Mesh::Triangles(m.refine()),
        }
    }

    pub fn measure(&self) -> f64 {
        match self {
            Mesh::Interval(m) => {
                let (a, b) = m.bounds();
                b - a
            }
            Mesh::Triangles(m) => m.total_area(),
        }
    }

    /// Nodal interpolant of `f` (values at interior vertices).
    pub fn interpolate(&self, f: impl Fn([f64; 2]) -> f64) -> Vec<f64> {
        self.dof_vertices()
            .into_iter()
            .map(|v| f(self.vertex_point(v)))
            .collect()
    }

    /// Evaluates the P1 function with interior coefficients `coeffs` at `x`;
    /// zero outside the mesh.
    pub fn evaluate(&self, coeffs: &[f64], x: [f64; 2]) -> f64 {
        let dofs = self.vertex_dofs();
        let val = |v: usize| dofs[v].map_or(0.0, |d| coeffs[d]);
        match self {
            Mesh::Interval(m) => {
                let nodes = &m.nodes;
                let t = x[0];
                let (a, b) = m.bounds();
                if t < a || t > b {
                    return 0.0;
                }
                let k = match nodes.binary_search_by(|p| p.total_cmp(&t)) {
                    Ok(k) => return val(k),
                    Err(k) => k - 1,
                };
                let w = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
                (1.0 - w) * val(k) + w * val(k + 1)
            }
            Mesh::Triangles(m) => match m.locate(x, 1e-12) {
                Some((t, l)) => {
                    let tri = m.triangles[t];
                    (0..3).map(|k| l[k] * val(tri[k])).sum()
                }
                None => 0.0,
            },
        }
    }

    /// Prolongation of coarse coefficients onto `self.refine()` (exact for
    /// nested P1 spaces).
    pub fn prolongate(&self, coeffs: &[f64]) -> Vec<f64> {
        let fine = self.refine();
        fine.interpolate(|x| self.evaluate(coeffs, x))
    }
}

/// A P1 function: one coefficient per interior node, zero elsewhere.
#[derive(Debug, Clone)]
pub struct FemFunction {
    mesh: Arc<Mesh>,
    coeffs: Vec<f64>,
}

impl FemFunction {
    pub fn new(mesh: Arc<Mesh>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != mesh.dof_count() {
            return domain(format!(
                "{} coefficients for {} interior nodes",
                coeffs.len(),
                mesh.dof_count()
            ));
        }
        Ok(Self { mesh, coeffs })
    }

    pub fn zeros(mesh: Arc<Mesh>) -> Self {
        let n = mesh.dof_count();
        Self {
            mesh,
            coeffs: vec![0.0; n],
        }
    }

    pub fn interpolate(mesh: Arc<Mesh>, f: impl Fn([f64; 2]) -> f64) -> Self {
        let coeffs = mesh.interpolate(f);
        Self { mesh, coeffs }
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), self.coeffs.len());
        Self {
            mesh: self.mesh.clone(),
            coeffs,
        }
    }

    pub fn same_mesh(&self, other: &Arc<Mesh>) -> bool {
        Arc::ptr_eq(&self.mesh, other) || *self.mesh == **other
    }

    pub fn scaled(&self, t: f64) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|c| t * c).collect())
    }

    /// `self + t * other`.
    pub fn add_scaled(&self, t: f64, other: &FemFunction) -> Self {
        self.with_coeffs(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    /// Nodal clamping `max(u, 0)`; stays in the P1 space.
    pub fn positive_part(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|&c| c.max(0.0)).collect())
    }

    /// Nodal clamping `min(u, 0)`.
    pub fn negative_part(&self) -> Self {
        self.with_coeffs(self.coeffs.iter().map(|&c| c.min(0.0)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_sign_changing(&self) -> bool {
        self.coeffs.iter().any(|&c| c > 0.0) && self.coeffs.iter().any(|&c| c < 0.0)
    }

    pub fn max(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, &c| m.max(c))
    }

    pub fn min(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, &c| m.min(c))
    }

    pub fn evaluate(&self, x: [f64; 2]) -> f64 {
        self.mesh.evaluate(&self.coeffs, x)
    }
}
