//! Galerkin matrices of the nonlocal form: the stiffness-plus-potential
//! matrix `S` of `⟨u,v⟩ = ⟨u,v⟩_H + ∫ V u v` and the mass matrix `M`.

mod one_d;
mod persist;
mod two_d;

use std::sync::{Arc, OnceLock};

use crate::error::{domain, Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{Cholesky, SymMatrix};
use crate::mesh::{FemFunction, Mesh, Mesh1D, TriMesh};
use crate::quadrature::{GaussLegendre, TriangleRule};

pub use one_d::assemble_1d;
pub use persist::{load_system, save_system, SystemFile};
pub use two_d::{assemble_2d, Assembly2dOptions};

/// Potential `V`, sampled at quadrature points.
pub type Potential = dyn Fn([f64; 2]) -> f64 + Send + Sync;

/// Gauss points of one element with the values of the element's basis
/// functions there. Shared by every nonlinear integral.
#[derive(Debug, Clone)]
pub struct QuadTable {
    weights: Vec<f64>,
    points: Vec<[f64; 2]>,
    /// `(dof, φ_dof(point))` for the element vertices; `usize::MAX` marks a
    /// boundary vertex.
    shape: Vec<[(usize, f64); 3]>,
}

pub const NO_DOF: usize = usize::MAX;

/// Points per element in 1D.
const LINE_POINTS: usize = 6;
/// Polynomial degree of the triangle rule in 2D.
const TRIANGLE_DEGREE: usize = 6;

impl QuadTable {
    pub fn new(mesh: &Mesh) -> Self {
        let dofs = mesh.vertex_dofs();
        let dof = |v: usize| dofs[v].unwrap_or(NO_DOF);
        let mut t = QuadTable {
            weights: Vec::new(),
            points: Vec::new(),
            shape: Vec::new(),
        };
        match mesh {
            Mesh::Interval(m) => {
                let g = GaussLegendre::cached(LINE_POINTS);
                let x = m.nodes();
                for e in 0..x.len() - 1 {
                    let h = x[e + 1] - x[e];
                    for (xi, w) in g.nodes.iter().zip(&g.weights) {
                        t.weights.push(w * h);
                        t.points.push([x[e] + xi * h, 0.0]);
                        t.shape.push([(dof(e), 1.0 - xi), (dof(e + 1), *xi), (NO_DOF, 0.0)]);
                    }
                }
            }
            Mesh::Triangles(m) => {
                let rule = TriangleRule::of_degree(TRIANGLE_DEGREE);
                for (k, tri) in m.triangles().iter().enumerate() {
                    let c = m.corners(k);
                    let area2 = 2.0 * m.area(k);
                    for &(l1, l2, w) in &rule.points {
                        let l0 = 1.0 - l1 - l2;
                        t.weights.push(w * area2);
                        t.points.push([
                            l0 * c[0][0] + l1 * c[1][0] + l2 * c[2][0],
                            l0 * c[0][1] + l1 * c[1][1] + l2 * c[2][1],
                        ]);
                        t.shape.push([(dof(tri[0]), l0), (dof(tri[1]), l1), (dof(tri[2]), l2)]);
                    }
                }
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.points
    }

    pub fn shape(&self, q: usize) -> &[(usize, f64); 3] {
        &self.shape[q]
    }

    /// Values of the P1 function with coefficients `c` at every point.
    pub fn values(&self, c: &[f64]) -> Vec<f64> {
        self.shape
            .iter()
            .map(|sh| sh.iter().filter(|(d, _)| *d != NO_DOF).map(|(d, v)| v * c[*d]).sum())
            .collect()
    }

    /// `∫ f(u)`.
    pub fn integrate(&self, c: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        self.values(c).iter().zip(&self.weights).map(|(u, w)| w * f(*u)).sum()
    }

    /// Load vector `b_i = ∫ g(x) φ_i` for point values `g` of length `len()`.
    pub fn load(&self, g: &[f64], dofs: usize) -> Vec<f64> {
        let mut b = vec![0.0; dofs];
        for ((sh, w), gv) in self.shape.iter().zip(&self.weights).zip(g) {
            for &(d, v) in sh {
                if d != NO_DOF {
                    b[d] += w * gv * v;
                }
            }
        }
        b
    }
}

/// `∫ w φ_i φ_j` for a weight given by its values at the table points.
pub(crate) fn weighted_mass(table: &QuadTable, dofs: usize, values: &[f64]) -> SymMatrix {
    let mut out = SymMatrix::zeros(dofs);
    for q in 0..table.len() {
        let wq = values[q] * table.weights[q];
        if wq == 0.0 {
            continue;
        }
        let sh = &table.shape[q];
        for a in 0..3 {
            for b in 0..3 {
                let ((da, va), (db, vb)) = (sh[a], sh[b]);
                if da == NO_DOF || db == NO_DOF || da > db {
                    continue;
                }
                out.add(da, db, wq * va * vb);
            }
        }
    }
    out
}

/// `∫ V φ_i φ_j`.
pub(crate) fn potential_matrix(table: &QuadTable, dofs: usize, v: &Potential) -> SymMatrix {
    let values: Vec<f64> = table.points.iter().map(|&x| v(x)).collect();
    weighted_mass(table, dofs, &values)
}

/// The pair `(S, M)` with the mesh and kernel they were built from.
#[derive(Debug)]
pub struct GramPair {
    s: SymMatrix,
    m: SymMatrix,
    mesh: Arc<Mesh>,
    kernel: Kernel,
    table: QuadTable,
    factor: OnceLock<std::result::Result<Cholesky, (usize, f64)>>,
}

impl Clone for GramPair {
    fn clone(&self) -> Self {
        Self::new(self.s.clone(), self.m.clone(), self.mesh.clone(), self.kernel)
            .expect("cloned matrices are consistent")
    }
}

impl GramPair {
    pub fn new(s: SymMatrix, m: SymMatrix, mesh: Arc<Mesh>, kernel: Kernel) -> Result<Self> {
        let n = mesh.dof_count();
        if s.order() != n || m.order() != n {
            return domain(format!(
                "matrix orders {}/{} do not match {} degrees of freedom",
                s.order(),
                m.order(),
                n
            ));
        }
        let table = QuadTable::new(&mesh);
        Ok(Self {
            s,
            m,
            mesh,
            kernel,
            table,
            factor: OnceLock::new(),
        })
    }

    pub fn s(&self) -> &SymMatrix {
        &self.s
    }

    pub fn m(&self) -> &SymMatrix {
        &self.m
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn table(&self) -> &QuadTable {
        &self.table
    }

    pub fn dof_count(&self) -> usize {
        self.s.order()
    }

    /// Cholesky factor of `S`, computed on first use.
    pub fn factor(&self) -> Result<&Cholesky> {
        match self.factor.get_or_init(|| {
            Cholesky::factor(&self.s).map_err(|e| match e {
                Error::Indefinite { pivot, value } => (pivot, value),
                _ => (0, f64::NAN),
            })
        }) {
            Ok(c) => Ok(c),
            Err((pivot, value)) => Err(Error::Indefinite {
                pivot: *pivot,
                value: *value,
            }),
        }
    }

    /// `S x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        Ok(self.factor()?.solve(b))
    }

    /// Adds `∫ V φ_i φ_j` to `S`.
    pub fn with_potential(mut self, v: &Potential) -> Self {
        let pm = potential_matrix(&self.table, self.dof_count(), v);
        self.s.axpy(1.0, &pm);
        self.factor = OnceLock::new();
        self
    }

    pub fn function(&self, coeffs: Vec<f64>) -> Result<FemFunction> {
        FemFunction::new(self.mesh.clone(), coeffs)
    }

    fn check(&self, u: &FemFunction) -> Result<()> {
        if !u.same_mesh(&self.mesh) {
            return domain("function lives on a different mesh");
        }
        Ok(())
    }

    pub fn h_inner(&self, u: &FemFunction, v: &FemFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.s.bilinear(u.coeffs(), v.coeffs()))
    }

    pub fn l2_inner(&self, u: &FemFunction, v: &FemFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.m.bilinear(u.coeffs(), v.coeffs()))
    }

    pub fn h_norm(&self, u: &FemFunction) -> Result<f64> {
        Ok(self.h_inner(u, u)?.max(0.0).sqrt())
    }

    /// `(∫ |u|^p)^{1/p}` by element Gauss quadrature.
    pub fn lp_norm(&self, u: &FemFunction, p: f64) -> Result<f64> {
        self.check(u)?;
        if !(p >= 1.0) {
            return domain(format!("L^p norm needs p ≥ 1, got {p}"));
        }
        Ok(self.table.integrate(u.coeffs(), |v| v.abs().powf(p)).powf(1.0 / p))
    }
}

pub fn positive_part(u: &FemFunction) -> FemFunction {
    u.positive_part()
}

pub fn negative_part(u: &FemFunction) -> FemFunction {
    u.negative_part()
}

/// Dimension-dispatching assembly with `V ≡ 0`.
pub fn assemble(mesh: Arc<Mesh>, kernel: &Kernel) -> Result<GramPair> {
    match mesh.as_ref() {
        Mesh::Interval(m) => assemble_1d_shared(m, mesh.clone(), kernel),
        Mesh::Triangles(m) => assemble_2d_shared(m, mesh.clone(), kernel, &Assembly2dOptions::default()),
    }
}

pub(crate) fn assemble_1d_shared(m: &Mesh1D, mesh: Arc<Mesh>, kernel: &Kernel) -> Result<GramPair> {
    let (s, mass) = one_d::matrices(m, kernel)?;
    GramPair::new(s, mass, mesh, *kernel)
}

pub(crate) fn assemble_2d_shared(
    m: &TriMesh,
    mesh: Arc<Mesh>,
    kernel: &Kernel,
    opts: &Assembly2dOptions,
) -> Result<GramPair> {
    let (s, mass) = two_d::matrices(m, kernel, opts)?;
    GramPair::new(s, mass, mesh, *kernel)
}
