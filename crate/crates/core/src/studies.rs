//! Numerical experiments built on the solver: convergence against the
//! explicit torsion solution, Table-1 style characteristics of ground
//! states and nodal solutions, and symmetry diagnostics.

use std::sync::Arc;

use rayon::prelude::*;
use statrs::function::gamma::gamma;

use crate::assembly::{assemble, GramPair};
use crate::error::{domain, Result};
use crate::kernel::Kernel;
use crate::mesh::{make_interval_mesh, FemFunction, Mesh};
use crate::quadrature::GaussLegendre;
use crate::solver::{modified_mountain_pass, mountain_pass, solve_linear, SolveReport};
use crate::variational::ProblemSpec;

/// Constant of the solution of `(-Δ)^s u = 1` on the unit ball of `ℝ^N`:
/// `u*(x) = c (1 - |x|²)^s`.
pub fn torsion_constant(dim: usize, s: f64) -> f64 {
    let n2 = dim as f64 / 2.0;
    2f64.powf(-2.0 * s) * gamma(n2) / (gamma(n2 + s) * gamma(1.0 + s))
}

/// `u*(x) = c_{N,s} (R² - |x|²)^s` on `B(0,R)`, zero outside.
pub fn explicit_solution(dim: usize, s: f64, radius: f64, x: [f64; 2]) -> f64 {
    let r2 = x[0] * x[0] + x[1] * x[1];
    if r2 >= radius * radius {
        return 0.0;
    }
    torsion_constant(dim, s) * (radius * radius - r2).powf(s)
}

/// `∫_{-1}^{1} u*` in 1D.
pub fn torsion_integral_1d(s: f64) -> f64 {
    torsion_constant(1, s) * std::f64::consts::PI.sqrt() * gamma(s + 1.0) / gamma(s + 1.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub nodes: usize,
    /// `‖I u* - u_M‖_H` on the once-refined mesh.
    pub h_error: f64,
    /// `(∫u* - ∫u_M)^{1/2}`, exact by Galerkin orthogonality up to
    /// assembly accuracy.
    pub h_error_galerkin: f64,
    pub l2_error: f64,
    pub center_value: f64,
}

#[derive(Debug, Clone)]
pub struct ConvergenceTable {
    pub s: f64,
    pub rows: Vec<ConvergenceRow>,
    pub h_slope: f64,
    pub h_slope_galerkin: f64,
    pub l2_slope: f64,
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// `|u - u*|₂` on `(-1, 1)`; the two boundary elements, where `u*` has a
/// `(1 - |x|)^s` singularity, get a graded composite rule.
pub fn l2_error_1d(mesh: &Mesh, u: &[f64], s: f64) -> f64 {
    let Mesh::Interval(m) = mesh else {
        panic!("l2_error_1d needs an interval mesh")
    };
    let x = m.nodes();
    let g = GaussLegendre::cached(8);
    let ne = x.len() - 1;
    let exact = |t: f64| explicit_solution(1, s, 1.0, [t, 0.0]);
    let dofs = |k: usize| if k == 0 || k == ne { 0.0 } else { u[k - 1] };
    let mut total = 0.0;
    for e in 0..ne {
        let (a, b) = (x[e], x[e + 1]);
        let (ua, ub) = (dofs(e), dofs(e + 1));
        let f = |t: f64| {
            let w = (t - a) / (b - a);
            let d = (1.0 - w) * ua + w * ub - exact(t);
            d * d
        };
        if e == 0 || e == ne - 1 {
            // geometric grading towards the boundary node
            let mut acc = 0.0;
            let (edge, inner) = if e == 0 { (a, b) } else { (b, a) };
            let mut hi = 1.0;
            for _ in 0..40 {
                let lo = hi * 0.5;
                let (p, q) = (edge + lo * (inner - edge), edge + hi * (inner - edge));
                acc += g.integrate(p.min(q), p.max(q), f);
                hi = lo;
            }
            total += acc;
        } else {
            total += g.integrate(a, b, f);
        }
    }
    total.sqrt()
}

fn convergence_row(s: f64, nodes: usize) -> Result<ConvergenceRow> {
    let kernel = Kernel::new(1, s)?;
    let mesh = Arc::new(Mesh::from(make_interval_mesh(-1.0, 1.0, nodes)?));
    let gram = assemble(mesh.clone(), &kernel)?;
    let u = solve_linear(&gram, |_| 1.0)?;
    let fine = Arc::new(mesh.refine());
    let fine_gram = assemble(fine.clone(), &kernel)?;
    let interp = fine.interpolate(|x| explicit_solution(1, s, 1.0, x));
    let prolong = mesh.prolongate(u.coeffs());
    let diff: Vec<f64> = interp.iter().zip(&prolong).map(|(a, b)| a - b).collect();
    let h_error = fine_gram.s().bilinear(&diff, &diff).max(0.0).sqrt();
    let integral_u = gram.table().integrate(u.coeffs(), |v| v);
    let h_error_galerkin = (torsion_integral_1d(s) - integral_u).max(0.0).sqrt();
    Ok(ConvergenceRow {
        nodes,
        h_error,
        h_error_galerkin,
        l2_error: l2_error_1d(&mesh, u.coeffs(), s),
        center_value: u.evaluate([0.0, 0.0]),
    })
}

/// `(-Δ)^s u = 1` on `(-1, 1)` for each node count.
pub fn convergence_study(s: f64, sizes: &[usize]) -> Result<ConvergenceTable> {
    if sizes.len() < 2 {
        return domain("a convergence study needs at least two mesh sizes");
    }
    let rows = sizes
        .par_iter()
        .map(|&m| convergence_row(s, m))
        .collect::<Result<Vec<_>>>()?;
    let m: Vec<f64> = rows.iter().map(|r| r.nodes as f64).collect();
    let col = |f: fn(&ConvergenceRow) -> f64| rows.iter().map(f).collect::<Vec<f64>>();
    Ok(ConvergenceTable {
        s,
        h_slope: loglog_slope(&m, &col(|r| r.h_error)),
        h_slope_galerkin: loglog_slope(&m, &col(|r| r.h_error_galerkin)),
        l2_slope: loglog_slope(&m, &col(|r| r.l2_error)),
        rows,
    })
}

#[derive(Debug, Clone)]
pub struct TableRow {
    pub s: f64,
    pub ground: SolveReport,
    pub nodal: SolveReport,
}

impl TableRow {
    pub fn ground_energy(&self) -> f64 {
        self.ground.energy
    }
    pub fn ground_max(&self) -> f64 {
        self.ground.solution.max()
    }
    pub fn nodal_energy(&self) -> f64 {
        self.nodal.energy
    }
    pub fn nodal_max(&self) -> f64 {
        self.nodal.solution.max()
    }
    pub fn nodal_min(&self) -> f64 {
        self.nodal.solution.min()
    }
}

/// Interval problems on `(-1, 1)` with `V = 0`.
pub fn interval_problem(s: f64, p: f64, nodes: usize) -> Result<ProblemSpec> {
    let mesh = Arc::new(Mesh::from(make_interval_mesh(-1.0, 1.0, nodes)?));
    let gram = Arc::new(assemble(mesh, &Kernel::new(1, s)?)?);
    ProblemSpec::new(gram, p, 1.0)
}

pub fn ground_state_guess(mesh: &Arc<Mesh>) -> FemFunction {
    match mesh.as_ref() {
        Mesh::Interval(_) => FemFunction::interpolate(mesh.clone(), |x| (std::f64::consts::FRAC_PI_2 * x[0]).cos()),
        Mesh::Triangles(_) => FemFunction::interpolate(mesh.clone(), |x| (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0)),
    }
}

pub fn nodal_guess(mesh: &Arc<Mesh>) -> FemFunction {
    match mesh.as_ref() {
        Mesh::Interval(_) => FemFunction::interpolate(mesh.clone(), |x| (std::f64::consts::PI * x[0]).sin()),
        Mesh::Triangles(_) => FemFunction::interpolate(mesh.clone(), |x| x[0] * (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0)),
    }
}

/// Ground state and least-energy nodal solution for each `s`.
pub fn table_study(s_values: &[f64], p: f64, nodes: usize, tol: f64, max_iter: usize) -> Result<Vec<TableRow>> {
    s_values
        .iter()
        .map(|&s| {
            let spec = interval_problem(s, p, nodes)?;
            let mesh = spec.gram().mesh().clone();
            let ground = mountain_pass(&spec, &ground_state_guess(&mesh), tol, max_iter)?;
            let nodal = modified_mountain_pass(&spec, &nodal_guess(&mesh), tol, max_iter)?;
            Ok(TableRow { s, ground, nodal })
        })
        .collect()
}

/// Isometries used by the symmetry diagnostic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Isometry {
    /// `x ↦ a + b - x` on an interval `(a, b)`, `x ↦ -x` in the plane.
    Reflection,
    /// `(x, y) ↦ (x, -y)`.
    ReflectY,
    /// Rotation about the origin by the given angle (radians).
    Rotation(f64),
}

impl Isometry {
    fn apply(&self, mesh: &Mesh, x: [f64; 2]) -> [f64; 2] {
        match (self, mesh) {
            (Isometry::Reflection, Mesh::Interval(m)) => {
                let (a, b) = m.bounds();
                [a + b - x[0], x[1]]
            }
            (Isometry::Reflection, _) => [-x[0], x[1]],
            (Isometry::ReflectY, _) => [x[0], -x[1]],
            (Isometry::Rotation(t), _) => {
                let (c, s) = (t.cos(), t.sin());
                [c * x[0] - s * x[1], s * x[0] + c * x[1]]
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Symmetric,
    Antisymmetric,
}

#[derive(Debug, Clone)]
pub struct SymmetryReport {
    /// `‖u∘R - u‖_M / ‖u‖_M`.
    pub rho_plus: f64,
    /// `‖u∘R + u‖_M / ‖u‖_M`.
    pub rho_minus: f64,
    pub parity: Parity,
    /// Whether `u∘R` was an exact node permutation (otherwise P1
    /// interpolation of the transformed function).
    pub exact: bool,
}

impl SymmetryReport {
    pub fn residual(&self) -> f64 {
        self.rho_plus.min(self.rho_minus)
    }
}

/// Node permutation `dof ↦ dof` realizing `R`, if the mesh is invariant.
fn permutation(mesh: &Mesh, iso: Isometry) -> Option<Vec<usize>> {
    let verts = mesh.dof_vertices();
    let pts: Vec<[f64; 2]> = verts.iter().map(|&v| mesh.vertex_point(v)).collect();
    let scale = pts.iter().fold(1.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])));
    let tol = 1e-12 * scale;
    let mut perm = Vec::with_capacity(pts.len());
    for p in &pts {
        let q = iso.apply(mesh, *p);
        // binary search on x, then scan the tie window
        let start = order.partition_point(|&k| pts[k][0] < q[0] - tol);
        let hit = order[start..]
            .iter()
            .take_while(|&&k| pts[k][0] <= q[0] + tol)
            .find(|&&k| (pts[k][1] - q[1]).abs() <= tol)?;
        perm.push(*hit);
    }
    Some(perm)
}

/// `ρ± = ‖u∘R ∓ u‖_M / ‖u‖_M`. Reflections must map the mesh onto itself;
/// rotations fall back to interpolation when they do not.
pub fn symmetry_report(gram: &GramPair, u: &FemFunction, iso: Isometry) -> Result<SymmetryReport> {
    let mesh = gram.mesh();
    if !u.same_mesh(mesh) {
        return domain("function lives on a different mesh");
    }
    let c = u.coeffs();
    let (moved, exact) = match permutation(mesh, iso) {
        Some(perm) => (perm.iter().map(|&k| c[k]).collect::<Vec<f64>>(), true),
        None => match iso {
            Isometry::Rotation(_) => {
                let pts: Vec<[f64; 2]> = mesh.dof_vertices().iter().map(|&v| mesh.vertex_point(v)).collect();
                (pts.iter().map(|&x| mesh.evaluate(c, iso.apply(mesh, x))).collect(), false)
            }
            _ => return domain("mesh is not invariant under the reflection"),
        },
    };
    let m = gram.m();
    let norm = m.bilinear(c, c).sqrt();
    if !(norm > 0.0) {
        return domain("symmetry of the zero function");
    }
    let rel = |sign: f64| {
        let d: Vec<f64> = moved.iter().zip(c).map(|(a, b)| a - sign * b).collect();
        m.bilinear(&d, &d).max(0.0).sqrt() / norm
    };
    let (rho_plus, rho_minus) = (rel(1.0), rel(-1.0));
    Ok(SymmetryReport {
        rho_plus,
        rho_minus,
        parity: if rho_plus <= rho_minus {
            Parity::Symmetric
        } else {
            Parity::Antisymmetric
        },
        exact,
    })
}
