//! Linear solves and the (modified) Mountain-Pass Algorithm: Nehari- or
//! nodal-Nehari-projected gradient descent in the `H` metric.

use std::time::Instant;

use crate::assembly::GramPair;
use crate::error::{domain, Error, Result};
use crate::mesh::FemFunction;
use crate::variational::{nodal_nehari_project, ProblemSpec};

pub const DEFAULT_TOL: f64 = 1e-2;
pub const DEFAULT_MAX_ITER: usize = 2000;
const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: FemFunction,
    pub iterations: usize,
    /// `‖∇E_p(u)‖_H` at the returned iterate.
    pub final_gradient_norm: f64,
    pub energy: f64,
    pub wall_time: f64,
}

/// `S u = b` with `b_i = ∫ f φ_i`.
pub fn solve_linear(gram: &GramPair, f: impl Fn([f64; 2]) -> f64) -> Result<FemFunction> {
    let table = gram.table();
    let g: Vec<f64> = table.points().iter().map(|&x| f(x)).collect();
    let b = table.load(&g, gram.dof_count());
    gram.function(gram.solve(&b)?)
}

/// One of the two projections the descent runs on.
trait Projection {
    fn project(&self, spec: &ProblemSpec, c: &[f64]) -> Result<Vec<f64>>;
}

struct Nehari;

impl Projection for Nehari {
    fn project(&self, spec: &ProblemSpec, c: &[f64]) -> Result<Vec<f64>> {
        let t = spec.nehari_scale(c)?;
        Ok(c.iter().map(|v| t * v).collect())
    }
}

struct NodalNehari;

impl Projection for NodalNehari {
    fn project(&self, spec: &ProblemSpec, c: &[f64]) -> Result<Vec<f64>> {
        let u = spec.gram().function(c.to_vec())?;
        if !u.is_sign_changing() {
            return Err(Error::Degenerate("iterate is one-signed".into()));
        }
        Ok(nodal_nehari_project(spec, &u)?.w.into_coeffs())
    }
}

fn descend(spec: &ProblemSpec, u0: &FemFunction, tol: f64, max_iter: usize, proj: &dyn Projection) -> Result<SolveReport> {
    let clock = Instant::now();
    let gram = spec.gram();
    if !u0.same_mesh(gram.mesh()) {
        return domain("initial guess lives on a different mesh");
    }
    if u0.is_zero() {
        return domain("initial guess is zero");
    }
    let s = gram.s();
    let mut u = proj.project(spec, u0.coeffs())?;
    let mut e = spec.energy_of(&u);
    let mut g = spec.gradient_of(&u)?;
    let mut gn = s.bilinear(&g, &g).max(0.0).sqrt();
    for iter in 0..max_iter {
        if gn <= tol {
            return Ok(SolveReport {
                solution: gram.function(u)?,
                iterations: iter,
                final_gradient_norm: gn,
                energy: e,
                wall_time: clock.elapsed().as_secs_f64(),
            });
        }
        let mut alpha = 1.0;
        let mut next = None;
        let mut lost_sign = false;
        for _ in 0..=MAX_HALVINGS {
            let trial: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - alpha * b).collect();
            match proj.project(spec, &trial) {
                Ok(v) => {
                    let ev = spec.energy_of(&v);
                    if ev <= e - ARMIJO * alpha * gn * gn {
                        next = Some((v, ev));
                        break;
                    }
                }
                Err(Error::Degenerate(_)) => lost_sign = true,
                Err(Error::Convergence { .. }) => {}
                Err(other) => return Err(other),
            }
            alpha *= 0.5;
        }
        match next {
            Some((v, ev)) => {
                u = v;
                e = ev;
                g = spec.gradient_of(&u)?;
                gn = s.bilinear(&g, &g).max(0.0).sqrt();
            }
            None if lost_sign => {
                return Err(Error::Degenerate(format!(
                    "every step of iteration {iter} destroys the sign change"
                )))
            }
            None => {
                return Err(Error::Convergence {
                    iterations: iter,
                    residual: gn,
                    best: Some(u),
                })
            }
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: gn,
        best: Some(u),
    })
}

/// Ground state by Nehari-projected steepest descent from `u0`.
pub fn mountain_pass(spec: &ProblemSpec, u0: &FemFunction, tol: f64, max_iter: usize) -> Result<SolveReport> {
    descend(spec, u0, tol, max_iter, &Nehari)
}

/// Least-energy nodal solution: the same descent projected on the nodal
/// Nehari set; `u0` must change sign.
pub fn modified_mountain_pass(spec: &ProblemSpec, u0: &FemFunction, tol: f64, max_iter: usize) -> Result<SolveReport> {
    if !u0.is_sign_changing() {
        return domain("modified mountain pass needs a sign-changing initial guess");
    }
    descend(spec, u0, tol, max_iter, &NodalNehari)
}
