//! The energy `E_p(u) = ½‖u‖² - (λ/p)∫|u|^p`, its gradient in the `H`
//! metric, and projections onto the Nehari and nodal Nehari sets.

use std::sync::Arc;

use crate::assembly::GramPair;
use crate::error::{domain, Error, Result};
use crate::linalg::dot;
use crate::mesh::FemFunction;

/// Exponent, scaling and the Gram pair of one semilinear problem.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    gram: Arc<GramPair>,
    p: f64,
    lambda: f64,
}

impl ProblemSpec {
    pub fn new(gram: Arc<GramPair>, p: f64, lambda: f64) -> Result<Self> {
        let n = gram.mesh().dim() as f64;
        let s = gram.kernel().s();
        if !(p > 2.0) {
            return domain(format!("exponent p = {p} must exceed 2"));
        }
        if n > 2.0 * s && p >= 2.0 * n / (n - 2.0 * s) {
            return domain(format!("exponent p = {p} is not subcritical"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return domain(format!("scaling λ = {lambda} must be positive"));
        }
        Ok(Self { gram, p, lambda })
    }

    pub fn gram(&self) -> &Arc<GramPair> {
        &self.gram
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn check(&self, u: &FemFunction) -> Result<()> {
        if !u.same_mesh(self.gram.mesh()) {
            return domain("function lives on a different mesh");
        }
        Ok(())
    }

    /// `∫|u|^p` from coefficients.
    pub(crate) fn power_integral(&self, c: &[f64]) -> f64 {
        let p = self.p;
        self.gram.table().integrate(c, |v| v.abs().powf(p))
    }

    pub(crate) fn energy_of(&self, c: &[f64]) -> f64 {
        0.5 * self.gram.s().bilinear(c, c) - self.lambda / self.p * self.power_integral(c)
    }

    /// `b_i = λ∫|u|^{p-2}u φ_i`.
    pub(crate) fn nonlinear_load(&self, c: &[f64]) -> Vec<f64> {
        let table = self.gram.table();
        let pm2 = self.p - 2.0;
        let g: Vec<f64> = table
            .values(c)
            .into_iter()
            .map(|v| self.lambda * v.abs().powf(pm2) * v)
            .collect();
        table.load(&g, c.len())
    }

    pub(crate) fn gradient_of(&self, c: &[f64]) -> Result<Vec<f64>> {
        let a = self.gram.solve(&self.nonlinear_load(c))?;
        Ok(c.iter().zip(&a).map(|(u, a)| u - a).collect())
    }

    /// `(t, t u)` with `t u` on the Nehari manifold.
    pub(crate) fn nehari_scale(&self, c: &[f64]) -> Result<f64> {
        let quad = self.gram.s().bilinear(c, c);
        let pw = self.power_integral(c);
        if !(pw > 0.0) || !(quad > 0.0) {
            return domain("Nehari projection of the zero function");
        }
        Ok((quad / (self.lambda * pw)).powf(1.0 / (self.p - 2.0)))
    }
}

pub fn energy(spec: &ProblemSpec, u: &FemFunction) -> Result<f64> {
    spec.check(u)?;
    Ok(spec.energy_of(u.coeffs()))
}

/// `∇E_p(u) = u - A(u)` with `S A(u) = λ(∫|u|^{p-2}u φ_i)_i`, so that
/// `⟨∇E_p(u), v⟩ = E_p'(u)[v]`.
pub fn gradient(spec: &ProblemSpec, u: &FemFunction) -> Result<FemFunction> {
    spec.check(u)?;
    Ok(u.with_coeffs(spec.gradient_of(u.coeffs())?))
}

/// `E_p'(u)[v]`.
pub fn derivative(spec: &ProblemSpec, u: &FemFunction, v: &FemFunction) -> Result<f64> {
    spec.check(u)?;
    spec.check(v)?;
    let su = spec.gram.s().matvec(u.coeffs());
    Ok(dot(&su, v.coeffs()) - dot(&spec.nonlinear_load(u.coeffs()), v.coeffs()))
}

/// Rescales `u` onto `N_p`: `t = (‖u‖² / (λ|u|_p^p))^{1/(p-2)}`.
pub fn nehari_project(spec: &ProblemSpec, u: &FemFunction) -> Result<(f64, FemFunction)> {
    spec.check(u)?;
    let t = spec.nehari_scale(u.coeffs())?;
    Ok((t, u.scaled(t)))
}

pub const NODAL_MAX_ITER: usize = 100;
const NODAL_TOL: f64 = 1e-13;
/// Accepted when Newton stalls at rounding level.
const NODAL_STALL_TOL: f64 = 1e-10;

/// Result of the nodal projection.
#[derive(Debug, Clone)]
pub struct NodalProjection {
    pub t_plus: f64,
    pub t_minus: f64,
    pub w: FemFunction,
    pub iterations: usize,
}

/// `w = t⁺u⁺ + t⁻u⁻` with `E_p'(w)[u⁺] = E_p'(w)[u⁻] = 0`, by damped
/// Newton from `(1, 1)` in logarithmic variables.
pub fn nodal_nehari_project(spec: &ProblemSpec, u: &FemFunction) -> Result<NodalProjection> {
    nodal_nehari_project_from(spec, u, (1.0, 1.0))
}

pub fn nodal_nehari_project_from(spec: &ProblemSpec, u: &FemFunction, start: (f64, f64)) -> Result<NodalProjection> {
    spec.check(u)?;
    if !u.is_sign_changing() {
        return domain("nodal projection needs a sign-changing function");
    }
    let (up, um) = (u.positive_part(), u.negative_part());
    let (cp, cm) = (up.coeffs(), um.coeffs());
    let s = spec.gram.s();
    let (sp, sm) = (s.matvec(cp), s.matvec(cm));
    let (app, apm, amm) = (dot(cp, &sp), dot(cp, &sm), dot(cm, &sm));
    let table = spec.gram.table();
    let (vp, vm) = (table.values(cp), table.values(cm));
    let weights = table.weights();
    let (lam, p) = (spec.lambda, spec.p);

    // residuals and Jacobian of (E'(w)[u⁺], E'(w)[u⁻])
    let eval = |t: (f64, f64)| {
        let (mut np, mut nm, mut jpp, mut jpm, mut jmm) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for q in 0..weights.len() {
            let w = t.0 * vp[q] + t.1 * vm[q];
            if w == 0.0 {
                continue;
            }
            let a = w.abs().powf(p - 2.0);
            let g = lam * weights[q] * a * w;
            let h = lam * weights[q] * (p - 1.0) * a;
            np += g * vp[q];
            nm += g * vm[q];
            jpp += h * vp[q] * vp[q];
            jpm += h * vp[q] * vm[q];
            jmm += h * vm[q] * vm[q];
        }
        let r = [t.0 * app + t.1 * apm - np, t.0 * apm + t.1 * amm - nm];
        let j = [[app - jpp, apm - jpm], [apm - jpm, amm - jmm]];
        let norm2 = t.0 * t.0 * app + 2.0 * t.0 * t.1 * apm + t.1 * t.1 * amm;
        (r, j, norm2)
    };
    let size = |r: [f64; 2]| r[0].hypot(r[1]);

    let mut t = start;
    if !(t.0 > 0.0 && t.1 > 0.0) {
        return domain("nodal projection needs a positive starting point");
    }
    let done = |t: (f64, f64), iterations| NodalProjection {
        t_plus: t.0,
        t_minus: t.1,
        w: up.scaled(t.0).add_scaled(t.1, &um),
        iterations,
    };
    // Newton in σ = ln t on R± = F±/t±; each component of R is decreasing
    // and concave in its own σ, which keeps full steps well behaved
    let scaled = |t: (f64, f64), r: [f64; 2], j: [[f64; 2]; 2]| {
        let tt = [t.0, t.1];
        let rs = [r[0] / t.0, r[1] / t.1];
        let mut js = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                js[a][b] = j[a][b] * tt[b] / tt[a] - if a == b { rs[a] } else { 0.0 };
            }
        }
        (rs, js)
    };
    // E'(w)[t±u±] against ‖w‖² is scale-free; the plain residual is also
    // required so that small t± are not let off lightly
    let small = |t: (f64, f64), r: [f64; 2], norm2: f64, tol: f64| {
        let tr = (t.0 * r[0]).hypot(t.1 * r[1]);
        tr <= tol * norm2 && size(r) <= tol * norm2
    };
    let (mut r, mut j, mut norm2) = eval(t);
    let mut iter = 0;
    while iter < NODAL_MAX_ITER {
        if small(t, r, norm2, NODAL_TOL) {
            return Ok(done(t, iter));
        }
        iter += 1;
        let (rs, js) = scaled(t, r, j);
        let det = js[0][0] * js[1][1] - js[0][1] * js[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let d = [
            (js[1][1] * rs[0] - js[0][1] * rs[1]) / det,
            (js[0][0] * rs[1] - js[1][0] * rs[0]) / det,
        ];
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = (t.0 * (-step * d[0]).exp(), t.1 * (-step * d[1]).exp());
            let (rt, jt, nt) = eval(trial);
            let (rts, _) = scaled(trial, rt, jt);
            if size(rts) < size(rs) {
                t = trial;
                (r, j, norm2) = (rt, jt, nt);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if small(t, r, norm2, NODAL_STALL_TOL) {
        return Ok(done(t, iter));
    }
    Err(Error::Convergence {
        iterations: iter,
        residual: size(r) / norm2,
        best: Some(up.scaled(t.0).add_scaled(t.1, &um).into_coeffs()),
    })
}

/// `v = λ^{1/(p-2)} u`, mapping solutions of the λ-scaled problem to
/// solutions of the unscaled one.
pub fn rescale_solution(u: &FemFunction, lambda: f64, p: f64) -> FemFunction {
    u.scaled(lambda.powf(1.0 / (p - 2.0)))
}
