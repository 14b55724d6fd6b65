//! The `p → 2` limit: reduced functional `E_*(u) = ½∫u² - u² ln u²` on an
//! eigenspace, its Nehari scaling, and studies of λ-scaled solutions as
//! `p` decreases to 2.

use std::io::Write;
use std::sync::Arc;

use crate::assembly::GramPair;
use crate::error::{domain, Error, Result};
use crate::linalg::dot;
use crate::mesh::{FemFunction, Mesh};
use crate::solver::{modified_mountain_pass, mountain_pass, SolveReport};
use crate::spectral::{spectrum, EigenPair, Spectrum};
use crate::variational::ProblemSpec;

/// Values below this magnitude are treated as 0 inside logarithms.
const LOG_FLOOR: f64 = 1e-14;

fn u2_log_abs(v: f64) -> f64 {
    if v.abs() < LOG_FLOOR {
        0.0
    } else {
        v * v * v.abs().ln()
    }
}

/// `E_*(u) = ½∫(u² - u² ln u²)`.
pub fn reduced_energy(gram: &GramPair, u: &FemFunction) -> Result<f64> {
    check(gram, u)?;
    Ok(0.5 * gram.table().integrate(u.coeffs(), |v| v * v - 2.0 * u2_log_abs(v)))
}

/// `t_v = exp(-∫v² ln|v| / |v|₂²)`, the scaling that puts `t_v v` on `N_*`.
pub fn reduced_nehari_scale(gram: &GramPair, v: &FemFunction) -> Result<f64> {
    check(gram, v)?;
    let t = gram.table();
    let l2 = t.integrate(v.coeffs(), |x| x * x);
    if !(l2 > 0.0) {
        return domain("reduced Nehari scale of the zero function");
    }
    Ok((-t.integrate(v.coeffs(), u2_log_abs) / l2).exp())
}

/// `E_*'(v)[v] = -∫v² ln v²`, which vanishes on `N_*`.
pub fn reduced_nehari_residual(gram: &GramPair, v: &FemFunction) -> Result<f64> {
    check(gram, v)?;
    Ok(-2.0 * gram.table().integrate(v.coeffs(), u2_log_abs))
}

/// `max_k |∫u ln|u| e_k|` over an `M`-orthonormal basis of the eigenspace.
pub fn limit_residual(gram: &GramPair, u: &FemFunction, basis: &[FemFunction]) -> Result<f64> {
    check(gram, u)?;
    let table = gram.table();
    let g: Vec<f64> = table
        .values(u.coeffs())
        .into_iter()
        .map(|v| if v.abs() < LOG_FLOOR { 0.0 } else { v * v.abs().ln() })
        .collect();
    let b = table.load(&g, gram.dof_count());
    Ok(basis.iter().map(|e| dot(&b, e.coeffs()).abs()).fold(0.0, f64::max))
}

/// Principal angle (radians) in the `M` inner product between `u` and the
/// span of an `M`-orthonormal basis.
pub fn eigenspace_angle(gram: &GramPair, u: &FemFunction, basis: &[FemFunction]) -> Result<f64> {
    check(gram, u)?;
    let mu = gram.m().matvec(u.coeffs());
    let total = dot(u.coeffs(), &mu);
    if !(total > 0.0) {
        return domain("angle of the zero function");
    }
    let proj: f64 = basis.iter().map(|e| dot(e.coeffs(), &mu).powi(2)).sum();
    Ok((proj / total).sqrt().min(1.0).acos())
}

fn check(gram: &GramPair, u: &FemFunction) -> Result<()> {
    if !u.same_mesh(gram.mesh()) {
        return domain("function lives on a different mesh");
    }
    Ok(())
}

/// Minimizer of `E_*` on `N_*` when `E₂` is one-dimensional: the two
/// candidates `±t_φ φ` have equal energy, so the minimizer is `t_φ φ`.
pub fn reduced_minimizer(gram: &GramPair, phi: &FemFunction) -> Result<FemFunction> {
    let t = reduced_nehari_scale(gram, phi)?;
    Ok(phi.scaled(t))
}

/// `min_± ‖u ∓ v‖_M / ‖v‖_M`.
fn signed_distance(gram: &GramPair, u: &FemFunction, v: &FemFunction) -> f64 {
    let m = gram.m();
    let vv = m.bilinear(v.coeffs(), v.coeffs());
    let uv = m.bilinear(u.coeffs(), v.coeffs());
    let uu = m.bilinear(u.coeffs(), u.coeffs());
    ((uu + vv - 2.0 * uv.abs()).max(0.0) / vv).sqrt()
}

/// Initial data of the descent in the study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialData {
    /// `cos(π x̂/2)` / `sin(π x̂)` in the interval coordinate `x̂ ∈ (-1,1)`;
    /// on triangulations the eigenfunction itself.
    Profile,
    Eigenfunction,
}

#[derive(Debug, Clone)]
pub struct LimitOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial: InitialData,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            max_iter: 20000,
            initial: InitialData::Profile,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LimitReport {
    pub lambda_index: usize,
    pub lambda: f64,
    pub p_sequence: Vec<f64>,
    pub angles: Vec<f64>,
    pub energies: Vec<f64>,
    /// `‖u_p‖` per `p`, with `u_p` the λ-scaled solution.
    pub norms: Vec<f64>,
    pub limit_residuals: Vec<f64>,
    /// Relative `M`-distance to the nearer of `±v_*`, `v_*` the direct
    /// minimizer of `E_*` on `N_*` (index 2 with simple `λ₂` only).
    pub reduced_distances: Vec<f64>,
    pub second_multiple: bool,
    pub solutions: Vec<FemFunction>,
    pub basis: Vec<FemFunction>,
}

impl LimitReport {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "p,energy,angle_degrees,limit_residual")?;
        for k in 0..self.p_sequence.len() {
            writeln!(
                w,
                "{},{:.12e},{:.12e},{:.12e}",
                self.p_sequence[k],
                self.energies[k],
                self.angles[k].to_degrees(),
                self.limit_residuals[k]
            )?;
        }
        Ok(())
    }
}

fn initial_guess(gram: &GramPair, index: usize, opts: &LimitOptions, pairs: &[EigenPair]) -> FemFunction {
    let mesh = gram.mesh();
    match (opts.initial, mesh.as_ref()) {
        (InitialData::Profile, Mesh::Interval(m)) => {
            let (a, b) = m.bounds();
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            FemFunction::interpolate(mesh.clone(), move |x| {
                let xh = (x[0] - mid) / half;
                if index == 1 {
                    (std::f64::consts::FRAC_PI_2 * xh).cos()
                } else {
                    (std::f64::consts::PI * xh).sin()
                }
            })
        }
        _ => pairs[index - 1].phi.clone(),
    }
}

/// Solves the λ_i-scaled problem for each `p` and compares the solutions
/// with the eigenspace `E_i`.
pub fn limit_study(gram: Arc<GramPair>, lambda_index: usize, p_sequence: &[f64], opts: &LimitOptions) -> Result<LimitReport> {
    if lambda_index != 1 && lambda_index != 2 {
        return domain("limit study supports eigenvalue index 1 or 2");
    }
    if p_sequence.is_empty() || p_sequence.iter().any(|&p| !(p > 2.0)) || p_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return domain("p sequence must decrease strictly and stay above 2");
    }
    let Spectrum { pairs, second_multiple } = spectrum(&gram, 3, crate::spectral::DEFAULT_TOL)?;
    let lambda = pairs[lambda_index - 1].lambda;
    let mut basis = vec![pairs[lambda_index - 1].phi.clone()];
    if lambda_index == 2 && second_multiple {
        basis.push(pairs[2].phi.clone());
    }
    let u0 = initial_guess(&gram, lambda_index, opts, &pairs);
    let mut report = LimitReport {
        lambda_index,
        lambda,
        p_sequence: p_sequence.to_vec(),
        angles: Vec::new(),
        energies: Vec::new(),
        norms: Vec::new(),
        limit_residuals: Vec::new(),
        reduced_distances: Vec::new(),
        second_multiple,
        solutions: Vec::new(),
        basis: basis.clone(),
    };
    let target = if lambda_index == 2 && !second_multiple {
        Some(reduced_minimizer(&gram, &basis[0])?)
    } else {
        None
    };
    for &p in p_sequence {
        let spec = ProblemSpec::new(gram.clone(), p, lambda)?;
        let solved: Result<SolveReport> = if lambda_index == 1 {
            mountain_pass(&spec, &u0, opts.tol, opts.max_iter)
        } else {
            modified_mountain_pass(&spec, &u0, opts.tol, opts.max_iter)
        };
        let r = solved.map_err(|e| tag(e, p))?;
        let u = r.solution;
        report.angles.push(eigenspace_angle(&gram, &u, &basis)?);
        report.energies.push(r.energy);
        report.norms.push(gram.h_norm(&u)?);
        report.limit_residuals.push(limit_residual(&gram, &u, &basis)?);
        if let Some(v) = &target {
            report.reduced_distances.push(signed_distance(&gram, &u, v));
        }
        report.solutions.push(u);
    }
    Ok(report)
}

fn tag(e: Error, p: f64) -> Error {
    match e {
        Error::Domain(m) => Error::Domain(format!("p = {p}: {m}")),
        Error::Degenerate(m) => Error::Degenerate(format!("p = {p}: {m}")),
        other => other,
    }
}
