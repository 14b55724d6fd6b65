//! Lowest eigenpairs of `S x = λ M x`, the Dirichlet eigenvalues of
//! `(-Δ)^s + V` on the finite element space.

use crate::assembly::GramPair;
use crate::error::Result;
use crate::linalg::subspace_iteration;
use crate::mesh::FemFunction;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITER: usize = 500;
/// Relative gap below which `λ₂` is reported as (numerically) multiple.
pub const MULTIPLICITY_GAP: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct EigenPair {
    pub lambda: f64,
    /// `M`-normalized eigenfunction.
    pub phi: FemFunction,
    /// `‖Sφ - λMφ‖_∞ / ‖Sφ‖_∞`.
    pub residual: f64,
}

/// The `k` smallest eigenpairs, ascending, each sign-normalized.
pub fn smallest_eigenpairs(gram: &GramPair, k: usize, tol: f64) -> Result<Vec<EigenPair>> {
    let factor = gram.factor()?;
    let r = subspace_iteration(gram.s(), factor, gram.m(), k, k + 2, tol, MAX_ITER)?;
    r.values
        .into_iter()
        .zip(r.vectors)
        .zip(r.residuals)
        .map(|((lambda, v), residual)| {
            Ok(sign_normalize(EigenPair {
                lambda,
                phi: gram.function(v)?,
                residual,
            }))
        })
        .collect()
}

/// Flips the sign so that the coefficient of largest magnitude is positive.
pub fn sign_normalize(pair: EigenPair) -> EigenPair {
    let c = pair.phi.coeffs();
    let big = c.iter().copied().fold(0.0f64, |m, v| if v.abs() > m.abs() { v } else { m });
    if big < 0.0 {
        EigenPair {
            phi: pair.phi.scaled(-1.0),
            ..pair
        }
    } else {
        pair
    }
}

/// Eigenpairs needed by the nonlinear studies, with the flag telling
/// whether `λ₂` looks multiple.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub pairs: Vec<EigenPair>,
    pub second_multiple: bool,
}

/// At least three pairs, so the multiplicity of `λ₂` can be judged.
pub fn spectrum(gram: &GramPair, k: usize, tol: f64) -> Result<Spectrum> {
    let want = k.max(3).min(gram.dof_count());
    let mut pairs = smallest_eigenpairs(gram, want, tol)?;
    let second_multiple = pairs.len() >= 3 && (pairs[2].lambda - pairs[1].lambda) / pairs[1].lambda < MULTIPLICITY_GAP;
    pairs.truncate(k.max(1));
    Ok(Spectrum { pairs, second_multiple })
}
