//! The fractional interaction kernel `K(x) = ½ c_{N,s} |x|^{-N-2s}`.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use crate::error::{domain, Result};

/// Normalization constant `c_{N,s} = s 4^s Γ((N+2s)/2) / (π^{N/2} Γ(1-s))`
/// that makes the singular-integral operator agree with the Fourier symbol
/// `|ξ|^{2s}`.
pub fn fractional_constant(dim: usize, s: f64) -> Result<f64> {
    if !(1..=3).contains(&dim) {
        return domain(format!("dimension {dim} not in 1..=3"));
    }
    if !(s > 0.0 && s < 1.0) {
        return domain(format!("order s = {s} not in (0,1)"));
    }
    let n = dim as f64;
    Ok(s * 4f64.powf(s) * gamma((n + 2.0 * s) / 2.0) / (PI.powf(n / 2.0) * gamma(1.0 - s)))
}

/// Surface measure of the unit sphere `S^{N-1}`.
pub fn sphere_measure(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("dimension checked at construction"),
    }
}

/// Radial kernel with a closed-form exterior integral.
///
/// The fractional kernel is the only implementation; other radial kernels
/// with explicit tails can be plugged into assembly through this trait.
pub trait RadialKernel: Send + Sync {
    fn dim(&self) -> usize;

    /// Kernel value at distance `r > 0`.
    fn eval(&self, r: f64) -> Result<f64>;

    /// `∫_{|y| > R} K(y) dy`.
    fn tail_integral(&self, radius: f64) -> Result<f64>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel {
    dim: usize,
    s: f64,
    c: f64,
}

impl Kernel {
    pub fn new(dim: usize, s: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return domain(format!("kernel dimension {dim} not supported (1 or 2)"));
        }
        let c = fractional_constant(dim, s)?;
        Ok(Self { dim, s, c })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// `c_{N,s}`.
    pub fn constant(&self) -> f64 {
        self.c
    }

    /// Singularity exponent `N + 2s`.
    pub fn gamma(&self) -> f64 {
        self.dim as f64 + 2.0 * self.s
    }

    /// `½ c_{N,s}`, the prefactor in front of `|x|^{-N-2s}`.
    pub fn prefactor(&self) -> f64 {
        0.5 * self.c
    }

    /// Exterior integral per unit solid angle: `∫_ρ^∞ K(r) r^{N-1} dr = c/(4s) ρ^{-2s}`.
    pub(crate) fn radial_tail(&self, rho: f64) -> f64 {
        self.c / (4.0 * self.s) * rho.powf(-2.0 * self.s)
    }
}

impl RadialKernel for Kernel {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain(format!("kernel evaluated at r = {r}"));
        }
        Ok(self.prefactor() * r.powf(-self.gamma()))
    }

    fn tail_integral(&self, radius: f64) -> Result<f64> {
        if !(radius > 0.0) {
            return domain(format!("tail radius {radius} must be positive"));
        }
        Ok(sphere_measure(self.dim) * self.radial_tail(radius))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_rejects_bad_input() {
        assert!(fractional_constant(1, 0.0).is_err());
        assert!(fractional_constant(1, 1.0).is_err());
        assert!(fractional_constant(4, 0.5).is_err());
        assert!(Kernel::new(3, 0.5).is_err());
    }

    #[test]
    fn eval_scaling() {
        let k = Kernel::new(1, 0.5).unwrap();
        let v1 = k.eval(1.0).unwrap();
        assert!((v1 - 0.5 / PI).abs() < 1e-15);
        assert!((k.eval(2.0).unwrap() - v1 / 4.0).abs() < 1e-16);
        assert!(k.eval(0.0).is_err());
        assert!(k.eval(-1.0).is_err());
        for &(dim, s) in &[(1, 0.3), (2, 0.7)] {
            let k = Kernel::new(dim, s).unwrap();
            let base = k.eval(1.0).unwrap();
            for r in [0.1, 1.0, 10.0] {
                let scaled = k.eval(r).unwrap() * r.powf(k.gamma());
                assert!((scaled - base).abs() < 1e-13 * base);
            }
        }
    }

    #[test]
    fn tail_values() {
        let k = Kernel::new(1, 0.5).unwrap();
        assert!((k.tail_integral(1.0).unwrap() - 1.0 / PI).abs() < 1e-15);
        assert!((k.tail_integral(2.0).unwrap() - 0.5 / PI).abs() < 1e-15);
        assert!(k.tail_integral(0.0).is_err());
        let k2 = Kernel::new(2, 0.3).unwrap();
        let mut prev = f64::INFINITY;
        for r in [0.5, 1.0, 2.0, 10.0, 1e3] {
            let t = k2.tail_integral(r).unwrap();
            assert!(t > 0.0 && t < prev);
            prev = t;
        }
    }
}
