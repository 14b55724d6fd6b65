//! Gauss-Legendre rules on intervals, tensor squares and triangles.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss rule needs at least one point");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Newton on P_n from the Chebyshev-like initial guess
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                let pn = if n == 1 { x } else { p1 };
                let pm = if n == 1 { 1.0 } else { p0 };
                dp = nf * (x * pn - pm) / (x * x - 1.0);
                let dx = pn / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            if n == 1 {
                x = 0.0;
                dp = 1.0;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    /// Shared rule with `n ≤ 32` points, built once per process.
    pub fn cached(n: usize) -> &'static GaussLegendre {
        static RULES: OnceLock<Vec<GaussLegendre>> = OnceLock::new();
        let rules = RULES.get_or_init(|| (1..=32).map(GaussLegendre::new).collect());
        &rules[n - 1]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = b - a;
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(a + h * x);
        }
        acc * h
    }

    /// Points and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = b - a;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(x, w)| (a + h * x, w * h))
    }
}

/// Conical-product rule on the reference triangle `(0,0), (1,0), (0,1)`.
/// `n` points per direction integrate polynomials of degree `2n - 2` exactly.
#[derive(Debug, Clone)]
pub struct TriangleRule {
    /// `(λ_1, λ_2, weight)`; `λ_0 = 1 - λ_1 - λ_2`, weights sum to `1/2`.
    pub points: Vec<(f64, f64, f64)>,
}

impl TriangleRule {
    pub fn new(n: usize) -> Self {
        let g = GaussLegendre::new(n);
        let mut points = Vec::with_capacity(n * n);
        for (u, wu) in g.nodes.iter().zip(&g.weights) {
            for (v, wv) in g.nodes.iter().zip(&g.weights) {
                points.push((*u, v * (1.0 - u), wu * wv * (1.0 - u)));
            }
        }
        Self { points }
    }

    /// Rule of polynomial degree at least `degree`.
    pub fn of_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    /// `∫_T f` over the triangle with corners `c`.
    pub fn integrate(&self, c: [[f64; 2]; 3], f: impl Fn([f64; 2]) -> f64) -> f64 {
        let area2 = ((c[1][0] - c[0][0]) * (c[2][1] - c[0][1]) - (c[1][1] - c[0][1]) * (c[2][0] - c[0][0])).abs();
        let mut acc = 0.0;
        for &(l1, l2, w) in &self.points {
            let l0 = 1.0 - l1 - l2;
            let x = [
                l0 * c[0][0] + l1 * c[1][0] + l2 * c[2][0],
                l0 * c[0][1] + l1 * c[1][1] + l2 * c[2][1],
            ];
            acc += w * f(x);
        }
        acc * area2
    }
}

/// Adaptive bisection on top of a fixed Gauss rule; stops when a panel and
/// its two halves agree to `tol` (absolute, scaled by the panel's share).
pub fn adaptive_gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64, max_depth: usize) -> f64 {
    let rule = GaussLegendre::new(10);
    fn rec(rule: &GaussLegendre, f: &impl Fn(f64) -> f64, a: f64, b: f64, whole: f64, tol: f64, depth: usize) -> f64 {
        let m = 0.5 * (a + b);
        let left = rule.integrate(a, m, f);
        let right = rule.integrate(m, b, f);
        let refined = left + right;
        if depth == 0 || (refined - whole).abs() <= tol {
            return refined;
        }
        rec(rule, f, a, m, left, 0.5 * tol, depth - 1) + rec(rule, f, m, b, right, 0.5 * tol, depth - 1)
    }
    let whole = rule.integrate(a, b, f);
    rec(&rule, f, a, b, whole, tol, max_depth)
}
