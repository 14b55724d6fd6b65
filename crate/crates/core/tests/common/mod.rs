#![allow(dead_code)]

pub mod stiffness;

/// Tanh-sinh quadrature on `[a, b]`; tolerates integrable endpoint
/// singularities.
pub fn tanh_sinh(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let d = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let mut acc = 0.0;
    // wide enough that the cut-off ends cost less than 1e-25 for x^{-0.9}
    let tmax = 6.5;
    let mut k: i64 = -(tmax / h) as i64;
    while (k as f64) * h <= tmax {
        let t = k as f64 * h;
        let u = FRAC_PI_2 * t.sinh();
        let ch = u.cosh();
        let w = FRAC_PI_2 * t.cosh() / (ch * ch);
        // distance to the nearest endpoint, computed without cancellation
        let off = 1.0 / (u.abs().exp() * ch);
        let x = if t < 0.0 { a + d * off } else { b - d * off };
        // points closer than 1e-100 to an end carry no weight but may overflow f
        if d * off > 1e-100 && x > a && x < b {
            acc += w * f(x);
        }
        k += 1;
    }
    acc * d * h
}

/// Deterministic uniform samples in `[0, 1)`.
pub struct Lcg(pub u64);

impl Lcg {
    pub fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn vec(&mut self, n: usize, lo: f64, hi: f64) -> Vec<f64> {
        (0..n).map(|_| lo + (hi - lo) * self.next()).collect()
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
