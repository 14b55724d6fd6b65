//! Closed-form double integrals `∫_a^b ∫_c^d q(x, y) (y - x)^{-γ} dy dx`
//! over ordered intervals, the building block of the 1D stiffness matrix.
//!
//! Everything is evaluated in the local coordinates `ξ = b - x`,
//! `η = y - c`, so that `y - x = ξ + η + g` with gap `g = c - b ≥ 0`.
//! Touching intervals (`g = 0`) are handled through the limits of the
//! antiderivatives at the shared corner. When the gap is at least the
//! interval length the integrand is analytic on the whole box and a
//! high-order Gauss rule is used instead: the binomial expansions behind
//! the antiderivatives lose roughly `(g/h)^{k+l}` digits there.

use crate::error::{domain, Error, Result};

use super::gauss::GaussLegendre;

/// `Σ_{i,j≤2} q_ij x^i y^j`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BivariatePoly {
    pub q: [[f64; 3]; 3],
}

impl BivariatePoly {
    pub fn constant(c: f64) -> Self {
        let mut q = [[0.0; 3]; 3];
        q[0][0] = c;
        Self { q }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += self.q[i][j] * x.powi(i as i32) * y.powi(j as i32);
            }
        }
        acc
    }

    /// `q(y, x)`.
    pub fn transposed(&self) -> Self {
        let mut q = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                q[j][i] = self.q[i][j];
            }
        }
        Self { q }
    }

    fn depends_on_x(&self) -> bool {
        self.q[1..].iter().flatten().any(|&c| c != 0.0)
    }

    fn depends_on_y(&self) -> bool {
        self.q.iter().any(|row| row[1..].iter().any(|&c| c != 0.0))
    }
}

const BINOM: [[f64; 5]; 5] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

/// Exponents closer than this to a pole of `t^β / (β+1)` use the log branch.
const LOG_BRANCH: f64 = 1e-12;

/// `∫_lo^hi t^β dt`; `lo` may be 0 when `β > -1`.
fn int_pow(beta: f64, lo: f64, hi: f64) -> Result<f64> {
    let e = beta + 1.0;
    if e.abs() < LOG_BRANCH {
        if lo == 0.0 {
            return Err(Error::Singular("logarithmic divergence at touching corner".into()));
        }
        return Ok((hi / lo).ln());
    }
    if lo == 0.0 {
        if e < 0.0 {
            return Err(Error::Singular(format!("t^{beta} is not integrable at 0")));
        }
        return Ok(hi.powf(e) / e);
    }
    Ok((hi.powf(e) - lo.powf(e)) / e)
}

/// `∫_lo^hi t^k ln t dt` for integer `k ≥ 0`; `lo` may be 0.
fn int_pow_log(k: usize, lo: f64, hi: f64) -> f64 {
    let e = k as f64 + 1.0;
    let anti = |t: f64| {
        if t == 0.0 {
            0.0
        } else {
            t.powf(e) * (t.ln() / e - 1.0 / (e * e))
        }
    };
    anti(hi) - anti(lo)
}

/// `∫_lo^hi t^k G_m(t) dt` with `G_m(t) = t^α/α`, `α = m + 1 - γ`, or `ln t`
/// when `α = 0`.
fn int_pow_times_g(k: usize, m: usize, gamma: f64, lo: f64, hi: f64) -> Result<f64> {
    let alpha = m as f64 + 1.0 - gamma;
    if alpha.abs() < LOG_BRANCH {
        Ok(int_pow_log(k, lo, hi))
    } else {
        Ok(int_pow(k as f64 + alpha, lo, hi)? / alpha)
    }
}

/// `∫_0^A ∫_0^B ξ^k η^l (ξ + η + g)^{-γ} dη dξ` for finite `A`, `B`.
fn monomial_closed(k: usize, l: usize, a_len: f64, b_len: f64, gap: f64, gamma: f64) -> Result<f64> {
    // P = ξ + g ∈ [g, g + A];  inner(P) = Σ_m C(l,m) (-P)^{l-m} [G_m(P+B) - G_m(P)]
    // ξ^k = (P - g)^k = Σ_n C(k,n) P^n (-g)^{k-n}
    let (lo, hi) = (gap, gap + a_len);
    let mut total = 0.0;
    for n in 0..=k {
        let gpow = if k == n { 1.0 } else { (-gap).powi((k - n) as i32) };
        if gpow == 0.0 {
            continue;
        }
        for m in 0..=l {
            let coef = BINOM[k][n] * gpow * BINOM[l][m] * if (l - m) % 2 == 1 { -1.0 } else { 1.0 };
            let e = n + l - m;
            // ∫ P^e G_m(P + B) dP, with t = P + B and P^e = Σ_r C(e,r) t^r (-B)^{e-r}
            let mut t1 = 0.0;
            for r in 0..=e {
                let bpow = (-b_len).powi((e - r) as i32);
                t1 += BINOM[e][r] * bpow * int_pow_times_g(r, m, gamma, lo + b_len, hi + b_len)?;
            }
            let t2 = int_pow_times_g(e, m, gamma, lo, hi)?;
            total += coef * (t1 - t2);
        }
    }
    Ok(total)
}

/// `∫_0^A ξ^k ∫_0^∞ (ξ + η + g)^{-γ} dη dξ = ∫_0^A ξ^k (ξ+g)^{1-γ}/(γ-1) dξ`.
fn monomial_half_infinite(k: usize, a_len: f64, gap: f64, gamma: f64) -> Result<f64> {
    let (lo, hi) = (gap, gap + a_len);
    let mut total = 0.0;
    for n in 0..=k {
        let gpow = if k == n { 1.0 } else { (-gap).powi((k - n) as i32) };
        if gpow == 0.0 {
            continue;
        }
        total += BINOM[k][n] * gpow * int_pow(n as f64 + 1.0 - gamma, lo, hi)?;
    }
    Ok(total / (gamma - 1.0))
}

/// Points per direction for a box at distance `ratio` box-lengths from the
/// diagonal; keeps the Bernstein-ellipse error bound below ~1e-15.
fn gauss_points_for(ratio: f64) -> usize {
    if ratio >= 64.0 {
        4
    } else if ratio >= 16.0 {
        5
    } else if ratio >= 4.0 {
        8
    } else {
        14
    }
}

/// `∫_0^A ∫_0^B r(ξ, η) (ξ + η + g)^{-γ} dη dξ` with `r = Σ r_kl ξ^k η^l`.
/// Either length may be infinite provided `r` does not grow in that
/// variable.
pub(crate) fn wedge_integral(a_len: f64, b_len: f64, gap: f64, gamma: f64, r: &[[f64; 3]; 3]) -> Result<f64> {
    if !(gap >= 0.0) || !(a_len > 0.0) || !(b_len > 0.0) {
        return domain(format!("invalid wedge lengths A={a_len} B={b_len} g={gap}"));
    }
    if a_len.is_infinite() && b_len.is_infinite() {
        return domain("both integration ranges unbounded");
    }
    if a_len.is_infinite() {
        let mut t = [[0.0; 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                t[l][k] = r[k][l];
            }
        }
        return wedge_integral(b_len, a_len, gap, gamma, &t);
    }
    if gamma <= 1.0 && b_len.is_infinite() {
        return Err(Error::Singular(format!("γ = {gamma} is not integrable at infinity")));
    }
    if b_len.is_infinite() {
        if r.iter().any(|row| row[1..].iter().any(|&c| c != 0.0)) {
            return domain("integrand must not depend on the unbounded variable");
        }
        if gap >= a_len {
            let g = GaussLegendre::cached(gauss_points_for(gap / a_len));
            return Ok(g.integrate(0.0, a_len, |xi| {
                (r[0][0] + xi * (r[1][0] + xi * r[2][0])) * (xi + gap).powf(1.0 - gamma) / (gamma - 1.0)
            }));
        }
        let mut total = 0.0;
        for k in 0..3 {
            if r[k][0] != 0.0 {
                total += r[k][0] * monomial_half_infinite(k, a_len, gap, gamma)?;
            }
        }
        return Ok(total);
    }
    if gap >= a_len.max(b_len) {
        let g = GaussLegendre::cached(gauss_points_for(gap / a_len.max(b_len)));
        let mut total = 0.0;
        for (xi, wx) in g.mapped(0.0, a_len) {
            let rx = [
                r[0][0] + xi * (r[1][0] + xi * r[2][0]),
                r[0][1] + xi * (r[1][1] + xi * r[2][1]),
                r[0][2] + xi * (r[1][2] + xi * r[2][2]),
            ];
            let mut inner = 0.0;
            for (eta, wy) in g.mapped(0.0, b_len) {
                inner += wy * (rx[0] + eta * (rx[1] + eta * rx[2])) * (xi + eta + gap).powf(-gamma);
            }
            total += wx * inner;
        }
        return Ok(total);
    }
    let mut total = 0.0;
    for k in 0..3 {
        for l in 0..3 {
            if r[k][l] != 0.0 {
                if gap == 0.0 && (k + l) as f64 + 2.0 - gamma <= 0.0 {
                    return Err(Error::Singular(format!(
                        "monomial ξ^{k} η^{l} with γ = {gamma} diverges at the touching corner"
                    )));
                }
                total += r[k][l] * monomial_closed(k, l, a_len, b_len, gap, gamma)?;
            }
        }
    }
    Ok(total)
}

/// `∫_a^b ∫_c^d q(x, y) (y - x)^{-γ} dy dx` for `a < b ≤ c < d`.
///
/// `a = -∞` requires `q` independent of `x`; `d = +∞` requires `q`
/// independent of `y`. Touching ranges (`b = c`) need `q` to vanish fast
/// enough at the corner `(b, b)` when `γ ≥ 2`.
pub fn elem_integral_1d(a: f64, b: f64, c: f64, d: f64, gamma: f64, q: &BivariatePoly) -> Result<f64> {
    if !(a < b && b <= c && c < d) {
        return domain(format!("ranges [{a},{b}] x [{c},{d}] are not ordered"));
    }
    if b.is_infinite() || c.is_infinite() {
        return domain("inner endpoints must be finite");
    }
    if a.is_infinite() && q.depends_on_x() {
        return domain("q must be independent of x on an unbounded x-range");
    }
    if d.is_infinite() && q.depends_on_y() {
        return domain("q must be independent of y on an unbounded y-range");
    }
    // x = b - ξ, y = c + η: expand Σ q_ij (b - ξ)^i (c + η)^j
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let qij = q.q[i][j];
            if qij == 0.0 {
                continue;
            }
            for k in 0..=i {
                // (b - ξ)^i = Σ_k C(i,k) b^{i-k} (-ξ)^k
                let xc = BINOM[i][k] * b.powi((i - k) as i32) * if k % 2 == 1 { -1.0 } else { 1.0 };
                for l in 0..=j {
                    let yc = BINOM[j][l] * c.powi((j - l) as i32);
                    r[k][l] += qij * xc * yc;
                }
            }
        }
    }
    wedge_integral(b - a, d - c, c - b, gamma, &r)
}

/// `∫_0^h ∫_0^h |x - y|^{2-γ} dy dx = 2 h^{4-γ} / ((3-γ)(4-γ))`: the
/// self-interaction of one element, where P1 differences factor as
/// `slope · (x - y)`.
pub fn same_interval_integral(h: f64, gamma: f64) -> Result<f64> {
    if !(gamma < 3.0) {
        return Err(Error::Singular(format!("self-interaction diverges for γ = {gamma}")));
    }
    Ok(2.0 * h.powf(4.0 - gamma) / ((3.0 - gamma) * (4.0 - gamma)))
}
