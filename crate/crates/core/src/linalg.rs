//! Dense symmetric linear algebra: packed storage, Cholesky, and a small
//! Jacobi eigensolver for Rayleigh-Ritz projections.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Symmetric matrix stored as its packed upper triangle, row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    order: usize,
    values: Vec<f64>,
}

#[inline]
fn packed_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i.wrapping_sub(1)) / 2 + (j - i)
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        Self {
            order,
            values: vec![0.0; order * (order + 1) / 2],
        }
    }

    pub fn from_packed(order: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != order * (order + 1) / 2 {
            return domain(format!(
                "packed length {} does not match order {order}",
                values.len()
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("packed matrix has non-finite entries");
        }
        Ok(Self { order, values })
    }

    /// Builds from a full row-major matrix, reading the upper triangle only.
    pub fn from_dense_upper(order: usize, dense: &[f64]) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            for j in i..order {
                m.values[packed_index(order, i, j)] = dense[i * order + j];
            }
        }
        m
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order);
        for i in 0..order {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, d);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn packed(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[packed_index(self.order, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.order, i, j);
        self.values[k] = v;
    }

    #[inline]
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let k = packed_index(self.order, i, j);
        self.values[k] += v;
    }

    /// Row `i` of the packed storage: entries `(i, i..n)`.
    pub fn upper_row(&self, i: usize) -> &[f64] {
        let start = packed_index(self.order, i, i);
        &self.values[start..start + self.order - i]
    }

    pub fn upper_row_mut(&mut self, i: usize) -> &mut [f64] {
        let start = packed_index(self.order, i, i);
        let n = self.order;
        &mut self.values[start..start + n - i]
    }

    /// `self + alpha * other`.
    pub fn axpy(&mut self, alpha: f64, other: &SymMatrix) {
        assert_eq!(self.order, other.order);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += alpha * b;
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = self.upper_row(i);
            let xi = x[i];
            let mut acc = row[0] * xi;
            for (k, &a) in row.iter().enumerate().skip(1) {
                let j = i + k;
                acc += a * x[j];
                y[j] += a * xi;
            }
            y[i] += acc;
        }
        y
    }

    /// `xᵀ A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        dot(x, &self.matvec(y))
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.order;
        let mut d = vec![0.0; n * n];
        for i in 0..n {
            for j in i..n {
                let v = self.get(i, j);
                d[i * n + j] = v;
                d[j * n + i] = v;
            }
        }
        d
    }

    pub fn cholesky(&self) -> Result<Cholesky> {
        Cholesky::factor(self)
    }
}

/// Lower-triangular Cholesky factor `A = L Lᵀ`, stored dense row-major.
#[derive(Debug, Clone)]
pub struct Cholesky {
    order: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.order();
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let (row_i, row_j) = (&l[i * n..i * n + j], &l[j * n..j * n + j]);
                let s = a.get(i, j) - dot(row_i, row_j);
                if i == j {
                    if !(s > 0.0) {
                        return Err(Error::Indefinite { pivot: i, value: s });
                    }
                    l[i * n + i] = s.sqrt();
                } else {
                    l[i * n + j] = s / l[j * n + j];
                }
            }
        }
        Ok(Self { order: n, lower: l })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn l(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.order + j]
    }

    /// Solves `L y = b` in place.
    pub fn forward(&self, b: &mut [f64]) {
        let n = self.order;
        for i in 0..n {
            let row = &self.lower[i * n..i * n + i];
            b[i] = (b[i] - dot(row, &b[..i])) / self.lower[i * n + i];
        }
    }

    /// Solves `Lᵀ x = y` in place.
    pub fn backward(&self, y: &mut [f64]) {
        let n = self.order;
        for i in (0..n).rev() {
            let xi = y[i] / self.lower[i * n + i];
            y[i] = xi;
            let row = &self.lower[i * n..i * n + i];
            for (yk, &lik) in y[..i].iter_mut().zip(row) {
                *yk -= lik * xi;
            }
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.order);
        let mut x = b.to_vec();
        self.forward(&mut x);
        self.backward(&mut x);
        x
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.order).map(|i| self.l(i, i)).collect()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    // four accumulators; keeps the result independent of thread count
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in 4 * chunks..a.len() {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Returns ascending eigenvalues and the matching column
/// eigenvectors (row-major `n x n`, column `k` is the `k`-th vector).
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[i * n + i] * m[i * n + i];
            for j in i + 1..n {
                off += m[i * n + j] * m[i * n + j];
            }
        }
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k * n + p];
                    let mkq = m[k * n + q];
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p * n + k];
                    let mqk = m[q * n + k];
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| m[a * n + a].total_cmp(&m[b * n + b]));
    let values = order.iter().map(|&k| m[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new, &old) in order.iter().enumerate() {
        for r in 0..n {
            vectors[r * n + new] = v[r * n + old];
        }
    }
    (values, vectors)
}

/// Lowest eigenpairs of the pencil `A x = λ B x` from blocked inverse
/// iteration `X ← A⁻¹ B X` with a Rayleigh–Ritz step each sweep.
#[derive(Debug, Clone)]
pub struct SubspaceResult {
    pub values: Vec<f64>,
    /// `B`-orthonormal eigenvectors.
    pub vectors: Vec<Vec<f64>>,
    /// `‖A x - λ B x‖_∞ / ‖A x‖_∞` per pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

pub fn subspace_iteration(
    a: &SymMatrix,
    a_factor: &Cholesky,
    b: &SymMatrix,
    k: usize,
    block: usize,
    tol: f64,
    max_iter: usize,
) -> Result<SubspaceResult> {
    let n = a.order();
    if k == 0 || k > n {
        return Err(Error::Domain(format!("cannot compute {k} eigenpairs of an order-{n} pencil")));
    }
    let block = block.clamp(k, n);
    // smooth start vectors with a little deterministic noise
    let mut seed = 0x9e3779b97f4a7c15u64;
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|j| {
            (0..n)
                .map(|i| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    let noise = (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                    let t = std::f64::consts::PI * (i + 1) as f64 / (n + 1) as f64;
                    ((j + 1) as f64 * t).sin() + 1e-3 * noise
                })
                .collect()
        })
        .collect();
    let mut worst = f64::INFINITY;
    for iter in 1..=max_iter {
        x = x.iter().map(|v| a_factor.solve(&b.matvec(v))).collect();
        let (values, vectors) = rayleigh_ritz(a, b, &x)?;
        x = vectors;
        let residuals: Vec<f64> = (0..k)
            .map(|j| {
                let ax = a.matvec(&x[j]);
                let bx = b.matvec(&x[j]);
                let r: Vec<f64> = ax.iter().zip(&bx).map(|(p, q)| p - values[j] * q).collect();
                norm_inf(&r) / norm_inf(&ax)
            })
            .collect();
        worst = residuals.iter().fold(0.0, |m: f64, r| m.max(*r));
        if worst <= tol {
            x.truncate(k);
            return Ok(SubspaceResult {
                values: values[..k].to_vec(),
                vectors: x,
                residuals,
                iterations: iter,
            });
        }
    }
    Err(Error::Convergence {
        iterations: max_iter,
        residual: worst,
        best: None,
    })
}

/// Ritz pairs of the pencil restricted to `span(x)`, ascending.
fn rayleigh_ritz(a: &SymMatrix, b: &SymMatrix, x: &[Vec<f64>]) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let m = x.len();
    let ax: Vec<Vec<f64>> = x.iter().map(|v| a.matvec(v)).collect();
    let bx: Vec<Vec<f64>> = x.iter().map(|v| b.matvec(v)).collect();
    let mut ar = SymMatrix::zeros(m);
    let mut br = SymMatrix::zeros(m);
    for i in 0..m {
        for j in i..m {
            ar.set(i, j, 0.5 * (dot(&x[i], &ax[j]) + dot(&x[j], &ax[i])));
            br.set(i, j, 0.5 * (dot(&x[i], &bx[j]) + dot(&x[j], &bx[i])));
        }
    }
    let lb = Cholesky::factor(&br)?;
    // C = L⁻¹ A L⁻ᵀ, built column by column
    let mut c = vec![0.0; m * m];
    let mut tmp = vec![vec![0.0; m]; m];
    for j in 0..m {
        let mut col: Vec<f64> = (0..m).map(|i| ar.get(i, j)).collect();
        lb.forward(&mut col);
        tmp[j] = col;
    }
    for i in 0..m {
        let mut row: Vec<f64> = (0..m).map(|j| tmp[j][i]).collect();
        lb.forward(&mut row);
        for j in 0..m {
            c[i * m + j] = row[j];
        }
    }
    for i in 0..m {
        for j in i + 1..m {
            let v = 0.5 * (c[i * m + j] + c[j * m + i]);
            c[i * m + j] = v;
            c[j * m + i] = v;
        }
    }
    let (values, w) = jacobi_eigen(&c, m);
    let n = x[0].len();
    let vectors = (0..m)
        .map(|k| {
            let mut y: Vec<f64> = (0..m).map(|i| w[i * m + k]).collect();
            lb.backward(&mut y);
            let mut v = vec![0.0; n];
            for (xi, yi) in x.iter().zip(&y) {
                for (vr, xr) in v.iter_mut().zip(xi) {
                    *vr += yi * xr;
                }
            }
            v
        })
        .collect();
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    fn random_spd(n: usize, seed: &mut u64) -> (SymMatrix, Vec<f64>) {
        let b: Vec<f64> = (0..n * n).map(|_| lcg(seed)).collect();
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = if i == j { 1.0 } else { 0.0 };
                for k in 0..n {
                    s += b[k * n + i] * b[k * n + j];
                }
                dense[i * n + j] = s;
            }
        }
        (SymMatrix::from_dense_upper(n, &dense), dense)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let f = SymMatrix::identity(5).cholesky().unwrap();
        let b = vec![1.0, -2.0, 3.0, 0.5, 7.0];
        assert_eq!(f.solve(&b), b);
    }

    #[test]
    fn diagonal_factor() {
        let f = SymMatrix::diagonal(&[4.0, 9.0]).cholesky().unwrap();
        assert_eq!(f.diag(), vec![2.0, 3.0]);
    }

    #[test]
    fn indefinite_reports_pivot() {
        let mut a = SymMatrix::identity(3);
        a.set(2, 2, -1.0);
        match a.cholesky() {
            Err(Error::Indefinite { pivot, .. }) => assert_eq!(pivot, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn random_spd_reconstruction_and_solve() {
        let mut seed = 7;
        let n = 50;
        let (a, dense) = random_spd(n, &mut seed);
        let f = a.cholesky().unwrap();
        let mut err: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for k in 0..=i.min(j) {
                    s += f.l(i, k) * f.l(j, k);
                }
                err = err.max((s - dense[i * n + j]).abs());
            }
        }
        assert!(err <= 1e-10, "reconstruction error {err}");
        let b: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
        let x = f.solve(&b);
        let r: Vec<f64> = a.matvec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        let rn = dot(&r, &r).sqrt();
        assert!(rn <= 1e-10 * dot(&b, &b).sqrt());
    }

    #[test]
    fn matvec_matches_dense_reference() {
        let mut seed = 11;
        for n in [1, 2, 7, 33] {
            let dense_raw: Vec<f64> = (0..n * n).map(|_| lcg(&mut seed)).collect();
            let a = SymMatrix::from_dense_upper(n, &dense_raw);
            let full = a.to_dense();
            let x: Vec<f64> = (0..n).map(|_| lcg(&mut seed)).collect();
            let y = a.matvec(&x);
            for i in 0..n {
                let r: f64 = (0..n).map(|j| full[i * n + j] * x[j]).sum();
                assert!((r - y[i]).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn packed_validation() {
        assert!(SymMatrix::from_packed(3, vec![0.0; 5]).is_err());
        assert!(SymMatrix::from_packed(2, vec![1.0, f64::NAN, 1.0]).is_err());
        let m = SymMatrix::from_packed(2, vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m.get(1, 0), 2.0);
        assert_eq!(m.upper_row(1), &[3.0]);
    }

    #[test]
    fn subspace_iteration_on_diagonal_pencil() {
        let a = SymMatrix::diagonal(&[2.0, 5.0, 9.0]);
        let b = SymMatrix::identity(3);
        let f = a.cholesky().unwrap();
        let r = subspace_iteration(&a, &f, &b, 2, 4, 1e-12, 500).unwrap();
        assert!((r.values[0] - 2.0).abs() < 1e-12 && (r.values[1] - 5.0).abs() < 1e-12);
        assert!((r.vectors[0][0].abs() - 1.0).abs() < 1e-10);
        assert!((r.vectors[1][1].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn subspace_iteration_generalized_pencil() {
        // A = tridiag(-1, 2, -1), B = I/h scaled: λ_k = 4 sin²(kπ/(2(n+1))) / 3
        let n = 40;
        let mut a = SymMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, 2.0);
            if i + 1 < n {
                a.set(i, i + 1, -1.0);
            }
        }
        let b = SymMatrix::diagonal(&vec![3.0; n]);
        let f = a.cholesky().unwrap();
        let r = subspace_iteration(&a, &f, &b, 3, 5, 1e-10, 500).unwrap();
        for k in 0..3 {
            let t = ((k + 1) as f64 * std::f64::consts::PI / (2.0 * (n + 1) as f64)).sin();
            assert!((r.values[k] - 4.0 * t * t / 3.0).abs() < 1e-10 * r.values[k]);
            let bn = b.bilinear(&r.vectors[k], &r.vectors[k]);
            assert!((bn - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_diagonalizes() {
        let a = [2.0, 1.0, 0.0, 1.0, 2.0, 0.0, 0.0, 0.0, 5.0];
        let (vals, vecs) = jacobi_eigen(&a, 3);
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] - 3.0).abs() < 1e-14);
        assert!((vals[2] - 5.0).abs() < 1e-14);
        let v0 = [vecs[0], vecs[3], vecs[6]];
        assert!((v0[0] + v0[1]).abs() < 1e-14 && v0[2].abs() < 1e-14);
    }
}
