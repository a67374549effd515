//! Dense symmetric/Hermitian eigensolvers and symmetric tridiagonal tools.
//!
//! Householder reduction to tridiagonal form followed by the implicit QL
//! iteration (the EISPACK `tred2`/`tql2` pair), written generically over
//! [`Real`]. Hermitian matrices are handled through the real symmetric
//! embedding `[[A, -B], [B, A]]` of `A + iB`, whose spectrum is that of the
//! Hermitian matrix with every eigenvalue doubled.

use thiserror::Error;

use crate::scalar::{Cx, Real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("QL iteration did not converge for eigenvalue {0}")]
    NoConvergence(usize),
    #[error("matrix is not square: {len} entries for dimension {dim}")]
    Shape { len: usize, dim: usize },
}

const MAX_QL_SWEEPS: usize = 60;

/// Eigen-decomposition of a real symmetric matrix stored row-major.
/// Returns ascending eigenvalues and, if requested, the eigenvectors as
/// columns of a row-major `n × n` matrix.
pub fn symmetric_eigen<T: Real>(
    a: &[T],
    n: usize,
    vectors: bool,
) -> Result<(Vec<T>, Option<Vec<T>>), EigenError> {
    if a.len() != n * n {
        return Err(EigenError::Shape { len: a.len(), dim: n });
    }
    if a.iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    if n == 0 {
        return Ok((Vec::new(), vectors.then(Vec::new)));
    }
    let mut v = a.to_vec();
    let mut d = vec![T::zero(); n];
    let mut e = vec![T::zero(); n];
    tred2(&mut v, &mut d, &mut e, n);
    tql2(&mut v, &mut d, &mut e, n, vectors)?;
    Ok((d, vectors.then_some(v)))
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues<T: Real>(a: &[T], n: usize) -> Result<Vec<T>, EigenError> {
    symmetric_eigen(a, n, false).map(|(d, _)| d)
}

/// Ascending eigenvalues of a Hermitian matrix stored row-major.
pub fn hermitian_eigenvalues<T: Real>(a: &[Cx<T>], n: usize) -> Result<Vec<T>, EigenError> {
    if a.len() != n * n {
        return Err(EigenError::Shape { len: a.len(), dim: n });
    }
    if a.iter().all(|z| z.im.is_zero()) {
        let re: Vec<T> = a.iter().map(|z| z.re).collect();
        return symmetric_eigenvalues(&re, n);
    }
    let m = 2 * n;
    let mut big = vec![T::zero(); m * m];
    for i in 0..n {
        for j in 0..n {
            let z = a[i * n + j];
            big[i * m + j] = z.re;
            big[(i + n) * m + j + n] = z.re;
            big[i * m + j + n] = -z.im;
            big[(i + n) * m + j] = z.im;
        }
    }
    let all = symmetric_eigenvalues(&big, m)?;
    Ok(all.into_iter().step_by(2).collect())
}

fn tred2<T: Real>(v: &mut [T], d: &mut [T], e: &mut [T], n: usize) {
    let idx = |i: usize, j: usize| i * n + j;
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = T::zero();
        let mut h = T::zero();
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale.is_zero() {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
                v[idx(j, i)] = T::zero();
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > T::zero() {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = T::zero();
            }
            for j in 0..i {
                f = d[j];
                v[idx(j, i)] = f;
                g = e[j] + v[idx(j, j)] * f;
                for k in (j + 1)..i {
                    g += v[idx(k, j)] * d[k];
                    e[k] += v[idx(k, j)] * f;
                }
                e[j] = g;
            }
            f = T::zero();
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    let upd = f * e[k] + g * d[k];
                    v[idx(k, j)] -= upd;
                }
                d[j] = v[idx(i - 1, j)];
                v[idx(i, j)] = T::zero();
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[idx(n - 1, i)] = v[idx(i, i)];
        v[idx(i, i)] = T::one();
        let h = d[i + 1];
        if !h.is_zero() {
            for k in 0..=i {
                d[k] = v[idx(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = T::zero();
                for k in 0..=i {
                    g += v[idx(k, i + 1)] * v[idx(k, j)];
                }
                for k in 0..=i {
                    let upd = g * d[k];
                    v[idx(k, j)] -= upd;
                }
            }
        }
        for k in 0..=i {
            v[idx(k, i + 1)] = T::zero();
        }
    }
    for j in 0..n {
        d[j] = v[idx(n - 1, j)];
        v[idx(n - 1, j)] = T::zero();
    }
    v[idx(n - 1, n - 1)] = T::one();
    e[0] = T::zero();
}

fn tql2<T: Real>(
    v: &mut [T],
    d: &mut [T],
    e: &mut [T],
    n: usize,
    vectors: bool,
) -> Result<(), EigenError> {
    let idx = |i: usize, j: usize| i * n + j;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = T::zero();
    let mut f = T::zero();
    let mut tst1 = T::zero();
    let eps = T::epsilon();
    let two = T::lit(2.0);
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            return Err(EigenError::NoConvergence(l));
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > MAX_QL_SWEEPS {
                    return Err(EigenError::NoConvergence(l));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(T::one());
                if p < T::zero() {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = T::one();
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = T::zero();
                let mut s2 = T::zero();
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    if vectors {
                        for k in 0..n {
                            let hk = v[idx(k, i + 1)];
                            v[idx(k, i + 1)] = s * v[idx(k, i)] + c * hk;
                            v[idx(k, i)] = c * v[idx(k, i)] - s * hk;
                        }
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if !(e[l].abs() > eps * tst1) {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = T::zero();
    }
    if d.iter().any(|x| !x.is_finite()) {
        return Err(EigenError::NonFinite);
    }
    // selection sort keeps eigenvector columns paired
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            if vectors {
                for row in 0..n {
                    v.swap(idx(row, i), idx(row, k));
                }
            }
        }
    }
    Ok(())
}

/// Symmetric tridiagonal matrix with diagonal `diag` and off-diagonal `off`.
#[derive(Debug, Clone)]
pub struct Tridiagonal<T> {
    pub diag: Vec<T>,
    pub off: Vec<T>,
}

impl<T: Real> Tridiagonal<T> {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.len() {
            let coupling = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1] / q
            };
            q = self.diag[i] - x - coupling;
            if q.is_zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (T, T) {
        let n = self.len();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < n { self.off[i].abs() } else { T::zero() };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> T {
        let (mut lo, mut hi) = self.bounds();
        let eps = T::epsilon();
        for _ in 0..400 {
            let mid = (lo + hi) * T::lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= eps * (lo.abs().max(hi.abs())) {
                break;
            }
        }
        (lo + hi) * T::lit(0.5)
    }

    /// Eigenvector for eigenvalue `lambda` by inverse iteration, unit
    /// Euclidean norm, sign fixed so that the largest component is positive.
    pub fn eigenvector(&self, lambda: T) -> Vec<T> {
        let n = self.len();
        let mut x: Vec<T> = (0..n)
            .map(|i| T::one() + T::lit(0.01) * T::from_usize(i % 7).unwrap_or_else(T::zero))
            .collect();
        let shifted: Vec<T> = self.diag.iter().map(|&d| d - lambda).collect();
        for _ in 0..3 {
            solve_tridiagonal(&self.off, &shifted, &self.off, &mut x);
            let norm = x.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
            if !(norm > T::zero()) || !norm.is_finite() {
                break;
            }
            for v in x.iter_mut() {
                *v /= norm;
            }
        }
        let peak = x
            .iter()
            .copied()
            .fold(T::zero(), |acc, v| if v.abs() > acc.abs() { v } else { acc });
        if peak < T::zero() {
            for v in x.iter_mut() {
                *v = -*v;
            }
        }
        x
    }
}

/// Solves a tridiagonal system in place with partial pivoting; `sub[i]` is
/// entry `(i+1, i)`, `sup[i]` entry `(i, i+1)`. Zero pivots are replaced by a
/// tiny value, which is what inverse iteration wants.
pub fn solve_tridiagonal<T: Real>(sub: &[T], diag: &[T], sup: &[T], rhs: &mut [T]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    let tiny = T::epsilon() * diag.iter().fold(T::one(), |acc, d| acc.max(d.abs()));
    let mut a = diag.to_vec();
    let mut b = sup.to_vec();
    let mut c = vec![T::zero(); n];
    let mut l = sub.to_vec();
    for i in 0..n.saturating_sub(1) {
        if l[i].abs() > a[i].abs() {
            std::mem::swap(&mut a[i], &mut l[i]);
            std::mem::swap(&mut b[i], &mut a[i + 1]);
            if i + 1 < n - 1 {
                std::mem::swap(&mut c[i], &mut b[i + 1]);
            }
            rhs.swap(i, i + 1);
        }
        if a[i].is_zero() {
            a[i] = tiny;
        }
        let f = l[i] / a[i];
        a[i + 1] -= f * b[i];
        if i + 1 < n - 1 {
            b[i + 1] -= f * c[i];
        }
        rhs[i + 1] -= f * rhs[i];
    }
    if a[n - 1].is_zero() {
        a[n - 1] = tiny;
    }
    rhs[n - 1] /= a[n - 1];
    if n >= 2 {
        rhs[n - 2] = (rhs[n - 2] - b[n - 2] * rhs[n - 1]) / a[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        rhs[i] = (rhs[i] - b[i] * rhs[i + 1] - c[i] * rhs[i + 2]) / a[i];
    }
}
