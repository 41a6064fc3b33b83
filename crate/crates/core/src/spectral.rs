//! Dense symmetric matrices, Jacobi eigendecomposition and orthogonal projectors.
//!
//! Everything here works on small dense operators stored row-major. The eigen
//! solver is the classical cyclic Jacobi method: slow for large `n` but
//! accurate to working precision and entirely deterministic, which the model
//! persistence relies on.

use crate::error::{check_dim, Error, Result};
use crate::scalar::{dot, norm_sq, Real};

const MAX_SWEEPS: usize = 100;

/// Real symmetric `n×n` operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> SymMatrix<T> {
    /// Builds a matrix from row-major entries, replacing it by `(M + Mᵀ)/2`.
    pub fn new(n: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "entry ({}, {}) is not finite",
                pos / n,
                pos % n
            )));
        }
        Ok(Self::symmetrized(n, data))
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend_from_slice(row);
        }
        Self::new(n, data)
    }

    fn symmetrized(n: usize, mut data: Vec<T>) -> Self {
        let half = T::lit(0.5);
        for i in 0..n {
            for j in (i + 1)..n {
                let v = (data[i * n + j] + data[j * n + i]) * half;
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self { n, data }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = T::one();
        }
        m
    }

    pub fn from_diag(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * n + i] = d;
        }
        m
    }

    /// The rank-one operator `v vᵀ`.
    pub fn outer(v: &[T]) -> Self {
        let n = v.len();
        let mut data = Vec::with_capacity(n * n);
        for &a in v {
            data.extend(v.iter().map(|&b| a * b));
        }
        Self { n, data }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, v| acc.max(v.abs()))
    }

    pub fn frobenius(&self) -> T {
        norm_sq(&self.data).sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |acc, (&a, &b)| acc.max((a - b).abs()))
    }

    pub fn scale(&self, alpha: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| v * alpha).collect(),
        }
    }

    /// `alpha·self + beta·other`.
    pub fn lin_comb(&self, alpha: T, other: &Self, beta: T) -> Result<Self> {
        check_dim(self.n, other.n)?;
        Ok(Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| alpha * a + beta * b)
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.lin_comb(T::one(), other, T::one())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.lin_comb(T::one(), other, -T::one())
    }

    /// Matrix–vector product `M x`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.n, x.len())?;
        Ok((0..self.n).map(|i| dot(self.row(i), x)).collect())
    }

    /// The quadratic form `⟨Mx, x⟩`.
    pub fn quadratic(&self, x: &[T]) -> Result<T> {
        Ok(dot(&self.apply(x)?, x))
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<T> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut acc = T::zero();
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        Ok(acc)
    }

    /// General (not necessarily symmetric) product, row-major.
    pub fn matmul(&self, other: &Self) -> Result<Vec<T>> {
        check_dim(self.n, other.n)?;
        let n = self.n;
        let mut out = vec![T::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let eig = sym_eig(self)?;
        Ok(eig.values.last().copied().unwrap_or_else(T::zero))
    }

    /// Whether the smallest eigenvalue is at least `-1e-9·tr` (plus a few ulps
    /// of the largest entry so that exact zeros survive rounding).
    pub fn is_psd(&self) -> Result<(bool, T)> {
        let min = self.min_eigenvalue()?;
        let floor =
            T::tol(1e-9) * self.trace().abs() + T::epsilon() * T::lit(64.0) * self.max_abs();
        Ok((min >= -floor, min))
    }
}

/// Eigenvalues in descending order with matching unit eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    values: Vec<T>,
    /// Row-major `n×n`; column `k` is the eigenvector of `values[k]`.
    vectors: Vec<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn vector(&self, k: usize) -> Vec<T> {
        let n = self.dim();
        (0..n).map(|i| self.vectors[i * n + k]).collect()
    }

    pub fn vectors(&self) -> Vec<Vec<T>> {
        (0..self.dim()).map(|k| self.vector(k)).collect()
    }

    /// `V diag(λ) Vᵀ`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let n = self.dim();
        let mut data = vec![T::zero(); n * n];
        for (k, &lambda) in self.values.iter().enumerate() {
            for i in 0..n {
                let vik = self.vectors[i * n + k] * lambda;
                for j in 0..n {
                    data[i * n + j] += vik * self.vectors[j * n + k];
                }
            }
        }
        SymMatrix::symmetrized(n, data)
    }

    /// Projector onto the span of the eigenvectors whose eigenvalue satisfies `keep`.
    pub fn projector_where<F: Fn(T) -> bool>(&self, keep: F) -> Projector<T> {
        let basis: Vec<Vec<T>> = self
            .values
            .iter()
            .enumerate()
            .filter(|(_, &l)| keep(l))
            .map(|(k, _)| self.vector(k))
            .collect();
        Projector::from_orthonormal(self.dim(), &basis)
    }

    /// `max |VᵀV − I|`.
    pub fn orthonormality_error(&self) -> T {
        let n = self.dim();
        let mut worst = T::zero();
        for a in 0..n {
            for b in 0..n {
                let mut s = T::zero();
                for i in 0..n {
                    s += self.vectors[i * n + a] * self.vectors[i * n + b];
                }
                let target = if a == b { T::one() } else { T::zero() };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Iterates until the off-diagonal Frobenius norm drops below
/// `1e-14·(1 + ‖M‖_F)`. Eigenvalues come back in descending order and each
/// eigenvector has its first component of magnitude above `1e-12` positive,
/// so the output is a deterministic function of the input.
pub fn sym_eig<T: Real>(m: &SymMatrix<T>) -> Result<EigenDecomposition<T>> {
    if let Some(pos) = m.data.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidMatrix(format!(
            "entry ({}, {}) is not finite",
            pos / m.n.max(1),
            pos % m.n.max(1)
        )));
    }
    let n = m.n;
    let mut a = m.data.clone();
    let mut v = SymMatrix::<T>::identity(n).data;
    let threshold = T::tol(1e-14) * (T::one() + m.frobenius());

    let off_norm = |a: &[T]| -> T {
        let mut s = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        if off_norm(&a) <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (apq + apq);
                let t = T::one().copysign(theta) / (theta.abs() + theta.hypot(T::one()));
                let c = T::one() / t.hypot(T::one());
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = T::zero();
                a[q * n + p] = T::zero();

                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged && off_norm(&a) > threshold {
        return Err(Error::NoConvergence(MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let sign_floor = T::lit(1e-12);
    let values: Vec<T> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (col, &k) in order.iter().enumerate() {
        let lead = (0..n)
            .map(|i| v[i * n + k])
            .find(|x| x.abs() > sign_floor)
            .unwrap_or_else(T::one);
        let sign = if lead < T::zero() {
            -T::one()
        } else {
            T::one()
        };
        for i in 0..n {
            vectors[i * n + col] = sign * v[i * n + k];
        }
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Orthogonal projector: a symmetric idempotent operator with its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector<T> {
    matrix: SymMatrix<T>,
    rank: usize,
}

impl<T: Real> Projector<T> {
    pub fn zero(n: usize) -> Self {
        Self {
            matrix: SymMatrix::zeros(n),
            rank: 0,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: SymMatrix::identity(n),
            rank: n,
        }
    }

    /// `Σ uᵢuᵢᵀ` for vectors already known to be orthonormal.
    pub(crate) fn from_orthonormal(n: usize, basis: &[Vec<T>]) -> Self {
        let mut data = vec![T::zero(); n * n];
        for u in basis {
            for i in 0..n {
                for j in 0..n {
                    data[i * n + j] += u[i] * u[j];
                }
            }
        }
        Self {
            matrix: SymMatrix::symmetrized(n, data),
            rank: basis.len(),
        }
    }

    /// Projector onto the span of `vectors`; see [`projector_from_basis`].
    pub fn from_basis(n: usize, vectors: &[Vec<T>]) -> Result<Self> {
        projector_from_basis(n, vectors)
    }

    /// Accepts a matrix as a projector after checking idempotence and that
    /// its trace is an integer.
    pub fn from_matrix(matrix: SymMatrix<T>) -> Result<Self> {
        let n = matrix.dim();
        let square = SymMatrix::new(n, matrix.matmul(&matrix)?)
            .map_err(|e| Error::NotProjector(e.to_string()))?;
        let idem = square.max_abs_diff(&matrix);
        if idem > T::tol(1e-9) {
            return Err(Error::NotProjector(format!("‖P² − P‖ = {idem:e}")));
        }
        let tr = matrix.trace();
        let rank = tr.round();
        if (tr - rank).abs() > T::tol(1e-8) || rank < T::zero() {
            return Err(Error::NotProjector(format!("trace {tr} is not an integer")));
        }
        Ok(Self {
            matrix,
            rank: rank.to_usize().unwrap_or(0),
        })
    }

    pub fn matrix(&self) -> &SymMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> SymMatrix<T> {
        self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        self.matrix.apply(x)
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        complement(self)
    }

    /// Orthonormal basis of the range (eigenvectors with eigenvalue near 1).
    pub fn range_basis(&self) -> Result<Vec<Vec<T>>> {
        let eig = sym_eig(&self.matrix)?;
        Ok((0..self.rank).map(|k| eig.vector(k)).collect())
    }
}

/// Projector onto the span of `vectors` in `ℝⁿ`.
///
/// The input is orthonormalized by modified Gram–Schmidt (two passes per
/// vector). A vector whose residual norm is at most `1e-10` times the largest
/// input norm is linearly dependent and is dropped.
pub fn projector_from_basis<T: Real>(n: usize, vectors: &[Vec<T>]) -> Result<Projector<T>> {
    for v in vectors {
        check_dim(n, v.len())?;
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMatrix(
                "basis vector has non-finite entries".into(),
            ));
        }
    }
    let max_norm = vectors
        .iter()
        .map(|v| norm_sq(v).sqrt())
        .fold(T::zero(), T::max);
    let drop_tol = T::tol(1e-10) * max_norm;

    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&w, u);
                for (wi, &ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let norm = norm_sq(&w).sqrt();
        if norm > drop_tol && norm > T::zero() {
            w.iter_mut().for_each(|x| *x /= norm);
            basis.push(w);
        }
    }
    Ok(Projector::from_orthonormal(n, &basis))
}

/// Orthogonal complement `I − P`.
pub fn complement<T: Real>(p: &Projector<T>) -> Projector<T> {
    let n = p.dim();
    let mut data = p.matrix.data.iter().map(|&v| -v).collect::<Vec<_>>();
    for i in 0..n {
        data[i * n + i] += T::one();
    }
    Projector {
        matrix: SymMatrix { n, data },
        rank: n - p.rank,
    }
}
