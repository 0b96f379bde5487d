//! Dense square complex matrices standing in for bounded operators on a
//! finite-dimensional Hilbert space.
//!
//! The spectral quantities (operator norm, absolute value `|A| = (A*A)^{1/2}`)
//! all go through the Hermitian eigenproblem of `A*A`, which keeps every
//! result deterministic for identical input.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_SWEEPS: usize = 10_000;

/// Square complex matrix. Entries are always finite.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct CMatrix {
    data: DMatrix<Complex64>,
}

impl CMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("matrix dimension must be at least 1"));
        }
        if entries.len() != dim * dim {
            return Err(invalid(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().find(|z| !z.is_finite()) {
            return Err(invalid(format!("non-finite matrix entry {bad}")));
        }
        Ok(Self {
            data: DMatrix::from_row_slice(dim, dim, &entries),
        })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|row| row.len() != dim) {
            return Err(invalid("matrix rows must form a square"));
        }
        Self::new(dim, rows.concat())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            data: DMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, Complex64::new(1.0, 0.0))
    }

    /// `alpha * I`.
    pub fn scalar(dim: usize, alpha: Complex64) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            data: DMatrix::from_diagonal_element(dim, dim, alpha),
        }
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        assert!(!diag.is_empty(), "matrix dimension must be at least 1");
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[(i, i)] = d;
        }
        m
    }

    pub(crate) fn from_dmatrix(data: DMatrix<Complex64>) -> Self {
        debug_assert!(data.is_square());
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[(row, col)] = value;
    }

    /// Row-major copy of the entries.
    pub fn to_rows(&self) -> Vec<Vec<Complex64>> {
        (0..self.dim())
            .map(|i| (0..self.dim()).map(|j| self.data[(i, j)]).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    fn is_diagonal(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| (0..d).all(|j| i == j || self.data[(i, j)] == Complex64::new(0.0, 0.0)))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        Self {
            data: &self.data * alpha,
        }
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.scale(Complex64::new(alpha, 0.0))
    }

    /// `self += alpha * other`, the inner loop of every series convolution.
    pub(crate) fn add_scaled_assign(&mut self, alpha: Complex64, other: &CMatrix) {
        debug_assert_eq!(self.dim(), other.dim());
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += alpha * b;
        }
    }

    /// `self += a * b`.
    pub(crate) fn add_product_assign(&mut self, a: &CMatrix, b: &CMatrix) {
        self.data.gemm(
            Complex64::new(1.0, 0.0),
            &a.data,
            &b.data,
            Complex64::new(1.0, 0.0),
        );
    }

    fn ensure_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(invalid("matrix has non-finite entries"))
        }
    }

    /// Eigenvalues (ascending) and eigenvectors of the Hermitian matrix `A*A`.
    fn gram_eigen(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let gram = self.data.adjoint() * &self.data;
        let eig = gram
            .clone()
            .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_SWEEPS)
            .ok_or_else(|| {
                Error::Numerical(format!(
                    "Hermitian eigensolver did not converge in {EIGEN_MAX_SWEEPS} sweeps \
                     (dim {}, trace of A*A = {:e})",
                    self.dim(),
                    gram.trace().re
                ))
            })?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("non-finite eigenvalue of A*A".into()));
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let vectors = DMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            eig.eigenvectors[(i, order[j])]
        });
        values = order.iter().map(|&i| values[i]).collect();
        Ok((values, vectors))
    }

    /// Operator norm, i.e. the largest singular value.
    pub fn op_norm(&self) -> Result<f64> {
        self.ensure_finite()?;
        if self.is_diagonal() {
            return Ok(self.data.diagonal().iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        let (values, _) = self.gram_eigen()?;
        Ok(values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
    }

    /// `|A| = (A*A)^{1/2}`.
    pub fn abs_op(&self) -> Result<CMatrix> {
        self.ensure_finite()?;
        if self.is_diagonal() {
            let diag: Vec<Complex64> = self
                .data
                .diagonal()
                .iter()
                .map(|z| Complex64::new(z.norm(), 0.0))
                .collect();
            return Ok(Self::from_diagonal(&diag));
        }
        let (values, vectors) = self.gram_eigen()?;
        let roots = values
            .iter()
            .map(|&v| Complex64::new(v.max(0.0).sqrt(), 0.0))
            .collect::<Vec<_>>();
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
        let root = &vectors * diag * vectors.adjoint();
        // Symmetrise away the rounding asymmetry of V D V*.
        let herm = (&root + root.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(Self { data: herm })
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.ensure_finite()?;
        let eig = self
            .data
            .clone()
            .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_SWEEPS)
            .ok_or_else(|| Error::Numerical("Hermitian eigensolver did not converge".into()))?;
        let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        Ok(values)
    }

    /// Largest entrywise deviation from `A = A*`.
    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                worst = worst.max((self.data[(i, j)] - self.data[(j, i)].conj()).norm());
            }
        }
        worst
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CMatrix")
            .field("dim", &self.dim())
            .field("rows", &self.to_rows())
            .finish()
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;

    fn add(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        CMatrix {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;

    fn sub(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        CMatrix {
            data: &self.data - &rhs.data,
        }
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;

    fn mul(self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.dim(), rhs.dim(), "matrix dimension mismatch");
        CMatrix {
            data: &self.data * &rhs.data,
        }
    }
}

impl Neg for &CMatrix {
    type Output = CMatrix;

    fn neg(self) -> CMatrix {
        CMatrix { data: -&self.data }
    }
}

/// Wire form: `{"dim": d, "entries": [[[re, im], ...], ...]}`, row-major.
#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

impl From<CMatrix> for MatrixRepr {
    fn from(m: CMatrix) -> Self {
        MatrixRepr {
            dim: m.dim(),
            entries: m
                .to_rows()
                .into_iter()
                .map(|row| row.into_iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<MatrixRepr> for CMatrix {
    type Error = Error;

    fn try_from(repr: MatrixRepr) -> Result<Self> {
        if repr.entries.len() != repr.dim {
            return Err(invalid(format!(
                "matrix declares dim {} but has {} rows",
                repr.dim,
                repr.entries.len()
            )));
        }
        let rows: Vec<Vec<Complex64>> = repr
            .entries
            .into_iter()
            .map(|row| row.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
            .collect();
        CMatrix::from_rows(&rows)
    }
}
