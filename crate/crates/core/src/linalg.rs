//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Matrices are stored row-major as flat `Vec<Complex64>`. Dimensions stay
//! small (a few thousand at most, enforced by guards at the call sites that
//! can grow), so everything here is straightforward dense arithmetic.
//! Hermitian eigendecomposition is delegated to nalgebra; the rest is
//! hand-rolled.
//!
//! Conventions:
//! - `dagger` is the conjugate transpose.
//! - [`trace_distance`] is the unnormalized trace norm `‖a − b‖₁`, so
//!   orthogonal pure states are at distance 2.
//! - Spectral calculus ([`matrix_function`]) clips eigenvalues in
//!   `[-1e-8, 0)` to zero and rejects anything more negative.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Tolerance below which an operator passed to [`eig_hermitian`] may deviate
/// from its own conjugate transpose.
pub const HERMITIAN_TOL: f64 = 1e-8;
/// Stricter hermiticity demanded of a [`DensityOperator`].
pub const DENSITY_HERMITIAN_TOL: f64 = 1e-10;
/// Allowed deviation of a density operator's trace from 1.
pub const DENSITY_TRACE_TOL: f64 = 1e-10;
/// Most negative eigenvalue a density operator may carry (float noise).
pub const DENSITY_EIG_FLOOR: f64 = -1e-10;
/// Eigenvalues below this are a positivity violation; in `[PSD_EIG_FLOOR, 0)`
/// they are treated as exact zeros.
pub const PSD_EIG_FLOOR: f64 = -1e-8;
/// Eigenvalues at or below this threshold count as kernel for pseudo-inverse
/// style spectral functions.
pub const PSEUDO_INVERSE_THRESHOLD: f64 = 1e-10;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix needs {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Diagonal matrix from real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(d, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of a non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Kronecker product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i1 in 0..self.rows {
            for j1 in 0..self.cols {
                let a = self[(i1, j1)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for i2 in 0..other.rows {
                    for j2 in 0..other.cols {
                        out[(i1 * other.rows + i2, j1 * other.cols + j2)] = a * other[(i2, j2)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise absolute difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from the conjugate transpose, `max |m - m†|`.
    pub fn hermitian_deviation(&self) -> f64 {
        assert!(self.is_square());
        let mut dev: f64 = 0.0;
        for i in 0..self.rows {
            for j in i..self.cols {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.hermitian_deviation() <= tol
    }

    /// `(m + m†)/2`, the Hermitian part.
    pub fn symmetrized(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix add shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "matrix sub shape");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matrix mul shape");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let lhs_row = i * rhs.cols;
                let rhs_row = k * rhs.cols;
                for j in 0..rhs.cols {
                    out.data[lhs_row + j] += a * rhs.data[rhs_row + j];
                }
            }
        }
        out
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// `Tr{a b}` without forming the product matrix.
pub fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex64 {
    assert_eq!(a.cols, b.rows);
    assert_eq!(a.rows, b.cols);
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..a.rows {
        for j in 0..a.cols {
            t += a[(i, j)] * b[(j, i)];
        }
    }
    t
}

/// `a b a†`.
pub fn conjugate_by(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    &(a * b) * &a.dagger()
}

/// Standard basis column vector `|k⟩` of dimension `d`, as a `d × 1` matrix.
pub fn basis_vector(d: usize, k: usize) -> ComplexMatrix {
    assert!(k < d);
    let mut v = ComplexMatrix::zeros(d, 1);
    v[(k, 0)] = Complex64::new(1.0, 0.0);
    v
}

/// Outer product `|a⟩⟨b|` of two column vectors.
pub fn outer_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.cols(), 1);
    assert_eq!(b.cols(), 1);
    ComplexMatrix::from_fn(a.rows(), b.rows(), |i, j| a[(i, 0)] * b[(j, 0)].conj())
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues in descending
/// order with matching orthonormal eigenvector columns.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl SpectralDecomposition {
    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Unitary whose `k`-th column is the eigenvector for `eigenvalues()[k]`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvector `k` as a column vector.
    pub fn eigenvector(&self, k: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim(), 1, |i, _| self.eigenvectors[(i, k)])
    }

    /// `V f(Λ) V†` for the given spectrum map.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let values: Vec<f64> = self.eigenvalues.iter().map(|&v| f(v)).collect();
        self.apply_spectrum(&values)
    }

    /// `V diag(values) V†` with one value per eigenvector column.
    pub fn apply_spectrum(&self, values: &[f64]) -> ComplexMatrix {
        let d = self.dim();
        assert_eq!(values.len(), d, "one spectrum value per eigenvector");
        let mut scaled = ComplexMatrix::zeros(d, d);
        for k in 0..d {
            let fv = values[k];
            if fv == 0.0 {
                continue;
            }
            for i in 0..d {
                scaled[(i, k)] = self.eigenvectors[(i, k)] * fv;
            }
        }
        &scaled * &self.eigenvectors.dagger()
    }

    /// `V Λ V†`; equal to the decomposed matrix up to float noise.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// Eigenvalues reinterpreted as probabilities: tiny negatives (down to
    /// [`PSD_EIG_FLOOR`]) become 0, anything below is a positivity error.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        self.eigenvalues.iter().map(|&v| clip_eigenvalue(v)).collect()
    }
}

fn clip_eigenvalue(v: f64) -> Result<f64> {
    if v >= 0.0 {
        Ok(v)
    } else if v >= PSD_EIG_FLOOR {
        Ok(0.0)
    } else {
        Err(Error::NotPositiveSemidefinite { eigenvalue: v })
    }
}

/// Hermitian eigendecomposition.
///
/// `m` must be Hermitian within [`HERMITIAN_TOL`]; it is symmetrized before
/// decomposition so accumulated float asymmetry cannot leak into the result.
pub fn eig_hermitian(m: &ComplexMatrix) -> Result<SpectralDecomposition> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermitian_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation: dev, tolerance: HERMITIAN_TOL });
    }
    let d = m.rows();
    if d == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    let se = m.symmetrized().to_nalgebra().symmetric_eigen();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[b]
            .partial_cmp(&se.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let eigenvectors =
        ComplexMatrix::from_fn(d, d, |i, j| se.eigenvectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// Spectral functions applied through [`matrix_function`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFn {
    /// Principal square root of a PSD matrix.
    Sqrt,
    /// `λ ↦ λ^{-1/2}` on the support, 0 on the kernel
    /// (eigenvalues ≤ [`PSEUDO_INVERSE_THRESHOLD`]).
    InvSqrtPseudo,
    /// `λ ↦ log₂ λ` on the support, 0 on the kernel.
    Log2,
}

/// Applies `f` to a Hermitian PSD matrix by spectral calculus.
///
/// Eigenvalues in `[-1e-8, 0)` are clipped to zero; anything lower is a
/// positivity error.
pub fn matrix_function(m: &ComplexMatrix, f: MatrixFn) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(m)?;
    let probs = spec.probabilities()?;
    let d = spec.dim();
    let mapped: Vec<f64> = (0..d)
        .map(|k| {
            let v = probs[k];
            match f {
                MatrixFn::Sqrt => v.sqrt(),
                MatrixFn::InvSqrtPseudo => {
                    if v <= PSEUDO_INVERSE_THRESHOLD {
                        0.0
                    } else {
                        1.0 / v.sqrt()
                    }
                }
                MatrixFn::Log2 => {
                    if v <= PSEUDO_INVERSE_THRESHOLD {
                        0.0
                    } else {
                        v.log2()
                    }
                }
            }
        })
        .collect();
    Ok(spec.apply_spectrum(&mapped))
}

/// Projector onto the support of a Hermitian PSD matrix
/// (eigenvalues above [`PSEUDO_INVERSE_THRESHOLD`]).
pub fn support_projector(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spec = eig_hermitian(m)?;
    Ok(spec.apply(|v| if v > PSEUDO_INVERSE_THRESHOLD { 1.0 } else { 0.0 }))
}

/// Which tensor factor [`partial_trace`] keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    First,
    Second,
}

/// Partial trace of an operator on a bipartite space of dimensions
/// `(d1, d2)`, keeping the requested factor.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    d1: usize,
    d2: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if m.rows() != d1 * d2 || m.cols() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace over {}x{} factors needs a {}x{} matrix, got {}x{}",
            d1,
            d2,
            d1 * d2,
            d1 * d2,
            m.rows(),
            m.cols()
        )));
    }
    let out = match keep {
        Subsystem::First => ComplexMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
        Subsystem::Second => ComplexMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
        }),
    };
    Ok(out)
}

/// Trace norm `‖m‖₁ = Σ |λᵢ|` of a Hermitian matrix.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    let spec = eig_hermitian(m)?;
    Ok(spec.eigenvalues().iter().map(|v| v.abs()).sum())
}

/// Unnormalized trace distance `‖a − b‖₁` between two Hermitian operators.
///
/// For density operators the value lies in `[0, 2]`, with orthogonal pure
/// states at distance 2.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(Error::DimensionMismatch(format!(
            "trace distance between {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    trace_norm(&(a - b))
}

/// Validated density operator: Hermitian, unit trace, positive semidefinite
/// within tight float tolerances.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "density operator must be square, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let dev = matrix.hermitian_deviation();
        if dev > DENSITY_HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation: dev, tolerance: DENSITY_HERMITIAN_TOL });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > DENSITY_TRACE_TOL || tr.im.abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr.re, tolerance: DENSITY_TRACE_TOL });
        }
        let spec = eig_hermitian(&matrix)?;
        if let Some(&min) = spec.eigenvalues().last() {
            if min < DENSITY_EIG_FLOOR {
                return Err(Error::NotPositiveSemidefinite { eigenvalue: min });
            }
        }
        Ok(Self { matrix })
    }

    /// `I/d`.
    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64) }
    }

    /// `|ψ⟩⟨ψ|` from a normalized column vector.
    pub fn pure(state: &ComplexMatrix) -> Result<Self> {
        if state.cols() != 1 {
            return Err(Error::DimensionMismatch("pure state needs a column vector".into()));
        }
        let norm2: f64 = state.data().iter().map(|z| z.norm_sqr()).sum();
        if (norm2 - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "pure state vector has squared norm {norm2:.12}, expected 1"
            )));
        }
        Self::new(outer_product(state, state))
    }

    /// Diagonal density operator from a probability vector.
    pub fn from_probabilities(probs: &[f64]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        if probs.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > DENSITY_TRACE_TOL {
            return Err(Error::InvalidDistribution { sum, tolerance: DENSITY_TRACE_TOL });
        }
        Ok(Self { matrix: ComplexMatrix::from_real_diag(probs) })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// Partial trace onto one factor of a `(d1, d2)` split.
    pub fn partial_trace(&self, d1: usize, d2: usize, keep: Subsystem) -> Result<DensityOperator> {
        let reduced = partial_trace_matrix(&self.matrix, d1, d2, keep)?;
        // Partial tracing preserves all three invariants, so revalidation is
        // a cheap safety net rather than a requirement.
        DensityOperator::new(reduced)
    }
}
