//! Dense complex Hermitian operators.
//!
//! Everything downstream (Hamiltonians, generators, density matrices, SLDs)
//! is a [`HermitianOperator`]. Storage is dense; the dimension cap for Pauli
//! construction defaults to [`DEFAULT_MAX_QUBITS`] qubits.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default cap on the number of qubits accepted by Pauli builders.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Relative tolerance on `|A - A^H|` accepted by [`HermitianOperator::new`].
pub const HERMITICITY_TOL: f64 = 1e-12;

pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// A dense Hermitian matrix.
#[derive(Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl fmt::Debug for HermitianOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HermitianOperator")
            .field("dim", &self.dim())
            .finish_non_exhaustive()
    }
}

impl HermitianOperator {
    /// Validates Hermiticity (relative to the largest entry) and finiteness,
    /// then stores the exactly Hermitian part `(A + A^H) / 2`.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::DimensionMismatch {
                expected: rows,
                found: cols,
            });
        }
        if rows == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        let mut scale: f64 = 0.0;
        for c in 0..cols {
            for r in 0..rows {
                let z = matrix[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFiniteEntry { row: r, col: c });
                }
                scale = scale.max(z.norm());
            }
        }
        let mut deviation: f64 = 0.0;
        for c in 0..cols {
            for r in 0..=c {
                deviation = deviation.max((matrix[(r, c)] - matrix[(c, r)].conj()).norm());
            }
        }
        let tolerance = HERMITICITY_TOL * scale;
        if deviation > tolerance {
            return Err(Error::NotHermitian {
                deviation,
                tolerance,
            });
        }
        Ok(Self::from_matrix_unchecked(hermitian_part(&matrix)))
    }

    pub(crate) fn from_matrix_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_real(matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(matrix.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        let d = diag.len();
        if d == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        if let Some(i) = diag.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFiniteEntry { row: i, col: i });
        }
        let mut m = CMatrix::zeros(d, d);
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = Complex64::new(x, 0.0);
        }
        Ok(Self::from_matrix_unchecked(m))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_matrix_unchecked(CMatrix::zeros(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    /// Schatten-2 (Frobenius) norm.
    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_matrix_unchecked(&self.matrix * Complex64::new(c, 0.0))
    }

    /// `A + c I`.
    pub fn shift(&self, c: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] += c;
        }
        Self::from_matrix_unchecked(m)
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(&self.matrix + &other.matrix))
    }

    /// `self + c * other`.
    pub fn try_add_scaled(&self, other: &Self, c: f64) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(Self::from_matrix_unchecked(
            &self.matrix + &other.matrix * Complex64::new(c, 0.0),
        ))
    }

    /// `U A U^H`. `u` is not checked for unitarity.
    pub fn conjugate_by(&self, u: &CMatrix) -> Result<Self> {
        check_dims(self.dim(), u.nrows())?;
        check_dims(self.dim(), u.ncols())?;
        let m = u * &self.matrix * u.adjoint();
        Ok(Self::from_matrix_unchecked(hermitian_part(&m)))
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self::from_matrix_unchecked(self.matrix.kronecker(&other.matrix))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).sum()
    }
}

fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &HermitianOperator, b: &HermitianOperator) -> Result<CMatrix> {
    check_dims(a.dim(), b.dim())?;
    Ok(a.matrix() * b.matrix() - b.matrix() * a.matrix())
}

/// `||[A, B]||_2^2 = tr([A,B][A,B]^H)`.
pub fn commutator_frobenius_sq(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    Ok(commutator(a, b)?.iter().map(|z| z.norm_sqr()).sum())
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A tensor product of single-site Paulis, identity on untouched sites.
///
/// Site 0 is the leftmost tensor factor (most significant bit of the basis
/// index). The single-site convention is `Z|0> = -|0>`, `Z|1> = |1>`, and
/// `Y = i X Z` so that `XY = iZ` still holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    n_qubits: usize,
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn new(n_qubits: usize, factors: Vec<(usize, Axis)>) -> Result<Self> {
        if n_qubits == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        let mut seen = vec![false; n_qubits];
        for &(site, _) in &factors {
            if site >= n_qubits {
                return Err(Error::SiteOutOfRange { site, n_qubits });
            }
            if std::mem::replace(&mut seen[site], true) {
                return Err(Error::DuplicateSite { site });
            }
        }
        Ok(Self { n_qubits, factors })
    }

    pub fn identity(n_qubits: usize) -> Result<Self> {
        Self::new(n_qubits, Vec::new())
    }

    pub fn single(n_qubits: usize, site: usize, axis: Axis) -> Result<Self> {
        Self::new(n_qubits, vec![(site, axis)])
    }

    /// Parses a whitespace-separated list like `"X0 Z3"`. `"I"` or an empty
    /// string is the identity.
    pub fn parse(text: &str, n_qubits: usize) -> Result<Self> {
        let mut factors = Vec::new();
        for token in text.split_whitespace() {
            if token == "I" {
                continue;
            }
            let mut chars = token.chars();
            let axis = match chars.next() {
                Some('X') | Some('x') => Axis::X,
                Some('Y') | Some('y') => Axis::Y,
                Some('Z') | Some('z') => Axis::Z,
                _ => return Err(Error::PauliSyntax(text.to_string())),
            };
            let site = usize::from_str(chars.as_str())
                .map_err(|_| Error::PauliSyntax(text.to_string()))?;
            factors.push((site, axis));
        }
        Self::new(n_qubits, factors)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    /// Bit masks (flip, z-phase, y-phase) over basis indices.
    fn masks(&self) -> (usize, usize, usize) {
        let (mut flip, mut zmask, mut ymask) = (0, 0, 0);
        for &(site, axis) in &self.factors {
            let bit = 1usize << (self.n_qubits - 1 - site);
            match axis {
                Axis::X => flip |= bit,
                Axis::Y => {
                    flip |= bit;
                    ymask |= bit;
                }
                Axis::Z => zmask |= bit,
            }
        }
        (flip, zmask, ymask)
    }

    /// Returns `(row, phase)` such that `P|col> = phase |row>`.
    fn apply(&self, col: usize) -> (usize, Complex64) {
        let (flip, zmask, ymask) = self.masks();
        self.apply_masked(col, flip, zmask, ymask)
    }

    fn apply_masked(&self, col: usize, flip: usize, zmask: usize, ymask: usize) -> (usize, Complex64) {
        // Z|b> = (-1)^(1-b)|b>; Y|0> = -i|1>, Y|1> = i|0>.
        let z_zeros = (zmask & !col).count_ones();
        let y_ones = (ymask & col).count_ones();
        let y_zeros = ymask.count_ones() - y_ones;
        let mut phase = if z_zeros.is_multiple_of(2) { ONE } else { -ONE };
        // (-i)^y_zeros * i^y_ones = i^(y_ones - y_zeros)
        let k = (y_ones as i64 - y_zeros as i64).rem_euclid(4);
        phase *= match k {
            0 => ONE,
            1 => I,
            2 => -ONE,
            _ => -I,
        };
        (col ^ flip, phase)
    }
}

/// Builds `sum_i c_i P_i` with the default qubit cap.
pub fn build_pauli_operator(terms: &[(f64, PauliString)], n_qubits: usize) -> Result<HermitianOperator> {
    build_pauli_operator_capped(terms, n_qubits, DEFAULT_MAX_QUBITS)
}

pub fn build_pauli_operator_capped(
    terms: &[(f64, PauliString)],
    n_qubits: usize,
    max_qubits: usize,
) -> Result<HermitianOperator> {
    if n_qubits > max_qubits {
        return Err(Error::DimensionCap {
            n_qubits,
            cap: max_qubits,
        });
    }
    if n_qubits == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let dim = 1usize << n_qubits;
    let mut m = CMatrix::from_element(dim, dim, ZERO);
    for (coef, string) in terms {
        if string.n_qubits != n_qubits {
            return Err(Error::DimensionMismatch {
                expected: n_qubits,
                found: string.n_qubits,
            });
        }
        if !coef.is_finite() {
            return Err(Error::NonFinite("Pauli coefficient"));
        }
        let (flip, zmask, ymask) = string.masks();
        for col in 0..dim {
            let (row, phase) = string.apply_masked(col, flip, zmask, ymask);
            m[(row, col)] += phase * *coef;
        }
    }
    Ok(HermitianOperator::from_matrix_unchecked(m))
}

/// Single-qubit Pauli matrix in the basis `(|0>, |1>)`.
pub fn pauli_matrix(axis: Axis) -> HermitianOperator {
    let s = PauliString::single(1, 0, axis).expect("valid single-site string");
    let mut m = CMatrix::zeros(2, 2);
    for col in 0..2 {
        let (row, phase) = s.apply(col);
        m[(row, col)] = phase;
    }
    HermitianOperator::from_matrix_unchecked(m)
}

/// Eigenvalues in ascending order with the matching eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V^H A V`: matrix elements `<j|A|k>` in the eigenbasis.
    pub fn to_eigenbasis(&self, a: &HermitianOperator) -> Result<CMatrix> {
        check_dims(self.dim(), a.dim())?;
        Ok(self.eigenvectors.adjoint() * a.matrix() * &self.eigenvectors)
    }

    /// `V M V^H`: maps an eigenbasis matrix back to the computational basis.
    pub fn from_eigenbasis(&self, m: &CMatrix) -> CMatrix {
        &self.eigenvectors * m * self.eigenvectors.adjoint()
    }

    /// `V f(diag) V^H` for real diagonal values.
    pub fn from_diagonal(&self, diag: &[f64]) -> CMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &d) in diag.iter().enumerate() {
            scaled.column_mut(j).scale_mut(d);
        }
        scaled * self.eigenvectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.from_diagonal(&self.eigenvalues)
    }
}

/// Hermitian eigendecomposition with ascending, stably ordered eigenvalues.
pub fn eigendecompose(a: &HermitianOperator) -> Result<SpectralDecomposition> {
    let dim = a.dim();
    let max_iter = 1000 * dim.max(8);
    let eig = SymmetricEigen::try_new(a.matrix().clone(), f64::EPSILON, max_iter)
        .ok_or(Error::EigenNonConvergence { dim })?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenNonConvergence { dim });
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(dim, dim);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
