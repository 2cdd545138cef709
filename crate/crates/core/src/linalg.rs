//! Dense complex linear algebra for small Hermitian generators.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::sinc;
use crate::rng::Rng;

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_RTOL: f64 = 1e-12;
const ORTHO_TOL: f64 = 1e-10;
const RECON_RTOL: f64 = 1e-10;

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Entrywise max-norm of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

fn check_square_finite(m: &CMatrix) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidMatrix(format!(
            "{}x{} is not square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Err(Error::InvalidMatrix("empty matrix".into()));
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidMatrix("non-finite entry".into()));
    }
    Ok(())
}

/// Hermitian residual `max |H - H^dag|`.
pub fn hermitian_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut r: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            r = r.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    r
}

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        check_square_finite(&matrix)?;
        let residual = hermitian_residual(&matrix);
        if residual > HERMITIAN_RTOL * max_abs(&matrix).max(1.0) {
            return Err(Error::NonHermitian { residual });
        }
        Ok(Self { matrix })
    }

    /// Symmetrize `(m + m^dag)/2` without checking.
    pub fn symmetrized(matrix: &CMatrix) -> Self {
        let matrix = (matrix + matrix.adjoint()).scale(0.5);
        Self { matrix }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let v = DVector::from_iterator(diag.len(), diag.iter().map(|&d| Complex64::new(d, 0.0)));
        Self {
            matrix: CMatrix::from_diagonal(&v),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: CMatrix::zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
    }

    pub fn pauli_x() -> Self {
        Self::new(cmat(&[&[(0.0, 0.0), (1.0, 0.0)], &[(1.0, 0.0), (0.0, 0.0)]])).unwrap()
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
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

    pub fn scale(&self, s: f64) -> Self {
        Self {
            matrix: self.matrix.map(|z| z * s),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &HermitianOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(Self {
            matrix: &self.matrix + other.matrix.map(|z| z * s),
        })
    }

    pub fn kron(&self, other: &HermitianOperator) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Spectral norm (largest |eigenvalue|).
    pub fn spectral_norm(&self) -> Result<f64> {
        let e = eig_hermitian(self)?;
        Ok(e.values.iter().fold(0.0_f64, |a, v| a.max(v.abs())))
    }
}

/// Build a complex matrix from rows of `(re, im)` pairs.
pub fn cmat(rows: &[&[(f64, f64)]]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| Complex64::new(rows[i][j].0, rows[i][j].1))
}

/// Eigenvalues (ascending) and orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenDecomposition {
    /// `V f(diag λ) V^dag`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &l) in self.values.iter().enumerate() {
            let z = f(l);
            scaled.column_mut(j).scale_mut_complex(z);
        }
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|l| Complex64::new(l, 0.0))
    }

    pub fn lambda_min(&self) -> f64 {
        self.values[0]
    }

    pub fn lambda_max(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

trait ScaleComplex {
    fn scale_mut_complex(&mut self, z: Complex64);
}

impl<S> ScaleComplex for nalgebra::Matrix<Complex64, nalgebra::Dyn, nalgebra::U1, S>
where
    S: nalgebra::StorageMut<Complex64, nalgebra::Dyn, nalgebra::U1>,
{
    fn scale_mut_complex(&mut self, z: Complex64) {
        for e in self.iter_mut() {
            *e *= z;
        }
    }
}

/// Eigendecomposition without Hermiticity or residual checks.
///
/// The input is assumed Hermitian; only the lower triangle is read by the solver.
pub fn eig_unchecked(m: &CMatrix) -> Result<EigenDecomposition> {
    let n = m.nrows();
    let eig = SymmetricEigen::try_new(m.clone(), f64::EPSILON, 10_000 * n.max(1))
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NumericalFailure("non-finite eigenvalue".into()));
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Checked Hermitian eigendecomposition with ascending eigenvalues.
pub fn eig_hermitian(h: &HermitianOperator) -> Result<EigenDecomposition> {
    let residual = hermitian_residual(h.matrix());
    if residual > HERMITIAN_RTOL * max_abs(h.matrix()).max(1.0) {
        return Err(Error::NonHermitian { residual });
    }
    let e = eig_unchecked(h.matrix())?;
    let n = h.dim();
    let ortho = max_abs_diff(&(e.vectors.adjoint() * &e.vectors), &CMatrix::identity(n, n));
    if ortho > ORTHO_TOL {
        return Err(Error::NumericalFailure(format!(
            "eigenvectors not orthonormal (residual {ortho:.3e})"
        )));
    }
    let recon = max_abs_diff(&e.reconstruct(), h.matrix());
    if recon > RECON_RTOL * max_abs(h.matrix()).max(1.0) {
        return Err(Error::NumericalFailure(format!(
            "reconstruction residual {recon:.3e}"
        )));
    }
    Ok(e)
}

/// `exp(i * scale * H)`.
pub fn exp_i_hermitian(h: &HermitianOperator, scale: f64) -> Result<CMatrix> {
    let e = eig_hermitian(h)?;
    Ok(exp_i_from_eig(&e, scale))
}

pub fn exp_i_from_eig(e: &EigenDecomposition, scale: f64) -> CMatrix {
    e.apply(|l| Complex64::from_polar(1.0, scale * l))
}

/// Divided-difference kernel of `t -> exp(2 pi i t)` in an eigenbasis.
///
/// Entry `(j, k)` equals `(e(λj) - e(λk)) / (λj - λk)`, with the confluent
/// value `2πi e(λj)` when the eigenvalues coincide.
pub fn daleckii_krein_kernel(values: &[f64]) -> CMatrix {
    let n = values.len();
    CMatrix::from_fn(n, n, |j, k| {
        let (a, b) = (values[j], values[k]);
        let phase = Complex64::from_polar(1.0, PI * (a + b));
        phase * Complex64::new(0.0, 2.0 * PI * sinc(a - b))
    })
}

/// `U(x) = exp(2πi(xA + B))` and `dU/dx`.
pub fn unitary_and_derivative(
    a: &HermitianOperator,
    b: &HermitianOperator,
    x: f64,
) -> Result<(CMatrix, CMatrix)> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let h = a.matrix().map(|z| z * x) + b.matrix();
    let e = eig_unchecked(&h)?;
    let u = exp_i_from_eig(&e, 2.0 * PI);
    let v = &e.vectors;
    let a_eig = v.adjoint() * a.matrix() * v;
    let kernel = daleckii_krein_kernel(&e.values);
    let g = a_eig.component_mul(&kernel);
    let du = v * g * v.adjoint();
    Ok((u, du))
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |a, &s| a.max(s))
}

/// Matrix with i.i.d. standard complex Gaussian entries (E|z|^2 = 1).
pub fn complex_gaussian(dim: usize, rng: &mut Rng) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(dim, dim, |_, _| Complex64::new(s * rng.normal(), s * rng.normal()))
}

/// Haar-distributed unitary from the QR decomposition of a Ginibre matrix.
pub fn haar_unitary(dim: usize, rng: &mut Rng) -> CMatrix {
    let g = complex_gaussian(dim, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        let d = r[(j, j)];
        let n = d.norm();
        let phase = if n > 0.0 { d / n } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `Q diag(±1) Q^dag` with ceil(dim/2) plus signs and a Haar-random `Q`.
pub fn random_pm1(dim: usize, rng: &mut Rng) -> HermitianOperator {
    let q = haar_unitary(dim, rng);
    let plus = dim.div_ceil(2);
    let d = DVector::from_fn(dim, |i, _| {
        Complex64::new(if i < plus { 1.0 } else { -1.0 }, 0.0)
    });
    let m = &q * CMatrix::from_diagonal(&d) * q.adjoint();
    HermitianOperator::symmetrized(&m)
}

/// `(G + G^dag)/2` for a standard complex Gaussian `G`.
pub fn random_gaussian_hermitian(dim: usize, rng: &mut Rng) -> HermitianOperator {
    HermitianOperator::symmetrized(&complex_gaussian(dim, rng))
}

/// Uniformly random unit vector in `C^dim`.
pub fn random_unit_vector(dim: usize, rng: &mut Rng) -> DVector<Complex64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| Complex64::new(rng.normal(), rng.normal()));
        let n = v.norm();
        if n > 1e-300 {
            return v.unscale(n);
        }
    }
}
