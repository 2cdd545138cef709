//! The expectation-value function `f(x) = tr(M U(x) ρ U(x)^dag)`.

use nalgebra::DVector;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{
    daleckii_krein_kernel, eig_hermitian, eig_unchecked, haar_unitary, random_gaussian_hermitian,
    random_pm1, random_unit_vector, spectral_norm, CMatrix, EigenDecomposition, HermitianOperator,
};
use crate::rng::Rng;

const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const IMAG_TOL: f64 = 1e-8;
const DEGENERACY_TOL: f64 = 1e-9;

/// Number of random within-eigenspace rotations tried for degenerate `A`.
pub const DEFAULT_GAMMA_ROTATIONS: usize = 256;

/// A validated tuple `(A, B, ρ, M)`.
#[derive(Debug, Clone)]
pub struct ModelInstance {
    a: HermitianOperator,
    b: HermitianOperator,
    rho: CMatrix,
    m: HermitianOperator,
    k: f64,
    a_eig: EigenDecomposition,
    m_eig: EigenDecomposition,
}

impl ModelInstance {
    pub fn new(
        a: HermitianOperator,
        b: HermitianOperator,
        rho: CMatrix,
        m: HermitianOperator,
    ) -> Result<Self> {
        let n = a.dim();
        for d in [b.dim(), rho.nrows(), rho.ncols(), m.dim()] {
            if d != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: d,
                });
            }
        }
        let rho_h = HermitianOperator::new(rho.clone())?;
        let rho_eig = eig_hermitian(&rho_h)?;
        if rho_eig.lambda_min() < -PSD_TOL {
            return Err(Error::InvalidInstance(format!(
                "rho has negative eigenvalue {:.3e}",
                rho_eig.lambda_min()
            )));
        }
        let tr: Complex64 = rho.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidInstance(format!("tr rho = {tr}")));
        }
        let a_eig = eig_hermitian(&a)?;
        let k = a_eig.lambda_max() - a_eig.lambda_min();
        if k <= 1e-12 {
            return Err(Error::InvalidInstance(
                "A is a scalar multiple of the identity".into(),
            ));
        }
        let m_eig = eig_hermitian(&m)?;
        Ok(Self {
            a,
            b,
            rho,
            m,
            k,
            a_eig,
            m_eig,
        })
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn a(&self) -> &HermitianOperator {
        &self.a
    }

    pub fn b(&self) -> &HermitianOperator {
        &self.b
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn m(&self) -> &HermitianOperator {
        &self.m
    }

    /// Band limit `λmax(A) - λmin(A)`.
    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn a_eigen(&self) -> &EigenDecomposition {
        &self.a_eig
    }

    /// Operator norm of `M`.
    pub fn m_norm(&self) -> f64 {
        self.m_eig
            .values
            .iter()
            .fold(0.0_f64, |acc, v| acc.max(v.abs()))
    }

    /// Largest deviation of `M`'s spectrum from `{-1, +1}`.
    pub fn m_pm1_deviation(&self) -> f64 {
        pm1_deviation(&self.m_eig.values)
    }

    /// Largest deviation of `A`'s spectrum from `{-1, +1}`.
    pub fn a_pm1_deviation(&self) -> f64 {
        pm1_deviation(&self.a_eig.values)
    }

    fn generator_eig(&self, x: f64) -> Result<EigenDecomposition> {
        let h = self.a.matrix().map(|z| z * x) + self.b.matrix();
        eig_unchecked(&h)
    }

    /// `f(x)`.
    pub fn expectation(&self, x: f64) -> Result<f64> {
        let e = self.generator_eig(x)?;
        let v = &e.vectors;
        let mt = v.adjoint() * self.m.matrix() * v;
        let rt = v.adjoint() * &self.rho * v;
        let n = self.dim();
        let phases: Vec<Complex64> = e
            .values
            .iter()
            .map(|&l| Complex64::from_polar(1.0, 2.0 * PI * l))
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += mt[(k, j)] * rt[(j, k)] * phases[j] * phases[k].conj();
            }
        }
        real_part(acc)
    }

    /// `(f(x), f'(x))` with the exact derivative.
    pub fn value_and_derivative(&self, x: f64) -> Result<(f64, f64)> {
        let e = self.generator_eig(x)?;
        let v = &e.vectors;
        let mt = v.adjoint() * self.m.matrix() * v;
        let rt = v.adjoint() * &self.rho * v;
        let at = v.adjoint() * self.a.matrix() * v;
        let g = at.component_mul(&daleckii_krein_kernel(&e.values));
        let n = self.dim();
        let d = DVector::from_iterator(
            n,
            e.values
                .iter()
                .map(|&l| Complex64::from_polar(1.0, 2.0 * PI * l)),
        );
        let mut rt_d = rt.clone();
        for j in 0..n {
            for k in 0..n {
                rt_d[(j, k)] *= d[j] * d[k].conj();
            }
        }
        let val = (&mt * &rt_d).trace();
        // tr(M' G ρ' D^*)
        let mg = &mt * &g;
        let mut dacc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..n {
                row += mg[(k, j)] * rt[(j, k)];
            }
            dacc += row * d[k].conj();
        }
        Ok((real_part(val)?, 2.0 * dacc.re))
    }

    /// `f'(x)`.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        self.value_and_derivative(x).map(|p| p.1)
    }

    /// `U(x) = exp(2πi(xA + B))`.
    pub fn unitary(&self, x: f64) -> Result<CMatrix> {
        let e = self.generator_eig(x)?;
        Ok(crate::linalg::exp_i_from_eig(&e, 2.0 * PI))
    }

    /// Split `f = f₁ + f₀` using the block-diagonal part of `B`.
    pub fn decompose(&self) -> Result<Decomposition> {
        Decomposition::new(self)
    }

    /// Commutation seminorm with the default rotation budget.
    pub fn gamma(&self) -> Result<GammaEstimate> {
        self.decompose()?.gamma(DEFAULT_GAMMA_ROTATIONS, 0)
    }
}

fn pm1_deviation(values: &[f64]) -> f64 {
    values
        .iter()
        .map(|v| (v.abs() - 1.0).abs())
        .fold(0.0, f64::max)
}

fn real_part(z: Complex64) -> Result<f64> {
    if z.im.abs() > IMAG_TOL {
        return Err(Error::ImaginaryResidue(z.im));
    }
    Ok(z.re)
}

/// Random instance with `±1` spectra for `A` and `M`, Gaussian `B`, pure `ρ`.
pub fn random_instance(dim: usize, rng: &mut Rng) -> Result<ModelInstance> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dim must be >= 2, got {dim}")));
    }
    let m = random_pm1(dim, rng);
    let v = random_unit_vector(dim, rng);
    let rho = &v * v.adjoint();
    let a = random_pm1(dim, rng);
    let b = random_gaussian_hermitian(dim, rng);
    ModelInstance::new(a, b, rho, m)
}

/// Value of `Γ_A(B)` together with whether it is only a lower bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaEstimate {
    pub value: f64,
    pub lower_bound: bool,
}

/// `f₁` from the block-diagonal part of `B` in an eigenbasis of `A`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    model: ModelInstance,
    /// Eigenbasis of `A` refined to diagonalize `B` inside each eigenspace.
    basis: CMatrix,
    a_values: Vec<f64>,
    b_values: Vec<f64>,
    blocks: Vec<std::ops::Range<usize>>,
    diag_b: HermitianOperator,
    m_basis: CMatrix,
    rho_basis: CMatrix,
}

impl Decomposition {
    fn new(model: &ModelInstance) -> Result<Self> {
        let ae = model.a_eigen();
        let n = model.dim();
        let mut blocks = Vec::new();
        let mut start = 0;
        for i in 1..=n {
            let split = i == n
                || (ae.values[i] - ae.values[start]).abs()
                    > DEGENERACY_TOL * ae.values[start].abs().max(1.0);
            if split {
                blocks.push(start..i);
                start = i;
            }
        }
        let mut basis = ae.vectors.clone();
        let mut a_values = ae.values.clone();
        let mut b_values = vec![0.0; n];
        for blk in &blocks {
            let vb = ae.vectors.columns(blk.start, blk.len()).into_owned();
            let bb = vb.adjoint() * model.b().matrix() * &vb;
            let bb = (&bb + bb.adjoint()).scale(0.5);
            let e = eig_unchecked(&bb)?;
            let refined = &vb * &e.vectors;
            let mean_a = ae.values[blk.clone()].iter().sum::<f64>() / blk.len() as f64;
            for (off, col) in blk.clone().enumerate() {
                basis.set_column(col, &refined.column(off));
                b_values[col] = e.values[off];
                a_values[col] = mean_a;
            }
        }
        let bdiag = DVector::from_iterator(n, b_values.iter().map(|&v| Complex64::new(v, 0.0)));
        let diag_b = HermitianOperator::symmetrized(
            &(&basis * CMatrix::from_diagonal(&bdiag) * basis.adjoint()),
        );
        let m_basis = basis.adjoint() * model.m().matrix() * &basis;
        let rho_basis = basis.adjoint() * model.rho() * &basis;
        Ok(Self {
            model: model.clone(),
            basis,
            a_values,
            b_values,
            blocks,
            diag_b,
            m_basis,
            rho_basis,
        })
    }

    pub fn model(&self) -> &ModelInstance {
        &self.model
    }

    /// Orthonormal eigenbasis of `A` (columns) in which `diag_b` is diagonal.
    pub fn basis(&self) -> &CMatrix {
        &self.basis
    }

    pub fn diag_b(&self) -> &HermitianOperator {
        &self.diag_b
    }

    pub fn is_degenerate(&self) -> bool {
        self.blocks.iter().any(|b| b.len() > 1)
    }

    /// `Ũ(x) = exp(2πi(xA + Diag B))`.
    pub fn unitary_tilde(&self, x: f64) -> CMatrix {
        let n = self.a_values.len();
        let d = DVector::from_iterator(
            n,
            (0..n).map(|j| {
                Complex64::from_polar(1.0, 2.0 * PI * (x * self.a_values[j] + self.b_values[j]))
            }),
        );
        &self.basis * CMatrix::from_diagonal(&d) * self.basis.adjoint()
    }

    /// `f₁(x) = tr(M Ũ(x) ρ Ũ(x)^dag)`.
    pub fn f1(&self, x: f64) -> f64 {
        let n = self.a_values.len();
        let ph: Vec<Complex64> = (0..n)
            .map(|j| {
                Complex64::from_polar(1.0, 2.0 * PI * (x * self.a_values[j] + self.b_values[j]))
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                acc += self.m_basis[(k, j)] * self.rho_basis[(j, k)] * ph[j] * ph[k].conj();
            }
        }
        acc.re
    }

    /// `f₀(x) = f(x) - f₁(x)`.
    pub fn f0(&self, x: f64) -> Result<f64> {
        Ok(self.model.expectation(x)? - self.f1(x))
    }

    /// `max |x f₀(x)|` over the probe points.
    pub fn decay_constant(&self, probes: &[f64]) -> Result<f64> {
        let mut c: f64 = 0.0;
        for &x in probes {
            c = c.max((x * self.f0(x)?).abs());
        }
        Ok(c)
    }

    /// `‖B - Diag B‖` in the refined basis.
    pub fn off_diagonal_norm(&self) -> f64 {
        spectral_norm(&(self.model.b().matrix() - self.diag_b.matrix()))
    }

    /// `Γ_A(B)`: exact when `A` is nondegenerate, otherwise the largest value
    /// seen over the refined basis and `rotations` Haar rotations per eigenspace.
    pub fn gamma(&self, rotations: usize, seed: u64) -> Result<GammaEstimate> {
        let base = self.off_diagonal_norm();
        if !self.is_degenerate() {
            return Ok(GammaEstimate {
                value: base,
                lower_bound: false,
            });
        }
        let b = self.model.b().matrix();
        let ae = self.model.a_eigen();
        let mut rng = Rng::new(seed);
        let mut best = base;
        for _ in 0..rotations {
            let mut pinched = CMatrix::zeros(b.nrows(), b.ncols());
            for blk in &self.blocks {
                let vb = ae.vectors.columns(blk.start, blk.len()).into_owned();
                let q = haar_unitary(blk.len(), &mut rng);
                let w = &vb * q;
                for j in 0..blk.len() {
                    let col = w.column(j);
                    let bjj = (col.adjoint() * b * col)[(0, 0)];
                    pinched += (col * col.adjoint()) * bjj;
                }
            }
            best = best.max(spectral_norm(&(b - pinched)));
        }
        Ok(GammaEstimate {
            value: best,
            lower_bound: true,
        })
    }
}
