#![allow(dead_code)]

use nyquist_core::linalg::cmat;
use nyquist_core::{random_instance, CMatrix, HermitianOperator, ModelInstance, Rng};

/// A = Z, B = 0, ρ = |+⟩⟨+|, M = X, so f(x) = cos(4πx).
pub fn cosine_instance() -> ModelInstance {
    let plus = cmat(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]);
    ModelInstance::new(
        HermitianOperator::pauli_z(),
        HermitianOperator::zeros(2),
        plus,
        HermitianOperator::pauli_x(),
    )
    .unwrap()
}

/// A = Z⊗1, B = 1⊗Z, ρ = |+⟩⟨+| ⊗ |0⟩⟨0|, M = X⊗1.
///
/// B commutes with A, ρ and M, so any rescaling of B leaves f unchanged.
pub fn commuting_instance_with_b() -> ModelInstance {
    let z = HermitianOperator::pauli_z();
    let id = HermitianOperator::identity(2);
    let plus = cmat(&[&[(0.5, 0.0), (0.5, 0.0)], &[(0.5, 0.0), (0.5, 0.0)]]);
    let zero = cmat(&[&[(1.0, 0.0), (0.0, 0.0)], &[(0.0, 0.0), (0.0, 0.0)]]);
    ModelInstance::new(
        z.kron(&id),
        id.kron(&z).scale(0.7),
        plus.kronecker(&zero),
        HermitianOperator::pauli_x().kron(&id),
    )
    .unwrap()
}

pub fn random(dim: usize, seed: u64) -> ModelInstance {
    random_instance(dim, &mut Rng::new(seed)).unwrap()
}

pub fn central_difference(m: &ModelInstance, x: f64) -> f64 {
    let h = 1e-5;
    (m.expectation(x + h).unwrap() - m.expectation(x - h).unwrap()) / (2.0 * h)
}

pub fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m.map(|z| z * s)
}
