use num_complex::Complex64;

use super::check_two_qubit;
use crate::error::Result;
use crate::linalg::{hermitian_eigen, singular_values, tensor, ComplexMatrix};
use crate::model::{Amplitudes, Family};

/// λ₁ ≥ … ≥ λ₄, the square roots of the eigenvalues of ρ(σy⊗σy)ρ*(σy⊗σy).
///
/// Computed as the singular values of τ = Wᵀ(σy⊗σy)W with ρ = WW†, so
/// vanishing λ's are not obtained as square roots of round-off.
pub fn wootters_lambdas(rho: &ComplexMatrix) -> Result<[f64; 4]> {
    check_two_qubit(rho)?;
    let eig = hermitian_eigen(rho)?;
    let w = ComplexMatrix::from_fn(4, |i, k| eig.vectors[(i, k)] * eig.values[k].max(0.0).sqrt())?;
    let flip = tensor(&ComplexMatrix::pauli_y(), &ComplexMatrix::pauli_y())?;
    let w_t = ComplexMatrix::from_fn(4, |i, j| w[(j, i)])?;
    let tau = &w_t * &(&flip * &w);
    let sv = singular_values(&tau);
    Ok([sv[0], sv[1], sv[2], sv[3]])
}

/// λ₁ − λ₂ − λ₃ − λ₄; positive exactly when the state is entangled.
pub fn concurrence_margin(rho: &ComplexMatrix) -> Result<f64> {
    let l = wootters_lambdas(rho)?;
    Ok(l[0] - l[1] - l[2] - l[3])
}

/// Wootters concurrence max(0, λ₁ − λ₂ − λ₃ − λ₄).
pub fn concurrence_wootters(rho: &ComplexMatrix) -> Result<f64> {
    Ok(concurrence_margin(rho)?.max(0.0))
}

/// Concurrence of the spin pair for either family, from (ξ, χ):
/// two_exc → 2·max(0, |αβ|ξ² − |β|²ξ²χ²), one_exc → 2|αβ|ξ².
/// For a flat spectrum ξ² = e^{−γt}.
pub fn concurrence_closed(family: Family, alpha: Complex64, beta: Complex64, amps: Amplitudes) -> f64 {
    let ab = alpha.norm() * beta.norm();
    let (xi2, chi2) = (amps.xi2(), amps.chi2());
    match family {
        Family::TwoExcitation => 2.0 * (ab * xi2 - beta.norm_sqr() * xi2 * chi2).max(0.0),
        Family::OneExcitation => 2.0 * ab * xi2,
    }
}
