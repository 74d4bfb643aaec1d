//! Closed-form C and Q for the spin pair and the reservoir pair of both
//! initial-state families, written in |β|², ξ², χ² (or |α|²).

use super::clamp_slack;
use crate::error::{Error, Result};
use crate::linalg::binary_entropy as h;

fn unit(name: &str, v: f64) -> Result<f64> {
    if (-1e-12..=1.0 + 1e-12).contains(&v) {
        Ok(v.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain(format!("{name} = {v} outside [0, 1]")))
    }
}

fn amplitudes(xi2: f64, chi2: f64) -> Result<(f64, f64)> {
    let (xi2, chi2) = (unit("xi2", xi2)?, unit("chi2", chi2)?);
    if (xi2 + chi2 - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("xi2 + chi2 = {}, expected 1", xi2 + chi2)));
    }
    Ok((xi2, chi2))
}

/// ½(1 − √(1 − 4x)), the smaller eigenvalue shared by the conditional states.
/// H is symmetric about ½, so H(½(1 + √…)) = H(lower_root(x)).
fn lower_root(x: f64) -> Result<f64> {
    let disc = 1.0 - 4.0 * x;
    if disc < -1e-12 {
        return Err(Error::Domain(format!("1 - 4|βξχ|² = {disc} < 0")));
    }
    let s = disc.max(0.0).sqrt();
    Ok(2.0 * x / (1.0 + s))
}

/// C(ρ_{s1s2}) = H(|βξ|²) − H(½(1 + √(1 − 4|βξχ|²))) for (α|00⟩ + β|11⟩).
pub fn classical_correlation_closed_two_exc(beta2: f64, xi2: f64, chi2: f64) -> Result<f64> {
    let beta2 = unit("beta2", beta2)?;
    let (xi2, chi2) = amplitudes(xi2, chi2)?;
    let x = beta2 * xi2 * chi2;
    Ok(clamp_slack(h(beta2 * xi2) - h(lower_root(x)?)))
}

/// Q(ρ_{s1s2}) for the two-excitation family; identical to C.
pub fn quantum_correlation_closed_two_exc(beta2: f64, xi2: f64, chi2: f64) -> Result<f64> {
    classical_correlation_closed_two_exc(beta2, xi2, chi2)
}

/// (C, Q) of ρ_{r1r2} for the two-excitation family: both equal
/// H(|βχ|²) − H(½(1 + √(1 − 4|βξχ|²))).
pub fn correlations_closed_reservoir_two_exc(beta2: f64, xi2: f64, chi2: f64) -> Result<(f64, f64)> {
    let beta2 = unit("beta2", beta2)?;
    let (xi2, chi2) = amplitudes(xi2, chi2)?;
    let v = clamp_slack(h(beta2 * chi2) - h(lower_root(beta2 * xi2 * chi2)?));
    Ok((v, v))
}

/// Q(ρ_{s1s2}) for (α|01⟩ + β|10⟩):
/// −H(|ξ|²) + H(|αξ|²) + H(½(1 + √(1 − 4|βξχ|²))), with |β|² = 1 − |α|².
/// C of the same state coincides with the two-excitation expression.
pub fn quantum_correlation_closed_one_exc(alpha2: f64, xi2: f64, chi2: f64) -> Result<f64> {
    let alpha2 = unit("alpha2", alpha2)?;
    let beta2 = 1.0 - alpha2;
    let (xi2, chi2) = amplitudes(xi2, chi2)?;
    Ok(clamp_slack(
        -h(xi2) + h(alpha2 * xi2) + h(lower_root(beta2 * xi2 * chi2)?),
    ))
}

/// (C, Q) of ρ_{r1r2} for the one-excitation family:
/// C = H(|βχ|²) − H(½(1 − √(1 − 4|βξχ|²))),
/// Q = H(½(1 + √(1 − 4|βξχ|²))) − H(|χ|²) + H(|αχ|²).
pub fn correlations_closed_reservoir_one_exc(alpha2: f64, xi2: f64, chi2: f64) -> Result<(f64, f64)> {
    let alpha2 = unit("alpha2", alpha2)?;
    let beta2 = 1.0 - alpha2;
    let (xi2, chi2) = amplitudes(xi2, chi2)?;
    let root = h(lower_root(beta2 * xi2 * chi2)?);
    let c = clamp_slack(h(beta2 * chi2) - root);
    let q = clamp_slack(root - h(chi2) + h(alpha2 * chi2));
    Ok((c, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values below were evaluated independently at 30 significant
    // digits (mpmath) from the binary-entropy expressions.
    const EQ5_HALF_HALF: f64 = 0.210402087766276763;
    const EQ15_TENTH_HALF: f64 = 0.213009121041372566;

    #[test]
    fn two_exc_examples() {
        for b2 in [0.1, 0.5, 0.9] {
            let c0 = classical_correlation_closed_two_exc(b2, 1.0, 0.0).unwrap();
            assert!((c0 - h(b2)).abs() < 1e-15);
        }
        let v = classical_correlation_closed_two_exc(0.5, 0.5, 0.5).unwrap();
        assert!((v - EQ5_HALF_HALF).abs() < 1e-14, "{v}");
        assert_eq!(classical_correlation_closed_two_exc(0.0, 0.3, 0.7).unwrap(), 0.0);
        for (b2, x2) in [(0.5, 0.5), (0.9, 0.2), (0.0, 0.4)] {
            assert_eq!(
                quantum_correlation_closed_two_exc(b2, x2, 1.0 - x2).unwrap(),
                classical_correlation_closed_two_exc(b2, x2, 1.0 - x2).unwrap()
            );
        }
    }

    #[test]
    fn two_exc_reservoir_limits() {
        assert_eq!(correlations_closed_reservoir_two_exc(0.5, 1.0, 0.0).unwrap(), (0.0, 0.0));
        let (c, q) = correlations_closed_reservoir_two_exc(0.5, 0.0, 1.0).unwrap();
        assert!((c - 1.0).abs() < 1e-15 && (q - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_exc_examples() {
        for a2 in [0.1, 0.5, 0.9] {
            let q0 = quantum_correlation_closed_one_exc(a2, 1.0, 0.0).unwrap();
            assert!((q0 - h(a2)).abs() < 1e-15);
        }
        assert!((quantum_correlation_closed_one_exc(0.5, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        let v = quantum_correlation_closed_one_exc(0.1, 0.5, 0.5).unwrap();
        assert!((v - EQ15_TENTH_HALF).abs() < 1e-14, "{v}");
    }

    #[test]
    fn one_exc_reservoir_limits() {
        assert_eq!(correlations_closed_reservoir_one_exc(0.1, 1.0, 0.0).unwrap(), (0.0, 0.0));
        let (c, q) = correlations_closed_reservoir_one_exc(0.1, 0.0, 1.0).unwrap();
        assert!((c - h(0.9)).abs() < 1e-15 && (q - h(0.1)).abs() < 1e-15);
    }

    #[test]
    fn domain_errors() {
        assert!(classical_correlation_closed_two_exc(1.5, 0.5, 0.5).is_err());
        assert!(classical_correlation_closed_two_exc(0.5, 0.6, 0.6).is_err());
        assert!(quantum_correlation_closed_one_exc(-0.2, 0.5, 0.5).is_err());
        assert!(correlations_closed_reservoir_one_exc(0.5, 0.5, 0.4).is_err());
    }

    #[test]
    fn lower_root_is_accurate_for_tiny_arguments() {
        let x = 1e-20;
        assert!((lower_root(x).unwrap() - x).abs() < 1e-34);
        assert!((lower_root(0.25).unwrap() - 0.5).abs() < 1e-15);
    }
}
