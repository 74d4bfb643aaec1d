//! Two spins, each resonantly coupled to its own zero-temperature bosonic
//! reservoir. Each reservoir is represented by its collective single-excitation
//! mode, so the whole system is four qubits ordered (s1, s2, r1, r2).
//!
//! Dynamics enter only through the survival amplitude ξ(t) and leakage
//! amplitude χ(t) = √(1 − ξ²) of a single excitation.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Initial-state family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// (α|00⟩ + β|11⟩) on the spins, reservoirs empty.
    #[serde(rename = "two_exc")]
    TwoExcitation,
    /// (α|01⟩ + β|10⟩) on the spins, reservoirs empty.
    #[serde(rename = "one_exc")]
    OneExcitation,
}

impl Family {
    pub fn label(self) -> &'static str {
        match self {
            Family::TwoExcitation => "two_exc",
            Family::OneExcitation => "one_exc",
        }
    }
}

/// Reservoir spectral density. Only the dimensionless products γt / λt and the
/// ratio W/λ influence the reduced dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpectralDensity {
    /// J(ω) = γ: Markovian exponential decay.
    Flat { gamma: f64 },
    /// J(ω) = (W²λ/π) / ((ω − ω₀)² + λ²), centred on the spin frequency.
    Lorentz {
        #[serde(rename = "W")]
        w: f64,
        lambda: f64,
    },
}

impl SpectralDensity {
    pub fn flat(gamma: f64) -> Result<Self> {
        let s = SpectralDensity::Flat { gamma };
        s.validate()?;
        Ok(s)
    }

    pub fn lorentz(w: f64, lambda: f64) -> Result<Self> {
        let s = SpectralDensity::Lorentz { w, lambda };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            SpectralDensity::Flat { gamma } if !(gamma > 0.0 && gamma.is_finite()) => {
                Err(Error::Domain(format!("flat spectrum needs gamma > 0, got {gamma}")))
            }
            SpectralDensity::Lorentz { w, lambda }
                if !(w > 0.0 && lambda > 0.0 && w.is_finite() && lambda.is_finite()) =>
            {
                Err(Error::Domain(format!(
                    "lorentz spectrum needs W > 0 and lambda > 0, got W={w}, lambda={lambda}"
                )))
            }
            _ => Ok(()),
        }
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, SpectralDensity::Flat { .. })
    }

    /// Amplitudes at dimensionless time (γt for flat, λt for Lorentz).
    pub fn amplitudes(&self, scaled_t: f64) -> Result<Amplitudes> {
        match *self {
            SpectralDensity::Flat { .. } => amplitudes_flat(scaled_t),
            SpectralDensity::Lorentz { w, lambda } => amplitudes_lorentz(scaled_t, w / lambda),
        }
    }

    pub fn time_symbol(&self) -> &'static str {
        match self {
            SpectralDensity::Flat { .. } => "γt",
            SpectralDensity::Lorentz { .. } => "λt",
        }
    }
}

/// Survival (ξ) and leakage (χ) amplitudes of one excitation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitudes {
    /// Signed: crosses zero in the underdamped Lorentz regime.
    pub xi: f64,
    pub chi: f64,
}

impl Amplitudes {
    /// Builds (ξ, √(1 − ξ²)); ξ is clipped to [−1, 1] first.
    pub fn from_xi(xi: f64) -> Self {
        let xi = xi.clamp(-1.0, 1.0);
        let chi = ((1.0 - xi) * (1.0 + xi)).max(0.0).sqrt();
        Self { xi, chi }
    }

    pub fn xi2(&self) -> f64 {
        self.xi * self.xi
    }

    pub fn chi2(&self) -> f64 {
        self.chi * self.chi
    }
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be finite and >= 0, got {t}")))
    }
}

/// Flat spectrum: ξ = e^{−γt/2}, χ = √(1 − e^{−γt}).
pub fn amplitudes_flat(gamma_t: f64) -> Result<Amplitudes> {
    check_time(gamma_t)?;
    Ok(Amplitudes {
        xi: (-gamma_t / 2.0).exp(),
        chi: (-(-gamma_t).exp_m1()).sqrt(),
    })
}

/// Resonant Lorentzian spectrum with coupling ratio W/λ.
///
/// With d² = 1 − 4(W/λ)² the survival amplitude is
/// e^{−λt/2}[sinh(dλt/2)/d + cosh(dλt/2)], continued to
/// e^{−λt/2}[sin(Ω̂λt/2)/Ω̂ + cos(Ω̂λt/2)] (Ω̂ = √(−d²)) once the coupling
/// exceeds λ/2. Both are written through sinh(x)/x and sin(x)/x, so the
/// critically damped limit e^{−λt/2}(1 + λt/2) is reached continuously.
pub fn amplitudes_lorentz(lambda_t: f64, w_over_lambda: f64) -> Result<Amplitudes> {
    check_time(lambda_t)?;
    if !(w_over_lambda > 0.0 && w_over_lambda.is_finite()) {
        return Err(Error::Domain(format!("W/lambda must be > 0, got {w_over_lambda}")));
    }
    let d2 = 1.0 - 4.0 * w_over_lambda * w_over_lambda;
    let half = lambda_t / 2.0;
    let xi = if d2.abs() <= 1e-12 {
        (-half).exp() * (1.0 + half)
    } else if d2 > 0.0 {
        let d = d2.sqrt();
        let x = d * half;
        // e^{-λt/2} cosh(x) overflows long before the product does
        let grow = 0.5 * (x - half).exp();
        let decay = 0.5 * (-x - half).exp();
        let sinh_term = if x < 1e-4 {
            half * sinhc(x) * (-half).exp()
        } else {
            (grow - decay) / d
        };
        sinh_term + grow + decay
    } else {
        let omega = (-d2).sqrt();
        let y = omega * half;
        (-half).exp() * (half * sinc(y) + y.cos())
    };
    Ok(Amplitudes::from_xi(xi))
}

fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 + x * x / 6.0
    } else {
        x.sinh() / x
    }
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Subsystem positions inside the four-party state.
pub const S1: usize = 0;
pub const S2: usize = 1;
pub const R1: usize = 2;
pub const R2: usize = 3;

/// A pair of subsystems whose reduced state is analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Partition {
    #[serde(rename = "s1s2")]
    S1S2,
    #[serde(rename = "r1r2")]
    R1R2,
    #[serde(rename = "s1r1")]
    S1R1,
    #[serde(rename = "s1r2")]
    S1R2,
    #[serde(rename = "s2r1")]
    S2R1,
    #[serde(rename = "s2r2")]
    S2R2,
}

impl Partition {
    pub const ALL: [Partition; 6] = [
        Partition::S1S2,
        Partition::R1R2,
        Partition::S1R1,
        Partition::S1R2,
        Partition::S2R1,
        Partition::S2R2,
    ];

    /// The pairs entering the sum-of-squares audits (the interacting pairs
    /// s1r1 and s2r2 are excluded).
    pub const SQUARE_SUM: [Partition; 4] =
        [Partition::S1S2, Partition::S1R2, Partition::S2R1, Partition::R1R2];

    pub fn label(self) -> &'static str {
        match self {
            Partition::S1S2 => "s1s2",
            Partition::R1R2 => "r1r2",
            Partition::S1R1 => "s1r1",
            Partition::S1R2 => "s1r2",
            Partition::S2R1 => "s2r1",
            Partition::S2R2 => "s2r2",
        }
    }

    /// (first, second) subsystem indices.
    pub fn subsystems(self) -> (usize, usize) {
        match self {
            Partition::S1S2 => (S1, S2),
            Partition::R1R2 => (R1, R2),
            Partition::S1R1 => (S1, R1),
            Partition::S1R2 => (S1, R2),
            Partition::S2R1 => (S2, R1),
            Partition::S2R2 => (S2, R2),
        }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Partition::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Domain(format!("unknown partition '{s}'")))
    }
}

/// Initial state, reservoir model and time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub family: Family,
    pub alpha: Complex64,
    pub beta: Complex64,
    pub spectral: SpectralDensity,
    /// Dimensionless times (γt or λt), strictly increasing from ≥ 0.
    pub time_grid: Vec<f64>,
}

impl Scenario {
    pub fn new(
        family: Family,
        alpha: Complex64,
        beta: Complex64,
        spectral: SpectralDensity,
        time_grid: Vec<f64>,
    ) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("|alpha|^2 + |beta|^2 = {norm}, expected 1")));
        }
        spectral.validate()?;
        if time_grid.is_empty() {
            return Err(Error::Domain("empty time grid".into()));
        }
        check_time(time_grid[0])?;
        if time_grid.windows(2).any(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Domain("time grid must be strictly increasing".into()));
        }
        Ok(Self {
            family,
            alpha,
            beta,
            spectral,
            time_grid,
        })
    }

    pub fn amplitudes(&self, t: f64) -> Result<Amplitudes> {
        self.spectral.amplitudes(t)
    }

    pub fn state_at(&self, t: f64) -> Result<PureState4> {
        Ok(build_state(self.family, self.alpha, self.beta, self.amplitudes(t)?))
    }

    pub fn alpha2(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    pub fn beta2(&self) -> f64 {
        self.beta.norm_sqr()
    }
}

/// `n` evenly spaced points on [start, end].
pub fn linear_grid(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n)
            .map(|k| {
                if k == n - 1 {
                    end
                } else {
                    start + (end - start) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Four-qubit pure state; amplitude index is s1·8 + s2·4 + r1·2 + r2.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState4 {
    amps: [Complex64; 16],
}

impl PureState4 {
    pub fn new(amps: [Complex64; 16]) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("state norm² = {norm}, expected 1")));
        }
        Ok(Self { amps })
    }

    pub fn index(s1: usize, s2: usize, r1: usize, r2: usize) -> usize {
        s1 * 8 + s2 * 4 + r1 * 2 + r2
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// |ψ⟩⟨ψ| on the full 16-dimensional space.
    pub fn density(&self) -> ComplexMatrix {
        ComplexMatrix::projector(&self.amps).expect("16-dimensional")
    }

    /// Reduced state of a subsystem pair, in the order (first, second).
    pub fn reduced(&self, partition: Partition) -> ComplexMatrix {
        let (a, b) = partition.subsystems();
        let env: Vec<usize> = (0..4).filter(|&k| k != a && k != b).collect();
        let bit = |k: usize| 1usize << (3 - k);
        let full = |i: usize, e: usize| -> usize {
            let mut idx = 0;
            if i & 2 != 0 {
                idx |= bit(a);
            }
            if i & 1 != 0 {
                idx |= bit(b);
            }
            if e & 2 != 0 {
                idx |= bit(env[0]);
            }
            if e & 1 != 0 {
                idx |= bit(env[1]);
            }
            idx
        };
        ComplexMatrix::from_fn(4, |i, j| {
            (0..4)
                .map(|e| self.amps[full(i, e)] * self.amps[full(j, e)].conj())
                .sum()
        })
        .expect("4-dimensional")
    }
}

/// Evolved four-party state for the given family at amplitudes (ξ, χ).
pub fn build_state(family: Family, alpha: Complex64, beta: Complex64, amps: Amplitudes) -> PureState4 {
    let (xi, chi) = (amps.xi, amps.chi);
    let mut psi = [Complex64::new(0.0, 0.0); 16];
    let idx = PureState4::index;
    match family {
        Family::TwoExcitation => {
            psi[idx(0, 0, 0, 0)] += alpha;
            // each spin's excitation either survives (ξ) or leaks into its reservoir (χ)
            let branches = [(1, 0, xi), (0, 1, chi)];
            for &(s1, r1, c1) in &branches {
                for &(s2, r2, c2) in &branches {
                    psi[idx(s1, s2, r1, r2)] += beta * c1 * c2;
                }
            }
        }
        Family::OneExcitation => {
            psi[idx(0, 1, 0, 0)] += alpha * xi;
            psi[idx(0, 0, 0, 1)] += alpha * chi;
            psi[idx(1, 0, 0, 0)] += beta * xi;
            psi[idx(0, 0, 1, 0)] += beta * chi;
        }
    }
    PureState4 { amps: psi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::partial_trace;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn flat_amplitudes() {
        let a0 = amplitudes_flat(0.0).unwrap();
        assert_eq!((a0.xi, a0.chi), (1.0, 0.0));
        let a = amplitudes_flat(std::f64::consts::LN_2).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((a.xi - r).abs() < 1e-15 && (a.chi - r).abs() < 1e-15);
        let late = amplitudes_flat(80.0).unwrap();
        assert!(late.xi < 1e-17 && (late.chi - 1.0).abs() < 1e-15);
        assert!(amplitudes_flat(-0.1).is_err());
    }

    #[test]
    fn lorentz_start_and_domain() {
        let a = amplitudes_lorentz(0.0, 200f64.sqrt()).unwrap();
        assert_eq!((a.xi, a.chi), (1.0, 0.0));
        assert!(amplitudes_lorentz(-1.0, 1.0).is_err());
        assert!(amplitudes_lorentz(1.0, 0.0).is_err());
    }

    #[test]
    fn lorentz_first_zero_solves_tan_condition() {
        // underdamped zero: tan(Ω̂ λt/2) = −Ω̂ → λt = 2(π − atan Ω̂)/Ω̂
        let omega = 799f64.sqrt();
        let root = 2.0 * (std::f64::consts::PI - omega.atan()) / omega;
        assert!((root - 0.113643644067929).abs() < 1e-12);
        let w = 200f64.sqrt();
        assert!(amplitudes_lorentz(root - 1e-6, w).unwrap().xi > 0.0);
        assert!(amplitudes_lorentz(root + 1e-6, w).unwrap().xi < 0.0);
        assert!(amplitudes_lorentz(root, w).unwrap().xi.abs() < 1e-12);
    }

    #[test]
    fn lorentz_decoupled_limit() {
        for lt in [0.5, 1.0, 3.0] {
            let a = amplitudes_lorentz(lt, 1e-6).unwrap();
            assert!((a.xi - 1.0).abs() < 1e-9, "{lt}: {a:?}");
        }
    }

    #[test]
    fn lorentz_critical_continuity() {
        for lt in [0.1, 1.0, 4.0, 10.0] {
            let below = amplitudes_lorentz(lt, 0.5 - 1e-7).unwrap().xi;
            let at = amplitudes_lorentz(lt, 0.5).unwrap().xi;
            let above = amplitudes_lorentz(lt, 0.5 + 1e-7).unwrap().xi;
            assert!((below - above).abs() < 1e-6);
            assert!((at - (-lt / 2.0).exp() * (1.0 + lt / 2.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn lorentz_overdamped_large_time_is_finite() {
        let a = amplitudes_lorentz(5000.0, 0.1).unwrap();
        assert!(a.xi.is_finite() && a.xi >= 0.0 && a.xi < 1.0);
    }

    #[test]
    fn two_exc_initial_state() {
        let (al, be) = (c(0.6), c(0.8));
        let s = build_state(Family::TwoExcitation, al, be, amplitudes_flat(0.0).unwrap());
        let amps = s.amplitudes();
        assert_eq!(amps[PureState4::index(0, 0, 0, 0)], al);
        assert_eq!(amps[PureState4::index(1, 1, 0, 0)], be);
        assert_eq!(amps.iter().filter(|a| a.norm() > 0.0).count(), 2);
    }

    #[test]
    fn two_exc_half_decay_expansion() {
        let half = Amplitudes::from_xi(std::f64::consts::FRAC_1_SQRT_2);
        let s = build_state(Family::TwoExcitation, c(0.0), c(1.0), half);
        for (s1, s2, r1, r2) in [(1, 1, 0, 0), (1, 0, 0, 1), (0, 1, 1, 0), (0, 0, 1, 1)] {
            let a = s.amplitudes()[PureState4::index(s1, s2, r1, r2)];
            assert!((a.norm_sqr() - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn one_exc_full_decay_moves_everything_to_reservoirs() {
        let (al, be) = (c(0.6), c(0.8));
        let s = build_state(Family::OneExcitation, al, be, Amplitudes::from_xi(0.0));
        let amps = s.amplitudes();
        assert_eq!(amps[PureState4::index(0, 0, 0, 1)], al);
        assert_eq!(amps[PureState4::index(0, 0, 1, 0)], be);
    }

    fn eq4(alpha: Complex64, beta: Complex64, xi: f64, chi: f64) -> ComplexMatrix {
        let z = Complex64::new(0.0, 0.0);
        let mid = (beta * xi * chi).norm_sqr();
        ComplexMatrix::from_rows([
            [c(alpha.norm_sqr() + (beta * chi * chi).norm_sqr()), z, z, alpha * beta.conj() * xi * xi],
            [z, c(mid), z, z],
            [z, z, c(mid), z],
            [alpha.conj() * beta * xi * xi, z, z, c((beta * xi * xi).norm_sqr())],
        ])
        .unwrap()
    }

    fn eq14(alpha: Complex64, beta: Complex64, xi: f64, chi: f64) -> ComplexMatrix {
        let z = Complex64::new(0.0, 0.0);
        ComplexMatrix::from_rows([
            [c(chi * chi), z, z, z],
            [z, c((alpha * xi).norm_sqr()), alpha * beta.conj() * xi * xi, z],
            [z, alpha.conj() * beta * xi * xi, c((beta * xi).norm_sqr()), z],
            [z, z, z, z],
        ])
        .unwrap()
    }

    #[test]
    fn spin_reduced_states_match_closed_matrices() {
        let alpha = Complex64::new(0.3, 0.4);
        let beta = Complex64::new(-0.5, 0.5) * (0.75f64 / 0.5).sqrt();
        assert!((alpha.norm_sqr() + beta.norm_sqr() - 1.0).abs() < 1e-15);
        for xi in [1.0, 0.9, std::f64::consts::FRAC_1_SQRT_2, 0.2, -0.35, 0.0] {
            let a = Amplitudes::from_xi(xi);
            let two = build_state(Family::TwoExcitation, alpha, beta, a);
            assert!(two.reduced(Partition::S1S2).max_abs_diff(&eq4(alpha, beta, a.xi, a.chi)) < 1e-12);
            let one = build_state(Family::OneExcitation, alpha, beta, a);
            assert!(one.reduced(Partition::S1S2).max_abs_diff(&eq14(alpha, beta, a.xi, a.chi)) < 1e-12);
        }
    }

    #[test]
    fn reduced_at_half_decay_has_expected_corner() {
        // ξ² = χ² = 1/2 gives |α|² + |β|²/4 in the (00,00) corner
        let (al, be) = (c(0.6), c(0.8));
        let s = build_state(Family::TwoExcitation, al, be, Amplitudes::from_xi(0.5f64.sqrt()));
        let r = s.reduced(Partition::S1S2);
        assert!((r[(0, 0)].re - (0.36 + 0.64 / 4.0)).abs() < 1e-15);
    }

    #[test]
    fn reduced_matches_generic_partial_trace() {
        let s = build_state(
            Family::TwoExcitation,
            Complex64::new(0.0, 0.6),
            c(0.8),
            amplitudes_lorentz(0.37, 3.0).unwrap(),
        );
        let full = s.density();
        for p in Partition::ALL {
            let (a, b) = p.subsystems();
            let generic = partial_trace(&full, &[a, b], &[2, 2, 2, 2]).unwrap();
            assert!(s.reduced(p).max_abs_diff(&generic) < 1e-14, "{p}");
        }
    }

    #[test]
    fn reservoir_pairs_are_unexcited_at_start() {
        let s = build_state(Family::TwoExcitation, c(0.6), c(0.8), amplitudes_flat(0.0).unwrap());
        let r = s.reduced(Partition::R1R2);
        assert!(r.max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]).unwrap()) < 1e-15);
    }

    #[test]
    fn scenario_validation() {
        let flat = SpectralDensity::flat(1.0).unwrap();
        assert!(Scenario::new(Family::TwoExcitation, c(0.6), c(0.8), flat, vec![0.0, 1.0]).is_ok());
        assert!(Scenario::new(Family::TwoExcitation, c(0.6), c(0.6), flat, vec![0.0]).is_err());
        assert!(Scenario::new(Family::TwoExcitation, c(0.6), c(0.8), flat, vec![0.0, 0.0]).is_err());
        assert!(Scenario::new(Family::TwoExcitation, c(0.6), c(0.8), flat, vec![-1.0, 0.0]).is_err());
        assert!(SpectralDensity::flat(0.0).is_err());
        assert!(SpectralDensity::lorentz(1.0, -1.0).is_err());
    }

    #[test]
    fn grid_endpoints_exact() {
        let g = linear_grid(0.0, 2.0, 2000);
        assert_eq!(g.len(), 2000);
        assert_eq!((g[0], g[1999]), (0.0, 2.0));
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
