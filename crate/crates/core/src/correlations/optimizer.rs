use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_two_qubit, clamp_slack, Side};
use crate::error::{Error, Result};
use crate::linalg::{binary_entropy, tensor, ComplexMatrix};

/// Outcome probabilities below this drop their branch from the average.
const MIN_BRANCH_PROBABILITY: f64 = 1e-14;
const SHRINK: f64 = 5.0;

/// Measurement direction n = (sinθ cosφ, sinθ sinφ, cosθ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementAxis {
    pub theta: f64,
    pub phi: f64,
}

impl MeasurementAxis {
    pub fn direction(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// Π± = (I ± n·σ)/2
    pub fn projectors(&self) -> (ComplexMatrix, ComplexMatrix) {
        let [x, y, z] = self.direction();
        let half = |s: f64| {
            ComplexMatrix::from_rows([
                [Complex64::new(0.5 * (1.0 + s * z), 0.0), Complex64::new(0.5 * s * x, -0.5 * s * y)],
                [Complex64::new(0.5 * s * x, 0.5 * s * y), Complex64::new(0.5 * (1.0 - s * z), 0.0)],
            ])
            .expect("2x2")
        };
        (half(1.0), half(-1.0))
    }
}

/// Grid resolution of the measurement search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Points per angle in the initial scan and in every refinement round.
    pub grid: usize,
    /// Number of refinement rounds, each shrinking the search box ×5.
    pub refine_iters: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            grid: 64,
            refine_iters: 4,
        }
    }
}

impl OptimizerSettings {
    pub fn new(grid: usize, refine_iters: usize) -> Result<Self> {
        if grid < 2 {
            return Err(Error::Domain(format!("optimizer grid must be >= 2, got {grid}")));
        }
        Ok(Self { grid, refine_iters })
    }
}

/// Pauli expansion ρ = ¼(I⊗I + a·σ⊗I + I⊗b·σ + Σ T_ij σ_i⊗σ_j).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    pub a: [f64; 3],
    pub b: [f64; 3],
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    pub fn new(rho: &ComplexMatrix) -> Self {
        let paulis = [ComplexMatrix::pauli_x(), ComplexMatrix::pauli_y(), ComplexMatrix::pauli_z()];
        let id = ComplexMatrix::identity(2).expect("2x2");
        // Tr(ρ O) for Hermitian O is Σ_ij ρ_ij O_ji
        let expect = |o: &ComplexMatrix| -> f64 {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    s += rho[(i, j)] * o[(j, i)];
                }
            }
            s.re
        };
        let mut form = BlochForm {
            a: [0.0; 3],
            b: [0.0; 3],
            t: [[0.0; 3]; 3],
        };
        for (i, si) in paulis.iter().enumerate() {
            form.a[i] = expect(&tensor(si, &id).expect("4x4"));
            form.b[i] = expect(&tensor(&id, si).expect("4x4"));
            for (j, sj) in paulis.iter().enumerate() {
                form.t[i][j] = expect(&tensor(si, sj).expect("4x4"));
            }
        }
        form
    }

    /// Same state with the two qubits exchanged.
    pub fn swapped(&self) -> Self {
        let mut t = [[0.0; 3]; 3];
        for (i, row) in t.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.t[j][i];
            }
        }
        BlochForm { a: self.b, b: self.a, t }
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// Entropy (bits) of the qubit state with Bloch vector `r`.
pub(crate) fn qubit_entropy(r: &[f64; 3]) -> f64 {
    binary_entropy(((1.0 - norm3(r)) / 2.0).clamp(0.0, 0.5))
}

/// S(ρ_A) − Σ± p± S(ρ_A|±) when the second qubit of `form` is measured along `n`.
fn deficit(form: &BlochForm, s_unmeasured: f64, n: &[f64; 3]) -> f64 {
    let bn = form.b[0] * n[0] + form.b[1] * n[1] + form.b[2] * n[2];
    let tn = [
        form.t[0][0] * n[0] + form.t[0][1] * n[1] + form.t[0][2] * n[2],
        form.t[1][0] * n[0] + form.t[1][1] * n[1] + form.t[1][2] * n[2],
        form.t[2][0] * n[0] + form.t[2][1] * n[1] + form.t[2][2] * n[2],
    ];
    let mut conditional = 0.0;
    for sign in [1.0, -1.0] {
        let p = 0.5 * (1.0 + sign * bn);
        if p < MIN_BRANCH_PROBABILITY {
            continue;
        }
        let scale = 1.0 / (2.0 * p);
        let r = [
            (form.a[0] + sign * tn[0]) * scale,
            (form.a[1] + sign * tn[1]) * scale,
            (form.a[2] + sign * tn[2]) * scale,
        ];
        conditional += p * qubit_entropy(&r);
    }
    s_unmeasured - conditional
}

/// Entropy reduction of the unmeasured qubit for one measurement axis.
pub fn conditional_entropy_deficit(rho: &ComplexMatrix, side: Side, axis: MeasurementAxis) -> Result<f64> {
    check_two_qubit(rho)?;
    let form = oriented(&BlochForm::new(rho), side);
    Ok(deficit(&form, qubit_entropy(&form.a), &axis.direction()))
}

fn oriented(form: &BlochForm, side: Side) -> BlochForm {
    match side {
        Side::Second => *form,
        Side::First => form.swapped(),
    }
}

#[derive(Clone, Copy)]
struct Candidate {
    value: f64,
    theta: f64,
    phi: f64,
}

impl Candidate {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.value
            .total_cmp(&other.value)
            .then(self.theta.total_cmp(&other.theta))
            .then(self.phi.total_cmp(&other.phi))
    }
}

fn points(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(move |k| if k == n - 1 { hi } else { lo + step * k as f64 })
}

fn scan(
    form: &BlochForm,
    s_unmeasured: f64,
    thetas: impl Iterator<Item = f64>,
    phis: &[f64],
    best: &mut Option<Candidate>,
) {
    let trig: Vec<(f64, f64, f64)> = phis.iter().map(|&p| {
        let (s, c) = p.sin_cos();
        (p, s, c)
    }).collect();
    for theta in thetas {
        let (st, ct) = theta.sin_cos();
        for &(phi, sp, cp) in &trig {
            let n = [st * cp, st * sp, ct];
            let cand = Candidate {
                value: deficit(form, s_unmeasured, &n),
                theta,
                phi,
            };
            if best.map_or(true, |b| cand.cmp_key(&b) == Ordering::Greater) {
                *best = Some(cand);
            }
        }
    }
}

pub(super) fn optimize(form: &BlochForm, side: Side, settings: OptimizerSettings) -> Result<(f64, MeasurementAxis)> {
    let OptimizerSettings { grid, refine_iters } = OptimizerSettings::new(settings.grid, settings.refine_iters)?;
    let form = oriented(form, side);
    let s_unmeasured = qubit_entropy(&form.a);

    let mut best = None;
    let phis: Vec<f64> = (0..grid).map(|j| 2.0 * PI * j as f64 / grid as f64).collect();
    scan(&form, s_unmeasured, points(0.0, PI, grid), &phis, &mut best);

    let (mut half_theta, mut half_phi) = (PI / 2.0, PI);
    for _ in 0..refine_iters {
        half_theta /= SHRINK;
        half_phi /= SHRINK;
        let centre = best.expect("initial scan is non-empty");
        let lo = (centre.theta - half_theta).max(0.0);
        let hi = (centre.theta + half_theta).min(PI);
        let phis: Vec<f64> = points(centre.phi - half_phi, centre.phi + half_phi, grid)
            .map(|p| p.rem_euclid(2.0 * PI))
            .collect();
        scan(&form, s_unmeasured, points(lo, hi, grid), &phis, &mut best);
    }

    let best = best.expect("initial scan is non-empty");
    Ok((
        clamp_slack(best.value),
        MeasurementAxis {
            theta: best.theta,
            phi: best.phi,
        },
    ))
}

/// C(ρ) maximized over projective measurements on `side`; returns the value
/// (bits) and the maximizing axis.
pub fn classical_correlation_bruteforce(
    rho: &ComplexMatrix,
    side: Side,
    grid: usize,
    refine_iters: usize,
) -> Result<(f64, MeasurementAxis)> {
    check_two_qubit(rho)?;
    optimize(&BlochForm::new(rho), side, OptimizerSettings::new(grid, refine_iters)?)
}

/// Q(ρ) = I(ρ) − C(ρ), bits.
pub fn discord(rho: &ComplexMatrix, side: Side, grid: usize, refine_iters: usize) -> Result<f64> {
    Ok(super::analyze(rho, side, OptimizerSettings::new(grid, refine_iters)?)?.quantum)
}
