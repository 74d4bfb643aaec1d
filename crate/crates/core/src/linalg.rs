//! Dense complex linear algebra for the small Hermitian operators that show up
//! in two-qubit (and four-qubit) state analysis.
//!
//! Matrices are square with dimension 2, 4, 8 or 16. Eigenvalues come from
//! cyclic Jacobi rotations; singular values from one-sided (Hestenes) Jacobi,
//! which resolves small singular values without squaring them.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Maximum |m_ij - conj(m_ji)| accepted for inputs that must be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues below this are a genuine negativity, not round-off.
pub const NEGATIVITY_TOL: f64 = 1e-8;
/// Eigenvalues in [-ROUNDOFF_CLAMP, 0) are treated as exact zeros.
pub const ROUNDOFF_CLAMP: f64 = 1e-10;
/// Trace deviation accepted for a density matrix.
pub const TRACE_TOL: f64 = 1e-10;

const JACOBI_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 64;

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 | 16 => Ok(()),
        _ => Err(Error::UnsupportedDim(dim)),
    }
}

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::from_fn(dim, |i, j| if i == j { 1.0.into() } else { 0.0.into() })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        check_dim(dim)?;
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be a supported dim squared.
    pub fn from_row_major(entries: Vec<Complex64>) -> Result<Self> {
        let dim = (entries.len() as f64).sqrt().round() as usize;
        if dim * dim != entries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} entries do not form a square matrix",
                entries.len()
            )));
        }
        check_dim(dim)?;
        Ok(Self { dim, data: entries })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex64; N]; N]) -> Result<Self> {
        Self::from_fn(N, |i, j| rows[i][j])
    }

    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Result<Self> {
        Self::from_fn(N, |i, j| rows[i][j].into())
    }

    pub fn diag(values: &[f64]) -> Result<Self> {
        Self::from_fn(values.len(), |i, j| {
            if i == j {
                values[i].into()
            } else {
                0.0.into()
            }
        })
    }

    /// |v><v| for a state vector `v`.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        Self::from_fn(v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn pauli_x() -> Self {
        Self::from_real_rows([[0.0, 1.0], [1.0, 0.0]]).expect("2x2")
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        let z = Complex64::new(0.0, 0.0);
        Self::from_rows([[z, -i], [i, z]]).expect("2x2")
    }

    pub fn pauli_z() -> Self {
        Self::from_real_rows([[1.0, 0.0], [0.0, -1.0]]).expect("2x2")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        Self {
            dim: n,
            data: (0..n * n).map(|k| self.data[(k % n) * n + k / n].conj()).collect(),
        }
    }

    /// Entrywise complex conjugate (not the adjoint).
    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// max_ij |m_ij - conj(m_ji)|
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_defect() <= tol
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "matrix product on mismatched dims");
        let n = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        ComplexMatrix { dim: n, data }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim * b.dim;
    if dim > 16 {
        return Err(Error::UnsupportedDim(dim));
    }
    ComplexMatrix::from_fn(dim, |i, j| {
        a[(i / b.dim, j / b.dim)] * b[(i % b.dim, j % b.dim)]
    })
}

/// Traces out every subsystem not listed in `keep`.
///
/// `dims` lists the subsystem dimensions in big-endian order (subsystem 0 is
/// the most significant digit of the row index). The kept subsystems appear
/// in the result in their original relative order.
pub fn partial_trace(rho: &ComplexMatrix, keep: &[usize], dims: &[usize]) -> Result<ComplexMatrix> {
    if dims.is_empty() || dims.iter().any(|&d| d < 2) {
        return Err(Error::MalformedDims(format!("subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::MalformedDims(format!(
            "dims {dims:?} multiply to {total}, matrix is {0}x{0}",
            rho.dim()
        )));
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() {
        return Err(Error::MalformedDims("nothing to keep".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::MalformedDims(format!(
            "subsystem {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let env: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();

    // strides[k] = weight of subsystem k's digit in the full index
    let mut strides = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * dims[k + 1];
    }
    let offsets = |subsystems: &[usize]| -> Vec<usize> {
        let n: usize = subsystems.iter().map(|&k| dims[k]).product();
        (0..n)
            .map(|mut idx| {
                let mut full = 0;
                for &k in subsystems.iter().rev() {
                    full += (idx % dims[k]) * strides[k];
                    idx /= dims[k];
                }
                full
            })
            .collect()
    };
    let kept_off = offsets(&keep);
    let env_off = offsets(&env);

    let mut out = ComplexMatrix::zeros(kept_off.len())?;
    for (i, &ki) in kept_off.iter().enumerate() {
        for (j, &kj) in kept_off.iter().enumerate() {
            out[(i, j)] = env_off.iter().map(|&e| rho[(ki + e, kj + e)]).sum();
        }
    }
    Ok(out)
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector of `values[k]`.
    pub vectors: ComplexMatrix,
}

impl Eigen {
    /// V Λ V†
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.vectors.dim();
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| self.vectors[(i, k)] * self.values[k] * self.vectors[(j, k)].conj())
                .sum()
        })
        .expect("same dim as input")
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<Eigen> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let n = m.dim;
    let mut a = m.clone();
    for i in 0..n {
        a[(i, i)] = a[(i, i)].re.into();
        for j in i + 1..n {
            let v = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
    }
    let mut v = ComplexMatrix::identity(n)?;
    let tol = JACOBI_TOL * a.frobenius().max(1.0);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let mag = apq.norm();
                if mag == 0.0 {
                    continue;
                }
                let phase = (apq / mag).conj();
                let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * mag);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // U restricted to the (p, q) plane; A <- U† A U, V <- V U
                let (u_pp, u_pq) = (Complex64::from(c), Complex64::from(s));
                let (u_qp, u_qq) = (phase * -s, phase * c);

                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = akp * u_pp + akq * u_qp;
                    a[(k, q)] = akp * u_pq + akq * u_qq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
                    a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
                }
                a[(p, q)] = 0.0.into();
                a[(q, p)] = 0.0.into();
                a[(p, p)] = a[(p, p)].re.into();
                a[(q, q)] = a[(q, q)].re.into();
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = vkp * u_pp + vkq * u_qp;
                    v[(k, q)] = vkp * u_pq + vkq * u_qq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| v[(i, order[j])])?;
    Ok(Eigen { values, vectors })
}

/// Real eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Singular values, descending, by one-sided Jacobi on the columns.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let n = m.dim;
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| (0..n).map(|i| m[(i, j)]).collect()).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = cols[p].iter().zip(&cols[q]).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= 1e-15 * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = cols.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, yq) = (*x, *y * phase);
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Eigenvalues of a density matrix with round-off negativity clamped away.
pub fn state_spectrum(rho: &ComplexMatrix) -> Result<Vec<f64>> {
    let tr = rho.trace();
    if (tr - Complex64::from(1.0)).norm() > TRACE_TOL {
        return Err(Error::NotAState(format!("trace {tr}")));
    }
    let values = hermitian_eigenvalues(rho)?;
    if let Some(&min) = values.last() {
        if min < -NEGATIVITY_TOL {
            return Err(Error::NotAState(format!("eigenvalue {min:e}")));
        }
    }
    Ok(values.into_iter().map(|l| l.clamp(0.0, 1.0)).collect())
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &ComplexMatrix) -> Result<f64> {
    Ok(state_spectrum(rho)?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum())
}

/// Binary Shannon entropy H(x) in bits.
pub fn shannon_binary(x: f64) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Domain(format!("binary entropy argument {x} outside [0, 1]")));
    }
    Ok(binary_entropy(x.clamp(0.0, 1.0)))
}

/// H(x) for x already known to be in [0, 1]. Evaluated through the smaller of
/// x and 1 - x so that arguments near either end keep full relative precision.
pub(crate) fn binary_entropy(x: f64) -> f64 {
    let p = if x > 0.5 { 1.0 - x } else { x };
    if p <= 0.0 {
        return 0.0;
    }
    -(p * p.ln() + (1.0 - p) * (-p).ln_1p()) / std::f64::consts::LN_2
}
