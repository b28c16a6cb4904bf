//! Dense complex linear algebra for multiqubit density operators.
//!
//! Qubit indexing is big-endian everywhere: qubit 0 is the most significant
//! bit of the computational-basis index. All values are immutable after
//! construction; every operation returns a new value, so the whole module is
//! safe to use from many threads at once.

use num_complex::Complex64;

use crate::{Error, Result};

pub type C64 = Complex64;

/// Entrywise Hermiticity tolerance for density matrices.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Trace tolerance for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-EIG_CLAMP, 0]` are treated as exact zeros.
pub const EIG_CLAMP: f64 = 1e-10;

const JACOBI_MAX_SWEEPS: usize = 100;
const JACOBI_OFF_TOL: f64 = 1e-14;

/// Dense square matrix of complex doubles, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be >= 1");
        ComplexMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, C64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_entries(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if dim < 1 {
            return Err(Error::Dimension("matrix dimension must be >= 1".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Dimension(format!(
                "expected {} entries for dim {}, got {}",
                dim * dim,
                dim,
                entries.len()
            )));
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn mul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim, "matrix product dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.get(i, k);
                if aik == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn sub(&self, other: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, other.dim);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        ComplexMatrix {
            dim: self.dim,
            entries,
        }
    }

    pub fn scale(&self, s: C64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * s).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    /// Entrywise complex conjugate (no transpose).
    pub fn conjugate(&self) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from `H = H^dagger`.
    pub fn hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim {
            for j in i..self.dim {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }
}

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Pauli Y.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(0.0, -1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_entries(
        2,
        vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(-1.0, 0.0),
        ],
    )
    .unwrap()
}

/// Kronecker product with block layout `a[i][j] * b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    let mut out = ComplexMatrix::zeros(da * db);
    for ia in 0..da {
        for ja in 0..da {
            let aij = a.get(ia, ja);
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..db {
                for jb in 0..db {
                    out.set(ia * db + ib, ja * db + jb, aij * b.get(ib, jb));
                }
            }
        }
    }
    out
}

/// Normalized pure state over `num_qubits` qubits.
///
/// Qubit 0 is the most significant bit of the basis index (big-endian).
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Builds a state, checking length and normalization (1e-12 on the
    /// squared norm).
    pub fn new(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::State("state needs at least one qubit".into()));
        }
        let dim = 1usize << num_qubits;
        if amplitudes.len() != dim {
            return Err(Error::State(format!(
                "expected {} amplitudes for {} qubits, got {}",
                dim,
                num_qubits,
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::State(format!(
                "state is not normalized: |psi|^2 = {norm_sqr}"
            )));
        }
        Ok(PureState {
            num_qubits,
            amplitudes,
        })
    }

    /// Normalizes the given amplitude vector.
    pub fn normalized(num_qubits: usize, amplitudes: Vec<C64>) -> Result<Self> {
        let norm: f64 = amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm <= 0.0 {
            return Err(Error::State("cannot normalize the zero vector".into()));
        }
        let amps = amplitudes.into_iter().map(|a| a / norm).collect();
        PureState::new(num_qubits, amps)
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    /// Outer product |psi><psi| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        let d = self.dim();
        let mut m = ComplexMatrix::zeros(d);
        for i in 0..d {
            for j in 0..d {
                m.set(i, j, self.amplitudes[i] * self.amplitudes[j].conj());
            }
        }
        DensityMatrix::trusted(self.num_qubits, m)
    }
}

/// Positive semidefinite, unit-trace operator on `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    num_qubits: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Builds a density matrix, checking Hermiticity (1e-10 entrywise),
    /// trace (1e-10) and positivity (smallest eigenvalue >= -1e-10).
    pub fn new(num_qubits: usize, matrix: ComplexMatrix) -> Result<Self> {
        if num_qubits < 1 {
            return Err(Error::State("density matrix needs at least one qubit".into()));
        }
        if matrix.dim() != 1 << num_qubits {
            return Err(Error::Dimension(format!(
                "expected dim {} for {} qubits, got {}",
                1 << num_qubits,
                num_qubits,
                matrix.dim()
            )));
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_dev: dev });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::State(format!("trace is {tr}, expected 1")));
        }
        let rho = DensityMatrix { num_qubits, matrix };
        let (evals, _) = hermitian_eig(&rho.matrix)?;
        if let Some(min) = evals.first() {
            if *min < -EIG_CLAMP {
                return Err(Error::NotPsd(*min));
            }
        }
        Ok(rho)
    }

    /// Internal constructor for operators that satisfy the invariants by
    /// construction (outer products, partial traces).
    pub(crate) fn trusted(num_qubits: usize, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), 1 << num_qubits);
        DensityMatrix { num_qubits, matrix }
    }

    #[inline]
    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// tr rho^2, using Hermiticity.
    pub fn purity(&self) -> f64 {
        self.matrix.entries().iter().map(|a| a.norm_sqr()).sum()
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(hermitian_eig(&self.matrix)?.0)
    }
}

/// Reduced density matrix on the kept qubits, in their listed order.
///
/// `keep` must be a nonempty duplicate-free subset of `0..num_qubits`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.num_qubits();
    if keep.is_empty() {
        return Err(Error::QubitIndex("keep set must be nonempty".into()));
    }
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(Error::QubitIndex(format!(
                "qubit {q} out of range for {n} qubits"
            )));
        }
        if seen[q] {
            return Err(Error::QubitIndex(format!("duplicate qubit {q}")));
        }
        seen[q] = true;
    }
    let traced: Vec<usize> = (0..n).filter(|q| !seen[*q]).collect();
    let nk = keep.len();
    let nt = traced.len();
    let dk = 1usize << nk;
    let dt = 1usize << nt;

    // Bit of qubit q sits at shift n-1-q (big-endian).
    let scatter = |idx: usize, qubits: &[usize]| -> usize {
        let mut full = 0usize;
        for (pos, &q) in qubits.iter().enumerate() {
            let bit = (idx >> (qubits.len() - 1 - pos)) & 1;
            full |= bit << (n - 1 - q);
        }
        full
    };

    let mut out = ComplexMatrix::zeros(dk);
    for rk in 0..dk {
        let row_keep = scatter(rk, keep);
        for ck in 0..dk {
            let col_keep = scatter(ck, keep);
            let mut acc = C64::new(0.0, 0.0);
            for tt in 0..dt {
                let t = scatter(tt, &traced);
                acc += rho.matrix().get(row_keep | t, col_keep | t);
            }
            out.set(rk, ck, acc);
        }
    }
    Ok(DensityMatrix::trusted(nk, out))
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Returns ascending eigenvalues and the matching eigenvector
/// columns, so that `h = V diag(l) V^dagger`.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let dev = h.hermiticity_deviation();
    if dev > 1e-8 {
        return Err(Error::NotHermitian { max_dev: dev });
    }
    let n = h.dim();
    // Symmetrize to remove sub-tolerance drift.
    let mut a = h.add(&h.adjoint()).scale(C64::new(0.5, 0.0));
    let mut v = ComplexMatrix::identity(n);

    let scale = a.frobenius_norm();
    if scale == 0.0 || n == 1 {
        let evals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
        return Ok(sort_eig(evals, v));
    }
    let off_tol = JACOBI_OFF_TOL * scale;
    let skip_tol = off_tol / n as f64;

    let mut converged = false;
    let mut last_off = f64::INFINITY;
    for _sweep in 0..JACOBI_MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off2 += 2.0 * a.get(p, q).norm_sqr();
            }
        }
        last_off = off2.sqrt();
        if last_off <= off_tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                let r = apq.norm();
                if r <= skip_tol {
                    continue;
                }
                let phase = apq / r;
                let app = a.get(p, p).re;
                let aqq = a.get(q, q).re;
                let tau = (aqq - app) / (2.0 * r);
                let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
                let t = sign / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Unitary: U[p][p]=c, U[p][q]=s, U[q][p]=-s*conj(phase),
                // U[q][q]=c*conj(phase); update A <- U^dagger A U, V <- V U.
                let cs = C64::new(c, 0.0);
                let ss = C64::new(s, 0.0);
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, cs * akp - ss * phase.conj() * akq);
                    a.set(k, q, ss * akp + cs * phase.conj() * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, cs * apk - ss * phase * aqk);
                    a.set(q, k, ss * apk + cs * phase * aqk);
                }
                a.set(p, q, C64::new(0.0, 0.0));
                a.set(q, p, C64::new(0.0, 0.0));
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, cs * vkp - ss * phase.conj() * vkq);
                    v.set(k, q, ss * vkp + cs * phase.conj() * vkq);
                }
            }
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps: JACOBI_MAX_SWEEPS,
            off: last_off,
        });
    }
    let evals: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    Ok(sort_eig(evals, v))
}

fn sort_eig(evals: Vec<f64>, v: ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = evals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| evals[i].partial_cmp(&evals[j]).unwrap());
    let sorted: Vec<f64> = order.iter().map(|&i| evals[i]).collect();
    let mut vs = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vs.set(row, col, v.get(row, src));
        }
    }
    (sorted, vs)
}

/// PSD square root: S with S S = input. Eigenvalues in `[-1e-10, 0]` are
/// clamped to zero; anything below is an error.
pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (evals, v) = hermitian_eig(m)?;
    if let Some(min) = evals.first() {
        if *min < -EIG_CLAMP {
            return Err(Error::NotPsd(*min));
        }
    }
    let n = m.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n {
                let l = evals[k].max(0.0).sqrt();
                acc += v.get(i, k) * C64::new(l, 0.0) * v.get(j, k).conj();
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// tr rho^alpha over the clamped eigenvalue spectrum.
pub fn trace_power(rho: &DensityMatrix, alpha: f64) -> Result<f64> {
    if alpha <= 0.0 {
        return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
    }
    let evals = rho.eigenvalues()?;
    let mut acc = 0.0;
    for l in evals {
        let l = if l < 0.0 { 0.0 } else { l };
        if l > 0.0 {
            acc += l.powf(alpha);
        }
    }
    Ok(acc)
}
