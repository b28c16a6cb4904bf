//! Entanglement measures: concurrence, Renyi-alpha entropy and entanglement,
//! the two-qubit conversion function `g_alpha`, its superadditivity checks,
//! and the scalar power inequality that drives the monogamy bounds.

use crate::linalg::{
    hermitian_eig, kron, partial_trace, pauli_y, trace_power, DensityMatrix, PureState, C64,
};
use crate::{Error, Result};

/// Smallest alpha for which the two-qubit analytic formula
/// E_alpha = g_alpha(C) holds: (sqrt(7) - 1)/2.
pub const ALPHA_ANALYTIC_MIN: f64 = 0.822_875_655_532_295_4;

/// Renyi order alpha > 0, alpha != 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaParam {
    alpha: f64,
    analytic_ok: bool,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha <= 0.0 {
            return Err(Error::Parameter(format!("alpha must be > 0, got {alpha}")));
        }
        if (alpha - 1.0).abs() <= 1e-9 {
            return Err(Error::Parameter(
                "alpha = 1 is excluded (von Neumann limit is out of scope)".into(),
            ));
        }
        Ok(AlphaParam {
            alpha,
            analytic_ok: alpha >= ALPHA_ANALYTIC_MIN,
        })
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True when the two-qubit analytic formula applies (alpha >= (sqrt(7)-1)/2).
    #[inline]
    pub fn analytic_ok(&self) -> bool {
        self.analytic_ok
    }

    pub fn require_analytic(&self) -> Result<()> {
        if self.analytic_ok {
            Ok(())
        } else {
            Err(Error::Regime(format!(
                "alpha = {} is below the analytic threshold {ALPHA_ANALYTIC_MIN}",
                self.alpha
            )))
        }
    }
}

/// Monogamy power eta >= 1, with t = eta/2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaParam {
    eta: f64,
}

impl EtaParam {
    pub fn new(eta: f64) -> Result<Self> {
        if eta < 1.0 {
            return Err(Error::Parameter(format!("eta must be >= 1, got {eta}")));
        }
        Ok(EtaParam { eta })
    }

    #[inline]
    pub fn eta(&self) -> f64 {
        self.eta
    }

    #[inline]
    pub fn t(&self) -> f64 {
        self.eta / 2.0
    }
}

/// The two-qubit conversion function
/// g_alpha(x) = log2[((1-u)/2)^a + ((1+u)/2)^a] / (1-a), u = sqrt(1-x^2).
///
/// Monotonically increasing and convex on [0, 1]; endpoints are exact:
/// g(0) = 0, g(1) = 1. The square root is computed as sqrt((1-x)(1+x)) to
/// avoid cancellation near x = 1.
pub fn g_alpha(x: f64, a: &AlphaParam) -> Result<f64> {
    if x < -1e-12 || x > 1.0 + 1e-12 {
        return Err(Error::Parameter(format!("g_alpha argument {x} outside [0,1]")));
    }
    let x = x.clamp(0.0, 1.0);
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    let u = ((1.0 - x) * (1.0 + x)).sqrt();
    let lo = (1.0 - u) / 2.0;
    let hi = (1.0 + u) / 2.0;
    let alpha = a.alpha;
    Ok((lo.powf(alpha) + hi.powf(alpha)).log2() / (1.0 - alpha))
}

fn check_side(side: &[usize], num_qubits: usize, strict_subset: bool) -> Result<()> {
    if side.is_empty() {
        return Err(Error::QubitIndex("partition side must be nonempty".into()));
    }
    let mut seen = vec![false; num_qubits];
    for &q in side {
        if q >= num_qubits {
            return Err(Error::QubitIndex(format!(
                "qubit {q} out of range for {num_qubits} qubits"
            )));
        }
        if seen[q] {
            return Err(Error::QubitIndex(format!("duplicate qubit {q}")));
        }
        seen[q] = true;
    }
    if strict_subset && side.len() == num_qubits {
        return Err(Error::QubitIndex(
            "partition side must be a strict subset".into(),
        ));
    }
    Ok(())
}

/// Pure-state concurrence sqrt(2 (1 - tr rho_A^2)) across the bipartition
/// `side_a` vs the rest. Clamped to [0, 1] when `side_a` is one qubit.
pub fn concurrence_pure(psi: &PureState, side_a: &[usize]) -> Result<f64> {
    check_side(side_a, psi.num_qubits(), true)?;
    let rho_a = partial_trace(&psi.density(), side_a)?;
    let c = (2.0 * (1.0 - rho_a.purity())).max(0.0).sqrt();
    let cap = if side_a.len() == 1 {
        1.0
    } else {
        std::f64::consts::SQRT_2
    };
    Ok(c.min(cap))
}

/// Wootters concurrence of a two-qubit mixed state:
/// max(0, l1 - l2 - l3 - l4) with l_i the descending square roots of the
/// eigenvalues of rho (Y x Y) rho* (Y x Y), evaluated through the Hermitian
/// form sqrt(rho) rho~ sqrt(rho).
pub fn concurrence_two_qubit(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Dimension(format!(
            "expected a two-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    // The four lambda values are the singular values of X = L^T (Y (x) Y) L
    // where rho = L L^dagger: cycling eig(rho rho_tilde) = eig(X^dagger X).
    // Reading them off the +/- sigma spectrum of [[0, X], [X^dagger, 0]]
    // keeps them first-order accurate; sqrt(eigenvalue) would amplify the
    // eigensolver noise near zero to ~1e-8.
    let yy = kron(&pauli_y(), &pauli_y());
    let (evals, vecs) = hermitian_eig(rho.matrix())?;
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for (k, &lam) in evals.iter().enumerate() {
        if lam > 1e-14 {
            let s = lam.sqrt();
            cols.push((0..4).map(|i| vecs.get(i, k) * C64::new(s, 0.0)).collect());
        }
    }
    let r = cols.len();
    if r == 0 {
        return Err(Error::State("density matrix has no support".into()));
    }
    // X[i][j] = cols[i]^T (Y (x) Y) cols[j]
    let mut x = vec![vec![C64::new(0.0, 0.0); r]; r];
    for i in 0..r {
        for j in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..4 {
                for q in 0..4 {
                    acc += cols[i][p] * yy.get(p, q) * cols[j][q];
                }
            }
            x[i][j] = acc;
        }
    }
    let mut aug = crate::linalg::ComplexMatrix::zeros(2 * r);
    for i in 0..r {
        for j in 0..r {
            aug.set(i, r + j, x[i][j]);
            aug.set(r + i, j, x[j][i].conj());
        }
    }
    let (sigmas, _) = hermitian_eig(&aug)?;
    // ascending +/- sigma spectrum: the top entries are the singular values
    let mut lambdas = [0.0f64; 4];
    for (slot, k) in (0..r.min(4)).enumerate() {
        lambdas[slot] = sigmas[2 * r - 1 - k].max(0.0);
    }
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.max(0.0).min(1.0))
}

/// Renyi-alpha entropy log2(tr rho^alpha) / (1 - alpha).
pub fn renyi_entropy(rho: &DensityMatrix, a: &AlphaParam) -> Result<f64> {
    let tp = trace_power(rho, a.alpha)?;
    Ok((tp.log2() / (1.0 - a.alpha)).max(0.0))
}

/// Renyi-alpha entanglement of a pure state across a single-qubit side A,
/// computed from the marginal spectrum. When the analytic regime applies,
/// the value is cross-checked against g_alpha(concurrence) within 1e-9.
pub fn renyi_entanglement_pure(psi: &PureState, side_a: &[usize], a: &AlphaParam) -> Result<f64> {
    if side_a.len() != 1 {
        return Err(Error::QubitIndex(
            "side A must be a single qubit for the Renyi entanglement path".into(),
        ));
    }
    check_side(side_a, psi.num_qubits(), true)?;
    let rho_a = partial_trace(&psi.density(), side_a)?;
    let e = renyi_entropy(&rho_a, a)?;
    if a.analytic_ok {
        let g = g_alpha(concurrence_pure(psi, side_a)?, a)?;
        if (e - g).abs() > 1e-9 {
            return Err(Error::Consistency(format!(
                "marginal-spectrum path ({e}) and g_alpha path ({g}) disagree"
            )));
        }
    }
    Ok(e)
}

/// Two-qubit Renyi-alpha entanglement through the analytic formula
/// g_alpha(C(rho)). Errors below the analytic alpha threshold.
pub fn renyi_entanglement_two_qubit(rho: &DensityMatrix, a: &AlphaParam) -> Result<f64> {
    a.require_analytic()?;
    g_alpha(concurrence_two_qubit(rho)?, a)
}

/// The three branches of the power inequality
/// (1+x)^mu >= 1 + (mu/2) x + (2^mu - mu/2 - 1) x^mu >= 1 + (2^mu - 1) x^mu
/// for x in [0,1], mu >= 1. Returns (lhs, mid, weak).
pub fn lemma1_terms(x: f64, mu: f64) -> Result<(f64, f64, f64)> {
    if !(-1e-12..=1.0 + 1e-12).contains(&x) {
        return Err(Error::Parameter(format!("x = {x} outside [0,1]")));
    }
    if mu < 1.0 {
        return Err(Error::Parameter(format!("mu must be >= 1, got {mu}")));
    }
    let x = x.clamp(0.0, 1.0);
    let p2 = 2f64.powf(mu);
    let lhs = (1.0 + x).powf(mu);
    let xmu = x.powf(mu);
    let mid = 1.0 + (mu / 2.0) * x + (p2 - mu / 2.0 - 1.0) * xmu;
    let weak = 1.0 + (p2 - 1.0) * xmu;
    Ok((lhs, mid, weak))
}

/// Superadditivity residual of g_alpha.
///
/// `squared = false`: g(sqrt(x^2+y^2)) - g(x) - g(y), requires alpha >= 2.
/// `squared = true`: the same with all three terms squared, requires the
/// analytic alpha regime. Returns (residual >= -1e-10, residual).
pub fn check_superadditivity(
    x: f64,
    y: f64,
    a: &AlphaParam,
    squared: bool,
) -> Result<(bool, f64)> {
    if x < -1e-12 || y < -1e-12 {
        return Err(Error::Parameter("x and y must be nonnegative".into()));
    }
    let (x, y) = (x.max(0.0), y.max(0.0));
    let s2 = x * x + y * y;
    if s2 > 1.0 + 1e-12 {
        return Err(Error::Parameter(format!("x^2 + y^2 = {s2} exceeds 1")));
    }
    if squared {
        a.require_analytic()?;
    } else if a.alpha < 2.0 {
        return Err(Error::Regime(format!(
            "the unsquared superadditivity regime needs alpha >= 2, got {}",
            a.alpha
        )));
    }
    let gs = g_alpha(s2.sqrt().min(1.0), a)?;
    let gx = g_alpha(x, a)?;
    let gy = g_alpha(y, a)?;
    let residual = if squared {
        gs * gs - gx * gx - gy * gy
    } else {
        gs - gx - gy
    };
    Ok((residual >= -1e-10, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::states;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    #[test]
    fn alpha_param_validation() {
        assert!(AlphaParam::new(0.0).is_err());
        assert!(AlphaParam::new(-2.0).is_err());
        assert!(AlphaParam::new(1.0).is_err());
        assert!(AlphaParam::new(1.0 + 5e-10).is_err());
        assert!(alpha(0.9).analytic_ok());
        assert!(!alpha(0.5).analytic_ok());
        assert!(alpha(ALPHA_ANALYTIC_MIN).analytic_ok());
    }

    #[test]
    fn eta_param_validation() {
        assert!(EtaParam::new(0.5).is_err());
        assert!((EtaParam::new(3.0).unwrap().t() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn g_alpha_endpoints_and_closed_form() {
        for a in [0.83, 0.9, 1.5, 2.0, 3.0] {
            let ap = alpha(a);
            assert_eq!(g_alpha(0.0, &ap).unwrap(), 0.0);
            assert_eq!(g_alpha(1.0, &ap).unwrap(), 1.0);
        }
        // alpha = 2 closed form: g2(x) = -log2(1 - x^2/2)
        let a2 = alpha(2.0);
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let expect = -(1.0 - x * x / 2.0).log2();
            assert!((g_alpha(x, &a2).unwrap() - expect).abs() < 1e-12, "x={x}");
        }
        let g06 = g_alpha(0.6, &a2).unwrap();
        assert!((g06 - 0.2863041).abs() < 1e-7);
        assert!(g_alpha(-0.1, &a2).is_err());
        assert!(g_alpha(1.1, &a2).is_err());
    }

    #[test]
    fn concurrence_pure_cases() {
        assert!((concurrence_pure(&states::bell(), &[0]).unwrap() - 1.0).abs() < 1e-12);

        let prod = PureState::new(
            2,
            vec![
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        )
        .unwrap();
        assert!(concurrence_pure(&prod, &[0]).unwrap() < 1e-12);

        let w3 = states::w_state(3).unwrap();
        let c = concurrence_pure(&w3, &[0]).unwrap();
        assert!((c - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-12);

        assert!(concurrence_pure(&w3, &[0, 1, 2]).is_err());
        assert!(concurrence_pure(&w3, &[]).is_err());
    }

    #[test]
    fn wootters_concurrence_cases() {
        assert!((concurrence_two_qubit(&states::bell().density()).unwrap() - 1.0).abs() < 1e-10);
        assert!(concurrence_two_qubit(&states::werner(0.0).unwrap()).unwrap() < 1e-12);
        let c = concurrence_two_qubit(&states::werner(0.8).unwrap()).unwrap();
        assert!((c - 0.7).abs() < 1e-10);
        // boundary of separability
        let c = concurrence_two_qubit(&states::werner(1.0 / 3.0).unwrap()).unwrap();
        assert!(c < 1e-9);
        // wrong size
        let g3 = states::ghz(3).unwrap().density();
        assert!(concurrence_two_qubit(&g3).is_err());
    }

    #[test]
    fn wootters_matches_pure_formula() {
        // On pure two-qubit states C = 2|ad - bc|.
        for seed in 0..50u64 {
            let psi = states::haar_random_pure(2, seed).unwrap();
            let a = psi.amplitudes();
            let expect = 2.0 * (a[0] * a[3] - a[1] * a[2]).norm();
            let got = concurrence_two_qubit(&psi.density()).unwrap();
            assert!((got - expect).abs() < 1e-10, "seed {seed}");
        }
    }

    #[test]
    fn renyi_entropy_cases() {
        let a2 = alpha(2.0);
        assert!(renyi_entropy(&states::bell().density(), &a2).unwrap() < 1e-10);

        let half = DensityMatrix::new(
            1,
            crate::linalg::ComplexMatrix::identity(2).scale(C64::new(0.5, 0.0)),
        )
        .unwrap();
        for a in [0.9, 2.0, 3.0] {
            assert!((renyi_entropy(&half, &alpha(a)).unwrap() - 1.0).abs() < 1e-12);
        }

        let d = DensityMatrix::new(
            1,
            crate::linalg::ComplexMatrix::diag(&[C64::new(2.0 / 3.0, 0.0), C64::new(1.0 / 3.0, 0.0)]),
        )
        .unwrap();
        let expect = -(5.0f64 / 9.0).log2();
        assert!((renyi_entropy(&d, &a2).unwrap() - expect).abs() < 1e-12);
    }

    #[test]
    fn renyi_entanglement_pure_cases() {
        let a2 = alpha(2.0);
        let g3 = states::ghz(3).unwrap();
        for a in [0.9, 2.0, 3.0] {
            assert!((renyi_entanglement_pure(&g3, &[0], &alpha(a)).unwrap() - 1.0).abs() < 1e-10);
        }
        let w3 = states::w_state(3).unwrap();
        let expect = (9.0f64 / 5.0).log2();
        assert!((renyi_entanglement_pure(&w3, &[0], &a2).unwrap() - expect).abs() < 1e-10);

        let prod = states::generalized_w(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0))
            .unwrap();
        assert!(renyi_entanglement_pure(&prod, &[1], &a2).unwrap() < 1e-10);

        assert!(renyi_entanglement_pure(&g3, &[0, 1], &a2).is_err());
    }

    #[test]
    fn renyi_entanglement_two_qubit_cases() {
        let a2 = alpha(2.0);
        assert!(
            (renyi_entanglement_two_qubit(&states::bell().density(), &a2).unwrap() - 1.0).abs()
                < 1e-10
        );
        let sep = states::werner(1.0 / 3.0).unwrap();
        assert!(renyi_entanglement_two_qubit(&sep, &a2).unwrap() < 1e-8);
        let w08 = states::werner(0.8).unwrap();
        let expect = -(1.0f64 - 0.245).log2();
        assert!((renyi_entanglement_two_qubit(&w08, &a2).unwrap() - expect).abs() < 1e-9);
        // below the threshold the analytic route must refuse
        let low = AlphaParam::new(0.5).unwrap();
        assert!(renyi_entanglement_two_qubit(&w08, &low).is_err());
    }

    #[test]
    fn lemma1_cases() {
        for mu in [1.0, 1.5, 2.0, 3.0, 4.0] {
            let (l, m, w) = lemma1_terms(0.0, mu).unwrap();
            assert!((l - 1.0).abs() < 1e-12 && (m - 1.0).abs() < 1e-12 && (w - 1.0).abs() < 1e-12);
            let p2 = 2f64.powf(mu);
            let (l, m, w) = lemma1_terms(1.0, mu).unwrap();
            assert!((l - p2).abs() < 1e-12 && (m - p2).abs() < 1e-12 && (w - p2).abs() < 1e-12);
        }
        let (l, m, w) = lemma1_terms(0.5, 2.0).unwrap();
        assert!((l - 2.25).abs() < 1e-15);
        assert!((m - 2.0).abs() < 1e-15);
        assert!((w - 1.75).abs() < 1e-15);
        assert!(lemma1_terms(1.5, 2.0).is_err());
        assert!(lemma1_terms(0.5, 0.5).is_err());
    }

    #[test]
    fn superadditivity_cases() {
        let a2 = alpha(2.0);
        let (ok, r) = check_superadditivity(0.0, 0.7, &a2, false).unwrap();
        assert!(ok && r.abs() < 1e-12);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let (ok, r) = check_superadditivity(h, h, &a2, false).unwrap();
        let expect = 1.0 + 2.0 * 0.75f64.log2();
        assert!(ok && (r - expect).abs() < 1e-12);
        assert!((r - 0.1699250).abs() < 1e-7);

        // squared form below alpha = 2
        let a09 = alpha(0.9);
        let (ok, _) = check_superadditivity(0.3, 0.4, &a09, true).unwrap();
        assert!(ok);
        // regime gates
        assert!(check_superadditivity(0.3, 0.4, &a09, false).is_err());
        assert!(check_superadditivity(0.3, 0.4, &alpha(0.5), true).is_err());
        assert!(check_superadditivity(0.9, 0.9, &a2, false).is_err());
    }

    #[test]
    fn g_alpha_monotone_convex_small_grid() {
        for a in [0.83, 0.9, 1.5, 2.0, 3.0] {
            let ap = alpha(a);
            let h = 1e-3;
            let mut prev = g_alpha(0.0, &ap).unwrap();
            let mut prev2 = f64::NAN;
            for i in 1..=1000 {
                let g = g_alpha(i as f64 * h, &ap).unwrap();
                assert!(g >= prev - 1e-12, "alpha {a}, i {i}");
                if i >= 2 {
                    assert!(g - 2.0 * prev + prev2 >= -1e-9, "alpha {a}, i {i}");
                }
                prev2 = prev;
                prev = g;
            }
        }
    }

    #[test]
    fn dual_path_consistency_haar() {
        // Spot check here; the full 1000-state campaign runs in the
        // acceptance suite.
        for n in 2..=5 {
            for (k, a) in [0.9, 1.5, 2.0, 3.0].iter().enumerate() {
                let ap = alpha(*a);
                let psi =
                    states::haar_random_pure_from(n, &mut states::substream(50 + k as u64, n as u64))
                        .unwrap();
                let e = renyi_entanglement_pure(&psi, &[0], &ap).unwrap();
                let g = g_alpha(concurrence_pure(&psi, &[0]).unwrap(), &ap).unwrap();
                assert!((e - g).abs() < 1e-9);
            }
        }
    }
}
