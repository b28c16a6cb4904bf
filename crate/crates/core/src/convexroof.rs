//! Numerical upper bounds on convex-roof quantities.
//!
//! A decomposition of rho is parameterized by an m x rank isometry mixing the
//! eigen-ensemble, so every explored ensemble reconstructs rho exactly up to
//! roundoff. The search is a derivative-free local descent over random
//! isometry perturbations with a geometrically decaying step. The result is
//! always an UPPER bound on the convex roof; no lower-bound claim is made.

use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::linalg::{hermitian_eig, kron, pauli_y, ComplexMatrix, DensityMatrix, PureState, C64};
use crate::measures::{
    concurrence_pure, renyi_entanglement_pure, renyi_entanglement_two_qubit, AlphaParam,
};
use crate::states::{complex_gaussian, substream};
use crate::{Error, Result};

/// Pure-state measure averaged over the ensemble.
#[derive(Clone, Copy, Debug)]
pub enum RoofMeasure {
    Concurrence,
    RenyiAlpha(AlphaParam),
}

/// A convex-roof minimization instance.
#[derive(Clone, Debug)]
pub struct RoofProblem {
    pub rho: DensityMatrix,
    pub measure: RoofMeasure,
    /// Ensemble size; defaults to 2 * rank, must stay within [rank, 4 * rank].
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub iterations: usize,
    pub initial_step: f64,
    pub decay: f64,
    pub seed: u64,
}

impl RoofProblem {
    pub fn new(rho: DensityMatrix, measure: RoofMeasure, seed: u64) -> Self {
        RoofProblem {
            rho,
            measure,
            ensemble_size: None,
            restarts: 20,
            iterations: 500,
            initial_step: 0.3,
            decay: 0.97,
            seed,
        }
    }
}

/// Best explored decomposition.
#[derive(Clone, Debug)]
pub struct RoofSolution {
    /// Upper bound on the convex roof.
    pub value: f64,
    pub ensemble: Vec<(f64, PureState)>,
}

const RANK_EIG_TOL: f64 = 1e-12;

fn measure_value(measure: &RoofMeasure, psi: &PureState) -> Result<f64> {
    match measure {
        RoofMeasure::Concurrence => concurrence_pure(psi, &[0]),
        RoofMeasure::RenyiAlpha(a) => renyi_entanglement_pure(psi, &[0], a),
    }
}

/// Column-wise modified Gram-Schmidt on an m x r row-major matrix.
fn orthonormalize(u: &mut [C64], m: usize, r: usize) -> Result<()> {
    for col in 0..r {
        for prev in 0..col {
            let mut dot = C64::new(0.0, 0.0);
            for row in 0..m {
                dot += u[row * r + prev].conj() * u[row * r + col];
            }
            for row in 0..m {
                let v = u[row * r + prev];
                u[row * r + col] -= dot * v;
            }
        }
        let norm: f64 = (0..m).map(|row| u[row * r + col].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::Consistency(
                "degenerate column during isometry orthonormalization".into(),
            ));
        }
        for row in 0..m {
            u[row * r + col] /= norm;
        }
    }
    Ok(())
}

struct EigenEnsemble {
    dim: usize,
    num_qubits: usize,
    // scaled eigenvectors sqrt(l_i) e_i, one per retained eigenvalue
    columns: Vec<Vec<C64>>,
}

impl EigenEnsemble {
    fn build(rho: &DensityMatrix) -> Result<Self> {
        let (evals, v) = hermitian_eig(rho.matrix())?;
        let dim = rho.dim();
        let mut columns = Vec::new();
        for (k, &l) in evals.iter().enumerate() {
            if l > RANK_EIG_TOL {
                let s = l.sqrt();
                columns.push((0..dim).map(|i| v.get(i, k) * C64::new(s, 0.0)).collect());
            }
        }
        if columns.is_empty() {
            return Err(Error::State("density matrix has numerical rank zero".into()));
        }
        Ok(EigenEnsemble {
            dim,
            num_qubits: rho.num_qubits(),
            columns,
        })
    }

    fn rank(&self) -> usize {
        self.columns.len()
    }

    /// Ensemble average of the measure under the isometry `u` (m x rank).
    fn average(&self, u: &[C64], m: usize, measure: &RoofMeasure) -> Result<f64> {
        let r = self.rank();
        let mut total = 0.0;
        for j in 0..m {
            let mut amps = vec![C64::new(0.0, 0.0); self.dim];
            for i in 0..r {
                let uji = u[j * r + i];
                if uji == C64::new(0.0, 0.0) {
                    continue;
                }
                for (x, col) in amps.iter_mut().zip(&self.columns[i]) {
                    *x += uji * col;
                }
            }
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if p < 1e-14 {
                continue;
            }
            let psi = PureState::normalized(self.num_qubits, amps)?;
            total += p * measure_value(measure, &psi)?;
        }
        Ok(total)
    }

    fn ensemble(&self, u: &[C64], m: usize) -> Result<Vec<(f64, PureState)>> {
        let r = self.rank();
        let mut out = Vec::new();
        for j in 0..m {
            let mut amps = vec![C64::new(0.0, 0.0); self.dim];
            for i in 0..r {
                let uji = u[j * r + i];
                for (x, col) in amps.iter_mut().zip(&self.columns[i]) {
                    *x += uji * col;
                }
            }
            let p: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
            if p < 1e-14 {
                continue;
            }
            out.push((p, PureState::normalized(self.num_qubits, amps)?));
        }
        Ok(out)
    }
}

/// Rotates rows i and j of the m x r isometry in place:
/// row_i <- cos(theta) row_i + e^{i phi} sin(theta) row_j,
/// row_j <- -e^{-i phi} sin(theta) row_i + cos(theta) row_j.
/// Left-multiplication by a unitary preserves u^dagger u exactly.
fn rotate_rows(u: &mut [C64], r: usize, i: usize, j: usize, theta: f64, phi: f64) {
    let (s, c) = theta.sin_cos();
    let e = C64::new(phi.cos(), phi.sin());
    for k in 0..r {
        let a = u[i * r + k];
        let b = u[j * r + k];
        u[i * r + k] = a * C64::new(c, 0.0) + b * e * C64::new(s, 0.0);
        u[j * r + k] = -a * e.conj() * C64::new(s, 0.0) + b * C64::new(c, 0.0);
    }
}

/// Cyclic pairwise refinement: for every row pair, grid-search a Givens
/// rotation angle/phase and zoom in around the best improvement. Exact
/// isometry preservation lets this polish far below the stochastic noise
/// floor. Mutates `u` and returns the refined ensemble average.
fn polish(
    ens: &EigenEnsemble,
    u: &mut [C64],
    m: usize,
    measure: &RoofMeasure,
    mut best: f64,
    sweeps: usize,
) -> Result<f64> {
    let r = ens.rank();
    const THETAS: usize = 9;
    const PHIS: usize = 8;
    for _ in 0..sweeps {
        let start = best;
        for i in 0..m {
            for j in (i + 1)..m {
                let mut span = std::f64::consts::FRAC_PI_2;
                let mut center = (0.0f64, 0.0f64);
                for _level in 0..7 {
                    let mut improved = false;
                    for a in 0..THETAS {
                        let theta =
                            center.0 + span * (2.0 * a as f64 / (THETAS - 1) as f64 - 1.0);
                        if theta == 0.0 {
                            continue;
                        }
                        for b in 0..PHIS {
                            let phi = center.1 + std::f64::consts::PI
                                * (2.0 * b as f64 / PHIS as f64 - 1.0);
                            rotate_rows(u, r, i, j, theta, phi);
                            let val = ens.average(u, m, measure)?;
                            if val < best - 1e-13 {
                                best = val;
                                center = (0.0, 0.0);
                                improved = true;
                            } else {
                                rotate_rows(u, r, i, j, -theta, phi);
                            }
                        }
                    }
                    span /= 4.0;
                    if !improved && _level > 0 {
                        break;
                    }
                }
            }
        }
        if start - best < 1e-12 {
            break;
        }
    }
    Ok(best)
}

/// Unit phases u_k with sum_k d_k u_k real and as close to
/// max(0, d_1 - sum_rest) as the polygon geometry allows. Values must be
/// nonnegative and sorted descending.
fn closure_phases(d: &[f64]) -> Vec<C64> {
    let r = d.len();
    let excess: f64 = d[0] - d[1..].iter().sum::<f64>();
    let one = C64::new(1.0, 0.0);
    if excess >= 0.0 || r < 2 {
        // dominant side: the flattest configuration puts every minor side
        // antiparallel to the major one
        let mut u = vec![-one; r];
        u[0] = one;
        return u;
    }
    let unit = |angle: f64| C64::new(angle.cos(), angle.sin());
    // clamped law of cosines: angle opposite side c in triangle (a, b, c)
    let tri = |a: f64, b: f64, c: f64| -> f64 {
        if a < 1e-300 || b < 1e-300 {
            return 0.0;
        }
        (((c * c - a * a - b * b) / (2.0 * a * b)).clamp(-1.0, 1.0)).acos()
    };
    match r {
        2 => vec![one, -one], // closes exactly only when d1 = d2
        3 => {
            // triangle: d1 at angle 0, d2 rotated so the remainder has
            // length d3, d3 closing the loop
            let alpha = tri(d[0], d[1], d[2]);
            let v2 = unit(alpha);
            let rest = -(C64::new(d[0], 0.0) + v2 * C64::new(d[1], 0.0));
            let v3 = if rest.norm() > 1e-300 { rest / rest.norm() } else { -one };
            vec![one, v2, v3]
        }
        _ => {
            // quadrilateral: merge the two smallest sides into one of length
            // c chosen so both triangles (d1, d2, c) and (d3, d4, c) close
            let lo = (d[0] - d[1]).abs().max(d[2] - d[3]);
            let hi = (d[0] + d[1]).min(d[2] + d[3]);
            let c = 0.5 * (lo + hi);
            let alpha = tri(d[0], d[1], c);
            let v2 = unit(alpha);
            let rest = -(C64::new(d[0], 0.0) + v2 * C64::new(d[1], 0.0));
            let chi = tri(d[2], d[3], c);
            // d3 e^{i delta} + d4 e^{i (delta + chi)} has length c; align the
            // pair sum with `rest`
            let pair = C64::new(d[2], 0.0) + unit(chi) * C64::new(d[3], 0.0);
            let delta = rest.arg() - pair.arg();
            vec![one, v2, unit(delta), unit(delta + chi)]
        }
    }
}

/// Structured two-qubit seed: Takagi-align the ensemble so the symmetric
/// pre-concurrence matrix is diagonal, close its diagonal phases into the
/// smallest achievable real sum, then average the diagonal out with a
/// flat-magnitude real orthogonal mix. For generic two-qubit inputs this
/// lands directly on an optimal decomposition; it is still re-evaluated and
/// refined like any other candidate.
fn structured_seed(ens: &EigenEnsemble, m: usize) -> Option<Vec<C64>> {
    let r = ens.rank();
    if ens.dim != 4 || r < 2 || m < 4 {
        return None;
    }
    let yy = kron(&pauli_y(), &pauli_y());
    // tau_ab = x_a^T (Y x Y) x_b, complex symmetric
    let mut tau = vec![vec![C64::new(0.0, 0.0); r]; r];
    for a in 0..r {
        for b in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for p in 0..4 {
                for q in 0..4 {
                    acc += ens.columns[a][p] * yy.get(p, q) * ens.columns[b][q];
                }
            }
            tau[a][b] = acc;
        }
    }
    // Autonne-Takagi basis: from eigenvectors w of the Hermitian product
    // tau conj(tau), the antilinear map T(x) = tau conj(x) fixes
    // v = w + T(w)/sigma (or its i-rotated partner when that cancels), and
    // in the v basis tau is diagonal with real entries sigma >= 0.
    let t_map = |x: &[C64]| -> Vec<C64> {
        (0..r)
            .map(|a| (0..r).map(|b| tau[a][b] * x[b].conj()).sum())
            .collect()
    };
    let mut h = ComplexMatrix::zeros(r);
    for a in 0..r {
        for b in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for c in 0..r {
                acc += tau[a][c] * tau[b][c].conj();
            }
            h.set(a, b, acc);
        }
    }
    let (hev, vecs) = hermitian_eig(&h).ok()?;
    let mut basis: Vec<(f64, Vec<C64>)> = Vec::with_capacity(r);
    for k in 0..r {
        let w: Vec<C64> = (0..r).map(|i| vecs.get(i, r - 1 - k)).collect();
        let sigma = hev[r - 1 - k].max(0.0).sqrt();
        let v = if sigma < 1e-12 {
            w
        } else {
            let tw = t_map(&w);
            let mut v: Vec<C64> = w
                .iter()
                .zip(&tw)
                .map(|(a, b)| a + b / C64::new(sigma, 0.0))
                .collect();
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                v = w
                    .iter()
                    .zip(&tw)
                    .map(|(a, b)| C64::new(0.0, 1.0) * (a - b / C64::new(sigma, 0.0)))
                    .collect();
            }
            let norm: f64 = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-12 {
                return None;
            }
            v.iter().map(|x| x / norm).collect()
        };
        basis.push((sigma, v));
    }
    basis.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let d: Vec<f64> = basis.iter().map(|(v, _)| *v).collect();
    let u_phases = closure_phases(&d);
    // real orthogonal 4 x 4 mix with uniform squared entries
    const H4: [[f64; 4]; 4] = [
        [0.5, 0.5, 0.5, 0.5],
        [0.5, -0.5, 0.5, -0.5],
        [0.5, 0.5, -0.5, -0.5],
        [0.5, -0.5, -0.5, 0.5],
    ];
    let mut u = vec![C64::new(0.0, 0.0); m * r];
    for j in 0..4 {
        for b in 0..r {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..r {
                // rows of the seed are (phase_k)^(1/2)-rotated conjugated
                // Takagi vectors, mixed by the flat orthogonal matrix
                let half = C64::new(0.0, 0.5 * u_phases[k].arg()).exp();
                acc += C64::new(H4[j][k], 0.0) * half * basis[k].1[b].conj();
            }
            u[j * r + b] = acc;
        }
    }
    orthonormalize(&mut u, m, r).ok()?;
    Some(u)
}

fn random_isometry(rng: &mut ChaCha12Rng, m: usize, r: usize) -> Result<Vec<C64>> {
    let mut u: Vec<C64> = (0..m * r).map(|_| complex_gaussian(rng)).collect();
    orthonormalize(&mut u, m, r)?;
    Ok(u)
}

/// Minimizes the ensemble-average measure over explored decompositions of
/// `p.rho`. The returned value is a certified upper bound on the convex roof.
pub fn roof_upper_bound(p: &RoofProblem) -> Result<RoofSolution> {
    if let RoofMeasure::RenyiAlpha(a) = &p.measure {
        a.require_analytic()?;
    }
    if p.decay <= 0.0 || p.decay >= 1.0 || p.initial_step <= 0.0 {
        return Err(Error::Parameter(
            "step schedule must be strictly decreasing (0 < decay < 1, step > 0)".into(),
        ));
    }
    let ens = EigenEnsemble::build(&p.rho)?;
    let r = ens.rank();

    // Pure input: no mixing freedom, single-element ensemble.
    if r == 1 {
        let psi = PureState::normalized(ens.num_qubits, ens.columns[0].clone())?;
        let value = measure_value(&p.measure, &psi)?;
        return Ok(RoofSolution {
            value,
            ensemble: vec![(1.0, psi)],
        });
    }

    let m = p.ensemble_size.unwrap_or(2 * r);
    if m < r || m > 4 * r {
        return Err(Error::Parameter(format!(
            "ensemble size {m} outside [rank, 4 rank] = [{r}, {}]",
            4 * r
        )));
    }

    // Restarts are independent; substream (seed, restart index).
    let per_restart: Vec<Result<(f64, Vec<C64>)>> = (0..p.restarts.max(1))
        .into_par_iter()
        .map(|restart| {
            let mut rng = substream(p.seed, restart as u64);
            let mut u = if restart == 0 {
                // eigen-ensemble start: identity block padded with zeros
                let mut u = vec![C64::new(0.0, 0.0); m * r];
                for i in 0..r {
                    u[i * r + i] = C64::new(1.0, 0.0);
                }
                u
            } else {
                random_isometry(&mut rng, m, r)?
            };
            let mut best = ens.average(&u, m, &p.measure)?;
            let mut step = p.initial_step;
            for _ in 0..p.iterations {
                let mut cand = u.clone();
                for entry in cand.iter_mut() {
                    *entry += complex_gaussian(&mut rng) * C64::new(step, 0.0);
                }
                let mut improved = false;
                if orthonormalize(&mut cand, m, r).is_ok() {
                    let val = ens.average(&cand, m, &p.measure)?;
                    if val < best {
                        best = val;
                        u = cand;
                        improved = true;
                    }
                }
                // Shrink only on rejection so productive step sizes persist.
                if !improved {
                    step = (step * p.decay).max(1e-9);
                }
            }
            Ok((best, u))
        })
        .collect();

    let mut candidates: Vec<(f64, Vec<C64>)> =
        per_restart.into_iter().collect::<Result<_>>()?;
    if let Some(seed_u) = structured_seed(&ens, m) {
        let val = ens.average(&seed_u, m, &p.measure)?;
        candidates.push((val, seed_u));
    }
    candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    // Polish the leading candidates; the stochastic winner is not always in
    // the basin of the best refinable solution.
    let polished: Vec<Result<(f64, Vec<C64>)>> = candidates
        .into_iter()
        .take(4)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(val, mut u)| {
            let refined = polish(&ens, &mut u, m, &p.measure, val, 12)?;
            Ok((refined, u))
        })
        .collect();
    let mut best_val = f64::INFINITY;
    let mut best_u = None;
    for res in polished {
        let (val, u) = res?;
        if val < best_val {
            best_val = val;
            best_u = Some(u);
        }
    }
    let u = best_u.expect("at least one restart");
    Ok(RoofSolution {
        value: best_val,
        ensemble: ens.ensemble(&u, m)?,
    })
}

/// Oracle gap: Renyi-alpha roof upper bound minus the two-qubit analytic
/// value. The optimizer can only over-estimate, so the gap is >= -1e-6 up to
/// numerical noise.
pub fn roof_gap(rho: &DensityMatrix, a: &AlphaParam, seed: u64) -> Result<f64> {
    a.require_analytic()?;
    if rho.num_qubits() != 2 {
        return Err(Error::Dimension("roof_gap needs a two-qubit state".into()));
    }
    let problem = RoofProblem::new(rho.clone(), RoofMeasure::RenyiAlpha(*a), seed);
    let upper = roof_upper_bound(&problem)?.value;
    let analytic = renyi_entanglement_two_qubit(rho, a)?;
    Ok(upper - analytic)
}
