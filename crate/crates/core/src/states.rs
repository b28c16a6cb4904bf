//! Structured test states and seeded random-state sampling.
//!
//! Randomness comes from ChaCha12, a platform-stable seedable generator.
//! Stream split rule: sample `k` of a campaign with seed `s` uses the
//! generator seeded with `s` on stream `k` (see [`substream`]), so sample `k`
//! is identical whether a sweep runs serially or in parallel. Gaussians are
//! produced by Box-Muller from the uniform 53-bit stream.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::linalg::{ComplexMatrix, DensityMatrix, PureState, C64};
use crate::{Error, Result};

/// Generator for substream `index` of campaign `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[inline]
fn uniform_open01(rng: &mut ChaCha12Rng) -> f64 {
    // (0, 1]: 53-bit mantissa, shifted away from zero.
    ((rng.next_u64() >> 11) + 1) as f64 / (1u64 << 53) as f64
}

#[inline]
pub(crate) fn uniform_halfopen01(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// One pair of independent standard normals (Box-Muller).
pub fn standard_normal_pair(rng: &mut ChaCha12Rng) -> (f64, f64) {
    let u1 = uniform_open01(rng);
    let u2 = uniform_halfopen01(rng);
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1).
pub fn complex_gaussian(rng: &mut ChaCha12Rng) -> C64 {
    let (re, im) = standard_normal_pair(rng);
    C64::new(re, im)
}

/// GHZ state (|0...0> + |1...1>)/sqrt(2) on `n >= 2` qubits.
pub fn ghz(n: usize) -> Result<PureState> {
    if n < 2 {
        return Err(Error::Parameter(format!("ghz needs n >= 2, got {n}")));
    }
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let s = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = C64::new(s, 0.0);
    amps[dim - 1] = C64::new(s, 0.0);
    PureState::new(n, amps)
}

/// W state: equal superposition of the single-excitation basis states,
/// `n >= 3` qubits.
pub fn w_state(n: usize) -> Result<PureState> {
    if n < 3 {
        return Err(Error::Parameter(format!("w_state needs n >= 3, got {n}")));
    }
    let dim = 1usize << n;
    let mut amps = vec![C64::new(0.0, 0.0); dim];
    let a = 1.0 / (n as f64).sqrt();
    for q in 0..n {
        amps[1 << (n - 1 - q)] = C64::new(a, 0.0);
    }
    PureState::new(n, amps)
}

/// Generalized W state a|100> + b|010> + c|001> on three qubits.
/// The coefficients must be normalized within 1e-12.
pub fn generalized_w(a: C64, b: C64, c: C64) -> Result<PureState> {
    let norm_sqr = a.norm_sqr() + b.norm_sqr() + c.norm_sqr();
    if (norm_sqr - 1.0).abs() > 1e-12 {
        return Err(Error::Parameter(format!(
            "generalized_w coefficients not normalized: |a|^2+|b|^2+|c|^2 = {norm_sqr}"
        )));
    }
    let mut amps = vec![C64::new(0.0, 0.0); 8];
    amps[0b100] = a;
    amps[0b010] = b;
    amps[0b001] = c;
    PureState::new(3, amps)
}

/// Bell state (|00> + |11>)/sqrt(2).
pub fn bell() -> PureState {
    ghz(2).unwrap()
}

/// Two-qubit singlet (|01> - |10>)/sqrt(2).
pub fn singlet() -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureState::new(
        2,
        vec![
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(0.0, 0.0),
        ],
    )
    .unwrap()
}

/// Werner state p |Psi-><Psi-| + (1-p) I/4 on two qubits, p in [0, 1].
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Parameter(format!("werner p must be in [0,1], got {p}")));
    }
    let proj = singlet().density();
    let m = proj
        .matrix()
        .scale(C64::new(p, 0.0))
        .add(&ComplexMatrix::identity(4).scale(C64::new((1.0 - p) / 4.0, 0.0)));
    DensityMatrix::new(2, m)
}

/// Haar-random pure state: normalized vector of independent standard complex
/// Gaussians drawn from `rng`.
pub fn haar_random_pure_from(n: usize, rng: &mut ChaCha12Rng) -> Result<PureState> {
    if n < 1 {
        return Err(Error::Parameter(format!("need n >= 1 qubits, got {n}")));
    }
    let dim = 1usize << n;
    let amps: Vec<C64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    PureState::normalized(n, amps)
}

/// Haar-random pure state for a fixed seed (stream 0).
pub fn haar_random_pure(n: usize, seed: u64) -> Result<PureState> {
    haar_random_pure_from(n, &mut substream(seed, 0))
}

/// Random mixed state G G^dagger / tr(G G^dagger) for a 2^n x rank complex
/// Gaussian matrix G.
pub fn random_density_from(n: usize, rank: usize, rng: &mut ChaCha12Rng) -> Result<DensityMatrix> {
    if n < 1 {
        return Err(Error::Parameter(format!("need n >= 1 qubits, got {n}")));
    }
    let dim = 1usize << n;
    if rank < 1 || rank > dim {
        return Err(Error::Parameter(format!(
            "rank must be in 1..={dim}, got {rank}"
        )));
    }
    let g: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..rank).map(|_| complex_gaussian(rng)).collect())
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    let mut tr = 0.0;
    for i in 0..dim {
        for j in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..rank {
                acc += g[i][k] * g[j][k].conj();
            }
            m.set(i, j, acc);
            if i == j {
                tr += acc.re;
            }
        }
    }
    let m = m.scale(C64::new(1.0 / tr, 0.0));
    DensityMatrix::new(n, m)
}

/// Random mixed state for a fixed seed (stream 0).
pub fn random_density(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_from(n, rank, &mut substream(seed, 0))
}

/// Declarative description of a test-state family.
#[derive(Clone, Debug, PartialEq)]
pub enum StateKind {
    Ghz,
    W,
    GeneralizedW { a: C64, b: C64, c: C64 },
    Bell,
    Werner { p: f64 },
    HaarPure,
    GinibreMixed { rank: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateFamily {
    pub kind: StateKind,
    pub num_qubits: usize,
}

/// Output of a family sample: pure or mixed.
#[derive(Clone, Debug)]
pub enum SampledState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl StateFamily {
    /// Sample `index` of the family under `seed`. Deterministic families
    /// ignore both arguments.
    pub fn sample(&self, seed: u64, index: u64) -> Result<SampledState> {
        let n = self.num_qubits;
        match &self.kind {
            StateKind::Ghz => Ok(SampledState::Pure(ghz(n)?)),
            StateKind::W => Ok(SampledState::Pure(w_state(n)?)),
            StateKind::GeneralizedW { a, b, c } => {
                if n != 3 {
                    return Err(Error::Parameter(
                        "generalized W is a three-qubit family".into(),
                    ));
                }
                Ok(SampledState::Pure(generalized_w(*a, *b, *c)?))
            }
            StateKind::Bell => {
                if n != 2 {
                    return Err(Error::Parameter("Bell is a two-qubit family".into()));
                }
                Ok(SampledState::Pure(bell()))
            }
            StateKind::Werner { p } => {
                if n != 2 {
                    return Err(Error::Parameter("Werner is a two-qubit family".into()));
                }
                Ok(SampledState::Mixed(werner(*p)?))
            }
            StateKind::HaarPure => Ok(SampledState::Pure(haar_random_pure_from(
                n,
                &mut substream(seed, index),
            )?)),
            StateKind::GinibreMixed { rank } => Ok(SampledState::Mixed(random_density_from(
                n,
                *rank,
                &mut substream(seed, index),
            )?)),
        }
    }
}
