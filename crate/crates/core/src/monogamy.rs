//! Monogamy bound builders and verification harness.
//!
//! For a pure global state on qubits A, B_1..B_{N-1}, the left-hand side of
//! every bound is E_alpha^eta of the A vs rest bipartition (computed from the
//! single-qubit marginal of A). The right-hand sides are the four tightened
//! hierarchies plus the (2^s - 1)-weighted baseline they improve on.
//!
//! Ordering hypotheses are checked through the computable quadratic
//! surrogate c_i^2 >= sum_{j>i} c_j^2 (resp. <=), which is exactly the
//! inequality the proof chain consumes; for N = 3 it coincides with the
//! literal marginal-concurrence comparison.

use rayon::prelude::*;

use crate::linalg::{partial_trace, PureState};
use crate::measures::{
    concurrence_pure, concurrence_two_qubit, g_alpha, renyi_entanglement_pure, AlphaParam,
    EtaParam, ALPHA_ANALYTIC_MIN,
};
use crate::states::{ghz, haar_random_pure_from, substream, w_state};
use crate::{Error, Result};

/// A pure global state with a designated party A and an ordered list of
/// B parties covering the remaining qubits exactly once.
#[derive(Clone, Debug)]
pub struct ChainState {
    psi: PureState,
    party_a: usize,
    parties_b: Vec<usize>,
}

impl ChainState {
    pub fn new(psi: PureState, party_a: usize, parties_b: Vec<usize>) -> Result<Self> {
        let n = psi.num_qubits();
        if n < 3 {
            return Err(Error::State(format!(
                "monogamy chains need at least 3 qubits, got {n}"
            )));
        }
        let mut seen = vec![false; n];
        let mut mark = |q: usize| -> Result<()> {
            if q >= n {
                return Err(Error::QubitIndex(format!("qubit {q} out of range")));
            }
            if seen[q] {
                return Err(Error::QubitIndex(format!("qubit {q} listed twice")));
            }
            seen[q] = true;
            Ok(())
        };
        mark(party_a)?;
        for &b in &parties_b {
            mark(b)?;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::QubitIndex(
                "party list must cover all qubits exactly once".into(),
            ));
        }
        Ok(ChainState {
            psi,
            party_a,
            parties_b,
        })
    }

    /// Natural ordering: A = qubit 0, B parties = remaining qubits ascending.
    pub fn natural(psi: PureState) -> Result<Self> {
        let n = psi.num_qubits();
        let parties_b = (1..n).collect();
        ChainState::new(psi, 0, parties_b)
    }

    pub fn psi(&self) -> &PureState {
        &self.psi
    }

    pub fn num_parties(&self) -> usize {
        self.parties_b.len() + 1
    }
}

/// All marginal quantities a bound needs, at one alpha.
#[derive(Clone, Debug)]
pub struct MarginalProfile {
    pub alpha: f64,
    /// Concurrence of A vs rest.
    pub c_global: f64,
    /// Two-qubit Wootters concurrences C(rho_{A|B_j}).
    pub c_pair: Vec<f64>,
    /// g_alpha of each pairwise concurrence.
    pub e_pair: Vec<f64>,
    /// Renyi-alpha entanglement of the global bipartition.
    pub e_global: f64,
}

impl MarginalProfile {
    /// Number of parties N (A plus the B list).
    pub fn num_parties(&self) -> usize {
        self.c_pair.len() + 1
    }

    /// CKW residual c_global^2 - sum c_pair^2.
    pub fn ckw_residual(&self) -> f64 {
        self.c_global * self.c_global - self.c_pair.iter().map(|c| c * c).sum::<f64>()
    }

    /// Copy with B parties reordered by descending pairwise concurrence.
    pub fn sorted_descending(&self) -> MarginalProfile {
        let mut order: Vec<usize> = (0..self.c_pair.len()).collect();
        order.sort_by(|&i, &j| self.c_pair[j].partial_cmp(&self.c_pair[i]).unwrap());
        MarginalProfile {
            alpha: self.alpha,
            c_global: self.c_global,
            c_pair: order.iter().map(|&i| self.c_pair[i]).collect(),
            e_pair: order.iter().map(|&i| self.e_pair[i]).collect(),
            e_global: self.e_global,
        }
    }

    /// True when the descending surrogate holds at every i = 1..N-2.
    pub fn descending_all(&self) -> bool {
        (1..self.num_parties() - 1).all(|i| ordering_condition(self, i, true).unwrap())
    }

    /// Split indices m (1..=N-3) with the descending surrogate at i <= m and
    /// the ascending surrogate at j = m+1..N-2.
    pub fn admissible_splits(&self) -> Vec<usize> {
        let n = self.num_parties();
        if n < 4 {
            return Vec::new();
        }
        (1..=n - 3)
            .filter(|&m| self.split_condition(m))
            .collect()
    }

    /// Mixed ordering hypothesis of Lemmas 3/5 at split m.
    pub fn split_condition(&self, m: usize) -> bool {
        let n = self.num_parties();
        if n < 4 || m < 1 || m > n - 3 {
            return false;
        }
        (1..=m).all(|i| ordering_condition(self, i, true).unwrap())
            && (m + 1..=n - 2).all(|j| ordering_condition(self, j, false).unwrap())
    }
}

/// Surrogate ordering condition at 1-based index `i`:
/// descending checks c_i^2 >= sum_{j>i} c_j^2, ascending checks <=.
pub fn ordering_condition(prof: &MarginalProfile, i: usize, descending: bool) -> Result<bool> {
    let n = prof.num_parties();
    if i < 1 || i > n - 2 {
        return Err(Error::Parameter(format!(
            "ordering index {i} outside 1..={}",
            n - 2
        )));
    }
    let lhs = prof.c_pair[i - 1] * prof.c_pair[i - 1];
    let rhs: f64 = prof.c_pair[i..].iter().map(|c| c * c).sum();
    Ok(if descending { lhs >= rhs } else { lhs <= rhs })
}

/// Computes the full marginal profile of a chain at `a`. Requires the
/// analytic alpha regime since pairwise values go through g_alpha.
pub fn profile(chain: &ChainState, a: &AlphaParam) -> Result<MarginalProfile> {
    a.require_analytic()?;
    let rho = chain.psi.density();
    let side_a = [chain.party_a];
    let c_global = concurrence_pure(&chain.psi, &side_a)?;
    let e_global = renyi_entanglement_pure(&chain.psi, &side_a, a)?;
    let mut c_pair = Vec::with_capacity(chain.parties_b.len());
    let mut e_pair = Vec::with_capacity(chain.parties_b.len());
    for &b in &chain.parties_b {
        let pair = partial_trace(&rho, &[chain.party_a, b])?;
        let c = concurrence_two_qubit(&pair)?;
        c_pair.push(c);
        e_pair.push(g_alpha(c, a)?);
    }
    Ok(MarginalProfile {
        alpha: a.alpha(),
        c_global,
        c_pair,
        e_pair,
        e_global,
    })
}

fn check_l2_regime(prof: &MarginalProfile, e: &EtaParam) -> Result<()> {
    if prof.alpha < 2.0 {
        return Err(Error::Regime(format!(
            "this bound needs alpha >= 2, got {}",
            prof.alpha
        )));
    }
    debug_assert!(e.eta() >= 1.0);
    Ok(())
}

fn check_l4_regime(prof: &MarginalProfile, e: &EtaParam) -> Result<()> {
    if !(ALPHA_ANALYTIC_MIN..2.0).contains(&prof.alpha) {
        return Err(Error::Regime(format!(
            "this bound needs (sqrt(7)-1)/2 <= alpha < 2, got {}",
            prof.alpha
        )));
    }
    if e.eta() < 2.0 {
        return Err(Error::Regime(format!(
            "this bound needs eta >= 2, got {}",
            e.eta()
        )));
    }
    Ok(())
}

fn check_split(prof: &MarginalProfile, m: usize) -> Result<()> {
    let n = prof.num_parties();
    if n < 4 {
        return Err(Error::Regime(format!(
            "split bounds need N >= 4 parties, got {n}"
        )));
    }
    if m < 1 || m > n - 3 {
        return Err(Error::Parameter(format!(
            "split index {m} outside 1..={}",
            n - 3
        )));
    }
    Ok(())
}

/// Lemma 2 hierarchy: sum_{k<=N-3} (2^eta-1)^{k-1} E_k^eta plus the
/// cross-term bracket on the last two parties.
pub fn bound_lemma2(prof: &MarginalProfile, e: &EtaParam) -> Result<f64> {
    check_l2_regime(prof, e)?;
    let ep = &prof.e_pair;
    let n1 = ep.len(); // N - 1 >= 2
    let eta = e.eta();
    let w = 2f64.powf(eta) - 1.0;
    let mut acc = 0.0;
    for k in 0..n1.saturating_sub(2) {
        acc += w.powi(k as i32) * ep[k].powf(eta);
    }
    let e_m2 = ep[n1 - 2]; // E_{N-2}
    let e_m1 = ep[n1 - 1]; // E_{N-1}
    let bracket = e_m2.powf(eta)
        + (eta / 2.0) * e_m2.powf(eta - 1.0) * e_m1
        + (2f64.powf(eta) - eta / 2.0 - 1.0) * e_m1.powf(eta);
    Ok(acc + w.powi((n1 - 2) as i32) * bracket)
}

/// Lemma 3 hierarchy for the mixed ordering with split index m.
pub fn bound_lemma3(prof: &MarginalProfile, m: usize, e: &EtaParam) -> Result<f64> {
    check_l2_regime(prof, e)?;
    check_split(prof, m)?;
    let ep = &prof.e_pair;
    let n1 = ep.len();
    let eta = e.eta();
    let w = 2f64.powf(eta) - 1.0;
    let mut acc = 0.0;
    for k in 1..=m {
        acc += w.powi((k - 1) as i32) * ep[k - 1].powf(eta);
    }
    for k in (m + 1)..=(n1 - 2) {
        acc += w.powi((m + 1) as i32) * ep[k - 1].powf(eta);
    }
    let e_m2 = ep[n1 - 2];
    let e_m1 = ep[n1 - 1];
    let bracket = (2f64.powf(eta) - eta / 2.0 - 1.0) * e_m2.powf(eta)
        + (eta / 2.0) * e_m2 * e_m1.powf(eta - 1.0)
        + e_m1.powf(eta);
    Ok(acc + w.powi(m as i32) * bracket)
}

/// Exponent placement in the Lemma 4 bracket. The printed statement puts
/// eta-2 on the last party; its own proof step puts it on the larger
/// (next-to-last) party. Both are computed; proof-consistent is the default.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma4Variant {
    ProofConsistent,
    AsPrinted,
}

/// Lemma 4 hierarchy (alpha below 2, powers in t = eta/2).
pub fn bound_lemma4(prof: &MarginalProfile, e: &EtaParam, variant: Lemma4Variant) -> Result<f64> {
    check_l4_regime(prof, e)?;
    let ep = &prof.e_pair;
    let n1 = ep.len();
    let eta = e.eta();
    let t = e.t();
    let w = 2f64.powf(t) - 1.0;
    let mut acc = 0.0;
    for k in 0..n1.saturating_sub(2) {
        acc += w.powi(k as i32) * ep[k].powf(eta);
    }
    let e_m2 = ep[n1 - 2];
    let e_m1 = ep[n1 - 1];
    let cross = match variant {
        Lemma4Variant::ProofConsistent => (t / 2.0) * e_m2.powf(eta - 2.0) * e_m1 * e_m1,
        Lemma4Variant::AsPrinted => (t / 2.0) * e_m1.powf(eta - 2.0) * e_m2 * e_m2,
    };
    let bracket = e_m2.powf(eta) + cross + (2f64.powf(t) - t / 2.0 - 1.0) * e_m1.powf(eta);
    Ok(acc + w.powi((n1 - 2) as i32) * bracket)
}

/// Lemma 5 hierarchy (mixed ordering, powers in t = eta/2).
pub fn bound_lemma5(prof: &MarginalProfile, m: usize, e: &EtaParam) -> Result<f64> {
    check_l4_regime(prof, e)?;
    check_split(prof, m)?;
    let ep = &prof.e_pair;
    let n1 = ep.len();
    let eta = e.eta();
    let t = e.t();
    let w = 2f64.powf(t) - 1.0;
    let mut acc = 0.0;
    for k in 1..=m {
        acc += w.powi((k - 1) as i32) * ep[k - 1].powf(eta);
    }
    for k in (m + 1)..=(n1 - 2) {
        acc += w.powi((m + 1) as i32) * ep[k - 1].powf(eta);
    }
    let e_m2 = ep[n1 - 2];
    let e_m1 = ep[n1 - 1];
    let bracket = (2f64.powf(t) - t / 2.0 - 1.0) * e_m2.powf(eta)
        + (t / 2.0) * e_m2 * e_m2 * e_m1.powf(eta - 2.0)
        + e_m1.powf(eta);
    Ok(acc + w.powi(m as i32) * bracket)
}

/// Baseline weighting regime: s = eta (alpha >= 2 hierarchy) or s = t = eta/2.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaselineRegime {
    EtaPower,
    TPower,
}

/// Prior-art baseline sum_{k=1}^{N-1} (2^s - 1)^{k-1} E_k^eta.
pub fn bound_baseline(prof: &MarginalProfile, e: &EtaParam, regime: BaselineRegime) -> Result<f64> {
    match regime {
        BaselineRegime::EtaPower => check_l2_regime(prof, e)?,
        BaselineRegime::TPower => check_l4_regime(prof, e)?,
    }
    let s = match regime {
        BaselineRegime::EtaPower => e.eta(),
        BaselineRegime::TPower => e.t(),
    };
    let w = 2f64.powf(s) - 1.0;
    let eta = e.eta();
    Ok(prof
        .e_pair
        .iter()
        .enumerate()
        .map(|(k, ek)| w.powi(k as i32) * ek.powf(eta))
        .sum())
}

/// Which bound a report refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lemma {
    L2,
    L3,
    L4,
    L5,
}

impl Lemma {
    pub fn as_str(&self) -> &'static str {
        match self {
            Lemma::L2 => "L2",
            Lemma::L3 => "L3",
            Lemma::L4 => "L4",
            Lemma::L5 => "L5",
        }
    }
}

impl std::str::FromStr for Lemma {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L2" => Ok(Lemma::L2),
            "L3" => Ok(Lemma::L3),
            "L4" => Ok(Lemma::L4),
            "L5" => Ok(Lemma::L5),
            other => Err(Error::Config(format!("unknown lemma {other:?}"))),
        }
    }
}

/// Bound selection for a single verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaSelector {
    L2,
    L3 { m: usize },
    L4 { variant: Lemma4Variant },
    L5 { m: usize },
}

impl LemmaSelector {
    pub fn lemma(&self) -> Lemma {
        match self {
            LemmaSelector::L2 => Lemma::L2,
            LemmaSelector::L3 { .. } => Lemma::L3,
            LemmaSelector::L4 { .. } => Lemma::L4,
            LemmaSelector::L5 { .. } => Lemma::L5,
        }
    }
}

/// One verification record.
#[derive(Clone, Debug)]
pub struct MonogamyReport {
    pub lemma: Lemma,
    pub variant: Option<Lemma4Variant>,
    pub alpha: f64,
    pub eta: f64,
    pub m: Option<usize>,
    /// Whether the surrogate ordering hypothesis holds. When false the
    /// margin is recorded as data but carries no assertion.
    pub condition_met: bool,
    /// E_alpha^eta of the global bipartition.
    pub lhs: f64,
    pub rhs_new: f64,
    pub rhs_baseline: f64,
    pub margin: f64,
    pub tightening: f64,
}

/// Builds a report from a profile whose B parties are already in the order
/// the selected lemma expects.
pub fn report_from_profile(
    prof: &MarginalProfile,
    e: &EtaParam,
    sel: &LemmaSelector,
) -> Result<MonogamyReport> {
    let (rhs_new, rhs_baseline, condition_met, variant, m) = match sel {
        LemmaSelector::L2 => (
            bound_lemma2(prof, e)?,
            bound_baseline(prof, e, BaselineRegime::EtaPower)?,
            prof.descending_all(),
            None,
            None,
        ),
        LemmaSelector::L3 { m } => (
            bound_lemma3(prof, *m, e)?,
            bound_baseline(prof, e, BaselineRegime::EtaPower)?,
            prof.split_condition(*m),
            None,
            Some(*m),
        ),
        LemmaSelector::L4 { variant } => (
            bound_lemma4(prof, e, *variant)?,
            bound_baseline(prof, e, BaselineRegime::TPower)?,
            prof.descending_all(),
            Some(*variant),
            None,
        ),
        LemmaSelector::L5 { m } => (
            bound_lemma5(prof, *m, e)?,
            bound_baseline(prof, e, BaselineRegime::TPower)?,
            prof.split_condition(*m),
            None,
            Some(*m),
        ),
    };
    let lhs = prof.e_global.powf(e.eta());
    Ok(MonogamyReport {
        lemma: sel.lemma(),
        variant,
        alpha: prof.alpha,
        eta: e.eta(),
        m,
        condition_met,
        lhs,
        rhs_new,
        rhs_baseline,
        margin: lhs - rhs_new,
        tightening: rhs_new - rhs_baseline,
    })
}

/// Full verification of one chain: computes the profile, applies the
/// canonical descending sort for L2/L4 (L3/L5 use the chain's own order),
/// and evaluates the selected bound.
pub fn verify(
    chain: &ChainState,
    a: &AlphaParam,
    e: &EtaParam,
    sel: &LemmaSelector,
) -> Result<MonogamyReport> {
    let prof = profile(chain, a)?;
    let prof = match sel {
        LemmaSelector::L2 | LemmaSelector::L4 { .. } => prof.sorted_descending(),
        _ => prof,
    };
    report_from_profile(&prof, e, sel)
}

// ---------------------------------------------------------------------------
// Sweep campaigns
// ---------------------------------------------------------------------------

/// Pure-state families a sweep can draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepFamily {
    Haar,
    Ghz,
    W,
}

impl std::str::FromStr for SweepFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "haar" => Ok(SweepFamily::Haar),
            "ghz" => Ok(SweepFamily::Ghz),
            "w" => Ok(SweepFamily::W),
            other => Err(Error::Config(format!("unknown state family {other:?}"))),
        }
    }
}

impl SweepFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepFamily::Haar => "haar",
            SweepFamily::Ghz => "ghz",
            SweepFamily::W => "w",
        }
    }
}

/// Declarative description of a verification campaign.
#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub family: SweepFamily,
    pub num_qubits: usize,
    pub alphas: Vec<f64>,
    pub etas: Vec<f64>,
    pub lemmas: Vec<Lemma>,
    pub samples: u64,
    pub seed: u64,
    pub tolerance: f64,
}

impl SweepConfig {
    /// Rejects any (alpha, eta, lemma) combination outside its regime before
    /// any work happens.
    pub fn validate(&self) -> Result<()> {
        if self.num_qubits < 3 {
            return Err(Error::Config("sweeps need at least 3 qubits".into()));
        }
        if self.alphas.is_empty() || self.etas.is_empty() || self.lemmas.is_empty() {
            return Err(Error::Config(
                "alpha grid, eta grid and lemma list must be nonempty".into(),
            ));
        }
        if self.tolerance < 0.0 {
            return Err(Error::Config("tolerance must be nonnegative".into()));
        }
        for &alpha in &self.alphas {
            AlphaParam::new(alpha)?.require_analytic()?;
        }
        for &eta in &self.etas {
            EtaParam::new(eta)?;
        }
        for &lemma in &self.lemmas {
            for &alpha in &self.alphas {
                for &eta in &self.etas {
                    match lemma {
                        Lemma::L2 | Lemma::L3 => {
                            if alpha < 2.0 {
                                return Err(Error::Config(format!(
                                    "{} needs alpha >= 2, got {alpha}",
                                    lemma.as_str()
                                )));
                            }
                        }
                        Lemma::L4 | Lemma::L5 => {
                            if !(ALPHA_ANALYTIC_MIN..2.0).contains(&alpha) {
                                return Err(Error::Config(format!(
                                    "{} needs (sqrt(7)-1)/2 <= alpha < 2, got {alpha}",
                                    lemma.as_str()
                                )));
                            }
                            if eta < 2.0 {
                                return Err(Error::Config(format!(
                                    "{} needs eta >= 2, got {eta}",
                                    lemma.as_str()
                                )));
                            }
                        }
                    }
                }
            }
            if matches!(lemma, Lemma::L3 | Lemma::L5) && self.num_qubits < 4 {
                return Err(Error::Config(format!(
                    "{} needs at least 4 qubits",
                    lemma.as_str()
                )));
            }
        }
        Ok(())
    }
}

/// One output row of a sweep.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub sample: u64,
    pub report: MonogamyReport,
}

/// Aggregate counts over a sweep.
#[derive(Clone, Debug, Default)]
pub struct SweepSummary {
    pub samples: u64,
    pub rows: usize,
    pub condition_met: usize,
    pub min_margin: Option<f64>,
    pub min_tightening: Option<f64>,
    /// Rows with condition_met and margin below -tolerance.
    pub violations: usize,
}

fn sample_state(config: &SweepConfig, sample: u64) -> Result<PureState> {
    match config.family {
        SweepFamily::Haar => {
            haar_random_pure_from(config.num_qubits, &mut substream(config.seed, sample))
        }
        SweepFamily::Ghz => ghz(config.num_qubits),
        SweepFamily::W => w_state(config.num_qubits),
    }
}

fn rows_for_sample(config: &SweepConfig, sample: u64) -> Result<Vec<SweepRow>> {
    let psi = sample_state(config, sample)?;
    let chain = ChainState::natural(psi)?;
    let n = config.num_qubits;
    let mut rows = Vec::new();
    for &alpha in &config.alphas {
        let a = AlphaParam::new(alpha)?;
        let prof = profile(&chain, &a)?;
        let sorted = prof.sorted_descending();
        for &eta in &config.etas {
            let e = EtaParam::new(eta)?;
            for &lemma in &config.lemmas {
                match lemma {
                    Lemma::L2 => {
                        rows.push(SweepRow {
                            sample,
                            report: report_from_profile(&sorted, &e, &LemmaSelector::L2)?,
                        });
                    }
                    Lemma::L4 => {
                        for variant in [Lemma4Variant::ProofConsistent, Lemma4Variant::AsPrinted] {
                            rows.push(SweepRow {
                                sample,
                                report: report_from_profile(
                                    &sorted,
                                    &e,
                                    &LemmaSelector::L4 { variant },
                                )?,
                            });
                        }
                    }
                    Lemma::L3 => {
                        for m in 1..=n - 3 {
                            rows.push(SweepRow {
                                sample,
                                report: report_from_profile(&prof, &e, &LemmaSelector::L3 { m })?,
                            });
                        }
                    }
                    Lemma::L5 => {
                        for m in 1..=n - 3 {
                            rows.push(SweepRow {
                                sample,
                                report: report_from_profile(&prof, &e, &LemmaSelector::L5 { m })?,
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(rows)
}

/// Runs a verification campaign. Deterministic for a fixed seed regardless of
/// parallelism: sample k always draws RNG substream (seed, k) and rows are
/// aggregated in sample order.
pub fn sweep(config: &SweepConfig) -> Result<(Vec<SweepRow>, SweepSummary)> {
    config.validate()?;
    let per_sample: Vec<Result<Vec<SweepRow>>> = (0..config.samples)
        .into_par_iter()
        .map(|k| rows_for_sample(config, k))
        .collect();
    let mut rows = Vec::new();
    for r in per_sample {
        rows.extend(r?);
    }
    let mut summary = SweepSummary {
        samples: config.samples,
        rows: rows.len(),
        ..Default::default()
    };
    for row in &rows {
        let rep = &row.report;
        summary.min_tightening = Some(match summary.min_tightening {
            Some(t) => t.min(rep.tightening),
            None => rep.tightening,
        });
        if rep.condition_met {
            summary.condition_met += 1;
            summary.min_margin = Some(match summary.min_margin {
                Some(m) => m.min(rep.margin),
                None => rep.margin,
            });
            if rep.margin < -config.tolerance {
                summary.violations += 1;
            }
        }
    }
    Ok((rows, summary))
}

/// Full round-trip float formatting (17 significant digits).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Fixed CSV header for sweep artifacts.
pub const CSV_HEADER: &str =
    "seed,sample,n_qubits,alpha,eta,lemma,variant,m,condition_met,lhs,rhs_new,rhs_baseline,margin,tightening";

fn variant_str(v: Option<Lemma4Variant>) -> &'static str {
    match v {
        None => "",
        Some(Lemma4Variant::ProofConsistent) => "proof",
        Some(Lemma4Variant::AsPrinted) => "printed",
    }
}

/// Renders sweep rows as CSV with the fixed column order.
pub fn rows_to_csv(seed: u64, n_qubits: usize, rows: &[SweepRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let r = &row.report;
        let m = r.m.map(|m| m.to_string()).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            seed,
            row.sample,
            n_qubits,
            fmt_float(r.alpha),
            fmt_float(r.eta),
            r.lemma.as_str(),
            variant_str(r.variant),
            m,
            r.condition_met,
            fmt_float(r.lhs),
            fmt_float(r.rhs_new),
            fmt_float(r.rhs_baseline),
            fmt_float(r.margin),
            fmt_float(r.tightening),
        ));
    }
    out
}

/// Renders sweep rows as a JSON array with the same fields as the CSV.
pub fn rows_to_json(seed: u64, n_qubits: usize, rows: &[SweepRow]) -> String {
    let mut out = String::from("[");
    for (i, row) in rows.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let r = &row.report;
        let m = r
            .m
            .map(|m| m.to_string())
            .unwrap_or_else(|| "null".into());
        out.push_str(&format!(
            "\n  {{\"seed\":{},\"sample\":{},\"n_qubits\":{},\"alpha\":{},\"eta\":{},\"lemma\":\"{}\",\"variant\":\"{}\",\"m\":{},\"condition_met\":{},\"lhs\":{},\"rhs_new\":{},\"rhs_baseline\":{},\"margin\":{},\"tightening\":{}}}",
            seed,
            row.sample,
            n_qubits,
            fmt_float(r.alpha),
            fmt_float(r.eta),
            r.lemma.as_str(),
            variant_str(r.variant),
            m,
            r.condition_met,
            fmt_float(r.lhs),
            fmt_float(r.rhs_new),
            fmt_float(r.rhs_baseline),
            fmt_float(r.margin),
            fmt_float(r.tightening),
        ));
    }
    out.push_str("\n]\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states;

    fn alpha(a: f64) -> AlphaParam {
        AlphaParam::new(a).unwrap()
    }

    fn eta(e: f64) -> EtaParam {
        EtaParam::new(e).unwrap()
    }

    fn profile_of(c_pair: Vec<f64>, a: f64) -> MarginalProfile {
        let ap = alpha(a);
        let e_pair = c_pair.iter().map(|&c| g_alpha(c, &ap).unwrap()).collect();
        MarginalProfile {
            alpha: a,
            c_global: 0.0,
            c_pair,
            e_pair,
            e_global: 0.0,
        }
    }

    // Profile with e_pair set directly (for arithmetic checks on the bound
    // builders).
    fn profile_with_e(e_pair: Vec<f64>, a: f64) -> MarginalProfile {
        MarginalProfile {
            alpha: a,
            c_global: 0.0,
            c_pair: e_pair.clone(),
            e_pair,
            e_global: 0.0,
        }
    }

    #[test]
    fn chain_state_validation() {
        let psi = states::ghz(3).unwrap();
        assert!(ChainState::new(psi.clone(), 0, vec![1, 2]).is_ok());
        assert!(ChainState::new(psi.clone(), 0, vec![1]).is_err());
        assert!(ChainState::new(psi.clone(), 0, vec![1, 1]).is_err());
        assert!(ChainState::new(psi.clone(), 0, vec![1, 3]).is_err());
        assert!(ChainState::new(states::bell(), 0, vec![1]).is_err());
    }

    #[test]
    fn profile_ghz3() {
        let chain = ChainState::natural(states::ghz(3).unwrap()).unwrap();
        let p = profile(&chain, &alpha(2.0)).unwrap();
        assert!((p.c_global - 1.0).abs() < 1e-10);
        assert!((p.e_global - 1.0).abs() < 1e-10);
        for c in &p.c_pair {
            assert!(*c < 1e-10);
        }
    }

    #[test]
    fn profile_w3() {
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        let p = profile(&chain, &alpha(2.0)).unwrap();
        assert!((p.c_global - 2.0 * 2f64.sqrt() / 3.0).abs() < 1e-10);
        let e_exp = (9.0f64 / 5.0).log2();
        assert!((p.e_global - e_exp).abs() < 1e-10);
        let pair_exp = (9.0f64 / 7.0).log2();
        for (c, e) in p.c_pair.iter().zip(&p.e_pair) {
            assert!((c - 2.0 / 3.0).abs() < 1e-10);
            assert!((e - pair_exp).abs() < 1e-10);
        }
        assert!(p.ckw_residual() >= -1e-9);
    }

    #[test]
    fn profile_product_state() {
        let psi = states::generalized_w(
            crate::linalg::C64::new(1.0, 0.0),
            crate::linalg::C64::new(0.0, 0.0),
            crate::linalg::C64::new(0.0, 0.0),
        )
        .unwrap();
        let chain = ChainState::natural(psi).unwrap();
        let p = profile(&chain, &alpha(2.0)).unwrap();
        assert!(p.c_global < 1e-10 && p.e_global < 1e-10);
        assert!(p.c_pair.iter().all(|c| *c < 1e-10));
    }

    #[test]
    fn ordering_condition_cases() {
        let p = profile_of(vec![2.0 / 3.0, 2.0 / 3.0], 2.0);
        assert!(ordering_condition(&p, 1, true).unwrap());

        let z = profile_of(vec![0.0, 0.0], 2.0);
        assert!(ordering_condition(&z, 1, true).unwrap());
        assert!(ordering_condition(&z, 1, false).unwrap());

        let q = profile_of(vec![0.3, 0.8, 0.1], 2.0);
        assert!(!ordering_condition(&q, 1, true).unwrap());
        assert!(ordering_condition(&q, 1, false).unwrap());

        assert!(ordering_condition(&q, 0, true).is_err());
        assert!(ordering_condition(&q, 3, true).is_err());
    }

    #[test]
    fn bound_lemma2_w3() {
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        let p = profile(&chain, &alpha(2.0)).unwrap().sorted_descending();
        let rhs = bound_lemma2(&p, &eta(1.0)).unwrap();
        let expect = 2.0 * (9.0f64 / 7.0).log2();
        assert!((rhs - expect).abs() < 1e-9);
        assert!((rhs - 0.7251402).abs() < 1e-7);
        assert!(p.e_global >= rhs);
    }

    #[test]
    fn bound_lemma2_degenerate() {
        let z = profile_with_e(vec![0.0, 0.0], 2.0);
        assert_eq!(bound_lemma2(&z, &eta(2.5)).unwrap(), 0.0);

        // single nonzero E1, N = 3: only E1^eta survives
        let p = profile_with_e(vec![0.4, 0.0], 2.0);
        for et in [1.0, 2.0, 3.0] {
            let rhs = bound_lemma2(&p, &eta(et)).unwrap();
            assert!((rhs - 0.4f64.powf(et)).abs() < 1e-12, "eta {et}");
        }
    }

    #[test]
    fn bound_lemma3_arithmetic() {
        let z = profile_with_e(vec![0.0, 0.0, 0.0], 2.0);
        assert_eq!(bound_lemma3(&z, 1, &eta(1.0)).unwrap(), 0.0);

        // eta = 1 collapses to the plain sum
        let p = profile_with_e(vec![0.5, 0.2, 0.4], 2.0);
        let rhs = bound_lemma3(&p, 1, &eta(1.0)).unwrap();
        assert!((rhs - 1.1).abs() < 1e-12);

        // direct substitution at eta = 2:
        // 0.25 + 3 * [2*0.04 + 1*0.2*0.4 + 0.16] = 0.25 + 3*0.32 = 1.21
        let rhs = bound_lemma3(&p, 1, &eta(2.0)).unwrap();
        assert!((rhs - 1.21).abs() < 1e-12, "rhs {rhs}");

        assert!(bound_lemma3(&p, 0, &eta(2.0)).is_err());
        assert!(bound_lemma3(&p, 2, &eta(2.0)).is_err());
        let small = profile_with_e(vec![0.5, 0.2], 2.0);
        assert!(bound_lemma3(&small, 1, &eta(2.0)).is_err());
    }

    #[test]
    fn bound_lemma4_variants() {
        let z = profile_with_e(vec![0.0, 0.0], 1.2);
        for v in [Lemma4Variant::ProofConsistent, Lemma4Variant::AsPrinted] {
            assert_eq!(bound_lemma4(&z, &eta(2.0), v).unwrap(), 0.0);
        }

        // t = 1 collapse, N = 3
        let p = profile_with_e(vec![0.5, 0.3], 1.2);
        let proof = bound_lemma4(&p, &eta(2.0), Lemma4Variant::ProofConsistent).unwrap();
        assert!((proof - (0.25 + 0.09)).abs() < 1e-12);
        let printed = bound_lemma4(&p, &eta(2.0), Lemma4Variant::AsPrinted).unwrap();
        assert!((printed - (0.25 + 0.5 * 0.25 + 0.5 * 0.09)).abs() < 1e-12);

        // regime gates
        let p2 = profile_with_e(vec![0.5, 0.3], 2.0);
        assert!(bound_lemma4(&p2, &eta(2.0), Lemma4Variant::ProofConsistent).is_err());
        assert!(bound_lemma4(&p, &eta(1.5), Lemma4Variant::ProofConsistent).is_err());
    }

    #[test]
    fn bound_lemma4_w3_full_pipeline() {
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        let a = alpha(1.2);
        let p = profile(&chain, &a).unwrap().sorted_descending();
        let e3 = eta(3.0);
        let proof = bound_lemma4(&p, &e3, Lemma4Variant::ProofConsistent).unwrap();
        let printed = bound_lemma4(&p, &e3, Lemma4Variant::AsPrinted).unwrap();
        let lhs = p.e_global.powf(3.0);
        assert!(lhs >= proof - 1e-9, "lhs {lhs}, proof rhs {proof}");
        // symmetric W marginals: both variants coincide
        assert!((proof - printed).abs() < 1e-12);
    }

    #[test]
    fn bound_lemma5_arithmetic() {
        let z = profile_with_e(vec![0.0, 0.0, 0.0], 1.2);
        assert_eq!(bound_lemma5(&z, 1, &eta(2.0)).unwrap(), 0.0);

        // t = 1 collapse: e1^2 + 1*[0.5 e2^2 + 0.5 e2^2 e3^0 ... ] -> plain squares
        let p = profile_with_e(vec![0.5, 0.2, 0.4], 1.2);
        let rhs = bound_lemma5(&p, 1, &eta(2.0)).unwrap();
        assert!((rhs - (0.25 + 0.04 + 0.16)).abs() < 1e-12, "rhs {rhs}");

        // eta = 4 (t = 2): 0.5^4 + 3 * [2*0.2^4 + 1*0.04*0.16 + 0.4^4]
        let rhs = bound_lemma5(&p, 1, &eta(4.0)).unwrap();
        let expect = 0.0625 + 3.0 * (2.0 * 0.0016 + 0.04 * 0.16 + 0.0256);
        assert!((rhs - expect).abs() < 1e-12, "rhs {rhs}");
    }

    #[test]
    fn baseline_cases() {
        let z = profile_with_e(vec![0.0, 0.0], 2.0);
        assert_eq!(
            bound_baseline(&z, &eta(1.0), BaselineRegime::EtaPower).unwrap(),
            0.0
        );

        // eta = 1: all weights collapse to 1
        let p = profile_with_e(vec![0.5, 0.2, 0.4], 2.0);
        let b = bound_baseline(&p, &eta(1.0), BaselineRegime::EtaPower).unwrap();
        assert!((b - 1.1).abs() < 1e-12);

        // W state at eta = 2: baseline equals the Lemma 2 rhs (E1 = E2)
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        let prof = profile(&chain, &alpha(2.0)).unwrap().sorted_descending();
        let e2 = eta(2.0);
        let base = bound_baseline(&prof, &e2, BaselineRegime::EtaPower).unwrap();
        let pair = (9.0f64 / 7.0).log2();
        assert!((base - 4.0 * pair * pair).abs() < 1e-9);
        let l2 = bound_lemma2(&prof, &e2).unwrap();
        assert!((l2 - base).abs() < 1e-12);
    }

    #[test]
    fn verify_ghz3_l2() {
        let chain = ChainState::natural(states::ghz(3).unwrap()).unwrap();
        let rep = verify(&chain, &alpha(2.0), &eta(1.5), &LemmaSelector::L2).unwrap();
        assert!(rep.condition_met);
        assert!((rep.lhs - 1.0).abs() < 1e-9);
        assert!(rep.rhs_new.abs() < 1e-9);
        assert!((rep.margin - 1.0).abs() < 1e-9);
    }

    #[test]
    fn verify_w3_l2() {
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        let rep = verify(&chain, &alpha(2.0), &eta(1.0), &LemmaSelector::L2).unwrap();
        assert!(rep.condition_met);
        assert!((rep.margin - 0.1228567).abs() < 1e-7);
        assert!(rep.tightening.abs() < 1e-12); // eta = 1: no tightening claimed
    }

    #[test]
    fn verify_regime_errors() {
        let chain = ChainState::natural(states::w_state(3).unwrap()).unwrap();
        // L2 below alpha = 2
        assert!(verify(&chain, &alpha(1.5), &eta(1.0), &LemmaSelector::L2).is_err());
        // L4 at alpha = 2
        assert!(verify(
            &chain,
            &alpha(2.0),
            &eta(2.0),
            &LemmaSelector::L4 {
                variant: Lemma4Variant::ProofConsistent
            }
        )
        .is_err());
        // L3 needs N >= 4
        assert!(verify(&chain, &alpha(2.0), &eta(1.0), &LemmaSelector::L3 { m: 1 }).is_err());
    }

    #[test]
    fn lhs_invariant_under_b_permutation() {
        let psi = states::haar_random_pure(4, 77).unwrap();
        let c1 = ChainState::new(psi.clone(), 0, vec![1, 2, 3]).unwrap();
        let c2 = ChainState::new(psi, 0, vec![3, 1, 2]).unwrap();
        let a = alpha(2.0);
        let p1 = profile(&c1, &a).unwrap();
        let p2 = profile(&c2, &a).unwrap();
        assert!((p1.e_global - p2.e_global).abs() < 1e-12);
        assert!((p1.c_global - p2.c_global).abs() < 1e-12);
    }

    #[test]
    fn sweep_empty() {
        let config = SweepConfig {
            family: SweepFamily::Haar,
            num_qubits: 3,
            alphas: vec![2.0],
            etas: vec![1.0],
            lemmas: vec![Lemma::L2],
            samples: 0,
            seed: 1,
            tolerance: 1e-9,
        };
        let (rows, summary) = sweep(&config).unwrap();
        assert!(rows.is_empty());
        assert_eq!(summary.rows, 0);
        assert_eq!(summary.violations, 0);
        let csv = rows_to_csv(config.seed, config.num_qubits, &rows);
        assert_eq!(csv, format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn sweep_rejects_bad_regimes() {
        let mut config = SweepConfig {
            family: SweepFamily::Haar,
            num_qubits: 3,
            alphas: vec![1.5],
            etas: vec![1.0],
            lemmas: vec![Lemma::L2],
            samples: 1,
            seed: 1,
            tolerance: 1e-9,
        };
        assert!(sweep(&config).is_err());
        config.alphas = vec![2.0];
        config.lemmas = vec![Lemma::L3];
        assert!(sweep(&config).is_err()); // needs 4 qubits
        config.lemmas = vec![Lemma::L4];
        assert!(sweep(&config).is_err()); // alpha >= 2 invalid for L4
    }

    #[test]
    fn sweep_small_l2_campaign() {
        let config = SweepConfig {
            family: SweepFamily::Haar,
            num_qubits: 3,
            alphas: vec![2.0, 3.0],
            etas: vec![1.0, 2.0],
            lemmas: vec![Lemma::L2],
            samples: 50,
            seed: 7,
            tolerance: 1e-9,
        };
        let (rows, summary) = sweep(&config).unwrap();
        assert_eq!(rows.len(), 50 * 4);
        assert_eq!(summary.violations, 0);
        assert!(summary.min_tightening.unwrap() >= -1e-12);
    }

    #[test]
    fn sweep_deterministic_across_thread_counts() {
        let config = SweepConfig {
            family: SweepFamily::Haar,
            num_qubits: 3,
            alphas: vec![2.0],
            etas: vec![1.5],
            lemmas: vec![Lemma::L2],
            samples: 20,
            seed: 99,
            tolerance: 1e-9,
        };
        let csv_of = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let (rows, _) = sweep(&config).unwrap();
                rows_to_csv(config.seed, config.num_qubits, &rows)
            })
        };
        assert_eq!(csv_of(1), csv_of(4));
    }
}
