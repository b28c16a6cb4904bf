//! Command-line front end: demos, single verifications, sweep campaigns,
//! tightness comparisons, and convex-roof cross-checks.
//!
//! Exit codes: 0 success, 1 inequality violation found, 2 usage/regime error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use qmonogamy::linalg::{PureState, C64};
use qmonogamy::measures::{AlphaParam, EtaParam};
use qmonogamy::monogamy::{
    self, bound_baseline, bound_lemma2, bound_lemma4, bound_lemma5, fmt_float, profile,
    verify, BaselineRegime, ChainState, Lemma, Lemma4Variant, LemmaSelector, MonogamyReport,
    SweepConfig, SweepFamily,
};
use qmonogamy::{convexroof, states};
use qmonogamy::{Error, Result};

#[derive(Parser)]
#[command(
    name = "qmonogamy",
    about = "Numerical verification of tightened Renyi-alpha entanglement monogamy bounds",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Walk through the GHZ and W three-qubit bounds with commentary.
    Demo,
    /// Verify one bound on one state; prints a JSON report.
    Verify(VerifyArgs),
    /// Run a Monte Carlo verification campaign and write a CSV/JSON artifact.
    Sweep(SweepArgs),
    /// Tabulate tightening (new bound minus baseline) over an eta grid.
    Compare(CompareArgs),
    /// Cross-check the convex-roof optimizer against the two-qubit formula.
    RoofCheck(RoofCheckArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// State: ghzN, wN, gw:a,b,c (real W amplitudes), or haar:N.
    #[arg(long)]
    state: String,
    #[arg(long)]
    alpha: f64,
    #[arg(long)]
    eta: f64,
    /// One of L2, L3, L4, L5.
    #[arg(long)]
    lemma: String,
    /// Lemma 4 bracket variant: proof (default) or printed.
    #[arg(long)]
    variant: Option<String>,
    /// Split index for L3/L5 (default 1).
    #[arg(long)]
    m: Option<usize>,
    /// Seed for haar:N states.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
}

#[derive(Args)]
struct SweepArgs {
    /// Config file (flat key=value or JSON); flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// State family: haar, ghz, or w.
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    qubits: Option<usize>,
    /// Alpha grid (repeatable).
    #[arg(long = "alpha")]
    alphas: Vec<f64>,
    /// Eta grid (repeatable).
    #[arg(long = "eta")]
    etas: Vec<f64>,
    /// Lemmas to sweep (repeatable; L2, L3, L4, L5).
    #[arg(long = "lemma")]
    lemmas: Vec<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output artifact path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Artifact format: csv (default) or json.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    /// States to compare (repeatable); defaults to w3 and an asymmetric
    /// generalized W state.
    #[arg(long = "state")]
    states: Vec<String>,
    /// Lemmas to compare (repeatable); defaults to L2 L4 L5.
    #[arg(long = "lemma")]
    lemmas: Vec<String>,
    /// Alpha for the eta >= 2 hierarchy (L2/L3).
    #[arg(long, default_value_t = 2.0)]
    alpha_high: f64,
    /// Alpha for the fractional hierarchy (L4/L5).
    #[arg(long, default_value_t = 1.2)]
    alpha_low: f64,
    /// Eta grid (repeatable); defaults to 1, 1.5, 2, 2.5, 3, 4.
    #[arg(long = "eta")]
    etas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RoofCheckArgs {
    #[arg(long, default_value_t = 20)]
    samples: u64,
    /// Rank of the sampled two-qubit mixed states (1..=4).
    #[arg(long, default_value_t = 2)]
    rank: usize,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Demo => cmd_demo(),
        Command::Verify(args) => cmd_verify(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::RoofCheck(args) => cmd_roof_check(&args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

/// QMONOGAMY_WORKERS pins the rayon pool size; numerics are unaffected.
fn init_workers() -> Result<()> {
    if let Ok(val) = std::env::var("QMONOGAMY_WORKERS") {
        let n: usize = val
            .parse()
            .map_err(|_| Error::Config(format!("QMONOGAMY_WORKERS must be a positive integer, got {val:?}")))?;
        if n == 0 {
            return Err(Error::Config(
                "QMONOGAMY_WORKERS must be a positive integer".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("failed to size worker pool: {e}")))?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// State parsing
// ---------------------------------------------------------------------------

fn parse_state(spec: &str, seed: u64) -> Result<PureState> {
    let lower = spec.to_ascii_lowercase();
    if lower == "bell" {
        return Ok(states::bell());
    }
    if let Some(rest) = lower.strip_prefix("ghz") {
        let n: usize = rest
            .parse()
            .map_err(|_| Error::Config(format!("bad state spec {spec:?}: expected ghzN")))?;
        return states::ghz(n);
    }
    if let Some(rest) = lower.strip_prefix("gw:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 3 {
            return Err(Error::Config(format!(
                "bad state spec {spec:?}: expected gw:a,b,c"
            )));
        }
        let mut amps = [0.0f64; 3];
        for (slot, part) in amps.iter_mut().zip(&parts) {
            *slot = part.trim().parse().map_err(|_| {
                Error::Config(format!("bad amplitude {part:?} in state spec {spec:?}"))
            })?;
        }
        return states::generalized_w(
            C64::new(amps[0], 0.0),
            C64::new(amps[1], 0.0),
            C64::new(amps[2], 0.0),
        );
    }
    if let Some(rest) = lower.strip_prefix("w") {
        if let Ok(n) = rest.parse::<usize>() {
            return states::w_state(n);
        }
    }
    if let Some(rest) = lower.strip_prefix("haar:") {
        let n: usize = rest
            .parse()
            .map_err(|_| Error::Config(format!("bad state spec {spec:?}: expected haar:N")))?;
        return states::haar_random_pure(n, seed);
    }
    Err(Error::Config(format!(
        "unknown state spec {spec:?} (expected ghzN, wN, bell, gw:a,b,c, or haar:N)"
    )))
}

fn parse_selector(lemma: &str, variant: Option<&str>, m: Option<usize>) -> Result<LemmaSelector> {
    let lemma = Lemma::from_str(lemma)?;
    let variant = match variant {
        None => Lemma4Variant::ProofConsistent,
        Some(v) => match v.to_ascii_lowercase().as_str() {
            "proof" => Lemma4Variant::ProofConsistent,
            "printed" => Lemma4Variant::AsPrinted,
            other => {
                return Err(Error::Config(format!(
                    "unknown variant {other:?} (expected proof or printed)"
                )))
            }
        },
    };
    Ok(match lemma {
        Lemma::L2 => LemmaSelector::L2,
        Lemma::L3 => LemmaSelector::L3 { m: m.unwrap_or(1) },
        Lemma::L4 => LemmaSelector::L4 { variant },
        Lemma::L5 => LemmaSelector::L5 { m: m.unwrap_or(1) },
    })
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

/// Writes through a temporary sibling path and renames into place; the
/// temporary file is removed if anything fails.
fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Config(format!("bad output path {}", path.display())))?;
    let mut tmp_name = file_name.to_os_string();
    tmp_name.push(format!(".tmp.{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let io = |e: std::io::Error| Error::Config(format!("writing {}: {e}", path.display()));
    std::fs::write(&tmp, contents).map_err(io)?;
    if let Err(e) = std::fs::rename(&tmp, path) {
        let _ = std::fs::remove_file(&tmp);
        return Err(io(e));
    }
    Ok(())
}

fn emit(out: Option<&Path>, contents: &str) -> Result<()> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn report_json(rep: &MonogamyReport) -> String {
    let variant = match rep.variant {
        None => "null".to_string(),
        Some(Lemma4Variant::ProofConsistent) => "\"proof\"".to_string(),
        Some(Lemma4Variant::AsPrinted) => "\"printed\"".to_string(),
    };
    let m = rep
        .m
        .map(|m| m.to_string())
        .unwrap_or_else(|| "null".into());
    format!(
        "{{\n  \"lemma\": \"{}\",\n  \"variant\": {},\n  \"alpha\": {},\n  \"eta\": {},\n  \"m\": {},\n  \"condition_met\": {},\n  \"lhs\": {},\n  \"rhs_new\": {},\n  \"rhs_baseline\": {},\n  \"margin\": {},\n  \"tightening\": {}\n}}\n",
        rep.lemma.as_str(),
        variant,
        fmt_float(rep.alpha),
        fmt_float(rep.eta),
        m,
        rep.condition_met,
        fmt_float(rep.lhs),
        fmt_float(rep.rhs_new),
        fmt_float(rep.rhs_baseline),
        fmt_float(rep.margin),
        fmt_float(rep.tightening),
    )
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_demo() -> Result<u8> {
    let a = AlphaParam::new(2.0)?;
    let e = EtaParam::new(1.0)?;
    for (name, psi) in [("GHZ", states::ghz(3)?), ("W", states::w_state(3)?)] {
        let chain = ChainState::natural(psi)?;
        let prof = profile(&chain, &a)?;
        println!("{name} state, 3 qubits, alpha = 2:");
        println!("  concurrence A|BC     = {:.7}", prof.c_global);
        println!(
            "  pair concurrences    = [{:.7}, {:.7}]",
            prof.c_pair[0], prof.c_pair[1]
        );
        println!("  E_alpha(A|BC)        = {:.7}", prof.e_global);
        println!(
            "  E_alpha pairs        = [{:.7}, {:.7}]",
            prof.e_pair[0], prof.e_pair[1]
        );
        let rep = verify(&chain, &a, &e, &LemmaSelector::L2)?;
        println!("  bound (eta = 1):");
        println!("    lhs    = {:.7}", rep.lhs);
        println!("    rhs    = {:.7}", rep.rhs_new);
        println!("    margin = {:.7}", rep.margin);
        println!();
    }
    println!("Both margins are nonnegative: the pairwise entanglement budget");
    println!("never exceeds what the global bipartition provides.");
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs) -> Result<u8> {
    let psi = parse_state(&args.state, args.seed)?;
    let chain = ChainState::natural(psi)?;
    let a = AlphaParam::new(args.alpha)?;
    let e = EtaParam::new(args.eta)?;
    let sel = parse_selector(&args.lemma, args.variant.as_deref(), args.m)?;
    if args.tolerance < 0.0 {
        return Err(Error::Config("tolerance must be nonnegative".into()));
    }
    let rep = verify(&chain, &a, &e, &sel)?;
    print!("{}", report_json(&rep));
    if rep.condition_met && rep.margin < -args.tolerance {
        eprintln!("violation: margin {} below -{}", rep.margin, args.tolerance);
        return Ok(1);
    }
    Ok(0)
}

#[derive(Default)]
struct SweepFileConfig {
    family: Option<String>,
    qubits: Option<usize>,
    alphas: Option<Vec<f64>>,
    etas: Option<Vec<f64>>,
    lemmas: Option<Vec<String>>,
    samples: Option<u64>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

fn parse_f64_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    raw.split(|c| c == ',' || c == ' ')
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::Config(format!("bad value {s:?} for key {key:?}")))
        })
        .collect()
}

fn parse_str_list(raw: &str) -> Vec<String> {
    raw.split(|c| c == ',' || c == ' ')
        .filter(|s| !s.is_empty())
        .map(|s| s.to_string())
        .collect()
}

fn json_f64_list(key: &str, v: &serde_json::Value) -> Result<Vec<f64>> {
    v.as_array()
        .ok_or_else(|| Error::Config(format!("config key {key:?} must be an array")))?
        .iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| Error::Config(format!("config key {key:?} must hold numbers")))
        })
        .collect()
}

fn load_sweep_file(path: &Path) -> Result<SweepFileConfig> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("reading {}: {e}", path.display())))?;
    let mut cfg = SweepFileConfig::default();
    let trimmed = raw.trim_start();
    if trimmed.starts_with('{') {
        let json: serde_json::Value = serde_json::from_str(&raw)
            .map_err(|e| Error::Config(format!("parsing {}: {e}", path.display())))?;
        let obj = json
            .as_object()
            .ok_or_else(|| Error::Config("config JSON must be an object".into()))?;
        for (key, value) in obj {
            match key.as_str() {
                "family" => cfg.family = value.as_str().map(String::from),
                "qubits" => cfg.qubits = value.as_u64().map(|v| v as usize),
                "alphas" => cfg.alphas = Some(json_f64_list(key, value)?),
                "etas" => cfg.etas = Some(json_f64_list(key, value)?),
                "lemmas" => {
                    let arr = value.as_array().ok_or_else(|| {
                        Error::Config("config key \"lemmas\" must be an array".into())
                    })?;
                    let mut lemmas = Vec::new();
                    for v in arr {
                        lemmas.push(
                            v.as_str()
                                .ok_or_else(|| {
                                    Error::Config("config key \"lemmas\" must hold strings".into())
                                })?
                                .to_string(),
                        );
                    }
                    cfg.lemmas = Some(lemmas);
                }
                "samples" => cfg.samples = value.as_u64(),
                "seed" => cfg.seed = value.as_u64(),
                "tolerance" => cfg.tolerance = value.as_f64(),
                "out" => cfg.out = value.as_str().map(PathBuf::from),
                "format" => cfg.format = value.as_str().map(String::from),
                other => {
                    return Err(Error::Config(format!("unknown config key {other:?}")));
                }
            }
        }
    } else {
        for (lineno, line) in raw.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "{}:{}: expected key=value",
                    path.display(),
                    lineno + 1
                ))
            })?;
            let key = key.trim();
            let value = value.trim();
            let bad = |k: &str| Error::Config(format!("bad value {value:?} for key {k:?}"));
            match key {
                "family" => cfg.family = Some(value.to_string()),
                "qubits" => cfg.qubits = Some(value.parse().map_err(|_| bad(key))?),
                "alphas" => cfg.alphas = Some(parse_f64_list(key, value)?),
                "etas" => cfg.etas = Some(parse_f64_list(key, value)?),
                "lemmas" => cfg.lemmas = Some(parse_str_list(value)),
                "samples" => cfg.samples = Some(value.parse().map_err(|_| bad(key))?),
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad(key))?),
                "tolerance" => cfg.tolerance = Some(value.parse().map_err(|_| bad(key))?),
                "out" => cfg.out = Some(PathBuf::from(value)),
                "format" => cfg.format = Some(value.to_string()),
                other => {
                    return Err(Error::Config(format!("unknown config key {other:?}")));
                }
            }
        }
    }
    Ok(cfg)
}

fn cmd_sweep(args: &SweepArgs) -> Result<u8> {
    let file = match &args.config {
        Some(path) => load_sweep_file(path)?,
        None => SweepFileConfig::default(),
    };
    let family_str = args
        .family
        .clone()
        .or(file.family)
        .unwrap_or_else(|| "haar".to_string());
    let family = SweepFamily::from_str(&family_str)?;
    let num_qubits = args.qubits.or(file.qubits).unwrap_or(3);
    let alphas = if args.alphas.is_empty() {
        file.alphas.unwrap_or_default()
    } else {
        args.alphas.clone()
    };
    let etas = if args.etas.is_empty() {
        file.etas.unwrap_or_default()
    } else {
        args.etas.clone()
    };
    let lemma_names = if args.lemmas.is_empty() {
        file.lemmas.unwrap_or_default()
    } else {
        args.lemmas.clone()
    };
    let lemmas: Vec<Lemma> = lemma_names
        .iter()
        .map(|s| Lemma::from_str(s))
        .collect::<Result<_>>()?;
    let config = SweepConfig {
        family,
        num_qubits,
        alphas,
        etas,
        lemmas,
        samples: args.samples.or(file.samples).unwrap_or(100),
        seed: args.seed.or(file.seed).unwrap_or(0),
        tolerance: args.tolerance.or(file.tolerance).unwrap_or(1e-9),
    };
    let out = args.out.clone().or(file.out);
    let format = args
        .format
        .clone()
        .or(file.format)
        .unwrap_or_else(|| "csv".to_string());
    let artifact_fn = match format.as_str() {
        "csv" => monogamy::rows_to_csv,
        "json" => monogamy::rows_to_json,
        other => {
            return Err(Error::Config(format!(
                "unknown format {other:?} (expected csv or json)"
            )))
        }
    };

    let (rows, summary) = monogamy::sweep(&config)?;
    let artifact = artifact_fn(config.seed, config.num_qubits, &rows);
    emit(out.as_deref(), &artifact)?;
    eprintln!(
        "sweep: samples={} rows={} condition_met={} min_margin={} min_tightening={} violations={}",
        summary.samples,
        summary.rows,
        summary.condition_met,
        summary
            .min_margin
            .map(fmt_float)
            .unwrap_or_else(|| "n/a".into()),
        summary
            .min_tightening
            .map(fmt_float)
            .unwrap_or_else(|| "n/a".into()),
        summary.violations,
    );
    Ok(if summary.violations > 0 { 1 } else { 0 })
}

fn cmd_compare(args: &CompareArgs) -> Result<u8> {
    let state_specs = if args.states.is_empty() {
        vec![
            "w3".to_string(),
            format!("gw:{},{},{}", 0.5f64.sqrt(), 0.3f64.sqrt(), 0.2f64.sqrt()),
        ]
    } else {
        args.states.clone()
    };
    let lemma_names = if args.lemmas.is_empty() {
        vec!["L2".to_string(), "L4".to_string(), "L5".to_string()]
    } else {
        args.lemmas.clone()
    };
    let lemmas: Vec<Lemma> = lemma_names
        .iter()
        .map(|s| Lemma::from_str(s))
        .collect::<Result<_>>()?;
    let etas = if args.etas.is_empty() {
        vec![1.0, 1.5, 2.0, 2.5, 3.0, 4.0]
    } else {
        args.etas.clone()
    };
    let a_high = AlphaParam::new(args.alpha_high)?;
    let a_low = AlphaParam::new(args.alpha_low)?;
    if args.alpha_high < 2.0 {
        return Err(Error::Config(format!(
            "--alpha-high must be >= 2, got {}",
            args.alpha_high
        )));
    }
    if !(qmonogamy::measures::ALPHA_ANALYTIC_MIN..2.0).contains(&args.alpha_low) {
        return Err(Error::Config(format!(
            "--alpha-low must lie in [(sqrt(7)-1)/2, 2), got {}",
            args.alpha_low
        )));
    }

    let mut csv = String::from("state,lemma,alpha,eta,tightening,strict_claimed\n");
    let mut failures = 0usize;
    for spec in &state_specs {
        let psi = parse_state(spec, args.seed)?;
        let chain = ChainState::natural(psi)?;
        for &lemma in &lemmas {
            let (a, min_eta) = match lemma {
                Lemma::L2 | Lemma::L3 => (&a_high, 1.0),
                Lemma::L4 | Lemma::L5 => (&a_low, 2.0),
            };
            let prof = profile(&chain, a)?;
            let n = prof.num_parties();
            for &eta in &etas {
                if eta < min_eta {
                    continue;
                }
                let e = EtaParam::new(eta)?;
                let sorted = prof.sorted_descending();
                let (new, base, strict_from) = match lemma {
                    Lemma::L2 => (
                        bound_lemma2(&sorted, &e)?,
                        bound_baseline(&sorted, &e, BaselineRegime::EtaPower)?,
                        1.0,
                    ),
                    Lemma::L3 => {
                        if n < 4 {
                            continue;
                        }
                        (
                            monogamy::bound_lemma3(&prof, 1, &e)?,
                            bound_baseline(&prof, &e, BaselineRegime::EtaPower)?,
                            1.0,
                        )
                    }
                    Lemma::L4 => (
                        bound_lemma4(&sorted, &e, Lemma4Variant::ProofConsistent)?,
                        bound_baseline(&sorted, &e, BaselineRegime::TPower)?,
                        2.0,
                    ),
                    Lemma::L5 => {
                        if n < 4 {
                            continue;
                        }
                        (
                            bound_lemma5(&prof, 1, &e)?,
                            bound_baseline(&prof, &e, BaselineRegime::TPower)?,
                            2.0,
                        )
                    }
                };
                let tightening = new - base;
                // The improvement over the baseline is strict only when the
                // cross term is active: exponent above the collapse point and
                // distinct nonzero marginals in the bracketed tail pair.
                let tail = match lemma {
                    Lemma::L2 | Lemma::L4 => prof.sorted_descending().e_pair,
                    Lemma::L3 | Lemma::L5 => prof.e_pair.clone(),
                };
                let e_last = tail[tail.len() - 1];
                let e_prev = tail[tail.len() - 2];
                let strict_claimed =
                    eta > strict_from && e_last > 1e-12 && e_prev - e_last > 1e-12;
                if tightening < -1e-12 {
                    eprintln!(
                        "tightening regression: state={spec} lemma={} eta={eta} value={tightening}",
                        lemma.as_str()
                    );
                    failures += 1;
                }
                if strict_claimed && tightening <= 0.0 {
                    eprintln!(
                        "strictness failure: state={spec} lemma={} eta={eta} tightening={tightening}",
                        lemma.as_str()
                    );
                    failures += 1;
                }
                csv.push_str(&format!(
                    "{spec},{},{},{},{},{strict_claimed}\n",
                    lemma.as_str(),
                    fmt_float(a.alpha()),
                    fmt_float(eta),
                    fmt_float(tightening),
                ));
            }
        }
    }
    emit(args.out.as_deref(), &csv)?;
    Ok(if failures > 0 { 1 } else { 0 })
}

fn cmd_roof_check(args: &RoofCheckArgs) -> Result<u8> {
    if !(1..=4).contains(&args.rank) {
        return Err(Error::Config(format!(
            "--rank must lie in 1..=4, got {}",
            args.rank
        )));
    }
    let a = AlphaParam::new(args.alpha)?;
    a.require_analytic()?;
    let mut csv = String::from("seed,sample,rank,alpha,gap\n");
    let mut worst = 0.0f64;
    for k in 0..args.samples {
        let rho = states::random_density_from(2, args.rank, &mut states::substream(args.seed, k))?;
        let gap = convexroof::roof_gap(&rho, &a, args.seed.wrapping_add(k))?;
        worst = worst.min(gap);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            args.seed,
            k,
            args.rank,
            fmt_float(args.alpha),
            fmt_float(gap)
        ));
    }
    emit(args.out.as_deref(), &csv)?;
    eprintln!("roof-check: samples={} worst_gap={}", args.samples, fmt_float(worst));
    Ok(if worst < -1e-6 { 1 } else { 0 })
}
