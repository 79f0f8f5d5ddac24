//! Experiment harness: flat key=value configs, seeded Monte Carlo trial
//! fan-out, row/aggregate reports, and the statistical helpers the
//! acceptance checks share.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rand::SeedableRng;

use crate::css::{steane_code, CssCode};
use crate::netsim::{fnv64, AdversaryStrategy, NetworkConfig};
use crate::protocol::{run_full, theoretical_bounds, Transcript};
use crate::tableau::AmplitudePair;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("unknown config key: {0}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value}")]
    BadValue { key: String, value: String },
    #[error("config line without '=': {0}")]
    BadLine(String),
    #[error("trial {trial} failed: {message}")]
    TrialFailed { trial: usize, message: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutputFormat {
    Jsonl,
    Csv,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// "steane7" or a fixture path.
    pub code: String,
    pub n_c: usize,
    pub r: usize,
    pub secret: String,
    pub strategy: String,
    pub cheaters: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub out: Option<String>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    fn default() -> ExperimentConfig {
        ExperimentConfig {
            code: "steane7".to_string(),
            n_c: 7,
            r: 4,
            secret: "plus".to_string(),
            strategy: "honest".to_string(),
            cheaters: Vec::new(),
            trials: 100,
            seed: 1,
            out: None,
            format: OutputFormat::Jsonl,
        }
    }
}

impl ExperimentConfig {
    /// Flat key=value lines; '#' starts a comment.
    pub fn parse(text: &str) -> Result<ExperimentConfig, ExperimentError> {
        let mut cfg = ExperimentConfig::default();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ExperimentError::BadLine(line.to_string()))?;
            cfg.set(key.trim(), value.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ExperimentError> {
        let bad = || ExperimentError::BadValue {
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "code" => self.code = value.to_string(),
            "n_c" => self.n_c = value.parse().map_err(|_| bad())?,
            "r" => self.r = value.parse().map_err(|_| bad())?,
            "secret" => self.secret = value.to_string(),
            "strategy" => self.strategy = value.to_string(),
            "cheaters" => {
                self.cheaters = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.trim().parse().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?;
            }
            "trials" => self.trials = value.parse().map_err(|_| bad())?,
            "seed" => self.seed = value.parse().map_err(|_| bad())?,
            "out" => self.out = Some(value.to_string()),
            "format" => {
                self.format = match value {
                    "jsonl" => OutputFormat::Jsonl,
                    "csv" => OutputFormat::Csv,
                    _ => return Err(bad()),
                }
            }
            _ => return Err(ExperimentError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn resolve_code(&self) -> Result<CssCode, ExperimentError> {
        if self.code == "steane7" {
            return Ok(steane_code());
        }
        let text = std::fs::read_to_string(&self.code)?;
        crate::css::css_from_fixture(&text).map_err(|e| ExperimentError::BadValue {
            key: "code".to_string(),
            value: format!("{}: {e}", self.code),
        })
    }

    pub fn resolve_secret(&self) -> Result<AmplitudePair, ExperimentError> {
        match self.secret.as_str() {
            "zero" => Ok(AmplitudePair::zero()),
            "plus" => Ok(AmplitudePair::plus()),
            "generic" => Ok(AmplitudePair::new(
                Complex64::new(0.3f64.sqrt(), 0.0),
                Complex64::new(0.0, 0.7f64.sqrt()),
            )),
            other => {
                let parts: Vec<&str> = other.split(',').collect();
                if parts.len() != 2 {
                    return Err(ExperimentError::BadValue {
                        key: "secret".to_string(),
                        value: other.to_string(),
                    });
                }
                let a: f64 = parts[0].trim().parse().map_err(|_| ExperimentError::BadValue {
                    key: "secret".to_string(),
                    value: other.to_string(),
                })?;
                let b: f64 = parts[1].trim().parse().map_err(|_| ExperimentError::BadValue {
                    key: "secret".to_string(),
                    value: other.to_string(),
                })?;
                let norm = (a * a + b * b).sqrt();
                Ok(AmplitudePair::new(
                    Complex64::new(a / norm, 0.0),
                    Complex64::new(b / norm, 0.0),
                ))
            }
        }
    }

    pub fn resolve_strategy(&self) -> Result<AdversaryStrategy, ExperimentError> {
        let bad = || ExperimentError::BadValue {
            key: "strategy".to_string(),
            value: self.strategy.clone(),
        };
        let parts: Vec<&str> = self.strategy.split(':').collect();
        Ok(match parts[0] {
            "honest" => AdversaryStrategy::Honest,
            "dealer_inconsistent_tree" => AdversaryStrategy::DealerInconsistentTree,
            "dealer_overweight_errors" => AdversaryStrategy::DealerOverweightErrors,
            "dealer_wrong_ancilla" => AdversaryStrategy::DealerWrongAncilla,
            "cheater_pauli" => {
                let pattern = parts.get(1).copied().unwrap_or("x");
                let post = parts.get(2).copied() == Some("post");
                AdversaryStrategy::CheaterPauli {
                    x: pattern.contains('x') || pattern.contains('y'),
                    z: pattern.contains('z') || pattern.contains('y'),
                    post_verification: post,
                }
            }
            "cheater_broadcast_lie" => AdversaryStrategy::CheaterBroadcastLie,
            "cheater_clifford" => AdversaryStrategy::CheaterClifford,
            _ => return Err(bad()),
        })
    }
}

/// One serialized trial.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial: usize,
    pub seed: u64,
    pub code: String,
    pub n: usize,
    pub n_q: usize,
    pub n_c: usize,
    pub t: usize,
    pub r: usize,
    pub strategy: String,
    pub aborted: bool,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    pub fidelity: Option<f64>,
    pub peak_workspace: usize,
    pub eps_c_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub abort_rate: f64,
    /// Binomial standard error of the abort rate.
    pub abort_sigma: f64,
    pub mean_fidelity: Option<f64>,
    pub max_peak_workspace: usize,
    pub eps_c_bound: f64,
    pub fidelity_lower_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<TrialRow>,
    pub aggregate: Aggregate,
}

/// Per-trial seed, derived so that trial streams never collide and the whole
/// report is a function of (config, master seed).
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    let mut bytes = master.to_le_bytes().to_vec();
    bytes.extend_from_slice(&(trial as u64).to_le_bytes());
    fnv64(&bytes)
}

pub fn run_trial(
    cfg: &ExperimentConfig,
    css: &CssCode,
    trial: usize,
) -> Result<TrialRow, ExperimentError> {
    let seed = trial_seed(cfg.seed, trial);
    let secret = cfg.resolve_secret()?;
    let strategy = cfg.resolve_strategy()?;
    let mut net_cfg = NetworkConfig::honest(css.n(), cfg.n_c, seed);
    net_cfg.cheaters = cfg.cheaters.iter().copied().collect::<BTreeSet<_>>();
    let rng = ChaCha8Rng::seed_from_u64(seed);
    let transcript: Transcript = run_full(net_cfg, css, secret, strategy, cfg.r, rng)
        .map_err(|e| ExperimentError::TrialFailed {
            trial,
            message: e.to_string(),
        })?;
    Ok(TrialRow {
        trial,
        seed,
        code: cfg.code.clone(),
        n: css.n().max(cfg.n_c),
        n_q: css.n(),
        n_c: cfg.n_c,
        t: css.t(),
        r: cfg.r,
        strategy: cfg.strategy.clone(),
        aborted: transcript.aborted,
        b: transcript.accused,
        fidelity: transcript.fidelity,
        peak_workspace: transcript.peak_workspace.max(),
        eps_c_bound: transcript.theoretical_eps_c,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, ExperimentError> {
    let css = cfg.resolve_code()?;
    let rows: Vec<TrialRow> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &css, trial))
        .collect::<Result<_, _>>()?;
    let aggregate = aggregate_rows(&rows, cfg.r);
    Ok(Report { rows, aggregate })
}

pub fn aggregate_rows(rows: &[TrialRow], r: usize) -> Aggregate {
    let n = rows.len();
    let aborts = rows.iter().filter(|row| row.aborted).count();
    let p = if n == 0 { 0.0 } else { aborts as f64 / n as f64 };
    let sigma = if n == 0 {
        0.0
    } else {
        (p * (1.0 - p) / n as f64).sqrt()
    };
    let fidelities: Vec<f64> = rows.iter().filter_map(|row| row.fidelity).collect();
    let mean_fidelity = if fidelities.is_empty() {
        None
    } else {
        Some(fidelities.iter().sum::<f64>() / fidelities.len() as f64)
    };
    let (_, eps_c, fidelity_bound) = theoretical_bounds(r, 0.1, 0.1, 0.1);
    Aggregate {
        trials: n,
        abort_rate: p,
        abort_sigma: sigma,
        mean_fidelity,
        max_peak_workspace: rows.iter().map(|row| row.peak_workspace).max().unwrap_or(0),
        eps_c_bound: eps_c,
        fidelity_lower_bound: fidelity_bound,
    }
}

pub fn emit_jsonl(report: &Report) -> String {
    let mut out = String::new();
    for row in &report.rows {
        out.push_str(&serde_json::to_string(row).expect("row serializes"));
        out.push('\n');
    }
    out
}

pub fn emit_csv(report: &Report) -> String {
    let mut out = String::from(
        "trial,seed,code,n,n_q,n_c,t,r,strategy,aborted,B,fidelity,peak_workspace,eps_c_bound\n",
    );
    for row in &report.rows {
        let b = row
            .b
            .iter()
            .map(|i| i.to_string())
            .collect::<Vec<_>>()
            .join(";");
        let fid = row.fidelity.map_or(String::new(), |f| f.to_string());
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            row.trial,
            row.seed,
            row.code,
            row.n,
            row.n_q,
            row.n_c,
            row.t,
            row.r,
            row.strategy,
            row.aborted,
            b,
            fid,
            row.peak_workspace,
            row.eps_c_bound
        );
    }
    out
}

/// Empirical total variation distance between two digest samples after
/// hashing into `buckets` bins. For identical distributions this
/// concentrates near 0.56·sqrt(buckets / samples).
pub fn tv_distance(a: &[u64], b: &[u64], buckets: usize) -> f64 {
    let hist = |xs: &[u64]| {
        let mut h = vec![0f64; buckets];
        for &x in xs {
            h[(x % buckets as u64) as usize] += 1.0 / xs.len() as f64;
        }
        h
    };
    let (ha, hb) = (hist(a), hist(b));
    let tv = 0.5
        * ha.iter()
            .zip(&hb)
            .map(|(pa, pb)| (pa - pb).abs())
            .sum::<f64>();
    tv.clamp(0.0, 1.0)
}

/// Render the published scheme-parameter table: one row per code family,
/// full-threshold triples {p, t, n} and ramp quadruples {p, t, t', n}.
pub fn table1_text() -> String {
    use crate::css::table1_families;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:<13} {:<13} {:<14} {:<14}",
        "nodes", "vhss t=2", "vhss t=4", "ramp t=1", "ramp t=2"
    );
    for fam in 0..4 {
        let (name, _) = table1_families(1)[fam];
        let cell = |t: usize| {
            let n = table1_families(t)[fam].1;
            format!("{{{},{},{}}}", (n - 1) / 2, t, n)
        };
        let ramp_cell = |t: usize| {
            let n = table1_families(2 * t)[fam].1;
            format!("{{{},{},{},{}}}", (n - 1) / 2, t, t, n)
        };
        let _ = writeln!(
            out,
            "{:<12} {:<13} {:<13} {:<14} {:<14}",
            name,
            cell(2),
            cell(4),
            ramp_cell(1),
            ramp_cell(2)
        );
    }
    out
}

/// Check the stabilizer engine against the dense state-vector oracle on
/// random small Clifford+measure circuits. Every measurement's probability
/// weight must agree exactly (stabilizer outcomes are 0, 1/2, or 1) and the
/// final stabilizer group must stabilize the oracle state.
pub fn random_clifford_vs_statevector(
    circuits: usize,
    max_qubits: usize,
    seed: u64,
) -> Result<(), String> {
    use crate::statevec::StateVector;
    use crate::tableau::{Determinism, LogicalTableau};
    use rand::Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for c in 0..circuits {
        let n = rng.gen_range(2..=max_qubits);
        let mut tab = LogicalTableau::zero_state(n);
        let mut sv = StateVector::zero_state(n);
        let ops = rng.gen_range(8..40);
        for _ in 0..ops {
            match rng.gen_range(0..4u8) {
                0 => {
                    let q = rng.gen_range(0..n);
                    tab.apply_h(q);
                    sv.apply_h(q);
                }
                1 => {
                    let q = rng.gen_range(0..n);
                    tab.apply_s(q);
                    sv.apply_s(q);
                }
                2 => {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    if a != b {
                        tab.apply_cnot(a, b);
                        sv.apply_cnot(a, b);
                    }
                }
                _ => {
                    let q = rng.gen_range(0..n);
                    let p0 = sv.prob_z_zero(q);
                    let rec = tab.measure_z(q, &mut rng);
                    match rec.determinism {
                        Determinism::Deterministic => {
                            let expect = if rec.outcome { 0.0 } else { 1.0 };
                            if (p0 - expect).abs() > 1e-9 {
                                return Err(format!(
                                    "circuit {c}: deterministic outcome mismatch, p0 = {p0}"
                                ));
                            }
                        }
                        Determinism::Random => {
                            if (p0 - 0.5).abs() > 1e-9 {
                                return Err(format!(
                                    "circuit {c}: random outcome but p0 = {p0}"
                                ));
                            }
                        }
                        Determinism::LogicalCollapse => {
                            return Err(format!("circuit {c}: unexpected logical collapse"));
                        }
                    }
                    sv.measure_z_forced(q, rec.outcome);
                }
            }
        }
        for stab in tab.stabilizers() {
            let e = sv.expectation(stab);
            if (e - 1.0).abs() > 1e-9 {
                return Err(format!("circuit {c}: stabilizer expectation {e}"));
            }
        }
    }
    Ok(())
}

/// Measuring a pair (control, target) after a CNOT is the same as measuring
/// both first and adding the control bit into the target classically. Checks
/// the full joint outcome distribution on random small stabilizer states.
pub fn cnot_measure_commutation_exhaustive(
    instances: usize,
    max_qubits: usize,
    seed: u64,
) -> Result<(), String> {
    use crate::statevec::StateVector;
    use rand::Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for inst in 0..instances {
        let n = rng.gen_range(2..=max_qubits);
        let mut sv = StateVector::zero_state(n);
        for _ in 0..rng.gen_range(4..25) {
            match rng.gen_range(0..3u8) {
                0 => sv.apply_h(rng.gen_range(0..n)),
                1 => sv.apply_s(rng.gen_range(0..n)),
                _ => {
                    let a = rng.gen_range(0..n);
                    let b = rng.gen_range(0..n);
                    if a != b {
                        sv.apply_cnot(a, b);
                    }
                }
            }
        }
        let c = rng.gen_range(0..n);
        let mut t = rng.gen_range(0..n);
        while t == c {
            t = rng.gen_range(0..n);
        }
        // Joint (m_c, m_t) distribution with the gate applied first.
        let mut after = sv.clone();
        after.apply_cnot(c, t);
        let gate_first = after.joint_z_distribution(c, t);
        // Measure first, then add the control bit classically.
        let plain = sv.joint_z_distribution(c, t);
        let mut classical = [0.0f64; 4];
        for (bits, p) in plain.iter().enumerate() {
            let (a, b) = (bits >> 1 & 1, bits & 1);
            classical[(a << 1) | (b ^ a)] += p;
        }
        for k in 0..4 {
            if (gate_first[k] - classical[k]).abs() > 1e-12 {
                return Err(format!(
                    "instance {inst}: joint distribution mismatch at {k}: {} vs {}",
                    gate_first[k], classical[k]
                ));
            }
        }
    }
    Ok(())
}

/// Protocol-scale version of the same reduction: sample broadcast words for
/// an encoded block compared against a plus-block, once with a transversal
/// CNOT and once by XOR-ing separately measured words. Returns the two
/// digest samples for a TV estimate.
pub fn cnot_commutation_samples(samples: usize, seed: u64) -> (Vec<u64>, Vec<u64>) {
    use crate::tableau::LogicalTableau;
    let css = steane_code();
    let n = css.n();
    let word_digest = |bits: &[bool]| {
        let bytes: Vec<u8> = bits.iter().map(|&b| u8::from(b)).collect();
        fnv64(&bytes)
    };
    let mut gate_first = Vec::with_capacity(samples);
    let mut classical = Vec::with_capacity(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let mut tab = LogicalTableau::prepare_logical_plus(&css);
        tab.append(LogicalTableau::prepare_logical_plus(&css));
        for q in 0..n {
            tab.apply_cnot(q, n + q);
        }
        let bits: Vec<bool> = (n..2 * n).map(|q| tab.measure_z(q, &mut rng).outcome).collect();
        gate_first.push(word_digest(&bits));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for _ in 0..samples {
        let mut tab = LogicalTableau::prepare_logical_plus(&css);
        tab.append(LogicalTableau::prepare_logical_plus(&css));
        let control: Vec<bool> = (0..n).map(|q| tab.measure_z(q, &mut rng).outcome).collect();
        let target: Vec<bool> = (n..2 * n).map(|q| tab.measure_z(q, &mut rng).outcome).collect();
        let bits: Vec<bool> = control.iter().zip(&target).map(|(a, b)| a ^ b).collect();
        classical.push(word_digest(&bits));
    }
    (gate_first, classical)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parse_round_trip() {
        let text = "code=steane7\nr=8\ntrials=50\nseed=9\nstrategy=dealer_inconsistent_tree\nsecret=zero\nformat=csv\ncheaters=1,3\n# comment\n";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.r, 8);
        assert_eq!(cfg.trials, 50);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.format, OutputFormat::Csv);
        assert_eq!(cfg.cheaters, vec![1, 3]);
        assert!(matches!(
            cfg.resolve_strategy().unwrap(),
            AdversaryStrategy::DealerInconsistentTree
        ));
    }

    #[test]
    fn config_rejects_unknown_keys() {
        assert!(ExperimentConfig::parse("frobnicate=1\n").is_err());
        assert!(ExperimentConfig::parse("no equals here\n").is_err());
    }

    #[test]
    fn honest_experiment_aggregates() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 20;
        cfg.r = 2;
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.aggregate.trials, 20);
        assert_eq!(report.aggregate.abort_rate, 0.0);
        assert_eq!(report.aggregate.mean_fidelity, Some(1.0));
        assert!(report.aggregate.max_peak_workspace <= 21);
    }

    #[test]
    fn experiment_is_deterministic() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 10;
        cfg.r = 2;
        cfg.strategy = "dealer_inconsistent_tree".to_string();
        let a = emit_jsonl(&run_experiment(&cfg).unwrap());
        let b = emit_jsonl(&run_experiment(&cfg).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn rows_parse_back_and_aggregate_matches() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 15;
        cfg.r = 2;
        let report = run_experiment(&cfg).unwrap();
        let parsed: Vec<TrialRow> = emit_jsonl(&report)
            .lines()
            .map(|l| serde_json::from_str(l).unwrap())
            .collect();
        let re = aggregate_rows(&parsed, cfg.r);
        assert_eq!(re.abort_rate, report.aggregate.abort_rate);
        assert_eq!(re.mean_fidelity, report.aggregate.mean_fidelity);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let mut cfg = ExperimentConfig::default();
        cfg.trials = 3;
        cfg.r = 2;
        let report = run_experiment(&cfg).unwrap();
        let csv = emit_csv(&report);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.starts_with("trial,seed"));
    }

    #[test]
    fn tv_distance_extremes() {
        let a: Vec<u64> = (0..1000).map(|i| i * 2).collect();
        assert_eq!(tv_distance(&a, &a, 8), 0.0);
        let b: Vec<u64> = (0..1000).map(|_| 1u64).collect();
        let c: Vec<u64> = (0..1000).map(|_| 2u64).collect();
        assert_eq!(tv_distance(&b, &c, 8), 1.0);
    }
}
