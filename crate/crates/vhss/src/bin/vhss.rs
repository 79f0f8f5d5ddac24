//! Experiment runner: seeded Monte Carlo protocol trials, the published
//! scheme-parameter table, and fixed-seed property suites.

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use vhss::experiment::{
    cnot_commutation_samples, cnot_measure_commutation_exhaustive, emit_csv, emit_jsonl,
    random_clifford_vs_statevector, run_experiment, table1_text, tv_distance, ExperimentConfig,
    OutputFormat,
};

#[derive(Parser)]
#[command(name = "vhss", about = "hybrid secret sharing protocol simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run seeded protocol trials and emit per-trial rows plus an aggregate.
    Run {
        /// Flat key=value config file; flags override file values.
        #[arg(long)]
        config: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<usize>,
        /// Row output path; stdout when omitted.
        #[arg(long)]
        out: Option<String>,
        /// jsonl or csv.
        #[arg(long)]
        format: Option<String>,
    },
    /// Print the scheme-parameter table for the four code families.
    Table1,
    /// Run a named invariant suite: codes, tableau, vcss, protocol, secrecy.
    Props { suite: String },
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::Run {
            config,
            seed,
            trials,
            out,
            format,
        } => cmd_run(config, seed, trials, out, format),
        Cmd::Table1 => {
            print!("{}", table1_text());
            ExitCode::SUCCESS
        }
        Cmd::Props { suite } => cmd_props(&suite),
    }
}

fn cmd_run(
    config: Option<String>,
    seed: Option<u64>,
    trials: Option<usize>,
    out: Option<String>,
    format: Option<String>,
) -> ExitCode {
    let mut cfg = match config {
        Some(path) => match std::fs::read_to_string(&path) {
            Ok(text) => match ExperimentConfig::parse(&text) {
                Ok(cfg) => cfg,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(2);
                }
            },
            Err(e) => {
                eprintln!("cannot read {path}: {e}");
                return ExitCode::from(2);
            }
        },
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    if let Some(o) = out {
        cfg.out = Some(o);
    }
    match format.as_deref() {
        Some("jsonl") => cfg.format = OutputFormat::Jsonl,
        Some("csv") => cfg.format = OutputFormat::Csv,
        Some(other) => {
            eprintln!("unknown format: {other}");
            return ExitCode::from(2);
        }
        None => {}
    }

    let report = match run_experiment(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let rows = match cfg.format {
        OutputFormat::Jsonl => emit_jsonl(&report),
        OutputFormat::Csv => emit_csv(&report),
    };
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, rows) {
            eprintln!("cannot write {path}: {e}");
            return ExitCode::FAILURE;
        }
    } else {
        print!("{rows}");
    }
    println!(
        "{}",
        serde_json::to_string(&report.aggregate).expect("aggregate serializes")
    );
    ExitCode::SUCCESS
}

fn cmd_props(suite: &str) -> ExitCode {
    let result = match suite {
        "codes" => props_codes(),
        "tableau" => props_tableau(),
        "vcss" => props_vcss(),
        "protocol" => props_protocol(),
        "secrecy" => props_secrecy(),
        _ => {
            eprintln!("unknown suite: {suite} (expected codes|tableau|vcss|protocol|secrecy)");
            return ExitCode::from(2);
        }
    };
    match result {
        Ok(()) => {
            println!("{suite}: ok");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{suite}: FAILED: {e}");
            ExitCode::FAILURE
        }
    }
}

fn props_codes() -> Result<(), String> {
    use vhss::codes::hamming_7_4;
    use vhss::css::steane_code;
    use vhss::gf2::BitVector;

    let code = hamming_7_4();
    if (code.n(), code.k(), code.d()) != (7, 4, 3) {
        return Err("hamming parameters".into());
    }
    // Unique decoding of every single-bit corruption of every codeword.
    for cw in code.codewords() {
        for e in 0..7 {
            let mut w = cw.clone();
            w.flip(e);
            let out = code.bounded_distance_decode(&w).map_err(|e| e.to_string())?;
            if out.codeword() != Some(&cw) {
                return Err(format!("decode failed at codeword {cw:?} error {e}"));
            }
        }
    }
    let css = steane_code();
    if (css.n(), css.distance()) != (7, 3) {
        return Err("steane parameters".into());
    }
    let mut triple = BitVector::zeros(7);
    for i in css.logical_x().support() {
        triple.set(i, true);
    }
    if triple.weight() != 3 {
        return Err("logical weight".into());
    }
    Ok(())
}

fn props_tableau() -> Result<(), String> {
    random_clifford_vs_statevector(200, 6, 0x7ab)?;
    cnot_measure_commutation_exhaustive(200, 6, 0x1234)
}

fn props_vcss() -> Result<(), String> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use vhss::vcss::{vcss_share, vcss_verify, DealerConduct, Gf256, VcssVerdict};

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for key in [(false, false), (true, false), (false, true), (true, true)] {
        let shares = vcss_share::<Gf256, _>(key, 7, 2, 8, &mut rng).map_err(|e| e.to_string())?;
        let coins: Vec<bool> = (0..8).map(|i| i % 2 == 0).collect();
        if vcss_verify(&shares, 2, 8, &coins, DealerConduct::Honest, &mut rng)
            != VcssVerdict::Accept
        {
            return Err(format!("honest dealer rejected for key {key:?}"));
        }
    }
    Ok(())
}

fn props_protocol() -> Result<(), String> {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use vhss::css::steane_code;
    use vhss::netsim::{AdversaryStrategy, NetworkConfig};
    use vhss::protocol::run_full;
    use vhss::tableau::AmplitudePair;

    let css = steane_code();
    for seed in 0..25u64 {
        let cfg = NetworkConfig::honest(css.n(), css.n(), seed);
        let rng = ChaCha8Rng::seed_from_u64(seed);
        let t = run_full(cfg, &css, AmplitudePair::plus(), AdversaryStrategy::Honest, 2, rng)
            .map_err(|e| e.to_string())?;
        if t.aborted || t.fidelity != Some(1.0) {
            return Err(format!("honest run degraded at seed {seed}"));
        }
    }
    let mut aborts = 0;
    for seed in 0..40u64 {
        let cfg = NetworkConfig::honest(css.n(), css.n(), seed);
        let rng = ChaCha8Rng::seed_from_u64(seed);
        let t = run_full(
            cfg,
            &css,
            AmplitudePair::zero(),
            AdversaryStrategy::DealerInconsistentTree,
            4,
            rng,
        )
        .map_err(|e| e.to_string())?;
        if t.aborted {
            aborts += 1;
        }
    }
    if aborts < 30 {
        return Err(format!("inconsistent dealer only aborted {aborts}/40"));
    }
    Ok(())
}

fn props_secrecy() -> Result<(), String> {
    use vhss::css::steane_code;
    use vhss::protocol::{key_averaged_density, subset_view_digest};
    use vhss::tableau::AmplitudePair;

    let rho = key_averaged_density(&AmplitudePair::plus());
    if (rho[0][0].re - 0.5).abs() > 1e-12 || rho[0][1].norm() > 1e-12 {
        return Err("pad average is not maximally mixed".into());
    }
    let css = steane_code();
    let runs = 2000;
    let zero: Vec<u64> = (0..runs)
        .map(|s| subset_view_digest(&css, AmplitudePair::zero(), 2, s, &[1, 2, 3]))
        .collect();
    let plus: Vec<u64> = (0..runs)
        .map(|s| subset_view_digest(&css, AmplitudePair::plus(), 2, 1_000_000 + s, &[1, 2, 3]))
        .collect();
    let tv = tv_distance(&zero, &plus, 8);
    if tv >= 0.07 {
        return Err(format!("view TV {tv} too large"));
    }
    let (a, b) = cnot_commutation_samples(2000, 3);
    let tv = tv_distance(&a, &b, 8);
    if tv >= 0.07 {
        return Err(format!("reduction TV {tv} too large"));
    }
    Ok(())
}
