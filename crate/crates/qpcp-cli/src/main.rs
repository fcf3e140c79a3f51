//! Command-line driver tying the pipeline together: simulate circuits,
//! build and check proofs, run the two-prover protocol, generate
//! Forrelation instances, and drive tamper experiments.
//!
//! Exit codes: 0 for an accepting verdict (or plain success), 1 for a
//! rejecting verdict, 2 for any I/O or validation error. Errors land on
//! stderr as one JSON object; stdout stays machine-readable JSON unless
//! `--human` asks for tables. With a fixed `--seed`, stdout and all output
//! files are byte-identical across runs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Deserialize;
use serde_json::json;

use qpcp::forrelation::{gen_instance, ForrelationError, ForrelationInstance, Label};
use qpcp::harness::{
    apply_tamper, run_experiment, ExperimentConfig, ExperimentError, TamperError, TamperSpec,
};
use qpcp::mip::{
    run_protocol, FirstLieProverOne, MipConfig, ProofProverOne, ProofProverTwo, ProverOne,
};
use qpcp::proof::{build_honest_proof, EntryValue, PcpProof, ProofAccess, ProofDims, ProofError};
use qpcp::rng::{seed_from_hex, BitRng, ParseSeedError};
use qpcp::sim::{simulate, Circuit, SimError};
use qpcp::verifier::{
    expected_proof_queries, t_default, verify, VerifierConfig, VerifyError,
};
use qpcp::{FixedPhase, FixedProb};

const DEFAULT_PROOF_CAP: u128 = 4 << 30;

#[derive(Parser)]
#[command(name = "qpcp", version, about = "Proof-system pipeline driver")]
struct Cli {
    /// Master seed, up to 32 hex digits (optionally 0x-prefixed).
    #[arg(long, global = true, default_value = "0")]
    seed: String,
    /// Worker threads for parallel sections (experiment trials, honest
    /// proof construction). Defaults to all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log filter (error, warn, info, debug, trace).
    #[arg(long, global = true, default_value = "warn")]
    log_level: String,
    /// Tables for people instead of JSON for machines.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a circuit and print its final acceptance probability.
    Simulate { circuit: PathBuf },
    /// Build the honest proof for a circuit and write it to a file.
    Prove {
        circuit: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Fraction bits per stored entry.
        #[arg(long, default_value_t = 96)]
        bits: u32,
        /// Refuse to build proofs whose file would exceed this many bytes.
        #[arg(long, default_value_t = DEFAULT_PROOF_CAP)]
        max_proof_bytes: u128,
    },
    /// Check a proof against a circuit; exit 0 on acc, 1 on rej.
    Verify {
        circuit: PathBuf,
        proof: PathBuf,
        /// Propagation-check iterations per gate (default 4000·m²).
        #[arg(long)]
        t: Option<u64>,
        /// Check tolerance (default derives from n and the proof's bits).
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Run the two-prover protocol on a circuit's honest proof, optionally
    /// against a tampered strategy; writes the per-round transcript as
    /// JSON lines.
    Mip {
        circuit: PathBuf,
        #[arg(long, default_value_t = 1)]
        rounds: u64,
        /// Tamper spec (JSON file) applied to the provers' committed proof.
        #[arg(long)]
        tamper: Option<PathBuf>,
        /// Propagation-check iterations per gate in the replayed verifier
        /// (default 4000·m²).
        #[arg(long)]
        t: Option<u64>,
        #[arg(long, default_value_t = 96)]
        bits: u32,
        /// Transcript destination; stdout when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Forrelation instances and their circuits.
    Forrelation {
        #[command(subcommand)]
        command: ForrelationCommand,
    },
    /// Run a Monte-Carlo experiment from a config file and write its CSV row.
    Experiment {
        config: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Subcommand)]
enum ForrelationCommand {
    /// Sample an instance satisfying the promise for the given label.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        label: LabelArg,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        max_attempts: u64,
    },
    /// Compile an instance file into its phase-oracle circuit.
    Circuit {
        instance: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LabelArg {
    Yes,
    No,
}

impl From<LabelArg> for Label {
    fn from(l: LabelArg) -> Label {
        match l {
            LabelArg::Yes => Label::Yes,
            LabelArg::No => Label::No,
        }
    }
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("bad --seed: {0}")]
    Seed(#[from] ParseSeedError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Proof(#[from] ProofError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Forrelation(#[from] ForrelationError),
    #[error(transparent)]
    Tamper(#[from] TamperError),
    #[error(transparent)]
    Experiment(#[from] ExperimentError),
    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error(
        "proof would be {estimated} bytes, above the cap of {cap}; \
         raise --max-proof-bytes to build it anyway"
    )]
    ProofTooLarge { estimated: u128, cap: u128 },
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Seed(_) => "seed",
            CliError::Sim(_) => "circuit",
            CliError::Proof(_) => "proof",
            CliError::Verify(_) => "verify",
            CliError::Forrelation(_) => "forrelation",
            CliError::Tamper(_) => "tamper",
            CliError::Experiment(_) => "experiment",
            CliError::Json { .. } => "json",
            CliError::Csv(_) => "csv",
            CliError::ProofTooLarge { .. } => "proof_too_large",
        }
    }
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_bytes(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_circuit(path: &Path) -> Result<Circuit, CliError> {
    Ok(Circuit::from_json_str(&read_text(path)?)?)
}

fn chacha_from_u128(seed: u128) -> ChaCha20Rng {
    let mut key = [0u8; 32];
    key[..16].copy_from_slice(&seed.to_le_bytes());
    ChaCha20Rng::from_seed(key)
}

fn emit_error(err: &CliError) {
    let payload = json!({ "error": { "kind": err.kind(), "message": err.to_string() } });
    eprintln!("{payload}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let payload = json!({ "error": { "kind": "usage", "message": e.to_string() } });
            eprintln!("{payload}");
            return ExitCode::from(2);
        }
    };

    let _ = env_logger::Builder::new().parse_filters(&cli.log_level).try_init();
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }

    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            emit_error(&e);
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let seed = seed_from_hex(&cli.seed)?;
    match &cli.command {
        Command::Simulate { circuit } => cmd_simulate(circuit, cli.human),
        Command::Prove { circuit, output, bits, max_proof_bytes } => {
            cmd_prove(circuit, output, *bits, *max_proof_bytes, cli.human)
        }
        Command::Verify { circuit, proof, t, eps } => {
            cmd_verify(circuit, proof, *t, *eps, seed, cli.human)
        }
        Command::Mip { circuit, rounds, tamper, t, bits, output } => {
            cmd_mip(circuit, *rounds, tamper.as_deref(), *t, *bits, output.as_deref(), seed, cli.human)
        }
        Command::Forrelation { command } => match command {
            ForrelationCommand::Gen { n, label, output, max_attempts } => {
                cmd_forrelation_gen(*n, (*label).into(), output, *max_attempts, seed, cli.human)
            }
            ForrelationCommand::Circuit { instance, output } => {
                cmd_forrelation_circuit(instance, output, cli.human)
            }
        },
        Command::Experiment { config, output } => cmd_experiment(config, output, cli.human),
    }
}

fn cmd_simulate(circuit_path: &Path, human: bool) -> Result<u8, CliError> {
    let circuit = load_circuit(circuit_path)?;
    let states = simulate(&circuit)?;
    let p = states
        .last()
        .expect("simulate returns m+1 states")
        .acceptance_probability(&circuit.acceptance);
    if human {
        println!("n = {}, m = {}", circuit.n, circuit.m());
        println!("acceptance probability = {p:.9}");
        println!("threshold = {}", circuit.acceptance.threshold);
    } else {
        println!(
            "{}",
            json!({
                "n": circuit.n,
                "m": circuit.m(),
                "acceptance_probability": p,
                "threshold": circuit.acceptance.threshold,
            })
        );
    }
    Ok(0)
}

fn cmd_prove(
    circuit_path: &Path,
    output: &Path,
    bits: u32,
    cap: u128,
    human: bool,
) -> Result<u8, CliError> {
    let circuit = load_circuit(circuit_path)?;
    let dims = ProofDims { n: circuit.n, m: circuit.m(), b: bits };
    dims.validate()?;
    let estimated = dims.file_bytes();
    if estimated > cap {
        return Err(CliError::ProofTooLarge { estimated, cap });
    }
    let states = simulate(&circuit)?;
    let proof = build_honest_proof(&states, bits)?;
    let bytes = proof.serialize();
    debug_assert_eq!(bytes.len() as u128, estimated);
    write_bytes(output, &bytes)?;
    log::info!("wrote {} bytes to {}", bytes.len(), output.display());
    if human {
        println!("wrote {} ({} bytes, n = {}, m = {}, b = {bits})",
            output.display(), bytes.len(), dims.n, dims.m);
    } else {
        println!(
            "{}",
            json!({
                "path": output.display().to_string(),
                "bytes": bytes.len(),
                "n": dims.n,
                "m": dims.m,
                "b": bits,
            })
        );
    }
    Ok(0)
}

fn cmd_verify(
    circuit_path: &Path,
    proof_path: &Path,
    t: Option<u64>,
    eps: Option<f64>,
    seed: u128,
    human: bool,
) -> Result<u8, CliError> {
    let circuit = load_circuit(circuit_path)?;
    let proof = PcpProof::deserialize(&read_bytes(proof_path)?)?;
    let mut config = VerifierConfig::for_circuit(&circuit, proof.dims().b, seed);
    if let Some(t) = t {
        config.t = t;
    }
    if let Some(eps) = eps {
        config.eps_check = eps;
    }
    let verdict = verify(ProofAccess::untraced(&proof), &circuit, &config)?;
    if human {
        println!("verdict: {}", if verdict.is_acc() { "acc" } else { "rej" });
        if let Some(reason) = &verdict.reason {
            println!("reason: {reason:?}");
        }
        println!("proof queries:  {}", verdict.stats.proof_queries);
        println!("oracle queries: {}", verdict.stats.oracle_queries);
        println!("random bits:    {}", verdict.stats.random_bits);
    } else {
        println!("{}", verdict.to_json());
    }
    Ok(if verdict.is_acc() { 0 } else { 1 })
}

enum P1 {
    Honest(ProofProverOne),
    Deviating(FirstLieProverOne<ProofProverOne>),
}

impl ProverOne for P1 {
    fn answer(&self, r_seed: u128) -> Vec<EntryValue> {
        match self {
            P1::Honest(p) => p.answer(r_seed),
            P1::Deviating(p) => p.answer(r_seed),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_mip(
    circuit_path: &Path,
    rounds: u64,
    tamper_path: Option<&Path>,
    t: Option<u64>,
    bits: u32,
    output: Option<&Path>,
    seed: u128,
    human: bool,
) -> Result<u8, CliError> {
    let circuit = load_circuit(circuit_path)?;
    let states = simulate(&circuit)?;
    let honest = build_honest_proof(&states, bits)?;

    let tamper = match tamper_path {
        None => None,
        Some(path) => {
            let text = read_text(path)?;
            let spec: TamperSpec =
                serde_json::from_str(&text).map_err(|source| CliError::Json {
                    context: path.display().to_string(),
                    source,
                })?;
            Some(spec)
        }
    };

    let mut pcp_config = VerifierConfig::for_circuit(&circuit, bits, 0);
    if let Some(t) = t {
        pcp_config.t = t;
    }
    let config = MipConfig { rounds, b: bits, pcp_config };

    // Stream 0 of the master seed feeds tamper construction, stream 1 the
    // protocol coins; the experiment harness uses the same split.
    let tamper_seed = BitRng::from_seed(seed).substream(0).draw_bits(128);
    let (committed, deviation) = match &tamper {
        None => (honest, None),
        Some(TamperSpec::P1Deviation { position, value }) => {
            let value = value.map(|w| w.to_entry(bits));
            (honest, Some((*position, value)))
        }
        Some(spec) => {
            let outcome =
                apply_tamper(&honest, &circuit, spec, &mut chacha_from_u128(tamper_seed))?;
            log::info!("tamper achieved gap {}", outcome.achieved_delta);
            (outcome.proof, None)
        }
    };

    let p1 = match deviation {
        None => P1::Honest(ProofProverOne::new(&circuit, committed.clone(), pcp_config)?),
        Some((position, value)) => P1::Deviating(FirstLieProverOne {
            inner: ProofProverOne::new(&circuit, committed.clone(), pcp_config)?,
            position,
            value,
            b: bits,
        }),
    };
    let p2 = ProofProverTwo::new(committed);
    let mut rng = BitRng::from_seed(seed).substream(1);
    let result = run_protocol(&circuit, &p1, &p2, &config, &mut rng)?;

    let mut lines = String::new();
    for transcript in &result.transcripts {
        lines.push_str(&transcript.to_json(bits).to_string());
        lines.push('\n');
    }
    match output {
        Some(path) => write_bytes(path, lines.as_bytes())?,
        None => print!("{lines}"),
    }

    let summary = json!({
        "accepted": result.accepted,
        "rounds_run": result.transcripts.len(),
        "rounds_requested": rounds,
        "q_pi": expected_proof_queries(&circuit, config.pcp_config.t),
        "communication_bits": result.communication_bits,
        "oracle_queries": result.oracle_queries,
    });
    if human {
        println!("accepted: {}", result.accepted);
        println!("rounds run: {}/{}", result.transcripts.len(), rounds);
        println!("communication bits: {}", result.communication_bits);
    } else {
        println!("{summary}");
    }
    Ok(if result.accepted { 0 } else { 1 })
}

trait WrongValueExt {
    fn to_entry(&self, b: u32) -> EntryValue;
}

impl WrongValueExt for qpcp::harness::WrongValue {
    fn to_entry(&self, b: u32) -> EntryValue {
        match *self {
            qpcp::harness::WrongValue::Prob { raw } => EntryValue::Prob(FixedProb::from_raw(raw, b)),
            qpcp::harness::WrongValue::Phase { raw_re, raw_im } => {
                EntryValue::Phase(FixedPhase::from_raw(raw_re, raw_im, b))
            }
        }
    }
}

fn cmd_forrelation_gen(
    n: usize,
    label: Label,
    output: &Path,
    max_attempts: u64,
    seed: u128,
    human: bool,
) -> Result<u8, CliError> {
    let mut rng = chacha_from_u128(seed);
    let instance = gen_instance(n, label, &mut rng, max_attempts)?;
    write_bytes(output, instance.to_json_string().as_bytes())?;
    if human {
        println!(
            "wrote {} ({label} instance, n = {n}, phi = {:.6})",
            output.display(),
            instance.phi
        );
    } else {
        println!(
            "{}",
            json!({
                "path": output.display().to_string(),
                "n": n,
                "label": label,
                "phi": instance.phi,
            })
        );
    }
    Ok(0)
}

fn cmd_forrelation_circuit(
    instance_path: &Path,
    output: &Path,
    human: bool,
) -> Result<u8, CliError> {
    let instance = ForrelationInstance::from_json_str(&read_text(instance_path)?)?;
    let circuit = instance.build_circuit();
    write_bytes(output, circuit.to_json_string().as_bytes())?;
    if human {
        println!(
            "wrote {} (n = {}, {} gates, threshold {})",
            output.display(),
            circuit.n,
            circuit.m(),
            circuit.acceptance.threshold
        );
    } else {
        println!(
            "{}",
            json!({
                "path": output.display().to_string(),
                "n": circuit.n,
                "m": circuit.m(),
                "threshold": circuit.acceptance.threshold,
            })
        );
    }
    Ok(0)
}

/// Experiment config file: the circuit to test plus the harness settings.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentFile {
    circuit: PathBuf,
    experiment: ExperimentConfig,
}

fn cmd_experiment(config_path: &Path, output: &Path, human: bool) -> Result<u8, CliError> {
    let text = read_text(config_path)?;
    let file: ExperimentFile = serde_json::from_str(&text).map_err(|source| CliError::Json {
        context: config_path.display().to_string(),
        source,
    })?;
    let circuit = load_circuit(&file.circuit)?;
    let states = simulate(&circuit)?;
    let proof = build_honest_proof(&states, file.experiment.b)?;
    let report = run_experiment(&circuit, &proof, &file.experiment)?;

    let mut writer = csv::Writer::from_writer(vec![]);
    writer.serialize(report.csv_record())?;
    let csv_bytes = writer.into_inner().expect("vec sink cannot fail");
    write_bytes(output, &csv_bytes)?;

    if human {
        println!("protocol: {}  tamper: {}", report.protocol.as_str(), report.tamper);
        println!(
            "accepted {}/{} (rate {:.4}, wilson [{:.4}, {:.4}])",
            report.accept_count,
            report.trials,
            report.accept_rate,
            report.wilson_low,
            report.wilson_high
        );
        println!(
            "bound: {} = {:.6}  achieved delta: {:.6}",
            report.bound_kind.as_str(),
            report.bound_value,
            report.achieved_delta
        );
        println!("csv row written to {}", output.display());
    } else {
        println!("{}", report.to_json_string());
    }
    Ok(0)
}
