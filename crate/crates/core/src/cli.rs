//! Command-line front end. Formatting only; every number printed comes
//! straight from a library call.
//!
//! Exit codes: 0 success, 1 domain error (zero evidence, enumeration too
//! large), 2 usage or input error (bad flags, unreadable or invalid model
//! file, unknown labels).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::error::ModelError;
use crate::evolution::{chain_weight, evolve, expanded_mef};
use crate::factorial::{fhmm_sequence_likelihood, FactorialHmmModel};
use crate::inference::{
    joint_likelihood, map_path_bruteforce, posterior_marginals, sequence_likelihood,
};
use crate::io::{
    dump_trellis, export_dot, format_prob, format_scalar, parse_model, AnyModel, DocumentError,
};
use crate::model::{
    HmmModel, LabelSpace, MarkovChainModel, ObsSequence, ProbVector, Sequence, StateSequence,
};
use crate::viterbi::viterbi_decode;
use crate::vmm::conditional_chain;

#[derive(Debug, Parser)]
#[command(
    name = "markov-hmm",
    version,
    about = "Exact inference for Markov chains and hidden Markov models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Model file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Replace the initial distribution, e.g. "1,0,0"
    #[arg(long)]
    init: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a model file parses and validates
    Validate {
        #[arg(long)]
        model: PathBuf,
    },
    /// Distribution after a number of transitions
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        steps: usize,
        /// Sum over all state paths instead of iterating the transition matrix
        #[arg(long)]
        enumerate: bool,
    },
    /// Probability of a state sequence
    ChainProb {
        #[command(flatten)]
        model: ModelArgs,
        /// Comma-separated state labels
        #[arg(long)]
        seq: String,
        /// Condition on this current state; `seq` is then the future
        #[arg(long)]
        given: Option<String>,
    },
    /// Joint probability of observations and a state sequence
    Joint {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        obs: String,
        #[arg(long)]
        seq: String,
    },
    /// Likelihood of an observation sequence
    Likelihood {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        obs: String,
    },
    /// Most likely state path by Viterbi decoding
    Viterbi {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        obs: String,
        #[arg(long)]
        log_space: bool,
        #[arg(long)]
        dump_trellis: bool,
    },
    /// Posterior state distribution at each time
    Posterior {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        obs: String,
    },
    /// Most likely state path by exhaustive search
    MapBrute {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        obs: String,
    },
    /// Observation likelihood under a factorial HMM
    FhmmLikelihood {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        obs: String,
    },
    /// Unrolled network as a Graphviz DOT digraph
    ExportDot {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        horizon: usize,
    },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Document {
        path: String,
        #[source]
        source: DocumentError,
    },
    #[error(transparent)]
    Domain(#[from] ModelError),
    #[error("write failed: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            Self::Domain(_) => 1,
            Self::Input(_) | Self::Document { .. } | Self::Output(_) => 2,
        }
    }
}

fn input(err: ModelError, what: &str) -> CliError {
    CliError::Input(format!("invalid {what}: {err}"))
}

fn load(path: &Path) -> Result<AnyModel, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text)
        .map(|doc| doc.model)
        .map_err(|source| CliError::Document {
            path: path.display().to_string(),
            source,
        })
}

fn parse_labels<K>(space: &LabelSpace, text: &str, what: &str) -> Result<Sequence<K>, CliError> {
    let items: Vec<&str> = text.split(',').map(str::trim).collect();
    if items.iter().any(|s| s.is_empty()) {
        return Err(CliError::Input(format!(
            "invalid {what}: empty label in `{text}`"
        )));
    }
    Sequence::from_labels(space.clone(), items).map_err(|e| input(e, what))
}

fn parse_init(space: &LabelSpace, text: &str) -> Result<ProbVector, CliError> {
    let entries = text
        .split(',')
        .map(|s| {
            s.trim().parse::<f64>().map_err(|_| {
                CliError::Input(format!("invalid --init: `{}` is not a number", s.trim()))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    ProbVector::new(space.clone(), entries).map_err(|e| input(e, "--init"))
}

fn load_chain(args: &ModelArgs) -> Result<MarkovChainModel, CliError> {
    let chain = match load(&args.model)? {
        AnyModel::Markov(m) => m,
        AnyModel::Hmm(h) => h.chain().clone(),
        AnyModel::Factorial(_) => {
            return Err(CliError::Input(
                "this command needs a markov or hmm model, got fhmm".into(),
            ));
        }
    };
    match &args.init {
        Some(text) => {
            let pi = parse_init(chain.states(), text)?;
            Ok(chain.with_initial(pi)?)
        }
        None => Ok(chain),
    }
}

fn load_hmm(args: &ModelArgs) -> Result<HmmModel, CliError> {
    let hmm = match load(&args.model)? {
        AnyModel::Hmm(h) => h,
        other => {
            return Err(CliError::Input(format!(
                "this command needs an hmm model, got {}",
                other.kind().as_str()
            )));
        }
    };
    match &args.init {
        Some(text) => {
            let pi = parse_init(hmm.states(), text)?;
            Ok(hmm.with_initial(pi)?)
        }
        None => Ok(hmm),
    }
}

fn load_fhmm(path: &Path) -> Result<FactorialHmmModel, CliError> {
    match load(path)? {
        AnyModel::Factorial(f) => Ok(f),
        other => Err(CliError::Input(format!(
            "this command needs an fhmm model, got {}",
            other.kind().as_str()
        ))),
    }
}

fn write_distribution(out: &mut dyn Write, p: &ProbVector) -> std::io::Result<()> {
    for (label, &v) in p.space().labels().iter().zip(p.entries()) {
        writeln!(out, "{label} {}", format_prob(v))?;
    }
    Ok(())
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Validate { model } => match load(&model)? {
            AnyModel::Markov(m) => writeln!(out, "ok: markov ({} states)", m.states().len())?,
            AnyModel::Hmm(h) => writeln!(
                out,
                "ok: hmm ({} states, {} observations)",
                h.states().len(),
                h.observations().len()
            )?,
            AnyModel::Factorial(f) => writeln!(
                out,
                "ok: fhmm ({} components, {} observations)",
                f.components().len(),
                f.observations().len()
            )?,
        },
        Command::Evolve {
            model,
            steps,
            enumerate,
        } => {
            let chain = load_chain(&model)?;
            let p = if enumerate {
                expanded_mef(&chain, steps + 1)?
            } else {
                evolve(&chain, steps)
            };
            write_distribution(out, &p)?;
        }
        Command::ChainProb { model, seq, given } => {
            let chain = load_chain(&model)?;
            let q: StateSequence = parse_labels(chain.states(), &seq, "--seq")?;
            let value = match given {
                Some(label) => {
                    let from = chain
                        .states()
                        .index_of(label.trim())
                        .map_err(|e| input(e, "--given"))?;
                    conditional_chain(&chain, from, &q)?
                }
                None => chain_weight(&chain, &q)?.value(),
            };
            writeln!(out, "{}", format_scalar(value))?;
        }
        Command::Joint { model, obs, seq } => {
            let hmm = load_hmm(&model)?;
            let x: ObsSequence = parse_labels(hmm.observations(), &obs, "--obs")?;
            let q: StateSequence = parse_labels(hmm.states(), &seq, "--seq")?;
            if x.len() != q.len() {
                return Err(CliError::Input(format!(
                    "--obs has {} labels but --seq has {}",
                    x.len(),
                    q.len()
                )));
            }
            writeln!(out, "{}", format_scalar(joint_likelihood(&hmm, &x, &q)?))?;
        }
        Command::Likelihood { model, obs } => {
            let hmm = load_hmm(&model)?;
            let x: ObsSequence = parse_labels(hmm.observations(), &obs, "--obs")?;
            writeln!(out, "{}", format_scalar(sequence_likelihood(&hmm, &x)?))?;
        }
        Command::Viterbi {
            model,
            obs,
            log_space,
            dump_trellis: dump,
        } => {
            let hmm = load_hmm(&model)?;
            let x: ObsSequence = parse_labels(hmm.observations(), &obs, "--obs")?;
            let trellis = viterbi_decode(&hmm, &x, log_space)?;
            writeln!(out, "path: {}", trellis.best_path())?;
            writeln!(out, "value: {}", format_scalar(trellis.best_probability()))?;
            if log_space {
                writeln!(out, "log-value: {}", format_prob(trellis.best_value()))?;
            }
            if dump {
                out.write_all(dump_trellis(&trellis).as_bytes())?;
            }
        }
        Command::Posterior { model, obs } => {
            let hmm = load_hmm(&model)?;
            let x: ObsSequence = parse_labels(hmm.observations(), &obs, "--obs")?;
            let post = posterior_marginals(&hmm, &x)?;
            writeln!(out, "t | {}", hmm.states().labels().join(", "))?;
            for (t, p) in post.per_time().iter().enumerate() {
                let row: Vec<String> = p.entries().iter().map(|&v| format_prob(v)).collect();
                writeln!(out, "{} | {}", t + 1, row.join(", "))?;
            }
            let argmax: Vec<&str> = post
                .argmax_states()
                .into_iter()
                .map(|i| hmm.states().labels()[i].as_str())
                .collect();
            writeln!(out, "argmax: {}", argmax.join(","))?;
        }
        Command::MapBrute { model, obs } => {
            let hmm = load_hmm(&model)?;
            let x: ObsSequence = parse_labels(hmm.observations(), &obs, "--obs")?;
            let (path, value) = map_path_bruteforce(&hmm, &x)?;
            writeln!(out, "path: {path}")?;
            writeln!(out, "value: {}", format_scalar(value))?;
        }
        Command::FhmmLikelihood { model, obs } => {
            let f = load_fhmm(&model)?;
            let y: ObsSequence = parse_labels(f.observations(), &obs, "--obs")?;
            writeln!(out, "{}", format_scalar(fhmm_sequence_likelihood(&f, &y)?))?;
        }
        Command::ExportDot { model, horizon } => {
            if horizon == 0 {
                return Err(CliError::Input("--horizon must be at least 1".into()));
            }
            let dot = match load(&model)? {
                AnyModel::Markov(m) => export_dot(&m, horizon)?,
                AnyModel::Hmm(h) => export_dot(&h, horizon)?,
                AnyModel::Factorial(_) => {
                    return Err(CliError::Input(
                        "export-dot supports markov and hmm models".into(),
                    ));
                }
            };
            out.write_all(dot.as_bytes())?;
        }
    }
    Ok(())
}

/// Runs the CLI on `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
