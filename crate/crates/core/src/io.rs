//! Model files, DOT export of unrolled networks, and text rendering of
//! Viterbi trellises.
//!
//! Model files are strict JSON:
//!
//! ```json
//! {
//!   "kind": "hmm",
//!   "name": "weather-stone",
//!   "states": ["sunny", "rainy", "foggy"],
//!   "observations": ["dry", "wet"],
//!   "initial": [0.5, 0.3, 0.2],
//!   "transition": [[0.8, 0.05, 0.15], [0.2, 0.6, 0.2], [0.2, 0.3, 0.5]],
//!   "emission": [[0.9, 0.1], [0.2, 0.8], [0.7, 0.3]]
//! }
//! ```
//!
//! `kind` is one of `markov`, `hmm`, `fhmm`. A `markov` document omits
//! `observations` and `emission`. An `fhmm` document carries `observations`
//! plus `components`, each with its own `states`, `initial`, `transition`
//! and `emission`. Unknown keys are rejected.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::ModelError;
use crate::factorial::FactorialHmmModel;
use crate::model::{HmmModel, LabelSpace, MarkovChainModel, ProbVector, StochasticMatrix};
use crate::viterbi::ViterbiTrellis;

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error at {path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("invalid model at {path}: {source}")]
    Model {
        path: String,
        #[source]
        source: ModelError,
    },
}

impl DocumentError {
    /// JSON path of the offending value, when there is one.
    pub fn path(&self) -> Option<&str> {
        match self {
            Self::Parse { .. } => None,
            Self::Schema { path, .. } | Self::Model { path, .. } => Some(path),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Markov,
    Hmm,
    Factorial,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Markov => "markov",
            Self::Hmm => "hmm",
            Self::Factorial => "fhmm",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyModel {
    Markov(MarkovChainModel),
    Hmm(HmmModel),
    Factorial(FactorialHmmModel),
}

impl AnyModel {
    pub fn kind(&self) -> ModelKind {
        match self {
            Self::Markov(_) => ModelKind::Markov,
            Self::Hmm(_) => ModelKind::Hmm,
            Self::Factorial(_) => ModelKind::Factorial,
        }
    }
}

/// A parsed model file: the validated model plus optional metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelDocument {
    pub name: Option<String>,
    pub description: Option<String>,
    pub model: AnyModel,
}

impl ModelDocument {
    pub fn new(model: AnyModel) -> Self {
        Self {
            name: None,
            description: None,
            model,
        }
    }
}

type DocResult<T> = Result<T, DocumentError>;

fn schema(path: &str, reason: impl Into<String>) -> DocumentError {
    DocumentError::Schema {
        path: path.to_string(),
        reason: reason.into(),
    }
}

fn model_err(path: &str, source: ModelError) -> DocumentError {
    // Point at the exact element when the error names one.
    let path = match &source {
        ModelError::EmptyLabel { index }
        | ModelError::NegativeEntry { index, .. }
        | ModelError::NonFiniteEntry { index, .. } => format!("{path}[{index}]"),
        ModelError::NegativeMatrixEntry { row, col, .. }
        | ModelError::NonFiniteMatrixEntry { row, col, .. } => format!("{path}[{row}][{col}]"),
        ModelError::RowSumNotOne { row, .. } => format!("{path}[{row}]"),
        _ => path.to_string(),
    };
    DocumentError::Model { path, source }
}

fn object<'a>(value: &'a Value, path: &str) -> DocResult<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn check_keys(
    obj: &Map<String, Value>,
    path: &str,
    allowed: &[&str],
    context: &str,
) -> DocResult<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(key) => Err(schema(
            &format!("{path}.{key}"),
            format!("unknown key for {context}"),
        )),
        None => Ok(()),
    }
}

fn required<'a>(
    obj: &'a Map<String, Value>,
    path: &str,
    key: &str,
) -> DocResult<(&'a Value, String)> {
    let child = format!("{path}.{key}");
    match obj.get(key) {
        Some(v) => Ok((v, child)),
        None => Err(schema(&child, "missing required key")),
    }
}

fn optional_string(obj: &Map<String, Value>, path: &str, key: &str) -> DocResult<Option<String>> {
    match obj.get(key) {
        None => Ok(None),
        Some(Value::String(s)) => Ok(Some(s.clone())),
        Some(_) => Err(schema(&format!("{path}.{key}"), "expected a string")),
    }
}

fn array<'a>(value: &'a Value, path: &str) -> DocResult<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| schema(path, "expected an array"))
}

fn labels(value: &Value, path: &str) -> DocResult<LabelSpace> {
    let items = array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| schema(&format!("{path}[{i}]"), "expected a string"))
        })
        .collect::<DocResult<Vec<_>>>()?;
    LabelSpace::new(items).map_err(|e| model_err(path, e))
}

fn numbers(value: &Value, path: &str) -> DocResult<Vec<f64>> {
    array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_f64()
                .ok_or_else(|| schema(&format!("{path}[{i}]"), "expected a number"))
        })
        .collect()
}

fn matrix(value: &Value, path: &str) -> DocResult<Vec<Vec<f64>>> {
    array(value, path)?
        .iter()
        .enumerate()
        .map(|(i, row)| numbers(row, &format!("{path}[{i}]")))
        .collect()
}

fn chain_section(obj: &Map<String, Value>, path: &str) -> DocResult<MarkovChainModel> {
    let (v, p) = required(obj, path, "states")?;
    let states = labels(v, &p)?;
    let (v, p) = required(obj, path, "initial")?;
    let initial = ProbVector::new(states.clone(), numbers(v, &p)?).map_err(|e| model_err(&p, e))?;
    let (v, p) = required(obj, path, "transition")?;
    let transition = StochasticMatrix::new(states.clone(), states, matrix(v, &p)?)
        .map_err(|e| model_err(&p, e))?;
    MarkovChainModel::new(transition, initial).map_err(|e| model_err(path, e))
}

fn emission_section(
    obj: &Map<String, Value>,
    path: &str,
    states: &LabelSpace,
    observations: &LabelSpace,
) -> DocResult<StochasticMatrix> {
    let (v, p) = required(obj, path, "emission")?;
    StochasticMatrix::new(states.clone(), observations.clone(), matrix(v, &p)?)
        .map_err(|e| model_err(&p, e))
}

const MARKOV_KEYS: &[&str] = &[
    "kind",
    "name",
    "description",
    "states",
    "initial",
    "transition",
];
const HMM_KEYS: &[&str] = &[
    "kind",
    "name",
    "description",
    "states",
    "observations",
    "initial",
    "transition",
    "emission",
];
const FHMM_KEYS: &[&str] = &["kind", "name", "description", "observations", "components"];
const COMPONENT_KEYS: &[&str] = &["states", "initial", "transition", "emission"];

/// Parses and validates a model document.
pub fn parse_model(text: &str) -> DocResult<ModelDocument> {
    let root: Value = serde_json::from_str(text).map_err(|e| DocumentError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let path = "$";
    let obj = object(&root, path)?;
    let kind = match required(obj, path, "kind")? {
        (Value::String(s), _) => s.as_str(),
        (_, p) => return Err(schema(&p, "expected a string")),
    };
    let name = optional_string(obj, path, "name")?;
    let description = optional_string(obj, path, "description")?;

    let model = match kind {
        "markov" => {
            check_keys(obj, path, MARKOV_KEYS, "kind `markov`")?;
            AnyModel::Markov(chain_section(obj, path)?)
        }
        "hmm" => {
            check_keys(obj, path, HMM_KEYS, "kind `hmm`")?;
            let chain = chain_section(obj, path)?;
            let (v, p) = required(obj, path, "observations")?;
            let observations = labels(v, &p)?;
            let emission = emission_section(obj, path, chain.states(), &observations)?;
            AnyModel::Hmm(HmmModel::new(chain, emission).map_err(|e| model_err(path, e))?)
        }
        "fhmm" => {
            check_keys(obj, path, FHMM_KEYS, "kind `fhmm`")?;
            let (v, p) = required(obj, path, "observations")?;
            let observations = labels(v, &p)?;
            let (v, cpath) = required(obj, path, "components")?;
            let items = array(v, &cpath)?;
            if items.is_empty() {
                return Err(schema(&cpath, "at least one component is required"));
            }
            let mut components = Vec::with_capacity(items.len());
            let mut emissions = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let p = format!("{cpath}[{i}]");
                let c = object(item, &p)?;
                check_keys(c, &p, COMPONENT_KEYS, "a component")?;
                let chain = chain_section(c, &p)?;
                emissions.push(emission_section(c, &p, chain.states(), &observations)?);
                components.push(chain);
            }
            AnyModel::Factorial(
                FactorialHmmModel::new(components, emissions).map_err(|e| model_err(&cpath, e))?,
            )
        }
        other => {
            return Err(schema(
                "$.kind",
                format!("unknown kind `{other}`, expected markov, hmm or fhmm"),
            ));
        }
    };
    Ok(ModelDocument {
        name,
        description,
        model,
    })
}

#[derive(Serialize)]
struct ComponentOut<'a> {
    states: &'a [String],
    initial: &'a [f64],
    transition: Vec<Vec<f64>>,
    emission: Vec<Vec<f64>>,
}

#[derive(Serialize)]
struct DocumentOut<'a> {
    kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    observations: Option<&'a [String]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    initial: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transition: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    emission: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    components: Option<Vec<ComponentOut<'a>>>,
}

fn fill_chain<'a>(out: &mut DocumentOut<'a>, chain: &'a MarkovChainModel) {
    out.states = Some(chain.states().labels());
    out.initial = Some(chain.initial().entries());
    out.transition = Some(chain.transition().to_rows());
}

/// Canonical JSON for a model document: fixed key order, shortest
/// round-trip decimals.
pub fn serialize_model(doc: &ModelDocument) -> String {
    let mut out = DocumentOut {
        kind: doc.model.kind().as_str(),
        name: doc.name.as_deref(),
        description: doc.description.as_deref(),
        states: None,
        observations: None,
        initial: None,
        transition: None,
        emission: None,
        components: None,
    };
    match &doc.model {
        AnyModel::Markov(m) => fill_chain(&mut out, m),
        AnyModel::Hmm(h) => {
            fill_chain(&mut out, h.chain());
            out.observations = Some(h.observations().labels());
            out.emission = Some(h.emission().to_rows());
        }
        AnyModel::Factorial(f) => {
            out.observations = Some(f.observations().labels());
            out.components = Some(
                f.components()
                    .iter()
                    .zip(f.emissions())
                    .map(|(c, b)| ComponentOut {
                        states: c.states().labels(),
                        initial: c.initial().entries(),
                        transition: c.transition().to_rows(),
                        emission: b.to_rows(),
                    })
                    .collect(),
            );
        }
    }
    let mut text = serde_json::to_string_pretty(&out).expect("document serializes");
    text.push('\n');
    text
}

/// Graph source for [`export_dot`].
#[derive(Debug, Clone, Copy)]
pub enum DotSource<'a> {
    Markov(&'a MarkovChainModel),
    Hmm(&'a HmmModel),
}

impl<'a> From<&'a MarkovChainModel> for DotSource<'a> {
    fn from(m: &'a MarkovChainModel) -> Self {
        Self::Markov(m)
    }
}

impl<'a> From<&'a HmmModel> for DotSource<'a> {
    fn from(m: &'a HmmModel) -> Self {
        Self::Hmm(m)
    }
}

/// The model unrolled over `horizon` time slices as a DOT digraph: hidden
/// nodes `q_1 .. q_T` chained in time and, for an HMM, one observed node
/// `x_t` hanging off each `q_t`.
pub fn export_dot<'a>(
    model: impl Into<DotSource<'a>>,
    horizon: usize,
) -> Result<String, ModelError> {
    if horizon == 0 {
        return Err(ModelError::InvalidTime(0));
    }
    let (states, observations, name) = match model.into() {
        DotSource::Markov(m) => (m.states(), None, "vmm"),
        DotSource::Hmm(h) => (h.states(), Some(h.observations()), "hmm"),
    };
    let mut out = String::new();
    let _ = writeln!(out, "digraph {name} {{");
    out.push_str("  rankdir=LR;\n");
    let _ = writeln!(out, "  // q_t ranges over: {}", states.labels().join(", "));
    if let Some(o) = observations {
        let _ = writeln!(out, "  // x_t ranges over: {}", o.labels().join(", "));
    }
    for t in 1..=horizon {
        let _ = writeln!(out, "  q_{t} [label=\"q_{t}\", shape=circle];");
    }
    if observations.is_some() {
        for t in 1..=horizon {
            let _ = writeln!(
                out,
                "  x_{t} [label=\"x_{t}\", shape=circle, style=filled, fillcolor=lightgrey];"
            );
        }
    }
    for t in 1..horizon {
        let _ = writeln!(out, "  q_{t} -> q_{};", t + 1);
    }
    if observations.is_some() {
        for t in 1..=horizon {
            let _ = writeln!(out, "  q_{t} -> x_{t};");
        }
    }
    out.push_str("}\n");
    Ok(out)
}

/// Fixed 9-decimal rendering for probabilities and distribution entries.
pub fn format_prob(value: f64) -> String {
    format!("{value:.9}")
}

/// Scientific rendering for scalar likelihoods, e.g. `2.688000000e-2`.
pub fn format_scalar(value: f64) -> String {
    format!("{value:.9e}")
}

/// One line per time step:
/// `t | delta per state | psi per state` with `-` for the empty ψ at t = 1.
pub fn dump_trellis(trellis: &ViterbiTrellis) -> String {
    let space = trellis.best_path().space();
    let labels = space.labels().join(", ");
    let kind = if trellis.is_log_space() {
        "log-delta"
    } else {
        "delta"
    };
    let mut out = format!("t | {kind}: {labels} | psi: {labels}\n");
    for (t, (delta, psi)) in trellis.delta().iter().zip(trellis.psi()).enumerate() {
        let d: Vec<String> = delta.iter().map(|&v| format_prob(v)).collect();
        let p: Vec<&str> = psi
            .iter()
            .map(|s| match s {
                Some(i) => space.labels()[*i].as_str(),
                None => "-",
            })
            .collect();
        let _ = writeln!(out, "{} | {} | {}", t + 1, d.join(", "), p.join(", "));
    }
    out
}
