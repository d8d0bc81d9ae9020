//! Distribution evolution under the transition matrix, and the weight of a
//! fixed state path.
//!
//! Time is 1-based: `evolve(m, t - 1)` is the distribution of `q_t`, so zero
//! steps returns the initial distribution.

use crate::enumerate::{check_cap, for_each_sequence};
use crate::error::{ModelError, Result};
use crate::model::{MarkovChainModel, ProbVector, StateSequence};

/// Probability mass a chain assigns to one specific state path,
/// `π_{q_1} · a_{q_1,q_2} ⋯ a_{q_{T-1},q_T}`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ChainWeight(f64);

impl ChainWeight {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Distribution after `steps` transitions, by repeated `p · A`.
pub fn evolve(model: &MarkovChainModel, steps: usize) -> ProbVector {
    let a = model.transition();
    let mut p = model.initial().clone();
    for _ in 0..steps {
        p = a
            .push_forward(&p)
            .expect("transition rows are the chain states");
    }
    p
}

pub(crate) fn check_states(model: &MarkovChainModel, q: &StateSequence) -> Result<()> {
    if q.space() != model.states() {
        return Err(ModelError::SpaceMismatch(
            "state sequence is not over the chain states",
        ));
    }
    Ok(())
}

/// Product of transition factors along `path`, starting from `path[0]`.
pub(crate) fn transition_product(model: &MarkovChainModel, path: &[usize]) -> f64 {
    let a = model.transition();
    path.windows(2)
        .fold(1.0, |w, pair| w * a.get(pair[0], pair[1]))
}

/// Initial probability times transition factors, multiplied left to right.
pub(crate) fn path_weight(model: &MarkovChainModel, path: &[usize]) -> f64 {
    let a = model.transition();
    path.windows(2)
        .fold(model.initial().get(path[0]), |w, pair| {
            w * a.get(pair[0], pair[1])
        })
}

pub fn chain_weight(model: &MarkovChainModel, q: &StateSequence) -> Result<ChainWeight> {
    check_states(model, q)?;
    Ok(ChainWeight(path_weight(model, q.indices())))
}

/// Splits the chain weight of `q` at the 1-based time `split_t`.
///
/// Returns `(head, tail)`: `head` is the chain weight of `q_1 .. q_split`,
/// `tail` is the transition product from `q_split` to `q_T`. Their product
/// is the full chain weight.
pub fn chain_weight_compose(
    model: &MarkovChainModel,
    q: &StateSequence,
    split_t: usize,
) -> Result<(f64, f64)> {
    check_states(model, q)?;
    let len = q.len();
    if split_t <= 1 || split_t >= len {
        return Err(ModelError::SplitOutOfRange {
            split: split_t,
            len,
        });
    }
    let path = q.indices();
    let head = path_weight(model, &path[..split_t]);
    let tail = transition_product(model, &path[split_t - 1..]);
    Ok((head, tail))
}

/// Distribution of `q_T` obtained by summing chain weights over every
/// prefix `q_1 .. q_{T-1}`. Agrees with `evolve(model, horizon - 1)`.
pub fn expanded_mef(model: &MarkovChainModel, horizon: usize) -> Result<ProbVector> {
    if horizon == 0 {
        return Err(ModelError::InvalidTime(0));
    }
    let n = model.states().len();
    check_cap(n, horizon - 1)?;
    if horizon == 1 {
        return Ok(model.initial().clone());
    }
    let a = model.transition();
    let mut out = vec![0.0; n];
    for_each_sequence(n, horizon - 1, |prefix| {
        let w = path_weight(model, prefix);
        let last = prefix[prefix.len() - 1];
        for (j, acc) in out.iter_mut().enumerate() {
            *acc += w * a.get(last, j);
        }
    });
    Ok(ProbVector::from_raw(model.states().clone(), out))
}
