//! Visible Markov model queries.

use crate::error::{ModelError, Result};
use crate::evolution::{chain_weight, check_states, transition_product};
use crate::model::{MarkovChainModel, StateSequence};

/// Joint probability of a fully observed state sequence. Same number as
/// [`chain_weight`].
pub fn vmm_jpd(model: &MarkovChainModel, q: &StateSequence) -> Result<f64> {
    Ok(chain_weight(model, q)?.value())
}

/// Probability of visiting `future` next, given the chain currently sits in
/// `given_state`: `a_{given,f_1} · a_{f_1,f_2} ⋯`.
pub fn conditional_chain(
    model: &MarkovChainModel,
    given_state: usize,
    future: &StateSequence,
) -> Result<f64> {
    check_states(model, future)?;
    let n = model.states().len();
    if given_state >= n {
        return Err(ModelError::IndexOutOfRange {
            index: given_state,
            size: n,
        });
    }
    let mut path = Vec::with_capacity(future.len() + 1);
    path.push(given_state);
    path.extend_from_slice(future.indices());
    Ok(transition_product(model, &path))
}
