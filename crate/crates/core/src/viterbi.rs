//! Viterbi decoding: the δ/ψ trellis, termination and backtracking.
//!
//! Both probability-space and natural-log-space recursions are supported.
//! They share the same argmax structure; in log space a zero probability is
//! `-inf` and stays `-inf` through every sum.

use crate::error::{ModelError, Result};
use crate::inference::check_obs;
use crate::model::{argmax, HmmModel, ObsSequence, StateSequence};

/// Full Viterbi trellis, kept for every time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ViterbiTrellis {
    log_space: bool,
    /// `delta[t][j]`, row per time step (0-based t).
    delta: Vec<Vec<f64>>,
    /// `psi[t][j]`; `None` at t = 0, where there is no predecessor.
    psi: Vec<Vec<Option<usize>>>,
    best_value: f64,
    best_path: StateSequence,
}

impl ViterbiTrellis {
    pub fn is_log_space(&self) -> bool {
        self.log_space
    }

    pub fn delta(&self) -> &[Vec<f64>] {
        &self.delta
    }

    pub fn psi(&self) -> &[Vec<Option<usize>>] {
        &self.psi
    }

    /// `max_j delta[T-1][j]`; a log-likelihood when decoded in log space.
    pub fn best_value(&self) -> f64 {
        self.best_value
    }

    /// Likelihood of the best path as a probability, regardless of the
    /// space the trellis was computed in. All-`-inf` log trellises give 0.
    pub fn best_probability(&self) -> f64 {
        if self.log_space {
            self.best_value.exp()
        } else {
            self.best_value
        }
    }

    pub fn best_path(&self) -> &StateSequence {
        &self.best_path
    }

    pub fn len(&self) -> usize {
        self.delta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.delta.is_empty()
    }
}

/// Runs the Viterbi recursion over `x`.
///
/// `delta[0][i] = π_i · b_{i,x_1}`, then
/// `delta[t][j] = max_i(delta[t-1][i] · a_{i,j}) · b_{j,x_t}` with `psi`
/// recording the maximizing `i`. Every argmax, including the final one,
/// resolves ties to the smallest state index.
pub fn viterbi_decode(
    model: &HmmModel,
    x: &ObsSequence,
    log_space: bool,
) -> Result<ViterbiTrellis> {
    check_obs(model, x)?;
    if x.indices().is_empty() {
        return Err(ModelError::EmptyObservationSequence);
    }
    if log_space {
        Ok(decode_with(model, x, true, f64::ln, |a, b| a + b))
    } else {
        Ok(decode_with(model, x, false, |p| p, |a, b| a * b))
    }
}

fn decode_with(
    model: &HmmModel,
    x: &ObsSequence,
    log_space: bool,
    lift: impl Fn(f64) -> f64,
    combine: impl Fn(f64, f64) -> f64,
) -> ViterbiTrellis {
    let n = model.states().len();
    let a = model.transition();
    let b = model.emission();
    let pi = model.initial();
    let obs = x.indices();

    let mut delta: Vec<Vec<f64>> = Vec::with_capacity(obs.len());
    let mut psi: Vec<Vec<Option<usize>>> = Vec::with_capacity(obs.len());

    delta.push(
        (0..n)
            .map(|i| combine(lift(pi.get(i)), lift(b.get(i, obs[0]))))
            .collect(),
    );
    psi.push(vec![None; n]);

    let mut scores = vec![0.0; n];
    for &mu in &obs[1..] {
        let prev = &delta[delta.len() - 1];
        let mut row = Vec::with_capacity(n);
        let mut back = Vec::with_capacity(n);
        for j in 0..n {
            for (i, s) in scores.iter_mut().enumerate() {
                *s = combine(prev[i], lift(a.get(i, j)));
            }
            let best = argmax(&scores);
            row.push(combine(scores[best], lift(b.get(j, mu))));
            back.push(Some(best));
        }
        delta.push(row);
        psi.push(back);
    }

    let last = &delta[delta.len() - 1];
    let final_state = argmax(last);
    let best_value = last[final_state];

    let mut path = vec![final_state; obs.len()];
    for t in (0..obs.len() - 1).rev() {
        path[t] = psi[t + 1][path[t + 1]].expect("psi is set for t >= 1");
    }

    ViterbiTrellis {
        log_space,
        delta,
        psi,
        best_value,
        best_path: StateSequence::from_raw(model.states().clone(), path),
    }
}
