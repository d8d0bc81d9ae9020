//! Factorial HMM: independent component chains sharing one observation
//! stream, with the emission taken as the literal product of per-component
//! emission probabilities. That product is not renormalized over the
//! observations.

use crate::enumerate::{check_cap, for_each_sequence, ENUMERATION_CAP};
use crate::error::{ModelError, Result};
use crate::evolution::path_weight;
use crate::model::{
    HmmModel, LabelSpace, MarkovChainModel, ObsSequence, ProbVector, StateSequence,
    StochasticMatrix,
};

#[derive(Debug, Clone, PartialEq)]
pub struct FactorialHmmModel {
    components: Vec<MarkovChainModel>,
    emissions: Vec<StochasticMatrix>,
}

impl FactorialHmmModel {
    pub fn new(
        components: Vec<MarkovChainModel>,
        emissions: Vec<StochasticMatrix>,
    ) -> Result<Self> {
        if components.is_empty() {
            return Err(ModelError::ShapeMismatch(
                "a factorial model needs at least one component".into(),
            ));
        }
        if components.len() != emissions.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "{} components but {} emission matrices",
                components.len(),
                emissions.len()
            )));
        }
        for (c, b) in components.iter().zip(&emissions) {
            if b.rows() != c.states() {
                return Err(ModelError::SpaceMismatch(
                    "emission rows are not the component states",
                ));
            }
            if b.cols() != emissions[0].cols() {
                return Err(ModelError::SpaceMismatch(
                    "components disagree on the observation space",
                ));
            }
        }
        Ok(Self {
            components,
            emissions,
        })
    }

    pub fn components(&self) -> &[MarkovChainModel] {
        &self.components
    }

    pub fn emissions(&self) -> &[StochasticMatrix] {
        &self.emissions
    }

    pub fn observations(&self) -> &LabelSpace {
        self.emissions[0].cols()
    }

    /// Number of joint hidden states, `∏_i N_i` (saturating).
    pub fn joint_state_count(&self) -> usize {
        self.components
            .iter()
            .fold(1usize, |acc, c| acc.saturating_mul(c.states().len()))
    }

    /// The equivalent flat HMM over the Cartesian product of component
    /// states, component 0 varying slowest. Joint state labels join the
    /// component labels with `|`.
    ///
    /// The flat emission rows are `∏_i b^i` and generally do not sum to one;
    /// they are the only matrix rows in this crate exempt from the row-sum
    /// check.
    pub fn flatten(&self) -> Result<HmmModel> {
        let total = self.joint_state_count();
        if total as u64 > ENUMERATION_CAP {
            return Err(ModelError::EnumerationTooLarge {
                required: total as u128,
                cap: ENUMERATION_CAP,
            });
        }
        let tuples: Vec<Vec<usize>> = (0..total).map(|k| self.decode_joint(k)).collect();
        let labels = tuples.iter().map(|tuple| {
            tuple
                .iter()
                .zip(&self.components)
                .map(|(&s, c)| c.states().labels()[s].as_str())
                .collect::<Vec<_>>()
                .join("|")
        });
        let space = LabelSpace::new(labels)?;

        let initial = tuples
            .iter()
            .map(|tuple| {
                tuple
                    .iter()
                    .zip(&self.components)
                    .map(|(&s, c)| c.initial().get(s))
                    .product()
            })
            .collect();
        let transition = tuples
            .iter()
            .map(|from| {
                tuples
                    .iter()
                    .map(|to| {
                        self.components
                            .iter()
                            .enumerate()
                            .map(|(i, c)| c.transition().get(from[i], to[i]))
                            .product()
                    })
                    .collect()
            })
            .collect();
        let k = self.observations().len();
        let emission = tuples
            .iter()
            .map(|tuple| {
                (0..k)
                    .map(|mu| {
                        self.emissions
                            .iter()
                            .zip(tuple)
                            .map(|(b, &s)| b.get(s, mu))
                            .product()
                    })
                    .collect()
            })
            .collect();

        let a = StochasticMatrix::new(space.clone(), space.clone(), transition)?;
        let pi = ProbVector::new(space.clone(), initial)?;
        let b = StochasticMatrix::new_unnormalized(space, self.observations().clone(), emission)?;
        HmmModel::new(MarkovChainModel::new(a, pi)?, b)
    }

    // joint index -> per-component state indices, mixed radix
    fn decode_joint(&self, mut k: usize) -> Vec<usize> {
        let mut out = vec![0; self.components.len()];
        for (slot, c) in out.iter_mut().zip(&self.components).rev() {
            let n = c.states().len();
            *slot = k % n;
            k /= n;
        }
        out
    }
}

/// One state sequence per component, all of the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorStateSequence {
    per_component: Vec<StateSequence>,
}

impl VectorStateSequence {
    pub fn new(per_component: Vec<StateSequence>) -> Result<Self> {
        let first = per_component
            .first()
            .ok_or_else(|| ModelError::ShapeMismatch("no component sequences".into()))?;
        if per_component.iter().any(|q| q.len() != first.len()) {
            return Err(ModelError::ShapeMismatch(
                "component sequences differ in length".into(),
            ));
        }
        Ok(Self { per_component })
    }

    pub fn per_component(&self) -> &[StateSequence] {
        &self.per_component
    }

    pub fn len(&self) -> usize {
        self.per_component[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

fn check_vector(model: &FactorialHmmModel, q: &VectorStateSequence) -> Result<()> {
    if q.per_component.len() != model.components.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "{} component sequences for {} components",
            q.per_component.len(),
            model.components.len()
        )));
    }
    for (seq, c) in q.per_component.iter().zip(&model.components) {
        if seq.space() != c.states() {
            return Err(ModelError::ShapeMismatch(
                "component sequence is not over its component states".into(),
            ));
        }
    }
    Ok(())
}

/// `∏_i P(Q^i | λ^i)` over independent components.
pub fn fhmm_state_jpd(model: &FactorialHmmModel, q: &VectorStateSequence) -> Result<f64> {
    check_vector(model, q)?;
    Ok(model
        .components
        .iter()
        .zip(&q.per_component)
        .map(|(c, seq)| path_weight(c, seq.indices()))
        .product())
}

/// `∏_i ∏_t b^i_{q^i_t, y_t}`.
pub fn fhmm_emission_likelihood(
    model: &FactorialHmmModel,
    y: &ObsSequence,
    q: &VectorStateSequence,
) -> Result<f64> {
    check_vector(model, q)?;
    if y.space() != model.observations() {
        return Err(ModelError::ShapeMismatch(
            "observation sequence is not over the model observations".into(),
        ));
    }
    if y.len() != q.len() {
        return Err(ModelError::ShapeMismatch(format!(
            "observation length {} differs from state length {}",
            y.len(),
            q.len()
        )));
    }
    Ok(model
        .emissions
        .iter()
        .zip(&q.per_component)
        .map(|(b, seq)| {
            seq.indices()
                .iter()
                .zip(y.indices())
                .fold(1.0, |w, (&s, &mu)| w * b.get(s, mu))
        })
        .product())
}

/// `P(Y | λ)` summed over every vector state sequence.
pub fn fhmm_sequence_likelihood(model: &FactorialHmmModel, y: &ObsSequence) -> Result<f64> {
    if y.space() != model.observations() {
        return Err(ModelError::ShapeMismatch(
            "observation sequence is not over the model observations".into(),
        ));
    }
    let joint = model.joint_state_count();
    check_cap(joint, y.len())?;
    let len = y.len();
    let m = model.components.len();
    let mut paths = vec![vec![0usize; len]; m];
    let mut total = 0.0;
    for_each_sequence(joint, len, |seq| {
        for (t, &k) in seq.iter().enumerate() {
            for (i, s) in model.decode_joint(k).into_iter().enumerate() {
                paths[i][t] = s;
            }
        }
        let per_component: Vec<StateSequence> = paths
            .iter()
            .zip(&model.components)
            .map(|(p, c)| StateSequence::from_raw(c.states().clone(), p.clone()))
            .collect();
        let q = VectorStateSequence { per_component };
        let emission = fhmm_emission_likelihood(model, y, &q).expect("shapes checked");
        let states = fhmm_state_jpd(model, &q).expect("shapes checked");
        total += emission * states;
    });
    Ok(total)
}
