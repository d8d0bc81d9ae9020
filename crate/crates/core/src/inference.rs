//! Exact HMM queries by explicit enumeration over state sequences.
//!
//! Sums are always accumulated in lexicographic order of the state sequence
//! so results are reproducible bit for bit.

use crate::enumerate::{check_cap, for_each_sequence};
use crate::error::{ModelError, Result};
use crate::evolution::{evolve, path_weight};
use crate::model::{HmmModel, ObsSequence, ProbVector, StateSequence};

/// Per-time posterior state distributions `P(q_t = i | X, λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosteriorMarginals {
    per_time: Vec<ProbVector>,
}

impl PosteriorMarginals {
    pub fn per_time(&self) -> &[ProbVector] {
        &self.per_time
    }

    /// Distribution at 1-based time `t`.
    pub fn at(&self, t: usize) -> Option<&ProbVector> {
        t.checked_sub(1).and_then(|i| self.per_time.get(i))
    }

    pub fn len(&self) -> usize {
        self.per_time.len()
    }

    pub fn is_empty(&self) -> bool {
        self.per_time.is_empty()
    }

    /// Most probable state at each time, independently.
    pub fn argmax_states(&self) -> Vec<usize> {
        self.per_time.iter().map(ProbVector::argmax).collect()
    }
}

pub(crate) fn check_obs(model: &HmmModel, x: &ObsSequence) -> Result<()> {
    if x.space() != model.observations() {
        return Err(ModelError::SpaceMismatch(
            "observation sequence is not over the model observations",
        ));
    }
    Ok(())
}

fn check_pair(model: &HmmModel, x: &ObsSequence, q: &StateSequence) -> Result<()> {
    check_obs(model, x)?;
    if q.space() != model.states() {
        return Err(ModelError::SpaceMismatch(
            "state sequence is not over the model states",
        ));
    }
    if x.len() != q.len() {
        return Err(ModelError::LengthMismatch {
            expected: q.len(),
            actual: x.len(),
        });
    }
    Ok(())
}

fn emission_product(model: &HmmModel, obs: &[usize], path: &[usize]) -> f64 {
    let b = model.emission();
    path.iter()
        .zip(obs)
        .fold(1.0, |w, (&i, &mu)| w * b.get(i, mu))
}

fn joint_product(model: &HmmModel, obs: &[usize], path: &[usize]) -> f64 {
    emission_product(model, obs, path) * path_weight(model.chain(), path)
}

/// `∏_t b_{q_t, x_t}`: observations are independent given the states.
pub fn emission_likelihood(model: &HmmModel, x: &ObsSequence, q: &StateSequence) -> Result<f64> {
    check_pair(model, x, q)?;
    Ok(emission_product(model, x.indices(), q.indices()))
}

/// `P(X, Q | λ)`, computed as the emission likelihood times the chain weight.
pub fn joint_likelihood(model: &HmmModel, x: &ObsSequence, q: &StateSequence) -> Result<f64> {
    check_pair(model, x, q)?;
    Ok(joint_product(model, x.indices(), q.indices()))
}

/// `P(X | λ)` as the naive sum of the joint over all `N^T` state sequences.
pub fn sequence_likelihood(model: &HmmModel, x: &ObsSequence) -> Result<f64> {
    check_obs(model, x)?;
    let n = model.states().len();
    check_cap(n, x.len())?;
    let obs = x.indices();
    let mut total = 0.0;
    for_each_sequence(n, x.len(), |path| total += joint_product(model, obs, path));
    Ok(total)
}

/// Distribution of the observation at 1-based time `t`, from the state
/// distribution `p^(t)` pushed through the emission matrix.
pub fn observation_distribution(model: &HmmModel, t: usize) -> Result<ProbVector> {
    if t == 0 {
        return Err(ModelError::InvalidTime(0));
    }
    let p = evolve(model.chain(), t - 1);
    model.emission().push_forward(&p)
}

/// Posterior over states after seeing observation `observed` once, starting
/// from `state_prior` (Bayes' rule on a single emission).
pub fn bayes_reverse(
    model: &HmmModel,
    observed: usize,
    state_prior: &ProbVector,
) -> Result<ProbVector> {
    let k = model.observations().len();
    if observed >= k {
        return Err(ModelError::IndexOutOfRange {
            index: observed,
            size: k,
        });
    }
    if state_prior.space() != model.states() {
        return Err(ModelError::SpaceMismatch(
            "prior is not over the model states",
        ));
    }
    let b = model.emission();
    let weighted: Vec<f64> = state_prior
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &p)| b.get(i, observed) * p)
        .collect();
    let evidence: f64 = weighted.iter().sum();
    if evidence <= 0.0 {
        return Err(ModelError::ZeroEvidence);
    }
    Ok(ProbVector::from_raw(
        model.states().clone(),
        weighted.into_iter().map(|w| w / evidence).collect(),
    ))
}

pub fn posterior_marginals(model: &HmmModel, x: &ObsSequence) -> Result<PosteriorMarginals> {
    check_obs(model, x)?;
    let n = model.states().len();
    let len = x.len();
    check_cap(n, len)?;
    let obs = x.indices();
    let mut mass = vec![vec![0.0; n]; len];
    let mut total = 0.0;
    for_each_sequence(n, len, |path| {
        let w = joint_product(model, obs, path);
        total += w;
        for (t, &i) in path.iter().enumerate() {
            mass[t][i] += w;
        }
    });
    if total <= 0.0 {
        return Err(ModelError::ZeroEvidence);
    }
    let per_time = mass
        .into_iter()
        .map(|row| {
            ProbVector::from_raw(
                model.states().clone(),
                row.into_iter().map(|m| m / total).collect(),
            )
        })
        .collect();
    Ok(PosteriorMarginals { per_time })
}

/// Most likely state path by exhaustive search. On ties the
/// lexicographically smallest path wins.
pub fn map_path_bruteforce(model: &HmmModel, x: &ObsSequence) -> Result<(StateSequence, f64)> {
    check_obs(model, x)?;
    let n = model.states().len();
    check_cap(n, x.len())?;
    let obs = x.indices();
    let mut best_path = vec![0; x.len()];
    let mut best = f64::NEG_INFINITY;
    for_each_sequence(n, x.len(), |path| {
        let w = joint_product(model, obs, path);
        if w > best {
            best = w;
            best_path.copy_from_slice(path);
        }
    });
    Ok((
        StateSequence::from_raw(model.states().clone(), best_path),
        best,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LabelSpace, MarkovChainModel, StochasticMatrix};
    use crate::vmm::vmm_jpd;

    fn weather_stone(initial: Option<Vec<f64>>) -> HmmModel {
        let s = LabelSpace::new(["sunny", "rainy", "foggy"]).unwrap();
        let o = LabelSpace::new(["dry", "wet"]).unwrap();
        let a = StochasticMatrix::new(
            s.clone(),
            s.clone(),
            vec![
                vec![0.8, 0.05, 0.15],
                vec![0.2, 0.6, 0.2],
                vec![0.2, 0.3, 0.5],
            ],
        )
        .unwrap();
        let b = StochasticMatrix::new(
            s.clone(),
            o,
            vec![vec![0.9, 0.1], vec![0.2, 0.8], vec![0.7, 0.3]],
        )
        .unwrap();
        let pi = match initial {
            Some(p) => ProbVector::new(s, p).unwrap(),
            None => ProbVector::uniform(s),
        };
        HmmModel::new(MarkovChainModel::new(a, pi).unwrap(), b).unwrap()
    }

    fn obs(m: &HmmModel, labels: &[&str]) -> ObsSequence {
        ObsSequence::from_labels(m.observations().clone(), labels).unwrap()
    }

    fn states(m: &HmmModel, labels: &[&str]) -> StateSequence {
        StateSequence::from_labels(m.states().clone(), labels).unwrap()
    }

    #[test]
    fn emission_products() {
        let m = weather_stone(None);
        let x = obs(&m, &["dry", "wet", "wet"]);
        let q = states(&m, &["foggy", "rainy", "rainy"]);
        assert!((emission_likelihood(&m, &x, &q).unwrap() - 0.448).abs() < 1e-15);
        let got = emission_likelihood(&m, &obs(&m, &["dry"]), &states(&m, &["sunny"])).unwrap();
        assert_eq!(got, 0.9);
        assert!(matches!(
            emission_likelihood(&m, &obs(&m, &["dry"]), &q),
            Err(ModelError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn zero_emission_factor() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["u", "v"]).unwrap();
        let chain = MarkovChainModel::new(
            StochasticMatrix::identity(s.clone()),
            ProbVector::uniform(s.clone()),
        )
        .unwrap();
        let b = StochasticMatrix::new(s.clone(), o.clone(), vec![vec![1.0, 0.0], vec![0.5, 0.5]])
            .unwrap();
        let m = HmmModel::new(chain, b).unwrap();
        let x = ObsSequence::from_indices(o, vec![0, 1]).unwrap();
        let q = StateSequence::from_indices(s, vec![0, 0]).unwrap();
        assert_eq!(emission_likelihood(&m, &x, &q).unwrap(), 0.0);
    }

    #[test]
    fn joint_of_viterbi_winner() {
        let m = weather_stone(None);
        let x = obs(&m, &["dry", "wet", "wet"]);
        let q = states(&m, &["foggy", "rainy", "rainy"]);
        let j = joint_likelihood(&m, &x, &q).unwrap();
        assert!((j - (1.0 / 3.0) * 0.7 * 0.3 * 0.8 * 0.6 * 0.8).abs() < 1e-15);
        assert!((j - 0.02688).abs() < 1e-15);
        assert_eq!(
            j,
            emission_likelihood(&m, &x, &q).unwrap() * vmm_jpd(m.chain(), &q).unwrap()
        );

        let point = weather_stone(Some(vec![1.0, 0.0, 0.0]));
        assert_eq!(joint_likelihood(&point, &x, &q).unwrap(), 0.0);
        let one = joint_likelihood(&point, &obs(&m, &["dry"]), &states(&m, &["sunny"])).unwrap();
        assert_eq!(one, 0.9);
    }

    #[test]
    fn naive_likelihood_golden() {
        let m = weather_stone(None);
        // exact rational enumeration: 3299/40000
        let l = sequence_likelihood(&m, &obs(&m, &["dry", "wet", "wet"])).unwrap();
        assert!((l - 0.082475).abs() < 1e-15);
        let single = sequence_likelihood(&m, &obs(&m, &["dry"])).unwrap();
        assert!((single - 0.6).abs() < 1e-15);
    }

    #[test]
    fn single_observation_value_always_certain() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["only"]).unwrap();
        let a = StochasticMatrix::new(s.clone(), s.clone(), vec![vec![0.3, 0.7], vec![0.6, 0.4]])
            .unwrap();
        let b = StochasticMatrix::new(s.clone(), o.clone(), vec![vec![1.0], vec![1.0]]).unwrap();
        let m =
            HmmModel::new(MarkovChainModel::new(a, ProbVector::uniform(s)).unwrap(), b).unwrap();
        let x = ObsSequence::from_indices(o, vec![0; 5]).unwrap();
        assert!((sequence_likelihood(&m, &x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn observation_distributions() {
        let m = weather_stone(None);
        let d = observation_distribution(&m, 1).unwrap();
        assert!((d.get(0) - 0.6).abs() < 1e-15);
        assert!((d.get(1) - 0.4).abs() < 1e-15);
        let sunny = weather_stone(Some(vec![1.0, 0.0, 0.0]));
        assert_eq!(
            observation_distribution(&sunny, 1).unwrap().entries(),
            &[0.9, 0.1]
        );
        assert_eq!(
            observation_distribution(&m, 0).unwrap_err(),
            ModelError::InvalidTime(0)
        );
    }

    #[test]
    fn deterministic_emission_relabels() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["B", "A"]).unwrap();
        let a = StochasticMatrix::new(s.clone(), s.clone(), vec![vec![0.3, 0.7], vec![0.6, 0.4]])
            .unwrap();
        let b = StochasticMatrix::new(s.clone(), o, vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let pi = ProbVector::new(s, vec![0.25, 0.75]).unwrap();
        let m = HmmModel::new(MarkovChainModel::new(a, pi).unwrap(), b).unwrap();
        for t in 1..5 {
            let p = evolve(m.chain(), t - 1);
            let d = observation_distribution(&m, t).unwrap();
            assert_eq!(d.entries(), &[p.get(1), p.get(0)]);
        }
    }

    #[test]
    fn bayes_reversal() {
        let m = weather_stone(None);
        let post = bayes_reverse(&m, 0, m.initial()).unwrap();
        for (got, want) in post.entries().iter().zip([0.5, 0.2 / 1.8, 0.7 / 1.8]) {
            assert!((got - want).abs() < 1e-15);
        }
        let point = ProbVector::point_mass(m.states().clone(), 1).unwrap();
        assert_eq!(bayes_reverse(&m, 1, &point).unwrap(), point);
    }

    #[test]
    fn bayes_zero_evidence() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["u", "v"]).unwrap();
        let chain = MarkovChainModel::new(
            StochasticMatrix::identity(s.clone()),
            ProbVector::uniform(s.clone()),
        )
        .unwrap();
        let b = StochasticMatrix::new(s.clone(), o, vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let m = HmmModel::new(chain, b).unwrap();
        let prior = ProbVector::point_mass(s, 0).unwrap();
        assert_eq!(
            bayes_reverse(&m, 1, &prior).unwrap_err(),
            ModelError::ZeroEvidence
        );
    }

    #[test]
    fn posterior_golden() {
        let m = weather_stone(None);
        let post = posterior_marginals(&m, &obs(&m, &["dry", "wet", "wet"])).unwrap();
        // exact rational enumeration
        let want = [
            [0.19660503182782663, 0.23983025159139132, 0.5635647165807821],
            [0.06001818732949379, 0.6789936344346772, 0.26098817823582904],
            [0.06608063049408912, 0.749317975143983, 0.18460139436192785],
        ];
        for (row, w) in post.per_time().iter().zip(want) {
            let sum: f64 = row.entries().iter().sum();
            assert!((sum - 1.0).abs() < 1e-12);
            for (a, b) in row.entries().iter().zip(w) {
                assert!((a - b).abs() < 1e-14);
            }
        }
        assert_eq!(post.argmax_states(), vec![2, 1, 1]);
        assert_eq!(post.at(1), Some(&post.per_time()[0]));
        assert_eq!(post.at(0), None);
    }

    #[test]
    fn posterior_single_time_is_bayes() {
        let m = weather_stone(Some(vec![0.5, 0.3, 0.2]));
        for mu in 0..2 {
            let x = ObsSequence::from_indices(m.observations().clone(), vec![mu]).unwrap();
            let post = posterior_marginals(&m, &x).unwrap();
            assert_eq!(
                post.per_time()[0],
                bayes_reverse(&m, mu, m.initial()).unwrap()
            );
        }
    }

    #[test]
    fn posterior_deterministic_model_is_point_masses() {
        let s = LabelSpace::new(["a", "b", "c"]).unwrap();
        let o = LabelSpace::new(["A", "B", "C"]).unwrap();
        let perm = StochasticMatrix::new(
            s.clone(),
            s.clone(),
            vec![
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ],
        )
        .unwrap();
        let b = StochasticMatrix::new(
            s.clone(),
            o.clone(),
            StochasticMatrix::identity(s.clone()).to_rows(),
        )
        .unwrap();
        let chain = MarkovChainModel::new(perm, ProbVector::point_mass(s, 0).unwrap()).unwrap();
        let m = HmmModel::new(chain, b).unwrap();
        let x = ObsSequence::from_indices(o, vec![0, 1, 2, 0]).unwrap();
        let post = posterior_marginals(&m, &x).unwrap();
        for (t, row) in post.per_time().iter().enumerate() {
            assert_eq!(row.entries()[t % 3], 1.0);
            assert_eq!(row.entries().iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn posterior_zero_evidence() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["u", "v"]).unwrap();
        let chain = MarkovChainModel::new(
            StochasticMatrix::identity(s.clone()),
            ProbVector::point_mass(s.clone(), 0).unwrap(),
        )
        .unwrap();
        let b = StochasticMatrix::new(s, o.clone(), vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let m = HmmModel::new(chain, b).unwrap();
        let x = ObsSequence::from_indices(o, vec![0, 1]).unwrap();
        assert_eq!(
            posterior_marginals(&m, &x).unwrap_err(),
            ModelError::ZeroEvidence
        );
    }

    #[test]
    fn brute_force_map() {
        let m = weather_stone(None);
        let (path, value) = map_path_bruteforce(&m, &obs(&m, &["dry", "wet", "wet"])).unwrap();
        assert_eq!(path.to_string(), "foggy,rainy,rainy");
        assert!((value - 0.02688).abs() < 1e-15);
        assert!((value - 0.0269).abs() < 1e-4);

        let (one, v) = map_path_bruteforce(&m, &obs(&m, &["wet"])).unwrap();
        assert_eq!(one.indices(), &[1]);
        assert!((v - 0.8 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn brute_force_tie_break_is_lexicographic() {
        let s = LabelSpace::new(["a", "b"]).unwrap();
        let o = LabelSpace::new(["u", "v"]).unwrap();
        let half = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let a = StochasticMatrix::new(s.clone(), s.clone(), half.clone()).unwrap();
        let b = StochasticMatrix::new(s.clone(), o.clone(), half).unwrap();
        let m =
            HmmModel::new(MarkovChainModel::new(a, ProbVector::uniform(s)).unwrap(), b).unwrap();
        let x = ObsSequence::from_indices(o, vec![1, 0, 1]).unwrap();
        let (path, _) = map_path_bruteforce(&m, &x).unwrap();
        assert_eq!(path.indices(), &[0, 0, 0]);
    }

    #[test]
    fn enumeration_cap_enforced() {
        let m = weather_stone(None);
        let x = ObsSequence::from_indices(m.observations().clone(), vec![0; 13]).unwrap();
        assert!(matches!(
            sequence_likelihood(&m, &x),
            Err(ModelError::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            posterior_marginals(&m, &x),
            Err(ModelError::EnumerationTooLarge { .. })
        ));
        assert!(matches!(
            map_path_bruteforce(&m, &x),
            Err(ModelError::EnumerationTooLarge { .. })
        ));
    }
}
