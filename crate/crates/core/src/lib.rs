//! Exact inference on discrete, time-homogeneous Markov chains and hidden
//! Markov models.
//!
//! * [`model`]: validated label spaces, probability vectors, stochastic
//!   matrices, and model bundles.
//! * [`evolution`]: distribution evolution and state-path weights.
//! * [`vmm`]: visible Markov model sequence probabilities.
//! * [`inference`]: HMM likelihoods, Bayes reversal and posterior marginals
//!   by exhaustive enumeration.
//! * [`viterbi`]: MAP decoding in probability or log space.
//! * [`factorial`]: factorial HMMs with product-form emissions.
//! * [`io`]: JSON model files, DOT export and trellis rendering.
//! * [`cli`]: the `markov-hmm` command.
//!
//! Enumerating routines refuse to visit more than [`ENUMERATION_CAP`]
//! sequences.
//!
//! ```
//! use markov_hmm::io::{parse_model, AnyModel};
//! use markov_hmm::model::ObsSequence;
//! use markov_hmm::viterbi::viterbi_decode;
//!
//! let doc = parse_model(include_str!("../data/weather-stone.json")).unwrap();
//! let AnyModel::Hmm(hmm) = doc.model else { unreachable!() };
//! let x = ObsSequence::from_labels(hmm.observations().clone(), ["dry", "wet", "wet"]).unwrap();
//! let trellis = viterbi_decode(&hmm, &x, false).unwrap();
//! assert_eq!(trellis.best_path().to_string(), "foggy,rainy,rainy");
//! ```

pub mod cli;
mod enumerate;
pub mod error;
pub mod evolution;
pub mod factorial;
pub mod inference;
pub mod io;
pub mod model;
pub mod viterbi;
pub mod vmm;

pub use enumerate::ENUMERATION_CAP;
pub use error::{ModelError, Result};
pub use evolution::{chain_weight, chain_weight_compose, evolve, expanded_mef, ChainWeight};
pub use factorial::{
    fhmm_emission_likelihood, fhmm_sequence_likelihood, fhmm_state_jpd, FactorialHmmModel,
    VectorStateSequence,
};
pub use inference::{
    bayes_reverse, emission_likelihood, joint_likelihood, map_path_bruteforce,
    observation_distribution, posterior_marginals, sequence_likelihood, PosteriorMarginals,
};
pub use model::{
    HmmModel, LabelSpace, MarkovChainModel, ObsSequence, ProbVector, StateSequence,
    StochasticMatrix, STOCHASTIC_TOLERANCE,
};
pub use viterbi::{viterbi_decode, ViterbiTrellis};
pub use vmm::{conditional_chain, vmm_jpd};
