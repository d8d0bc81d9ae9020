//! Validated building blocks: label spaces, probability vectors, row-stochastic
//! matrices, and the Markov chain / HMM bundles assembled from them.
//!
//! Every constructor checks its invariants up front. Entries are stored
//! exactly as given; nothing is renormalized.

use std::collections::HashMap;
use std::fmt;
use std::marker::PhantomData;
use std::sync::Arc;

use crate::error::{ModelError, Result};

/// Absolute tolerance on `|sum - 1|` for vectors and matrix rows.
pub const STOCHASTIC_TOLERANCE: f64 = 1e-9;

#[derive(Debug)]
struct LabelSpaceInner {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

/// An ordered set of distinct, non-empty labels.
///
/// Cloning is cheap; clones share storage.
#[derive(Debug, Clone)]
pub struct LabelSpace(Arc<LabelSpaceInner>);

impl LabelSpace {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(ModelError::EmptyLabelSpace);
        }
        let mut index = HashMap::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if label.is_empty() {
                return Err(ModelError::EmptyLabel { index: i });
            }
            if index.insert(label.clone(), i).is_some() {
                return Err(ModelError::DuplicateLabel {
                    label: label.clone(),
                });
            }
        }
        Ok(Self(Arc::new(LabelSpaceInner { labels, index })))
    }

    pub fn len(&self) -> usize {
        self.0.labels.len()
    }

    /// Always false; a label space holds at least one label.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> &[String] {
        &self.0.labels
    }

    /// Label at a 0-based index.
    pub fn label(&self, index: usize) -> Option<&str> {
        self.0.labels.get(index).map(String::as_str)
    }

    /// 0-based index of a label.
    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.0
            .index
            .get(label)
            .copied()
            .ok_or_else(|| ModelError::UnknownLabel {
                label: label.to_string(),
            })
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index < self.len() {
            Ok(())
        } else {
            Err(ModelError::IndexOutOfRange {
                index,
                size: self.len(),
            })
        }
    }
}

impl PartialEq for LabelSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.labels == other.0.labels
    }
}

impl Eq for LabelSpace {}

fn check_entry(index: usize, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(ModelError::NonFiniteEntry { index, value });
    }
    if value < 0.0 {
        return Err(ModelError::NegativeEntry { index, value });
    }
    Ok(())
}

/// A probability distribution over a [`LabelSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVector {
    space: LabelSpace,
    entries: Vec<f64>,
}

impl ProbVector {
    pub fn new(space: LabelSpace, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != space.len() {
            return Err(ModelError::LengthMismatch {
                expected: space.len(),
                actual: entries.len(),
            });
        }
        for (i, &p) in entries.iter().enumerate() {
            check_entry(i, p)?;
        }
        let actual_sum: f64 = entries.iter().sum();
        if (actual_sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
            return Err(ModelError::SumNotOne { actual_sum });
        }
        Ok(Self { space, entries })
    }

    /// All mass on a single index.
    pub fn point_mass(space: LabelSpace, index: usize) -> Result<Self> {
        space.check_index(index)?;
        let mut entries = vec![0.0; space.len()];
        entries[index] = 1.0;
        Ok(Self { space, entries })
    }

    pub fn uniform(space: LabelSpace) -> Self {
        let n = space.len();
        Self {
            entries: vec![1.0 / n as f64; n],
            space,
        }
    }

    /// Skips validation. Used for results of operations that preserve
    /// stochasticity up to rounding.
    pub(crate) fn from_raw(space: LabelSpace, entries: Vec<f64>) -> Self {
        debug_assert_eq!(space.len(), entries.len());
        Self { space, entries }
    }

    pub fn space(&self) -> &LabelSpace {
        &self.space
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> f64 {
        self.entries[index]
    }

    /// Probability of the named label.
    pub fn prob(&self, label: &str) -> Result<f64> {
        Ok(self.entries[self.space.index_of(label)?])
    }

    /// Index of the largest entry; ties go to the smallest index.
    pub fn argmax(&self) -> usize {
        argmax(&self.entries)
    }
}

/// Smallest index attaining the maximum. NaN entries are never selected
/// over a real number.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// A row-stochastic matrix mapping one label space onto another.
///
/// Used both for the state transition matrix (states to states) and for
/// the emission matrix (states to observations).
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix {
    rows: LabelSpace,
    cols: LabelSpace,
    // row-major, rows.len() * cols.len()
    entries: Vec<f64>,
}

impl StochasticMatrix {
    pub fn new(rows: LabelSpace, cols: LabelSpace, entries: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::checked_shape(rows, cols, entries)?;
        for i in 0..m.rows.len() {
            let actual_sum: f64 = m.row(i).iter().sum();
            if (actual_sum - 1.0).abs() > STOCHASTIC_TOLERANCE {
                return Err(ModelError::RowSumNotOne { row: i, actual_sum });
            }
        }
        Ok(m)
    }

    /// Shape and sign checks only; row sums are not inspected. Reserved for
    /// the flattened factorial emission, whose rows need not sum to one.
    pub(crate) fn new_unnormalized(
        rows: LabelSpace,
        cols: LabelSpace,
        entries: Vec<Vec<f64>>,
    ) -> Result<Self> {
        Self::checked_shape(rows, cols, entries)
    }

    fn checked_shape(rows: LabelSpace, cols: LabelSpace, entries: Vec<Vec<f64>>) -> Result<Self> {
        if entries.len() != rows.len() {
            return Err(ModelError::ShapeMismatch(format!(
                "expected {} rows, found {}",
                rows.len(),
                entries.len()
            )));
        }
        let mut flat = Vec::with_capacity(rows.len() * cols.len());
        for (i, row) in entries.into_iter().enumerate() {
            if row.len() != cols.len() {
                return Err(ModelError::ShapeMismatch(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    cols.len()
                )));
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() {
                    return Err(ModelError::NonFiniteMatrixEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
                if value < 0.0 {
                    return Err(ModelError::NegativeMatrixEntry {
                        row: i,
                        col: j,
                        value,
                    });
                }
            }
            flat.extend(row);
        }
        Ok(Self {
            rows,
            cols,
            entries: flat,
        })
    }

    pub fn identity(space: LabelSpace) -> Self {
        let n = space.len();
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1.0;
        }
        Self {
            rows: space.clone(),
            cols: space,
            entries,
        }
    }

    pub fn rows(&self) -> &LabelSpace {
        &self.rows
    }

    pub fn cols(&self) -> &LabelSpace {
        &self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.cols.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.cols.len();
        &self.entries[row * n..(row + 1) * n]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows.len()).map(|i| self.row(i).to_vec()).collect()
    }

    /// `p · M`: each row weighted by the matching entry of `p`, summed.
    pub fn push_forward(&self, p: &ProbVector) -> Result<ProbVector> {
        if p.space() != &self.rows {
            return Err(ModelError::SpaceMismatch(
                "vector space differs from matrix rows",
            ));
        }
        let mut out = vec![0.0; self.cols.len()];
        for (i, &w) in p.entries().iter().enumerate() {
            for (acc, &m) in out.iter_mut().zip(self.row(i)) {
                *acc += w * m;
            }
        }
        Ok(ProbVector::from_raw(self.cols.clone(), out))
    }
}

/// A time-homogeneous Markov chain: states, transition matrix and initial
/// distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChainModel {
    transition: StochasticMatrix,
    initial: ProbVector,
}

impl MarkovChainModel {
    pub fn new(transition: StochasticMatrix, initial: ProbVector) -> Result<Self> {
        if transition.rows() != transition.cols() {
            return Err(ModelError::SpaceMismatch(
                "transition matrix must be square over the states",
            ));
        }
        if initial.space() != transition.rows() {
            return Err(ModelError::SpaceMismatch(
                "initial distribution is not over the states",
            ));
        }
        Ok(Self {
            transition,
            initial,
        })
    }

    pub fn states(&self) -> &LabelSpace {
        self.transition.rows()
    }

    pub fn transition(&self) -> &StochasticMatrix {
        &self.transition
    }

    pub fn initial(&self) -> &ProbVector {
        &self.initial
    }

    /// Same transitions, different starting distribution.
    pub fn with_initial(&self, initial: ProbVector) -> Result<Self> {
        Self::new(self.transition.clone(), initial)
    }
}

/// A hidden Markov model `{A, B, π}` with labeled states and observations.
#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    chain: MarkovChainModel,
    emission: StochasticMatrix,
}

impl HmmModel {
    pub fn new(chain: MarkovChainModel, emission: StochasticMatrix) -> Result<Self> {
        if emission.rows() != chain.states() {
            return Err(ModelError::SpaceMismatch(
                "emission rows are not the chain states",
            ));
        }
        Ok(Self { chain, emission })
    }

    pub fn chain(&self) -> &MarkovChainModel {
        &self.chain
    }

    pub fn states(&self) -> &LabelSpace {
        self.chain.states()
    }

    pub fn observations(&self) -> &LabelSpace {
        self.emission.cols()
    }

    pub fn transition(&self) -> &StochasticMatrix {
        self.chain.transition()
    }

    pub fn emission(&self) -> &StochasticMatrix {
        &self.emission
    }

    pub fn initial(&self) -> &ProbVector {
        self.chain.initial()
    }

    pub fn with_initial(&self, initial: ProbVector) -> Result<Self> {
        Self::new(self.chain.with_initial(initial)?, self.emission.clone())
    }
}

/// Marker for sequences of hidden (or visible chain) states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum State {}

/// Marker for sequences of observed values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observation {}

/// A non-empty sequence of indices into a label space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sequence<K> {
    space: LabelSpace,
    indices: Vec<usize>,
    _kind: PhantomData<K>,
}

pub type StateSequence = Sequence<State>;
pub type ObsSequence = Sequence<Observation>;

impl<K> Sequence<K> {
    pub fn from_indices(space: LabelSpace, indices: Vec<usize>) -> Result<Self> {
        if indices.is_empty() {
            return Err(ModelError::EmptySequence);
        }
        for &i in &indices {
            space.check_index(i)?;
        }
        Ok(Self {
            space,
            indices,
            _kind: PhantomData,
        })
    }

    pub fn from_labels<I, S>(space: LabelSpace, labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let indices = labels
            .into_iter()
            .map(|l| space.index_of(l.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Self::from_indices(space, indices)
    }

    pub(crate) fn from_raw(space: LabelSpace, indices: Vec<usize>) -> Self {
        debug_assert!(!indices.is_empty());
        Self {
            space,
            indices,
            _kind: PhantomData,
        }
    }

    pub fn space(&self) -> &LabelSpace {
        &self.space
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    /// Always false; sequences hold at least one element.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.indices
            .iter()
            .map(|&i| self.space.labels()[i].as_str())
    }
}

impl<K> fmt::Display for Sequence<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (t, label) in self.labels().enumerate() {
            if t > 0 {
                f.write_str(",")?;
            }
            f.write_str(label)?;
        }
        Ok(())
    }
}
