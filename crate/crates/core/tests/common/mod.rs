//! Random model generation and brute-force oracles written against plain
//! nested vectors, independent of the library's inference code.

#![allow(dead_code)]

use markov_hmm::{HmmModel, LabelSpace, MarkovChainModel, ProbVector, StochasticMatrix};
use proptest::prelude::*;
use rand::Rng;

pub fn data_path(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn space(prefix: &str, n: usize) -> LabelSpace {
    LabelSpace::new((1..=n).map(|i| format!("{prefix}{i}"))).unwrap()
}

/// Rows of positive weights scaled to sum to one.
pub fn normalize_rows(weights: &[f64], cols: usize) -> Vec<Vec<f64>> {
    weights
        .chunks(cols)
        .map(|row| {
            let s: f64 = row.iter().sum();
            row.iter().map(|w| w / s).collect()
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RawHmm {
    pub pi: Vec<f64>,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<Vec<f64>>,
}

impl RawHmm {
    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn k(&self) -> usize {
        self.b[0].len()
    }

    pub fn random<R: Rng>(rng: &mut R, n: usize, k: usize) -> Self {
        let mut draw = |len: usize| {
            (0..len)
                .map(|_| rng.random_range(0.01..1.0))
                .collect::<Vec<f64>>()
        };
        let pi = normalize_rows(&draw(n), n).remove(0);
        let a = normalize_rows(&draw(n * n), n);
        let b = normalize_rows(&draw(n * k), k);
        Self { pi, a, b }
    }

    pub fn chain(&self) -> MarkovChainModel {
        let s = space("s", self.n());
        let a = StochasticMatrix::new(s.clone(), s.clone(), self.a.clone()).unwrap();
        MarkovChainModel::new(a, ProbVector::new(s, self.pi.clone()).unwrap()).unwrap()
    }

    pub fn hmm(&self) -> HmmModel {
        let s = space("s", self.n());
        let b = StochasticMatrix::new(s, space("o", self.k()), self.b.clone()).unwrap();
        HmmModel::new(self.chain(), b).unwrap()
    }
}

pub fn raw_hmm_strategy(max_n: usize, max_k: usize) -> impl Strategy<Value = RawHmm> {
    (1..=max_n, 1..=max_k).prop_flat_map(|(n, k)| {
        (
            prop::collection::vec(0.01f64..1.0, n),
            prop::collection::vec(0.01f64..1.0, n * n),
            prop::collection::vec(0.01f64..1.0, n * k),
        )
            .prop_map(move |(pi, a, b)| RawHmm {
                pi: normalize_rows(&pi, n).remove(0),
                a: normalize_rows(&a, n),
                b: normalize_rows(&b, k),
            })
    })
}

/// Every sequence over `0..radix` of length `len`, lexicographic.
pub fn all_sequences(radix: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..radix).map(move |s| {
                    let mut p = prefix.clone();
                    p.push(s);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn oracle_chain(pi: &[f64], a: &[Vec<f64>], q: &[usize]) -> f64 {
    let mut w = pi[q[0]];
    for t in 1..q.len() {
        w *= a[q[t - 1]][q[t]];
    }
    w
}

pub fn oracle_joint(m: &RawHmm, x: &[usize], q: &[usize]) -> f64 {
    let mut w = m.pi[q[0]] * m.b[q[0]][x[0]];
    for t in 1..q.len() {
        w *= m.a[q[t - 1]][q[t]] * m.b[q[t]][x[t]];
    }
    w
}

pub fn oracle_likelihood(m: &RawHmm, x: &[usize]) -> f64 {
    all_sequences(m.n(), x.len())
        .iter()
        .map(|q| oracle_joint(m, x, q))
        .sum()
}

/// Repeated `p · A` with plain loops.
pub fn oracle_evolve(pi: &[f64], a: &[Vec<f64>], steps: usize) -> Vec<f64> {
    let n = pi.len();
    let mut p = pi.to_vec();
    for _ in 0..steps {
        p = (0..n)
            .map(|j| (0..n).map(|i| p[i] * a[i][j]).sum())
            .collect();
    }
    p
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}
