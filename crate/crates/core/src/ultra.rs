//! Finite ultrametric triples `(E, w, d)` with integer weights and distances.
//!
//! Labels are kept in increasing order, so element indices agree with label
//! order and "least label" is simply "least index".

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UltraError {
    #[error("distance matrix has {rows} rows but there are {labels} labels")]
    RowCount { rows: usize, labels: usize },
    #[error("row {row} of the distance matrix has {len} entries, expected {expected}")]
    RowLength { row: usize, len: usize, expected: usize },
    #[error("duplicate label {0}")]
    DuplicateLabel(Label),
    #[error("no weight given for label {0}")]
    MissingWeight(Label),
    #[error("weight given for unknown label {0:?}")]
    UnknownWeightKey(String),
    #[error("weights has {weights} entries but there are {labels} labels")]
    WeightCount { weights: usize, labels: usize },
    #[error("asymmetric distances: d({a},{b}) = {ab} but d({b},{a}) = {ba}")]
    Asymmetric { a: Label, b: Label, ab: i64, ba: i64 },
    #[error("ultrametric inequality fails: d({a},{b}) > max(d({a},{c}), d({b},{c}))")]
    UltrametricViolation { a: Label, b: Label, c: Label },
    #[error("unknown label {0}")]
    UnknownLabel(Label),
    #[error("ball partition needs at least two elements")]
    TooSmall,
    #[error("perimeter overflows 64 bits")]
    Overflow,
}

/// Result of a clique test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CliqueKind {
    /// Sets of size at most one are `α`-cliques for every `α`.
    AnyAlpha,
    Alpha(i64),
}

/// The partition of `E` into open balls of radius `α_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BallPartition {
    pub alpha: i64,
    /// Blocks in increasing order of their least label; each block sorted.
    pub blocks: Vec<Vec<Label>>,
    /// Least label of each block.
    pub representatives: Vec<Label>,
}

/// JSON form: `{"labels": [...], "weights": {label: int}, "distances": [[int]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTriple {
    pub labels: Vec<Label>,
    pub weights: BTreeMap<String, i64>,
    pub distances: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltraTriple {
    labels: Vec<Label>,
    weights: Vec<i64>,
    /// Full symmetric matrix, zero diagonal.
    dist: Vec<Vec<i64>>,
    index: HashMap<Label, usize>,
}

impl UltraTriple {
    /// Validates and builds a triple. The matrix must be `n × n`; its
    /// diagonal is ignored.
    pub fn new(labels: Vec<Label>, weights: Vec<i64>, distances: Vec<Vec<i64>>) -> Result<Self, UltraError> {
        let n = labels.len();
        if weights.len() != n {
            return Err(UltraError::WeightCount {
                weights: weights.len(),
                labels: n,
            });
        }
        if distances.len() != n {
            return Err(UltraError::RowCount {
                rows: distances.len(),
                labels: n,
            });
        }
        for (row, r) in distances.iter().enumerate() {
            if r.len() != n {
                return Err(UltraError::RowLength {
                    row,
                    len: r.len(),
                    expected: n,
                });
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        for w in order.windows(2) {
            if labels[w[0]] == labels[w[1]] {
                return Err(UltraError::DuplicateLabel(labels[w[0]].clone()));
            }
        }
        let sorted_labels: Vec<Label> = order.iter().map(|&i| labels[i].clone()).collect();
        for (a, &ia) in order.iter().enumerate() {
            for &ib in &order[a + 1..] {
                if distances[ia][ib] != distances[ib][ia] {
                    return Err(UltraError::Asymmetric {
                        a: labels[ia].clone(),
                        b: labels[ib].clone(),
                        ab: distances[ia][ib],
                        ba: distances[ib][ia],
                    });
                }
            }
        }
        let dist: Vec<Vec<i64>> = (0..n)
            .map(|a| {
                (0..n)
                    .map(|b| if a == b { 0 } else { distances[order[a]][order[b]] })
                    .collect()
            })
            .collect();
        for a in 0..n {
            for b in a + 1..n {
                for c in 0..n {
                    if c == a || c == b {
                        continue;
                    }
                    if dist[a][b] > dist[a][c].max(dist[b][c]) {
                        return Err(UltraError::UltrametricViolation {
                            a: sorted_labels[a].clone(),
                            b: sorted_labels[b].clone(),
                            c: sorted_labels[c].clone(),
                        });
                    }
                }
            }
        }
        let weights = order.iter().map(|&i| weights[i]).collect();
        let index = sorted_labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(UltraTriple {
            labels: sorted_labels,
            weights,
            dist,
            index,
        })
    }

    /// Builds a triple from weight and distance functions.
    pub fn from_fn(
        labels: Vec<Label>,
        weight: impl Fn(&Label) -> i64,
        distance: impl Fn(&Label, &Label) -> i64,
    ) -> Result<Self, UltraError> {
        let weights = labels.iter().map(&weight).collect();
        let distances = labels
            .iter()
            .map(|a| labels.iter().map(|b| if a == b { 0 } else { distance(a, b) }).collect())
            .collect();
        Self::new(labels, weights, distances)
    }

    pub fn from_raw(raw: &RawTriple) -> Result<Self, UltraError> {
        let known: BTreeSet<String> = raw.labels.iter().map(Label::key).collect();
        if let Some(k) = raw.weights.keys().find(|k| !known.contains(*k)) {
            return Err(UltraError::UnknownWeightKey(k.clone()));
        }
        let weights = raw
            .labels
            .iter()
            .map(|l| {
                raw.weights
                    .get(&l.key())
                    .copied()
                    .ok_or_else(|| UltraError::MissingWeight(l.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(raw.labels.clone(), weights, raw.distances.clone())
    }

    pub fn to_raw(&self) -> RawTriple {
        RawTriple {
            labels: self.labels.clone(),
            weights: self
                .labels
                .iter()
                .zip(&self.weights)
                .map(|(l, w)| (l.key(), *w))
                .collect(),
            distances: self.dist.clone(),
        }
    }

    /// The triple on `S ⊆ Z` with `d(a,b) = 0` if `a ≡ b (mod m)` and `1`
    /// otherwise. For `m = 0` congruence is equality.
    pub fn mod_m(set: &[i64], m: i64, weight: impl Fn(i64) -> i64) -> Result<Self, UltraError> {
        let congruent = |a: i64, b: i64| {
            if m == 0 {
                a == b
            } else {
                (a - b).rem_euclid(m.abs()) == 0
            }
        };
        let labels = set.iter().map(|&v| Label::Int(v)).collect();
        let value = |l: &Label| match l {
            Label::Int(v) => *v,
            Label::Name(_) => unreachable!(),
        };
        Self::from_fn(
            labels,
            |l| weight(value(l)),
            |a, b| i64::from(!congruent(value(a), value(b))),
        )
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Labels in increasing order.
    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn weight_idx(&self, i: usize) -> i64 {
        self.weights[i]
    }

    /// Distance between elements `i != j`; zero on the diagonal.
    pub fn dist_idx(&self, i: usize, j: usize) -> i64 {
        self.dist[i][j]
    }

    pub fn index_of(&self, l: &Label) -> Result<usize, UltraError> {
        self.index
            .get(l)
            .copied()
            .ok_or_else(|| UltraError::UnknownLabel(l.clone()))
    }

    pub fn weight(&self, l: &Label) -> Result<i64, UltraError> {
        Ok(self.weights[self.index_of(l)?])
    }

    pub fn distance(&self, a: &Label, b: &Label) -> Result<i64, UltraError> {
        Ok(self.dist[self.index_of(a)?][self.index_of(b)?])
    }

    /// Indices of a label set; rejects unknown and repeated labels.
    pub fn indices(&self, set: &[Label]) -> Result<Vec<usize>, UltraError> {
        let mut out = Vec::with_capacity(set.len());
        let mut seen = BTreeSet::new();
        for l in set {
            let i = self.index_of(l)?;
            if !seen.insert(i) {
                return Err(UltraError::DuplicateLabel(l.clone()));
            }
            out.push(i);
        }
        Ok(out)
    }

    pub fn labels_of(&self, idx: &[usize]) -> Vec<Label> {
        let mut v: Vec<usize> = idx.to_vec();
        v.sort_unstable();
        v.into_iter().map(|i| self.labels[i].clone()).collect()
    }

    pub fn is_constant_weight(&self) -> bool {
        self.weights.windows(2).all(|w| w[0] == w[1])
    }

    pub fn perimeter(&self, set: &[Label]) -> Result<i64, UltraError> {
        let idx = self.indices(set)?;
        self.perimeter_idx(&idx)
    }

    /// `Σ w(a) + Σ_{pairs} d(a,b)` over distinct indices.
    pub fn perimeter_idx(&self, idx: &[usize]) -> Result<i64, UltraError> {
        let mut total: i128 = idx.iter().map(|&i| i128::from(self.weights[i])).sum();
        for (k, &a) in idx.iter().enumerate() {
            for &b in &idx[k + 1..] {
                total += i128::from(self.dist[a][b]);
            }
        }
        i64::try_from(total).map_err(|_| UltraError::Overflow)
    }

    /// The open ball `{f : f = e or d(f,e) < α}`, sorted.
    pub fn open_ball(&self, alpha: i64, e: &Label) -> Result<Vec<Label>, UltraError> {
        let c = self.index_of(e)?;
        Ok(self.labels_of(&self.ball_idx(alpha, c, false)))
    }

    /// The closed ball `{f : f = e or d(f,e) <= α}`, sorted.
    pub fn closed_ball(&self, alpha: i64, e: &Label) -> Result<Vec<Label>, UltraError> {
        let c = self.index_of(e)?;
        Ok(self.labels_of(&self.ball_idx(alpha, c, true)))
    }

    pub fn ball_idx(&self, alpha: i64, center: usize, closed: bool) -> Vec<usize> {
        (0..self.len())
            .filter(|&f| {
                f == center || {
                    let d = self.dist[f][center];
                    if closed {
                        d <= alpha
                    } else {
                        d < alpha
                    }
                }
            })
            .collect()
    }

    pub fn is_clique(&self, set: &[Label]) -> Result<Option<CliqueKind>, UltraError> {
        let idx = self.indices(set)?;
        Ok(self.clique_kind_idx(&idx))
    }

    pub fn clique_kind_idx(&self, idx: &[usize]) -> Option<CliqueKind> {
        if idx.len() <= 1 {
            return Some(CliqueKind::AnyAlpha);
        }
        let alpha = self.dist[idx[0]][idx[1]];
        let all_equal = idx
            .iter()
            .enumerate()
            .all(|(k, &a)| idx[k + 1..].iter().all(|&b| self.dist[a][b] == alpha));
        all_equal.then_some(CliqueKind::Alpha(alpha))
    }

    /// Largest pairwise distance, if `|E| >= 2`.
    pub fn max_distance(&self) -> Option<i64> {
        self.max_distance_idx(&(0..self.len()).collect::<Vec<_>>())
    }

    pub fn max_distance_idx(&self, idx: &[usize]) -> Option<i64> {
        idx.iter()
            .enumerate()
            .flat_map(|(k, &a)| idx[k + 1..].iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.dist[a][b])
            .max()
    }

    /// The set of values `d(E ×ᵤ E)`.
    pub fn distance_values(&self) -> BTreeSet<i64> {
        let n = self.len();
        (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .map(|(a, b)| self.dist[a][b])
            .collect()
    }

    /// Classes of `a = b or d(a,b) < α` inside `idx`, with `α` the largest
    /// distance there. Blocks are sorted and ordered by least index.
    pub fn ball_partition_idx(&self, idx: &[usize]) -> Option<(i64, Vec<Vec<usize>>)> {
        let alpha = self.max_distance_idx(idx)?;
        let mut sorted = idx.to_vec();
        sorted.sort_unstable();
        let mut blocks: Vec<Vec<usize>> = Vec::new();
        for &e in &sorted {
            match blocks.iter_mut().find(|b| self.dist[b[0]][e] < alpha) {
                Some(b) => b.push(e),
                None => blocks.push(vec![e]),
            }
        }
        Some((alpha, blocks))
    }

    pub fn ball_partition(&self) -> Result<BallPartition, UltraError> {
        let all: Vec<usize> = (0..self.len()).collect();
        let (alpha, blocks) = self.ball_partition_idx(&all).ok_or(UltraError::TooSmall)?;
        let blocks: Vec<Vec<Label>> = blocks.iter().map(|b| self.labels_of(b)).collect();
        let representatives = blocks.iter().map(|b| b[0].clone()).collect();
        Ok(BallPartition {
            alpha,
            blocks,
            representatives,
        })
    }

    /// Maximum clique size, via `mcs = max(m, mcs(E_1), ..., mcs(E_m))`.
    pub fn mcs(&self) -> usize {
        self.mcs_idx(&(0..self.len()).collect::<Vec<_>>())
    }

    pub fn mcs_idx(&self, idx: &[usize]) -> usize {
        match self.ball_partition_idx(idx) {
            None => idx.len(),
            Some((_, blocks)) => blocks.iter().map(|b| self.mcs_idx(b)).fold(blocks.len(), usize::max),
        }
    }

    /// A clique of maximum size. At each level the least-label transversal
    /// of the ball partition is a candidate; ties keep the outer one.
    pub fn max_clique(&self) -> Vec<Label> {
        let idx = self.max_clique_idx(&(0..self.len()).collect::<Vec<_>>());
        self.labels_of(&idx)
    }

    fn max_clique_idx(&self, idx: &[usize]) -> Vec<usize> {
        match self.ball_partition_idx(idx) {
            None => idx.to_vec(),
            Some((_, blocks)) => {
                let mut best: Vec<usize> = blocks.iter().map(|b| b[0]).collect();
                for b in &blocks {
                    let inner = self.max_clique_idx(b);
                    if inner.len() > best.len() {
                        best = inner;
                    }
                }
                best
            }
        }
    }

    /// The triple restricted to a subset of its ground set.
    pub fn restrict(&self, set: &[Label]) -> Result<UltraTriple, UltraError> {
        let idx = self.indices(set)?;
        Ok(self.restrict_idx(&idx))
    }

    pub fn restrict_idx(&self, idx: &[usize]) -> UltraTriple {
        let mut idx = idx.to_vec();
        idx.sort_unstable();
        let labels: Vec<Label> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let weights = idx.iter().map(|&i| self.weights[i]).collect();
        let dist = idx
            .iter()
            .map(|&a| idx.iter().map(|&b| self.dist[a][b]).collect())
            .collect();
        let index = labels.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        UltraTriple {
            labels,
            weights,
            dist,
            index,
        }
    }

    /// The image triple under a relabelling `f`; `f` must be a bijection
    /// from this ground set onto its image.
    pub fn relabel(&self, f: &BTreeMap<Label, Label>) -> Result<UltraTriple, UltraError> {
        let mut images = Vec::with_capacity(self.len());
        for l in &self.labels {
            images.push(f.get(l).cloned().ok_or_else(|| UltraError::UnknownLabel(l.clone()))?);
        }
        Self::new(images, self.weights.clone(), self.dist.clone())
    }

    /// Same distances, every weight replaced by `w`.
    pub fn with_constant_weight(&self, w: i64) -> UltraTriple {
        UltraTriple {
            weights: vec![w; self.len()],
            ..self.clone()
        }
    }
}

/// Random triple on labels `0..n` with a hierarchically generated
/// ultrametric: the ground set is split into at least two random blocks at
/// the top distance, and each block is split again at a strictly smaller
/// distance. Distances are drawn from `distances`, weights from `weights`.
pub fn random_hierarchical<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    distances: RangeInclusive<i64>,
    weights: RangeInclusive<i64>,
) -> UltraTriple {
    let mut dist = vec![vec![0i64; n]; n];
    let all: Vec<usize> = (0..n).collect();
    split(rng, &all, *distances.start(), *distances.end(), &mut dist);
    let w = (0..n).map(|_| rng.gen_range(weights.clone())).collect();
    let labels = (0..n as i64).map(Label::Int).collect();
    UltraTriple::new(labels, w, dist).expect("generated distances are ultrametric")
}

fn split<R: Rng + ?Sized>(rng: &mut R, idx: &[usize], lo: i64, hi: i64, dist: &mut [Vec<i64>]) {
    if idx.len() <= 1 {
        return;
    }
    let alpha = rng.gen_range(lo..=hi);
    let blocks: Vec<Vec<usize>> = if alpha == lo {
        idx.iter().map(|&i| vec![i]).collect()
    } else {
        let k = rng.gen_range(2..=idx.len());
        let mut shuffled = idx.to_vec();
        shuffled.shuffle(rng);
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (pos, &i) in shuffled.iter().enumerate() {
            let b = if pos < k { pos } else { rng.gen_range(0..k) };
            blocks[b].push(i);
        }
        blocks
    };
    for (x, bx) in blocks.iter().enumerate() {
        for by in &blocks[x + 1..] {
            for &a in bx {
                for &b in by {
                    dist[a][b] = alpha;
                    dist[b][a] = alpha;
                }
            }
        }
    }
    for b in &blocks {
        split(rng, b, lo, alpha - 1, dist);
    }
}
