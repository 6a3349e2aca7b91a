//! Independent oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ultragreedoid::field::FieldSpec;
use ultragreedoid::group_algebra::GroupAlgebraElement;
use ultragreedoid::ring::{det_expansion, Matrix};
use ultragreedoid::ultra::{random_hierarchical, UltraTriple};
use ultragreedoid::{FieldElement, Label, SetSystem, VectorFamily};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gf(q: u64) -> FieldSpec {
    FieldSpec::of_order(q).unwrap()
}

/// Triples with `|E|` in `0..=max_n`, distances in `[-2, 6]`, weights in
/// `[-5, 5]`.
pub fn random_triple(rng: &mut ChaCha8Rng, max_n: usize) -> UltraTriple {
    let n = rng.gen_range(0..=max_n);
    random_hierarchical(rng, n, -2..=6, -5..=5)
}

pub fn random_constant_weight_triple(rng: &mut ChaCha8Rng, max_n: usize) -> UltraTriple {
    let w = rng.gen_range(-5..=5);
    random_triple(rng, max_n).with_constant_weight(w)
}

pub fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u32..1 << n).map(move |m| (0..n).filter(|b| m >> b & 1 == 1).collect())
}

/// Perimeter straight from the definition, on labels.
pub fn perimeter_oracle(t: &UltraTriple, set: &[Label]) -> i64 {
    let mut total = 0;
    for (x, a) in set.iter().enumerate() {
        total += t.weight(a).unwrap();
        for b in &set[x + 1..] {
            total += t.distance(a, b).unwrap();
        }
    }
    total
}

/// Bhargava greedoid from the definition: sort subsets by size and keep
/// those attaining each size's maximum.
pub fn bhargava_oracle(t: &UltraTriple) -> SetSystem {
    let labels = t.labels();
    let all: Vec<(Vec<Label>, i64)> = subsets(t.len())
        .map(|s| {
            let ls: Vec<Label> = s.iter().map(|&i| labels[i].clone()).collect();
            let p = perimeter_oracle(t, &ls);
            (ls, p)
        })
        .collect();
    let best = |k: usize| all.iter().filter(|(s, _)| s.len() == k).map(|(_, p)| *p).max().unwrap();
    let members = all
        .iter()
        .filter(|(s, p)| *p == best(s.len()))
        .map(|(s, _)| s.clone())
        .collect();
    SetSystem::new(labels.to_vec(), members).unwrap()
}

pub fn max_perimeter_oracle(t: &UltraTriple, k: usize) -> i64 {
    subsets(t.len())
        .filter(|s| s.len() == k)
        .map(|s| perimeter_oracle(t, &t.labels_of(&s)))
        .max()
        .unwrap()
}

/// Largest clique by testing every subset against every distance value.
pub fn mcs_oracle(t: &UltraTriple) -> usize {
    let n = t.len();
    if n <= 1 {
        return n;
    }
    let values = t.distance_values();
    let mut best = 1;
    for s in subsets(n) {
        if s.len() <= best {
            continue;
        }
        let is_clique = values.iter().any(|&alpha| {
            s.iter()
                .enumerate()
                .all(|(x, &a)| s[x + 1..].iter().all(|&b| t.dist_idx(a, b) == alpha))
        });
        if is_clique {
            best = s.len();
        }
    }
    best
}

/// Gaussian elimination greedoid through division-free determinants.
pub fn geg_oracle(fam: &VectorFamily) -> SetSystem {
    let labels = fam.labels();
    let one = fam.field().one();
    let members = subsets(labels.len())
        .filter(|cols| {
            let rows: Vec<usize> = (0..cols.len()).collect();
            !det_expansion(&fam.matrix().select(&rows, cols), &one)
                .unwrap()
                .is_zero()
        })
        .map(|cols| cols.iter().map(|&j| labels[j].clone()).collect())
        .collect();
    SetSystem::new(labels.to_vec(), members).unwrap()
}

/// Rank over the rationals.
pub fn rational_rank(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    let nrows = a.len();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..nrows).find(|&r| !a[r][c].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        let pivot = a[rank][c].clone();
        for r in 0..nrows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &pivot;
                for x in 0..ncols {
                    let sub = &f * &a[rank][x];
                    a[r][x] -= sub;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Gaussian elimination greedoid of an integer matrix over the rationals.
pub fn rational_geg(labels: &[Label], rows: &[Vec<i64>]) -> SetSystem {
    let members = subsets(labels.len())
        .filter(|cols| {
            let k = cols.len();
            let sub: Vec<Vec<i64>> = rows[..k].iter().map(|r| cols.iter().map(|&j| r[j]).collect()).collect();
            rational_rank(&sub) == k
        })
        .map(|cols| cols.iter().map(|&j| labels[j].clone()).collect())
        .collect();
    SetSystem::new(labels.to_vec(), members).unwrap()
}

pub fn random_element(rng: &mut ChaCha8Rng, f: &FieldSpec) -> FieldElement {
    f.element(rng.gen_range(0..f.order())).unwrap()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, f: &FieldSpec, r: usize, c: usize) -> Matrix<FieldElement> {
    Matrix::from_fn(r, c, |_, _| random_element(rng, f))
}

/// Random family with `m = |E|` rows (or a few more), labels `1..=n`.
pub fn random_family(rng: &mut ChaCha8Rng, f: &FieldSpec, max_n: usize) -> VectorFamily {
    let n = rng.gen_range(0..=max_n);
    let m = n + rng.gen_range(0..=2);
    // bias towards zeros so that the greedoids are not all trivial
    let sparse = rng.gen_bool(0.5);
    let entries = Matrix::from_fn(m, n, |_, _| {
        if sparse && rng.gen_bool(0.5) {
            f.zero()
        } else {
            random_element(rng, f)
        }
    });
    let labels = (1..=n as i64).map(Label::Int).collect();
    VectorFamily::new(f.clone(), labels, entries).unwrap()
}

/// Sparse element with exponents in `[lo, hi]`, up to `terms` terms.
pub fn random_ga(rng: &mut ChaCha8Rng, f: &FieldSpec, lo: i64, hi: i64, terms: usize) -> GroupAlgebraElement {
    let k = rng.gen_range(0..=terms);
    let ts: Vec<(i64, FieldElement)> = (0..k)
        .map(|_| (rng.gen_range(lo..=hi), random_element(rng, f)))
        .collect();
    GroupAlgebraElement::from_terms(f, ts).unwrap()
}

pub fn random_subset(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    (0..n).filter(|_| rng.gen_bool(0.5)).collect()
}

/// Random sample of `k` distinct indices below `n`, in random order.
pub fn random_sample(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<usize> {
    rand::seq::index::sample(rng, n, k).into_vec()
}

pub fn label_set(t: &UltraTriple, idx: &[usize]) -> BTreeSet<Label> {
    idx.iter().map(|&i| t.label(i).clone()).collect()
}
