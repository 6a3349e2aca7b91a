//! Set systems over labelled ground sets, the brute-force Bhargava
//! greedoid, greedy schedules, and exhaustive greedoid axiom checks.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;
use crate::ultra::{UltraError, UltraTriple};

/// Ground sets above this size are refused by the exhaustive enumerations.
pub const MAX_ENUMERATION: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SetSysError {
    #[error("duplicate ground label {0}")]
    DuplicateGround(Label),
    #[error("member {member:?} contains {label}, which is not in the ground set")]
    NotInGround { member: Vec<Label>, label: Label },
    #[error("member {0:?} repeats a label")]
    RepeatedInMember(Vec<Label>),
    #[error("ground set has {0} elements; at most {MAX_ENUMERATION} can be enumerated")]
    TooLarge(usize),
    #[error("mapping is not defined on {0}")]
    Unmapped(Label),
    #[error("mapping sends two labels to {0}")]
    NotInjective(Label),
    #[error(transparent)]
    Ultra(#[from] UltraError),
}

/// A family of subsets of a ground set, kept in canonical order: ground
/// sorted, every member sorted, members ordered by size and then
/// lexicographically, no repeats.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSetSystem", into = "RawSetSystem")]
pub struct SetSystem {
    ground: Vec<Label>,
    sets: Vec<Vec<Label>>,
}

#[derive(Serialize, Deserialize)]
struct RawSetSystem {
    ground: Vec<Label>,
    sets: Vec<Vec<Label>>,
}

impl TryFrom<RawSetSystem> for SetSystem {
    type Error = SetSysError;
    fn try_from(raw: RawSetSystem) -> Result<Self, SetSysError> {
        SetSystem::new(raw.ground, raw.sets)
    }
}

impl From<SetSystem> for RawSetSystem {
    fn from(s: SetSystem) -> Self {
        RawSetSystem {
            ground: s.ground,
            sets: s.sets,
        }
    }
}

fn canonical_order(a: &Vec<Label>, b: &Vec<Label>) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl SetSystem {
    pub fn new(mut ground: Vec<Label>, sets: Vec<Vec<Label>>) -> Result<Self, SetSysError> {
        ground.sort();
        if let Some(w) = ground.windows(2).find(|w| w[0] == w[1]) {
            return Err(SetSysError::DuplicateGround(w[0].clone()));
        }
        let known: BTreeSet<&Label> = ground.iter().collect();
        let mut members = BTreeSet::new();
        for mut s in sets {
            s.sort();
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(SetSysError::RepeatedInMember(s));
            }
            if let Some(l) = s.iter().find(|l| !known.contains(l)) {
                return Err(SetSysError::NotInGround {
                    label: l.clone(),
                    member: s.clone(),
                });
            }
            members.insert(s);
        }
        let mut sets: Vec<Vec<Label>> = members.into_iter().collect();
        sets.sort_by(canonical_order);
        Ok(SetSystem { ground, sets })
    }

    /// Builds a system from bitmasks over `ground`, which must already be
    /// sorted and duplicate-free.
    pub fn from_masks(ground: &[Label], masks: impl IntoIterator<Item = u64>) -> Self {
        let mut sets: Vec<Vec<Label>> = masks
            .into_iter()
            .collect::<BTreeSet<u64>>()
            .into_iter()
            .map(|m| mask_labels(ground, m))
            .collect();
        sets.sort_by(canonical_order);
        SetSystem {
            ground: ground.to_vec(),
            sets,
        }
    }

    pub fn ground(&self) -> &[Label] {
        &self.ground
    }

    pub fn sets(&self) -> &[Vec<Label>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Membership of a set given in any order.
    pub fn contains(&self, set: &[Label]) -> bool {
        let mut s = set.to_vec();
        s.sort();
        self.sets.binary_search_by(|m| canonical_order(m, &s)).is_ok()
    }

    /// Members of size `k`.
    pub fn level(&self, k: usize) -> Vec<Vec<Label>> {
        self.sets.iter().filter(|s| s.len() == k).cloned().collect()
    }

    fn index_sets(&self) -> Vec<Vec<usize>> {
        let pos: BTreeMap<&Label, usize> = self.ground.iter().enumerate().map(|(i, l)| (l, i)).collect();
        self.sets.iter().map(|s| s.iter().map(|l| pos[l]).collect()).collect()
    }

    fn labels_of(&self, idx: &[usize]) -> Vec<Label> {
        idx.iter().map(|&i| self.ground[i].clone()).collect()
    }

    /// The image system `{f(S) : S in self}` along a bijection `f` defined on
    /// the ground set.
    pub fn transport(&self, f: &BTreeMap<Label, Label>) -> Result<SetSystem, SetSysError> {
        let mut image_ground = Vec::with_capacity(self.ground.len());
        let mut seen = BTreeSet::new();
        for l in &self.ground {
            let img = f.get(l).ok_or_else(|| SetSysError::Unmapped(l.clone()))?;
            if !seen.insert(img.clone()) {
                return Err(SetSysError::NotInjective(img.clone()));
            }
            image_ground.push(img.clone());
        }
        let sets = self
            .sets
            .iter()
            .map(|s| s.iter().map(|l| f[l].clone()).collect())
            .collect();
        SetSystem::new(image_ground, sets)
    }
}

fn mask_labels(ground: &[Label], mask: u64) -> Vec<Label> {
    (0..ground.len())
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| ground[i].clone())
        .collect()
}

/// Perimeters of all subsets of the triple, indexed by bitmask.
pub fn all_perimeters(t: &UltraTriple) -> Result<Vec<i64>, SetSysError> {
    let n = t.len();
    if n > MAX_ENUMERATION {
        return Err(SetSysError::TooLarge(n));
    }
    let mut per = vec![0i64; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let mut gain = i128::from(t.weight_idx(low));
        let mut r = rest;
        while r != 0 {
            let j = r.trailing_zeros() as usize;
            gain += i128::from(t.dist_idx(low, j));
            r &= r - 1;
        }
        let total = i128::from(per[rest]) + gain;
        per[mask] = i64::try_from(total).map_err(|_| UltraError::Overflow)?;
    }
    Ok(per)
}

/// Maximum perimeter of a `k`-subset, for `k = 0..=|E|`.
pub fn max_perimeters(t: &UltraTriple) -> Result<Vec<i64>, SetSysError> {
    let per = all_perimeters(t)?;
    let mut best = vec![i64::MIN; t.len() + 1];
    for (mask, &p) in per.iter().enumerate() {
        let k = mask.count_ones() as usize;
        best[k] = best[k].max(p);
    }
    Ok(best)
}

/// All subsets that have maximum perimeter among subsets of their size.
pub fn bhargava_bruteforce(t: &UltraTriple) -> Result<SetSystem, SetSysError> {
    let per = all_perimeters(t)?;
    let mut best = vec![i64::MIN; t.len() + 1];
    for (mask, &p) in per.iter().enumerate() {
        let k = mask.count_ones() as usize;
        best[k] = best[k].max(p);
    }
    let members = per
        .iter()
        .enumerate()
        .filter(|&(mask, &p)| p == best[mask.count_ones() as usize])
        .map(|(mask, _)| mask as u64);
    Ok(SetSystem::from_masks(t.labels(), members))
}

/// A greedy ordering `c_1, ..., c_m` of the ground set and its marginal
/// gains `rho_j = w(c_j) + sum_{i<j} d(c_i, c_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GreedySchedule {
    pub order: Vec<Label>,
    pub rho: Vec<i64>,
}

/// Greedy schedule as element indices of `t`, with its gains. Each step
/// takes the element of largest marginal gain, least label on ties.
pub fn greedy_schedule_idx(t: &UltraTriple) -> (Vec<usize>, Vec<i64>) {
    let n = t.len();
    let mut gain: Vec<i128> = (0..n).map(|e| i128::from(t.weight_idx(e))).collect();
    let mut taken = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut rho = Vec::with_capacity(n);
    for _ in 0..n {
        let c = (0..n)
            .filter(|&e| !taken[e])
            .fold(None, |best: Option<usize>, e| match best {
                Some(b) if gain[b] >= gain[e] => Some(b),
                _ => Some(e),
            })
            .expect("an element remains");
        taken[c] = true;
        order.push(c);
        rho.push(i64::try_from(gain[c]).expect("gain fits in 64 bits"));
        for e in 0..n {
            if !taken[e] {
                gain[e] += i128::from(t.dist_idx(c, e));
            }
        }
    }
    (order, rho)
}

pub fn greedy_schedule(t: &UltraTriple) -> GreedySchedule {
    let (order, rho) = greedy_schedule_idx(t);
    GreedySchedule {
        order: order.into_iter().map(|i| t.label(i).clone()).collect(),
        rho,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomOutcome {
    Pass,
    /// Axiom (i): the empty set is missing.
    EmptyMissing,
    /// Axiom (ii): no element of this member can be removed.
    NotAccessible(Vec<Label>),
    /// Axioms (iii) and (iv): no valid element of `larger` for `smaller`.
    NoExchange {
        smaller: Vec<Label>,
        larger: Vec<Label>,
    },
}

impl AxiomOutcome {
    pub fn passed(&self) -> bool {
        *self == AxiomOutcome::Pass
    }
}

/// Results of the four strong greedoid axioms, first witness each.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub contains_empty: AxiomOutcome,
    pub accessible: AxiomOutcome,
    pub augmentation: AxiomOutcome,
    pub strong_exchange: AxiomOutcome,
}

impl AxiomReport {
    pub fn is_greedoid(&self) -> bool {
        self.contains_empty.passed() && self.accessible.passed() && self.augmentation.passed()
    }

    pub fn is_strong_greedoid(&self) -> bool {
        self.is_greedoid() && self.strong_exchange.passed()
    }

    pub fn outcomes(&self) -> [&AxiomOutcome; 4] {
        [
            &self.contains_empty,
            &self.accessible,
            &self.augmentation,
            &self.strong_exchange,
        ]
    }
}

/// Checks, by exhaustive enumeration over pairs of members:
/// (i) the empty set is a member; (ii) every nonempty member `B` has some
/// `b` with `B - b` a member; (iii) if `|B| = |A| + 1` some `b` in `B - A`
/// has `A + b` a member; (iv) as (iii), with `B - b` also a member.
pub fn check_greedoid_axioms(s: &SetSystem) -> AxiomReport {
    let members = s.index_sets();
    let set: HashSet<&[usize]> = members.iter().map(Vec::as_slice).collect();
    let has = |v: &[usize]| set.contains(v);

    let contains_empty = if has(&[]) {
        AxiomOutcome::Pass
    } else {
        AxiomOutcome::EmptyMissing
    };

    let accessible = members
        .iter()
        .find(|b| !b.is_empty() && !(0..b.len()).any(|x| has(&remove_at(b, x))))
        .map_or(AxiomOutcome::Pass, |b| AxiomOutcome::NotAccessible(s.labels_of(b)));

    let mut augmentation = AxiomOutcome::Pass;
    let mut strong_exchange = AxiomOutcome::Pass;
    for a in &members {
        for b in members.iter().filter(|b| b.len() == a.len() + 1) {
            let mut aug = false;
            let mut strong = false;
            for (x, &e) in b.iter().enumerate() {
                if a.binary_search(&e).is_ok() {
                    continue;
                }
                if has(&insert_sorted(a, e)) {
                    aug = true;
                    if has(&remove_at(b, x)) {
                        strong = true;
                        break;
                    }
                }
            }
            let witness = || AxiomOutcome::NoExchange {
                smaller: s.labels_of(a),
                larger: s.labels_of(b),
            };
            if !aug && augmentation.passed() {
                augmentation = witness();
            }
            if !strong && strong_exchange.passed() {
                strong_exchange = witness();
            }
        }
    }
    AxiomReport {
        contains_empty,
        accessible,
        augmentation,
        strong_exchange,
    }
}

fn remove_at(v: &[usize], x: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    out.remove(x);
    out
}

fn insert_sorted(v: &[usize], e: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    let pos = out.binary_search(&e).unwrap_or_else(|p| p);
    out.insert(pos, e);
    out
}

/// A failure of basis exchange: no `b` in `B - A` makes `A - a + b` a member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExchangeViolation {
    pub a_set: Vec<Label>,
    pub b_set: Vec<Label>,
    pub removed: Label,
}

/// Basis exchange on the members of size `k`: for members `A`, `B` and
/// `a` in `A - B` some `b` in `B - A` has `(A - a) + b` of size `k` in the
/// system. An empty level passes.
pub fn check_level_exchange(s: &SetSystem, k: usize) -> Result<(), ExchangeViolation> {
    let level: Vec<Vec<usize>> = s.index_sets().into_iter().filter(|m| m.len() == k).collect();
    let set: HashSet<&[usize]> = level.iter().map(Vec::as_slice).collect();
    for a in &level {
        for b in &level {
            for (x, &ea) in a.iter().enumerate() {
                if b.binary_search(&ea).is_ok() {
                    continue;
                }
                let without = remove_at(a, x);
                let ok = b
                    .iter()
                    .filter(|e| a.binary_search(e).is_err())
                    .any(|&eb| set.contains(insert_sorted(&without, eb).as_slice()));
                if !ok {
                    return Err(ExchangeViolation {
                        a_set: s.labels_of(a),
                        b_set: s.labels_of(b),
                        removed: s.ground[ea].clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Basis exchange on every level; returns the first failing level.
pub fn check_all_levels(s: &SetSystem) -> Result<(), (usize, ExchangeViolation)> {
    (0..=s.ground.len()).try_for_each(|k| check_level_exchange(s, k).map_err(|v| (k, v)))
}
