//! Representing the Bhargava greedoid of an ultra triple as a Gaussian
//! elimination greedoid over a finite field, and the tools for the converse
//! direction (field-size lower bounds and exhaustive search).
//!
//! The pipeline: embed the triple into `L = K[Z]` so that distances become
//! `-ord` of differences, take a greedy schedule `c_1, ..., c_m` with gains
//! `rho_j`, set `f_j = (X - c_1)...(X - c_{j-1})`, lift
//! `a(e,j) = t_{rho_j - w(e)} f_j(e)` (which lies in `L₊`) and read off
//! `v_e = (π(a(e,1)), ..., π(a(e,m)))`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::geg::{geg_enumerate, GegError, RawFamily, VectorFamily};
use crate::group_algebra::{GroupAlgebraElement, GroupAlgebraError, TermsRepr};
use crate::label::Label;
use crate::ring::{det_expansion, Matrix};
use crate::setsys::{bhargava_bruteforce, greedy_schedule, GreedySchedule, SetSysError, SetSystem};
use crate::ultra::{RawTriple, UltraError, UltraTriple};

/// Which hypothesis of the field-size bound failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KBoundCondition {
    /// `N + i` must be a member for each `i` in `C`.
    One,
    /// `N + i + j` must be a member for distinct `i, j` in `C`.
    Two,
    /// `N + i + j - p` must not be a member for `p` in `N`.
    Three,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepresentError {
    #[error("field size {q} < mcs {mcs}")]
    FieldTooSmall { q: u64, mcs: usize },
    #[error("gamma {gamma} is below d({a},{b}) = {distance}")]
    GammaTooSmall {
        gamma: i64,
        a: Label,
        b: Label,
        distance: i64,
    },
    #[error("embedding labels do not match the triple")]
    LabelMismatch,
    #[error("{0} and {1} have the same image")]
    NotInjective(Label, Label),
    #[error("a({e},{j}) is not in L+")]
    LiftNotInLPlus { e: Label, j: usize },
    #[error("N and C share {0}")]
    Overlap(Label),
    #[error("condition {condition:?} fails at {witness:?}")]
    KBound {
        condition: KBoundCondition,
        witness: Vec<Label>,
    },
    #[error("scalars for {0} and {1} coincide")]
    DuplicateScalars(Label, Label),
    #[error("search space of {q}^{cells} families is too large")]
    SearchTooLarge { q: u64, cells: usize },
    #[error("malformed bundle: {0}")]
    Bundle(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    GroupAlgebra(#[from] GroupAlgebraError),
    #[error(transparent)]
    Geg(#[from] GegError),
    #[error(transparent)]
    Ultra(#[from] UltraError),
    #[error(transparent)]
    SetSys(#[from] SetSysError),
}

/// Images of the ground set in `L`, with the position `(gamma, u)` the
/// embedding was built for.
#[derive(Debug, Clone, PartialEq)]
pub struct ValadicEmbedding {
    pub field: FieldSpec,
    pub images: BTreeMap<Label, GroupAlgebraElement>,
    pub gamma: i64,
    pub u: GroupAlgebraElement,
}

impl ValadicEmbedding {
    pub fn image(&self, l: &Label) -> Option<&GroupAlgebraElement> {
        self.images.get(l)
    }
}

/// Embeds `t` into `u + t_{-gamma} L₊` preserving distances. The ground
/// set is split into open balls of radius `alpha = max d`; block `i` (in
/// order of least label) is embedded recursively around
/// `u + lambda_i t_{-alpha}`, where `lambda_i` is the `i`-th field element.
pub fn valadic_embed(
    t: &UltraTriple,
    spec: &FieldSpec,
    gamma: i64,
    u: &GroupAlgebraElement,
) -> Result<ValadicEmbedding, RepresentError> {
    if !u.spec().same_field(spec) {
        return Err(FieldError::FieldMismatch.into());
    }
    let mcs = t.mcs();
    if spec.order() < mcs as u64 {
        return Err(RepresentError::FieldTooSmall { q: spec.order(), mcs });
    }
    let n = t.len();
    for a in 0..n {
        for b in a + 1..n {
            if t.dist_idx(a, b) > gamma {
                return Err(RepresentError::GammaTooSmall {
                    gamma,
                    a: t.label(a).clone(),
                    b: t.label(b).clone(),
                    distance: t.dist_idx(a, b),
                });
            }
        }
    }
    let mut images = vec![GroupAlgebraElement::zero(spec); n];
    let all: Vec<usize> = (0..n).collect();
    embed_rec(t, spec, &all, u, &mut images)?;
    let images = images
        .into_iter()
        .enumerate()
        .map(|(i, x)| (t.label(i).clone(), x))
        .collect();
    Ok(ValadicEmbedding {
        field: spec.clone(),
        images,
        gamma,
        u: u.clone(),
    })
}

fn embed_rec(
    t: &UltraTriple,
    spec: &FieldSpec,
    idx: &[usize],
    u: &GroupAlgebraElement,
    images: &mut [GroupAlgebraElement],
) -> Result<(), RepresentError> {
    let Some((alpha, blocks)) = t.ball_partition_idx(idx) else {
        if let Some(&e) = idx.first() {
            images[e] = u.clone();
        }
        return Ok(());
    };
    // block i sits in u_i + t_{-beta} L+ with beta the next distance below
    // alpha; the recursion never needs beta itself
    for (i, block) in blocks.iter().enumerate() {
        let lambda = spec.element(i as u64)?;
        let ui = u + &GroupAlgebraElement::monomial(-alpha, lambda);
        embed_rec(t, spec, block, &ui, images)?;
    }
    Ok(())
}

/// Whether the embedding is injective, distance-preserving and
/// `(gamma, u)`-positioned. Label sets must agree.
pub fn valadic_verify(t: &UltraTriple, emb: &ValadicEmbedding) -> Result<bool, RepresentError> {
    if emb.images.len() != t.len() || t.labels().iter().any(|l| !emb.images.contains_key(l)) {
        return Err(RepresentError::LabelMismatch);
    }
    let xs: Vec<&GroupAlgebraElement> = t.labels().iter().map(|l| &emb.images[l]).collect();
    for x in &xs {
        let diff = *x - &emb.u;
        if !diff.is_zero() && diff.ord()? < -emb.gamma {
            return Ok(false);
        }
    }
    for a in 0..xs.len() {
        for b in a + 1..xs.len() {
            let diff = xs[a] - xs[b];
            if diff.is_zero() || -diff.ord()? != t.dist_idx(a, b) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The valadic triple on the images: same labels and weights, distances
/// `-ord(x - y)`.
pub fn embedded_triple(t: &UltraTriple, emb: &ValadicEmbedding) -> Result<UltraTriple, RepresentError> {
    let xs: Vec<&GroupAlgebraElement> = t
        .labels()
        .iter()
        .map(|l| emb.images.get(l).ok_or(RepresentError::LabelMismatch))
        .collect::<Result<_, _>>()?;
    let n = xs.len();
    let mut dist = vec![vec![0i64; n]; n];
    for a in 0..n {
        for b in a + 1..n {
            let diff = xs[a] - xs[b];
            if diff.is_zero() {
                return Err(RepresentError::NotInjective(t.label(a).clone(), t.label(b).clone()));
            }
            dist[a][b] = -diff.ord()?;
            dist[b][a] = dist[a][b];
        }
    }
    Ok(UltraTriple::new(t.labels().to_vec(), t.weights().to_vec(), dist)?)
}

/// A triple together with the vector family built for it and every
/// intermediate object of the construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    pub triple: UltraTriple,
    pub embedding: ValadicEmbedding,
    pub schedule: GreedySchedule,
    pub family: VectorFamily,
}

/// Builds a vector family over `spec` whose Gaussian elimination greedoid
/// is the Bhargava greedoid of `t`. Needs `|K| >= mcs(t)`.
pub fn build_representation(t: &UltraTriple, spec: &FieldSpec) -> Result<Representation, RepresentError> {
    let mcs = t.mcs();
    if spec.order() < mcs as u64 {
        return Err(RepresentError::FieldTooSmall { q: spec.order(), mcs });
    }
    let gamma = t.max_distance().unwrap_or(0);
    let embedding = valadic_embed(t, spec, gamma, &GroupAlgebraElement::zero(spec))?;
    let schedule = greedy_schedule(&embedded_triple(t, &embedding)?);
    let lifted = lifted_matrix(t, &embedding, &schedule)?;
    let m = t.len();
    let entries = Matrix::from_fn(m, m, |j, e| lifted.get(j, e).pi().expect("entries lie in L+"));
    let family = VectorFamily::new(spec.clone(), t.labels().to_vec(), entries)?;
    Ok(Representation {
        triple: t.clone(),
        embedding,
        schedule,
        family,
    })
}

/// The `m x m` matrix of `a(e,j) = t_{rho_j - w(e)} f_j(e)`: row `j`,
/// column `e` in label order. Fails if some entry leaves `L₊`.
pub fn lifted_matrix(
    t: &UltraTriple,
    emb: &ValadicEmbedding,
    schedule: &GreedySchedule,
) -> Result<Matrix<GroupAlgebraElement>, RepresentError> {
    let m = t.len();
    if schedule.order.len() != m || schedule.rho.len() != m {
        return Err(RepresentError::LabelMismatch);
    }
    let image = |l: &Label| emb.images.get(l).ok_or(RepresentError::LabelMismatch);
    let cs: Vec<&GroupAlgebraElement> = schedule.order.iter().map(image).collect::<Result<_, _>>()?;
    let mut cols: Vec<Vec<GroupAlgebraElement>> = Vec::with_capacity(m);
    for (e, l) in t.labels().iter().enumerate() {
        let x = image(l)?;
        let w = t.weight_idx(e);
        // f_1(x) = 1, f_{j+1}(x) = f_j(x) (x - c_j)
        let mut f = GroupAlgebraElement::one(&emb.field);
        let mut col = Vec::with_capacity(m);
        for j in 0..m {
            let shift = schedule.rho[j]
                .checked_sub(w)
                .ok_or(GroupAlgebraError::ExponentOverflow)?;
            let a = f.shift(shift)?;
            if !a.in_lplus() {
                return Err(RepresentError::LiftNotInLPlus { e: l.clone(), j: j + 1 });
            }
            col.push(a);
            if j + 1 < m {
                f = &f * &(x - cs[j]);
            }
        }
        cols.push(col);
    }
    Ok(Matrix::from_fn(m, m, |j, e| cols[e][j].clone()))
}

impl Representation {
    /// `a(e,j)` for the stored embedding and schedule.
    pub fn lifted(&self) -> Result<Matrix<GroupAlgebraElement>, RepresentError> {
        lifted_matrix(&self.triple, &self.embedding, &self.schedule)
    }

    /// The square matrix `(a(u_i, j))_{j,i <= k}` for a list of labels,
    /// as a group-algebra determinant target.
    pub fn lifted_minor(&self, set: &[Label]) -> Result<Matrix<GroupAlgebraElement>, RepresentError> {
        let lifted = self.lifted()?;
        let cols = self.triple.indices(set)?;
        let rows: Vec<usize> = (0..set.len()).collect();
        Ok(lifted.select(&rows, &cols))
    }

    /// `det` of [`Self::lifted_minor`] in `L`.
    pub fn lifted_minor_det(&self, set: &[Label]) -> Result<GroupAlgebraElement, RepresentError> {
        let minor = self.lifted_minor(set)?;
        Ok(det_expansion(&minor, &GroupAlgebraElement::one(&self.embedding.field)).expect("square"))
    }

    /// Re-derives the greedoid from the matrix and compares it with the
    /// brute-force Bhargava greedoid.
    pub fn verify_against_oracle(&self) -> Result<bool, RepresentError> {
        Ok(geg_enumerate(&self.family)? == bhargava_bruteforce(&self.triple)?)
    }

    pub fn to_bundle(&self) -> RawBundle {
        RawBundle {
            triple: self.triple.to_raw(),
            embedding: self
                .embedding
                .images
                .iter()
                .map(|(l, x)| (l.key(), x.to_repr()))
                .collect(),
            position: RawPosition {
                gamma: self.embedding.gamma,
                u: self.embedding.u.to_repr(),
            },
            schedule: self.schedule.clone(),
            matrix: self.family.to_raw(),
        }
    }

    pub fn from_bundle(raw: &RawBundle) -> Result<Self, RepresentError> {
        let triple = UltraTriple::from_raw(&raw.triple)?;
        let family = VectorFamily::from_raw(&raw.matrix)?;
        let field = family.field().clone();
        if raw.embedding.len() != triple.len() {
            return Err(RepresentError::LabelMismatch);
        }
        let mut images = BTreeMap::new();
        for l in triple.labels() {
            let repr = raw.embedding.get(&l.key()).ok_or(RepresentError::LabelMismatch)?;
            images.insert(l.clone(), GroupAlgebraElement::from_repr(&field, repr)?);
        }
        let u = GroupAlgebraElement::from_repr(&field, &raw.position.u)?;
        let embedding = ValadicEmbedding {
            field,
            images,
            gamma: raw.position.gamma,
            u,
        };
        let order: BTreeSet<&Label> = raw.schedule.order.iter().collect();
        if order.len() != triple.len()
            || raw.schedule.rho.len() != triple.len()
            || triple.labels().iter().any(|l| !order.contains(l))
        {
            return Err(RepresentError::Bundle(
                "schedule is not an ordering of the ground set".into(),
            ));
        }
        Ok(Representation {
            triple,
            embedding,
            schedule: raw.schedule.clone(),
            family,
        })
    }
}

/// JSON bundle for a [`Representation`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawBundle {
    pub triple: RawTriple,
    pub embedding: BTreeMap<String, TermsRepr>,
    pub position: RawPosition,
    pub schedule: GreedySchedule,
    pub matrix: RawFamily,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawPosition {
    pub gamma: i64,
    pub u: TermsRepr,
}

/// The scalars `r_i = a_{r+2,i} / det(sub_{1..r+1}^{N,i} A)` for `i` in `C`,
/// with the columns of `N` (in label order) placed first and `r = |N|`.
/// Checks the three hypotheses that force these to be distinct, then checks
/// the distinctness itself. When `|C| = 1` and there is no row `r+2`, the
/// missing entry is taken to be zero.
pub fn kbound_scalars(fam: &VectorFamily, n: &[Label], c: &[Label]) -> Result<Vec<FieldElement>, RepresentError> {
    let mut n_sorted = n.to_vec();
    n_sorted.sort();
    fam.column_indices(&n_sorted)?;
    fam.column_indices(c)?;
    if let Some(l) = c.iter().find(|l| n_sorted.contains(l)) {
        return Err(RepresentError::Overlap((*l).clone()));
    }
    let member = |extra: &[&Label], drop: Option<&Label>| -> Result<(bool, Vec<Label>), RepresentError> {
        let mut set: Vec<Label> = n_sorted.iter().filter(|l| Some(*l) != drop).cloned().collect();
        set.extend(extra.iter().map(|l| (*l).clone()));
        Ok((crate::geg::geg_member(fam, &set)?, set))
    };
    for i in c {
        let (ok, set) = member(&[i], None)?;
        if !ok {
            return Err(RepresentError::KBound {
                condition: KBoundCondition::One,
                witness: set,
            });
        }
    }
    for (x, i) in c.iter().enumerate() {
        for j in &c[x + 1..] {
            let (ok, set) = member(&[i, j], None)?;
            if !ok {
                return Err(RepresentError::KBound {
                    condition: KBoundCondition::Two,
                    witness: set,
                });
            }
            for p in &n_sorted {
                let (ok, set) = member(&[i, j], Some(p))?;
                if ok {
                    return Err(RepresentError::KBound {
                        condition: KBoundCondition::Three,
                        witness: set,
                    });
                }
            }
        }
    }
    let r = n_sorted.len();
    let field = fam.field();
    let rows: Vec<usize> = (0..=r).collect();
    let mut scalars = Vec::with_capacity(c.len());
    for i in c {
        let mut cols = n_sorted.clone();
        cols.push(i.clone());
        let d = crate::geg::det(&fam.submatrix(&rows, &cols)?, field)?;
        let top = if r + 1 < fam.rows() {
            fam.column(i)?[r + 1].clone()
        } else {
            field.zero()
        };
        scalars.push(top.checked_div(&d)?);
    }
    for x in 0..scalars.len() {
        for y in x + 1..scalars.len() {
            if scalars[x] == scalars[y] {
                return Err(RepresentError::DuplicateScalars(c[x].clone(), c[y].clone()));
            }
        }
    }
    Ok(scalars)
}

/// The sets used to bound the field size from below for a triple with
/// constant weights: a maximum clique `C` (a `beta`-clique), the closed
/// ball `B` of radius `beta` around its least element, a smallest greedoid
/// member `S` meeting `B` in at least two elements, and `N = S - B`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constellation {
    pub clique: Vec<Label>,
    pub beta: i64,
    pub ball: Vec<Label>,
    pub secant: Vec<Label>,
    pub n: Vec<Label>,
}

/// `None` when `mcs(t) <= 1`.
pub fn converse_constellation(t: &UltraTriple, greedoid: &SetSystem) -> Result<Option<Constellation>, RepresentError> {
    let clique = t.max_clique();
    if clique.len() < 2 {
        return Ok(None);
    }
    let beta = t.distance(&clique[0], &clique[1])?;
    let ball = t.closed_ball(beta, &clique[0])?;
    let secant = greedoid
        .sets()
        .iter()
        .find(|s| s.iter().filter(|l| ball.contains(l)).count() >= 2)
        .cloned()
        .ok_or_else(|| RepresentError::Bundle("no greedoid member meets the ball twice".into()))?;
    let n = secant.iter().filter(|l| !ball.contains(l)).cloned().collect();
    Ok(Some(Constellation {
        clique,
        beta,
        ball,
        secant,
        n,
    }))
}

/// Largest search space `converse_search` accepts.
pub const MAX_SEARCH: u64 = 1 << 24;

/// Searches all `|E| x |E|` matrices over `spec`, in increasing base-`q`
/// index order, for one whose greedoid is `target`. Returns the first hit.
pub fn converse_search(target: &SetSystem, spec: &FieldSpec) -> Result<Option<VectorFamily>, RepresentError> {
    let n = target.ground().len();
    let q = spec.order();
    let cells = n * n;
    let total = u32::try_from(cells)
        .ok()
        .and_then(|c| q.checked_pow(c))
        .filter(|&t| t <= MAX_SEARCH)
        .ok_or(RepresentError::SearchTooLarge { q, cells })?;
    let ground = target.ground();
    let mut wanted = vec![false; 1 << n];
    for s in target.sets() {
        let mask = s
            .iter()
            .map(|l| 1usize << ground.binary_search(l).expect("member of ground"))
            .sum::<usize>();
        wanted[mask] = true;
    }
    let decode = |index: u64| -> Vec<Vec<u64>> {
        let mut rest = index;
        let mut m = vec![vec![0u64; n]; n];
        for row in m.iter_mut() {
            for cell in row.iter_mut() {
                *cell = rest % q;
                rest /= q;
            }
        }
        m
    };
    let matches = |index: u64| -> bool {
        let m = decode(index);
        (0..1usize << n).all(|mask| {
            let cols: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).collect();
            let k = cols.len();
            let sub: Vec<Vec<u64>> = (0..k).map(|i| cols.iter().map(|&j| m[i][j]).collect()).collect();
            (crate::geg::rank_codes(spec, sub) == k) == wanted[mask]
        })
    };
    let Some(index) = (0..total).into_par_iter().find_first(|&i| matches(i)) else {
        return Ok(None);
    };
    let m = decode(index);
    let entries = Matrix::from_fn(n, n, |i, j| spec.element(m[i][j]).expect("code below q"));
    Ok(Some(VectorFamily::new(spec.clone(), ground.to_vec(), entries)?))
}
