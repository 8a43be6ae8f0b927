//! The four filtration flavors built from an entourage: clique (Vietoris–Rips)
//! and ball (Čech) subset families, realized either as simplicial complexes of
//! sorted vertex sets or as simplicial sets of tuples.
//!
//! Everything is truncated at a mandatory dimension cap. Simplices are stored
//! per dimension in lexicographic order, which is the canonical basis order
//! used by the homology module.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;
use crate::coarse::{same_ground, Entourage, GroundSet};

/// Vertex indices into a ground set. Sorted for complexes, arbitrary order
/// (no consecutive repeats) for simplicial-set tuples.
pub type Simplex = Vec<u32>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("entourage must contain the diagonal")]
    NotReflexive,
    #[error("simplex {0:?} is not strictly increasing")]
    Unsorted(Simplex),
    #[error("simplex {simplex:?} uses a vertex outside the ground set of size {size}")]
    VertexOutOfRange { simplex: Simplex, size: usize },
    #[error("tuple {0:?} has consecutive repeated entries")]
    Degenerate(Simplex),
    #[error("ground set mismatch between complexes")]
    GroundMismatch,
}

/// A downward-closed family of sorted vertex tuples, truncated at `dim_cap`.
#[derive(Clone, PartialEq, Eq)]
pub struct SimplicialComplex {
    ground: Arc<GroundSet>,
    dim_cap: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("dim_cap", &self.dim_cap)
            .field("counts", &self.counts())
            .finish()
    }
}

fn build_index(by_dim: &[Vec<Simplex>]) -> Vec<HashMap<Simplex, usize>> {
    by_dim
        .iter()
        .map(|list| {
            list.iter()
                .enumerate()
                .map(|(i, s)| (s.clone(), i))
                .collect()
        })
        .collect()
}

/// Faces obtained by deleting one vertex, with their positions.
fn codim_one_faces(s: &[u32]) -> impl Iterator<Item = (usize, Simplex)> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        (i, f)
    })
}

impl SimplicialComplex {
    /// Closes the given simplices downward and truncates at `dim_cap`.
    pub fn from_simplices<I>(
        ground: &Arc<GroundSet>,
        dim_cap: usize,
        simplices: I,
    ) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let n = ground.len();
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); dim_cap + 1];
        let mut stack = Vec::new();
        for s in simplices {
            if s.is_empty() {
                continue;
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(ComplexError::Unsorted(s));
            }
            if s.iter().any(|&v| v as usize >= n) {
                return Err(ComplexError::VertexOutOfRange {
                    simplex: s,
                    size: n,
                });
            }
            stack.push(s);
        }
        while let Some(s) = stack.pop() {
            let d = s.len() - 1;
            if d <= dim_cap && sets[d].contains(&s) {
                continue;
            }
            if d > 0 {
                for (_, f) in codim_one_faces(&s) {
                    stack.push(f);
                }
            }
            if d <= dim_cap {
                sets[d].insert(s);
            }
        }
        Ok(Self::from_sorted(
            ground,
            dim_cap,
            sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        ))
    }

    /// Trusted constructor: per-dimension lists, already closed and sorted.
    pub(crate) fn from_sorted(
        ground: &Arc<GroundSet>,
        dim_cap: usize,
        mut by_dim: Vec<Vec<Simplex>>,
    ) -> Self {
        by_dim.resize(dim_cap + 1, Vec::new());
        let index = build_index(&by_dim);
        Self {
            ground: ground.clone(),
            dim_cap,
            by_dim,
            index,
        }
    }

    /// Every subset of the ground set up to `dim_cap`.
    pub fn full_simplex(ground: &Arc<GroundSet>, dim_cap: usize) -> Self {
        let all: Simplex = (0..ground.len() as u32).collect();
        Self::from_simplices(ground, dim_cap, [all]).expect("sorted in range")
    }

    /// `Δ^m` on points labelled `0..=m`.
    pub fn standard_simplex(m: usize) -> Self {
        Self::full_simplex(&GroundSet::range(m + 1), m)
    }

    /// `∂Δ^m` on points labelled `0..=m`; the labels match [`Self::standard_simplex`].
    pub fn standard_sphere(m: usize) -> Self {
        assert!(m >= 1, "the boundary of a point is empty");
        let g = GroundSet::range(m + 1);
        let facets = (0..=m as u32).map(|skip| (0..=m as u32).filter(|&v| v != skip).collect());
        Self::from_simplices(&g, m - 1, facets).expect("sorted in range")
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Highest dimension with a stored simplex, `None` if empty.
    pub fn dim(&self) -> Option<usize> {
        self.by_dim.iter().rposition(|l| !l.is_empty())
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim[0].is_empty()
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        let d = s.len().checked_sub(1)?;
        self.index.get(d)?.get(s).copied()
    }

    /// Membership of a sorted vertex tuple.
    pub fn contains(&self, s: &[u32]) -> bool {
        self.index_of(s).is_some()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.by_dim[0].iter().map(|s| s[0])
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.simplices(1).iter().map(|s| (s[0], s[1]))
    }

    /// Induced subcomplex on the kept vertices.
    pub fn restrict(&self, keep: &BitSet) -> Self {
        let by_dim = self
            .by_dim
            .iter()
            .map(|l| {
                l.iter()
                    .filter(|s| s.iter().all(|&v| keep.contains(v as usize)))
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_sorted(&self.ground, self.dim_cap, by_dim)
    }

    /// Simplices of dimension at most `k`.
    pub fn skeleton(&self, k: usize) -> Self {
        let k = k.min(self.dim_cap);
        Self::from_sorted(&self.ground, k, self.by_dim[..=k].to_vec())
    }

    pub fn is_subcomplex_of(&self, other: &Self) -> bool {
        same_ground(&self.ground, &other.ground) && self.iter().all(|s| other.contains(s))
    }
}

/// Nondegenerate tuples of a sub-simplicial set of `E T`, truncated at `dim_cap`.
///
/// Degenerate tuples (consecutive repeats) are implicit; normalized chains
/// never see them.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSimplicialSet {
    ground: Arc<GroundSet>,
    dim_cap: usize,
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

impl fmt::Debug for TruncatedSimplicialSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TruncatedSimplicialSet")
            .field("dim_cap", &self.dim_cap)
            .field("counts", &self.counts())
            .finish()
    }
}

/// Deletes coordinate `i` and collapses a newly created repeat.
pub fn collapse_face(t: &[u32], i: usize) -> Simplex {
    let mut f = t.to_vec();
    f.remove(i);
    f.dedup();
    f
}

pub fn has_consecutive_repeat(t: &[u32]) -> bool {
    t.windows(2).any(|w| w[0] == w[1])
}

impl TruncatedSimplicialSet {
    pub(crate) fn from_sorted(
        ground: &Arc<GroundSet>,
        dim_cap: usize,
        mut by_dim: Vec<Vec<Simplex>>,
    ) -> Self {
        by_dim.resize(dim_cap + 1, Vec::new());
        let index = build_index(&by_dim);
        Self {
            ground: ground.clone(),
            dim_cap,
            by_dim,
            index,
        }
    }

    /// From explicit nondegenerate tuples; the family must already be face closed.
    pub fn from_tuples<I>(
        ground: &Arc<GroundSet>,
        dim_cap: usize,
        tuples: I,
    ) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let n = ground.len();
        let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); dim_cap + 1];
        for t in tuples {
            if t.is_empty() || t.len() > dim_cap + 1 {
                continue;
            }
            if has_consecutive_repeat(&t) {
                return Err(ComplexError::Degenerate(t));
            }
            if t.iter().any(|&v| v as usize >= n) {
                return Err(ComplexError::VertexOutOfRange {
                    simplex: t,
                    size: n,
                });
            }
            sets[t.len() - 1].insert(t);
        }
        Ok(Self::from_sorted(
            ground,
            dim_cap,
            sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        ))
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim[0].is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn index_of(&self, t: &[u32]) -> Option<usize> {
        let d = t.len().checked_sub(1)?;
        self.index.get(d)?.get(t).copied()
    }

    pub fn contains(&self, t: &[u32]) -> bool {
        self.index_of(t).is_some()
    }

    /// Tuples whose entries all lie in `keep`.
    pub fn restrict(&self, keep: &BitSet) -> Self {
        let by_dim = self
            .by_dim
            .iter()
            .map(|l| {
                l.iter()
                    .filter(|s| s.iter().all(|&v| keep.contains(v as usize)))
                    .cloned()
                    .collect()
            })
            .collect();
        Self::from_sorted(&self.ground, self.dim_cap, by_dim)
    }

    /// Whether every collapsed face of every stored tuple is stored.
    pub fn is_face_closed(&self) -> bool {
        self.iter()
            .filter(|t| t.len() > 1)
            .all(|t| (0..t.len()).all(|i| self.contains(&collapse_face(t, i))))
    }

    /// The simplicial complex of supports of injective tuples.
    pub fn underlying_complex(&self) -> SimplicialComplex {
        let by_dim = self
            .by_dim
            .iter()
            .map(|l| {
                let mut v: Vec<Simplex> = l
                    .iter()
                    .filter(|t| t.windows(2).all(|w| w[0] < w[1]))
                    .cloned()
                    .collect();
                v.sort();
                v
            })
            .collect();
        SimplicialComplex::from_sorted(&self.ground, self.dim_cap, by_dim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    VietorisRips,
    Cech,
}

/// A subset family determined by an entourage.
#[derive(Clone, Debug)]
pub struct SubsetFamilyFlavor {
    pub kind: FamilyKind,
    pub entourage: Entourage,
}

impl SubsetFamilyFlavor {
    pub fn new(kind: FamilyKind, entourage: Entourage) -> Self {
        Self { kind, entourage }
    }

    /// Direct membership test of a vertex set, straight from the definitions:
    /// all pairs in `U` (both orders) for Vietoris–Rips, a common center for Čech.
    pub fn contains_set(&self, set: &[u32]) -> bool {
        let u = &self.entourage;
        match self.kind {
            FamilyKind::VietorisRips => set
                .iter()
                .all(|&a| set.iter().all(|&b| u.contains(a as usize, b as usize))),
            FamilyKind::Cech => {
                (0..u.ground().len()).any(|c| set.iter().all(|&b| u.contains(c, b as usize)))
            }
        }
    }
}

/// The four filtration flavors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    #[serde(rename = "c-vr")]
    ComplexVr,
    #[serde(rename = "c-cech")]
    ComplexCech,
    #[serde(rename = "e-vr")]
    SetVr,
    #[serde(rename = "e-cech")]
    SetCech,
}

impl Flavor {
    pub const ALL: [Flavor; 4] = [
        Flavor::ComplexVr,
        Flavor::ComplexCech,
        Flavor::SetVr,
        Flavor::SetCech,
    ];

    pub fn family(self) -> FamilyKind {
        match self {
            Flavor::ComplexVr | Flavor::SetVr => FamilyKind::VietorisRips,
            Flavor::ComplexCech | Flavor::SetCech => FamilyKind::Cech,
        }
    }

    pub fn is_simplicial_set(self) -> bool {
        matches!(self, Flavor::SetVr | Flavor::SetCech)
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::ComplexVr => "c-vr",
            Flavor::ComplexCech => "c-cech",
            Flavor::SetVr => "e-vr",
            Flavor::SetCech => "e-cech",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Flavor::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown flavor {s:?} (expected c-vr, c-cech, e-vr or e-cech)"))
    }
}

/// A built space of either kind.
#[derive(Clone, Debug)]
pub enum Space {
    Complex(SimplicialComplex),
    SimplicialSet(TruncatedSimplicialSet),
}

impl Space {
    pub fn ground(&self) -> &Arc<GroundSet> {
        match self {
            Space::Complex(c) => c.ground(),
            Space::SimplicialSet(s) => s.ground(),
        }
    }

    pub fn dim_cap(&self) -> usize {
        match self {
            Space::Complex(c) => c.dim_cap(),
            Space::SimplicialSet(s) => s.dim_cap(),
        }
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        match self {
            Space::Complex(c) => c.simplices(k),
            Space::SimplicialSet(s) => s.simplices(k),
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        match self {
            Space::Complex(c) => c.counts(),
            Space::SimplicialSet(s) => s.counts(),
        }
    }

    pub fn restrict(&self, keep: &BitSet) -> Self {
        match self {
            Space::Complex(c) => Space::Complex(c.restrict(keep)),
            Space::SimplicialSet(s) => Space::SimplicialSet(s.restrict(keep)),
        }
    }

    pub fn index_of(&self, s: &[u32]) -> Option<usize> {
        match self {
            Space::Complex(c) => c.index_of(s),
            Space::SimplicialSet(t) => t.index_of(s),
        }
    }

    pub fn is_simplicial_set(&self) -> bool {
        matches!(self, Space::SimplicialSet(_))
    }

    pub fn vertices(&self) -> Vec<u32> {
        self.simplices(0).iter().map(|s| s[0]).collect()
    }

    /// Undirected edges of the 1-skeleton, each once with the smaller end first.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        match self {
            Space::Complex(c) => c.edges().collect(),
            Space::SimplicialSet(s) => s
                .simplices(1)
                .iter()
                .filter(|t| t[0] < t[1])
                .map(|t| (t[0], t[1]))
                .collect(),
        }
    }
}

/// Common neighbors graph for clique expansion: `a ~ b` iff both orders lie in `u`.
fn symmetric_neighbors(u: &Entourage) -> Vec<BitSet> {
    let n = u.ground().len();
    (0..n)
        .map(|a| {
            let mut r = u.row(a).clone();
            r.remove(a);
            let mut sym = BitSet::new(n);
            for b in r.iter() {
                if u.contains(b, a) {
                    sym.insert(b);
                }
            }
            sym
        })
        .collect()
}

/// `cols[b] = {a : (a, b) ∈ u}`, the possible centers of balls containing `b`.
fn center_columns(u: &Entourage) -> Vec<BitSet> {
    let n = u.ground().len();
    let mut cols = vec![BitSet::new(n); n];
    for (a, b) in u.pairs() {
        cols[b].insert(a);
    }
    cols
}

fn require_reflexive(u: &Entourage) -> Result<(), ComplexError> {
    if u.is_reflexive() {
        Ok(())
    } else {
        Err(ComplexError::NotReflexive)
    }
}

fn merge_levels(parts: Vec<Vec<Vec<Simplex>>>, dim_cap: usize) -> Vec<Vec<Simplex>> {
    let mut by_dim = vec![Vec::new(); dim_cap + 1];
    for part in parts {
        for (d, list) in part.into_iter().enumerate() {
            by_dim[d].extend(list);
        }
    }
    by_dim
}

/// Clique complex of `{a, b : (a, b), (b, a) ∈ u}` truncated at `dim_cap`.
///
/// Cliques are grown from their least vertex by intersecting forward
/// neighborhoods, so each per-dimension list comes out lexicographically sorted.
pub fn build_vr_complex(u: &Entourage, dim_cap: usize) -> Result<SimplicialComplex, ComplexError> {
    require_reflexive(u)?;
    let nb = symmetric_neighbors(u);
    let n = u.ground().len();

    fn grow(s: &mut Simplex, cand: &BitSet, nb: &[BitSet], cap: usize, out: &mut [Vec<Simplex>]) {
        out[s.len() - 1].push(s.clone());
        if s.len() > cap {
            return;
        }
        let last = *s.last().unwrap() as usize;
        for w in cand.iter_above(last) {
            let mut next = cand.clone();
            next.intersect_with(&nb[w]);
            s.push(w as u32);
            grow(s, &next, nb, cap, out);
            s.pop();
        }
    }

    let parts: Vec<_> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![Vec::new(); dim_cap + 1];
            grow(&mut vec![v as u32], &nb[v], &nb, dim_cap, &mut out);
            out
        })
        .collect();
    Ok(SimplicialComplex::from_sorted(
        u.ground(),
        dim_cap,
        merge_levels(parts, dim_cap),
    ))
}

/// Complex of all sets contained in some ball `{b : (a, b) ∈ u}`; the center
/// `a` ranges over the whole ground set.
pub fn build_cech_complex(
    u: &Entourage,
    dim_cap: usize,
) -> Result<SimplicialComplex, ComplexError> {
    require_reflexive(u)?;
    let cols = center_columns(u);
    let n = u.ground().len();

    fn grow(
        s: &mut Simplex,
        centers: &BitSet,
        cols: &[BitSet],
        cap: usize,
        out: &mut [Vec<Simplex>],
    ) {
        out[s.len() - 1].push(s.clone());
        if s.len() > cap {
            return;
        }
        let last = *s.last().unwrap() as usize;
        for w in last + 1..cols.len() {
            if centers.intersects(&cols[w]) {
                let mut next = centers.clone();
                next.intersect_with(&cols[w]);
                s.push(w as u32);
                grow(s, &next, cols, cap, out);
                s.pop();
            }
        }
    }

    let parts: Vec<_> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![Vec::new(); dim_cap + 1];
            if !cols[v].is_empty() {
                grow(&mut vec![v as u32], &cols[v], &cols, dim_cap, &mut out);
            }
            out
        })
        .collect();
    Ok(SimplicialComplex::from_sorted(
        u.ground(),
        dim_cap,
        merge_levels(parts, dim_cap),
    ))
}

/// Nondegenerate tuples of length at most `dim_cap + 1` whose entries lie in
/// a common member of the flavor's subset family.
pub fn build_simpset(
    flavor: &SubsetFamilyFlavor,
    dim_cap: usize,
) -> Result<TruncatedSimplicialSet, ComplexError> {
    let u = &flavor.entourage;
    require_reflexive(u)?;
    let n = u.ground().len();
    let nb = symmetric_neighbors(u);
    let cols = center_columns(u);

    struct Ctx<'a> {
        kind: FamilyKind,
        nb: &'a [BitSet],
        cols: &'a [BitSet],
        cap: usize,
    }

    // `state` is the set of common neighbors (VR) or common centers (Čech) of the support.
    fn grow(
        t: &mut Simplex,
        support: &BitSet,
        state: &BitSet,
        ctx: &Ctx<'_>,
        out: &mut [Vec<Simplex>],
    ) {
        out[t.len() - 1].push(t.clone());
        if t.len() > ctx.cap {
            return;
        }
        let last = *t.last().unwrap() as usize;
        for w in 0..ctx.nb.len() {
            if w == last {
                continue;
            }
            if support.contains(w) {
                t.push(w as u32);
                grow(t, support, state, ctx, out);
                t.pop();
                continue;
            }
            let admissible = match ctx.kind {
                FamilyKind::VietorisRips => state.contains(w),
                FamilyKind::Cech => state.intersects(&ctx.cols[w]),
            };
            if admissible {
                let mut next_support = support.clone();
                next_support.insert(w);
                let mut next = state.clone();
                match ctx.kind {
                    FamilyKind::VietorisRips => next.intersect_with(&ctx.nb[w]),
                    FamilyKind::Cech => next.intersect_with(&ctx.cols[w]),
                }
                t.push(w as u32);
                grow(t, &next_support, &next, ctx, out);
                t.pop();
            }
        }
    }

    let ctx = Ctx {
        kind: flavor.kind,
        nb: &nb,
        cols: &cols,
        cap: dim_cap,
    };
    let parts: Vec<_> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut out = vec![Vec::new(); dim_cap + 1];
            let state = match flavor.kind {
                FamilyKind::VietorisRips => nb[v].clone(),
                FamilyKind::Cech => cols[v].clone(),
            };
            if flavor.kind == FamilyKind::VietorisRips || !state.is_empty() {
                let mut support = BitSet::new(n);
                support.insert(v);
                grow(&mut vec![v as u32], &support, &state, &ctx, &mut out);
            }
            out
        })
        .collect();
    Ok(TruncatedSimplicialSet::from_sorted(
        u.ground(),
        dim_cap,
        merge_levels(parts, dim_cap),
    ))
}

/// Builds the space of the given flavor at entourage `u`.
pub fn build_flavor(u: &Entourage, flavor: Flavor, dim_cap: usize) -> Result<Space, ComplexError> {
    Ok(match flavor {
        Flavor::ComplexVr => Space::Complex(build_vr_complex(u, dim_cap)?),
        Flavor::ComplexCech => Space::Complex(build_cech_complex(u, dim_cap)?),
        Flavor::SetVr => Space::SimplicialSet(build_simpset(
            &SubsetFamilyFlavor::new(FamilyKind::VietorisRips, u.clone()),
            dim_cap,
        )?),
        Flavor::SetCech => Space::SimplicialSet(build_simpset(
            &SubsetFamilyFlavor::new(FamilyKind::Cech, u.clone()),
            dim_cap,
        )?),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SandwichStep {
    /// `VR_U ⊆ Č_U`
    VrInCech,
    /// `Č_U ⊆ VR_{U∘U}`
    CechInComposite,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichViolation {
    pub step: SandwichStep,
    pub simplicial_set: bool,
    pub simplex: Simplex,
}

/// Checks `VR_U ⊆ Č_U ⊆ VR_{U∘U}` simplexwise for complexes and simplicial
/// sets. Returns the first violating simplex, if any.
pub fn check_sandwich(
    u: &Entourage,
    dim_cap: usize,
) -> Result<Option<SandwichViolation>, ComplexError> {
    let uu = u.compose(u).map_err(|_| ComplexError::GroundMismatch)?;
    let vr = build_vr_complex(u, dim_cap)?;
    let cech = build_cech_complex(u, dim_cap)?;
    let vr2 = build_vr_complex(&uu, dim_cap)?;
    fn first_missing<'a>(
        mut a: impl Iterator<Item = &'a Simplex>,
        contains: impl Fn(&[u32]) -> bool,
    ) -> Option<Simplex> {
        a.find(|s| !contains(s)).cloned()
    }
    if let Some(s) = first_missing(vr.iter(), |s| cech.contains(s)) {
        return Ok(Some(SandwichViolation {
            step: SandwichStep::VrInCech,
            simplicial_set: false,
            simplex: s,
        }));
    }
    if let Some(s) = first_missing(cech.iter(), |s| vr2.contains(s)) {
        return Ok(Some(SandwichViolation {
            step: SandwichStep::CechInComposite,
            simplicial_set: false,
            simplex: s,
        }));
    }
    let evr = build_simpset(
        &SubsetFamilyFlavor::new(FamilyKind::VietorisRips, u.clone()),
        dim_cap,
    )?;
    let ecech = build_simpset(
        &SubsetFamilyFlavor::new(FamilyKind::Cech, u.clone()),
        dim_cap,
    )?;
    let evr2 = build_simpset(
        &SubsetFamilyFlavor::new(FamilyKind::VietorisRips, uu),
        dim_cap,
    )?;
    if let Some(s) = first_missing(evr.iter(), |s| ecech.contains(s)) {
        return Ok(Some(SandwichViolation {
            step: SandwichStep::VrInCech,
            simplicial_set: true,
            simplex: s,
        }));
    }
    if let Some(s) = first_missing(ecech.iter(), |s| evr2.contains(s)) {
        return Ok(Some(SandwichViolation {
            step: SandwichStep::CechInComposite,
            simplicial_set: true,
            simplex: s,
        }));
    }
    Ok(None)
}
