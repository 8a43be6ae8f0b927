//! Finite coarse spaces: ground sets, entourages, nested entourage schedules
//! and the maps between them.
//!
//! A coarse structure is an infinite ideal of relations; at desk scale it is
//! replaced by a finite increasing schedule `U_1 ⊆ … ⊆ U_m`. Every check in
//! this module is therefore a statement "on the window" of the schedule.
//! Stage numbers in reports are 1-based.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSet;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoarseError {
    #[error("ground set mismatch: {0}")]
    GroundMismatch(String),
    #[error("duplicate point identifier {0:?}")]
    DuplicatePoint(String),
    #[error("point index {index} out of range for ground set of size {size}")]
    PointOutOfRange { index: usize, size: usize },
    #[error("schedule is not nested: stage {stage} is not contained in stage {next}")]
    NotNested { stage: usize, next: usize },
    #[error("stage {stage} is not a normalized entourage (needs diagonal and symmetry)")]
    NotNormalized { stage: usize },
    #[error("schedule has no stages")]
    EmptySchedule,
    #[error("map composition mismatch: {0}")]
    CompositionMismatch(String),
}

/// An ordered finite set of opaque point identifiers.
///
/// Points are referred to by their position; the position order is the
/// strict total order used as vertex order everywhere downstream.
#[derive(Debug, PartialEq, Eq)]
pub struct GroundSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl GroundSet {
    pub fn new<I, S>(labels: I) -> Result<Arc<Self>, CoarseError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::with_capacity(labels.len());
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(CoarseError::DuplicatePoint(l.clone()));
            }
        }
        Ok(Arc::new(Self { labels, index }))
    }

    /// Points labelled `0..n`.
    pub fn range(n: usize) -> Arc<Self> {
        Self::new((0..n).map(|i| i.to_string())).expect("distinct labels")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

pub(crate) fn same_ground(a: &Arc<GroundSet>, b: &Arc<GroundSet>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn require_same(a: &Arc<GroundSet>, b: &Arc<GroundSet>, what: &str) -> Result<(), CoarseError> {
    if same_ground(a, b) {
        Ok(())
    } else {
        Err(CoarseError::GroundMismatch(what.to_string()))
    }
}

/// A relation on a ground set stored as a dense boolean matrix.
///
/// Entourages built by [`Entourage::normalize`] (or the threshold builders)
/// carry the `normalized` flag: they contain the diagonal and are symmetric.
/// Raw relations may be anything.
#[derive(Clone, PartialEq, Eq)]
pub struct Entourage {
    ground: Arc<GroundSet>,
    rows: Vec<BitSet>,
    normalized: bool,
}

impl std::fmt::Debug for Entourage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Entourage")
            .field("points", &self.ground.len())
            .field("pairs", &self.pair_count())
            .field("normalized", &self.normalized)
            .finish()
    }
}

impl Entourage {
    pub fn empty(ground: &Arc<GroundSet>) -> Self {
        let n = ground.len();
        Self {
            ground: ground.clone(),
            rows: vec![BitSet::new(n); n],
            normalized: false,
        }
    }

    pub fn diagonal(ground: &Arc<GroundSet>) -> Self {
        let mut e = Self::empty(ground);
        for i in 0..ground.len() {
            e.rows[i].insert(i);
        }
        e.normalized = true;
        e
    }

    pub fn full(ground: &Arc<GroundSet>) -> Self {
        let n = ground.len();
        Self {
            ground: ground.clone(),
            rows: vec![BitSet::full(n); n],
            normalized: true,
        }
    }

    /// A raw relation from explicit pairs.
    pub fn from_pairs<I>(ground: &Arc<GroundSet>, pairs: I) -> Result<Self, CoarseError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = ground.len();
        let mut e = Self::empty(ground);
        for (a, b) in pairs {
            for x in [a, b] {
                if x >= n {
                    return Err(CoarseError::PointOutOfRange { index: x, size: n });
                }
            }
            e.rows[a].insert(b);
        }
        Ok(e)
    }

    /// A raw relation from a membership predicate.
    pub fn from_predicate(
        ground: &Arc<GroundSet>,
        mut pred: impl FnMut(usize, usize) -> bool,
    ) -> Self {
        let n = ground.len();
        let mut e = Self::empty(ground);
        for a in 0..n {
            for b in 0..n {
                if pred(a, b) {
                    e.rows[a].insert(b);
                }
            }
        }
        e
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    #[inline]
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.rows[a].contains(b)
    }

    /// The row `{b : (a, b) ∈ U}`.
    pub fn row(&self, a: usize) -> &BitSet {
        &self.rows[a]
    }

    pub fn pair_count(&self) -> usize {
        self.rows.iter().map(BitSet::count).sum()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(a, r)| r.iter().map(move |b| (a, b)))
    }

    pub fn inverse(&self) -> Self {
        let n = self.ground.len();
        let mut e = Self::empty(&self.ground);
        for (a, b) in self.pairs() {
            e.rows[b].insert(a);
        }
        e.normalized = self.normalized;
        debug_assert_eq!(e.rows.len(), n);
        e
    }

    pub fn union(&self, other: &Self) -> Result<Self, CoarseError> {
        require_same(&self.ground, &other.ground, "union")?;
        let mut e = self.clone();
        for (r, o) in e.rows.iter_mut().zip(&other.rows) {
            r.union_with(o);
        }
        e.normalized = self.normalized && other.normalized;
        Ok(e)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, CoarseError> {
        require_same(&self.ground, &other.ground, "intersection")?;
        let mut e = self.clone();
        for (r, o) in e.rows.iter_mut().zip(&other.rows) {
            r.intersect_with(o);
        }
        e.normalized = self.normalized && other.normalized;
        Ok(e)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        same_ground(&self.ground, &other.ground)
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.is_subset(b))
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.ground.len()).all(|i| self.rows[i].contains(i))
    }

    pub fn is_symmetric(&self) -> bool {
        self.pairs().all(|(a, b)| self.contains(b, a))
    }

    /// `U ∪ U⁻¹ ∪ Δ`. Idempotent.
    pub fn normalize(&self) -> Self {
        let mut e = self.clone();
        for (a, b) in self.pairs() {
            e.rows[b].insert(a);
        }
        for i in 0..self.ground.len() {
            e.rows[i].insert(i);
        }
        e.normalized = true;
        e
    }

    /// `(U ∩ U⁻¹) ∪ Δ`.
    pub fn normalize_strict(&self) -> Self {
        let mut e = Self::diagonal(&self.ground);
        for (a, b) in self.pairs() {
            if self.contains(b, a) {
                e.rows[a].insert(b);
            }
        }
        e
    }

    /// `U ∘ V = {(a, c) : ∃ b (a, b) ∈ U, (b, c) ∈ V}`.
    ///
    /// The result is re-normalized only when both inputs were normalized;
    /// otherwise the raw composite is returned with the flag cleared.
    pub fn compose(&self, other: &Self) -> Result<Self, CoarseError> {
        require_same(&self.ground, &other.ground, "composition")?;
        let n = self.ground.len();
        let mut e = Self::empty(&self.ground);
        for a in 0..n {
            let mut acc = BitSet::new(n);
            for b in self.rows[a].iter() {
                acc.union_with(&other.rows[b]);
            }
            e.rows[a] = acc;
        }
        if self.normalized && other.normalized {
            Ok(e.normalize())
        } else {
            Ok(e)
        }
    }

    /// `(f × f)(U)` as a raw relation on the target of `f`.
    pub fn image(&self, f: &PointMap) -> Result<Self, CoarseError> {
        require_same(
            &self.ground,
            f.source(),
            "image: relation does not live on the map's source",
        )?;
        let mut e = Self::empty(f.target());
        for (a, b) in self.pairs() {
            e.rows[f.apply(a)].insert(f.apply(b));
        }
        Ok(e)
    }
}

/// A nested sequence of normalized entourages `U_1 ⊆ … ⊆ U_m`.
#[derive(Clone, Debug)]
pub struct EntourageSchedule {
    ground: Arc<GroundSet>,
    stages: Vec<Entourage>,
}

impl EntourageSchedule {
    pub fn new(stages: Vec<Entourage>) -> Result<Self, CoarseError> {
        let first = stages.first().ok_or(CoarseError::EmptySchedule)?;
        let ground = first.ground.clone();
        for (i, s) in stages.iter().enumerate() {
            require_same(
                &ground,
                &s.ground,
                "schedule stages must share a ground set",
            )?;
            if !(s.is_reflexive() && s.is_symmetric()) {
                return Err(CoarseError::NotNormalized { stage: i + 1 });
            }
        }
        for (i, w) in stages.windows(2).enumerate() {
            if !w[0].is_subset_of(&w[1]) {
                return Err(CoarseError::NotNested {
                    stage: i + 1,
                    next: i + 2,
                });
            }
        }
        let stages = stages
            .into_iter()
            .map(|mut s| {
                s.normalized = true;
                s
            })
            .collect();
        Ok(Self { ground, stages })
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    pub fn stages(&self) -> &[Entourage] {
        &self.stages
    }

    /// Stage by 1-based number.
    pub fn stage(&self, number: usize) -> &Entourage {
        &self.stages[number - 1]
    }

    /// Least stage number whose entourage contains `rel`.
    pub fn least_containing(&self, rel: &Entourage) -> Option<usize> {
        self.stages
            .iter()
            .position(|s| rel.is_subset_of(s))
            .map(|i| i + 1)
    }

    /// The schedule restricted to its first `m` stages.
    pub fn truncated(&self, m: usize) -> Self {
        Self {
            ground: self.ground.clone(),
            stages: self.stages[..m.min(self.stages.len())].to_vec(),
        }
    }
}

/// A total function between ground sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointMap {
    source: Arc<GroundSet>,
    target: Arc<GroundSet>,
    images: Vec<usize>,
}

impl PointMap {
    pub fn new(
        source: &Arc<GroundSet>,
        target: &Arc<GroundSet>,
        images: Vec<usize>,
    ) -> Result<Self, CoarseError> {
        if images.len() != source.len() {
            return Err(CoarseError::GroundMismatch(format!(
                "map has {} images for {} source points",
                images.len(),
                source.len()
            )));
        }
        if let Some(&bad) = images.iter().find(|&&y| y >= target.len()) {
            return Err(CoarseError::PointOutOfRange {
                index: bad,
                size: target.len(),
            });
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn from_fn(
        source: &Arc<GroundSet>,
        target: &Arc<GroundSet>,
        f: impl FnMut(usize) -> usize,
    ) -> Result<Self, CoarseError> {
        Self::new(source, target, (0..source.len()).map(f).collect())
    }

    pub fn identity(ground: &Arc<GroundSet>) -> Self {
        Self {
            source: ground.clone(),
            target: ground.clone(),
            images: (0..ground.len()).collect(),
        }
    }

    /// Maps each source point to the target point with the same label.
    pub fn inclusion_by_label(
        source: &Arc<GroundSet>,
        target: &Arc<GroundSet>,
    ) -> Result<Self, CoarseError> {
        let images = source
            .labels()
            .iter()
            .map(|l| {
                target.position(l).ok_or_else(|| {
                    CoarseError::GroundMismatch(format!("point {l:?} missing from target"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(source, target, images)
    }

    pub fn source(&self) -> &Arc<GroundSet> {
        &self.source
    }

    pub fn target(&self) -> &Arc<GroundSet> {
        &self.target
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &PointMap) -> Result<PointMap, CoarseError> {
        if !same_ground(&self.target, &next.source) {
            return Err(CoarseError::CompositionMismatch(
                "target of the first map is not the source of the second".into(),
            ));
        }
        Ok(PointMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self.images.iter().map(|&y| next.images[y]).collect(),
        })
    }
}

/// For each source stage, the least target stage containing its image.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BornologousReport {
    pub witnesses: Vec<Option<usize>>,
}

impl BornologousReport {
    pub fn is_bornologous_on_window(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }
}

pub fn check_bornologous(
    f: &PointMap,
    src: &EntourageSchedule,
    tgt: &EntourageSchedule,
) -> Result<BornologousReport, CoarseError> {
    require_same(f.source(), src.ground(), "map source vs source schedule")?;
    require_same(f.target(), tgt.ground(), "map target vs target schedule")?;
    let witnesses = src
        .stages()
        .iter()
        .map(|u| u.image(f).map(|img| tgt.least_containing(&img)))
        .collect::<Result<_, _>>()?;
    Ok(BornologousReport { witnesses })
}

/// Whether every pair `(f(x), g(x))` lies in `w ∩ w⁻¹`.
pub fn check_close(f: &PointMap, g: &PointMap, w: &Entourage) -> Result<bool, CoarseError> {
    require_same(f.source(), g.source(), "close maps need a common source")?;
    require_same(f.target(), g.target(), "close maps need a common target")?;
    require_same(f.target(), w.ground(), "entourage must live on the target")?;
    Ok((0..f.source().len()).all(|x| {
        let (a, b) = (f.apply(x), g.apply(x));
        w.contains(a, b) && w.contains(b, a)
    }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RetractMode {
    Retract,
    Equivalence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RetractReport {
    pub mode: RetractMode,
    /// `i: Y → X` against the schedules.
    pub inclusion: BornologousReport,
    /// `r: X → Y` against the schedules.
    pub retraction: BornologousReport,
    /// Least stage of the Y schedule at which `r ∘ i` is close to `id_Y`.
    pub closeness_stage: Option<usize>,
    /// Least stage of the X schedule at which `i ∘ r` is close to `id_X`
    /// (equivalence mode only).
    pub equivalence_stage: Option<usize>,
}

impl RetractReport {
    pub fn holds(&self) -> bool {
        self.inclusion.is_bornologous_on_window()
            && self.retraction.is_bornologous_on_window()
            && self.closeness_stage.is_some()
            && (self.mode == RetractMode::Retract || self.equivalence_stage.is_some())
    }
}

fn least_close_stage(
    f: &PointMap,
    g: &PointMap,
    s: &EntourageSchedule,
) -> Result<Option<usize>, CoarseError> {
    for (k, w) in s.stages().iter().enumerate() {
        if check_close(f, g, w)? {
            return Ok(Some(k + 1));
        }
    }
    Ok(None)
}

/// Checks that `Y` is a coarse retract of `X` on the window of the given
/// schedules, with `i: Y → X` and `r: X → Y`.
pub fn check_coarse_retract(
    i: &PointMap,
    r: &PointMap,
    xs: &EntourageSchedule,
    ys: &EntourageSchedule,
    mode: RetractMode,
) -> Result<RetractReport, CoarseError> {
    let ri = i.then(r)?;
    let inclusion = check_bornologous(i, ys, xs)?;
    let retraction = check_bornologous(r, xs, ys)?;
    let closeness_stage = least_close_stage(&PointMap::identity(ys.ground()), &ri, ys)?;
    let equivalence_stage = match mode {
        RetractMode::Retract => None,
        RetractMode::Equivalence => {
            let ir = r.then(i)?;
            least_close_stage(&PointMap::identity(xs.ground()), &ir, xs)?
        }
    };
    Ok(RetractReport {
        mode,
        inclusion,
        retraction,
        closeness_stage,
        equivalence_stage,
    })
}
