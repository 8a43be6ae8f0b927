//! Barycentric subdivision, the least-vertex map `γ`, contiguity, the
//! close-maps lemma, and the filling constructions of the connected-group
//! argument.
//!
//! Barycenters get content-addressed labels, so `Sd^n X` is reproducible and
//! its ground order is the canonical barycenter order: by dimension, then by
//! the least vertex of the symmetric difference.

use std::collections::VecDeque;

use rayon::prelude::*;
use thiserror::Error;

use crate::coarse::{check_close, same_ground, CoarseError, Entourage, GroundSet, PointMap};
use crate::complexes::{build_vr_complex, ComplexError, Simplex, SimplicialComplex};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("cannot subdivide an empty complex")]
    Empty,
    #[error("vertex map has {got} images for a ground set of size {want}")]
    WrongLength { got: usize, want: usize },
    #[error("image of {simplex:?} is {image:?}, which is not a target simplex")]
    NonSimplicial { simplex: Simplex, image: Simplex },
    #[error("maps do not share source and target")]
    Mismatch,
    #[error("maps are not close for the given entourage")]
    NotClose,
    #[error("maps are not contiguous: {0:?} violates")]
    NotContiguous(Simplex),
    #[error("filling disagrees with the boundary map at vertex {0}")]
    FillingMismatch(u32),
    #[error("overwritten filling is not simplicial: {simplex:?} goes to {image:?}")]
    FillingNotSimplicial { simplex: Simplex, image: Simplex },
    #[error("base complex must be a full simplex")]
    NotASimplex,
    #[error("level {0} is outside the subdivision tower")]
    LevelOutOfRange(usize),
    #[error("points {0} and {1} are not connected at the fine scale")]
    Disconnected(usize, usize),
    #[error("points {0} and {1} are not related at the coarse scale")]
    NotCoarse(usize, usize),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn image_set(images: &[u32], s: &[u32]) -> Simplex {
    let mut img: Simplex = s.iter().map(|&v| images[v as usize]).collect();
    img.sort_unstable();
    img.dedup();
    img
}

/// A vertex map between complexes that sends simplices to simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMap {
    source: SimplicialComplex,
    target: SimplicialComplex,
    /// Indexed by source ground point.
    images: Vec<u32>,
}

impl SimplicialMap {
    pub fn new(
        source: &SimplicialComplex,
        target: &SimplicialComplex,
        images: Vec<u32>,
    ) -> Result<Self, SubdivisionError> {
        if images.len() != source.ground().len() {
            return Err(SubdivisionError::WrongLength {
                got: images.len(),
                want: source.ground().len(),
            });
        }
        let n = target.ground().len() as u32;
        if let Some(&v) = images.iter().find(|&&v| v >= n) {
            return Err(SubdivisionError::NonSimplicial {
                simplex: vec![],
                image: vec![v],
            });
        }
        let bad = source
            .iter()
            .collect::<Vec<_>>()
            .par_iter()
            .find_first(|s| !target.contains(&image_set(&images, s)))
            .map(|s| (*s).clone());
        if let Some(s) = bad {
            let image = image_set(&images, &s);
            return Err(SubdivisionError::NonSimplicial { simplex: s, image });
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            images,
        })
    }

    pub fn identity(x: &SimplicialComplex) -> Self {
        Self {
            source: x.clone(),
            target: x.clone(),
            images: (0..x.ground().len() as u32).collect(),
        }
    }

    pub fn source(&self) -> &SimplicialComplex {
        &self.source
    }

    pub fn target(&self) -> &SimplicialComplex {
        &self.target
    }

    pub fn vertex_images(&self) -> &[u32] {
        &self.images
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.images[v as usize]
    }

    /// Image vertex set of a source simplex.
    pub fn image_of(&self, s: &[u32]) -> Simplex {
        image_set(&self.images, s)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &SimplicialMap) -> Result<SimplicialMap, SubdivisionError> {
        if !same_ground(self.target.ground(), next.source.ground())
            || !self.target.is_subcomplex_of(&next.source)
        {
            return Err(SubdivisionError::Mismatch);
        }
        Ok(SimplicialMap {
            source: self.source.clone(),
            target: next.target.clone(),
            images: self
                .images
                .iter()
                .map(|&v| next.images[v as usize])
                .collect(),
        })
    }

    /// Same vertex map into a larger target.
    pub fn with_target(
        &self,
        target: &SimplicialComplex,
    ) -> Result<SimplicialMap, SubdivisionError> {
        SimplicialMap::new(&self.source, target, self.images.clone())
    }

    /// Restriction to a subcomplex of the source.
    pub fn restrict_to(&self, sub: &SimplicialComplex) -> Result<SimplicialMap, SubdivisionError> {
        if !sub.is_subcomplex_of(&self.source) {
            return Err(SubdivisionError::Mismatch);
        }
        Ok(SimplicialMap {
            source: sub.clone(),
            target: self.target.clone(),
            images: self.images.clone(),
        })
    }
}

/// Encodes a simplex of labelled points as a barycenter label.
fn barycenter_label(ground: &GroundSet, s: &[u32]) -> String {
    let mut out = String::from("(");
    for (i, &v) in s.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        for ch in ground.label(v as usize).chars() {
            if matches!(ch, '\\' | ',' | '(' | ')') {
                out.push('\\');
            }
            out.push(ch);
        }
    }
    out.push(')');
    out
}

/// One subdivision step: the complex of flags plus vertex carriers.
fn subdivide_once(
    x: &SimplicialComplex,
) -> Result<(SimplicialComplex, Vec<Simplex>, Vec<usize>), SubdivisionError> {
    if x.is_empty() {
        return Err(SubdivisionError::Empty);
    }
    let carriers: Vec<Simplex> = x.iter().cloned().collect();
    let labels: Vec<String> = carriers
        .iter()
        .map(|s| barycenter_label(x.ground(), s))
        .collect();
    let ground = GroundSet::new(labels)?;
    let counts = x.counts();
    let mut offsets = vec![0usize; counts.len()];
    for d in 1..counts.len() {
        offsets[d] = offsets[d - 1] + counts[d - 1];
    }
    let bary = |s: &[u32]| -> u32 {
        (offsets[s.len() - 1] + x.index_of(s).expect("face of stored simplex")) as u32
    };

    // flags ending at each simplex, built dimension by dimension
    let mut flags_at: Vec<Vec<Vec<Simplex>>> = Vec::with_capacity(counts.len());
    for d in 0..counts.len() {
        let level: Vec<Vec<Simplex>> = x
            .simplices(d)
            .par_iter()
            .map(|s| {
                let top = bary(s);
                let mut out = vec![vec![top]];
                let k = s.len();
                for mask in 1..(1u32 << k) - 1 {
                    let face: Simplex = (0..k)
                        .filter(|&i| mask & (1 << i) != 0)
                        .map(|i| s[i])
                        .collect();
                    let fd = face.len() - 1;
                    let fi = x.index_of(&face).expect("downward closed");
                    for fl in &flags_at[fd][fi] {
                        let mut f = fl.clone();
                        f.push(top);
                        out.push(f);
                    }
                }
                out
            })
            .collect();
        flags_at.push(level);
    }
    let mut by_dim: Vec<Vec<Simplex>> = vec![Vec::new(); x.dim_cap() + 1];
    for f in flags_at.into_iter().flatten().flatten() {
        by_dim[f.len() - 1].push(f);
    }
    for l in &mut by_dim {
        l.par_sort_unstable();
    }
    Ok((
        SimplicialComplex::from_sorted(&ground, x.dim_cap(), by_dim),
        carriers,
        offsets,
    ))
}

/// `Sd^n X` together with every intermediate level.
#[derive(Clone, Debug)]
pub struct SubdividedComplex {
    levels: Vec<SimplicialComplex>,
    /// `carriers[i][v]`: the simplex of level `i` whose barycenter is vertex `v` of level `i+1`.
    carriers: Vec<Vec<Simplex>>,
    offsets: Vec<Vec<usize>>,
    /// `support[i][v]`: the simplex of the base carrying vertex `v` of level `i`.
    support: Vec<Vec<Simplex>>,
}

/// One barycentric subdivision.
pub fn subdivide(x: &SimplicialComplex) -> Result<SubdividedComplex, SubdivisionError> {
    subdivide_n(x, 1)
}

/// `n`-fold barycentric subdivision.
pub fn subdivide_n(x: &SimplicialComplex, n: usize) -> Result<SubdividedComplex, SubdivisionError> {
    if x.is_empty() {
        return Err(SubdivisionError::Empty);
    }
    let base_support: Vec<Simplex> = (0..x.ground().len() as u32).map(|v| vec![v]).collect();
    let mut sd = SubdividedComplex {
        levels: vec![x.clone()],
        carriers: Vec::new(),
        offsets: Vec::new(),
        support: vec![base_support],
    };
    for _ in 0..n {
        sd.push_level()?;
    }
    Ok(sd)
}

impl SubdividedComplex {
    fn push_level(&mut self) -> Result<(), SubdivisionError> {
        let top = self.levels.last().expect("base level");
        let (next, carriers, offsets) = subdivide_once(top)?;
        let prev = self.support.last().expect("base support");
        let support = carriers
            .iter()
            .map(|c| {
                let mut s: Simplex = c
                    .iter()
                    .flat_map(|&v| prev[v as usize].iter().copied())
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .collect();
        self.levels.push(next);
        self.carriers.push(carriers);
        self.offsets.push(offsets);
        self.support.push(support);
        Ok(())
    }

    /// Subdivides the top level once more.
    pub fn subdivide_again(&self) -> Result<Self, SubdivisionError> {
        let mut s = self.clone();
        s.push_level()?;
        Ok(s)
    }

    pub fn base(&self) -> &SimplicialComplex {
        &self.levels[0]
    }

    /// Number of subdivisions applied.
    pub fn level(&self) -> usize {
        self.levels.len() - 1
    }

    /// The top level `Sd^n X`.
    pub fn complex(&self) -> &SimplicialComplex {
        self.levels.last().expect("base level")
    }

    /// `Sd^i X` for `i ≤ level`.
    pub fn at(&self, i: usize) -> Result<&SimplicialComplex, SubdivisionError> {
        self.levels
            .get(i)
            .ok_or(SubdivisionError::LevelOutOfRange(i))
    }

    /// The simplex of level `i` whose barycenter is vertex `v` of level `i+1`.
    pub fn carrier(&self, i: usize, v: u32) -> &Simplex {
        &self.carriers[i][v as usize]
    }

    /// Vertex of level `i+1` that is the barycenter of simplex `s` of level `i`.
    pub fn barycenter(&self, i: usize, s: &[u32]) -> Option<u32> {
        let idx = self.levels.get(i)?.index_of(s)?;
        Some((self.offsets[i][s.len() - 1] + idx) as u32)
    }

    /// Smallest base simplex containing vertex `v` of level `i`.
    pub fn base_support(&self, i: usize, v: u32) -> &Simplex {
        &self.support[i][v as usize]
    }

    /// Subcomplex of level `i` subdividing the given subcomplex of the base.
    pub fn subdivided_subcomplex(
        &self,
        i: usize,
        sub: &SimplicialComplex,
    ) -> Result<SimplicialComplex, SubdivisionError> {
        let lvl = self.at(i)?;
        // a simplex lies over the union of its vertices' supports
        let kept = lvl.iter().filter(|s| {
            let mut support: Vec<u32> = s
                .iter()
                .flat_map(|&v| self.support[i][v as usize].iter().copied())
                .collect();
            support.sort_unstable();
            support.dedup();
            sub.contains(&support)
        });
        Ok(SimplicialComplex::from_simplices(
            lvl.ground(),
            lvl.dim_cap(),
            kept.cloned(),
        )?)
    }

    /// `Sd^i ∂Δ^m` when the base is a single simplex `Δ^m`, `m ≥ 1`.
    pub fn simplex_boundary(&self, i: usize) -> Result<SimplicialComplex, SubdivisionError> {
        let base = self.base();
        let m = base.ground().len();
        if m < 2 || base.simplices(m - 1).len() != 1 {
            return Err(SubdivisionError::NotASimplex);
        }
        let full: Simplex = (0..m as u32).collect();
        let boundary = SimplicialComplex::from_simplices(
            base.ground(),
            m - 2,
            (0..m).map(|skip| {
                full.iter()
                    .copied()
                    .filter(|&v| v as usize != skip)
                    .collect()
            }),
        )?;
        self.subdivided_subcomplex(i, &boundary)
    }
}

/// `γ: Sd^{i+1} X → Sd^i X`, sending `b_σ` to `min σ`.
pub fn gamma_at(sd: &SubdividedComplex, i: usize) -> Result<SimplicialMap, SubdivisionError> {
    if i >= sd.level() {
        return Err(SubdivisionError::LevelOutOfRange(i + 1));
    }
    let images = sd.carriers[i].iter().map(|c| c[0]).collect();
    SimplicialMap::new(&sd.levels[i + 1], &sd.levels[i], images)
}

/// `γ_X: Sd X → X` for a single subdivision of `x`.
pub fn gamma(x: &SimplicialComplex) -> Result<SimplicialMap, SubdivisionError> {
    gamma_at(&subdivide(x)?, 0)
}

/// `γ^{to−from}: Sd^to X → Sd^from X`, composed level by level.
pub fn gamma_n(
    sd: &SubdividedComplex,
    from: usize,
    to: usize,
) -> Result<SimplicialMap, SubdivisionError> {
    if from > to || to > sd.level() {
        return Err(SubdivisionError::LevelOutOfRange(to));
    }
    let mut map = SimplicialMap::identity(&sd.levels[to]);
    for i in (from..to).rev() {
        map = map.then(&gamma_at(sd, i)?)?;
    }
    Ok(map)
}

/// `Sd(f): Sd X → Sd Y`, `b_σ ↦ b_{f(σ)}`, for one-level towers over the
/// source and target of `f`.
pub fn subdivide_map(
    f: &SimplicialMap,
    sd_x: &SubdividedComplex,
    sd_y: &SubdividedComplex,
) -> Result<SimplicialMap, SubdivisionError> {
    if sd_x.level() < 1
        || sd_y.level() < 1
        || sd_x.base() != f.source()
        || sd_y.base() != f.target()
    {
        return Err(SubdivisionError::Mismatch);
    }
    let images = sd_x.carriers[0]
        .iter()
        .map(|s| sd_y.barycenter(0, &f.image_of(s)).expect("f is simplicial"))
        .collect();
    SimplicialMap::new(sd_x.at(1)?, sd_y.at(1)?, images)
}

/// First source simplex `σ` with `f(σ) ∪ g(σ)` not a target simplex.
pub fn check_contiguous(
    f: &SimplicialMap,
    g: &SimplicialMap,
) -> Result<Option<Simplex>, SubdivisionError> {
    if f.source != g.source || !same_ground(f.target.ground(), g.target.ground()) {
        return Err(SubdivisionError::Mismatch);
    }
    Ok(contiguity_witness(f, g, &f.target))
}

fn contiguity_witness(
    f: &SimplicialMap,
    g: &SimplicialMap,
    target: &SimplicialComplex,
) -> Option<Simplex> {
    f.source
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .find_first(|s| {
            let mut u = f.image_of(s);
            u.extend(g.image_of(s));
            u.sort_unstable();
            u.dedup();
            !target.contains(&u)
        })
        .map(|s| (*s).clone())
}

/// Result of checking `f(s) ∪ g(s) ∈ VR_{V∘W}` on every simplex `s` of `VR_u`.
#[derive(Clone, Debug)]
pub struct CloseMapsReport {
    /// `V = (f×f)(u) ∪ (g×g)(u)`.
    pub v: Entourage,
    /// `V ∘ W`.
    pub vw: Entourage,
    pub simplices_checked: usize,
    pub violation: Option<Simplex>,
}

impl CloseMapsReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// For `W`-close maps `f, g`, verifies that they are contiguous as maps
/// `VR_u(source) → VR_{V∘W}(target)`.
pub fn combine_close_maps(
    f: &PointMap,
    g: &PointMap,
    u: &Entourage,
    w: &Entourage,
    dim_cap: usize,
) -> Result<CloseMapsReport, SubdivisionError> {
    if !check_close(f, g, w)? {
        return Err(SubdivisionError::NotClose);
    }
    let v = u.image(f)?.union(&u.image(g)?)?;
    let vw = v.compose(w)?;
    let source = build_vr_complex(u, dim_cap)?;
    let simplices: Vec<&Simplex> = source.iter().collect();
    let violation = simplices
        .par_iter()
        .find_first(|s| {
            let mut pts: Vec<usize> = s
                .iter()
                .flat_map(|&x| [f.apply(x as usize), g.apply(x as usize)])
                .collect();
            pts.sort_unstable();
            pts.dedup();
            !pts.iter().enumerate().all(|(i, &a)| {
                pts[i + 1..]
                    .iter()
                    .all(|&b| vw.contains(a, b) && vw.contains(b, a))
            })
        })
        .map(|s| (*s).clone());
    Ok(CloseMapsReport {
        v,
        vw,
        simplices_checked: simplices.len(),
        violation,
    })
}

/// `d_∞(f, g) = max_v d(f(v), g(v))` over source vertices.
pub fn d_infinity(f: &SimplicialMap, g: &SimplicialMap, d: impl Fn(u32, u32) -> f64) -> f64 {
    f.source
        .vertices()
        .map(|v| d(f.apply(v), g.apply(v)))
        .fold(0.0, f64::max)
}

/// The metric sufficient condition `d_∞(f, g) < ½(r′ − r)` for contiguity into
/// the scale-`r′` complex of maps into the scale-`r` complex.
pub fn half_gap_condition(
    f: &SimplicialMap,
    g: &SimplicialMap,
    d: impl Fn(u32, u32) -> f64,
    r: f64,
    r_prime: f64,
) -> bool {
    d_infinity(f, g, d) < 0.5 * (r_prime - r)
}

/// Overwrites a filling on the boundary.
///
/// `tower` subdivides `Δ^m` to level `ℓ`; `f` and `g` are defined on
/// `Sd^k ∂Δ^m` (as subcomplex of level `k`), `f_hat` on `Sd^ℓ Δ^m` restricting
/// to `f ∘ γ^{ℓ−k}` on the boundary. Returns `ĝ` equal to `g ∘ γ^{ℓ−k}` on
/// boundary vertices and to `f_hat` elsewhere, as a map into `coarse_target`.
pub fn perturb_filling(
    tower: &SubdividedComplex,
    k: usize,
    f: &SimplicialMap,
    f_hat: &SimplicialMap,
    g: &SimplicialMap,
    coarse_target: &SimplicialComplex,
) -> Result<SimplicialMap, SubdivisionError> {
    let base = tower.base();
    let m = base.ground().len();
    if m < 2 || base.simplices(m - 1).len() != 1 {
        return Err(SubdivisionError::NotASimplex);
    }
    let l = tower.level();
    if k > l {
        return Err(SubdivisionError::LevelOutOfRange(k));
    }
    let boundary_k = tower.simplex_boundary(k)?;
    if f.source() != &boundary_k || g.source() != &boundary_k || f_hat.source() != tower.complex() {
        return Err(SubdivisionError::Mismatch);
    }
    for t in [f.target(), g.target(), f_hat.target()] {
        if !t.is_subcomplex_of(coarse_target) {
            return Err(SubdivisionError::Mismatch);
        }
    }
    let fc = f.with_target(coarse_target)?;
    let gc = g.with_target(coarse_target)?;
    if let Some(s) = contiguity_witness(&fc, &gc, coarse_target) {
        return Err(SubdivisionError::NotContiguous(s));
    }
    let down = gamma_n(tower, k, l)?;
    let n_top = tower.complex().ground().len();
    let mut images = Vec::with_capacity(n_top);
    for v in 0..n_top as u32 {
        let on_boundary = tower.base_support(l, v).len() < m;
        if on_boundary {
            let below = down.apply(v);
            if f_hat.apply(v) != f.apply(below) {
                return Err(SubdivisionError::FillingMismatch(v));
            }
            images.push(g.apply(below));
        } else {
            images.push(f_hat.apply(v));
        }
    }
    SimplicialMap::new(tower.complex(), coarse_target, images).map_err(|e| match e {
        SubdivisionError::NonSimplicial { simplex, image } => {
            SubdivisionError::FillingNotSimplicial { simplex, image }
        }
        other => other,
    })
}

/// A fine-scale path filling a coarse edge.
#[derive(Clone, Debug)]
pub struct EdgePathFilling {
    /// Fine-graph distance between the endpoints.
    pub length: usize,
    /// Subdivision level `N` with `2^N ≥ length`.
    pub level: usize,
    /// `2^N + 1` points from `x` to `y`, padded at the tail.
    pub path: Vec<usize>,
    /// `Sd^N Δ¹ → VR_fine`, vertices in path order.
    pub map: SimplicialMap,
}

/// Path of each vertex of `Sd^N Δ¹` from the first endpoint, in units of `2^{−N}`.
fn positions_on_edge(tower: &SubdividedComplex) -> Vec<usize> {
    let n = tower.level();
    let mut pos: Vec<usize> = vec![0, 1 << n];
    for i in 0..n {
        pos = tower.carriers[i]
            .iter()
            .map(|c| c.iter().map(|&v| pos[v as usize]).sum::<usize>() / c.len())
            .collect();
    }
    pos
}

/// Breadth-first fine path from `x` to `y`, subdivided edge, tail padding.
pub fn fill_edge_path(
    x: usize,
    y: usize,
    fine: &Entourage,
    coarse: &Entourage,
) -> Result<EdgePathFilling, SubdivisionError> {
    if !same_ground(fine.ground(), coarse.ground()) {
        return Err(SubdivisionError::Mismatch);
    }
    let ground = fine.ground();
    let n = ground.len();
    if x >= n || y >= n {
        return Err(CoarseError::PointOutOfRange {
            index: x.max(y),
            size: n,
        }
        .into());
    }
    if !coarse.contains(x, y) {
        return Err(SubdivisionError::NotCoarse(x, y));
    }
    let mut prev = vec![usize::MAX; n];
    prev[x] = x;
    let mut q = VecDeque::from([x]);
    while let Some(a) = q.pop_front() {
        if a == y {
            break;
        }
        for b in fine.row(a).iter() {
            if b != a && prev[b] == usize::MAX && fine.contains(b, a) {
                prev[b] = a;
                q.push_back(b);
            }
        }
    }
    if prev[y] == usize::MAX {
        return Err(SubdivisionError::Disconnected(x, y));
    }
    let mut path = vec![y];
    while *path.last().expect("nonempty") != x {
        let p = prev[*path.last().expect("nonempty")];
        path.push(p);
    }
    path.reverse();
    let length = path.len() - 1;
    let level = if length <= 1 {
        0
    } else {
        length.next_power_of_two().trailing_zeros() as usize
    };
    let last = *path.last().expect("nonempty");
    path.resize((1 << level) + 1, last);

    let edge = SimplicialComplex::standard_simplex(1);
    let tower = subdivide_n(&edge, level)?;
    let pos = positions_on_edge(&tower);
    let images = pos.iter().map(|&p| path[p] as u32).collect();
    let target = build_vr_complex(fine, 1)?;
    let map = SimplicialMap::new(tower.complex(), &target, images)?;
    Ok(EdgePathFilling {
        length,
        level,
        path,
        map,
    })
}

/// Checks that two maps become contiguous after enlarging the target,
/// reporting the first obstruction.
pub fn contiguous_into(
    f: &SimplicialMap,
    g: &SimplicialMap,
    larger: &SimplicialComplex,
) -> Result<Option<Simplex>, SubdivisionError> {
    if f.source != g.source
        || !f.target.is_subcomplex_of(larger)
        || !g.target.is_subcomplex_of(larger)
    {
        return Err(SubdivisionError::Mismatch);
    }
    Ok(contiguity_witness(f, g, larger))
}

/// Position of each vertex of `Sd^N Δ¹` along the edge, in units of `2^{−N}`.
pub fn edge_positions(tower: &SubdividedComplex) -> Vec<usize> {
    positions_on_edge(tower)
}
