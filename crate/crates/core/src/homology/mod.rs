//! Chain complexes of built spaces, homology with generators over `F_p` or
//! `Z`, induced maps, the tuple-to-set comparison map, and the homotopy-level
//! checks used by certification (`π₀` exactly, `π₁` by bounded filling).
//!
//! Simplicial sets use normalized chains: degenerate tuples are zero and are
//! never materialized.

mod field;
mod integer;
mod pi;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::complexes::{has_consecutive_repeat, Simplex, Space, TruncatedSimplicialSet};
use crate::subdivision::SimplicialMap;

use field::{FieldDegree, Fp};
use integer::{Dense, IntDegree};

pub use pi::{
    edge_loop_generators, pi0_induced_map, pi1_bounded_fill, FillMove, FillOutcome, Graph,
    MoveKind, Pi0Map,
};

/// A chain: `(basis index, coefficient)` pairs.
pub type Chain = Vec<(u32, i64)>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("invalid coefficient system: {0}")]
    InvalidCoeff(String),
    #[error("degree {degree} needs chains up to degree {needed} but the space stops at {cap}")]
    DegreeOutOfRange {
        degree: usize,
        needed: usize,
        cap: usize,
    },
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundarySquareNonzero(usize),
    #[error("face {face:?} of {simplex:?} is missing")]
    MissingFace { simplex: Simplex, face: Simplex },
    #[error("simplex {0:?} of the source is not in the target")]
    NotIncluded(Simplex),
    #[error("image of {simplex:?} is {image:?}, which is not a target simplex")]
    NonSimplicial { simplex: Simplex, image: Simplex },
    #[error("the two spaces live on different ground sets or have different kinds")]
    Incompatible,
    #[error("coefficient systems differ")]
    CoeffMismatch,
    #[error("chain is not a cycle")]
    NotACycle,
    #[error("integer overflow during diagonalization")]
    Overflow,
    #[error("loop is not closed")]
    LoopNotClosed,
    #[error("loop edge {0}-{1} is not in the target")]
    LoopNotInTarget(u32, u32),
    #[error("vertex {0} of the source is not a vertex of the target")]
    VertexMissing(u32),
}

/// Coefficient system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Coeff {
    #[default]
    Z2,
    Zp(u32),
    Z,
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

impl Coeff {
    pub fn validate(self) -> Result<Self, HomologyError> {
        match self {
            Coeff::Zp(p) if !is_prime(p) || p > 46_337 => Err(HomologyError::InvalidCoeff(
                format!("{p} is not a supported prime"),
            )),
            c => Ok(c),
        }
    }

    /// The characteristic: 0 for the integers.
    pub fn characteristic(self) -> u32 {
        match self {
            Coeff::Z2 => 2,
            Coeff::Zp(p) => p,
            Coeff::Z => 0,
        }
    }

    fn field(self) -> Option<Fp> {
        match self {
            Coeff::Z => None,
            c => Some(Fp {
                p: c.characteristic(),
            }),
        }
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Z2 => write!(f, "z2"),
            Coeff::Zp(p) => write!(f, "zp:{p}"),
            Coeff::Z => write!(f, "z"),
        }
    }
}

impl FromStr for Coeff {
    type Err = HomologyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let c = match s {
            "z2" => Coeff::Z2,
            "z" => Coeff::Z,
            _ => {
                let p = s
                    .strip_prefix("zp:")
                    .and_then(|p| p.parse::<u32>().ok())
                    .ok_or_else(|| HomologyError::InvalidCoeff(s.to_string()))?;
                if p == 2 {
                    Coeff::Z2
                } else {
                    Coeff::Zp(p)
                }
            }
        };
        c.validate()
    }
}

impl Serialize for Coeff {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Sorts a vertex list, returning the sign of the sorting permutation, or
/// `None` when two vertices coincide.
pub fn sort_with_sign(v: &[u32]) -> Option<(Simplex, i64)> {
    let mut s = v.to_vec();
    let mut sign = 1;
    // insertion sort counts transpositions
    for i in 1..s.len() {
        let mut j = i;
        while j > 0 && s[j - 1] > s[j] {
            s.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if s.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some((s, sign))
    }
}

fn normalize_chain(mut c: Chain) -> Chain {
    c.sort_unstable_by_key(|e| e.0);
    let mut out: Chain = Vec::with_capacity(c.len());
    for (i, v) in c {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// Simplicial (or normalized) chains of a built space with integer boundaries.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    space: Space,
    /// `boundaries[k][j]`: boundary of basis element `j` of degree `k`.
    boundaries: Vec<Vec<Chain>>,
}

impl ChainComplex {
    pub fn new(space: &Space) -> Result<Self, HomologyError> {
        let top = space.dim_cap();
        let mut boundaries = vec![Vec::new()];
        for k in 1..=top {
            let cols = space
                .simplices(k)
                .par_iter()
                .map(|s| boundary_of(space, s))
                .collect::<Result<Vec<_>, _>>()?;
            boundaries.push(cols);
        }
        let cc = Self {
            space: space.clone(),
            boundaries,
        };
        for k in 2..=top {
            let ok = (0..cc.rank(k))
                .into_par_iter()
                .all(|j| cc.boundary(k - 1, &cc.boundaries[k][j]).is_empty());
            if !ok {
                return Err(HomologyError::BoundarySquareNonzero(k));
            }
        }
        Ok(cc)
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    /// Highest degree with chains.
    pub fn top(&self) -> usize {
        self.space.dim_cap()
    }

    /// Number of basis elements in degree `k`.
    pub fn rank(&self, k: usize) -> usize {
        self.space.simplices(k).len()
    }

    pub fn basis(&self, k: usize) -> &[Simplex] {
        self.space.simplices(k)
    }

    pub fn boundary_column(&self, k: usize, j: usize) -> &Chain {
        &self.boundaries[k][j]
    }

    /// `∂_k` applied to a degree-`k` chain.
    pub fn boundary(&self, k: usize, c: &[(u32, i64)]) -> Chain {
        if k == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        for &(j, v) in c {
            out.extend(
                self.boundaries[k][j as usize]
                    .iter()
                    .map(|&(i, w)| (i, v * w)),
            );
        }
        normalize_chain(out)
    }

    /// Chain of simplices given explicitly with coefficients.
    pub fn chain_of(&self, terms: &[(Simplex, i64)]) -> Option<Chain> {
        let mut out = Vec::with_capacity(terms.len());
        for (s, v) in terms {
            out.push((self.space.index_of(s)? as u32, *v));
        }
        Some(normalize_chain(out))
    }

    fn same_shape(&self, other: &Self) -> bool {
        crate::coarse::same_ground(self.space.ground(), other.space.ground())
            && self.space.is_simplicial_set() == other.space.is_simplicial_set()
    }
}

fn boundary_of(space: &Space, s: &[u32]) -> Result<Chain, HomologyError> {
    let mut out = Vec::with_capacity(s.len());
    for i in 0..s.len() {
        let mut f = s.to_vec();
        f.remove(i);
        if space.is_simplicial_set() && has_consecutive_repeat(&f) {
            continue;
        }
        let idx = space
            .index_of(&f)
            .ok_or_else(|| HomologyError::MissingFace {
                simplex: s.to_vec(),
                face: f.clone(),
            })?;
        out.push((idx as u32, if i % 2 == 0 { 1 } else { -1 }));
    }
    Ok(normalize_chain(out))
}

enum Engine {
    Field(FieldDegree),
    Int(IntDegree),
}

struct DegreeData {
    engine: Engine,
    orders: Vec<u64>,
}

/// Homology of a chain complex in degrees `0..=max_degree`, with explicit
/// cycle representatives for a basis (field) or generating set (integers).
pub struct Homology {
    chains: Arc<ChainComplex>,
    coeff: Coeff,
    degrees: Vec<DegreeData>,
}

impl fmt::Debug for Homology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Homology")
            .field("coeff", &self.coeff)
            .field("betti", &self.betti())
            .finish()
    }
}

fn check_degree(cc: &ChainComplex, max_degree: usize) -> Result<(), HomologyError> {
    if max_degree + 1 > cc.top() {
        return Err(HomologyError::DegreeOutOfRange {
            degree: max_degree,
            needed: max_degree + 1,
            cap: cc.top(),
        });
    }
    Ok(())
}

impl Homology {
    pub fn compute(
        chains: Arc<ChainComplex>,
        coeff: Coeff,
        max_degree: usize,
    ) -> Result<Self, HomologyError> {
        let coeff = coeff.validate()?;
        check_degree(&chains, max_degree)?;
        let degrees = match coeff.field() {
            Some(fp) => field_degrees(&chains, fp, max_degree),
            None => int_degrees(&chains, max_degree)?,
        };
        Ok(Self {
            chains,
            coeff,
            degrees,
        })
    }

    pub fn of_space(space: &Space, coeff: Coeff, max_degree: usize) -> Result<Self, HomologyError> {
        Self::compute(Arc::new(ChainComplex::new(space)?), coeff, max_degree)
    }

    pub fn chains(&self) -> &Arc<ChainComplex> {
        &self.chains
    }

    pub fn coeff(&self) -> Coeff {
        self.coeff
    }

    pub fn max_degree(&self) -> usize {
        self.degrees.len() - 1
    }

    /// Ranks: field dimension, or the free rank over the integers.
    pub fn betti(&self) -> Vec<usize> {
        self.degrees
            .iter()
            .map(|d| d.orders.iter().filter(|&&o| o == 0).count())
            .collect()
    }

    /// Torsion orders per degree (always empty over a field).
    pub fn torsion(&self) -> Vec<Vec<u64>> {
        self.degrees
            .iter()
            .map(|d| d.orders.iter().copied().filter(|&o| o > 1).collect())
            .collect()
    }

    /// Number of generators in degree `k` (free plus torsion).
    pub fn generator_count(&self, k: usize) -> usize {
        self.degrees[k].orders.len()
    }

    /// Per generator: `0` when it spans a copy of the coefficients, else its torsion order.
    pub fn orders(&self, k: usize) -> &[u64] {
        &self.degrees[k].orders
    }

    pub fn generators(&self, k: usize) -> Vec<Chain> {
        match &self.degrees[k].engine {
            Engine::Field(f) => f.generators().collect(),
            Engine::Int(z) => z.generators().collect(),
        }
    }

    /// Coordinates of the class of a degree-`k` cycle.
    pub fn coordinates(&self, k: usize, chain: &[(u32, i64)]) -> Result<Vec<i64>, HomologyError> {
        let boundary = self.chains.boundary(k, chain);
        let is_cycle = match self.coeff.field() {
            Some(fp) => boundary.iter().all(|&(_, v)| fp.residue(v) == 0),
            None => boundary.is_empty(),
        };
        if !is_cycle {
            return Err(HomologyError::NotACycle);
        }
        match &self.degrees[k].engine {
            Engine::Field(f) => f.coordinates(chain),
            Engine::Int(z) => {
                let mut dense = vec![0i64; self.chains.rank(k)];
                for &(i, v) in chain {
                    dense[i as usize] = dense[i as usize]
                        .checked_add(v)
                        .ok_or(HomologyError::Overflow)?;
                }
                z.coordinates(&dense)
            }
        }
    }

    /// Whether every class in degree `k` is zero.
    pub fn is_trivial(&self, k: usize) -> bool {
        self.degrees[k].orders.is_empty()
    }
}

fn field_columns(cc: &ChainComplex, fp: Fp, d: usize) -> Vec<field::SparseVec> {
    (0..cc.rank(d))
        .map(|j| fp.vec_from_i64(cc.boundary_column(d, j)))
        .collect()
}

fn field_degrees(cc: &ChainComplex, fp: Fp, max_degree: usize) -> Vec<DegreeData> {
    let reductions: Vec<field::Reduction> = (1..=max_degree + 1)
        .into_par_iter()
        .map(|d| field::reduce(fp, field_columns(cc, fp, d), d <= max_degree))
        .collect();
    (0..=max_degree)
        .map(|k| {
            let kernel: Vec<(u32, field::SparseVec)> = if k == 0 {
                (0..cc.rank(0) as u32).map(|j| (j, vec![(j, 1)])).collect()
            } else {
                let r = &reductions[k - 1];
                (0..cc.rank(k))
                    .filter(|&j| r.reduced[j].is_empty())
                    .map(|j| (j as u32, r.v[j].clone()))
                    .collect()
            };
            let deg = FieldDegree::new(fp, kernel, &reductions[k]);
            let orders = vec![0; deg.rank()];
            DegreeData {
                engine: Engine::Field(deg),
                orders,
            }
        })
        .collect()
}

fn int_degrees(cc: &ChainComplex, max_degree: usize) -> Result<Vec<DegreeData>, HomologyError> {
    let dense = |d: usize| {
        let rows = cc.rank(d - 1);
        let cols: Vec<Chain> = (0..cc.rank(d))
            .map(|j| cc.boundary_column(d, j).clone())
            .collect();
        Dense::from_columns(rows, &cols)
    };
    (0..=max_degree)
        .into_par_iter()
        .map(|k| {
            let snf = if k == 0 {
                integer::smith(Dense::zeros(0, cc.rank(0)))?
            } else {
                integer::smith(dense(k))?
            };
            let deg = IntDegree::new(&snf, cc.rank(k), &dense(k + 1))?;
            let orders = deg.orders().to_vec();
            Ok(DegreeData {
                engine: Engine::Int(deg),
                orders,
            })
        })
        .collect()
}

/// Betti numbers (and integral torsion) of a space in degrees `0..dim_cap`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiNumbers {
    pub coeff: Coeff,
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<u64>>,
}

pub fn compute_betti(space: &Space, coeff: Coeff) -> Result<BettiNumbers, HomologyError> {
    let coeff = coeff.validate()?;
    if space.dim_cap() == 0 {
        return Ok(BettiNumbers {
            coeff,
            betti: Vec::new(),
            torsion: Vec::new(),
        });
    }
    let h = Homology::of_space(space, coeff, space.dim_cap() - 1)?;
    Ok(BettiNumbers {
        coeff,
        betti: h.betti(),
        torsion: h.torsion(),
    })
}

/// Degree-wise chain map given by images of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap {
    images: Vec<Vec<Chain>>,
}

impl ChainMap {
    /// Highest degree on which the map is defined.
    pub fn top(&self) -> usize {
        self.images.len() - 1
    }

    pub fn inclusion(src: &ChainComplex, tgt: &ChainComplex) -> Result<Self, HomologyError> {
        if !src.same_shape(tgt) {
            return Err(HomologyError::Incompatible);
        }
        let top = src.top().min(tgt.top());
        let images = (0..=top)
            .map(|k| {
                src.basis(k)
                    .iter()
                    .map(|s| {
                        let i = tgt
                            .space
                            .index_of(s)
                            .ok_or_else(|| HomologyError::NotIncluded(s.clone()))?;
                        Ok(vec![(i as u32, 1)])
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { images })
    }

    /// Chain map of a vertex map; `vertex_images` is indexed by source ground points.
    pub fn from_vertex_map(
        src: &ChainComplex,
        tgt: &ChainComplex,
        vertex_images: &[u32],
    ) -> Result<Self, HomologyError> {
        if src.space.is_simplicial_set() != tgt.space.is_simplicial_set() {
            return Err(HomologyError::Incompatible);
        }
        let top = src.top().min(tgt.top());
        let tuples = src.space.is_simplicial_set();
        let images = (0..=top)
            .map(|k| {
                src.basis(k)
                    .iter()
                    .map(|s| {
                        let img: Simplex = s.iter().map(|&v| vertex_images[v as usize]).collect();
                        let (key, sign) = if tuples {
                            if has_consecutive_repeat(&img) {
                                return Ok(Vec::new());
                            }
                            (img.clone(), 1)
                        } else {
                            match sort_with_sign(&img) {
                                Some(x) => x,
                                None => return Ok(Vec::new()),
                            }
                        };
                        let i = tgt.space.index_of(&key).ok_or_else(|| {
                            HomologyError::NonSimplicial {
                                simplex: s.clone(),
                                image: img.clone(),
                            }
                        })?;
                        Ok(vec![(i as u32, sign)])
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { images })
    }

    /// The comparison from normalized tuple chains to chains of the supports:
    /// injective tuples go to the sorted simplex with the permutation sign,
    /// tuples with a repeated entry go to zero.
    pub fn tuples_to_sets(src: &ChainComplex, tgt: &ChainComplex) -> Result<Self, HomologyError> {
        if !src.space.is_simplicial_set() || tgt.space.is_simplicial_set() {
            return Err(HomologyError::Incompatible);
        }
        let top = src.top().min(tgt.top());
        let images = (0..=top)
            .map(|k| {
                src.basis(k)
                    .iter()
                    .map(|t| match sort_with_sign(t) {
                        None => Ok(Vec::new()),
                        Some((s, sign)) => {
                            let i = tgt
                                .space
                                .index_of(&s)
                                .ok_or_else(|| HomologyError::NotIncluded(s.clone()))?;
                            Ok(vec![(i as u32, sign)])
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { images })
    }

    pub fn image_of(&self, k: usize, j: usize) -> &Chain {
        &self.images[k][j]
    }

    pub fn apply(&self, k: usize, c: &[(u32, i64)]) -> Chain {
        let mut out = Vec::new();
        for &(j, v) in c {
            out.extend(self.images[k][j as usize].iter().map(|&(i, w)| (i, v * w)));
        }
        normalize_chain(out)
    }

    /// `∂ ∘ f = f ∘ ∂` on every basis element, over the integers.
    pub fn is_chain_map(&self, src: &ChainComplex, tgt: &ChainComplex) -> bool {
        (1..=self.top()).all(|k| {
            (0..src.rank(k)).all(|j| {
                let lhs = tgt.boundary(k, &self.images[k][j]);
                let rhs = self.apply(k - 1, src.boundary_column(k, j));
                lhs == rhs
            })
        })
    }
}

/// Matrix of an induced map `H_k(source) → H_k(target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyMap {
    pub degree: usize,
    pub coeff: Coeff,
    pub source_orders: Vec<u64>,
    pub target_orders: Vec<u64>,
    /// Row per target generator, column per source generator.
    pub matrix: Vec<Vec<i64>>,
}

impl HomologyMap {
    pub fn induced(
        map: &ChainMap,
        k: usize,
        src: &Homology,
        tgt: &Homology,
    ) -> Result<Self, HomologyError> {
        if src.coeff != tgt.coeff {
            return Err(HomologyError::CoeffMismatch);
        }
        if k > src.max_degree() || k > tgt.max_degree() || k > map.top() {
            return Err(HomologyError::DegreeOutOfRange {
                degree: k,
                needed: k + 1,
                cap: src.max_degree().min(tgt.max_degree()) + 1,
            });
        }
        let cols = src
            .generators(k)
            .par_iter()
            .map(|g| tgt.coordinates(k, &map.apply(k, g)))
            .collect::<Result<Vec<_>, _>>()?;
        let rows = tgt.generator_count(k);
        let matrix = (0..rows)
            .map(|r| cols.iter().map(|c| c[r]).collect())
            .collect();
        Ok(Self {
            degree: k,
            coeff: src.coeff,
            source_orders: src.orders(k).to_vec(),
            target_orders: tgt.orders(k).to_vec(),
            matrix,
        })
    }

    pub fn rows(&self) -> usize {
        self.target_orders.len()
    }

    pub fn cols(&self) -> usize {
        self.source_orders.len()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().flatten().all(|&v| v == 0)
    }

    fn reduce_entry(&self, row: usize, v: i128) -> Result<i64, HomologyError> {
        let m = match self.coeff.field() {
            Some(fp) => fp.p as i128,
            None => self.target_orders[row] as i128,
        };
        let v = if m == 0 { v } else { v.rem_euclid(m) };
        i64::try_from(v).map_err(|_| HomologyError::Overflow)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &HomologyMap) -> Result<HomologyMap, HomologyError> {
        if self.coeff != next.coeff
            || self.degree != next.degree
            || self.target_orders != next.source_orders
        {
            return Err(HomologyError::Incompatible);
        }
        let matrix = (0..next.rows())
            .map(|r| {
                (0..self.cols())
                    .map(|c| {
                        let s: i128 = (0..self.rows())
                            .map(|m| next.matrix[r][m] as i128 * self.matrix[m][c] as i128)
                            .sum();
                        next.reduce_entry(r, s)
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(HomologyMap {
            degree: self.degree,
            coeff: self.coeff,
            source_orders: self.source_orders.clone(),
            target_orders: next.target_orders.clone(),
            matrix,
        })
    }

    /// Rank over the coefficient field; `None` over the integers.
    pub fn rank(&self) -> Option<usize> {
        let fp = self.coeff.field()?;
        let mut m: Vec<Vec<u32>> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|&v| fp.residue(v)).collect())
            .collect();
        let (rows, cols) = (self.rows(), self.cols());
        let mut rank = 0;
        for c in 0..cols {
            let Some(p) = (rank..rows).find(|&r| m[r][c] != 0) else {
                continue;
            };
            m.swap(rank, p);
            let inv = fp.inv(m[rank][c]);
            for r in 0..rows {
                if r != rank && m[r][c] != 0 {
                    let f = fp.neg(fp.mul(m[r][c], inv));
                    let pivot = m[rank].clone();
                    for (x, &y) in m[r].iter_mut().zip(&pivot) {
                        *x = fp.add(*x, fp.mul(f, y));
                    }
                }
            }
            rank += 1;
        }
        Some(rank)
    }

    /// Isomorphism verdict: exact over fields, and over the integers when
    /// both sides are free. `None` when torsion makes the question unsupported.
    pub fn is_isomorphism(&self) -> Option<bool> {
        if self.coeff.field().is_some() {
            return Some(self.rows() == self.cols() && self.rank() == Some(self.cols()));
        }
        if self
            .source_orders
            .iter()
            .chain(&self.target_orders)
            .any(|&o| o != 0)
        {
            return None;
        }
        if self.rows() != self.cols() {
            return Some(false);
        }
        let n = self.rows();
        let dense = Dense {
            rows: n,
            cols: n,
            a: self.matrix.iter().flatten().copied().collect(),
        };
        let snf = integer::smith(dense).ok()?;
        Some(snf.diag.len() == n && snf.diag.iter().all(|&d| d == 1))
    }

    pub fn is_identity(&self) -> bool {
        self.rows() == self.cols()
            && self
                .matrix
                .iter()
                .enumerate()
                .all(|(r, row)| row.iter().enumerate().all(|(c, &v)| v == i64::from(r == c)))
    }
}

/// `H_k` of the inclusion of `src` into `tgt` (same ground set, same kind).
pub fn induced_inclusion_map(
    src: &Space,
    tgt: &Space,
    k: usize,
    coeff: Coeff,
) -> Result<HomologyMap, HomologyError> {
    let s = Arc::new(ChainComplex::new(src)?);
    let t = Arc::new(ChainComplex::new(tgt)?);
    let map = ChainMap::inclusion(&s, &t)?;
    let hs = Homology::compute(s, coeff, k)?;
    let ht = Homology::compute(t, coeff, k)?;
    HomologyMap::induced(&map, k, &hs, &ht)
}

/// `H_k` of a simplicial map between complexes.
pub fn induced_simplicial_map(
    map: &SimplicialMap,
    k: usize,
    coeff: Coeff,
) -> Result<HomologyMap, HomologyError> {
    let s = Arc::new(ChainComplex::new(&Space::Complex(map.source().clone()))?);
    let t = Arc::new(ChainComplex::new(&Space::Complex(map.target().clone()))?);
    let cm = ChainMap::from_vertex_map(&s, &t, map.vertex_images())?;
    let hs = Homology::compute(s, coeff, k)?;
    let ht = Homology::compute(t, coeff, k)?;
    HomologyMap::induced(&cm, k, &hs, &ht)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeComparison {
    pub degree: usize,
    pub set_betti: usize,
    pub complex_betti: usize,
    pub isomorphism: Option<bool>,
}

/// Outcome of comparing normalized tuple chains with chains of supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Comparison {
    pub coeff: Coeff,
    pub chain_map: bool,
    pub degrees: Vec<DegreeComparison>,
}

impl Comparison {
    /// Chain map and an isomorphism in every compared degree.
    pub fn is_quasi_isomorphism(&self) -> bool {
        self.chain_map && self.degrees.iter().all(|d| d.isomorphism == Some(true))
    }
}

/// Compares `E(𝒜)` with `C(𝒜)` through the sign-of-sorting chain map in
/// degrees `0..=max_degree`.
pub fn e_to_c_comparison(
    set: &TruncatedSimplicialSet,
    coeff: Coeff,
    max_degree: usize,
) -> Result<Comparison, HomologyError> {
    let coeff = coeff.validate()?;
    let e = Arc::new(ChainComplex::new(&Space::SimplicialSet(set.clone()))?);
    let c = Arc::new(ChainComplex::new(&Space::Complex(
        set.underlying_complex(),
    ))?);
    check_degree(&e, max_degree)?;
    let map = ChainMap::tuples_to_sets(&e, &c)?;
    let chain_map = map.is_chain_map(&e, &c);
    let he = Homology::compute(e, coeff, max_degree)?;
    let hc = Homology::compute(c, coeff, max_degree)?;
    let be = he.betti();
    let bc = hc.betti();
    let degrees = (0..=max_degree)
        .map(|k| {
            let m = HomologyMap::induced(&map, k, &he, &hc)?;
            Ok(DegreeComparison {
                degree: k,
                set_betti: be[k],
                complex_betti: bc[k],
                isomorphism: m.is_isomorphism(),
            })
        })
        .collect::<Result<Vec<_>, HomologyError>>()?;
    Ok(Comparison {
        coeff,
        chain_map,
        degrees,
    })
}
