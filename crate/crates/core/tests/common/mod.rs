//! Brute-force oracles and random instance generators shared by the
//! integration and acceptance tests. Nothing here calls the library's
//! builders or reductions.
#![allow(dead_code)]

use std::collections::HashMap;
use std::sync::Arc;

use coarsec_core::coarse::{Entourage, GroundSet};
use coarsec_core::complexes::SimplicialComplex;
use rand::Rng;

pub type Cell = Vec<u32>;

pub fn ground(n: usize) -> Arc<GroundSet> {
    GroundSet::range(n)
}

/// Random symmetric reflexive relation on `n` points.
pub fn random_entourage<R: Rng>(rng: &mut R, n: usize, density: f64) -> Entourage {
    let g = ground(n);
    let mut pairs = Vec::new();
    for a in 0..n {
        pairs.push((a, a));
        for b in a + 1..n {
            if rng.random_bool(density) {
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
    }
    Entourage::from_pairs(&g, pairs).unwrap().normalize()
}

/// Symmetric reflexive relation from one bit per unordered pair.
pub fn entourage_from_mask(n: usize, mask: &[bool]) -> Entourage {
    let g = ground(n);
    let mut bits = mask.iter().copied().cycle();
    let mut pairs: Vec<(usize, usize)> = (0..n).map(|a| (a, a)).collect();
    for a in 0..n {
        for b in a + 1..n {
            if bits.next().unwrap_or(false) {
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
    }
    Entourage::from_pairs(&g, pairs).unwrap()
}

/// Random complex: a handful of random simplices closed downward.
pub fn random_complex<R: Rng>(
    rng: &mut R,
    n: usize,
    dim_cap: usize,
    count: usize,
) -> SimplicialComplex {
    let g = ground(n);
    let mut tops = Vec::new();
    for v in 0..n as u32 {
        tops.push(vec![v]);
    }
    for _ in 0..count {
        let size = rng.random_range(2..=(dim_cap + 1).min(n));
        let mut s: Vec<u32> = Vec::new();
        while s.len() < size {
            let v = rng.random_range(0..n as u32);
            if !s.contains(&v) {
                s.push(v);
            }
        }
        s.sort_unstable();
        tops.push(s);
    }
    SimplicialComplex::from_simplices(&g, dim_cap, tops).unwrap()
}

fn subsets(n: usize, max_size: usize) -> Vec<Cell> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        if (mask.count_ones() as usize) <= max_size {
            out.push((0..n as u32).filter(|&v| mask & (1 << v) != 0).collect());
        }
    }
    out
}

/// `by_dim[k]` = sorted `k`-cells.
pub fn by_dim(cells: impl IntoIterator<Item = Cell>, dim_cap: usize) -> Vec<Vec<Cell>> {
    let mut out = vec![Vec::new(); dim_cap + 1];
    for c in cells {
        if c.len() <= dim_cap + 1 {
            out[c.len() - 1].push(c);
        }
    }
    for l in &mut out {
        l.sort();
    }
    out
}

pub fn rel(u: &Entourage, a: u32, b: u32) -> bool {
    u.contains(a as usize, b as usize) && u.contains(b as usize, a as usize)
}

/// Clique complex by checking every subset.
pub fn brute_vr(u: &Entourage, dim_cap: usize) -> Vec<Vec<Cell>> {
    let n = u.ground().len();
    let cells = subsets(n, dim_cap + 1)
        .into_iter()
        .filter(|s| s.iter().all(|&a| s.iter().all(|&b| rel(u, a, b))));
    by_dim(cells, dim_cap)
}

pub fn cech_set(u: &Entourage, s: &[u32]) -> bool {
    let n = u.ground().len() as u32;
    (0..n).any(|c| s.iter().all(|&b| u.contains(c as usize, b as usize)))
}

/// Sets with a common center, by checking every subset and center.
pub fn brute_cech(u: &Entourage, dim_cap: usize) -> Vec<Vec<Cell>> {
    let n = u.ground().len();
    by_dim(
        subsets(n, dim_cap + 1)
            .into_iter()
            .filter(|s| cech_set(u, s)),
        dim_cap,
    )
}

/// Nondegenerate tuples (no consecutive repeats) whose support is accepted.
pub fn brute_tuples(n: usize, dim_cap: usize, accept: impl Fn(&[u32]) -> bool) -> Vec<Vec<Cell>> {
    let mut out = vec![Vec::new(); dim_cap + 1];
    let mut layer: Vec<Cell> = (0..n as u32).map(|v| vec![v]).collect();
    for slot in out.iter_mut() {
        let mut next = Vec::new();
        for t in layer {
            let mut support = t.clone();
            support.sort_unstable();
            support.dedup();
            if !accept(&support) {
                continue;
            }
            for v in 0..n as u32 {
                if *t.last().unwrap() != v {
                    let mut e = t.clone();
                    e.push(v);
                    next.push(e);
                }
            }
            slot.push(t);
        }
        layer = next;
    }
    for l in &mut out {
        l.sort();
    }
    out
}

/// Dense GF(2) vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bits(pub Vec<u64>);

impl Bits {
    pub fn zero(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64).max(1)])
    }
    pub fn flip(&mut self, i: usize) {
        self.0[i / 64] ^= 1 << (i % 64);
    }
    pub fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn xor(&mut self, o: &Bits) {
        for (a, b) in self.0.iter_mut().zip(&o.0) {
            *a ^= b;
        }
    }
    /// Highest set bit below `limit`.
    fn top_below(&self, limit: usize) -> Option<usize> {
        let words = limit.div_ceil(64).min(self.0.len());
        (0..words).rev().find_map(|w| {
            let mut x = self.0[w];
            if w * 64 + 64 > limit {
                x &= (1u64 << (limit - w * 64)) - 1;
            }
            (x != 0).then(|| w * 64 + 63 - x.leading_zeros() as usize)
        })
    }
}

/// Incremental GF(2) span with pivots on the highest set bit below `limit`.
pub struct Span {
    limit: usize,
    pivots: HashMap<usize, Bits>,
}

impl Span {
    pub fn new(limit: usize) -> Self {
        Span {
            limit,
            pivots: HashMap::new(),
        }
    }
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
    /// Reduces `v`; returns the residue (zero below `limit` iff in the span).
    pub fn reduce(&self, mut v: Bits) -> Bits {
        while let Some(p) = v.top_below(self.limit) {
            match self.pivots.get(&p) {
                Some(b) => v.xor(b),
                None => break,
            }
        }
        v
    }
    /// Adds `v`; returns false when it was already in the span.
    pub fn insert(&mut self, v: Bits) -> bool {
        let r = self.reduce(v);
        match r.top_below(self.limit) {
            Some(p) => {
                self.pivots.insert(p, r);
                true
            }
            None => false,
        }
    }
}

/// Mod-2 boundary of each `k`-cell as positions in the `(k−1)`-cells.
/// Faces with a consecutive repeat (degenerate tuples) are dropped.
pub fn boundary_columns(cells: &[Vec<Cell>], k: usize) -> Vec<Bits> {
    let index: HashMap<&Cell, usize> = cells[k - 1]
        .iter()
        .enumerate()
        .map(|(i, c)| (c, i))
        .collect();
    cells[k]
        .iter()
        .map(|c| {
            let mut b = Bits::zero(cells[k - 1].len());
            for i in 0..c.len() {
                let mut f = c.clone();
                f.remove(i);
                if f.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                b.flip(*index.get(&f).expect("face closed"));
            }
            b
        })
        .collect()
}

pub fn gf2_rank(cols: Vec<Bits>, len: usize) -> usize {
    let mut s = Span::new(len);
    for c in cols {
        s.insert(c);
    }
    s.rank()
}

/// Mod-2 Betti numbers in degrees `0..top` (needs cells up to `top`).
pub fn betti_gf2(cells: &[Vec<Cell>], top: usize) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=top)
        .map(|k| {
            if k == 0 {
                0
            } else {
                gf2_rank(boundary_columns(cells, k), cells[k - 1].len())
            }
        })
        .collect();
    (0..top)
        .map(|k| cells[k].len() - ranks[k] - ranks[k + 1])
        .collect()
}

/// Basis of mod-2 `k`-cycles, as vectors over `cells[k]`.
pub fn cycles_gf2(cells: &[Vec<Cell>], k: usize) -> Vec<Bits> {
    let m = cells[k].len();
    if k == 0 {
        return (0..m)
            .map(|i| {
                let mut b = Bits::zero(m);
                b.flip(i);
                b
            })
            .collect();
    }
    let rows = cells[k - 1].len();
    let cols = boundary_columns(cells, k);
    let mut span = Span::new(rows);
    let mut out = Vec::new();
    for (j, c) in cols.into_iter().enumerate() {
        let mut v = Bits::zero(rows + m);
        for i in 0..rows {
            if c.get(i) {
                v.flip(i);
            }
        }
        v.flip(rows + j);
        let r = span.reduce(v.clone());
        if r.top_below(rows).is_none() {
            let mut z = Bits::zero(m);
            for i in 0..m {
                if r.get(rows + i) {
                    z.flip(i);
                }
            }
            out.push(z);
        } else {
            span.insert(v);
        }
    }
    out
}

/// Rank of `H_k(src) → H_k(tgt)` over GF(2) for an inclusion of cell lists.
pub fn inclusion_rank_gf2(src: &[Vec<Cell>], tgt: &[Vec<Cell>], k: usize) -> usize {
    let index: HashMap<&Cell, usize> = tgt[k].iter().enumerate().map(|(i, c)| (c, i)).collect();
    let len = tgt[k].len();
    let mut span = Span::new(len);
    if k + 1 < tgt.len() {
        for b in boundary_columns(tgt, k + 1) {
            span.insert(b);
        }
    }
    let boundaries = span.rank();
    for z in cycles_gf2(src, k) {
        let mut v = Bits::zero(len);
        for (i, c) in src[k].iter().enumerate() {
            if z.get(i) {
                v.flip(*index.get(c).expect("inclusion"));
            }
        }
        span.insert(v);
    }
    span.rank() - boundaries
}

/// Connected components of the 1-skeleton by naive flooding.
pub fn components(n: usize, vertices: &[u32], edges: &[(u32, u32)]) -> Vec<usize> {
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &v in vertices {
        if comp[v as usize] != usize::MAX {
            continue;
        }
        comp[v as usize] = next;
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in edges {
                let (ca, cb) = (comp[a as usize], comp[b as usize]);
                if ca == next && cb != next {
                    comp[b as usize] = next;
                    changed = true;
                } else if cb == next && ca != next {
                    comp[a as usize] = next;
                    changed = true;
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn cells_of(c: &SimplicialComplex) -> Vec<Vec<Cell>> {
    (0..=c.dim_cap()).map(|k| c.simplices(k).to_vec()).collect()
}

/// Cliques of `u` up to `dim_cap`, grown one vertex at a time. Usable on
/// grounds too large for subset enumeration.
pub fn cliques(u: &Entourage, dim_cap: usize) -> Vec<Vec<Cell>> {
    let n = u.ground().len() as u32;
    let mut out = vec![Vec::new(); dim_cap + 1];
    let mut layer: Vec<Cell> = (0..n).map(|v| vec![v]).collect();
    for slot in out.iter_mut() {
        let mut next = Vec::new();
        for s in &layer {
            for v in s.last().unwrap() + 1..n {
                if s.iter().all(|&a| rel(u, a, v)) {
                    let mut t = s.clone();
                    t.push(v);
                    next.push(t);
                }
            }
        }
        *slot = std::mem::replace(&mut layer, next);
    }
    out
}

/// Cells whose vertices all lie in `keep`.
pub fn restrict_cells(cells: &[Vec<Cell>], keep: &[bool]) -> Vec<Vec<Cell>> {
    cells
        .iter()
        .map(|l| {
            l.iter()
                .filter(|c| c.iter().all(|&v| keep[v as usize]))
                .cloned()
                .collect()
        })
        .collect()
}

/// Least `j ≥ i` (1-based) such that the interior of stage `i` maps trivially
/// into stage `j` in reduced degrees `0..n`, by dense reduction.
pub fn brute_witnesses(
    stages: &[Vec<Vec<Cell>>],
    interior: &[bool],
    n: usize,
) -> Vec<Option<usize>> {
    let npts = interior.len();
    let trivial = |src: &[Vec<Cell>], tgt: &[Vec<Cell>]| {
        let verts: Vec<u32> = tgt[0].iter().map(|c| c[0]).collect();
        let edges: Vec<(u32, u32)> = tgt[1]
            .iter()
            .filter(|c| c[0] != c[1])
            .map(|c| (c[0], c[1]))
            .collect();
        let comp = components(npts, &verts, &edges);
        let mut seen: Vec<usize> = src[0].iter().map(|c| comp[c[0] as usize]).collect();
        seen.sort_unstable();
        seen.dedup();
        seen.len() <= 1 && (1..n).all(|k| inclusion_rank_gf2(src, tgt, k) == 0)
    };
    (0..stages.len())
        .map(|i| {
            let src = restrict_cells(&stages[i], interior);
            (i..stages.len())
                .find(|&j| trivial(&src, &stages[j]))
                .map(|j| j + 1)
        })
        .collect()
}
