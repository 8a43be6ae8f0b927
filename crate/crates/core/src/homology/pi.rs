//! `π₀` by union-find and a bounded search for combinatorial null-homotopies
//! of edge loops.

use std::collections::{HashMap, HashSet, VecDeque};

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::HomologyError;
use crate::complexes::{SimplicialComplex, Space};

/// A 1-skeleton: vertices and undirected edges on a ground set of size `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    pub n: usize,
    pub vertices: Vec<u32>,
    pub edges: Vec<(u32, u32)>,
}

impl From<&SimplicialComplex> for Graph {
    fn from(c: &SimplicialComplex) -> Self {
        Self {
            n: c.ground().len(),
            vertices: c.vertices().collect(),
            edges: c.edges().collect(),
        }
    }
}

impl From<&Space> for Graph {
    fn from(s: &Space) -> Self {
        Self {
            n: s.ground().len(),
            vertices: s.vertices(),
            edges: s.edges(),
        }
    }
}

impl Graph {
    /// Component id per vertex (by ground index, `usize::MAX` for absent points),
    /// numbered in order of least vertex.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut uf = UnionFind::<usize>::new(self.n);
        for &(a, b) in &self.edges {
            uf.union(a as usize, b as usize);
        }
        let mut id = vec![usize::MAX; self.n];
        let mut root_id: HashMap<usize, usize> = HashMap::new();
        for &v in &self.vertices {
            let r = uf.find(v as usize);
            let next = root_id.len();
            id[v as usize] = *root_id.entry(r).or_insert(next);
        }
        (id, root_id.len())
    }
}

/// Map of path components induced by an inclusion of 1-skeleta.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Pi0Map {
    pub source_components: usize,
    pub target_components: usize,
    /// Target component of each source component.
    pub image: Vec<usize>,
    /// Whether all source components land in one target component.
    pub trivial: bool,
    /// Two source vertices that stay in different target components.
    pub witness: Option<(u32, u32)>,
}

pub fn pi0_induced_map(src: &Graph, tgt: &Graph) -> Result<Pi0Map, HomologyError> {
    let (sid, sc) = src.components();
    let (tid, tc) = tgt.components();
    let mut image = vec![usize::MAX; sc];
    let mut rep = vec![0u32; sc];
    for &v in &src.vertices {
        let t = *tid.get(v as usize).ok_or(HomologyError::VertexMissing(v))?;
        if t == usize::MAX {
            return Err(HomologyError::VertexMissing(v));
        }
        let s = sid[v as usize];
        if image[s] == usize::MAX {
            image[s] = t;
            rep[s] = v;
        }
    }
    let witness = (1..sc)
        .find(|&s| image[s] != image[0])
        .map(|s| (rep[0], rep[s]));
    Ok(Pi0Map {
        source_components: sc,
        target_components: tc,
        image,
        trivial: witness.is_none(),
        witness,
    })
}

/// One loop per non-tree edge of a breadth-first spanning forest of the
/// source 1-skeleton; the loops generate `π₁` of each component.
///
/// Loops are closed vertex sequences (first equals last).
pub fn edge_loop_generators(src: &Graph) -> Vec<Vec<u32>> {
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in &src.edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    for l in adj.values_mut() {
        l.sort_unstable();
    }
    let mut parent: HashMap<u32, u32> = HashMap::new();
    let mut depth: HashMap<u32, usize> = HashMap::new();
    let mut tree: HashSet<(u32, u32)> = HashSet::new();
    for &root in &src.vertices {
        if depth.contains_key(&root) {
            continue;
        }
        depth.insert(root, 0);
        let mut q = VecDeque::from([root]);
        while let Some(v) = q.pop_front() {
            for &w in adj.get(&v).map_or(&[][..], Vec::as_slice) {
                let dv = depth[&v];
                if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(w) {
                    e.insert(dv + 1);
                    parent.insert(w, v);
                    tree.insert((v.min(w), v.max(w)));
                    q.push_back(w);
                }
            }
        }
    }
    let path_to_root = |mut v: u32| {
        let mut p = vec![v];
        while let Some(&u) = parent.get(&v) {
            p.push(u);
            v = u;
        }
        p
    };
    let mut loops = Vec::new();
    for &(a, b) in &src.edges {
        if tree.contains(&(a, b)) {
            continue;
        }
        let pa = path_to_root(a);
        let pb = path_to_root(b);
        // strip the common tail to the root, keeping the meeting vertex once
        let mut i = pa.len();
        let mut j = pb.len();
        while i > 1 && j > 1 && pa[i - 2] == pb[j - 2] {
            i -= 1;
            j -= 1;
        }
        let mut l: Vec<u32> = pa[..i].to_vec();
        l.extend(pb[..j - 1].iter().rev());
        l.push(a);
        loops.push(l);
    }
    loops
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    /// Drop a repeated vertex.
    Stutter,
    /// `a b a → a`.
    Backtrack,
    /// Two edges of a triangle replaced by the third.
    Shortcut,
    /// One edge of a triangle replaced by the other two.
    Detour,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FillMove {
    pub kind: MoveKind,
    /// The cyclic loop after the move, as a closed vertex sequence.
    pub after: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "outcome")]
pub enum FillOutcome {
    Found {
        moves: Vec<FillMove>,
    },
    /// Inconclusive; not evidence that the loop is essential.
    BudgetExhausted {
        explored: usize,
    },
}

impl FillOutcome {
    pub fn is_found(&self) -> bool {
        matches!(self, FillOutcome::Found { .. })
    }
}

type Cyc = Vec<u32>;

fn canonical(c: &[u32]) -> Cyc {
    if c.len() <= 1 {
        return c.to_vec();
    }
    (0..c.len())
        .map(|r| c[r..].iter().chain(&c[..r]).copied().collect::<Cyc>())
        .min()
        .expect("nonempty")
}

fn closed(c: &[u32]) -> Vec<u32> {
    let mut v = c.to_vec();
    if let Some(&f) = c.first() {
        v.push(f);
    }
    v
}

struct Moves<'a> {
    tgt: &'a SimplicialComplex,
    adj: HashMap<u32, Vec<u32>>,
}

impl Moves<'_> {
    fn triangle(&self, a: u32, b: u32, c: u32) -> bool {
        let mut t = [a, b, c];
        t.sort_unstable();
        t[0] != t[1] && t[1] != t[2] && self.tgt.contains(&t)
    }

    /// Moves that shorten the loop.
    fn shortening(&self, c: &[u32], out: &mut Vec<(MoveKind, Cyc)>) {
        let n = c.len();
        if n <= 1 {
            return;
        }
        for i in 0..n {
            let prev = c[(i + n - 1) % n];
            let cur = c[i];
            let next = c[(i + 1) % n];
            if cur == next {
                let mut d = c.to_vec();
                d.remove(i);
                out.push((MoveKind::Stutter, d));
            } else if prev == next {
                let mut d = c.to_vec();
                // remove `cur` and the following copy of `prev`
                let j = (i + 1) % n;
                let (hi, lo) = if j > i { (j, i) } else { (i, j) };
                d.remove(hi);
                d.remove(lo);
                if d.is_empty() {
                    d.push(prev);
                }
                out.push((MoveKind::Backtrack, d));
            } else if n > 2 && self.triangle(prev, cur, next) {
                let mut d = c.to_vec();
                d.remove(i);
                out.push((MoveKind::Shortcut, d));
            }
        }
    }

    fn detours(&self, c: &[u32], out: &mut Vec<(MoveKind, Cyc)>) {
        let n = c.len();
        if n < 2 {
            return;
        }
        for i in 0..n {
            let (a, b) = (c[i], c[(i + 1) % n]);
            if a == b {
                continue;
            }
            for &w in self.adj.get(&a).map_or(&[][..], Vec::as_slice) {
                if w != b && self.triangle(a, w, b) {
                    let mut d = c.to_vec();
                    d.insert(i + 1, w);
                    out.push((MoveKind::Detour, d));
                }
            }
        }
    }
}

/// Breadth-first search for a sequence of elementary moves contracting the
/// closed edge path `loop_` to a point inside `tgt`.
///
/// `budget` bounds the number of distinct loop states explored. Loops may
/// grow by at most four vertices over their initial length.
pub fn pi1_bounded_fill(
    loop_: &[u32],
    tgt: &SimplicialComplex,
    budget: usize,
) -> Result<FillOutcome, HomologyError> {
    if loop_.is_empty() || loop_.first() != loop_.last() {
        return Err(HomologyError::LoopNotClosed);
    }
    for w in loop_.windows(2) {
        if w[0] != w[1] && !tgt.contains(&[w[0].min(w[1]), w[0].max(w[1])]) {
            return Err(HomologyError::LoopNotInTarget(w[0], w[1]));
        }
    }
    if let Some(&v) = loop_.iter().find(|&&v| !tgt.contains(&[v])) {
        return Err(HomologyError::VertexMissing(v));
    }
    let mut adj: HashMap<u32, Vec<u32>> = HashMap::new();
    for (a, b) in tgt.edges() {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let moves = Moves { tgt, adj };
    let start = canonical(&loop_[..loop_.len() - 1]);
    let max_len = start.len() + 4;

    let mut parent: HashMap<Cyc, Option<(Cyc, MoveKind)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([start]);
    let mut buf = Vec::new();
    while let Some(c) = queue.pop_front() {
        if c.len() <= 1 {
            let mut path = Vec::new();
            let mut cur = c;
            while let Some(Some((prev, kind))) = parent.get(&cur) {
                path.push(FillMove {
                    kind: *kind,
                    after: closed(&cur),
                });
                cur = prev.clone();
            }
            path.reverse();
            return Ok(FillOutcome::Found { moves: path });
        }
        buf.clear();
        moves.shortening(&c, &mut buf);
        if c.len() < max_len {
            moves.detours(&c, &mut buf);
        }
        for (kind, d) in buf.drain(..) {
            let d = canonical(&d);
            if parent.contains_key(&d) {
                continue;
            }
            if parent.len() >= budget {
                return Ok(FillOutcome::BudgetExhausted {
                    explored: parent.len(),
                });
            }
            parent.insert(d.clone(), Some((c.clone(), kind)));
            queue.push_back(d);
        }
    }
    Ok(FillOutcome::BudgetExhausted {
        explored: parent.len(),
    })
}
