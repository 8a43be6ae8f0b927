//! Example coarse spaces as finite metric windows: word-metric balls of
//! groups with easy normal forms, distance-matrix files, and synthetic
//! families.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitSet;
use crate::coarse::{CoarseError, Entourage, EntourageSchedule, GroundSet};

/// Default bound on the number of points of a window.
pub const DEFAULT_CAP: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("window would have more than {cap} points")]
    CapExceeded { cap: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("distance matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("nonzero self-distance at point {0}")]
    NonzeroDiagonal(usize),
    #[error("negative or NaN distance at ({0}, {1})")]
    BadDistance(usize, usize),
    #[error("triangle inequality fails for ({0}, {1}, {2})")]
    Triangle(usize, usize, usize),
    #[error("invalid group: {0}")]
    BadGroup(String),
    #[error("thresholds must be finite and strictly increasing")]
    Thresholds,
    #[error("{0}")]
    Io(String),
    #[error(transparent)]
    Coarse(#[from] CoarseError),
}

/// Finitely generated groups with computable normal forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupSpec {
    FreeAbelian {
        rank: usize,
    },
    Free {
        rank: usize,
    },
    /// Permutations of `{1..degree}` generated by the given permutations in
    /// cycle notation, together with their inverses.
    Permutation {
        degree: usize,
        generators: Vec<Vec<Vec<usize>>>,
    },
    CyclicProduct {
        moduli: Vec<u64>,
    },
}

type Elem = Vec<i64>;

impl GroupSpec {
    fn validate(&self) -> Result<(), SpaceError> {
        match self {
            GroupSpec::FreeAbelian { rank } | GroupSpec::Free { rank } if *rank == 0 => {
                Err(SpaceError::BadGroup("rank must be positive".into()))
            }
            GroupSpec::Free { rank } if *rank > 26 => {
                Err(SpaceError::BadGroup("at most 26 free generators".into()))
            }
            GroupSpec::CyclicProduct { moduli }
                if moduli.is_empty() || moduli.iter().any(|&m| m < 2) =>
            {
                Err(SpaceError::BadGroup("moduli must be at least 2".into()))
            }
            GroupSpec::Permutation { degree, generators } => {
                if *degree == 0 || generators.is_empty() {
                    return Err(SpaceError::BadGroup(
                        "need a positive degree and a generator".into(),
                    ));
                }
                for g in generators {
                    let mut seen = vec![false; degree + 1];
                    for c in g {
                        for &p in c {
                            if p == 0 || p > *degree || seen[p] {
                                return Err(SpaceError::BadGroup(format!("bad cycle entry {p}")));
                            }
                            seen[p] = true;
                        }
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            GroupSpec::FreeAbelian { rank } => vec![0; *rank],
            GroupSpec::Free { .. } => Vec::new(),
            GroupSpec::Permutation { degree, .. } => (0..*degree as i64).collect(),
            GroupSpec::CyclicProduct { moduli } => vec![0; moduli.len()],
        }
    }

    /// Symmetric generating set, inverses adjacent to their generator.
    pub fn generators(&self) -> Vec<Elem> {
        match self {
            GroupSpec::FreeAbelian { rank } => (0..*rank)
                .flat_map(|i| {
                    [1, -1].map(|s| {
                        let mut e = vec![0; *rank];
                        e[i] = s;
                        e
                    })
                })
                .collect(),
            GroupSpec::Free { rank } => (1..=*rank as i64)
                .flat_map(|i| [vec![i], vec![-i]])
                .collect(),
            GroupSpec::Permutation { degree, generators } => {
                let mut out: Vec<Elem> = Vec::new();
                for g in generators {
                    let mut p: Elem = (0..*degree as i64).collect();
                    for c in g {
                        for w in 0..c.len() {
                            p[c[w] - 1] = c[(w + 1) % c.len()] as i64 - 1;
                        }
                    }
                    let inv = self.inverse(&p);
                    for e in [p, inv] {
                        if !out.contains(&e) {
                            out.push(e);
                        }
                    }
                }
                out
            }
            GroupSpec::CyclicProduct { moduli } => (0..moduli.len())
                .flat_map(|i| {
                    let mut up = vec![0; moduli.len()];
                    up[i] = 1;
                    let mut down = vec![0; moduli.len()];
                    down[i] = moduli[i] as i64 - 1;
                    if up == down {
                        vec![up]
                    } else {
                        vec![up, down]
                    }
                })
                .collect(),
        }
    }

    pub fn multiply(&self, a: &Elem, b: &Elem) -> Elem {
        match self {
            GroupSpec::FreeAbelian { .. } => a.iter().zip(b).map(|(x, y)| x + y).collect(),
            GroupSpec::Free { .. } => {
                let mut w = a.clone();
                for &l in b {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                w
            }
            // apply `b` first
            GroupSpec::Permutation { .. } => b.iter().map(|&i| a[i as usize]).collect(),
            GroupSpec::CyclicProduct { moduli } => a
                .iter()
                .zip(b)
                .zip(moduli)
                .map(|((x, y), &m)| (x + y).rem_euclid(m as i64))
                .collect(),
        }
    }

    pub fn inverse(&self, a: &Elem) -> Elem {
        match self {
            GroupSpec::FreeAbelian { .. } => a.iter().map(|x| -x).collect(),
            GroupSpec::Free { .. } => a.iter().rev().map(|x| -x).collect(),
            GroupSpec::Permutation { .. } => {
                let mut inv = vec![0; a.len()];
                for (i, &j) in a.iter().enumerate() {
                    inv[j as usize] = i as i64;
                }
                inv
            }
            GroupSpec::CyclicProduct { moduli } => a
                .iter()
                .zip(moduli)
                .map(|(x, &m)| (-x).rem_euclid(m as i64))
                .collect(),
        }
    }

    /// Word length where a closed form exists.
    fn closed_form_length(&self, a: &Elem) -> Option<u64> {
        match self {
            GroupSpec::FreeAbelian { .. } => Some(a.iter().map(|x| x.unsigned_abs()).sum()),
            GroupSpec::Free { .. } => Some(a.len() as u64),
            GroupSpec::CyclicProduct { moduli } => Some(
                a.iter()
                    .zip(moduli)
                    .map(|(&x, &m)| (x as u64).min(m - x as u64))
                    .sum(),
            ),
            GroupSpec::Permutation { .. } => None,
        }
    }

    pub fn label(&self, a: &Elem) -> String {
        match self {
            GroupSpec::FreeAbelian { rank: 1 } => a[0].to_string(),
            GroupSpec::Free { .. } => {
                if a.is_empty() {
                    return "e".into();
                }
                a.iter()
                    .map(|&l| {
                        let c = (b'a' + (l.unsigned_abs() - 1) as u8) as char;
                        if l < 0 {
                            c.to_ascii_uppercase()
                        } else {
                            c
                        }
                    })
                    .collect()
            }
            GroupSpec::Permutation { .. } => {
                let mut s = String::from("[");
                for (i, x) in a.iter().enumerate() {
                    if i > 0 {
                        s.push(' ');
                    }
                    let _ = write!(s, "{}", x + 1);
                }
                s.push(']');
                s
            }
            _ => {
                let parts: Vec<String> = a.iter().map(i64::to_string).collect();
                format!("({})", parts.join(","))
            }
        }
    }
}

/// Breadth-first ball, in frontier order, with word lengths.
fn enumerate_ball(
    g: &GroupSpec,
    radius: usize,
    cap: usize,
) -> Result<(Vec<Elem>, Vec<usize>), SpaceError> {
    let gens = g.generators();
    let id = g.identity();
    let mut seen: HashMap<Elem, usize> = HashMap::from([(id.clone(), 0)]);
    let mut order = vec![id.clone()];
    let mut len = vec![0];
    let mut frontier = VecDeque::from([id]);
    while let Some(x) = frontier.pop_front() {
        let lx = seen[&x];
        if lx == radius {
            continue;
        }
        for s in &gens {
            let y = g.multiply(&x, s);
            if !seen.contains_key(&y) {
                if order.len() >= cap {
                    return Err(SpaceError::CapExceeded { cap });
                }
                seen.insert(y.clone(), lx + 1);
                order.push(y.clone());
                len.push(lx + 1);
                frontier.push_back(y);
            }
        }
    }
    Ok((order, len))
}

/// Where a window came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum Provenance {
    GroupBall { group: GroupSpec, radius: usize },
    File { path: String },
    Inline,
    Synthetic { kind: Synthetic },
    Subspace,
}

/// A finite metric space with per-point depth inside the window.
///
/// Distances are `f64`; `+∞` marks pairs whose distance is not known on the
/// window and which no entourage contains. Depth is the distance to the
/// window's edge, `+∞` when the window has no edge.
#[derive(Clone, Debug)]
pub struct MetricWindow {
    ground: Arc<GroundSet>,
    d: Vec<f64>,
    depth: Vec<f64>,
    provenance: Provenance,
}

impl MetricWindow {
    /// Validates symmetry, zero diagonal, nonnegativity and the triangle inequality.
    pub fn new(
        labels: Vec<String>,
        d: Vec<f64>,
        depth: Option<Vec<f64>>,
        provenance: Provenance,
    ) -> Result<Self, SpaceError> {
        let n = labels.len();
        if d.len() != n * n {
            return Err(SpaceError::Parse(format!(
                "expected {} distances, got {}",
                n * n,
                d.len()
            )));
        }
        let ground = GroundSet::new(labels)?;
        let w = Self {
            ground,
            depth: depth.unwrap_or_else(|| vec![f64::INFINITY; n]),
            d,
            provenance,
        };
        w.validate()?;
        Ok(w)
    }

    /// Trusted constructor for metrics that hold by construction.
    fn trusted(
        ground: Arc<GroundSet>,
        d: Vec<f64>,
        depth: Vec<f64>,
        provenance: Provenance,
    ) -> Self {
        Self {
            ground,
            d,
            depth,
            provenance,
        }
    }

    pub fn validate(&self) -> Result<(), SpaceError> {
        let n = self.len();
        for i in 0..n {
            if self.dist(i, i) != 0.0 {
                return Err(SpaceError::NonzeroDiagonal(i));
            }
            for j in 0..n {
                let x = self.dist(i, j);
                if x.is_nan() || x < 0.0 {
                    return Err(SpaceError::BadDistance(i, j));
                }
                if x != self.dist(j, i) {
                    return Err(SpaceError::NotSymmetric(i, j));
                }
            }
        }
        let bad = (0..n).into_par_iter().find_first(|&i| {
            (0..n).any(|j| (0..n).any(|k| self.dist(i, k) > self.dist(i, j) + self.dist(j, k)))
        });
        if let Some(i) = bad {
            for j in 0..n {
                for k in 0..n {
                    if self.dist(i, k) > self.dist(i, j) + self.dist(j, k) {
                        return Err(SpaceError::Triangle(i, j, k));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn ground(&self) -> &Arc<GroundSet> {
        &self.ground
    }

    pub fn len(&self) -> usize {
        self.ground.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground.is_empty()
    }

    #[inline]
    pub fn dist(&self, a: usize, b: usize) -> f64 {
        self.d[a * self.len() + b]
    }

    pub fn depths(&self) -> &[f64] {
        &self.depth
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Largest finite distance.
    pub fn diameter(&self) -> f64 {
        self.d
            .iter()
            .copied()
            .filter(|x| x.is_finite())
            .fold(0.0, f64::max)
    }

    /// `U_r = {(a, b) : d(a, b) ≤ r}`.
    pub fn threshold(&self, r: f64) -> Entourage {
        Entourage::from_predicate(&self.ground, |a, b| self.dist(a, b) <= r)
    }

    /// Threshold schedule; thresholds must be strictly increasing.
    pub fn schedule(&self, thresholds: &[f64]) -> Result<EntourageSchedule, SpaceError> {
        if thresholds.is_empty()
            || thresholds.iter().any(|t| !t.is_finite())
            || thresholds.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(SpaceError::Thresholds);
        }
        Ok(EntourageSchedule::new(
            thresholds.iter().map(|&t| self.threshold(t)).collect(),
        )?)
    }

    /// Points whose depth is at least `margin`.
    pub fn interior(&self, margin: f64) -> BitSet {
        let mut b = BitSet::new(self.len());
        for (i, &d) in self.depth.iter().enumerate() {
            if d >= margin {
                b.insert(i);
            }
        }
        b
    }

    /// Sub-window on the given points, in the given order.
    pub fn subspace(&self, points: &[usize]) -> Result<Self, SpaceError> {
        let labels: Vec<String> = points
            .iter()
            .map(|&p| self.ground.label(p).to_string())
            .collect();
        let ground = GroundSet::new(labels)?;
        let d = points
            .iter()
            .flat_map(|&a| points.iter().map(move |&b| (a, b)))
            .map(|(a, b)| self.dist(a, b))
            .collect();
        let depth = points.iter().map(|&p| self.depth[p]).collect();
        Ok(Self::trusted(ground, d, depth, Provenance::Subspace))
    }
}

/// Word-metric ball of radius `radius` around the identity.
///
/// Distances `d(x, y) = |x⁻¹y|` are exact: a closed form for abelian and free
/// groups, lookup in the breadth-first ball of radius `2·radius` for
/// permutation groups (which always contains `x⁻¹y`).
pub fn build_word_ball(
    g: &GroupSpec,
    radius: usize,
    cap: usize,
) -> Result<MetricWindow, SpaceError> {
    g.validate()?;
    let (points, lengths) = enumerate_ball(g, radius, cap)?;
    let n = points.len();
    let labels: Vec<String> = points.iter().map(|p| g.label(p)).collect();
    let big: Option<HashMap<Elem, usize>> = if g.closed_form_length(&g.identity()).is_none() {
        let big_cap = cap.saturating_mul(256);
        let (all, len) = enumerate_ball(g, 2 * radius, big_cap)?;
        Some(all.into_iter().zip(len).collect())
    } else {
        None
    };
    let inverses: Vec<Elem> = points.iter().map(|p| g.inverse(p)).collect();
    let d: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            let e = g.multiply(&inverses[i], &points[j]);
            match &big {
                None => g.closed_form_length(&e).expect("closed form") as f64,
                Some(table) => table.get(&e).map_or(f64::INFINITY, |&l| l as f64),
            }
        })
        .collect();
    let depth = lengths.iter().map(|&l| (radius - l) as f64).collect();
    Ok(MetricWindow::trusted(
        GroundSet::new(labels)?,
        d,
        depth,
        Provenance::GroupBall {
            group: g.clone(),
            radius,
        },
    ))
}

/// Parses a comma-separated square matrix with an optional `#points:` header.
pub fn parse_distance_matrix(text: &str) -> Result<(Vec<String>, Vec<f64>), SpaceError> {
    let mut labels: Option<Vec<String>> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#points:") {
            labels = Some(
                rest.split(|c: char| c == ',' || c.is_whitespace())
                    .filter(|s| !s.is_empty())
                    .map(str::to_string)
                    .collect(),
            );
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|x| {
                let x = x.trim();
                match x {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    _ => x.parse::<f64>().map_err(|_| {
                        SpaceError::Parse(format!("line {}: bad number {x:?}", ln + 1))
                    }),
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(SpaceError::Parse("empty matrix".into()));
    }
    if let Some(r) = rows.iter().position(|r| r.len() != n) {
        return Err(SpaceError::Parse(format!(
            "row {} has {} entries, expected {n}",
            r + 1,
            rows[r].len()
        )));
    }
    let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
    if labels.len() != n {
        return Err(SpaceError::Parse(format!(
            "{} labels for {n} rows",
            labels.len()
        )));
    }
    Ok((labels, rows.into_iter().flatten().collect()))
}

pub fn load_distance_matrix(path: &std::path::Path) -> Result<MetricWindow, SpaceError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| SpaceError::Io(format!("{}: {e}", path.display())))?;
    let (labels, d) = parse_distance_matrix(&text)?;
    MetricWindow::new(
        labels,
        d,
        None,
        Provenance::File {
            path: path.display().to_string(),
        },
    )
}

/// Synthetic families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Synthetic {
    /// `{2^0, …, 2^k} ⊂ ℤ`.
    GeometricSeries { k: u32 },
    /// `{0..w} × {0..h}` with the ℓ¹ metric.
    Grid { w: usize, h: usize },
    /// `n` points at pairwise distance 1.
    Bounded { n: usize },
    /// `{lo..=hi} ⊂ ℤ`.
    Interval { lo: i64, hi: i64 },
}

pub fn make_synthetic(kind: Synthetic, cap: usize) -> Result<MetricWindow, SpaceError> {
    let size = match kind {
        Synthetic::GeometricSeries { k } => (k as usize).saturating_add(1),
        Synthetic::Grid { w, h } => w.saturating_mul(h),
        Synthetic::Bounded { n } => n,
        Synthetic::Interval { lo, hi } => (hi.saturating_sub(lo).saturating_add(1)).max(0) as usize,
    };
    if size > cap {
        return Err(SpaceError::CapExceeded { cap });
    }
    if size == 0 {
        return Err(SpaceError::Parse("empty window".into()));
    }
    let (labels, coords): (Vec<String>, Vec<(i64, i64)>) = match kind {
        Synthetic::GeometricSeries { k } => {
            if k > 62 {
                return Err(SpaceError::Parse("exponent too large".into()));
            }
            (0..=k)
                .map(|e| (format!("{}", 1u64 << e), (1i64 << e, 0)))
                .unzip()
        }
        Synthetic::Grid { w, h } => (0..h as i64)
            .flat_map(|y| (0..w as i64).map(move |x| (format!("{x},{y}"), (x, y))))
            .unzip(),
        Synthetic::Bounded { n } => (0..n).map(|i| (format!("p{i}"), (i as i64, 0))).unzip(),
        Synthetic::Interval { lo, hi } => (lo..=hi).map(|x| (x.to_string(), (x, 0))).unzip(),
    };
    let n = labels.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (coords[i], coords[j]);
            d[i * n + j] = match kind {
                Synthetic::Bounded { .. } => f64::from(u8::from(i != j)),
                _ => ((a.0 - b.0).abs() + (a.1 - b.1).abs()) as f64,
            };
        }
    }
    let depth = match kind {
        Synthetic::Grid { w, h } => coords
            .iter()
            .map(|&(x, y)| x.min(w as i64 - 1 - x).min(y).min(h as i64 - 1 - y) as f64)
            .collect(),
        Synthetic::Interval { lo, hi } => coords
            .iter()
            .map(|&(x, _)| (x - lo).min(hi - x) as f64)
            .collect(),
        _ => vec![f64::INFINITY; n],
    };
    Ok(MetricWindow::trusted(
        GroundSet::new(labels)?,
        d,
        depth,
        Provenance::Synthetic { kind },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_ball_sizes() {
        let z = build_word_ball(&GroupSpec::FreeAbelian { rank: 1 }, 5, DEFAULT_CAP).unwrap();
        assert_eq!(z.len(), 11);
        let z2 = build_word_ball(&GroupSpec::FreeAbelian { rank: 2 }, 2, DEFAULT_CAP).unwrap();
        assert_eq!(z2.len(), 13);
        let f2 = build_word_ball(&GroupSpec::Free { rank: 2 }, 2, DEFAULT_CAP).unwrap();
        assert_eq!(f2.len(), 17);
        assert!(build_word_ball(&GroupSpec::Free { rank: 2 }, 8, 100).is_err());
    }

    #[test]
    fn free_group_distances() {
        let f2 = build_word_ball(&GroupSpec::Free { rank: 2 }, 2, DEFAULT_CAP).unwrap();
        let p = |l: &str| f2.ground().position(l).unwrap();
        assert_eq!(f2.dist(p("a"), p("b")), 2.0);
        assert_eq!(f2.dist(p("ab"), p("a")), 1.0);
        assert_eq!(f2.dist(p("ab"), p("AB")), 4.0);
        f2.validate().unwrap();
    }

    #[test]
    fn permutation_ball() {
        // S_3 generated by a transposition and a 3-cycle
        let g = GroupSpec::Permutation {
            degree: 3,
            generators: vec![vec![vec![1, 2]], vec![vec![1, 2, 3]]],
        };
        let w = build_word_ball(&g, 3, DEFAULT_CAP).unwrap();
        assert_eq!(w.len(), 6);
        w.validate().unwrap();
        assert!(w.diameter() <= 3.0);
    }

    #[test]
    fn matrix_parsing() {
        let (l, d) = parse_distance_matrix("#points: a,b\n0,1\n1,0\n").unwrap();
        assert_eq!(l, vec!["a", "b"]);
        assert_eq!(d, vec![0.0, 1.0, 1.0, 0.0]);
        assert!(matches!(
            parse_distance_matrix("0,1\n1,0,2\n"),
            Err(SpaceError::Parse(_))
        ));
        let (l, d) = parse_distance_matrix("0,1,5\n1,0,1\n5,1,0\n").unwrap();
        assert_eq!(
            MetricWindow::new(l, d, None, Provenance::Inline).unwrap_err(),
            SpaceError::Triangle(0, 1, 2)
        );
    }

    #[test]
    fn synthetic_windows() {
        let g = make_synthetic(Synthetic::GeometricSeries { k: 10 }, DEFAULT_CAP).unwrap();
        assert_eq!(g.len(), 11);
        assert_eq!(g.diameter(), 1023.0);
        let grid = make_synthetic(Synthetic::Grid { w: 9, h: 9 }, DEFAULT_CAP).unwrap();
        assert_eq!(grid.len(), 81);
        assert_eq!(grid.diameter(), 16.0);
        assert_eq!(grid.interior(1.0).count(), 49);
        let b = make_synthetic(Synthetic::Bounded { n: 4 }, DEFAULT_CAP).unwrap();
        assert_eq!(b.diameter(), 1.0);
        assert!(make_synthetic(Synthetic::Bounded { n: 10 }, 5).is_err());
    }
}
