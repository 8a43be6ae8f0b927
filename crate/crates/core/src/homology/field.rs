//! Sparse column reduction over a prime field `F_p`.

use std::collections::HashMap;

use super::HomologyError;

/// Sparse vector: `(row, value)` pairs sorted by row, values in `1..p`.
pub(crate) type SparseVec = Vec<(u32, u32)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Fp {
    pub p: u32,
}

impl Fp {
    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(a != 0);
        let (mut base, mut exp, mut acc) = (a as u64, self.p as u64 - 2, 1u64);
        let m = self.p as u64;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base % m;
            }
            base = base * base % m;
            exp >>= 1;
        }
        acc as u32
    }

    pub fn residue(self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// Symmetric lift back to the integers is not needed; residues are reported as is.
    pub fn to_i64(self, a: u32) -> i64 {
        a as i64
    }

    pub fn vec_from_i64(self, v: &[(u32, i64)]) -> SparseVec {
        let mut out: SparseVec = Vec::with_capacity(v.len());
        let mut sorted: Vec<(u32, i64)> = v.to_vec();
        sorted.sort_unstable_by_key(|e| e.0);
        for (r, c) in sorted {
            let c = self.residue(c);
            match out.last_mut() {
                Some(last) if last.0 == r => last.1 = self.add(last.1, c),
                _ => out.push((r, c)),
            }
        }
        out.retain(|e| e.1 != 0);
        out
    }

    /// `x + a·y`.
    pub fn axpy(self, x: &SparseVec, a: u32, y: &SparseVec) -> SparseVec {
        let mut out = Vec::with_capacity(x.len() + y.len());
        let (mut i, mut j) = (0, 0);
        while i < x.len() || j < y.len() {
            let take_x = j >= y.len() || (i < x.len() && x[i].0 < y[j].0);
            let take_y = i >= x.len() || (j < y.len() && y[j].0 < x[i].0);
            if take_x {
                out.push(x[i]);
                i += 1;
            } else if take_y {
                out.push((y[j].0, self.mul(a, y[j].1)));
                j += 1;
            } else {
                let v = self.add(x[i].1, self.mul(a, y[j].1));
                if v != 0 {
                    out.push((x[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        out
    }
}

/// Result of the standard left-to-right column reduction `R = D·V`.
pub(crate) struct Reduction {
    pub reduced: Vec<SparseVec>,
    /// Only populated when requested.
    pub v: Vec<SparseVec>,
    /// `low row → column` for every nonzero reduced column.
    pub low_owner: HashMap<u32, usize>,
}

pub(crate) fn reduce(fp: Fp, columns: Vec<SparseVec>, track_v: bool) -> Reduction {
    let mut reduced = columns;
    let mut v: Vec<SparseVec> = if track_v {
        (0..reduced.len()).map(|j| vec![(j as u32, 1)]).collect()
    } else {
        Vec::new()
    };
    let mut low_owner: HashMap<u32, usize> = HashMap::new();
    for j in 0..reduced.len() {
        while let Some(&(low, val)) = reduced[j].last() {
            let Some(&i) = low_owner.get(&low) else {
                low_owner.insert(low, j);
                break;
            };
            let pivot = reduced[i].last().expect("owner column is nonzero").1;
            let factor = fp.neg(fp.mul(val, fp.inv(pivot)));
            let col = fp.axpy(&reduced[j], factor, &reduced[i]);
            reduced[j] = col;
            if track_v {
                let vc = fp.axpy(&v[j], factor, &v[i]);
                v[j] = vc;
            }
        }
    }
    Reduction {
        reduced,
        v,
        low_owner,
    }
}

/// Homology data of one degree over `F_p`.
///
/// Generators are the reduction-kernel vectors `V_σ` of unpaired positive
/// simplices; together with the reduced boundary columns of the next degree
/// they form a basis of the cycles with pairwise distinct lowest rows.
pub(crate) struct FieldDegree {
    fp: Fp,
    generators: Vec<SparseVec>,
    generator_at: HashMap<u32, usize>,
    boundary_at: HashMap<u32, SparseVec>,
}

impl FieldDegree {
    pub fn new(fp: Fp, kernel: Vec<(u32, SparseVec)>, next_boundary: &Reduction) -> Self {
        let mut generators = Vec::new();
        let mut generator_at = HashMap::new();
        for (sigma, cycle) in kernel {
            if !next_boundary.low_owner.contains_key(&sigma) {
                generator_at.insert(sigma, generators.len());
                generators.push(cycle);
            }
        }
        let boundary_at = next_boundary
            .low_owner
            .iter()
            .map(|(&low, &col)| (low, next_boundary.reduced[col].clone()))
            .collect();
        Self {
            fp,
            generators,
            generator_at,
            boundary_at,
        }
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> impl Iterator<Item = Vec<(u32, i64)>> + '_ {
        self.generators
            .iter()
            .map(|g| g.iter().map(|&(r, c)| (r, self.fp.to_i64(c))).collect())
    }

    /// Coordinates of a cycle's class in the generator basis.
    pub fn coordinates(&self, chain: &[(u32, i64)]) -> Result<Vec<i64>, HomologyError> {
        let fp = self.fp;
        let mut c = fp.vec_from_i64(chain);
        let mut coords = vec![0u32; self.generators.len()];
        while let Some(&(low, val)) = c.last() {
            if let Some(b) = self.boundary_at.get(&low) {
                let pivot = b.last().expect("nonzero").1;
                c = fp.axpy(&c, fp.neg(fp.mul(val, fp.inv(pivot))), b);
            } else if let Some(&g) = self.generator_at.get(&low) {
                // generator columns carry coefficient 1 at their own index
                coords[g] = fp.add(coords[g], val);
                c = fp.axpy(&c, fp.neg(val), &self.generators[g]);
            } else {
                return Err(HomologyError::NotACycle);
            }
        }
        Ok(coords.into_iter().map(|x| fp.to_i64(x)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        let f = Fp { p: 7 };
        for a in 1..7 {
            assert_eq!(f.mul(a, f.inv(a)), 1);
        }
        assert_eq!(f.residue(-1), 6);
        let x = vec![(0, 1), (3, 2)];
        let y = vec![(3, 5), (4, 1)];
        assert_eq!(f.axpy(&x, 1, &y), vec![(0, 1), (4, 1)]);
    }

    #[test]
    fn reduction_of_triangle_boundary() {
        // ∂ of edges 01, 02, 12 in vertex rows 0, 1, 2 over F_2
        let f = Fp { p: 2 };
        let cols = vec![
            vec![(0, 1), (1, 1)],
            vec![(0, 1), (2, 1)],
            vec![(1, 1), (2, 1)],
        ];
        let r = reduce(f, cols, true);
        assert!(r.reduced[2].is_empty());
        assert_eq!(r.v[2], vec![(0, 1), (1, 1), (2, 1)]);
        assert_eq!(r.low_owner.len(), 2);
    }
}
