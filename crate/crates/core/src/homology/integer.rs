//! Dense Smith normal form over the integers with checked `i64` arithmetic.

use super::HomologyError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<i64>,
}

fn ck(v: Option<i64>) -> Result<i64, HomologyError> {
    v.ok_or(HomologyError::Overflow)
}

impl Dense {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            a: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.a[i * n + i] = 1;
        }
        m
    }

    /// Columns given as sparse `(row, value)` lists.
    pub fn from_columns(rows: usize, cols: &[Vec<(u32, i64)>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            for &(r, v) in c {
                m.a[r as usize * m.cols + j] += v;
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.cols + j]
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.a[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.a[i * self.cols..(i + 1) * self.cols]
    }

    /// `self · other`.
    pub fn mul(&self, other: &Dense) -> Result<Dense, HomologyError> {
        assert_eq!(self.cols, other.rows);
        let mut out = Dense::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let x = self.get(i, k);
                if x == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let y = other.get(k, j);
                    if y != 0 {
                        let cur = out.get(i, j);
                        out.set(i, j, ck(cur.checked_add(ck(x.checked_mul(y))?))?);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `self · v` for a dense vector.
    pub fn apply(&self, v: &[i64]) -> Result<Vec<i64>, HomologyError> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i).iter().zip(v).try_fold(0i64, |acc, (&x, &y)| {
                    if x == 0 || y == 0 {
                        Ok(acc)
                    } else {
                        ck(acc.checked_add(ck(x.checked_mul(y))?))
                    }
                })
            })
            .collect()
    }

    /// `row_dst += q · row_src`.
    fn row_axpy(&mut self, dst: usize, q: i64, src: usize) -> Result<(), HomologyError> {
        if q == 0 {
            return Ok(());
        }
        for j in 0..self.cols {
            let s = self.get(src, j);
            if s != 0 {
                let v = ck(self.get(dst, j).checked_add(ck(q.checked_mul(s))?))?;
                self.set(dst, j, v);
            }
        }
        Ok(())
    }

    /// `col_dst += q · col_src`.
    fn col_axpy(&mut self, dst: usize, q: i64, src: usize) -> Result<(), HomologyError> {
        if q == 0 {
            return Ok(());
        }
        for i in 0..self.rows {
            let s = self.get(i, src);
            if s != 0 {
                let v = ck(self.get(i, dst).checked_add(ck(q.checked_mul(s))?))?;
                self.set(i, dst, v);
            }
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.a.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.a.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = self.get(i, j);
            self.set(i, j, -v);
        }
    }

    fn negate_col(&mut self, j: usize) {
        for i in 0..self.rows {
            let v = self.get(i, j);
            self.set(i, j, -v);
        }
    }
}

/// `P · A · Q = D` with `D` diagonal, `d_1 | d_2 | …`, all positive.
pub(crate) struct Snf {
    pub diag: Vec<i64>,
    pub p: Dense,
    pub p_inv: Dense,
    pub q: Dense,
    pub q_inv: Dense,
}

struct Work {
    a: Dense,
    p: Dense,
    p_inv: Dense,
    q: Dense,
    q_inv: Dense,
}

impl Work {
    fn row_axpy(&mut self, dst: usize, q: i64, src: usize) -> Result<(), HomologyError> {
        self.a.row_axpy(dst, q, src)?;
        self.p.row_axpy(dst, q, src)?;
        self.p_inv.col_axpy(src, -q, dst)
    }

    fn col_axpy(&mut self, dst: usize, q: i64, src: usize) -> Result<(), HomologyError> {
        self.a.col_axpy(dst, q, src)?;
        self.q.col_axpy(dst, q, src)?;
        self.q_inv.row_axpy(src, -q, dst)
    }

    fn swap_rows(&mut self, x: usize, y: usize) {
        self.a.swap_rows(x, y);
        self.p.swap_rows(x, y);
        self.p_inv.swap_cols(x, y);
    }

    fn swap_cols(&mut self, x: usize, y: usize) {
        self.a.swap_cols(x, y);
        self.q.swap_cols(x, y);
        self.q_inv.swap_rows(x, y);
    }

    fn negate_row(&mut self, i: usize) {
        self.a.negate_row(i);
        self.p.negate_row(i);
        self.p_inv.negate_col(i);
    }
}

pub(crate) fn smith(a: Dense) -> Result<Snf, HomologyError> {
    let (m, n) = (a.rows, a.cols);
    let mut w = Work {
        a,
        p: Dense::identity(m),
        p_inv: Dense::identity(m),
        q: Dense::identity(n),
        q_inv: Dense::identity(n),
    };
    let mut diag = Vec::new();
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let v = w.a.get(i, j);
                if v != 0
                    && best.is_none_or(|(bi, bj)| v.unsigned_abs() < w.a.get(bi, bj).unsigned_abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        w.swap_rows(t, bi);
        w.swap_cols(t, bj);
        loop {
            let pivot = w.a.get(t, t);
            let mut residue = None;
            for i in t + 1..m {
                let v = w.a.get(i, t);
                if v != 0 {
                    w.row_axpy(i, -(v / pivot), t)?;
                    if w.a.get(i, t) != 0 {
                        residue = Some((i, t));
                    }
                }
            }
            for j in t + 1..n {
                let v = w.a.get(t, j);
                if v != 0 {
                    w.col_axpy(j, -(v / pivot), t)?;
                    if w.a.get(t, j) != 0 {
                        residue = Some((t, j));
                    }
                }
            }
            if let Some((i, j)) = residue {
                if i == t {
                    w.swap_cols(t, j);
                } else {
                    w.swap_rows(t, i);
                }
                continue;
            }
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| w.a.get(i, j) % pivot != 0));
            match bad {
                Some(i) => w.row_axpy(t, 1, i)?,
                None => break,
            }
        }
        if w.a.get(t, t) < 0 {
            w.negate_row(t);
        }
        diag.push(w.a.get(t, t));
    }
    Ok(Snf {
        diag,
        p: w.p,
        p_inv: w.p_inv,
        q: w.q,
        q_inv: w.q_inv,
    })
}

/// Integral homology of one degree.
///
/// With `∂_k = P⁻¹ D Q⁻¹`, the kernel has basis `K` = the last columns of
/// `Q`. Writing the next boundary in that basis and diagonalizing again gives
/// `P' M Q' = D'`; generators are the columns of `K · P'⁻¹` whose invariant
/// factor differs from one.
pub(crate) struct IntDegree {
    /// Coordinates of a cycle in the kernel basis, followed by `P'`.
    to_coords: Dense,
    generators: Vec<Vec<i64>>,
    /// `0` for a free generator, otherwise the torsion order.
    orders: Vec<u64>,
    keep: Vec<usize>,
}

impl IntDegree {
    pub fn new(kernel_of: &Snf, n_k: usize, next_boundary: &Dense) -> Result<Self, HomologyError> {
        let r = kernel_of.diag.len();
        let z = n_k - r;
        let mut tail = Dense::zeros(z, n_k);
        for i in 0..z {
            for j in 0..n_k {
                tail.set(i, j, kernel_of.q_inv.get(r + i, j));
            }
        }
        let mut kernel = Dense::zeros(n_k, z);
        for i in 0..n_k {
            for j in 0..z {
                kernel.set(i, j, kernel_of.q.get(i, r + j));
            }
        }
        let m = tail.mul(next_boundary)?;
        let snf = smith(m)?;
        let to_coords = snf.p.mul(&tail)?;
        let lifted = kernel.mul(&snf.p_inv)?;
        let mut generators = Vec::new();
        let mut orders = Vec::new();
        let mut keep = Vec::new();
        for i in 0..z {
            let d = snf.diag.get(i).copied().unwrap_or(0);
            if d == 1 {
                continue;
            }
            keep.push(i);
            orders.push(d as u64);
            generators.push((0..n_k).map(|row| lifted.get(row, i)).collect());
        }
        Ok(Self {
            to_coords,
            generators,
            orders,
            keep,
        })
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn generators(&self) -> impl Iterator<Item = Vec<(u32, i64)>> + '_ {
        self.generators.iter().map(|g| {
            g.iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as u32, c))
                .collect()
        })
    }

    /// Coordinates of a cycle (already known to be one); torsion entries reduced.
    pub fn coordinates(&self, dense: &[i64]) -> Result<Vec<i64>, HomologyError> {
        let y = self.to_coords.apply(dense)?;
        Ok(self
            .keep
            .iter()
            .zip(&self.orders)
            .map(|(&i, &d)| {
                if d == 0 {
                    y[i]
                } else {
                    y[i].rem_euclid(d as i64)
                }
            })
            .collect())
    }
}
