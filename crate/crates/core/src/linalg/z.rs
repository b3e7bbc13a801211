use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::MatrixF2;

/// Sparse integer matrix; row `r` maps column indices to nonzero entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixZ {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, BigInt>>,
}

impl MatrixZ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixZ { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for k in 0..n {
            m.set(k, k, BigInt::one());
        }
        m
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged matrix");
            for (c, v) in row.iter().enumerate() {
                m.set(r, c, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> BigInt {
        self.data[r].get(&c).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        assert!(r < self.rows && c < self.cols);
        if v.is_zero() {
            self.data[r].remove(&c);
        } else {
            self.data[r].insert(c, v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: &BigInt) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn row(&self, r: usize) -> &BTreeMap<usize, BigInt> {
        &self.data[r]
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn mul(&self, other: &MatrixZ) -> MatrixZ {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = MatrixZ::zeros(self.rows, other.cols);
        for (r, row) in self.data.iter().enumerate() {
            let mut acc: BTreeMap<usize, BigInt> = BTreeMap::new();
            for (&k, a) in row {
                for (&c, b) in &other.data[k] {
                    *acc.entry(c).or_default() += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
            out.data[r] = acc;
        }
        out
    }

    pub fn transpose(&self) -> MatrixZ {
        let mut t = MatrixZ::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for (&c, v) in row {
                t.data[c].insert(r, v.clone());
            }
        }
        t
    }

    /// Applies the matrix to a sparse column vector.
    pub fn apply(&self, v: &BTreeMap<usize, BigInt>) -> BTreeMap<usize, BigInt> {
        let mut out = BTreeMap::new();
        for (r, row) in self.data.iter().enumerate() {
            let mut acc = BigInt::zero();
            for (c, x) in v {
                if let Some(a) = row.get(c) {
                    acc += a * x;
                }
            }
            if !acc.is_zero() {
                out.insert(r, acc);
            }
        }
        out
    }

    fn to_dense(&self) -> Vec<Vec<BigInt>> {
        let mut d = vec![vec![BigInt::zero(); self.cols]; self.rows];
        for (r, row) in self.data.iter().enumerate() {
            for (&c, v) in row {
                d[r][c] = v.clone();
            }
        }
        d
    }

    fn from_dense_big(d: Vec<Vec<BigInt>>, cols: usize) -> MatrixZ {
        let mut m = MatrixZ::zeros(d.len(), cols);
        for (r, row) in d.into_iter().enumerate() {
            for (c, v) in row.into_iter().enumerate() {
                if !v.is_zero() {
                    m.data[r].insert(c, v);
                }
            }
        }
        m
    }

    /// Determinant by fraction-free elimination (square matrices only).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.to_dense();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            if p != k {
                a.swap(p, k);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        if n == 0 {
            BigInt::one()
        } else {
            sign * &a[n - 1][n - 1]
        }
    }
}

/// `left * m * right` is diagonal with entries `factors` (then zeros), each
/// factor positive and dividing the next.
#[derive(Clone, Debug)]
pub struct Snf {
    pub factors: Vec<BigInt>,
    pub left: MatrixZ,
    pub right: MatrixZ,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.factors.len()
    }
}

fn row_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    // row dst -= q * row src
    let (s, d) = if src < dst {
        let (x, y) = a.split_at_mut(dst);
        (&x[src], &mut y[0])
    } else {
        let (x, y) = a.split_at_mut(src);
        (&y[0], &mut x[dst])
    };
    for (dv, sv) in d.iter_mut().zip(s.iter()) {
        if !sv.is_zero() {
            *dv -= q * sv;
        }
    }
}

fn col_axpy(a: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    for row in a.iter_mut() {
        if !row[src].is_zero() {
            let t = q * &row[src];
            row[dst] -= t;
        }
    }
}

fn swap_cols(a: &mut [Vec<BigInt>], i: usize, j: usize) {
    for row in a.iter_mut() {
        row.swap(i, j);
    }
}

/// Dense Smith form. `l` and `r` receive the same row/column operations
/// when present.
fn snf_dense(a: &mut [Vec<BigInt>], rows: usize, cols: usize, mut l: Option<&mut Vec<Vec<BigInt>>>, mut r: Option<&mut Vec<Vec<BigInt>>>) -> Vec<BigInt> {
    let mut factors = vec![];
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot of minimal absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        if let Some(l) = l.as_deref_mut() {
            l.swap(t, pi);
        }
        swap_cols(a, t, pj);
        if let Some(r) = r.as_deref_mut() {
            swap_cols(r, t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(a, i, t, &q);
                if let Some(l) = l.as_deref_mut() {
                    row_axpy(l, i, t, &q);
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                col_axpy(a, j, t, &q);
                if let Some(r) = r.as_deref_mut() {
                    col_axpy(r, j, t, &q);
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // move the smallest remaining entry of row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                    if let Some(l) = l.as_deref_mut() {
                        l.swap(t, best.0);
                    }
                } else if best.1 != t {
                    swap_cols(a, t, best.1);
                    if let Some(r) = r.as_deref_mut() {
                        swap_cols(r, t, best.1);
                    }
                }
                continue;
            }
            // divisibility of the trailing block
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    let m1 = BigInt::from(-1);
                    row_axpy(a, t, i, &m1);
                    if let Some(l) = l.as_deref_mut() {
                        row_axpy(l, t, i, &m1);
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for v in a[t].iter_mut() {
                *v = -v.clone();
            }
            if let Some(l) = l.as_deref_mut() {
                for v in l[t].iter_mut() {
                    *v = -v.clone();
                }
            }
        }
        factors.push(a[t][t].clone());
        t += 1;
    }
    factors
}

/// Smith normal form with unimodular transforms. Dense; intended for small
/// matrices and for checking [`invariant_factors`].
pub fn smith_normal_form(m: &MatrixZ) -> Snf {
    let mut a = m.to_dense();
    let mut l = MatrixZ::identity(m.rows).to_dense();
    let mut r = MatrixZ::identity(m.cols).to_dense();
    let factors = snf_dense(&mut a, m.rows, m.cols, Some(&mut l), Some(&mut r));
    Snf { factors, left: MatrixZ::from_dense_big(l, m.rows), right: MatrixZ::from_dense_big(r, m.cols) }
}

/// Nonzero invariant factors only. Unit pivots are eliminated sparsely
/// first; whatever remains goes through the dense algorithm.
pub fn invariant_factors(m: &MatrixZ) -> Vec<BigInt> {
    let mut rows: Vec<Option<BTreeMap<usize, BigInt>>> = m.data.iter().cloned().map(Some).collect();
    let mut col_rows: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
    for (r, row) in m.data.iter().enumerate() {
        for &c in row.keys() {
            col_rows.entry(c).or_default().insert(r);
        }
    }
    let mut units = 0usize;
    let mut queue: Vec<usize> = (0..m.rows).rev().collect();
    while let Some(r) = queue.pop() {
        let Some(row) = rows[r].as_ref() else { continue };
        // a unit entry in the sparsest column
        let pick = row
            .iter()
            .filter(|(_, v)| v.abs().is_one())
            .min_by_key(|(c, _)| col_rows[c].len())
            .map(|(&c, v)| (c, v.clone()));
        let Some((c, u)) = pick else { continue };
        let prow = rows[r].take().unwrap();
        for &c2 in prow.keys() {
            col_rows.get_mut(&c2).unwrap().remove(&r);
        }
        let others: Vec<usize> = col_rows[&c].iter().copied().collect();
        for r2 in others {
            let row2 = rows[r2].as_mut().unwrap();
            let q = &row2[&c] * &u;
            for (&c2, v) in &prow {
                let e = row2.entry(c2).or_default();
                *e -= &q * v;
                if e.is_zero() {
                    row2.remove(&c2);
                    col_rows.get_mut(&c2).unwrap().remove(&r2);
                } else {
                    col_rows.entry(c2).or_default().insert(r2);
                }
            }
            queue.push(r2);
        }
        units += 1;
    }
    let rest: Vec<&BTreeMap<usize, BigInt>> = rows.iter().flatten().filter(|r| !r.is_empty()).collect();
    let mut factors = vec![BigInt::one(); units];
    if !rest.is_empty() {
        let cols: BTreeSet<usize> = rest.iter().flat_map(|r| r.keys().copied()).collect();
        let cpos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(k, &c)| (c, k)).collect();
        let mut a = vec![vec![BigInt::zero(); cols.len()]; rest.len()];
        for (i, row) in rest.iter().enumerate() {
            for (c, v) in row.iter() {
                a[i][cpos[c]] = v.clone();
            }
        }
        factors.extend(snf_dense(&mut a, rest.len(), cols.len(), None, None));
    }
    factors.sort();
    factors
}

/// Entrywise reduction modulo 2.
pub fn mod2(m: &MatrixZ) -> MatrixF2 {
    let mut out = MatrixF2::zeros(m.rows, m.cols);
    for (r, row) in m.data.iter().enumerate() {
        for (&c, v) in row {
            if v.is_odd() {
                out.set(r, c, true);
            }
        }
    }
    out
}
