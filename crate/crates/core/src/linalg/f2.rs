use std::collections::HashMap;

use rayon::prelude::*;

use super::BitRow;

/// Dense matrix over F2, stored as packed rows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MatrixF2 {
    rows: usize,
    cols: usize,
    data: Vec<BitRow>,
}

impl MatrixF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixF2 { rows, cols, data: vec![BitRow::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        MatrixF2 { rows: n, cols: n, data: (0..n).map(|k| BitRow::unit(n, k)).collect() }
    }

    /// Builds from a dense 0/1 table given row by row.
    pub fn from_dense(rows: &[Vec<u8>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), cols, "ragged matrix");
                BitRow::from_bits(&r.iter().map(|&x| x & 1 == 1).collect::<Vec<_>>())
            })
            .collect();
        MatrixF2 { rows: rows.len(), cols, data }
    }

    pub fn from_rows(cols: usize, data: Vec<BitRow>) -> Self {
        assert!(data.iter().all(|r| r.len() == cols));
        MatrixF2 { rows: data.len(), cols, data }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(rows: usize, cols: &[BitRow]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (c, v) in cols.iter().enumerate() {
            for r in v.ones() {
                m.data[r].set(c, true);
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

    pub fn row(&self, r: usize) -> &BitRow {
        &self.data[r]
    }

    pub fn row_data(&self) -> &[BitRow] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        self.data[r].set(c, v)
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r].flip(c)
    }

    pub fn column(&self, c: usize) -> BitRow {
        BitRow::from_indices(self.rows, (0..self.rows).filter(|&r| self.data[r].get(c)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitRow::is_zero)
    }

    pub fn transpose(&self) -> MatrixF2 {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, row) in self.data.iter().enumerate() {
            for c in row.ones() {
                t.data[c].set(r, true);
            }
        }
        t
    }

    pub fn mul(&self, other: &MatrixF2) -> MatrixF2 {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let data = self
            .data
            .par_iter()
            .map(|row| {
                let mut acc = BitRow::zeros(other.cols);
                for k in row.ones() {
                    acc.xor_assign(&other.data[k]);
                }
                acc
            })
            .collect();
        MatrixF2 { rows: self.rows, cols: other.cols, data }
    }

    pub fn mul_vec(&self, v: &BitRow) -> BitRow {
        assert_eq!(self.cols, v.len());
        BitRow::from_indices(self.rows, (0..self.rows).filter(|&r| self.data[r].and_parity(v)))
    }

    pub fn rank(&self) -> usize {
        rref_f2(self).rank
    }
}

/// Output of [`rref_f2`]. Kernel vectors are the columns of `kernel_basis`
/// (`cols x nullity`); `image_basis` holds the pivot columns of the input
/// (`rows x rank`).
#[derive(Clone, Debug)]
pub struct Rref {
    pub rank: usize,
    pub pivots: Vec<usize>,
    pub kernel_basis: MatrixF2,
    pub image_basis: MatrixF2,
    /// reduced row echelon form, first `rank` rows nonzero
    pub reduced: MatrixF2,
}

const PAR_THRESHOLD: usize = 256;

/// Gauss-Jordan elimination scanning columns left to right, taking the
/// first row with a one in the current column as pivot.
pub fn rref_f2(m: &MatrixF2) -> Rref {
    let mut rows = m.data.clone();
    let mut pivots = vec![];
    let mut rank = 0;
    for c in 0..m.cols {
        if rank == m.rows {
            break;
        }
        let Some(p) = (rank..m.rows).find(|&r| rows[r].get(c)) else {
            continue;
        };
        rows.swap(rank, p);
        let (head, tail) = rows.split_at_mut(rank);
        let (prow, tail) = tail.split_first_mut().unwrap();
        let prow = &*prow;
        let wipe = |r: &mut BitRow| {
            if r.get(c) {
                r.xor_from(prow, c);
            }
        };
        if m.rows > PAR_THRESHOLD {
            head.par_iter_mut().for_each(wipe);
            tail.par_iter_mut().for_each(wipe);
        } else {
            head.iter_mut().for_each(wipe);
            tail.iter_mut().for_each(wipe);
        }
        pivots.push(c);
        rank += 1;
    }
    let reduced = MatrixF2 { rows: m.rows, cols: m.cols, data: rows };

    let mut is_pivot = vec![false; m.cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let kernel: Vec<BitRow> = (0..m.cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = BitRow::unit(m.cols, f);
            for (k, &p) in pivots.iter().enumerate() {
                if reduced.data[k].get(f) {
                    v.set(p, true);
                }
            }
            v
        })
        .collect();
    let kernel_basis = MatrixF2::from_columns(m.cols, &kernel);
    let image_cols: Vec<BitRow> = pivots.iter().map(|&p| m.column(p)).collect();
    let image_basis = MatrixF2::from_columns(m.rows, &image_cols);
    Rref { rank, pivots, kernel_basis, image_basis, reduced }
}

/// Sparse matrix over F2 stored by columns: `col(c)` lists the rows holding a one.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseF2 {
    rows: usize,
    cols: Vec<Vec<usize>>,
}

impl SparseF2 {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseF2 { rows, cols: vec![vec![]; cols] }
    }

    pub fn identity(n: usize) -> Self {
        SparseF2 { rows: n, cols: (0..n).map(|k| vec![k]).collect() }
    }

    /// Column lists are sorted and entries appearing twice cancel.
    pub fn from_columns(rows: usize, cols: Vec<Vec<usize>>) -> Self {
        let cols = cols.into_iter().map(normalize).collect::<Vec<_>>();
        debug_assert!(cols.iter().flatten().all(|&r| r < rows));
        SparseF2 { rows, cols }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn col(&self, c: usize) -> &[usize] {
        &self.cols[c]
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn apply(&self, v: &[usize]) -> Vec<usize> {
        let mut out = vec![];
        for &c in v {
            out.extend_from_slice(&self.cols[c]);
        }
        normalize(out)
    }

    pub fn apply_bits(&self, v: &BitRow) -> BitRow {
        let mut out = BitRow::zeros(self.rows);
        for c in v.ones() {
            for &r in &self.cols[c] {
                out.flip(r);
            }
        }
        out
    }

    /// `self * other`
    pub fn compose(&self, other: &SparseF2) -> SparseF2 {
        assert_eq!(self.cols.len(), other.rows, "dimension mismatch");
        let cols = other.cols.par_iter().map(|c| self.apply(c)).collect();
        SparseF2 { rows: self.rows, cols }
    }

    pub fn add(&self, other: &SparseF2) -> SparseF2 {
        assert_eq!((self.rows, self.cols.len()), (other.rows, other.cols.len()));
        let cols = self
            .cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| normalize(a.iter().chain(b).copied().collect()))
            .collect();
        SparseF2 { rows: self.rows, cols }
    }

    pub fn transpose(&self) -> SparseF2 {
        let mut t = vec![vec![]; self.rows];
        for (c, col) in self.cols.iter().enumerate() {
            for &r in col {
                t[r].push(c);
            }
        }
        SparseF2 { rows: self.cols.len(), cols: t }
    }

    /// Dense submatrix on the given row and column index lists.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> MatrixF2 {
        let pos: HashMap<usize, usize> = rows.iter().enumerate().map(|(k, &r)| (r, k)).collect();
        let mut m = MatrixF2::zeros(rows.len(), cols.len());
        for (k, &c) in cols.iter().enumerate() {
            for r in &self.cols[c] {
                if let Some(&i) = pos.get(r) {
                    m.flip(i, k);
                }
            }
        }
        m
    }

    pub fn to_dense(&self) -> MatrixF2 {
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols.len()).collect();
        self.block(&rows, &cols)
    }
}

fn normalize(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if out.last() == Some(&x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

/// Echelon basis of a subspace whose rows carry coordinate tags, used to
/// write vectors in terms of a chosen basis modulo another subspace.
#[derive(Clone, Debug)]
pub struct Reducer {
    len: usize,
    tag_len: usize,
    rows: Vec<(BitRow, BitRow)>,
    by_pivot: HashMap<usize, usize>,
}

impl Reducer {
    pub fn new(len: usize, tag_len: usize) -> Self {
        Reducer { len, tag_len, rows: vec![], by_pivot: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v`, returning the remainder and the accumulated tag.
    pub fn reduce(&self, v: &BitRow) -> (BitRow, BitRow) {
        let mut v = v.clone();
        let mut tag = BitRow::zeros(self.tag_len);
        let mut from = 0;
        while let Some(p) = v.first_one_from(from) {
            match self.by_pivot.get(&p) {
                Some(&k) => {
                    v.xor_from(&self.rows[k].0, p);
                    tag.xor_assign(&self.rows[k].1);
                }
                None => from = p + 1,
            }
        }
        (v, tag)
    }

    /// Adds `v` with tag `tag`; returns false if `v` was already in the span.
    pub fn insert(&mut self, v: &BitRow, tag: BitRow) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let mut v = v.clone();
        let mut tag = tag;
        loop {
            let Some(p) = v.first_one() else { return false };
            match self.by_pivot.get(&p) {
                Some(&k) => {
                    v.xor_from(&self.rows[k].0, p);
                    tag.xor_assign(&self.rows[k].1);
                }
                None => {
                    self.by_pivot.insert(p, self.rows.len());
                    self.rows.push((v, tag));
                    return true;
                }
            }
        }
    }

    pub fn contains(&self, v: &BitRow) -> bool {
        self.reduce(v).0.is_zero()
    }
}
