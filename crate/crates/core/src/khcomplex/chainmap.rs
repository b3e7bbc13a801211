use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use super::complex::ChainComplex;
use super::homology::BigradedDims;
use crate::error::{KhError, Result};
use crate::linalg::{MatrixF2, SparseF2};

/// F2-linear map between complexes shifting bidegree by `shift`. Column `k`
/// of `matrix` is the image of source generator `k`.
#[derive(Clone, Debug)]
pub struct ChainMap {
    source: Arc<ChainComplex>,
    target: Arc<ChainComplex>,
    matrix: SparseF2,
    shift: (i32, i32),
}

fn same_complex(a: &Arc<ChainComplex>, b: &Arc<ChainComplex>) -> bool {
    Arc::ptr_eq(a, b) || a.gens() == b.gens()
}

impl ChainMap {
    pub fn new(source: Arc<ChainComplex>, target: Arc<ChainComplex>, matrix: SparseF2, shift: (i32, i32)) -> Result<Self> {
        if matrix.ncols() != source.len() || matrix.rows() != target.len() {
            return Err(KhError::ComplexMismatch(format!(
                "{}x{} matrix between complexes of sizes {} and {}",
                matrix.rows(),
                matrix.ncols(),
                source.len(),
                target.len()
            )));
        }
        for k in 0..source.len() {
            let g = source.gen(k);
            for &t in matrix.col(k) {
                let h = target.gen(t);
                if (h.i, h.j) != (g.i + shift.0, g.j + shift.1) {
                    return Err(KhError::ComplexMismatch(format!(
                        "generator {k} in ({},{}) maps to ({},{}), expected shift {:?}",
                        g.i, g.j, h.i, h.j, shift
                    )));
                }
            }
        }
        Ok(ChainMap { source, target, matrix, shift })
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let n = c.len();
        ChainMap { source: c.clone(), target: c, matrix: SparseF2::identity(n), shift: (0, 0) }
    }

    pub fn zero(source: Arc<ChainComplex>, target: Arc<ChainComplex>, shift: (i32, i32)) -> Self {
        let matrix = SparseF2::zeros(target.len(), source.len());
        ChainMap { source, target, matrix, shift }
    }

    pub fn source(&self) -> &Arc<ChainComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<ChainComplex> {
        &self.target
    }

    pub fn matrix(&self) -> &SparseF2 {
        &self.matrix
    }

    pub fn shift(&self) -> (i32, i32) {
        self.shift
    }

    /// `self ∘ first`
    pub fn after(&self, first: &ChainMap) -> Result<ChainMap> {
        if !same_complex(&first.target, &self.source) {
            return Err(KhError::ComplexMismatch("composed maps do not share a complex".into()));
        }
        Ok(ChainMap {
            source: first.source.clone(),
            target: self.target.clone(),
            matrix: self.matrix.compose(&first.matrix),
            shift: (self.shift.0 + first.shift.0, self.shift.1 + first.shift.1),
        })
    }

    /// Composes `maps[0]`, then `maps[1]`, and so on.
    pub fn compose_all(maps: &[ChainMap]) -> Result<ChainMap> {
        let (first, rest) = maps.split_first().ok_or(KhError::EmptyList)?;
        rest.iter().try_fold(first.clone(), |acc, m| m.after(&acc))
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if !same_complex(&self.source, &other.source) || !same_complex(&self.target, &other.target) || self.shift != other.shift {
            return Err(KhError::ComplexMismatch("summands differ in source, target or shift".into()));
        }
        Ok(ChainMap { matrix: self.matrix.add(&other.matrix), ..self.clone() })
    }

    /// d∘f = f∘d over F2.
    pub fn check(&self) -> Result<()> {
        let ds = self.source.d_f2();
        let dt = self.target.d_f2();
        let bad = (0..self.source.len()).into_par_iter().find_first(|&k| {
            let lhs = dt.apply(self.matrix.col(k));
            let rhs = self.matrix.apply(ds.col(k));
            lhs != rhs
        });
        match bad {
            None => Ok(()),
            Some(k) => {
                let g = self.source.gen(k);
                Err(KhError::NotAChainMap(format!("fails on generator {k} in bidegree ({},{})", g.i, g.j)))
            }
        }
    }

    pub fn is_chain_map(&self) -> bool {
        self.check().is_ok()
    }
}

/// Map on F2 homology: one matrix per source bidegree with nonzero homology,
/// in the representative bases of source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyMap {
    pub shift: (i32, i32),
    pub blocks: BTreeMap<(i32, i32), MatrixF2>,
    pub source_dims: BigradedDims,
    pub target_dims: BigradedDims,
}

impl HomologyMap {
    pub fn block(&self, i: i32, j: i32) -> MatrixF2 {
        self.blocks.get(&(i, j)).cloned().unwrap_or_else(|| {
            MatrixF2::zeros(self.target_dims.get(i + self.shift.0, j + self.shift.1), self.source_dims.get(i, j))
        })
    }

    pub fn rank(&self, i: i32, j: i32) -> usize {
        self.blocks.get(&(i, j)).map_or(0, MatrixF2::rank)
    }

    pub fn total_rank(&self) -> usize {
        self.blocks.values().map(MatrixF2::rank).sum()
    }

    /// First source bidegree where the map is not injective.
    pub fn injectivity_failure(&self) -> Option<(i32, i32)> {
        self.source_dims.0.iter().find(|(&(i, j), &d)| self.rank(i, j) != d).map(|(&k, _)| k)
    }

    pub fn is_injective(&self) -> bool {
        self.injectivity_failure().is_none()
    }

    /// First target bidegree missed by the image.
    pub fn surjectivity_failure(&self) -> Option<(i32, i32)> {
        self.target_dims
            .0
            .iter()
            .find(|(&(i, j), &d)| self.rank(i - self.shift.0, j - self.shift.1) != d)
            .map(|(&k, _)| k)
    }

    pub fn is_surjective(&self) -> bool {
        self.surjectivity_failure().is_none()
    }

    pub fn is_identity(&self) -> bool {
        self.shift == (0, 0)
            && self.source_dims == self.target_dims
            && self.source_dims.0.iter().all(|(&(i, j), &d)| self.block(i, j) == MatrixF2::identity(d))
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(MatrixF2::is_zero)
    }

    /// `self ∘ first` on homology.
    pub fn after(&self, first: &HomologyMap) -> HomologyMap {
        let shift = (self.shift.0 + first.shift.0, self.shift.1 + first.shift.1);
        let blocks = first
            .source_dims
            .0
            .keys()
            .map(|&(i, j)| {
                let mid = (i + first.shift.0, j + first.shift.1);
                ((i, j), self.block(mid.0, mid.1).mul(&first.block(i, j)))
            })
            .collect();
        HomologyMap { shift, blocks, source_dims: first.source_dims.clone(), target_dims: self.target_dims.clone() }
    }
}

/// The map induced on F2 homology. Fails with `NotAChainMap` if `f` does not
/// commute with the differentials.
pub fn induced_homology_map(f: &ChainMap) -> Result<HomologyMap> {
    f.check()?;
    let hs = f.source.homology_f2();
    let ht = f.target.homology_f2();
    let (si, sj) = f.shift;
    let blocks = hs
        .blocks()
        .filter(|(_, b)| b.dim() > 0)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|((i, j), b)| {
            let tdim = ht.dim(i + si, j + sj);
            let mut cols = vec![];
            for k in 0..b.dim() {
                let img = f.matrix.apply(&b.rep_global(k));
                let c = if img.is_empty() { crate::linalg::BitRow::zeros(tdim) } else { ht.coords_of(i + si, j + sj, &img)? };
                cols.push(c);
            }
            Ok(((i, j), MatrixF2::from_columns(tdim, &cols)))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(HomologyMap { shift: f.shift, blocks, source_dims: hs.dims(), target_dims: ht.dims() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;
    use crate::khcomplex::{build_complex, Ring};

    #[test]
    fn identity_induces_identity() {
        let d = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let c = Arc::new(build_complex(&d, Ring::F2));
        let id = ChainMap::identity(c);
        let h = induced_homology_map(&id).unwrap();
        assert!(h.is_identity());
        assert!(h.is_injective() && h.is_surjective());
    }

    #[test]
    fn non_chain_map_rejected() {
        // 0 -> F2 -> F2 -> 0 with d = 1, map killing the top only
        let c = Arc::new(ChainComplex::from_parts(Ring::F2, &[(0, 0), (1, 0)], vec![vec![(1, 1)], vec![]]).unwrap());
        let m = SparseF2::from_columns(2, vec![vec![0], vec![]]);
        let f = ChainMap::new(c.clone(), c, m, (0, 0)).unwrap();
        assert!(matches!(induced_homology_map(&f), Err(KhError::NotAChainMap(_))));
    }
}
