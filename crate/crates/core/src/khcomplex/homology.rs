use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::complex::ChainComplex;
use crate::error::{KhError, Result};
use crate::linalg::{invariant_factors, rref_f2, BitRow, Reducer};

/// Dimension per bidegree; zero entries are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedDims(pub BTreeMap<(i32, i32), usize>);

impl BigradedDims {
    pub fn get(&self, i: i32, j: i32) -> usize {
        self.0.get(&(i, j)).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn records(&self) -> Vec<DimRecord> {
        self.0.iter().map(|(&(i, j), &dim)| DimRecord { i, j, dim }).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimRecord {
    pub i: i32,
    pub j: i32,
    pub dim: usize,
}

/// Finitely generated abelian group: free rank plus torsion invariant factors.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn is_zero(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Invariant factors with 0 standing for a copy of Z.
    pub fn factors(&self) -> Vec<BigInt> {
        let mut f = self.torsion.clone();
        f.extend(std::iter::repeat_n(BigInt::default(), self.rank));
        f
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BigradedGroups(pub BTreeMap<(i32, i32), AbelianGroup>);

impl BigradedGroups {
    pub fn get(&self, i: i32, j: i32) -> AbelianGroup {
        self.0.get(&(i, j)).cloned().unwrap_or_default()
    }

    pub fn records(&self) -> Vec<FactorRecord> {
        self.0
            .iter()
            .map(|(&(i, j), g)| FactorRecord { i, j, factors: g.factors().iter().map(|x| x.to_string()).collect() })
            .collect()
    }

    /// Bidegrees carrying torsion divisible by 2.
    pub fn two_torsion(&self) -> Vec<(i32, i32)> {
        let two = BigInt::from(2);
        self.0.iter().filter(|(_, g)| g.torsion.iter().any(|t| t % &two == BigInt::default())).map(|(&k, _)| k).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorRecord {
    pub i: i32,
    pub j: i32,
    /// decimal strings; "0" is a free summand
    pub factors: Vec<String>,
}

/// Homology at one bidegree: representatives as vectors over the block,
/// and a reducer writing any cycle in that basis modulo boundaries.
#[derive(Clone, Debug)]
pub struct HomBlock {
    pub gens: Vec<usize>,
    pub reps: Vec<BitRow>,
    reducer: Reducer,
    tag_to_coord: Vec<Option<usize>>,
    pos: HashMap<usize, usize>,
}

impl HomBlock {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Representative `k` as a list of global generator indices.
    pub fn rep_global(&self, k: usize) -> Vec<usize> {
        self.reps[k].ones().map(|p| self.gens[p]).collect()
    }

    pub fn local(&self, global: &[usize]) -> Option<BitRow> {
        let mut v = BitRow::zeros(self.gens.len());
        for g in global {
            v.flip(*self.pos.get(g)?);
        }
        Some(v)
    }

    /// Coordinates of a cycle in the representative basis.
    pub fn coords(&self, cycle: &BitRow) -> Option<BitRow> {
        let (rest, tag) = self.reducer.reduce(cycle);
        if !rest.is_zero() {
            return None;
        }
        let mut out = BitRow::zeros(self.dim());
        for t in tag.ones() {
            out.flip(self.tag_to_coord[t]?);
        }
        Some(out)
    }

    pub fn is_boundary(&self, cycle: &BitRow) -> bool {
        self.coords(cycle).is_some_and(|c| c.is_zero())
    }
}

#[derive(Clone, Debug)]
pub struct HomologyF2 {
    blocks: BTreeMap<(i32, i32), HomBlock>,
}

impl HomologyF2 {
    pub(crate) fn compute(c: &ChainComplex) -> HomologyF2 {
        let d = c.d_f2();
        let keys: Vec<(i32, i32)> = c.bidegrees().collect();
        let blocks = keys
            .par_iter()
            .map(|&(i, j)| {
                let here = c.block(i, j);
                let out = d.block(c.block(i + 1, j), here);
                let kernel = rref_f2(&out).kernel_basis;
                let prev = c.block(i - 1, j);
                let inc = d.block(here, prev);
                let mut red = Reducer::new(here.len(), kernel.cols());
                for col in 0..inc.cols() {
                    red.insert(&inc.column(col), BitRow::zeros(kernel.cols()));
                }
                let mut reps = vec![];
                let mut tag_to_coord = vec![None; kernel.cols()];
                for (k, slot) in tag_to_coord.iter_mut().enumerate() {
                    let z = kernel.column(k);
                    if red.insert(&z, BitRow::unit(kernel.cols(), k)) {
                        *slot = Some(reps.len());
                        reps.push(z);
                    }
                }
                let pos = here.iter().enumerate().map(|(k, &g)| (g, k)).collect();
                ((i, j), HomBlock { gens: here.to_vec(), reps, reducer: red, tag_to_coord, pos })
            })
            .collect();
        HomologyF2 { blocks }
    }

    pub fn dims(&self) -> BigradedDims {
        BigradedDims(self.blocks.iter().filter(|(_, b)| b.dim() > 0).map(|(&k, b)| (k, b.dim())).collect())
    }

    pub fn dim(&self, i: i32, j: i32) -> usize {
        self.blocks.get(&(i, j)).map_or(0, HomBlock::dim)
    }

    pub fn block(&self, i: i32, j: i32) -> Option<&HomBlock> {
        self.blocks.get(&(i, j))
    }

    pub fn blocks(&self) -> impl Iterator<Item = ((i32, i32), &HomBlock)> {
        self.blocks.iter().map(|(&k, b)| (k, b))
    }

    /// Coordinates of a cycle given by global generator indices, all of
    /// bidegree `(i, j)`.
    pub fn coords_of(&self, i: i32, j: i32, cycle: &[usize]) -> Result<BitRow> {
        let Some(b) = self.block(i, j) else {
            return if cycle.is_empty() {
                Ok(BitRow::zeros(0))
            } else {
                Err(KhError::ComplexMismatch(format!("no generators in bidegree ({i},{j})")))
            };
        };
        let v = b.local(cycle).ok_or_else(|| KhError::ComplexMismatch(format!("chain leaves bidegree ({i},{j})")))?;
        b.coords(&v).ok_or_else(|| KhError::NotAChainMap(format!("image is not a cycle in bidegree ({i},{j})")))
    }
}

/// F2 homology dimensions.
pub fn homology(c: &ChainComplex) -> BigradedDims {
    c.homology_f2().dims()
}

/// Integral homology by invariant factors of each differential block.
pub fn homology_z(c: &ChainComplex) -> BigradedGroups {
    let keys: Vec<(i32, i32)> = c.bidegrees().collect();
    let factors: HashMap<(i32, i32), Vec<BigInt>> =
        keys.par_iter().map(|&(i, j)| ((i, j), invariant_factors(&c.d_block_z(i, j)))).collect();
    let groups = keys
        .iter()
        .filter_map(|&(i, j)| {
            let n = c.block(i, j).len();
            let out = factors[&(i, j)].len();
            let inc = factors.get(&(i - 1, j)).map_or(&[][..], Vec::as_slice);
            let g = AbelianGroup { rank: n - out - inc.len(), torsion: inc.iter().filter(|x| !x.is_one()).cloned().collect() };
            (!g.is_zero()).then_some(((i, j), g))
        })
        .collect();
    BigradedGroups(groups)
}
