//! Sq¹ on Khovanov homology as the Bockstein of 0 → Z/2 → Z/4 → Z/2 → 0,
//! computed by lifting F2 cycles to the integral complex.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{Diagram, EdgeId};
use crate::error::{KhError, Result};
use crate::khcomplex::{build_complex, induced_homology_map, reduced_complex, x_action, ChainComplex, HomologyMap, Ring};
use crate::linalg::{BitRow, MatrixF2};
use crate::movie::{movie_chain_map, Movie};

/// Sq¹ as a map on F2 homology of bidegree (1, 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bockstein {
    pub map: HomologyMap,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sq1Record {
    pub i: i32,
    pub j: i32,
    pub rank_sq1: usize,
    /// rows indexed by the target basis
    pub matrix: Vec<Vec<u8>>,
}

impl Bockstein {
    pub fn rank(&self, i: i32, j: i32) -> usize {
        self.map.rank(i, j)
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_zero()
    }

    /// Source bidegrees where Sq¹ is nonzero.
    pub fn support(&self) -> Vec<(i32, i32)> {
        self.map.blocks.iter().filter(|(_, m)| !m.is_zero()).map(|(&k, _)| k).collect()
    }

    pub fn squares_to_zero(&self) -> bool {
        self.map.after(&self.map).is_zero()
    }

    pub fn records(&self) -> Vec<Sq1Record> {
        self.map
            .blocks
            .iter()
            .map(|(&(i, j), m)| Sq1Record {
                i,
                j,
                rank_sq1: m.rank(),
                matrix: (0..m.rows()).map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect()).collect(),
            })
            .collect()
    }
}

/// Class of `(d x̃)/2` for the integral lift `x̃` of an F2 cycle.
pub fn sq1_of_cycle(cz: &ChainComplex, cf2: &ChainComplex, i: i32, j: i32, cycle: &[usize]) -> Result<BitRow> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for &g in cycle {
        for &(t, v) in cz.d_col(g) {
            *acc.entry(t).or_default() += v;
        }
    }
    let mut half = vec![];
    for (t, v) in acc {
        if v % 2 != 0 {
            return Err(KhError::LiftInconsistency { i, j });
        }
        if (v / 2) % 2 != 0 {
            half.push(t);
        }
    }
    let h = cf2.homology_f2();
    if half.is_empty() {
        return Ok(BitRow::zeros(h.dim(i + 1, j)));
    }
    h.coords_of(i + 1, j, &half)
}

/// Sq¹ on the homology of `cf2`, the mod 2 reduction of `cz`.
pub fn sq1(cz: &ChainComplex, cf2: &ChainComplex) -> Result<Bockstein> {
    if cz.ring() != Ring::Z || cf2.ring() != Ring::F2 {
        return Err(KhError::ComplexMismatch("sq1 needs an integral and an F2 complex".into()));
    }
    if cz.gens() != cf2.gens() {
        return Err(KhError::ComplexMismatch("complexes differ generator-for-generator".into()));
    }
    let h = cf2.homology_f2();
    let blocks = h
        .blocks()
        .filter(|(_, b)| b.dim() > 0)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|((i, j), b)| {
            let cols = (0..b.dim()).map(|k| sq1_of_cycle(cz, cf2, i, j, &b.rep_global(k))).collect::<Result<Vec<_>>>()?;
            Ok(((i, j), MatrixF2::from_columns(h.dim(i + 1, j), &cols)))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(Bockstein { map: HomologyMap { shift: (1, 0), blocks, source_dims: h.dims(), target_dims: h.dims() } })
}

/// Sq¹ on unreduced homology of a diagram.
pub fn sq1_diagram(d: &Diagram) -> Result<Bockstein> {
    let cz = build_complex(d, Ring::Z);
    sq1(&cz, &cz.to_f2())
}

/// Sq¹ on the reduced homology at `bp`.
pub fn sq1_reduced(d: &Diagram, bp: EdgeId) -> Result<Bockstein> {
    let cz = reduced_complex(&build_complex(d, Ring::Z), bp)?;
    sq1(&cz, &cz.to_f2())
}

/// F ∘ Sq¹ = Sq¹ ∘ F on homology for the map of `mv`.
pub fn check_naturality_sq1(mv: &Movie) -> Result<bool> {
    let mm = movie_chain_map(mv)?;
    let f = induced_homology_map(&mm.total()?)?;
    let (a, b) = (&mm.complexes[0], mm.complexes.last().unwrap());
    let sa = sq1(&build_complex(mv.start(), Ring::Z), a)?;
    let sb = sq1(&build_complex(mv.end(), Ring::Z), b)?;
    Ok(f.after(&sa.map).blocks == sb.map.after(&f).blocks)
}

/// X ∘ Sq¹ = Sq¹ ∘ X on unreduced homology.
pub fn check_module_map_sq1(d: &Diagram, bp: EdgeId) -> Result<bool> {
    let cz = build_complex(d, Ring::Z);
    let cf2 = Arc::new(cz.to_f2());
    let s = sq1(&cz, &cf2)?;
    let x = induced_homology_map(&x_action(&cf2, bp)?)?;
    Ok(x.after(&s.map).blocks == s.map.after(&x).blocks)
}
