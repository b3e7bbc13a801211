use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cube::Cube;
use super::homology::HomologyF2;
use crate::diagram::Diagram;
use crate::error::{KhError, Result};
use crate::linalg::{MatrixZ, SparseF2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ring {
    F2,
    Z,
}

/// A basis element: cube vertex, circle labeling (bit set = X) and bigrading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gen {
    pub vertex: u64,
    pub labels: u64,
    pub i: i32,
    pub j: i32,
}

/// Free bigraded complex with a sparse differential of bidegree (1,0).
/// Column `k` of the differential lists `(target, coefficient)` pairs.
#[derive(Debug)]
pub struct ChainComplex {
    ring: Ring,
    cube: Option<Arc<Cube>>,
    gens: Vec<Gen>,
    d: Vec<Vec<(usize, i64)>>,
    index: HashMap<(u64, u64), usize>,
    blocks: BTreeMap<(i32, i32), Vec<usize>>,
    homology: OnceLock<HomologyF2>,
}

impl Clone for ChainComplex {
    fn clone(&self) -> Self {
        Self::assemble(self.ring, self.cube.clone(), self.gens.clone(), self.d.clone())
    }
}

impl ChainComplex {
    fn assemble(ring: Ring, cube: Option<Arc<Cube>>, gens: Vec<Gen>, d: Vec<Vec<(usize, i64)>>) -> Self {
        let index = gens.iter().enumerate().map(|(k, g)| ((g.vertex, g.labels), k)).collect();
        let mut blocks: BTreeMap<(i32, i32), Vec<usize>> = BTreeMap::new();
        for (k, g) in gens.iter().enumerate() {
            blocks.entry((g.i, g.j)).or_default().push(k);
        }
        ChainComplex { ring, cube, gens, d, index, blocks, homology: OnceLock::new() }
    }

    /// An abstract complex from gradings and differential columns.
    pub fn from_parts(ring: Ring, gradings: &[(i32, i32)], d: Vec<Vec<(usize, i64)>>) -> Result<Self> {
        if d.len() != gradings.len() {
            return Err(KhError::LengthMismatch { expected: gradings.len(), got: d.len() });
        }
        for (k, col) in d.iter().enumerate() {
            for &(t, _) in col {
                let ok = t < gradings.len() && gradings[t] == (gradings[k].0 + 1, gradings[k].1);
                if !ok {
                    return Err(KhError::ComplexMismatch(format!("differential from generator {k} to {t} has wrong bidegree")));
                }
            }
        }
        let gens = gradings.iter().enumerate().map(|(k, &(i, j))| Gen { vertex: 0, labels: k as u64, i, j }).collect();
        let d = d.into_iter().map(|c| normalize(c, ring)).collect();
        Ok(Self::assemble(ring, None, gens, d))
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn cube(&self) -> Option<&Arc<Cube>> {
        self.cube.as_ref()
    }

    pub fn diagram(&self) -> Option<&Diagram> {
        self.cube.as_ref().map(|c| c.diagram())
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn gens(&self) -> &[Gen] {
        &self.gens
    }

    pub fn gen(&self, k: usize) -> Gen {
        self.gens[k]
    }

    pub fn index_of(&self, vertex: u64, labels: u64) -> Option<usize> {
        self.index.get(&(vertex, labels)).copied()
    }

    pub fn d_col(&self, k: usize) -> &[(usize, i64)] {
        &self.d[k]
    }

    pub fn bidegrees(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.blocks.keys().copied()
    }

    pub fn block(&self, i: i32, j: i32) -> &[usize] {
        self.blocks.get(&(i, j)).map_or(&[], Vec::as_slice)
    }

    /// Differential reduced mod 2.
    pub fn d_f2(&self) -> SparseF2 {
        let cols = self.d.iter().map(|c| c.iter().filter(|x| x.1 % 2 != 0).map(|x| x.0).collect()).collect();
        SparseF2::from_columns(self.len(), cols)
    }

    /// Integral matrix of `d: C^{i,j} -> C^{i+1,j}`, rows and columns in block order.
    pub fn d_block_z(&self, i: i32, j: i32) -> MatrixZ {
        let src = self.block(i, j);
        let dst = self.block(i + 1, j);
        let pos: HashMap<usize, usize> = dst.iter().enumerate().map(|(k, &g)| (g, k)).collect();
        let mut m = MatrixZ::zeros(dst.len(), src.len());
        for (c, &g) in src.iter().enumerate() {
            for &(t, v) in &self.d[g] {
                m.add_to(pos[&t], c, &BigInt::from(v));
            }
        }
        m
    }

    pub fn to_f2(&self) -> ChainComplex {
        let d = self.d.iter().map(|c| normalize(c.clone(), Ring::F2)).collect();
        Self::assemble(Ring::F2, self.cube.clone(), self.gens.clone(), d)
    }

    /// d∘d = 0 over the coefficient ring.
    pub fn check_d_squared(&self) -> Result<()> {
        let bad = (0..self.len()).into_par_iter().find_first(|&k| {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(t, a) in &self.d[k] {
                for &(u, b) in &self.d[t] {
                    *acc.entry(u).or_default() += a * b;
                }
            }
            acc.values().any(|&v| match self.ring {
                Ring::F2 => v % 2 != 0,
                Ring::Z => v != 0,
            })
        });
        match bad {
            None => Ok(()),
            Some(k) => Err(KhError::CheckFailed {
                check: "d_squared".into(),
                i: self.gens[k].i,
                j: self.gens[k].j,
                detail: format!("d(d(g{k})) != 0"),
            }),
        }
    }

    /// The generators with `keep[k]` set, with the differential truncated to
    /// them and the quantum grading shifted. Gives a subcomplex when the kept
    /// set is closed under `d`, and a quotient complex when its complement is.
    pub fn restrict(&self, keep: &[bool], j_shift: i32) -> ChainComplex {
        let mut new_index = vec![usize::MAX; self.len()];
        let mut gens = vec![];
        for (k, g) in self.gens.iter().enumerate() {
            if keep[k] {
                new_index[k] = gens.len();
                gens.push(Gen { j: g.j + j_shift, ..*g });
            }
        }
        let d = (0..self.len())
            .filter(|&k| keep[k])
            .map(|k| self.d[k].iter().filter(|x| keep[x.0]).map(|&(t, v)| (new_index[t], v)).collect())
            .collect();
        Self::assemble(self.ring, self.cube.clone(), gens, d)
    }

    /// Cached F2 homology with chosen representatives.
    pub fn homology_f2(&self) -> &HomologyF2 {
        self.homology.get_or_init(|| HomologyF2::compute(self))
    }
}

fn normalize(col: Vec<(usize, i64)>, ring: Ring) -> Vec<(usize, i64)> {
    let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
    for (t, v) in col {
        *acc.entry(t).or_default() += v;
    }
    acc.into_iter()
        .filter_map(|(t, v)| match ring {
            Ring::F2 => (v % 2 != 0).then_some((t, 1)),
            Ring::Z => (v != 0).then_some((t, v)),
        })
        .collect()
}

/// The Khovanov complex of a diagram.
pub fn build_complex(d: &Diagram, ring: Ring) -> ChainComplex {
    build_from_cube(Arc::new(Cube::new(d)), ring)
}

pub(crate) fn build_from_cube(cube: Arc<Cube>, ring: Ring) -> ChainComplex {
    let n = cube.n();
    let dg = cube.diagram();
    let (np, nm) = (dg.n_plus() as i32, dg.n_minus() as i32);
    let nv = cube.vertex_count() as u64;
    let mut offsets = Vec::with_capacity(nv as usize + 1);
    let mut total = 0usize;
    for v in 0..nv {
        offsets.push(total);
        total += 1usize << cube.circles(v);
    }
    let mut gens = Vec::with_capacity(total);
    for v in 0..nv {
        let m = cube.circles(v) as i32;
        let h = v.count_ones() as i32;
        for l in 0..1u64 << m {
            let x = l.count_ones() as i32;
            gens.push(Gen { vertex: v, labels: l, i: h - nm, j: m - 2 * x + h + np - 2 * nm });
        }
    }
    let per_vertex: Vec<Vec<Vec<(usize, i64)>>> = (0..nv)
        .into_par_iter()
        .map(|v| vertex_columns(&cube, v, n, &offsets, ring))
        .collect();
    let d = per_vertex.into_iter().flatten().collect();
    ChainComplex::assemble(ring, Some(cube), gens, d)
}

/// Differential columns for every labeling at vertex `v`.
fn vertex_columns(cube: &Cube, v: u64, n: usize, offsets: &[usize], ring: Ring) -> Vec<Vec<(usize, i64)>> {
    let m = cube.circles(v);
    let reps = cube.circle_reps(v);
    let mut cols: Vec<Vec<(usize, i64)>> = vec![vec![]; 1 << m];
    for k in 0..n {
        let kb = cube.crossing_bit(k);
        if v & kb != 0 {
            continue;
        }
        let w = v | kb;
        let sign: i64 = match ring {
            Ring::Z if (v >> (n - k)).count_ones() % 2 == 1 => -1,
            _ => 1,
        };
        let [a, b, c, _] = cube.diagram().crossings()[k].edges;
        let (ca, cc) = (cube.circle_of(v, a), cube.circle_of(v, c));
        // image position of each untouched circle
        let mw = cube.circles(w);
        let moved: Vec<(u64, u64)> = (0..m)
            .filter(|&ci| ci != ca && ci != cc)
            .map(|ci| (cube.label_bit(v, ci), cube.label_bit(w, cube.circle_of(w, reps[ci]))))
            .collect();
        let base = offsets[w as usize];
        debug_assert!(mw == m - 1 || mw == m + 1);
        for l in 0..1u64 << m {
            let mut t = 0u64;
            for &(from, to) in &moved {
                if l & from != 0 {
                    t |= to;
                }
            }
            let col = &mut cols[l as usize];
            if ca != cc {
                let xa = l & cube.label_bit(v, ca) != 0;
                let xc = l & cube.label_bit(v, cc) != 0;
                if xa && xc {
                    continue;
                }
                let cw = cube.label_bit(w, cube.circle_of(w, a));
                col.push((base + (t | if xa || xc { cw } else { 0 }) as usize, sign));
            } else {
                let b1 = cube.label_bit(w, cube.circle_of(w, a));
                let b2 = cube.label_bit(w, cube.circle_of(w, b));
                if l & cube.label_bit(v, ca) != 0 {
                    col.push((base + (t | b1 | b2) as usize, sign));
                } else {
                    col.push((base + (t | b1) as usize, sign));
                    col.push((base + (t | b2) as usize, sign));
                }
            }
        }
    }
    for col in &mut cols {
        col.sort_unstable();
    }
    cols
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    const TREFOIL: &str = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]";

    #[test]
    fn unknot_generators() {
        let c = build_complex(&Diagram::unknot(), Ring::Z);
        assert_eq!(c.len(), 2);
        assert_eq!((c.gen(0).i, c.gen(0).j), (0, 1));
        assert_eq!((c.gen(1).i, c.gen(1).j), (0, -1));
        assert!(c.d_col(0).is_empty() && c.d_col(1).is_empty());
    }

    #[test]
    fn trefoil_d_squared() {
        let d = parse_diagram(TREFOIL).unwrap();
        for ring in [Ring::F2, Ring::Z] {
            let c = build_complex(&d, ring);
            c.check_d_squared().unwrap();
            // 3 circles at weight 0, 2 at weight 1, 1 at weight 2, 2 at weight 3
            assert_eq!(c.len(), 8 + 3 * 4 + 3 * 2 + 4);
        }
    }

    #[test]
    fn abstract_complex_bidegree_check() {
        assert!(ChainComplex::from_parts(Ring::Z, &[(0, 0), (1, 0)], vec![vec![(1, 2)], vec![]]).is_ok());
        assert!(ChainComplex::from_parts(Ring::Z, &[(0, 0), (1, 2)], vec![vec![(1, 2)], vec![]]).is_err());
    }
}
