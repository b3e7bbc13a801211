use std::sync::Arc;

use serde::Serialize;

use super::chainmap::{induced_homology_map, ChainMap, HomologyMap};
use super::complex::{build_complex, ChainComplex, Ring};
use super::homology::BigradedDims;
use crate::diagram::{Diagram, EdgeId};
use crate::error::{KhError, Result};
use crate::linalg::SparseF2;

fn based_cube(c: &ChainComplex, bp: EdgeId) -> Result<&super::Cube> {
    let cube = c.cube().ok_or(KhError::MissingBasepoint)?;
    if !cube.diagram().has_edge(bp) {
        return Err(KhError::InvalidBasepoint(bp));
    }
    Ok(cube)
}

/// Whether generator `k` labels the circle through `bp` with X.
fn marked(c: &ChainComplex, bp: EdgeId) -> Result<Vec<bool>> {
    let cube = based_cube(c, bp)?;
    Ok(c.gens().iter().map(|g| g.labels & cube.label_bit(g.vertex, cube.circle_of(g.vertex, bp)) != 0).collect())
}

/// Multiplication by X on the circle through `bp`, bidegree (0,-2).
pub fn x_action(c: &Arc<ChainComplex>, bp: EdgeId) -> Result<ChainMap> {
    let cube = based_cube(c, bp)?;
    let cols = c
        .gens()
        .iter()
        .map(|g| {
            let bit = cube.label_bit(g.vertex, cube.circle_of(g.vertex, bp));
            if g.labels & bit != 0 {
                vec![]
            } else {
                c.index_of(g.vertex, g.labels | bit).into_iter().collect()
            }
        })
        .collect();
    ChainMap::new(c.clone(), c.clone(), SparseF2::from_columns(c.len(), cols), (0, -2))
}

/// Subcomplex where the basepoint circle is labeled X, quantum grading +1.
pub fn reduced_complex(c: &ChainComplex, bp: EdgeId) -> Result<ChainComplex> {
    Ok(c.restrict(&marked(c, bp)?, 1))
}

/// Quotient where the basepoint circle is labeled 1, quantum grading -1.
pub fn quotient_complex(c: &ChainComplex, bp: EdgeId) -> Result<ChainComplex> {
    let keep: Vec<bool> = marked(c, bp)?.into_iter().map(|m| !m).collect();
    Ok(c.restrict(&keep, -1))
}

/// Generator-matching map between complexes of one cube: each source
/// generator goes to the target generator with the same vertex and labels.
pub(crate) fn matching_map(source: &Arc<ChainComplex>, target: &Arc<ChainComplex>, shift: (i32, i32)) -> Result<ChainMap> {
    let cols = source.gens().iter().map(|g| target.index_of(g.vertex, g.labels).into_iter().collect()).collect();
    ChainMap::new(source.clone(), target.clone(), SparseF2::from_columns(target.len(), cols), shift)
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bidegree: Option<(i32, i32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub move_index: Option<usize>,
    pub detail: String,
}

impl CheckRecord {
    pub fn pass(name: &str, detail: impl Into<String>) -> Self {
        CheckRecord { name: name.into(), passed: true, bidegree: None, move_index: None, detail: detail.into() }
    }

    pub fn fail(name: &str, at: Option<(i32, i32)>, detail: impl Into<String>) -> Self {
        CheckRecord { name: name.into(), passed: false, bidegree: at, move_index: None, detail: detail.into() }
    }

    pub fn from_result(name: &str, r: Result<()>) -> Self {
        match r {
            Ok(()) => Self::pass(name, "ok"),
            Err(e) => Self::from_error(name, &e),
        }
    }

    /// Failure record for an error, keeping its bidegree or move index.
    pub fn from_error(name: &str, e: &KhError) -> Self {
        let mut r = match e.root() {
            KhError::CheckFailed { i, j, detail, .. } => Self::fail(name, Some((*i, *j)), detail.clone()),
            KhError::LiftInconsistency { i, j } => Self::fail(name, Some((*i, *j)), e.to_string()),
            _ => Self::fail(name, None, e.to_string()),
        };
        if let KhError::AtMove { index, .. } = e {
            r.move_index = Some(*index);
        }
        r
    }

    pub fn into_error(self) -> KhError {
        let (i, j) = self.bidegree.unwrap_or((0, 0));
        KhError::CheckFailed { check: self.name, i, j, detail: self.detail }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ShumakovitchReport {
    pub basepoint: EdgeId,
    pub checks: Vec<CheckRecord>,
    #[serde(skip)]
    pub unreduced: BigradedDims,
    #[serde(skip)]
    pub reduced: BigradedDims,
}

impl ShumakovitchReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| !c.passed)
    }
}

fn exactness(x: &HomologyMap, dims: &BigradedDims) -> CheckRecord {
    // X∘X = 0, so im ⊆ ker and equal dimensions suffice
    for (&(i, j), &d) in &dims.0 {
        let ker = d - x.rank(i, j);
        let im = x.rank(i, j + 2);
        if ker != im {
            return CheckRecord::fail("exactness", Some((i, j)), format!("dim ker X = {ker}, dim im X = {im}"));
        }
    }
    CheckRecord::pass("exactness", "ker X = im X in every bidegree")
}

fn splitting(full: &BigradedDims, red: &BigradedDims) -> CheckRecord {
    let mut keys: Vec<(i32, i32)> = full.0.keys().copied().collect();
    keys.extend(red.0.keys().flat_map(|&(i, j)| [(i, j - 1), (i, j + 1)]));
    keys.sort_unstable();
    keys.dedup();
    for (i, j) in keys {
        let (a, b) = (full.get(i, j), red.get(i, j - 1) + red.get(i, j + 1));
        if a != b {
            return CheckRecord::fail("splitting", Some((i, j)), format!("dim Kh = {a}, reduced sum = {b}"));
        }
    }
    CheckRecord::pass("splitting", "dim Kh(i,j) = dim red(i,j-1) + dim red(i,j+1)")
}

/// Runs every check and records the outcome of each.
pub fn shumakovitch_report(d: &Diagram, bp: EdgeId) -> Result<ShumakovitchReport> {
    if !d.has_edge(bp) {
        return Err(KhError::InvalidBasepoint(bp));
    }
    let c = Arc::new(build_complex(d, Ring::F2));
    let red = Arc::new(reduced_complex(&c, bp)?);
    let quot = Arc::new(quotient_complex(&c, bp)?);
    let x = x_action(&c, bp)?;
    let mut checks = vec![];
    checks.push(CheckRecord::from_result("d_squared", c.check_d_squared()));
    checks.push(CheckRecord::from_result("x_commutes_with_d", x.check()));
    let xx = x.after(&x)?;
    checks.push(if xx.matrix().is_zero() {
        CheckRecord::pass("x_squared_zero", "X∘X = 0 on chains")
    } else {
        CheckRecord::fail("x_squared_zero", None, "X∘X is nonzero")
    });
    let full_dims = c.homology_f2().dims();
    let red_dims = red.homology_f2().dims();
    let xh = induced_homology_map(&x)?;
    checks.push(exactness(&xh, &full_dims));
    checks.push(splitting(&full_dims, &red_dims));
    let iota = induced_homology_map(&matching_map(&red, &c, (0, -1))?)?;
    checks.push(match iota.injectivity_failure() {
        None => CheckRecord::pass("iota_injective", "inclusion of the reduced complex is injective on homology"),
        Some(at) => CheckRecord::fail("iota_injective", Some(at), "kernel of the induced inclusion"),
    });
    let pi = induced_homology_map(&matching_map(&c, &quot, (0, -1))?)?;
    checks.push(match pi.surjectivity_failure() {
        None => CheckRecord::pass("pi_surjective", "projection to the quotient is surjective on homology"),
        Some(at) => CheckRecord::fail("pi_surjective", Some(at), "cokernel of the induced projection"),
    });
    Ok(ShumakovitchReport { basepoint: bp, checks, unreduced: full_dims, reduced: red_dims })
}

/// Like [`shumakovitch_report`] but fails on the first failed check.
pub fn verify_shumakovitch(d: &Diagram, bp: EdgeId) -> Result<ShumakovitchReport> {
    let r = shumakovitch_report(d, bp)?;
    match r.first_failure() {
        Some(f) => Err(f.clone().into_error()),
        None => Ok(r),
    }
}

/// Compares the induced X-action for every edge against the first edge of
/// its component. Returns the number of edges compared.
pub fn basepoint_independence(c: &Arc<ChainComplex>) -> Result<usize> {
    let d = c.diagram().ok_or(KhError::MissingBasepoint)?.clone();
    let mut compared = 0;
    for comp in d.components() {
        let first = induced_homology_map(&x_action(c, comp.edges[0])?)?;
        for &e in &comp.edges[1..] {
            let other = induced_homology_map(&x_action(c, e)?)?;
            if let Some((&(i, j), _)) = first.blocks.iter().find(|(k, m)| other.blocks.get(k) != Some(m)) {
                return Err(KhError::CheckFailed {
                    check: "basepoint_independence".into(),
                    i,
                    j,
                    detail: format!("edges {} and {e} act differently", comp.edges[0]),
                });
            }
            compared += 1;
        }
    }
    Ok(compared)
}

/// Restriction of `f` to the reduced subcomplexes at `bp` on both sides.
pub fn reduced_map(f: &ChainMap, bp: EdgeId) -> Result<ChainMap> {
    let (ms, mt) = (marked(f.source(), bp)?, marked(f.target(), bp)?);
    let mut new_index = vec![usize::MAX; mt.len()];
    let mut next = 0;
    for (k, &m) in mt.iter().enumerate() {
        if m {
            new_index[k] = next;
            next += 1;
        }
    }
    let mut cols = vec![];
    for k in (0..ms.len()).filter(|&k| ms[k]) {
        let col = f.matrix().col(k);
        if let Some(&t) = col.iter().find(|&&t| !mt[t]) {
            let g = f.target().gen(t);
            return Err(KhError::NotAChainMap(format!("image leaves the reduced subcomplex at ({},{})", g.i, g.j)));
        }
        cols.push(col.iter().map(|&t| new_index[t]).collect());
    }
    let source = Arc::new(f.source().restrict(&ms, 1));
    let target = Arc::new(f.target().restrict(&mt, 1));
    ChainMap::new(source, target, SparseF2::from_columns(next, cols), f.shift())
}

/// Whether `f` commutes with multiplication by X at `bp` on homology.
pub fn commutes_with_x(f: &ChainMap, bp: EdgeId) -> Result<bool> {
    let hf = induced_homology_map(f)?;
    let xs = induced_homology_map(&x_action(f.source(), bp)?)?;
    let xt = induced_homology_map(&x_action(f.target(), bp)?)?;
    Ok(xt.after(&hf).blocks == hf.after(&xs).blocks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::parse_diagram;

    #[test]
    fn unknot_action() {
        let c = Arc::new(build_complex(&Diagram::unknot(), Ring::F2));
        let x = x_action(&c, 1).unwrap();
        assert_eq!(x.matrix().col(0), &[1]);
        assert!(x.matrix().col(1).is_empty());
        let red = reduced_complex(&c, 1).unwrap();
        assert_eq!(red.len(), 1);
        assert_eq!((red.gen(0).i, red.gen(0).j), (0, 0));
        assert_eq!(induced_homology_map(&x).unwrap().total_rank(), 1);
        assert!(matches!(x_action(&c, 9), Err(KhError::InvalidBasepoint(9))));
    }

    #[test]
    fn trefoil_suite() {
        let d = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let r = verify_shumakovitch(&d, 1).unwrap();
        assert_eq!(r.reduced.total(), 3);
        assert_eq!(r.unreduced.total(), 6);
        let c = Arc::new(build_complex(&d, Ring::F2));
        assert_eq!(basepoint_independence(&c).unwrap(), 5);
    }
}
