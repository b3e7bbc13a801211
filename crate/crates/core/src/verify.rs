//! Check suites shared by the command line and the acceptance tests. Each
//! suite returns one record per check; errors become failed records.

use std::sync::Arc;

use crate::diagram::{Diagram, EdgeId};
use crate::error::{KhError, Result};
use crate::khcomplex::{
    basepoint_independence, build_complex, induced_homology_map, reduced_map, shumakovitch_report, x_action, CheckRecord, HomologyMap, Ring,
};
use crate::movie::{movie_chain_map, Movie};
use crate::steenrod::sq1;

/// First source bidegree where two maps with the same source differ.
pub fn first_difference(a: &HomologyMap, b: &HomologyMap) -> Option<(i32, i32)> {
    a.source_dims
        .0
        .keys()
        .chain(b.source_dims.0.keys())
        .copied()
        .filter(|&(i, j)| a.block(i, j) != b.block(i, j))
        .min()
}

fn compare(name: &str, a: &HomologyMap, b: &HomologyMap, ok: &str) -> CheckRecord {
    match first_difference(a, b) {
        None => CheckRecord::pass(name, ok),
        Some(at) => CheckRecord::fail(name, Some(at), "the two sides differ"),
    }
}

fn collect(name: &str, run: impl FnOnce(&mut Vec<CheckRecord>) -> Result<()>) -> Vec<CheckRecord> {
    let mut out = vec![];
    if let Err(e) = run(&mut out) {
        out.push(CheckRecord::from_error(name, &e));
    }
    out
}

/// Exactness and splitting at `bp`, plus independence of the X-action from
/// the basepoint.
pub fn shumakovitch_suite(d: &Diagram, bp: EdgeId) -> Vec<CheckRecord> {
    collect("shumakovitch", |out| {
        out.extend(shumakovitch_report(d, bp)?.checks);
        let c = Arc::new(build_complex(d, Ring::F2));
        out.push(match basepoint_independence(&c) {
            Ok(n) => CheckRecord::pass("basepoint_independence", format!("{n} edges agree with their component's first edge")),
            Err(e) => CheckRecord::from_error("basepoint_independence", &e),
        });
        Ok(())
    })
}

/// Split injectivity of a ribbon movie: the map is injective on Kh (and on
/// reduced Kh when a basepoint is given), the reversed movie is a left
/// inverse, and the map commutes with X.
pub fn ribbon_suite(mv: &Movie, bp: Option<EdgeId>) -> Vec<CheckRecord> {
    collect("ribbon", |out| {
        out.push(if mv.is_ribbon() {
            CheckRecord::pass("ribbon_shape", "no deaths")
        } else {
            let k = mv.moves().iter().position(|m| m.kind == crate::movie::MoveKind::Death).unwrap_or(0);
            let mut r = CheckRecord::fail("ribbon_shape", None, "movie contains a death");
            r.move_index = Some(k);
            r
        });
        let mm = movie_chain_map(mv)?;
        for (k, step) in mm.steps.iter().enumerate() {
            if let Err(e) = step.check() {
                let mut r = CheckRecord::from_error("chain_map", &e);
                r.move_index = Some(k);
                out.push(r);
                return Ok(());
            }
        }
        out.push(CheckRecord::pass("chain_map", format!("{} steps commute with d", mm.steps.len())));
        let f = mm.total()?;
        let hf = induced_homology_map(&f)?;
        out.push(match hf.injectivity_failure() {
            None => CheckRecord::pass("injective", "F is injective in every bidegree"),
            Some(at) => CheckRecord::fail("injective", Some(at), "F has a kernel"),
        });
        let back = movie_chain_map(&mv.reverse()?)?.total()?;
        let round = induced_homology_map(&back.after(&f)?)?;
        let id = induced_homology_map(&crate::khcomplex::ChainMap::identity(f.source().clone()))?;
        out.push(compare("left_inverse", &round, &id, "reverse ∘ F = id on homology"));
        if let Some(bp) = bp {
            let xs = induced_homology_map(&x_action(f.source(), bp)?)?;
            let xt = induced_homology_map(&x_action(f.target(), bp)?)?;
            out.push(compare("module_map", &xt.after(&hf), &hf.after(&xs), "X ∘ F = F ∘ X on homology"));
            let red = induced_homology_map(&reduced_map(&f, bp)?)?;
            out.push(match red.injectivity_failure() {
                None => CheckRecord::pass("reduced_injective", "F is injective on reduced homology"),
                Some(at) => CheckRecord::fail("reduced_injective", Some(at), "reduced F has a kernel"),
            });
        }
        Ok(())
    })
}

/// Sq¹ on both ends of a movie and the naturality square F ∘ Sq¹ = Sq¹ ∘ F.
pub fn steenrod_suite(mv: &Movie) -> Vec<CheckRecord> {
    collect("steenrod", |out| {
        let mm = movie_chain_map(mv)?;
        let (a, b) = (&mm.complexes[0], mm.complexes.last().ok_or(KhError::EmptyList)?);
        let sa = sq1(&build_complex(mv.start(), Ring::Z), a)?;
        let sb = sq1(&build_complex(mv.end(), Ring::Z), b)?;
        for (name, s) in [("sq1_start_nonzero", &sa), ("sq1_end_nonzero", &sb)] {
            out.push(match s.support().first() {
                Some(&at) => {
                    let mut r = CheckRecord::pass(name, format!("Sq1 has rank {} here", s.rank(at.0, at.1)));
                    r.bidegree = Some(at);
                    r
                }
                None => CheckRecord::fail(name, None, "Sq1 vanishes in every bidegree"),
            });
        }
        let f = induced_homology_map(&mm.total()?)?;
        out.push(compare("sq1_naturality", &f.after(&sa.map), &sb.map.after(&f), "F ∘ Sq1 = Sq1 ∘ F"));
        Ok(())
    })
}

/// Sq¹ on a single diagram: it squares to zero and commutes with X at `bp`.
pub fn steenrod_diagram_suite(d: &Diagram, bp: EdgeId) -> Vec<CheckRecord> {
    collect("steenrod", |out| {
        let cz = build_complex(d, Ring::Z);
        let cf2 = Arc::new(cz.to_f2());
        let s = sq1(&cz, &cf2)?;
        let ss = s.map.after(&s.map);
        out.push(match ss.blocks.iter().find(|(_, m)| !m.is_zero()) {
            None => CheckRecord::pass("sq1_squares_to_zero", "Sq1 ∘ Sq1 = 0"),
            Some((&at, _)) => CheckRecord::fail("sq1_squares_to_zero", Some(at), "Sq1 ∘ Sq1 is nonzero"),
        });
        let x = induced_homology_map(&x_action(&cf2, bp)?)?;
        out.push(compare("sq1_module_map", &x.after(&s.map), &s.map.after(&x), "X ∘ Sq1 = Sq1 ∘ X"));
        Ok(())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{bundled_companion_movie, build_companion, trefoil_ears};
    use crate::diagram::parse_diagram;
    use crate::movie::Move;

    fn all_pass(r: &[CheckRecord]) -> bool {
        !r.is_empty() && r.iter().all(|c| c.passed)
    }

    #[test]
    fn trefoil_suites_pass() {
        let d = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        assert!(all_pass(&shumakovitch_suite(&d, 1)));
        assert!(all_pass(&steenrod_diagram_suite(&d, 1)));
    }

    #[test]
    fn companion_n1_suites() {
        let b = build_companion(&[trefoil_ears()]).unwrap();
        let r = ribbon_suite(&b.movie, b.basepoint);
        assert!(all_pass(&r), "{r:?}");
        assert_eq!(r.len(), 6);
        let s = steenrod_suite(&bundled_companion_movie(1).unwrap());
        assert!(s.iter().any(|c| c.name == "sq1_naturality" && c.passed), "{s:?}");
    }

    #[test]
    fn reversed_movie_fails_with_locations() {
        let mv = bundled_companion_movie(1).unwrap().reverse().unwrap();
        let r = ribbon_suite(&mv, None);
        let shape = r.iter().find(|c| c.name == "ribbon_shape").unwrap();
        assert!(!shape.passed && shape.move_index.is_some());
        // the bundled clasp is isotopic to the untangle, so the reverse is still an isomorphism
        let inj = r.iter().find(|c| c.name == "injective").unwrap();
        assert!(inj.passed, "{r:?}");
    }

    #[test]
    fn missing_basepoint_becomes_a_failed_record() {
        let d = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let r = shumakovitch_suite(&d, 42);
        assert!(r.iter().any(|c| !c.passed));
        let cap = Movie::new(Diagram::unknot(), vec![Move::birth(2)]).unwrap();
        let r = ribbon_suite(&cap, Some(1));
        assert!(r.iter().any(|c| c.name == "left_inverse" && !c.passed && c.bidegree.is_some()), "{r:?}");
        let tube = Movie::new(Diagram::unknot(), vec![Move::birth(2), Move::saddle(1, 2, &[3])]).unwrap();
        assert!(all_pass(&ribbon_suite(&tube, None)));
    }
}
