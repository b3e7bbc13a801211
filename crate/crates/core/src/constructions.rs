//! Clasp tangle, knots with ears, and the companion construction: a ribbon
//! concordance from the denominator closure of a partial sum of tangles to
//! its tangle sum with the clasp.

use std::collections::BTreeSet;

use crate::diagram::{closure, partial_sum, tangle_sum, Closure, Diagram, EdgeId, End, RawCrossing, Tangle};
use crate::error::{KhError, Result};
use crate::movie::{Move, Movie, Side};

/// Two crossings where the NW–SW strand passes over the NE–SE strand twice.
pub fn clasp() -> Tangle {
    include_str!("../data/clasp.pd").trim().parse().expect("bundled clasp tangle")
}

/// The left-handed trefoil cut open at two edges of one face.
pub fn trefoil_ears() -> Tangle {
    include_str!("../data/trefoil_ears.pd").trim().parse().expect("bundled trefoil tangle")
}

/// Cuts a knot diagram at two edges of a common face so that the
/// denominator closure gives the knot back and partial sums stay free of
/// closed loops. The first admissible cut in edge order is returned.
pub fn knot_with_ears(knot: &Diagram) -> Result<Tangle> {
    if knot.components().len() != 1 || knot.crossing_count() == 0 {
        return Err(KhError::InvalidTangle("ears need a knot diagram with crossings".into()));
    }
    let (raw, _) = knot.raw();
    let edges = knot.edges();
    let max = knot.max_edge();
    for &e in &edges {
        for &f in &edges {
            if e == f {
                continue;
            }
            let (xe, xf) = (max + 1, max + 2);
            let (he, hf) = (knot.edge_ends(e).unwrap().1, knot.edge_ends(f).unwrap().1);
            let mut cut: Vec<RawCrossing> = raw.clone();
            cut[he.crossing].0[he.slot] = xe;
            cut[hf.crossing].0[hf.slot] = xf;
            for (nw, sw) in [(e, xe), (xe, e)] {
                for (ne, se) in [(f, xf), (xf, f)] {
                    let Ok(t) = Tangle::from_raw(&cut, [nw, ne, sw, se], false) else { continue };
                    let ok = t.is_planar()
                        && partial_sum(&t, &t).is_ok()
                        && closure(&t, Closure::Denominator).is_ok_and(|d| d.is_isomorphic(knot));
                    if ok {
                        // round trip through the text format fixes the orientation
                        return t.to_string().parse();
                    }
                }
            }
        }
    }
    Err(KhError::InvalidTangle("no admissible cut".into()))
}

/// A composite knot, its companion and the ribbon concordance between them.
#[derive(Clone, Debug)]
pub struct CompanionBundle {
    pub composite: Diagram,
    pub companion: Diagram,
    pub movie: Movie,
    /// an edge of the composite that no move touches, if there is one
    pub basepoint: Option<EdgeId>,
}

/// Folds `tangles` by partial sum. The movie starts at the denominator
/// closure, births a loop, pushes it over the eastern closure arc by a
/// Reidemeister II move and bands it to the western arc. The result is the
/// tangle sum with the clasp.
pub fn build_companion(tangles: &[Tangle]) -> Result<CompanionBundle> {
    let (first, rest) = tangles.split_first().ok_or(KhError::EmptyList)?;
    let sum = rest.iter().try_fold(first.clone(), |acc, t| partial_sum(&acc, t))?;
    let composite = closure(&sum, Closure::Denominator)?;
    let companion = tangle_sum(&sum, &clasp())?;
    let ends = sum.ends();
    let west = ends[End::NW as usize].min(ends[End::SW as usize]);
    let east = ends[End::NE as usize].min(ends[End::SE as usize]);
    let basepoint = composite.edges().into_iter().find(|e| *e != west && *e != east);
    let composite = composite.with_basepoint(basepoint)?;
    let m = composite.max_edge();
    let o = m + 1;
    let is_loop = |e: EdgeId| e == o || composite.loops().contains(&e);
    // the loop passes over or under one closure arc and is banded to the other
    for (over, under, other) in [(o, east, west), (east, o, west), (o, west, east), (west, o, east)] {
        let a3 = if is_loop(over) { m + 2 } else { m + 4 };
        let b3 = if is_loop(under) { m + 5 } else { m + 7 };
        let r2_edges = [m + 2, m + 3, a3, m + 5, m + 6, b3];
        let loop_arcs = if over == o { [m + 2, m + 3] } else { [m + 5, m + 6] };
        let band_new: Vec<EdgeId> = if is_loop(other) { vec![m + 8] } else { vec![m + 8, m + 9] };
        for side in [Side::Left, Side::Right] {
            for parallel in [false, true] {
                for arc in loop_arcs {
                    let moves = vec![
                        Move::birth(o),
                        Move::r2_intro(over, under, r2_edges, side, parallel),
                        Move::saddle(arc, other, &band_new),
                    ];
                    let Ok(movie) = Movie::new(composite.clone(), moves) else { continue };
                    if movie.end().is_isomorphic(&companion) {
                        return Ok(CompanionBundle { composite, companion, movie, basepoint });
                    }
                }
            }
        }
    }
    Err(KhError::InvalidTangle("no band realizes the clasp".into()))
}

/// Companion movie shipped with the crate for `n` copies of the trefoil
/// tangle, `n` in 1..=3.
pub fn bundled_companion_movie(n: usize) -> Result<Movie> {
    let text = match n {
        1 => include_str!("../data/companion_n1.jsonl"),
        2 => include_str!("../data/companion_n2.jsonl"),
        3 => include_str!("../data/companion_n3.jsonl"),
        _ => return Err(KhError::InvalidTangle(format!("no bundled movie for n = {n}"))),
    };
    Movie::from_jsonl(text)
}

/// Ribbon concordance from the unknot to a 6-crossing square knot: a birth,
/// three Reidemeister II moves tangling the new circle with the old one,
/// and a saddle joining them.
pub fn square_knot_ribbon_movie() -> Movie {
    Movie::from_jsonl(include_str!("../data/square_knot_ribbon.jsonl")).expect("bundled ribbon movie")
}

/// Edges named by any move of a movie.
pub fn touched_edges(mv: &Movie) -> BTreeSet<EdgeId> {
    mv.moves().iter().flat_map(|m| m.edges.iter().chain(&m.new_edges).copied()).collect()
}
