//! Chain maps induced by movie moves. Elementary cobordisms act by the
//! Frobenius structure on the affected circles. Reidemeister moves are
//! realized by cancelling the local isomorphism arrows and matching the
//! surviving generators with the simpler diagram's complex.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;

use super::elim::Eliminator;
use super::moves::{bigon, kink_crossing, triangle, Move, MoveKind};
use super::Movie;
use crate::diagram::{Diagram, EdgeId};
use crate::error::{KhError, Result};
use crate::khcomplex::{build_complex, ChainComplex, ChainMap, Cube, Ring};
use crate::linalg::SparseF2;

fn mismatch(msg: impl Into<String>) -> KhError {
    KhError::ComplexMismatch(msg.into())
}

fn cube_of(c: &ChainComplex) -> Result<&Arc<Cube>> {
    c.cube().ok_or_else(|| mismatch("complex has no cube of resolutions"))
}

/// Edges of each circle at vertex `v`.
fn circle_edges(cube: &Cube, edges: &[EdgeId], v: u64) -> Vec<Vec<EdgeId>> {
    let mut out = vec![vec![]; cube.circles(v)];
    for &e in edges {
        out[cube.circle_of(v, e)].push(e);
    }
    out
}

/// Target circle of each source circle, through the first edge of it that
/// `emap` sends to the target diagram.
fn circle_images(src: &Cube, src_edges: &[EdgeId], u: u64, tgt: &Cube, w: u64, emap: &dyn Fn(EdgeId) -> Option<EdgeId>) -> Vec<Option<usize>> {
    circle_edges(src, src_edges, u)
        .iter()
        .map(|es| es.iter().find_map(|&e| emap(e)).map(|f| tgt.circle_of(w, f)))
        .collect()
}

fn relabel(cube_s: &Cube, u: u64, cube_t: &Cube, w: u64, images: &[usize], labels: u64) -> u64 {
    let mut out = 0;
    for (c, &t) in images.iter().enumerate() {
        if labels & cube_s.label_bit(u, c) != 0 {
            out |= cube_t.label_bit(w, t);
        }
    }
    out
}

/// Big vertex from a small one with extra crossings at `local` (sorted by
/// index) set to the given bits.
fn insert_bits(u: u64, n_small: usize, local: &[(usize, bool)]) -> u64 {
    let n = n_small + local.len();
    let mut v = 0u64;
    let mut s = 0;
    for k in 0..n {
        let bit = match local.iter().find(|l| l.0 == k) {
            Some(&(_, b)) => b,
            None => {
                s += 1;
                (u >> (n_small - s)) & 1 == 1
            }
        };
        if bit {
            v |= 1 << (n - 1 - k);
        }
    }
    v
}

fn bits_of(cube: &Cube, v: u64, ks: &[usize]) -> Vec<bool> {
    ks.iter().map(|&k| v & cube.crossing_bit(k) != 0).collect()
}

/// Bijection from `src` generators onto a set of `tgt` generators: vertices
/// through `vmap`, circles through `emap`, each remaining target circle
/// fixed by `fixed`, and at most one unmatched circle on each side paired.
struct Matching<'a> {
    vmap: &'a (dyn Fn(u64) -> Option<u64> + Sync),
    emap: &'a (dyn Fn(EdgeId) -> Option<EdgeId> + Sync),
    fixed: &'a (dyn Fn(u64) -> Vec<(EdgeId, bool)> + Sync),
}

fn match_gens(src: &ChainComplex, tgt: &ChainComplex, m: &Matching) -> Result<Vec<Option<usize>>> {
    let (cs, ct) = (cube_of(src)?, cube_of(tgt)?);
    let src_edges = cs.diagram().edges();
    let per_vertex: Vec<Result<Vec<(usize, usize)>>> = (0..cs.vertex_count() as u64)
        .into_par_iter()
        .map(|u| {
            let Some(w) = (m.vmap)(u) else { return Ok(vec![]) };
            let mut images = circle_images(cs, &src_edges, u, ct, w, m.emap);
            let mut fixed_bits = 0u64;
            let mut used: BTreeSet<usize> = images.iter().flatten().copied().collect();
            for (e, x) in (m.fixed)(w) {
                let c = ct.circle_of(w, e);
                if !used.insert(c) {
                    return Err(mismatch(format!("fixed circle through edge {e} is already matched")));
                }
                if x {
                    fixed_bits |= ct.label_bit(w, c);
                }
            }
            let free_t: Vec<usize> = (0..ct.circles(w)).filter(|c| !used.contains(c)).collect();
            let free_s: Vec<usize> = (0..images.len()).filter(|&c| images[c].is_none()).collect();
            match (free_s.as_slice(), free_t.as_slice()) {
                ([], []) => {}
                ([s], [t]) => images[*s] = Some(*t),
                _ => return Err(mismatch(format!("circles at vertex {u} do not correspond"))),
            }
            let images: Vec<usize> = images.into_iter().map(Option::unwrap).collect();
            if images.iter().collect::<BTreeSet<_>>().len() != images.len() {
                return Err(mismatch(format!("two circles at vertex {u} meet one target circle")));
            }
            let mut out = vec![];
            for l in 0..1u64 << cs.circles(u) {
                let s = src.index_of(u, l).ok_or_else(|| mismatch("source generator missing"))?;
                let lt = relabel(cs, u, ct, w, &images, l) | fixed_bits;
                let t = tgt.index_of(w, lt).ok_or_else(|| mismatch("target generator missing"))?;
                let (gs, gt) = (src.gen(s), tgt.gen(t));
                if (gs.i, gs.j) != (gt.i, gt.j) {
                    return Err(mismatch(format!("matched generators differ in bidegree: ({},{}) vs ({},{})", gs.i, gs.j, gt.i, gt.j)));
                }
                out.push((s, t));
            }
            Ok(out)
        })
        .collect();
    let mut map = vec![None; src.len()];
    for pairs in per_vertex {
        for (s, t) in pairs? {
            map[s] = Some(t);
        }
    }
    Ok(map)
}

/// Checks that `map` is a bijection from the alive generators of `ea` onto
/// those of `eb` carrying one reduced differential onto the other. With
/// `ea = None` the source is the unreduced complex `a`.
fn check_iso(a: &ChainComplex, ea: Option<&Eliminator>, eb: &Eliminator, map: &[Option<usize>]) -> Result<()> {
    let alive_a: Vec<usize> = match ea {
        Some(e) => e.survivors(),
        None => (0..a.len()).collect(),
    };
    let alive_b = eb.survivors();
    if alive_a.len() != alive_b.len() {
        return Err(mismatch(format!("{} generators survive on one side, {} on the other", alive_a.len(), alive_b.len())));
    }
    let da = a.d_f2();
    for &s in &alive_a {
        let t = map[s].ok_or_else(|| mismatch(format!("generator {s} has no partner")))?;
        if !eb.is_alive(t) {
            return Err(mismatch(format!("generator {s} meets a cancelled generator")));
        }
        let ds: BTreeSet<usize> = match ea {
            Some(e) => e.d(s).iter().map(|&x| map[x].unwrap_or(usize::MAX)).collect(),
            None => da.col(s).iter().map(|&x| map[x].unwrap_or(usize::MAX)).collect(),
        };
        if &ds != eb.d(t) {
            return Err(mismatch(format!("reduced differentials differ at generator {s}")));
        }
    }
    Ok(())
}

/// Cancels, for a Reidemeister I crossing `k` with kink edge `kink`, the
/// arrows through the resolution isolating the kink circle. Returns the
/// bit of `k` and the kink label on the survivors.
fn reduce_r1(c: &ChainComplex, k: usize, kink: EdgeId) -> Result<(Eliminator, bool, bool)> {
    let cube = cube_of(c)?;
    let x = cube.diagram().crossings()[k];
    let iso_bit = [false, true].into_iter().find(|&b| x.smoothing(b).contains(&(kink, kink))).ok_or_else(|| mismatch("kink edge is not a kink"))?;
    let kb = cube.crossing_bit(k);
    let mut e = Eliminator::new(c);
    for b in 0..c.len() {
        let g = c.gen(b);
        if g.vertex & kb != 0 {
            continue;
        }
        let w = g.vertex | kb;
        let o = cube.label_bit(w, cube.circle_of(w, kink));
        let target = if iso_bit {
            // split off the kink circle; cancel against its X-labeled term
            e.d(b).iter().copied().find(|&t| c.gen(t).vertex == w && c.gen(t).labels & o != 0)
        } else {
            let o0 = cube.label_bit(g.vertex, cube.circle_of(g.vertex, kink));
            if g.labels & o0 != 0 {
                continue;
            }
            e.d(b).iter().copied().find(|&t| c.gen(t).vertex == w)
        };
        let t = target.ok_or_else(|| mismatch("missing kink arrow"))?;
        e.cancel(b, t)?;
    }
    // survivors: kink circle labeled 1 at the split side, X at the merge side
    Ok((e, iso_bit, !iso_bit))
}

/// Cancels the bigon arrows of a Reidemeister II pair of crossings `ks`
/// among generators passing `filter`. `inner` holds the edges that close up
/// into the small circle. Returns the local bits of the surviving vertex.
fn reduce_r2(c: &ChainComplex, e: &mut Eliminator, ks: [usize; 2], inner: &[EdgeId], filter: &dyn Fn(u64) -> bool) -> Result<[bool; 2]> {
    let cube = cube_of(c)?;
    let edges = cube.diagram().edges();
    let (b0, b1) = (cube.crossing_bit(ks[0]), cube.crossing_bit(ks[1]));
    let base = (0..cube.vertex_count() as u64).find(|&v| v & (b0 | b1) == 0 && filter(v)).ok_or_else(|| mismatch("no vertex passes the filter"))?;
    let has_small_circle = |v: u64| circle_edges(cube, &edges, v).iter().any(|es| es.iter().all(|x| inner.contains(x)));
    let (wo, wp) = match (has_small_circle(base | b0), has_small_circle(base | b1)) {
        (true, false) => (b0, b1),
        (false, true) => (b1, b0),
        _ => return Err(mismatch("crossings do not form a bigon")),
    };
    let small = |v: u64| cube.label_bit(v, cube.circle_of(v, inner[0]));
    let gens: Vec<usize> = (0..c.len()).filter(|&g| filter(c.gen(g).vertex)).collect();
    for &b in &gens {
        let g = c.gen(b);
        if g.vertex & (b0 | b1) != 0 {
            continue;
        }
        let w = g.vertex | wo;
        let t = e.d(b).iter().copied().find(|&t| c.gen(t).vertex == w && c.gen(t).labels & small(w) != 0);
        e.cancel(b, t.ok_or_else(|| mismatch("missing bigon split arrow"))?)?;
    }
    for &b in &gens {
        let g = c.gen(b);
        if g.vertex & (b0 | b1) != wo || g.labels & small(g.vertex) != 0 {
            continue;
        }
        let w = g.vertex | wp;
        let ts: Vec<usize> = e.d(b).iter().copied().filter(|&t| c.gen(t).vertex == w).collect();
        let [t] = ts[..] else {
            return Err(mismatch("bigon merge arrow is not unique"));
        };
        e.cancel(b, t)?;
    }
    Ok([wp == b0, wp == b1])
}

/// Inclusion of the reduced complex composed with `map` from `small`.
fn inclusion(small: &Arc<ChainComplex>, big: &Arc<ChainComplex>, e: &Eliminator, map: &[Option<usize>]) -> Result<ChainMap> {
    let cols = (0..small.len()).map(|s| e.incl(map[s].unwrap()).iter().copied().collect()).collect();
    ChainMap::new(small.clone(), big.clone(), SparseF2::from_columns(big.len(), cols), (0, 0))
}

/// Projection onto the reduced complex composed with the inverse of `map`.
fn projection(big: &Arc<ChainComplex>, small: &Arc<ChainComplex>, e: &Eliminator, map: &[Option<usize>]) -> Result<ChainMap> {
    let mut cols = vec![vec![]; big.len()];
    for (s, t) in map.iter().enumerate() {
        if let Some(t) = *t {
            for &u in e.proj_t(t) {
                cols[u].push(s);
            }
        }
    }
    ChainMap::new(big.clone(), small.clone(), SparseF2::from_columns(small.len(), cols), (0, 0))
}

/// How a Reidemeister I or II site embeds the simpler diagram into the
/// one with more crossings.
struct Site {
    /// crossings of the larger diagram that the move adds
    local: Vec<usize>,
    /// edges of the smaller diagram renamed in the larger one
    renames: Vec<(EdgeId, EdgeId)>,
}

fn reidemeister_map(small: &Arc<ChainComplex>, big: &Arc<ChainComplex>, site: &Site, kind: MoveKind, kink_or_inner: &[EdgeId]) -> Result<(Eliminator, Vec<Option<usize>>)> {
    let n_small = cube_of(small)?.n();
    let big_edges: BTreeSet<EdgeId> = cube_of(big)?.diagram().edges().into_iter().collect();
    let emap = |e: EdgeId| Some(site.renames.iter().find(|r| r.0 == e).map_or(e, |r| r.1)).filter(|f| big_edges.contains(f));
    let (e, map) = match kind {
        MoveKind::R1Pos | MoveKind::R1Neg => {
            let k = site.local[0];
            let (e, bit, label) = reduce_r1(big, k, kink_or_inner[0])?;
            let vmap = move |u: u64| Some(insert_bits(u, n_small, &[(k, bit)]));
            let kink = kink_or_inner[0];
            let fixed = move |_w: u64| vec![(kink, label)];
            let map = match_gens(small, big, &Matching { vmap: &vmap, emap: &emap, fixed: &fixed })?;
            (e, map)
        }
        _ => {
            let ks = [site.local[0], site.local[1]];
            let mut e = Eliminator::new(big);
            let bits = reduce_r2(big, &mut e, ks, kink_or_inner, &|_| true)?;
            let mut local = vec![(ks[0], bits[0]), (ks[1], bits[1])];
            local.sort_unstable();
            let vmap = move |u: u64| Some(insert_bits(u, n_small, &local));
            let map = match_gens(small, big, &Matching { vmap: &vmap, emap: &emap, fixed: &|_| vec![] })?;
            (e, map)
        }
    };
    check_iso(small, None, &e, &map)?;
    Ok((e, map))
}

fn r1_site(big: &Diagram, kink: EdgeId, rename_from: EdgeId) -> Result<Site> {
    let k = kink_crossing(big, kink)?;
    let x = big.crossings()[k];
    let entry = (0..4).find(|&s| x.edges[s] != kink && x.is_incoming(s)).unwrap();
    Ok(Site { local: vec![k], renames: vec![(rename_from, x.edges[entry])] })
}

fn r2_site(big: &Diagram, over2: EdgeId, under2: EdgeId, a: EdgeId, b: EdgeId) -> Result<(Site, Vec<EdgeId>)> {
    let bg = bigon(big, &[over2, under2])?;
    let mut local = bg.k.to_vec();
    local.sort_unstable();
    Ok((Site { local, renames: vec![(a, bg.a[0]), (b, bg.b[0])] }, vec![over2, under2]))
}

/// Merge and split maps of a saddle, unit of a birth, counit of a death.
fn cobordism_map(source: &Arc<ChainComplex>, target: &Arc<ChainComplex>, m: &Move) -> Result<ChainMap> {
    let (cs, ct) = (cube_of(source)?, cube_of(target)?);
    let src_edges = cs.diagram().edges();
    let tgt_edges: BTreeSet<EdgeId> = ct.diagram().edges().into_iter().collect();
    let touched: BTreeSet<EdgeId> = m.edges.iter().copied().collect();
    let emap = |e: EdgeId| (!touched.contains(&e) && tgt_edges.contains(&e)).then_some(e);
    let shift = if m.kind == MoveKind::Saddle { (0, -1) } else { (0, 1) };
    let cols: Vec<Vec<usize>> = (0..cs.vertex_count() as u64)
        .into_par_iter()
        .flat_map_iter(|v| {
            let images = circle_images(cs, &src_edges, v, ct, v, &emap);
            let mut out = vec![];
            for l in 0..1u64 << cs.circles(v) {
                let untouched: u64 = images
                    .iter()
                    .enumerate()
                    .filter_map(|(c, t)| t.filter(|_| l & cs.label_bit(v, c) != 0).map(|t| ct.label_bit(v, t)))
                    .fold(0, |a, b| a | b);
                let x_on = |e: EdgeId| l & cs.label_bit(v, cs.circle_of(v, e)) != 0;
                let tbit = |e: EdgeId| ct.label_bit(v, ct.circle_of(v, e));
                let labels: Vec<u64> = match m.kind {
                    MoveKind::Birth => vec![untouched],
                    MoveKind::Death => {
                        if x_on(m.edges[0]) {
                            vec![untouched]
                        } else {
                            vec![]
                        }
                    }
                    _ => {
                        let (a, b) = (m.edges[0], m.edges[1]);
                        if cs.circle_of(v, a) != cs.circle_of(v, b) {
                            let c = tbit(m.new_edges[0]);
                            match (x_on(a), x_on(b)) {
                                (true, true) => vec![],
                                (false, false) => vec![untouched],
                                _ => vec![untouched | c],
                            }
                        } else {
                            let (c, d) = (tbit(m.new_edges[0]), tbit(m.new_edges[1]));
                            if x_on(a) {
                                vec![untouched | c | d]
                            } else {
                                vec![untouched | c, untouched | d]
                            }
                        }
                    }
                };
                out.push(labels.into_iter().map(|lt| target.index_of(v, lt).expect("target generator")).collect());
            }
            out
        })
        .collect();
    // generators are ordered by vertex and labeling, as the columns above
    ChainMap::new(source.clone(), target.clone(), SparseF2::from_columns(target.len(), cols), shift)
}

/// Local data of a Reidemeister III triangle: the crossing shared by the two
/// lower strands, the two crossings on the top strand and the triangle edges.
fn r3_local(d: &Diagram, tri: &[EdgeId]) -> Result<(usize, [usize; 2], Vec<EdgeId>)> {
    let strands = triangle(d, tri)?;
    let over = |s: &super::moves::TriStrand| (s.first.slot % 2) + (s.second.slot % 2);
    let top = strands.iter().find(|s| over(s) == 2).unwrap();
    let ks = [top.first.crossing, top.second.crossing];
    let z = strands.iter().flat_map(|s| [s.first.crossing, s.second.crossing]).find(|k| !ks.contains(k)).unwrap();
    Ok((z, ks, tri.to_vec()))
}

/// Reduces a Reidemeister III side: in the half of the cube where the lower
/// crossing closes the triangle, the top strand forms a bigon.
fn reduce_r3(c: &ChainComplex, tri: &[EdgeId]) -> Result<(Eliminator, usize, bool)> {
    let cube = cube_of(c)?;
    let (z, ks, inner) = r3_local(cube.diagram(), tri)?;
    let x = cube.diagram().crossings()[z];
    let closes = |b: bool| x.smoothing(b).iter().any(|&(p, q)| inner.contains(&p) && inner.contains(&q));
    let zb = [false, true].into_iter().find(|&b| closes(b)).ok_or_else(|| mismatch("triangle does not close"))?;
    let zbit = cube.crossing_bit(z);
    let mut e = Eliminator::new(c);
    reduce_r2(c, &mut e, ks, &inner, &|v| (v & zbit != 0) == zb)?;
    Ok((e, z, zb))
}

/// Connectivity of the triangle neighbourhood at vertex `v`: which outer
/// edges are joined through the three local crossings, and the number of
/// circles inside.
fn local_signature(d: &Diagram, local: &[usize], v_bits: &[bool]) -> (BTreeSet<(EdgeId, EdgeId)>, usize) {
    let mut parent: std::collections::BTreeMap<EdgeId, EdgeId> = Default::default();
    fn find(p: &mut std::collections::BTreeMap<EdgeId, EdgeId>, e: EdgeId) -> EdgeId {
        let q = *p.get(&e).unwrap_or(&e);
        if q == e {
            return e;
        }
        let r = find(p, q);
        p.insert(e, r);
        r
    }
    let mut count: std::collections::BTreeMap<EdgeId, usize> = Default::default();
    for (&k, &b) in local.iter().zip(v_bits) {
        for e in d.crossings()[k].edges {
            *count.entry(e).or_default() += 1;
        }
        for (p, q) in d.crossings()[k].smoothing(b) {
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                parent.insert(rp.max(rq), rp.min(rq));
            }
        }
    }
    // edges with one end outside the neighbourhood
    let outer: Vec<EdgeId> = count.iter().filter(|(_, &n)| n == 1).map(|(&e, _)| e).collect();
    let mut groups: std::collections::BTreeMap<EdgeId, Vec<EdgeId>> = Default::default();
    for &e in count.keys() {
        let r = find(&mut parent, e);
        groups.entry(r).or_default().push(e);
    }
    let mut pairs = BTreeSet::new();
    let mut closed = 0;
    for g in groups.values() {
        let o: Vec<EdgeId> = g.iter().copied().filter(|e| outer.contains(e)).collect();
        match o[..] {
            [] => closed += 1,
            [p, q] => {
                pairs.insert((p.min(q), p.max(q)));
            }
            _ => {}
        }
    }
    (pairs, closed)
}

fn r3_map(source: &Arc<ChainComplex>, target: &Arc<ChainComplex>, m: &Move) -> Result<ChainMap> {
    let (ea, za, zba) = reduce_r3(source, &m.edges)?;
    let (eb, zb, zbb) = reduce_r3(target, &m.new_edges)?;
    let (cs, ct) = (cube_of(source)?, cube_of(target)?);
    if za != zb {
        return Err(mismatch("lower crossing moved"));
    }
    let (_, ks, _) = r3_local(cs.diagram(), &m.edges)?;
    let local = [ks[0], ks[1], za];
    let bits = |v: u64, cube: &Cube| bits_of(cube, v, &local);
    // pair local vertices of surviving generators by boundary connectivity
    let mut pairs: Vec<(Vec<bool>, Vec<bool>)> = vec![];
    let live_locals = |e: &Eliminator, c: &ChainComplex, cube: &Cube| -> BTreeSet<Vec<bool>> {
        e.survivors().iter().map(|&g| bits(c.gen(g).vertex, cube)).collect()
    };
    let la = live_locals(&ea, source, cs);
    let lb = live_locals(&eb, target, ct);
    for a in &la {
        let sig = (local_signature(cs.diagram(), &local, a), a.iter().filter(|&&x| x).count());
        let cands: Vec<&Vec<bool>> = lb.iter().filter(|b| (local_signature(ct.diagram(), &local, b), b.iter().filter(|&&x| x).count()) == sig).collect();
        let [b] = cands[..] else {
            return Err(mismatch("ambiguous local resolution in the triangle"));
        };
        pairs.push((a.clone(), b.clone()));
    }
    let _ = (zba, zbb);
    let masks: Vec<u64> = local.iter().map(|&k| cs.crossing_bit(k)).collect();
    let all_mask: u64 = masks.iter().fold(0, |a, b| a | b);
    let vmap = |u: u64| {
        let bu = bits_of(cs, u, &local);
        pairs.iter().find(|p| p.0 == bu).map(|p| {
            let mut w = u & !all_mask;
            for (mask, &on) in masks.iter().zip(&p.1) {
                if on {
                    w |= mask;
                }
            }
            w
        })
    };
    let inner: BTreeSet<EdgeId> = m.edges.iter().chain(&m.new_edges).copied().collect();
    let emap = |e: EdgeId| (!inner.contains(&e)).then_some(e);
    let map = match_gens(source, target, &Matching { vmap: &vmap, emap: &emap, fixed: &|_| vec![] })?;
    // only survivors matter
    let map: Vec<Option<usize>> = map.iter().enumerate().map(|(s, t)| t.filter(|_| ea.is_alive(s))).collect();
    check_iso(source, Some(&ea), &eb, &map)?;
    let mut cols = vec![BTreeSet::new(); source.len()];
    for (s, t) in map.iter().enumerate() {
        if let Some(t) = *t {
            for &u in ea.proj_t(s) {
                for &y in eb.incl(t) {
                    if !cols[u].remove(&y) {
                        cols[u].insert(y);
                    }
                }
            }
        }
    }
    let cols = cols.into_iter().map(|c| c.into_iter().collect()).collect();
    ChainMap::new(source.clone(), target.clone(), SparseF2::from_columns(target.len(), cols), (0, 0))
}

/// The chain map of one move between the F2 complexes of the diagrams
/// before and after it.
pub fn chain_map_of_move(source: &Arc<ChainComplex>, target: &Arc<ChainComplex>, m: &Move) -> Result<ChainMap> {
    if source.ring() != Ring::F2 || target.ring() != Ring::F2 {
        return Err(mismatch("movie maps are defined over F2"));
    }
    let before = cube_of(source)?.diagram().clone();
    let after = cube_of(target)?.diagram().clone();
    match m.kind {
        MoveKind::Birth | MoveKind::Death | MoveKind::Saddle => cobordism_map(source, target, m),
        MoveKind::R1Pos | MoveKind::R1Neg => {
            let kink = m.new_edges[1];
            let site = r1_site(&after, kink, m.edges[0])?;
            let (e, map) = reidemeister_map(source, target, &site, m.kind, &[kink])?;
            inclusion(source, target, &e, &map)
        }
        MoveKind::R1Elim => {
            let kink = m.edges[0];
            let site = r1_site(&before, kink, m.new_edges[0])?;
            let (e, map) = reidemeister_map(target, source, &site, MoveKind::R1Pos, &[kink])?;
            projection(source, target, &e, &map)
        }
        MoveKind::R2Intro => {
            let ne = &m.new_edges;
            let (site, inner) = r2_site(&after, ne[1], ne[4], m.edges[0], m.edges[1])?;
            let (e, map) = reidemeister_map(source, target, &site, m.kind, &inner)?;
            inclusion(source, target, &e, &map)
        }
        MoveKind::R2Elim => {
            let (site, inner) = r2_site(&before, m.edges[0], m.edges[1], m.new_edges[0], m.new_edges[1])?;
            let (e, map) = reidemeister_map(target, source, &site, m.kind, &inner)?;
            projection(source, target, &e, &map)
        }
        MoveKind::R3 => r3_map(source, target, m),
    }
}

/// Complexes of every frame and the chain map of every move.
pub struct MovieMap {
    pub complexes: Vec<Arc<ChainComplex>>,
    pub steps: Vec<ChainMap>,
}

impl MovieMap {
    /// The composite from the first frame to the last.
    pub fn total(&self) -> Result<ChainMap> {
        if self.steps.is_empty() {
            return Ok(ChainMap::identity(self.complexes[0].clone()));
        }
        ChainMap::compose_all(&self.steps)
    }
}

pub fn movie_chain_map(movie: &Movie) -> Result<MovieMap> {
    let complexes: Vec<Arc<ChainComplex>> = movie.frames().par_iter().map(|d| Arc::new(build_complex(d, Ring::F2))).collect();
    let steps = movie
        .moves()
        .iter()
        .enumerate()
        .map(|(k, m)| chain_map_of_move(&complexes[k], &complexes[k + 1], m).map_err(|e| e.at_move(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(MovieMap { complexes, steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{parse_diagram, Sign};
    use crate::khcomplex::induced_homology_map;
    use crate::movie::{apply_move, inverse_move, Side};

    fn complex(d: &Diagram) -> Arc<ChainComplex> {
        Arc::new(build_complex(d, Ring::F2))
    }

    /// The map is a chain map; for Reidemeister moves it is a homology
    /// isomorphism and the inverse move's map inverts it on homology.
    fn check_move(d: &Diagram, m: &Move) {
        let after = apply_move(d, m).unwrap();
        let (a, b) = (complex(d), complex(&after));
        let f = chain_map_of_move(&a, &b, m).unwrap_or_else(|e| panic!("{m:?} on {d}: {e}"));
        f.check().unwrap();
        if m.is_reidemeister() {
            let hf = induced_homology_map(&f).unwrap();
            assert!(hf.is_injective() && hf.is_surjective(), "{m:?} on {d}");
            let inv = inverse_move(d, m).unwrap();
            let g = chain_map_of_move(&b, &a, &inv).unwrap();
            let hg = induced_homology_map(&g).unwrap();
            assert!(hg.after(&hf).is_identity(), "{m:?} on {d}: inverse");
        }
    }

    fn trefoil() -> Diagram {
        parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap()
    }

    #[test]
    fn insert_bits_places_local_crossings() {
        assert_eq!(insert_bits(0b11, 2, &[(1, false)]), 0b101);
        assert_eq!(insert_bits(0b10, 2, &[(0, true), (3, true)]), 0b1101);
    }

    #[test]
    fn cobordisms_are_chain_maps() {
        let t = trefoil();
        check_move(&t, &Move::birth(7));
        let t7 = apply_move(&t, &Move::birth(7)).unwrap();
        for e in 1..=6 {
            check_move(&t7, &Move::saddle(7, e, &[8]));
        }
        check_move(&t7, &Move::death(7));
        for a in 1..=6 {
            for b in 1..=6 {
                let m = Move::saddle(a, b, &[8, 9]);
                if apply_move(&t, &m).is_ok() {
                    check_move(&t, &m);
                }
            }
        }
    }

    #[test]
    fn saddle_on_unknot_splits_and_merges() {
        let u = Diagram::unknot();
        let m = Move::saddle(1, 1, &[2, 3]);
        check_move(&u, &m);
        let two = apply_move(&u, &m).unwrap();
        let f = chain_map_of_move(&complex(&two), &complex(&u), &inverse_move(&u, &m).unwrap()).unwrap();
        f.check().unwrap();
        assert_eq!(f.matrix().nnz(), 3);
    }

    #[test]
    fn r1_maps_are_isomorphisms() {
        let t = trefoil();
        for e in [1, 4] {
            for sign in [Sign::Pos, Sign::Neg] {
                for of in [false, true] {
                    check_move(&t, &Move::r1(sign, e, &[7, 8, 9], of));
                }
            }
        }
        for sign in [Sign::Pos, Sign::Neg] {
            check_move(&Diagram::unknot(), &Move::r1(sign, 1, &[2, 3], false));
        }
    }

    #[test]
    fn r2_maps_are_isomorphisms() {
        let t = trefoil();
        let mut n = 0;
        for a in 1..=6 {
            for b in 1..=6 {
                for side in [Side::Left, Side::Right] {
                    for parallel in [false, true] {
                        let m = Move::r2_intro(a, b, [7, 8, 9, 10, 11, 12], side, parallel);
                        if apply_move(&t, &m).is_ok() {
                            check_move(&t, &m);
                            n += 1;
                        }
                    }
                }
            }
        }
        assert!(n > 0);
        let u2 = parse_diagram("U[1];U[2]").unwrap();
        check_move(&u2, &Move::r2_intro(1, 2, [3, 4, 3, 5, 6, 5], Side::Left, false));
    }

    #[test]
    fn r3_maps_are_isomorphisms() {
        let sites = crate::movie::moves::tests::r3_sites();
        assert!(sites.len() > 100);
        for (d, tri) in sites {
            check_move(&d, &Move::r3(tri, [20, 21, 22]));
        }
    }

    #[test]
    fn maps_respect_the_basepoint() {
        use crate::khcomplex::{commutes_with_x, reduced_map};
        let t: Diagram = "X[1,4,2,5];X[3,6,4,1];X[5,2,6,3];bp=1".parse().unwrap();
        let mut mv = Movie::new(t, vec![Move::r1(Sign::Pos, 3, &[7, 8, 9], true), Move::birth(10), Move::saddle(10, 5, &[11])]).unwrap();
        let r2 = (2..=11)
            .flat_map(|b| [(b, Side::Left), (b, Side::Right)])
            .flat_map(|(b, s)| [false, true].map(|p| Move::r2_intro(11, b, [12, 13, 14, 15, 16, 17], s, p)))
            .find(|m| apply_move(mv.end(), m).is_ok())
            .unwrap();
        mv.push(r2).unwrap();
        let mm = movie_chain_map(&mv).unwrap();
        for f in mm.steps.iter().chain([&mm.total().unwrap()]) {
            f.check().unwrap();
            assert!(commutes_with_x(f, 1).unwrap());
            reduced_map(f, 1).unwrap().check().unwrap();
        }
        assert_eq!(mm.total().unwrap().shift(), (0, 0));
    }

    #[test]
    fn empty_movie_is_identity() {
        let mv = Movie::new(trefoil(), vec![]).unwrap();
        let f = movie_chain_map(&mv).unwrap().total().unwrap();
        assert!(induced_homology_map(&f).unwrap().is_identity());
    }

    #[test]
    fn birth_then_death_is_zero() {
        let mv = Movie::new(trefoil(), vec![Move::birth(7), Move::death(7)]).unwrap();
        let f = movie_chain_map(&mv).unwrap().total().unwrap();
        assert_eq!(f.shift(), (0, 2));
        assert!(f.matrix().is_zero());
    }

    #[test]
    fn unit_on_unknot() {
        let u = Diagram::unknot();
        let two = apply_move(&u, &Move::birth(2)).unwrap();
        let (a, b) = (complex(&u), complex(&two));
        let f = chain_map_of_move(&a, &b, &Move::birth(2)).unwrap();
        // 1 -> 1(x)1 and X -> X(x)1, the new loop being the second circle
        let img = |l: u64| b.gen(f.matrix().col(a.index_of(0, l).unwrap())[0]).labels;
        assert_eq!(img(0), 0b00);
        assert_eq!(img(1), 0b10);
    }
}
