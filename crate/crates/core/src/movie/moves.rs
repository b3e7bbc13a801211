use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::diagram::{Crossing, Diagram, EdgeId, Sign, Slot};
use crate::error::{KhError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MoveKind {
    Birth,
    Death,
    Saddle,
    R1Pos,
    R1Neg,
    R1Elim,
    R2Intro,
    R2Elim,
    R3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

/// One frame change of a movie.
///
/// * `birth`: `new_edges = [loop]`
/// * `death`: `edges = [loop]`
/// * `saddle`: `edges = [a, b]`. Two crossing edges give `new_edges = [c, d]`
///   with `c` from the tail of `a` to the head of `b`. Merging a free loop
///   into anything gives one new edge. `[x, x]` splits: an edge becomes
///   `[edge, loop]`, a loop becomes two loops.
/// * `r1_pos`/`r1_neg`: `edges = [e]`, `new_edges = [e1, e2, e3]` along the
///   orientation with `e2` the kink loop; a free loop takes `[e1, e2]`.
///   `over_first` says whether the strand first passes over.
/// * `r1_elim`: `edges = [kink loop edge]`, `new_edges = [merged edge]`.
/// * `r2_intro`: `edges = [over, under]`, `new_edges = [a1, a2, a3, b1, b2, b3]`
///   (`a3 = a1` or `b3 = b1` for a free loop), plus `side` and `parallel`.
/// * `r2_elim`: `edges = [over bigon edge, under bigon edge]`, `new_edges = [over, under]`.
/// * `r3`: `edges` = the three edges of a triangular face, `new_edges` = the
///   replacement edge for each, in the same order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Move {
    #[serde(rename = "move")]
    pub kind: MoveKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edges: Vec<EdgeId>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub new_edges: Vec<EdgeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over_first: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parallel: Option<bool>,
}

impl Move {
    fn plain(kind: MoveKind, edges: Vec<EdgeId>, new_edges: Vec<EdgeId>) -> Move {
        Move { kind, edges, new_edges, over_first: None, side: None, parallel: None }
    }

    pub fn birth(l: EdgeId) -> Move {
        Self::plain(MoveKind::Birth, vec![], vec![l])
    }

    pub fn death(l: EdgeId) -> Move {
        Self::plain(MoveKind::Death, vec![l], vec![])
    }

    pub fn saddle(a: EdgeId, b: EdgeId, new_edges: &[EdgeId]) -> Move {
        Self::plain(MoveKind::Saddle, vec![a, b], new_edges.to_vec())
    }

    pub fn r1(sign: Sign, e: EdgeId, new_edges: &[EdgeId], over_first: bool) -> Move {
        let kind = if sign == Sign::Pos { MoveKind::R1Pos } else { MoveKind::R1Neg };
        Move { over_first: Some(over_first), ..Self::plain(kind, vec![e], new_edges.to_vec()) }
    }

    pub fn r1_elim(kink: EdgeId, merged: EdgeId) -> Move {
        Self::plain(MoveKind::R1Elim, vec![kink], vec![merged])
    }

    pub fn r2_intro(over: EdgeId, under: EdgeId, new_edges: [EdgeId; 6], side: Side, parallel: bool) -> Move {
        Move { side: Some(side), parallel: Some(parallel), ..Self::plain(MoveKind::R2Intro, vec![over, under], new_edges.to_vec()) }
    }

    pub fn r2_elim(over: EdgeId, under: EdgeId, new_edges: [EdgeId; 2]) -> Move {
        Self::plain(MoveKind::R2Elim, vec![over, under], new_edges.to_vec())
    }

    pub fn r3(edges: [EdgeId; 3], new_edges: [EdgeId; 3]) -> Move {
        Self::plain(MoveKind::R3, edges.to_vec(), new_edges.to_vec())
    }

    pub fn is_reidemeister(&self) -> bool {
        !matches!(self.kind, MoveKind::Birth | MoveKind::Death | MoveKind::Saddle)
    }
}

fn site(msg: impl Into<String>) -> KhError {
    KhError::InvalidSite(msg.into())
}

fn arity(m: &Move, edges: usize, new_edges: &[usize]) -> Result<()> {
    if m.edges.len() != edges || !new_edges.contains(&m.new_edges.len()) {
        return Err(site(format!("{:?} expects {edges} edges and {new_edges:?} new edges", m.kind)));
    }
    Ok(())
}

/// Edges of `d` that a move removes or renames.
pub(crate) fn consumed_edges(d: &Diagram, m: &Move) -> Result<Vec<EdgeId>> {
    Ok(match m.kind {
        MoveKind::Birth => vec![],
        MoveKind::R1Elim => {
            let k = kink_crossing(d, m.edges.first().copied().unwrap_or(0))?;
            d.crossings()[k].edges.to_vec()
        }
        MoveKind::R2Elim => {
            let b = bigon(d, &m.edges)?;
            vec![b.a[0], b.a[1], b.a[2], b.b[0], b.b[1], b.b[2]]
        }
        _ => m.edges.clone(),
    })
}

struct Work {
    crossings: Vec<Crossing>,
    loops: Vec<EdgeId>,
}

impl Work {
    fn new(d: &Diagram) -> Self {
        Work { crossings: d.crossings().to_vec(), loops: d.loops().to_vec() }
    }

    fn set(&mut self, s: Slot, e: EdgeId) {
        self.crossings[s.crossing].edges[s.slot] = e;
    }

    fn remove_loop(&mut self, l: EdgeId) {
        self.loops.retain(|&x| x != l);
    }

    fn finish(mut self, bp: Option<EdgeId>) -> Result<Diagram> {
        self.loops.sort_unstable();
        let d = Diagram::new(self.crossings, self.loops, None).map_err(|e| site(format!("result is not a valid diagram: {e}")))?;
        if !d.is_planar() {
            return Err(site("result is not planar"));
        }
        d.with_basepoint(bp)
    }
}

fn is_loop(d: &Diagram, e: EdgeId) -> bool {
    d.loops().contains(&e)
}

fn ends(d: &Diagram, e: EdgeId) -> Result<(Slot, Slot)> {
    d.edge_ends(e).ok_or_else(|| site(format!("edge {e} is not a crossing edge")))
}

fn require_edge(d: &Diagram, e: EdgeId) -> Result<()> {
    if d.has_edge(e) {
        Ok(())
    } else {
        Err(site(format!("edge {e} not in diagram")))
    }
}

/// Index of the crossing where `e` closes a kink.
pub(crate) fn kink_crossing(d: &Diagram, e: EdgeId) -> Result<usize> {
    d.crossings()
        .iter()
        .position(|x| x.edges.iter().filter(|&&y| y == e).count() == 2)
        .ok_or_else(|| site(format!("edge {e} does not bound a kink")))
}

/// Two crossings joined by an over edge and an under edge, forming a bigon.
pub(crate) struct Bigon {
    /// crossing the strands meet first along the over strand, then second
    pub k: [usize; 2],
    /// over strand edges: incoming, bigon edge, outgoing
    pub a: [EdgeId; 3],
    pub b: [EdgeId; 3],
}

pub(crate) fn bigon(d: &Diagram, edges: &[EdgeId]) -> Result<Bigon> {
    let [a2, b2] = edges else {
        return Err(site("r2_elim expects two edges"));
    };
    let (ta, ha) = ends(d, *a2)?;
    let (tb, hb) = ends(d, *b2)?;
    if ta.crossing == ha.crossing || ta.slot % 2 == 0 || ha.slot % 2 == 0 {
        return Err(site(format!("edge {a2} is not an over edge between two crossings")));
    }
    if tb.slot % 2 != 0 || hb.slot % 2 != 0 {
        return Err(site(format!("edge {b2} is not an under edge")));
    }
    let ks: BTreeSet<usize> = [ta.crossing, ha.crossing].into();
    if ks != [tb.crossing, hb.crossing].into() {
        return Err(site(format!("edges {a2} and {b2} do not join the same two crossings")));
    }
    if !d.faces().iter().any(|f| f.len() == 2 && f.contains(a2) && f.contains(b2)) {
        return Err(site(format!("edges {a2} and {b2} do not bound a bigon face")));
    }
    let x = d.crossings();
    let a1 = x[ta.crossing].edges[(ta.slot + 2) % 4];
    let a3 = x[ha.crossing].edges[(ha.slot + 2) % 4];
    let b1 = x[tb.crossing].edges[(tb.slot + 2) % 4];
    let b3 = x[hb.crossing].edges[(hb.slot + 2) % 4];
    Ok(Bigon { k: [ta.crossing, ha.crossing], a: [a1, *a2, a3], b: [b1, *b2, b3] })
}

fn check_fresh(d: &Diagram, m: &Move, consumed: &[EdgeId]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for &e in &m.new_edges {
        if e == 0 {
            return Err(site("edge ids are positive"));
        }
        if d.has_edge(e) && !consumed.contains(&e) {
            return Err(site(format!("new edge {e} already in diagram")));
        }
        seen.insert(e);
    }
    Ok(())
}

/// Applies a move. The basepoint is carried along unchanged and may not be
/// one of the edges the move removes or renames.
pub fn apply_move(d: &Diagram, m: &Move) -> Result<Diagram> {
    for &e in &m.edges {
        require_edge(d, e)?;
    }
    let consumed = consumed_edges(d, m)?;
    if let Some(bp) = d.basepoint() {
        if consumed.contains(&bp) {
            return Err(KhError::BasepointTouched(bp));
        }
    }
    check_fresh(d, m, &consumed)?;
    let bp = d.basepoint();
    let mut w = Work::new(d);
    match m.kind {
        MoveKind::Birth => {
            arity(m, 0, &[1])?;
            w.loops.push(m.new_edges[0]);
        }
        MoveKind::Death => {
            arity(m, 1, &[0])?;
            if !is_loop(d, m.edges[0]) {
                return Err(site(format!("edge {} is not a free loop", m.edges[0])));
            }
            w.remove_loop(m.edges[0]);
        }
        MoveKind::Saddle => saddle(d, m, &mut w)?,
        MoveKind::R1Pos | MoveKind::R1Neg => r1(d, m, &mut w)?,
        MoveKind::R1Elim => {
            arity(m, 1, &[1])?;
            let k = kink_crossing(d, m.edges[0])?;
            let x = d.crossings()[k];
            let kink = m.edges[0];
            let inc = (0..4).find(|&s| x.edges[s] != kink && x.is_incoming(s)).unwrap();
            let out = (0..4).find(|&s| x.edges[s] != kink && !x.is_incoming(s)).unwrap();
            let (e1, e3) = (x.edges[inc], x.edges[out]);
            let e = m.new_edges[0];
            if e1 == e3 {
                w.loops.push(e);
            } else {
                w.set(ends(d, e1)?.0, e);
                w.set(ends(d, e3)?.1, e);
            }
            w.crossings.remove(k);
        }
        MoveKind::R2Intro => r2_intro(d, m, &mut w)?,
        MoveKind::R2Elim => {
            arity(m, 2, &[2])?;
            let bg = bigon(d, &m.edges)?;
            let [a1, _, a3] = bg.a;
            let [b1, _, b3] = bg.b;
            if [a1, a3].iter().any(|e| *e == b1 || *e == b3) {
                return Err(site("bigon strands are joined next to the bigon"));
            }
            let (na, nb) = (m.new_edges[0], m.new_edges[1]);
            if na == nb {
                return Err(site("new edges must differ"));
            }
            for (e_in, e_out, ne) in [(a1, a3, na), (b1, b3, nb)] {
                if e_in == e_out {
                    w.loops.push(ne);
                } else {
                    w.set(ends(d, e_in)?.0, ne);
                    w.set(ends(d, e_out)?.1, ne);
                }
            }
            let (hi, lo) = (bg.k[0].max(bg.k[1]), bg.k[0].min(bg.k[1]));
            w.crossings.remove(hi);
            w.crossings.remove(lo);
        }
        MoveKind::R3 => r3(d, m, &mut w)?,
    }
    w.finish(bp)
}

fn saddle(d: &Diagram, m: &Move, w: &mut Work) -> Result<()> {
    arity(m, 2, &[1, 2])?;
    let (a, b) = (m.edges[0], m.edges[1]);
    let ne = &m.new_edges;
    let distinct = ne.len() < 2 || ne[0] != ne[1];
    if !distinct {
        return Err(site("new edges must differ"));
    }
    match (a == b, is_loop(d, a), is_loop(d, b)) {
        (true, true, _) => {
            arity(m, 2, &[2])?;
            w.remove_loop(a);
            w.loops.extend([ne[0], ne[1]]);
        }
        (true, false, _) => {
            arity(m, 2, &[2])?;
            let (t, h) = ends(d, a)?;
            w.set(t, ne[0]);
            w.set(h, ne[0]);
            w.loops.push(ne[1]);
        }
        (false, true, true) => {
            arity(m, 2, &[1])?;
            w.remove_loop(a);
            w.remove_loop(b);
            w.loops.push(ne[0]);
        }
        (false, la, lb) if la || lb => {
            arity(m, 2, &[1])?;
            let (lp, e) = if la { (a, b) } else { (b, a) };
            w.remove_loop(lp);
            let (t, h) = ends(d, e)?;
            w.set(t, ne[0]);
            w.set(h, ne[0]);
        }
        _ => {
            arity(m, 2, &[2])?;
            let (ta, ha) = ends(d, a)?;
            let (tb, hb) = ends(d, b)?;
            w.set(ta, ne[0]);
            w.set(hb, ne[0]);
            w.set(tb, ne[1]);
            w.set(ha, ne[1]);
        }
    }
    Ok(())
}

fn r1(d: &Diagram, m: &Move, w: &mut Work) -> Result<()> {
    let e = m.edges.first().copied().unwrap_or(0);
    let looped = is_loop(d, e);
    arity(m, 1, if looped { &[2] } else { &[3] })?;
    let (e1, e2) = (m.new_edges[0], m.new_edges[1]);
    let e3 = if looped { e1 } else { m.new_edges[2] };
    if e1 == e2 || e2 == e3 || (!looped && e1 == e3) {
        return Err(site("new edges must differ"));
    }
    let sign = if m.kind == MoveKind::R1Pos { Sign::Pos } else { Sign::Neg };
    let over_first = m.over_first.ok_or_else(|| site("r1 needs over_first"))?;
    let edges = match (sign, over_first) {
        (Sign::Neg, false) => [e1, e2, e2, e3],
        (Sign::Pos, false) => [e1, e3, e2, e2],
        (Sign::Neg, true) => [e2, e1, e3, e2],
        (Sign::Pos, true) => [e2, e2, e3, e1],
    };
    if looped {
        w.remove_loop(e);
    } else {
        let (t, h) = ends(d, e)?;
        w.set(t, e1);
        w.set(h, e3);
    }
    w.crossings.push(Crossing::new(edges, sign));
    Ok(())
}

fn r2_intro(d: &Diagram, m: &Move, w: &mut Work) -> Result<()> {
    arity(m, 2, &[6])?;
    let (a, b) = (m.edges[0], m.edges[1]);
    if a == b {
        return Err(site("r2 needs two different edges"));
    }
    let [a1, a2, a3, b1, b2, b3] = m.new_edges[..] else { unreachable!() };
    for (e, x1, x3) in [(a, a1, a3), (b, b1, b3)] {
        if is_loop(d, e) != (x1 == x3) {
            return Err(site(format!("edge {e}: repeat the first new id as the third exactly for a free loop")));
        }
    }
    let mut ids: Vec<EdgeId> = vec![a1, a2, b1, b2];
    if a3 != a1 {
        ids.push(a3);
    }
    if b3 != b1 {
        ids.push(b3);
    }
    let uniq: BTreeSet<EdgeId> = ids.iter().copied().collect();
    if uniq.len() != ids.len() {
        return Err(site("new edges must differ"));
    }
    let side = m.side.ok_or_else(|| site("r2_intro needs side"))?;
    let parallel = m.parallel.ok_or_else(|| site("r2_intro needs parallel"))?;
    let (p, q) = match (side, parallel) {
        (Side::Left, false) => (Crossing::new([b2, a2, b3, a1], Sign::Pos), Crossing::new([b1, a2, b2, a3], Sign::Neg)),
        (Side::Left, true) => (Crossing::new([b1, a2, b2, a1], Sign::Pos), Crossing::new([b2, a2, b3, a3], Sign::Neg)),
        (Side::Right, false) => (Crossing::new([b2, a1, b3, a2], Sign::Neg), Crossing::new([b1, a3, b2, a2], Sign::Pos)),
        (Side::Right, true) => (Crossing::new([b1, a1, b2, a2], Sign::Neg), Crossing::new([b2, a3, b3, a2], Sign::Pos)),
    };
    for (e, x1, x3) in [(a, a1, a3), (b, b1, b3)] {
        if is_loop(d, e) {
            w.remove_loop(e);
        } else {
            let (t, h) = ends(d, e)?;
            w.set(t, x1);
            w.set(h, x3);
        }
    }
    w.crossings.push(p);
    w.crossings.push(q);
    Ok(())
}

/// A strand through the triangle: its two crossings in order, with the
/// slots it uses there, and the edges before, inside and after.
#[derive(Clone, Copy, Debug)]
pub(crate) struct TriStrand {
    pub first: Slot,
    pub second: Slot,
    pub before: EdgeId,
    pub after: EdgeId,
}

pub(crate) fn triangle(d: &Diagram, edges: &[EdgeId]) -> Result<[TriStrand; 3]> {
    if edges.len() != 3 {
        return Err(site("r3 expects three edges"));
    }
    let mut strands = vec![];
    for &e in edges {
        let (t, h) = ends(d, e)?;
        let x = d.crossings();
        strands.push(TriStrand {
            first: t,
            second: h,
            before: x[t.crossing].edges[(t.slot + 2) % 4],
            after: x[h.crossing].edges[(h.slot + 2) % 4],
        });
    }
    let ks: BTreeSet<usize> = strands.iter().flat_map(|s| [s.first.crossing, s.second.crossing]).collect();
    if ks.len() != 3 || strands.iter().any(|s| s.first.crossing == s.second.crossing) {
        return Err(site("edges do not form a triangle"));
    }
    for s in &strands {
        if edges.contains(&s.before) || edges.contains(&s.after) {
            return Err(site("degenerate triangle"));
        }
    }
    let tri: BTreeSet<EdgeId> = edges.iter().copied().collect();
    if !d.faces().iter().any(|f| f.len() == 3 && f.iter().copied().collect::<BTreeSet<_>>() == tri) {
        return Err(site("edges do not bound a triangular face"));
    }
    // one strand over twice and one under twice
    let over = |s: &TriStrand| (s.first.slot % 2 == 1) as usize + (s.second.slot % 2 == 1) as usize;
    let counts: BTreeSet<usize> = strands.iter().map(over).collect();
    if counts != [0, 1, 2].into() {
        return Err(site("triangle has no strand passing over both others"));
    }
    Ok([strands[0], strands[1], strands[2]])
}

fn r3(d: &Diagram, m: &Move, w: &mut Work) -> Result<()> {
    arity(m, 3, &[3])?;
    let tri = triangle(d, &m.edges)?;
    let uniq: BTreeSet<EdgeId> = m.new_edges.iter().copied().collect();
    if uniq.len() != 3 {
        return Err(site("new edges must differ"));
    }
    // per crossing: (under in, under out, over in, over out)
    let mut parts: std::collections::BTreeMap<usize, [EdgeId; 4]> = Default::default();
    for (s, &ne) in tri.iter().zip(&m.new_edges) {
        // the strand now meets `second` first and `first` second
        for (slot, e_in, e_out) in [(s.second, s.before, ne), (s.first, ne, s.after)] {
            let p = parts.entry(slot.crossing).or_insert([0; 4]);
            if slot.slot % 2 == 0 {
                p[0] = e_in;
                p[1] = e_out;
            } else {
                p[2] = e_in;
                p[3] = e_out;
            }
        }
    }
    for (k, [ui, uo, oi, oo]) in parts {
        let sign = d.crossings()[k].sign;
        let edges = match sign {
            Sign::Pos => [ui, oo, uo, oi],
            Sign::Neg => [ui, oi, uo, oo],
        };
        w.crossings[k] = Crossing::new(edges, sign);
    }
    Ok(())
}

/// The move undoing `m`, given the diagram `before` it was applied to.
pub fn inverse_move(before: &Diagram, m: &Move) -> Result<Move> {
    let after = apply_move(before, m)?;
    Ok(match m.kind {
        MoveKind::Birth => Move::death(m.new_edges[0]),
        MoveKind::Death => Move::birth(m.edges[0]),
        MoveKind::Saddle => {
            let (a, b) = (m.edges[0], m.edges[1]);
            let ne = &m.new_edges;
            match (a == b, is_loop(before, a), is_loop(before, b)) {
                // split into two: merge them back
                (true, _, _) => Move::saddle(ne[1], ne[0], &[a]),
                (false, true, true) => Move::saddle(ne[0], ne[0], &[a, b]),
                (false, la, lb) if la || lb => {
                    let (lp, e) = if la { (a, b) } else { (b, a) };
                    Move::saddle(ne[0], ne[0], &[e, lp])
                }
                _ => Move::saddle(ne[0], ne[1], &[a, b]),
            }
        }
        MoveKind::R1Pos | MoveKind::R1Neg => Move::r1_elim(m.new_edges[1], m.edges[0]),
        MoveKind::R1Elim => {
            let k = kink_crossing(before, m.edges[0])?;
            let x = before.crossings()[k];
            let kink = m.edges[0];
            let e1 = (0..4).map(|s| x.edges[s]).find(|&e| e != kink && x.is_incoming(x.edges.iter().position(|&y| y == e).unwrap())).unwrap();
            let e3 = (0..4).map(|s| x.edges[s]).find(|&e| e != kink && e != e1).unwrap_or(e1);
            // the kink's first pass is over when the strand enters on an odd slot
            let entry = x.edges.iter().position(|&y| y == e1).unwrap();
            let mut ne = vec![e1, kink];
            if e3 != e1 {
                ne.push(e3);
            }
            Move::r1(x.sign, m.new_edges[0], &ne, entry % 2 == 1)
        }
        MoveKind::R2Intro => Move::r2_elim(m.new_edges[1], m.new_edges[4], [m.edges[0], m.edges[1]]),
        MoveKind::R2Elim => {
            let bg = bigon(before, &m.edges)?;
            let ne = [bg.a[0], bg.a[1], bg.a[2], bg.b[0], bg.b[1], bg.b[2]];
            let want: BTreeSet<Crossing> = bigon_crossings(before, &bg);
            let mut found = None;
            for side in [Side::Left, Side::Right] {
                for parallel in [false, true] {
                    let cand = Move::r2_intro(m.new_edges[0], m.new_edges[1], ne, side, parallel);
                    if let Ok(d2) = apply_move(&after, &cand) {
                        let n = d2.crossing_count();
                        let got: BTreeSet<Crossing> = d2.crossings()[n - 2..].iter().copied().collect();
                        if got == want {
                            found = Some(cand);
                        }
                    }
                }
            }
            found.ok_or_else(|| site("no r2 variant reproduces the bigon"))?
        }
        MoveKind::R3 => Move::r3([m.new_edges[0], m.new_edges[1], m.new_edges[2]], [m.edges[0], m.edges[1], m.edges[2]]),
    })
}

fn bigon_crossings(d: &Diagram, bg: &Bigon) -> BTreeSet<Crossing> {
    bg.k.iter().map(|&k| d.crossings()[k]).collect()
}
