//! Planar diagrams of links and 4-ended tangles.
//!
//! Crossings follow the usual PD convention: `X[a,b,c,d]` lists the four
//! incident edges counterclockwise, starting at the incoming under-strand, so
//! the under-strand runs `a -> c` and the over-strand joins `b` and `d`.
//! Crossing-free components are carried as loop edge ids.

mod orient;
mod pd;
mod planar;
mod tangle;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{KhError, Result};

pub use orient::RawCrossing;
pub use pd::{parse_diagram, parse_tangle};
pub use tangle::{closure, partial_sum, tangle_sum, Closure, End, Tangle};

pub type EdgeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// An oriented crossing. Slot 0 is the incoming under-strand, slot 2 the
/// outgoing one. For a positive crossing the over-strand enters at slot 3 and
/// leaves at slot 1; for a negative one it enters at slot 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Crossing {
    pub edges: [EdgeId; 4],
    pub sign: Sign,
}

impl Crossing {
    pub fn new(edges: [EdgeId; 4], sign: Sign) -> Self {
        Crossing { edges, sign }
    }

    /// Whether the strand through `slot` enters the crossing there.
    pub fn is_incoming(&self, slot: usize) -> bool {
        match slot {
            0 => true,
            2 => false,
            1 => self.sign == Sign::Neg,
            3 => self.sign == Sign::Pos,
            _ => unreachable!("slot out of range"),
        }
    }

    /// Pairs of slots joined by the 0- or 1-smoothing.
    pub fn smoothing(&self, bit: bool) -> [(EdgeId, EdgeId); 2] {
        let [a, b, c, d] = self.edges;
        if bit {
            [(a, d), (b, c)]
        } else {
            [(a, b), (c, d)]
        }
    }
}

/// Where one end of an edge sits: a crossing slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub crossing: usize,
    pub slot: usize,
}

/// A link diagram: oriented crossings, crossing-free loops, optional basepoint.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Diagram {
    crossings: Vec<Crossing>,
    loops: Vec<EdgeId>,
    basepoint: Option<EdgeId>,
}

/// One closed component, as the cyclic sequence of edges it traverses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub edges: Vec<EdgeId>,
    pub is_loop: bool,
}

impl Diagram {
    /// Validates and wraps oriented crossing data.
    pub fn new(crossings: Vec<Crossing>, loops: Vec<EdgeId>, basepoint: Option<EdgeId>) -> Result<Self> {
        let d = Diagram { crossings, loops, basepoint };
        d.validate()?;
        Ok(d)
    }

    pub fn unknot() -> Self {
        Diagram { crossings: vec![], loops: vec![1], basepoint: None }
    }

    fn validate(&self) -> Result<()> {
        let mut count: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for x in &self.crossings {
            for &e in &x.edges {
                *count.entry(e).or_default() += 1;
            }
        }
        for (&edge, &c) in &count {
            if c != 2 {
                return Err(KhError::DanglingEdge { edge, count: c });
            }
        }
        let mut seen = BTreeSet::new();
        for &l in &self.loops {
            if count.contains_key(&l) || !seen.insert(l) {
                return Err(KhError::DanglingEdge { edge: l, count: 3 });
            }
        }
        // every edge must leave one crossing and enter another
        let mut tails: BTreeMap<EdgeId, usize> = BTreeMap::new();
        for x in &self.crossings {
            for s in 0..4 {
                if !x.is_incoming(s) {
                    *tails.entry(x.edges[s]).or_default() += 1;
                }
            }
        }
        for &e in count.keys() {
            if tails.get(&e).copied().unwrap_or(0) != 1 {
                return Err(KhError::OrientationConflict(e));
            }
        }
        if let Some(bp) = self.basepoint {
            if !self.has_edge(bp) {
                return Err(KhError::InvalidBasepoint(bp));
            }
        }
        Ok(())
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn loops(&self) -> &[EdgeId] {
        &self.loops
    }

    pub fn basepoint(&self) -> Option<EdgeId> {
        self.basepoint
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn with_basepoint(mut self, bp: Option<EdgeId>) -> Result<Self> {
        if let Some(e) = bp {
            if !self.has_edge(e) {
                return Err(KhError::InvalidBasepoint(e));
            }
        }
        self.basepoint = bp;
        Ok(self)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.loops.contains(&e) || self.crossings.iter().any(|x| x.edges.contains(&e))
    }

    pub fn n_plus(&self) -> usize {
        self.crossings.iter().filter(|x| x.sign == Sign::Pos).count()
    }

    pub fn n_minus(&self) -> usize {
        self.crossings.len() - self.n_plus()
    }

    /// All edge ids, sorted.
    pub fn edges(&self) -> Vec<EdgeId> {
        let mut v: Vec<EdgeId> = self.crossings.iter().flat_map(|x| x.edges).chain(self.loops.iter().copied()).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn max_edge(&self) -> EdgeId {
        self.edges().last().copied().unwrap_or(0)
    }

    /// The slot an edge leaves from (tail) and the slot it enters (head).
    /// `None` for loops.
    pub fn edge_ends(&self, e: EdgeId) -> Option<(Slot, Slot)> {
        let mut tail = None;
        let mut head = None;
        for (k, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                if x.edges[s] == e {
                    let sl = Slot { crossing: k, slot: s };
                    if x.is_incoming(s) {
                        head = Some(sl);
                    } else {
                        tail = Some(sl);
                    }
                }
            }
        }
        Some((tail?, head?))
    }

    /// Closed components in the order of their minimal edge id; edges listed
    /// along the orientation starting from that minimal edge.
    pub fn components(&self) -> Vec<Component> {
        let mut tail_of: BTreeMap<EdgeId, Slot> = BTreeMap::new();
        for (k, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                if !x.is_incoming(s) {
                    tail_of.insert(x.edges[s], Slot { crossing: k, slot: s });
                }
            }
        }
        let mut head_of: BTreeMap<EdgeId, Slot> = BTreeMap::new();
        for (k, x) in self.crossings.iter().enumerate() {
            for s in 0..4 {
                if x.is_incoming(s) {
                    head_of.insert(x.edges[s], Slot { crossing: k, slot: s });
                }
            }
        }
        let mut seen = BTreeSet::new();
        let mut comps = Vec::new();
        for &e0 in tail_of.keys() {
            if seen.contains(&e0) {
                continue;
            }
            let mut edges = vec![];
            let mut e = e0;
            loop {
                seen.insert(e);
                edges.push(e);
                let h = head_of[&e];
                let next = self.crossings[h.crossing].edges[(h.slot + 2) % 4];
                if next == e0 {
                    break;
                }
                e = next;
            }
            comps.push(Component { edges, is_loop: false });
        }
        for &l in &self.loops {
            comps.push(Component { edges: vec![l], is_loop: true });
        }
        comps.sort_by_key(|c| c.edges.iter().copied().min());
        comps
    }

    /// Index of the component containing edge `e`.
    pub fn component_of(&self, e: EdgeId) -> Option<usize> {
        self.components().iter().position(|c| c.edges.contains(&e))
    }

    /// Default basepoint: the minimal edge id on the first component.
    pub fn default_basepoint(&self) -> Option<EdgeId> {
        self.components().first().and_then(|c| c.edges.iter().copied().min())
    }

    /// The unoriented crossing data (slot 0/2 under) with loops.
    pub fn raw(&self) -> (Vec<RawCrossing>, Vec<EdgeId>) {
        (self.crossings.iter().map(|x| RawCrossing(x.edges)).collect(), self.loops.clone())
    }

    /// Builds a diagram from unoriented crossings, choosing orientations.
    pub fn from_raw(raw: &[RawCrossing], loops: Vec<EdgeId>, basepoint: Option<EdgeId>) -> Result<Self> {
        let crossings = orient::orient_closed(raw, &BTreeMap::new(), false)?;
        Diagram::new(crossings, loops, basepoint)
    }

    /// Reverses the orientation of the component containing `e`.
    pub fn reverse_component(&self, e: EdgeId) -> Result<Self> {
        let comps = self.components();
        let Some(idx) = comps.iter().position(|c| c.edges.contains(&e)) else {
            return Err(KhError::InvalidSite(format!("edge {e} not in diagram")));
        };
        let set: BTreeSet<EdgeId> = comps[idx].edges.iter().copied().collect();
        let crossings = self
            .crossings
            .iter()
            .map(|x| {
                let under = set.contains(&x.edges[0]);
                let over = set.contains(&x.edges[1]);
                let mut edges = x.edges;
                if under {
                    edges = [edges[2], edges[3], edges[0], edges[1]];
                }
                // reversing exactly one of the two strands flips the sign
                let sign = if under != over { x.sign.flip() } else { x.sign };
                Crossing { edges, sign }
            })
            .collect();
        Diagram::new(crossings, self.loops.clone(), self.basepoint)
    }

    /// Boundary edges of each face of the diagram's crossing graph.
    pub fn faces(&self) -> Vec<Vec<EdgeId>> {
        planar::faces(&self.crossings)
    }

    pub fn is_planar(&self) -> bool {
        planar::is_planar_closed(&self.crossings, &self.loops)
    }

    /// Isomorphism of oriented diagrams up to edge relabelling, crossing order
    /// and reversal of components that preserves all crossing signs.
    pub fn is_isomorphic(&self, other: &Diagram) -> bool {
        planar::isomorphic(self, other)
    }

    /// Renumbers edges by first appearance: crossings in order, then loops.
    pub fn normalized(&self) -> Diagram {
        let mut map = BTreeMap::new();
        let mut next = 1;
        let mut id = |e: EdgeId, map: &mut BTreeMap<EdgeId, EdgeId>| {
            *map.entry(e).or_insert_with(|| {
                let v = next;
                next += 1;
                v
            })
        };
        let crossings = self
            .crossings
            .iter()
            .map(|x| Crossing { edges: x.edges.map(|e| id(e, &mut map)), sign: x.sign })
            .collect();
        let loops = self.loops.iter().map(|&e| id(e, &mut map)).collect();
        Diagram { crossings, loops, basepoint: self.basepoint.map(|b| map[&b]) }
    }

    pub(crate) fn from_parts_unchecked(crossings: Vec<Crossing>, loops: Vec<EdgeId>, basepoint: Option<EdgeId>) -> Self {
        Diagram { crossings, loops, basepoint }
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pd::serialize_diagram(self))
    }
}

impl std::str::FromStr for Diagram {
    type Err = KhError;
    fn from_str(s: &str) -> Result<Self> {
        parse_diagram(s)
    }
}
