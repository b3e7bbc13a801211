use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::orient::{self, RawCrossing};
use super::{planar, pd, Crossing, Diagram, EdgeId};
use crate::error::{KhError, Result};

/// Boundary points of a 4-ended tangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    NW = 0,
    NE = 1,
    SW = 2,
    SE = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// joins NW with NE and SW with SE
    Numerator,
    /// joins NW with SW and NE with SE
    Denominator,
}

/// A 2-strand tangle in a ball. `ends` holds the edge ids leaving the ball at
/// NW, NE, SW, SE; a crossing-free strand uses one edge id for both of its ends.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tangle {
    crossings: Vec<Crossing>,
    ends: [EdgeId; 4],
}

impl Tangle {
    pub(crate) fn from_raw(raw: &[RawCrossing], ends: [EdgeId; 4], strict: bool) -> Result<Tangle> {
        let crossings = orient::orient(raw, &ends, &BTreeMap::new(), strict)?;
        let t = Tangle { crossings, ends };
        t.check_no_closed_components()?;
        Ok(t)
    }

    fn check_no_closed_components(&self) -> Result<()> {
        let mut all: BTreeSet<EdgeId> = self.crossings.iter().flat_map(|x| x.edges).collect();
        all.extend(self.ends);
        let mut reached = BTreeSet::new();
        for start in self.ends {
            let mut e = start;
            let mut from: Option<(usize, usize)> = None;
            loop {
                reached.insert(e);
                // find the occurrence of e other than the one we came from
                let next = self.crossings.iter().enumerate().find_map(|(k, x)| {
                    (0..4).find(|&s| x.edges[s] == e && Some((k, s)) != from).map(|s| (k, s))
                });
                match next {
                    None => break,
                    Some((k, s)) => {
                        let ns = (s + 2) % 4;
                        from = Some((k, ns));
                        e = self.crossings[k].edges[ns];
                    }
                }
            }
        }
        if reached.len() != all.len() {
            return Err(KhError::InvalidTangle("tangle has a closed component".into()));
        }
        Ok(())
    }

    /// Two crossing-free strands, NW to SW and NE to SE.
    pub fn trivial() -> Tangle {
        Tangle { crossings: vec![], ends: [1, 2, 1, 2] }
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn ends(&self) -> [EdgeId; 4] {
        self.ends
    }

    pub fn end(&self, which: End) -> EdgeId {
        self.ends[which as usize]
    }

    pub fn max_edge(&self) -> EdgeId {
        self.crossings.iter().flat_map(|x| x.edges).chain(self.ends).max().unwrap_or(0)
    }

    fn raw(&self) -> Vec<RawCrossing> {
        self.crossings.iter().map(|x| RawCrossing(x.edges)).collect()
    }

    /// Number of crossings each strand passes through, strands listed from
    /// the NW end and then the other unvisited end.
    pub fn strand_crossings(&self) -> Vec<usize> {
        let mut out = vec![];
        let mut used = BTreeSet::new();
        for start in 0..4 {
            if used.contains(&start) {
                continue;
            }
            used.insert(start);
            let mut e = self.ends[start];
            let mut from: Option<(usize, usize)> = None;
            let mut count = 0;
            loop {
                let next = self.crossings.iter().enumerate().find_map(|(k, x)| {
                    (0..4).find(|&s| x.edges[s] == e && Some((k, s)) != from).map(|s| (k, s))
                });
                match next {
                    None => break,
                    Some((k, s)) => {
                        count += 1;
                        let ns = (s + 2) % 4;
                        from = Some((k, ns));
                        e = self.crossings[k].edges[ns];
                    }
                }
            }
            if let Some(other) = (0..4).find(|&k| k != start && self.ends[k] == e && !used.contains(&k)) {
                used.insert(other);
            }
            out.push(count);
        }
        out
    }

    /// Planarity of the tangle with its boundary circle.
    pub fn is_planar(&self) -> bool {
        planar::is_planar_tangle(&self.crossings, self.ends)
    }

    /// Shifts every edge id by `by`.
    fn shifted(&self, by: EdgeId) -> (Vec<RawCrossing>, [EdgeId; 4]) {
        (self.raw().iter().map(|x| RawCrossing(x.0.map(|e| e + by))).collect(), self.ends.map(|e| e + by))
    }
}

impl fmt::Display for Tangle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&pd::serialize_tangle(self))
    }
}

impl std::str::FromStr for Tangle {
    type Err = KhError;
    fn from_str(s: &str) -> Result<Self> {
        pd::parse_tangle(s)
    }
}

/// Identifies edge ids pairwise; representatives are minimal ids.
struct Glue {
    parent: BTreeMap<EdgeId, EdgeId>,
}

impl Glue {
    fn new() -> Self {
        Glue { parent: BTreeMap::new() }
    }

    fn find(&mut self, e: EdgeId) -> EdgeId {
        let p = *self.parent.get(&e).unwrap_or(&e);
        if p == e {
            return e;
        }
        let r = self.find(p);
        self.parent.insert(e, r);
        r
    }

    fn join(&mut self, a: EdgeId, b: EdgeId) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }

    fn apply(&mut self, raw: &[RawCrossing]) -> Vec<RawCrossing> {
        raw.iter().map(|x| RawCrossing(x.0.map(|e| self.find(e)))).collect()
    }
}

/// Side-by-side sum: t1's NE end joins t2's NW end, t1's SE end joins t2's SW end.
/// Edge ids of `t2` are shifted by the maximal id of `t1`.
pub fn partial_sum(t1: &Tangle, t2: &Tangle) -> Result<Tangle> {
    let shift = t1.max_edge();
    let (raw2, ends2) = t2.shifted(shift);
    let mut raw = t1.raw();
    raw.extend(raw2);
    let mut g = Glue::new();
    g.join(t1.ends[End::NE as usize], ends2[End::NW as usize]);
    g.join(t1.ends[End::SE as usize], ends2[End::SW as usize]);
    let raw = g.apply(&raw);
    let ends = [
        g.find(t1.ends[End::NW as usize]),
        g.find(ends2[End::NE as usize]),
        g.find(t1.ends[End::SW as usize]),
        g.find(ends2[End::SE as usize]),
    ];
    Tangle::from_raw(&raw, ends, false)
}

fn close(raw: Vec<RawCrossing>, g: &mut Glue, all_edges: &BTreeSet<EdgeId>) -> Result<Diagram> {
    let raw = g.apply(&raw);
    let used: BTreeSet<EdgeId> = raw.iter().flat_map(|x| x.0).collect();
    let mut loops: Vec<EdgeId> = all_edges.iter().map(|&e| g.find(e)).filter(|e| !used.contains(e)).collect();
    loops.sort_unstable();
    loops.dedup();
    Diagram::from_raw(&raw, loops, None)
}

/// Closes the tangle into a link diagram.
pub fn closure(t: &Tangle, kind: Closure) -> Result<Diagram> {
    let mut g = Glue::new();
    let e = t.ends;
    match kind {
        Closure::Numerator => {
            g.join(e[End::NW as usize], e[End::NE as usize]);
            g.join(e[End::SW as usize], e[End::SE as usize]);
        }
        Closure::Denominator => {
            g.join(e[End::NW as usize], e[End::SW as usize]);
            g.join(e[End::NE as usize], e[End::SE as usize]);
        }
    }
    let mut all: BTreeSet<EdgeId> = t.crossings.iter().flat_map(|x| x.edges).collect();
    all.extend(e);
    close(t.raw(), &mut g, &all)
}

/// Closed sum: each end of `t1` joins the equally named end of `t2`. The
/// second tangle is turned over (rotated by pi about the vertical axis) so
/// that the gluing is planar.
pub fn tangle_sum(t1: &Tangle, t2: &Tangle) -> Result<Diagram> {
    let shift = t1.max_edge();
    let (raw2, ends2) = t2.shifted(shift);
    let mut raw = t1.raw();
    raw.extend(raw2.into_iter().map(RawCrossing::flipped));
    let mut g = Glue::new();
    for (a, b) in t1.ends.into_iter().zip(ends2) {
        g.join(a, b);
    }
    let mut all: BTreeSet<EdgeId> = raw.iter().flat_map(|x| x.0).collect();
    all.extend(t1.ends);
    all.extend(ends2);
    close(raw, &mut g, &all)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clasp_like() -> Tangle {
        // two crossings, the NW-SW strand over the NE-SE strand twice
        "X[2,6,3,5];X[3,7,4,5];ends[6,2,7,4]".parse().unwrap()
    }

    #[test]
    fn trivial_tangle_closures() {
        let t = Tangle::trivial();
        let den = closure(&t, Closure::Denominator).unwrap();
        assert_eq!(den.components().len(), 2);
        assert_eq!(den.crossing_count(), 0);
        let num = closure(&t, Closure::Numerator).unwrap();
        assert_eq!(num.components().len(), 1);
    }

    #[test]
    fn trivial_plus_trivial() {
        let t = Tangle::trivial();
        let p = partial_sum(&t, &t).unwrap();
        assert_eq!(p.crossing_count(), 0);
        let s = tangle_sum(&t, &t).unwrap();
        assert_eq!(s.components().len(), 2);
        assert_eq!(s.crossing_count(), 0);
    }

    #[test]
    fn vertical_partial_sum_closes_a_loop() {
        let c = clasp_like();
        assert!(matches!(partial_sum(&c, &c), Err(KhError::InvalidTangle(_))));
    }

    #[test]
    fn rejects_closed_component() {
        let r = "X[1,5,2,6];X[2,6,3,5];ends[1,7,3,7]".parse::<Tangle>();
        assert!(matches!(r, Err(KhError::InvalidTangle(_))));
    }

    #[test]
    fn crossing_additivity() {
        let c = clasp_like();
        assert!(c.is_planar());
        // quarter turn of the clasp, strands NW-NE and SW-SE
        let h: Tangle = "X[2,6,3,5];X[3,7,4,5];ends[7,6,4,2]".parse().unwrap();
        assert!(h.is_planar());
        let p = partial_sum(&h, &h).unwrap();
        assert_eq!(p.crossing_count(), 4);
        assert!(p.is_planar());
        let s = tangle_sum(&Tangle::trivial(), &c).unwrap();
        assert_eq!(s.crossing_count(), 2);
        assert!(s.is_planar());
    }
}
