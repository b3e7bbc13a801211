use rayon::prelude::*;

use crate::diagram::{Crossing, Diagram, EdgeId};
use crate::error::{KhError, Result};

/// A complete resolution: one smoothing per crossing and the resulting circles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Resolution {
    pub vertex: Vec<bool>,
    /// edges of each circle, sorted; circles ordered by minimal edge
    pub circles: Vec<Vec<EdgeId>>,
}

impl Resolution {
    pub fn circle_of(&self, e: EdgeId) -> Option<usize> {
        self.circles.iter().position(|c| c.binary_search(&e).is_ok())
    }
}

fn find(p: &mut [u32], x: u32) -> u32 {
    let mut r = x;
    while p[r as usize] != r {
        r = p[r as usize];
    }
    let mut y = x;
    while p[y as usize] != r {
        let n = p[y as usize];
        p[y as usize] = r;
        y = n;
    }
    r
}

/// Circle index per edge id at one vertex (`NONE` for unused ids).
fn circle_table(crossings: &[Crossing], loops: &[EdgeId], max_edge: EdgeId, vertex: impl Fn(usize) -> bool) -> (Vec<u16>, usize) {
    let size = max_edge as usize + 1;
    let mut parent: Vec<u32> = (0..size as u32).collect();
    let mut used = vec![false; size];
    for (k, x) in crossings.iter().enumerate() {
        for (a, b) in x.smoothing(vertex(k)) {
            used[a as usize] = true;
            used[b as usize] = true;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb) as usize] = ra.min(rb);
            }
        }
    }
    for &l in loops {
        used[l as usize] = true;
    }
    // roots are minimal edges, so scanning ids upward numbers circles by minimal edge
    let mut table = vec![NONE; size];
    let mut count = 0usize;
    for e in 0..size {
        if !used[e] {
            continue;
        }
        let r = find(&mut parent, e as u32) as usize;
        if r == e {
            table[e] = count as u16;
            count += 1;
        } else {
            table[e] = table[r];
        }
    }
    (table, count)
}

pub(crate) const NONE: u16 = u16::MAX;

pub fn resolve(d: &Diagram, vertex: &[bool]) -> Result<Resolution> {
    if vertex.len() != d.crossing_count() {
        return Err(KhError::LengthMismatch { expected: d.crossing_count(), got: vertex.len() });
    }
    let (table, count) = circle_table(d.crossings(), d.loops(), d.max_edge(), |k| vertex[k]);
    let mut circles = vec![vec![]; count];
    for (e, &c) in table.iter().enumerate() {
        if c != NONE {
            circles[c as usize].push(e as EdgeId);
        }
    }
    Ok(Resolution { vertex: vertex.to_vec(), circles })
}

/// Circle data for every vertex of the cube. Vertex `v` is a bit mask with
/// crossing 0 as the most significant of `n` bits.
#[derive(Clone, Debug)]
pub struct Cube {
    diagram: Diagram,
    tables: Vec<Vec<u16>>,
    counts: Vec<u8>,
}

impl Cube {
    pub fn new(d: &Diagram) -> Cube {
        let n = d.crossing_count();
        assert!(n < 40, "cube too large");
        let max = d.max_edge();
        let data: Vec<(Vec<u16>, usize)> = (0..1u64 << n)
            .into_par_iter()
            .map(|v| circle_table(d.crossings(), d.loops(), max, |k| (v >> (n - 1 - k)) & 1 == 1))
            .collect();
        let counts = data.iter().map(|x| x.1 as u8).collect();
        let tables = data.into_iter().map(|x| x.0).collect();
        Cube { diagram: d.clone(), tables, counts }
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn n(&self) -> usize {
        self.diagram.crossing_count()
    }

    pub fn vertex_count(&self) -> usize {
        self.counts.len()
    }

    pub fn circles(&self, v: u64) -> usize {
        self.counts[v as usize] as usize
    }

    pub fn circle_of(&self, v: u64, e: EdgeId) -> usize {
        let c = self.tables[v as usize][e as usize];
        debug_assert_ne!(c, NONE);
        c as usize
    }

    /// Mask of crossing `k` inside a vertex.
    pub fn crossing_bit(&self, k: usize) -> u64 {
        1 << (self.n() - 1 - k)
    }

    /// Mask of circle `c` inside a labeling at vertex `v`.
    pub fn label_bit(&self, v: u64, c: usize) -> u64 {
        1 << (self.circles(v) - 1 - c)
    }

    pub fn vertex_bits(&self, v: u64) -> Vec<bool> {
        (0..self.n()).map(|k| v & self.crossing_bit(k) != 0).collect()
    }

    /// Representative (minimal) edge of each circle at `v`.
    pub fn circle_reps(&self, v: u64) -> Vec<EdgeId> {
        let t = &self.tables[v as usize];
        let mut reps = vec![0; self.circles(v)];
        let mut seen = vec![false; reps.len()];
        for (e, &c) in t.iter().enumerate() {
            if c != NONE && !seen[c as usize] {
                seen[c as usize] = true;
                reps[c as usize] = e as EdgeId;
            }
        }
        reps
    }
}
