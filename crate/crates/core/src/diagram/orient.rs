use std::collections::{BTreeMap, BTreeSet};

use super::{Crossing, EdgeId, Sign};
use crate::error::{KhError, Result};

/// Unoriented crossing: four edges counterclockwise, under-strand on slots 0 and 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RawCrossing(pub [EdgeId; 4]);

impl RawCrossing {
    /// The same crossing seen after rotating the ball by pi about a vertical
    /// axis: mirror image with over and under exchanged.
    pub fn flipped(self) -> RawCrossing {
        let [a, b, c, d] = self.0;
        RawCrossing([d, c, b, a])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Occ {
    Slot(usize, usize),
    End(usize),
}

fn occurrences(raw: &[RawCrossing], ends: &[EdgeId]) -> Result<BTreeMap<EdgeId, Vec<Occ>>> {
    let mut occ: BTreeMap<EdgeId, Vec<Occ>> = BTreeMap::new();
    for (k, x) in raw.iter().enumerate() {
        for s in 0..4 {
            occ.entry(x.0[s]).or_default().push(Occ::Slot(k, s));
        }
    }
    for (k, &e) in ends.iter().enumerate() {
        occ.entry(e).or_default().push(Occ::End(k));
    }
    for (&edge, v) in &occ {
        if v.len() != 2 {
            return Err(KhError::DanglingEdge { edge, count: v.len() });
        }
    }
    Ok(occ)
}

/// One traversed edge: (edge, tail occurrence, head occurrence).
type Step = (EdgeId, Occ, Occ);

fn walk(occ: &BTreeMap<EdgeId, Vec<Occ>>, raw: &[RawCrossing], e0: EdgeId, tail0: Occ) -> Vec<Step> {
    let mut steps = vec![];
    let (mut e, mut tail) = (e0, tail0);
    loop {
        let o = &occ[&e];
        let head = if o[0] == tail { o[1] } else { o[0] };
        steps.push((e, tail, head));
        match head {
            Occ::End(_) => break,
            Occ::Slot(x, s) => {
                let ns = (s + 2) % 4;
                let ne = raw[x].0[ns];
                let nt = Occ::Slot(x, ns);
                if ne == e0 && nt == tail0 {
                    break;
                }
                e = ne;
                tail = nt;
            }
        }
    }
    steps
}

fn reverse(steps: &[Step]) -> Vec<Step> {
    steps.iter().rev().map(|&(e, t, h)| (e, h, t)).collect()
}

/// Orients raw crossing data.
///
/// `reversed` maps the minimal edge id of a component to a flag reversing
/// the default choice. With `strict`, every under-strand must already enter
/// at slot 0; otherwise crossings are rotated as needed.
pub(crate) fn orient(
    raw: &[RawCrossing],
    ends: &[EdgeId],
    reversed: &BTreeMap<EdgeId, bool>,
    strict: bool,
) -> Result<Vec<Crossing>> {
    let occ = occurrences(raw, ends)?;
    let mut incoming: BTreeMap<(usize, usize), bool> = BTreeMap::new();
    let mut seen: BTreeSet<EdgeId> = BTreeSet::new();

    let mut comps: Vec<Vec<Step>> = vec![];
    // arcs first, each started from its lowest-indexed end
    for (k, &e) in ends.iter().enumerate() {
        if seen.contains(&e) {
            continue;
        }
        let steps = walk(&occ, raw, e, Occ::End(k));
        seen.extend(steps.iter().map(|s| s.0));
        comps.push(steps);
    }
    for (&e, o) in &occ {
        if seen.contains(&e) {
            continue;
        }
        let steps = walk(&occ, raw, e, o[0]);
        seen.extend(steps.iter().map(|s| s.0));
        comps.push(steps);
    }

    for mut steps in comps {
        let min_edge = steps.iter().map(|s| s.0).min().unwrap();
        // under passes as (crossing, entering slot) in current direction
        let unders: Vec<(usize, usize, EdgeId)> = steps
            .iter()
            .filter_map(|&(e, _, h)| match h {
                Occ::Slot(x, s) if s % 2 == 0 => Some((x, s, e)),
                _ => None,
            })
            .collect();
        let mut flip = if unders.is_empty() {
            let first = steps
                .iter()
                .flat_map(|&(_, t, h)| [(t, false), (h, true)])
                .filter(|(o, _)| matches!(o, Occ::Slot(..)))
                .min();
            matches!(first, Some((_, false)))
        } else if strict {
            let natural = unders.iter().filter(|u| u.1 == 0).count();
            if natural != 0 && natural != unders.len() {
                let bad = unders.iter().find(|u| u.1 == 2).unwrap();
                return Err(KhError::OrientationConflict(bad.2));
            }
            natural == 0
        } else {
            let first = unders.iter().min_by_key(|u| u.0).unwrap();
            first.1 == 2
        };
        if let Some(&r) = reversed.get(&min_edge) {
            if r {
                if strict && !unders.is_empty() {
                    return Err(KhError::OrientationConflict(min_edge));
                }
                flip = !flip;
            }
        }
        if flip {
            steps = reverse(&steps);
        }
        for (_, t, h) in steps {
            if let Occ::Slot(x, s) = t {
                incoming.insert((x, s), false);
            }
            if let Occ::Slot(x, s) = h {
                incoming.insert((x, s), true);
            }
        }
    }

    raw.iter()
        .enumerate()
        .map(|(k, x)| {
            let mut edges = x.0;
            let mut inc = [0, 1, 2, 3].map(|s| incoming[&(k, s)]);
            if !inc[0] {
                edges = [edges[2], edges[3], edges[0], edges[1]];
                inc = [inc[2], inc[3], inc[0], inc[1]];
            }
            if inc[1] == inc[3] || !inc[0] || inc[2] {
                return Err(KhError::OrientationConflict(edges[1]));
            }
            let sign = if inc[3] { Sign::Pos } else { Sign::Neg };
            Ok(Crossing { edges, sign })
        })
        .collect()
}

pub(crate) fn orient_closed(raw: &[RawCrossing], reversed: &BTreeMap<EdgeId, bool>, strict: bool) -> Result<Vec<Crossing>> {
    orient(raw, &[], reversed, strict)
}

/// Minimal edge of every closed component of raw data (loops excluded).
pub(crate) fn component_min_edges(raw: &[RawCrossing]) -> Result<Vec<EdgeId>> {
    let occ = occurrences(raw, &[])?;
    let mut seen = BTreeSet::new();
    let mut mins = vec![];
    for (&e, o) in &occ {
        if seen.contains(&e) {
            continue;
        }
        let steps = walk(&occ, raw, e, o[0]);
        seen.extend(steps.iter().map(|s| s.0));
        mins.push(steps.iter().map(|s| s.0).min().unwrap());
    }
    Ok(mins)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strict_trefoil_is_negative() {
        let raw = [RawCrossing([1, 4, 2, 5]), RawCrossing([3, 6, 4, 1]), RawCrossing([5, 2, 6, 3])];
        let x = orient_closed(&raw, &BTreeMap::new(), true).unwrap();
        assert!(x.iter().all(|c| c.sign == Sign::Neg));
        assert_eq!(x[0].edges, [1, 4, 2, 5]);
    }

    #[test]
    fn strict_rejects_conflicting_unders() {
        // edge 1 would have to enter both crossings
        let raw = [RawCrossing([1, 3, 2, 4]), RawCrossing([1, 4, 2, 3])];
        assert!(matches!(orient_closed(&raw, &BTreeMap::new(), true), Err(KhError::OrientationConflict(_))));
        // loose mode rotates instead
        assert!(orient_closed(&raw, &BTreeMap::new(), false).is_ok());
    }

    #[test]
    fn kink_self_loop() {
        let raw = [RawCrossing([1, 2, 2, 1])];
        let x = orient_closed(&raw, &BTreeMap::new(), true).unwrap();
        assert_eq!(x.len(), 1);
    }
}
