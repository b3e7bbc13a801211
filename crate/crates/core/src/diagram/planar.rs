//! Rotation-system checks: planarity via Euler characteristic and
//! isomorphism of diagrams up to relabelling.

use std::collections::{BTreeMap, BTreeSet};

use super::{Crossing, Diagram, EdgeId};

/// Faces of a 4-regular rotation system minus twice its connected pieces.
/// Zero exactly when every piece embeds in the sphere.
fn euler_defect(vertices: &[[EdgeId; 4]]) -> i64 {
    if vertices.is_empty() {
        return 0;
    }
    let mut occ: BTreeMap<EdgeId, Vec<(usize, usize)>> = BTreeMap::new();
    for (v, slots) in vertices.iter().enumerate() {
        for (s, &e) in slots.iter().enumerate() {
            occ.entry(e).or_default().push((v, s));
        }
    }
    let other = |v: usize, s: usize| -> (usize, usize) {
        let o = &occ[&vertices[v][s]];
        if o[0] == (v, s) {
            o[1]
        } else {
            o[0]
        }
    };
    let mut seen = BTreeSet::new();
    let mut faces = 0i64;
    for v in 0..vertices.len() {
        for s in 0..4 {
            if seen.contains(&(v, s)) {
                continue;
            }
            faces += 1;
            let mut d = (v, s);
            while seen.insert(d) {
                let (w, t) = other(d.0, d.1);
                d = (w, (t + 1) % 4);
            }
        }
    }
    // connected pieces
    let mut parent: Vec<usize> = (0..vertices.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] != x {
            let r = find(p, p[x]);
            p[x] = r;
        }
        p[x]
    }
    for o in occ.values() {
        let (a, b) = (find(&mut parent, o[0].0), find(&mut parent, o[1].0));
        parent[a] = b;
    }
    let pieces = (0..vertices.len()).filter(|&x| find(&mut parent, x) == x).count() as i64;
    let v = vertices.len() as i64;
    let e = 2 * v;
    v - e + faces - 2 * pieces
}

/// Edge sequences bounding the faces of each connected piece.
pub(crate) fn faces(crossings: &[Crossing]) -> Vec<Vec<EdgeId>> {
    let verts: Vec<[EdgeId; 4]> = crossings.iter().map(|x| x.edges).collect();
    let mut occ: BTreeMap<EdgeId, Vec<(usize, usize)>> = BTreeMap::new();
    for (v, slots) in verts.iter().enumerate() {
        for (s, &e) in slots.iter().enumerate() {
            occ.entry(e).or_default().push((v, s));
        }
    }
    let mut seen = BTreeSet::new();
    let mut out = vec![];
    for v in 0..verts.len() {
        for s in 0..4 {
            if seen.contains(&(v, s)) {
                continue;
            }
            let mut face = vec![];
            let mut d = (v, s);
            while seen.insert(d) {
                let e = verts[d.0][d.1];
                face.push(e);
                let o = &occ[&e];
                let (w, t) = if o[0] == d { o[1] } else { o[0] };
                d = (w, (t + 1) % 4);
            }
            out.push(face);
        }
    }
    out
}

pub(crate) fn is_planar_closed(crossings: &[Crossing], _loops: &[EdgeId]) -> bool {
    let verts: Vec<[EdgeId; 4]> = crossings.iter().map(|x| x.edges).collect();
    euler_defect(&verts) == 0
}

/// The boundary becomes one extra vertex whose rotation lists NW, NE, SE, SW.
pub(crate) fn is_planar_tangle(crossings: &[Crossing], ends: [EdgeId; 4]) -> bool {
    let mut verts: Vec<[EdgeId; 4]> = crossings.iter().map(|x| x.edges).collect();
    verts.push([ends[0], ends[1], ends[3], ends[2]]);
    euler_defect(&verts) == 0
}

type Occ = BTreeMap<EdgeId, [(usize, usize); 2]>;

fn occurrences(d: &Diagram) -> Occ {
    let mut occ: BTreeMap<EdgeId, Vec<(usize, usize)>> = BTreeMap::new();
    for (k, x) in d.crossings().iter().enumerate() {
        for s in 0..4 {
            occ.entry(x.edges[s]).or_default().push((k, s));
        }
    }
    occ.into_iter().map(|(e, v)| (e, [v[0], v[1]])).collect()
}

fn other_end(occ: &Occ, e: EdgeId, at: (usize, usize)) -> (usize, usize) {
    let o = occ[&e];
    if o[0] == at {
        o[1]
    } else {
        o[0]
    }
}

/// Extends a partial crossing map `(b crossing, rotation)` from a seed.
fn propagate(a: &Diagram, b: &Diagram, oa: &Occ, ob: &Occ, map: &mut [Option<(usize, usize)>], used: &mut [bool], seed: usize) -> bool {
    let mut stack = vec![seed];
    while let Some(x) = stack.pop() {
        let (y, r) = map[x].unwrap();
        for s in 0..4 {
            let e = a.crossings()[x].edges[s];
            let f = b.crossings()[y].edges[(s + r) % 4];
            let (x2, s2) = other_end(oa, e, (x, s));
            let (y2, t2) = other_end(ob, f, (y, (s + r) % 4));
            let r2 = (t2 + 4 - s2) % 4;
            if r2 % 2 != 0 || a.crossings()[x2].sign != b.crossings()[y2].sign {
                return false;
            }
            match map[x2] {
                Some(m) => {
                    if m != (y2, r2) {
                        return false;
                    }
                }
                None => {
                    if used[y2] {
                        return false;
                    }
                    map[x2] = Some((y2, r2));
                    used[y2] = true;
                    stack.push(x2);
                }
            }
        }
    }
    true
}

fn search(a: &Diagram, b: &Diagram, oa: &Occ, ob: &Occ, map: Vec<Option<(usize, usize)>>, used: Vec<bool>) -> bool {
    let Some(seed) = map.iter().position(|m| m.is_none()) else {
        return true;
    };
    for y in 0..b.crossing_count() {
        if used[y] || a.crossings()[seed].sign != b.crossings()[y].sign {
            continue;
        }
        for r in [0, 2] {
            let mut m = map.clone();
            let mut u = used.clone();
            m[seed] = Some((y, r));
            u[y] = true;
            if propagate(a, b, oa, ob, &mut m, &mut u, seed) && search(a, b, oa, ob, m, u) {
                return true;
            }
        }
    }
    false
}

pub(crate) fn isomorphic(a: &Diagram, b: &Diagram) -> bool {
    if a.crossing_count() != b.crossing_count()
        || a.loops().len() != b.loops().len()
        || a.n_plus() != b.n_plus()
    {
        return false;
    }
    let (oa, ob) = (occurrences(a), occurrences(b));
    let n = a.crossing_count();
    search(a, b, &oa, &ob, vec![None; n], vec![false; n])
}

#[cfg(test)]
mod tests {
    use crate::diagram::{parse_diagram, Tangle};

    #[test]
    fn knot_tables_are_planar() {
        for pd in ["X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]", "X[4,2,5,1];X[8,6,1,5];X[6,3,7,4];X[2,7,3,8]", "X[1,1,2,2]"] {
            assert!(parse_diagram(pd).unwrap().is_planar(), "{pd}");
        }
    }

    #[test]
    fn virtual_trefoil_is_not_planar() {
        // two-crossing virtual knot: crossings joined in a non-planar way
        let d = parse_diagram("X[1,3,2,4];X[2,4,1,3]").unwrap();
        assert!(!d.is_planar());
    }

    #[test]
    fn boundary_order_matters() {
        let good: Tangle = "X[1,2,3,4];ends[4,3,1,2]".parse().unwrap();
        assert!(good.is_planar());
        let bad: Tangle = "X[1,2,3,4];ends[4,3,2,1]".parse().unwrap();
        assert!(!bad.is_planar());
    }

    #[test]
    fn mirror_is_not_isomorphic() {
        let t = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        let m = parse_diagram("X[1,5,2,4];X[3,1,4,6];X[5,3,6,2]").unwrap();
        assert!(m.is_planar());
        assert!(!t.is_isomorphic(&m));
        assert!(t.is_isomorphic(&t.normalized()));
    }
}
