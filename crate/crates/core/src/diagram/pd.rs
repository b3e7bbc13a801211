//! Text format: `;`-separated tokens. `X[a,b,c,d]` per crossing, `U` or
//! `U[e]` per crossing-free loop, `bp=e` for the basepoint, `or=c:+` /
//! `or=c:-` to orient component `c` (1-based, by minimal edge id), and for
//! tangles `ends[nw,ne,sw,se]`.

use std::collections::BTreeMap;

use super::orient::{self, RawCrossing};
use super::tangle::Tangle;
use super::{Diagram, EdgeId};
use crate::error::{KhError, Result};

#[derive(Default)]
struct Tokens {
    raw: Vec<RawCrossing>,
    loops: Vec<Option<EdgeId>>,
    basepoint: Option<EdgeId>,
    orientation: Vec<(usize, bool)>,
    ends: Option<[EdgeId; 4]>,
}

fn parse_id(s: &str) -> Result<EdgeId> {
    match s.trim().parse::<EdgeId>() {
        Ok(0) | Err(_) => Err(KhError::Parse(format!("`{}` is not a positive edge id", s.trim()))),
        Ok(v) => Ok(v),
    }
}

fn bracketed<'a>(tok: &'a str, head: &str) -> Option<&'a str> {
    let rest = tok.strip_prefix(head)?.trim_start();
    let inner = rest.strip_prefix('[')?.strip_suffix(']')?;
    Some(inner)
}

fn id_list(inner: &str) -> Result<Vec<EdgeId>> {
    inner.split(',').map(parse_id).collect()
}

fn tokenize(text: &str) -> Result<Tokens> {
    let mut t = Tokens::default();
    for tok in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some(inner) = bracketed(tok, "X") {
            let ids = id_list(inner).map_err(|_| KhError::MalformedCrossing(tok.to_string()))?;
            let edges: [EdgeId; 4] = ids.try_into().map_err(|_| KhError::MalformedCrossing(tok.to_string()))?;
            t.raw.push(RawCrossing(edges));
        } else if tok == "U" {
            t.loops.push(None);
        } else if let Some(inner) = bracketed(tok, "U") {
            t.loops.push(Some(parse_id(inner)?));
        } else if let Some(inner) = bracketed(tok, "ends") {
            let ids = id_list(inner)?;
            let ends: [EdgeId; 4] =
                ids.try_into().map_err(|_| KhError::Parse(format!("`{tok}` needs 4 end edges")))?;
            t.ends = Some(ends);
        } else if let Some(v) = tok.strip_prefix("bp=") {
            t.basepoint = Some(parse_id(v)?);
        } else if let Some(v) = tok.strip_prefix("or=") {
            let (c, dir) = v.split_once(':').ok_or_else(|| KhError::Parse(format!("bad orientation `{tok}`")))?;
            let c: usize = c.trim().parse().map_err(|_| KhError::Parse(format!("bad component `{c}`")))?;
            let rev = match dir.trim() {
                "+" => false,
                "-" => true,
                other => return Err(KhError::Parse(format!("bad direction `{other}`"))),
            };
            if c == 0 {
                return Err(KhError::Parse("components are numbered from 1".into()));
            }
            t.orientation.push((c, rev));
        } else {
            return Err(KhError::Parse(format!("unknown token `{tok}`")));
        }
    }
    Ok(t)
}

/// Parses a closed diagram.
pub fn parse_diagram(text: &str) -> Result<Diagram> {
    let t = tokenize(text)?;
    if t.ends.is_some() {
        return Err(KhError::Parse("`ends[...]` is only valid for tangles".into()));
    }
    let mut max = t.raw.iter().flat_map(|x| x.0).chain(t.loops.iter().flatten().copied()).max().unwrap_or(0);
    let loops: Vec<EdgeId> = t
        .loops
        .iter()
        .map(|l| {
            l.unwrap_or_else(|| {
                max += 1;
                max
            })
        })
        .collect();
    let mut mins = orient::component_min_edges(&t.raw)?;
    mins.extend(loops.iter().copied());
    mins.sort_unstable();
    let mut reversed = BTreeMap::new();
    for &(c, rev) in &t.orientation {
        let m = *mins.get(c - 1).ok_or_else(|| KhError::Parse(format!("no component {c}")))?;
        reversed.insert(m, rev);
    }
    let crossings = orient::orient_closed(&t.raw, &reversed, true)?;
    Diagram::new(crossings, loops, t.basepoint)
}

/// Parses a tangle; requires `ends[nw,ne,sw,se]`.
pub fn parse_tangle(text: &str) -> Result<Tangle> {
    let t = tokenize(text)?;
    let ends = t.ends.ok_or_else(|| KhError::Parse("tangle needs `ends[nw,ne,sw,se]`".into()))?;
    if !t.loops.is_empty() {
        return Err(KhError::InvalidTangle("tangles have no closed components".into()));
    }
    if !t.orientation.is_empty() || t.basepoint.is_some() {
        return Err(KhError::Parse("orientation and basepoint tokens are not supported on tangles".into()));
    }
    Tangle::from_raw(&t.raw, ends, true)
}

pub(crate) fn serialize_diagram(d: &Diagram) -> String {
    let mut toks: Vec<String> = d
        .crossings()
        .iter()
        .map(|x| format!("X[{},{},{},{}]", x.edges[0], x.edges[1], x.edges[2], x.edges[3]))
        .collect();
    toks.extend(d.loops().iter().map(|l| format!("U[{l}]")));
    // components whose orientation is not the default one
    let (raw, _) = d.raw();
    if let Ok(default) = orient::orient_closed(&raw, &BTreeMap::new(), true) {
        let dd = Diagram::from_parts_unchecked(default, d.loops().to_vec(), None);
        for (idx, comp) in d.components().iter().enumerate() {
            if comp.is_loop {
                continue;
            }
            let e = comp.edges[0];
            if d.edge_ends(e).map(|p| p.0) != dd.edge_ends(e).map(|p| p.0) {
                toks.push(format!("or={}:-", idx + 1));
            }
        }
    }
    if let Some(bp) = d.basepoint() {
        toks.push(format!("bp={bp}"));
    }
    toks.join(";")
}

pub(crate) fn serialize_tangle(t: &Tangle) -> String {
    let mut toks: Vec<String> = t
        .crossings()
        .iter()
        .map(|x| format!("X[{},{},{},{}]", x.edges[0], x.edges[1], x.edges[2], x.edges[3]))
        .collect();
    let e = t.ends();
    toks.push(format!("ends[{},{},{},{}]", e[0], e[1], e[2], e[3]));
    toks.join(";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Sign;

    #[test]
    fn unknot_token() {
        let d = parse_diagram("U").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.loops().len(), 1);
        assert_eq!(parse_diagram(&d.to_string()).unwrap(), d);
    }

    #[test]
    fn trefoil() {
        let d = parse_diagram("X[1,4,2,5];X[3,6,4,1];X[5,2,6,3]").unwrap();
        assert_eq!(d.crossing_count(), 3);
        assert_eq!(d.edges().len(), 6);
        assert_eq!(d.components().len(), 1);
    }

    #[test]
    fn arity_violation() {
        assert!(matches!(parse_diagram("X[1,2,3]"), Err(KhError::MalformedCrossing(_))));
        assert!(matches!(parse_diagram("X[1,2,3,4,5]"), Err(KhError::MalformedCrossing(_))));
    }

    #[test]
    fn dangling_edge() {
        assert!(matches!(parse_diagram("X[1,2,3,4]"), Err(KhError::DanglingEdge { .. })));
    }

    #[test]
    fn bad_tokens() {
        assert!(matches!(parse_diagram("Y[1]"), Err(KhError::Parse(_))));
        assert!(matches!(parse_diagram("X[0,1,1,0]"), Err(KhError::MalformedCrossing(_))));
        assert!(matches!(parse_diagram("U;bp=7"), Err(KhError::InvalidBasepoint(7))));
    }

    #[test]
    fn orientation_override_on_free_component() {
        // component {3,4} passes only over: its direction is free
        let d = parse_diagram("X[1,4,2,3];X[2,3,1,4]").unwrap();
        let comps = d.components();
        assert_eq!(comps.len(), 2);
        let flipped = parse_diagram("X[1,4,2,3];X[2,3,1,4];or=2:-").unwrap();
        assert_ne!(d, flipped);
        assert_eq!(parse_diagram(&flipped.to_string()).unwrap(), flipped);
        assert!(matches!(
            parse_diagram("X[1,4,2,3];X[2,3,1,4];or=1:-"),
            Err(KhError::OrientationConflict(_))
        ));
        let s: Vec<Sign> = flipped.crossings().iter().map(|x| x.sign).collect();
        let s0: Vec<Sign> = d.crossings().iter().map(|x| x.sign).collect();
        assert_eq!(s, s0.iter().map(|x| x.flip()).collect::<Vec<_>>());
    }
}
