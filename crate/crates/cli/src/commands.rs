use std::path::{Path, PathBuf};
use std::sync::Arc;

use kh_core::constructions::{build_companion, knot_with_ears, touched_edges, trefoil_ears, CompanionBundle};
use kh_core::diagram::parse_diagram;
use kh_core::khcomplex::{build_complex, homology_z, induced_homology_map, reduced_complex, reduced_map, CheckRecord, HomologyMap, Ring};
use kh_core::linalg::MatrixF2;
use kh_core::movie::{movie_chain_map, Movie};
use kh_core::steenrod::sq1;
use kh_core::verify::{ribbon_suite, shumakovitch_suite, steenrod_diagram_suite, steenrod_suite};
use kh_core::{Diagram, EdgeId, KhError};
use serde_json::{json, Value};

use crate::report::{sha256_hex, CliError, Recorder};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum RingArg {
    F2,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Shumakovitch,
    Ribbon,
    Steenrod,
    All,
}

fn load_diagram(rec: &mut Recorder, path: &Path) -> Result<Diagram, CliError> {
    let text = rec.read_input(path)?;
    Ok(parse_diagram(text.trim())?)
}

fn load_movie(rec: &mut Recorder, path: &Path) -> Result<Movie, CliError> {
    let text = rec.read_input(path)?;
    Movie::from_jsonl(&text).map_err(CliError::Movie)
}

/// `--bp` wins, then a basepoint stored in the file, then the minimal edge
/// on the first component.
fn pick_basepoint(d: &Diagram, flag: Option<EdgeId>) -> Result<EdgeId, CliError> {
    let bp = flag.or(d.basepoint()).or(d.default_basepoint()).ok_or(KhError::MissingBasepoint)?;
    if !d.has_edge(bp) {
        return Err(KhError::InvalidBasepoint(bp).into());
    }
    Ok(bp)
}

/// Basepoint for a movie: the start's own, else the first start edge no
/// move names.
fn movie_basepoint(mv: &Movie, flag: Option<EdgeId>) -> Result<Option<EdgeId>, CliError> {
    if let Some(bp) = flag.or(mv.start().basepoint()) {
        if touched_edges(mv).contains(&bp) {
            return Err(CliError::Movie(KhError::BasepointTouched(bp)));
        }
        if !mv.start().has_edge(bp) {
            return Err(KhError::InvalidBasepoint(bp).into());
        }
        return Ok(Some(bp));
    }
    let touched = touched_edges(mv);
    Ok(mv.start().edges().into_iter().find(|e| !touched.contains(e)))
}

fn matrix_rows(m: &MatrixF2) -> Vec<String> {
    (0..m.rows()).map(|r| (0..m.cols()).map(|c| if m.get(r, c) { '1' } else { '0' }).collect()).collect()
}

fn dims_json(h: &kh_core::khcomplex::BigradedDims) -> Value {
    json!(h.records())
}

fn diagram_summary(d: &Diagram) -> Value {
    json!({
        "pd": d.to_string(),
        "crossings": d.crossing_count(),
        "components": d.components().len(),
        "n_plus": d.n_plus(),
        "n_minus": d.n_minus(),
    })
}

pub fn cmd_kh(rec: &mut Recorder, file: &Path, ring: RingArg, reduced: bool, bp: Option<EdgeId>) -> Result<Value, CliError> {
    let d = load_diagram(rec, file)?;
    let base = if reduced || bp.is_some() { Some(pick_basepoint(&d, bp)?) } else { None };
    let r = match ring {
        RingArg::F2 => Ring::F2,
        RingArg::Z => Ring::Z,
    };
    let full = rec.time("build", || build_complex(&d, r));
    let c = match (reduced, base) {
        (true, Some(b)) => reduced_complex(&full, b)?,
        _ => full,
    };
    rec.checks(None, vec![CheckRecord::from_result("d_squared", c.check_d_squared())]);
    let mut payload = json!({
        "diagram": diagram_summary(&d),
        "ring": match ring { RingArg::F2 => "f2", RingArg::Z => "z" },
        "reduced": reduced,
        "basepoint": base,
        "generators": c.len(),
    });
    match ring {
        RingArg::F2 => {
            let h = rec.time("homology", || c.homology_f2().dims());
            payload["total_dim"] = json!(h.total());
            payload["homology"] = dims_json(&h);
        }
        RingArg::Z => {
            let h = rec.time("homology", || homology_z(&c));
            payload["rank"] = json!(h.0.values().map(|g| g.rank).sum::<usize>());
            payload["two_torsion"] = json!(h.two_torsion());
            payload["homology"] = json!(h.records());
        }
    }
    Ok(payload)
}

fn map_json(h: &HomologyMap) -> Value {
    let blocks: Vec<Value> = h
        .source_dims
        .0
        .keys()
        .map(|&(i, j)| {
            let m = h.block(i, j);
            json!({"i": i, "j": j, "rows": m.rows(), "cols": m.cols(), "rank": m.rank(), "matrix": matrix_rows(&m)})
        })
        .collect();
    json!({
        "shift": h.shift,
        "source_dims": dims_json(&h.source_dims),
        "target_dims": dims_json(&h.target_dims),
        "blocks": blocks,
        "injective": h.is_injective(),
        "surjective": h.is_surjective(),
        "kernel_at": h.injectivity_failure(),
        "cokernel_at": h.surjectivity_failure(),
        "identity": h.is_identity(),
    })
}

pub fn cmd_map(rec: &mut Recorder, file: &Path, reduced: bool, bp: Option<EdgeId>) -> Result<Value, CliError> {
    let mv = load_movie(rec, file)?;
    let mm = rec.time("chain_maps", || movie_chain_map(&mv)).map_err(CliError::Movie)?;
    let mut bad = None;
    for (k, s) in mm.steps.iter().enumerate() {
        if let Err(e) = s.check() {
            let mut r = CheckRecord::from_error("chain_map", &e);
            r.move_index = Some(k);
            bad = Some(r);
            break;
        }
    }
    rec.checks(None, vec![bad.unwrap_or_else(|| CheckRecord::pass("chain_map", format!("{} steps commute with d", mm.steps.len())))]);
    let mut f = mm.total()?;
    let base = if reduced {
        let b = movie_basepoint(&mv, bp)?.ok_or(KhError::MissingBasepoint)?;
        f = reduced_map(&f, b)?;
        Some(b)
    } else {
        None
    };
    let h = rec.time("homology_map", || induced_homology_map(&f))?;
    Ok(json!({
        "start": diagram_summary(mv.start()),
        "end": diagram_summary(mv.end()),
        "moves": mv.len(),
        "ribbon": mv.is_ribbon(),
        "euler_characteristic": mv.euler_char(),
        "reduced": reduced,
        "basepoint": base,
        "map": map_json(&h),
    }))
}

enum Target {
    Diagram(Diagram),
    Movie(Movie, Option<EdgeId>),
}

fn load_target(rec: &mut Recorder, path: &Path, bp: Option<EdgeId>) -> Result<Target, CliError> {
    let movie_path = if path.is_dir() { Some(path.join("movie.jsonl")) } else { None };
    match movie_path {
        Some(p) => {
            let mv = load_movie(rec, &p)?;
            let b = movie_basepoint(&mv, bp)?;
            Ok(Target::Movie(mv, b))
        }
        None if path.extension().is_some_and(|e| e == "jsonl") => {
            let mv = load_movie(rec, path)?;
            let b = movie_basepoint(&mv, bp)?;
            Ok(Target::Movie(mv, b))
        }
        None => Ok(Target::Diagram(load_diagram(rec, path)?)),
    }
}

pub fn cmd_verify(rec: &mut Recorder, suite: Suite, target: &Path, bp: Option<EdgeId>) -> Result<Value, CliError> {
    let t = load_target(rec, target, bp)?;
    let wants = |s: Suite| suite == s || suite == Suite::All;
    let mut ran = vec![];
    match &t {
        Target::Diagram(d) => {
            let b = pick_basepoint(d, bp)?;
            if suite == Suite::Ribbon {
                return Err(CliError::Usage("the ribbon suite needs a movie or bundle".into()));
            }
            if wants(Suite::Shumakovitch) {
                let r = rec.time("shumakovitch", || shumakovitch_suite(d, b));
                rec.checks(Some("shumakovitch"), r);
                ran.push("shumakovitch");
            }
            if wants(Suite::Steenrod) {
                let r = rec.time("steenrod", || steenrod_diagram_suite(d, b));
                rec.checks(Some("steenrod"), r);
                ran.push("steenrod");
            }
            Ok(json!({"target": "diagram", "diagram": diagram_summary(d), "basepoint": b, "suites": ran}))
        }
        Target::Movie(mv, b) => {
            if wants(Suite::Shumakovitch) {
                for (name, d) in [("start", mv.start()), ("end", mv.end())] {
                    let b = pick_basepoint(d, *b)?;
                    let r = rec.time(&format!("shumakovitch.{name}"), || shumakovitch_suite(d, b));
                    rec.checks(Some(&format!("shumakovitch.{name}")), r);
                }
                ran.push("shumakovitch");
            }
            if wants(Suite::Ribbon) {
                let r = rec.time("ribbon", || ribbon_suite(mv, *b));
                rec.checks(Some("ribbon"), r);
                ran.push("ribbon");
            }
            if wants(Suite::Steenrod) {
                let r = rec.time("steenrod", || steenrod_suite(mv));
                rec.checks(Some("steenrod"), r);
                ran.push("steenrod");
            }
            Ok(json!({
                "target": "movie",
                "start": diagram_summary(mv.start()),
                "end": diagram_summary(mv.end()),
                "moves": mv.len(),
                "basepoint": b,
                "suites": ran,
            }))
        }
    }
}

fn bundle_files(b: &CompanionBundle, n: usize) -> Vec<(&'static str, String)> {
    let meta = json!({
        "copies": n,
        "basepoint": b.basepoint,
        "composite_crossings": b.composite.crossing_count(),
        "companion_crossings": b.companion.crossing_count(),
        "moves": b.movie.len(),
        "euler_characteristic": b.movie.euler_char(),
    });
    vec![
        ("composite.pd", format!("{}\n", b.composite)),
        ("companion.pd", format!("{}\n", b.companion)),
        ("movie.jsonl", b.movie.to_jsonl()),
        ("bundle.json", format!("{}\n", serde_json::to_string_pretty(&meta).unwrap())),
    ]
}

pub fn cmd_construct(rec: &mut Recorder, n: usize, knot: Option<&Path>, out: Option<&PathBuf>, sq1_check: bool) -> Result<Value, CliError> {
    if n == 0 {
        return Err(CliError::Kh(KhError::EmptyList));
    }
    let ears = match knot {
        Some(p) => {
            let d = load_diagram(rec, p)?;
            knot_with_ears(&d)?
        }
        None => trefoil_ears(),
    };
    let b = rec.time("construct", || build_companion(&vec![ears; n]))?;
    let files = bundle_files(&b, n);
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        for (name, text) in &files {
            let p = dir.join(name);
            std::fs::write(&p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        }
    }
    rec.checks(
        None,
        vec![if b.movie.end().is_isomorphic(&b.companion) {
            CheckRecord::pass("endpoint", "movie ends at the companion")
        } else {
            CheckRecord::fail("endpoint", None, "movie end differs from the companion")
        }],
    );
    let mut payload = json!({
        "copies": n,
        "composite": diagram_summary(&b.composite),
        "companion": diagram_summary(&b.companion),
        "basepoint": b.basepoint,
        "moves": b.movie.len(),
        "files": files.iter().map(|(name, text)| json!({"name": name, "sha256": sha256_hex(text.as_bytes())})).collect::<Vec<_>>(),
    });
    if out.is_none() {
        payload["movie"] = json!(b.movie.to_jsonl());
    }
    if sq1_check {
        let cz = build_complex(&b.companion, Ring::Z);
        let s = rec.time("sq1", || sq1(&cz, &Arc::new(cz.to_f2())))?;
        payload["sq1_support"] = json!(s.support());
    }
    Ok(payload)
}
