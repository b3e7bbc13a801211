use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use kh_core::khcomplex::CheckRecord;
use kh_core::KhError;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Serialize)]
pub struct ErrorInfo {
    pub kind: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub move_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bidegree: Option<(i32, i32)>,
}

/// Everything a command prints. `timings_ms` is the only field that may
/// change between runs on identical input.
#[derive(Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub checks: Vec<CheckRecord>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorInfo>,
    pub payload: Value,
    pub timings_ms: BTreeMap<String, f64>,
}

pub struct Recorder {
    pub report: RunReport,
    start: Instant,
}

impl Recorder {
    pub fn new(command: Vec<String>) -> Self {
        Recorder {
            report: RunReport {
                schema_version: SCHEMA_VERSION,
                command,
                inputs: vec![],
                checks: vec![],
                passed: true,
                error: None,
                payload: Value::Null,
                timings_ms: BTreeMap::new(),
            },
            start: Instant::now(),
        }
    }

    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.report.inputs.push(InputDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        String::from_utf8(bytes).map_err(|_| CliError::Io(format!("{}: not UTF-8", path.display())))
    }

    /// Runs `f` and stores its wall time under `name`.
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.report.timings_ms.insert(name.into(), t.elapsed().as_secs_f64() * 1e3);
        out
    }

    pub fn checks(&mut self, prefix: Option<&str>, records: Vec<CheckRecord>) {
        for mut r in records {
            if let Some(p) = prefix {
                r.name = format!("{p}.{}", r.name);
            }
            self.report.checks.push(r);
        }
    }

    pub fn finish(mut self, outcome: Result<Value, CliError>) -> (RunReport, i32) {
        let code = match outcome {
            Ok(payload) => {
                self.report.payload = payload;
                if self.report.checks.iter().all(|c| c.passed) {
                    0
                } else {
                    1
                }
            }
            Err(e) => {
                let code = e.exit_code();
                self.report.error = Some(e.info());
                code
            }
        };
        self.report.passed = code == 0;
        self.report.timings_ms.insert("total".into(), self.start.elapsed().as_secs_f64() * 1e3);
        (self.report, code)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    /// input parsed but is not a valid diagram or request
    Usage(String),
    Kh(KhError),
    /// failure while loading or applying a movie
    Movie(KhError),
}

impl From<KhError> for CliError {
    fn from(e: KhError) -> Self {
        CliError::Kh(e)
    }
}

fn is_parse(e: &KhError) -> bool {
    matches!(e, KhError::Parse(_) | KhError::MalformedCrossing(_))
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 2,
            CliError::Usage(_) => 3,
            CliError::Kh(e) if is_parse(e.root()) => 2,
            CliError::Kh(KhError::CheckFailed { .. }) => 1,
            CliError::Kh(_) => 3,
            CliError::Movie(e) if is_parse(e) => 2,
            CliError::Movie(_) => 4,
        }
    }

    fn info(&self) -> ErrorInfo {
        let (kind, e) = match self {
            CliError::Io(m) => return ErrorInfo { kind: "io", message: m.clone(), move_index: None, bidegree: None },
            CliError::Usage(m) => return ErrorInfo { kind: "validation", message: m.clone(), move_index: None, bidegree: None },
            CliError::Kh(e) if is_parse(e.root()) => ("parse", e),
            CliError::Kh(e) => ("validation", e),
            CliError::Movie(e) if is_parse(e) => ("parse", e),
            CliError::Movie(e) => ("movie", e),
        };
        let move_index = match e {
            KhError::AtMove { index, .. } => Some(*index),
            _ => None,
        };
        let bidegree = match e.root() {
            KhError::CheckFailed { i, j, .. } | KhError::LiftInconsistency { i, j } => Some((*i, *j)),
            _ => None,
        };
        ErrorInfo { kind, message: e.to_string(), move_index, bidegree }
    }
}
