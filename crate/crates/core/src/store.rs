//! Append-only JSONL store of computed results, and the consistency report
//! comparing stored exact values with closed-form predictions.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::bounds::{formula_predictions, Prediction};
use crate::constructions::Claim;
use crate::error::Result;
use crate::exact::{ExactResult, ExactStatus};
use crate::verifier::VerifyOutcome;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Environment variable that overrides any `--store` path.
pub const STORE_ENV: &str = "RBL_STORE";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RecordKey {
    pub n: usize,
    pub s: usize,
    pub t: usize,
    pub q: usize,
    pub mode: String,
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl RecordKey {
    pub fn new(n: usize, s: usize, t: usize, q: usize, mode: impl Into<String>, seed: Option<u64>) -> Self {
        RecordKey {
            n,
            s,
            t,
            q,
            mode: mode.into(),
            seed,
            tool_version: TOOL_VERSION.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "data", rename_all = "lowercase")]
pub enum Payload {
    Exact(ExactResult),
    Verification(VerifyOutcome),
    Construction(Claim),
    /// Any other frozen value, e.g. an oracle output.
    Derived(serde_json::Value),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub key: RecordKey,
    pub payload: Payload,
    /// Seconds since the Unix epoch.
    pub timestamp: u64,
}

impl ResultRecord {
    pub fn now(key: RecordKey, payload: Payload) -> Self {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResultRecord {
            key,
            payload,
            timestamp,
        }
    }
}

/// `RBL_STORE` if set and non-empty, else the given path.
pub fn resolve_store_path(flag: Option<PathBuf>) -> Option<PathBuf> {
    match std::env::var_os(STORE_ENV) {
        Some(v) if !v.is_empty() => Some(PathBuf::from(v)),
        _ => flag,
    }
}

#[derive(Clone, Debug, Default)]
pub struct Loaded {
    pub records: Vec<ResultRecord>,
    /// One message per skipped line.
    pub warnings: Vec<String>,
}

impl Loaded {
    /// Latest record per key, by position in the file.
    pub fn latest(&self) -> BTreeMap<RecordKey, ResultRecord> {
        let mut out = BTreeMap::new();
        for r in &self.records {
            out.insert(r.key.clone(), r.clone());
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct Store {
    path: PathBuf,
}

impl Store {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Store { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, record: &ResultRecord) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(&self.path)?;
        f.write_all(line.as_bytes())?;
        Ok(())
    }

    /// Reads every record. A missing file is an empty store; unparsable
    /// lines are skipped and reported.
    pub fn load(&self) -> Result<Loaded> {
        let f = match File::open(&self.path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Loaded::default()),
            Err(e) => return Err(e.into()),
        };
        let mut loaded = Loaded::default();
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str::<ResultRecord>(&line) {
                Ok(r) => loaded.records.push(r),
                Err(e) => loaded
                    .warnings
                    .push(format!("line {}: skipped corrupt record: {e}", i + 1)),
            }
        }
        Ok(loaded)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Mismatch,
    Agree,
    Inconclusive,
    NoFormula,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionCheck {
    #[serde(flatten)]
    pub prediction: Prediction,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub key: RecordKey,
    pub status: ExactStatus,
    pub value: Option<usize>,
    pub lo: usize,
    pub hi: usize,
    pub predictions: Vec<PredictionCheck>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub warnings: Vec<String>,
}

fn row_for(key: &RecordKey, res: &ExactResult) -> ReportRow {
    let preds = formula_predictions(key.n, key.s, key.t, key.q).unwrap_or_default();
    let (lo, hi) = (res.lo as u64, res.hi as u64);
    let exact = res.status == ExactStatus::Exact;
    let checks: Vec<PredictionCheck> = preds
        .into_iter()
        .map(|p| {
            // An exact value must sit inside the predicted range; a bracket
            // only contradicts it when the two ranges are disjoint.
            let agrees = if exact {
                p.lo <= lo && lo <= p.hi
            } else {
                lo <= p.hi && p.lo <= hi
            };
            PredictionCheck { prediction: p, agrees }
        })
        .collect();
    let verdict = if checks.iter().any(|c| !c.agrees) {
        Verdict::Mismatch
    } else if !exact {
        Verdict::Inconclusive
    } else if checks.is_empty() {
        Verdict::NoFormula
    } else {
        Verdict::Agree
    };
    ReportRow {
        key: key.clone(),
        status: res.status,
        value: res.value,
        lo: res.lo,
        hi: res.hi,
        predictions: checks,
        verdict,
    }
}

/// One row per key holding an exact-search result (latest record wins),
/// mismatches first.
pub fn report(loaded: &Loaded) -> Report {
    let mut rows: Vec<ReportRow> = loaded
        .latest()
        .iter()
        .filter_map(|(k, r)| match &r.payload {
            Payload::Exact(res) => Some(row_for(k, res)),
            _ => None,
        })
        .collect();
    rows.sort_by(|a, b| a.verdict.cmp(&b.verdict).then_with(|| a.key.cmp(&b.key)));
    Report {
        rows,
        warnings: loaded.warnings.clone(),
    }
}
