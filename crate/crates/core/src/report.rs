//! Batch solving: manifests in, per-concept score tables out.
//!
//! A manifest is a JSON-lines file, one problem per line:
//!
//! ```json
//! {"id": "closure-001000", "concept": "closure", "odd_index": 3,
//!  "panels": ["closure-001000_p0.pgm", "...", "closure-001000_p5.pgm"]}
//! ```
//!
//! A line may give `"sheet": "path.pgm"` instead of `"panels"`, in which case
//! the image is segmented into the 3×2 grid first. `concept` and `odd_index`
//! (the ground truth) are optional; accuracy is only reported where ground
//! truth exists. Paths are resolved relative to the manifest's directory.
//!
//! Batches run on a thread pool sized by [`RunConfig::parallelism`]; results
//! are collected in manifest order, so report bytes do not depend on the
//! worker count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use crate::config::RunConfig;
use crate::raster::{load_grayscale, segment_grid, GrayRaster, RasterError, SegmentOptions};
use crate::solver::{solve_problem, SolveError, Verdict};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read manifest {path}: {source}")]
    ManifestIo {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest line {line}: {reason}")]
    BadManifest { line: usize, reason: String },
    #[error(transparent)]
    Raster(#[from] RasterError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("cannot build a {0}-thread pool: {1}")]
    ThreadPool(usize, String),
}

/// Where a problem's six panels come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProblemSource {
    Panels(Box<[PathBuf; 6]>),
    Sheet(PathBuf),
}

/// One manifest entry, paths already resolved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub id: String,
    pub concept: Option<String>,
    /// Ground-truth odd panel (0-based), when known.
    pub expected: Option<usize>,
    pub source: ProblemSource,
}

/// Renders one manifest line; the inverse of [`read_manifest`].
pub fn manifest_line(
    id: &str,
    concept: Option<&str>,
    odd_index: Option<usize>,
    panels: &[PathBuf; 6],
) -> String {
    let mut obj = serde_json::Map::new();
    obj.insert("id".into(), id.into());
    if let Some(c) = concept {
        obj.insert("concept".into(), c.into());
    }
    if let Some(odd) = odd_index {
        obj.insert("odd_index".into(), odd.into());
    }
    obj.insert(
        "panels".into(),
        panels
            .iter()
            .map(|p| p.to_string_lossy().into_owned())
            .collect::<Vec<String>>()
            .into(),
    );
    serde_json::Value::Object(obj).to_string()
}

pub fn read_manifest(path: &Path) -> Result<Vec<ProblemSpec>, ReportError> {
    let text = std::fs::read_to_string(path).map_err(|source| ReportError::ManifestIo {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value =
            serde_json::from_str(raw).map_err(|e| ReportError::BadManifest {
                line,
                reason: format!("invalid JSON: {e}"),
            })?;
        let id = value
            .get("id")
            .and_then(|v| v.as_str())
            .map(str::to_owned)
            .unwrap_or_else(|| format!("problem-{line}"));
        let concept = value
            .get("concept")
            .and_then(|v| v.as_str())
            .map(str::to_owned);
        let expected = match value.get("odd_index") {
            None | Some(serde_json::Value::Null) => None,
            Some(v) => {
                let n = v.as_u64().ok_or_else(|| ReportError::BadManifest {
                    line,
                    reason: format!("odd_index must be an integer in 0..6, got {v}"),
                })?;
                if n >= 6 {
                    return Err(ReportError::BadManifest {
                        line,
                        reason: format!("odd_index must be in 0..6, got {n}"),
                    });
                }
                Some(n as usize)
            }
        };
        let source = match (value.get("panels"), value.get("sheet")) {
            (Some(panels), None) => {
                let arr = panels.as_array().ok_or_else(|| ReportError::BadManifest {
                    line,
                    reason: "panels must be an array".into(),
                })?;
                if arr.len() != 6 {
                    return Err(ReportError::BadManifest {
                        line,
                        reason: format!("expected 6 panel paths, got {}", arr.len()),
                    });
                }
                let mut paths = Vec::with_capacity(6);
                for p in arr {
                    let s = p.as_str().ok_or_else(|| ReportError::BadManifest {
                        line,
                        reason: "panel paths must be strings".into(),
                    })?;
                    paths.push(base.join(s));
                }
                ProblemSource::Panels(Box::new(paths.try_into().unwrap()))
            }
            (None, Some(sheet)) => {
                let s = sheet.as_str().ok_or_else(|| ReportError::BadManifest {
                    line,
                    reason: "sheet must be a string path".into(),
                })?;
                ProblemSource::Sheet(base.join(s))
            }
            _ => {
                return Err(ReportError::BadManifest {
                    line,
                    reason: "each line needs either \"panels\" (6 paths) or \"sheet\"".into(),
                })
            }
        };
        specs.push(ProblemSpec {
            id,
            concept,
            expected,
            source,
        });
    }
    Ok(specs)
}

/// Loads a spec's six panels from disk (segmenting a sheet if needed).
pub fn load_problem(spec: &ProblemSpec, config: &RunConfig) -> Result<[GrayRaster; 6], ReportError> {
    match &spec.source {
        ProblemSource::Panels(paths) => {
            let mut panels = Vec::with_capacity(6);
            for p in paths.iter() {
                panels.push(load_grayscale(p)?);
            }
            Ok(panels.try_into().expect("exactly six panels"))
        }
        ProblemSource::Sheet(path) => {
            let sheet = load_grayscale(path)?;
            let options = SegmentOptions {
                threshold: config.binarize_threshold,
                polarity: config.polarity,
                fallback: config.gutter_fallback,
            };
            Ok(segment_grid(&sheet, &options)?)
        }
    }
}

/// One solved manifest entry.
#[derive(Debug, Clone)]
pub struct SolvedEntry {
    pub id: String,
    pub concept: Option<String>,
    pub expected: Option<usize>,
    pub verdict: Verdict,
}

impl SolvedEntry {
    /// `Some(true/false)` when ground truth is known; skips are incorrect.
    pub fn correct(&self) -> Option<bool> {
        self.expected.map(|e| self.verdict.answer() == Some(e))
    }
}

#[derive(Debug, Clone, Default)]
pub struct Tally {
    pub total: usize,
    pub answered: usize,
    pub skipped: usize,
    /// Problems with ground truth.
    pub labeled: usize,
    pub correct: usize,
}

impl Tally {
    fn add(&mut self, entry: &SolvedEntry) {
        self.total += 1;
        if entry.verdict.skipped() {
            self.skipped += 1;
        } else {
            self.answered += 1;
        }
        if entry.expected.is_some() {
            self.labeled += 1;
            if entry.correct() == Some(true) {
                self.correct += 1;
            }
        }
    }

    /// Fraction correct over labeled problems (a skip counts against it);
    /// `None` without ground truth.
    pub fn accuracy(&self) -> Option<f64> {
        (self.labeled > 0).then(|| self.correct as f64 / self.labeled as f64)
    }
}

#[derive(Debug, Clone)]
pub struct BatchReport {
    pub entries: Vec<SolvedEntry>,
}

/// Solves every spec on a pool of `config.parallelism` threads. The result
/// order (and therefore every rendered report) matches the manifest order
/// regardless of thread count.
pub fn run_batch(specs: &[ProblemSpec], config: &RunConfig) -> Result<BatchReport, ReportError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| ReportError::ThreadPool(config.parallelism, e.to_string()))?;
    let entries: Result<Vec<SolvedEntry>, ReportError> = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| {
                let panels = load_problem(spec, config)?;
                let verdict = solve_problem(&panels, &spec.id, config)?;
                Ok(SolvedEntry {
                    id: spec.id.clone(),
                    concept: spec.concept.clone(),
                    expected: spec.expected,
                    verdict,
                })
            })
            .collect()
    });
    Ok(BatchReport { entries: entries? })
}

impl BatchReport {
    /// Per-concept tallies, sorted by concept name; problems without a
    /// concept label are grouped under "(unlabeled)".
    pub fn by_concept(&self) -> BTreeMap<String, Tally> {
        let mut map: BTreeMap<String, Tally> = BTreeMap::new();
        for e in &self.entries {
            let key = e.concept.clone().unwrap_or_else(|| "(unlabeled)".into());
            map.entry(key).or_default().add(e);
        }
        map
    }

    pub fn overall(&self) -> Tally {
        let mut t = Tally::default();
        for e in &self.entries {
            t.add(e);
        }
        t
    }

    /// Full report as one JSON document with stable key order.
    pub fn to_json(&self) -> serde_json::Value {
        let problems: Vec<serde_json::Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = e.verdict.to_json();
                let obj = v.as_object_mut().expect("verdict serializes to an object");
                obj.insert("concept".into(), e.concept.clone().into());
                obj.insert(
                    "expected".into(),
                    e.expected.map(|x| x as u64).into(),
                );
                obj.insert("correct".into(), e.correct().into());
                v
            })
            .collect();
        let concepts: Vec<serde_json::Value> = self
            .by_concept()
            .into_iter()
            .map(|(name, t)| {
                serde_json::json!({
                    "concept": name,
                    "total": t.total,
                    "answered": t.answered,
                    "skipped": t.skipped,
                    "correct": t.correct,
                    "accuracy": t.accuracy(),
                })
            })
            .collect();
        let overall = self.overall();
        serde_json::json!({
            "problems": problems,
            "summary": {
                "concepts": concepts,
                "total": overall.total,
                "answered": overall.answered,
                "skipped": overall.skipped,
                "correct": overall.correct,
                "accuracy": overall.accuracy(),
            }
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("report JSON serializes")
    }

    /// Plain-text score table, one row per concept plus an overall row.
    pub fn render_table(&self) -> String {
        fn acc(t: &Tally) -> String {
            t.accuracy().map_or_else(|| "n/a".into(), |a| format!("{a:.3}"))
        }
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<20} {:>6} {:>9} {:>8} {:>8} {:>9}",
            "concept", "total", "answered", "skipped", "correct", "accuracy"
        );
        for (name, t) in self.by_concept() {
            let _ = writeln!(
                out,
                "{:<20} {:>6} {:>9} {:>8} {:>8} {:>9}",
                name,
                t.total,
                t.answered,
                t.skipped,
                t.correct,
                acc(&t)
            );
        }
        let overall = self.overall();
        let _ = writeln!(
            out,
            "{:<20} {:>6} {:>9} {:>8} {:>8} {:>9}",
            "overall",
            overall.total,
            overall.answered,
            overall.skipped,
            overall.correct,
            acc(&overall)
        );
        out
    }

    /// One CSV row per problem: `id,concept,outcome,panel,expected,correct`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id,concept,outcome,panel,expected,correct\n");
        for e in &self.entries {
            let outcome = if e.verdict.skipped() { "skipped" } else { "answer" };
            let panel = e.verdict.answer().map_or(String::new(), |p| p.to_string());
            let expected = e.expected.map_or(String::new(), |p| p.to_string());
            let correct = e.correct().map_or(String::new(), |c| c.to_string());
            let _ = writeln!(
                out,
                "{},{},{outcome},{panel},{expected},{correct}",
                e.id,
                e.concept.as_deref().unwrap_or("")
            );
        }
        out
    }
}
