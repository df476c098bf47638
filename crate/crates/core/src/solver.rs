//! Outlier scoring and voting: from a feature matrix to an answer.
//!
//! Each feature row is z-scored across the six panels (population σ, so a
//! lone deviant in an otherwise constant row scores exactly √5 ≈ 2.236).
//! Rows whose strongest |z| reaches the threshold select that panel; every
//! selected feature casts one vote, and the panel with the most votes is the
//! answer. No feature over threshold means the problem is skipped — the
//! solver would rather abstain than guess.
//!
//! Vote ties are re-tallied with weight 1/complexity_rank (simpler features
//! are preferred); a persisting tie goes to the panel backed by the single
//! simplest feature.

use thiserror::Error;

use crate::config::{Center, RunConfig};
use crate::features::{compute_feature_matrix, FeatureMatrix, PanelData};
use crate::raster::{binarize, crop_caption, default_caption_region, GrayRaster};

#[derive(Debug, Error, PartialEq)]
pub enum SolveError {
    #[error("feature {0} produced a non-finite value")]
    NonFiniteInput(String),
}

/// Population z-scores of a six-value row.
///
/// Rows with σ < 1e-12 are reported as all zeros (a constant row carries no
/// outlier information). With [`Center::Mean`] the scores have mean 0,
/// variance 1, and |z| ≤ √5; [`Center::Median`] recenters on the median
/// (σ is still computed about the mean) and may exceed that bound.
pub fn zscore_row(values: &[f64; 6], center: Center) -> Result<[f64; 6], SolveError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(SolveError::NonFiniteInput("<row>".into()));
    }
    let mean = values.iter().sum::<f64>() / 6.0;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 6.0;
    let sigma = var.sqrt();
    if sigma < 1e-12 {
        return Ok([0.0; 6]);
    }
    let c = match center {
        Center::Mean => mean,
        Center::Median => {
            let mut sorted = *values;
            sorted.sort_by(f64::total_cmp);
            (sorted[2] + sorted[3]) / 2.0
        }
    };
    let mut out = [0.0; 6];
    for (i, v) in values.iter().enumerate() {
        out[i] = (v - c) / sigma;
    }
    Ok(out)
}

/// A feature that found a sufficiently strong outlier panel.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub feature_id: &'static str,
    pub complexity_rank: u32,
    /// Panel the feature votes for (0-based, row-major).
    pub panel: usize,
    /// |z| of that panel in this feature's row.
    pub z: f64,
}

/// Z-scores every row and keeps the features whose strongest panel reaches
/// the threshold. Each feature selects only its argmax-|z| panel (ties go to
/// the lowest index).
pub fn select_features(
    matrix: &FeatureMatrix,
    config: &RunConfig,
) -> Result<Vec<Selection>, SolveError> {
    let mut selections = Vec::new();
    for row in &matrix.rows {
        let z = zscore_row(&row.values, config.center)
            .map_err(|_| SolveError::NonFiniteInput(row.id.to_string()))?;
        let mut best = 0usize;
        for i in 1..6 {
            if z[i].abs() > z[best].abs() {
                best = i;
            }
        }
        if z[best].abs() >= config.z_threshold {
            selections.push(Selection {
                feature_id: row.id,
                complexity_rank: row.complexity_rank,
                panel: best,
                z: z[best].abs(),
            });
        }
    }
    Ok(selections)
}

/// Final decision for one problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// 0-based index of the odd panel.
    Answer(usize),
    /// No feature found a strong enough outlier.
    Skipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub problem_id: String,
    pub outcome: Outcome,
    /// Vote tally per panel.
    pub votes: [u32; 6],
    pub selections: Vec<Selection>,
    pub tie_break_used: bool,
    pub warnings: Vec<String>,
    pub explanation: String,
}

impl Verdict {
    pub fn skipped(&self) -> bool {
        self.outcome == Outcome::Skipped
    }

    pub fn answer(&self) -> Option<usize> {
        match self.outcome {
            Outcome::Answer(i) => Some(i),
            Outcome::Skipped => None,
        }
    }

    /// Serializes with a stable schema: `{problem_id, outcome, panel, votes,
    /// features, skipped, warnings}`. Panel indices are 0-based here (the
    /// human-readable rendering is 1-based).
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "problem_id": self.problem_id,
            "outcome": match self.outcome {
                Outcome::Answer(_) => "answer",
                Outcome::Skipped => "skipped",
            },
            "panel": self.answer(),
            "votes": self.votes,
            "features": self.selections.iter().map(|s| {
                serde_json::json!({
                    "id": s.feature_id,
                    "panel": s.panel,
                    "z": s.z,
                })
            }).collect::<Vec<_>>(),
            "skipped": self.skipped(),
            "warnings": self.warnings,
        })
    }

    /// One-line human rendering, panels numbered 1..6 row-major.
    pub fn render_text(&self) -> String {
        match self.outcome {
            Outcome::Answer(p) => {
                let mut s = format!("panel {}: {}", p + 1, self.explanation);
                if self.tie_break_used {
                    s.push_str(" (tie broken by feature simplicity)");
                }
                s
            }
            Outcome::Skipped => self.explanation.clone(),
        }
    }

    /// One-line TSV rendering for batch runs: id, outcome, 0-based panel (or
    /// -1), vote tally, selected features.
    pub fn render_tsv(&self) -> String {
        let panel = self.answer().map_or(-1i64, |p| p as i64);
        let votes: Vec<String> = self.votes.iter().map(u32::to_string).collect();
        let feats: Vec<String> = self
            .selections
            .iter()
            .map(|s| format!("{}:{}:{:.4}", s.feature_id, s.panel, s.z))
            .collect();
        format!(
            "{}\t{}\t{}\t{}\t{}",
            self.problem_id,
            if self.skipped() { "skipped" } else { "answer" },
            panel,
            votes.join(","),
            feats.join(";")
        )
    }
}

/// Tallies selections into an outcome. See the module docs for the tie
/// rules; `Answer(i)` always has a maximal vote count at `i`.
pub fn vote(selections: &[Selection], config: &RunConfig) -> (Outcome, [u32; 6], bool, String) {
    let mut votes = [0u32; 6];
    for s in selections {
        votes[s.panel] += 1;
    }
    if selections.is_empty() {
        let explanation = format!(
            "skipped: no feature exceeded the z threshold {}",
            config.z_threshold
        );
        return (Outcome::Skipped, votes, false, explanation);
    }

    let max_votes = *votes.iter().max().expect("six panels");
    let candidates: Vec<usize> = (0..6).filter(|&i| votes[i] == max_votes).collect();

    let (winner, tie_break_used) = if candidates.len() == 1 {
        (candidates[0], false)
    } else {
        // Re-tally over the tied panels only, weighting each feature by the
        // reciprocal of its complexity rank.
        let mut weights = [0.0f64; 6];
        for s in selections {
            if candidates.contains(&s.panel) {
                weights[s.panel] += 1.0 / f64::from(s.complexity_rank);
            }
        }
        let best_weight = candidates
            .iter()
            .map(|&i| weights[i])
            .fold(f64::NEG_INFINITY, f64::max);
        let weighted: Vec<usize> = candidates
            .iter()
            .copied()
            .filter(|&i| weights[i] == best_weight)
            .collect();
        if weighted.len() == 1 {
            (weighted[0], true)
        } else {
            // Still tied: the single simplest (lowest-rank) feature backing
            // any remaining panel decides. Ranks are unique, so this is
            // deterministic.
            let simplest = selections
                .iter()
                .filter(|s| weighted.contains(&s.panel))
                .min_by_key(|s| s.complexity_rank)
                .expect("tied panels have at least one backing selection");
            (simplest.panel, true)
        }
    };

    let parts: Vec<String> = selections
        .iter()
        .map(|s| format!("{} flagged panel {} (|z|={:.4})", s.feature_id, s.panel + 1, s.z))
        .collect();
    (Outcome::Answer(winner), votes, tie_break_used, parts.join("; "))
}

/// Applies selection and voting to a ready feature matrix.
pub fn decide(matrix: &FeatureMatrix, config: &RunConfig) -> Result<Verdict, SolveError> {
    let selections = select_features(matrix, config)?;
    let (outcome, votes, tie_break_used, explanation) = vote(&selections, config);
    Ok(Verdict {
        problem_id: String::new(),
        outcome,
        votes,
        selections,
        tie_break_used,
        warnings: matrix.warnings.clone(),
        explanation,
    })
}

/// Full pipeline for six grayscale panels (row-major): binarize, lift to
/// clouds, evaluate the feature bank, and vote.
pub fn solve_problem(
    panels: &[GrayRaster; 6],
    problem_id: &str,
    config: &RunConfig,
) -> Result<Verdict, SolveError> {
    let mut prepared = Vec::with_capacity(6);
    for (i, panel) in panels.iter().enumerate() {
        let panel = if config.crop_caption && i == 0 {
            crop_caption(panel, default_caption_region(panel), config.polarity)
                .expect("default caption region always fits")
        } else {
            panel.clone()
        };
        let binary = binarize(&panel, config.binarize_threshold, config.polarity);
        prepared.push(PanelData::prepare(binary, config));
    }
    let prepared: [PanelData; 6] = prepared.try_into().expect("exactly six panels");
    let matrix = compute_feature_matrix(&prepared, config);
    let mut verdict = decide(&matrix, config)?;
    verdict.problem_id = problem_id.to_string();
    Ok(verdict)
}

/// Like [`solve_problem`] but also returns the feature matrix (for the
/// explain command and diagnostics).
pub fn solve_problem_explained(
    panels: &[GrayRaster; 6],
    problem_id: &str,
    config: &RunConfig,
) -> Result<(Verdict, FeatureMatrix, Vec<PanelData>), SolveError> {
    let mut prepared = Vec::with_capacity(6);
    for (i, panel) in panels.iter().enumerate() {
        let panel = if config.crop_caption && i == 0 {
            crop_caption(panel, default_caption_region(panel), config.polarity)
                .expect("default caption region always fits")
        } else {
            panel.clone()
        };
        let binary = binarize(&panel, config.binarize_threshold, config.polarity);
        prepared.push(PanelData::prepare(binary, config));
    }
    let arr: [PanelData; 6] = prepared.clone().try_into().expect("exactly six panels");
    let matrix = compute_feature_matrix(&arr, config);
    let mut verdict = decide(&matrix, config)?;
    verdict.problem_id = problem_id.to_string();
    Ok((verdict, matrix, prepared))
}
