//! The Gestalt feature bank and the feature × panel matrix.
//!
//! Each feature is a cheap scalar summary of one panel, tagged with the stage
//! of the pipeline it reads from:
//!
//! * raw cloud — pre-normalization, so pose-sensitive quantities (like the
//!   signed orientation of the pixel mass) survive;
//! * normalized cloud — pose-invariant shape statistics;
//! * raster — topological counts straight off the bitmap.
//!
//! Features never abort a solve: per-panel degeneracies (an empty panel, a
//! single-pixel cloud) degrade to a value of 0 plus a warning in the matrix.
//!
//! Complexity ranks order features from "perceptually primitive" (1) upward;
//! the solver prefers lower ranks when votes tie. Ranks can be overridden per
//! feature via [`RunConfig::complexity_overrides`].

use std::collections::{BTreeMap, HashSet};

use thiserror::Error;

use crate::config::{round_places, RunConfig};
use crate::pointset::{normalize, principal_frame, to_points, CloudError, PointCloud};
use crate::raster::BinaryRaster;
use crate::topology::Regions;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error(transparent)]
    Cloud(#[from] CloudError),
    #[error("orientation requires at least 2 points")]
    TooFewPoints,
    #[error("unknown feature {0:?} in rank override (known features: {1})")]
    UnknownFeature(String, String),
}

/// Pipeline stage a feature reads its input from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Normalized,
    Raster,
}

/// Registry entry for one feature.
#[derive(Debug, Clone, serde::Serialize)]
pub struct FeatureDescriptor {
    pub id: &'static str,
    pub complexity_rank: u32,
    pub stage: Stage,
}

/// Built-in features with their default complexity ranks.
const BUILTIN: &[(&str, u32, Stage)] = &[
    ("density", 1, Stage::Raw),
    ("extent", 2, Stage::Normalized),
    ("contour_count", 3, Stage::Raster),
    ("nesting_depth", 4, Stage::Raster),
    ("minor_variance", 5, Stage::Normalized),
    ("orientation", 6, Stage::Raw),
    ("sym_y", 7, Stage::Normalized),
    ("sym_x", 8, Stage::Normalized),
    ("mirror_gap", 9, Stage::Normalized),
];

/// Optional signed-handedness feature; see [`feat_chirality`].
const CHIRALITY: (&str, u32, Stage) = ("chirality", 10, Stage::Raw);

/// The active feature registry for a config: unique ids, totally ordered
/// ranks, sorted by id.
pub fn registry(config: &RunConfig) -> Vec<FeatureDescriptor> {
    let mut out: Vec<FeatureDescriptor> = BUILTIN
        .iter()
        .map(|&(id, complexity_rank, stage)| FeatureDescriptor {
            id,
            complexity_rank,
            stage,
        })
        .collect();
    if config.enable_chirality_feature {
        out.push(FeatureDescriptor {
            id: CHIRALITY.0,
            complexity_rank: CHIRALITY.1,
            stage: CHIRALITY.2,
        });
    }
    for f in &mut out {
        if let Some(&rank) = config.complexity_overrides.get(f.id) {
            f.complexity_rank = rank;
        }
    }
    out.sort_by(|a, b| a.id.cmp(b.id));
    out
}

/// Typo guard for rank overrides: every overridden id must name a feature in
/// the bank. Optional features count as known even while disabled (ranking a
/// disabled feature is a harmless no-op, not a mistake).
pub fn check_rank_overrides(config: &RunConfig) -> Result<(), FeatureError> {
    for key in config.complexity_overrides.keys() {
        let known = BUILTIN
            .iter()
            .map(|&(id, _, _)| id)
            .chain(std::iter::once(CHIRALITY.0));
        if !known.clone().any(|id| id == key) {
            return Err(FeatureError::UnknownFeature(
                key.clone(),
                known.collect::<Vec<_>>().join(", "),
            ));
        }
    }
    Ok(())
}

// ── individual features ──────────────────────────────────────────────────

/// Number of points (foreground pixels). A blank panel scores 0.
pub fn feat_density(cloud: &PointCloud) -> f64 {
    cloud.len() as f64
}

/// Total variance (spread proxy): `var_major + var_minor`.
pub fn feat_extent(cloud: &PointCloud) -> Result<f64, CloudError> {
    let f = principal_frame(cloud)?;
    Ok(f.var_major + f.var_minor)
}

/// Variance along the minor principal axis — near 0 for collinear layouts.
pub fn feat_minor_variance(cloud: &PointCloud) -> Result<f64, CloudError> {
    Ok(principal_frame(cloud)?.var_minor)
}

/// Signed Pearson correlation of x and y over the raw cloud.
///
/// This is the one pose-sensitive feature in the bank: it must see the cloud
/// before normalization, because unrotation deliberately destroys
/// orientation. The sign matters — a shape and its upright mirror image have
/// opposite correlations, which is the only trace of handedness the default
/// bank can see. Degenerate clouds (zero variance in either coordinate)
/// score 0.
pub fn feat_orientation(cloud: &PointCloud) -> Result<f64, FeatureError> {
    if cloud.len() < 2 {
        return Err(FeatureError::TooFewPoints);
    }
    let c = cloud.centroid()?;
    let n = cloud.len() as f64;
    let (mut cxx, mut cxy, mut cyy) = (0.0, 0.0, 0.0);
    for p in cloud.points() {
        let dx = p.x - c.x;
        let dy = p.y - c.y;
        cxx += dx * dx;
        cxy += dx * dy;
        cyy += dy * dy;
    }
    cxx /= n;
    cxy /= n;
    cyy /= n;
    if cxx < 1e-12 || cyy < 1e-12 {
        return Ok(0.0);
    }
    Ok(cxy / (cxx * cyy).sqrt())
}

/// Per-bucket means of a cloud: `y_means[k]` is the mean y over points whose
/// rounded x falls in bucket `k` (and symmetrically for `x_means`).
///
/// Buckets are one pixel wide (clouds are in pixel units and never rescaled).
/// Rotating a figure re-samples it onto a different pixel lattice; pixel-size
/// buckets hold enough points for their means to survive that re-sampling,
/// where finer buckets would degenerate to per-point noise.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryProfile {
    pub y_means: BTreeMap<i64, f64>,
    pub x_means: BTreeMap<i64, f64>,
    pub y_counts: BTreeMap<i64, usize>,
    pub x_counts: BTreeMap<i64, usize>,
}

fn grid_key(v: f64) -> i64 {
    v.round() as i64
}

pub fn symmetry_profile(cloud: &PointCloud) -> Result<SymmetryProfile, CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    let mut y_sums: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    let mut x_sums: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for p in cloud.points() {
        let e = y_sums.entry(grid_key(p.x)).or_insert((0.0, 0));
        e.0 += p.y;
        e.1 += 1;
        let e = x_sums.entry(grid_key(p.y)).or_insert((0.0, 0));
        e.0 += p.x;
        e.1 += 1;
    }
    let y_means = y_sums.iter().map(|(&k, &(s, n))| (k, s / n as f64)).collect();
    let y_counts = y_sums.iter().map(|(&k, &(_, n))| (k, n)).collect();
    let x_means = x_sums.iter().map(|(&k, &(s, n))| (k, s / n as f64)).collect();
    let x_counts = x_sums.iter().map(|(&k, &(_, n))| (k, n)).collect();
    Ok(SymmetryProfile {
        y_means,
        x_means,
        y_counts,
        x_counts,
    })
}

fn population_variance(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let n = values.clone().count();
    if n == 0 {
        return 0.0;
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    values.map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64
}

/// Variance of the per-x-bucket mean y. Zero for clouds mirror-symmetric
/// about the x-axis (every column's mass is balanced).
pub fn feat_sym_y(cloud: &PointCloud) -> Result<f64, CloudError> {
    let profile = symmetry_profile(cloud)?;
    Ok(population_variance(profile.y_means.values().copied()))
}

/// Variance of the per-y-bucket mean x; the transpose of [`feat_sym_y`].
pub fn feat_sym_x(cloud: &PointCloud) -> Result<f64, CloudError> {
    let profile = symmetry_profile(cloud)?;
    Ok(population_variance(profile.x_means.values().copied()))
}

/// Fraction of upper-half points (y > 0) that have no lower-half point
/// within one pixel of their mirror image (x, −y). 0 for a cloud that is
/// perfectly mirror-paired, 1 when nothing below the axis answers.
pub fn feat_mirror_gap(cloud: &PointCloud) -> Result<f64, CloudError> {
    if cloud.is_empty() {
        return Err(CloudError::EmptyCloud);
    }
    let mut lower: HashSet<(i64, i64)> = HashSet::new();
    for p in cloud.points() {
        let ky = grid_key(p.y);
        if ky < 0 {
            lower.insert((grid_key(p.x), ky));
        }
    }
    let mut upper = 0usize;
    let mut unmatched = 0usize;
    for p in cloud.points() {
        let ky = grid_key(p.y);
        if ky <= 0 {
            continue;
        }
        upper += 1;
        let kx = grid_key(p.x);
        let mut found = false;
        'probe: for dx in -1..=1i64 {
            for dy in -1..=1i64 {
                if lower.contains(&(kx + dx, -ky + dy)) {
                    found = true;
                    break 'probe;
                }
            }
        }
        if !found {
            unmatched += 1;
        }
    }
    if upper == 0 {
        return Ok(0.0);
    }
    Ok(unmatched as f64 / upper as f64)
}

/// Contour score: 8-connected foreground components plus enclosed holes.
/// A closed ring scores 2 (one component, one hole); the same ring with a
/// gap scores 1.
pub fn feat_contour_count(binary: &BinaryRaster) -> f64 {
    let regions = Regions::analyze(binary);
    (regions.component_count() + regions.hole_count()) as f64
}

/// Maximum containment depth: blank 0, solid shape 1, ring 2, ring holding a
/// dot 3, and so on — region alternation counted from the border inward.
pub fn feat_nesting_depth(binary: &BinaryRaster) -> f64 {
    f64::from(Regions::analyze(binary).max_depth())
}

/// Optional signed-handedness feature (registry id `chirality`, off by
/// default): the skew of the projections onto the right-handed minor axis of
/// the raw cloud. Mirror images get opposite signs — exactly the signal the
/// normalization throws away. Disabled by default to keep the stock pipeline
/// blind to oblique mirror flips.
pub fn feat_chirality(cloud: &PointCloud) -> Result<f64, CloudError> {
    let f = principal_frame(cloud)?;
    if f.is_isotropic() || f.var_minor < 1e-12 {
        return Ok(0.0);
    }
    let c = f.centroid;
    let n = cloud.len() as f64;
    let m3 = cloud
        .points()
        .iter()
        .map(|p| {
            let proj = (p.x - c.x) * f.axis_minor[0] + (p.y - c.y) * f.axis_minor[1];
            proj.powi(3)
        })
        .sum::<f64>()
        / n;
    Ok(m3 / f.var_minor.powf(1.5))
}

// ── the feature × panel matrix ───────────────────────────────────────────

/// Per-panel inputs for the feature bank.
#[derive(Debug, Clone)]
pub struct PanelData {
    pub binary: BinaryRaster,
    pub raw: PointCloud,
    pub normalized: Option<PointCloud>,
}

impl PanelData {
    /// Lifts a binarized panel to its clouds. Empty panels get no
    /// normalized cloud.
    pub fn prepare(binary: BinaryRaster, config: &RunConfig) -> PanelData {
        let raw = to_points(&binary);
        let normalized = if raw.is_empty() {
            None
        } else {
            Some(normalize(&raw, config.cloud_rounding).expect("nonempty cloud"))
        };
        PanelData {
            binary,
            raw,
            normalized,
        }
    }
}

/// One feature row across the six panels, values already rounded.
#[derive(Debug, Clone)]
pub struct FeatureRow {
    pub id: &'static str,
    pub complexity_rank: u32,
    pub stage: Stage,
    pub values: [f64; 6],
}

/// 6-panel feature matrix: one row per registry feature (sorted by id),
/// plus any warnings collected while evaluating.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub rows: Vec<FeatureRow>,
    pub warnings: Vec<String>,
}

impl FeatureMatrix {
    /// Renders the matrix as CSV: `feature,p0,…,p5`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("feature,p0,p1,p2,p3,p4,p5\n");
        for row in &self.rows {
            out.push_str(row.id);
            for v in row.values {
                out.push(',');
                out.push_str(&format_value(v));
            }
            out.push('\n');
        }
        out
    }
}

fn format_value(v: f64) -> String {
    // Feature values are on the rounding grid; plain Display keeps them
    // short and stable.
    format!("{v}")
}

fn eval_feature(desc: &FeatureDescriptor, panel: &PanelData) -> (f64, Option<String>) {
    if panel.raw.is_empty() {
        return (0.0, None); // the per-panel emptiness warning is emitted once
    }
    let normalized = panel
        .normalized
        .as_ref()
        .expect("nonempty panels always have a normalized cloud");
    match desc.id {
        "density" => (feat_density(&panel.raw), None),
        "extent" => (feat_extent(normalized).unwrap_or(0.0), None),
        "contour_count" => (feat_contour_count(&panel.binary), None),
        "nesting_depth" => (feat_nesting_depth(&panel.binary), None),
        "minor_variance" => (feat_minor_variance(normalized).unwrap_or(0.0), None),
        "orientation" => match feat_orientation(&panel.raw) {
            Ok(v) => (v, None),
            Err(FeatureError::TooFewPoints) => {
                (0.0, Some("orientation degenerate: fewer than 2 points".into()))
            }
            Err(_) => (0.0, None),
        },
        "sym_y" => (feat_sym_y(normalized).unwrap_or(0.0), None),
        "sym_x" => (feat_sym_x(normalized).unwrap_or(0.0), None),
        "mirror_gap" => (feat_mirror_gap(normalized).unwrap_or(0.0), None),
        "chirality" => (feat_chirality(&panel.raw).unwrap_or(0.0), None),
        other => unreachable!("unknown feature id {other} in registry"),
    }
}

/// Evaluates the whole registry over six prepared panels.
///
/// Every value is rounded to `config.feature_rounding` decimals before it is
/// stored — panels that differ only in ways the features shouldn't care
/// about therefore produce bit-equal rows.
pub fn compute_feature_matrix(panels: &[PanelData; 6], config: &RunConfig) -> FeatureMatrix {
    let mut warnings = Vec::new();
    for (i, p) in panels.iter().enumerate() {
        if p.raw.is_empty() {
            warnings.push(format!("panel {i} is empty after binarization"));
        }
    }
    let mut rows = Vec::new();
    for desc in registry(config) {
        let mut values = [0.0f64; 6];
        for (i, panel) in panels.iter().enumerate() {
            let (v, warning) = eval_feature(&desc, panel);
            values[i] = round_places(v, config.feature_rounding);
            if let Some(w) = warning {
                warnings.push(format!("{} panel {i}: {w}", desc.id));
            }
        }
        rows.push(FeatureRow {
            id: desc.id,
            complexity_rank: desc.complexity_rank,
            stage: desc.stage,
            values,
        });
    }
    FeatureMatrix { rows, warnings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::Point2;

    fn cloud(points: &[(f64, f64)]) -> PointCloud {
        PointCloud::from_points(points.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    fn bitmap(rows: &[&str]) -> BinaryRaster {
        let h = rows.len();
        let w = rows[0].len();
        let mut bits = Vec::with_capacity(w * h);
        for row in rows {
            bits.extend(row.bytes().map(|b| b == b'#'));
        }
        BinaryRaster::from_bits(w, h, bits).unwrap()
    }

    #[test]
    fn density_counts_points() {
        assert_eq!(feat_density(&cloud(&[])), 0.0);
        assert_eq!(feat_density(&cloud(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0)])), 3.0);
    }

    #[test]
    fn extent_of_unit_square_corners() {
        // cov = diag(0.25, 0.25): total variance exactly 0.5.
        let v = feat_extent(&cloud(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)])).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn orientation_of_perfect_line_is_one() {
        let pts: Vec<(f64, f64)> = (0..10).map(|i| (f64::from(i), 2.0 * f64::from(i) + 1.0)).collect();
        let v = feat_orientation(&cloud(&pts)).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orientation_of_balanced_clouds_is_zero() {
        let square = cloud(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0), (1.0, 1.0)]);
        assert_eq!(feat_orientation(&square).unwrap(), 0.0);
        // Hand-computed: deviations sum to zero cross-product exactly.
        let tri = cloud(&[(0.0, 0.0), (1.0, 1.0), (2.0, 0.0)]);
        assert_eq!(feat_orientation(&tri).unwrap(), 0.0);
    }

    #[test]
    fn orientation_is_signed_and_mirror_antisymmetric() {
        let pts = [(0.0, 0.0), (1.0, 0.4), (2.0, 1.1), (3.0, 1.4), (1.0, -0.2)];
        let c = cloud(&pts);
        let mirrored = cloud(&pts.map(|(x, y)| (-x, y)));
        let a = feat_orientation(&c).unwrap();
        let b = feat_orientation(&mirrored).unwrap();
        assert!(a > 0.5, "test shape should correlate strongly");
        assert!((a + b).abs() < 1e-12, "mirror must negate the correlation");
    }

    #[test]
    fn orientation_degenerate_cases() {
        assert_eq!(
            feat_orientation(&cloud(&[(1.0, 1.0)])),
            Err(FeatureError::TooFewPoints)
        );
        // Vertical line: zero x-variance.
        assert_eq!(feat_orientation(&cloud(&[(1.0, 0.0), (1.0, 5.0)])).unwrap(), 0.0);
    }

    #[test]
    fn symmetry_profile_buckets_by_pixel() {
        let p = symmetry_profile(&cloud(&[(0.0, 1.0), (0.0, -1.0)])).unwrap();
        assert_eq!(p.y_means.len(), 1);
        assert_eq!(p.y_means[&0], 0.0);
        assert_eq!(p.y_counts[&0], 2);
        // x buckets: one at y=1, one at y=-1.
        assert_eq!(p.x_means.len(), 2);
        assert_eq!(p.x_means[&1], 0.0);
        assert_eq!(p.x_means[&-1], 0.0);
        // Sub-pixel coordinates share their pixel's bucket.
        let p = symmetry_profile(&cloud(&[(0.9, 3.0), (1.2, 5.0)])).unwrap();
        assert_eq!(p.y_means.len(), 1);
        assert_eq!(p.y_means[&1], 4.0);
    }

    #[test]
    fn sym_y_variance_of_bucket_means() {
        // Buckets x=0 → mean y 0, x=1 → mean y 2; population variance 1.
        let v = feat_sym_y(&cloud(&[(0.0, 0.0), (1.0, 2.0)])).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
        // A perfectly x-axis-symmetric cloud scores 0.
        let sym = cloud(&[(0.0, 1.0), (0.0, -1.0), (1.0, 2.0), (1.0, -2.0)]);
        assert_eq!(feat_sym_y(&sym).unwrap(), 0.0);
    }

    #[test]
    fn sym_x_is_the_transpose_of_sym_y() {
        let c = cloud(&[(0.0, 0.0), (2.0, 1.0)]);
        let transposed = cloud(&[(0.0, 0.0), (1.0, 2.0)]);
        assert_eq!(feat_sym_x(&c).unwrap(), feat_sym_y(&transposed).unwrap());
    }

    #[test]
    fn mirror_gap_scores() {
        // Perfect mirror: 0.
        let sym = cloud(&[(0.0, 1.0), (0.0, -1.0), (1.0, 2.5), (1.0, -2.5)]);
        assert_eq!(feat_mirror_gap(&sym).unwrap(), 0.0);
        // Everything strictly above the axis: 1.
        let above = cloud(&[(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(feat_mirror_gap(&above).unwrap(), 1.0);
        // One of two upper points unmatched: 0.5.
        let half = cloud(&[(0.0, 3.0), (5.0, 3.0), (0.0, -3.0)]);
        assert_eq!(feat_mirror_gap(&half).unwrap(), 0.5);
        // Points on the axis belong to neither half.
        let axis = cloud(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(feat_mirror_gap(&axis).unwrap(), 0.0);
    }

    #[test]
    fn mirror_gap_tolerates_one_pixel() {
        // Mirror partner off by one pixel still matches.
        let c = cloud(&[(0.0, 3.0), (0.9, -2.4)]);
        assert_eq!(feat_mirror_gap(&c).unwrap(), 0.0);
        // Two pixels off does not.
        let c = cloud(&[(0.0, 3.0), (2.1, -3.0)]);
        assert_eq!(feat_mirror_gap(&c).unwrap(), 1.0);
    }

    #[test]
    fn contour_count_ring_vs_arc() {
        let ring = bitmap(&[
            ".....",
            ".###.",
            ".#.#.",
            ".###.",
            ".....",
        ]);
        let arc = bitmap(&[
            ".....",
            ".###.",
            ".#.#.",
            ".#.#.",
            ".....",
        ]);
        assert_eq!(feat_contour_count(&ring), 2.0);
        assert_eq!(feat_contour_count(&arc), 1.0);
        let two_squares = bitmap(&["##.##", "##.##"]);
        assert_eq!(feat_contour_count(&two_squares), 2.0);
        let blank = bitmap(&["...", "..."]);
        assert_eq!(feat_contour_count(&blank), 0.0);
    }

    #[test]
    fn nesting_depth_examples() {
        let solid = bitmap(&["##", "##"]);
        assert_eq!(feat_nesting_depth(&solid), 1.0);
        let ring_dot = bitmap(&[
            ".......",
            ".#####.",
            ".#...#.",
            ".#.#.#.",
            ".#...#.",
            ".#####.",
            ".......",
        ]);
        assert_eq!(feat_nesting_depth(&ring_dot), 3.0);
        let blank = bitmap(&["..", ".."]);
        assert_eq!(feat_nesting_depth(&blank), 0.0);
    }

    #[test]
    fn chirality_is_mirror_antisymmetric() {
        let mut pts = Vec::new();
        for x in 0..=20 {
            pts.push((f64::from(x), 0.0));
        }
        for y in 1..=8 {
            pts.push((0.0, f64::from(y)));
        }
        let l_shape = cloud(&pts);
        let mirrored = cloud(&pts.iter().map(|&(x, y)| (-x, y)).collect::<Vec<_>>());
        let a = feat_chirality(&l_shape).unwrap();
        let b = feat_chirality(&mirrored).unwrap();
        assert!(a.abs() > 0.1, "L-shape should have clear handedness, got {a}");
        assert!((a + b).abs() < 1e-9, "mirror must negate the skew");
    }

    #[test]
    fn registry_is_sorted_with_unique_ids_and_ranks() {
        let config = RunConfig::default();
        let reg = registry(&config);
        assert_eq!(reg.len(), 9);
        for pair in reg.windows(2) {
            assert!(pair[0].id < pair[1].id, "registry must be sorted by id");
        }
        let mut ranks: Vec<u32> = reg.iter().map(|f| f.complexity_rank).collect();
        ranks.sort_unstable();
        ranks.dedup();
        assert_eq!(ranks.len(), reg.len(), "ranks must be a total order");
    }

    #[test]
    fn registry_honors_flag_and_overrides() {
        let mut config = RunConfig::default();
        config.enable_chirality_feature = true;
        config.complexity_overrides.insert("density".into(), 42);
        let reg = registry(&config);
        assert_eq!(reg.len(), 10);
        assert!(reg.iter().any(|f| f.id == "chirality"));
        assert_eq!(
            reg.iter().find(|f| f.id == "density").unwrap().complexity_rank,
            42
        );
    }

    #[test]
    fn rank_override_check_catches_typos() {
        let mut config = RunConfig::default();
        config.complexity_overrides.insert("density".into(), 3);
        // "chirality" is known even while the feature is disabled.
        config.complexity_overrides.insert("chirality".into(), 11);
        assert_eq!(check_rank_overrides(&config), Ok(()));

        config.complexity_overrides.insert("densty".into(), 1);
        match check_rank_overrides(&config) {
            Err(FeatureError::UnknownFeature(name, known)) => {
                assert_eq!(name, "densty");
                assert!(known.contains("density"));
            }
            other => panic!("typo must be rejected, got {other:?}"),
        }
    }

    #[test]
    fn matrix_of_empty_panels_is_zero_with_warnings() {
        let config = RunConfig::default();
        let blank = BinaryRaster::from_bits(4, 4, vec![false; 16]).unwrap();
        let panels: [PanelData; 6] =
            std::array::from_fn(|_| PanelData::prepare(blank.clone(), &config));
        let m = compute_feature_matrix(&panels, &config);
        assert_eq!(m.warnings.len(), 6);
        for row in &m.rows {
            assert_eq!(row.values, [0.0; 6]);
        }
    }

    #[test]
    fn matrix_values_are_rounded_to_two_decimals() {
        let config = RunConfig::default();
        // 3 points forming a slightly irrational spread.
        let mut bits = vec![false; 25];
        bits[0] = true;
        bits[7] = true;
        bits[13] = true;
        let b = BinaryRaster::from_bits(5, 5, bits).unwrap();
        let panels: [PanelData; 6] = std::array::from_fn(|_| PanelData::prepare(b.clone(), &config));
        let m = compute_feature_matrix(&panels, &config);
        for row in &m.rows {
            for v in row.values {
                assert_eq!(round_places(v, 2), v, "{} not rounded: {v}", row.id);
            }
        }
    }

    #[test]
    fn matrix_csv_has_a_row_per_feature() {
        let config = RunConfig::default();
        let blank = BinaryRaster::from_bits(2, 2, vec![false; 4]).unwrap();
        let panels: [PanelData; 6] =
            std::array::from_fn(|_| PanelData::prepare(blank.clone(), &config));
        let m = compute_feature_matrix(&panels, &config);
        let csv = m.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 10); // header + 9 features
        assert!(lines[0].starts_with("feature,p0"));
        assert!(lines[1].starts_with("contour_count,"));
    }
}
