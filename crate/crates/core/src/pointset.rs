//! Point clouds and pose normalization.
//!
//! Foreground pixels become 2-D points (`to_points`), and `normalize` maps a
//! cloud into a canonical pose so panels that differ only by rotation,
//! translation, or handedness produce (near-)identical clouds:
//!
//! 1. center on the centroid;
//! 2. rotate onto the principal axes (population covariance, major axis
//!    first);
//! 3. orient each axis so the third central moment of the projections is
//!    non-negative (falling back to "largest projection positive" for
//!    skew-free clouds) — this also erases mirror flips, which is a known,
//!    deliberate blindness of the pipeline;
//! 4. round every coordinate to the rounding grid (one decimal by default)
//!    and merge points that collide.
//!
//! Near-isotropic clouds (no meaningful eigenvalue gap) skip the rotation and
//! the axis orientation entirely: they are only centered and rounded, with
//! identity axes reported.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::config::round_places;
use crate::raster::BinaryRaster;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CloudError {
    #[error("operation requires a nonempty point cloud")]
    EmptyCloud,
}

/// A point in cartesian coordinates (y grows upward, unlike pixel rows).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }
}

/// A finite set of points with set semantics and a canonical (sorted) order,
/// so iteration — and everything derived from it — is deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Point2>,
}

impl PointCloud {
    /// Builds a cloud from arbitrary points: sorts them and drops exact
    /// duplicates. Coordinates must be finite.
    pub fn from_points(mut points: Vec<Point2>) -> Self {
        debug_assert!(
            points.iter().all(|p| p.x.is_finite() && p.y.is_finite()),
            "point cloud coordinates must be finite"
        );
        points.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
        points.dedup_by(|a, b| a.x == b.x && a.y == b.y);
        PointCloud { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn centroid(&self) -> Result<Point2, CloudError> {
        if self.points.is_empty() {
            return Err(CloudError::EmptyCloud);
        }
        let n = self.points.len() as f64;
        let (sx, sy) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        Ok(Point2::new(sx / n, sy / n))
    }
}

/// Principal frame of a cloud: centroid, orthonormal right-handed axes, and
/// the population variances along them (`var_major >= var_minor >= 0`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrincipalFrame {
    pub centroid: Point2,
    pub axis_major: [f64; 2],
    pub axis_minor: [f64; 2],
    pub var_major: f64,
    pub var_minor: f64,
}

/// Relative eigenvalue gap below which a cloud counts as isotropic.
const ISOTROPY_TOL: f64 = 1e-6;
/// Relative third-moment magnitude below which a projection has "no skew"
/// and the sign convention falls back to the extreme point.
const SKEW_TOL: f64 = 1e-9;

impl PrincipalFrame {
    /// True when the eigenvalue gap is below tolerance, i.e. the axes carry
    /// no directional information and were left as the identity.
    pub fn is_isotropic(&self) -> bool {
        (self.var_major - self.var_minor) / self.var_major.max(1e-12) < ISOTROPY_TOL
    }
}

/// Converts a foreground bitmap to a point cloud with `x = column` and
/// `y = height - 1 - row`, so y grows upward.
pub fn to_points(binary: &BinaryRaster) -> PointCloud {
    let h = binary.height();
    let mut points = Vec::with_capacity(binary.foreground_count());
    for row in 0..h {
        for col in 0..binary.width() {
            if binary.get(col, row) {
                points.push(Point2::new(col as f64, (h - 1 - row) as f64));
            }
        }
    }
    PointCloud::from_points(points)
}

/// Sign that makes a projection axis canonical: positive third central
/// moment, or — when the skew is negligible — a positive coordinate for the
/// point farthest from the centroid along the axis.
fn canonical_sign(projections: &[f64]) -> f64 {
    let n = projections.len() as f64;
    let mean = projections.iter().sum::<f64>() / n;
    let var = projections.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var > 0.0 {
        let m3 = projections.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
        if m3.abs() > SKEW_TOL * var.powf(1.5) {
            return m3.signum();
        }
    }
    let max = projections.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = projections.iter().cloned().fold(f64::INFINITY, f64::min);
    if max - mean < mean - min {
        -1.0
    } else {
        1.0
    }
}

/// Computes the principal frame of a nonempty cloud.
///
/// The covariance is the population covariance (divide by N). The major axis
/// is the eigenvector of the larger eigenvalue, signed by [`canonical_sign`];
/// the minor axis is the major axis rotated +90°, so the frame determinant is
/// +1. Isotropic clouds get identity axes.
pub fn principal_frame(cloud: &PointCloud) -> Result<PrincipalFrame, CloudError> {
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

    // Closed-form eigendecomposition of the symmetric 2x2 covariance.
    let half_trace = (cxx + cyy) / 2.0;
    let half_gap = (cxx - cyy) / 2.0;
    let disc = (half_gap * half_gap + cxy * cxy).sqrt();
    let var_major = half_trace + disc;
    let var_minor = (half_trace - disc).max(0.0);

    if (var_major - var_minor) / var_major.max(1e-12) < ISOTROPY_TOL {
        return Ok(PrincipalFrame {
            centroid: c,
            axis_major: [1.0, 0.0],
            axis_minor: [0.0, 1.0],
            var_major,
            var_minor,
        });
    }

    let mut major = if cxy == 0.0 {
        if cxx >= cyy {
            [1.0, 0.0]
        } else {
            [0.0, 1.0]
        }
    } else {
        // Two algebraically equivalent eigenvector forms; take the one with
        // the larger norm for numerical stability.
        let a = [var_major - cyy, cxy];
        let b = [cxy, var_major - cxx];
        let (na, nb) = (a[0] * a[0] + a[1] * a[1], b[0] * b[0] + b[1] * b[1]);
        let v = if na >= nb { a } else { b };
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        [v[0] / norm, v[1] / norm]
    };

    let projections: Vec<f64> = cloud
        .points()
        .iter()
        .map(|p| (p.x - c.x) * major[0] + (p.y - c.y) * major[1])
        .collect();
    let sign = canonical_sign(&projections);
    major = [sign * major[0], sign * major[1]];

    Ok(PrincipalFrame {
        centroid: c,
        axis_major: major,
        axis_minor: [-major[1], major[0]],
        var_major,
        var_minor,
    })
}

/// Maps a cloud into canonical pose (see the module docs) and rounds every
/// coordinate to `places` decimals, merging points that collide.
pub fn normalize(cloud: &PointCloud, places: u8) -> Result<PointCloud, CloudError> {
    let frame = principal_frame(cloud)?;
    let c = frame.centroid;

    let mut xs = Vec::with_capacity(cloud.len());
    let mut ys = Vec::with_capacity(cloud.len());
    for p in cloud.points() {
        let dx = p.x - c.x;
        let dy = p.y - c.y;
        xs.push(dx * frame.axis_major[0] + dy * frame.axis_major[1]);
        ys.push(dx * frame.axis_minor[0] + dy * frame.axis_minor[1]);
    }

    if !frame.is_isotropic() {
        // The major axis is already canonically signed inside the frame;
        // orient the minor projection by the same rule instead of keeping the
        // right-handed sign, so mirror images land on the same cloud.
        let sign = canonical_sign(&ys);
        if sign < 0.0 {
            for y in &mut ys {
                *y = -*y;
            }
        }
    }

    let points = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| Point2::new(round_places(x, places), round_places(y, places)))
        .collect();
    Ok(PointCloud::from_points(points))
}

// ── debug exports ────────────────────────────────────────────────────────

/// Writes a cloud as `x,y` CSV lines in canonical order.
pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::from("x,y\n");
    for p in cloud.points() {
        let _ = writeln!(out, "{},{}", p.x, p.y);
    }
    out
}

/// Renders a cloud as a standalone SVG scatter plot (y flipped so that the
/// cloud's "up" is up on screen).
pub fn cloud_to_svg(cloud: &PointCloud) -> String {
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (-1.0f64, 1.0f64, -1.0f64, 1.0f64);
    for p in cloud.points() {
        min_x = min_x.min(p.x);
        max_x = max_x.max(p.x);
        min_y = min_y.min(p.y);
        max_y = max_y.max(p.y);
    }
    let pad = 0.05 * (max_x - min_x).max(max_y - min_y) + 1.0;
    let (x0, y0) = (min_x - pad, -max_y - pad);
    let (w, h) = (max_x - min_x + 2.0 * pad, max_y - min_y + 2.0 * pad);
    let r = (w.max(h) / 200.0).max(0.3);
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{x0:.2} {y0:.2} {w:.2} {h:.2}\">\n\
         <rect x=\"{x0:.2}\" y=\"{y0:.2}\" width=\"{w:.2}\" height=\"{h:.2}\" fill=\"white\"/>\n"
    );
    for p in cloud.points() {
        let _ = writeln!(
            out,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"{r:.3}\" fill=\"black\"/>",
            p.x, -p.y
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Writes `cloud.csv` / `cloud.svg` style exports for one panel.
pub fn dump_cloud(cloud: &PointCloud, dir: &Path, stem: &str) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(format!("{stem}.csv")), cloud_to_csv(cloud))?;
    std::fs::write(dir.join(format!("{stem}.svg")), cloud_to_svg(cloud))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryRaster;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(points: &[(f64, f64)]) -> PointCloud {
        PointCloud::from_points(points.iter().map(|&(x, y)| Point2::new(x, y)).collect())
    }

    #[test]
    fn to_points_flips_rows_to_cartesian() {
        // 3x3 diagonal: bits at (row 0, col 0), (1, 1), (2, 2).
        let mut bits = vec![false; 9];
        bits[0] = true;
        bits[4] = true;
        bits[8] = true;
        let b = BinaryRaster::from_bits(3, 3, bits).unwrap();
        let pts = to_points(&b);
        assert_eq!(
            pts.points(),
            &[
                Point2::new(0.0, 2.0),
                Point2::new(1.0, 1.0),
                Point2::new(2.0, 0.0)
            ]
        );
    }

    #[test]
    fn from_points_sorts_and_dedups() {
        let c = cloud(&[(1.0, 2.0), (0.0, 0.0), (1.0, 2.0), (-1.0, 5.0)]);
        assert_eq!(c.len(), 3);
        assert_eq!(c.points()[0], Point2::new(-1.0, 5.0));
    }

    #[test]
    fn frame_of_axis_aligned_rectangle() {
        // Hand eigendecomposition: cov = diag(1, 0.25).
        let f = principal_frame(&cloud(&[(0.0, 0.0), (2.0, 0.0), (0.0, 1.0), (2.0, 1.0)])).unwrap();
        assert_eq!(f.centroid, Point2::new(1.0, 0.5));
        assert_eq!(f.axis_major, [1.0, 0.0]);
        assert_eq!(f.axis_minor, [0.0, 1.0]);
        assert!((f.var_major - 1.0).abs() < 1e-12);
        assert!((f.var_minor - 0.25).abs() < 1e-12);
    }

    #[test]
    fn frame_of_diagonal_line() {
        // Points on y = x symmetric about the origin: major axis is the
        // diagonal (either sign), minor variance exactly 0.
        let f = principal_frame(&cloud(&[(-2.0, -2.0), (-1.0, -1.0), (1.0, 1.0), (2.0, 2.0)])).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((f.axis_major[0].abs() - s).abs() < 1e-12);
        assert!((f.axis_major[1].abs() - s).abs() < 1e-12);
        assert_eq!(f.axis_major[0].signum(), f.axis_major[1].signum());
        assert!(f.var_minor.abs() < 1e-12);
    }

    #[test]
    fn frame_axes_are_orthonormal_and_right_handed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let pts: Vec<Point2> = (0..40)
                .map(|_| Point2::new(rng.gen_range(-30.0..30.0), rng.gen_range(-10.0..10.0)))
                .collect();
            let f = principal_frame(&PointCloud::from_points(pts)).unwrap();
            let dot = f.axis_major[0] * f.axis_minor[0] + f.axis_major[1] * f.axis_minor[1];
            let det = f.axis_major[0] * f.axis_minor[1] - f.axis_major[1] * f.axis_minor[0];
            let norm = (f.axis_major[0].powi(2) + f.axis_major[1].powi(2)).sqrt();
            assert!(dot.abs() < 1e-9);
            assert!((det - 1.0).abs() < 1e-9);
            assert!((norm - 1.0).abs() < 1e-9);
            assert!(f.var_major >= f.var_minor && f.var_minor >= 0.0);
        }
    }

    #[test]
    fn single_point_cloud_gets_identity_axes() {
        let f = principal_frame(&cloud(&[(3.0, 4.0)])).unwrap();
        assert_eq!(f.axis_major, [1.0, 0.0]);
        assert_eq!(f.axis_minor, [0.0, 1.0]);
        assert_eq!((f.var_major, f.var_minor), (0.0, 0.0));
    }

    #[test]
    fn empty_cloud_is_an_error() {
        assert_eq!(principal_frame(&cloud(&[])), Err(CloudError::EmptyCloud));
        assert_eq!(normalize(&cloud(&[]), 1), Err(CloudError::EmptyCloud));
    }

    #[test]
    fn normalize_of_centered_axis_aligned_cloud_is_identity() {
        let c = cloud(&[(-1.0, -0.5), (1.0, -0.5), (-1.0, 0.5), (1.0, 0.5)]);
        assert_eq!(normalize(&c, 1).unwrap(), c);
    }

    /// L∞ Hausdorff distance between two clouds.
    fn hausdorff(a: &PointCloud, b: &PointCloud) -> f64 {
        let one_way = |from: &PointCloud, to: &PointCloud| {
            from.points()
                .iter()
                .map(|p| {
                    to.points()
                        .iter()
                        .map(|q| (p.x - q.x).abs().max((p.y - q.y).abs()))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_way(a, b).max(one_way(b, a))
    }

    /// Random pixel-like cloud: distinct integer coordinates (pairwise
    /// distance >= 1, as with real rasters, so grid rounding can never
    /// collapse two points into one) with a clear major/minor variance gap.
    fn random_gapped_cloud(rng: &mut ChaCha8Rng) -> PointCloud {
        loop {
            let n = rng.gen_range(10..120);
            let mut cells = std::collections::BTreeSet::new();
            while cells.len() < n {
                cells.insert((rng.gen_range(-25..25i32), rng.gen_range(-9..9i32)));
            }
            let pts: Vec<Point2> = cells
                .iter()
                .map(|&(x, y)| Point2::new(f64::from(x), f64::from(y)))
                .collect();
            let c = PointCloud::from_points(pts);
            let f = principal_frame(&c).unwrap();
            if f.var_major > 0.0 && (f.var_major - f.var_minor) / f.var_major >= 0.1 {
                return c;
            }
        }
    }

    #[test]
    fn normalize_is_invariant_under_rigid_motion() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for trial in 0..60 {
            let c = random_gapped_cloud(&mut rng);
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let (tx, ty) = (rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
            let (s, co) = theta.sin_cos();
            let moved = PointCloud::from_points(
                c.points()
                    .iter()
                    .map(|p| Point2::new(co * p.x - s * p.y + tx, s * p.x + co * p.y + ty))
                    .collect(),
            );
            let a = normalize(&c, 1).unwrap();
            let b = normalize(&moved, 1).unwrap();
            assert!(
                hausdorff(&a, &b) <= 0.1 + 1e-9,
                "trial {trial}: clouds differ by more than one grid cell"
            );
        }
    }


    #[test]
    fn normalize_is_idempotent_up_to_axis_flips() {
        // Re-normalizing a rounded cloud reproduces it to within one grid
        // cell, up to axis sign flips: the sign tie-breaks compare moments
        // that rounding can nudge across zero, so a second pass may mirror
        // the cloud. Every normalized-stage feature is mirror-invariant, so
        // only the flip-corrected distance is contractual.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..40 {
            let c = random_gapped_cloud(&mut rng);
            let once = normalize(&c, 1).unwrap();
            let twice = normalize(&once, 1).unwrap();
            let mut h = f64::MAX;
            for &(sx, sy) in &[(1.0, 1.0), (-1.0, 1.0), (1.0, -1.0), (-1.0, -1.0)] {
                let flipped = PointCloud::from_points(
                    twice.points().iter().map(|p| Point2::new(sx * p.x, sy * p.y)).collect(),
                );
                h = h.min(hausdorff(&once, &flipped));
            }
            assert!(h <= 0.1 + 1e-9, "trial {trial}: drift {h}");
        }
    }

    #[test]
    fn normalized_cloud_is_centered_with_major_variance_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let c = random_gapped_cloud(&mut rng);
            let out = normalize(&c, 1).unwrap();
            let centroid = out.centroid().unwrap();
            assert!(centroid.x.abs() <= 0.1 && centroid.y.abs() <= 0.1);
            let n = out.len() as f64;
            let var_x = out.points().iter().map(|p| (p.x - centroid.x).powi(2)).sum::<f64>() / n;
            let var_y = out.points().iter().map(|p| (p.y - centroid.y).powi(2)).sum::<f64>() / n;
            assert!(var_x + 0.5 >= var_y, "major variance must come first");
        }
    }

    #[test]
    fn mirror_images_normalize_to_the_same_cloud() {
        // A chiral L-shape and its mirror land on bit-identical clouds: the
        // axis orientation is chosen from the data on both axes, so
        // handedness is erased by design.
        let mut pts = Vec::new();
        for x in 0..=20 {
            for y in 0..=1 {
                pts.push(Point2::new(f64::from(x), f64::from(y)));
            }
        }
        for y in 2..=9 {
            for x in 0..=1 {
                pts.push(Point2::new(f64::from(x), f64::from(y)));
            }
        }
        let l_shape = PointCloud::from_points(pts.clone());
        let mirrored = PointCloud::from_points(
            pts.iter().map(|p| Point2::new(-p.x, p.y)).collect(),
        );
        let a = normalize(&l_shape, 1).unwrap();
        let b = normalize(&mirrored, 1).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn isotropic_cloud_keeps_identity_axes() {
        // Exact 4-fold symmetric cross: covariance is a multiple of I.
        let c = cloud(&[(2.0, 0.0), (-2.0, 0.0), (0.0, 2.0), (0.0, -2.0)]);
        let f = principal_frame(&c).unwrap();
        assert!(f.is_isotropic());
        assert_eq!(f.axis_major, [1.0, 0.0]);
        let out = normalize(&c, 1).unwrap();
        assert_eq!(out, c);
    }

    #[test]
    fn csv_and_svg_exports_are_deterministic() {
        let c = cloud(&[(0.0, 0.5), (-1.2, 3.0)]);
        assert_eq!(cloud_to_csv(&c), "x,y\n-1.2,3\n0,0.5\n");
        let svg = cloud_to_svg(&c);
        assert!(svg.starts_with("<svg"));
        assert_eq!(svg.matches("<circle").count(), 2);
        assert_eq!(svg, cloud_to_svg(&c));
    }
}
