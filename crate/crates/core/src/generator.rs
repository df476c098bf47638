//! Seeded synthetic problem generator.
//!
//! Each problem is six 120×120 grayscale panels (white background, black
//! ink): five share a geometric concept, one violates it. Nuisance
//! parameters (translation, and rotation for concepts that are
//! rotation-free) vary per panel so the violation is the only systematic
//! difference. Generation is a pure function of (concept, seed).
//!
//! Concepts whose signal lives in exact pixel statistics (`circle_center`,
//! `connectedness`, `chirality_vertical`, `homothecy`) draw one shape with
//! integer coordinates and translate it by integer offsets, so conforming
//! panels are pixel-for-pixel congruent and every feature row is constant
//! across them except at the violation.

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::raster::{binarize, GrayRaster, RasterError};
use crate::topology::Regions;

/// Panel side length in pixels.
pub const PANEL_SIZE: usize = 120;

const BG: u8 = 255;
const INK: u8 = 0;

#[derive(Debug, Error, PartialEq)]
pub enum GenError {
    #[error("unknown concept {0:?} (try `oddity list-features` for the feature bank, or one of: {1})")]
    UnknownConcept(String, String),
}

/// The shared property the five conforming panels satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Concept {
    /// Closed ring vs. an open arc.
    Closure,
    /// Six collinear dots vs. one dot off the line.
    Alignment,
    /// Shape mirror-symmetric about its long axis vs. a bent one.
    VerticalSymmetry,
    /// Dot at the circle's center vs. off-center.
    CircleCenter,
    /// One connected stroke vs. a stroke broken in two.
    Connectedness,
    /// Ring with a hole vs. a filled disc.
    Holes,
    /// Two parallel strokes vs. two crossing strokes.
    Parallelism,
    /// Upright flag vs. its mirror image (no rotation).
    ChiralityVertical,
    /// Rotated flag vs. its rotated mirror image.
    ChiralityOblique,
    /// Concentric rings with radius ratio 2 vs. a smaller ratio.
    Homothecy,
}

impl Concept {
    pub const ALL: [Concept; 10] = [
        Concept::Closure,
        Concept::Alignment,
        Concept::VerticalSymmetry,
        Concept::CircleCenter,
        Concept::Connectedness,
        Concept::Holes,
        Concept::Parallelism,
        Concept::ChiralityVertical,
        Concept::ChiralityOblique,
        Concept::Homothecy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Concept::Closure => "closure",
            Concept::Alignment => "alignment",
            Concept::VerticalSymmetry => "vertical_symmetry",
            Concept::CircleCenter => "circle_center",
            Concept::Connectedness => "connectedness",
            Concept::Holes => "holes",
            Concept::Parallelism => "parallelism",
            Concept::ChiralityVertical => "chirality_vertical",
            Concept::ChiralityOblique => "chirality_oblique",
            Concept::Homothecy => "homothecy",
        }
    }
}

impl std::fmt::Display for Concept {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Concept {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Concept::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Concept::ALL.iter().map(|c| c.name()).collect();
                GenError::UnknownConcept(s.to_string(), names.join(", "))
            })
    }
}

/// One generated six-panel problem with its ground truth.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub concept: Concept,
    pub panels: [GrayRaster; 6],
    /// 0-based row-major index of the violating panel.
    pub odd_index: usize,
    pub seed: u64,
    /// The sampled shape parameters, for reproducibility reports.
    pub params: serde_json::Value,
}

impl GeneratedProblem {
    pub fn id(&self) -> String {
        format!("{}-{:06}", self.concept, self.seed)
    }

    /// Panels tiled into one flush 360×240 sheet (3 columns × 2 rows).
    pub fn composite(&self) -> GrayRaster {
        let mut sheet = GrayRaster::filled(3 * PANEL_SIZE, 2 * PANEL_SIZE, BG);
        for (i, panel) in self.panels.iter().enumerate() {
            let x0 = (i % 3) * PANEL_SIZE;
            let y0 = (i / 3) * PANEL_SIZE;
            for y in 0..panel.height() {
                for x in 0..panel.width() {
                    sheet.set(x0 + x, y0 + y, panel.get(x, y));
                }
            }
        }
        sheet
    }

    /// Writes `<stem>_p0.pgm` … `<stem>_p5.pgm` into `dir`, returning the
    /// paths in panel order.
    pub fn write_panels(&self, dir: &Path) -> Result<Vec<PathBuf>, RasterError> {
        let mut paths = Vec::with_capacity(6);
        for (i, panel) in self.panels.iter().enumerate() {
            let path = dir.join(format!("{}_p{i}.pgm", self.id()));
            panel.write_pgm(&path)?;
            paths.push(path);
        }
        Ok(paths)
    }
}

/// Generates the problem for `concept` under `seed`. Pure: the same pair
/// always yields the same pixels.
pub fn generate(concept: Concept, seed: u64) -> GeneratedProblem {
    // Decorrelate the per-concept streams so a shared base seed does not
    // reuse one nuisance sequence across concepts.
    let salt = concept
        .name()
        .bytes()
        .fold(0u64, |h, b| h.wrapping_mul(131).wrapping_add(u64::from(b)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.rotate_left(17));
    let (panels, odd_index, params) = match concept {
        Concept::Closure => gen_closure(&mut rng),
        Concept::Alignment => gen_alignment(&mut rng),
        Concept::VerticalSymmetry => gen_vertical_symmetry(&mut rng),
        Concept::CircleCenter => gen_circle_center(&mut rng),
        Concept::Connectedness => gen_connectedness(&mut rng),
        Concept::Holes => gen_holes(&mut rng),
        Concept::Parallelism => gen_parallelism(&mut rng),
        Concept::ChiralityVertical => gen_chirality(&mut rng, false),
        Concept::ChiralityOblique => gen_chirality(&mut rng, true),
        Concept::Homothecy => gen_homothecy(&mut rng),
    };
    GeneratedProblem {
        concept,
        panels,
        odd_index,
        seed,
        params,
    }
}

/// Generates `count` problems with seeds `base_seed..base_seed + count`.
pub fn generate_suite(concept: Concept, base_seed: u64, count: usize) -> Vec<GeneratedProblem> {
    (0..count as u64)
        .map(|k| generate(concept, base_seed + k))
        .collect()
}

// ---------------------------------------------------------------------------
// Drawing primitives. Pixels are sampled at integer coordinates; a predicate
// over (x, y) paints ink wherever it holds.

fn blank_panel() -> GrayRaster {
    GrayRaster::filled(PANEL_SIZE, PANEL_SIZE, BG)
}

fn paint(canvas: &mut GrayRaster, value: u8, pred: impl Fn(f64, f64) -> bool) {
    for y in 0..canvas.height() {
        for x in 0..canvas.width() {
            if pred(x as f64, y as f64) {
                canvas.set(x, y, value);
            }
        }
    }
}

fn ink_disc(canvas: &mut GrayRaster, cx: f64, cy: f64, r: f64) {
    let r2 = r * r;
    paint(canvas, INK, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        dx * dx + dy * dy <= r2
    });
}

fn erase_disc(canvas: &mut GrayRaster, cx: f64, cy: f64, r: f64) {
    let r2 = r * r;
    paint(canvas, BG, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        dx * dx + dy * dy <= r2
    });
}

/// Ring of mid-radius `r` and half-thickness `half_t`. `gap` carves out an
/// arc: (direction angle, half-width in radians).
fn ink_ring(canvas: &mut GrayRaster, cx: f64, cy: f64, r: f64, half_t: f64, gap: Option<(f64, f64)>) {
    paint(canvas, INK, |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        let d = (dx * dx + dy * dy).sqrt();
        if (d - r).abs() > half_t {
            return false;
        }
        match gap {
            None => true,
            Some((dir, half)) => {
                let mut delta = (dy.atan2(dx) - dir).rem_euclid(TAU);
                if delta > PI {
                    delta = TAU - delta;
                }
                delta > half
            }
        }
    });
}

/// Annulus with exact integer-arithmetic membership: ink where
/// `inner2 < dx² + dy² ≤ outer2`. Translating the integer center keeps the
/// pixel set congruent bit-for-bit.
fn ink_annulus_exact(canvas: &mut GrayRaster, cx: i64, cy: i64, inner2: i64, outer2: i64) {
    for y in 0..canvas.height() {
        for x in 0..canvas.width() {
            let dx = x as i64 - cx;
            let dy = y as i64 - cy;
            let d2 = dx * dx + dy * dy;
            if d2 > inner2 && d2 <= outer2 {
                canvas.set(x, y, INK);
            }
        }
    }
}

fn dist2_to_segment(px: f64, py: f64, a: (f64, f64), b: (f64, f64)) -> f64 {
    let (abx, aby) = (b.0 - a.0, b.1 - a.1);
    let (apx, apy) = (px - a.0, py - a.1);
    let len2 = abx * abx + aby * aby;
    let t = if len2 > 0.0 {
        ((apx * abx + apy * aby) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (dx, dy) = (apx - t * abx, apy - t * aby);
    dx * dx + dy * dy
}

fn ink_segment(canvas: &mut GrayRaster, a: (f64, f64), b: (f64, f64), half_w: f64) {
    let w2 = half_w * half_w;
    paint(canvas, INK, |x, y| dist2_to_segment(x, y, a, b) <= w2);
}

fn ink_polyline(canvas: &mut GrayRaster, pts: &[(f64, f64)], half_w: f64) {
    for pair in pts.windows(2) {
        ink_segment(canvas, pair[0], pair[1], half_w);
    }
}

fn point_in_polygon(x: f64, y: f64, pts: &[(f64, f64)]) -> bool {
    let mut inside = false;
    let mut j = pts.len() - 1;
    for i in 0..pts.len() {
        let (xi, yi) = pts[i];
        let (xj, yj) = pts[j];
        if (yi > y) != (yj > y) {
            let t = (y - yi) / (yj - yi);
            if x < xi + t * (xj - xi) {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn ink_polygon(canvas: &mut GrayRaster, pts: &[(f64, f64)]) {
    paint(canvas, INK, |x, y| point_in_polygon(x, y, pts));
}

fn rotate(p: (f64, f64), angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (p.0 * c - p.1 * s, p.0 * s + p.1 * c)
}

fn translate(p: (f64, f64), by: (f64, f64)) -> (f64, f64) {
    (p.0 + by.0, p.1 + by.1)
}

// ---------------------------------------------------------------------------
// Nuisance sampling.

/// Six points in the box, pairwise at least `min_dist` apart.
fn scatter(
    rng: &mut ChaCha8Rng,
    x_range: (f64, f64),
    y_range: (f64, f64),
    min_dist: f64,
) -> Vec<(f64, f64)> {
    let d2 = min_dist * min_dist;
    'restart: loop {
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(6);
        while pts.len() < 6 {
            let mut tries = 0;
            loop {
                let p = (
                    rng.gen_range(x_range.0..=x_range.1),
                    rng.gen_range(y_range.0..=y_range.1),
                );
                if pts
                    .iter()
                    .all(|q| (p.0 - q.0).powi(2) + (p.1 - q.1).powi(2) >= d2)
                {
                    pts.push(p);
                    break;
                }
                tries += 1;
                if tries > 200 {
                    continue 'restart;
                }
            }
        }
        return pts;
    }
}

/// Integer-coordinate variant of [`scatter`], for exact-congruence concepts.
fn scatter_int(
    rng: &mut ChaCha8Rng,
    x_range: (i64, i64),
    y_range: (i64, i64),
    min_dist: f64,
) -> Vec<(i64, i64)> {
    let d2 = min_dist * min_dist;
    'restart: loop {
        let mut pts: Vec<(i64, i64)> = Vec::with_capacity(6);
        while pts.len() < 6 {
            let mut tries = 0;
            loop {
                let p = (
                    rng.gen_range(x_range.0..=x_range.1),
                    rng.gen_range(y_range.0..=y_range.1),
                );
                if pts
                    .iter()
                    .all(|q| ((p.0 - q.0).pow(2) + (p.1 - q.1).pow(2)) as f64 >= d2)
                {
                    pts.push(p);
                    break;
                }
                tries += 1;
                if tries > 200 {
                    continue 'restart;
                }
            }
        }
        return pts;
    }
}

/// Six angles in [0, 2π), pairwise at least `min_sep` apart on the circle.
fn spread_angles(rng: &mut ChaCha8Rng, min_sep: f64) -> Vec<f64> {
    'restart: loop {
        let mut angles: Vec<f64> = Vec::with_capacity(6);
        while angles.len() < 6 {
            let mut tries = 0;
            loop {
                let a = rng.gen_range(0.0..TAU);
                let ok = angles.iter().all(|&b| {
                    let mut delta = (a - b).rem_euclid(TAU);
                    if delta > PI {
                        delta = TAU - delta;
                    }
                    delta >= min_sep
                });
                if ok {
                    angles.push(a);
                    break;
                }
                tries += 1;
                if tries > 200 {
                    continue 'restart;
                }
            }
        }
        return angles;
    }
}

const MIN_TRANSLATION: f64 = 5.0;
const MIN_ROTATION: f64 = 10.0 * PI / 180.0;

fn component_count(panel: &GrayRaster) -> usize {
    let binary = binarize(panel, 128, crate::config::Polarity::Ink);
    Regions::analyze(&binary).component_count()
}

// ---------------------------------------------------------------------------
// Concept builders. Each returns (panels, odd_index, params).

type Built = ([GrayRaster; 6], usize, serde_json::Value);

fn gen_closure(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let r_base: f64 = rng.gen_range(20.0..26.0);
    let half_t = 1.6;
    let gap_dir = rng.gen_range(0.0..TAU);
    let gap_half = rng.gen_range(0.3..0.5);
    let margin = r_base + half_t + 4.0;
    let centers = scatter(rng, (margin, 119.0 - margin), (margin, 119.0 - margin), MIN_TRANSLATION);
    let mut panels: Vec<GrayRaster> = Vec::with_capacity(6);
    let mut radii = Vec::with_capacity(6);
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let r = r_base + rng.gen_range(-1.5..1.5);
        radii.push(r);
        let mut panel = blank_panel();
        let gap = (i == odd).then_some((gap_dir, gap_half));
        ink_ring(&mut panel, cx, cy, r, half_t, gap);
        panels.push(panel);
    }
    let params = serde_json::json!({
        "radius_base": r_base,
        "radii": radii,
        "gap_half_angle": gap_half,
    });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_alignment(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let angle = rng.gen_range(0.0..TAU);
    let spacing: f64 = rng.gen_range(11.0..14.0);
    let dot_r = 2.4;
    let off_dot = rng.gen_range(1..=4);
    let off_mag = rng.gen_range(12.0..15.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let centers = scatter(rng, (45.0, 75.0), (45.0, 75.0), MIN_TRANSLATION);
    let dir = (angle.cos(), angle.sin());
    let norm = (-angle.sin(), angle.cos());
    let mut panels = Vec::with_capacity(6);
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let mut panel = blank_panel();
        for k in 0..6 {
            let t = (k as f64 - 2.5) * spacing + rng.gen_range(-1.5..1.5);
            let mut p = (cx + t * dir.0, cy + t * dir.1);
            if i == odd && k == off_dot {
                p = (p.0 + off_mag * norm.0, p.1 + off_mag * norm.1);
            }
            ink_disc(&mut panel, p.0, p.1, dot_r);
        }
        panels.push(panel);
    }
    let params = serde_json::json!({
        "angle": angle,
        "spacing": spacing,
        "displaced_dot": off_dot,
        "displacement": off_mag,
    });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_vertical_symmetry(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    // Kite symmetric about its long axis; the tip is longer than the tail so
    // the long-axis direction is unambiguous.
    let tip: f64 = rng.gen_range(34.0..38.0);
    let tail: f64 = rng.gen_range(26.0..30.0);
    let half_h: f64 = rng.gen_range(14.0..18.0);
    let bend_x = rng.gen_range(9.0..13.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let bend_y = rng.gen_range(9.0..13.0);
    let angles = spread_angles(rng, MIN_ROTATION);
    let centers = scatter(rng, (42.0, 78.0), (42.0, 78.0), MIN_TRANSLATION);
    let mut panels = Vec::with_capacity(6);
    for i in 0..6 {
        let mut top = (0.0, half_h);
        if i == odd {
            top = (bend_x, half_h + bend_y);
        }
        let quad = [(-tip, 0.0), top, (tail, 0.0), (0.0, -half_h)];
        let placed: Vec<(f64, f64)> = quad
            .iter()
            .map(|&p| translate(rotate(p, angles[i]), centers[i]))
            .collect();
        let mut panel = blank_panel();
        ink_polygon(&mut panel, &placed);
        panels.push(panel);
    }
    let params = serde_json::json!({
        "tip": tip,
        "tail": tail,
        "half_height": half_h,
        "bend": [bend_x, bend_y],
    });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_circle_center(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let r_out: i64 = rng.gen_range(24..=30);
    let r_in = r_out - 3;
    let dot_r2: i64 = 5; // 13-pixel dot
    // Offset the odd dot by at least 30% of the outer radius, staying well
    // inside the ring.
    let (dx, dy) = loop {
        let phi = rng.gen_range(0.0..TAU);
        let mag = rng.gen_range(0.32 * r_out as f64..(r_in - 4) as f64);
        let dx = (mag * phi.cos()).round() as i64;
        let dy = (mag * phi.sin()).round() as i64;
        let m2 = dx * dx + dy * dy;
        let lo = (0.3 * r_out as f64).powi(2);
        let hi = ((r_in - 3) as f64).powi(2);
        if (m2 as f64) >= lo && (m2 as f64) <= hi {
            break (dx, dy);
        }
    };
    let margin = r_out + 3;
    let centers = scatter_int(rng, (margin, 119 - margin), (margin, 119 - margin), MIN_TRANSLATION);
    let mut panels = Vec::with_capacity(6);
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let mut panel = blank_panel();
        ink_annulus_exact(&mut panel, cx, cy, r_in * r_in, r_out * r_out);
        let (ox, oy) = if i == odd { (cx + dx, cy + dy) } else { (cx, cy) };
        ink_annulus_exact(&mut panel, ox, oy, -1, dot_r2);
        panels.push(panel);
    }
    let params = serde_json::json!({
        "outer_radius": r_out,
        "dot_offset": [dx, dy],
    });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_connectedness(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let half_w = 1.3;
    loop {
        // Integer zigzag vertices around the origin; integer panel offsets
        // keep conforming strokes pixel-congruent.
        let start_sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let verts: Vec<(f64, f64)> = (0..6)
            .map(|k| {
                let x = -40.0 + 16.0 * k as f64;
                let amp = f64::from(rng.gen_range(9..=20));
                let sign = start_sign * if k % 2 == 0 { 1.0 } else { -1.0 };
                (x, sign * amp)
            })
            .collect();
        let bite_seg = rng.gen_range(1..=3);
        let mid = (
            ((verts[bite_seg].0 + verts[bite_seg + 1].0) / 2.0).round(),
            ((verts[bite_seg].1 + verts[bite_seg + 1].1) / 2.0).round(),
        );
        let bite_r = 3.8;
        let centers = scatter_int(rng, (46, 73), (46, 73), MIN_TRANSLATION);
        let mut panels = Vec::with_capacity(6);
        for (i, &(cx, cy)) in centers.iter().enumerate() {
            let offset = (cx as f64, cy as f64);
            let placed: Vec<(f64, f64)> = verts.iter().map(|&p| translate(p, offset)).collect();
            let mut panel = blank_panel();
            ink_polyline(&mut panel, &placed, half_w);
            if i == odd {
                erase_disc(&mut panel, mid.0 + offset.0, mid.1 + offset.1, bite_r);
            }
            panels.push(panel);
        }
        // The bite must split the stroke into exactly two pieces without
        // clipping a neighboring segment; otherwise re-sample the geometry.
        if component_count(&panels[odd]) != 2 {
            continue;
        }
        let params = serde_json::json!({
            "vertices": verts,
            "bite_segment": bite_seg,
        });
        return (panels.try_into().unwrap(), odd, params);
    }
}

fn gen_holes(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let r_base: f64 = rng.gen_range(15.0..20.0);
    let half_t = 1.8;
    let margin = r_base + half_t + 4.0;
    let centers = scatter(rng, (margin, 119.0 - margin), (margin, 119.0 - margin), MIN_TRANSLATION);
    let mut panels = Vec::with_capacity(6);
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let r = r_base + rng.gen_range(-1.0..1.0);
        let mut panel = blank_panel();
        if i == odd {
            ink_disc(&mut panel, cx, cy, r + half_t);
        } else {
            ink_ring(&mut panel, cx, cy, r, half_t, None);
        }
        panels.push(panel);
    }
    let params = serde_json::json!({ "radius_base": r_base });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_parallelism(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let half_len = 32.0;
    let sep = 18.0;
    let half_w = 1.3;
    loop {
        let angles = spread_angles(rng, MIN_ROTATION);
        let cross = rng.gen_range(0.7..0.9) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let centers = scatter(rng, (45.0, 75.0), (45.0, 75.0), MIN_TRANSLATION);
        let mut panels = Vec::with_capacity(6);
        for i in 0..6 {
            let theta = angles[i];
            let norm = (-theta.sin(), theta.cos());
            let mut panel = blank_panel();
            for s in [-1.0, 1.0] {
                let mid = (
                    centers[i].0 + s * norm.0 * sep / 2.0,
                    centers[i].1 + s * norm.1 * sep / 2.0,
                );
                let ang = if i == odd && s > 0.0 { theta + cross } else { theta };
                let d = (ang.cos(), ang.sin());
                let a = (mid.0 - half_len * d.0, mid.1 - half_len * d.1);
                let b = (mid.0 + half_len * d.0, mid.1 + half_len * d.1);
                ink_segment(&mut panel, a, b, half_w);
            }
            panels.push(panel);
        }
        // The rotated stroke must actually cross its partner.
        if component_count(&panels[odd]) != 1 {
            continue;
        }
        let params = serde_json::json!({
            "separation": sep,
            "cross_angle": cross,
        });
        return (panels.try_into().unwrap(), odd, params);
    }
}

/// Flag shape with integer endpoints: a vertical bar plus a diagonal arm.
/// Its mirror image cannot be produced by translation (or, for the oblique
/// variant, rotation) of the original.
fn flag_segments(mirrored: bool) -> [((f64, f64), (f64, f64)); 2] {
    let m = if mirrored { -1.0 } else { 1.0 };
    [
        ((0.0, -22.0), (0.0, 22.0)),
        ((0.0, -22.0), (m * 14.0, -34.0)),
    ]
}

fn gen_chirality(rng: &mut ChaCha8Rng, oblique: bool) -> Built {
    let odd = rng.gen_range(0..6);
    let half_w = 1.3;
    let angles = if oblique {
        spread_angles(rng, MIN_ROTATION)
    } else {
        vec![0.0; 6]
    };
    let mut panels = Vec::with_capacity(6);
    let centers: Vec<(f64, f64)> = if oblique {
        scatter(rng, (42.0, 78.0), (42.0, 78.0), MIN_TRANSLATION)
    } else {
        scatter_int(rng, (20, 99), (38, 94), MIN_TRANSLATION)
            .into_iter()
            .map(|(x, y)| (x as f64, y as f64))
            .collect()
    };
    for i in 0..6 {
        let mut panel = blank_panel();
        for (a, b) in flag_segments(i == odd) {
            let a = translate(rotate(a, angles[i]), centers[i]);
            let b = translate(rotate(b, angles[i]), centers[i]);
            ink_segment(&mut panel, a, b, half_w);
        }
        panels.push(panel);
    }
    let params = serde_json::json!({ "oblique": oblique });
    (panels.try_into().unwrap(), odd, params)
}

fn gen_homothecy(rng: &mut ChaCha8Rng) -> Built {
    let odd = rng.gen_range(0..6);
    let r: f64 = rng.gen_range(9.5..12.0);
    let ratio_odd = rng.gen_range(1.42..1.55);
    let half_t = 1.5;
    let margin = (2.0 * r + half_t + 4.0).ceil() as i64;
    let centers = scatter_int(rng, (margin, 119 - margin), (margin, 119 - margin), MIN_TRANSLATION);
    let mut panels = Vec::with_capacity(6);
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        let outer = if i == odd { ratio_odd * r } else { 2.0 * r };
        let mut panel = blank_panel();
        ink_ring(&mut panel, cx as f64, cy as f64, r, half_t, None);
        ink_ring(&mut panel, cx as f64, cy as f64, outer, half_t, None);
        panels.push(panel);
    }
    let params = serde_json::json!({
        "inner_radius": r,
        "odd_ratio": ratio_odd,
    });
    (panels.try_into().unwrap(), odd, params)
}
