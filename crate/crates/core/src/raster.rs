//! Grayscale rasters: loading, caption cropping, grid segmentation, and
//! binarization.
//!
//! The input to the pipeline is either six panel images or one composite
//! sheet holding a 3-column × 2-row grid of panels. Everything here works on
//! plain `u8` intensities in `[0, 255]`; color inputs are collapsed to the
//! channel mean on load.
//!
//! Supported containers: portable graymap (PGM, magics `P2`/`P5`) and
//! portable pixmap (PPM, magics `P3`/`P6`). PNG decoding is available behind
//! the `png` cargo feature.

use std::fmt;
use std::io::Read;
use std::path::Path;

use thiserror::Error;

use crate::config::Polarity;

#[derive(Debug, Error)]
pub enum RasterError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("io error reading {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("corrupt image: {0}")]
    CorruptImage(String),
    #[error("region {0} does not fit inside a {1}x{2} raster")]
    RegionOutOfBounds(Rect, usize, usize),
    #[error("no 3x2 panel grid detected ({0})")]
    GridNotDetected(String),
    #[error("invalid raster dimensions {0}x{1}")]
    InvalidDimensions(usize, usize),
}

/// Axis-aligned pixel rectangle, `x`/`y` being the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl fmt::Display for Rect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}+{}+{}", self.width, self.height, self.x, self.y)
    }
}

/// Row-major 8-bit grayscale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayRaster {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayRaster {
    /// Builds a raster from row-major intensities.
    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 || data.len() != width * height {
            return Err(RasterError::InvalidDimensions(width, height));
        }
        Ok(GrayRaster { width, height, data })
    }

    /// A `width`×`height` raster filled with one intensity.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        GrayRaster {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        debug_assert!(col < self.width && row < self.height);
        self.data[row * self.width + col]
    }

    pub fn set(&mut self, col: usize, row: usize, value: u8) {
        debug_assert!(col < self.width && row < self.height);
        self.data[row * self.width + col] = value;
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    /// Copies the rectangle `r` out of this raster.
    fn crop(&self, r: Rect) -> GrayRaster {
        debug_assert!(r.width > 0 && r.height > 0);
        debug_assert!(r.x + r.width <= self.width && r.y + r.height <= self.height);
        let mut data = Vec::with_capacity(r.width * r.height);
        for row in r.y..r.y + r.height {
            let start = row * self.width + r.x;
            data.extend_from_slice(&self.data[start..start + r.width]);
        }
        GrayRaster {
            width: r.width,
            height: r.height,
            data,
        }
    }

    /// Serializes as binary PGM (`P5`, maxval 255).
    pub fn to_pgm_bytes(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<(), RasterError> {
        std::fs::write(path, self.to_pgm_bytes()).map_err(|source| RasterError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

/// Row-major bitmap produced by [`binarize`]; `true` is foreground.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryRaster {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryRaster {
    pub fn from_bits(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 || bits.len() != width * height {
            return Err(RasterError::InvalidDimensions(width, height));
        }
        Ok(BinaryRaster { width, height, bits })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, col: usize, row: usize) -> bool {
        debug_assert!(col < self.width && row < self.height);
        self.bits[row * self.width + col]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn foreground_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

// ── loading ──────────────────────────────────────────────────────────────

/// Loads a grayscale raster from `path`.
///
/// PGM (`P2`/`P5`) and PPM (`P3`/`P6`) are always supported; PPM pixels are
/// collapsed to the mean of their three channels. With the `png` cargo
/// feature enabled, PNG files are decoded to 8-bit luma the same way.
pub fn load_grayscale(path: &Path) -> Result<GrayRaster, RasterError> {
    let mut file = std::fs::File::open(path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            RasterError::FileNotFound(path.display().to_string())
        } else {
            RasterError::Io {
                path: path.display().to_string(),
                source: e,
            }
        }
    })?;
    let mut bytes = Vec::new();
    file.read_to_end(&mut bytes).map_err(|source| RasterError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode_image(&bytes, path)
}

fn decode_image(bytes: &[u8], path: &Path) -> Result<GrayRaster, RasterError> {
    if bytes.starts_with(b"P2") || bytes.starts_with(b"P5") || bytes.starts_with(b"P3") || bytes.starts_with(b"P6") {
        return parse_pnm(bytes);
    }
    #[cfg(feature = "png")]
    if bytes.starts_with(&[0x89, b'P', b'N', b'G']) {
        return decode_png(bytes, path);
    }
    let magic: String = bytes
        .iter()
        .take(2)
        .map(|&b| if b.is_ascii_graphic() { b as char } else { '?' })
        .collect();
    Err(RasterError::UnsupportedFormat(format!(
        "{}: unrecognized magic {:?}",
        path.display(),
        magic
    )))
}

#[cfg(feature = "png")]
fn decode_png(bytes: &[u8], path: &Path) -> Result<GrayRaster, RasterError> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| RasterError::CorruptImage(format!("{}: {e}", path.display())))?;
    let rgb = img.to_rgb8();
    let (w, h) = (rgb.width() as usize, rgb.height() as usize);
    let data = rgb
        .pixels()
        .map(|p| channel_mean(p.0[0], p.0[1], p.0[2]))
        .collect();
    GrayRaster::from_raw(w, h, data)
}

fn channel_mean(r: u8, g: u8, b: u8) -> u8 {
    (f64::from(u16::from(r) + u16::from(g) + u16::from(b)) / 3.0).round() as u8
}

/// Streaming token reader for the PNM header/ASCII body. `#` starts a
/// comment that runs to end of line.
struct PnmTokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> PnmTokens<'a> {
    fn new(bytes: &'a [u8], pos: usize) -> Self {
        PnmTokens { bytes, pos }
    }

    fn next_token(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.bytes.len() {
            return None;
        }
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        Some(&self.bytes[start..self.pos])
    }

    fn next_usize(&mut self, what: &str) -> Result<usize, RasterError> {
        let tok = self
            .next_token()
            .ok_or_else(|| RasterError::CorruptImage(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| RasterError::CorruptImage(format!("invalid {what}")))
    }
}

fn parse_pnm(bytes: &[u8]) -> Result<GrayRaster, RasterError> {
    let magic = &bytes[..2];
    let (ascii, channels) = match magic {
        b"P2" => (true, 1),
        b"P5" => (false, 1),
        b"P3" => (true, 3),
        b"P6" => (false, 3),
        _ => unreachable!("checked by caller"),
    };
    let mut toks = PnmTokens::new(bytes, 2);
    let width = toks.next_usize("width")?;
    let height = toks.next_usize("height")?;
    let maxval = toks.next_usize("maxval")?;
    if width == 0 || height == 0 {
        return Err(RasterError::InvalidDimensions(width, height));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(RasterError::CorruptImage(format!("invalid maxval {maxval}")));
    }
    if maxval > 255 {
        return Err(RasterError::UnsupportedFormat(format!(
            "16-bit samples (maxval {maxval}) are not supported"
        )));
    }

    let n_samples = width * height * channels;
    let mut samples = Vec::with_capacity(n_samples);
    if ascii {
        for _ in 0..n_samples {
            let v = toks.next_usize("sample")?;
            if v > maxval {
                return Err(RasterError::CorruptImage(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            samples.push(v as u16);
        }
    } else {
        // Binary payload starts after exactly one whitespace byte past maxval.
        let start = toks.pos + 1;
        if start + n_samples > bytes.len() {
            return Err(RasterError::CorruptImage(format!(
                "truncated payload: expected {n_samples} bytes"
            )));
        }
        samples.extend(bytes[start..start + n_samples].iter().map(|&b| u16::from(b)));
    }

    let rescale = |v: u16| -> u8 {
        if maxval == 255 {
            v as u8
        } else {
            ((f64::from(v) * 255.0 / maxval as f64).round()) as u8
        }
    };
    let data: Vec<u8> = if channels == 1 {
        samples.into_iter().map(rescale).collect()
    } else {
        samples
            .chunks_exact(3)
            .map(|c| channel_mean(rescale(c[0]), rescale(c[1]), rescale(c[2])))
            .collect()
    };
    GrayRaster::from_raw(width, height, data)
}

// ── caption crop ─────────────────────────────────────────────────────────

/// Returns a copy of `raster` with `region` blanked to the background
/// intensity for `polarity` (255 for ink-on-paper, 0 for bright-on-dark).
///
/// An empty region (zero width or height) is a no-op; a region that does not
/// fit inside the raster is an error.
pub fn crop_caption(
    raster: &GrayRaster,
    region: Rect,
    polarity: Polarity,
) -> Result<GrayRaster, RasterError> {
    if region.width == 0 || region.height == 0 {
        return Ok(raster.clone());
    }
    if region.x + region.width > raster.width || region.y + region.height > raster.height {
        return Err(RasterError::RegionOutOfBounds(region, raster.width, raster.height));
    }
    let blank = match polarity {
        Polarity::Ink => 255,
        Polarity::Bright => 0,
    };
    let mut out = raster.clone();
    for row in region.y..region.y + region.height {
        for col in region.x..region.x + region.width {
            out.set(col, row, blank);
        }
    }
    Ok(out)
}

/// Default caption region: the top-left 15% × 10% of a panel, where a figure
/// label usually sits in scanned sheets.
pub fn default_caption_region(panel: &GrayRaster) -> Rect {
    Rect {
        x: 0,
        y: 0,
        width: (panel.width() as f64 * 0.15).round() as usize,
        height: (panel.height() as f64 * 0.10).round() as usize,
    }
}

// ── binarization ─────────────────────────────────────────────────────────

/// Thresholds a grayscale raster into a foreground bitmap.
///
/// With [`Polarity::Ink`] the intensity is inverted first (`255 - v`), so dark
/// strokes on light paper become foreground; with [`Polarity::Bright`] the raw
/// value is used. In both cases the comparison is strict: `value > threshold`.
pub fn binarize(raster: &GrayRaster, threshold: u8, polarity: Polarity) -> BinaryRaster {
    let bits = raster
        .pixels()
        .iter()
        .map(|&v| {
            let adjusted = match polarity {
                Polarity::Ink => 255 - v,
                Polarity::Bright => v,
            };
            adjusted > threshold
        })
        .collect();
    BinaryRaster {
        width: raster.width,
        height: raster.height,
        bits,
    }
}

// ── grid segmentation ────────────────────────────────────────────────────

/// How [`segment_grid`] decides what counts as background, and whether it may
/// fall back to an exact thirds/halves split.
#[derive(Debug, Clone, Copy)]
pub struct SegmentOptions {
    pub threshold: u8,
    pub polarity: Polarity,
    /// When gutter detection does not yield a 3×2 band structure, split the
    /// sheet into exact thirds and halves instead of failing.
    pub fallback: bool,
}

impl Default for SegmentOptions {
    fn default() -> Self {
        SegmentOptions {
            threshold: 128,
            polarity: Polarity::Ink,
            fallback: true,
        }
    }
}

/// Minimum run of all-background columns/rows that counts as a gutter.
const MIN_GUTTER_RUN: usize = 3;

/// Splits a composite sheet into its six panels, row-major (top-left,
/// top-center, top-right, bottom-left, bottom-center, bottom-right).
///
/// Maximal runs of at least [`MIN_GUTTER_RUN`] all-background columns (rows)
/// are treated as gutters; the content runs between them are the column (row)
/// bands. A clean sheet yields exactly 3 column bands and 2 row bands, and
/// each panel is the intersection of one column band with one row band, so
/// every foreground pixel lands in exactly one panel. Any other band count
/// falls back to an exact thirds/halves split (or errors with
/// [`RasterError::GridNotDetected`] when `fallback` is off).
pub fn segment_grid(
    raster: &GrayRaster,
    opts: &SegmentOptions,
) -> Result<[GrayRaster; 6], RasterError> {
    let binary = binarize(raster, opts.threshold, opts.polarity);

    let mut col_has_fg = vec![false; raster.width];
    let mut row_has_fg = vec![false; raster.height];
    for row in 0..raster.height {
        for col in 0..raster.width {
            if binary.get(col, row) {
                col_has_fg[col] = true;
                row_has_fg[row] = true;
            }
        }
    }

    let col_bands = content_bands(&col_has_fg);
    let row_bands = content_bands(&row_has_fg);

    if col_bands.len() == 3 && row_bands.len() == 2 {
        let mut panels = Vec::with_capacity(6);
        for &(y0, y1) in &row_bands {
            for &(x0, x1) in &col_bands {
                panels.push(raster.crop(Rect {
                    x: x0,
                    y: y0,
                    width: x1 - x0,
                    height: y1 - y0,
                }));
            }
        }
        return Ok(panels.try_into().expect("exactly six panels"));
    }

    if !opts.fallback {
        return Err(RasterError::GridNotDetected(format!(
            "found {} column bands and {} row bands",
            col_bands.len(),
            row_bands.len()
        )));
    }

    // Exact thirds/halves: boundaries at floor(i*extent/n) partition every
    // pixel (foreground included) into exactly one panel.
    let xs = [0, raster.width / 3, 2 * raster.width / 3, raster.width];
    let ys = [0, raster.height / 2, raster.height];
    let mut panels = Vec::with_capacity(6);
    for r in 0..2 {
        for c in 0..3 {
            let rect = Rect {
                x: xs[c],
                y: ys[r],
                width: xs[c + 1] - xs[c],
                height: ys[r + 1] - ys[r],
            };
            if rect.width == 0 || rect.height == 0 {
                return Err(RasterError::GridNotDetected(format!(
                    "sheet {}x{} too small to split into thirds/halves",
                    raster.width, raster.height
                )));
            }
            panels.push(raster.crop(rect));
        }
    }
    Ok(panels.try_into().expect("exactly six panels"))
}

/// Maximal runs of content positions, where a gap of fewer than
/// [`MIN_GUTTER_RUN`] background positions does not split a run.
/// Returned as half-open `(start, end)` ranges.
fn content_bands(has_content: &[bool]) -> Vec<(usize, usize)> {
    // First mark gutters (long background runs), then take the complement.
    let n = has_content.len();
    let mut is_gutter = vec![false; n];
    let mut i = 0;
    while i < n {
        if !has_content[i] {
            let start = i;
            while i < n && !has_content[i] {
                i += 1;
            }
            if i - start >= MIN_GUTTER_RUN {
                for g in &mut is_gutter[start..i] {
                    *g = true;
                }
            }
        } else {
            i += 1;
        }
    }
    let mut bands = Vec::new();
    let mut i = 0;
    while i < n {
        if !is_gutter[i] {
            let start = i;
            while i < n && !is_gutter[i] {
                i += 1;
            }
            bands.push((start, i));
        } else {
            i += 1;
        }
    }
    // A sheet with leading/trailing short background gaps can open or close a
    // band on background positions; trim those so bands are content-tight.
    bands
        .into_iter()
        .filter_map(|(mut s, mut e)| {
            while s < e && !has_content[s] {
                s += 1;
            }
            while e > s && !has_content[e - 1] {
                e -= 1;
            }
            (s < e).then_some((s, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pgm_from(bytes: &[u8]) -> Result<GrayRaster, RasterError> {
        decode_image(bytes, Path::new("<memory>"))
    }

    #[test]
    fn parses_ascii_pgm() {
        let r = pgm_from(b"P2\n# comment\n2 1\n255\n0 255\n").unwrap();
        assert_eq!((r.width(), r.height()), (2, 1));
        assert_eq!(r.pixels(), &[0, 255]);
    }

    #[test]
    fn parses_binary_pgm() {
        let mut bytes = b"P5\n3 2\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30, 40, 50, 60]);
        let r = pgm_from(&bytes).unwrap();
        assert_eq!((r.width(), r.height()), (3, 2));
        assert_eq!(r.pixels(), &[10, 20, 30, 40, 50, 60]);
    }

    #[test]
    fn rgb_collapses_to_channel_mean() {
        // One pixel (10, 20, 30): mean is exactly 20.
        let r = pgm_from(b"P3\n2 2\n255\n10 20 30  0 0 0  255 255 255  9 9 9\n").unwrap();
        assert_eq!(r.pixels(), &[20, 0, 255, 9]);
    }

    #[test]
    fn maxval_rescales_to_255() {
        let r = pgm_from(b"P2\n2 1\n15\n0 15\n").unwrap();
        assert_eq!(r.pixels(), &[0, 255]);
        let r = pgm_from(b"P2\n3 1\n100\n0 50 100\n").unwrap();
        assert_eq!(r.pixels(), &[0, 128, 255]);
    }

    #[test]
    fn pgm_roundtrips_through_writer() {
        let r = GrayRaster::from_raw(3, 2, vec![0, 1, 2, 253, 254, 255]).unwrap();
        assert_eq!(pgm_from(&r.to_pgm_bytes()).unwrap(), r);
    }

    #[test]
    fn corrupt_headers_are_rejected() {
        assert!(matches!(
            pgm_from(b"P2\n2 2\n255\n0 0 0\n"),
            Err(RasterError::CorruptImage(_))
        ));
        let mut truncated = b"P5\n4 4\n255\n".to_vec();
        truncated.extend_from_slice(&[0; 7]);
        assert!(matches!(pgm_from(&truncated), Err(RasterError::CorruptImage(_))));
        assert!(matches!(
            pgm_from(b"BM not an image"),
            Err(RasterError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            pgm_from(b"P2\n0 4\n255\n"),
            Err(RasterError::InvalidDimensions(0, 4))
        ));
        assert!(matches!(
            pgm_from(b"P2\n2 1\n65536\n0 0\n"),
            Err(RasterError::CorruptImage(_))
        ));
    }

    #[test]
    fn missing_file_reports_file_not_found() {
        let err = load_grayscale(Path::new("/nonexistent/x.pgm")).unwrap_err();
        assert!(matches!(err, RasterError::FileNotFound(_)));
    }

    #[test]
    fn crop_blanks_exactly_the_region() {
        // 10x10 all-ink raster; blanking a 3x3 corner leaves 91 dark pixels.
        let r = GrayRaster::filled(10, 10, 0);
        let out = crop_caption(
            &r,
            Rect { x: 0, y: 0, width: 3, height: 3 },
            Polarity::Ink,
        )
        .unwrap();
        let dark = out.pixels().iter().filter(|&&v| v == 0).count();
        assert_eq!(dark, 91);
        assert_eq!(out.get(0, 0), 255);
        assert_eq!(out.get(2, 2), 255);
        assert_eq!(out.get(3, 3), 0);
    }

    #[test]
    fn empty_crop_region_is_identity() {
        let r = GrayRaster::filled(5, 5, 7);
        let out = crop_caption(
            &r,
            Rect { x: 2, y: 2, width: 0, height: 4 },
            Polarity::Ink,
        )
        .unwrap();
        assert_eq!(out, r);
    }

    #[test]
    fn out_of_bounds_crop_is_rejected() {
        let r = GrayRaster::filled(5, 5, 7);
        let err = crop_caption(
            &r,
            Rect { x: 3, y: 0, width: 3, height: 1 },
            Polarity::Ink,
        )
        .unwrap_err();
        assert!(matches!(err, RasterError::RegionOutOfBounds(..)));
    }

    #[test]
    fn binarize_thresholds_strictly() {
        // Bright polarity, threshold 128: only values > 128 are foreground.
        let r = GrayRaster::from_raw(3, 1, vec![100, 128, 200]).unwrap();
        let b = binarize(&r, 128, Polarity::Bright);
        assert_eq!(b.bits(), &[false, false, true]);
    }

    #[test]
    fn ink_polarity_inverts_before_thresholding() {
        let r = GrayRaster::from_raw(3, 1, vec![0, 127, 255]).unwrap();
        let b = binarize(&r, 128, Polarity::Ink);
        // 255-0=255 > 128; 255-127=128 not > 128; 255-255=0.
        assert_eq!(b.bits(), &[true, false, false]);
    }

    #[test]
    fn binarize_is_idempotent_on_its_own_output() {
        let r = GrayRaster::from_raw(4, 1, vec![3, 130, 128, 255]).unwrap();
        let b = binarize(&r, 128, Polarity::Bright);
        let regray = GrayRaster::from_raw(
            4,
            1,
            b.bits().iter().map(|&bit| if bit { 255 } else { 0 }).collect(),
        )
        .unwrap();
        assert_eq!(binarize(&regray, 128, Polarity::Bright), b);
    }

    #[test]
    fn binarize_foreground_is_monotone_in_threshold() {
        // Deterministic pseudo-random raster; raising the threshold must never
        // grow the foreground.
        let data: Vec<u8> = (0..256u32).map(|i| ((i * 37 + 11) % 256) as u8).collect();
        let r = GrayRaster::from_raw(16, 16, data).unwrap();
        let mut prev = usize::MAX;
        for t in [0u8, 31, 64, 127, 128, 200, 255] {
            let count = binarize(&r, t, Polarity::Ink).foreground_count();
            assert!(count <= prev, "threshold {t} grew foreground");
            prev = count;
        }
    }

    /// Builds a sheet of solid-ink panels separated by white gutters.
    fn sheet_with_gutters(panel: usize, gutter: usize) -> GrayRaster {
        let w = panel * 3 + gutter * 2;
        let h = panel * 2 + gutter;
        let mut r = GrayRaster::filled(w, h, 255);
        for band_r in 0..2 {
            for band_c in 0..3 {
                let x0 = band_c * (panel + gutter);
                let y0 = band_r * (panel + gutter);
                for y in y0..y0 + panel {
                    for x in x0..x0 + panel {
                        r.set(x, y, 0);
                    }
                }
            }
        }
        r
    }

    #[test]
    fn segments_panels_between_gutters() {
        let sheet = sheet_with_gutters(90, 10);
        let panels = segment_grid(&sheet, &SegmentOptions::default()).unwrap();
        assert_eq!(panels.len(), 6);
        for p in &panels {
            assert_eq!((p.width(), p.height()), (90, 90));
            assert!(p.pixels().iter().all(|&v| v == 0), "panel should be solid ink");
        }
    }

    #[test]
    fn segmentation_falls_back_to_exact_thirds() {
        // All-ink sheet: no gutters anywhere, so detection fails and the
        // fallback splits 300x200 into six 100x100 panels.
        let sheet = GrayRaster::filled(300, 200, 0);
        let panels = segment_grid(&sheet, &SegmentOptions::default()).unwrap();
        assert_eq!(panels.len(), 6);
        for p in &panels {
            assert_eq!((p.width(), p.height()), (100, 100));
        }
    }

    #[test]
    fn blank_sheet_without_fallback_is_an_error() {
        let sheet = GrayRaster::filled(120, 80, 255);
        let opts = SegmentOptions { fallback: false, ..SegmentOptions::default() };
        assert!(matches!(
            segment_grid(&sheet, &opts),
            Err(RasterError::GridNotDetected(_))
        ));
    }

    #[test]
    fn segmentation_preserves_foreground_count() {
        let sheet = sheet_with_gutters(30, 5);
        let total = binarize(&sheet, 128, Polarity::Ink).foreground_count();
        let panels = segment_grid(&sheet, &SegmentOptions::default()).unwrap();
        let sum: usize = panels
            .iter()
            .map(|p| binarize(p, 128, Polarity::Ink).foreground_count())
            .sum();
        assert_eq!(sum, total);
    }
}
