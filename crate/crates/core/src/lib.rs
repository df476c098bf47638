//! Odd-one-out solver for six-panel geometry puzzles.
//!
//! A problem is a 3×2 grid of panels. Five panels share some geometric
//! regularity (a closed contour, collinear dots, mirror symmetry, …) and one
//! panel breaks it. The solver never names the concept; it scores every panel
//! with a bank of cheap Gestalt-style features and looks for the panel that is
//! a statistical outlier:
//!
//! 1. [`raster`] — load a grayscale image, split a composite sheet into the
//!    six panels, binarize ink against paper.
//! 2. [`pointset`] — lift foreground pixels to a point cloud, then center,
//!    unrotate (PCA axes), and aggressively round it so that incidental pose
//!    differences between panels disappear.
//! 3. [`features`] — evaluate the feature bank per panel, producing a small
//!    feature × panel matrix.
//! 4. [`solver`] — z-score each feature row across the six panels, let every
//!    feature with a strong outlier vote for its panel, and answer (or skip
//!    when nothing stands out).
//!
//! [`generator`] synthesizes seeded problems for ten concepts so the whole
//! pipeline can be exercised without any scanned originals, and [`report`]
//! runs manifests of problems in batch.

pub mod config;
pub mod features;
pub mod generator;
pub mod pointset;
pub mod raster;
pub mod report;
pub mod solver;

pub mod topology;

pub use config::{Center, Polarity, RunConfig};
pub use raster::{BinaryRaster, GrayRaster};
pub use solver::{solve_problem, Outcome, Verdict};
