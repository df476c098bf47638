//! End-to-end flows through the public API: generated problems in, verdicts
//! out, exercising the composite-sheet route, caption cropping, alternate
//! centering, and the optional handedness feature.

use oddity_core::generator::{generate, Concept};
use oddity_core::raster::{segment_grid, GrayRaster, SegmentOptions};
use oddity_core::solver::{solve_problem, solve_problem_explained};
use oddity_core::{Center, RunConfig};

fn segment_options(config: &RunConfig) -> SegmentOptions {
    SegmentOptions {
        threshold: config.binarize_threshold,
        polarity: config.polarity,
        fallback: config.gutter_fallback,
    }
}

#[test]
fn panel_and_sheet_routes_give_the_same_verdict() {
    let config = RunConfig::default();
    let concepts = [
        Concept::Closure,
        Concept::Alignment,
        Concept::CircleCenter,
        Concept::Parallelism,
        Concept::Homothecy,
    ];
    for &concept in &concepts {
        for seed in 100..104 {
            let p = generate(concept, seed);
            let direct = solve_problem(&p.panels, &p.id(), &config).unwrap();

            let sheet = p.composite();
            let panels = segment_grid(&sheet, &segment_options(&config)).unwrap();
            let via_sheet = solve_problem(&panels, &p.id(), &config).unwrap();

            assert_eq!(
                direct.answer(),
                Some(p.odd_index),
                "{} seed {seed}: direct route missed the ground truth",
                concept.name()
            );
            assert_eq!(
                via_sheet.outcome, direct.outcome,
                "{} seed {seed}: sheet route changed the outcome",
                concept.name()
            );
            assert_eq!(
                via_sheet.votes, direct.votes,
                "{} seed {seed}: sheet route changed the votes",
                concept.name()
            );
        }
    }
}

#[test]
fn caption_crop_ignores_a_stamped_label() {
    let mut config = RunConfig::default();
    config.crop_caption = true;

    // Find a problem whose first panel keeps the top-left caption box
    // (15% x 10% of the panel) empty, so cropping only removes the label.
    let mut tested = 0;
    for seed in 0..40u64 {
        let p = generate(Concept::Holes, seed);
        let caption_clear = (0..18).all(|x| (0..12).all(|y| p.panels[0].get(x, y) == 255));
        if !caption_clear {
            continue;
        }

        let mut labeled = p.panels.clone();
        for x in 2..15 {
            for y in 2..10 {
                labeled[0].set(x, y, 0); // a dark "A." label blob
            }
        }
        let verdict = solve_problem(&labeled, &p.id(), &config).unwrap();
        assert_eq!(
            verdict.answer(),
            Some(p.odd_index),
            "seed {seed}: the label distracted the solver despite crop_caption"
        );
        tested += 1;
    }
    assert!(tested >= 10, "only {tested} seeds had a clear caption box");
}

#[test]
fn median_center_solves_the_generated_suites() {
    let mut config = RunConfig::default();
    config.center = Center::Median;
    for &concept in &[Concept::Closure, Concept::Alignment, Concept::Holes] {
        let mut correct = 0;
        for seed in 200..225 {
            let p = generate(concept, seed);
            let verdict = solve_problem(&p.panels, &p.id(), &config).unwrap();
            if verdict.answer() == Some(p.odd_index) {
                correct += 1;
            }
        }
        assert!(
            correct >= 23,
            "{}: median centering solved only {correct}/25",
            concept.name()
        );
    }
}

#[test]
fn blank_sheet_is_skipped_with_per_panel_warnings() {
    let config = RunConfig::default();
    let sheet = GrayRaster::from_raw(360, 240, vec![255; 360 * 240]).unwrap();
    let panels = segment_grid(&sheet, &segment_options(&config)).unwrap();
    let verdict = solve_problem(&panels, "blank", &config).unwrap();
    assert!(verdict.skipped());
    assert_eq!(verdict.votes, [0; 6]);
    assert_eq!(verdict.warnings.len(), 6, "one warning per empty panel");
}

#[test]
fn enabling_the_handedness_feature_keeps_upright_mirrors_solved() {
    let mut config = RunConfig::default();
    config.enable_chirality_feature = true;
    for seed in 300..320 {
        let p = generate(Concept::ChiralityVertical, seed);
        let (verdict, matrix, _) = solve_problem_explained(&p.panels, &p.id(), &config).unwrap();
        assert_eq!(
            matrix.rows.len(),
            10,
            "registry should grow to ten rows with the optional feature on"
        );
        assert_eq!(
            verdict.answer(),
            Some(p.odd_index),
            "seed {seed}: upright mirror went unsolved with the extra feature"
        );
    }
}
