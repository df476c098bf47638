//! `oddity` — solve, inspect, and generate six-panel odd-one-out problems.
//!
//! Exit codes for `solve`: 0 the problem was answered, 2 the solver skipped
//! (no feature found a strong enough outlier), 1 error.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use oddity_core::features::{check_rank_overrides, registry};
use oddity_core::generator::{generate, Concept};
use oddity_core::pointset::dump_cloud;
use oddity_core::raster::{load_grayscale, segment_grid, GrayRaster, SegmentOptions};
use oddity_core::report::{manifest_line, read_manifest, run_batch};
use oddity_core::solver::{solve_problem, solve_problem_explained, Verdict};
use oddity_core::{Center, Polarity, RunConfig};

#[derive(Parser)]
#[command(
    name = "oddity",
    version,
    about = "Find the odd panel out of a six-panel geometry puzzle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem from a single 3×2 sheet image or six panel images
    Solve(SolveArgs),
    /// Solve every problem in a JSON-lines manifest and tabulate accuracy
    Report(ReportArgs),
    /// Generate synthetic problems for a concept (or `all`)
    Generate(GenerateArgs),
    /// Solve one problem and show the full feature matrix behind the verdict
    Explain(ExplainArgs),
    /// List the feature bank with complexity ranks and stages
    ListFeatures(ListFeaturesArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum PolarityArg {
    /// Dark strokes on a light background
    Ink,
    /// Bright strokes on a dark background
    Bright,
}

impl From<PolarityArg> for Polarity {
    fn from(v: PolarityArg) -> Polarity {
        match v {
            PolarityArg::Ink => Polarity::Ink,
            PolarityArg::Bright => Polarity::Bright,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CenterArg {
    Mean,
    Median,
}

impl From<CenterArg> for Center {
    fn from(v: CenterArg) -> Center {
        match v {
            CenterArg::Mean => Center::Mean,
            CenterArg::Median => Center::Median,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

fn parse_rounding(s: &str) -> Result<(u8, u8), String> {
    let (cloud, feat) = s
        .split_once(',')
        .ok_or_else(|| format!("expected CLOUD,FEATURE decimals (e.g. \"1,2\"), got {s:?}"))?;
    let cloud: u8 = cloud.trim().parse().map_err(|_| format!("bad cloud decimals {cloud:?}"))?;
    let feat: u8 = feat.trim().parse().map_err(|_| format!("bad feature decimals {feat:?}"))?;
    Ok((cloud, feat))
}

fn parse_rank(s: &str) -> Result<(String, u32), String> {
    let (id, rank) = s
        .split_once('=')
        .ok_or_else(|| format!("expected FEATURE=RANK (e.g. density=3), got {s:?}"))?;
    let rank: u32 = rank.trim().parse().map_err(|_| format!("bad rank {rank:?}"))?;
    Ok((id.trim().to_string(), rank))
}

/// Pipeline knobs shared by the solving subcommands.
#[derive(Args)]
struct PipelineOpts {
    /// Gray level above which a pixel counts as background (after polarity)
    #[arg(long, default_value_t = 128)]
    binarize_threshold: u8,
    /// Which side of the threshold is the figure
    #[arg(long, value_enum, default_value_t = PolarityArg::Ink)]
    polarity: PolarityArg,
    /// Minimum |z| a feature needs before it may vote
    #[arg(long, default_value_t = 2.0)]
    z_threshold: f64,
    /// Statistic used to center each feature row
    #[arg(long, value_enum, default_value_t = CenterArg::Mean)]
    center: CenterArg,
    /// Decimals kept for cloud coordinates and feature values
    #[arg(long, value_parser = parse_rounding, default_value = "1,2", value_name = "CLOUD,FEAT")]
    rounding: (u8, u8),
    /// Blank the caption region (top-left corner of panel 1) before solving
    #[arg(long)]
    crop_caption: bool,
    /// Fail sheet segmentation instead of falling back to exact thirds
    #[arg(long)]
    no_gutter_fallback: bool,
    /// Add the signed-handedness feature to the bank
    #[arg(long)]
    enable_chirality_feature: bool,
    /// Worker threads for batch runs
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
    /// Override a feature's complexity rank (repeatable): FEATURE=RANK
    #[arg(long = "rank", value_parser = parse_rank, value_name = "FEATURE=RANK")]
    ranks: Vec<(String, u32)>,
}

impl PipelineOpts {
    fn to_config(&self) -> Result<RunConfig> {
        let config = RunConfig {
            binarize_threshold: self.binarize_threshold,
            polarity: self.polarity.into(),
            z_threshold: self.z_threshold,
            center: self.center.into(),
            cloud_rounding: self.rounding.0,
            feature_rounding: self.rounding.1,
            crop_caption: self.crop_caption,
            gutter_fallback: !self.no_gutter_fallback,
            enable_chirality_feature: self.enable_chirality_feature,
            complexity_overrides: self.ranks.iter().cloned().collect::<BTreeMap<_, _>>(),
            parallelism: self.parallelism,
        };
        config.validate()?;
        check_rank_overrides(&config)?;
        Ok(config)
    }
}

#[derive(Args)]
struct SolveArgs {
    /// One 3×2 sheet image, or six panel images in row-major order
    #[arg(required = true, num_args = 1..=6, value_name = "IMAGE")]
    images: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the result here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineOpts,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON-lines manifest: {"id", "concept"?, "odd_index"?, "panels"|"sheet"}
    manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineOpts,
}

#[derive(Args)]
struct GenerateArgs {
    /// Concept name, or `all` (see `generate --help` for the list):
    /// closure, alignment, vertical_symmetry, circle_center, connectedness,
    /// holes, parallelism, chirality_vertical, chirality_oblique, homothecy
    #[arg(long)]
    concept: String,
    /// Base seed; problem k uses seed + k
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Problems per concept
    #[arg(long, default_value_t = 1)]
    count: usize,
    /// Output directory (created if missing)
    #[arg(long)]
    out: PathBuf,
    /// Also write each problem as a single 3×2 sheet image
    #[arg(long)]
    sheets: bool,
}

#[derive(Args)]
struct ExplainArgs {
    /// One 3×2 sheet image, or six panel images in row-major order
    #[arg(required = true, num_args = 1..=6, value_name = "IMAGE")]
    images: Vec<PathBuf>,
    /// Directory for the feature matrix CSV (and cloud dumps)
    #[arg(long)]
    out: Option<PathBuf>,
    /// With --out: also write per-panel point clouds as CSV and SVG
    #[arg(long)]
    dump_clouds: bool,
    #[command(flatten)]
    pipeline: PipelineOpts,
}

#[derive(Args)]
struct ListFeaturesArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Include the optional signed-handedness feature
    #[arg(long)]
    enable_chirality_feature: bool,
    /// Override a feature's complexity rank (repeatable): FEATURE=RANK
    #[arg(long = "rank", value_parser = parse_rank, value_name = "FEATURE=RANK")]
    ranks: Vec<(String, u32)>,
}

fn main() -> ExitCode {
    // Exit codes are part of the contract (0 answered, 2 skipped, 1 error),
    // so route clap's usage errors to 1 instead of its default 2.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Report(args) => cmd_report(args).map(|()| ExitCode::SUCCESS),
        Command::Generate(args) => cmd_generate(args).map(|()| ExitCode::SUCCESS),
        Command::Explain(args) => cmd_explain(args).map(|()| ExitCode::SUCCESS),
        Command::ListFeatures(args) => cmd_list_features(args).map(|()| ExitCode::SUCCESS),
    }
}

/// Loads six panels from one sheet path or six panel paths.
fn load_panels(images: &[PathBuf], config: &RunConfig) -> Result<[GrayRaster; 6]> {
    match images.len() {
        1 => {
            let sheet = load_grayscale(&images[0])
                .with_context(|| format!("loading sheet {}", images[0].display()))?;
            let options = SegmentOptions {
                threshold: config.binarize_threshold,
                polarity: config.polarity,
                fallback: config.gutter_fallback,
            };
            Ok(segment_grid(&sheet, &options)
                .with_context(|| format!("segmenting sheet {}", images[0].display()))?)
        }
        6 => {
            let mut panels = Vec::with_capacity(6);
            for path in images {
                panels.push(
                    load_grayscale(path)
                        .with_context(|| format!("loading panel {}", path.display()))?,
                );
            }
            Ok(panels.try_into().expect("exactly six panels"))
        }
        n => bail!("expected 1 sheet image or 6 panel images, got {n}"),
    }
}

fn problem_id(images: &[PathBuf]) -> String {
    images[0]
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "problem".into())
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render_verdict(verdict: &Verdict, format: Format) -> String {
    match format {
        Format::Text => {
            let mut s = verdict.render_text();
            s.push('\n');
            s
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&verdict.to_json()).expect("verdict JSON");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("id\toutcome\tpanel\tvotes\tfeatures\n");
            s.push_str(&verdict.render_tsv());
            s.push('\n');
            s
        }
    }
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let config = args.pipeline.to_config()?;
    let panels = load_panels(&args.images, &config)?;
    let verdict = solve_problem(&panels, &problem_id(&args.images), &config)?;
    emit(&render_verdict(&verdict, args.format), args.out.as_deref())?;
    Ok(if verdict.skipped() {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    })
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let config = args.pipeline.to_config()?;
    let specs = read_manifest(&args.manifest)?;
    let report = run_batch(&specs, &config)?;
    let text = match args.format {
        Format::Text => report.render_table(),
        Format::Json => {
            let mut s = report.to_json_string();
            s.push('\n');
            s
        }
        Format::Csv => report.to_csv(),
    };
    emit(&text, args.out.as_deref())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let concepts: Vec<Concept> = if args.concept == "all" {
        Concept::ALL.to_vec()
    } else {
        vec![Concept::from_str(&args.concept)?]
    };
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    let mut lines = Vec::new();
    let mut written = 0usize;
    for concept in &concepts {
        for k in 0..args.count as u64 {
            let problem = generate(*concept, args.seed + k);
            let paths = problem.write_panels(&args.out)?;
            let rel: Vec<PathBuf> = paths
                .iter()
                .map(|p| p.file_name().map(PathBuf::from).expect("panel file name"))
                .collect();
            let rel: [PathBuf; 6] = rel.try_into().expect("six panel paths");
            lines.push(manifest_line(
                &problem.id(),
                Some(concept.name()),
                Some(problem.odd_index),
                &rel,
            ));
            if args.sheets {
                let sheet_path = args.out.join(format!("{}_sheet.pgm", problem.id()));
                problem.composite().write_pgm(&sheet_path)?;
            }
            written += 1;
        }
    }
    let manifest = args.out.join("manifest.json");
    std::fs::write(&manifest, lines.join("\n") + "\n")
        .with_context(|| format!("writing {}", manifest.display()))?;
    println!(
        "wrote {written} problem(s) ({} panels) and {} to {}",
        written * 6,
        manifest.file_name().unwrap().to_string_lossy(),
        args.out.display()
    );
    Ok(())
}

fn cmd_explain(args: ExplainArgs) -> Result<()> {
    let config = args.pipeline.to_config()?;
    let panels = load_panels(&args.images, &config)?;
    let id = problem_id(&args.images);
    let (verdict, matrix, panel_data) = solve_problem_explained(&panels, &id, &config)?;
    println!("{}", verdict.render_text());
    for w in &verdict.warnings {
        println!("warning: {w}");
    }
    println!();
    print!("{}", matrix.to_csv());
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("matrix.csv"), matrix.to_csv())?;
        if args.dump_clouds {
            for (i, data) in panel_data.iter().enumerate() {
                dump_cloud(&data.raw, dir, &format!("panel{i}_raw"))?;
                if let Some(norm) = &data.normalized {
                    dump_cloud(norm, dir, &format!("panel{i}_normalized"))?;
                }
            }
        }
        println!();
        println!("explanation artifacts written to {}", dir.display());
    }
    Ok(())
}

fn cmd_list_features(args: ListFeaturesArgs) -> Result<()> {
    let config = RunConfig {
        enable_chirality_feature: args.enable_chirality_feature,
        complexity_overrides: args.ranks.iter().cloned().collect::<BTreeMap<_, _>>(),
        ..RunConfig::default()
    };
    check_rank_overrides(&config)?;
    let features = registry(&config);
    match args.format {
        Format::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&features).expect("registry JSON")
            );
        }
        Format::Text | Format::Csv => {
            println!("{:<16} {:>4}  {}", "feature", "rank", "stage");
            for f in &features {
                println!("{:<16} {:>4}  {:?}", f.id, f.complexity_rank, f.stage);
            }
        }
    }
    Ok(())
}
