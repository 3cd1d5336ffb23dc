use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polydither::config::Density;
use polydither::error::Error;
use polydither::halftone::io::{read_gray, write_binary};
use polydither::halftone::{dither_ramp, Assets, GrayImage, ThresholdView};
use polydither::optimizer::{build_rank_table, OptimizerConfig, RankTable, Setup};
use polydither::polyomino::canonical::load_rule;
use polydither::polyomino::rule::ProductionRule;
use polydither::spectrum::compare::{self, matrix_patches, view_patches, white_noise_patches};
use polydither::spectrum::{
    estimate_spectrum, void_and_cluster_matrix, SpectrumEstimate, SpectrumStats,
};

#[derive(Parser)]
#[command(
    name = "polydither",
    version,
    about = "Blue-noise dithering with polyomino threshold structures"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize the rank table and write table, registry and rule files.
    BuildTables(BuildArgs),
    /// Dither a PGM or PNG image, or a constant level.
    Dither(DitherArgs),
    /// Dither a horizontal 0 to 1 ramp.
    Ramp(RampArgs),
    /// Power spectrum of a constant level.
    Spectrum(SpectrumArgs),
    /// Spectral statistics of this method against void-and-cluster.
    Compare(CompareArgs),
}

#[derive(Args)]
struct AssetArgs {
    /// Shape asset; defaults to the bundled G-hexomino.
    #[arg(long)]
    shape: Option<PathBuf>,
    /// Production rule asset; derived from the shape when only --shape is given.
    #[arg(long)]
    rule: Option<PathBuf>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    assets: AssetArgs,
    /// Pixels per polyomino cell edge.
    #[arg(long, default_value_t = 8)]
    s: u32,
    /// Initial dot density, as `p/q`.
    #[arg(long, default_value = "1/8")]
    d0: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Blur sigma of the ranking, in pixels.
    #[arg(long, default_value_t = 1.5)]
    sigma: f64,
    /// Output directory.
    #[arg(long, default_value = "tables")]
    out: PathBuf,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    assets: AssetArgs,
    /// Rank table written by build-tables.
    #[arg(long)]
    table: PathBuf,
}

#[derive(Args)]
struct DitherArgs {
    /// Input image (P5 PGM or PNG); omit to dither --level.
    input: Option<PathBuf>,
    #[command(flatten)]
    table: TableArgs,
    /// Tiling offset in pixels, `x,y`.
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    offset: String,
    /// Constant level in [0, 1], as a decimal or `p/q`.
    #[arg(long)]
    level: Option<String>,
    #[arg(long, default_value_t = 256)]
    width: u32,
    #[arg(long, default_value_t = 256)]
    height: u32,
    /// Output path; `.png` writes PNG, anything else P4 PBM.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RampArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
    offset: String,
    #[arg(long, default_value_t = 512)]
    width: u32,
    #[arg(long, default_value_t = 64)]
    height: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Structure,
    Vac,
    White,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    assets: AssetArgs,
    /// Required for the structure method.
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "structure")]
    method: Method,
    #[arg(long, default_value = "6/256")]
    level: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output prefix; writes `<out>.txt` and `<out>.png`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    table: TableArgs,
    #[arg(long, default_value = "6/256")]
    level: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Optional directory for the report and both spectra.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Exit status classes: bad flags or assets versus failures while working.
enum Failure {
    Usage(String),
    Runtime(String),
}

type Outcome<T> = Result<T, Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn runtime(e: impl std::fmt::Display) -> Failure {
    Failure::Runtime(e.to_string())
}

fn parse_fraction(text: &str) -> Outcome<f64> {
    let v = match text.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad level {text:?}")))?;
            let q: f64 = q
                .trim()
                .parse()
                .map_err(|_| usage(format!("bad level {text:?}")))?;
            p / q
        }
        None => text
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad level {text:?}")))?,
    };
    if !(0.0..=1.0).contains(&v) {
        return Err(usage(format!("level {text} outside [0, 1]")));
    }
    Ok(v)
}

fn parse_density(text: &str) -> Outcome<Density> {
    let (p, q) = text
        .split_once('/')
        .ok_or_else(|| usage(format!("density must be p/q, got {text:?}")))?;
    let p = p
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad density {text:?}")))?;
    let q = q
        .trim()
        .parse()
        .map_err(|_| usage(format!("bad density {text:?}")))?;
    Density::new(p, q).map_err(usage)
}

fn parse_offset(text: &str) -> Outcome<(i64, i64)> {
    let bad = || usage(format!("offset must be x,y, got {text:?}"));
    let (x, y) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        x.trim().parse().map_err(|_| bad())?,
        y.trim().parse().map_err(|_| bad())?,
    ))
}

fn rule(a: &AssetArgs) -> Outcome<ProductionRule> {
    load_rule(a.shape.as_deref(), a.rule.as_deref()).map_err(usage)
}

fn load_table(path: &Path, a: &AssetArgs) -> Outcome<(RankTable, Assets)> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read table {}: {e}", path.display())))?;
    let table = RankTable::parse(&text).map_err(usage)?;
    let assets = Assets::new(rule(a)?);
    if table.rule_hash != assets.rule.hash() {
        return Err(usage(Error::RuleMismatch(format!(
            "table {} was built for another rule",
            path.display()
        ))));
    }
    Ok((table, assets))
}

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> Outcome<()> {
    fs::write(path, bytes).map_err(|e| runtime(format!("cannot write {}: {e}", path.display())))
}

fn write_spectrum(prefix: &Path, spec: &SpectrumEstimate) -> Outcome<()> {
    write(&prefix.with_extension("txt"), spec.to_table())?;
    write(
        &prefix.with_extension("png"),
        spec.to_png().map_err(runtime)?,
    )
}

fn build_tables(a: &BuildArgs) -> Outcome<()> {
    let cfg = OptimizerConfig {
        s: a.s,
        d0: parse_density(&a.d0)?,
        seed: a.seed,
        sigma: a.sigma,
        ..OptimizerConfig::default()
    };
    cfg.validate().map_err(usage)?;
    let rule = rule(&a.assets)?;
    let start = Instant::now();
    let setup = Setup::new(rule, cfg.s).map_err(runtime)?;
    let (table, report) = build_rank_table(&setup, &cfg).map_err(runtime)?;
    fs::create_dir_all(&a.out)
        .map_err(|e| runtime(format!("cannot create {}: {e}", a.out.display())))?;
    write(&a.out.join("table.txt"), table.to_text())?;
    write(
        &a.out.join("registry.txt"),
        setup.catalog.registry.to_text(),
    )?;
    write(
        &a.out.join("production.txt"),
        setup.catalog.production.to_text(),
    )?;
    write(&a.out.join("rule.txt"), setup.rule.to_text())?;
    println!(
        "classes {} segments {} k0 {} exact-cover levels {} backtracks {}",
        report.classes, report.segments, report.k0, report.exact_cover_levels, report.backtracks
    );
    println!(
        "borders {:.1?} interiors {:.1?} ranking {:.1?} total {:.1?}",
        report.borders_time,
        report.interiors_time,
        report.ranking_time,
        start.elapsed()
    );
    println!(
        "table {} sha256 {}",
        a.out.join("table.txt").display(),
        table.hash()
    );
    Ok(())
}

fn dither(a: &DitherArgs) -> Outcome<()> {
    let offset = parse_offset(&a.offset)?;
    let (table, assets) = load_table(&a.table.table, &a.table.assets)?;
    let image = match (&a.input, &a.level) {
        (Some(p), None) => read_gray(p).map_err(|e| usage(format!("{}: {e}", p.display())))?,
        (None, Some(l)) => {
            GrayImage::constant(a.width, a.height, parse_fraction(l)?).map_err(usage)?
        }
        _ => return Err(usage("give exactly one of an input image or --level")),
    };
    let view = ThresholdView::build(image.width(), image.height(), &table, &assets, offset)
        .map_err(runtime)?;
    let out = view.dither(&image).map_err(runtime)?;
    write_binary(&a.out, &out, Some(&table.hash()))
        .map_err(|e| runtime(format!("{}: {e}", a.out.display())))
}

fn ramp(a: &RampArgs) -> Outcome<()> {
    let offset = parse_offset(&a.offset)?;
    if a.width < 2 {
        return Err(usage("ramp width must be at least 2"));
    }
    let (table, assets) = load_table(&a.table.table, &a.table.assets)?;
    let img = dither_ramp(a.width, a.height, &table, &assets, offset).map_err(runtime)?;
    write_binary(&a.out, &img, Some(&table.hash()))
        .map_err(|e| runtime(format!("{}: {e}", a.out.display())))
}

fn spectrum(a: &SpectrumArgs) -> Outcome<()> {
    let g = parse_fraction(&a.level)?;
    let (n, size) = (compare::PATCHES, compare::PATCH_SIZE);
    let (patches, periods) = match a.method {
        Method::Structure => {
            let path = a
                .table
                .as_ref()
                .ok_or_else(|| usage("--table is required for the structure method"))?;
            let (table, assets) = load_table(path, &a.assets)?;
            let p = view_patches(&table, &assets, g, n, size, a.seed).map_err(runtime)?;
            (p, vec![table.s as usize])
        }
        Method::Vac => {
            let m = void_and_cluster_matrix(
                compare::BASELINE_SIZE,
                compare::baseline_d0(),
                compare::BASELINE_SIGMA,
                a.seed,
            )
            .map_err(runtime)?;
            (
                matrix_patches(&m, g, n, size, a.seed).map_err(runtime)?,
                vec![compare::BASELINE_SIZE],
            )
        }
        Method::White => (
            white_noise_patches(g, n, size, a.seed).map_err(runtime)?,
            vec![],
        ),
    };
    let spec = estimate_spectrum(&patches, compare::DISPLAY_BLUR).map_err(runtime)?;
    write_spectrum(&a.out, &spec)?;
    println!("total non-DC power {:.6e}", spec.total_power());
    if g > 0.0 && g < 1.0 {
        let s = SpectrumStats::of(&spec, g, &periods).map_err(runtime)?;
        println!(
            "low_freq_ratio {:.4} radial_peak {:.3} spike {:.3}",
            s.low_frequency_ratio, s.radial_peak_ratio, s.spike_ratio
        );
        for (p, r) in s.lattice {
            println!("lattice/{p} {r:.3}");
        }
    }
    Ok(())
}

fn run_compare(a: &CompareArgs) -> Outcome<()> {
    let g = parse_fraction(&a.level)?;
    if !(g > 0.0 && g < 1.0) {
        return Err(usage("compare needs a level strictly between 0 and 1"));
    }
    let (table, assets) = load_table(&a.table.table, &a.table.assets)?;
    let c = compare::compare(&table, &assets, g, a.seed).map_err(runtime)?;
    let report = c.report();
    print!("{report}");
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)
            .map_err(|e| runtime(format!("cannot create {}: {e}", dir.display())))?;
        write(&dir.join("report.txt"), &report)?;
        write_spectrum(&dir.join("structure"), &c.ours)?;
        write_spectrum(&dir.join("vac"), &c.baseline)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::BuildTables(a) => build_tables(a),
        Command::Dither(a) => dither(a),
        Command::Ramp(a) => ramp(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Compare(a) => run_compare(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("polydither: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(m)) => {
            eprintln!("polydither: {m}");
            ExitCode::from(1)
        }
    }
}
