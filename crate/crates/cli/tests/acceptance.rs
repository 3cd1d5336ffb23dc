//! One line per acceptance criterion. Runs two full default builds through
//! the binary, so it takes several minutes.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use polydither::halftone::{expected_black, Assets, ThresholdView};
use polydither::optimizer::{RankTable, Setup};
use polydither::polyomino::canonical::{canonical_g_hexomino, canonical_rule, G_HEXOMINO_NAME};
use polydither::polyomino::cover::{rectangle_cells, solve_exact_cover};
use polydither::polyomino::rule::derive_production_rule;
use polydither::polyomino::shape::Orientation;
use polydither::spectrum::compare::{
    compare, white_noise_patches, BASELINE_SIZE, PATCHES, PATCH_SIZE,
};
use polydither::spectrum::{estimate_spectrum, low_frequency_energy_ratio};
use polydither::structure::layout::ClassLayouts;
use polydither::structure::production::{verify_production, ClassCatalog};

const RECTIFY_LIMIT: Duration = Duration::from_secs(10);
const RULE_LIMIT: Duration = Duration::from_secs(60);
const BUILD_LIMIT: Duration = Duration::from_secs(30 * 60);
const MAX_FIXED_DEPTH: usize = 5;
const TONE_LEVELS: [f64; 5] = [
    1.0 / 256.0,
    6.0 / 256.0,
    32.0 / 256.0,
    128.0 / 256.0,
    250.0 / 256.0,
];
const TONE_VIEW: u32 = 512;
const STACK_VIEW: u32 = 256;
const STACK_LEVELS: u32 = 1024;
const LEVEL: f64 = 6.0 / 256.0;
const LOW_FREQ_MAX: f64 = 0.35;
const WHITE_TOLERANCE: f64 = 0.15;
const BASELINE_PEAK_MIN: f64 = 3.0;
const OURS_PEAK_MAX: f64 = 2.0;
const SEED: u64 = 1;

struct Report {
    failed: usize,
}

impl Report {
    fn line(&mut self, n: u32, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        println!(
            "criterion {n}: {} {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn bin(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_polydither"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if o.status.success() {
        Ok(String::from_utf8_lossy(&o.stdout).into_owned())
    } else {
        Err(format!(
            "exit {:?}: {}",
            o.status.code(),
            String::from_utf8_lossy(&o.stderr)
        ))
    }
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn rectification() -> (bool, String) {
    let t = Instant::now();
    let shape = canonical_g_hexomino().expect("bundled shape");
    let sols = solve_exact_cover(&rectangle_cells(12, 9), &shape, 1);
    let elapsed = t.elapsed();
    let Some(sol) = sols.first() else {
        return (false, "no tiling of 12x9 found".into());
    };
    let mut cells = BTreeSet::new();
    let mut ok = sol.len() == 18;
    for tr in sol {
        for c in tr.place(&shape) {
            ok &= (0..12).contains(&c.0) && (0..9).contains(&c.1) && cells.insert(c);
        }
    }
    ok &= cells.len() == 108;
    (
        ok && elapsed < RECTIFY_LIMIT,
        format!(
            "{} copies tile 12x9, {} cells, {elapsed:.2?} (limit {RECTIFY_LIMIT:?})",
            sol.len(),
            cells.len()
        ),
    )
}

fn production_rule() -> (bool, String) {
    let t = Instant::now();
    let shape = canonical_g_hexomino().expect("bundled shape");
    let rule = match derive_production_rule(&shape, G_HEXOMINO_NAME, 9) {
        Ok(r) => r,
        Err(e) => return (false, e.to_string()),
    };
    let elapsed = t.elapsed();
    let big: BTreeSet<_> = shape.scaled(9).cells().iter().copied().collect();
    let mut covered = BTreeSet::new();
    let (mut spill, mut overlap) = (0, 0);
    for tr in rule.children() {
        for c in tr.place(&shape) {
            spill += usize::from(!big.contains(&c));
            overlap += usize::from(!covered.insert(c));
        }
    }
    let gaps = big.difference(&covered).count();
    let frozen = canonical_rule().map(|r| r == rule).unwrap_or(false);
    let ok = rule.children().len() == 81 && spill == 0 && overlap == 0 && gaps == 0 && frozen;
    (
        ok && elapsed < RULE_LIMIT,
        format!(
            "{} children, gaps {gaps} overlaps {overlap} spills {spill}, matches bundled rule {frozen}, {elapsed:.2?} (limit {RULE_LIMIT:?})",
            rule.children().len()
        ),
    )
}

fn finiteness() -> (bool, String) {
    let rule = canonical_rule().expect("bundled rule");
    let catalog = ClassCatalog::enumerate(&rule);
    let layouts = match ClassLayouts::build(&catalog, &rule, 4) {
        Ok(l) => l,
        Err(e) => return (false, e.to_string()),
    };
    let mut worst = 0;
    let mut ok = catalog.production.is_closed();
    for o in Orientation::all() {
        let depths = catalog.classes_by_depth(o, MAX_FIXED_DEPTH as u32 + 1);
        let labels: Vec<usize> = depths
            .iter()
            .map(|set| {
                set.iter()
                    .filter_map(|&c| layouts.class(c))
                    .flat_map(|l| l.segments.iter().map(|g| g.id))
                    .collect::<BTreeSet<_>>()
                    .len()
            })
            .collect();
        match (0..=MAX_FIXED_DEPTH)
            .find(|&d| depths[d].len() == depths[d + 1].len() && labels[d] == labels[d + 1])
        {
            Some(d) => worst = worst.max(d),
            None => ok = false,
        }
    }
    let unique = verify_production(&catalog, &rule, Orientation::IDENTITY, 2);
    ok &= unique.is_ok();
    (
        ok,
        format!(
            "{} classes, {} segment labels, fixed by depth {worst} (limit {MAX_FIXED_DEPTH}), closed {}, representatives agree {}",
            catalog.registry.len(),
            layouts.segments.len(),
            catalog.production.is_closed(),
            unique.map(|n| format!("({n} parents)")).unwrap_or_else(|e| e.to_string())
        ),
    )
}

fn integrity(table: &RankTable, elapsed: Duration) -> (bool, String) {
    let n = table.tile_pixels();
    let perms = table.classes.values().all(|c| {
        let mut r = c.ranks.clone();
        r.sort_unstable();
        r.iter().copied().eq(0..384)
    });
    let setup = Setup::new(canonical_rule().expect("bundled rule"), 8);
    let shared = setup
        .map_err(|e| e.to_string())
        .and_then(|s| table.check_segments(&s.layouts).map_err(|e| e.to_string()));
    let ok = table.s == 8 && n == 384 && perms && shared.is_ok() && elapsed < BUILD_LIMIT;
    (
        ok,
        format!(
            "{} classes of {n} ranks, permutations {perms}, shared band pixels {}, build {elapsed:.1?} (limit {BUILD_LIMIT:?})",
            table.classes.len(),
            shared.map(|k| format!("agree ({k} checked)")).unwrap_or_else(|e| e),
        ),
    )
}

fn tone(table: &RankTable, assets: &Assets) -> (bool, String) {
    let view = match ThresholdView::build(TONE_VIEW, TONE_VIEW, table, assets, (13, 7)) {
        Ok(v) => v,
        Err(e) => return (false, e.to_string()),
    };
    let mut ok = true;
    let mut parts = Vec::new();
    for g in TONE_LEVELS {
        let want = expected_black(384, g);
        let counts = view.black_per_tile(&view.dither_constant(g));
        let complete: Vec<u32> = (0..counts.len())
            .filter(|&t| view.is_complete(t))
            .map(|t| counts[t])
            .collect();
        let brute = table.classes.values().all(|c| {
            c.ranks
                .iter()
                .filter(|&&r| g < (r as f64 + 0.5) / 384.0)
                .count()
                == want
        });
        ok &= brute && !complete.is_empty() && complete.iter().all(|&c| c as usize == want);
        parts.push(format!("{}/256 -> {want}", (g * 256.0).round()));
    }
    let black = expected_black(384, LEVEL);
    ok &= 384 - black == 9;
    (
        ok,
        format!(
            "black per complete tile {} in every tile and class; at 6/256 the minority (white) count is {} and black is {black}",
            parts.join(", "),
            384 - black
        ),
    )
}

fn stacking(table: &RankTable, assets: &Assets) -> (bool, String) {
    let view = match ThresholdView::build(STACK_VIEW, STACK_VIEW, table, assets, (101, 57)) {
        Ok(v) => v,
        Err(e) => return (false, e.to_string()),
    };
    let mut prev = view.dither_constant(0.0);
    let mut violations = 0usize;
    for k in 1..STACK_LEVELS {
        let cur = view.dither_constant(k as f64 / (STACK_LEVELS - 1) as f64);
        violations += prev
            .pixels()
            .iter()
            .zip(cur.pixels())
            .filter(|(a, b)| !**a && **b)
            .count();
        prev = cur;
    }
    let ends = view.dither_constant(0.0).black_count() == (STACK_VIEW * STACK_VIEW) as usize
        && prev.black_count() == 0;
    (
        violations == 0 && ends,
        format!("{STACK_LEVELS} levels over {STACK_VIEW}x{STACK_VIEW}: {violations} white-to-black flips, solid at both ends {ends}"),
    )
}

fn main() -> ExitCode {
    let mut r = Report { failed: 0 };
    let (ok, d) = rectification();
    r.line(1, ok, d);
    let (ok, d) = production_rule();
    r.line(2, ok, d);
    let (ok, d) = finiteness();
    r.line(3, ok, d);

    let dir = tempfile::tempdir().expect("temp dir");
    let (one, two) = (dir.path().join("one"), dir.path().join("two"));
    let t = Instant::now();
    let first = bin(&[
        "build-tables",
        "--seed",
        &SEED.to_string(),
        "--out",
        path(&one),
    ]);
    let build_time = t.elapsed();
    let table = first.and_then(|_| {
        let text = std::fs::read_to_string(one.join("table.txt")).map_err(|e| e.to_string())?;
        RankTable::parse(&text).map_err(|e| e.to_string())
    });
    let table = match table {
        Ok(t) => t,
        Err(e) => {
            for n in 4..=9 {
                r.line(n, false, format!("default build failed: {e}"));
            }
            return ExitCode::FAILURE;
        }
    };
    let assets = Assets::new(canonical_rule().expect("bundled rule"));
    let (ok, d) = integrity(&table, build_time);
    r.line(4, ok, d);
    let (ok, d) = tone(&table, &assets);
    r.line(5, ok, d);
    let (ok, d) = stacking(&table, &assets);
    r.line(6, ok, d);

    match compare(&table, &assets, LEVEL, SEED) {
        Ok(c) => {
            let white = white_noise_patches(LEVEL, PATCHES, PATCH_SIZE, SEED)
                .and_then(|p| estimate_spectrum(&p, 0.0))
                .and_then(|s| low_frequency_energy_ratio(&s, LEVEL));
            let ours = c.ours_stats.low_frequency_ratio;
            let (ok, wtxt) = match white {
                Ok(w) => ((w - 1.0).abs() < WHITE_TOLERANCE, format!("{w:.4}")),
                Err(e) => (false, e.to_string()),
            };
            r.line(
                7,
                ok && ours < LOW_FREQ_MAX,
                format!("low-frequency ratio ours {ours:.4} (< {LOW_FREQ_MAX}), white noise {wtxt} (1 +- {WHITE_TOLERANCE})"),
            );
            let lattice = |s: &polydither::spectrum::SpectrumStats, p: usize| {
                s.lattice.iter().find(|(q, _)| *q == p).map_or(0.0, |x| x.1)
            };
            let base = lattice(&c.baseline_stats, BASELINE_SIZE);
            let peak = c.ours_stats.radial_peak_ratio;
            r.line(
                8,
                base > BASELINE_PEAK_MIN && peak < OURS_PEAK_MAX,
                format!(
                    "baseline lattice/{BASELINE_SIZE} peak {base:.2} (> {BASELINE_PEAK_MIN}); ours max radial bin over neighbors {peak:.3} (< {OURS_PEAK_MAX}); info: ours spike {:.2}, lattice/8 {:.2}, lattice/{BASELINE_SIZE} {:.2}",
                    c.ours_stats.spike_ratio,
                    lattice(&c.ours_stats, 8),
                    lattice(&c.ours_stats, BASELINE_SIZE)
                ),
            );
        }
        Err(e) => {
            r.line(7, false, e.to_string());
            r.line(8, false, e.to_string());
        }
    }

    let second = bin(&[
        "build-tables",
        "--seed",
        &SEED.to_string(),
        "--out",
        path(&two),
    ]);
    let det = second.and_then(|_| {
        let mut same = true;
        for f in ["table.txt", "registry.txt", "production.txt", "rule.txt"] {
            same &= std::fs::read(one.join(f)).map_err(|e| e.to_string())?
                == std::fs::read(two.join(f)).map_err(|e| e.to_string())?;
        }
        let mut images = Vec::new();
        for d in [&one, &two] {
            let out = d.join("level.png");
            bin(&[
                "dither",
                "--level",
                "6/256",
                "--offset",
                "9,-4",
                "--width",
                "320",
                "--height",
                "200",
                "--table",
                path(&d.join("table.txt")),
                "--out",
                path(&out),
            ])?;
            images.push(std::fs::read(out).map_err(|e| e.to_string())?);
        }
        Ok((same, images[0] == images[1]))
    });
    match det {
        Ok((tables, images)) => r.line(
            9,
            tables && images,
            format!("table files identical {tables}, dithered images identical {images}"),
        ),
        Err(e) => r.line(9, false, e),
    }

    if r.failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria fail", r.failed);
        ExitCode::FAILURE
    }
}
