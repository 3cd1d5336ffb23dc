use std::collections::BTreeMap;
use std::sync::OnceLock;

use polydither::config::{sub_rng, Density};
use polydither::error::Error;
use polydither::halftone::io::{
    decode_pbm, encode_binary_png, encode_pbm, png_text, TABLE_HASH_KEY,
};
use polydither::halftone::*;
use polydither::optimizer::{ClassRanks, RankTable, Setup};
use polydither::polyomino::canonical::canonical_rule;
use rand::seq::SliceRandom;

/// A table with the right layouts but arbitrary per-class permutations.
fn synthetic() -> &'static (RankTable, Assets) {
    static CELL: OnceLock<(RankTable, Assets)> = OnceLock::new();
    CELL.get_or_init(|| {
        let setup = Setup::new(canonical_rule().unwrap(), 8).unwrap();
        let mut rng = sub_rng(5, "synthetic");
        let mut classes = BTreeMap::new();
        for c in setup.layouts.complete_classes() {
            let mut ranks: Vec<u32> = (0..384).collect();
            ranks.shuffle(&mut rng);
            let pixels = setup.layouts.grid(c.orientation).pixels.clone();
            classes.insert(c.class, ClassRanks { pixels, ranks });
        }
        let table = RankTable {
            s: 8,
            d0: Density::new(1, 8).unwrap(),
            seed: 5,
            sigma: 1.5,
            shape: setup.rule.shape_name().to_string(),
            rule_hash: setup.rule.hash(),
            classes,
            segments: Vec::new(),
        };
        (table, Assets::new(canonical_rule().unwrap()))
    })
}

fn view(w: u32, h: u32, offset: (i64, i64)) -> ThresholdView {
    let (t, a) = synthetic();
    ThresholdView::build(w, h, t, a, offset).unwrap()
}

#[test]
fn one_cell_touches_one_tile() {
    assert_eq!(view(8, 8, (0, 0)).tiles().len(), 1);
    assert!(view(8, 8, (4, 4)).tiles().len() <= 4);
}

#[test]
fn thresholds_span_the_mid_ranks() {
    let v = view(256, 256, (0, 0));
    assert_eq!(v.levels(), 384);
    let mut lo = f64::MAX;
    let mut hi = f64::MIN;
    for y in 0..256 {
        for x in 0..256 {
            let t = v.threshold_at(x, y).unwrap();
            lo = lo.min(t);
            hi = hi.max(t);
        }
    }
    assert_eq!(lo, 0.5 / 384.0);
    assert_eq!(hi, 383.5 / 384.0);
    assert!(v.threshold_at(256, 0).is_err());
}

#[test]
fn pixels_of_a_tile_have_distinct_ranks() {
    let v = view(128, 128, (3, 5));
    let mut seen: Vec<Vec<bool>> = vec![vec![false; 384]; v.tiles().len()];
    for y in 0..128 {
        for x in 0..128 {
            let r = v.rank_at(x, y).unwrap() as usize;
            let t = v.tile_at(x, y).unwrap();
            assert!(!std::mem::replace(&mut seen[t][r], true));
        }
    }
}

#[test]
fn build_is_deterministic() {
    assert_eq!(view(64, 48, (7, -3)), view(64, 48, (7, -3)));
    assert_ne!(view(64, 48, (7, -3)), view(64, 48, (8, -3)));
}

#[test]
fn empty_view_is_rejected() {
    let (t, a) = synthetic();
    assert!(matches!(
        ThresholdView::build(0, 5, t, a, (0, 0)),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn extremes_are_solid() {
    let v = view(64, 64, (1, 2));
    assert_eq!(v.dither_constant(0.0).black_count(), 64 * 64);
    assert_eq!(v.dither_constant(1.0).black_count(), 0);
}

#[test]
fn complete_tiles_hit_the_exact_tone() {
    let v = view(256, 256, (11, 29));
    for g in [1.0 / 256.0, 6.0 / 256.0, 32.0 / 256.0, 0.5, 250.0 / 256.0] {
        let want = expected_black(384, g);
        let counts = v.black_per_tile(&v.dither_constant(g));
        let complete: Vec<u32> = (0..counts.len())
            .filter(|&t| v.is_complete(t))
            .map(|t| counts[t])
            .collect();
        assert!(complete.len() > 100);
        assert!(complete.iter().all(|&c| c as usize == want), "g = {g}");
    }
    assert_eq!(expected_black(384, 6.0 / 256.0), 375);
    assert_eq!(384 - expected_black(384, 6.0 / 256.0), 9);
}

#[test]
fn dither_matches_dither_constant() {
    let v = view(40, 30, (0, 0));
    let img = GrayImage::constant(40, 30, 0.3).unwrap();
    assert_eq!(v.dither(&img).unwrap(), v.dither_constant(0.3));
    let wrong = GrayImage::constant(30, 40, 0.3).unwrap();
    assert!(matches!(
        v.dither(&wrong),
        Err(Error::DimensionMismatch { .. })
    ));
}

#[test]
fn output_stacks_across_levels() {
    let v = view(96, 96, (2, 2));
    let mut prev = v.dither_constant(0.0);
    for k in 1..=256 {
        let cur = v.dither_constant(k as f64 / 256.0);
        for (a, b) in prev.pixels().iter().zip(cur.pixels()) {
            assert!(*a || !*b);
        }
        prev = cur;
    }
}

#[test]
fn ramp_columns_thin_out() {
    let (t, a) = synthetic();
    let img = dither_ramp(512, 64, t, a, (0, 0)).unwrap();
    let col = |x| (0..64).filter(|&y| img.is_black(x, y)).count();
    assert_eq!(col(0), 64);
    let frac = img.black_count() as f64 / (512.0 * 64.0);
    assert!((frac - 0.5).abs() < 0.01, "{frac}");
    // Neighboring columns see different ranks, so compare blocks.
    let block = |b: u32| (b * 32..b * 32 + 32).map(col).sum::<usize>();
    for b in 1..16 {
        assert!(block(b) <= block(b - 1));
    }
}

#[test]
fn regions_agree_where_inputs_agree() {
    let v = view(64, 64, (0, 0));
    let a = GrayImage::ramp(64, 64).unwrap();
    let mut s = a.samples().to_vec();
    for x in s.iter_mut().take(64 * 32) {
        *x = 0.9;
    }
    let b = GrayImage::new(64, 64, s).unwrap();
    let (da, db) = (v.dither(&a).unwrap(), v.dither(&b).unwrap());
    assert_eq!(
        da.crop(0, 32, 64, 32).unwrap(),
        db.crop(0, 32, 64, 32).unwrap()
    );
}

#[test]
fn mismatched_assets_are_refused() {
    let (t, a) = synthetic();
    let mut other = t.clone();
    other.rule_hash = "0".repeat(64);
    assert!(matches!(
        ThresholdView::build(8, 8, &other, a, (0, 0)),
        Err(Error::RuleMismatch(_))
    ));
    let mut missing = t.clone();
    let first = *missing.classes.keys().next().unwrap();
    missing.classes.remove(&first);
    let r = ThresholdView::build(512, 512, &missing, a, (0, 0));
    assert!(matches!(r, Err(Error::UnknownClass(c)) if c == first));
}

#[test]
fn outputs_round_trip() {
    let v = view(37, 21, (0, 0));
    let img = v.dither_constant(0.4);
    assert_eq!(decode_pbm(&encode_pbm(&img)).unwrap(), img);
    let png = encode_binary_png(&img, &[(TABLE_HASH_KEY, "abc")]).unwrap();
    let text = png_text(&png).unwrap();
    assert!(text.contains(&(TABLE_HASH_KEY.to_string(), "abc".to_string())));
}
