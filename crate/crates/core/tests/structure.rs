use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use polydither::polyomino::canonical::*;
use polydither::polyomino::cover::{rectangle_cells, solve_exact_cover};
use polydither::polyomino::rule::derive_production_rule;
use polydither::polyomino::shape::{CellSet, Orientation};
use polydither::structure::layout::ClassLayouts;
use polydither::structure::production::{verify_production, ClassCatalog};

#[test]
fn hexomino_tiles_the_rectangle() {
    let t = Instant::now();
    let shape = canonical_g_hexomino().unwrap();
    let sols = solve_exact_cover(&rectangle_cells(12, 9), &shape, 1);
    assert_eq!(sols.len(), 1);
    assert_eq!(sols[0].len(), 18);
    let mut seen = BTreeSet::new();
    for tr in &sols[0] {
        for c in &tr.place(&shape) {
            assert!((0..12).contains(&c.0) && (0..9).contains(&c.1));
            assert!(seen.insert(*c));
        }
    }
    assert_eq!(seen.len(), 108);
    assert!(t.elapsed() < Duration::from_secs(10));
}

#[test]
fn rule_tiles_the_scaled_shape() {
    let t = Instant::now();
    let shape = canonical_g_hexomino().unwrap();
    let rule = derive_production_rule(&shape, G_HEXOMINO_NAME, 9).unwrap();
    assert_eq!(rule.children().len(), 81);
    let big: BTreeSet<_> = shape.scaled(9).cells().iter().copied().collect();
    let mut covered = BTreeSet::new();
    for tr in rule.children() {
        for c in &tr.place(&shape) {
            assert!(big.contains(c), "gap or spill at {c:?}");
            assert!(covered.insert(*c), "overlap at {c:?}");
        }
    }
    assert_eq!(covered, big);
    assert!(t.elapsed() < Duration::from_secs(60));
}

#[test]
fn classes_and_labels_reach_a_fixed_point() {
    let rule = canonical_rule().unwrap();
    let catalog = ClassCatalog::enumerate(&rule);
    assert!(catalog.production.is_closed());
    let layouts = ClassLayouts::build(&catalog, &rule, 4).unwrap();
    for o in Orientation::all() {
        let depths = catalog.classes_by_depth(o, 6);
        let labels: Vec<BTreeSet<u32>> = depths
            .iter()
            .map(|set| {
                set.iter()
                    .filter_map(|&c| layouts.class(c))
                    .flat_map(|l| l.segments.iter().map(|g| g.id))
                    .collect()
            })
            .collect();
        let fixed = (0..=5).find(|&d| {
            depths[d].len() == depths[d + 1].len() && labels[d].len() == labels[d + 1].len()
        });
        assert!(
            fixed.is_some(),
            "orientation {o:?} still growing at depth 6"
        );
    }
    assert_eq!(catalog.registry.len(), 2200);
    assert_eq!(catalog.registry.complete_ids().count(), 1904);
    assert_eq!(layouts.segments.len(), 2436);
}

#[test]
fn production_table_matches_geometry() {
    let rule = canonical_rule().unwrap();
    let catalog = ClassCatalog::enumerate(&rule);
    let checked = verify_production(&catalog, &rule, Orientation::IDENTITY, 2).unwrap();
    assert!(checked > 0);
}

#[test]
fn shape_asset_must_be_the_hexomino() {
    assert!(verify_shape_asset(&CellSet::new([(0, 0), (1, 0)]).unwrap()).is_err());
    assert!(verify_shape_asset(&canonical_g_hexomino().unwrap()).is_ok());
}
