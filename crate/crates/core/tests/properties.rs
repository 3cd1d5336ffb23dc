use std::collections::BTreeSet;

use polydither::config::Density;
use polydither::halftone::{expected_black, BinaryImage};
use polydither::polyomino::cover::{rectangle_cells, solve_exact_cover};
use polydither::polyomino::shape::{CellSet, Orientation};
use polydither::spectrum::estimate_spectrum;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orientations_form_a_group(a in 0u8..8, b in 0u8..8, x in -20i32..20, y in -20i32..20) {
        let (a, b) = (Orientation::from_code(a).unwrap(), Orientation::from_code(b).unwrap());
        prop_assert_eq!(a.then(a.inverse()), Orientation::IDENTITY);
        prop_assert_eq!(a.then(b).apply((x, y)), b.apply(a.apply((x, y))));
    }

    #[test]
    fn density_counts_round_to_nearest(num in 0u64..16, den in 1u64..16, n in 0usize..10_000) {
        prop_assume!(num <= den);
        let d = Density::new(num, den).unwrap();
        let exact = num as f64 * n as f64 / den as f64;
        prop_assert!((d.count_of(n) as f64 - exact).abs() <= 0.5);
    }

    #[test]
    fn domino_covers_are_exact(w in 1u32..5, h in 1u32..5) {
        let domino = CellSet::new([(0, 0), (1, 0)]).unwrap();
        let region = rectangle_cells(w, h);
        let sols = solve_exact_cover(&region, &domino, 8);
        prop_assert_eq!(sols.is_empty(), (w * h) % 2 == 1);
        for sol in sols {
            let mut seen = BTreeSet::new();
            for t in &sol {
                for c in t.place(&domino) {
                    prop_assert!(seen.insert(c));
                }
            }
            prop_assert_eq!(seen, region.iter().copied().collect::<BTreeSet<_>>());
        }
    }

    #[test]
    fn tone_count_is_monotone(levels in 1u32..2000, a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(expected_black(levels, lo) >= expected_black(levels, hi));
        prop_assert_eq!(expected_black(levels, 0.0), levels as usize);
        prop_assert_eq!(expected_black(levels, 1.0), 0);
    }

    #[test]
    fn spectrum_obeys_parseval(bits in prop::collection::vec(any::<bool>(), 256)) {
        let img = BinaryImage::new(16, 16, bits.clone()).unwrap();
        let spec = estimate_spectrum(&[img], 0.0).unwrap();
        let n = bits.len() as f64;
        let mean = bits.iter().filter(|&&b| b).count() as f64 / n;
        let var = mean * (1.0 - mean);
        prop_assert!((spec.total_power() - var * n).abs() <= 1e-9 + 1e-6 * var * n);
    }
}
