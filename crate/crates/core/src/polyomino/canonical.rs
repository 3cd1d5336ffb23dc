use std::path::Path;

use super::cover::{rectangle_cells, solve_exact_cover};
use super::rule::{derive_production_rule, ProductionRule};
use super::shape::CellSet;
use crate::error::{Error, Result};

pub const G_HEXOMINO_NAME: &str = "g-hexomino";
pub const G_HEXOMINO_ASSET: &str = include_str!("../../assets/g-hexomino.txt");
pub const G_HEXOMINO_RULE_ASSET: &str = include_str!("../../assets/g-hexomino-9.polyrule");

/// Rectangle the shape must tile, and the linear scale of its self-similar rule.
pub const RECTIFICATION: (u32, u32) = (12, 9);
pub const REP_SCALE: u32 = 9;

/// Loads the bundled G-hexomino and verifies it.
pub fn canonical_g_hexomino() -> Result<CellSet> {
    let shape = CellSet::parse(G_HEXOMINO_ASSET)?;
    verify_shape_asset(&shape)?;
    Ok(shape)
}

/// Accepts a 6-cell shape only if it tiles the 12x9 rectangle and its
/// 9-scaled copy can be filled with 81 unit copies.
pub fn verify_shape_asset(shape: &CellSet) -> Result<()> {
    if shape.len() != 6 {
        return Err(Error::AssetInvalid(format!(
            "expected 6 cells, got {}",
            shape.len()
        )));
    }
    let (w, h) = RECTIFICATION;
    if solve_exact_cover(&rectangle_cells(w, h), shape, 1).is_empty() {
        return Err(Error::AssetInvalid(format!(
            "shape does not tile a {w}x{h} rectangle"
        )));
    }
    if solve_exact_cover(shape.scaled(REP_SCALE).cells(), shape, 1).is_empty() {
        return Err(Error::AssetInvalid(format!(
            "shape has no {REP_SCALE}^2-rep"
        )));
    }
    Ok(())
}

/// The frozen 9²-rep rule for the bundled G-hexomino.
pub fn canonical_rule() -> Result<ProductionRule> {
    let shape = CellSet::parse(G_HEXOMINO_ASSET)?;
    ProductionRule::parse(G_HEXOMINO_RULE_ASSET, shape)
}

/// Rule from optional asset files. A shape file without a rule file
/// derives the rule; a rule file alone applies to the bundled shape.
pub fn load_rule(shape_path: Option<&Path>, rule_path: Option<&Path>) -> Result<ProductionRule> {
    let read = |p: &Path| {
        std::fs::read_to_string(p)
            .map_err(|e| Error::AssetInvalid(format!("cannot read {}: {e}", p.display())))
    };
    let shape = match shape_path {
        Some(p) => {
            let shape = CellSet::parse(&read(p)?)?;
            verify_shape_asset(&shape)?;
            shape
        }
        None => canonical_g_hexomino()?,
    };
    match (shape_path, rule_path) {
        (_, Some(r)) => ProductionRule::parse(&read(r)?, shape),
        (Some(_), None) => derive_production_rule(&shape, G_HEXOMINO_NAME, REP_SCALE),
        (None, None) => canonical_rule(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_shape_is_a_verified_hexomino() {
        let s = canonical_g_hexomino().unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.distinct_orientations().len(), 8);
    }

    #[test]
    fn frozen_rule_matches_fresh_derivation() {
        let frozen = canonical_rule().unwrap();
        let shape = canonical_g_hexomino().unwrap();
        let fresh = derive_production_rule(&shape, G_HEXOMINO_NAME, REP_SCALE).unwrap();
        assert_eq!(frozen, fresh);
        assert_eq!(frozen.children().len(), 81);
    }

    #[test]
    fn wrong_shape_is_rejected() {
        // A cross with a tail cannot tile any rectangle.
        let cross = CellSet::new([(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (1, 3)]).unwrap();
        assert!(matches!(
            verify_shape_asset(&cross),
            Err(Error::AssetInvalid(_))
        ));
        let tromino = CellSet::new([(0, 0), (0, 1), (1, 1)]).unwrap();
        assert!(matches!(
            verify_shape_asset(&tromino),
            Err(Error::AssetInvalid(_))
        ));
    }

    #[test]
    fn assets_load_from_files() {
        let dir = std::env::temp_dir().join(format!("polydither-assets-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let shape = dir.join("shape.txt");
        let rule = dir.join("rule.txt");
        std::fs::write(&shape, G_HEXOMINO_ASSET).unwrap();
        std::fs::write(&rule, G_HEXOMINO_RULE_ASSET).unwrap();
        let canon = canonical_rule().unwrap();
        assert_eq!(load_rule(None, None).unwrap(), canon);
        assert_eq!(load_rule(Some(&shape), None).unwrap(), canon);
        assert_eq!(load_rule(Some(&shape), Some(&rule)).unwrap(), canon);
        assert!(matches!(
            load_rule(Some(&dir.join("missing")), None),
            Err(Error::AssetInvalid(_))
        ));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
