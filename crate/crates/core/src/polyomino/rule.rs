use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use super::cover::solve_exact_cover;
use super::shape::{Cell, CellSet, Orientation, Transform};
use crate::error::{Error, Result};

/// An L²-rep decomposition: `scale`² copies of the shape exactly tiling the
/// shape scaled by `scale`. Child transforms are expressed in the frame of
/// `shape.scaled(scale)` (base orientation, origin at its bounding-box
/// minimum).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductionRule {
    shape: CellSet,
    shape_name: String,
    scale: u32,
    children: Vec<Transform>,
    // Child placements precomputed for every parent orientation: child
    // orientation plus translation relative to the scaled parent origin.
    placed: Vec<Vec<Transform>>,
}

impl ProductionRule {
    /// Builds a rule from explicit child transforms, checking that they tile
    /// the scaled shape exactly.
    pub fn new(
        shape: CellSet,
        shape_name: &str,
        scale: u32,
        children: Vec<Transform>,
    ) -> Result<Self> {
        if scale < 2 {
            return Err(Error::InvalidArgument(format!(
                "rule scale must be >= 2, got {scale}"
            )));
        }
        if children.len() != (scale * scale) as usize {
            return Err(Error::RuleMismatch(format!(
                "expected {} children, got {}",
                scale * scale,
                children.len()
            )));
        }
        let coverage = coverage_counts(&shape, scale, &children);
        if let Some(bad) = coverage.iter().find(|(_, n)| *n != 1) {
            return Err(Error::RuleMismatch(format!(
                "cell {:?} of the scaled shape covered {} times",
                bad.0, bad.1
            )));
        }
        if coverage.len() != shape.len() * (scale * scale) as usize {
            return Err(Error::RuleMismatch(
                "children leave the scaled shape".into(),
            ));
        }
        let placed = Orientation::all()
            .map(|o| place_children(&shape, scale, &children, o))
            .collect();
        Ok(ProductionRule {
            shape,
            shape_name: shape_name.to_string(),
            scale,
            children,
            placed,
        })
    }

    pub fn shape(&self) -> &CellSet {
        &self.shape
    }

    pub fn shape_name(&self) -> &str {
        &self.shape_name
    }

    /// Linear scale factor L.
    pub fn scale(&self) -> u32 {
        self.scale
    }

    /// Area scale factor L².
    pub fn area_factor(&self) -> usize {
        (self.scale * self.scale) as usize
    }

    pub fn children(&self) -> &[Transform] {
        &self.children
    }

    /// Children of a parent with the given orientation, translated relative
    /// to `scale * parent.translation`.
    pub fn children_for(&self, parent: Orientation) -> &[Transform] {
        &self.placed[parent.code() as usize]
    }

    /// Serializes to the `polyrule v1` text format.
    pub fn to_text(&self) -> String {
        let mut out = format!("polyrule v1 L={} shape={}\n", self.scale, self.shape_name);
        for t in &self.children {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                t.rotation(),
                u8::from(t.mirrored()),
                t.translation.0,
                t.translation.1
            );
        }
        out
    }

    pub fn parse(text: &str, shape: CellSet) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty rule file".into()))?;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("polyrule") || fields.next() != Some("v1") {
            return Err(Error::Parse(format!("bad rule header {header:?}")));
        }
        let mut scale = None;
        let mut name = None;
        for f in fields {
            if let Some(v) = f.strip_prefix("L=") {
                scale = v.parse::<u32>().ok();
            } else if let Some(v) = f.strip_prefix("shape=") {
                name = Some(v.to_string());
            }
        }
        let scale = scale.ok_or_else(|| Error::Parse("rule header lacks L=".into()))?;
        let name = name.ok_or_else(|| Error::Parse("rule header lacks shape=".into()))?;
        let mut children = Vec::new();
        for line in lines {
            let nums: Vec<i32> = line
                .split_whitespace()
                .map(|s| s.parse::<i32>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("bad rule line {line:?}")))?;
            let [rot, mirror, tx, ty] = nums[..] else {
                return Err(Error::Parse(format!("bad rule line {line:?}")));
            };
            if !(0..4).contains(&rot) || !(0..2).contains(&mirror) {
                return Err(Error::Parse(format!("bad rule line {line:?}")));
            }
            children.push(Transform::new(rot as u8, mirror == 1, (tx, ty)));
        }
        ProductionRule::new(shape, &name, scale, children)
    }

    /// Hex SHA-256 of the serialized rule plus the shape cells.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.shape.to_asset_string(&self.shape_name).as_bytes());
        h.update(self.to_text().as_bytes());
        hex::encode(h.finalize())
    }
}

fn coverage_counts(shape: &CellSet, scale: u32, children: &[Transform]) -> Vec<(Cell, usize)> {
    let scaled = shape.scaled(scale);
    let mut counts: Vec<(Cell, usize)> = scaled.cells().iter().map(|&c| (c, 0)).collect();
    let mut outside = 0usize;
    for t in children {
        for c in t.place(shape) {
            match scaled.index_of(c) {
                Some(i) => counts[i].1 += 1,
                None => outside += 1,
            }
        }
    }
    if outside > 0 {
        counts.push(((i32::MIN, i32::MIN), outside + 1));
    }
    counts
}

fn place_children(
    shape: &CellSet,
    scale: u32,
    children: &[Transform],
    parent: Orientation,
) -> Vec<Transform> {
    let scaled = shape.scaled(scale);
    let min_x = scaled
        .cells()
        .iter()
        .map(|&c| parent.apply(c).0)
        .min()
        .unwrap();
    let min_y = scaled
        .cells()
        .iter()
        .map(|&c| parent.apply(c).1)
        .min()
        .unwrap();
    children
        .iter()
        .map(|t| {
            let cells: Vec<Cell> = t
                .place(shape)
                .into_iter()
                .map(|c| {
                    let (x, y) = parent.apply(c);
                    (x - min_x, y - min_y)
                })
                .collect();
            let tx = cells.iter().map(|c| c.0).min().unwrap();
            let ty = cells.iter().map(|c| c.1).min().unwrap();
            Transform {
                orientation: t.orientation.then(parent),
                translation: (tx, ty),
            }
        })
        .collect()
}

/// First exact cover of the `scale`-scaled shape by `scale`² unit copies.
pub fn derive_production_rule(
    shape: &CellSet,
    shape_name: &str,
    scale: u32,
) -> Result<ProductionRule> {
    if scale < 2 {
        return Err(Error::InvalidArgument(format!(
            "rule scale must be >= 2, got {scale}"
        )));
    }
    let scaled = shape.scaled(scale);
    let mut sols = solve_exact_cover(scaled.cells(), shape, 1);
    let children = sols.pop().ok_or(Error::NotRectifiable { scale })?;
    ProductionRule::new(shape.clone(), shape_name, scale, children)
}
