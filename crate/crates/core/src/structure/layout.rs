//! Pixel layout of tiles at `S` pixels per cell: the 2-pixel border band
//! along each tile's right and bottom edges, its split into labeled
//! segments, and the interior.

use std::collections::HashMap;

use super::labels::{extract_segments, Axis, SegmentLabel};
use super::production::{context_tiling, ClassCatalog};
use super::signature::Registry;
use crate::error::{Error, Result};
use crate::polyomino::rule::ProductionRule;
use crate::polyomino::shape::{Cell, CellSet, Orientation};
use crate::polyomino::tiling::ClassId;

/// Width of the border band in pixels.
pub const BAND_WIDTH: i32 = 2;

/// Tile-local pixel coordinates of a tile in one orientation, in canonical
/// order: cells in oriented row-major order, pixels row-major within a cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PixelGrid {
    pub s: i32,
    pub orientation: Orientation,
    pub pixels: Vec<Cell>,
    index: HashMap<Cell, usize>,
}

impl PixelGrid {
    pub fn new(shape: &CellSet, orientation: Orientation, s: u32) -> Self {
        let s = s as i32;
        let pixels: Vec<Cell> = shape
            .oriented(orientation)
            .cells()
            .iter()
            .flat_map(|&(cx, cy)| {
                (0..s).flat_map(move |y| (0..s).map(move |x| (cx * s + x, cy * s + y)))
            })
            .collect();
        let index = pixels.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        PixelGrid {
            s,
            orientation,
            pixels,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn index_of(&self, p: Cell) -> Option<usize> {
        self.index.get(&p).copied()
    }
}

/// Border/interior split of a tile's pixels. The band depends only on the
/// tile's orientation: every outer edge of a tile borders another tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderMask {
    /// Indexed like [`PixelGrid::pixels`].
    pub border: Vec<bool>,
}

impl BorderMask {
    pub fn border_count(&self) -> usize {
        self.border.iter().filter(|&&b| b).count()
    }

    pub fn interior_count(&self) -> usize {
        self.border.len() - self.border_count()
    }
}

/// Which band a tile pixel falls in: vertical bands (right edges) take
/// precedence over horizontal bands (bottom edges) at shared corners.
fn band_of(oriented: &CellSet, s: i32, (x, y): Cell) -> Option<Axis> {
    let cell = (x.div_euclid(s), y.div_euclid(s));
    let (lx, ly) = (x.rem_euclid(s), y.rem_euclid(s));
    if lx >= s - BAND_WIDTH && !oriented.contains((cell.0 + 1, cell.1)) {
        return Some(Axis::Vertical);
    }
    if ly >= s - BAND_WIDTH && !oriented.contains((cell.0, cell.1 + 1)) {
        return Some(Axis::Horizontal);
    }
    None
}

pub fn border_mask(shape: &CellSet, orientation: Orientation, s: u32) -> Result<BorderMask> {
    if s < 4 {
        return Err(Error::InvalidArgument(format!(
            "pixel scale S must be >= 4, got {s}"
        )));
    }
    let grid = PixelGrid::new(shape, orientation, s);
    let oriented = shape.oriented(orientation);
    Ok(BorderMask {
        border: grid
            .pixels
            .iter()
            .map(|&p| band_of(&oriented, s as i32, p).is_some())
            .collect(),
    })
}

/// Band mask of a structural index.
pub fn border_mask_for_class(
    registry: &Registry,
    shape: &CellSet,
    class: ClassId,
    s: u32,
) -> Result<BorderMask> {
    border_mask(shape, registry.signature(class).orientation, s)
}

/// Dense id of a segment label within a [`ClassLayouts`].
pub type SegmentId = u32;

/// A label together with its band pixels in segment-local coordinates
/// (relative to `S` times the start lattice point), row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentInfo {
    pub label: SegmentLabel,
    pub length: i32,
    pub local_pixels: Vec<Cell>,
}

/// A segment as seen from its owning class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnedSegment {
    pub id: SegmentId,
    /// Tile-local pixel coordinate of the segment-local origin.
    pub offset: Cell,
    /// Tile pixel indices, aligned with [`SegmentInfo::local_pixels`].
    pub pixels: Vec<usize>,
}

/// Pixel layout of one complete structural index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassLayout {
    pub class: ClassId,
    pub orientation: Orientation,
    pub segments: Vec<OwnedSegment>,
    /// For each tile pixel, the index into `segments` of the segment whose
    /// band holds it, or `None` for interior pixels.
    pub segment_of: Vec<Option<u16>>,
}

impl ClassLayout {
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        self.segment_of
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| i)
    }
}

/// Layouts for every complete class plus the segment-label registry.
#[derive(Debug, Clone)]
pub struct ClassLayouts {
    pub s: u32,
    pub grids: Vec<PixelGrid>,
    pub masks: Vec<BorderMask>,
    pub segments: Vec<SegmentInfo>,
    /// Indexed by class id; `None` for incomplete classes.
    pub classes: Vec<Option<ClassLayout>>,
    /// For each segment id, the classes owning an instance of it.
    pub owners: Vec<Vec<ClassId>>,
}

impl ClassLayouts {
    pub fn build(catalog: &ClassCatalog, rule: &ProductionRule, s: u32) -> Result<Self> {
        let shape = rule.shape();
        let masks = Orientation::all()
            .map(|o| border_mask(shape, o, s))
            .collect::<Result<Vec<_>>>()?;
        let grids: Vec<PixelGrid> = Orientation::all()
            .map(|o| PixelGrid::new(shape, o, s))
            .collect();
        let si = s as i32;
        let mut segments: Vec<SegmentInfo> = Vec::new();
        let mut seg_ids: HashMap<SegmentLabel, SegmentId> = HashMap::new();
        let mut owners: Vec<Vec<ClassId>> = Vec::new();
        let mut classes = Vec::with_capacity(catalog.registry.len());
        for (id, sig) in catalog.registry.signatures().iter().enumerate() {
            if !catalog.registry.is_complete(id as ClassId) {
                classes.push(None);
                continue;
            }
            let ctx = context_tiling(sig, rule);
            let grid = &grids[sig.orientation.code() as usize];
            let oriented = shape.oriented(sig.orientation);
            let mut owned = Vec::new();
            let mut segment_of = vec![None; grid.len()];
            for seg in extract_segments(&ctx)
                .into_iter()
                .filter(|g| g.owner == Some(0))
            {
                let (sx, sy) = (seg.start.0 * si, seg.start.1 * si);
                let band: Vec<Cell> = match seg.axis() {
                    Axis::Vertical => (0..seg.length * si)
                        .flat_map(|y| (-BAND_WIDTH..0).map(move |x| (sx + x, sy + y)))
                        .collect(),
                    Axis::Horizontal => (-BAND_WIDTH..0)
                        .flat_map(|y| (0..seg.length * si).map(move |x| (sx + x, sy + y)))
                        .collect(),
                };
                let band: Vec<Cell> = band
                    .into_iter()
                    .filter(|&p| band_of(&oriented, si, p) == Some(seg.axis()))
                    .collect();
                let local: Vec<Cell> = band.iter().map(|&(x, y)| (x - sx, y - sy)).collect();
                let pixels: Vec<usize> = band
                    .iter()
                    .map(|&p| grid.index_of(p).expect("band pixel lies in its owner"))
                    .collect();
                let sid = match seg_ids.get(&seg.label) {
                    Some(&sid) => {
                        if segments[sid as usize].local_pixels != local {
                            return Err(Error::InvalidArgument(format!(
                                "segment label {} has inconsistent band geometry",
                                seg.label.key()
                            )));
                        }
                        sid
                    }
                    None => {
                        let sid = segments.len() as SegmentId;
                        segments.push(SegmentInfo {
                            label: seg.label,
                            length: seg.length,
                            local_pixels: local,
                        });
                        seg_ids.insert(seg.label, sid);
                        owners.push(Vec::new());
                        sid
                    }
                };
                owners[sid as usize].push(id as ClassId);
                for &p in &pixels {
                    segment_of[p] = Some(owned.len() as u16);
                }
                owned.push(OwnedSegment {
                    id: sid,
                    offset: (sx, sy),
                    pixels,
                });
            }
            let mask = &masks[sig.orientation.code() as usize];
            for (p, s) in segment_of.iter().enumerate() {
                if s.is_some() != mask.border[p] {
                    return Err(Error::InvalidArgument(format!(
                        "class {id}: segments do not partition the border band"
                    )));
                }
            }
            classes.push(Some(ClassLayout {
                class: id as ClassId,
                orientation: sig.orientation,
                segments: owned,
                segment_of,
            }));
        }
        Ok(ClassLayouts {
            s,
            grids,
            masks,
            segments,
            classes,
            owners,
        })
    }

    pub fn tile_pixels(&self) -> usize {
        self.grids[0].len()
    }

    pub fn grid(&self, o: Orientation) -> &PixelGrid {
        &self.grids[o.code() as usize]
    }

    pub fn class(&self, id: ClassId) -> Option<&ClassLayout> {
        self.classes.get(id as usize).and_then(Option::as_ref)
    }

    pub fn complete_classes(&self) -> impl Iterator<Item = &ClassLayout> {
        self.classes.iter().flatten()
    }
}
