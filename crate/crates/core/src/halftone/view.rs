//! Threshold lookup over an image rectangle: the tiling at pixel
//! resolution, each pixel resolved to its tile's class ranks.

use crate::error::{Error, Result};
use crate::halftone::image::{BinaryImage, GrayImage};
use crate::optimizer::RankTable;
use crate::polyomino::rule::ProductionRule;
use crate::polyomino::shape::{Orientation, Transform};
use crate::polyomino::tiling::{cover_rectangle_classified, ClassId};
use crate::structure::layout::PixelGrid;
use crate::structure::production::ClassCatalog;

/// Rule plus class catalog: what a view needs besides the table.
pub struct Assets {
    pub rule: ProductionRule,
    pub catalog: ClassCatalog,
}

impl Assets {
    pub fn new(rule: ProductionRule) -> Assets {
        let catalog = ClassCatalog::enumerate(&rule);
        Assets { rule, catalog }
    }
}

/// A tile of the view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewTile {
    pub class: ClassId,
    pub orientation: Orientation,
    /// Pixels of the tile inside the view.
    pub visible: u32,
}

/// Immutable per-pixel ranks for a `width` x `height` rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdView {
    width: u32,
    height: u32,
    levels: u32,
    ranks: Vec<u32>,
    tile_of: Vec<u32>,
    tiles: Vec<ViewTile>,
}

impl ThresholdView {
    /// Covers the rectangle with the tiling shifted by `offset` pixels and
    /// looks up every pixel's rank.
    pub fn build(
        width: u32,
        height: u32,
        table: &RankTable,
        assets: &Assets,
        offset: (i64, i64),
    ) -> Result<Self> {
        if width < 1 || height < 1 {
            return Err(Error::InvalidArgument(format!(
                "view must be at least 1x1, got {width}x{height}"
            )));
        }
        if table.rule_hash != assets.rule.hash() {
            return Err(Error::RuleMismatch(format!(
                "table was built for rule {}, assets carry {}",
                table.rule_hash,
                assets.rule.hash()
            )));
        }
        let s = table.s as i64;
        let levels = table.tile_pixels() as u32;
        if levels != 6 * table.s * table.s {
            return Err(Error::Parse(format!("table has {levels} ranks per class")));
        }
        let (sub_x, sub_y) = (offset.0.rem_euclid(s), offset.1.rem_euclid(s));
        let shift = (
            i32::try_from(offset.0.div_euclid(s))
                .map_err(|_| Error::InvalidArgument("offset too large".into()))?,
            i32::try_from(offset.1.div_euclid(s))
                .map_err(|_| Error::InvalidArgument("offset too large".into()))?,
        );
        let cw = (width as i64 + sub_x + s - 1).div_euclid(s) as u32;
        let ch = (height as i64 + sub_y + s - 1).div_euclid(s) as u32;
        let seed = Transform {
            orientation: Orientation::IDENTITY,
            translation: shift,
        };
        let lookup = |c: ClassId| assets.catalog.production.children(c);
        let root = assets.catalog.root(Orientation::IDENTITY);
        let tiling = cover_rectangle_classified(cw, ch, &assets.rule, seed, Some((root, &lookup)))?;

        // Dense tile-local pixel to grid index maps, per orientation.
        let shape = assets.rule.shape();
        let luts: Vec<(i32, Vec<u32>)> = Orientation::all()
            .map(|o| {
                let g = PixelGrid::new(shape, o, table.s);
                let w = g.pixels.iter().map(|p| p.0).max().unwrap_or(0) + 1;
                let h = g.pixels.iter().map(|p| p.1).max().unwrap_or(0) + 1;
                let mut lut = vec![u32::MAX; (w * h) as usize];
                for (i, &(x, y)) in g.pixels.iter().enumerate() {
                    lut[(y * w + x) as usize] = i as u32;
                }
                (w, lut)
            })
            .collect();
        let mut checked: Vec<bool> = vec![false; tiling.tiles().len()];
        let mut tiles: Vec<ViewTile> = Vec::new();
        let mut view_index: Vec<u32> = vec![u32::MAX; tiling.tiles().len()];
        let n = width as usize * height as usize;
        let mut ranks = Vec::with_capacity(n);
        let mut tile_of = Vec::with_capacity(n);
        for y in 0..height as i64 {
            for x in 0..width as i64 {
                let (gx, gy) = (x + sub_x, y + sub_y);
                let cell = ((gx / s) as i32, (gy / s) as i32);
                let ti = tiling
                    .cell_owner(cell)
                    .ok_or_else(|| Error::InvalidArgument(format!("cell {cell:?} is uncovered")))?
                    as usize;
                let tile = tiling.tiles()[ti];
                let class = tile.class.ok_or(Error::UnknownClass(u32::MAX))?;
                let cr = table.class(class).ok_or(Error::UnknownClass(class))?;
                let o = tile.orientation();
                let (w, lut) = &luts[o.code() as usize];
                if !checked[ti] {
                    checked[ti] = true;
                    let g = PixelGrid::new(shape, o, table.s);
                    if cr.pixels != g.pixels {
                        return Err(Error::Parse(format!(
                            "table class {class} has a foreign pixel layout"
                        )));
                    }
                    view_index[ti] = tiles.len() as u32;
                    tiles.push(ViewTile {
                        class,
                        orientation: o,
                        visible: 0,
                    });
                }
                let (ox, oy) = tile.origin();
                let lx = (gx - ox as i64 * s) as i32;
                let ly = (gy - oy as i64 * s) as i32;
                let idx = lut[(ly * w + lx) as usize];
                debug_assert_ne!(idx, u32::MAX);
                ranks.push(cr.ranks[idx as usize]);
                let vi = view_index[ti];
                tiles[vi as usize].visible += 1;
                tile_of.push(vi);
            }
        }
        Ok(ThresholdView {
            width,
            height,
            levels,
            ranks,
            tile_of,
            tiles,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of distinct thresholds per tile, `6·S²`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    pub fn rank_at(&self, x: u32, y: u32) -> Result<u32> {
        self.check(x, y)?;
        Ok(self.ranks[(y * self.width + x) as usize])
    }

    /// `(rank + 0.5) / 6S²`.
    pub fn threshold_at(&self, x: u32, y: u32) -> Result<f64> {
        Ok((self.rank_at(x, y)? as f64 + 0.5) / self.levels as f64)
    }

    fn check(&self, x: u32, y: u32) -> Result<()> {
        if x >= self.width || y >= self.height {
            return Err(Error::OutOfBounds {
                x: x as i64,
                y: y as i64,
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    pub fn tiles(&self) -> &[ViewTile] {
        &self.tiles
    }

    /// View tile index of a pixel.
    pub fn tile_at(&self, x: u32, y: u32) -> Result<usize> {
        self.check(x, y)?;
        Ok(self.tile_of[(y * self.width + x) as usize] as usize)
    }

    /// Whether every pixel of the tile lies inside the view.
    pub fn is_complete(&self, tile: usize) -> bool {
        self.tiles[tile].visible == self.levels
    }

    /// Black pixels per view tile.
    pub fn black_per_tile(&self, img: &BinaryImage) -> Vec<u32> {
        let mut counts = vec![0; self.tiles.len()];
        for (i, &b) in img.pixels().iter().enumerate() {
            if b {
                counts[self.tile_of[i] as usize] += 1;
            }
        }
        counts
    }

    /// Black iff `g < threshold`.
    pub fn dither(&self, image: &GrayImage) -> Result<BinaryImage> {
        if image.width() != self.width || image.height() != self.height {
            return Err(Error::DimensionMismatch {
                expected: format!("{}x{}", self.width, self.height),
                actual: format!("{}x{}", image.width(), image.height()),
            });
        }
        let n = self.levels as f64;
        let black = image
            .samples()
            .iter()
            .zip(&self.ranks)
            .map(|(&g, &r)| g < (r as f64 + 0.5) / n)
            .collect();
        BinaryImage::new(self.width, self.height, black)
    }

    /// Dithers a constant level without materializing the input.
    pub fn dither_constant(&self, g: f64) -> BinaryImage {
        let n = self.levels as f64;
        let black = self
            .ranks
            .iter()
            .map(|&r| g < (r as f64 + 0.5) / n)
            .collect();
        BinaryImage::new(self.width, self.height, black).expect("sizes agree")
    }
}

/// Black pixels a complete tile shows at constant level `g`.
pub fn expected_black(levels: u32, g: f64) -> usize {
    (0..levels)
        .filter(|&r| (r as f64 + 0.5) / levels as f64 > g)
        .count()
}

/// A horizontal 0 to 1 ramp dithered through a fresh view.
pub fn dither_ramp(
    width: u32,
    height: u32,
    table: &RankTable,
    assets: &Assets,
    offset: (i64, i64),
) -> Result<BinaryImage> {
    let ramp = GrayImage::ramp(width, height)?;
    ThresholdView::build(width, height, table, assets, offset)?.dither(&ramp)
}
