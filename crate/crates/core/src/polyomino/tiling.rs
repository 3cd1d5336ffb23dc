use super::rule::ProductionRule;
use super::shape::{Cell, CellSet, Orientation, Transform};
use crate::error::{Error, Result};

/// Structural index id, assigned by [`crate::structure`].
pub type ClassId = u32;

pub const NO_OWNER: u32 = u32::MAX;

/// Axis-aligned rectangle of cells (or pixels), `[x, x + width) x [y, y + height)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: i32,
    pub y: i32,
    pub width: i32,
    pub height: i32,
}

impl Rect {
    pub fn new(x: i32, y: i32, width: i32, height: i32) -> Self {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn contains(&self, (cx, cy): Cell) -> bool {
        cx >= self.x && cy >= self.y && cx < self.x + self.width && cy < self.y + self.height
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.x < other.x + other.width
            && other.x < self.x + self.width
            && self.y < other.y + other.height
            && other.y < self.y + self.height
    }

    pub fn expanded(&self, margin: i32) -> Rect {
        Rect::new(
            self.x - margin,
            self.y - margin,
            self.width + 2 * margin,
            self.height + 2 * margin,
        )
    }

    pub fn area(&self) -> usize {
        (self.width.max(0) as usize) * (self.height.max(0) as usize)
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (self.y..self.y + self.height)
            .flat_map(move |y| (self.x..self.x + self.width).map(move |x| (x, y)))
    }
}

/// A placed copy of the shape, optionally tagged with its structural index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Tile {
    pub transform: Transform,
    pub class: Option<ClassId>,
}

impl Tile {
    pub fn new(transform: Transform) -> Self {
        Tile {
            transform,
            class: None,
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.transform.orientation
    }

    pub fn origin(&self) -> Cell {
        self.transform.translation
    }

    pub fn cells(&self, shape: &CellSet) -> Vec<Cell> {
        self.transform.place(shape)
    }
}

/// Dense map from cells to tile indices over a bounding rectangle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OwnerGrid {
    bounds: Rect,
    owners: Vec<u32>,
}

impl OwnerGrid {
    fn new(bounds: Rect) -> Self {
        OwnerGrid {
            bounds,
            owners: vec![NO_OWNER; bounds.area()],
        }
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    #[inline]
    pub fn get(&self, (x, y): Cell) -> Option<u32> {
        if !self.bounds.contains((x, y)) {
            return None;
        }
        let i = (y - self.bounds.y) as usize * self.bounds.width as usize
            + (x - self.bounds.x) as usize;
        let o = self.owners[i];
        (o != NO_OWNER).then_some(o)
    }

    fn set(&mut self, (x, y): Cell, owner: u32) -> bool {
        let i = (y - self.bounds.y) as usize * self.bounds.width as usize
            + (x - self.bounds.x) as usize;
        let prev = self.owners[i];
        self.owners[i] = owner;
        prev == NO_OWNER
    }
}

/// A gap-free, overlap-free placement of tiles. `region` is the addressable
/// rectangle; tiles may extend beyond it and are always stored whole.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    shape: CellSet,
    oriented: Vec<Vec<Cell>>,
    region: Rect,
    tiles: Vec<Tile>,
    owner: OwnerGrid,
}

impl Tiling {
    /// Builds a tiling from tiles, checking for overlaps.
    pub fn from_tiles(shape: CellSet, region: Rect, tiles: Vec<Tile>) -> Result<Self> {
        let oriented: Vec<Vec<Cell>> = Orientation::all()
            .map(|o| shape.oriented(o).cells().to_vec())
            .collect();
        let place = |t: &Tile| -> Vec<Cell> {
            let (tx, ty) = t.origin();
            oriented[t.orientation().code() as usize]
                .iter()
                .map(|&(x, y)| (x + tx, y + ty))
                .collect()
        };
        let cells: Vec<Vec<Cell>> = tiles.iter().map(place).collect();
        let mut bounds = region;
        if let Some(all) = cells.iter().flatten().next() {
            let (mut x0, mut y0, mut x1, mut y1) = (all.0, all.1, all.0, all.1);
            for &(x, y) in cells.iter().flatten() {
                x0 = x0.min(x);
                y0 = y0.min(y);
                x1 = x1.max(x);
                y1 = y1.max(y);
            }
            x0 = x0.min(region.x);
            y0 = y0.min(region.y);
            x1 = x1.max(region.x + region.width - 1);
            y1 = y1.max(region.y + region.height - 1);
            bounds = Rect::new(x0, y0, x1 - x0 + 1, y1 - y0 + 1);
        }
        let mut owner = OwnerGrid::new(bounds);
        for (i, cs) in cells.iter().enumerate() {
            for &c in cs {
                if !owner.set(c, i as u32) {
                    return Err(Error::InvalidArgument(format!(
                        "tiles overlap at cell {c:?}"
                    )));
                }
            }
        }
        Ok(Tiling {
            shape,
            oriented,
            region,
            tiles,
            owner,
        })
    }

    /// A single tile, subdivided `depth` times. The region is the largest
    /// square of the footprint built from whole shape cells.
    pub fn subdivided_patch(rule: &ProductionRule, seed: Orientation, depth: u32) -> Tiling {
        let mut tiles = vec![Tile::new(Transform {
            orientation: seed,
            translation: (0, 0),
        })];
        for _ in 0..depth {
            tiles = tiles
                .iter()
                .flat_map(|t| subdivide_unchecked(t, rule))
                .collect();
        }
        let span = rule.scale().pow(depth) as i32;
        let region = inscribed_square(&rule.shape().oriented(seed), span);
        Tiling::from_tiles(rule.shape().clone(), region, tiles).expect("subdivision never overlaps")
    }

    pub fn shape(&self) -> &CellSet {
        &self.shape
    }

    pub fn region(&self) -> Rect {
        self.region
    }

    /// Absolute cells of tile `index`, in oriented-shape order.
    pub fn tile_cells(&self, index: usize) -> impl Iterator<Item = Cell> + '_ {
        let t = &self.tiles[index];
        let (tx, ty) = t.origin();
        self.oriented[t.orientation().code() as usize]
            .iter()
            .map(move |&(x, y)| (x + tx, y + ty))
    }

    /// Cells of `shape` in orientation `o`, normalized.
    pub fn oriented_cells(&self, o: Orientation) -> &[Cell] {
        &self.oriented[o.code() as usize]
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    pub fn tiles_mut(&mut self) -> &mut [Tile] {
        &mut self.tiles
    }

    pub fn owner_grid(&self) -> &OwnerGrid {
        &self.owner
    }

    /// Owning tile of any cell covered by a stored tile.
    pub fn owner_of(&self, cell: Cell) -> Option<u32> {
        self.owner.get(cell)
    }

    /// Owning tile of a cell of the addressable region.
    pub fn cell_owner(&self, cell: Cell) -> Option<u32> {
        if self.region.contains(cell) {
            self.owner.get(cell)
        } else {
            None
        }
    }

    /// Checks that the region is covered exactly and the owner map agrees
    /// with the tiles.
    pub fn validate(&self) -> Result<()> {
        for c in self.region.cells() {
            if self.owner.get(c).is_none() {
                return Err(Error::InvalidArgument(format!(
                    "cell {c:?} of the region is uncovered"
                )));
            }
        }
        let mut covered = 0usize;
        for i in 0..self.tiles.len() {
            for c in self.tile_cells(i) {
                if self.owner.get(c) != Some(i as u32) {
                    return Err(Error::InvalidArgument(format!(
                        "owner map disagrees at {c:?}"
                    )));
                }
                covered += 1;
            }
        }
        let owned = self.owner.owners.iter().filter(|&&o| o != NO_OWNER).count();
        if owned != covered {
            return Err(Error::InvalidArgument("owner map has stray cells".into()));
        }
        Ok(())
    }

    /// Indices of tiles with at least one cell inside the region.
    pub fn tiles_in_region(&self) -> Vec<usize> {
        (0..self.tiles.len())
            .filter(|&i| self.tile_cells(i).any(|c| self.region.contains(c)))
            .collect()
    }
}

/// Largest `k*span` square made of whole shape cells, first in row-major order.
fn inscribed_square(shape: &CellSet, span: i32) -> Rect {
    let (w, h) = shape.extent();
    let mut best = (0, (0, 0));
    for y in 0..h {
        for x in 0..w {
            let mut k = 0;
            while (0..=k).all(|dy| (0..=k).all(|dx| shape.contains((x + dx, y + dy)))) {
                k += 1;
            }
            if k > best.0 {
                best = (k, (x, y));
            }
        }
    }
    let (k, (x, y)) = best;
    Rect::new(x * span, y * span, k * span, k * span)
}

fn subdivide_unchecked(tile: &Tile, rule: &ProductionRule) -> Vec<Tile> {
    let l = rule.scale() as i32;
    let (px, py) = tile.origin();
    rule.children_for(tile.orientation())
        .iter()
        .map(|c| {
            Tile::new(Transform {
                orientation: c.orientation,
                translation: (c.translation.0 + l * px, c.translation.1 + l * py),
            })
        })
        .collect()
}

/// Replaces `tile` by its `L²` children at `L`-times finer cell resolution.
pub fn subdivide(tile: &Tile, shape: &CellSet, rule: &ProductionRule) -> Result<Vec<Tile>> {
    if shape != rule.shape() {
        return Err(Error::RuleMismatch(
            "tile shape differs from the rule's shape".into(),
        ));
    }
    Ok(subdivide_unchecked(tile, rule))
}

/// Cells of margin kept around a covered rectangle so that every tile
/// touching it has a complete neighborhood.
pub const COVER_MARGIN: i32 = 8;

/// Seed placement for [`cover_rectangle`]: how deep the big polyomino is and
/// where the target rectangle sits inside its footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CoverPlan {
    pub depth: u32,
    pub seed: Transform,
    /// Rectangle origin within the big polyomino's footprint.
    pub anchor: Cell,
}

/// Picks the shallowest big polyomino whose largest inscribed square holds
/// the rectangle plus [`COVER_MARGIN`] on every side, with the rectangle
/// centered and then shifted by `seed.translation`.
pub fn plan_cover(width: u32, height: u32, rule: &ProductionRule, seed: Transform) -> CoverPlan {
    let oriented = rule.shape().oriented(seed.orientation);
    let (sx, sy) = seed.translation;
    let need_w = width as i64 + 2 * (COVER_MARGIN as i64 + sx.unsigned_abs() as i64);
    let need_h = height as i64 + 2 * (COVER_MARGIN as i64 + sy.unsigned_abs() as i64);
    let mut depth = 0u32;
    loop {
        let span = (rule.scale() as i64).pow(depth);
        let sq = inscribed_square(&oriented, 1);
        let side = sq.width as i64 * span;
        if side >= need_w.max(need_h) {
            let cx = sq.x as i64 * span + (side - width as i64) / 2 + sx as i64;
            let cy = sq.y as i64 * span + (side - height as i64) / 2 + sy as i64;
            return CoverPlan {
                depth,
                seed,
                anchor: (cx as i32, cy as i32),
            };
        }
        depth += 1;
    }
}

/// Covers a `width` x `height` cell rectangle by subdividing one big
/// polyomino and keeping only tiles near the rectangle.
///
/// The rectangle occupies cells `[0, width) x [0, height)`; kept tiles reach
/// at least [`COVER_MARGIN`] cells beyond it. If `classes` is given (an index
/// production table and the big polyomino's class), every kept tile is
/// tagged with its structural index.
pub fn cover_rectangle(
    width: u32,
    height: u32,
    rule: &ProductionRule,
    seed: Transform,
) -> Result<Tiling> {
    cover_rectangle_classified(width, height, rule, seed, None)
}

/// Class production lookup used while covering: `(root class, table)` where
/// `table(parent)[i]` is the class of the parent's `i`-th child.
pub type ClassLookup<'a> = (ClassId, &'a dyn Fn(ClassId) -> Option<&'a [ClassId]>);

pub fn cover_rectangle_classified(
    width: u32,
    height: u32,
    rule: &ProductionRule,
    seed: Transform,
    classes: Option<ClassLookup<'_>>,
) -> Result<Tiling> {
    if width < 1 || height < 1 {
        return Err(Error::InvalidArgument(format!(
            "cover rectangle must be at least 1x1, got {width}x{height}"
        )));
    }
    let plan = plan_cover(width, height, rule, seed);
    let (ax, ay) = (plan.anchor.0 as i64, plan.anchor.1 as i64);
    let target = Rect::new(0, 0, width as i32, height as i32);
    let keep = target.expanded(COVER_MARGIN);
    let l = rule.scale() as i64;
    let shape = rule.shape();

    // Origins are in units of the current level's cell span, relative to the
    // big polyomino's bounding-box corner.
    let mut level: Vec<(Orientation, (i64, i64), Option<ClassId>)> =
        vec![(seed.orientation, (0, 0), classes.map(|c| c.0))];
    for d in (0..plan.depth).rev() {
        let span = l.pow(d);
        let mut next = Vec::with_capacity(level.len() * rule.area_factor());
        for &(orientation, (px, py), class) in &level {
            let child_classes = match (classes, class) {
                (Some((_, lookup)), Some(c)) => Some(lookup(c).ok_or(Error::UnknownClass(c))?),
                _ => None,
            };
            for (i, c) in rule.children_for(orientation).iter().enumerate() {
                let ox = c.translation.0 as i64 + l * px;
                let oy = c.translation.1 as i64 + l * py;
                let (w, h) = shape.oriented(c.orientation).extent();
                let bx = ox * span - ax;
                let by = oy * span - ay;
                let meets = bx < (keep.x + keep.width) as i64
                    && (keep.x as i64) < bx + w as i64 * span
                    && by < (keep.y + keep.height) as i64
                    && (keep.y as i64) < by + h as i64 * span;
                if meets {
                    next.push((c.orientation, (ox, oy), child_classes.map(|cc| cc[i])));
                }
            }
        }
        level = next;
    }
    let tiles: Vec<Tile> = level
        .into_iter()
        .map(|(orientation, (ox, oy), class)| Tile {
            transform: Transform {
                orientation,
                translation: ((ox - ax) as i32, (oy - ay) as i32),
            },
            class,
        })
        .filter(|t| t.cells(shape).iter().any(|&c| keep.contains(c)))
        .collect();
    Tiling::from_tiles(shape.clone(), target, tiles)
}
