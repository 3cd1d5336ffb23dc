//! Representative neighborhoods. Every complete structural index is
//! optimized inside one concrete occurrence: the tile itself plus its
//! neighbor ring, each neighbor tagged with its own (complete) class.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::polyomino::rule::ProductionRule;
use crate::polyomino::shape::{Cell, Orientation, Transform};
use crate::polyomino::tiling::{ClassId, Rect, Tile, Tiling};
use crate::structure::layout::ClassLayouts;
use crate::structure::production::ClassCatalog;
use crate::structure::signature::signature_of;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ContextTile {
    pub class: ClassId,
    pub orientation: Orientation,
    /// Cell origin relative to the center tile.
    pub origin: Cell,
}

/// A class occurrence with known neighbor classes. `tiles[0]` is the center
/// at the origin; the rest follow the class signature's neighbor order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassContext {
    pub tiles: Vec<ContextTile>,
}

impl ClassContext {
    pub fn center(&self) -> &ContextTile {
        &self.tiles[0]
    }
}

/// Contexts of the `L²` children of a context's center, in rule order.
fn child_contexts(
    ctx: &ClassContext,
    catalog: &ClassCatalog,
    rule: &ProductionRule,
) -> Vec<(ClassId, ClassContext)> {
    let l = rule.scale() as i32;
    let mut tiles = Vec::new();
    let mut classes = Vec::new();
    for t in &ctx.tiles {
        let kids = catalog
            .production
            .children(t.class)
            .expect("catalog is closed");
        for (c, &k) in rule.children_for(t.orientation).iter().zip(kids) {
            tiles.push(Tile::new(Transform {
                orientation: c.orientation,
                translation: (
                    c.translation.0 + l * t.origin.0,
                    c.translation.1 + l * t.origin.1,
                ),
            }));
            classes.push(k);
        }
    }
    let fine = Tiling::from_tiles(rule.shape().clone(), Rect::new(0, 0, 1, 1), tiles)
        .expect("subdivision never overlaps");
    let mut out = Vec::with_capacity(rule.area_factor());
    for i in 0..rule.area_factor() {
        let class = classes[i];
        let center = fine.tiles()[i];
        let (ox, oy) = center.origin();
        let sig = catalog.registry.signature(class);
        debug_assert_eq!(&signature_of(&fine, i), sig);
        // Locate each neighbor of the child among the fine tiles.
        let by_place: HashMap<(Cell, Orientation), usize> = neighbor_tiles(&fine, i)
            .into_iter()
            .map(|j| {
                let t = fine.tiles()[j];
                (((t.origin().0 - ox, t.origin().1 - oy), t.orientation()), j)
            })
            .collect();
        let mut ctx_tiles = vec![ContextTile {
            class,
            orientation: center.orientation(),
            origin: (0, 0),
        }];
        for &(dx, dy, o) in &sig.neighbors {
            let j = by_place[&((dx, dy), o)];
            ctx_tiles.push(ContextTile {
                class: classes[j],
                orientation: o,
                origin: (dx, dy),
            });
        }
        out.push((class, ClassContext { tiles: ctx_tiles }));
    }
    out
}

fn neighbor_tiles(t: &Tiling, index: usize) -> Vec<usize> {
    let mut seen = Vec::new();
    for (x, y) in t.tile_cells(index) {
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(o) = t.owner_of((x + dx, y + dy)) {
                    if o as usize != index && !seen.contains(&(o as usize)) {
                        seen.push(o as usize);
                    }
                }
            }
        }
    }
    seen
}

/// Finds a context for every complete class in which all neighbors are
/// complete too, by walking the production table breadth-first from the
/// isolated roots. Indexed by class id; `None` for incomplete classes.
pub fn find_contexts(
    catalog: &ClassCatalog,
    rule: &ProductionRule,
) -> Result<Vec<Option<ClassContext>>> {
    let reg = &catalog.registry;
    let n = reg.len();
    let mut good: Vec<Option<ClassContext>> = vec![None; n];
    let mut expanded = vec![false; n];
    let mut queue: VecDeque<ClassContext> = Orientation::all()
        .map(|o| ClassContext {
            tiles: vec![ContextTile {
                class: catalog.root(o),
                orientation: o,
                origin: (0, 0),
            }],
        })
        .collect();
    while let Some(ctx) = queue.pop_front() {
        let id = ctx.center().class as usize;
        if expanded[id] {
            continue;
        }
        expanded[id] = true;
        for (child, cctx) in child_contexts(&ctx, catalog, rule) {
            let c = child as usize;
            if good[c].is_none()
                && reg.is_complete(child)
                && cctx.tiles.iter().all(|t| reg.is_complete(t.class))
            {
                good[c] = Some(cctx.clone());
            }
            if !expanded[c] {
                queue.push_back(cctx);
            }
        }
    }
    if let Some(missing) = reg.complete_ids().find(|&id| good[id as usize].is_none()) {
        return Err(Error::InvalidArgument(format!(
            "complete class {missing} never occurs with a complete neighbor ring"
        )));
    }
    Ok(good)
}

/// A context rendered at pixel resolution: the center tile's bounding box
/// grown by one cell (`S` pixels) on every side.
#[derive(Debug, Clone)]
pub struct Canvas {
    pub width: i32,
    pub height: i32,
    /// Canvas position of the center tile's pixel origin.
    pub offset: Cell,
    /// Per canvas pixel: context tile slot and tile-local pixel index.
    pub pixels: Vec<Option<(u8, u16)>>,
    /// Canvas position of each center pixel, by tile-local index.
    pub center: Vec<Cell>,
}

impl Canvas {
    pub fn build(ctx: &ClassContext, layouts: &ClassLayouts) -> Canvas {
        let s = layouts.s as i32;
        let grid = layouts.grid(ctx.center().orientation);
        let (w, h) = grid
            .pixels
            .iter()
            .fold((0, 0), |(w, h), &(x, y)| (w.max(x + 1), h.max(y + 1)));
        let (width, height) = (w + 2 * s, h + 2 * s);
        let mut pixels = vec![None; (width * height) as usize];
        for (slot, t) in ctx.tiles.iter().enumerate() {
            let g = layouts.grid(t.orientation);
            for (u, &(x, y)) in g.pixels.iter().enumerate() {
                let cx = t.origin.0 * s + x + s;
                let cy = t.origin.1 * s + y + s;
                if cx >= 0 && cy >= 0 && cx < width && cy < height {
                    pixels[(cy * width + cx) as usize] = Some((slot as u8, u as u16));
                }
            }
        }
        let center = grid.pixels.iter().map(|&(x, y)| (x + s, y + s)).collect();
        Canvas {
            width,
            height,
            offset: (s, s),
            pixels,
            center,
        }
    }

    #[inline]
    pub fn get(&self, (x, y): Cell) -> Option<(u8, u16)> {
        if x < 0 || y < 0 || x >= self.width || y >= self.height {
            return None;
        }
        self.pixels[(y * self.width + x) as usize]
    }
}
