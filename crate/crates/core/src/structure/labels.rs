//! Vertex labels and border segments of a tiling.

use std::collections::BTreeMap;

use crate::polyomino::shape::{Cell, Orientation};
use crate::polyomino::tiling::{Rect, Tiling};

/// One tile corner meeting a lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexMark {
    pub orientation: Orientation,
    /// Index of the cell within the tile's oriented, row-major cell list.
    pub cell: u8,
    /// Corner of that cell touching the point: 0 NW, 1 NE, 2 SW, 3 SE.
    pub corner: u8,
}

/// Marks of the four cells around a lattice point, in NW, NE, SW, SE order;
/// `None` where no tile covers the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexLabel {
    pub marks: [Option<VertexMark>; 4],
}

impl VertexLabel {
    pub fn mark_count(&self) -> usize {
        self.marks.iter().flatten().count()
    }

    fn encode_into(&self, out: &mut Vec<u8>) {
        for m in &self.marks {
            match m {
                Some(m) => {
                    out.push(m.orientation.code());
                    out.push(m.cell);
                    out.push(m.corner);
                }
                None => out.extend([0xff, 0xff, 0xff]),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Horizontal,
    Vertical,
}

/// A border segment identified by the labels at its two ends (top or left
/// end first).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SegmentLabel {
    pub start: VertexLabel,
    pub end: VertexLabel,
    pub axis: Axis,
}

impl SegmentLabel {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(25);
        out.push(match self.axis {
            Axis::Horizontal => 0,
            Axis::Vertical => 1,
        });
        self.start.encode_into(&mut out);
        self.end.encode_into(&mut out);
        out
    }

    /// Hex of the canonical encoding; used as the segment key in files.
    pub fn key(&self) -> String {
        hex::encode(self.encode())
    }
}

/// A maximal straight run of tile boundary between two break points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub label: SegmentLabel,
    /// Lattice point at the top/left end.
    pub start: Cell,
    /// Length in cell edges.
    pub length: i32,
    /// Tile to the left of (vertical) or above (horizontal) the run; it owns
    /// the segment's border band.
    pub owner: Option<u32>,
}

impl Segment {
    pub fn axis(&self) -> Axis {
        self.label.axis
    }

    pub fn end(&self) -> Cell {
        match self.axis() {
            Axis::Vertical => (self.start.0, self.start.1 + self.length),
            Axis::Horizontal => (self.start.0 + self.length, self.start.1),
        }
    }
}

/// Corner code of each quadrant cell (NW, NE, SW, SE) relative to the point.
const QUADRANTS: [((i32, i32), u8); 4] = [((-1, -1), 3), ((0, -1), 2), ((-1, 0), 1), ((0, 0), 0)];

/// Label of lattice point `p`, or `None` if no tile touches it.
pub fn vertex_label(tiling: &Tiling, (px, py): Cell) -> Option<VertexLabel> {
    let mut marks = [None; 4];
    for (slot, &((dx, dy), corner)) in QUADRANTS.iter().enumerate() {
        let cell = (px + dx, py + dy);
        if let Some(owner) = tiling.owner_of(cell) {
            let tile = tiling.tiles()[owner as usize];
            let (tx, ty) = tile.origin();
            let local = (cell.0 - tx, cell.1 - ty);
            let idx = tiling
                .oriented_cells(tile.orientation())
                .iter()
                .position(|&c| c == local)
                .expect("owned cell lies in its tile");
            marks[slot] = Some(VertexMark {
                orientation: tile.orientation(),
                cell: idx as u8,
                corner,
            });
        }
    }
    marks
        .iter()
        .any(Option::is_some)
        .then_some(VertexLabel { marks })
}

/// Labels of every lattice point touched by at least one tile.
pub fn label_vertices(tiling: &Tiling) -> BTreeMap<Cell, VertexLabel> {
    let b = tiling.owner_grid().bounds();
    let mut out = BTreeMap::new();
    for py in b.y..=b.y + b.height {
        for px in b.x..=b.x + b.width {
            if let Some(l) = vertex_label(tiling, (px, py)) {
                out.insert((px, py), l);
            }
        }
    }
    out
}

fn differ(a: Option<u32>, b: Option<u32>) -> bool {
    a != b
}

/// Boundary edge on the vertical line `x = X` between rows `y` and `y + 1`.
fn vertical_edge(t: &Tiling, x: i32, y: i32) -> bool {
    differ(t.owner_of((x - 1, y)), t.owner_of((x, y)))
}

/// Boundary edge on the horizontal line `y = Y` between columns `x` and `x + 1`.
fn horizontal_edge(t: &Tiling, x: i32, y: i32) -> bool {
    differ(t.owner_of((x, y - 1)), t.owner_of((x, y)))
}

/// Whether boundary runs must stop at lattice point `p`: anything other
/// than a straight pass-through.
fn is_break(t: &Tiling, (px, py): Cell) -> bool {
    let up = vertical_edge(t, px, py - 1);
    let down = vertical_edge(t, px, py);
    let left = horizontal_edge(t, px - 1, py);
    let right = horizontal_edge(t, px, py);
    !((up && down && !left && !right) || (left && right && !up && !down))
}

/// Splits the tile boundary network into maximal straight segments.
/// Vertical segments come first, each group in row-major order of start.
pub fn extract_segments(tiling: &Tiling) -> Vec<Segment> {
    extract_segments_in(tiling, tiling.owner_grid().bounds())
}

/// As [`extract_segments`], restricted to runs starting inside `area`
/// (lattice points `area.x..=area.x + width`, same for y).
pub fn extract_segments_in(tiling: &Tiling, area: Rect) -> Vec<Segment> {
    let label = |p: Cell| vertex_label(tiling, p).expect("boundary points touch a tile");
    let mut out = Vec::new();
    for py in area.y..=area.y + area.height {
        for px in area.x..=area.x + area.width {
            if !is_break(tiling, (px, py)) {
                continue;
            }
            if vertical_edge(tiling, px, py) {
                let mut y = py + 1;
                while !is_break(tiling, (px, y)) {
                    y += 1;
                }
                out.push(Segment {
                    label: SegmentLabel {
                        start: label((px, py)),
                        end: label((px, y)),
                        axis: Axis::Vertical,
                    },
                    start: (px, py),
                    length: y - py,
                    owner: tiling.owner_of((px - 1, py)),
                });
            }
        }
    }
    for py in area.y..=area.y + area.height {
        for px in area.x..=area.x + area.width {
            if !is_break(tiling, (px, py)) {
                continue;
            }
            if horizontal_edge(tiling, px, py) {
                let mut x = px + 1;
                while !is_break(tiling, (x, py)) {
                    x += 1;
                }
                out.push(Segment {
                    label: SegmentLabel {
                        start: label((px, py)),
                        end: label((x, py)),
                        axis: Axis::Horizontal,
                    },
                    start: (px, py),
                    length: x - px,
                    owner: tiling.owner_of((px, py - 1)),
                });
            }
        }
    }
    out
}

/// Number of unit boundary edges between differently-owned cells (an
/// uncovered cell counts as its own owner).
pub fn boundary_edge_count(tiling: &Tiling) -> usize {
    let b = tiling.owner_grid().bounds();
    let mut n = 0;
    for y in b.y - 1..=b.y + b.height {
        for x in b.x - 1..=b.x + b.width + 1 {
            if vertical_edge(tiling, x, y) {
                n += 1;
            }
        }
    }
    for y in b.y - 1..=b.y + b.height + 1 {
        for x in b.x - 1..=b.x + b.width {
            if horizontal_edge(tiling, x, y) {
                n += 1;
            }
        }
    }
    n
}
