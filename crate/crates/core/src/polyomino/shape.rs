use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Integer lattice cell `(x, y)`; `y` grows downward.
pub type Cell = (i32, i32);

/// A polyomino: a non-empty, edge-connected set of unit cells normalized so
/// that the minimum `x` and minimum `y` are both zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellSet {
    cells: Vec<Cell>,
}

impl CellSet {
    /// Builds a shape from arbitrary cells, normalizing the position.
    pub fn new(cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let set: BTreeSet<Cell> = cells.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidShape("shape has no cells".into()));
        }
        let cells = normalize(set.into_iter().collect());
        if !is_edge_connected(&cells) {
            return Err(Error::InvalidShape("cells are not edge-connected".into()));
        }
        Ok(CellSet { cells })
    }

    /// A `width` x `height` block of cells.
    pub fn rectangle(width: u32, height: u32) -> Result<Self> {
        CellSet::new((0..height as i32).flat_map(|y| (0..width as i32).map(move |x| (x, y))))
    }

    pub fn monomino() -> Self {
        CellSet {
            cells: vec![(0, 0)],
        }
    }

    /// Cells in canonical (row-major: `y`, then `x`) order.
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Width and height of the bounding box.
    pub fn extent(&self) -> (i32, i32) {
        let w = self.cells.iter().map(|c| c.0).max().unwrap_or(-1) + 1;
        let h = self.cells.iter().map(|c| c.1).max().unwrap_or(-1) + 1;
        (w, h)
    }

    pub fn contains(&self, cell: Cell) -> bool {
        self.cells
            .binary_search_by(|c| row_major(c).cmp(&row_major(&cell)))
            .is_ok()
    }

    /// Index of `cell` within [`cells`](Self::cells).
    pub fn index_of(&self, cell: Cell) -> Option<usize> {
        self.cells
            .binary_search_by(|c| row_major(c).cmp(&row_major(&cell)))
            .ok()
    }

    /// Every cell replaced by an `factor` x `factor` block.
    pub fn scaled(&self, factor: u32) -> CellSet {
        let f = factor as i32;
        let mut cells: Vec<Cell> = self
            .cells
            .iter()
            .flat_map(|&(x, y)| {
                (0..f).flat_map(move |dy| (0..f).map(move |dx| (x * f + dx, y * f + dy)))
            })
            .collect();
        cells.sort_by_key(row_major);
        CellSet { cells }
    }

    /// The shape in the given orientation, re-normalized.
    pub fn oriented(&self, orientation: Orientation) -> CellSet {
        CellSet {
            cells: normalize(self.cells.iter().map(|&c| orientation.apply(c)).collect()),
        }
    }

    /// Orientations producing pairwise distinct shapes, lowest code first.
    pub fn distinct_orientations(&self) -> Vec<Orientation> {
        let mut seen = HashSet::new();
        Orientation::all()
            .filter(|&o| seen.insert(self.oriented(o)))
            .collect()
    }

    /// Parses the plain-text shape asset format: one `x y` pair per line,
    /// `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cells = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let parse = |p: Option<&str>| -> Result<i32> {
                p.and_then(|s| s.parse().ok()).ok_or_else(|| {
                    Error::Parse(format!(
                        "shape line {}: expected `x y`, got {raw:?}",
                        lineno + 1
                    ))
                })
            };
            let x = parse(parts.next())?;
            let y = parse(parts.next())?;
            if parts.next().is_some() {
                return Err(Error::Parse(format!(
                    "shape line {}: trailing tokens in {raw:?}",
                    lineno + 1
                )));
            }
            cells.push((x, y));
        }
        CellSet::new(cells)
    }

    pub fn to_asset_string(&self, name: &str) -> String {
        let mut out = format!("# {name}\n");
        for (x, y) in &self.cells {
            out.push_str(&format!("{x} {y}\n"));
        }
        out
    }
}

impl fmt::Debug for CellSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (w, h) = self.extent();
        writeln!(f, "CellSet {w}x{h}")?;
        for y in 0..h {
            for x in 0..w {
                f.write_str(if self.contains((x, y)) { "#" } else { "." })?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn row_major(c: &Cell) -> (i32, i32) {
    (c.1, c.0)
}

fn normalize(mut cells: Vec<Cell>) -> Vec<Cell> {
    let mx = cells.iter().map(|c| c.0).min().unwrap_or(0);
    let my = cells.iter().map(|c| c.1).min().unwrap_or(0);
    for c in &mut cells {
        c.0 -= mx;
        c.1 -= my;
    }
    cells.sort_by_key(row_major);
    cells.dedup();
    cells
}

fn is_edge_connected(cells: &[Cell]) -> bool {
    let set: HashSet<Cell> = cells.iter().copied().collect();
    let mut seen = HashSet::new();
    let mut queue = VecDeque::from([cells[0]]);
    seen.insert(cells[0]);
    while let Some((x, y)) = queue.pop_front() {
        for n in [(x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)] {
            if set.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.len() == set.len()
}

/// One of the eight lattice symmetries: an optional mirror (`x -> -x`)
/// followed by `rotation` quarter turns (`(x, y) -> (-y, x)`).
///
/// The compact code is `rotation + 4 * mirrored`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Orientation(u8);

impl Orientation {
    pub const IDENTITY: Orientation = Orientation(0);

    pub fn new(rotation: u8, mirrored: bool) -> Self {
        Orientation((rotation % 4) + if mirrored { 4 } else { 0 })
    }

    pub fn from_code(code: u8) -> Option<Self> {
        (code < 8).then_some(Orientation(code))
    }

    pub fn code(self) -> u8 {
        self.0
    }

    pub fn rotation(self) -> u8 {
        self.0 % 4
    }

    pub fn mirrored(self) -> bool {
        self.0 >= 4
    }

    pub fn all() -> impl Iterator<Item = Orientation> {
        (0..8).map(Orientation)
    }

    /// Applies the linear part to a lattice vector.
    pub fn apply(self, (x, y): Cell) -> Cell {
        let (mut x, mut y) = if self.mirrored() { (-x, y) } else { (x, y) };
        for _ in 0..self.rotation() {
            (x, y) = (-y, x);
        }
        (x, y)
    }

    fn matrix(self) -> [i32; 4] {
        let (a, c) = self.apply((1, 0));
        let (b, d) = self.apply((0, 1));
        [a, b, c, d]
    }

    fn from_matrix(m: [i32; 4]) -> Self {
        Orientation::all()
            .find(|o| o.matrix() == m)
            .expect("orthogonal lattice matrix")
    }

    /// `self.then(other)` applies `self` first, then `other`.
    pub fn then(self, other: Orientation) -> Orientation {
        let a = self.matrix();
        let b = other.matrix();
        Orientation::from_matrix([
            b[0] * a[0] + b[1] * a[2],
            b[0] * a[1] + b[1] * a[3],
            b[2] * a[0] + b[3] * a[2],
            b[2] * a[1] + b[3] * a[3],
        ])
    }

    pub fn inverse(self) -> Orientation {
        Orientation::all()
            .find(|&o| self.then(o) == Orientation::IDENTITY)
            .expect("group element has an inverse")
    }
}

/// Places a shape: orient, re-normalize, then translate so the bounding box
/// minimum lands on `translation`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Transform {
    pub orientation: Orientation,
    pub translation: Cell,
}

impl Transform {
    pub const IDENTITY: Transform = Transform {
        orientation: Orientation::IDENTITY,
        translation: (0, 0),
    };

    pub fn new(rotation: u8, mirrored: bool, translation: Cell) -> Self {
        Transform {
            orientation: Orientation::new(rotation, mirrored),
            translation,
        }
    }

    pub fn rotation(&self) -> u8 {
        self.orientation.rotation()
    }

    pub fn mirrored(&self) -> bool {
        self.orientation.mirrored()
    }

    /// Absolute cells of `shape` under this transform, in the order of
    /// `shape.oriented(..)` cells.
    pub fn place(&self, shape: &CellSet) -> Vec<Cell> {
        let (tx, ty) = self.translation;
        shape
            .oriented(self.orientation)
            .cells()
            .iter()
            .map(|&(x, y)| (x + tx, y + ty))
            .collect()
    }
}

/// Applies `t` to `shape` and returns the re-normalized result.
///
/// Translation only moves the shape; since [`CellSet`] is position-free the
/// returned set records shape and orientation. Use [`Transform::place`] for
/// absolute cells.
pub fn apply_transform(shape: &CellSet, t: &Transform) -> CellSet {
    shape.oriented(t.orientation)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn l_tromino() -> CellSet {
        CellSet::new([(0, 0), (0, 1), (1, 1)]).unwrap()
    }

    #[test]
    fn rejects_empty_and_disconnected() {
        assert!(CellSet::new([]).is_err());
        assert!(CellSet::new([(0, 0), (2, 0)]).is_err());
        assert!(CellSet::new([(0, 0), (1, 1)]).is_err());
    }

    #[test]
    fn normalizes_position() {
        let s = CellSet::new([(5, 7), (6, 7)]).unwrap();
        assert_eq!(s.cells(), &[(0, 0), (1, 0)]);
    }

    #[test]
    fn identity_transform_is_noop() {
        let s = l_tromino();
        assert_eq!(apply_transform(&s, &Transform::IDENTITY), s);
        assert_eq!(Transform::IDENTITY.place(&s), s.cells().to_vec());
    }

    #[test]
    fn half_turn_twice_is_identity() {
        let s = l_tromino();
        let half = Transform::new(2, false, (0, 0));
        let once = apply_transform(&s, &half);
        assert_ne!(once, s);
        assert_eq!(apply_transform(&once, &half), s);
    }

    #[test]
    fn orientation_group_laws() {
        for a in Orientation::all() {
            assert_eq!(a.then(a.inverse()), Orientation::IDENTITY);
            for b in Orientation::all() {
                let v = (3, -2);
                assert_eq!(a.then(b).apply(v), b.apply(a.apply(v)));
            }
        }
    }

    #[test]
    fn distinct_orientation_counts() {
        assert_eq!(CellSet::monomino().distinct_orientations().len(), 1);
        assert_eq!(
            CellSet::rectangle(2, 1)
                .unwrap()
                .distinct_orientations()
                .len(),
            2
        );
        assert_eq!(l_tromino().distinct_orientations().len(), 4);
        let f = CellSet::new([(1, 0), (2, 0), (0, 1), (1, 1), (1, 2)]).unwrap();
        assert_eq!(f.distinct_orientations().len(), 8);
    }

    #[test]
    fn parse_asset_format() {
        let s = CellSet::parse("# comment\n0 0\n1 0 # trailing\n\n1 1\n").unwrap();
        assert_eq!(s.len(), 3);
        assert!(CellSet::parse("0 0\n1\n").is_err());
        assert!(CellSet::parse("0 0\n1 0 3\n").is_err());
        assert_eq!(CellSet::parse(&s.to_asset_string("x")).unwrap(), s);
    }

    #[test]
    fn scaled_area() {
        let s = l_tromino().scaled(3);
        assert_eq!(s.len(), 27);
        assert!(s.contains((2, 5)));
        assert!(!s.contains((3, 0)));
    }

    proptest! {
        #[test]
        fn transform_preserves_cardinality(code in 0u8..8, tx in -50i32..50, ty in -50i32..50) {
            let s = CellSet::new([(0, 0), (1, 0), (1, 1), (1, 2), (2, 2), (0, 2)]).unwrap();
            let t = Transform { orientation: Orientation::from_code(code).unwrap(), translation: (tx, ty) };
            let placed = t.place(&s);
            prop_assert_eq!(placed.len(), s.len());
            prop_assert_eq!(CellSet::new(placed).unwrap(), apply_transform(&s, &t));
            prop_assert_eq!(apply_transform(&s, &t).len(), s.len());
        }
    }
}
