//! Structural indices: tiles are classified by their own orientation plus
//! the placement of every tile touching their cells within Chebyshev
//! distance one.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::polyomino::shape::{Cell, CellSet, Orientation};
use crate::polyomino::tiling::{ClassId, Tiling};

/// A neighbor tile: origin offset from the center tile and its orientation.
pub type NeighborMark = (i32, i32, Orientation);

/// Canonical description of a tile's neighborhood.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    pub orientation: Orientation,
    /// Sorted by `(dy, dx, orientation)`.
    pub neighbors: Vec<NeighborMark>,
}

impl Signature {
    pub fn new(orientation: Orientation, mut neighbors: Vec<NeighborMark>) -> Self {
        neighbors.sort_by_key(|&(dx, dy, o)| (dy, dx, o));
        neighbors.dedup();
        Signature {
            orientation,
            neighbors,
        }
    }

    /// Signature of a lone tile (no neighbors at all).
    pub fn isolated(orientation: Orientation) -> Self {
        Signature {
            orientation,
            neighbors: Vec::new(),
        }
    }

    /// Canonical byte encoding: orientation, neighbor count, then
    /// `dx dy orientation` per neighbor as signed bytes.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(2 + 3 * self.neighbors.len());
        out.push(self.orientation.code());
        out.push(self.neighbors.len() as u8);
        for &(dx, dy, o) in &self.neighbors {
            out.push(dx as i8 as u8);
            out.push(dy as i8 as u8);
            out.push(o.code());
        }
        out
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.encode())
    }

    pub fn from_hex(text: &str) -> Result<Self> {
        let bytes =
            hex::decode(text).map_err(|e| Error::Parse(format!("bad signature hex: {e}")))?;
        let bad = || Error::Parse(format!("malformed signature {text:?}"));
        if bytes.len() < 2 || bytes.len() != 2 + 3 * bytes[1] as usize {
            return Err(bad());
        }
        let orientation = Orientation::from_code(bytes[0]).ok_or_else(bad)?;
        let neighbors = bytes[2..]
            .chunks(3)
            .map(|c| {
                Orientation::from_code(c[2])
                    .map(|o| (c[0] as i8 as i32, c[1] as i8 as i32, o))
                    .ok_or_else(bad)
            })
            .collect::<Result<Vec<_>>>()?;
        let sig = Signature::new(orientation, neighbors);
        if sig.encode() != bytes {
            return Err(bad());
        }
        Ok(sig)
    }

    /// True when every cell within Chebyshev distance 1 of the center tile
    /// is covered by the center or a listed neighbor.
    pub fn is_complete(&self, shape: &CellSet) -> bool {
        let covered: BTreeSet<Cell> = self
            .neighbors
            .iter()
            .flat_map(|&(dx, dy, o)| {
                shape
                    .oriented(o)
                    .cells()
                    .iter()
                    .map(move |&(x, y)| (x + dx, y + dy))
                    .collect::<Vec<_>>()
            })
            .collect();
        ring_cells(shape.oriented(self.orientation).cells())
            .iter()
            .all(|c| covered.contains(c))
    }
}

/// Cells at Chebyshev distance exactly 1 from the given cell set.
pub fn ring_cells(cells: &[Cell]) -> Vec<Cell> {
    let own: BTreeSet<Cell> = cells.iter().copied().collect();
    let mut ring = BTreeSet::new();
    for &(x, y) in cells {
        for dy in -1..=1 {
            for dx in -1..=1 {
                let c = (x + dx, y + dy);
                if !own.contains(&c) {
                    ring.insert(c);
                }
            }
        }
    }
    let mut ring: Vec<Cell> = ring.into_iter().collect();
    ring.sort_by_key(|c| (c.1, c.0));
    ring
}

/// Signature of tile `index` read from the tiling's geometry. Cells not
/// covered by any stored tile count as outside the tiling.
pub fn signature_of(tiling: &Tiling, index: usize) -> Signature {
    let tile = tiling.tiles()[index];
    let (ox, oy) = tile.origin();
    let cells: Vec<Cell> = tiling.tile_cells(index).collect();
    let mut seen: Vec<u32> = Vec::new();
    for &(x, y) in &cells {
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(o) = tiling.owner_of((x + dx, y + dy)) {
                    if o as usize != index && !seen.contains(&o) {
                        seen.push(o);
                    }
                }
            }
        }
    }
    let neighbors = seen
        .into_iter()
        .map(|o| {
            let n = tiling.tiles()[o as usize];
            let (nx, ny) = n.origin();
            (nx - ox, ny - oy, n.orientation())
        })
        .collect();
    Signature::new(tile.orientation(), neighbors)
}

/// The set of known structural indices. Ids are dense and assigned in
/// insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    signatures: Vec<Signature>,
    complete: Vec<bool>,
    ids: HashMap<Signature, ClassId>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn len(&self) -> usize {
        self.signatures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signatures.is_empty()
    }

    pub fn id_of(&self, sig: &Signature) -> Option<ClassId> {
        self.ids.get(sig).copied()
    }

    pub fn signature(&self, id: ClassId) -> &Signature {
        &self.signatures[id as usize]
    }

    pub fn signatures(&self) -> &[Signature] {
        &self.signatures
    }

    /// Whether the class has a full neighbor ring (i.e. occurs away from the
    /// boundary of the generating polyomino).
    pub fn is_complete(&self, id: ClassId) -> bool {
        self.complete[id as usize]
    }

    pub fn complete_ids(&self) -> impl Iterator<Item = ClassId> + '_ {
        (0..self.len() as ClassId).filter(|&i| self.complete[i as usize])
    }

    /// Returns the id of `sig`, registering it if new.
    pub fn insert(&mut self, sig: Signature, shape: &CellSet) -> ClassId {
        if let Some(&id) = self.ids.get(&sig) {
            return id;
        }
        let id = self.signatures.len() as ClassId;
        self.complete.push(sig.is_complete(shape));
        self.ids.insert(sig.clone(), id);
        self.signatures.push(sig);
        id
    }

    /// `id <int> signature <hex>` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("polyregistry v1\n");
        for (i, s) in self.signatures.iter().enumerate() {
            let _ = writeln!(out, "id {i} signature {}", s.to_hex());
        }
        out
    }

    pub fn parse(text: &str, shape: &CellSet) -> Result<Self> {
        let mut reg = Registry::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if line.starts_with("polyregistry") {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            match f[..] {
                ["id", id, "signature", hex] => {
                    let id: usize = id
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad id in {line:?}")))?;
                    if id != reg.len() {
                        return Err(Error::Parse(format!(
                            "registry ids must be dense, got {id}"
                        )));
                    }
                    reg.insert(Signature::from_hex(hex)?, shape);
                }
                _ => return Err(Error::Parse(format!("bad registry line {line:?}"))),
            }
        }
        Ok(reg)
    }
}

/// Classifies every tile of `tiling` from its geometry, registering new
/// signatures in `registry`. Tiles get their class id written back.
pub fn classify_with(tiling: &mut Tiling, registry: &mut Registry) -> Vec<ClassId> {
    let sigs: Vec<Signature> = (0..tiling.tiles().len())
        .map(|i| signature_of(tiling, i))
        .collect();
    let shape = tiling.shape().clone();
    let ids: Vec<ClassId> = sigs
        .into_iter()
        .map(|s| registry.insert(s, &shape))
        .collect();
    for (t, &id) in tiling.tiles_mut().iter_mut().zip(&ids) {
        t.class = Some(id);
    }
    ids
}

/// Classifies every tile with a fresh registry.
pub fn classify_tiles(tiling: &mut Tiling) -> (Vec<ClassId>, Registry) {
    let mut reg = Registry::new();
    let ids = classify_with(tiling, &mut reg);
    (ids, reg)
}
