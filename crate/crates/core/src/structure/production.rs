//! Structural-index production: how each class subdivides into child
//! classes, and enumeration of every class the rule can generate.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use super::signature::{classify_with, signature_of, Registry, Signature};
use crate::error::{Error, Result};
use crate::polyomino::rule::ProductionRule;
use crate::polyomino::shape::{Orientation, Transform};
use crate::polyomino::tiling::{ClassId, Rect, Tile, Tiling};

/// The center tile (index 0) plus its listed neighbors, at unit scale.
pub fn context_tiling(sig: &Signature, rule: &ProductionRule) -> Tiling {
    let mut tiles = vec![Tile::new(Transform {
        orientation: sig.orientation,
        translation: (0, 0),
    })];
    tiles.extend(sig.neighbors.iter().map(|&(dx, dy, o)| {
        Tile::new(Transform {
            orientation: o,
            translation: (dx, dy),
        })
    }));
    Tiling::from_tiles(rule.shape().clone(), Rect::new(0, 0, 1, 1), tiles)
        .expect("signature neighbors never overlap")
}

/// Signatures of the `L²` children of a tile with signature `sig`, in rule
/// child order. Derived purely from the signature: every cell a child can
/// see lies inside the parent's neighbor ring.
pub fn child_signatures(sig: &Signature, rule: &ProductionRule) -> Vec<Signature> {
    let ctx = context_tiling(sig, rule);
    let l = rule.scale() as i32;
    let children: Vec<Tile> = ctx
        .tiles()
        .iter()
        .flat_map(|t| {
            let (px, py) = t.origin();
            rule.children_for(t.orientation()).iter().map(move |c| {
                Tile::new(Transform {
                    orientation: c.orientation,
                    translation: (c.translation.0 + l * px, c.translation.1 + l * py),
                })
            })
        })
        .collect();
    let fine = Tiling::from_tiles(rule.shape().clone(), Rect::new(0, 0, 1, 1), children)
        .expect("subdivided context never overlaps");
    (0..rule.area_factor())
        .map(|i| signature_of(&fine, i))
        .collect()
}

/// Maps each class id to the class ids of its children, in rule order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexProductionTable {
    children: Vec<Vec<ClassId>>,
}

impl IndexProductionTable {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    pub fn children(&self, id: ClassId) -> Option<&[ClassId]> {
        self.children.get(id as usize).map(Vec::as_slice)
    }

    /// Ids reachable by applying the table `steps` times from `id`, in
    /// subdivision order.
    pub fn expand(&self, id: ClassId, steps: u32) -> Vec<ClassId> {
        let mut cur = vec![id];
        for _ in 0..steps {
            cur = cur
                .iter()
                .flat_map(|&c| self.children[c as usize].iter().copied())
                .collect();
        }
        cur
    }

    /// Every child id is itself a key of the table.
    pub fn is_closed(&self) -> bool {
        self.children
            .iter()
            .flatten()
            .all(|&c| (c as usize) < self.children.len())
    }

    /// `id: c1 c2 ...` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::from("polyproduction v1\n");
        for (i, cs) in self.children.iter().enumerate() {
            let _ = write!(out, "{i}:");
            for c in cs {
                let _ = write!(out, " {c}");
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut children = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            if line.starts_with("polyproduction") {
                continue;
            }
            let (id, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::Parse(format!("bad production line {line:?}")))?;
            if id.trim().parse::<usize>().ok() != Some(children.len()) {
                return Err(Error::Parse(format!(
                    "production ids must be dense at {line:?}"
                )));
            }
            let cs = rest
                .split_whitespace()
                .map(|s| s.parse::<ClassId>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| Error::Parse(format!("bad production line {line:?}")))?;
            children.push(cs);
        }
        Ok(IndexProductionTable { children })
    }
}

/// Builds the production table for a registry that is already closed under
/// subdivision.
pub fn build_index_production(
    rule: &ProductionRule,
    registry: &Registry,
) -> Result<IndexProductionTable> {
    let mut children = Vec::with_capacity(registry.len());
    for (id, sig) in registry.signatures().iter().enumerate() {
        let ids = child_signatures(sig, rule)
            .iter()
            .map(|s| {
                registry.id_of(s).ok_or_else(|| {
                    Error::InvalidArgument(format!(
                        "registry is not closed: child of class {id} is unregistered"
                    ))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        children.push(ids);
    }
    Ok(IndexProductionTable { children })
}

/// Every structural index generated by the rule from a lone polyomino in
/// any orientation, with its production table.
#[derive(Debug, Clone)]
pub struct ClassCatalog {
    pub registry: Registry,
    pub production: IndexProductionTable,
}

impl ClassCatalog {
    /// Breadth-first closure from the eight isolated root tiles. Class ids
    /// `0..8` are the roots, by orientation code.
    pub fn enumerate(rule: &ProductionRule) -> ClassCatalog {
        let shape = rule.shape();
        let mut registry = Registry::new();
        for o in Orientation::all() {
            registry.insert(Signature::isolated(o), shape);
        }
        let mut queue: VecDeque<ClassId> = (0..registry.len() as ClassId).collect();
        let mut children: Vec<Vec<ClassId>> = Vec::new();
        while let Some(id) = queue.pop_front() {
            let sig = registry.signature(id).clone();
            let mut ids = Vec::with_capacity(rule.area_factor());
            for s in child_signatures(&sig, rule) {
                let before = registry.len();
                let cid = registry.insert(s, shape);
                if registry.len() > before {
                    queue.push_back(cid);
                }
                ids.push(cid);
            }
            if children.len() <= id as usize {
                children.resize(id as usize + 1, Vec::new());
            }
            children[id as usize] = ids;
        }
        ClassCatalog {
            registry,
            production: IndexProductionTable { children },
        }
    }

    /// Root class for a big polyomino with the given orientation.
    pub fn root(&self, orientation: Orientation) -> ClassId {
        self.registry
            .id_of(&Signature::isolated(orientation))
            .expect("roots are registered first")
    }

    /// Distinct classes present after each number of subdivisions of one
    /// root, for depths `0..=max_depth`.
    pub fn classes_by_depth(&self, root: Orientation, max_depth: u32) -> Vec<BTreeSet<ClassId>> {
        let mut level: BTreeSet<ClassId> = BTreeSet::from([self.root(root)]);
        let mut out = vec![level.clone()];
        for _ in 0..max_depth {
            level = level
                .iter()
                .flat_map(|&c| self.production.children[c as usize].iter().copied())
                .collect();
            out.push(level.clone());
        }
        out
    }
}

/// Checks the production table against real geometry: every tile of a
/// `depth`-level patch must subdivide into exactly the children the table
/// predicts, for every representative of every class. Returns the number
/// of parent tiles checked.
pub fn verify_production(
    catalog: &ClassCatalog,
    rule: &ProductionRule,
    seed: Orientation,
    depth: u32,
) -> Result<usize> {
    let mut registry = catalog.registry.clone();
    let mut parents = Tiling::subdivided_patch(rule, seed, depth);
    let mut kids = Tiling::subdivided_patch(rule, seed, depth + 1);
    let parent_ids = classify_with(&mut parents, &mut registry);
    let kid_ids = classify_with(&mut kids, &mut registry);
    if registry.len() != catalog.registry.len() {
        return Err(Error::InvalidArgument(
            "patch contains classes missing from the catalog".into(),
        ));
    }
    let n = rule.area_factor();
    for (i, &pid) in parent_ids.iter().enumerate() {
        let expected = catalog
            .production
            .children(pid)
            .ok_or(Error::UnknownClass(pid))?;
        if expected != &kid_ids[i * n..(i + 1) * n] {
            return Err(Error::NonDeterministicProduction { class: pid });
        }
    }
    Ok(parent_ids.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyomino::canonical::canonical_rule;
    use crate::structure::signature::classify_tiles;

    #[test]
    fn monomino_grid_has_few_classes() {
        let rule = crate::polyomino::rule::derive_production_rule(
            &crate::polyomino::shape::CellSet::monomino(),
            "monomino",
            3,
        )
        .unwrap();
        let cat = ClassCatalog::enumerate(&rule);
        // The square grid has one interior neighborhood; orientation codes
        // are kept distinct even where the shape is symmetric.
        assert_eq!(cat.registry.complete_ids().count(), 8);
        for id in cat.registry.complete_ids() {
            assert_eq!(cat.registry.signature(id).neighbors.len(), 8);
        }
        assert!(cat.production.is_closed());
    }

    #[test]
    fn table_text_round_trip() {
        let rule = canonical_rule().unwrap();
        let cat = ClassCatalog::enumerate(&rule);
        let text = cat.production.to_text();
        assert_eq!(IndexProductionTable::parse(&text).unwrap(), cat.production);
        let rebuilt = build_index_production(&rule, &cat.registry).unwrap();
        assert_eq!(rebuilt, cat.production);
    }

    #[test]
    fn unclosed_registry_is_rejected() {
        let rule = canonical_rule().unwrap();
        let mut patch = Tiling::subdivided_patch(&rule, Orientation::IDENTITY, 1);
        let (_, reg) = classify_tiles(&mut patch);
        assert!(build_index_production(&rule, &reg).is_err());
    }

    #[test]
    fn two_steps_match_direct_subdivision() {
        let rule = canonical_rule().unwrap();
        let cat = ClassCatalog::enumerate(&rule);
        let mut reg = cat.registry.clone();
        let mut patch = Tiling::subdivided_patch(&rule, Orientation::new(1, false), 2);
        let ids = classify_with(&mut patch, &mut reg);
        assert_eq!(reg.len(), cat.registry.len());
        assert_eq!(
            cat.production
                .expand(cat.root(Orientation::new(1, false)), 2),
            ids
        );
    }
}
