//! The emitted rank table and its text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::config::Density;
use crate::error::{Error, Result};
use crate::polyomino::shape::Cell;
use crate::polyomino::tiling::ClassId;
use crate::structure::layout::ClassLayouts;

/// Ranks of one class, aligned with the tile's canonical pixel order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRanks {
    pub pixels: Vec<Cell>,
    pub ranks: Vec<u32>,
}

/// Ranks of one segment label's band, in segment-local coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentRanks {
    pub key: String,
    pub pixels: Vec<Cell>,
    pub ranks: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    pub s: u32,
    pub d0: Density,
    pub seed: u64,
    /// Ranking blur width the table was built with.
    pub sigma: f64,
    pub shape: String,
    pub rule_hash: String,
    pub classes: BTreeMap<ClassId, ClassRanks>,
    pub segments: Vec<SegmentRanks>,
}

impl RankTable {
    /// Pixels per tile, `6·S²` for a hexomino.
    pub fn tile_pixels(&self) -> usize {
        self.classes.values().next().map_or(0, |c| c.ranks.len())
    }

    pub fn class(&self, id: ClassId) -> Option<&ClassRanks> {
        self.classes.get(&id)
    }

    /// Every class holds a permutation of `0..tile_pixels`, over the same
    /// number of pixels.
    pub fn validate(&self) -> Result<()> {
        let n = self.tile_pixels();
        for (&id, c) in &self.classes {
            if c.ranks.len() != n || c.pixels.len() != n {
                return Err(Error::Parse(format!(
                    "class {id} has {} ranks, expected {n}",
                    c.ranks.len()
                )));
            }
            let mut seen = vec![false; n];
            for &r in &c.ranks {
                if r as usize >= n || std::mem::replace(&mut seen[r as usize], true) {
                    return Err(Error::Parse(format!(
                        "class {id}: ranks are not a permutation of 0..{n}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Checks every class's border ranks against the segment ranks, using
    /// the layouts to locate each segment inside its owners.
    pub fn check_segments(&self, layouts: &ClassLayouts) -> Result<usize> {
        let by_key: BTreeMap<&str, &SegmentRanks> =
            self.segments.iter().map(|s| (s.key.as_str(), s)).collect();
        let mut checked = 0;
        for layout in layouts.complete_classes() {
            let ranks = self
                .class(layout.class)
                .ok_or(Error::UnknownClass(layout.class))?;
            for seg in &layout.segments {
                let info = &layouts.segments[seg.id as usize];
                let key = info.label.key();
                let sr = by_key
                    .get(key.as_str())
                    .ok_or_else(|| Error::Parse(format!("segment {key} missing from table")))?;
                if sr.pixels != info.local_pixels {
                    return Err(Error::Parse(format!("segment {key} has mismatched pixels")));
                }
                for (k, &p) in seg.pixels.iter().enumerate() {
                    if ranks.ranks[p] != sr.ranks[k] {
                        return Err(Error::Parse(format!(
                            "class {} disagrees with segment {key} at pixel {:?}",
                            layout.class, info.local_pixels[k]
                        )));
                    }
                    checked += 1;
                }
            }
        }
        Ok(checked)
    }

    pub fn header(&self) -> String {
        format!(
            "polyrank v1 S={} d0={} seed={} sigma={} shape={} rulehash={}",
            self.s, self.d0, self.seed, self.sigma, self.shape, self.rule_hash
        )
    }

    pub fn to_text(&self) -> String {
        let mut out = self.header();
        out.push('\n');
        for (id, c) in &self.classes {
            let _ = writeln!(out, "class {id}");
            for (&(x, y), r) in c.pixels.iter().zip(&c.ranks) {
                let _ = writeln!(out, "{x} {y} {r}");
            }
        }
        for s in &self.segments {
            let _ = writeln!(out, "segment {}", s.key);
            for (&(x, y), r) in s.pixels.iter().zip(&s.ranks) {
                let _ = writeln!(out, "{x} {y} {r}");
            }
        }
        out
    }

    /// SHA-256 of the text form, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_text().as_bytes()))
    }

    /// Parses and re-validates a table.
    pub fn parse(text: &str) -> Result<RankTable> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines
            .next()
            .ok_or_else(|| Error::Parse("empty rank table".into()))?;
        let mut fields = head.split_whitespace();
        if fields.next() != Some("polyrank") || fields.next() != Some("v1") {
            return Err(Error::Parse(format!("bad rank table header {head:?}")));
        }
        let mut kv = BTreeMap::new();
        for f in fields {
            let (k, v) = f
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {f:?}")))?;
            kv.insert(k, v);
        }
        let get = |k: &str| {
            kv.get(k)
                .copied()
                .ok_or_else(|| Error::Parse(format!("header lacks {k}")))
        };
        let bad_num = |k: &str| Error::Parse(format!("bad header value for {k}"));
        let mut table = RankTable {
            s: get("S")?.parse().map_err(|_| bad_num("S"))?,
            d0: get("d0")?.parse().map_err(|_| bad_num("d0"))?,
            seed: get("seed")?.parse().map_err(|_| bad_num("seed"))?,
            sigma: get("sigma")?.parse().map_err(|_| bad_num("sigma"))?,
            shape: get("shape")?.to_string(),
            rule_hash: get("rulehash")?.to_string(),
            classes: BTreeMap::new(),
            segments: Vec::new(),
        };
        enum Section {
            None,
            Class(ClassId),
            Segment(usize),
        }
        let mut cur = Section::None;
        for (no, line) in lines {
            let f: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: {line:?}", no + 1));
            match f[..] {
                ["class", id] => {
                    let id: ClassId = id.parse().map_err(|_| bad())?;
                    let fresh = ClassRanks {
                        pixels: Vec::new(),
                        ranks: Vec::new(),
                    };
                    if table.classes.insert(id, fresh).is_some() {
                        return Err(Error::Parse(format!("class {id} listed twice")));
                    }
                    cur = Section::Class(id);
                }
                ["segment", key] => {
                    table.segments.push(SegmentRanks {
                        key: key.to_string(),
                        pixels: Vec::new(),
                        ranks: Vec::new(),
                    });
                    cur = Section::Segment(table.segments.len() - 1);
                }
                [x, y, r] => {
                    let p = (x.parse().map_err(|_| bad())?, y.parse().map_err(|_| bad())?);
                    let r: u32 = r.parse().map_err(|_| bad())?;
                    let (pixels, ranks) = match cur {
                        Section::Class(id) => {
                            let c = table.classes.get_mut(&id).expect("inserted above");
                            (&mut c.pixels, &mut c.ranks)
                        }
                        Section::Segment(i) => {
                            let s = &mut table.segments[i];
                            (&mut s.pixels, &mut s.ranks)
                        }
                        Section::None => return Err(bad()),
                    };
                    pixels.push(p);
                    ranks.push(r);
                }
                _ => return Err(bad()),
            }
        }
        if table.tile_pixels() != 6 * (table.s * table.s) as usize && !table.classes.is_empty() {
            return Err(Error::Parse(format!(
                "classes hold {} pixels, expected 6*S^2 = {}",
                table.tile_pixels(),
                6 * table.s * table.s
            )));
        }
        table.validate()?;
        Ok(table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> RankTable {
        let pixels: Vec<Cell> = (0..24).map(|i| (i % 4, i / 4)).collect();
        let mut classes = BTreeMap::new();
        classes.insert(
            3,
            ClassRanks {
                pixels: pixels.clone(),
                ranks: (0..24).rev().collect(),
            },
        );
        classes.insert(
            9,
            ClassRanks {
                pixels,
                ranks: (0..24).collect(),
            },
        );
        RankTable {
            s: 2,
            d0: Density::new(1, 2).unwrap(),
            seed: 5,
            sigma: 0.75,
            shape: "toy".into(),
            rule_hash: "ab".into(),
            classes,
            segments: vec![SegmentRanks {
                key: "00ff".into(),
                pixels: vec![(-1, 0), (-2, 0)],
                ranks: vec![4, 7],
            }],
        }
    }

    #[test]
    fn text_round_trip() {
        let t = toy();
        let text = t.to_text();
        assert!(
            text.starts_with("polyrank v1 S=2 d0=1/2 seed=5 sigma=0.75 shape=toy rulehash=ab\n")
        );
        assert_eq!(RankTable::parse(&text).unwrap(), t);
    }

    #[test]
    fn loader_rejects_non_permutations() {
        let mut t = toy();
        t.classes.get_mut(&3).unwrap().ranks[0] = 0;
        assert!(RankTable::parse(&t.to_text()).is_err());
        assert!(RankTable::parse("polyrank v2 S=2").is_err());
        assert!(RankTable::parse("").is_err());
        let mut short = toy();
        short.classes.get_mut(&9).unwrap().ranks.pop();
        short.classes.get_mut(&9).unwrap().pixels.pop();
        assert!(RankTable::parse(&short.to_text()).is_err());
    }
}
