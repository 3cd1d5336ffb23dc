//! Shared pixel variables. A border pixel is one variable no matter how many
//! classes own its segment; an interior pixel belongs to a single class.
//! Dot states and ranks live on variables, so segment consistency holds by
//! construction.

use crate::polyomino::tiling::ClassId;
use crate::structure::layout::ClassLayouts;

#[derive(Debug, Clone)]
pub struct PixelVars {
    /// First variable of each segment id; its pixels follow in order.
    pub segment_base: Vec<u32>,
    /// Per class id, the variable of each tile-local pixel (empty for
    /// incomplete classes).
    pub of_class: Vec<Vec<u32>>,
    /// Every `(class, tile-local pixel)` bound to each variable.
    pub owners: Vec<Vec<(ClassId, u16)>>,
    /// Segment id of each variable, `u32::MAX` for interior variables.
    pub segment: Vec<u32>,
}

impl PixelVars {
    pub fn build(layouts: &ClassLayouts) -> PixelVars {
        let mut segment_base = Vec::with_capacity(layouts.segments.len());
        let mut segment = Vec::new();
        let mut next = 0u32;
        for (sid, s) in layouts.segments.iter().enumerate() {
            segment_base.push(next);
            next += s.local_pixels.len() as u32;
            segment.extend(std::iter::repeat_n(sid as u32, s.local_pixels.len()));
        }
        let mut of_class = vec![Vec::new(); layouts.classes.len()];
        let mut owners: Vec<Vec<(ClassId, u16)>> = vec![Vec::new(); next as usize];
        for c in layouts.complete_classes() {
            let mut vars = vec![u32::MAX; c.segment_of.len()];
            for seg in &c.segments {
                let base = segment_base[seg.id as usize];
                for (k, &p) in seg.pixels.iter().enumerate() {
                    vars[p] = base + k as u32;
                    owners[(base + k as u32) as usize].push((c.class, p as u16));
                }
            }
            for p in c.interior() {
                vars[p] = owners.len() as u32;
                owners.push(vec![(c.class, p as u16)]);
                segment.push(u32::MAX);
            }
            of_class[c.class as usize] = vars;
        }
        PixelVars {
            segment_base,
            of_class,
            owners,
            segment,
        }
    }

    pub fn len(&self) -> usize {
        self.owners.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owners.is_empty()
    }

    pub fn is_border(&self, v: u32) -> bool {
        self.segment[v as usize] != u32::MAX
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyomino::canonical::canonical_rule;
    use crate::structure::production::ClassCatalog;

    #[test]
    fn variables_partition_class_pixels() {
        let rule = canonical_rule().unwrap();
        let cat = ClassCatalog::enumerate(&rule);
        let layouts = ClassLayouts::build(&cat, &rule, 8).unwrap();
        let vars = PixelVars::build(&layouts);
        for c in layouts.complete_classes() {
            let vs = &vars.of_class[c.class as usize];
            assert_eq!(vs.len(), 384);
            let mut sorted = vs.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted.len(), 384);
            for (p, &v) in vs.iter().enumerate() {
                assert!(vars.owners[v as usize].contains(&(c.class, p as u16)));
                assert_eq!(vars.is_border(v), c.segment_of[p].is_some());
            }
        }
        for (v, o) in vars.owners.iter().enumerate() {
            let mut cls: Vec<ClassId> = o.iter().map(|x| x.0).collect();
            cls.dedup();
            assert_eq!(cls.len(), o.len(), "variable {v} owned twice by one class");
        }
    }
}
