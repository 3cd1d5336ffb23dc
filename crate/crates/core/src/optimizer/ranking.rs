//! Consecutive ranking (down from `k0` to 0, then up to `6·S²`). At every
//! level each class gains or loses exactly one dot, chosen by a truncated
//! Gaussian blur of the dot field evaluated in the class's context.

use rand::seq::SliceRandom;

use super::Setup;
use crate::config::sub_rng;
use crate::error::{Error, Result};
use crate::polyomino::exact_cover::ExactCover;
use crate::polyomino::tiling::ClassId;

/// Which dot is withdrawn on the way down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DescentRule {
    /// The dot with the largest blurred density (tightest cluster).
    #[default]
    MaxBlur,
    /// The dot with the smallest blurred density.
    MinBlur,
}

/// Greedy passes per level before falling back to an exact cover.
const GREEDY_ATTEMPTS: usize = 6;
/// Failed levels tolerated per direction before giving up. Each failure
/// undoes one more level than the previous four did.
const BACKTRACK_BUDGET: usize = 64;
const UNRANKED: u32 = u32::MAX;
const NOT_CENTER: u16 = u16::MAX;

/// Ranking state over shared pixel variables.
pub struct Ranker<'a> {
    setup: &'a Setup,
    /// Complete class ids; positions in this list are dense class indices.
    classes: Vec<ClassId>,
    dense: Vec<u32>,
    pub dots: Vec<bool>,
    pub ranks: Vec<u32>,
    blur: Vec<Vec<f64>>,
    /// Occurrences of each variable in class canvases near their centers,
    /// in CSR form: `(dense class, canvas x, canvas y)`.
    occ_start: Vec<u32>,
    occ: Vec<(u32, i16, i16)>,
    /// Per dense class, canvas pixel to center pixel index.
    center_index: Vec<Vec<u16>>,
    kernel: Vec<(i32, i32, f64)>,
    /// Per orientation code, tile pixel indices in `(y, x)` order.
    yx_order: Vec<Vec<u16>>,
    pub descent: DescentRule,
    /// Levels that needed the exact-cover fallback.
    pub fallbacks: usize,
    /// Levels undone after a dead end.
    pub backtracks: usize,
}

/// Blur kernel truncated to a disc of radius `ceil(3 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<(i32, i32, f64)> {
    let r = (3.0 * sigma).ceil() as i32;
    let mut k = Vec::new();
    for dy in -r..=r {
        for dx in -r..=r {
            let d2 = dx * dx + dy * dy;
            if d2 <= r * r {
                k.push((dx, dy, (-(d2 as f64) / (2.0 * sigma * sigma)).exp()));
            }
        }
    }
    k
}

impl<'a> Ranker<'a> {
    /// Starts from the level-`k0` dot state (one flag per variable).
    pub fn new(setup: &'a Setup, dots: Vec<bool>, sigma: f64) -> Result<Self> {
        let s = setup.layouts.s as i32;
        if sigma.is_nan() || sigma <= 0.0 || (3.0 * sigma).ceil() as i32 > s {
            return Err(Error::InvalidArgument(format!(
                "blur sigma {sigma} must be positive with 3*sigma <= S = {s}"
            )));
        }
        let kernel = gaussian_kernel(sigma);
        let radius = (3.0 * sigma).ceil() as i32;
        let classes: Vec<ClassId> = setup.catalog.registry.complete_ids().collect();
        let mut dense = vec![u32::MAX; setup.catalog.registry.len()];
        for (i, &c) in classes.iter().enumerate() {
            dense[c as usize] = i as u32;
        }
        let vars = &setup.vars;
        let mut center_index = Vec::with_capacity(classes.len());
        let mut occ_lists: Vec<Vec<(u32, i16, i16)>> = vec![Vec::new(); vars.len()];
        for (ci, &c) in classes.iter().enumerate() {
            let canvas = setup.canvas(c);
            let ctx = setup.context(c);
            let mut idx = vec![NOT_CENTER; canvas.pixels.len()];
            let mut near = vec![false; canvas.pixels.len()];
            for (u, &(x, y)) in canvas.center.iter().enumerate() {
                idx[(y * canvas.width + x) as usize] = u as u16;
                for dy in -radius..=radius {
                    for dx in -radius..=radius {
                        let (qx, qy) = (x + dx, y + dy);
                        if qx >= 0 && qy >= 0 && qx < canvas.width && qy < canvas.height {
                            near[(qy * canvas.width + qx) as usize] = true;
                        }
                    }
                }
            }
            for (i, px) in canvas.pixels.iter().enumerate() {
                if let (Some((slot, u)), true) = (px, near[i]) {
                    let v = vars.of_class[ctx.tiles[*slot as usize].class as usize][*u as usize];
                    let (x, y) = (i as i32 % canvas.width, i as i32 / canvas.width);
                    occ_lists[v as usize].push((ci as u32, x as i16, y as i16));
                }
            }
            center_index.push(idx);
        }
        let mut occ_start = Vec::with_capacity(vars.len() + 1);
        let mut occ = Vec::new();
        for l in occ_lists {
            occ_start.push(occ.len() as u32);
            occ.extend(l);
        }
        occ_start.push(occ.len() as u32);
        let yx_order = setup
            .layouts
            .grids
            .iter()
            .map(|g| {
                let mut o: Vec<u16> = (0..g.len() as u16).collect();
                o.sort_by_key(|&u| {
                    let (x, y) = g.pixels[u as usize];
                    (y, x)
                });
                o
            })
            .collect();
        let n = setup.layouts.tile_pixels();
        let mut r = Ranker {
            setup,
            blur: vec![vec![0.0; n]; classes.len()],
            classes,
            dense,
            dots: vec![false; vars.len()],
            ranks: vec![UNRANKED; vars.len()],
            occ_start,
            occ,
            center_index,
            kernel,
            yx_order,
            descent: DescentRule::default(),
            fallbacks: 0,
            backtracks: 0,
        };
        r.reset(dots);
        Ok(r)
    }

    /// Replaces the dot state and recomputes every blur field.
    pub fn reset(&mut self, dots: Vec<bool>) {
        for b in &mut self.blur {
            b.iter_mut().for_each(|x| *x = 0.0);
        }
        self.dots = vec![false; dots.len()];
        for (v, on) in dots.into_iter().enumerate() {
            if on {
                self.toggle(v as u32);
            }
        }
    }

    fn toggle(&mut self, v: u32) {
        let on = !self.dots[v as usize];
        self.dots[v as usize] = on;
        let sign = if on { 1.0 } else { -1.0 };
        let (a, b) = (
            self.occ_start[v as usize] as usize,
            self.occ_start[v as usize + 1] as usize,
        );
        for &(ci, qx, qy) in &self.occ[a..b] {
            let canvas = self.setup.canvas(self.classes[ci as usize]);
            let idx = &self.center_index[ci as usize];
            let blur = &mut self.blur[ci as usize];
            for &(dx, dy, w) in &self.kernel {
                let (x, y) = (qx as i32 + dx, qy as i32 + dy);
                if x < 0 || y < 0 || x >= canvas.width || y >= canvas.height {
                    continue;
                }
                let u = idx[(y * canvas.width + x) as usize];
                if u != NOT_CENTER {
                    blur[u as usize] += sign * w;
                }
            }
        }
    }

    /// Blurred dot density at a tile pixel of a class.
    pub fn blur_at(&self, class: ClassId, pixel: usize) -> f64 {
        self.blur[self.dense[class as usize] as usize][pixel]
    }

    /// Mean score over every class that owns `v`.
    /// Mean blur over every class that owns `v`.
    fn score(&self, v: u32) -> f64 {
        let owners = &self.setup.vars.owners[v as usize];
        let sum: f64 = owners
            .iter()
            .map(|&(c, u)| self.blur[self.dense[c as usize] as usize][u as usize])
            .sum();
        sum / owners.len() as f64
    }

    /// Ordering of two scores, best first for the move being made.
    fn cmp(&self, down: bool, a: f64, b: f64) -> std::cmp::Ordering {
        let o = a.total_cmp(&b);
        if down && self.descent == DescentRule::MaxBlur {
            o.reverse()
        } else {
            o
        }
    }

    /// Best eligible variable of a class, or `None` if every candidate is
    /// blocked. Ties go to the smallest tile-local `(y, x)`.
    fn choose(&self, ci: usize, down: bool, blocked: &[bool]) -> Option<u32> {
        let c = self.classes[ci];
        let vars = &self.setup.vars;
        let layout = self.setup.layouts.class(c).expect("complete");
        let of = &vars.of_class[c as usize];
        let mut best: Option<(f64, u32)> = None;
        for &u in &self.yx_order[layout.orientation.code() as usize] {
            let v = of[u as usize];
            if self.dots[v as usize] != down {
                continue;
            }
            let score = if vars.is_border(v) {
                if blocked[vars.segment[v as usize] as usize] {
                    continue;
                }
                self.score(v)
            } else {
                self.blur[ci][u as usize]
            };
            if best.is_none_or(|(b, _)| self.cmp(down, score, b).is_lt()) {
                best = Some((score, v));
            }
        }
        best.map(|(_, v)| v)
    }

    /// Applies a move and marks every owner of `v` as done for this level.
    fn apply(&mut self, v: u32, rank: u32, hit: &mut [bool], blocked: &mut [bool]) {
        self.toggle(v);
        self.ranks[v as usize] = rank;
        let layouts = &self.setup.layouts;
        for &(c, _) in &self.setup.vars.owners[v as usize] {
            let ci = self.dense[c as usize] as usize;
            hit[ci] = true;
            for g in &layouts.class(c).expect("complete").segments {
                blocked[g.id as usize] = true;
            }
        }
    }

    /// One density step. Going down from `k` dots the withdrawn variable gets
    /// rank `k - 1`; going up from `k` the added one gets rank `k`.
    pub fn step(&mut self, k: usize, down: bool, order: &[usize]) -> Result<()> {
        let rank = if down { k as u32 - 1 } else { k as u32 };
        let nseg = self.setup.layouts.segments.len();
        let saved = (self.dots.clone(), self.blur.clone(), self.ranks.clone());
        let mut priority: Vec<usize> = Vec::new();
        for _ in 0..GREEDY_ATTEMPTS {
            let mut hit = vec![false; self.classes.len()];
            let mut blocked = vec![false; nseg];
            let mut stuck = Vec::new();
            let mut seen = vec![false; self.classes.len()];
            // Shared band pixels move only while all their owners are
            // unmoved, so classes whose favorite is a band pixel go first.
            let free = vec![false; nseg];
            for &ci in order {
                if hit[ci] || priority.contains(&ci) {
                    continue;
                }
                if let Some(v) = self.choose(ci, down, &free) {
                    let seg = self.setup.vars.segment[v as usize];
                    if seg != u32::MAX && !blocked[seg as usize] {
                        self.apply(v, rank, &mut hit, &mut blocked);
                    }
                }
            }
            for &ci in priority.iter().chain(order) {
                if std::mem::replace(&mut seen[ci], true) || hit[ci] {
                    continue;
                }
                match self.choose(ci, down, &blocked) {
                    Some(v) => self.apply(v, rank, &mut hit, &mut blocked),
                    None => stuck.push(ci),
                }
            }
            if stuck.is_empty() {
                return Ok(());
            }
            (self.dots, self.blur, self.ranks) = saved.clone();
            for ci in stuck {
                if !priority.contains(&ci) {
                    priority.push(ci);
                }
            }
        }
        self.fallbacks += 1;
        self.exact_step(rank, down)
    }

    /// Level solved as an exact cover: every class is an item, every movable
    /// variable an option over its owners, options listed best first.
    fn exact_step(&mut self, rank: u32, down: bool) -> Result<()> {
        let vars = &self.setup.vars;
        let mut cands: Vec<(f64, u32)> = Vec::new();
        let mut seen = vec![false; vars.len()];
        for &c in &self.classes {
            for &v in &vars.of_class[c as usize] {
                if self.dots[v as usize] == down && !std::mem::replace(&mut seen[v as usize], true)
                {
                    cands.push((self.score(v), v));
                }
            }
        }
        cands.sort_by(|a, b| self.cmp(down, a.0, b.0).then(a.1.cmp(&b.1)));
        let mut dlx = ExactCover::new(self.classes.len());
        let mut opt_var = Vec::new();
        for &(_, v) in &cands {
            let items: Vec<usize> = vars.owners[v as usize]
                .iter()
                .map(|&(c, _)| self.dense[c as usize] as usize)
                .collect();
            dlx.add_option(&items);
            opt_var.push(v);
        }
        let sol = dlx.solve(1).pop().ok_or_else(|| Error::RankingStuck {
            level: rank as usize,
            reason: "no assignment changes every class by exactly one dot".into(),
        })?;
        let mut hit = vec![false; self.classes.len()];
        let mut blocked = vec![false; self.setup.layouts.segments.len()];
        for o in sol {
            self.apply(opt_var[o], rank, &mut hit, &mut blocked);
        }
        Ok(())
    }

    /// Runs one full direction: down from `k0` to 0 or up from `k0` to the
    /// tile size. Class order is reshuffled every level.
    pub fn run(&mut self, k0: usize, down: bool, seed: u64) -> Result<()> {
        let n = self.setup.layouts.tile_pixels();
        let mut rng = sub_rng(seed, if down { "rank-down" } else { "rank-up" });
        let mut order: Vec<usize> = (0..self.classes.len()).collect();
        let levels: Vec<usize> = if down {
            (1..=k0).rev().collect()
        } else {
            (k0..n).collect()
        };
        // A level can be unsolvable given earlier choices; undo a few
        // levels and retry them under a fresh class order.
        let mut i = 0;
        let mut failures = 0;
        while i < levels.len() {
            order.shuffle(&mut rng);
            match self.step(levels[i], down, &order) {
                Ok(()) => i += 1,
                Err(e @ Error::RankingStuck { .. }) => {
                    failures += 1;
                    if failures > BACKTRACK_BUDGET || i == 0 {
                        return Err(e);
                    }
                    for _ in 0..(1 + (failures - 1) / 4).min(i) {
                        i -= 1;
                        self.undo(levels[i], down);
                        self.backtracks += 1;
                    }
                }
                Err(e) => return Err(e),
            }
        }
        Ok(())
    }

    /// Reverts the moves made at level `k`.
    fn undo(&mut self, k: usize, down: bool) {
        let rank = if down { k as u32 - 1 } else { k as u32 };
        for v in 0..self.ranks.len() {
            if self.ranks[v] == rank && self.dots[v] != down {
                self.toggle(v as u32);
                self.ranks[v] = UNRANKED;
            }
        }
    }

    pub fn classes(&self) -> &[ClassId] {
        &self.classes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyomino::canonical::canonical_rule;

    fn setup() -> Setup {
        Setup::new(canonical_rule().unwrap(), 4).unwrap()
    }

    /// Two interior pixels of `class` more than `gap` apart.
    fn far_pair(setup: &Setup, class: ClassId, gap: i32) -> (usize, usize) {
        let layout = setup.layouts.class(class).unwrap();
        let grid = setup.layouts.grid(layout.orientation);
        let inner: Vec<usize> = layout.interior().collect();
        for &a in &inner {
            for &b in &inner {
                let (pa, pb) = (grid.pixels[a], grid.pixels[b]);
                if (pa.0 - pb.0).pow(2) + (pa.1 - pb.1).pow(2) > gap * gap {
                    return (a, b);
                }
            }
        }
        panic!("no far pair");
    }

    fn yx(setup: &Setup, class: ClassId, u: usize) -> (i32, i32) {
        let o = setup.layouts.class(class).unwrap().orientation;
        let p = setup.layouts.grid(o).pixels[u];
        (p.1, p.0)
    }

    #[test]
    fn descent_tie_goes_to_smallest_yx() {
        let setup = setup();
        let c = setup.catalog.registry.complete_ids().next().unwrap();
        let (a, b) = far_pair(&setup, c, 7);
        let mut dots = vec![false; setup.vars.len()];
        let (va, vb) = (
            setup.vars.of_class[c as usize][a],
            setup.vars.of_class[c as usize][b],
        );
        dots[va as usize] = true;
        dots[vb as usize] = true;
        let r = Ranker::new(&setup, dots, 1.0).unwrap();
        assert_eq!(r.blur_at(c, a), r.blur_at(c, b));
        let ci = r.dense[c as usize] as usize;
        let blocked = vec![false; setup.layouts.segments.len()];
        let want = if yx(&setup, c, a) < yx(&setup, c, b) {
            va
        } else {
            vb
        };
        assert_eq!(r.choose(ci, true, &blocked), Some(want));
    }

    #[test]
    fn ascent_tie_goes_to_smallest_yx() {
        let setup = setup();
        let c = setup.catalog.registry.complete_ids().nth(5).unwrap();
        let r = Ranker::new(&setup, vec![false; setup.vars.len()], 1.0).unwrap();
        let ci = r.dense[c as usize] as usize;
        let blocked = vec![false; setup.layouts.segments.len()];
        let n = setup.layouts.tile_pixels();
        let first = (0..n).min_by_key(|&u| yx(&setup, c, u)).unwrap();
        assert_eq!(
            r.choose(ci, false, &blocked),
            Some(setup.vars.of_class[c as usize][first])
        );
    }

    #[test]
    fn descent_removes_the_tighter_dot() {
        let setup = setup();
        let c = setup.catalog.registry.complete_ids().next().unwrap();
        let layout = setup.layouts.class(c).unwrap();
        let grid = setup.layouts.grid(layout.orientation);
        let inner: Vec<usize> = layout.interior().collect();
        // A lone dot and an adjacent pair: the pair member with the larger
        // blur must go first.
        let (a, b) = far_pair(&setup, c, 7);
        let pb = grid.pixels[b];
        let partner = inner
            .iter()
            .copied()
            .find(|&u| {
                let p = grid.pixels[u];
                (p.0 - pb.0).abs() + (p.1 - pb.1).abs() == 1
            })
            .unwrap();
        let mut dots = vec![false; setup.vars.len()];
        for u in [a, b, partner] {
            dots[setup.vars.of_class[c as usize][u] as usize] = true;
        }
        let r = Ranker::new(&setup, dots, 1.0).unwrap();
        let ci = r.dense[c as usize] as usize;
        let blocked = vec![false; setup.layouts.segments.len()];
        let got = r.choose(ci, true, &blocked).unwrap();
        let va = setup.vars.of_class[c as usize][a];
        assert_ne!(got, va);
        let mut rr = r;
        rr.descent = DescentRule::MinBlur;
        assert_eq!(rr.choose(ci, true, &blocked), Some(va));
    }

    #[test]
    fn kernel_is_a_truncated_disc() {
        let k = gaussian_kernel(1.5);
        assert!(k.iter().all(|&(dx, dy, _)| dx * dx + dy * dy <= 25));
        assert!(k.contains(&(5, 0, (-25.0f64 / 4.5).exp())));
        assert!(k.contains(&(0, 0, 1.0)));
    }

    #[test]
    fn sigma_must_fit_the_context() {
        let setup = setup();
        assert!(Ranker::new(&setup, vec![false; setup.vars.len()], 1.4).is_err());
        assert!(Ranker::new(&setup, vec![false; setup.vars.len()], 0.0).is_err());
    }
}
