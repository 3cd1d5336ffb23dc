//! Starting dot patterns at density `d0`: border segments first, then the
//! interior of every class under fixed border conditions.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

use super::context::Canvas;
use super::dotfield::{lloyd_relax, spread_dots, DotField, DotStatus, Zone, OUTSIDE};
use super::Setup;
use crate::config::{min_spacing_d2, sub_rng, Density};
use crate::error::{Error, Result};
use crate::polyomino::shape::Cell;
use crate::polyomino::tiling::ClassId;

/// Zone of domain pixels no floating dot may enter.
const BLOCKED: Zone = Zone::MAX;
/// Void padding around a canvas so the torus never wraps onto the domain.
const PAD: i32 = 8;
/// Search radius and pass limit of the post-Lloyd spacing repair.
const SPREAD_REACH: i64 = 4;
const SPREAD_PASSES: usize = 20;
/// Interior passes; later ones see every neighbor interior final.
const INTERIOR_SWEEPS: usize = 2;

/// Dotted pixels of each segment label, as indices into the segment's
/// `local_pixels`, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BorderPatternTable {
    pub patterns: Vec<Vec<u16>>,
    /// Sweeps actually run, and whether the last one changed nothing.
    pub sweeps: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Role {
    Void,
    Dot,
    Free(Zone),
    /// A floating dot of the zone starts here.
    Seed(Zone),
}

/// Relaxes floating dots over one canvas. `roles` is per canvas pixel;
/// `floating` lists `(zone, count)` of dots to scatter at random before
/// relaxing. Returns the final floating dots as `(canvas position, zone)`.
fn relax_canvas(
    canvas: &Canvas,
    roles: &[Role],
    floating: &[(Zone, usize)],
    rng: &mut ChaCha8Rng,
    iterations: usize,
    min_d2: i64,
) -> Result<Vec<(Cell, Zone)>> {
    let (w, h) = (canvas.width + 2 * PAD, canvas.height + 2 * PAD);
    let mut zones = vec![OUTSIDE; (w * h) as usize];
    let mut fixed = Vec::new();
    let mut seeds = Vec::new();
    for y in 0..canvas.height {
        for x in 0..canvas.width {
            let i = (y * canvas.width + x) as usize;
            let f = ((y + PAD) * w + x + PAD) as usize;
            match roles[i] {
                Role::Void => {}
                Role::Dot => {
                    zones[f] = BLOCKED;
                    fixed.push((x + PAD, y + PAD));
                }
                Role::Free(z) => zones[f] = z,
                Role::Seed(z) => {
                    zones[f] = z;
                    seeds.push((x + PAD, y + PAD, z));
                }
            }
        }
    }
    let mut field = DotField::with_zones(w as u32, h as u32, zones)?;
    for &(x, y) in &fixed {
        field.add(x as u32, y as u32, DotStatus::Fixed, None)?;
    }
    for &(x, y, z) in &seeds {
        field.add(x as u32, y as u32, DotStatus::Floating, Some(z))?;
    }
    for &(zone, count) in floating {
        if count == 0 {
            continue;
        }
        let mut free: Vec<(i32, i32)> = (0..canvas.height)
            .flat_map(|y| (0..canvas.width).map(move |x| (x, y)))
            .filter(|&(x, y)| roles[(y * canvas.width + x) as usize] == Role::Free(zone))
            .collect();
        if free.len() < count {
            return Err(Error::InvalidArgument(format!(
                "zone {zone} has {} free pixels for {count} dots",
                free.len()
            )));
        }
        free.shuffle(rng);
        for &(x, y) in &free[..count] {
            field.add(
                (x + PAD) as u32,
                (y + PAD) as u32,
                DotStatus::Floating,
                Some(zone),
            )?;
        }
    }
    if field.dots().iter().all(|d| d.status == DotStatus::Fixed) {
        return Ok(Vec::new());
    }
    lloyd_relax(&mut field, iterations)?;
    spread_dots(&mut field, min_d2, SPREAD_REACH, SPREAD_PASSES);
    Ok(field
        .dots()
        .iter()
        .filter(|d| d.status == DotStatus::Floating)
        .map(|d| {
            (
                (d.x as i32 - PAD, d.y as i32 - PAD),
                d.zone.expect("floating dots carry a zone"),
            )
        })
        .collect())
}

fn dist2(a: Cell, b: Cell) -> i32 {
    (a.0 - b.0).pow(2) + (a.1 - b.1).pow(2)
}

/// Nudges a segment's dot count into `[target - 1, target + 1]`: drops the
/// most crowded dots or fills the emptiest band pixels. `others` are the
/// remaining dots of the window.
fn fix_count(band: &[Cell], dotted: &mut Vec<usize>, others: &[Cell], target: usize) {
    let nearest = |p: Cell, dotted: &[usize], skip: Option<usize>| -> i32 {
        others
            .iter()
            .copied()
            .chain(
                dotted
                    .iter()
                    .filter(|&&k| Some(k) != skip)
                    .map(|&k| band[k]),
            )
            .filter(|&q| q != p)
            .map(|q| dist2(p, q))
            .min()
            .unwrap_or(i32::MAX)
    };
    let key = |k: usize| (band[k].1, band[k].0);
    while dotted.len() > target + 1 {
        let worst = *dotted
            .iter()
            .min_by_key(|&&k| (nearest(band[k], dotted, Some(k)), key(k)))
            .expect("non-empty");
        dotted.retain(|&k| k != worst);
    }
    while dotted.len() + 1 < target {
        let best = (0..band.len())
            .filter(|k| !dotted.contains(k))
            .max_by_key(|&k| (nearest(band[k], dotted, None), std::cmp::Reverse(key(k))))
            .expect("band has free pixels");
        dotted.push(best);
    }
    dotted.sort_unstable();
}

/// Border initialization: segment labels in seeded random order,
/// each relaxed in its first owner's context against the patterns fixed so
/// far, repeated for up to `sweeps` passes.
pub fn init_borders(
    setup: &Setup,
    d0: Density,
    seed: u64,
    sweeps: usize,
    iterations: usize,
) -> Result<BorderPatternTable> {
    let layouts = &setup.layouts;
    let vars = &setup.vars;
    let s = layouts.s as i32;
    let n = layouts.segments.len();
    let mut patterns: Vec<Option<Vec<u16>>> = vec![None; n];
    let mut rng = sub_rng(seed, "init-borders");
    let mut ran = 0;
    let mut converged = false;
    for _ in 0..sweeps.max(1) {
        ran += 1;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let mut changed = false;
        for &sid in &order {
            let owner = layouts.owners[sid][0];
            let canvas = setup.canvas(owner);
            let ctx = setup.context(owner);
            let layout = layouts.class(owner).expect("owners are complete");
            let seg = layout
                .segments
                .iter()
                .find(|g| g.id as usize == sid)
                .expect("owner holds segment");
            let band: Vec<Cell> = seg.pixels.iter().map(|&p| canvas.center[p]).collect();
            let x0 = band.iter().map(|p| p.0).min().unwrap() - s;
            let x1 = band.iter().map(|p| p.0).max().unwrap() + s;
            let y0 = band.iter().map(|p| p.1).min().unwrap() - s;
            let y1 = band.iter().map(|p| p.1).max().unwrap() + s;
            let mut roles = vec![Role::Void; canvas.pixels.len()];
            let mut domain = 0usize;
            let mut fixed = Vec::new();
            for y in y0.max(0)..=y1.min(canvas.height - 1) {
                for x in x0.max(0)..=x1.min(canvas.width - 1) {
                    let Some((slot, u)) = canvas.get((x, y)) else {
                        continue;
                    };
                    let v = vars.of_class[ctx.tiles[slot as usize].class as usize][u as usize];
                    let seg_of = vars.segment[v as usize];
                    let i = (y * canvas.width + x) as usize;
                    domain += 1;
                    roles[i] = match patterns.get(seg_of as usize).and_then(|p| p.as_ref()) {
                        Some(p) if seg_of as usize != sid => {
                            let k = (v - vars.segment_base[seg_of as usize]) as u16;
                            if p.binary_search(&k).is_ok() {
                                fixed.push((x, y));
                                Role::Dot
                            } else {
                                Role::Free(BLOCKED)
                            }
                        }
                        _ => Role::Free(1),
                    };
                }
            }
            let floating = d0.count_of(domain).saturating_sub(fixed.len());
            let dots = relax_canvas(
                canvas,
                &roles,
                &[(1, floating)],
                &mut rng,
                iterations,
                min_spacing_d2(d0),
            )?;
            let mut dotted: Vec<usize> = (0..band.len())
                .filter(|&k| dots.iter().any(|d| d.0 == band[k]))
                .collect();
            let others: Vec<Cell> = dots
                .iter()
                .map(|d| d.0)
                .chain(fixed.iter().copied())
                .filter(|p| !band.contains(p))
                .collect();
            fix_count(&band, &mut dotted, &others, d0.count_of(band.len()));
            let pattern: Vec<u16> = dotted.into_iter().map(|k| k as u16).collect();
            if patterns[sid].as_ref() != Some(&pattern) {
                changed = true;
            }
            patterns[sid] = Some(pattern);
        }
        if !changed {
            converged = true;
            break;
        }
    }
    Ok(BorderPatternTable {
        patterns: patterns
            .into_iter()
            .map(|p| p.expect("every segment processed"))
            .collect(),
        sweeps: ran,
        converged,
    })
}

/// Border dot count of a class under `borders`.
pub fn border_dots(setup: &Setup, borders: &BorderPatternTable, class: ClassId) -> usize {
    setup
        .layouts
        .class(class)
        .map(|c| {
            c.segments
                .iter()
                .map(|g| borders.patterns[g.id as usize].len())
                .sum()
        })
        .unwrap_or(0)
}

/// Interior initialization: classes in seeded random order, each
/// relaxed in its context with every border dot and every finished interior
/// fixed. Floating dots stay inside their own tile's interior, so each tile
/// ends with exactly `k0` dots. A second sweep then re-relaxes every class
/// from its current dots with all other interiors final. Returns tile-local
/// interior dot indices per class id (empty for incomplete classes).
pub fn init_interiors(
    setup: &Setup,
    borders: &BorderPatternTable,
    d0: Density,
    seed: u64,
    iterations: usize,
) -> Result<Vec<Vec<u16>>> {
    let layouts = &setup.layouts;
    let vars = &setup.vars;
    let k0 = d0.count_of(layouts.tile_pixels());
    let complete: Vec<ClassId> = setup.catalog.registry.complete_ids().collect();
    let interior_len = |c: ClassId| layouts.class(c).map(|l| l.interior().count()).unwrap_or(0);
    let need = |c: ClassId| -> Result<usize> {
        let b = border_dots(setup, borders, c);
        if b > k0 || k0 - b > interior_len(c) {
            return Err(Error::InvalidArgument(format!(
                "class {c}: {b} border dots cannot be completed to {k0} per tile"
            )));
        }
        Ok(k0 - b)
    };
    for &c in &complete {
        need(c)?;
    }
    let mut interiors: Vec<Option<Vec<u16>>> = vec![None; layouts.classes.len()];
    let mut order = complete.clone();
    let mut rng = sub_rng(seed, "init-interiors");
    order.shuffle(&mut rng);
    for sweep in 0..INTERIOR_SWEEPS {
        for &c in &order {
            let canvas = setup.canvas(c);
            let ctx = setup.context(c);
            let mut roles = vec![Role::Void; canvas.pixels.len()];
            let mut visible = vec![0usize; ctx.tiles.len()];
            for (i, px) in canvas.pixels.iter().enumerate() {
                let Some((slot, u)) = *px else { continue };
                let b = ctx.tiles[slot as usize].class;
                let v = vars.of_class[b as usize][u as usize];
                roles[i] = if vars.is_border(v) {
                    let sid = vars.segment[v as usize] as usize;
                    let k = (v - vars.segment_base[sid]) as u16;
                    if borders.patterns[sid].binary_search(&k).is_ok() {
                        Role::Dot
                    } else {
                        Role::Free(BLOCKED)
                    }
                } else if let (true, Some(done)) = (sweep > 0 && slot == 0, &interiors[b as usize])
                {
                    if done.binary_search(&u).is_ok() {
                        Role::Seed(1)
                    } else {
                        Role::Free(1)
                    }
                } else if let Some(done) = &interiors[b as usize] {
                    if done.binary_search(&u).is_ok() {
                        Role::Dot
                    } else {
                        Role::Free(BLOCKED)
                    }
                } else {
                    visible[slot as usize] += 1;
                    Role::Free(slot as Zone + 1)
                };
            }
            let mut floating = Vec::new();
            for (slot, t) in ctx.tiles.iter().enumerate() {
                if visible[slot] == 0 || (sweep > 0 && slot == 0) {
                    continue;
                }
                let want = need(t.class)?;
                let count = if slot == 0 {
                    want
                } else {
                    let total = interior_len(t.class);
                    ((want * visible[slot] * 2 + total) / (2 * total)).min(visible[slot])
                };
                floating.push((slot as Zone + 1, count));
            }
            let dots = relax_canvas(
                canvas,
                &roles,
                &floating,
                &mut rng,
                iterations,
                min_spacing_d2(d0),
            )?;
            let mut mine: Vec<u16> = dots
                .iter()
                .filter(|d| d.1 == 1)
                .map(|d| canvas.get(d.0).expect("dot on canvas").1)
                .collect();
            mine.sort_unstable();
            interiors[c as usize] = Some(mine);
        }
    }
    Ok(interiors
        .into_iter()
        .map(Option::unwrap_or_default)
        .collect())
}

/// Squared distance from canvas pixel `at` of `class`'s context to the
/// nearest dotted variable other than `skip`, capped at `look²`.
fn context_gap(
    setup: &Setup,
    dots: &[bool],
    class: ClassId,
    at: Cell,
    skip: u32,
    look: i32,
) -> i64 {
    let canvas = setup.canvas(class);
    let ctx = setup.context(class);
    let mut best = (look * look) as i64;
    for dy in -look..=look {
        for dx in -look..=look {
            let d2 = (dx * dx + dy * dy) as i64;
            if d2 == 0 || d2 >= best {
                continue;
            }
            let Some((slot, u)) = canvas.get((at.0 + dx, at.1 + dy)) else {
                continue;
            };
            let v = setup.vars.of_class[ctx.tiles[slot as usize].class as usize][u as usize];
            if v != skip && dots[v as usize] {
                best = d2;
            }
        }
    }
    best
}

/// Worst gap of variable `skip`'s dot over every owner context, as if it sat
/// at the place of variable `at` (same owners, so same classes), and minus
/// the number of owner contexts where the gap is below `min_d2`.
fn owner_gap(
    setup: &Setup,
    dots: &[bool],
    at: u32,
    skip: u32,
    look: i32,
    min_d2: i64,
) -> (i64, i64) {
    let mut worst = i64::MAX;
    let mut bad = 0;
    for &(c, u) in &setup.vars.owners[at as usize] {
        let g = context_gap(
            setup,
            dots,
            c,
            setup.canvas(c).center[u as usize],
            skip,
            look,
        );
        worst = worst.min(g);
        bad -= (g < min_d2) as i64;
    }
    (worst, bad)
}

/// Moves dots that sit closer than `sqrt(min_d2)` to another dot in any
/// owner's context. An interior dot may move within its tile's interior, a
/// band dot within its own segment, so every count is kept. Each move goes
/// to the candidate within `reach` with the largest worst-case gap, then the
/// fewest crowded owner contexts, and is made only if that beats the current
/// place. Returns the number of moves.
pub fn repair_spacing(
    setup: &Setup,
    dots: &mut [bool],
    min_d2: i64,
    reach: i32,
    passes: usize,
) -> usize {
    let vars = &setup.vars;
    let layouts = &setup.layouts;
    let look = (min_d2 as f64).sqrt().ceil() as i32 + 1;
    let mut moves = 0;
    for _ in 0..passes {
        let mut moved = false;
        for v in 0..vars.len() as u32 {
            if !dots[v as usize] {
                continue;
            }
            let here = owner_gap(setup, dots, v, v, look, min_d2);
            if here.0 >= min_d2 {
                continue;
            }
            let candidates: Vec<u32> = if vars.is_border(v) {
                let sid = vars.segment[v as usize] as usize;
                let base = vars.segment_base[sid];
                let pix = &layouts.segments[sid].local_pixels;
                let p = pix[(v - base) as usize];
                (0..pix.len() as u32)
                    .filter(|&k| {
                        (pix[k as usize].0 - p.0).abs() <= reach
                            && (pix[k as usize].1 - p.1).abs() <= reach
                    })
                    .map(|k| base + k)
                    .collect()
            } else {
                let (c, u) = vars.owners[v as usize][0];
                let grid = layouts.grid(layouts.class(c).expect("complete").orientation);
                let p = grid.pixels[u as usize];
                grid.pixels
                    .iter()
                    .enumerate()
                    .filter(|&(_, q)| (q.0 - p.0).abs() <= reach && (q.1 - p.1).abs() <= reach)
                    .map(|(k, _)| vars.of_class[c as usize][k])
                    .filter(|&w| !vars.is_border(w))
                    .collect()
            };
            let mut best = (here, v);
            for w in candidates {
                if dots[w as usize] {
                    continue;
                }
                let g = owner_gap(setup, dots, w, v, look, min_d2);
                if g > best.0 {
                    best = (g, w);
                }
            }
            if best.1 != v {
                dots[v as usize] = false;
                dots[best.1 as usize] = true;
                moves += 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    moves
}
