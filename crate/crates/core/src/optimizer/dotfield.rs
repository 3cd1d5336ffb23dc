//! Binary dot fields on a toroidal pixel grid and grid-snapped Lloyd
//! relaxation.

use crate::error::{Error, Result};

/// Pixel zone label; `0` marks pixels outside the relaxation domain.
pub type Zone = u16;
pub const OUTSIDE: Zone = 0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DotStatus {
    Fixed,
    Floating,
}

/// A dot and the zone it must stay in (`None`: anywhere in the domain).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dot {
    pub x: u32,
    pub y: u32,
    pub status: DotStatus,
    pub zone: Option<Zone>,
}

/// Dots on a `width` x `height` torus. Every pixel carries a zone label;
/// Voronoi cells and centroids only consider pixels inside the domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DotField {
    width: u32,
    height: u32,
    zones: Vec<Zone>,
    dots: Vec<Dot>,
}

impl DotField {
    /// A field where every pixel is in the domain (zone 1).
    pub fn new(width: u32, height: u32) -> Self {
        DotField::with_zones(width, height, vec![1; (width * height) as usize])
            .expect("sizes agree")
    }

    pub fn with_zones(width: u32, height: u32, zones: Vec<Zone>) -> Result<Self> {
        if width == 0 || height == 0 || zones.len() != (width * height) as usize {
            return Err(Error::DimensionMismatch {
                expected: format!("{width}x{height} zones"),
                actual: format!("{} zones", zones.len()),
            });
        }
        Ok(DotField {
            width,
            height,
            zones,
            dots: Vec::new(),
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dots(&self) -> &[Dot] {
        &self.dots
    }

    pub fn zone_at(&self, x: u32, y: u32) -> Zone {
        self.zones[(y * self.width + x) as usize]
    }

    /// Adds a dot; fails if the pixel is outside the domain or taken.
    pub fn add(&mut self, x: u32, y: u32, status: DotStatus, zone: Option<Zone>) -> Result<()> {
        if x >= self.width || y >= self.height || self.zone_at(x, y) == OUTSIDE {
            return Err(Error::InvalidArgument(format!(
                "dot ({x}, {y}) outside the domain"
            )));
        }
        if let Some(z) = zone {
            if self.zone_at(x, y) != z {
                return Err(Error::InvalidArgument(format!(
                    "dot ({x}, {y}) outside its zone {z}"
                )));
            }
        }
        if self.dots.iter().any(|d| d.x == x && d.y == y) {
            return Err(Error::InvalidArgument(format!(
                "pixel ({x}, {y}) already has a dot"
            )));
        }
        self.dots.push(Dot { x, y, status, zone });
        Ok(())
    }

    fn wrap_delta(d: i64, n: i64) -> i64 {
        let d = d.rem_euclid(n);
        if d > n / 2 {
            d - n
        } else {
            d
        }
    }

    /// Minimum toroidal Euclidean distance between any two dots.
    pub fn min_distance(&self) -> Option<f64> {
        let (w, h) = (self.width as i64, self.height as i64);
        let mut best: Option<i64> = None;
        let grid = BucketGrid::new(self, 8);
        for (i, a) in self.dots.iter().enumerate() {
            // Scan outward until the ring bound exceeds the best so far.
            let mut r = 0i64;
            loop {
                if let Some(b) = best {
                    if (r - 1).max(0) * grid.size as i64 > 0
                        && ((r - 1) * grid.size as i64).pow(2) >= b
                    {
                        break;
                    }
                }
                if r > grid.bx.max(grid.by) as i64 {
                    break;
                }
                for j in grid.ring(a.x, a.y, r) {
                    if j == i {
                        continue;
                    }
                    let b = &self.dots[j];
                    let dx = Self::wrap_delta(b.x as i64 - a.x as i64, w);
                    let dy = Self::wrap_delta(b.y as i64 - a.y as i64, h);
                    let d2 = dx * dx + dy * dy;
                    if best.is_none_or(|v| d2 < v) {
                        best = Some(d2);
                    }
                }
                r += 1;
            }
        }
        best.map(|d2| (d2 as f64).sqrt())
    }
}

/// Spatial hash of dot indices over toroidal buckets.
struct BucketGrid {
    size: u32,
    bx: u32,
    by: u32,
    buckets: Vec<Vec<usize>>,
}

impl BucketGrid {
    fn new(field: &DotField, size: u32) -> Self {
        let bx = field.width.div_ceil(size);
        let by = field.height.div_ceil(size);
        let mut buckets = vec![Vec::new(); (bx * by) as usize];
        for (i, d) in field.dots.iter().enumerate() {
            buckets[((d.y / size) * bx + d.x / size) as usize].push(i);
        }
        BucketGrid {
            size,
            bx,
            by,
            buckets,
        }
    }

    /// Dot indices in buckets at Chebyshev bucket distance exactly `r`
    /// (each bucket visited once even when the ring wraps onto itself).
    fn ring(&self, x: u32, y: u32, r: i64) -> Vec<usize> {
        let (cx, cy) = ((x / self.size) as i64, (y / self.size) as i64);
        let (bx, by) = (self.bx as i64, self.by as i64);
        let mut seen = Vec::new();
        let mut out = Vec::new();
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs() != r && dy.abs() != r {
                    continue;
                }
                let b = ((cy + dy).rem_euclid(by) * bx + (cx + dx).rem_euclid(bx)) as usize;
                // Rings wider than the grid revisit buckets; inner rings
                // were already scanned at smaller r.
                if dx.abs().max(dy.abs()) > 0 {
                    let inner = {
                        let ddx = (cx + dx).rem_euclid(bx) - cx;
                        let ddy = (cy + dy).rem_euclid(by) - cy;
                        let wx = ddx.rem_euclid(bx).min((-ddx).rem_euclid(bx));
                        let wy = ddy.rem_euclid(by).min((-ddy).rem_euclid(by));
                        wx.max(wy)
                    };
                    if inner < r {
                        continue;
                    }
                }
                if seen.contains(&b) {
                    continue;
                }
                seen.push(b);
                out.extend_from_slice(&self.buckets[b]);
            }
        }
        out
    }
}

/// Result of a relaxation run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LloydStats {
    pub iterations: usize,
    pub converged: bool,
}

/// Index of the nearest dot to every domain pixel (`usize::MAX` outside).
/// Ties go to the dot at the lexicographically smallest `(y, x)`.
pub fn voronoi(field: &DotField) -> Vec<usize> {
    let (w, h) = (field.width as i64, field.height as i64);
    // Buckets about two dot spacings wide keep candidate lists short.
    let domain = field.zones.iter().filter(|&&z| z != OUTSIDE).count();
    let spacing = (domain as f64 / field.dots.len().max(1) as f64).sqrt();
    let grid = BucketGrid::new(field, ((2.0 * spacing).round() as u32).clamp(2, 16));
    let size = grid.size;
    let max_r = grid.bx.max(grid.by) as i64;
    let dist = |x: u32, y: u32, i: usize| -> i64 {
        let d = &field.dots[i];
        let dx = DotField::wrap_delta(d.x as i64 - x as i64, w);
        let dy = DotField::wrap_delta(d.y as i64 - y as i64, h);
        dx * dx + dy * dy
    };
    let mut owner = vec![usize::MAX; field.zones.len()];
    let mut pixels = Vec::new();
    let mut cand = Vec::new();
    for by in 0..grid.by {
        for bx in 0..grid.bx {
            pixels.clear();
            for y in by * size..((by + 1) * size).min(field.height) {
                for x in bx * size..((bx + 1) * size).min(field.width) {
                    if field.zones[(y * field.width + x) as usize] != OUTSIDE {
                        pixels.push((x, y));
                    }
                }
            }
            if pixels.is_empty() {
                continue;
            }
            // Gather rings until one holds a dot, bound the distance every
            // pixel has to its nearest candidate, then add every ring that
            // could still beat that bound.
            let (ox, oy) = (bx * size, by * size);
            cand.clear();
            let mut r = 0i64;
            while r <= max_r && cand.is_empty() {
                cand.extend(grid.ring(ox, oy, r));
                r += 1;
            }
            if cand.is_empty() {
                continue;
            }
            let bound = pixels
                .iter()
                .map(|&(x, y)| {
                    cand.iter()
                        .map(|&i| dist(x, y, i))
                        .min()
                        .expect("non-empty")
                })
                .max()
                .expect("non-empty");
            while r <= max_r && ((r - 1) * size as i64).pow(2) <= bound {
                cand.extend(grid.ring(ox, oy, r));
                r += 1;
            }
            for &(x, y) in &pixels {
                let best = cand
                    .iter()
                    .map(|&i| (dist(x, y, i), (field.dots[i].y, field.dots[i].x), i))
                    .min()
                    .expect("non-empty");
                owner[(y * field.width + x) as usize] = best.2;
            }
        }
    }
    owner
}

/// Moves floating dots to the pixel-snapped toroidal centroids of their
/// Voronoi cells until no dot moves or `iterations` passes have run.
///
/// A target pixel that is outside the dot's zone or already occupied is
/// replaced by the nearest allowed free pixel (ties by `(y, x)`).
pub fn lloyd_relax(field: &mut DotField, iterations: usize) -> Result<LloydStats> {
    if field.dots.is_empty() {
        return Err(Error::InvalidArgument(
            "Lloyd relaxation needs at least one dot".into(),
        ));
    }
    let (w, h) = (field.width as i64, field.height as i64);
    let mut occupied = vec![false; field.zones.len()];
    for d in &field.dots {
        occupied[(d.y * field.width + d.x) as usize] = true;
    }
    for it in 0..iterations {
        let owner = voronoi(field);
        let n = field.dots.len();
        let mut sum = vec![(0i64, 0i64, 0i64); n];
        for y in 0..field.height {
            for x in 0..field.width {
                let p = (y * field.width + x) as usize;
                let i = owner[p];
                if i == usize::MAX {
                    continue;
                }
                let d = &field.dots[i];
                let mut dx = DotField::wrap_delta(x as i64 - d.x as i64, w);
                let mut dy = DotField::wrap_delta(y as i64 - d.y as i64, h);
                // Antipodal pixels pull equally both ways.
                if w % 2 == 0 && dx == w / 2 {
                    dx = 0;
                }
                if h % 2 == 0 && dy == h / 2 {
                    dy = 0;
                }
                sum[i].0 += dx;
                sum[i].1 += dy;
                sum[i].2 += 1;
            }
        }
        let mut moved = false;
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            let d = field.dots[i];
            if d.status == DotStatus::Fixed || sum[i].2 == 0 {
                continue;
            }
            let mx = (sum[i].0 as f64 / sum[i].2 as f64).round() as i64;
            let my = (sum[i].1 as f64 / sum[i].2 as f64).round() as i64;
            if mx == 0 && my == 0 {
                continue;
            }
            let tx = (d.x as i64 + mx).rem_euclid(w) as u32;
            let ty = (d.y as i64 + my).rem_euclid(h) as u32;
            let from = (d.y * field.width + d.x) as usize;
            occupied[from] = false;
            let (nx, ny) = nearest_allowed(field, &occupied, tx, ty, d.zone).unwrap_or((d.x, d.y));
            occupied[(ny * field.width + nx) as usize] = true;
            if (nx, ny) != (d.x, d.y) {
                field.dots[i].x = nx;
                field.dots[i].y = ny;
                moved = true;
            }
        }
        if !moved {
            return Ok(LloydStats {
                iterations: it + 1,
                converged: true,
            });
        }
    }
    Ok(LloydStats {
        iterations,
        converged: false,
    })
}

/// Pushes apart floating dots that sit closer than `sqrt(min_d2)` to any
/// other dot: each such dot moves to the allowed free pixel within
/// `reach` that is farthest from its neighbors (first in scan order on
/// ties), as long
/// as that strictly helps. Grid-snapped Lloyd stalls with adjacent pairs at
/// high densities; this clears most of them. Returns the number of moves.
pub fn spread_dots(field: &mut DotField, min_d2: i64, reach: i64, passes: usize) -> usize {
    let (w, h) = (field.width as i64, field.height as i64);
    let look = (min_d2 as f64).sqrt().ceil() as i64 + 1;
    let cap = look * look;
    let mut at: Vec<u32> = vec![u32::MAX; field.zones.len()];
    for (i, d) in field.dots.iter().enumerate() {
        at[(d.y * field.width + d.x) as usize] = i as u32;
    }
    // Squared distance from (x, y) to the nearest dot other than `skip`,
    // capped at `cap`.
    let nearest = |at: &[u32], x: i64, y: i64, skip: u32| -> i64 {
        let mut best = cap;
        for dy in -look..=look {
            for dx in -look..=look {
                let d2 = dx * dx + dy * dy;
                if d2 == 0 || d2 >= best {
                    continue;
                }
                let p = ((y + dy).rem_euclid(h) * w + (x + dx).rem_euclid(w)) as usize;
                if at[p] != u32::MAX && at[p] != skip {
                    best = d2;
                }
            }
        }
        best
    };
    let mut moves = 0;
    for _ in 0..passes {
        let mut moved = false;
        for i in 0..field.dots.len() {
            let d = field.dots[i];
            if d.status == DotStatus::Fixed {
                continue;
            }
            let here = nearest(&at, d.x as i64, d.y as i64, i as u32);
            if here >= min_d2 {
                continue;
            }
            let mut best = (here, (d.y, d.x));
            for dy in -reach..=reach {
                for dx in -reach..=reach {
                    let nx = (d.x as i64 + dx).rem_euclid(w) as u32;
                    let ny = (d.y as i64 + dy).rem_euclid(h) as u32;
                    let p = (ny * field.width + nx) as usize;
                    let z = field.zones[p];
                    if at[p] != u32::MAX || z == OUTSIDE || d.zone.is_some_and(|zz| zz != z) {
                        continue;
                    }
                    let v = nearest(&at, nx as i64, ny as i64, i as u32);
                    if v > best.0 {
                        best = (v, (ny, nx));
                    }
                }
            }
            if best.0 > here {
                let (ny, nx) = best.1;
                at[(d.y * field.width + d.x) as usize] = u32::MAX;
                at[(ny * field.width + nx) as usize] = i as u32;
                field.dots[i].x = nx;
                field.dots[i].y = ny;
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

fn allowed(field: &DotField, occupied: &[bool], x: u32, y: u32, zone: Option<Zone>) -> bool {
    let p = (y * field.width + x) as usize;
    let z = field.zones[p];
    !occupied[p] && z != OUTSIDE && zone.is_none_or(|zz| zz == z)
}

/// Nearest free pixel allowed for a dot of `zone`, searching outward by
/// toroidal distance from `(x, y)`.
fn nearest_allowed(
    field: &DotField,
    occupied: &[bool],
    x: u32,
    y: u32,
    zone: Option<Zone>,
) -> Option<(u32, u32)> {
    if allowed(field, occupied, x, y, zone) {
        return Some((x, y));
    }
    let (w, h) = (field.width as i64, field.height as i64);
    let max_r = w.max(h);
    for r in 1..=max_r {
        let mut best: Option<(i64, (u32, u32))> = None;
        for dy in -r..=r {
            for dx in -r..=r {
                if dx.abs() != r && dy.abs() != r {
                    continue;
                }
                let nx = (x as i64 + dx).rem_euclid(w) as u32;
                let ny = (y as i64 + dy).rem_euclid(h) as u32;
                if allowed(field, occupied, nx, ny, zone) {
                    let key = (dx * dx + dy * dy, (ny, nx));
                    if best.is_none_or(|b| (key.0, key.1) < (b.0, (b.1 .1, b.1 .0))) {
                        best = Some((key.0, (nx, ny)));
                    }
                }
            }
        }
        // A ring-r hit can still be beaten by ring r+1 only if farther
        // than r*sqrt(2); accept once the next ring cannot be closer.
        if let Some((d2, p)) = best {
            let mut best = (d2, p);
            for r2 in r + 1..=max_r {
                if r2 * r2 > best.0 {
                    break;
                }
                for dy in -r2..=r2 {
                    for dx in -r2..=r2 {
                        if dx.abs() != r2 && dy.abs() != r2 {
                            continue;
                        }
                        let d2 = dx * dx + dy * dy;
                        if d2 > best.0 {
                            continue;
                        }
                        let nx = (x as i64 + dx).rem_euclid(w) as u32;
                        let ny = (y as i64 + dy).rem_euclid(h) as u32;
                        if allowed(field, occupied, nx, ny, zone)
                            && (d2, (ny, nx)) < (best.0, (best.1 .1, best.1 .0))
                        {
                            best = (d2, (nx, ny));
                        }
                    }
                }
            }
            return Some(best.1);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_fixed_is_unchanged() {
        let mut f = DotField::new(16, 16);
        f.add(1, 1, DotStatus::Fixed, None).unwrap();
        f.add(2, 1, DotStatus::Fixed, None).unwrap();
        let before = f.clone();
        let stats = lloyd_relax(&mut f, 10).unwrap();
        assert!(stats.converged);
        assert_eq!(f, before);
    }

    #[test]
    fn single_floating_dot_stays() {
        for (w, h) in [(16, 16), (15, 9)] {
            let mut f = DotField::new(w, h);
            f.add(3, 5, DotStatus::Floating, None).unwrap();
            lloyd_relax(&mut f, 1).unwrap();
            assert_eq!((f.dots()[0].x, f.dots()[0].y), (3, 5));
        }
    }

    #[test]
    fn empty_field_is_rejected() {
        assert!(lloyd_relax(&mut DotField::new(4, 4), 1).is_err());
    }

    #[test]
    fn two_dots_spread_apart() {
        let mut f = DotField::new(16, 1);
        f.add(0, 0, DotStatus::Floating, None).unwrap();
        f.add(1, 0, DotStatus::Floating, None).unwrap();
        lloyd_relax(&mut f, 100).unwrap();
        assert!(f.min_distance().unwrap() >= 7.0);
    }

    #[test]
    fn zones_confine_dots() {
        // Left half zone 1, right half zone 2.
        let zones: Vec<Zone> = (0..64).map(|i| if i % 8 < 4 { 1 } else { 2 }).collect();
        let mut f = DotField::with_zones(8, 8, zones).unwrap();
        f.add(0, 0, DotStatus::Floating, Some(1)).unwrap();
        f.add(1, 0, DotStatus::Floating, Some(1)).unwrap();
        f.add(7, 7, DotStatus::Floating, Some(2)).unwrap();
        lloyd_relax(&mut f, 50).unwrap();
        for d in f.dots() {
            assert_eq!(Some(f.zone_at(d.x, d.y)), d.zone);
        }
        assert!(f.add(5, 5, DotStatus::Fixed, Some(1)).is_err());
    }

    #[test]
    fn voronoi_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut f = DotField::new(37, 29);
        while f.dots().len() < 40 {
            let _ = f.add(
                rng.gen_range(0..37),
                rng.gen_range(0..29),
                DotStatus::Floating,
                None,
            );
        }
        let fast = voronoi(&f);
        for y in 0..29i64 {
            for x in 0..37i64 {
                let best = f
                    .dots()
                    .iter()
                    .enumerate()
                    .min_by_key(|(_, d)| {
                        let dx = DotField::wrap_delta(d.x as i64 - x, 37);
                        let dy = DotField::wrap_delta(d.y as i64 - y, 29);
                        (dx * dx + dy * dy, d.y, d.x)
                    })
                    .unwrap()
                    .0;
                assert_eq!(fast[(y * 37 + x) as usize], best);
            }
        }
    }

    #[test]
    fn min_distance_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut f = DotField::new(50, 40);
        while f.dots().len() < 60 {
            let _ = f.add(
                rng.gen_range(0..50),
                rng.gen_range(0..40),
                DotStatus::Floating,
                None,
            );
        }
        let mut brute = f64::INFINITY;
        for (i, a) in f.dots().iter().enumerate() {
            for b in &f.dots()[i + 1..] {
                let dx = DotField::wrap_delta(a.x as i64 - b.x as i64, 50);
                let dy = DotField::wrap_delta(a.y as i64 - b.y as i64, 40);
                brute = brute.min(((dx * dx + dy * dy) as f64).sqrt());
            }
        }
        assert_eq!(f.min_distance().unwrap(), brute);
    }

    fn random_field(n: u32, count: usize, seed: u64) -> DotField {
        use rand::{seq::SliceRandom, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<u32> = (0..n * n).collect();
        idx.shuffle(&mut rng);
        let mut f = DotField::new(n, n);
        for &i in &idx[..count] {
            f.add(i % n, i / n, DotStatus::Floating, None).unwrap();
        }
        f
    }

    #[test]
    fn lloyd_increases_min_distance() {
        let mut f = random_field(256, 1024, 7);
        let before = f.min_distance().unwrap();
        lloyd_relax(&mut f, 50).unwrap();
        let after = f.min_distance().unwrap();
        assert!(after > before, "{before} -> {after}");
        assert!(after >= 4.0, "{after}");
    }

    #[test]
    fn spread_clears_close_pairs() {
        let mut f = random_field(64, 512, 3);
        lloyd_relax(&mut f, 100).unwrap();
        spread_dots(&mut f, 4, 4, 20);
        assert!(f.min_distance().unwrap() >= 2.0);
        assert_eq!(f.dots().len(), 512);
    }
}
