//! Void-and-cluster threshold matrix on a torus, the periodic baseline.

use rand::seq::SliceRandom;

use crate::config::{sub_rng, Density};
use crate::error::{Error, Result};
use crate::halftone::image::BinaryImage;

/// An `n` x `n` threshold matrix holding a permutation of `0..n²`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VncMatrix {
    n: usize,
    ranks: Vec<u32>,
}

/// Toroidal Gaussian energy of a binary pattern, updated per toggle.
struct Energy {
    n: usize,
    kernel: Vec<f64>,
    e: Vec<f64>,
}

impl Energy {
    fn new(n: usize, sigma: f64) -> Energy {
        let mut kernel = vec![0.0; n * n];
        for dy in 0..n {
            for dx in 0..n {
                let wx = dx.min(n - dx) as f64;
                let wy = dy.min(n - dy) as f64;
                kernel[dy * n + dx] = (-(wx * wx + wy * wy) / (2.0 * sigma * sigma)).exp();
            }
        }
        Energy {
            n,
            kernel,
            e: vec![0.0; n * n],
        }
    }

    fn add(&mut self, at: usize, sign: f64) {
        let n = self.n;
        let (px, py) = (at % n, at / n);
        for y in 0..n {
            let dy = (y + n - py) % n;
            for x in 0..n {
                let dx = (x + n - px) % n;
                self.e[y * n + x] += sign * self.kernel[dy * n + dx];
            }
        }
    }

    /// Pixel with `pattern == want` of extreme energy; ties go to the
    /// lowest index.
    fn extreme(&self, pattern: &[bool], want: bool, max: bool) -> usize {
        let mut best: Option<usize> = None;
        for (i, &p) in pattern.iter().enumerate() {
            if p != want {
                continue;
            }
            let better = match best {
                None => true,
                Some(b) => {
                    if max {
                        self.e[i] > self.e[b]
                    } else {
                        self.e[i] < self.e[b]
                    }
                }
            };
            if better {
                best = Some(i);
            }
        }
        best.expect("pattern has a pixel of the wanted state")
    }
}

/// Builds the matrix: a seeded random initial pattern at density `d0` is
/// relaxed by moving its tightest cluster into its largest void, then ranked
/// by removing clusters, adding into voids, and finally filling the tightest
/// clusters of the remaining minority.
pub fn void_and_cluster_matrix(n: usize, d0: Density, sigma: f64, seed: u64) -> Result<VncMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "matrix size must be >= 2, got {n}"
        )));
    }
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let total = n * n;
    let ones = d0.count_of(total).clamp(1, total / 2);
    let mut rng = sub_rng(seed, "void-and-cluster");
    let mut idx: Vec<usize> = (0..total).collect();
    idx.shuffle(&mut rng);
    let mut pattern = vec![false; total];
    let mut energy = Energy::new(n, sigma);
    for &i in &idx[..ones] {
        pattern[i] = true;
        energy.add(i, 1.0);
    }
    // Relaxation: stop once the removed cluster is itself the largest void.
    for _ in 0..total * 4 {
        let cluster = energy.extreme(&pattern, true, true);
        pattern[cluster] = false;
        energy.add(cluster, -1.0);
        let void = energy.extreme(&pattern, false, false);
        pattern[void] = true;
        energy.add(void, 1.0);
        if void == cluster {
            break;
        }
    }
    let prototype = pattern.clone();
    let proto_energy = energy.e.clone();
    let mut ranks = vec![u32::MAX; total];

    // Phase 1: strip clusters from the prototype.
    for r in (0..ones).rev() {
        let c = energy.extreme(&pattern, true, true);
        pattern[c] = false;
        energy.add(c, -1.0);
        ranks[c] = r as u32;
    }
    // Phase 2: fill voids up to half.
    pattern = prototype;
    energy.e = proto_energy;
    for r in ones..total / 2 {
        let v = energy.extreme(&pattern, false, false);
        pattern[v] = true;
        energy.add(v, 1.0);
        ranks[v] = r as u32;
    }
    // Phase 3: the zeros are now the minority; fill their tightest clusters.
    let mut minority = Energy::new(n, sigma);
    for (i, &p) in pattern.iter().enumerate() {
        if !p {
            minority.add(i, 1.0);
        }
    }
    for r in total / 2..total {
        let c = minority.extreme(&pattern, false, true);
        pattern[c] = true;
        minority.add(c, -1.0);
        ranks[c] = r as u32;
    }
    Ok(VncMatrix { n, ranks })
}

impl VncMatrix {
    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Threshold at `(x, y)` of the periodic tiling.
    pub fn threshold_at(&self, x: i64, y: i64) -> f64 {
        let n = self.n as i64;
        let r = self.ranks[(y.rem_euclid(n) * n + x.rem_euclid(n)) as usize];
        (r as f64 + 0.5) / (self.n * self.n) as f64
    }

    /// Dithers constant gray `g` over a `width` x `height` window whose top
    /// left sits at `offset` in the tiled matrix.
    pub fn dither_constant(
        &self,
        width: u32,
        height: u32,
        offset: (i64, i64),
        g: f64,
    ) -> Result<BinaryImage> {
        if !(0.0..=1.0).contains(&g) {
            return Err(Error::InvalidArgument(format!("level {g} outside [0, 1]")));
        }
        let px = (0..height as i64)
            .flat_map(|y| (0..width as i64).map(move |x| (x, y)))
            .map(|(x, y)| g < self.threshold_at(x + offset.0, y + offset.1))
            .collect();
        BinaryImage::new(width, height, px)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_is_a_permutation_and_halves() {
        let m = void_and_cluster_matrix(16, Density::new(1, 10).unwrap(), 1.5, 3).unwrap();
        let mut r = m.ranks().to_vec();
        r.sort();
        assert_eq!(r, (0..256).collect::<Vec<u32>>());
        let img = m.dither_constant(32, 32, (5, -3), 0.5).unwrap();
        assert_eq!(img.black_count(), 4 * 128);
        assert_eq!(
            m,
            void_and_cluster_matrix(16, Density::new(1, 10).unwrap(), 1.5, 3).unwrap()
        );
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(void_and_cluster_matrix(1, Density::new(1, 10).unwrap(), 1.5, 0).is_err());
        assert!(void_and_cluster_matrix(8, Density::new(1, 10).unwrap(), 0.0, 0).is_err());
    }
}
