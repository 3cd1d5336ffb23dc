//! Power spectra of binary patches, blue-noise and periodicity statistics,
//! and the void-and-cluster baseline.

pub mod compare;
pub mod vac;

use std::fmt::Write as _;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::halftone::image::BinaryImage;
use crate::halftone::io::encode_gray16_png;

pub use compare::{compare, Comparison, SpectrumStats};
pub use vac::{void_and_cluster_matrix, VncMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct RadialBin {
    /// Bin center in cycles per pixel.
    pub freq: f64,
    pub mean_power: f64,
    /// Variance over mean squared of the 2-D samples in the ring.
    pub anisotropy: f64,
    pub count: usize,
}

/// Averaged power spectrum of square patches, DC at the center.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEstimate {
    pub size: usize,
    pub patches: usize,
    /// Power per frequency summed over patches, before any blur. Each patch
    /// contributes `|X|² / size²`, so its total equals its variance times
    /// `size²`.
    pub power: Vec<f64>,
    /// `power` after the optional display blur.
    pub display: Vec<f64>,
    /// DC power; zero after mean removal, kept for reporting.
    pub dc: f64,
    pub bins: Vec<RadialBin>,
    /// Radial bin of each 2-D frequency (`usize::MAX` for DC).
    bin_of: Vec<usize>,
}

/// `|X|² / N²` of a mean-removed patch, DC centered.
fn patch_power(patch: &BinaryImage, planner: &mut FftPlanner<f64>) -> Vec<f64> {
    let n = patch.width() as usize;
    let mean = patch.black_count() as f64 / (n * n) as f64;
    let mut data: Vec<Complex<f64>> = patch
        .pixels()
        .iter()
        .map(|&b| Complex::new(if b { 1.0 } else { 0.0 } - mean, 0.0))
        .collect();
    let fft = planner.plan_fft_forward(n);
    for row in data.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex::new(0.0, 0.0); n];
    for x in 0..n {
        for y in 0..n {
            col[y] = data[y * n + x];
        }
        fft.process(&mut col);
        for y in 0..n {
            data[y * n + x] = col[y];
        }
    }
    let norm = (n * n) as f64;
    let half = n / 2;
    let mut out = vec![0.0; n * n];
    for y in 0..n {
        for x in 0..n {
            let (cx, cy) = ((x + half) % n, (y + half) % n);
            out[cy * n + cx] = data[y * n + x].norm_sqr() / norm;
        }
    }
    out
}

/// Centered frequency index of array position `i`.
fn centered(i: usize, n: usize) -> i64 {
    i as i64 - (n / 2) as i64
}

/// Toroidal Gaussian blur of an `n` x `n` array.
fn blur2d(a: &[f64], n: usize, sigma: f64) -> Vec<f64> {
    let r = (3.0 * sigma).ceil() as i64;
    let k: Vec<f64> = (-r..=r)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let ks: f64 = k.iter().sum();
    let n_i = n as i64;
    let pass = |src: &[f64], horizontal: bool| -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for y in 0..n_i {
            for x in 0..n_i {
                let mut s = 0.0;
                for (j, w) in k.iter().enumerate() {
                    let d = j as i64 - r;
                    let (sx, sy) = if horizontal {
                        ((x + d).rem_euclid(n_i), y)
                    } else {
                        (x, (y + d).rem_euclid(n_i))
                    };
                    s += w * src[(sy * n_i + sx) as usize];
                }
                out[(y * n_i + x) as usize] = s / ks;
            }
        }
        out
    };
    pass(&pass(a, true), false)
}

/// Sums mean-removed power spectra of equal square patches, bins them
/// radially into `⌊N/2⌋` rings spanning `(0, 1/√2]` cycles per pixel, and
/// blurs a display copy with `blur_sigma` (0 disables).
pub fn estimate_spectrum(patches: &[BinaryImage], blur_sigma: f64) -> Result<SpectrumEstimate> {
    let first = patches
        .first()
        .ok_or_else(|| Error::InvalidArgument("no patches".into()))?;
    let n = first.width() as usize;
    if n < 2 {
        return Err(Error::InvalidArgument(
            "patches must be at least 2x2".into(),
        ));
    }
    for p in patches {
        if p.width() as usize != n || p.height() as usize != n {
            return Err(Error::DimensionMismatch {
                expected: format!("{n}x{n}"),
                actual: format!("{}x{}", p.width(), p.height()),
            });
        }
    }
    let mut planner = FftPlanner::new();
    let mut power = vec![0.0; n * n];
    for p in patches {
        for (acc, v) in power.iter_mut().zip(patch_power(p, &mut planner)) {
            *acc += v;
        }
    }
    let dc_at = (n / 2) * n + n / 2;
    let dc = power[dc_at];

    let nbins = n / 2;
    let width = (n as f64 / std::f64::consts::SQRT_2) / nbins as f64;
    let mut bin_of = vec![usize::MAX; n * n];
    let mut sum = vec![0.0; nbins];
    let mut sum2 = vec![0.0; nbins];
    let mut count = vec![0usize; nbins];
    for y in 0..n {
        for x in 0..n {
            let i = y * n + x;
            if i == dc_at {
                continue;
            }
            let (fx, fy) = (centered(x, n) as f64, centered(y, n) as f64);
            let r = (fx * fx + fy * fy).sqrt();
            let b = ((r / width).ceil() as usize).clamp(1, nbins) - 1;
            bin_of[i] = b;
            sum[b] += power[i];
            sum2[b] += power[i] * power[i];
            count[b] += 1;
        }
    }
    let bins = (0..nbins)
        .map(|b| {
            let c = count[b].max(1) as f64;
            let mean = sum[b] / c;
            let var = (sum2[b] / c - mean * mean).max(0.0);
            RadialBin {
                freq: (b as f64 + 0.5) * width / n as f64,
                mean_power: mean,
                anisotropy: if mean > 0.0 { var / (mean * mean) } else { 0.0 },
                count: count[b],
            }
        })
        .collect();
    let display = if blur_sigma > 0.0 {
        blur2d(&power, n, blur_sigma)
    } else {
        power.clone()
    };
    Ok(SpectrumEstimate {
        size: n,
        patches: patches.len(),
        power,
        display,
        dc,
        bins,
        bin_of,
    })
}

impl SpectrumEstimate {
    /// Sum of power over all non-DC frequencies.
    pub fn total_power(&self) -> f64 {
        let dc_at = (self.size / 2) * self.size + self.size / 2;
        self.power
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != dc_at)
            .map(|(_, v)| v)
            .sum()
    }

    /// `freq mean_power anisotropy` per line.
    pub fn to_table(&self) -> String {
        let mut out = String::from("# freq mean_power anisotropy\n");
        for b in &self.bins {
            let _ = writeln!(
                out,
                "{:.6} {:.9e} {:.6}",
                b.freq, b.mean_power, b.anisotropy
            );
        }
        out
    }

    /// 16-bit gray PNG of the display power, log scaled: a value `P` maps
    /// to `65535 · ln(1 + P/m) / ln(1 + max/m)` with `m` the mean power.
    pub fn to_png(&self) -> Result<Vec<u8>> {
        let n = self.size;
        let m = self.display.iter().sum::<f64>() / (n * n) as f64;
        let max = self.display.iter().cloned().fold(0.0, f64::max);
        let samples: Vec<u16> = if m > 0.0 && max > 0.0 {
            let top = (1.0 + max / m).ln();
            self.display
                .iter()
                .map(|&p| {
                    (65535.0 * (1.0 + p / m).ln() / top)
                        .round()
                        .clamp(0.0, 65535.0) as u16
                })
                .collect()
        } else {
            vec![0; n * n]
        };
        encode_gray16_png(n as u32, n as u32, &samples)
    }

    /// Largest ratio of a radial bin to the mean of the bins within two
    /// rings of it (the bin itself excluded).
    pub fn radial_peak_ratio(&self) -> f64 {
        let p: Vec<f64> = self.bins.iter().map(|b| b.mean_power).collect();
        let mut worst: f64 = 0.0;
        for i in 0..p.len() {
            let lo = i.saturating_sub(2);
            let hi = (i + 2).min(p.len() - 1);
            let nb: Vec<f64> = (lo..=hi).filter(|&j| j != i).map(|j| p[j]).collect();
            let mean = nb.iter().sum::<f64>() / nb.len() as f64;
            if mean > 0.0 {
                worst = worst.max(p[i] / mean);
            }
        }
        worst
    }

    /// Largest ratio of a display-power sample to the mean display power of
    /// its radial ring: an isolated spike, such as a periodic lattice
    /// produces, stands far above its ring.
    pub fn spike_ratio(&self) -> f64 {
        let nb = self.bins.len();
        let mut sum = vec![0.0; nb];
        let mut count = vec![0usize; nb];
        for (i, &b) in self.bin_of.iter().enumerate() {
            if b != usize::MAX {
                sum[b] += self.display[i];
                count[b] += 1;
            }
        }
        let mut worst: f64 = 0.0;
        for (i, &b) in self.bin_of.iter().enumerate() {
            if b == usize::MAX || count[b] == 0 {
                continue;
            }
            let mean = sum[b] / count[b] as f64;
            if mean > 0.0 {
                worst = worst.max(self.display[i] / mean);
            }
        }
        worst
    }

    /// Mean power at the frequencies nearest the multiples of `1/period`,
    /// over the mean power everywhere else (DC excluded).
    pub fn lattice_peak_ratio(&self, period: usize) -> f64 {
        let n = self.size as i64;
        let mut on = vec![false; self.power.len()];
        let reach = period as i64 / 2;
        for a in -reach..=reach {
            for b in -reach..=reach {
                if a == 0 && b == 0 {
                    continue;
                }
                let fx = (a as f64 * n as f64 / period as f64).round() as i64;
                let fy = (b as f64 * n as f64 / period as f64).round() as i64;
                if fx < -n / 2 || fx >= n - n / 2 || fy < -n / 2 || fy >= n - n / 2 {
                    continue;
                }
                on[((fy + n / 2) * n + fx + n / 2) as usize] = true;
            }
        }
        let dc_at = ((n / 2) * n + n / 2) as usize;
        let (mut s_on, mut c_on, mut s_off, mut c_off) = (0.0, 0usize, 0.0, 0usize);
        for (i, &p) in self.power.iter().enumerate() {
            if i == dc_at {
                continue;
            }
            if on[i] {
                s_on += p;
                c_on += 1;
            } else {
                s_off += p;
                c_off += 1;
            }
        }
        if c_on == 0 || c_off == 0 || s_off == 0.0 {
            return 0.0;
        }
        (s_on / c_on as f64) / (s_off / c_off as f64)
    }
}

/// Mean radial power below half the principal frequency `√min(g, 1-g)`,
/// over the mean radial power from there up to 0.5 cycles per pixel.
pub fn low_frequency_energy_ratio(spec: &SpectrumEstimate, g: f64) -> Result<f64> {
    if !(g > 0.0 && g < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "level {g} must lie strictly between 0 and 1"
        )));
    }
    let cut = g.min(1.0 - g).sqrt() / 2.0;
    let band_mean = |lo: f64, hi: f64, hi_inclusive: bool| -> Option<f64> {
        let v: Vec<f64> = spec
            .bins
            .iter()
            .filter(|b| {
                b.count > 0 && b.freq >= lo && (b.freq < hi || (hi_inclusive && b.freq <= hi))
            })
            .map(|b| b.mean_power)
            .collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    };
    let low = band_mean(0.0, cut, false)
        .ok_or_else(|| Error::EmptyBand(format!("no bins below {cut:.4}")))?;
    let high = band_mean(cut, 0.5, true)
        .ok_or_else(|| Error::EmptyBand(format!("no bins in [{cut:.4}, 0.5]")))?;
    if high <= 0.0 {
        return Err(Error::EmptyBand("reference band carries no power".into()));
    }
    Ok(low / high)
}
