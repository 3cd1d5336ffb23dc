//! Side-by-side statistics of the structure-based method and the
//! void-and-cluster baseline over seeded constant-level patches.

use std::fmt::Write as _;

use rand::Rng;

use super::{
    estimate_spectrum, low_frequency_energy_ratio, void_and_cluster_matrix, SpectrumEstimate,
    VncMatrix,
};
use crate::config::{sub_rng, Density};
use crate::error::Result;
use crate::halftone::image::BinaryImage;
use crate::halftone::view::{Assets, ThresholdView};
use crate::optimizer::RankTable;

pub const PATCHES: usize = 10;
pub const PATCH_SIZE: u32 = 256;
/// Patch offsets are drawn from `0..OFFSET_RANGE` on both axes.
pub const OFFSET_RANGE: i64 = 100_000;
/// Display blur of the 2-D spectrum; statistics use the raw power.
pub const DISPLAY_BLUR: f64 = 1.0;
pub const BASELINE_SIZE: usize = 62;
pub const BASELINE_SIGMA: f64 = 1.5;

/// Initial minority density of the baseline's prototype pattern.
pub fn baseline_d0() -> Density {
    Density::new(1, 10).expect("valid")
}

/// Constant-level patches of the threshold view at seeded offsets.
pub fn view_patches(
    table: &RankTable,
    assets: &Assets,
    g: f64,
    count: usize,
    size: u32,
    seed: u64,
) -> Result<Vec<BinaryImage>> {
    let mut rng = sub_rng(seed, "patches");
    (0..count)
        .map(|_| {
            let off = (
                rng.gen_range(0..OFFSET_RANGE),
                rng.gen_range(0..OFFSET_RANGE),
            );
            Ok(ThresholdView::build(size, size, table, assets, off)?.dither_constant(g))
        })
        .collect()
}

/// Constant-level patches of the tiled baseline matrix at seeded offsets.
pub fn matrix_patches(
    m: &VncMatrix,
    g: f64,
    count: usize,
    size: u32,
    seed: u64,
) -> Result<Vec<BinaryImage>> {
    let mut rng = sub_rng(seed, "patches");
    let n = m.size() as i64;
    (0..count)
        .map(|_| m.dither_constant(size, size, (rng.gen_range(0..n), rng.gen_range(0..n)), g))
        .collect()
}

/// Independent random pixels, black with probability `g`.
pub fn white_noise_patches(g: f64, count: usize, size: u32, seed: u64) -> Result<Vec<BinaryImage>> {
    let mut rng = sub_rng(seed, "white-noise");
    let n = size as usize * size as usize;
    (0..count)
        .map(|_| BinaryImage::new(size, size, (0..n).map(|_| rng.gen_bool(g)).collect()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumStats {
    pub low_frequency_ratio: f64,
    pub radial_peak_ratio: f64,
    pub spike_ratio: f64,
    /// Power on the lattice of a period over the rest, with that period.
    pub lattice: Vec<(usize, f64)>,
}

impl SpectrumStats {
    pub fn of(spec: &SpectrumEstimate, g: f64, periods: &[usize]) -> Result<Self> {
        Ok(SpectrumStats {
            low_frequency_ratio: low_frequency_energy_ratio(spec, g)?,
            radial_peak_ratio: spec.radial_peak_ratio(),
            spike_ratio: spec.spike_ratio(),
            lattice: periods
                .iter()
                .map(|&p| (p, spec.lattice_peak_ratio(p)))
                .collect(),
        })
    }

    fn line(&self, name: &str) -> String {
        let mut s = format!(
            "{name:<10} low_freq_ratio {:.4}  radial_peak {:.3}  spike {:.3}",
            self.low_frequency_ratio, self.radial_peak_ratio, self.spike_ratio
        );
        for (p, r) in &self.lattice {
            let _ = write!(s, "  lattice/{p} {r:.3}");
        }
        s
    }
}

/// Spectra and statistics of both methods at one level.
pub struct Comparison {
    pub level: f64,
    pub ours: SpectrumEstimate,
    pub baseline: SpectrumEstimate,
    pub ours_stats: SpectrumStats,
    pub baseline_stats: SpectrumStats,
}

/// Runs both methods at level `g` over [`PATCHES`] seeded patches.
pub fn compare(table: &RankTable, assets: &Assets, g: f64, seed: u64) -> Result<Comparison> {
    let periods = [table.s as usize, BASELINE_SIZE];
    let ours = estimate_spectrum(
        &view_patches(table, assets, g, PATCHES, PATCH_SIZE, seed)?,
        DISPLAY_BLUR,
    )?;
    let m = void_and_cluster_matrix(BASELINE_SIZE, baseline_d0(), BASELINE_SIGMA, seed)?;
    let baseline = estimate_spectrum(
        &matrix_patches(&m, g, PATCHES, PATCH_SIZE, seed)?,
        DISPLAY_BLUR,
    )?;
    Ok(Comparison {
        level: g,
        ours_stats: SpectrumStats::of(&ours, g, &periods)?,
        baseline_stats: SpectrumStats::of(&baseline, g, &periods)?,
        ours,
        baseline,
    })
}

impl Comparison {
    pub fn report(&self) -> String {
        format!(
            "level {:.6}, {PATCHES} patches of {PATCH_SIZE}x{PATCH_SIZE}\n{}\n{}\n",
            self.level,
            self.ours_stats.line("structure"),
            self.baseline_stats.line(&format!("vac/{BASELINE_SIZE}")),
        )
    }
}
