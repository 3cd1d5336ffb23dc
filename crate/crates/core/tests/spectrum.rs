use polydither::halftone::io::png_text;
use polydither::spectrum::compare::*;
use polydither::spectrum::*;

fn baseline() -> VncMatrix {
    void_and_cluster_matrix(BASELINE_SIZE, baseline_d0(), BASELINE_SIGMA, 1).unwrap()
}

#[test]
fn baseline_is_blue_and_periodic() {
    let m = baseline();
    let g = 1.0 / 16.0;
    let spec =
        estimate_spectrum(&matrix_patches(&m, g, PATCHES, PATCH_SIZE, 1).unwrap(), 0.0).unwrap();
    assert!(low_frequency_energy_ratio(&spec, g).unwrap() < 0.5);
    let g = 6.0 / 256.0;
    let spec =
        estimate_spectrum(&matrix_patches(&m, g, PATCHES, PATCH_SIZE, 1).unwrap(), 0.0).unwrap();
    assert!(spec.lattice_peak_ratio(BASELINE_SIZE) > 3.0);
}

#[test]
fn white_noise_is_flat() {
    let g = 6.0 / 256.0;
    let spec = estimate_spectrum(
        &white_noise_patches(g, PATCHES, PATCH_SIZE, 3).unwrap(),
        0.0,
    )
    .unwrap();
    let r = low_frequency_energy_ratio(&spec, g).unwrap();
    assert!((r - 1.0).abs() < 0.15, "{r}");
    assert!(spec.lattice_peak_ratio(BASELINE_SIZE) < 1.5);
}

#[test]
fn solid_patches_have_no_power() {
    let m = baseline();
    let spec = estimate_spectrum(&matrix_patches(&m, 1.0, 3, 64, 1).unwrap(), 1.0).unwrap();
    assert_eq!(spec.total_power(), 0.0);
    assert!(spec.bins.iter().all(|b| b.mean_power == 0.0));
}

#[test]
fn exports_are_well_formed() {
    let m = baseline();
    let spec = estimate_spectrum(&matrix_patches(&m, 0.2, 2, 64, 1).unwrap(), 1.0).unwrap();
    let table = spec.to_table();
    assert!(table.starts_with("# freq mean_power anisotropy"));
    assert_eq!(table.lines().count(), 1 + spec.bins.len());
    let png = spec.to_png().unwrap();
    assert!(png_text(&png).is_ok());
}

#[test]
fn patch_sampling_is_seeded() {
    let m = baseline();
    let a = matrix_patches(&m, 0.3, 2, 32, 7).unwrap();
    assert_eq!(a, matrix_patches(&m, 0.3, 2, 32, 7).unwrap());
    assert_ne!(a, matrix_patches(&m, 0.3, 2, 32, 8).unwrap());
}
