//! Python bindings: load or build a rank table, dither, and measure spectra.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use polydither::config::Density;
use polydither::error::Error;
use polydither::halftone::{self, Assets, BinaryImage, GrayImage, ThresholdView};
use polydither::optimizer::{build_rank_table, OptimizerConfig, RankTable, Setup};
use polydither::polyomino::canonical::canonical_rule;
use polydither::spectrum::{self, void_and_cluster_matrix};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyIOError::new_err(e.to_string()),
        e => PyValueError::new_err(e.to_string()),
    }
}

/// A rank table with the bundled tiling assets.
#[pyclass(frozen)]
struct Table {
    table: RankTable,
    assets: Assets,
}

impl Table {
    fn new(table: RankTable) -> PyResult<Self> {
        Ok(Table {
            table,
            assets: Assets::new(canonical_rule().map_err(err)?),
        })
    }

    fn view(&self, width: u32, height: u32, offset: (i64, i64)) -> PyResult<ThresholdView> {
        ThresholdView::build(width, height, &self.table, &self.assets, offset).map_err(err)
    }
}

fn bits(py: Python<'_>, img: &BinaryImage) -> Py<PyBytes> {
    let b: Vec<u8> = img.pixels().iter().map(|&p| u8::from(p)).collect();
    PyBytes::new(py, &b).unbind()
}

#[pymethods]
impl Table {
    /// Reads a table written by `polydither build-tables`.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))?;
        Table::new(RankTable::parse(&text).map_err(err)?)
    }

    /// Runs the full optimization; minutes at the default size.
    #[staticmethod]
    #[pyo3(signature = (s=8, d0=(1, 8), seed=1, sigma=1.5))]
    fn build(py: Python<'_>, s: u32, d0: (u64, u64), seed: u64, sigma: f64) -> PyResult<Self> {
        let cfg = OptimizerConfig {
            s,
            d0: Density::new(d0.0, d0.1).map_err(err)?,
            seed,
            sigma,
            ..OptimizerConfig::default()
        };
        cfg.validate().map_err(err)?;
        let table = py
            .detach(|| {
                let setup = Setup::new(canonical_rule()?, s)?;
                build_rank_table(&setup, &cfg).map(|(t, _)| t)
            })
            .map_err(err)?;
        Table::new(table)
    }

    #[getter]
    fn s(&self) -> u32 {
        self.table.s
    }

    #[getter]
    fn levels(&self) -> usize {
        self.table.tile_pixels()
    }

    #[getter]
    fn classes(&self) -> usize {
        self.table.classes.len()
    }

    fn hash(&self) -> String {
        self.table.hash()
    }

    fn save(&self, path: &str) -> PyResult<()> {
        std::fs::write(path, self.table.to_text())
            .map_err(|e| PyIOError::new_err(format!("{path}: {e}")))
    }

    /// Dithers 8-bit gray bytes (row-major); returns one byte per pixel,
    /// 1 for black.
    #[pyo3(signature = (data, width, height, offset=(0, 0)))]
    fn dither(
        &self,
        py: Python<'_>,
        data: &[u8],
        width: u32,
        height: u32,
        offset: (i64, i64),
    ) -> PyResult<Py<PyBytes>> {
        let img = GrayImage::from_u8(width, height, data).map_err(err)?;
        let out = self
            .view(width, height, offset)?
            .dither(&img)
            .map_err(err)?;
        Ok(bits(py, &out))
    }

    /// Dithers the constant level `g` in [0, 1].
    #[pyo3(signature = (g, width, height, offset=(0, 0)))]
    fn dither_level(
        &self,
        py: Python<'_>,
        g: f64,
        width: u32,
        height: u32,
        offset: (i64, i64),
    ) -> PyResult<Py<PyBytes>> {
        Ok(bits(
            py,
            &self.view(width, height, offset)?.dither_constant(g),
        ))
    }

    /// Black pixels of every tile lying wholly inside the view.
    #[pyo3(signature = (g, width, height, offset=(0, 0)))]
    fn complete_tile_counts(
        &self,
        g: f64,
        width: u32,
        height: u32,
        offset: (i64, i64),
    ) -> PyResult<Vec<u32>> {
        let view = self.view(width, height, offset)?;
        let counts = view.black_per_tile(&view.dither_constant(g));
        Ok((0..counts.len())
            .filter(|&t| view.is_complete(t))
            .map(|t| counts[t])
            .collect())
    }
}

/// Black pixels a complete tile shows at constant level `g`.
#[pyfunction]
fn expected_black(levels: u32, g: f64) -> usize {
    halftone::expected_black(levels, g)
}

/// Low-frequency energy ratio of square 0/1 patches at level `g`.
#[pyfunction]
fn low_frequency_ratio(patches: Vec<Vec<u8>>, size: u32, g: f64) -> PyResult<f64> {
    let imgs = patches
        .iter()
        .map(|p| BinaryImage::new(size, size, p.iter().map(|&b| b != 0).collect()))
        .collect::<Result<Vec<_>, _>>()
        .map_err(err)?;
    let spec = spectrum::estimate_spectrum(&imgs, 0.0).map_err(err)?;
    spectrum::low_frequency_energy_ratio(&spec, g).map_err(err)
}

/// Ranks of an `n` x `n` void-and-cluster matrix, row-major.
#[pyfunction]
#[pyo3(signature = (n, seed=1, sigma=1.5))]
fn void_and_cluster(n: usize, seed: u64, sigma: f64) -> PyResult<Vec<u32>> {
    let d0 = spectrum::compare::baseline_d0();
    Ok(void_and_cluster_matrix(n, d0, sigma, seed)
        .map_err(err)?
        .ranks()
        .to_vec())
}

#[pymodule]
fn polydither_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Table>()?;
    m.add_function(wrap_pyfunction!(expected_black, m)?)?;
    m.add_function(wrap_pyfunction!(low_frequency_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(void_and_cluster, m)?)?;
    Ok(())
}
