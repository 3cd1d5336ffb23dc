//! Grayscale and binary rasters.

use crate::error::{Error, Result};

/// Intensities in `[0, 1]`, 0 black, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    samples: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch {
                expected: format!("{} samples", width as usize * height as usize),
                actual: format!("{}", samples.len()),
            });
        }
        if let Some(v) = samples.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidArgument(format!(
                "sample {v} is outside [0, 1]"
            )));
        }
        Ok(GrayImage {
            width,
            height,
            samples,
        })
    }

    pub fn constant(width: u32, height: u32, g: f64) -> Result<Self> {
        GrayImage::new(width, height, vec![g; width as usize * height as usize])
    }

    /// 8-bit samples, mapped by `v / 255`.
    pub fn from_u8(width: u32, height: u32, bytes: &[u8]) -> Result<Self> {
        GrayImage::new(
            width,
            height,
            bytes.iter().map(|&v| v as f64 / 255.0).collect(),
        )
    }

    /// Horizontal ramp from 0 at the left column to 1 at the right one.
    pub fn ramp(width: u32, height: u32) -> Result<Self> {
        if width < 2 {
            return Err(Error::InvalidArgument(format!(
                "a ramp needs width >= 2, got {width}"
            )));
        }
        let row: Vec<f64> = (0..width).map(|x| x as f64 / (width - 1) as f64).collect();
        GrayImage::new(
            width,
            height,
            (0..height).flat_map(|_| row.iter().copied()).collect(),
        )
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.samples[(y * self.width + x) as usize]
    }

    /// Samples quantized back to 8 bits.
    pub fn to_u8(&self) -> Vec<u8> {
        self.samples
            .iter()
            .map(|&v| (v * 255.0).round() as u8)
            .collect()
    }
}

/// Black/white raster; `true` is black.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    black: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: u32, height: u32, black: Vec<bool>) -> Result<Self> {
        if black.len() != width as usize * height as usize {
            return Err(Error::DimensionMismatch {
                expected: format!("{} pixels", width as usize * height as usize),
                actual: format!("{}", black.len()),
            });
        }
        Ok(BinaryImage {
            width,
            height,
            black,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[bool] {
        &self.black
    }

    pub fn is_black(&self, x: u32, y: u32) -> bool {
        self.black[(y * self.width + x) as usize]
    }

    pub fn black_count(&self) -> usize {
        self.black.iter().filter(|&&b| b).count()
    }

    /// Copy of a `w` x `h` window starting at `(x, y)`.
    pub fn crop(&self, x: u32, y: u32, w: u32, h: u32) -> Result<BinaryImage> {
        if x + w > self.width || y + h > self.height {
            return Err(Error::OutOfBounds {
                x: (x + w) as i64,
                y: (y + h) as i64,
                width: self.width,
                height: self.height,
            });
        }
        let black = (y..y + h)
            .flat_map(|yy| (x..x + w).map(move |xx| (xx, yy)))
            .map(|(xx, yy)| self.is_black(xx, yy))
            .collect();
        BinaryImage::new(w, h, black)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_range_checked() {
        assert!(GrayImage::new(1, 1, vec![1.5]).is_err());
        assert!(GrayImage::new(2, 1, vec![0.5]).is_err());
        assert!(GrayImage::ramp(1, 4).is_err());
        let r = GrayImage::ramp(3, 2).unwrap();
        assert_eq!(r.samples(), &[0.0, 0.5, 1.0, 0.0, 0.5, 1.0]);
        assert_eq!(GrayImage::from_u8(1, 1, &[255]).unwrap().get(0, 0), 1.0);
    }

    #[test]
    fn crop_copies_window() {
        let b = BinaryImage::new(3, 2, vec![true, false, true, false, true, false]).unwrap();
        let c = b.crop(1, 0, 2, 2).unwrap();
        assert_eq!(c.pixels(), &[false, true, true, false]);
        assert!(b.crop(2, 0, 2, 1).is_err());
    }
}
