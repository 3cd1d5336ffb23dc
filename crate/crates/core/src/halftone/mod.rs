//! Runtime dithering against the polyomino threshold structure.

pub mod image;
pub mod io;
pub mod view;

pub use image::{BinaryImage, GrayImage};
pub use view::{dither_ramp, expected_black, Assets, ThresholdView, ViewTile};
