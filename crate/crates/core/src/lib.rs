pub mod config;
pub mod error;
pub mod halftone;
pub mod optimizer;
pub mod polyomino;
pub mod spectrum;
pub mod structure;
