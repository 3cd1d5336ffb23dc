pub mod canonical;
pub mod cover;
pub mod exact_cover;
pub mod rule;
pub mod shape;
pub mod tiling;
