//! Numerical scaling experiments: grids, mixed norms, level sets, sweeps
//! and their records.
pub mod config;
pub mod grid;
pub mod levels;
pub mod norms;
pub mod records;
pub mod sweep;
