//! File formats: station tables, solution tables and synthetic networks.

pub mod solution;
pub mod stations;
pub mod synthetic;
