//! Crystals of affine `sl_n` highest-weight modules realized on colored
//! multi-partitions, ordered by a slope datum.

pub mod cli;
pub mod crystal;
pub mod graph;
pub mod monomial;
pub mod partition;
pub mod regularity;
pub mod slope;
pub mod verify;
