//! File formats, configuration and batch runners for the gait planner.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod config;
pub mod fit;
pub mod grid;
pub mod mocap_io;
pub mod output;
mod table;
