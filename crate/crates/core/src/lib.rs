#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod wavepacket;
pub mod fock;
pub mod warp;
pub mod deformation;
pub mod scattering;
pub mod oscillatory;
pub mod config;
pub mod report;
pub mod cli;

pub use error::{Error, Result};
