//! Exact computation with affine Cantor sets and their arithmetic differences.

pub mod cantor;
pub mod classify;
pub mod cli;
pub mod config;
pub mod dimension;
pub mod error;
pub mod interval;
pub mod rational;
pub mod renorm;
pub mod svg;

pub use error::{Error, Result};
