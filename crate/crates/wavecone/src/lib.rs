//! Spectral machinery, numerical experiments, file formats and the command
//! line front end built on [`wavecone_core`].
//!
//! Everything lives on the periodic unit torus `[0,1)^d`: fields are
//! sampled on power-of-two grids and differentiated with the FFT.

pub mod cli;
pub mod config;
pub mod error;
pub mod grid;
pub mod io;
pub mod lab;
pub mod spectral;

pub use error::{Category, Error, Result};
pub use grid::{Spectrum, TorusField, TorusGrid, C64};
pub use wavecone_core as core;
