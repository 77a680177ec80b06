//! Simulation and processing pipeline for a pushbroom hyperspectral imager
//! that uses a digital micromirror device (DMD) as a programmable slit.
//!
//! The crate is organised along the data flow:
//!
//! - [`scene`]: ground-truth cubes, synthetic scenes, rebinning, RGB rendering, cube files
//! - [`optics`]: slit patterns, grating dispersion, dark-stripe RGB frames, jitter, sensor noise
//! - [`controller`]: scan plans, timing, the acquisition loop and record persistence
//! - [`reconstruct`]: stripe localisation, frame registration, cube assembly, gap filling
//! - [`roi`]: edge detection, segmentation, ROI scan plans, region spectra
//! - [`metrics`]: NRMSD, SNR and band sweeps

// negated comparisons reject NaN parameters; one-interval plans are common
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::single_range_in_vec_init)]

pub mod controller;
pub mod error;
mod fsutil;
pub mod image;
pub mod metrics;
pub mod optics;
pub mod reconstruct;
pub mod roi;
pub mod scene;

pub use error::{Error, ErrorClass, Result};
pub use fsutil::write_atomic;
