//! Double-slit interference of cold neutrons.
//!
//! Two independent descriptions of the same experiment live here:
//!
//! * [`optics`]: classical partial-coherence treatment. An incoherent entrance
//!   slit, free propagation of the cross-spectral density, slit modulation,
//!   then averaging over the scanning-slit width and the wavelength band.
//! * [`quantum`]: two coherent slit waves built from Gaussian packets,
//!   propagated exactly under the free Hamiltonian, with the interference
//!   term damped by a phenomenological coherence degree.
//!
//! [`analysis`] extracts fringe visibilities and fits scale, background and
//! coherence degree to scan data. [`config`], [`csvio`] and [`cli`] provide the
//! file formats and the `fringelab` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod csvio;
mod error;
pub mod geometry;
pub mod math;
pub mod optics;
pub mod profile;
pub mod quantum;

pub use error::{Error, Result};
pub use geometry::{DerivedParams, ExperimentGeometry, SlitCenterConvention};
pub use profile::{Grid, IntensityProfile, ProfileMeta};
