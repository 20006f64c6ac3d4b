//! Gaussian wave-packet model of the two slit waves and their decoherence.
//!
//! Each slit emits a coherent sum of Gaussian packets. Free evolution of a
//! Gaussian is closed form, so the detector profile is evaluated exactly on
//! the line z = z_eval at a fixed time (by default the O→D flight time of the
//! beam centre).

mod beam;
mod decoherence;
mod packet;

use num_complex::Complex64;
use rayon::prelude::*;

pub use beam::{
    build_slit_wave, BeamMode, BeamOptions, BeamState, EvolvedWave, SlitSpec, SlitWaveMode, SlitWeighting,
    WaveSuperposition, QUASI_PLANE_PACKETS,
};
pub use decoherence::{coherence_from_overlap, tau_c_from_lambda, CoherenceSpec, DecoherenceModel};
pub use packet::{EvolvedPacket, GaussianPacket};

use crate::geometry::{derive_parameters, ExperimentGeometry};
use crate::profile::{IntensityProfile, ProfileMeta};
use crate::{Error, Result};

/// Space-time slice on which the detector profile is read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorSlice {
    pub t: f64,
    pub z: f64,
}

impl DetectorSlice {
    /// t = flight time of the beam centre from O to D, z = v.
    pub fn at_detector(geom: &ExperimentGeometry) -> Result<Self> {
        let derived = derive_parameters(geom)?;
        Ok(Self {
            t: derived.t_flight,
            z: geom.v,
        })
    }
}

/// c1·ψ1 and c2·ψ2 sampled along a detector slice.
#[derive(Debug, Clone)]
pub struct SlitAmplitudes {
    pub xs: Vec<f64>,
    pub first: Vec<Complex64>,
    pub second: Vec<Complex64>,
}

impl SlitAmplitudes {
    /// |c1ψ1 + c2ψ2|².
    pub fn coherent(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| (a + b).norm_sqr())
            .collect()
    }

    /// |c1ψ1|² + |c2ψ2|² + 2Λ|c1ψ1||c2ψ2| cos(δ + φ_env).
    pub fn decohered(&self, lambda: f64, env_phase: f64) -> Vec<f64> {
        let rotation = Complex64::from_polar(1.0, env_phase);
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr() + 2.0 * lambda * (a * b.conj() * rotation).re)
            .collect()
    }

    /// Incoherent part |c1ψ1|² + |c2ψ2|².
    pub fn direct(&self) -> Vec<f64> {
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    /// Interference part 2 Re(c1ψ1 · conj(c2ψ2) · e^{iφ_env}).
    pub fn interference(&self, env_phase: f64) -> Vec<f64> {
        let rotation = Complex64::from_polar(1.0, env_phase);
        self.first
            .iter()
            .zip(&self.second)
            .map(|(a, b)| 2.0 * (a * b.conj() * rotation).re)
            .collect()
    }
}

/// Propagates both slit waves to `slice.t` and samples them at `(x, slice.z)`.
pub fn slit_amplitudes(beam: &BeamState, mass: f64, slice: DetectorSlice, xs: &[f64]) -> Result<SlitAmplitudes> {
    if xs.is_empty() {
        return Err(Error::invalid("empty detector grid"));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("detector grid must be strictly increasing"));
    }
    let psi1 = beam.psi1.propagate(slice.t, mass)?;
    let psi2 = beam.psi2.propagate(slice.t, mass)?;
    let (first, second): (Vec<_>, Vec<_>) = xs
        .par_iter()
        .map(|&x| (beam.c1 * psi1.eval(x, slice.z), beam.c2 * psi2.eval(x, slice.z)))
        .unzip();
    Ok(SlitAmplitudes {
        xs: xs.to_vec(),
        first,
        second,
    })
}

fn slice_meta(tag: &str, slice: DetectorSlice) -> ProfileMeta {
    ProfileMeta::new(tag).with("t_s", slice.t).with("z_m", slice.z)
}

/// Fully coherent intensity |c1ψ1 + c2ψ2|² on the slice.
pub fn intensity_coherent(beam: &BeamState, mass: f64, slice: DetectorSlice, xs: &[f64]) -> Result<IntensityProfile> {
    let amps = slit_amplitudes(beam, mass, slice, xs)?;
    IntensityProfile::new(amps.xs.clone(), amps.coherent(), slice_meta("quantum-coherent", slice))
}

/// Intensity with the interference term damped by Λ_t and shifted by the
/// environment phase. The global (1 + |α_t|²) factor is left out.
pub fn intensity_decohered(
    beam: &BeamState,
    deco: &DecoherenceModel,
    mass: f64,
    slice: DetectorSlice,
    xs: &[f64],
) -> Result<IntensityProfile> {
    let lambda = deco.coherence_degree(slice.t)?;
    let amps = slit_amplitudes(beam, mass, slice, xs)?;
    let meta = slice_meta("quantum-decohered", slice)
        .with("coherence", lambda)
        .with("env_phase", deco.env_phase);
    IntensityProfile::new(amps.xs.clone(), amps.decohered(lambda, deco.env_phase), meta)
}
