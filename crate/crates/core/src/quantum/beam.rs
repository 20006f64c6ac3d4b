//! Slit waves built from Gaussian packets and the two-slit beam state.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::packet::{EvolvedPacket, GaussianPacket};
use crate::geometry::{derive_parameters, ExperimentGeometry, SlitCenterConvention};
use crate::{Error, Result};

/// Packets per slit in quasi-plane mode: 30 for the narrower left slit, 31 for the right.
pub const QUASI_PLANE_PACKETS: (usize, usize) = (30, 31);

/// Coherent sum of Gaussian packets making up one slit's outgoing wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSuperposition {
    pub packets: Vec<GaussianPacket>,
    pub label: String,
}

impl WaveSuperposition {
    pub fn new(packets: Vec<GaussianPacket>, label: impl Into<String>) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::invalid("a wave superposition needs at least one packet"));
        }
        Ok(Self {
            packets,
            label: label.into(),
        })
    }

    /// ⟨Ψ|Ψ⟩ from pairwise closed-form Gaussian overlaps.
    pub fn norm_sq(&self) -> f64 {
        let mut total = Complex64::new(0.0, 0.0);
        for a in &self.packets {
            for b in &self.packets {
                total += a.overlap(b);
            }
        }
        total.re
    }

    /// Rescales the packet amplitudes so that ⟨Ψ|Ψ⟩ = 1.
    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm_sq();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::Numerical(format!(
                "cannot normalise wave '{}' (norm² = {n})",
                self.label
            )));
        }
        let scale = n.sqrt().recip();
        for p in &mut self.packets {
            p.amp *= scale;
        }
        Ok(self)
    }

    pub fn eval(&self, x: f64, z: f64) -> Complex64 {
        self.packets.iter().map(|p| p.eval(x, z)).sum()
    }

    pub fn propagate(&self, t: f64, mass: f64) -> Result<EvolvedWave> {
        let packets = self
            .packets
            .iter()
            .map(|p| p.propagate(t, mass))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvolvedWave { packets })
    }
}

/// A [`WaveSuperposition`] after free evolution.
#[derive(Debug, Clone)]
pub struct EvolvedWave {
    pub packets: Vec<EvolvedPacket>,
}

impl EvolvedWave {
    pub fn eval(&self, x: f64, z: f64) -> Complex64 {
        self.packets.iter().map(|p| p.eval(x, z)).sum()
    }
}

/// One aperture of the double slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlitSpec {
    pub center: f64,
    pub width: f64,
}

/// How a slit's outgoing wave is represented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlitWaveMode {
    /// `packets` equal-weight packets spanning the slit, spacing a/(N−1), σx = a/N.
    QuasiPlane { packets: usize },
    /// One packet with σx = a/4 (the slit edges sit at e⁻² of peak intensity).
    Gaussian,
}

/// Slit-wave representation chosen for both slits of a beam.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum BeamMode {
    /// 30 and 31 packets for the left and right slit.
    QuasiPlane,
    #[default]
    Gaussian,
}

impl BeamMode {
    pub fn tag(&self) -> &'static str {
        match self {
            BeamMode::QuasiPlane => "quantum-quasiplane",
            BeamMode::Gaussian => "quantum-gaussian",
        }
    }
}

impl FromStr for BeamMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("quantum-").unwrap_or(s) {
            "quasi-plane" | "quasiplane" => Ok(Self::QuasiPlane),
            "gaussian" => Ok(Self::Gaussian),
            _ => Err(Error::invalid(format!("unknown quantum mode '{s}'"))),
        }
    }
}

impl fmt::Display for BeamMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Relative weight of the two slit waves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SlitWeighting {
    /// c1 = c2 = 1/√2.
    #[default]
    Equal,
    /// c_i ∝ √a_i.
    SqrtWidth,
}

impl FromStr for SlitWeighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equal" => Ok(Self::Equal),
            "sqrt-width" => Ok(Self::SqrtWidth),
            _ => Err(Error::invalid(format!("unknown slit weighting '{s}'"))),
        }
    }
}

/// Builds the outgoing wave of one slit, normalised to unit norm.
///
/// Every packet carries the slit's momentum `kick = (px, pz)`, sits at z0 = 0
/// and has σz = 2ā.
pub fn build_slit_wave(
    slit: SlitSpec,
    mode: SlitWaveMode,
    kick: (f64, f64),
    geom: &ExperimentGeometry,
    label: &str,
) -> Result<WaveSuperposition> {
    if !(slit.width > 0.0) {
        return Err(Error::invalid(format!(
            "slit width must be positive, got {}",
            slit.width
        )));
    }
    let sigma_z = 2.0 * geom.a_bar();
    let (px, pz) = kick;
    let one = Complex64::new(1.0, 0.0);
    let packets = match mode {
        SlitWaveMode::QuasiPlane { packets } => {
            if packets < 2 {
                return Err(Error::invalid(format!(
                    "quasi-plane mode needs at least 2 packets, got {packets}"
                )));
            }
            let spacing = slit.width / (packets - 1) as f64;
            let sigma_x = slit.width / packets as f64;
            let left = slit.center - 0.5 * slit.width;
            (0..packets)
                .map(|j| GaussianPacket::new(left + j as f64 * spacing, 0.0, px, pz, sigma_x, sigma_z, one))
                .collect::<Result<Vec<_>>>()?
        }
        SlitWaveMode::Gaussian => vec![GaussianPacket::new(
            slit.center,
            0.0,
            px,
            pz,
            0.25 * slit.width,
            sigma_z,
            one,
        )?],
    };
    WaveSuperposition::new(packets, label)?.normalized()
}

/// Construction options for [`BeamState::for_geometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOptions {
    pub mode: BeamMode,
    /// Apply the ∓ħ/a_i transverse kicks.
    pub kicks: bool,
    pub slit_centers: SlitCenterConvention,
    pub weighting: SlitWeighting,
}

impl Default for BeamOptions {
    fn default() -> Self {
        Self {
            mode: BeamMode::Gaussian,
            kicks: true,
            slit_centers: SlitCenterConvention::Symmetric,
            weighting: SlitWeighting::Equal,
        }
    }
}

/// c1|ψ1⟩ + c2|ψ2⟩ with |c1|² + |c2|² = 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamState {
    pub psi1: WaveSuperposition,
    pub psi2: WaveSuperposition,
    pub c1: Complex64,
    pub c2: Complex64,
}

impl BeamState {
    pub fn new(psi1: WaveSuperposition, psi2: WaveSuperposition, c1: Complex64, c2: Complex64) -> Result<Self> {
        let total = c1.norm_sqr() + c2.norm_sqr();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("|c1|² + |c2|² must be 1, got {total}")));
        }
        Ok(Self { psi1, psi2, c1, c2 })
    }

    /// The two-slit beam right after the double slit.
    pub fn for_geometry(geom: &ExperimentGeometry, options: &BeamOptions) -> Result<Self> {
        let derived = derive_parameters(geom)?;
        let (left, right) = geom.slit_centers(options.slit_centers);
        let (kick1, kick2) = if options.kicks {
            ((derived.px1, derived.pz1), (derived.px2, derived.pz2))
        } else {
            ((0.0, derived.p_beam), (0.0, derived.p_beam))
        };
        let (mode1, mode2) = match options.mode {
            BeamMode::QuasiPlane => (
                SlitWaveMode::QuasiPlane {
                    packets: QUASI_PLANE_PACKETS.0,
                },
                SlitWaveMode::QuasiPlane {
                    packets: QUASI_PLANE_PACKETS.1,
                },
            ),
            BeamMode::Gaussian => (SlitWaveMode::Gaussian, SlitWaveMode::Gaussian),
        };
        let psi1 = build_slit_wave(
            SlitSpec {
                center: left,
                width: geom.a1,
            },
            mode1,
            kick1,
            geom,
            "left",
        )?;
        let psi2 = build_slit_wave(
            SlitSpec {
                center: right,
                width: geom.a2,
            },
            mode2,
            kick2,
            geom,
            "right",
        )?;
        let (c1, c2) = match options.weighting {
            SlitWeighting::Equal => (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
            SlitWeighting::SqrtWidth => {
                let total = geom.a1 + geom.a2;
                ((geom.a1 / total).sqrt(), (geom.a2 / total).sqrt())
            }
        };
        Self::new(psi1, psi2, Complex64::new(c1, 0.0), Complex64::new(c2, 0.0))
    }
}
