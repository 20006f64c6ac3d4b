//! Experiment parameters, physical constants and the quantities derived from them.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Neutron mass (CODATA 2018), kg.
pub const NEUTRON_MASS: f64 = 1.674_927_498_04e-27;

pub const MICRON: f64 = 1e-6;
pub const ANGSTROM: f64 = 1e-10;

/// Visibility reported for the measured neutron scan. The counts are not
/// published, so this value is only a reference.
pub const MEASURED_VISIBILITY: f64 = 0.583;
/// Coherence time quoted alongside Λ = 0.63 for the measured scan (s).
/// It does not follow from Λ = 0.63 and the O→D flight time; kept for reference.
pub const QUOTED_COHERENCE_TIME: f64 = 5.08e-2;

/// Geometry and beam parameters of the double-slit setup, SI units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentGeometry {
    /// Left slit width.
    pub a1: f64,
    /// Right slit width.
    pub a2: f64,
    /// Width of the wire separating the slits.
    pub d: f64,
    /// Entrance slit (C) width.
    pub w: f64,
    /// Scanning slit (D) width.
    pub w0: f64,
    /// Distance from C to the double slit.
    pub z: f64,
    /// Distance from the double slit to D.
    pub v: f64,
    /// de Broglie wavelength at the band centre.
    pub lambda_db: f64,
    /// Full wavelength bandwidth.
    pub delta_lambda: f64,
    pub particle_mass: f64,
}

impl Default for ExperimentGeometry {
    /// The cold-neutron setup: 21.9–104.1–22.5 µm double slit, 20 µm entrance
    /// and scanning slits 5 m on either side, 18.45 Å with a 2.80 Å band.
    fn default() -> Self {
        Self {
            a1: 21.9 * MICRON,
            a2: 22.5 * MICRON,
            d: 104.1 * MICRON,
            w: 20.0 * MICRON,
            w0: 20.0 * MICRON,
            z: 5.0,
            v: 5.0,
            lambda_db: 18.45 * ANGSTROM,
            delta_lambda: 2.80 * ANGSTROM,
            particle_mass: NEUTRON_MASS,
        }
    }
}

impl ExperimentGeometry {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("a1", self.a1),
            ("a2", self.a2),
            ("d", self.d),
            ("w", self.w),
            ("w0", self.w0),
            ("z", self.z),
            ("v", self.v),
            ("lambda", self.lambda_db),
            ("dlambda", self.delta_lambda),
            ("mass", self.particle_mass),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Geometry(format!("{name} must be positive, got {value}")));
            }
        }
        if self.delta_lambda >= self.lambda_db {
            return Err(Error::Geometry(format!(
                "bandwidth {} m must be smaller than the wavelength {} m",
                self.delta_lambda, self.lambda_db
            )));
        }
        Ok(())
    }

    /// Band-centre wavenumber 2π/λ.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.lambda_db
    }

    /// Centre-to-centre slit separation d + (a1 + a2)/2.
    pub fn d_bar(&self) -> f64 {
        self.d + 0.5 * (self.a1 + self.a2)
    }

    pub fn a_bar(&self) -> f64 {
        0.5 * (self.a1 + self.a2)
    }

    /// Transverse slit centres `(left, right)` under the given convention.
    pub fn slit_centers(&self, convention: SlitCenterConvention) -> (f64, f64) {
        match convention {
            SlitCenterConvention::Symmetric => (-0.5 * (self.d + self.a1), 0.5 * (self.d + self.a2)),
            SlitCenterConvention::Printed => (0.5 * (self.a1 - self.d), 0.5 * (self.a2 + self.d)),
        }
    }

    /// Fresnel-similar copy: transverse apertures times `factor`, propagation
    /// distances times `factor²`, wavelengths unchanged. Every sinc argument of
    /// the optical model is invariant under this map.
    pub fn fresnel_scaled(&self, factor: f64) -> Self {
        Self {
            a1: self.a1 * factor,
            a2: self.a2 * factor,
            d: self.d * factor,
            w: self.w * factor,
            w0: self.w0 * factor,
            z: self.z * factor * factor,
            v: self.v * factor * factor,
            ..*self
        }
    }
}

/// Where the two slit centres sit on the transverse axis.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SlitCenterConvention {
    /// Left centre at −(d + a1)/2, right at +(d + a2)/2; separation is exactly d̄.
    #[default]
    Symmetric,
    /// Left centre at (a1 − d)/2, right at (a2 + d)/2 (separation d + (a2 − a1)/2).
    Printed,
}

impl FromStr for SlitCenterConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "symmetric" => Ok(Self::Symmetric),
            "paper" | "printed" => Ok(Self::Printed),
            other => Err(Error::invalid(format!("unknown slit-centre convention '{other}'"))),
        }
    }
}

impl fmt::Display for SlitCenterConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Symmetric => "symmetric",
            Self::Printed => "paper",
        })
    }
}

/// Quantities shared by both engines, derived from an [`ExperimentGeometry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedParams {
    pub k: f64,
    pub d_bar: f64,
    pub a_bar: f64,
    /// O→D flight time at the band-centre speed.
    pub t_flight: f64,
    /// Beam momentum 2πħ/λ.
    pub p_beam: f64,
    /// Transverse kick of the left slit wave, −ħ/a1.
    pub px1: f64,
    /// Transverse kick of the right slit wave, +ħ/a2.
    pub px2: f64,
    pub pz1: f64,
    pub pz2: f64,
    /// v·λ/d̄.
    pub fringe_spacing: f64,
}

pub fn derive_parameters(geom: &ExperimentGeometry) -> Result<DerivedParams> {
    geom.validate()?;
    let k = geom.wavenumber();
    let d_bar = geom.d_bar();
    let p_beam = 2.0 * PI * HBAR / geom.lambda_db;
    let px1 = -HBAR / geom.a1;
    let px2 = HBAR / geom.a2;
    let longitudinal = |px: f64| -> Result<f64> {
        let sq = p_beam * p_beam - px * px;
        if sq <= 0.0 {
            return Err(Error::Geometry("transverse kick exceeds the beam momentum".into()));
        }
        Ok(sq.sqrt())
    };
    Ok(DerivedParams {
        k,
        d_bar,
        a_bar: geom.a_bar(),
        t_flight: geom.v / (p_beam / geom.particle_mass),
        p_beam,
        px1,
        px2,
        pz1: longitudinal(px1)?,
        pz2: longitudinal(px2)?,
        fringe_spacing: geom.v * geom.lambda_db / d_bar,
    })
}
