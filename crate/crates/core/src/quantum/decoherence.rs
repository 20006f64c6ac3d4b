//! Phenomenological decoherence: the environment-state overlap α_t damps the
//! interference term by Λ_t = 2|α_t|/(1 + |α_t|²).

use crate::math::{arcsech, sech};
use crate::{Error, Result};

/// How the coherence degree Λ_t is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoherenceSpec {
    /// Λ given directly, in [0, 1].
    Direct(f64),
    /// |α_t| = e^{−t/τ_c}, hence Λ_t = sech(t/τ_c).
    CoherenceTime(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoherenceModel {
    pub spec: CoherenceSpec,
    /// Constant phase between the environment states, added to the slit phase difference.
    pub env_phase: f64,
}

impl DecoherenceModel {
    pub fn direct(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::invalid(format!("coherence degree {lambda} outside [0, 1]")));
        }
        Ok(Self {
            spec: CoherenceSpec::Direct(lambda),
            env_phase: 0.0,
        })
    }

    pub fn from_coherence_time(tau_c: f64) -> Result<Self> {
        if !(tau_c > 0.0) {
            return Err(Error::invalid(format!("coherence time must be positive, got {tau_c}")));
        }
        Ok(Self {
            spec: CoherenceSpec::CoherenceTime(tau_c),
            env_phase: 0.0,
        })
    }

    pub fn with_env_phase(mut self, phase: f64) -> Self {
        self.env_phase = phase;
        self
    }

    /// Same phase, coherence degree replaced by `lambda`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Ok(Self::direct(lambda)?.with_env_phase(self.env_phase))
    }

    /// Λ_t at time `t`.
    pub fn coherence_degree(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::invalid(format!("time must be non-negative, got {t}")));
        }
        match self.spec {
            CoherenceSpec::Direct(lambda) => {
                if !(0.0..=1.0).contains(&lambda) {
                    return Err(Error::invalid(format!("coherence degree {lambda} outside [0, 1]")));
                }
                Ok(lambda)
            }
            CoherenceSpec::CoherenceTime(tau_c) => {
                if !(tau_c > 0.0) {
                    return Err(Error::invalid(format!("coherence time must be positive, got {tau_c}")));
                }
                Ok(sech(t / tau_c))
            }
        }
    }
}

/// Λ = 2|α|/(1 + |α|²) for an environment overlap of modulus `alpha_abs` ∈ [0, 1].
pub fn coherence_from_overlap(alpha_abs: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&alpha_abs) {
        return Err(Error::invalid(format!("|α| = {alpha_abs} outside [0, 1]")));
    }
    Ok(2.0 * alpha_abs / (1.0 + alpha_abs * alpha_abs))
}

/// Coherence time giving Λ at time `t`: τ_c = t / arcsech(Λ).
pub fn tau_c_from_lambda(lambda: f64, t: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::invalid(format!(
            "coherence degree must lie in (0, 1) to define a coherence time, got {lambda}"
        )));
    }
    if !(t > 0.0) {
        return Err(Error::invalid(format!("time must be positive, got {t}")));
    }
    let tau = t / arcsech(lambda);
    if !tau.is_finite() {
        return Err(Error::Numerical(format!("coherence time overflows for Λ = {lambda}")));
    }
    Ok(tau)
}
