//! Two-dimensional Gaussian wave packets and their exact free evolution.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::geometry::HBAR;
use crate::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// ψ(x, z) = amp · g(x; x0, px, σx) · g(z; z0, pz, σz) with
/// g(u; u0, p, σ) = (2πσ²)^(-1/4) exp(−(u − u0)²/4σ² + i p u / ħ).
///
/// The carrier phase is referenced to the absolute coordinate, so packets
/// sharing a momentum are pieces of one plane wave. `∫|ψ|² = |amp|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub x0: f64,
    pub z0: f64,
    pub px: f64,
    pub pz: f64,
    pub sigma_x0: f64,
    pub sigma_z0: f64,
    pub amp: Complex64,
}

impl GaussianPacket {
    pub fn new(x0: f64, z0: f64, px: f64, pz: f64, sigma_x0: f64, sigma_z0: f64, amp: Complex64) -> Result<Self> {
        if !(sigma_x0 > 0.0 && sigma_z0 > 0.0) {
            return Err(Error::invalid("packet widths must be positive"));
        }
        let p = Self {
            x0,
            z0,
            px,
            pz,
            sigma_x0,
            sigma_z0,
            amp,
        };
        if ![x0, z0, px, pz, sigma_x0, sigma_z0, amp.re, amp.im]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::invalid("packet parameters must be finite"));
        }
        Ok(p)
    }

    fn axes(&self) -> (Mode1d, Mode1d) {
        (
            Mode1d {
                center: self.x0,
                momentum: self.px,
                sigma: self.sigma_x0,
            },
            Mode1d {
                center: self.z0,
                momentum: self.pz,
                sigma: self.sigma_z0,
            },
        )
    }

    /// Value at t = 0.
    pub fn eval(&self, x: f64, z: f64) -> Complex64 {
        let (mx, mz) = self.axes();
        self.amp * mx.initial(x) * mz.initial(z)
    }

    /// ⟨self|other⟩ in closed form.
    pub fn overlap(&self, other: &GaussianPacket) -> Complex64 {
        let (ax, az) = self.axes();
        let (bx, bz) = other.axes();
        self.amp.conj() * other.amp * ax.overlap(&bx) * az.overlap(&bz)
    }

    /// Exact free evolution for time `t ≥ 0` under H = p²/2m.
    pub fn propagate(&self, t: f64, mass: f64) -> Result<EvolvedPacket> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::invalid(format!(
                "propagation time must be non-negative, got {t}"
            )));
        }
        if !(mass > 0.0) {
            return Err(Error::invalid("mass must be positive"));
        }
        let (mx, mz) = self.axes();
        Ok(EvolvedPacket {
            amp: self.amp,
            x: mx.evolve(t, mass),
            z: mz.evolve(t, mass),
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Mode1d {
    center: f64,
    momentum: f64,
    sigma: f64,
}

impl Mode1d {
    fn initial(&self, u: f64) -> Complex64 {
        let d = u - self.center;
        let norm = (2.0 * PI * self.sigma * self.sigma).powf(-0.25);
        Complex64::from_polar(
            norm * (-d * d / (4.0 * self.sigma * self.sigma)).exp(),
            self.momentum * u / HBAR,
        )
    }

    // ∫ conj(self) other du, via ∫ exp(−A u² + B u + C) du = sqrt(π/A) exp(B²/4A + C)
    fn overlap(&self, other: &Mode1d) -> Complex64 {
        let (sa, sb) = (self.sigma, other.sigma);
        let a = 1.0 / (4.0 * sa * sa) + 1.0 / (4.0 * sb * sb);
        let b = Complex64::new(
            self.center / (2.0 * sa * sa) + other.center / (2.0 * sb * sb),
            (other.momentum - self.momentum) / HBAR,
        );
        let c = -self.center * self.center / (4.0 * sa * sa) - other.center * other.center / (4.0 * sb * sb);
        let norm = (2.0 * PI * sa * sa).powf(-0.25) * (2.0 * PI * sb * sb).powf(-0.25);
        (b * b / (4.0 * a) + c).exp() * norm * (PI / a).sqrt()
    }

    fn evolve(&self, t: f64, mass: f64) -> EvolvedMode {
        let s = self.sigma;
        // complex width σ(1 + iħt/2mσ²)
        let width = Complex64::new(s, HBAR * t / (2.0 * mass * s));
        let prefactor = (2.0 * PI).powf(-0.25) * width.sqrt().inv();
        EvolvedMode {
            center: self.center + self.momentum * t / mass,
            momentum: self.momentum,
            sigma0: s,
            width,
            inv_four_sigma_width: (4.0 * s * width).inv(),
            prefactor,
            energy_phase: self.momentum * self.momentum * t / (2.0 * mass * HBAR),
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct EvolvedMode {
    center: f64,
    momentum: f64,
    sigma0: f64,
    width: Complex64,
    inv_four_sigma_width: Complex64,
    prefactor: Complex64,
    energy_phase: f64,
}

impl EvolvedMode {
    fn eval(&self, u: f64) -> Complex64 {
        let d = u - self.center;
        let exponent = -self.inv_four_sigma_width * (d * d) + I * (self.momentum * u / HBAR - self.energy_phase);
        self.prefactor * exponent.exp()
    }

    // |ψ|² ∝ exp(−2 Re[1/(4σ s_t)] d²) = exp(−d²/2σ_t²)
    fn density_sigma(&self) -> f64 {
        (0.25 / self.inv_four_sigma_width.re).sqrt()
    }
}

/// A [`GaussianPacket`] after free evolution; evaluates ψ(x, z, t).
#[derive(Debug, Clone, Copy)]
pub struct EvolvedPacket {
    amp: Complex64,
    x: EvolvedMode,
    z: EvolvedMode,
}

impl EvolvedPacket {
    pub fn eval(&self, x: f64, z: f64) -> Complex64 {
        self.amp * self.x.eval(x) * self.z.eval(z)
    }

    /// Transverse factor alone (times the amplitude), for slices at fixed z.
    pub fn eval_x(&self, x: f64) -> Complex64 {
        self.amp * self.x.eval(x)
    }

    pub fn eval_z(&self, z: f64) -> Complex64 {
        self.z.eval(z)
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x.center, self.z.center)
    }

    /// Standard deviation of |ψ|² along x and z.
    pub fn density_sigma(&self) -> (f64, f64) {
        (self.x.density_sigma(), self.z.density_sigma())
    }

    /// 1/e half-width of |ψ|², √2 times the density standard deviation.
    /// This width spreads as w0·sqrt(1 + (ħt/m w0²)²).
    pub fn half_width_1e(&self) -> (f64, f64) {
        let (sx, sz) = self.density_sigma();
        (std::f64::consts::SQRT_2 * sx, std::f64::consts::SQRT_2 * sz)
    }

    /// Complex width parameters σ0(1 + iħt/2mσ0²).
    pub fn complex_width(&self) -> (Complex64, Complex64) {
        (self.x.width, self.z.width)
    }

    pub fn initial_sigma(&self) -> (f64, f64) {
        (self.x.sigma0, self.z.sigma0)
    }

    /// |amp|²; free evolution preserves it.
    pub fn norm_sq(&self) -> f64 {
        self.amp.norm_sqr()
    }
}
