//! Classical partial-coherence model of the double-slit beam.
//!
//! The entrance slit C is a spatially incoherent source. Its cross-spectral
//! density is propagated to the double slit O with the Fresnel kernel,
//! modulated by the slits, propagated again to the scanning slit D, and
//! finally averaged over the width of D and over the wavelength band.
//! All of this is closed form except the two averaging steps, which also
//! have numerical counterparts used for validation.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::geometry::ExperimentGeometry;
use crate::math::{simpson, sinc, SampledIntegrator};
use crate::profile::{Grid, IntensityProfile, ProfileMeta};
use crate::{Error, Result};

/// Spectral profile s(λ) of the beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SpectralProfile {
    /// Single wavelength; s(λ) is taken as 1 so intensities are relative.
    Monochromatic { center: f64 },
    /// Flat over `[center - width/2, center + width/2]`, normalised to unit area.
    UniformBand { center: f64, width: f64 },
}

impl SpectralProfile {
    pub fn density(&self, lambda: f64) -> f64 {
        match *self {
            SpectralProfile::Monochromatic { .. } => 1.0,
            SpectralProfile::UniformBand { center, width } => {
                if (lambda - center).abs() <= 0.5 * width {
                    1.0 / width
                } else {
                    0.0
                }
            }
        }
    }

    pub fn center(&self) -> f64 {
        match *self {
            SpectralProfile::Monochromatic { center } | SpectralProfile::UniformBand { center, .. } => center,
        }
    }
}

/// Transmission function m(x) of the double slit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SlitModulation {
    /// Two point apertures; only the centres matter.
    DeltaPair { centers: [f64; 2] },
    /// Two top-hat apertures.
    HatPair { centers: [f64; 2], widths: [f64; 2] },
}

impl SlitModulation {
    pub fn delta_pair(centers: [f64; 2]) -> Result<Self> {
        if centers[0] == centers[1] {
            return Err(Error::invalid("slit centres must be distinct"));
        }
        Ok(Self::DeltaPair { centers })
    }

    pub fn hat_pair(centers: [f64; 2], widths: [f64; 2]) -> Result<Self> {
        if centers[0] == centers[1] {
            return Err(Error::invalid("slit centres must be distinct"));
        }
        if !(widths[0] > 0.0 && widths[1] > 0.0) {
            return Err(Error::invalid("hat-pair slit widths must be positive"));
        }
        Ok(Self::HatPair { centers, widths })
    }

    /// Slits at ±d̄/2 with the mean width ā.
    pub fn for_geometry(geom: &ExperimentGeometry) -> Self {
        let half = 0.5 * geom.d_bar();
        let a = geom.a_bar();
        Self::HatPair {
            centers: [-half, half],
            widths: [a, a],
        }
    }

    /// Hat transmission at `x`. Delta pairs have no pointwise value and return 0.
    pub fn transmission(&self, x: f64) -> f64 {
        match *self {
            SlitModulation::DeltaPair { .. } => 0.0,
            SlitModulation::HatPair { centers, widths } => {
                centers.iter().zip(widths).any(|(c, w)| (x - c).abs() <= 0.5 * w) as u8 as f64
            }
        }
    }
}

/// Fresnel point-spread factor e^{ik(x−ξ)²/2L} for propagation over `distance`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelKernel {
    pub k: f64,
    pub distance: f64,
}

impl FresnelKernel {
    pub fn eval(&self, x: f64, xi: f64) -> Complex64 {
        let d = x - xi;
        Complex64::from_polar(1.0, self.k * d * d / (2.0 * self.distance))
    }
}

/// Which closed-form optical intensity to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpticalModelKind {
    /// Point slits, monochromatic.
    Delta,
    /// Point slits, averaged over the detector slit and the band.
    DeltaAveraged,
    /// Finite slits, monochromatic.
    Finite,
    /// Finite slits, averaged over the detector slit and the band.
    FiniteAveraged,
}

impl OpticalModelKind {
    pub fn tag(&self) -> &'static str {
        match self {
            Self::Delta => "optical-delta",
            Self::DeltaAveraged => "optical-delta-avg",
            Self::Finite => "optical-finite",
            Self::FiniteAveraged => "optical-finite-avg",
        }
    }
}

impl FromStr for OpticalModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.strip_prefix("optical-").unwrap_or(s) {
            "delta" => Ok(Self::Delta),
            "delta-avg" => Ok(Self::DeltaAveraged),
            "finite" => Ok(Self::Finite),
            "finite-avg" => Ok(Self::FiniteAveraged),
            _ => Err(Error::invalid(format!("unknown optical model '{s}'"))),
        }
    }
}

impl fmt::Display for OpticalModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// Optical model bound to one geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalSetup {
    geom: ExperimentGeometry,
    spectrum: SpectralProfile,
    envelope_distance: f64,
}

impl OpticalSetup {
    /// Monochromatic spectrum at λ_dB and envelope distance z·v/(z+v).
    pub fn new(geom: &ExperimentGeometry) -> Result<Self> {
        geom.validate()?;
        Ok(Self {
            geom: *geom,
            spectrum: SpectralProfile::Monochromatic { center: geom.lambda_db },
            envelope_distance: geom.z * geom.v / (geom.z + geom.v),
        })
    }

    pub fn with_spectrum(mut self, spectrum: SpectralProfile) -> Self {
        self.spectrum = spectrum;
        self
    }

    /// Overrides the distance `b` in the single-slit envelope offsets
    /// η± = x ± v·d̄/(2b).
    pub fn with_envelope_distance(mut self, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(Error::invalid("envelope distance must be positive"));
        }
        self.envelope_distance = b;
        Ok(self)
    }

    pub fn geometry(&self) -> &ExperimentGeometry {
        &self.geom
    }

    pub fn spectrum(&self) -> &SpectralProfile {
        &self.spectrum
    }

    pub fn envelope_distance(&self) -> f64 {
        self.envelope_distance
    }

    /// Kernel for C→O at wavelength `lambda`.
    pub fn source_kernel(&self, lambda: f64) -> FresnelKernel {
        FresnelKernel {
            k: 2.0 * PI / lambda,
            distance: self.geom.z,
        }
    }

    /// Spatial coherence sinc(k·Δx·w/2z) impressed by the entrance slit.
    pub fn coherence_factor(&self, dx: f64, lambda: f64) -> f64 {
        let k = 2.0 * PI / lambda;
        sinc(k * dx * self.geom.w / (2.0 * self.geom.z))
    }

    /// Cross-spectral density just before the double slit.
    pub fn power_spectrum_before_slits(&self, x1: f64, x2: f64, lambda: f64) -> Complex64 {
        let k = 2.0 * PI / lambda;
        let magnitude = self.coherence_factor(x1 - x2, lambda) * self.spectrum.density(lambda);
        let phase = k * (x1 * x1 - x2 * x2) / (2.0 * self.geom.z);
        Complex64::from_polar(1.0, phase) * magnitude
    }

    /// Cross-spectral density just after the slits, m(x1)·m*(x2)·S_O'.
    pub fn power_spectrum_at_slits(&self, x1: f64, x2: f64, lambda: f64, slits: &SlitModulation) -> Complex64 {
        self.power_spectrum_before_slits(x1, x2, lambda) * slits.transmission(x1) * slits.transmission(x2)
    }

    /// Cross-spectral density at D for two point slits at ±d̄/2.
    pub fn power_spectrum_delta_slits(&self, x1: f64, x2: f64, lambda: f64) -> Complex64 {
        let g = &self.geom;
        let k = 2.0 * PI / lambda;
        let d_bar = g.d_bar();
        let s = self.spectrum.density(lambda);
        let dx = x1 - x2;
        let real = (k * dx * d_bar / (2.0 * g.v)).cos() * s
            + self.coherence_factor(d_bar, lambda) * s * (k * (x1 + x2) * d_bar / (2.0 * g.v)).cos();
        let phase = k * (x1 * x1 - x2 * x2) / (2.0 * g.v);
        Complex64::from_polar(1.0, phase) * real
    }

    /// Intensity at D for point slits, one wavelength.
    pub fn intensity_delta_slits(&self, x: f64, lambda: f64) -> f64 {
        let g = &self.geom;
        let k = 2.0 * PI / lambda;
        let d_bar = g.d_bar();
        let source = sinc(k * d_bar * g.w / (2.0 * g.z));
        (1.0 + source * (k * d_bar * x / g.v).cos()) * self.spectrum.density(lambda)
    }

    /// Point slits averaged over D and the band, sinc factors frozen at λ_dB.
    pub fn intensity_delta_slits_band_averaged(&self, x: f64) -> f64 {
        let g = &self.geom;
        let k = g.wavenumber();
        let d_bar = g.d_bar();
        1.0 + self.aperture_factor(k) * self.band_factor(x) * (k * d_bar * x / g.v).cos()
    }

    /// Point slits averaged over D and a band uniform in ω, by Simpson
    /// quadrature over the wavenumber with no frozen factors.
    pub fn intensity_delta_slits_band_exact(&self, x: f64, nodes: usize) -> f64 {
        let g = &self.geom;
        let (k_lo, k_hi) = self.band_wavenumbers();
        let d_bar = g.d_bar();
        let integral = simpson(
            |k| 1.0 + self.aperture_factor(k) * (k * d_bar * x / g.v).cos(),
            k_lo,
            k_hi,
            nodes,
        );
        integral / (k_hi - k_lo)
    }

    /// Finite slits of mean width ā, one wavelength. Normalised so that the
    /// ā → 0 limit is exactly [`Self::intensity_delta_slits`].
    pub fn intensity_finite_slits(&self, x: f64, lambda: f64) -> f64 {
        let g = &self.geom;
        let k = 2.0 * PI / lambda;
        let (left, right) = self.envelopes(x, k);
        let source = sinc(k * g.d_bar() * g.w / (2.0 * g.z));
        let cross = 2.0 * left * right * source * (k * g.d_bar() * x / g.v).cos();
        0.5 * (left * left + right * right + cross) * self.spectrum.density(lambda)
    }

    /// Finite slits averaged over D and the band, sinc factors frozen at λ_dB.
    pub fn intensity_finite_slits_band_averaged(&self, x: f64) -> f64 {
        let g = &self.geom;
        let k = g.wavenumber();
        let (left, right) = self.envelopes(x, k);
        let cross =
            2.0 * left * right * self.aperture_factor(k) * self.band_factor(x) * (k * g.d_bar() * x / g.v).cos();
        0.5 * (left * left + right * right + cross)
    }

    /// Samples one of the closed-form models on `grid`.
    pub fn profile(&self, kind: OpticalModelKind, grid: &Grid) -> Result<IntensityProfile> {
        let lambda = self.geom.lambda_db;
        let meta = self.meta(kind.tag());
        match kind {
            OpticalModelKind::Delta => IntensityProfile::from_fn(grid, meta, |x| self.intensity_delta_slits(x, lambda)),
            OpticalModelKind::DeltaAveraged => {
                IntensityProfile::from_fn(grid, meta, |x| self.intensity_delta_slits_band_averaged(x))
            }
            OpticalModelKind::Finite => {
                IntensityProfile::from_fn(grid, meta, |x| self.intensity_finite_slits(x, lambda))
            }
            OpticalModelKind::FiniteAveraged => {
                IntensityProfile::from_fn(grid, meta, |x| self.intensity_finite_slits_band_averaged(x))
            }
        }
    }

    /// Point-slit profile averaged numerically: each wavelength node is
    /// sampled, passed through [`detector_average`], and the results are
    /// combined with Simpson weights over a band uniform in ω.
    pub fn delta_slits_band_pipeline(&self, grid: &Grid, nodes: usize) -> Result<IntensityProfile> {
        grid.validate()?;
        let g = &self.geom;
        let h = grid.step();
        let pad = (0.5 * g.w0 / h).ceil() as usize + 1;
        let extended = Grid {
            x_min: grid.x_min - pad as f64 * h,
            x_max: grid.x_max + pad as f64 * h,
            n: grid.n + 2 * pad,
        };
        let nodes = (nodes.max(2) + 1) & !1;
        let (k_lo, k_hi) = self.band_wavenumbers();
        let dk = (k_hi - k_lo) / nodes as f64;
        let plain = self
            .clone()
            .with_spectrum(SpectralProfile::Monochromatic { center: g.lambda_db });

        let mut acc = vec![0.0; grid.n];
        for i in 0..=nodes {
            let k = k_lo + i as f64 * dk;
            let lambda = 2.0 * PI / k;
            let weight = if i == 0 || i == nodes {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let raw = IntensityProfile::from_fn(&extended, ProfileMeta::new("optical-delta"), |x| {
                plain.intensity_delta_slits(x, lambda)
            })?;
            let averaged = detector_average(&raw, g.w0)?;
            for (j, slot) in acc.iter_mut().enumerate() {
                let x = grid.x_min + j as f64 * h;
                let value = averaged
                    .interpolate(x)
                    .ok_or_else(|| Error::Numerical("averaged profile does not cover the grid".into()))?;
                *slot += weight * value;
            }
        }
        let norm = dk / 3.0 / (k_hi - k_lo);
        let values = acc.into_iter().map(|v| v * norm).collect();
        IntensityProfile::new(
            grid.points(),
            values,
            self.meta("optical-delta-pipeline").with("band_nodes", nodes),
        )
    }

    // sinc(k d̄ w / 2z) · sinc(k d̄ w0 / 2v)
    fn aperture_factor(&self, k: f64) -> f64 {
        let g = &self.geom;
        let d_bar = g.d_bar();
        sinc(k * d_bar * g.w / (2.0 * g.z)) * sinc(k * d_bar * g.w0 / (2.0 * g.v))
    }

    // sinc[(Δλ/λ)(k d̄ x / 2v)] at the band centre
    fn band_factor(&self, x: f64) -> f64 {
        let g = &self.geom;
        sinc(g.delta_lambda / g.lambda_db * g.wavenumber() * g.d_bar() * x / (2.0 * g.v))
    }

    fn band_wavenumbers(&self) -> (f64, f64) {
        let g = &self.geom;
        let k = g.wavenumber();
        let half = 0.5 * g.delta_lambda / g.lambda_db;
        (k * (1.0 - half), k * (1.0 + half))
    }

    // single-slit envelopes (η⁻, η⁺)
    fn envelopes(&self, x: f64, k: f64) -> (f64, f64) {
        let g = &self.geom;
        let offset = g.v * g.d_bar() / (2.0 * self.envelope_distance);
        let a = g.a_bar();
        let minus = sinc(k * a * (x - offset) / (2.0 * g.v));
        let plus = sinc(k * a * (x + offset) / (2.0 * g.v));
        (minus, plus)
    }

    fn meta(&self, tag: &str) -> ProfileMeta {
        let g = &self.geom;
        ProfileMeta::new(tag)
            .with("a1_um", g.a1 * 1e6)
            .with("a2_um", g.a2 * 1e6)
            .with("d_um", g.d * 1e6)
            .with("w_um", g.w * 1e6)
            .with("w0_um", g.w0 * 1e6)
            .with("z_m", g.z)
            .with("v_m", g.v)
            .with("lambda_A", g.lambda_db * 1e10)
            .with("dlambda_A", g.delta_lambda * 1e10)
            .with("envelope_distance_m", self.envelope_distance)
    }
}

/// Mean of `profile` over a sliding window of width `w0` centred on each sample.
///
/// Only samples whose whole window lies inside the profile are kept. The
/// profile must be uniformly sampled with at least 8 samples per window.
pub fn detector_average(profile: &IntensityProfile, w0: f64) -> Result<IntensityProfile> {
    if !(w0 > 0.0) {
        return Err(Error::invalid("detector slit width must be positive"));
    }
    let h = profile
        .uniform_step()
        .ok_or_else(|| Error::invalid("detector averaging needs a uniformly sampled profile"))?;
    if w0 / h < 8.0 - 1e-9 {
        return Err(Error::invalid(format!(
            "detector window spans {:.2} samples, need at least 8",
            w0 / h
        )));
    }
    let xs = profile.xs();
    let (lo, hi) = (xs[0], xs[xs.len() - 1]);
    let half = 0.5 * w0;
    let slack = 1e-9 * h;
    let integrator = SampledIntegrator::new(lo, h, profile.values());

    let mut out_x = Vec::new();
    let mut out_v = Vec::new();
    for &x in xs {
        if x - half < lo - slack || x + half > hi + slack {
            continue;
        }
        out_x.push(x);
        out_v.push(integrator.integrate(x - half, x + half) / w0);
    }
    if out_x.is_empty() {
        return Err(Error::invalid("detector window is wider than the profile support"));
    }
    let meta = profile.meta.clone().with("detector_window_um", w0 * 1e6);
    IntensityProfile::new(out_x, out_v, meta)
}

/// Two-beam intensity I1 + I2 + 2·A·I12·cos(k d̄ x / v) with coherence degree `A`.
pub fn phenomenological_intensity(
    x: f64,
    coherence: f64,
    i1: impl Fn(f64) -> f64,
    i2: impl Fn(f64) -> f64,
    i12: impl Fn(f64) -> f64,
    geom: &ExperimentGeometry,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&coherence) {
        return Err(Error::invalid(format!("coherence degree {coherence} outside [0, 1]")));
    }
    let (a, b, c) = (i1(x), i2(x), i12(x));
    if a < 0.0 || b < 0.0 {
        return Err(Error::invalid(format!("negative slit intensity at x = {x}")));
    }
    if c.abs() > (a * b).sqrt() * (1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "modulating intensity {c} violates |I12| <= sqrt(I1 I2) at x = {x}"
        )));
    }
    let phase = geom.wavenumber() * geom.d_bar() * x / geom.v;
    Ok(a + b + 2.0 * coherence * c * phase.cos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MICRON;

    fn setup() -> OpticalSetup {
        OpticalSetup::new(&ExperimentGeometry::default()).unwrap()
    }

    fn lam() -> f64 {
        ExperimentGeometry::default().lambda_db
    }

    #[test]
    fn coherence_factor_values() {
        let s = setup();
        assert_eq!(s.coherence_factor(0.0, lam()), 1.0);
        // first zero at z λ / w
        let zero = 5.0 * lam() / (20.0 * MICRON);
        assert!((zero - 461.25 * MICRON).abs() < 1e-12);
        assert!(s.coherence_factor(zero, lam()).abs() < 1e-12);
        assert!(s.coherence_factor(-zero, lam()).abs() < 1e-12);
        // argument π/2 at half the first zero
        assert!((s.coherence_factor(0.5 * zero, lam()) - 2.0 / PI).abs() < 1e-12);
        assert!((s.coherence_factor(230.6 * MICRON, lam()) - std::f64::consts::FRAC_2_PI).abs() < 1e-3);
    }

    #[test]
    fn source_spectrum_matches_kernel_integral() {
        // ∫ h(x1, ξ) h*(x2, ξ) q(ξ) dξ over the entrance slit, q = s/w
        let s = setup();
        let g = s.geometry();
        let kernel = s.source_kernel(lam());
        for &(x1, x2) in &[
            (100.0 * MICRON, -100.0 * MICRON),
            (37.0 * MICRON, 5.0 * MICRON),
            (0.0, 300.0 * MICRON),
        ] {
            let re = simpson(
                |xi| (kernel.eval(x1, xi) * kernel.eval(x2, xi).conj()).re / g.w,
                -g.w / 2.0,
                g.w / 2.0,
                2000,
            );
            let im = simpson(
                |xi| (kernel.eval(x1, xi) * kernel.eval(x2, xi).conj()).im / g.w,
                -g.w / 2.0,
                g.w / 2.0,
                2000,
            );
            let analytic = s.power_spectrum_before_slits(x1, x2, lam());
            assert!((analytic - Complex64::new(re, im)).norm() < 1e-9, "{x1} {x2}");
        }
    }

    #[test]
    fn power_spectrum_before_slits_properties() {
        let s = setup();
        let v = s.power_spectrum_before_slits(42.0 * MICRON, 42.0 * MICRON, lam());
        assert_eq!(v.im, 0.0);
        assert!((v.re - 1.0).abs() < 1e-15);
        let v = s.power_spectrum_before_slits(100.0 * MICRON, -100.0 * MICRON, lam());
        assert!((v.norm() - s.coherence_factor(200.0 * MICRON, lam()).abs()).abs() < 1e-14);
        let kernel = s.source_kernel(lam());
        assert!((kernel.eval(3e-4, -1e-4).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn delta_slit_spectrum_diagonal_and_hermiticity() {
        let s = setup();
        for &x in &[0.0, 17.0 * MICRON, -250.0 * MICRON] {
            let diag = s.power_spectrum_delta_slits(x, x, lam());
            assert_eq!(diag.im, 0.0);
            assert!((diag.re - s.intensity_delta_slits(x, lam())).abs() < 1e-14);
        }
        let a = s.power_spectrum_delta_slits(50.0 * MICRON, -30.0 * MICRON, lam());
        let b = s.power_spectrum_delta_slits(-30.0 * MICRON, 50.0 * MICRON, lam());
        assert!((a - b.conj()).norm() < 1e-15);
        let g = s.geometry();
        let expected = 1.0 + sinc(g.wavenumber() * g.d_bar() * g.w / (2.0 * g.z));
        assert!((s.power_spectrum_delta_slits(0.0, 0.0, lam()).re - expected).abs() < 1e-15);
    }

    #[test]
    fn delta_slit_intensity_values() {
        let s = setup();
        let g = s.geometry();
        let arg = g.wavenumber() * g.d_bar() * g.w / (2.0 * g.z);
        assert!((arg - 0.8602).abs() < 1e-3);
        let amp = arg.sin() / arg;
        assert!((amp - 0.8808).abs() < 1e-3);
        assert!((s.intensity_delta_slits(0.0, lam()) - (1.0 + amp)).abs() < 1e-14);
        let half = 0.5 * g.v * g.lambda_db / g.d_bar();
        assert!((s.intensity_delta_slits(half, lam()) - (1.0 - amp)).abs() < 1e-12);
        // period v λ / d̄
        let period = 2.0 * half;
        for &x in &[3.0 * MICRON, -41.0 * MICRON] {
            assert!((s.intensity_delta_slits(x + period, lam()) - s.intensity_delta_slits(x, lam())).abs() < 1e-12);
        }
    }

    #[test]
    fn spectral_weight_enters_linearly() {
        let g = ExperimentGeometry::default();
        let band = SpectralProfile::UniformBand {
            center: g.lambda_db,
            width: g.delta_lambda,
        };
        assert!((band.density(g.lambda_db) * g.delta_lambda - 1.0).abs() < 1e-12);
        assert!((band.density(g.lambda_db + 0.49 * g.delta_lambda) * g.delta_lambda - 1.0).abs() < 1e-12);
        assert_eq!(band.density(g.lambda_db + g.delta_lambda), 0.0);
        let s = setup().with_spectrum(band);
        let mono = setup();
        let x = 12.0 * MICRON;
        assert!(
            (s.intensity_delta_slits(x, g.lambda_db) - mono.intensity_delta_slits(x, g.lambda_db) / g.delta_lambda)
                .abs()
                < 1e-6
        );
    }

    #[test]
    fn band_averaged_point_slits() {
        let s = setup();
        let g = s.geometry();
        let amp = sinc(g.wavenumber() * g.d_bar() * g.w / (2.0 * g.z));
        assert!((s.intensity_delta_slits_band_averaged(0.0) - (1.0 + amp * amp)).abs() < 1e-14);
        assert!((s.intensity_delta_slits_band_averaged(0.0) - 1.776).abs() < 1e-3);
        for i in 0..200 {
            let x = -500.0 * MICRON + 5.0 * MICRON * i as f64;
            let swing = (s.intensity_delta_slits_band_averaged(x) - 1.0).abs();
            assert!(swing <= amp * amp + 1e-15);
        }
    }

    #[test]
    fn exact_band_quadrature_matches_frozen_sinc_form() {
        let s = setup();
        for &x in &[0.0, 36.5 * MICRON, 200.0 * MICRON] {
            let frozen = s.intensity_delta_slits_band_averaged(x);
            let exact = s.intensity_delta_slits_band_exact(x, 400);
            // freezing the sinc factors at the band centre is first order in Δλ/λ
            assert!((frozen - exact).abs() < 0.02, "{x}: {frozen} vs {exact}");
        }
    }

    #[test]
    fn finite_slit_envelopes_with_b_equal_z() {
        let g = ExperimentGeometry::default();
        let s = OpticalSetup::new(&g).unwrap().with_envelope_distance(g.z).unwrap();
        let arg = g.wavenumber() * g.a_bar() * (0.5 * g.d_bar()) / (2.0 * g.v);
        assert!((arg - 0.4774).abs() < 1e-3);
        assert!((sinc(arg).powi(2) - 0.9266).abs() < 1e-3);
        let (l, r) = s.envelopes(0.0, g.wavenumber());
        assert!((l * l - sinc(arg).powi(2)).abs() < 1e-15);
        assert!((r * r - sinc(arg).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn default_envelope_distance_projects_from_source() {
        let g = ExperimentGeometry::default();
        let s = OpticalSetup::new(&g).unwrap();
        assert!((s.envelope_distance() - 2.5).abs() < 1e-15);
        // envelope maxima at ∓d̄ on D for z = v
        let offset = g.v * g.d_bar() / (2.0 * s.envelope_distance());
        assert!((offset - g.d_bar()).abs() < 1e-15);
    }

    #[test]
    fn finite_slits_reduce_to_point_slits() {
        let mut g = ExperimentGeometry::default();
        let a = g.a_bar();
        let d_bar = g.d_bar();
        g.a1 = 1e-5 * a;
        g.a2 = 1e-5 * a;
        g.d = d_bar - g.a_bar();
        let s = OpticalSetup::new(&g).unwrap();
        for i in 0..101 {
            let x = -500.0 * MICRON + 10.0 * MICRON * i as f64;
            let fin = s.intensity_finite_slits(x, g.lambda_db);
            let del = s.intensity_delta_slits(x, g.lambda_db);
            assert!((fin - del).abs() <= 1e-6 * del.max(1.0), "{x}: {fin} vs {del}");
        }
    }

    #[test]
    fn finite_slits_are_even_for_equal_widths() {
        let mut g = ExperimentGeometry::default();
        g.a2 = g.a1;
        let s = OpticalSetup::new(&g).unwrap();
        for i in 0..100 {
            let x = 4.9 * MICRON * i as f64;
            let a = s.intensity_finite_slits_band_averaged(x);
            let b = s.intensity_finite_slits_band_averaged(-x);
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-300));
            assert!(s.intensity_finite_slits(x, g.lambda_db) >= 0.0);
        }
    }

    #[test]
    fn detector_average_fixes_constants() {
        let grid = Grid::new(-100.0 * MICRON, 100.0 * MICRON, 801).unwrap();
        let p = IntensityProfile::from_fn(&grid, ProfileMeta::new("flat"), |_| 3.5).unwrap();
        let avg = detector_average(&p, 20.0 * MICRON).unwrap();
        assert_eq!(avg.len(), 801 - 80);
        assert!(avg.values().iter().all(|v| (v - 3.5).abs() < 1e-13));
    }

    #[test]
    fn detector_average_scales_cosine_by_sinc() {
        let g = ExperimentGeometry::default();
        let q = g.wavenumber() * g.d_bar() / g.v;
        let grid = Grid::default();
        let p = IntensityProfile::from_fn(&grid, ProfileMeta::new("cos"), |x| 1.0 + (q * x).cos()).unwrap();
        let avg = detector_average(&p, g.w0).unwrap();
        let factor = sinc(q * g.w0 / 2.0);
        assert!((factor - 0.8808).abs() < 1e-3);
        for (x, v) in avg.xs().iter().zip(avg.values()) {
            assert!((v - (1.0 + factor * (q * x).cos())).abs() < 1e-11);
        }
    }

    #[test]
    fn detector_average_errors() {
        let grid = Grid::new(0.0, 15.0 * MICRON, 16).unwrap();
        let p = IntensityProfile::from_fn(&grid, ProfileMeta::new("x"), |_| 1.0).unwrap();
        assert!(detector_average(&p, 20.0 * MICRON).is_err());
        assert!(detector_average(&p, 5.0 * MICRON).is_err());
        let xs: Vec<f64> = (0..20).map(|i| (i * i) as f64).collect();
        let p = IntensityProfile::new(xs, vec![1.0; 20], ProfileMeta::new("x")).unwrap();
        assert!(detector_average(&p, 100.0).is_err());
    }

    #[test]
    fn hat_pair_modulation() {
        let g = ExperimentGeometry::default();
        let m = SlitModulation::for_geometry(&g);
        assert_eq!(m.transmission(0.0), 0.0);
        assert_eq!(m.transmission(0.5 * g.d_bar()), 1.0);
        assert_eq!(m.transmission(-0.5 * g.d_bar() + 0.49 * g.a_bar()), 1.0);
        assert!(SlitModulation::hat_pair([0.0, 0.0], [1.0, 1.0]).is_err());
        assert!(SlitModulation::hat_pair([0.0, 1.0], [1.0, 0.0]).is_err());
        assert!(SlitModulation::delta_pair([1.0, 1.0]).is_err());
        let s = setup();
        let x = 0.5 * g.d_bar();
        let at = s.power_spectrum_at_slits(x, -x, lam(), &m);
        assert!((at - s.power_spectrum_before_slits(x, -x, lam())).norm() < 1e-15);
        assert_eq!(s.power_spectrum_at_slits(0.0, x, lam(), &m), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn phenomenological_form() {
        let g = ExperimentGeometry::default();
        let half = |_: f64| 0.5;
        let x = 10.0 * MICRON;
        let v = phenomenological_intensity(x, 0.0, half, half, half, &g).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // A = sinc(k d̄ w / 2z) reproduces the point-slit intensity
        let s = setup();
        let amp = s.coherence_factor(g.d_bar(), g.lambda_db);
        let v = phenomenological_intensity(x, amp, half, half, half, &g).unwrap();
        assert!((v - s.intensity_delta_slits(x, g.lambda_db)).abs() < 1e-14);
        // equal contributions: visibility equals A
        let period = g.v * g.lambda_db / g.d_bar();
        let max = phenomenological_intensity(0.0, 0.5, half, half, half, &g).unwrap();
        let min = phenomenological_intensity(0.5 * period, 0.5, half, half, half, &g).unwrap();
        assert!(((max - min) / (max + min) - 0.5).abs() < 1e-12);
        assert!(phenomenological_intensity(x, 0.5, half, half, |_| 0.6, &g).is_err());
        assert!(phenomenological_intensity(x, 1.5, half, half, half, &g).is_err());
    }
}
