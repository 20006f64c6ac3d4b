//! Fringe metrics, scale/background fits and the coherence-degree fit.

use rayon::prelude::*;

use crate::geometry::{derive_parameters, ExperimentGeometry};
use crate::math::{golden_section_minimize, parabola_vertex};
use crate::profile::{IntensityProfile, MIN_PROFILE_LEN};
use crate::quantum::{slit_amplitudes, BeamState, DecoherenceModel, DetectorSlice};
use crate::{Error, Result};

/// Central-fringe visibility with the extrema it was computed from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visibility {
    pub visibility: f64,
    pub x_max: f64,
    pub i_max: f64,
    pub x_min_left: f64,
    pub i_min_left: f64,
    pub x_min_right: f64,
    pub i_min_right: f64,
}

fn local_maxima(v: &[f64]) -> Vec<usize> {
    (1..v.len().saturating_sub(1))
        .filter(|&i| v[i] > v[i - 1] && v[i] >= v[i + 1])
        .collect()
}

/// Local maximum closest to x = 0; ties go to the smaller |x|, then to the left.
fn central_maximum(xs: &[f64], v: &[f64]) -> Option<usize> {
    local_maxima(v).into_iter().min_by(|&a, &b| {
        xs[a]
            .abs()
            .partial_cmp(&xs[b].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    })
}

// Walks downhill from `start` in direction `step` (+1/-1); returns the index of
// the first local minimum, or None if the walk runs off the grid.
fn descend(v: &[f64], start: usize, step: isize) -> Option<usize> {
    let n = v.len() as isize;
    let mut j = start as isize;
    loop {
        let next = j + step;
        if next < 0 || next >= n {
            return None;
        }
        if v[next as usize] <= v[j as usize] {
            j = next;
        } else {
            return (j != start as isize).then_some(j as usize);
        }
    }
}

fn ascend(v: &[f64], start: usize, step: isize) -> Option<usize> {
    let n = v.len() as isize;
    let mut j = start as isize;
    loop {
        let next = j + step;
        if next < 0 || next >= n {
            return None;
        }
        if v[next as usize] >= v[j as usize] {
            j = next;
        } else {
            return (j != start as isize).then_some(j as usize);
        }
    }
}

fn refine(xs: &[f64], v: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= xs.len() {
        return (xs[i], v[i]);
    }
    parabola_vertex([xs[i - 1], xs[i], xs[i + 1]], [v[i - 1], v[i], v[i + 1]])
}

/// Visibility of the fringe nearest x = 0:
/// V = (I_max − I_min)/(I_max + I_min), with I_min the mean of the two
/// flanking minima. Extrema are refined by a three-point parabola.
pub fn fringe_visibility(profile: &IntensityProfile) -> Result<Visibility> {
    let (xs, v) = (profile.xs(), profile.values());
    let centre = central_maximum(xs, v).ok_or(Error::NoFlankingMinima)?;
    let left = descend(v, centre, -1).ok_or(Error::NoFlankingMinima)?;
    let right = descend(v, centre, 1).ok_or(Error::NoFlankingMinima)?;

    let (x_max, i_max) = refine(xs, v, centre);
    let (x_min_left, i_min_left) = refine(xs, v, left);
    let (x_min_right, i_min_right) = refine(xs, v, right);
    let i_min = 0.5 * (i_min_left + i_min_right);
    let denom = i_max + i_min;
    if !(denom > 0.0) {
        return Err(Error::Numerical("zero intensity at the central fringe".into()));
    }
    Ok(Visibility {
        visibility: (i_max - i_min) / denom,
        x_max,
        i_max,
        x_min_left,
        i_min_left,
        x_min_right,
        i_min_right,
    })
}

/// Visibility of `profile` read off at the extremum positions of `reference`.
///
/// Useful where the fringes have washed out and the profile has no extrema
/// of its own.
pub fn visibility_at_reference(profile: &IntensityProfile, reference: &Visibility) -> Result<f64> {
    let at = |x: f64| {
        profile
            .interpolate(x)
            .ok_or_else(|| Error::invalid(format!("reference position {x} outside the profile grid")))
    };
    let i_max = at(reference.x_max)?;
    let i_min = 0.5 * (at(reference.x_min_left)? + at(reference.x_min_right)?);
    if !(i_max + i_min > 0.0) {
        return Err(Error::Numerical("zero intensity at the reference fringe".into()));
    }
    Ok((i_max - i_min) / (i_max + i_min))
}

/// Visibility of the decohered quantum profile on `xs`.
///
/// When damping has removed the flanking minima, the visibility is read off
/// at the extremum positions of the fully coherent profile instead.
pub fn quantum_visibility(
    beam: &BeamState,
    deco: &DecoherenceModel,
    geom: &ExperimentGeometry,
    xs: &[f64],
) -> Result<f64> {
    let slice = DetectorSlice::at_detector(geom)?;
    let lambda = deco.coherence_degree(slice.t)?;
    let amps = slit_amplitudes(beam, geom.particle_mass, slice, xs)?;
    let profile = |values: Vec<f64>| IntensityProfile::new(xs.to_vec(), values, Default::default());
    match fringe_visibility(&profile(amps.decohered(lambda, deco.env_phase))?) {
        Err(Error::NoFlankingMinima) => {
            let reference = fringe_visibility(&profile(amps.decohered(1.0, deco.env_phase))?)?;
            visibility_at_reference(&profile(amps.decohered(lambda, deco.env_phase))?, &reference)
        }
        other => other.map(|v| v.visibility),
    }
}

/// Mean distance between the central maximum and its neighbouring maxima.
pub fn fringe_spacing(profile: &IntensityProfile) -> Result<f64> {
    let (xs, v) = (profile.xs(), profile.values());
    let centre = central_maximum(xs, v).ok_or(Error::NoFlankingMinima)?;
    let neighbour = |step: isize| descend(v, centre, step).and_then(|m| ascend(v, m, step));
    let x_c = refine(xs, v, centre).0;
    let left = neighbour(-1).map(|i| refine(xs, v, i).0);
    let right = neighbour(1).map(|i| refine(xs, v, i).0);
    match (left, right) {
        (Some(l), Some(r)) => Ok(0.5 * (r - l)),
        (Some(l), None) => Ok(x_c - l),
        (None, Some(r)) => Ok(r - x_c),
        (None, None) => Err(Error::NoFlankingMinima),
    }
}

/// Size of the fringe ripple in the tails |x| ≥ `x_from`.
///
/// Sums every rise in intensity met while walking outward from `x_from`,
/// normalized by the profile maximum. A smooth monotone tail gives zero.
pub fn tail_ripple(profile: &IntensityProfile, x_from: f64) -> f64 {
    let (xs, v) = (profile.xs(), profile.values());
    let peak = profile.max_value();
    if !(peak > 0.0) {
        return 0.0;
    }
    let mut rise = 0.0;
    for w in 0..xs.len() - 1 {
        let (a, b) = (w, w + 1);
        if xs[a] >= x_from {
            rise += (v[b] - v[a]).max(0.0);
        } else if xs[b] <= -x_from {
            rise += (v[a] - v[b]).max(0.0);
        }
    }
    rise / peak
}

/// Measured detector scan: positions (m), counts and optional errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanDataset {
    pub positions: Vec<f64>,
    pub counts: Vec<f64>,
    pub errors: Option<Vec<f64>>,
}

impl ScanDataset {
    pub fn new(positions: Vec<f64>, counts: Vec<f64>, errors: Option<Vec<f64>>) -> Result<Self> {
        if positions.len() != counts.len() || errors.as_ref().is_some_and(|e| e.len() != counts.len()) {
            return Err(Error::invalid("scan columns have different lengths"));
        }
        if positions.is_empty() {
            return Err(Error::invalid("empty scan"));
        }
        if let Some(i) = positions.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::invalid(format!(
                "scan positions not strictly increasing at row {}",
                i + 2
            )));
        }
        if let Some(i) = counts.iter().position(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::invalid(format!("invalid count {} at row {}", counts[i], i + 1)));
        }
        if let Some(e) = &errors {
            if let Some(i) = e.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::invalid(format!("invalid error {} at row {}", e[i], i + 1)));
            }
        }
        Ok(Self {
            positions,
            counts,
            errors,
        })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Result of fitting `scale · model + background` to data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFit {
    pub scale: f64,
    pub background: f64,
    pub rms: f64,
    /// model − data at each data point.
    pub residuals: Vec<f64>,
}

// Least squares for y ≈ s·m + b with s > 0, b ≥ 0.
fn linear_fit(m: &[f64], y: &[f64]) -> Result<ScaleFit> {
    let n = m.len() as f64;
    let m_mean = m.iter().sum::<f64>() / n;
    let y_mean = y.iter().sum::<f64>() / n;
    let smm: f64 = m.iter().map(|v| (v - m_mean).powi(2)).sum();
    let smy: f64 = m.iter().zip(y).map(|(a, b)| (a - m_mean) * (b - y_mean)).sum();
    let m_sq: f64 = m.iter().map(|v| v * v).sum();
    if !(smm > 1e-24 * m_sq) {
        return Err(Error::Numerical(
            "singular normal equations: model is constant over the data".into(),
        ));
    }
    let mut scale = smy / smm;
    let mut background = y_mean - scale * m_mean;
    if background < 0.0 {
        background = 0.0;
        scale = m.iter().zip(y).map(|(a, b)| a * b).sum::<f64>() / m_sq;
    }
    if !(scale > 0.0) {
        scale = f64::MIN_POSITIVE;
        background = (y_mean - scale * m_mean).max(0.0);
    }
    let residuals: Vec<f64> = m.iter().zip(y).map(|(a, b)| scale * a + background - b).collect();
    let rms = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    Ok(ScaleFit {
        scale,
        background,
        rms,
        residuals,
    })
}

/// Fits `scale · model(x) + background` to the scan, with the model linearly
/// interpolated at the data positions.
pub fn fit_scale_background(model: &IntensityProfile, data: &ScanDataset) -> Result<ScaleFit> {
    let m = data
        .positions
        .iter()
        .map(|&x| {
            model
                .interpolate(x)
                .ok_or_else(|| Error::invalid(format!("data position {x} outside the model grid")))
        })
        .collect::<Result<Vec<_>>>()?;
    linear_fit(&m, &data.counts)
}

/// Best-fit coherence degree and the matching scale and background.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub lambda_hat: f64,
    pub scale: f64,
    pub background: f64,
    pub rms: f64,
    pub residuals: Vec<f64>,
    /// The minimum sits on the edge of [0, 1] rather than being bracketed inside it.
    pub at_boundary: bool,
}

/// Minimum number of scan points accepted by [`fit_coherence_degree`].
pub const MIN_FIT_POINTS: usize = 10;
/// Minimum scan span, in fringe periods.
pub const MIN_FIT_FRINGES: f64 = 3.0;

const SCAN_POINTS: usize = 101;
const LAMBDA_TOL: f64 = 1e-4;

struct CoherenceObjective {
    direct: Vec<f64>,
    cross: Vec<f64>,
    counts: Vec<f64>,
}

impl CoherenceObjective {
    fn new(beam: &BeamState, deco: &DecoherenceModel, data: &ScanDataset, geom: &ExperimentGeometry) -> Result<Self> {
        if data.len() < MIN_FIT_POINTS {
            return Err(Error::invalid(format!(
                "fit needs at least {MIN_FIT_POINTS} data points, got {}",
                data.len()
            )));
        }
        let period = derive_parameters(geom)?.fringe_spacing;
        let span = data.positions[data.len() - 1] - data.positions[0];
        if span < MIN_FIT_FRINGES * period {
            return Err(Error::invalid(format!(
                "data span {:.1} um covers fewer than {MIN_FIT_FRINGES} fringes ({:.1} um each)",
                span * 1e6,
                period * 1e6
            )));
        }
        let slice = DetectorSlice::at_detector(geom)?;
        let amps = slit_amplitudes(beam, geom.particle_mass, slice, &data.positions)?;
        Ok(Self {
            direct: amps.direct(),
            cross: amps.interference(deco.env_phase),
            counts: data.counts.clone(),
        })
    }

    fn fit(&self, lambda: f64) -> Result<ScaleFit> {
        let m: Vec<f64> = self
            .direct
            .iter()
            .zip(&self.cross)
            .map(|(d, c)| d + lambda * c)
            .collect();
        linear_fit(&m, &self.counts)
    }

    fn rms(&self, lambda: f64) -> f64 {
        self.fit(lambda).map(|f| f.rms).unwrap_or(f64::INFINITY)
    }
}

/// Residual rms of the scale/background fit on `n` evenly spaced Λ ∈ [0, 1].
pub fn coherence_rms_scan(
    beam: &BeamState,
    deco: &DecoherenceModel,
    data: &ScanDataset,
    geom: &ExperimentGeometry,
    n: usize,
) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::invalid("scan needs at least two points"));
    }
    let objective = CoherenceObjective::new(beam, deco, data, geom)?;
    Ok((0..n)
        .into_par_iter()
        .map(|i| {
            let lambda = i as f64 / (n - 1) as f64;
            (lambda, objective.rms(lambda))
        })
        .collect())
}

/// Fits the coherence degree Λ to a detector scan.
///
/// The model is `scale · (|ψ1|² + |ψ2|² + Λ·2Re(ψ1ψ2* e^{iφ})) + background`
/// on the detector slice. A coarse scan over [0, 1] brackets the minimum,
/// which is then refined by golden-section search.
pub fn fit_coherence_degree(
    beam: &BeamState,
    deco: &DecoherenceModel,
    data: &ScanDataset,
    geom: &ExperimentGeometry,
) -> Result<FitResult> {
    let objective = CoherenceObjective::new(beam, deco, data, geom)?;
    let last = SCAN_POINTS - 1;
    let scan: Vec<f64> = (0..SCAN_POINTS)
        .into_par_iter()
        .map(|i| objective.rms(i as f64 / last as f64))
        .collect();
    let best = scan
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::Numerical("empty coherence scan".into()))?;
    if !scan[best].is_finite() {
        return Err(Error::Numerical(
            "scale/background fit failed for every coherence degree".into(),
        ));
    }

    let lo = best.saturating_sub(1) as f64 / last as f64;
    let hi = (best + 1).min(last) as f64 / last as f64;
    let (mut lambda_hat, mut rms) = golden_section_minimize(|l| objective.rms(l), lo, hi, LAMBDA_TOL);
    let mut at_boundary = false;
    if best == 0 || best == last {
        let edge = if best == 0 { 0.0 } else { 1.0 };
        if scan[best] <= rms {
            lambda_hat = edge;
            rms = scan[best];
            at_boundary = true;
        }
    }
    let fit = objective.fit(lambda_hat)?;
    debug_assert!((fit.rms - rms).abs() <= 1e-9 * rms.max(1e-300));
    Ok(FitResult {
        lambda_hat,
        scale: fit.scale,
        background: fit.background,
        rms: fit.rms,
        residuals: fit.residuals,
        at_boundary,
    })
}

/// Differences between two profiles after resampling onto their common
/// support and normalizing each to unit mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileComparison {
    pub rms: f64,
    pub max_abs: f64,
    /// |V_a − V_b| when both profiles have a measurable central fringe.
    pub visibility_delta: Option<f64>,
}

pub fn compare_profiles(a: &IntensityProfile, b: &IntensityProfile) -> Result<ProfileComparison> {
    let lo = a.xs()[0].max(b.xs()[0]);
    let hi = a.xs()[a.len() - 1].min(b.xs()[b.len() - 1]);
    if !(lo < hi) {
        return Err(Error::invalid("profiles have disjoint supports"));
    }
    let inside = |p: &IntensityProfile| p.xs().iter().filter(|&&x| x >= lo && x <= hi).count();
    let n = inside(a).max(inside(b)).max(MIN_PROFILE_LEN);
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * h })
        .collect();

    let resample = |p: &IntensityProfile| -> Result<Vec<f64>> {
        let v: Vec<f64> = xs.iter().map(|&x| p.interpolate(x).unwrap_or(0.0)).collect();
        let mean = v.iter().sum::<f64>() / n as f64;
        if !(mean > 0.0) {
            return Err(Error::invalid("profile is zero on the common support"));
        }
        Ok(v.into_iter().map(|x| x / mean).collect())
    };
    let (va, vb) = (resample(a)?, resample(b)?);
    let mut sq = 0.0;
    let mut max_abs = 0.0_f64;
    for (p, q) in va.iter().zip(&vb) {
        let d = p - q;
        sq += d * d;
        max_abs = max_abs.max(d.abs());
    }
    let visibility_delta = match (fringe_visibility(a), fringe_visibility(b)) {
        (Ok(x), Ok(y)) => Some((x.visibility - y.visibility).abs()),
        _ => None,
    };
    Ok(ProfileComparison {
        rms: (sq / n as f64).sqrt(),
        max_abs,
        visibility_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MICRON;
    use crate::profile::{Grid, ProfileMeta};
    use crate::quantum::{BeamMode, BeamOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    fn profile(grid: Grid, f: impl Fn(f64) -> f64) -> IntensityProfile {
        IntensityProfile::from_fn(&grid, ProfileMeta::new("test"), f).unwrap()
    }

    #[test]
    fn full_contrast_cosine_has_unit_visibility() {
        let q = 2.0 * PI / (73.0 * MICRON);
        let p = profile(Grid::default(), |x| 1.0 + (q * x).cos());
        let v = fringe_visibility(&p).unwrap();
        assert!((v.visibility - 1.0).abs() < 1e-9);
        assert!(v.x_max.abs() < 1e-12);
        assert!((v.x_min_right - 36.5 * MICRON).abs() < 1e-9);
    }

    #[test]
    fn flat_or_monotone_profiles_have_no_fringe() {
        assert!(matches!(
            fringe_visibility(&profile(Grid::default(), |_| 2.0)),
            Err(Error::NoFlankingMinima)
        ));
        assert!(matches!(
            fringe_visibility(&profile(Grid::default(), |x| (-(x / 1e-4).powi(2)).exp())),
            Err(Error::NoFlankingMinima)
        ));
    }

    #[test]
    fn central_maximum_prefers_smallest_offset() {
        // two equal peaks at ±30 µm and a lower one at 10 µm
        let bump = |x: f64, c: f64, a: f64| a * (-((x - c) / (4.0 * MICRON)).powi(2)).exp();
        let p = profile(Grid::default(), |x| {
            0.1 + bump(x, -30e-6, 1.0) + bump(x, 30e-6, 1.0) + bump(x, 10e-6, 0.5)
        });
        let v = fringe_visibility(&p).unwrap();
        assert!((v.x_max - 10e-6).abs() < 0.3e-6);
    }

    #[test]
    fn parabolic_extrema_match_dense_grid() {
        let q = 2.0 * PI / (70.0 * MICRON);
        let f = |x: f64| (1.0 + 0.6 * (q * (x - 3.3e-6)).cos()) * (-(x / 400e-6).powi(2)).exp();
        let coarse = fringe_visibility(&profile(Grid::new(-300e-6, 300e-6, 301).unwrap(), f)).unwrap();
        let dense = fringe_visibility(&profile(Grid::new(-300e-6, 300e-6, 600_001).unwrap(), f)).unwrap();
        assert!((coarse.visibility - dense.visibility).abs() < 1e-5);
        assert!((coarse.x_max - dense.x_max).abs() < 0.02e-6);
    }

    #[test]
    fn spacing_of_pure_cosine() {
        let q = 2.0 * PI / (73.04 * MICRON);
        let p = profile(Grid::default(), |x| 1.0 + 0.5 * (q * x).cos());
        assert!((fringe_spacing(&p).unwrap() - 73.04 * MICRON).abs() < 1e-9);
    }

    #[test]
    fn reference_visibility_of_flat_profile_is_zero() {
        let q = 2.0 * PI / (73.0 * MICRON);
        let fringed = profile(Grid::default(), |x| 1.0 + 0.4 * (q * x).cos());
        let reference = fringe_visibility(&fringed).unwrap();
        let flat = profile(Grid::default(), |_| 5.0);
        assert!(visibility_at_reference(&flat, &reference).unwrap().abs() < 1e-15);
        assert!((visibility_at_reference(&fringed, &reference).unwrap() - 0.4).abs() < 1e-6);
    }

    #[test]
    fn ripple_is_zero_for_monotone_tails() {
        let p = profile(Grid::new(-1e-3, 1e-3, 2001).unwrap(), |x| (-(x / 3e-4).powi(2)).exp());
        assert_eq!(tail_ripple(&p, 400e-6), 0.0);
        let q = 2.0 * PI / (100.0 * MICRON);
        let r = profile(Grid::new(-1e-3, 1e-3, 2001).unwrap(), |x| 1.0 + 0.1 * (q * x).cos());
        assert!(tail_ripple(&r, 400e-6) > 0.5);
    }

    fn cosine_model() -> IntensityProfile {
        let q = 2.0 * PI / (73.0 * MICRON);
        profile(Grid::default(), |x| {
            (1.0 + 0.7 * (q * x).cos()) * (-(x / 300e-6).powi(2)).exp()
        })
    }

    fn scan_of(model: &IntensityProfile, mut f: impl FnMut(f64) -> f64) -> ScanDataset {
        let xs: Vec<f64> = (0..81).map(|i| (-400.0 + 10.0 * i as f64) * MICRON).collect();
        let ys = xs.iter().map(|&x| f(model.interpolate(x).unwrap())).collect();
        ScanDataset::new(xs, ys, None).unwrap()
    }

    #[test]
    fn scale_and_background_are_recovered_exactly() {
        let model = cosine_model();
        let data = scan_of(&model, |m| 3.0 * m + 7.0);
        let fit = fit_scale_background(&model, &data).unwrap();
        assert!((fit.scale - 3.0).abs() < 1e-10);
        assert!((fit.background - 7.0).abs() < 1e-10);
        assert!(fit.rms < 1e-10);
    }

    #[test]
    fn scale_fit_is_robust_to_noise() {
        let model = cosine_model();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let data = scan_of(&model, |m| 200.0 * m + 40.0 + noise.sample(&mut rng));
        let fit = fit_scale_background(&model, &data).unwrap();
        assert!((fit.scale - 200.0).abs() / 200.0 < 1e-3);
        assert!((fit.background - 40.0).abs() < 0.05);
    }

    #[test]
    fn background_is_clamped_non_negative() {
        let model = cosine_model();
        let data = scan_of(&model, |m| (2.0 * m - 0.5).max(0.0));
        let fit = fit_scale_background(&model, &data).unwrap();
        assert!(fit.background >= 0.0);
        assert!(fit.scale > 0.0);
    }

    #[test]
    fn constant_model_is_singular() {
        let model = profile(Grid::default(), |_| 1.0);
        let data = scan_of(&model, |m| m);
        assert!(matches!(fit_scale_background(&model, &data), Err(Error::Numerical(_))));
    }

    #[test]
    fn visibility_is_invariant_under_scale_but_not_background() {
        let model = cosine_model();
        let v = fringe_visibility(&model).unwrap().visibility;
        let scaled = model.scaled(12.5).unwrap();
        assert!((fringe_visibility(&scaled).unwrap().visibility - v).abs() < 1e-12);
        let lifted = IntensityProfile::new(
            model.xs().to_vec(),
            model.values().iter().map(|y| y + 0.3).collect(),
            model.meta.clone(),
        )
        .unwrap();
        assert!(fringe_visibility(&lifted).unwrap().visibility < v);
    }

    #[test]
    fn scan_dataset_validation() {
        assert!(ScanDataset::new(vec![0.0, 1.0], vec![1.0], None).is_err());
        assert!(ScanDataset::new(vec![1.0, 0.0], vec![1.0, 1.0], None).is_err());
        assert!(ScanDataset::new(vec![0.0, 1.0], vec![1.0, -1.0], None).is_err());
        assert!(ScanDataset::new(vec![0.0, 1.0], vec![1.0, 1.0], Some(vec![0.1])).is_err());
        assert!(ScanDataset::new(vec![], vec![], None).is_err());
    }

    fn planted_scan(lambda: f64, xs: Vec<f64>) -> (ExperimentGeometry, BeamState, ScanDataset) {
        let g = ExperimentGeometry::default();
        let beam = BeamState::for_geometry(
            &g,
            &BeamOptions {
                mode: BeamMode::Gaussian,
                ..Default::default()
            },
        )
        .unwrap();
        let slice = DetectorSlice::at_detector(&g).unwrap();
        let amps = slit_amplitudes(&beam, g.particle_mass, slice, &xs).unwrap();
        let model = amps.decohered(lambda, 0.0);
        let peak = model.iter().cloned().fold(0.0, f64::max);
        let counts = model.iter().map(|m| 500.0 * m / peak + 20.0).collect();
        (g, beam, ScanDataset::new(xs, counts, None).unwrap())
    }

    fn detector_positions() -> Vec<f64> {
        (0..101).map(|i| (-250.0 + 5.0 * i as f64) * MICRON).collect()
    }

    #[test]
    fn noiseless_fit_recovers_planted_coherence() {
        for &lambda in &[0.2, 0.63, 0.9] {
            let (g, beam, data) = planted_scan(lambda, detector_positions());
            let deco = DecoherenceModel::direct(1.0).unwrap();
            let fit = fit_coherence_degree(&beam, &deco, &data, &g).unwrap();
            assert!((fit.lambda_hat - lambda).abs() < 1e-3, "{lambda} -> {}", fit.lambda_hat);
            assert!(!fit.at_boundary);
            assert!((fit.background - 20.0).abs() < 0.05, "{}", fit.background);
        }
    }

    #[test]
    fn fully_coherent_data_fits_at_boundary() {
        let (g, beam, data) = planted_scan(1.0, detector_positions());
        let deco = DecoherenceModel::direct(1.0).unwrap();
        let fit = fit_coherence_degree(&beam, &deco, &data, &g).unwrap();
        assert_eq!(fit.lambda_hat, 1.0);
        assert!(fit.at_boundary);
    }

    #[test]
    fn fit_rejects_short_or_narrow_scans() {
        let deco = DecoherenceModel::direct(1.0).unwrap();
        let few: Vec<f64> = (0..9).map(|i| (-200.0 + 50.0 * i as f64) * MICRON).collect();
        let (g, beam, data) = planted_scan(0.5, few);
        assert!(matches!(
            fit_coherence_degree(&beam, &deco, &data, &g),
            Err(Error::Invalid(_))
        ));
        let narrow: Vec<f64> = (0..40).map(|i| (-50.0 + 2.5 * i as f64) * MICRON).collect();
        let (g, beam, data) = planted_scan(0.5, narrow);
        assert!(matches!(
            fit_coherence_degree(&beam, &deco, &data, &g),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn comparison_is_normalization_free() {
        let a = cosine_model();
        let b = a.scaled(2.0).unwrap();
        let c = compare_profiles(&a, &b).unwrap();
        assert!(c.rms < 1e-12);
        assert!(c.visibility_delta.unwrap() < 1e-12);
        let far = profile(Grid::new(1e-3, 2e-3, 100).unwrap(), |_| 1.0);
        assert!(compare_profiles(&a, &far).is_err());
    }
}
