//! The `fringelab` command line.
//!
//! Every subcommand prints `key=value` lines (or a small CSV table for
//! `sweep`) on stdout with numbers at six significant digits. Errors go to
//! stderr; the exit code is 0 on success, 2 for invalid input and 3 for
//! numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    compare_profiles, fit_coherence_degree, fringe_spacing, fringe_visibility, quantum_visibility, ScanDataset,
};
use crate::config::{parse_config, ModelChoice, RunConfig};
use crate::csvio::{is_profile_csv, read_profile_csv, read_scan_csv, write_profile_csv};
use crate::geometry::MICRON;
use crate::optics::OpticalModelKind;
use crate::profile::{Grid, IntensityProfile, ProfileMeta};
use crate::quantum::{
    intensity_coherent, intensity_decohered, tau_c_from_lambda, BeamMode, BeamState, DecoherenceModel, DetectorSlice,
};
use crate::{Error, Result};

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "FRINGELAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "fringelab", version, about = "Double-slit cold-neutron interference models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (key = value with units).
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Detector grid in µm, e.g. -500:500:4001.
    #[arg(long, value_name = "MIN:MAX:N", allow_hyphen_values = true)]
    grid: Option<String>,
    /// Where to write the profile CSV.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct BeamArgs {
    /// Slit-wave representation: gaussian or quasi-plane.
    #[arg(long, value_name = "NAME")]
    mode: Option<String>,
    /// Drop the transverse ∓ħ/a kicks.
    #[arg(long)]
    no_kicks: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical-optics profile (delta, delta-avg, finite, finite-avg).
    SimulateOptical {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_name = "NAME")]
        model: Option<String>,
    },
    /// Gaussian wave-packet profile with optional decoherence.
    SimulateQuantum {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        beam: BeamArgs,
        /// Coherence degree Λ in [0, 1].
        #[arg(long, value_name = "X", conflicts_with = "tau_c")]
        lambda: Option<f64>,
        /// Coherence time in seconds.
        #[arg(long = "tau-c", value_name = "X")]
        tau_c: Option<f64>,
    },
    /// Visibility and fringe spacing of a profile or scan CSV.
    Visibility {
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Fit the coherence degree to a scan CSV.
    Fit {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        beam: BeamArgs,
        #[arg(long, value_name = "PATH")]
        data: PathBuf,
    },
    /// Tabulate the quantum visibility over a range of Λ or τ_c.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        beam: BeamArgs,
        /// Λ range START:STOP:STEP.
        #[arg(long, value_name = "START:STOP:STEP")]
        lambda: Option<String>,
        /// `lambda=START:STOP:STEP` or `tau-c=START:STOP:STEP` (seconds).
        #[arg(long, value_name = "SPEC")]
        sweep: Option<String>,
    },
    /// Compare two profile CSVs after unit-mean normalization.
    Compare { first: PathBuf, second: PathBuf },
}

/// Formats to six significant digits.
pub fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&exponent) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exponent).max(0) as usize;
    let text = format!("{x:.decimals$}");
    // rounding can carry into a new digit (9.999995 -> 10.00000)
    if text
        .trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > 6
        && decimals > 0
    {
        let decimals = decimals - 1;
        return format!("{x:.decimals$}");
    }
    text
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    configure_threads(stderr);
    match run(cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

fn configure_threads(stderr: &mut dyn Write) {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return;
    };
    match value.trim().parse::<usize>() {
        Ok(n) if n > 0 => {
            // fails harmlessly if the pool already exists (repeated in-process runs)
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        _ => {
            let _ = writeln!(stderr, "warning: ignoring {THREADS_ENV}={value}");
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(path) => parse_config(&read_text(path)?)?,
        None => RunConfig::default(),
    };
    if let Some(spec) = &common.grid {
        cfg.grid = parse_grid(spec)?;
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn parse_grid(spec: &str) -> Result<Grid> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::invalid(format!("grid '{spec}' is not MIN:MAX:N (µm)"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    Grid::new(lo * MICRON, hi * MICRON, n)
}

/// Values `start, start + step, ...` up to `stop`.
fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::invalid(format!("range '{spec}' is not START:STOP:STEP"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, stop, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && stop >= start && start.is_finite() && stop.is_finite()) {
        return Err(bad());
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::invalid(format!("range '{spec}' has too many points")));
    }
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn beam_mode(beam: &BeamArgs, cfg: &RunConfig) -> Result<BeamMode> {
    match (&beam.mode, cfg.model) {
        (Some(name), _) => name.parse(),
        (None, ModelChoice::Quantum(mode)) => Ok(mode),
        (None, _) => Ok(BeamMode::default()),
    }
}

fn beam_state(beam: &BeamArgs, cfg: &mut RunConfig) -> Result<(BeamMode, BeamState)> {
    if beam.no_kicks {
        cfg.kicks = false;
    }
    let mode = beam_mode(beam, cfg)?;
    let state = BeamState::for_geometry(&cfg.geometry, &cfg.beam_options(mode))?;
    Ok((mode, state))
}

fn kv(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> Result<()> {
    writeln!(out, "{key}={value}")?;
    Ok(())
}

fn emit_profile(
    profile: &IntensityProfile,
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<()> {
    match &cfg.out {
        Some(path) => {
            std::fs::write(path, write_profile_csv(profile))?;
            kv(stdout, "out", path.display())
        }
        None => {
            writeln!(stderr, "note: no --out given, profile not written")?;
            Ok(())
        }
    }
}

fn spacing_text(profile: &IntensityProfile) -> Result<String> {
    match fringe_spacing(profile) {
        Ok(s) => Ok(sig6(s / MICRON)),
        Err(Error::NoFlankingMinima) => Ok("nan".into()),
        Err(e) => Err(e),
    }
}

fn run(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::SimulateOptical { common, model } => {
            let cfg = load_config(&common)?;
            let kind: OpticalModelKind = match (&model, cfg.model) {
                (Some(name), _) => name.parse()?,
                (None, ModelChoice::Optical(kind)) => kind,
                (None, ModelChoice::Quantum(_)) => {
                    return Err(Error::invalid(
                        "config selects a quantum model; use simulate-quantum or --model",
                    ))
                }
            };
            let profile = cfg.optical_setup()?.profile(kind, &cfg.grid)?;
            let vis = fringe_visibility(&profile)?;
            kv(stdout, "model", kind.tag())?;
            kv(stdout, "points", profile.len())?;
            kv(stdout, "fringe_spacing_um", spacing_text(&profile)?)?;
            kv(stdout, "visibility", sig6(vis.visibility))?;
            emit_profile(&profile, &cfg, stdout, stderr)
        }
        Command::SimulateQuantum {
            common,
            beam,
            lambda,
            tau_c,
        } => {
            let mut cfg = load_config(&common)?;
            let (mode, state) = beam_state(&beam, &mut cfg)?;
            let env_phase = cfg.deco.map(|d| d.env_phase).unwrap_or(0.0);
            let deco = match (lambda, tau_c) {
                (Some(l), _) => Some(DecoherenceModel::direct(l)?.with_env_phase(env_phase)),
                (None, Some(t)) => Some(DecoherenceModel::from_coherence_time(t)?.with_env_phase(env_phase)),
                (None, None) => cfg.deco,
            };
            let geom = cfg.geometry;
            let slice = DetectorSlice::at_detector(&geom)?;
            let xs = cfg.grid.points();
            let mut profile = match &deco {
                Some(d) => intensity_decohered(&state, d, geom.particle_mass, slice, &xs)?,
                None => intensity_coherent(&state, geom.particle_mass, slice, &xs)?,
            };
            profile.meta = ProfileMeta {
                model: mode.tag().to_string(),
                params: profile.meta.params.clone(),
            };
            let coherent = DecoherenceModel::direct(1.0)?;
            let vis = quantum_visibility(&state, deco.as_ref().unwrap_or(&coherent), &geom, &xs)?;
            kv(stdout, "model", mode.tag())?;
            kv(stdout, "points", profile.len())?;
            kv(
                stdout,
                "coherence",
                sig6(deco.map_or(Ok(1.0), |d| d.coherence_degree(slice.t))?),
            )?;
            kv(stdout, "fringe_spacing_um", spacing_text(&profile)?)?;
            kv(stdout, "visibility", sig6(vis))?;
            emit_profile(&profile, &cfg, stdout, stderr)
        }
        Command::Visibility { data } => {
            let text = read_text(&data)?;
            let profile = if is_profile_csv(&text) {
                read_profile_csv(&text)?
            } else {
                let scan = read_scan_csv(&text)?;
                IntensityProfile::new(scan.positions, scan.counts, ProfileMeta::new("scan"))?
            };
            let vis = fringe_visibility(&profile)?;
            kv(stdout, "visibility", sig6(vis.visibility))?;
            kv(stdout, "x_max_um", sig6(vis.x_max / MICRON))?;
            kv(stdout, "i_max", sig6(vis.i_max))?;
            kv(stdout, "x_min_left_um", sig6(vis.x_min_left / MICRON))?;
            kv(stdout, "x_min_right_um", sig6(vis.x_min_right / MICRON))?;
            kv(stdout, "i_min", sig6(0.5 * (vis.i_min_left + vis.i_min_right)))?;
            kv(stdout, "fringe_spacing_um", spacing_text(&profile)?)
        }
        Command::Fit { common, beam, data } => {
            let mut cfg = load_config(&common)?;
            let (mode, state) = beam_state(&beam, &mut cfg)?;
            let scan: ScanDataset = read_scan_csv(&read_text(&data)?)?;
            let template = cfg.deco.unwrap_or(DecoherenceModel::direct(1.0)?);
            let geom = cfg.geometry;
            let fit = fit_coherence_degree(&state, &template, &scan, &geom)?;
            let slice = DetectorSlice::at_detector(&geom)?;
            kv(stdout, "model", mode.tag())?;
            kv(stdout, "points", scan.len())?;
            kv(stdout, "lambda_hat", sig6(fit.lambda_hat))?;
            kv(stdout, "scale", sig6(fit.scale))?;
            kv(stdout, "background", sig6(fit.background))?;
            kv(stdout, "rms", sig6(fit.rms))?;
            kv(stdout, "at_boundary", fit.at_boundary)?;
            if fit.lambda_hat > 0.0 && fit.lambda_hat < 1.0 {
                kv(stdout, "tau_c_s", sig6(tau_c_from_lambda(fit.lambda_hat, slice.t)?))?;
            }
            if cfg.out.is_some() {
                let model = template.with_lambda(fit.lambda_hat)?;
                let xs = cfg.grid.points();
                let raw = intensity_decohered(&state, &model, geom.particle_mass, slice, &xs)?;
                let counts = raw.values().iter().map(|v| fit.scale * v + fit.background).collect();
                let meta = ProfileMeta::new(mode.tag())
                    .with("lambda_hat", fit.lambda_hat)
                    .with("scale", fit.scale)
                    .with("background", fit.background);
                emit_profile(&IntensityProfile::new(xs, counts, meta)?, &cfg, stdout, stderr)?;
            }
            Ok(())
        }
        Command::Sweep {
            common,
            beam,
            lambda,
            sweep,
        } => {
            let mut cfg = load_config(&common)?;
            let (_, state) = beam_state(&beam, &mut cfg)?;
            let env_phase = cfg.deco.map(|d| d.env_phase).unwrap_or(0.0);
            let (is_tau, values) = match (&lambda, &sweep) {
                (Some(range), None) => (false, parse_range(range)?),
                (None, Some(spec)) => match spec.split_once('=') {
                    Some(("lambda", range)) => (false, parse_range(range)?),
                    Some(("tau-c" | "tau_c", range)) => (true, parse_range(range)?),
                    _ => return Err(Error::invalid(format!("sweep '{spec}' is not lambda=.. or tau-c=.."))),
                },
                (None, None) => (false, parse_range("0:1:0.1")?),
                (Some(_), Some(_)) => return Err(Error::invalid("give either --lambda or --sweep")),
            };
            let geom = cfg.geometry;
            let slice = DetectorSlice::at_detector(&geom)?;
            let xs = cfg.grid.points();
            if is_tau {
                writeln!(stdout, "tau_c_s,lambda,visibility")?;
            } else {
                writeln!(stdout, "lambda,visibility")?;
            }
            for value in values {
                let deco = if is_tau {
                    DecoherenceModel::from_coherence_time(value)?
                } else {
                    DecoherenceModel::direct(value)?
                }
                .with_env_phase(env_phase);
                let vis = quantum_visibility(&state, &deco, &geom, &xs)?;
                if is_tau {
                    let l = deco.coherence_degree(slice.t)?;
                    writeln!(stdout, "{},{},{}", sig6(value), sig6(l), sig6(vis))?;
                } else {
                    writeln!(stdout, "{},{}", sig6(value), sig6(vis))?;
                }
            }
            Ok(())
        }
        Command::Compare { first, second } => {
            let a = read_profile_csv(&read_text(&first)?)?;
            let b = read_profile_csv(&read_text(&second)?)?;
            let c = compare_profiles(&a, &b)?;
            kv(stdout, "rms", sig6(c.rms))?;
            kv(stdout, "max_abs", sig6(c.max_abs))?;
            match c.visibility_delta {
                Some(d) => kv(stdout, "visibility_delta", sig6(d)),
                None => kv(stdout, "visibility_delta", "nan"),
            }
        }
    }
}
