use std::path::Path;
use std::process::{Command, Output};

fn fringelab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fringelab"))
        .args(args)
        .env("FRINGELAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .parse()
        .unwrap()
}

#[test]
fn optical_simulation_writes_a_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("finite.csv");
    let out = fringelab(&[
        "simulate-optical",
        "--model",
        "finite-avg",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!((value(&text, "visibility") - 0.760).abs() <= 0.01);
    assert!((value(&text, "fringe_spacing_um") - 73.0).abs() <= 1.5);
    // thin shell: the printed number is the library result at six digits
    let setup = fringelab::optics::OpticalSetup::new(&fringelab::ExperimentGeometry::default()).unwrap();
    let profile = setup
        .profile(fringelab::optics::OpticalModelKind::FiniteAveraged, &Default::default())
        .unwrap();
    let library = fringelab::analysis::fringe_visibility(&profile).unwrap().visibility;
    assert!(text.contains(&format!("visibility={}\n", fringelab::cli::sig6(library))));

    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.starts_with("# model: optical-finite-avg"));
    assert_eq!(written.lines().filter(|l| !l.starts_with('#')).count(), 4002);

    // same inputs, byte-identical file
    let again = dir.path().join("again.csv");
    assert!(fringelab(&[
        "simulate-optical",
        "--model",
        "finite-avg",
        "--out",
        again.to_str().unwrap()
    ])
    .status
    .success());
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());

    let vis = fringelab(&["visibility", "--data", path.to_str().unwrap()]);
    assert!(vis.status.success());
    assert_eq!(value(&stdout(&vis), "visibility"), value(&text, "visibility"));

    let cmp = fringelab(&["compare", path.to_str().unwrap(), again.to_str().unwrap()]);
    assert_eq!(value(&stdout(&cmp), "rms"), 0.0);
}

#[test]
fn quantum_simulation_with_decoherence() {
    let out = fringelab(&["simulate-quantum", "--mode", "gaussian", "--lambda", "0.63"]);
    assert!(out.status.success(), "{out:?}");
    assert!((value(&stdout(&out), "visibility") - 0.607).abs() <= 0.01);

    let out = fringelab(&[
        "simulate-quantum",
        "--mode",
        "gaussian",
        "--lambda",
        "0.5",
        "--tau-c",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_is_monotone() {
    let out = fringelab(&["sweep", "--lambda", "0:1:0.25"]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1].1 > w[0].1), "{text}");

    let tau = fringelab(&["sweep", "--sweep", "tau-c=0.01:0.05:0.02"]);
    assert!(tau.status.success());
    assert_eq!(stdout(&tau).lines().count(), 4);
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn fit_reports_key_value_lines() {
    let dir = tempfile::tempdir().unwrap();
    // scan synthesised from the library model at Λ = 0.7
    let g = fringelab::ExperimentGeometry::default();
    let beam = fringelab::quantum::BeamState::for_geometry(&g, &Default::default()).unwrap();
    let slice = fringelab::quantum::DetectorSlice::at_detector(&g).unwrap();
    let xs: Vec<f64> = (0..81).map(|i| (-200.0 + 5.0 * i as f64) * 1e-6).collect();
    let amps = fringelab::quantum::slit_amplitudes(&beam, g.particle_mass, slice, &xs).unwrap();
    let model = amps.decohered(0.7, 0.0);
    let peak = model.iter().copied().fold(0.0, f64::max);
    let mut csv = String::from("# synthetic\nx_um,counts\n");
    for (x, m) in xs.iter().zip(&model) {
        csv.push_str(&format!("{},{:.9}\n", x * 1e6, 800.0 * m / peak + 30.0));
    }
    let data = write(dir.path(), "scan.csv", &csv);
    let out = fringelab(&["fit", "--data", &data]);
    assert!(out.status.success(), "{out:?}");
    let text = stdout(&out);
    assert!((value(&text, "lambda_hat") - 0.7).abs() < 1e-3, "{text}");
    assert!((value(&text, "background") - 30.0).abs() < 0.5);
    assert!(text.contains("at_boundary=false"));
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "a1 = -3um\n");
    let out = fringelab(&["simulate-optical", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let unsorted = write(dir.path(), "u.csv", "x_um,counts\n0,1\n10,2\n5,3\n");
    let out = fringelab(&["fit", "--data", &unsorted]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    assert_eq!(
        fringelab(&["simulate-optical", "--grid", "5:1:100"]).status.code(),
        Some(2)
    );
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("x_um,counts\n");
    for i in 0..40 {
        csv.push_str(&format!("{},{}\n", i * 10, 500 - i));
    }
    let data = write(dir.path(), "mono.csv", &csv);
    let out = fringelab(&["visibility", "--data", &data]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_drives_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("q.csv");
    let cfg = write(
        dir.path(),
        "run.cfg",
        &format!(
            "# quantum run\nmodel = quantum-gaussian\ncoherence = 0.63\nx_min = -300 um\nx_max = 300 um\nn = 1201\nout = {}\n",
            out_path.display()
        ),
    );
    let out = fringelab(&["simulate-quantum", "--config", &cfg]);
    assert!(out.status.success(), "{out:?}");
    assert_eq!(value(&stdout(&out), "points"), 1201.0);
    assert!((value(&stdout(&out), "coherence") - 0.63).abs() < 1e-12);
    assert!(out_path.exists());
}
