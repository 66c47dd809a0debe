use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use impa_core::ac::band_report;
use impa_core::export::{read_flux_csv, read_response_csv};
use impa_core::{Element, Netlist};
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_impa-synth");

fn reference_spec() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/reference_spec.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("IMPA_SYNTH_TABLE")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn write_spec(dir: &Path, edit: impl FnOnce(String) -> String) -> PathBuf {
    let text = edit(fs::read_to_string(reference_spec()).unwrap());
    let path = dir.join("spec.json");
    fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn design_writes_netlist_and_report() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("out");
    let o = run(&["design", "--spec", s(&reference_spec()), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let netlist = Netlist::from_json(&fs::read_to_string(out.join("netlist.json")).unwrap()).unwrap();
    let c12 = netlist
        .elements()
        .iter()
        .find_map(|e| match e {
            Element::SeriesCapacitor { c } => Some(*c),
            _ => None,
        })
        .unwrap();
    assert!((c12 - 0.75e-12).abs() / 0.75e-12 < 0.10, "{c12}");

    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    assert!(report.contains("coupling capacitor C12"));
    assert!(report.contains("calibrated R"));
    assert!(report.contains("GHz"));
    assert!(report.contains("Warnings"));

    let again = dir.path().join("again");
    assert_eq!(
        code(&run(&[
            "design",
            "--spec",
            s(&reference_spec()),
            "--out",
            s(&again)
        ])),
        0
    );
    assert_eq!(
        fs::read(out.join("report.txt")).unwrap(),
        fs::read(again.join("report.txt")).unwrap()
    );
    assert_eq!(
        fs::read(out.join("netlist.json")).unwrap(),
        fs::read(again.join("netlist.json")).unwrap()
    );
}

#[test]
fn zero_bandwidth_is_a_computation_error() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), |t| t.replace("0.07692307692307693", "0.0"));
    let o = run(&["design", "--spec", s(&spec), "--out", s(&dir.path().join("o"))]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("synthesis"));
}

#[test]
fn malformed_and_invalid_specs_exit_2() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("o");
    let broken = write_spec(dir.path(), |t| t.replace('}', ""));
    assert_eq!(code(&run(&["design", "--spec", s(&broken), "--out", s(&out)])), 2);

    let bad_alpha = write_spec(dir.path(), |t| t.replace("\"alpha\": 0.25", "\"alpha\": 0.5"));
    let o = run(&["design", "--spec", s(&bad_alpha), "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("snail"));

    let missing = dir.path().join("nope.json");
    assert_eq!(
        code(&run(&["design", "--spec", s(&missing), "--out", s(&out)])),
        2
    );
    assert_eq!(code(&run(&["design", "--out", s(&out)])), 2);
}

#[test]
fn gain_band_and_thresholds() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let spec = reference_spec();
    let o = run(&["calibrate", "--spec", s(&spec), "--out", s(out)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let calibrated = out.join("calibrated_netlist.json");

    let o = run(&[
        "gain",
        "--netlist",
        s(&calibrated),
        "--spec",
        s(&spec),
        "--out",
        s(out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let resp = read_response_csv(fs::File::open(out.join("gain.csv")).unwrap()).unwrap();
    assert_eq!(resp.len(), 2001);
    let band = band_report(&resp, 15.0).unwrap();
    assert!(band.bandwidth >= 0.07 * 6.5e9);
    assert!(out.join("band_report.txt").exists());

    let o = run(&[
        "gain",
        "--netlist",
        s(&calibrated),
        "--spec",
        s(&spec),
        "--out",
        s(out),
        "--threshold-db",
        "40",
    ]);
    assert_eq!(code(&o), 4);

    let o = run(&[
        "gain",
        "--netlist",
        s(&calibrated),
        "--out",
        s(out),
        "--grid",
        "6e9,7e9,2",
    ]);
    let csv = fs::read_to_string(out.join("gain.csv")).unwrap();
    assert!(matches!(code(&o), 0 | 4));
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("freq_hz,re_gamma,im_gamma,gain_db\n"));
    assert_eq!(read_response_csv(csv.as_bytes()).unwrap().len(), 2);

    assert_eq!(
        code(&run(&["gain", "--netlist", s(&calibrated), "--out", s(out)])),
        2
    );
    assert_eq!(
        code(&run(&[
            "gain",
            "--netlist",
            s(&calibrated),
            "--out",
            s(out),
            "--grid",
            "7e9,6e9,5"
        ])),
        2
    );
}

#[test]
fn gain_from_spec_calibrates_on_the_fly() {
    let dir = TempDir::new().unwrap();
    let o = run(&["gain", "--spec", s(&reference_spec()), "--out", s(dir.path())]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(dir.path().join("band_report.txt")).unwrap();
    assert!(text.contains("bandwidth"));
}

#[test]
fn calibrate_reports_unreachable_target() {
    let dir = TempDir::new().unwrap();
    let o = run(&[
        "calibrate",
        "--spec",
        s(&reference_spec()),
        "--out",
        s(dir.path()),
        "--target-db",
        "200",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("achievable"));
}

#[test]
fn calibrate_with_explicit_band() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    assert_eq!(
        code(&run(&["design", "--spec", s(&reference_spec()), "--out", s(out)])),
        0
    );
    let o = run(&[
        "calibrate",
        "--netlist",
        s(&out.join("netlist.json")),
        "--band",
        "6.3e9,6.7e9",
        "--out",
        s(out),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let n = Netlist::from_json(&fs::read_to_string(out.join("calibrated_netlist.json")).unwrap()).unwrap();
    let r = n.final_node_resistor().map(|i| n.elements()[i]).unwrap();
    assert!(matches!(r, Element::ShuntResistor { r } if r < 0.0));
    assert!(fs::read_to_string(out.join("calibration.txt"))
        .unwrap()
        .contains("achieved min gain"));
}

#[test]
fn flux_sweep_curves() {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let o = run(&[
        "flux-sweep",
        "--spec",
        s(&reference_spec()),
        "--out",
        s(out),
        "--grid",
        "0,0.5,51",
    ]);
    assert_eq!(code(&o), 0);
    let curve = read_flux_csv(fs::File::open(out.join("flux_sweep.csv")).unwrap()).unwrap();
    assert_eq!(curve.len(), 51);
    assert_eq!(curve[0].0, 0.0);
    assert!((curve[0].1 - 8.39e9).abs() < 0.01e9);
    let f_max = curve.iter().map(|p| p.1).fold(0.0, f64::max);
    assert_eq!(f_max, curve[0].1);

    let o = run(&[
        "flux-sweep",
        "--spec",
        s(&reference_spec()),
        "--out",
        s(out),
        "--grid",
        "0.2,0.2,1",
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(
        read_flux_csv(fs::File::open(out.join("flux_sweep.csv")).unwrap())
            .unwrap()
            .len(),
        1
    );

    let o = run(&[
        "flux-sweep",
        "--spec",
        s(&reference_spec()),
        "--out",
        s(out),
        "--alpha-sweep",
        "0.1,0.2,0.25,0.3",
    ]);
    assert_eq!(code(&o), 0);
    let summary = fs::read_to_string(out.join("flux_summary.txt")).unwrap();
    assert!(
        summary.contains("strictly increasing with alpha: yes"),
        "{summary}"
    );
    assert!(out.join("flux_sweep_alpha_0.3.csv").exists());

    let o = run(&[
        "flux-sweep",
        "--spec",
        s(&reference_spec()),
        "--out",
        s(out),
        "--grid",
        "0,2,11",
    ]);
    assert_eq!(code(&o), 3);
}

#[test]
fn flux_sweep_names_failing_bias() {
    let dir = TempDir::new().unwrap();
    let spec = write_spec(dir.path(), |t| {
        t.replace("\"alpha\": 0.25", "\"alpha\": 0.3333333333333333")
    });
    let o = run(&[
        "flux-sweep",
        "--spec",
        s(&spec),
        "--out",
        s(dir.path()),
        "--grid",
        "0.4,0.5,3",
    ]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("0.5"));
}

#[test]
fn user_prototype_table() {
    let dir = TempDir::new().unwrap();
    let table = dir.path().join("table.json");
    fs::write(
        &table,
        r#"[{"order": 2, "g_min_db": 15, "ripple_db": 0.5, "g": [0.55, 0.26, 1.3]}]"#,
    )
    .unwrap();
    let spec = write_spec(dir.path(), |t| t.replace("\"g_min_db\": 20", "\"g_min_db\": 15"));
    let out = dir.path().join("o");
    let without = run(&["design", "--spec", s(&spec), "--out", s(&out)]);
    assert_eq!(code(&without), 2);

    let with = Command::new(BIN)
        .args(["design", "--spec", s(&spec), "--out", s(&out)])
        .env("IMPA_SYNTH_TABLE", &table)
        .output()
        .unwrap();
    assert_eq!(code(&with), 0, "{}", String::from_utf8_lossy(&with.stderr));
    assert!(fs::read_to_string(out.join("report.txt"))
        .unwrap()
        .contains("g = 0.55, 0.26, 1.3"));

    fs::write(&table, "not json").unwrap();
    let bad = Command::new(BIN)
        .args(["design", "--spec", s(&spec), "--out", s(&out)])
        .env("IMPA_SYNTH_TABLE", &table)
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
