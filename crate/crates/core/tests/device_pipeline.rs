mod common;

use common::{gamma, nodal_input_impedance};
use impa_core::ac::{
    band_report, calibrate_negative_resistance, min_gain_in_band, oscillation_threshold, sweep, sweep_grid,
    AcError, CalibrationBand,
};
use impa_core::chebyshev::prototype_lookup;
use impa_core::snail::SnailParams;
use impa_core::synthesis::{band_edges_from_w, synthesize, DesignSpec};
use impa_core::Netlist;

const F0: f64 = 6.5e9;
const W: f64 = 0.5 / 6.5;

fn spec() -> DesignSpec {
    DesignSpec {
        f0: F0,
        w: W,
        prototype: prototype_lookup(2, 20.0, 0.5).unwrap(),
        z_port: 50.0,
        snail: SnailParams::new(40e-12, 0.25, 3).unwrap(),
        bias: None,
        c1_shunt: 5.25e-12,
        z2: 12.7,
    }
}

fn device_grid() -> Vec<f64> {
    sweep_grid(F0 * (1.0 - 1.5 * W), F0 * (1.0 + 1.5 * W), 2001).unwrap()
}

fn band() -> CalibrationBand {
    let (f1, f2) = band_edges_from_w(F0, W);
    CalibrationBand::on_grid(&device_grid(), f1, f2).unwrap()
}

fn netlist() -> Netlist {
    synthesize(&spec()).unwrap()
}

#[test]
fn calibrated_profile_has_two_ripple_peaks() {
    let cal = calibrate_negative_resistance(&netlist(), F0, 15.0, &band()).unwrap();
    println!("R = {} ohm, threshold {} ohm", cal.r, cal.threshold_r);
    assert!(cal.r < 0.0 && cal.r < cal.threshold_r);
    assert!(cal.achieved_min_gain_db >= 15.0 && cal.achieved_min_gain_db - 15.0 < 1e-6);

    let resp = sweep(&cal.netlist, F0 * (1.0 - 1.5 * W), F0 * (1.0 + 1.5 * W), 2001).unwrap();
    assert!(resp.poles().is_empty());
    let (f1, f2) = band_edges_from_w(F0, W);
    let min = resp.min_gain_within(f1, f2).unwrap();
    assert!((min - 15.0).abs() < 0.05, "{min}");

    let report = band_report(&resp, 15.0).unwrap();
    println!("{report:?}");
    assert!(report.bandwidth >= 0.07 * F0);
    assert_eq!(resp.local_maxima_within(report.f_low, report.f_high).len(), 2);

    // every point agrees with the nodal solve
    for (f, g) in resp.freqs().iter().zip(resp.gamma()).step_by(20) {
        let expected = gamma(nodal_input_impedance(cal.netlist.elements(), *f).unwrap(), 50.0);
        assert!((g - expected).norm() <= 1e-9 * expected.norm());
    }
}

#[test]
fn min_gain_rises_as_resistance_weakens_towards_peak() {
    let n = netlist();
    let b = band();
    let threshold = oscillation_threshold(&n, F0).unwrap().unwrap();
    let cal = calibrate_negative_resistance(&n, F0, 15.0, &b).unwrap();
    let peak_gain = cal.max_min_gain_db;
    // locate the peak magnitude on the same log grid the calibration uses
    let start: f64 = 1e4;
    let stop = -threshold * 1.001;
    let samples: Vec<f64> = (0..20)
        .map(|i| start * (stop / start).powf(i as f64 / 19.0))
        .collect();
    let gains: Vec<f64> = samples
        .iter()
        .map(|m| min_gain_in_band(&n, &b, -m).unwrap())
        .collect();
    let peak_at = gains
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap()
        .0;
    for pair in gains[..=peak_at].windows(2) {
        assert!(pair[1] >= pair[0] - 1e-12, "{gains:?}");
    }
    assert!(gains[peak_at] <= peak_gain + 1e-6);
}

#[test]
fn unreachable_target_reports_maximum() {
    match calibrate_negative_resistance(&netlist(), F0, 200.0, &band()) {
        Err(AcError::Unreachable {
            target_db,
            achievable_db,
        }) => {
            assert_eq!(target_db, 200.0);
            assert!(achievable_db > 15.0 && achievable_db < 200.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn higher_threshold_gives_empty_band() {
    let cal = calibrate_negative_resistance(&netlist(), F0, 15.0, &band()).unwrap();
    let resp = sweep(&cal.netlist, F0 * (1.0 - 1.5 * W), F0 * (1.0 + 1.5 * W), 2001).unwrap();
    assert!(matches!(band_report(&resp, 40.0), Err(AcError::EmptyBand { .. })));
}
