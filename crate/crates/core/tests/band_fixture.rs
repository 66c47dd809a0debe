use std::fs::File;

use impa_core::ac::{band_report, AcError};
use impa_core::export::read_response_csv;

const STEP: f64 = 25e6;

fn fixture() -> impa_core::ac::FrequencyResponse {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/two_peak_profile.csv");
    read_response_csv(File::open(path).unwrap()).unwrap()
}

#[test]
fn widest_run_edges_match_reference_crossings() {
    let resp = fixture();
    // crossings located by root finding on the continuous response
    for (threshold, lo, hi) in [
        (16.0, 6_160_307_895.7, 6_445_252_778.4),
        (15.2, 6_139_341_144.7, 6_544_061_588.1),
    ] {
        let b = band_report(&resp, threshold).unwrap();
        assert!((b.f_low - lo).abs() < STEP, "{threshold}: {} vs {lo}", b.f_low);
        assert!((b.f_high - hi).abs() < STEP, "{threshold}: {} vs {hi}", b.f_high);
        assert!((b.bandwidth - (b.f_high - b.f_low)).abs() < 1e-3);
        assert!(b.min_gain_db >= threshold);
        assert!(b.ripple_db >= 0.0);
    }
}

#[test]
fn fixture_shows_two_peaks() {
    let resp = fixture();
    let b = band_report(&resp, 15.0).unwrap();
    let peaks = resp.local_maxima_within(b.f_low, b.f_high);
    assert_eq!(peaks.len(), 2, "{peaks:?}");
    assert!((b.max_gain_db - 18.1).abs() < 0.05);
    assert!(matches!(band_report(&resp, 25.0), Err(AcError::EmptyBand { .. })));
}
