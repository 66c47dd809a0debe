//! Frequency-domain analysis of ladder netlists seen from the port.

mod abcd;
mod calibrate;
mod response;

use thiserror::Error;

pub use abcd::{abcd_of_element, cascade, input_impedance, reflection, InputImpedance, TwoPortAbcd};
pub use calibrate::{
    calibrate_negative_resistance, is_stable, min_gain_in_band, natural_frequencies, oscillation_threshold,
    Calibration, CalibrationBand,
};
pub use response::{band_report, sweep, sweep_frequencies, sweep_grid, BandReport, FrequencyResponse};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AcError {
    #[error("frequency must be positive and finite, got {0} Hz")]
    InvalidFrequency(f64),
    #[error("{0} has a zero value and no finite two-port matrix")]
    SingularElement(&'static str),
    #[error("port termination is not a two-port element")]
    NotTwoPort,
    #[error("reflection pole (Z_in = -Z0, oscillation){}", freq_suffix(*.freq_hz))]
    Pole { freq_hz: Option<f64> },
    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),
    #[error("no frequency reaches {threshold_db} dB")]
    EmptyBand { threshold_db: f64 },
    #[error("netlist needs exactly one shunt resistor on the final node to calibrate")]
    NoPlaceholder,
    #[error(
        "target {target_db} dB is unreachable before oscillation; achievable maximum {achievable_db:.4} dB"
    )]
    Unreachable { target_db: f64, achievable_db: f64 },
    #[error("calibration failed: {0}")]
    Calibration(String),
}

fn freq_suffix(freq: Option<f64>) -> String {
    freq.map(|f| format!(" at {f} Hz")).unwrap_or_default()
}

pub type Result<T> = std::result::Result<T, AcError>;
