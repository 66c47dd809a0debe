use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::abcd::{input_impedance, reflection};
use super::{AcError, Result};
use crate::netlist::Netlist;

/// Reflection response over a strictly increasing frequency grid.
///
/// Pole points (oscillation, `Z_in = -Z0`) carry `gamma = inf` and
/// `gain_db = +inf` and are listed in `poles`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    freqs: Vec<f64>,
    gamma: Vec<Complex64>,
    gain_db: Vec<f64>,
    poles: Vec<usize>,
}

fn gain_of(gamma: Complex64) -> f64 {
    20.0 * gamma.norm().log10()
}

impl FrequencyResponse {
    /// Builds a response from per-point reflection values; `None` marks a
    /// pole.
    pub fn new(freqs: Vec<f64>, gamma: Vec<Option<Complex64>>) -> Result<Self> {
        if freqs.is_empty() {
            return Err(AcError::InvalidGrid("empty frequency grid".into()));
        }
        if freqs.len() != gamma.len() {
            return Err(AcError::InvalidGrid(format!(
                "{} frequencies but {} reflection values",
                freqs.len(),
                gamma.len()
            )));
        }
        if freqs.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(AcError::InvalidGrid(
                "frequencies must be strictly increasing".into(),
            ));
        }
        let mut poles = Vec::new();
        let mut gains = Vec::with_capacity(gamma.len());
        let mut values = Vec::with_capacity(gamma.len());
        for (i, g) in gamma.into_iter().enumerate() {
            match g {
                Some(g) => {
                    gains.push(gain_of(g));
                    values.push(g);
                }
                None => {
                    poles.push(i);
                    gains.push(f64::INFINITY);
                    values.push(Complex64::new(f64::INFINITY, 0.0));
                }
            }
        }
        Ok(Self {
            freqs,
            gamma: values,
            gain_db: gains,
            poles,
        })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn gamma(&self) -> &[Complex64] {
        &self.gamma
    }

    pub fn gain_db(&self) -> &[f64] {
        &self.gain_db
    }

    pub fn poles(&self) -> &[usize] {
        &self.poles
    }

    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn is_pole(&self, i: usize) -> bool {
        self.poles.binary_search(&i).is_ok()
    }

    /// Smallest gain among grid points inside `[f_low, f_high]`.
    pub fn min_gain_within(&self, f_low: f64, f_high: f64) -> Option<f64> {
        self.indices_within(f_low, f_high)
            .map(|i| self.gain_db[i])
            .min_by(f64::total_cmp)
    }

    /// Frequencies of strict local maxima of the gain inside `[f_low, f_high]`.
    pub fn local_maxima_within(&self, f_low: f64, f_high: f64) -> Vec<f64> {
        let g = &self.gain_db;
        (1..self.len().saturating_sub(1))
            .filter(|&i| self.freqs[i] >= f_low && self.freqs[i] <= f_high)
            .filter(|&i| !self.is_pole(i) && g[i] > g[i - 1] && g[i] >= g[i + 1])
            .map(|i| self.freqs[i])
            .collect()
    }

    fn indices_within(&self, f_low: f64, f_high: f64) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.freqs[i] >= f_low && self.freqs[i] <= f_high)
    }
}

/// Reflection response on an explicit grid.
pub fn sweep_frequencies(netlist: &Netlist, freqs: Vec<f64>) -> Result<FrequencyResponse> {
    let z0 = netlist.z0();
    let gamma = freqs
        .iter()
        .map(|&f| match reflection(input_impedance(netlist, f)?, z0) {
            Ok(g) => Ok(Some(g)),
            Err(AcError::Pole { .. }) => Ok(None),
            Err(e) => Err(e),
        })
        .collect::<Result<Vec<_>>>()?;
    FrequencyResponse::new(freqs, gamma)
}

/// Uniform sweep of `n_points` from `f_start` to `f_stop` inclusive.
/// Uniform grid of `n_points` over `[f_start, f_stop]`, both ends exact.
pub fn sweep_grid(f_start: f64, f_stop: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(f_start.is_finite() && f_stop.is_finite() && f_start > 0.0 && f_start < f_stop) {
        return Err(AcError::InvalidGrid(format!(
            "need 0 < f_start < f_stop, got ({f_start}, {f_stop})"
        )));
    }
    if n_points < 2 {
        return Err(AcError::InvalidGrid(format!(
            "need at least 2 points, got {n_points}"
        )));
    }
    let step = (f_stop - f_start) / (n_points - 1) as f64;
    let mut freqs: Vec<f64> = (0..n_points).map(|i| f_start + step * i as f64).collect();
    freqs[n_points - 1] = f_stop;
    Ok(freqs)
}

pub fn sweep(netlist: &Netlist, f_start: f64, f_stop: f64, n_points: usize) -> Result<FrequencyResponse> {
    sweep_frequencies(netlist, sweep_grid(f_start, f_stop, n_points)?)
}

/// Widest contiguous run of gain above a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub f_low: f64,
    pub f_high: f64,
    pub bandwidth: f64,
    pub min_gain_db: f64,
    pub max_gain_db: f64,
    pub ripple_db: f64,
}

/// Finds the widest contiguous interval with `gain_db >= threshold_db`.
///
/// Edges are interpolated linearly (dB against Hz) between the last point
/// below and the first point above the threshold; a run touching the end of
/// the grid stops at the grid end. Pole points split runs. Gain statistics
/// are taken over grid points inside the run.
pub fn band_report(resp: &FrequencyResponse, threshold_db: f64) -> Result<BandReport> {
    let f = resp.freqs();
    let g = resp.gain_db();
    let n = resp.len();
    let qualifies = |i: usize| !resp.is_pole(i) && g[i] >= threshold_db;

    let mut best: Option<BandReport> = None;
    let mut i = 0;
    while i < n {
        if !qualifies(i) {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n && qualifies(i + 1) {
            i += 1;
        }
        let end = i;
        i += 1;

        let crossing = |inside: usize, outside: usize| {
            if resp.is_pole(outside) {
                return f[inside];
            }
            let t = (threshold_db - g[outside]) / (g[inside] - g[outside]);
            f[outside] + t * (f[inside] - f[outside])
        };
        let f_low = if start > 0 {
            crossing(start, start - 1)
        } else {
            f[start]
        };
        let f_high = if end + 1 < n {
            crossing(end, end + 1)
        } else {
            f[end]
        };
        let run = &g[start..=end];
        let min_gain_db = run.iter().copied().fold(f64::INFINITY, f64::min);
        let max_gain_db = run.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let report = BandReport {
            f_low,
            f_high,
            bandwidth: f_high - f_low,
            min_gain_db,
            max_gain_db,
            ripple_db: max_gain_db - min_gain_db,
        };
        if best.is_none_or(|b| report.bandwidth > b.bandwidth) {
            best = Some(report);
        }
    }
    best.ok_or(AcError::EmptyBand { threshold_db })
}
