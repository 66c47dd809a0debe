//! Stability analysis and negative-resistance calibration.
//!
//! The closed loop formed by the port resistance and the ladder has a
//! tridiagonal nodal admittance matrix `Y(s)`. Multiplying every row by
//! `s` turns it into a polynomial matrix whose determinant vanishes at the
//! natural frequencies; the circuit oscillates once any of them crosses
//! into the right half plane.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::response::sweep_frequencies;
use super::{AcError, Result};
use crate::netlist::{Element, Netlist};

/// Real parts up to this fraction of `|s|` count as marginal, not growing.
const MARGINAL_RE: f64 = 1e-9;
/// Coefficients below this fraction of the largest one are dropped.
const COEFF_EPS: f64 = 1e-13;

/// `|R|` search window, as multiples of the port impedance.
const R_SCAN_HI: f64 = 1e6;
const R_SCAN_LO: f64 = 1e-6;
const R_SCAN_STEPS: usize = 480;
/// Samples of the min-gain curve over the stable segment.
const PEAK_SAMPLES: usize = 240;
/// Stop bisection on the gain target at this residual (dB).
const GAIN_TOL_DB: f64 = 1e-9;

type Poly = Vec<f64>;

fn poly_mul(a: &[f64], b: &[f64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_sub(a: &[f64], b: &[f64]) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    out
}

/// Characteristic polynomial in `x = s / w_ref` (ascending powers), with
/// admittances normalized to the port impedance.
fn characteristic_polynomial(netlist: &Netlist, f_ref: f64) -> Poly {
    let w_ref = 2.0 * PI * f_ref;
    let z_ref = netlist.z0();
    let nodes = netlist.nodes();

    // x * y(x) for every node, quadratic in x
    let mut diag: Vec<Poly> = vec![vec![0.0; 3]; nodes.len()];
    let mut off: Vec<Poly> = Vec::with_capacity(nodes.len().saturating_sub(1));
    diag[0][1] += 1.0; // port conductance z_ref / z0
    for (k, node) in nodes.iter().enumerate() {
        for shunt in &node.shunts {
            match *shunt {
                Element::ShuntParallelLc { l, c } => {
                    diag[k][2] += w_ref * c * z_ref;
                    diag[k][0] += z_ref / (w_ref * l);
                }
                Element::ShuntResistor { r } => diag[k][1] += z_ref / r,
                Element::SeriesCapacitor { .. } | Element::PortTermination { .. } => {}
            }
        }
        if let Some(c) = node.series_to_next {
            let b = w_ref * c * z_ref;
            diag[k][2] += b;
            diag[k + 1][2] += b;
            off.push(vec![0.0, 0.0, -b]);
        }
    }

    // continuant of the tridiagonal matrix
    let mut before: Poly = vec![1.0];
    let mut current = diag[0].clone();
    for k in 1..nodes.len() {
        let coupling = poly_mul(&off[k - 1], &off[k - 1]);
        let next = poly_sub(&poly_mul(&diag[k], &current), &poly_mul(&coupling, &before));
        before = std::mem::replace(&mut current, next);
    }
    current
}

/// Natural frequencies of the port-terminated ladder in units of
/// `2 pi f_ref` (complex `s / w_ref`). Modes pinned at DC are omitted.
pub fn natural_frequencies(netlist: &Netlist, f_ref: f64) -> Result<Vec<Complex64>> {
    if !(f_ref.is_finite() && f_ref > 0.0) {
        return Err(AcError::InvalidFrequency(f_ref));
    }
    let poly = trimmed(characteristic_polynomial(netlist, f_ref));
    Ok(roots(&poly))
}

fn trimmed(mut poly: Poly) -> Poly {
    let scale = poly.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if scale == 0.0 {
        return vec![0.0];
    }
    while poly.len() > 1 && poly.last().is_some_and(|c| c.abs() <= COEFF_EPS * scale) {
        poly.pop();
    }
    let zeros_at_dc = poly
        .iter()
        .take_while(|c| c.abs() <= COEFF_EPS * scale)
        .count()
        .min(poly.len() - 1);
    poly.drain(..zeros_at_dc);
    poly
}

fn roots(poly: &[f64]) -> Vec<Complex64> {
    let degree = poly.len() - 1;
    if degree == 0 {
        return Vec::new();
    }
    let lead = poly[degree];
    let companion = DMatrix::from_fn(degree, degree, |i, j| {
        if i == 0 {
            -poly[degree - 1 - j] / lead
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    companion.complex_eigenvalues().iter().copied().collect()
}

/// True when no natural frequency grows. A circuit without reactive
/// nodes is stable when its net conductance is positive.
pub fn is_stable(netlist: &Netlist, f_ref: f64) -> Result<bool> {
    if !(f_ref.is_finite() && f_ref > 0.0) {
        return Err(AcError::InvalidFrequency(f_ref));
    }
    let poly = trimmed(characteristic_polynomial(netlist, f_ref));
    if poly.len() == 1 {
        return Ok(poly[0] > 0.0);
    }
    Ok(roots(&poly)
        .iter()
        .all(|r| r.re <= MARGINAL_RE * r.norm().max(1.0)))
}

/// Frequencies at which the in-band minimum gain is evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationBand {
    pub f_low: f64,
    pub f_high: f64,
    freqs: Vec<f64>,
}

impl CalibrationBand {
    /// Uniform grid of `points` over `[f_low, f_high]`, both ends included.
    pub fn new(f_low: f64, f_high: f64, points: usize) -> Result<Self> {
        check_edges(f_low, f_high)?;
        if points < 2 {
            return Err(AcError::InvalidGrid(format!(
                "calibration band needs 2+ points, got {points}"
            )));
        }
        let step = (f_high - f_low) / (points - 1) as f64;
        let mut freqs: Vec<f64> = (0..points).map(|i| f_low + step * i as f64).collect();
        freqs[points - 1] = f_high;
        Ok(Self { f_low, f_high, freqs })
    }

    /// The points of an existing sweep grid that fall inside `[f_low, f_high]`.
    /// Calibrating on these makes the calibrated minimum exact on that sweep.
    pub fn on_grid(grid: &[f64], f_low: f64, f_high: f64) -> Result<Self> {
        check_edges(f_low, f_high)?;
        let freqs: Vec<f64> = grid
            .iter()
            .copied()
            .filter(|f| (f_low..=f_high).contains(f))
            .collect();
        if freqs.len() < 2 {
            return Err(AcError::InvalidGrid(format!(
                "fewer than 2 grid points inside [{f_low}, {f_high}] Hz"
            )));
        }
        Ok(Self { f_low, f_high, freqs })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }
}

fn check_edges(f_low: f64, f_high: f64) -> Result<()> {
    if f_low > 0.0 && f_high > f_low && f_high.is_finite() {
        Ok(())
    } else {
        Err(AcError::InvalidGrid(format!(
            "calibration band needs 0 < f_low < f_high, got ({f_low}, {f_high})"
        )))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Calibration {
    /// Calibrated negative resistance (ohm).
    pub r: f64,
    pub achieved_min_gain_db: f64,
    /// Resistance at which the circuit starts to oscillate (ohm, negative).
    pub threshold_r: f64,
    /// Largest min-gain reachable on the stable side.
    pub max_min_gain_db: f64,
    pub netlist: Netlist,
}

struct Placeholder<'a> {
    netlist: &'a Netlist,
    index: usize,
}

impl Placeholder<'_> {
    fn with(&self, magnitude: f64) -> Result<Netlist> {
        self.netlist
            .with_resistor(self.index, -magnitude)
            .map_err(|e| AcError::Calibration(e.to_string()))
    }
}

fn placeholder(netlist: &Netlist) -> Result<Placeholder<'_>> {
    let index = netlist.final_node_resistor().ok_or(AcError::NoPlaceholder)?;
    Ok(Placeholder { netlist, index })
}

/// Minimum gain over the band with the final-node resistor set to `r`.
/// Pole points count as infinite gain.
pub fn min_gain_in_band(netlist: &Netlist, band: &CalibrationBand, r: f64) -> Result<f64> {
    let p = placeholder(netlist)?;
    let n = p
        .netlist
        .with_resistor(p.index, r)
        .map_err(|e| AcError::Calibration(e.to_string()))?;
    min_gain(&n, band.freqs())
}

fn min_gain(netlist: &Netlist, freqs: &[f64]) -> Result<f64> {
    let resp = sweep_frequencies(netlist, freqs.to_vec())?;
    Ok(resp.gain_db().iter().copied().fold(f64::INFINITY, f64::min))
}

fn log_grid(hi: f64, lo: f64, steps: usize) -> impl Iterator<Item = f64> {
    let ratio = (lo / hi).ln() / steps as f64;
    (0..=steps).map(move |i| hi * (ratio * i as f64).exp())
}

/// Negative resistance (ohm) at which the ladder starts to oscillate when
/// `|R|` is lowered from a weak value. `None` if it stays stable over the
/// whole search window.
pub fn oscillation_threshold(netlist: &Netlist, f_ref: f64) -> Result<Option<f64>> {
    let p = placeholder(netlist)?;
    let z0 = netlist.z0();
    let stable = |m: f64| -> Result<bool> { is_stable(&p.with(m)?, f_ref) };

    let hi = R_SCAN_HI * z0;
    if !stable(hi)? {
        return Err(AcError::Calibration(format!("unstable even at R = -{hi:e} ohm")));
    }
    let mut last_stable = hi;
    for m in log_grid(hi, R_SCAN_LO * z0, R_SCAN_STEPS).skip(1) {
        if stable(m)? {
            last_stable = m;
            continue;
        }
        let (mut s, mut u) = (last_stable, m);
        while (s - u) > 1e-12 * s {
            let mid = 0.5 * (s + u);
            if stable(mid)? {
                s = mid;
            } else {
                u = mid;
            }
        }
        return Ok(Some(-s));
    }
    Ok(None)
}

/// Finds `R < 0` at the final node such that the minimum gain over `band`
/// equals `target_min_gain_db`.
///
/// The search stays on the stable side of the oscillation threshold and on
/// the segment where the in-band minimum gain rises as `|R|` falls.
pub fn calibrate_negative_resistance(
    netlist: &Netlist,
    f0: f64,
    target_min_gain_db: f64,
    band: &CalibrationBand,
) -> Result<Calibration> {
    let p = placeholder(netlist)?;
    let z0 = netlist.z0();
    let freqs = band.freqs();
    let gain_at = |m: f64| -> Result<f64> { min_gain(&p.with(m)?, freqs) };

    let hi = R_SCAN_HI * z0;
    let threshold = oscillation_threshold(netlist, f0)?;
    let lo = threshold.map_or(R_SCAN_LO * z0, |t| -t * (1.0 + 1e-6));

    // peak of the min-gain curve over the stable segment
    let mut peak = (hi, gain_at(hi)?);
    for m in log_grid(hi, lo, PEAK_SAMPLES).skip(1) {
        let g = gain_at(m)?;
        if g > peak.1 {
            peak = (m, g);
        }
    }
    if target_min_gain_db > peak.1 {
        return Err(AcError::Unreachable {
            target_db: target_min_gain_db,
            achievable_db: peak.1,
        });
    }
    let weakest = gain_at(hi)?;
    if target_min_gain_db < weakest {
        return Err(AcError::Calibration(format!(
            "target {target_min_gain_db} dB is below the {weakest:.3e} dB reached at R = -{hi:e} ohm"
        )));
    }

    // bisection in log|R| between the weak end and the peak; the strong end
    // always meets the target
    let (mut weak, mut strong) = (hi.ln(), peak.0.ln());
    let mut best = peak;
    for _ in 0..200 {
        if best.1 - target_min_gain_db <= GAIN_TOL_DB || (weak - strong).abs() < 1e-15 {
            break;
        }
        let mid = 0.5 * (weak + strong);
        let g = gain_at(mid.exp())?;
        if g < target_min_gain_db {
            weak = mid;
        } else {
            strong = mid;
            best = (mid.exp(), g);
        }
    }

    let calibrated = p.with(best.0)?;
    if !is_stable(&calibrated, f0)? {
        return Err(AcError::Calibration(format!(
            "calibrated R = -{} ohm is not stable",
            best.0
        )));
    }
    Ok(Calibration {
        r: -best.0,
        achieved_min_gain_db: best.1,
        threshold_r: threshold.unwrap_or(-R_SCAN_LO * z0),
        max_min_gain_db: peak.1,
        netlist: calibrated,
    })
}
