//! SNAIL (asymmetric junction loop) model.
//!
//! The loop holds `n` large junctions of inductance `L_J` and one small
//! junction of inductance `L_J / alpha`. With the normalized potential
//!
//! ```text
//! U(phi) = -alpha cos(phi) - n cos((phi - phi_ext) / n)
//! ```
//!
//! the operating point is the minimum of `U`, and the linear inductance of the
//! element is `L_J / c2` where `c2 = U''(phi_min)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Samples used by the sign-change scan that brackets the potential minimum.
const SCAN_SAMPLES: usize = 1000;
/// Bisection stops once the bracket is narrower than this (radians).
const BISECTION_TOL: f64 = 1e-14;
const BISECTION_MAX_ITER: usize = 200;
/// Required accuracy of `U'(phi_min)`.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Relative tolerance under which two `|c3|` values count as a tie.
const TIE_REL_TOL: f64 = 1e-9;
/// Curvatures at or below this are treated as a flat (degenerate) minimum.
const DEGENERATE_C2: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SnailError {
    #[error("invalid SNAIL parameters: {0}")]
    InvalidParams(String),
    #[error("derivative order {0} is not supported (expected 1..=4)")]
    InvalidOrder(u32),
    #[error("no potential minimum found at phi/phi0 = {phi_over_phi0} (last residual {last_residual:e})")]
    NoMinimum { phi_over_phi0: f64, last_residual: f64 },
    #[error("degenerate minimum at phi/phi0 = {phi_over_phi0}: c2 = {c2:e}")]
    DegenerateMinimum { phi_over_phi0: f64, c2: f64 },
    #[error("shunt capacitance must be positive, got {0:e} F")]
    InvalidCapacitance(f64),
    #[error("flux grid is empty")]
    EmptyGrid,
    #[error("flux grid spans {0} flux quanta, more than one period")]
    GridTooWide(f64),
    #[error("no grid point has negative Kerr (c4 < 0)")]
    NoNegativeKerr,
    #[error("target frequency {target:e} Hz is outside the tunable range [{f_min:e}, {f_max:e}] Hz")]
    FrequencyOutOfRange { target: f64, f_min: f64, f_max: f64 },
}

pub type Result<T> = std::result::Result<T, SnailError>;

/// Junction parameters of a SNAIL loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSnailParams", into = "RawSnailParams")]
pub struct SnailParams {
    l_j: f64,
    alpha: f64,
    n_large: u32,
}

#[derive(Serialize, Deserialize)]
struct RawSnailParams {
    l_j: f64,
    alpha: f64,
    #[serde(default = "default_n_large")]
    n_large: u32,
}

fn default_n_large() -> u32 {
    3
}

impl TryFrom<RawSnailParams> for SnailParams {
    type Error = SnailError;

    fn try_from(raw: RawSnailParams) -> Result<Self> {
        SnailParams::new(raw.l_j, raw.alpha, raw.n_large)
    }
}

impl From<SnailParams> for RawSnailParams {
    fn from(p: SnailParams) -> Self {
        RawSnailParams {
            l_j: p.l_j,
            alpha: p.alpha,
            n_large: p.n_large,
        }
    }
}

impl SnailParams {
    /// Validates `l_j > 0`, `n_large >= 1` and `0 < alpha <= 1/n_large`.
    pub fn new(l_j: f64, alpha: f64, n_large: u32) -> Result<Self> {
        if !(l_j.is_finite() && l_j > 0.0) {
            return Err(SnailError::InvalidParams(format!(
                "l_j must be positive, got {l_j:e} H"
            )));
        }
        if n_large == 0 {
            return Err(SnailError::InvalidParams(
                "n_large must be at least 1".to_string(),
            ));
        }
        let max_alpha = 1.0 / f64::from(n_large);
        if !(alpha.is_finite() && alpha > 0.0 && alpha <= max_alpha) {
            return Err(SnailError::InvalidParams(format!(
                "alpha must lie in (0, 1/{n_large}], got {alpha}"
            )));
        }
        Ok(Self { l_j, alpha, n_large })
    }

    pub fn l_j(&self) -> f64 {
        self.l_j
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n_large(&self) -> u32 {
        self.n_large
    }

    /// True when `alpha` sits exactly on the maximum asymmetry `1/n`. Such a
    /// loop has a flat minimum at half a flux quantum.
    pub fn at_max_asymmetry(&self) -> bool {
        self.alpha == 1.0 / f64::from(self.n_large)
    }

    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.l_j, alpha, self.n_large)
    }

    fn n(&self) -> f64 {
        f64::from(self.n_large)
    }
}

/// External flux bias, stored in units of the flux quantum.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FluxBias {
    phi_over_phi0: f64,
}

impl FluxBias {
    pub fn new(phi_over_phi0: f64) -> Self {
        Self { phi_over_phi0 }
    }

    pub fn phi_over_phi0(&self) -> f64 {
        self.phi_over_phi0
    }

    /// Reduced external phase `2 pi Phi / Phi0`.
    pub fn phi_ext(&self) -> f64 {
        2.0 * PI * self.phi_over_phi0
    }

    /// `count` evenly spaced points over `[start, stop]` (flux quanta).
    pub fn grid(start: f64, stop: f64, count: usize) -> Vec<FluxBias> {
        match count {
            0 => Vec::new(),
            1 => vec![FluxBias::new(start)],
            _ => {
                let step = (stop - start) / (count - 1) as f64;
                (0..count)
                    .map(|i| FluxBias::new(start + step * i as f64))
                    .collect()
            }
        }
    }
}

/// Solved operating point of the SNAIL at one flux bias.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxOperatingPoint {
    pub bias: FluxBias,
    /// Phase across the large-junction array at the potential minimum (rad).
    pub phi_min: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    /// Effective linear inductance `l_j / c2` (H).
    pub l_s: f64,
}

/// `k`-th derivative of the normalized potential at `phi`, for `k` in 1..=4.
pub fn potential_derivative(params: &SnailParams, phi: f64, phi_ext: f64, order: u32) -> Result<f64> {
    if !(1..=4).contains(&order) {
        return Err(SnailError::InvalidOrder(order));
    }
    Ok(derivative(params, phi, phi_ext, order))
}

fn derivative(params: &SnailParams, phi: f64, phi_ext: f64, order: u32) -> f64 {
    let n = params.n();
    let a = params.alpha;
    let inner = (phi - phi_ext) / n;
    match order {
        1 => a * phi.sin() + inner.sin(),
        2 => a * phi.cos() + inner.cos() / n,
        3 => -a * phi.sin() - inner.sin() / (n * n),
        4 => -a * phi.cos() - inner.cos() / (n * n * n),
        _ => unreachable!("order validated by caller"),
    }
}

/// Locates the potential minimum at the given bias.
///
/// A sign-change scan of `U'` over one period of the potential,
/// `[phi_ext - n pi, phi_ext + n pi]`, brackets the upward crossings; each is
/// refined by bisection. For `alpha < 1/n` there is a single minimum per
/// period, which is the branch that starts at `phi_min = 0` for zero flux.
pub fn solve_phi_min(params: &SnailParams, bias: FluxBias) -> Result<f64> {
    let phi_ext = bias.phi_ext();
    let half_width = params.n() * PI;
    let lo = phi_ext - half_width;
    let step = 2.0 * half_width / (SCAN_SAMPLES - 1) as f64;
    let c1 = |phi: f64| derivative(params, phi, phi_ext, 1);

    let mut best: Option<(f64, f64)> = None;
    let mut last_residual = f64::INFINITY;
    let mut prev_x = lo;
    let mut prev_v = c1(lo);
    for i in 1..SCAN_SAMPLES {
        let x = lo + step * i as f64;
        let v = c1(x);
        if prev_v < 0.0 && v >= 0.0 {
            let root = if v == 0.0 { x } else { bisect(&c1, prev_x, x) };
            let residual = c1(root).abs();
            last_residual = residual;
            let curvature = derivative(params, root, phi_ext, 2);
            if residual < RESIDUAL_TOL && curvature > 0.0 {
                let distance = (root - phi_ext).abs();
                if best.is_none_or(|(_, d)| distance < d) {
                    best = Some((root, distance));
                }
            }
        }
        prev_x = x;
        prev_v = v;
    }

    best.map(|(root, _)| root).ok_or(SnailError::NoMinimum {
        phi_over_phi0: bias.phi_over_phi0,
        last_residual,
    })
}

fn bisect(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    // f(lo) < 0 <= f(hi)
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo < BISECTION_TOL || mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if v == 0.0 {
            return mid;
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if f(lo).abs() < f(hi).abs() {
        lo
    } else {
        hi
    }
}

pub fn operating_point(params: &SnailParams, bias: FluxBias) -> Result<FluxOperatingPoint> {
    let phi_min = solve_phi_min(params, bias)?;
    let phi_ext = bias.phi_ext();
    let c2 = derivative(params, phi_min, phi_ext, 2);
    if !(c2 > DEGENERATE_C2) {
        return Err(SnailError::DegenerateMinimum {
            phi_over_phi0: bias.phi_over_phi0,
            c2,
        });
    }
    Ok(FluxOperatingPoint {
        bias,
        phi_min,
        c2,
        c3: derivative(params, phi_min, phi_ext, 3),
        c4: derivative(params, phi_min, phi_ext, 4),
        l_s: params.l_j / c2,
    })
}

/// Resonance of the SNAIL shunted by `c1_shunt`, ignoring any external loading.
pub fn bare_frequency(params: &SnailParams, bias: FluxBias, c1_shunt: f64) -> Result<f64> {
    if !(c1_shunt.is_finite() && c1_shunt > 0.0) {
        return Err(SnailError::InvalidCapacitance(c1_shunt));
    }
    let op = operating_point(params, bias)?;
    Ok(1.0 / (2.0 * PI * (op.l_s * c1_shunt).sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunableRange {
    pub f_min: f64,
    pub f_max: f64,
    /// `(phi_over_phi0, frequency_hz)` in grid order.
    pub curve: Vec<(f64, f64)>,
}

impl TunableRange {
    pub fn width(&self) -> f64 {
        self.f_max - self.f_min
    }
}

/// Bare frequency over a flux grid spanning at most one flux quantum.
pub fn tunable_range(params: &SnailParams, c1_shunt: f64, flux_grid: &[FluxBias]) -> Result<TunableRange> {
    check_grid(flux_grid)?;
    let curve = flux_grid
        .iter()
        .map(|&b| bare_frequency(params, b, c1_shunt).map(|f| (b.phi_over_phi0, f)))
        .collect::<Result<Vec<_>>>()?;
    let f_min = curve.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let f_max = curve.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(TunableRange { f_min, f_max, curve })
}

fn check_grid(flux_grid: &[FluxBias]) -> Result<()> {
    if flux_grid.is_empty() {
        return Err(SnailError::EmptyGrid);
    }
    let lo = flux_grid
        .iter()
        .map(|b| b.phi_over_phi0)
        .fold(f64::INFINITY, f64::min);
    let hi = flux_grid
        .iter()
        .map(|b| b.phi_over_phi0)
        .fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 1.0 + 1e-12 {
        return Err(SnailError::GridTooWide(hi - lo));
    }
    Ok(())
}

/// Grid point with the strongest three-wave mixing (`|c3|`) among points
/// with negative Kerr (`c4 < 0`).
///
/// Ties (equal `|c3|` within 1e-9 relative) go to the smaller `|Phi|`, then
/// to the non-negative bias.
pub fn find_3wm_operating_point(params: &SnailParams, flux_grid: &[FluxBias]) -> Result<FluxBias> {
    if flux_grid.is_empty() {
        return Err(SnailError::EmptyGrid);
    }
    let mut best: Option<(FluxBias, f64)> = None;
    for &bias in flux_grid {
        let op = operating_point(params, bias)?;
        if op.c4 >= 0.0 {
            continue;
        }
        let strength = op.c3.abs();
        best = match best {
            None => Some((bias, strength)),
            Some((b, s)) => {
                let scale = s.max(strength).max(f64::MIN_POSITIVE);
                if (strength - s).abs() <= TIE_REL_TOL * scale {
                    if prefer_on_tie(bias, b) {
                        Some((bias, strength))
                    } else {
                        Some((b, s))
                    }
                } else if strength > s {
                    Some((bias, strength))
                } else {
                    Some((b, s))
                }
            }
        };
    }
    best.map(|(b, _)| b).ok_or(SnailError::NoNegativeKerr)
}

fn prefer_on_tie(candidate: FluxBias, incumbent: FluxBias) -> bool {
    let (c, i) = (candidate.phi_over_phi0, incumbent.phi_over_phi0);
    if c.abs() != i.abs() {
        c.abs() < i.abs()
    } else {
        c >= 0.0 && i < 0.0
    }
}

/// Flux bias in `[0, 0.5]` flux quanta that tunes the bare resonance to
/// `target_hz`. The bare frequency falls monotonically over that interval.
pub fn bias_for_frequency(params: &SnailParams, c1_shunt: f64, target_hz: f64) -> Result<FluxBias> {
    let freq = |x: f64| bare_frequency(params, FluxBias::new(x), c1_shunt);
    let (mut lo, mut hi) = (0.0, 0.5);
    let f_max = freq(lo)?;
    let f_min = freq(hi)?;
    if !(target_hz >= f_min && target_hz <= f_max) {
        return Err(SnailError::FrequencyOutOfRange {
            target: target_hz,
            f_min,
            f_max,
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-15 || mid <= lo || mid >= hi {
            break;
        }
        if freq(mid)? > target_hz {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(FluxBias::new(0.5 * (lo + hi)))
}
