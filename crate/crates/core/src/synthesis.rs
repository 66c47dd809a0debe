//! Two-pole matching-network synthesis with capacitive admittance inverters.
//!
//! The prototype follows the reflection-amplifier convention: `g_0` is the
//! negative resistance, `g_1` the JPA resonator, `g_2` the auxiliary
//! resonator and `g_3` the port. Every resonator is a shunt LC; inverters
//! are realized as series capacitors whose shunt legs are absorbed into the
//! neighbouring resonator capacitance.
//!
//! ```text
//! port ─┬─[C01]─┬───────[C12]───────┬─────┐
//!       │      L2 ∥ C2'            Ls ∥ C1'  R < 0
//! ```

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chebyshev::PrototypeSpec;
use crate::netlist::{Element, Netlist, NetlistError};
use crate::snail::{self, FluxBias, SnailError, SnailParams};

/// Coupling capacitors below this are treated as no coupling at all.
pub const MIN_COUPLING_CAPACITANCE: f64 = 1e-18;
/// Shunt resonators below this characteristic impedance are hard to build
/// from distributed lines.
pub const SHUNT_IMPEDANCE_WARN: f64 = 15.0;
/// Series reactances above this are hard to build from distributed lines.
pub const SERIES_IMPEDANCE_WARN: f64 = 150.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SynthesisError {
    #[error("invalid design spec: {0}")]
    InvalidSpec(String),
    #[error("only two-resonator prototypes (order 2) can be synthesized, got order {0}")]
    UnsupportedOrder(usize),
    #[error("{name} coupling capacitance {value:e} F is below {MIN_COUPLING_CAPACITANCE:e} F")]
    ZeroCoupling { name: &'static str, value: f64 },
    #[error("absorbing coupling capacitance leaves {node} with {value:e} F")]
    NonPositiveShunt { node: &'static str, value: f64 },
    #[error(transparent)]
    Snail(#[from] SnailError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

pub type Result<T> = std::result::Result<T, SynthesisError>;

/// Design inputs. Frequencies in Hz, impedances in ohm, capacitance in F.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub f0: f64,
    /// Fractional bandwidth `(w2 - w1) / w0`.
    pub w: f64,
    pub prototype: PrototypeSpec,
    pub z_port: f64,
    pub snail: SnailParams,
    /// Flux bias; `None` tunes the bare JPA resonance onto `f0`.
    pub bias: Option<FluxBias>,
    pub c1_shunt: f64,
    pub z2: f64,
}

impl DesignSpec {
    /// Checks domain constraints. `w = 0` is accepted here and rejected by
    /// synthesis as a zero-coupling design.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SynthesisError::InvalidSpec(m));
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return bad(format!("f0 must be positive, got {}", self.f0));
        }
        if !(self.w.is_finite() && (0.0..1.0).contains(&self.w)) {
            return bad(format!("fractional bandwidth must lie in [0, 1), got {}", self.w));
        }
        if !(self.z_port.is_finite() && self.z_port > 0.0) {
            return bad(format!("port impedance must be positive, got {}", self.z_port));
        }
        if !(self.z2.is_finite() && self.z2 > 0.0) {
            return bad(format!("z2 must be positive, got {}", self.z2));
        }
        if !(self.c1_shunt.is_finite() && self.c1_shunt > 0.0) {
            return bad(format!("c1_shunt must be positive, got {}", self.c1_shunt));
        }
        Ok(())
    }

    /// Center and fractional bandwidth from band edges:
    /// `f0 = sqrt(f1 f2)`, `w = (f2 - f1) / f0`.
    pub fn center_and_width(f1: f64, f2: f64) -> Result<(f64, f64)> {
        if !(f1 > 0.0 && f2 > f1 && f2.is_finite()) {
            return Err(SynthesisError::InvalidSpec(format!(
                "band edges must satisfy 0 < f1 < f2, got ({f1}, {f2})"
            )));
        }
        let f0 = (f1 * f2).sqrt();
        Ok((f0, (f2 - f1) / f0))
    }

    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f0
    }
}

/// Characteristic impedance `1 / (w0 C)` of a resonator at `f0`.
pub fn resonator_impedance_from_c(f0: f64, c: f64) -> f64 {
    1.0 / (2.0 * PI * f0 * c)
}

/// Inverter constant `J = w / sqrt(g_i g_j Z_i Z_j)` (S).
pub fn inverter_constant(w: f64, g_i: f64, g_j: f64, z_i: f64, z_j: f64) -> f64 {
    w / (g_i * g_j * z_i * z_j).sqrt()
}

/// Series capacitor `J / w0` realizing an inverter at `f0`.
pub fn coupling_capacitance(j: f64, f0: f64) -> f64 {
    j / (2.0 * PI * f0)
}

/// Geometric-symmetric band edges with `sqrt(f1 f2) = f0`, `f2 - f1 = w f0`.
pub fn band_edges_from_w(f0: f64, w: f64) -> (f64, f64) {
    let root = (1.0 + w * w / 4.0).sqrt();
    (f0 * (root - w / 2.0), f0 * (root + w / 2.0))
}

/// End inverter between the auxiliary resonator and a resistive port:
/// `J = sqrt(w / (g_2 g_3 Z_2 Z_port))`.
pub fn port_inverter_constant(w: f64, g_2: f64, g_3: f64, z_2: f64, z_port: f64) -> f64 {
    (w / (g_2 * g_3 * z_2 * z_port)).sqrt()
}

/// How the port couples into the auxiliary resonator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PortCoupling {
    /// Port wired straight onto the resonator. Used when the required
    /// inverter satisfies `J Z_port >= 1`, which no series capacitor can
    /// reach. `q_ext = Z_port / Z_2`.
    Tap { j: f64, q_ext: f64 },
    /// Series capacitor `c` into the port; `absorbed` is its parallel
    /// equivalent capacitance at `f0`, removed from the resonator.
    Capacitor { j: f64, c: f64, absorbed: f64 },
}

/// Synthesized element values and the resulting netlist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Synthesis {
    pub netlist: Netlist,
    pub bias: FluxBias,
    pub l_s: f64,
    pub z1: f64,
    pub z2: f64,
    /// Auxiliary resonator before absorption.
    pub c2: f64,
    pub l2: f64,
    pub j12: f64,
    pub c12: f64,
    pub port: PortCoupling,
    pub c1_absorbed: f64,
    pub c2_absorbed: f64,
    /// Prototype negative resistance `-g_1 Z_1 / w`, the starting point for
    /// calibration.
    pub r_prototype: f64,
    pub warnings: Vec<String>,
}

pub fn synthesize(spec: &DesignSpec) -> Result<Netlist> {
    synthesize_detailed(spec).map(|s| s.netlist)
}

pub fn synthesize_detailed(spec: &DesignSpec) -> Result<Synthesis> {
    spec.validate()?;
    let proto = &spec.prototype;
    if proto.order() != 2 {
        return Err(SynthesisError::UnsupportedOrder(proto.order()));
    }
    let omega0 = spec.omega0();
    let mut warnings = Vec::new();

    let bias = match spec.bias {
        Some(b) => b,
        None => snail::bias_for_frequency(&spec.snail, spec.c1_shunt, spec.f0)?,
    };
    let op = snail::operating_point(&spec.snail, bias)?;
    if spec.snail.at_max_asymmetry() {
        warnings.push(format!(
            "alpha = 1/{} is the maximum asymmetry; the minimum flattens at half flux",
            spec.snail.n_large()
        ));
    }

    let z1 = resonator_impedance_from_c(spec.f0, spec.c1_shunt);
    let z2 = spec.z2;
    let c2 = 1.0 / (omega0 * z2);
    let l2 = z2 / omega0;

    let j12 = inverter_constant(spec.w, proto.g(1), proto.g(2), z1, z2);
    let c12 = coupling_capacitance(j12, spec.f0);
    if !(c12 >= MIN_COUPLING_CAPACITANCE) {
        return Err(SynthesisError::ZeroCoupling {
            name: "inter-resonator",
            value: c12,
        });
    }

    let j_port = port_inverter_constant(spec.w, proto.g(2), proto.g(3), z2, spec.z_port);
    let port = if j_port * spec.z_port >= 1.0 {
        let q_ext = spec.z_port / z2;
        warnings.push(format!(
            "port inverter J*Z0 = {:.4} >= 1: port taps resonator 2 directly (Q_ext {:.3} vs prototype {:.3})",
            j_port * spec.z_port,
            q_ext,
            proto.g(2) * proto.g(3) / spec.w
        ));
        PortCoupling::Tap { j: j_port, q_ext }
    } else {
        let x = j_port * spec.z_port;
        let c = j_port / (omega0 * (1.0 - x * x).sqrt());
        if !(c >= MIN_COUPLING_CAPACITANCE) {
            return Err(SynthesisError::ZeroCoupling {
                name: "port",
                value: c,
            });
        }
        let b = omega0 * c * spec.z_port;
        PortCoupling::Capacitor {
            j: j_port,
            c,
            absorbed: c / (1.0 + b * b),
        }
    };

    let port_absorbed = match port {
        PortCoupling::Tap { .. } => 0.0,
        PortCoupling::Capacitor { absorbed, .. } => absorbed,
    };
    let c2_absorbed = c2 - port_absorbed - c12;
    if !(c2_absorbed > 0.0) {
        return Err(SynthesisError::NonPositiveShunt {
            node: "resonator 2",
            value: c2_absorbed,
        });
    }
    let c1_absorbed = spec.c1_shunt - c12;
    if !(c1_absorbed > 0.0) {
        return Err(SynthesisError::NonPositiveShunt {
            node: "resonator 1 (JPA)",
            value: c1_absorbed,
        });
    }

    for (name, z) in [("resonator 1", z1), ("resonator 2", z2)] {
        if z < SHUNT_IMPEDANCE_WARN {
            warnings.push(format!(
                "{name} impedance {z:.3} ohm is below {SHUNT_IMPEDANCE_WARN} ohm (not realizable as a distributed line)"
            ));
        }
    }
    let mut series = vec![("C12", c12)];
    if let PortCoupling::Capacitor { c, .. } = port {
        series.push(("C01", c));
    }
    for (name, c) in series {
        let x = 1.0 / (omega0 * c);
        if x > SERIES_IMPEDANCE_WARN {
            warnings.push(format!(
                "{name} reactance {x:.3} ohm exceeds {SERIES_IMPEDANCE_WARN} ohm (not realizable as a distributed line)"
            ));
        }
    }

    let r_prototype = -proto.g(1) * z1 / spec.w;

    let mut elements = vec![Element::PortTermination { z0: spec.z_port }];
    if let PortCoupling::Capacitor { c, .. } = port {
        elements.push(Element::SeriesCapacitor { c });
    }
    elements.extend([
        Element::ShuntParallelLc {
            l: l2,
            c: c2_absorbed,
        },
        Element::SeriesCapacitor { c: c12 },
        Element::ShuntParallelLc {
            l: op.l_s,
            c: c1_absorbed,
        },
        Element::ShuntResistor { r: r_prototype },
    ]);
    let netlist = Netlist::new(elements)?;

    Ok(Synthesis {
        netlist,
        bias,
        l_s: op.l_s,
        z1,
        z2,
        c2,
        l2,
        j12,
        c12,
        port,
        c1_absorbed,
        c2_absorbed,
        r_prototype,
        warnings,
    })
}
