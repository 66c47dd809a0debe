use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{AcError, Result};
use crate::netlist::{Element, Netlist};

/// `|Z_in|` at or above this multiple of `Z0` is reported as an open circuit.
const OPEN_RATIO: f64 = 1e12;
/// `|Z_in + Z0|` at or below this fraction of `Z0` is a reflection pole.
const POLE_RATIO: f64 = 1e-12;

/// Chain matrix `[[a, b], [c, d]]`; `b` in ohm, `c` in siemens.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoPortAbcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl TwoPortAbcd {
    pub fn identity() -> Self {
        Self {
            a: Complex64::ONE,
            b: Complex64::ZERO,
            c: Complex64::ZERO,
            d: Complex64::ONE,
        }
    }

    pub fn series(z: Complex64) -> Self {
        Self {
            b: z,
            ..Self::identity()
        }
    }

    pub fn shunt(y: Complex64) -> Self {
        Self {
            c: y,
            ..Self::identity()
        }
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `self` followed by `next` (port side first).
    pub fn then(&self, next: &TwoPortAbcd) -> TwoPortAbcd {
        TwoPortAbcd {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }
}

pub fn abcd_of_element(element: &Element, f: f64) -> Result<TwoPortAbcd> {
    if !(f.is_finite() && f > 0.0) {
        return Err(AcError::InvalidFrequency(f));
    }
    let jw = Complex64::new(0.0, 2.0 * PI * f);
    match *element {
        Element::PortTermination { .. } => Err(AcError::NotTwoPort),
        Element::SeriesCapacitor { c } => {
            if c == 0.0 {
                return Err(AcError::SingularElement("series capacitor"));
            }
            Ok(TwoPortAbcd::series((jw * c).inv()))
        }
        Element::ShuntParallelLc { l, c } => {
            if l == 0.0 || c == 0.0 {
                return Err(AcError::SingularElement("shunt LC"));
            }
            Ok(TwoPortAbcd::shunt(jw * c + (jw * l).inv()))
        }
        Element::ShuntResistor { r } => {
            if r == 0.0 {
                return Err(AcError::SingularElement("shunt resistor"));
            }
            Ok(TwoPortAbcd::shunt(Complex64::new(1.0 / r, 0.0)))
        }
    }
}

/// Ordered product, port side first. An empty list is the identity.
pub fn cascade(parts: &[TwoPortAbcd]) -> TwoPortAbcd {
    parts.iter().fold(TwoPortAbcd::identity(), |acc, p| acc.then(p))
}

/// Impedance looking into the ladder; the far end is left open.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputImpedance {
    Finite(Complex64),
    Open,
}

impl InputImpedance {
    pub fn finite(&self) -> Option<Complex64> {
        match self {
            InputImpedance::Finite(z) => Some(*z),
            InputImpedance::Open => None,
        }
    }
}

/// `Z_in = a / c` of the cascaded two-ports (open load).
pub fn input_impedance(netlist: &Netlist, f: f64) -> Result<InputImpedance> {
    let mut total = TwoPortAbcd::identity();
    for e in netlist.two_ports() {
        total = total.then(&abcd_of_element(e, f)?);
    }
    if total.a.norm() >= OPEN_RATIO * netlist.z0() * total.c.norm() {
        Ok(InputImpedance::Open)
    } else {
        Ok(InputImpedance::Finite(total.a / total.c))
    }
}

/// `(Z_in - Z0) / (Z_in + Z0)`; an open input reflects exactly 1.
pub fn reflection(z_in: InputImpedance, z0: f64) -> Result<Complex64> {
    match z_in {
        InputImpedance::Open => Ok(Complex64::ONE),
        InputImpedance::Finite(z) => {
            let den = z + z0;
            if den.norm() <= POLE_RATIO * z0 {
                return Err(AcError::Pole { freq_hz: None });
            }
            Ok((z - z0) / den)
        }
    }
}
