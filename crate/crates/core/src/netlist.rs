//! One-port ladder netlists and their `netlist-v1` JSON form.

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const NETLIST_SCHEMA: &str = "netlist-v1";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetlistError {
    #[error("netlist must start with exactly one port termination")]
    PortPlacement,
    #[error("element {index} ({kind}): {reason}")]
    InvalidElement {
        index: usize,
        kind: &'static str,
        reason: String,
    },
    #[error("negative resistance at element {index} is not on the final node")]
    NegativeResistorPlacement { index: usize },
    #[error("netlist holds {0} negative resistors, at most one is allowed")]
    TooManyNegativeResistors(usize),
    #[error("unsupported netlist schema {0:?}, expected \"netlist-v1\"")]
    Schema(String),
    #[error("malformed netlist JSON: {0}")]
    Json(String),
}

/// Ladder element, listed from the port towards the open far end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Element {
    /// Reference impedance of the measurement port (ohm).
    PortTermination { z0: f64 },
    /// Series capacitor that starts a new node (F).
    SeriesCapacitor { c: f64 },
    /// Parallel LC to ground at the current node (H, F).
    ShuntParallelLc { l: f64, c: f64 },
    /// Resistor to ground at the current node (ohm); may be negative.
    ShuntResistor { r: f64 },
}

impl Element {
    pub fn kind(&self) -> &'static str {
        match self {
            Element::PortTermination { .. } => "port_termination",
            Element::SeriesCapacitor { .. } => "series_capacitor",
            Element::ShuntParallelLc { .. } => "shunt_parallel_lc",
            Element::ShuntResistor { .. } => "shunt_resistor",
        }
    }

    pub fn is_reactive(&self) -> bool {
        matches!(
            self,
            Element::SeriesCapacitor { .. } | Element::ShuntParallelLc { .. }
        )
    }
}

/// Shunt contents of one ladder node.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Node {
    pub shunts: Vec<Element>,
    /// Capacitor joining this node to the next one, if any.
    pub series_to_next: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Netlist {
    schema: &'static str,
    elements: Vec<Element>,
}

#[derive(Deserialize)]
struct RawNetlist {
    schema: String,
    elements: Vec<Element>,
}

impl<'de> Deserialize<'de> for Netlist {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawNetlist::deserialize(deserializer)?;
        if raw.schema != NETLIST_SCHEMA {
            return Err(serde::de::Error::custom(NetlistError::Schema(raw.schema)));
        }
        Netlist::new(raw.elements).map_err(serde::de::Error::custom)
    }
}

fn positive(v: f64) -> bool {
    v.is_finite() && v > 0.0
}

impl Netlist {
    pub fn new(elements: Vec<Element>) -> Result<Self, NetlistError> {
        if !matches!(elements.first(), Some(Element::PortTermination { .. })) {
            return Err(NetlistError::PortPlacement);
        }
        let last_series = elements
            .iter()
            .rposition(|e| matches!(e, Element::SeriesCapacitor { .. }));
        let mut negatives = 0;
        for (index, e) in elements.iter().enumerate() {
            let bad = |reason: &str| NetlistError::InvalidElement {
                index,
                kind: e.kind(),
                reason: reason.to_string(),
            };
            match *e {
                Element::PortTermination { z0 } => {
                    if index != 0 {
                        return Err(NetlistError::PortPlacement);
                    }
                    if !positive(z0) {
                        return Err(bad("port impedance must be positive"));
                    }
                }
                Element::SeriesCapacitor { c } => {
                    if !positive(c) {
                        return Err(bad("capacitance must be positive"));
                    }
                }
                Element::ShuntParallelLc { l, c } => {
                    if !positive(l) || !positive(c) {
                        return Err(bad("inductance and capacitance must be positive"));
                    }
                }
                Element::ShuntResistor { r } => {
                    if !(r.is_finite() && r != 0.0) {
                        return Err(bad("resistance must be finite and non-zero"));
                    }
                    if r < 0.0 {
                        negatives += 1;
                        if last_series.is_some_and(|s| s > index) {
                            return Err(NetlistError::NegativeResistorPlacement { index });
                        }
                    }
                }
            }
        }
        if negatives > 1 {
            return Err(NetlistError::TooManyNegativeResistors(negatives));
        }
        Ok(Self {
            schema: NETLIST_SCHEMA,
            elements,
        })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// Everything after the port termination.
    pub fn two_ports(&self) -> &[Element] {
        &self.elements[1..]
    }

    pub fn z0(&self) -> f64 {
        match self.elements[0] {
            Element::PortTermination { z0 } => z0,
            _ => unreachable!("validated on construction"),
        }
    }

    /// Groups the ladder into nodes; node 0 is the port node.
    pub fn nodes(&self) -> Vec<Node> {
        let mut nodes = vec![Node::default()];
        for e in self.two_ports() {
            match *e {
                Element::SeriesCapacitor { c } => {
                    nodes.last_mut().expect("non-empty").series_to_next = Some(c);
                    nodes.push(Node::default());
                }
                other => nodes.last_mut().expect("non-empty").shunts.push(other),
            }
        }
        nodes
    }

    /// Index of the single shunt resistor on the final node.
    pub fn final_node_resistor(&self) -> Option<usize> {
        let last_series = self
            .elements
            .iter()
            .rposition(|e| matches!(e, Element::SeriesCapacitor { .. }))
            .unwrap_or(0);
        let mut found = self.elements[last_series..]
            .iter()
            .enumerate()
            .filter(|(_, e)| matches!(e, Element::ShuntResistor { .. }))
            .map(|(i, _)| i + last_series);
        match (found.next(), found.next()) {
            (Some(i), None) => Some(i),
            _ => None,
        }
    }

    pub fn has_negative_resistance(&self) -> bool {
        self.elements
            .iter()
            .any(|e| matches!(e, Element::ShuntResistor { r } if *r < 0.0))
    }

    /// Copy with the element at `index` replaced by a resistor `r`.
    pub fn with_resistor(&self, index: usize, r: f64) -> Result<Self, NetlistError> {
        let mut elements = self.elements.clone();
        elements[index] = Element::ShuntResistor { r };
        Netlist::new(elements)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("netlist serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, NetlistError> {
        serde_json::from_str(text).map_err(|e| NetlistError::Json(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn port() -> Element {
        Element::PortTermination { z0: 50.0 }
    }

    #[test]
    fn port_must_lead() {
        assert_eq!(
            Netlist::new(vec![Element::SeriesCapacitor { c: 1e-12 }]),
            Err(NetlistError::PortPlacement)
        );
        assert_eq!(Netlist::new(vec![]), Err(NetlistError::PortPlacement));
        assert_eq!(
            Netlist::new(vec![port(), port()]),
            Err(NetlistError::PortPlacement)
        );
    }

    #[test]
    fn rejects_non_positive_reactances() {
        let err = Netlist::new(vec![port(), Element::ShuntParallelLc { l: 1e-9, c: 0.0 }]);
        assert!(matches!(err, Err(NetlistError::InvalidElement { index: 1, .. })));
        let err = Netlist::new(vec![port(), Element::ShuntResistor { r: 0.0 }]);
        assert!(matches!(err, Err(NetlistError::InvalidElement { .. })));
    }

    #[test]
    fn negative_resistor_only_on_final_node() {
        let ok = Netlist::new(vec![
            port(),
            Element::SeriesCapacitor { c: 1e-12 },
            Element::ShuntResistor { r: -20.0 },
            Element::ShuntParallelLc { l: 1e-9, c: 1e-12 },
        ]);
        assert!(ok.is_ok());
        let err = Netlist::new(vec![
            port(),
            Element::ShuntResistor { r: -20.0 },
            Element::SeriesCapacitor { c: 1e-12 },
        ]);
        assert_eq!(err, Err(NetlistError::NegativeResistorPlacement { index: 1 }));
        let err = Netlist::new(vec![
            port(),
            Element::ShuntResistor { r: -20.0 },
            Element::ShuntResistor { r: -30.0 },
        ]);
        assert_eq!(err, Err(NetlistError::TooManyNegativeResistors(2)));
    }

    #[test]
    fn nodes_and_placeholder() {
        let n = Netlist::new(vec![
            port(),
            Element::ShuntParallelLc { l: 1e-9, c: 1e-12 },
            Element::SeriesCapacitor { c: 2e-13 },
            Element::ShuntParallelLc { l: 2e-9, c: 3e-12 },
            Element::ShuntResistor { r: -30.0 },
        ])
        .unwrap();
        let nodes = n.nodes();
        assert_eq!(nodes.len(), 2);
        assert_eq!(nodes[0].series_to_next, Some(2e-13));
        assert_eq!(nodes[1].shunts.len(), 2);
        assert_eq!(n.final_node_resistor(), Some(4));
        let updated = n.with_resistor(4, -25.0).unwrap();
        assert_eq!(updated.elements()[4], Element::ShuntResistor { r: -25.0 });
    }

    #[test]
    fn json_round_trip_and_schema() {
        let n = Netlist::new(vec![
            port(),
            Element::SeriesCapacitor { c: 7.064e-13 },
            Element::ShuntParallelLc {
                l: 1.14e-10,
                c: 4.54e-12,
            },
            Element::ShuntResistor { r: -33.75 },
        ])
        .unwrap();
        let text = n.to_json();
        assert!(text.contains("\"schema\": \"netlist-v1\""));
        assert!(text.contains("\"kind\": \"shunt_parallel_lc\""));
        assert_eq!(Netlist::from_json(&text).unwrap(), n);

        let wrong = text.replace("netlist-v1", "netlist-v0");
        assert!(matches!(Netlist::from_json(&wrong), Err(NetlistError::Json(_))));
        let invalid = text.replace("-33.75", "0.0");
        assert!(Netlist::from_json(&invalid).is_err());
    }
}
